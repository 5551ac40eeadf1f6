//! Polynomial scalar potential V(|φ|, N) = Σ_{m,q} α_mq |φ|^{2m} N^q with
//! m ≥ 1, q ≥ 1, and its two partial derivatives.
//!
//! ∂V/∂φ̄ is the Wirtinger derivative, Σ α_mq m |φ|^{2(m−1)} φ N^q — the
//! convention under which the φ wave equation is the Euler–Lagrange
//! stationarity condition. No positivity is imposed on the coefficients.

use crate::error::{CoreError, Result};
use crate::grid::{assert_same_grid, ComplexField, ScalarField};

/// One α_mq entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialTerm {
    pub m: u32,
    pub q: u32,
    pub coeff: f64,
}

/// Coefficient table of the potential plus the Chern–Simons constant κ
/// (housed here for configuration convenience).
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    terms: Vec<PotentialTerm>,
    pub kappa: f64,
}

impl PotentialSpec {
    /// An empty table (V ≡ 0) is allowed; every present term needs
    /// m ≥ 1, q ≥ 1 and a finite coefficient, and κ must be positive.
    pub fn new(terms: Vec<PotentialTerm>, kappa: f64) -> Result<PotentialSpec> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(CoreError::InvalidInput(format!(
                "kappa must be positive and finite (got {kappa})"
            )));
        }
        for t in &terms {
            if t.m < 1 || t.q < 1 {
                return Err(CoreError::InvalidInput(format!(
                    "potential term (m={}, q={}) out of range: m >= 1 and q >= 1 required",
                    t.m, t.q
                )));
            }
            if !t.coeff.is_finite() {
                return Err(CoreError::InvalidInput(format!(
                    "potential coefficient alpha_({},{}) is not finite",
                    t.m, t.q
                )));
            }
        }
        for (i, a) in terms.iter().enumerate() {
            if terms[i + 1..].iter().any(|b| a.m == b.m && a.q == b.q) {
                return Err(CoreError::InvalidInput(format!(
                    "duplicate potential term (m={}, q={})",
                    a.m, a.q
                )));
            }
        }
        Ok(PotentialSpec { terms, kappa })
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    /// True when some direction in (|φ|, N) space sends V to −∞
    /// (any odd-q term, or a negative coefficient).
    pub fn unbounded_below(&self) -> bool {
        self.terms.iter().any(|t| t.q % 2 == 1 || t.coeff < 0.0)
    }
}

/// Pointwise V = Σ α_mq |φ|^{2m} N^q.
pub fn eval_v(phi: &ComplexField, n: &ScalarField, spec: &PotentialSpec) -> ScalarField {
    assert_same_grid(phi.grid(), n.grid());
    let mut out = ScalarField::zeros(phi.grid().clone());
    for ((o, p), &nv) in out.data_mut().iter_mut().zip(phi.data()).zip(n.data()) {
        let r2 = p.norm_sqr();
        let mut acc = 0.0;
        for t in &spec.terms {
            acc += t.coeff * r2.powi(t.m as i32) * nv.powi(t.q as i32);
        }
        *o = acc;
    }
    out
}

/// Wirtinger derivative ∂V/∂φ̄ = Σ α_mq m |φ|^{2(m−1)} φ N^q.
pub fn dv_dphi(phi: &ComplexField, n: &ScalarField, spec: &PotentialSpec) -> ComplexField {
    assert_same_grid(phi.grid(), n.grid());
    let mut out = ComplexField::zeros(phi.grid().clone());
    for ((o, p), &nv) in out.data_mut().iter_mut().zip(phi.data()).zip(n.data()) {
        let r2 = p.norm_sqr();
        let mut acc = 0.0;
        for t in &spec.terms {
            acc += t.coeff * t.m as f64 * r2.powi(t.m as i32 - 1) * nv.powi(t.q as i32);
        }
        *o = p * acc;
    }
    out
}

/// ∂V/∂N = Σ α_mq q |φ|^{2m} N^{q−1}.
pub fn dv_dn(phi: &ComplexField, n: &ScalarField, spec: &PotentialSpec) -> ScalarField {
    assert_same_grid(phi.grid(), n.grid());
    let mut out = ScalarField::zeros(phi.grid().clone());
    for ((o, p), &nv) in out.data_mut().iter_mut().zip(phi.data()).zip(n.data()) {
        let r2 = p.norm_sqr();
        let mut acc = 0.0;
        for t in &spec.terms {
            acc += t.coeff * t.q as f64 * r2.powi(t.m as i32) * nv.powi(t.q as i32 - 1);
        }
        *o = acc;
    }
    out
}
