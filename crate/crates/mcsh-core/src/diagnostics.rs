//! Every functional the existence/uniqueness argument monitors: total
//! energy and its parts, the composite norm 𝒥(t), gauge and Gauss
//! residuals, the instantaneous □-norms feeding the X(T) accumulator, and
//! two-solution difference norms. All read-only over immutable states.

use crate::dynamics::{self, FieldState};
use crate::error::{CoreError, Result};
use crate::fd;
use crate::grid::ScalarField;
use crate::potential::{self, PotentialSpec};

/// Energy split: ½(E²+B²) | ½(∂ₜN)² | ½|∇N|² | ½|D_μφ|² | ∫V.
///
/// The N sector uses the symmetrized ½(∂ₜN)² + ½|∇N|² integrand — the form
/// conserved by the equations of motion.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnergyParts {
    pub em: f64,
    pub n_kinetic: f64,
    pub n_gradient: f64,
    pub phi_covariant: f64,
    pub potential: f64,
}

impl EnergyParts {
    pub fn sum(&self) -> f64 {
        self.em + self.n_kinetic + self.n_gradient + self.phi_covariant + self.potential
    }
}

/// Quadrature of the energy integrand; returns (total, parts) with the total
/// the exact sum of the parts.
pub fn total_energy(state: &FieldState, spec: &PotentialSpec) -> (f64, EnergyParts) {
    let cell = state.grid().cell_area();
    let (e, b) = dynamics::field_strength(state);
    let (d0, d1, d2) = dynamics::covariant_derivative(state);
    let grad_n = state.n.gradient();
    let v = potential::eval_v(&state.phi, &state.n, spec);

    let mut em = 0.0;
    let mut nk = 0.0;
    let mut ng = 0.0;
    let mut pc = 0.0;
    let mut pv = 0.0;
    for i in 0..state.grid().len() {
        em += 0.5
            * (e.x.data()[i] * e.x.data()[i]
                + e.y.data()[i] * e.y.data()[i]
                + b.data()[i] * b.data()[i]);
        nk += 0.5 * state.dt_n.data()[i] * state.dt_n.data()[i];
        ng += 0.5
            * (grad_n.x.data()[i] * grad_n.x.data()[i] + grad_n.y.data()[i] * grad_n.y.data()[i]);
        pc += 0.5
            * (d0.data()[i].norm_sqr() + d1.data()[i].norm_sqr() + d2.data()[i].norm_sqr());
        pv += v.data()[i];
    }
    let parts = EnergyParts {
        em: em * cell,
        n_kinetic: nk * cell,
        n_gradient: ng * cell,
        phi_covariant: pc * cell,
        potential: pv * cell,
    };
    (parts.sum(), parts)
}

/// The individual terms of 𝒥(t), kept separate so the raw columns can be
/// logged alongside the single-count sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct JParts {
    /// ‖∂_μA_ν‖: all space-time first derivatives of (A₀, A), with ∂ₜA from
    /// the state and ∂ₜA₀ from the lagged estimate.
    pub d_a: f64,
    pub phi: f64,
    pub d_phi: f64,
    pub n: f64,
    pub d_n: f64,
    /// ‖∇^k̃ A‖ for k̃ = 2, 3, 4 (spectral multiplier |k|^k̃).
    pub a_high: [f64; 3],
    pub phi_high: [f64; 3],
    /// ‖∇^k̃ N‖ for k̃ = 2, 3, 4 — logged, not folded into 𝒥.
    pub n_high: [f64; 3],
}

impl JParts {
    /// 𝒥 = ‖∂A‖ + ‖φ‖ + ‖∂φ‖ + ‖N‖ + ‖∂N‖ + Σ_k̃ (‖∇^k̃A‖ + ‖∇^k̃φ‖),
    /// counting the printed duplicate ‖∂_μφ‖ once.
    pub fn j(&self) -> f64 {
        self.d_a
            + self.phi
            + self.d_phi
            + self.n
            + self.d_n
            + self.a_high.iter().sum::<f64>()
            + self.phi_high.iter().sum::<f64>()
    }
}

pub fn functional_j_parts(state: &FieldState) -> JParts {
    let d_a = (state.a.derivative_norm(1).powi(2)
        + state.dt_a.l2_norm().powi(2)
        + state.a0.derivative_norm(1).powi(2)
        + state.dt_a0.l2_norm().powi(2))
    .sqrt();
    let d_phi =
        (state.phi.derivative_norm(1).powi(2) + state.dt_phi.l2_norm().powi(2)).sqrt();
    let d_n = (state.n.derivative_norm(1).powi(2) + state.dt_n.l2_norm().powi(2)).sqrt();
    let mut a_high = [0.0; 3];
    let mut phi_high = [0.0; 3];
    let mut n_high = [0.0; 3];
    for (i, k) in (2u32..=4).enumerate() {
        a_high[i] = state.a.derivative_norm(k);
        phi_high[i] = state.phi.derivative_norm(k);
        n_high[i] = state.n.derivative_norm(k);
    }
    JParts {
        d_a,
        phi: state.phi.l2_norm(),
        d_phi,
        n: state.n.l2_norm(),
        d_n,
        a_high,
        phi_high,
        n_high,
    }
}

/// The composite functional norm 𝒥(t).
pub fn functional_j(state: &FieldState) -> f64 {
    functional_j_parts(state).j()
}

/// Coulomb-gauge residual: relative ‖div A‖/‖∇A‖ plus the absolute norm.
#[derive(Debug, Clone, Copy)]
pub struct GaugeResidual {
    pub relative: f64,
    pub absolute: f64,
}

pub fn gauge_residual(state: &FieldState) -> GaugeResidual {
    let absolute = state.a.divergence().l2_norm();
    let denom = state.a.derivative_norm(1);
    let relative = if denom == 0.0 { 0.0 } else { absolute / denom };
    GaugeResidual { relative, absolute }
}

/// ‖ΔA₀ − |φ|²A₀ − κF⁰ + Im(φ ∂ₜφ̄)‖_{L²}, evaluated with the 4th-order
/// finite-difference operators — independent of the spectral solver path.
pub fn gauss_residual(state: &FieldState, spec: &PotentialSpec) -> f64 {
    let lap_a0 = fd::laplacian(&state.a0);
    let b = fd::curl(&state.a);
    let mut res = ScalarField::zeros(state.grid().clone());
    for i in 0..state.grid().len() {
        let phi = state.phi.data()[i];
        let im = (phi * state.dt_phi.data()[i].conj()).im;
        res.data_mut()[i] = lap_a0.data()[i] - phi.norm_sqr() * state.a0.data()[i]
            - spec.kappa * b.data()[i]
            + im;
    }
    res.l2_norm()
}

/// Instantaneous (‖□A‖, ‖□φ‖, ‖□N‖): on-shell these are the L² norms of
/// the wave-equation sources (for N, ‖∂V/∂N‖).
pub fn box_norms(state: &FieldState, spec: &PotentialSpec) -> (f64, f64, f64) {
    let ba = dynamics::rhs_a(state, spec).l2_norm();
    let bphi = dynamics::rhs_phi(state, spec).l2_norm();
    let bn = dynamics::box_n_source(state, spec).l2_norm();
    (ba, bphi, bn)
}

/// 𝒥 evaluated on the componentwise difference of two same-grid, same-time
/// states (A₀ and its lagged derivative excluded, as in 𝒥's definition for
/// the dynamic variables).
pub fn difference_norm(a: &FieldState, b: &FieldState) -> Result<f64> {
    if !a.grid().same_as(b.grid()) {
        return Err(CoreError::StateMismatch(
            "difference_norm requires a shared grid".into(),
        ));
    }
    if (a.t - b.t).abs() > 1e-9 * a.t.abs().max(1.0) {
        return Err(CoreError::StateMismatch(format!(
            "difference_norm requires equal times (got {} vs {})",
            a.t, b.t
        )));
    }
    let g = a.grid().clone();
    let diff = FieldState {
        t: a.t,
        phi: a.phi.sub(&b.phi),
        dt_phi: a.dt_phi.sub(&b.dt_phi),
        n: a.n.sub(&b.n),
        dt_n: a.dt_n.sub(&b.dt_n),
        a: a.a.sub(&b.a),
        dt_a: a.dt_a.sub(&b.dt_a),
        a0: ScalarField::zeros(g.clone()),
        dt_a0: ScalarField::zeros(g),
        solve_report: a.solve_report,
    };
    Ok(functional_j(&diff))
}

/// Growth-bound monitor over a (t, 𝒥) series.
#[derive(Debug, Clone, Copy)]
pub struct GrowthReport {
    /// max over samples of 𝒥(t)/(1+t)².
    pub ratio_max: f64,
    /// Least-squares slope of log 𝒥 vs log(1+t) over the second half.
    pub exponent_fit: f64,
}

pub fn growth_monitor(samples: &[(f64, f64)]) -> Result<GrowthReport> {
    if samples.len() < 10 {
        return Err(CoreError::InvalidInput(format!(
            "growth_monitor needs at least 10 samples (got {})",
            samples.len()
        )));
    }
    let ratio_max = samples
        .iter()
        .map(|&(t, j)| j / (1.0 + t).powi(2))
        .fold(f64::NEG_INFINITY, f64::max);
    let window = &samples[samples.len() / 2..];
    let exponent_fit = if window.iter().any(|&(_, j)| j <= 0.0) {
        0.0
    } else {
        let pts: Vec<(f64, f64)> = window
            .iter()
            .map(|&(t, j)| ((1.0 + t).ln(), j.ln()))
            .collect();
        let n = pts.len() as f64;
        let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
        if sxx == 0.0 {
            0.0
        } else {
            sxy / sxx
        }
    };
    Ok(GrowthReport {
        ratio_max,
        exponent_fit,
    })
}

/// One sampled row of the run's time series.
#[derive(Debug, Clone)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy_total: f64,
    pub energy_parts: EnergyParts,
    pub j_norm: f64,
    pub j_parts: JParts,
    /// 𝒥/(1+t)².
    pub j_over_growth: f64,
    pub gauge: GaugeResidual,
    pub gauss_residual: f64,
    pub box_a: f64,
    pub box_phi: f64,
    pub box_n: f64,
    /// Trapezoid accumulation of ‖□A‖+‖□φ‖+‖□N‖; filled by the run loop.
    pub x_accum: f64,
    pub l2_phi: f64,
    pub l2_n: f64,
    pub l2_a: f64,
    /// hs_norm(φ, s) for each configured exponent.
    pub hs_phi: Vec<(f64, f64)>,
}

impl DiagnosticsRecord {
    pub fn measure(
        state: &FieldState,
        spec: &PotentialSpec,
        hs_exponents: &[f64],
    ) -> Result<DiagnosticsRecord> {
        let (energy_total, energy_parts) = total_energy(state, spec);
        let j_parts = functional_j_parts(state);
        let j_norm = j_parts.j();
        let gauge = gauge_residual(state);
        let gauss = gauss_residual(state, spec);
        let (box_a, box_phi, box_n) = box_norms(state, spec);
        let mut hs_phi = Vec::with_capacity(hs_exponents.len());
        for &s in hs_exponents {
            hs_phi.push((s, state.phi.hs_norm(s)?));
        }
        Ok(DiagnosticsRecord {
            t: state.t,
            energy_total,
            energy_parts,
            j_norm,
            j_parts,
            j_over_growth: j_norm / (1.0 + state.t).powi(2),
            gauge,
            gauss_residual: gauss,
            box_a,
            box_phi,
            box_n,
            x_accum: 0.0,
            l2_phi: state.phi.l2_norm(),
            l2_n: state.n.l2_norm(),
            l2_a: state.a.l2_norm(),
            hs_phi,
        })
    }
}
