//! Coulomb-gauge elliptic machinery: spectral inverse Laplacian, the
//! divergence-free projector 𝒫, and the screened solve that pins A₀ to the
//! matter and gauge fields at each instant.
//!
//! Sign convention: 𝒫B = Δ⁻¹(∇×(∇×B)) = Δ⁻¹(∇(∇·B) − ΔB), so 𝒫B = −B on
//! divergence-free B and 𝒫² = −𝒫. The zero mode maps to −mean(B), which
//! keeps 𝒫B = −B exact on constants (they are divergence-free).

use crate::error::{CoreError, Result};
use crate::grid::{self, ComplexField, ScalarField, VectorField};
use crate::spectral;
use num_complex::Complex64;

/// Convergence record for one screened solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticSolveReport {
    pub iterations: u32,
    /// L² norm of ΔA₀ − |φ|²A₀ − source, recomputed from the returned
    /// solution (not the CG recurrence).
    pub final_residual: f64,
    pub converged: bool,
}

/// Tolerances for [`solve_a0`]. Defaults keep the constraint residual far
/// below time-discretization error.
#[derive(Debug, Clone, Copy)]
pub struct EllipticParams {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_iters: u32,
}

impl Default for EllipticParams {
    fn default() -> Self {
        EllipticParams {
            tol_rel: 1e-10,
            tol_abs: 1e-12,
            max_iters: 500,
        }
    }
}

/// Exact spectral solve of Δu = source − mean(source) with mean(u) = 0.
pub fn solve_poisson(source: &ScalarField) -> ScalarField {
    let g = source.grid().clone();
    let mut hat = grid::hat_real(source);
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let i = iy * g.nx + ix;
            let k2 = g.k_sq(ix, iy);
            if ix == 0 && iy == 0 {
                hat[i] = Complex64::default();
            } else {
                hat[i] /= -k2;
            }
        }
    }
    ScalarField::from_data(g.clone(), spectral::inverse_real(g.nx, g.ny, hat))
}

/// The paper's projection operator 𝒫B = Δ⁻¹(∇×(∇×B)).
///
/// Fourier multiplier −(δ_ij − k_i k_j / |k|²); zero mode ↦ −mean(B).
pub fn leray_project(b: &VectorField) -> VectorField {
    let g = b.grid().clone();
    let mut hx = grid::hat_real(&b.x);
    let mut hy = grid::hat_real(&b.y);
    project_hats(&g, &mut hx, &mut hy);
    VectorField::new(
        ScalarField::from_data(g.clone(), spectral::inverse_real(g.nx, g.ny, hx)),
        ScalarField::from_data(g.clone(), spectral::inverse_real(g.nx, g.ny, hy)),
    )
}

/// Apply the 𝒫 multiplier in place on a pair of component spectra.
pub(crate) fn project_hats(g: &grid::Grid, hx: &mut [Complex64], hy: &mut [Complex64]) {
    let kx = g.wavenumbers_x();
    let ky = g.wavenumbers_y();
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let i = iy * g.nx + ix;
            if ix == 0 && iy == 0 {
                hx[i] = -hx[i];
                hy[i] = -hy[i];
                continue;
            }
            let (kxv, kyv) = (kx[ix], ky[iy]);
            let k2 = kxv * kxv + kyv * kyv;
            let dot = (hx[i] * kxv + hy[i] * kyv) / k2;
            hx[i] = dot * kxv - hx[i];
            hy[i] = dot * kyv - hy[i];
        }
    }
}

/// Solve the Coulomb-gauge constraint ΔA₀ − |φ|²A₀ = κF⁰ − Im(φ ∂ₜφ̄),
/// F⁰ = ∂₁A₂ − ∂₂A₁.
///
/// Conjugate gradients on the SPD operator (|φ|² − Δ), preconditioned by the
/// spectral multiplier 1/(mean|φ|² + |k|²). When φ vanishes identically the
/// operator is the bare Laplacian and the solve falls back to
/// [`solve_poisson`] on the mean-projected source.
pub fn solve_a0(
    phi: &ComplexField,
    dt_phi: &ComplexField,
    a: &VectorField,
    kappa: f64,
    params: &EllipticParams,
) -> Result<(ScalarField, EllipticSolveReport)> {
    let g = phi.grid().clone();
    assert!(g.same_as(dt_phi.grid()) && g.same_as(a.grid()), "grid mismatch");
    assert!(params.tol_rel > 0.0 || params.tol_abs > 0.0, "tolerance must be positive");

    let b_field = a.curl();
    let mut source = ScalarField::zeros(g.clone());
    for ((s, &bv), (p, dp)) in source
        .data_mut()
        .iter_mut()
        .zip(b_field.data())
        .zip(phi.data().iter().zip(dt_phi.data()))
    {
        *s = kappa * bv - (p * dp.conj()).im;
    }
    let source = source.dealiased();
    let screening: Vec<f64> = phi.data().iter().map(|p| p.norm_sqr()).collect();
    screened_solve(&g, &screening, &source, params)
}

/// Solve (Δ − c(x)) u = source for c ≥ 0 by preconditioned conjugate
/// gradients on the SPD operator (c − Δ). Vanishing c falls back to the
/// spectral Poisson inverse on the mean-projected source.
fn screened_solve(
    g: &std::sync::Arc<grid::Grid>,
    screening: &[f64],
    source: &ScalarField,
    params: &EllipticParams,
) -> Result<(ScalarField, EllipticSolveReport)> {
    let tol = params.tol_abs + params.tol_rel * source.l2_norm();

    if screening.iter().all(|&c| c == 0.0) {
        let mean = source.mean();
        let mut projected = source.clone();
        for v in projected.data_mut() {
            *v -= mean;
        }
        let u = solve_poisson(&projected);
        let residual = residual_norm(&u, screening, &projected);
        let report = EllipticSolveReport {
            iterations: 0,
            final_residual: residual,
            converged: residual <= tol,
        };
        return Ok((u, report));
    }

    // CG on (c − Δ) x = −source.
    let cell = g.cell_area();
    let l2 = |v: &[f64]| -> f64 { (v.iter().map(|a| a * a).sum::<f64>() * cell).sqrt() };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let apply = |v: &ScalarField| -> ScalarField {
        let mut out = v.laplacian();
        for ((o, &x), &c) in out.data_mut().iter_mut().zip(v.data()).zip(screening) {
            *o = c * x - *o;
        }
        out
    };
    let shift = screening.iter().sum::<f64>() / screening.len() as f64;
    let precondition = |r: &ScalarField| -> ScalarField {
        let mut hat = grid::hat_real(r);
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                hat[iy * g.nx + ix] /= shift + g.k_sq(ix, iy);
            }
        }
        ScalarField::from_data(g.clone(), spectral::inverse_real(g.nx, g.ny, hat))
    };

    let mut x = ScalarField::zeros(g.clone());
    let mut r = source.clone();
    r.scale(-1.0);
    let mut iterations = 0u32;
    if l2(r.data()) > tol {
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(r.data(), z.data());
        for it in 1..=params.max_iters {
            iterations = it;
            let lp = apply(&p);
            let alpha = rz / dot(p.data(), lp.data());
            x.axpy(alpha, &p);
            r.axpy(-alpha, &lp);
            if l2(r.data()) <= tol {
                break;
            }
            z = precondition(&r);
            let rz_new = dot(r.data(), z.data());
            let beta = rz_new / rz;
            rz = rz_new;
            let mut p_next = z.clone();
            p_next.axpy(beta, &p);
            p = p_next;
        }
    }

    let final_residual = residual_norm(&x, screening, &source);
    let report = EllipticSolveReport {
        iterations,
        final_residual,
        converged: final_residual <= tol,
    };
    if !report.converged && iterations >= params.max_iters {
        return Err(CoreError::EllipticNoConvergence { report });
    }
    Ok((x, report))
}

/// ‖Δu − c·u − source‖_{L²}, from the returned solution.
fn residual_norm(u: &ScalarField, screening: &[f64], source: &ScalarField) -> f64 {
    let mut res = u.laplacian();
    for (((r, &uv), &c), &s) in res
        .data_mut()
        .iter_mut()
        .zip(u.data())
        .zip(screening)
        .zip(source.data())
    {
        *r = *r - c * uv - s;
    }
    res.l2_norm()
}

/// Lagged backward difference (A₀ᶜᵘʳ − A₀ᵖʳᵉᵛ)/dt.
pub fn estimate_dt_a0(a0_prev: &ScalarField, a0_curr: &ScalarField, dt: f64) -> ScalarField {
    assert!(dt > 0.0, "dt must be positive");
    let mut out = a0_curr.sub(a0_prev);
    out.scale(1.0 / dt);
    out
}

/// Solve the time-differentiated constraint for ∂ₜA₀:
///   Δ ∂ₜA₀ = κ ∂ₜB − Im(φ conj(φ̈₀)) + 2Re(φ̄ ∂ₜφ) A₀,
/// where φ̈₀ is the φ acceleration evaluated with ∂ₜA₀ = 0. The screening
/// terms cancel exactly once the (linear) ∂ₜA₀-dependence of φ̈ is
/// substituted, leaving a Poisson problem; the mean-free solution is the
/// self-consistent choice of the residual spatially-constant gauge freedom
/// and keeps mean(A₀) constant along the flow. This makes ∂ₜA₀ an exact
/// function of the instantaneous fields; the first-order lagged estimate is
/// the cheaper alternative.
pub fn solve_dt_a0(
    phi: &ComplexField,
    dt_phi: &ComplexField,
    phi_acc0: &ComplexField,
    dt_a: &VectorField,
    a0: &ScalarField,
    kappa: f64,
    params: &EllipticParams,
) -> Result<(ScalarField, EllipticSolveReport)> {
    let g = phi.grid().clone();
    let dt_b = dt_a.curl();
    let mut source = ScalarField::zeros(g.clone());
    for i in 0..g.len() {
        let p = phi.data()[i];
        source.data_mut()[i] = kappa * dt_b.data()[i] - (p * phi_acc0.data()[i].conj()).im
            + 2.0 * (p.conj() * dt_phi.data()[i]).re * a0.data()[i];
    }
    let source = source.dealiased();
    let no_screening = vec![0.0; g.len()];
    screened_solve(&g, &no_screening, &source, params)
}
