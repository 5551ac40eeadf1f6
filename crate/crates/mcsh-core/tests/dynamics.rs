//! Dynamics oracles: field strength and dual components against direct
//! ε-tensor summation, covariant derivatives, the three wave-equation
//! sources against independently coded expansions, initial-data contracts,
//! and the integrator (fixed point, free-wave dispersion, self-convergence,
//! gauge preservation, phase equivariance, determinism).

mod common;

use common::*;
use mcsh_core::dynamics::{
    covariant_derivative, dual_f, field_strength, make_initial_data, rhs_a, rhs_n, rhs_phi, step,
};
use mcsh_core::elliptic::{leray_project, EllipticParams};
use mcsh_core::{
    diagnostics, ComplexField, FieldState, InitialDataKind, InitialDataSpec, PotentialSpec,
    PotentialTerm, ScalarField, VectorField,
};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

fn no_potential() -> PotentialSpec {
    PotentialSpec::new(vec![], 1.0).unwrap()
}

fn single_term(coeff: f64) -> PotentialSpec {
    PotentialSpec::new(vec![PotentialTerm { m: 1, q: 1, coeff }], 1.0).unwrap()
}

fn zero_state(g: &Arc<mcsh_core::Grid>) -> FieldState {
    let phi = ComplexField::zeros(g.clone());
    let dt_phi = ComplexField::zeros(g.clone());
    let a = VectorField::zeros(g.clone());
    let (a0, solve_report) =
        mcsh_core::elliptic::solve_a0(&phi, &dt_phi, &a, 1.0, &EllipticParams::default()).unwrap();
    FieldState {
        t: 0.0,
        phi,
        dt_phi,
        n: ScalarField::zeros(g.clone()),
        dt_n: ScalarField::zeros(g.clone()),
        a,
        dt_a: VectorField::zeros(g.clone()),
        a0,
        dt_a0: ScalarField::zeros(g.clone()),
        solve_report,
    }
}

// -------------------------------------------------------------------------
// field_strength / dual_f / covariant_derivative
// -------------------------------------------------------------------------

#[test]
fn field_strength_zero_state() {
    let g = grid(16, 2.0);
    let (e, b) = field_strength(&zero_state(&g));
    assert_eq!(e.l2_norm(), 0.0);
    assert_eq!(b.l2_norm(), 0.0);
}

#[test]
fn field_strength_single_mode_closed_form() {
    let g = grid(32, 4.0);
    let k = TAU / g.lx;
    let mut st = zero_state(&g);
    st.a = VectorField::new(
        ScalarField::zeros(g.clone()),
        ScalarField::from_fn(g.clone(), |x, _| (k * x).sin()),
    );
    let (e, b) = field_strength(&st);
    let b_exact = ScalarField::from_fn(g.clone(), |x, _| k * (k * x).cos());
    assert!(max_abs_diff_scalar(&b, &b_exact) <= 1e-12 * k);
    assert!(e.l2_norm() <= 1e-14);
}

#[test]
fn field_strength_pure_gauge_has_no_curl() {
    let g = grid(32, 3.0);
    let chi = random_scalar(&g, &mut rng(21), 6, 1.0);
    let mut st = zero_state(&g);
    st.a = chi.gradient();
    let (_, b) = field_strength(&st);
    assert!(b.l2_norm() <= 1e-12 * chi.gradient().l2_norm());
}

fn levi(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Direct ε-tensor summation F^ν = ½ ε^{νρσ} F_{ρσ} from the (E, B)
/// component matrix.
fn dual_oracle(e: &VectorField, b: &ScalarField) -> [ScalarField; 3] {
    let g = e.grid().clone();
    let mut out = [
        ScalarField::zeros(g.clone()),
        ScalarField::zeros(g.clone()),
        ScalarField::zeros(g.clone()),
    ];
    for i in 0..g.len() {
        // F_{ρσ} with lower indices: F_{0i} = E_i, F_{12} = B.
        let mut f = [[0.0; 3]; 3];
        f[0][1] = e.x.data()[i];
        f[1][0] = -e.x.data()[i];
        f[0][2] = e.y.data()[i];
        f[2][0] = -e.y.data()[i];
        f[1][2] = b.data()[i];
        f[2][1] = -b.data()[i];
        for nu in 0..3 {
            let mut acc = 0.0;
            for rho in 0..3 {
                for sig in 0..3 {
                    acc += 0.5 * levi(nu, rho, sig) * f[rho][sig];
                }
            }
            out[nu].data_mut()[i] = acc;
        }
    }
    out
}

#[test]
fn dual_f_examples_and_orientation_oracle() {
    let g = grid(16, 2.0);
    let (f0, f1, f2) = dual_f(&zero_state(&g));
    assert_eq!(f0.l2_norm() + f1.l2_norm() + f2.l2_norm(), 0.0);

    // Magnetic-only state: F⁰ = B, F¹ = F² = 0.
    let k = TAU / g.lx;
    let mut st = zero_state(&g);
    st.a = VectorField::new(
        ScalarField::zeros(g.clone()),
        ScalarField::from_fn(g.clone(), |x, _| (k * x).sin()),
    );
    let (f0, f1, f2) = dual_f(&st);
    let (_, b) = field_strength(&st);
    assert!(max_abs_diff_scalar(&f0, &b) <= 1e-13);
    assert!(f1.l2_norm() <= 1e-14 && f2.l2_norm() <= 1e-14);

    // Electric-only state with E = (E₁, 0): F² = E₁, others vanish.
    let mut st = zero_state(&g);
    st.dt_a = VectorField::new(
        ScalarField::from_fn(g.clone(), |_, y| (TAU * y / g.ly).cos()),
        ScalarField::zeros(g.clone()),
    );
    let (f0, f1, f2) = dual_f(&st);
    let (e, _) = field_strength(&st);
    assert!(f0.l2_norm() <= 1e-14 && f1.l2_norm() <= 1e-14);
    assert!(max_abs_diff_scalar(&f2, &e.x) <= 1e-13);

    // Random state against the ε-summation oracle.
    let mut r = rng(33);
    let st = random_state(&g, &mut r, 1.0, 0.5);
    let (e, b) = field_strength(&st);
    let oracle = dual_oracle(&e, &b);
    let (f0, f1, f2) = dual_f(&st);
    let scale = e.l2_norm() + b.l2_norm();
    assert!(f0.sub(&oracle[0]).l2_norm() <= 1e-12 * scale);
    assert!(f1.sub(&oracle[1]).l2_norm() <= 1e-12 * scale);
    assert!(f2.sub(&oracle[2]).l2_norm() <= 1e-12 * scale);
}

#[test]
fn covariant_derivative_contracts() {
    let g = grid(16, 2.0);

    // A_μ = 0 reduces to plain derivatives.
    let mut st = zero_state(&g);
    st.phi = random_complex(&g, &mut rng(5), 4, 1.0);
    st.dt_phi = random_complex(&g, &mut rng(6), 4, 1.0);
    let (d0, d1, d2) = covariant_derivative(&st);
    let (gx, gy) = st.phi.gradient();
    assert!(max_abs_diff_complex(&d0, &st.dt_phi) <= 1e-14);
    assert!(max_abs_diff_complex(&d1, &gx) <= 1e-13);
    assert!(max_abs_diff_complex(&d2, &gy) <= 1e-13);

    // φ ≡ 1, ∂ₜφ = 0, A₀ ≡ a gives D₀φ ≡ ia.
    let mut st = zero_state(&g);
    st.phi = ComplexField::from_fn(g.clone(), |_, _| Complex64::new(1.0, 0.0));
    st.a0 = ScalarField::from_fn(g.clone(), |_, _| 0.6);
    let (d0, _, _) = covariant_derivative(&st);
    assert!(d0
        .data()
        .iter()
        .all(|z| (z - Complex64::new(0.0, 0.6)).norm() <= 1e-14));

    // Constant-phase shift with ∂_μχ = 0 leaves |D_μφ|² untouched.
    let mut r = rng(8);
    let st = random_state(&g, &mut r, 1.0, 0.5);
    let mut st_rot = st.clone();
    let rot = Complex64::from_polar(1.0, 1.234);
    st_rot.phi =
        ComplexField::from_data(g.clone(), st.phi.data().iter().map(|z| z * rot).collect());
    st_rot.dt_phi = ComplexField::from_data(
        g.clone(),
        st.dt_phi.data().iter().map(|z| z * rot).collect(),
    );
    let (d0, d1, d2) = covariant_derivative(&st);
    let (e0, e1, e2) = covariant_derivative(&st_rot);
    for (a, b) in [(&d0, &e0), (&d1, &e1), (&d2, &e2)] {
        let max = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(max <= 1e-13);
    }
}

// -------------------------------------------------------------------------
// Wave-equation sources
// -------------------------------------------------------------------------

#[test]
fn rhs_a_zero_state() {
    let g = grid(16, 2.0);
    assert_eq!(rhs_a(&zero_state(&g), &no_potential()).l2_norm(), 0.0);
}

#[test]
fn rhs_a_matches_projection_composition_for_pure_field() {
    // φ = 0, single-mode E only: rhs must equal 𝒫(κ(−E₂, E₁)) built by
    // composing dual_f and leray_project directly.
    let g = grid(32, 4.0);
    let kappa = 1.7;
    let mut st = zero_state(&g);
    st.dt_a = VectorField::new(
        ScalarField::from_fn(g.clone(), |x, _| (TAU * x / g.lx).sin()),
        ScalarField::from_fn(g.clone(), |_, y| 0.5 * (TAU * y / g.ly).cos()),
    );
    let spec = PotentialSpec::new(vec![], kappa).unwrap();
    let got = rhs_a(&st, &spec);
    let (_, f1, f2) = dual_f(&st);
    let mut src = VectorField::new(f1, f2);
    src.x.scale(kappa);
    src.y.scale(kappa);
    let expect = leray_project(&src);
    assert!(got.sub(&expect).l2_norm() <= 1e-12 * expect.l2_norm());
}

#[test]
fn rhs_a_image_is_divergence_free() {
    let g = grid(32, 3.0);
    let mut r = rng(40);
    for seed in 0..4 {
        let st = random_state(&g, &mut r, 1.0 + seed as f64 * 0.3, 0.5);
        let out = rhs_a(&st, &single_term(0.5));
        assert!(out.divergence().l2_norm() <= 1e-10 * out.l2_norm().max(1e-30));
    }
}

#[test]
fn rhs_phi_free_wave_is_zero() {
    let g = grid(16, 2.0);
    let mut st = zero_state(&g);
    st.phi = random_complex(&g, &mut rng(9), 4, 1.0);
    st.dt_phi = random_complex(&g, &mut rng(10), 4, 1.0);
    let out = rhs_phi(&st, &no_potential());
    assert!(out.l2_norm() <= 1e-14);
}

#[test]
fn rhs_phi_pure_potential_term() {
    // A_μ = 0 with the single term α₁₁ = 1: source is 2·∂V/∂φ̄ = 2Nφ.
    let g = grid(16, 2.0);
    let mut st = zero_state(&g);
    st.phi = random_complex(&g, &mut rng(11), 3, 0.8);
    st.n = random_scalar(&g, &mut rng(12), 3, 0.8);
    let out = rhs_phi(&st, &single_term(1.0));
    let mut expect = ComplexField::zeros(g.clone());
    for i in 0..g.len() {
        expect.data_mut()[i] = 2.0 * st.n.data()[i] * st.phi.data()[i];
    }
    let expect = expect.dealiased();
    assert!(out.sub(&expect).l2_norm() <= 1e-12 * expect.l2_norm());
}

/// Independently coded expansion of the φ source directly in terms of
/// ∂φ, A, A₀ — no covariant-derivative abstraction:
///   2∂V/∂φ̄ + 2iA₀∂ₜφ + i(∂ₜA₀)φ − 2iA·∇φ − A₀²φ + |A|²φ − i(div A)φ.
fn rhs_phi_oracle(st: &FieldState, spec: &PotentialSpec) -> ComplexField {
    let g = st.grid().clone();
    let (gx, gy) = st.phi.gradient();
    let div_a = st.a.divergence();
    let vp = mcsh_core::potential::dv_dphi(&st.phi, &st.n, spec);
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = ComplexField::zeros(g.clone());
    for i in 0..g.len() {
        let phi = st.phi.data()[i];
        let a0 = st.a0.data()[i];
        let (ax, ay) = (st.a.x.data()[i], st.a.y.data()[i]);
        out.data_mut()[i] = 2.0 * vp.data()[i]
            + 2.0 * i_unit * a0 * st.dt_phi.data()[i]
            + i_unit * st.dt_a0.data()[i] * phi
            - 2.0 * i_unit * (ax * gx.data()[i] + ay * gy.data()[i])
            - a0 * a0 * phi
            + (ax * ax + ay * ay) * phi
            - i_unit * div_a.data()[i] * phi;
    }
    out.dealiased()
}

#[test]
fn rhs_phi_matches_independent_expansion() {
    let g = grid(32, 3.0);
    let mut r = rng(50);
    for _ in 0..4 {
        let st = random_state(&g, &mut r, 1.0, 0.6);
        let spec = single_term(0.4);
        let got = rhs_phi(&st, &spec);
        let expect = rhs_phi_oracle(&st, &spec);
        assert!(got.sub(&expect).l2_norm() <= 1e-12 * expect.l2_norm());
    }
}

#[test]
fn rhs_n_contracts() {
    let g = grid(32, 4.0);
    let k = TAU / g.lx;

    // V = 0, single mode: the Laplacian alone.
    let mut st = zero_state(&g);
    st.n = ScalarField::from_fn(g.clone(), |x, _| (k * x).sin());
    let out = rhs_n(&st, &no_potential());
    let exact = ScalarField::from_fn(g.clone(), |x, _| -k * k * (k * x).sin());
    assert!(max_abs_diff_scalar(&out, &exact) <= 1e-12 * k * k);

    // Constant N with φ = 0: both terms vanish.
    let mut st = zero_state(&g);
    st.n = ScalarField::from_fn(g.clone(), |_, _| 2.5);
    assert!(rhs_n(&st, &single_term(0.7)).l2_norm() <= 1e-13);

    // Random state against FD Laplacian plus brute-force ∂V/∂N.
    let mut r = rng(60);
    let st = random_state(&g, &mut r, 1.0, 0.5);
    let spec = single_term(0.5);
    let got = rhs_n(&st, &spec);
    let mut oracle = mcsh_core::fd::laplacian(&st.n);
    let dvn = mcsh_core::potential::dv_dn(&st.phi, &st.n, &spec).dealiased();
    oracle.axpy(-1.0, &dvn);
    // FD truncation dominates: modes ≤ 3 on 32 points → (k dx)⁴-level slack.
    assert!(got.sub(&oracle).l2_norm() <= 2e-3 * got.l2_norm().max(1e-30));
}

// -------------------------------------------------------------------------
// Initial data
// -------------------------------------------------------------------------

#[test]
fn make_initial_data_zero_spec_gives_zero_state() {
    let g = grid(16, 2.0);
    let spec = InitialDataSpec::default();
    let st = make_initial_data(&spec, &g, &no_potential(), &EllipticParams::default()).unwrap();
    assert_eq!(st.phi.l2_norm(), 0.0);
    assert_eq!(st.n.l2_norm(), 0.0);
    assert_eq!(st.a.l2_norm(), 0.0);
    assert_eq!(st.a.divergence().l2_norm(), 0.0);
    assert_eq!(st.a0.l2_norm(), 0.0);
}

#[test]
fn gaussian_packet_a_field_is_divergence_free() {
    let g = grid(64, 12.0);
    let spec = InitialDataSpec {
        amp_a: 0.5,
        amp_dt_a: 0.3,
        a_angle: 0.9,
        dt_a_angle: 2.3,
        width: 1.5,
        center: (6.0, 6.0),
        ..InitialDataSpec::default()
    };
    let st = make_initial_data(&spec, &g, &no_potential(), &EllipticParams::default()).unwrap();
    assert!(st.a.divergence().l2_norm() <= 1e-12);
    assert!(st.dt_a.divergence().l2_norm() <= 1e-12);
    assert!(st.a.l2_norm() > 0.01); // projection kept a real transverse part
}

#[test]
fn vortex_like_data_is_finite_and_constraint_consistent() {
    let g = grid(128, 16.0);
    let spec = InitialDataSpec {
        kind: InitialDataKind::VortexLike,
        amp_phi: 0.3,
        omega: 0.4,
        winding: 1,
        width: 2.0,
        center: (8.0, 8.0),
        ..InitialDataSpec::default()
    };
    let pot = single_term(0.5);
    let params = EllipticParams::default();
    let st = make_initial_data(&spec, &g, &pot, &params).unwrap();
    assert!(st.non_finite_field().is_none());
    assert!(st.solve_report.converged);

    // Winding 1: phase advances by 2π on a small loop around the center.
    let c = (g.nx / 2, g.ny / 2);
    let loop_pts = [
        (c.0 + 4, c.1),
        (c.0, c.1 + 4),
        (c.0 - 4, c.1),
        (c.0, c.1 - 4),
        (c.0 + 4, c.1),
    ];
    let mut total = 0.0;
    for w in loop_pts.windows(2) {
        let z0 = st.phi.at(w[0].0, w[0].1);
        let z1 = st.phi.at(w[1].0, w[1].1);
        let mut d = z1.arg() - z0.arg();
        while d > std::f64::consts::PI {
            d -= TAU;
        }
        while d < -std::f64::consts::PI {
            d += TAU;
        }
        total += d;
    }
    assert!((total - TAU).abs() < 0.3, "winding phase sum {total}");

    let (energy, _) = diagnostics::total_energy(&st, &pot);
    assert!(energy.is_finite() && energy > 0.0);
    // Spectral-path residual honors the solver tolerance; the FD-oracle
    // cross-check carries discretization slack.
    assert!(st.solve_report.final_residual <= 1e-10);
    assert!(diagnostics::gauss_residual(&st, &pot) <= 1e-6);
}

// -------------------------------------------------------------------------
// Stepping
// -------------------------------------------------------------------------

#[test]
fn step_zero_state_is_fixed_point() {
    let g = grid(16, 2.0);
    let st = zero_state(&g);
    let next = step(&st, 0.05, &no_potential(), &EllipticParams::default()).unwrap();
    assert_eq!(next.phi.l2_norm(), 0.0);
    assert_eq!(next.n.l2_norm(), 0.0);
    assert_eq!(next.a.l2_norm(), 0.0);
    assert_eq!(next.a0.l2_norm(), 0.0);
    assert!((next.t - 0.05).abs() < 1e-15);
}

fn free_wave_error(g: &Arc<mcsh_core::Grid>, dt: f64) -> f64 {
    // κ → 0 (1e-12), V = 0, φ = 0: N single mode obeys ω = |k| exactly.
    let spec = PotentialSpec::new(vec![], 1e-12).unwrap();
    let mut st = zero_state(g);
    let k = TAU / g.lx;
    st.n = ScalarField::from_fn(g.clone(), |x, _| (k * x).sin());
    let period = TAU / k;
    let steps = (period / dt).round() as usize;
    let dt = period / steps as f64;
    let params = EllipticParams::default();
    for _ in 0..steps {
        st = step(&st, dt, &spec, &params).unwrap();
    }
    let exact = ScalarField::from_fn(g.clone(), |x, _| (k * x).sin());
    st.n.sub(&exact).l2_norm()
}

#[test]
fn free_wave_dispersion_fourth_order() {
    let g = grid(32, TAU);
    let e1 = free_wave_error(&g, TAU / 40.0);
    let e2 = free_wave_error(&g, TAU / 80.0);
    let order = (e1 / e2).log2();
    println!("free-wave temporal order: {order:.2} (errors {e1:.3e}, {e2:.3e})");
    assert!(order >= 3.5, "observed order {order:.2}");
    assert!(e2 < 1e-5);
}

fn smooth_test_state(g: &Arc<mcsh_core::Grid>, kappa: f64, amp: f64) -> (FieldState, PotentialSpec) {
    let pot = PotentialSpec::new(vec![PotentialTerm { m: 1, q: 1, coeff: 0.5 }], kappa).unwrap();
    let spec = InitialDataSpec {
        amp_phi: amp,
        amp_dt_phi: 0.5 * amp,
        amp_n: amp,
        amp_dt_n: 0.3 * amp,
        amp_a: amp,
        amp_dt_a: 0.4 * amp,
        a_angle: 0.7,
        dt_a_angle: 2.1,
        width: g.lx / 6.0,
        center: (g.lx / 2.0, g.ly / 2.0),
        ..InitialDataSpec::default()
    };
    let st = make_initial_data(&spec, g, &pot, &EllipticParams::default()).unwrap();
    (st, pot)
}

#[test]
fn nonlinear_self_convergence_order_at_least_3() {
    // Real φ data with κ → 0 keeps A₀ (and thus the first-order lagged
    // ∂ₜA₀ term) negligible, exposing the integrator's own order.
    let g = grid(32, TAU);
    let (st0, pot) = smooth_test_state(&g, 1e-12, 0.03);
    let params = EllipticParams::default();
    let t_end = 0.32;
    let run = |dt: f64| -> FieldState {
        let steps = (t_end / dt).round() as usize;
        let mut st = st0.clone();
        for _ in 0..steps {
            st = step(&st, dt, &pot, &params).unwrap();
        }
        st
    };
    let s1 = run(0.08);
    let s2 = run(0.04);
    let s3 = run(0.02);
    let e1 = diagnostics::difference_norm(&s1, &s2).unwrap();
    let e2 = diagnostics::difference_norm(&s2, &s3).unwrap();
    let order = (e1 / e2).log2();
    println!("nonlinear self-convergence order: {order:.2} (e1 {e1:.3e}, e2 {e2:.3e})");
    assert!(order >= 3.0, "observed order {order:.2}");
}

#[test]
fn gauge_residual_stays_tiny_under_evolution() {
    let g = grid(32, 8.0);
    let (mut st, pot) = smooth_test_state(&g, 1.0, 0.1);
    let params = EllipticParams::default();
    let dt = 0.25 * g.dx;
    for _ in 0..50 {
        st = step(&st, dt, &pot, &params).unwrap();
    }
    let gauge = diagnostics::gauge_residual(&st);
    println!("relative gauge residual after 50 steps: {:.3e}", gauge.relative);
    assert!(gauge.relative <= 1e-10);
}

#[test]
fn constant_phase_symmetry_is_exact() {
    let g = grid(32, 8.0);
    let (st, pot) = smooth_test_state(&g, 1.0, 0.1);
    let theta = 0.83;
    let rot = Complex64::from_polar(1.0, theta);
    let mut st_rot = st.clone();
    st_rot.phi =
        ComplexField::from_data(g.clone(), st.phi.data().iter().map(|z| z * rot).collect());
    st_rot.dt_phi = ComplexField::from_data(
        g.clone(),
        st.dt_phi.data().iter().map(|z| z * rot).collect(),
    );
    let params = EllipticParams::default();
    let dt = 0.25 * g.dx;
    let (mut a, mut b) = (st, st_rot);
    for _ in 0..10 {
        a = step(&a, dt, &pot, &params).unwrap();
        b = step(&b, dt, &pot, &params).unwrap();
    }
    let rotated = ComplexField::from_data(g.clone(), a.phi.data().iter().map(|z| z * rot).collect());
    let diff = b.phi.sub(&rotated).l2_norm();
    println!("phase-equivariance defect after 10 steps: {diff:.3e}");
    assert!(diff <= 1e-10 * a.phi.l2_norm().max(1e-30));
    assert!(b.a.sub(&a.a).l2_norm() <= 1e-10 * a.a.l2_norm().max(1e-30));
}

#[test]
fn evolution_is_deterministic() {
    let g = grid(32, 8.0);
    let (st, pot) = smooth_test_state(&g, 1.0, 0.1);
    let params = EllipticParams::default();
    let dt = 0.25 * g.dx;
    let run = || {
        let mut s = st.clone();
        for _ in 0..5 {
            s = step(&s, dt, &pot, &params).unwrap();
        }
        s
    };
    let a = run();
    let b = run();
    assert!(a.phi.data() == b.phi.data());
    assert!(a.n.data() == b.n.data());
    assert!(a.a.x.data() == b.a.x.data() && a.a.y.data() == b.a.y.data());
    assert!(a.a0.data() == b.a0.data());
}

#[test]
fn over_cfl_step_reports_non_finite_abort() {
    let g = grid(32, TAU);
    let (st, pot) = smooth_test_state(&g, 1.0, 0.2);
    let params = EllipticParams::default();
    // dt ten times the stability bound: the state must blow up and the
    // step must name the offending field rather than return garbage.
    let dt = 10.0 * 0.5 * g.dx;
    let mut s = st;
    let mut aborted = false;
    for _ in 0..200 {
        match step(&s, dt, &pot, &params) {
            Ok(next) => s = next,
            Err(e) => {
                println!("aborted as expected: {e}");
                aborted = true;
                break;
            }
        }
    }
    assert!(aborted, "expected a non-finite abort at 10x CFL");
}
