//! Shared helpers for the oracle test suites: seeded random band-limited
//! fields and fully assembled random states.

#![allow(dead_code)]

use mcsh_core::elliptic::{self, EllipticParams};
use mcsh_core::{ComplexField, FieldState, Grid, ScalarField, VectorField};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;

pub fn grid(n: usize, l: f64) -> Arc<Grid> {
    Grid::shared(n, n, l, l).unwrap()
}

pub fn grid_rect(nx: usize, ny: usize, lx: f64, ly: f64) -> Arc<Grid> {
    Grid::shared(nx, ny, lx, ly).unwrap()
}

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Random real field band-limited to |m| <= max_mode per axis.
pub fn random_scalar(g: &Arc<Grid>, rng: &mut ChaCha12Rng, max_mode: i32, amp: f64) -> ScalarField {
    let mut modes = Vec::new();
    for mx in -max_mode..=max_mode {
        for my in -max_mode..=max_mode {
            let c: f64 = rng.gen_range(-1.0..1.0);
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            modes.push((mx as f64, my as f64, c, phase));
        }
    }
    let norm = amp / modes.len() as f64;
    let (lx, ly) = (g.lx, g.ly);
    ScalarField::from_fn(g.clone(), move |x, y| {
        let mut v = 0.0;
        for &(mx, my, c, phase) in &modes {
            v += c * (std::f64::consts::TAU * (mx * x / lx + my * y / ly) + phase).cos();
        }
        v * norm
    })
}

pub fn random_complex(
    g: &Arc<Grid>,
    rng: &mut ChaCha12Rng,
    max_mode: i32,
    amp: f64,
) -> ComplexField {
    let re = random_scalar(g, rng, max_mode, amp);
    let im = random_scalar(g, rng, max_mode, amp);
    let data = re
        .data()
        .iter()
        .zip(im.data())
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    ComplexField::from_data(g.clone(), data)
}

pub fn random_vector(
    g: &Arc<Grid>,
    rng: &mut ChaCha12Rng,
    max_mode: i32,
    amp: f64,
) -> VectorField {
    VectorField::new(
        random_scalar(g, rng, max_mode, amp),
        random_scalar(g, rng, max_mode, amp),
    )
}

/// A fully assembled random state: divergence-free a and ∂ₜa, constraint-
/// consistent A₀, and a random (but band-limited) lagged ∂ₜA₀ field.
pub fn random_state(g: &Arc<Grid>, rng: &mut ChaCha12Rng, kappa: f64, amp: f64) -> FieldState {
    let phi = random_complex(g, rng, 3, amp);
    let dt_phi = random_complex(g, rng, 3, amp);
    let n = random_scalar(g, rng, 3, amp);
    let dt_n = random_scalar(g, rng, 3, amp);
    let mut a = elliptic::leray_project(&random_vector(g, rng, 3, amp));
    a.x.scale(-1.0);
    a.y.scale(-1.0);
    let mut dt_a = elliptic::leray_project(&random_vector(g, rng, 3, amp));
    dt_a.x.scale(-1.0);
    dt_a.y.scale(-1.0);
    let (a0, solve_report) =
        elliptic::solve_a0(&phi, &dt_phi, &a, kappa, &EllipticParams::default()).unwrap();
    let dt_a0 = random_scalar(g, rng, 3, 0.1 * amp);
    FieldState {
        t: 0.0,
        phi,
        dt_phi,
        n,
        dt_n,
        a,
        dt_a,
        a0,
        dt_a0,
        solve_report,
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn max_abs_diff_scalar(a: &ScalarField, b: &ScalarField) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_complex(a: &ComplexField, b: &ComplexField) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
