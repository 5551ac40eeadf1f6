//! 4th-order centered finite-difference twins of the spectral operators.
//!
//! A second, independent discretization of every derivative: operator bugs
//! become detectable without analytic ground truth, and the Gauss-constraint
//! residual is evaluated on this path so it does not share code with the
//! elliptic solver it checks.

use crate::grid::{ComplexField, ScalarField, VectorField};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

trait Elem:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}
impl Elem for f64 {}
impl Elem for Complex64 {}

/// d/dx with periodic wrap: (8(f₊₁ − f₋₁) − (f₊₂ − f₋₂)) / (12 h).
fn deriv_axis<T: Elem>(nx: usize, ny: usize, h: f64, data: &[T], axis: usize) -> Vec<T> {
    let mut out = vec![T::default(); data.len()];
    let n = if axis == 0 { nx } else { ny };
    let c1 = 8.0 / (12.0 * h);
    let c2 = 1.0 / (12.0 * h);
    for iy in 0..ny {
        for ix in 0..nx {
            let at = |off: isize| -> T {
                let (jx, jy) = if axis == 0 {
                    (((ix as isize + off).rem_euclid(n as isize)) as usize, iy)
                } else {
                    (ix, ((iy as isize + off).rem_euclid(n as isize)) as usize)
                };
                data[jy * nx + jx]
            };
            out[iy * nx + ix] =
                (at(1) - at(-1)) * c1 - (at(2) - at(-2)) * c2;
        }
    }
    out
}

/// d²/dx² with periodic wrap: (−f₊₂ + 16f₊₁ − 30f + 16f₋₁ − f₋₂) / (12 h²).
fn second_deriv_axis<T: Elem>(nx: usize, ny: usize, h: f64, data: &[T], axis: usize) -> Vec<T> {
    let mut out = vec![T::default(); data.len()];
    let n = if axis == 0 { nx } else { ny };
    let w = 1.0 / (12.0 * h * h);
    for iy in 0..ny {
        for ix in 0..nx {
            let at = |off: isize| -> T {
                let (jx, jy) = if axis == 0 {
                    (((ix as isize + off).rem_euclid(n as isize)) as usize, iy)
                } else {
                    (ix, ((iy as isize + off).rem_euclid(n as isize)) as usize)
                };
                data[jy * nx + jx]
            };
            let center: T = at(0) * 30.0;
            out[iy * nx + ix] =
                ((at(1) + at(-1)) * 16.0 - (at(2) + at(-2)) - center) * w;
        }
    }
    out
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let g = f.grid().clone();
    let gx = deriv_axis(g.nx, g.ny, g.dx, f.data(), 0);
    let gy = deriv_axis(g.nx, g.ny, g.dy, f.data(), 1);
    VectorField::new(
        ScalarField::from_data(g.clone(), gx),
        ScalarField::from_data(g, gy),
    )
}

pub fn gradient_complex(f: &ComplexField) -> (ComplexField, ComplexField) {
    let g = f.grid().clone();
    let gx = deriv_axis(g.nx, g.ny, g.dx, f.data(), 0);
    let gy = deriv_axis(g.nx, g.ny, g.dy, f.data(), 1);
    (
        ComplexField::from_data(g.clone(), gx),
        ComplexField::from_data(g, gy),
    )
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let xx = second_deriv_axis(g.nx, g.ny, g.dx, f.data(), 0);
    let yy = second_deriv_axis(g.nx, g.ny, g.dy, f.data(), 1);
    let data = xx.iter().zip(&yy).map(|(a, b)| a + b).collect();
    ScalarField::from_data(g, data)
}

pub fn laplacian_complex(f: &ComplexField) -> ComplexField {
    let g = f.grid().clone();
    let xx = second_deriv_axis(g.nx, g.ny, g.dx, f.data(), 0);
    let yy = second_deriv_axis(g.nx, g.ny, g.dy, f.data(), 1);
    let data = xx.iter().zip(&yy).map(|(a, b)| a + b).collect();
    ComplexField::from_data(g, data)
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let g = v.grid().clone();
    let dx = deriv_axis(g.nx, g.ny, g.dx, v.x.data(), 0);
    let dy = deriv_axis(g.nx, g.ny, g.dy, v.y.data(), 1);
    let data = dx.iter().zip(&dy).map(|(a, b)| a + b).collect();
    ScalarField::from_data(g, data)
}

/// Scalar curl ∂₁v₂ − ∂₂v₁.
pub fn curl(v: &VectorField) -> ScalarField {
    let g = v.grid().clone();
    let d1y = deriv_axis(g.nx, g.ny, g.dx, v.y.data(), 0);
    let d2x = deriv_axis(g.nx, g.ny, g.dy, v.x.data(), 1);
    let data = d1y.iter().zip(&d2x).map(|(a, b)| a - b).collect();
    ScalarField::from_data(g, data)
}
