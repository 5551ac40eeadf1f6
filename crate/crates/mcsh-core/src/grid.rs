//! Periodic 2D lattice, field containers, and the discrete differential
//! operators (spectral) together with the norms every other module uses.
//!
//! The domain is the torus [0, lx) × [0, ly) sampled on an nx × ny grid,
//! row-major with x varying fastest: `idx = iy * nx + ix`. Derivatives are
//! Fourier multipliers, exact for band-limited fields. A 4th-order centered
//! finite-difference twin of each operator lives in [`crate::fd`] as an
//! independent oracle.

use crate::error::{CoreError, Result};
use crate::spectral;
use num_complex::Complex64;
use std::sync::Arc;

/// Periodic rectangular lattice descriptor.
///
/// Wavenumber tables follow FFT ordering: mode m = i for i < n/2,
/// m = i − n for i ≥ n/2, so k = 2π m / l and the Nyquist entry sits at
/// m = −n/2. First-derivative multipliers zero the Nyquist mode (its ik
/// contribution has no well-defined sign on an even grid).
#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dx: f64,
    pub dy: f64,
    kx: Vec<f64>,
    ky: Vec<f64>,
    dkx: Vec<f64>,
    dky: Vec<f64>,
    keep_x: Vec<bool>,
    keep_y: Vec<bool>,
}

fn wavenumber_table(n: usize, l: f64) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / l;
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            step * m
        })
        .collect()
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Grid> {
        if nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(CoreError::InvalidGrid(format!(
                "nx, ny must be even and >= 8 (got {nx} x {ny})"
            )));
        }
        if !(lx.is_finite() && ly.is_finite()) || lx <= 0.0 || ly <= 0.0 {
            return Err(CoreError::InvalidGrid(format!(
                "lx, ly must be positive and finite (got {lx} x {ly})"
            )));
        }
        let kx = wavenumber_table(nx, lx);
        let ky = wavenumber_table(ny, ly);
        let mut dkx = kx.clone();
        let mut dky = ky.clone();
        dkx[nx / 2] = 0.0;
        dky[ny / 2] = 0.0;
        // Two-thirds rule: drop |m| >= n/3 before products are formed.
        let keep = |n: usize| -> Vec<bool> {
            (0..n)
                .map(|i| {
                    let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
                    m.abs() < n as f64 / 3.0
                })
                .collect()
        };
        Ok(Grid {
            nx,
            ny,
            lx,
            ly,
            dx: lx / nx as f64,
            dy: ly / ny as f64,
            kx,
            ky,
            dkx,
            dky,
            keep_x: keep(nx),
            keep_y: keep(ny),
        })
    }

    pub fn shared(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::new(nx, ny, lx, ly)?))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    /// Physical coordinates of grid point (ix, iy).
    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (ix as f64 * self.dx, iy as f64 * self.dy)
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn wavenumbers_x(&self) -> &[f64] {
        &self.kx
    }

    pub fn wavenumbers_y(&self) -> &[f64] {
        &self.ky
    }

    /// Largest resolved |k| after dealiasing, per axis minimum.
    pub fn k_max(&self) -> f64 {
        let kx = std::f64::consts::PI / self.dx;
        let ky = std::f64::consts::PI / self.dy;
        kx.min(ky)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }

    #[inline]
    pub(crate) fn dealias_keep(&self, ix: usize, iy: usize) -> bool {
        self.keep_x[ix] && self.keep_y[iy]
    }

    #[inline]
    pub(crate) fn dk(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.dkx[ix], self.dky[iy])
    }

    #[inline]
    pub(crate) fn k_sq(&self, ix: usize, iy: usize) -> f64 {
        self.kx[ix] * self.kx[ix] + self.ky[iy] * self.ky[iy]
    }

    /// Parseval weight turning Σ_k |f̂_k|² into the L² quadrature.
    #[inline]
    pub(crate) fn spectral_weight(&self) -> f64 {
        self.cell_area() / self.len() as f64
    }
}

pub(crate) fn assert_same_grid(a: &Grid, b: &Grid) {
    assert!(a.same_as(b), "fields live on different grids");
}

macro_rules! field_common {
    ($name:ident, $elem:ty) => {
        impl $name {
            pub fn zeros(grid: Arc<Grid>) -> Self {
                let n = grid.len();
                Self {
                    grid,
                    data: vec![<$elem>::default(); n],
                }
            }

            pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(f64, f64) -> $elem) -> Self {
                let mut data = Vec::with_capacity(grid.len());
                for iy in 0..grid.ny {
                    for ix in 0..grid.nx {
                        let (x, y) = grid.point(ix, iy);
                        data.push(f(x, y));
                    }
                }
                Self { grid, data }
            }

            pub fn from_data(grid: Arc<Grid>, data: Vec<$elem>) -> Self {
                assert_eq!(data.len(), grid.len(), "field data length mismatch");
                Self { grid, data }
            }

            pub fn grid(&self) -> &Arc<Grid> {
                &self.grid
            }

            pub fn data(&self) -> &[$elem] {
                &self.data
            }

            pub fn data_mut(&mut self) -> &mut [$elem] {
                &mut self.data
            }

            #[inline]
            pub fn at(&self, ix: usize, iy: usize) -> $elem {
                self.data[self.grid.idx(ix, iy)]
            }

            /// self + c · other.
            pub fn scaled_add(&self, other: &Self, c: f64) -> Self {
                assert_same_grid(&self.grid, &other.grid);
                let data = self
                    .data
                    .iter()
                    .zip(&other.data)
                    .map(|(&a, &b)| a + b * c)
                    .collect();
                Self {
                    grid: self.grid.clone(),
                    data,
                }
            }

            /// self += c · other.
            pub fn axpy(&mut self, c: f64, other: &Self) {
                assert_same_grid(&self.grid, &other.grid);
                for (a, &b) in self.data.iter_mut().zip(&other.data) {
                    *a += b * c;
                }
            }

            pub fn scale(&mut self, c: f64) {
                for a in self.data.iter_mut() {
                    *a *= c;
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.scaled_add(other, -1.0)
            }
        }

        impl Clone for $name {
            fn clone(&self) -> Self {
                Self {
                    grid: self.grid.clone(),
                    data: self.data.clone(),
                }
            }
        }
    };
}

/// Real scalar field sampled on a [`Grid`].
#[derive(Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    data: Vec<f64>,
}

/// Complex scalar field (the Higgs φ).
#[derive(Debug)]
pub struct ComplexField {
    grid: Arc<Grid>,
    data: Vec<Complex64>,
}

field_common!(ScalarField, f64);
field_common!(ComplexField, Complex64);

/// Two-component real vector field (the spatial gauge potential A).
#[derive(Debug, Clone)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        VectorField {
            x: ScalarField::zeros(grid.clone()),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn new(x: ScalarField, y: ScalarField) -> Self {
        assert_same_grid(x.grid(), y.grid());
        VectorField { x, y }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.x.grid()
    }

    pub fn scaled_add(&self, other: &Self, c: f64) -> Self {
        VectorField {
            x: self.x.scaled_add(&other.x, c),
            y: self.y.scaled_add(&other.y, c),
        }
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        self.x.axpy(c, &other.x);
        self.y.axpy(c, &other.y);
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.scaled_add(other, -1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

// ---------------------------------------------------------------------------
// Spectral derivative operators
// ---------------------------------------------------------------------------

pub(crate) fn hat_real(f: &ScalarField) -> Vec<Complex64> {
    spectral::forward_real(f.grid.nx, f.grid.ny, &f.data)
}

pub(crate) fn hat_complex(f: &ComplexField) -> Vec<Complex64> {
    spectral::forward_complex(f.grid.nx, f.grid.ny, &f.data)
}

/// Multiply a spectrum by ik along one axis (axis 0 = x, 1 = y).
pub(crate) fn apply_deriv(grid: &Grid, hat: &[Complex64], axis: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); hat.len()];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let (dkx, dky) = grid.dk(ix, iy);
            let k = if axis == 0 { dkx } else { dky };
            let i = iy * grid.nx + ix;
            out[i] = hat[i] * Complex64::new(0.0, k);
        }
    }
    out
}

pub(crate) fn apply_neg_ksq(grid: &Grid, hat: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); hat.len()];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let i = iy * grid.nx + ix;
            out[i] = hat[i] * (-grid.k_sq(ix, iy));
        }
    }
    out
}

pub(crate) fn dealias_hat(grid: &Grid, hat: &mut [Complex64]) {
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if !grid.dealias_keep(ix, iy) {
                hat[iy * grid.nx + ix] = Complex64::default();
            }
        }
    }
}

fn band_limit_hat(grid: &Grid, hat: &mut [Complex64], frac: f64) {
    let kx_cut = frac * std::f64::consts::PI / grid.dx;
    let ky_cut = frac * std::f64::consts::PI / grid.dy;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let kx = grid.kx[ix].abs();
            let ky = grid.ky[iy].abs();
            if kx > kx_cut || ky > ky_cut {
                hat[iy * grid.nx + ix] = Complex64::default();
            }
        }
    }
}

impl ScalarField {
    /// Spectral spatial gradient (∂₁f, ∂₂f).
    pub fn gradient(&self) -> VectorField {
        let hat = hat_real(self);
        let g = &self.grid;
        let gx = spectral::inverse_real(g.nx, g.ny, apply_deriv(g, &hat, 0));
        let gy = spectral::inverse_real(g.nx, g.ny, apply_deriv(g, &hat, 1));
        VectorField {
            x: ScalarField::from_data(self.grid.clone(), gx),
            y: ScalarField::from_data(self.grid.clone(), gy),
        }
    }

    /// Spectral Laplacian Δf = ∂₁²f + ∂₂²f.
    pub fn laplacian(&self) -> ScalarField {
        let hat = hat_real(self);
        let g = &self.grid;
        let out = spectral::inverse_real(g.nx, g.ny, apply_neg_ksq(g, &hat));
        ScalarField::from_data(self.grid.clone(), out)
    }

    /// Zero out modes beyond the two-thirds dealiasing cutoff.
    pub fn dealiased(&self) -> ScalarField {
        let mut hat = hat_real(self);
        dealias_hat(&self.grid, &mut hat);
        let g = &self.grid;
        ScalarField::from_data(self.grid.clone(), spectral::inverse_real(g.nx, g.ny, hat))
    }

    /// Zero out modes with |k| beyond `frac` of the per-axis Nyquist wavenumber.
    pub fn band_limited(&self, frac: f64) -> ScalarField {
        let mut hat = hat_real(self);
        band_limit_hat(&self.grid, &mut hat, frac);
        let g = &self.grid;
        ScalarField::from_data(self.grid.clone(), spectral::inverse_real(g.nx, g.ny, hat))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl ComplexField {
    pub fn gradient(&self) -> (ComplexField, ComplexField) {
        let hat = hat_complex(self);
        let g = &self.grid;
        let gx = spectral::inverse_complex(g.nx, g.ny, apply_deriv(g, &hat, 0));
        let gy = spectral::inverse_complex(g.nx, g.ny, apply_deriv(g, &hat, 1));
        (
            ComplexField::from_data(self.grid.clone(), gx),
            ComplexField::from_data(self.grid.clone(), gy),
        )
    }

    pub fn laplacian(&self) -> ComplexField {
        let hat = hat_complex(self);
        let g = &self.grid;
        let out = spectral::inverse_complex(g.nx, g.ny, apply_neg_ksq(g, &hat));
        ComplexField::from_data(self.grid.clone(), out)
    }

    pub fn dealiased(&self) -> ComplexField {
        let mut hat = hat_complex(self);
        dealias_hat(&self.grid, &mut hat);
        let g = &self.grid;
        ComplexField::from_data(self.grid.clone(), spectral::inverse_complex(g.nx, g.ny, hat))
    }

    pub fn band_limited(&self, frac: f64) -> ComplexField {
        let mut hat = hat_complex(self);
        band_limit_hat(&self.grid, &mut hat, frac);
        let g = &self.grid;
        ComplexField::from_data(self.grid.clone(), spectral::inverse_complex(g.nx, g.ny, hat))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl VectorField {
    /// Spectral divergence ∂₁v₁ + ∂₂v₂.
    pub fn divergence(&self) -> ScalarField {
        let g = self.grid().clone();
        let hx = hat_real(&self.x);
        let hy = hat_real(&self.y);
        let dx = apply_deriv(&g, &hx, 0);
        let dy = apply_deriv(&g, &hy, 1);
        let sum: Vec<Complex64> = dx.iter().zip(&dy).map(|(a, b)| a + b).collect();
        ScalarField::from_data(g.clone(), spectral::inverse_real(g.nx, g.ny, sum))
    }

    /// Scalar curl ∂₁v₂ − ∂₂v₁.
    pub fn curl(&self) -> ScalarField {
        let g = self.grid().clone();
        let hx = hat_real(&self.x);
        let hy = hat_real(&self.y);
        let d1y = apply_deriv(&g, &hy, 0);
        let d2x = apply_deriv(&g, &hx, 1);
        let diff: Vec<Complex64> = d1y.iter().zip(&d2x).map(|(a, b)| a - b).collect();
        ScalarField::from_data(g.clone(), spectral::inverse_real(g.nx, g.ny, diff))
    }

    pub fn band_limited(&self, frac: f64) -> VectorField {
        VectorField {
            x: self.x.band_limited(frac),
            y: self.y.band_limited(frac),
        }
    }
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

fn lp_from_abs(vals: impl Iterator<Item = f64>, p: f64, cell: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(vals.fold(0.0, f64::max));
    }
    if p == 2.0 || p == 3.0 || p == 4.0 || p == 6.0 {
        let sum: f64 = vals.map(|a| a.powf(p)).sum();
        Ok((sum * cell).powf(1.0 / p))
    } else {
        Err(CoreError::UnsupportedLpExponent(p))
    }
}

fn hs_from_hat(grid: &Grid, hat: &[Complex64], s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(CoreError::InvalidSobolevOrder(s));
    }
    let w = grid.spectral_weight();
    let mut sum = 0.0;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let k2 = grid.k_sq(ix, iy);
            sum += (1.0 + k2).powf(s) * hat[iy * grid.nx + ix].norm_sqr();
        }
    }
    Ok((sum * w).sqrt())
}

/// ‖ |k|^order f̂ ‖ for a stack of spectra — the ∇^k̃ norms of the 𝒥 functional.
pub(crate) fn derivative_norm_from_hats(grid: &Grid, hats: &[&[Complex64]], order: u32) -> f64 {
    let w = grid.spectral_weight();
    let mut sum = 0.0;
    for hat in hats {
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let k2 = grid.k_sq(ix, iy);
                sum += k2.powi(order as i32) * hat[iy * grid.nx + ix].norm_sqr();
            }
        }
    }
    (sum * w).sqrt()
}

impl ScalarField {
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|v| v * v).sum();
        (sum * self.grid.cell_area()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_from_abs(self.data.iter().map(|v| v.abs()), p, self.grid.cell_area())
    }

    /// Sobolev norm (Σ_k (1+|k|²)^s |f̂_k|² · cellweight)^{1/2}; equals the
    /// L² norm at s = 0.
    pub fn hs_norm(&self, s: f64) -> Result<f64> {
        hs_from_hat(&self.grid, &hat_real(self), s)
    }

    /// ‖∇^order f‖_{L²} via the spectral multiplier |k|^order.
    pub fn derivative_norm(&self, order: u32) -> f64 {
        derivative_norm_from_hats(&self.grid, &[&hat_real(self)], order)
    }
}

impl ComplexField {
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        (sum * self.grid.cell_area()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_from_abs(self.data.iter().map(|v| v.norm()), p, self.grid.cell_area())
    }

    pub fn hs_norm(&self, s: f64) -> Result<f64> {
        hs_from_hat(&self.grid, &hat_complex(self), s)
    }

    pub fn derivative_norm(&self, order: u32) -> f64 {
        derivative_norm_from_hats(&self.grid, &[&hat_complex(self)], order)
    }
}

impl VectorField {
    pub fn l2_norm(&self) -> f64 {
        let sx: f64 = self.x.data.iter().map(|v| v * v).sum();
        let sy: f64 = self.y.data.iter().map(|v| v * v).sum();
        ((sx + sy) * self.grid().cell_area()).sqrt()
    }

    pub fn derivative_norm(&self, order: u32) -> f64 {
        derivative_norm_from_hats(
            self.grid(),
            &[&hat_real(&self.x), &hat_real(&self.y)],
            order,
        )
    }
}
