//! Internal 2D FFT engine.
//!
//! Transforms are complex-to-complex, unnormalized forward and 1/(nx·ny)
//! on the inverse. The planner lives in a thread-local cache so grids and
//! fields stay plain data; the per-thread scratch is never shared.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            FftDirection::Forward => p.plan_fft_forward(n),
            FftDirection::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// dst (nx rows of length ny) = transpose of src (ny rows of length nx).
fn transpose(nx: usize, ny: usize, src: &[Complex64], dst: &mut [Complex64]) {
    for iy in 0..ny {
        let row = &src[iy * nx..(iy + 1) * nx];
        for (ix, v) in row.iter().enumerate() {
            dst[ix * ny + iy] = *v;
        }
    }
}

/// In-place 2D FFT over a row-major (ny rows × nx columns) buffer.
pub(crate) fn fft2(nx: usize, ny: usize, data: &mut [Complex64], dir: FftDirection) {
    debug_assert_eq!(data.len(), nx * ny);
    let row_fft = plan(nx, dir);
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(nx) {
        row_fft.process_with_scratch(row, &mut scratch);
    }

    let col_fft = plan(ny, dir);
    let mut t = vec![Complex64::default(); nx * ny];
    transpose(nx, ny, data, &mut t);
    scratch.resize(col_fft.get_inplace_scratch_len(), Complex64::default());
    for col in t.chunks_exact_mut(ny) {
        col_fft.process_with_scratch(col, &mut scratch);
    }
    transpose(ny, nx, &t, data);

    if dir == FftDirection::Inverse {
        let scale = 1.0 / (nx * ny) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

pub(crate) fn forward_real(nx: usize, ny: usize, data: &[f64]) -> Vec<Complex64> {
    let mut hat: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(nx, ny, &mut hat, FftDirection::Forward);
    hat
}

pub(crate) fn forward_complex(nx: usize, ny: usize, data: &[Complex64]) -> Vec<Complex64> {
    let mut hat = data.to_vec();
    fft2(nx, ny, &mut hat, FftDirection::Forward);
    hat
}

pub(crate) fn inverse_real(nx: usize, ny: usize, mut hat: Vec<Complex64>) -> Vec<f64> {
    fft2(nx, ny, &mut hat, FftDirection::Inverse);
    hat.into_iter().map(|v| v.re).collect()
}

pub(crate) fn inverse_complex(nx: usize, ny: usize, mut hat: Vec<Complex64>) -> Vec<Complex64> {
    fft2(nx, ny, &mut hat, FftDirection::Inverse);
    hat
}
