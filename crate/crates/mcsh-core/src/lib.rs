//! Pseudo-spectral evolution of the (2+1)-dimensional
//! Maxwell–Chern–Simons–Higgs system in Coulomb gauge on a periodic torus.
//!
//! Field content: a complex Higgs scalar φ, a neutral real scalar N, and a
//! U(1) gauge potential A_μ = (A₀, A) with both Maxwell and Chern–Simons
//! terms (constant κ > 0) and a polynomial potential
//! V = Σ_{m,q≥1} α_mq |φ|^{2m} N^q. The Coulomb condition ∂^iA_i = 0 turns
//! the A₀ equation elliptic; A₀ is resolved from a screened Poisson solve at
//! every integrator stage while (φ, N, A) obey nonlinear wave equations.
//!
//! Spectral derivatives are the primary discretization; `fd` carries a
//! 4th-order finite-difference twin of each operator as an independent
//! oracle. Products are dealiased with the two-thirds rule. All arithmetic
//! is f64.

pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod fd;
pub mod grid;
pub mod potential;
mod spectral;

pub use diagnostics::{DiagnosticsRecord, EnergyParts, GaugeResidual, GrowthReport, JParts};
pub use dynamics::{DtA0Mode, FieldState, InitialDataKind, InitialDataSpec};
pub use elliptic::{EllipticParams, EllipticSolveReport};
pub use error::{CoreError, Result};
pub use grid::{ComplexField, Grid, ScalarField, VectorField};
pub use potential::{PotentialSpec, PotentialTerm};
