//! Run configuration: sectioned key = value file (TOML), strictly parsed —
//! unknown keys are errors, constraint violations name the offending key.

use crate::error::{CliError, Result};
use mcsh_core::{DtA0Mode, Grid, InitialDataKind, InitialDataSpec, PotentialSpec, PotentialTerm};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub integrator: IntegratorSection,
    pub potential: PotentialSection,
    pub initial_data: InitialDataSection,
    #[serde(default)]
    pub elliptic: EllipticSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

fn default_cfl() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    /// Time step as a fraction of min(dx, dy); ignored when `dt` is given.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Explicit time step (overrides `cfl`; no stability clamping, so an
    /// over-CFL value runs until the non-finite detector aborts).
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_end: f64,
    pub sample_dt: f64,
    /// "elliptic" (default): solve the time-differentiated constraint for
    /// ∂ₜA₀ each stage. "lagged": first-order backward difference.
    #[serde(default)]
    pub dt_a0: DtA0Setting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DtA0Setting {
    #[default]
    Elliptic,
    Lagged,
}

impl From<DtA0Setting> for DtA0Mode {
    fn from(s: DtA0Setting) -> DtA0Mode {
        match s {
            DtA0Setting::Elliptic => DtA0Mode::Elliptic,
            DtA0Setting::Lagged => DtA0Mode::Lagged,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub kappa: f64,
    #[serde(default)]
    pub alpha: Vec<AlphaEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub m: u32,
    pub q: u32,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSection {
    pub kind: KindSetting,
    #[serde(default)]
    pub amp_phi: f64,
    #[serde(default)]
    pub amp_dt_phi: f64,
    #[serde(default)]
    pub amp_n: f64,
    #[serde(default)]
    pub amp_dt_n: f64,
    #[serde(default)]
    pub amp_a: f64,
    #[serde(default)]
    pub amp_dt_a: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    /// Packet center; defaults to the domain center.
    #[serde(default)]
    pub center: Option<[f64; 2]>,
    #[serde(default = "default_mode")]
    pub mode: [i32; 2],
    #[serde(default = "default_winding")]
    pub winding: i32,
    #[serde(default)]
    pub omega: f64,
    /// Orientation (radians) of the a packet; drawn from the seed when
    /// omitted.
    #[serde(default)]
    pub a_angle: Option<f64>,
    #[serde(default)]
    pub dt_a_angle: Option<f64>,
    /// Spectral mollification: keep |k| below this fraction of the per-axis
    /// Nyquist wavenumber.
    #[serde(default)]
    pub band_limit: Option<f64>,
    /// State file for kind = "from_snapshot" (the matching .meta sidecar
    /// must sit next to it).
    #[serde(default)]
    pub snapshot: Option<String>,
}

fn default_width() -> f64 {
    1.0
}

fn default_mode() -> [i32; 2] {
    [1, 0]
}

fn default_winding() -> i32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindSetting {
    GaussianPacket,
    VortexLike,
    SingleMode,
    FromSnapshot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticSection {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_iters: u32,
}

impl Default for EllipticSection {
    fn default() -> Self {
        let p = mcsh_core::EllipticParams::default();
        EllipticSection {
            tol_rel: p.tol_rel,
            tol_abs: p.tol_abs,
            max_iters: p.max_iters,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_hs")]
    pub hs_exponents: Vec<f64>,
}

fn default_hs() -> Vec<f64> {
    vec![1.0, 2.0]
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            hs_exponents: default_hs(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; overridden by --out.
    #[serde(default)]
    pub dir: Option<String>,
    /// Snapshot cadence in simulation time; no snapshots when absent.
    #[serde(default)]
    pub snapshot_dt: Option<f64>,
}

impl RunConfig {
    /// Parse and validate a config file. Unknown keys, missing keys, type
    /// mismatches, and constraint violations are all errors naming the key.
    pub fn parse(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.build_grid()?;
        self.build_potential()?;
        let it = &self.integrator;
        if !(it.t_end > 0.0 && it.t_end.is_finite()) {
            return Err(CliError::Config(format!(
                "integrator.t_end must be positive (got {})",
                it.t_end
            )));
        }
        if !(it.sample_dt > 0.0 && it.sample_dt.is_finite()) {
            return Err(CliError::Config(format!(
                "integrator.sample_dt must be positive (got {})",
                it.sample_dt
            )));
        }
        if !(it.cfl > 0.0 && it.cfl.is_finite()) {
            return Err(CliError::Config(format!(
                "integrator.cfl must be positive (got {})",
                it.cfl
            )));
        }
        if let Some(dt) = it.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Config(format!(
                    "integrator.dt must be positive (got {dt})"
                )));
            }
        }
        let el = &self.elliptic;
        if el.tol_rel <= 0.0 && el.tol_abs <= 0.0 {
            return Err(CliError::Config(
                "elliptic.tol_rel and elliptic.tol_abs cannot both be zero".into(),
            ));
        }
        if el.max_iters == 0 {
            return Err(CliError::Config("elliptic.max_iters must be >= 1".into()));
        }
        for &s in &self.diagnostics.hs_exponents {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(CliError::Config(format!(
                    "diagnostics.hs_exponents entries must be >= 0 (got {s})"
                )));
            }
        }
        let id = &self.initial_data;
        if !(id.width > 0.0 && id.width.is_finite()) {
            return Err(CliError::Config(format!(
                "initial_data.width must be positive (got {})",
                id.width
            )));
        }
        if let Some(f) = id.band_limit {
            if !(f > 0.0 && f <= 1.0) {
                return Err(CliError::Config(format!(
                    "initial_data.band_limit must lie in (0, 1] (got {f})"
                )));
            }
        }
        if id.kind == KindSetting::FromSnapshot && id.snapshot.is_none() {
            return Err(CliError::Config(
                "initial_data.snapshot is required for kind = \"from_snapshot\"".into(),
            ));
        }
        if let Some(sd) = self.output.snapshot_dt {
            if !(sd > 0.0 && sd.is_finite()) {
                return Err(CliError::Config(format!(
                    "output.snapshot_dt must be positive (got {sd})"
                )));
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        let g = &self.grid;
        Grid::shared(g.nx, g.ny, g.lx, g.ly)
            .map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn build_potential(&self) -> Result<PotentialSpec> {
        let terms = self
            .potential
            .alpha
            .iter()
            .map(|a| PotentialTerm {
                m: a.m,
                q: a.q,
                coeff: a.value,
            })
            .collect();
        PotentialSpec::new(terms, self.potential.kappa)
            .map_err(|e| CliError::Config(format!("potential: {e}")))
    }

    pub fn elliptic_params(&self) -> mcsh_core::EllipticParams {
        mcsh_core::EllipticParams {
            tol_rel: self.elliptic.tol_rel,
            tol_abs: self.elliptic.tol_abs,
            max_iters: self.elliptic.max_iters,
        }
    }

    /// Actual step size: explicit dt, or cfl·min(dx, dy), snapped so that
    /// t_end is an integer number of steps.
    pub fn time_step(&self, grid: &Grid) -> f64 {
        let requested = self
            .integrator
            .dt
            .unwrap_or(self.integrator.cfl * grid.dx.min(grid.dy));
        let steps = (self.integrator.t_end / requested).round().max(1.0);
        self.integrator.t_end / steps
    }

    /// Synthetic-data spec; packet orientations fall back to seed-derived
    /// angles so "random orientation" stays reproducible.
    pub fn initial_data_spec(&self, grid: &Grid, seed: u64) -> InitialDataSpec {
        let id = &self.initial_data;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut draw_angle = || rng.gen_range(0.0..std::f64::consts::TAU);
        let a_angle = id.a_angle.unwrap_or_else(&mut draw_angle);
        let dt_a_angle = id.dt_a_angle.unwrap_or_else(&mut draw_angle);
        let kind = match id.kind {
            KindSetting::GaussianPacket => InitialDataKind::GaussianPacket,
            KindSetting::VortexLike => InitialDataKind::VortexLike,
            KindSetting::SingleMode => InitialDataKind::SingleMode,
            // from_snapshot is resolved by the runner before this is used.
            KindSetting::FromSnapshot => InitialDataKind::GaussianPacket,
        };
        InitialDataSpec {
            kind,
            amp_phi: id.amp_phi,
            amp_dt_phi: id.amp_dt_phi,
            amp_n: id.amp_n,
            amp_dt_n: id.amp_dt_n,
            amp_a: id.amp_a,
            amp_dt_a: id.amp_dt_a,
            width: id.width,
            center: id
                .center
                .map(|c| (c[0], c[1]))
                .unwrap_or((grid.lx / 2.0, grid.ly / 2.0)),
            mode: (id.mode[0], id.mode[1]),
            winding: id.winding,
            omega: id.omega,
            a_angle,
            dt_a_angle,
            band_limit: id.band_limit,
        }
    }

    /// Non-fatal configuration concerns, logged into run.meta.
    pub fn warnings(&self, grid: &Grid) -> Vec<String> {
        let mut out = Vec::new();
        let wrap = grid.lx.min(grid.ly) / 2.0;
        if self.integrator.t_end > wrap {
            out.push(format!(
                "t_end = {} exceeds the wrap-free window min(lx, ly)/2 = {wrap}; \
                 signals can circle the torus before the run ends",
                self.integrator.t_end
            ));
        }
        let dt = self.time_step(grid);
        let cfl_bound = 0.5 * grid.dx.min(grid.dy);
        if dt > cfl_bound * (1.0 + 1e-12) {
            out.push(format!(
                "dt = {dt} exceeds the stability guideline 0.5·min(dx, dy) = {cfl_bound}; \
                 expect a non-finite abort"
            ));
        }
        if self.initial_data.width < 2.0 * grid.dx.max(grid.dy) {
            out.push(format!(
                "initial_data.width = {} is below the 2·dx representability threshold",
                self.initial_data.width
            ));
        }
        if let Ok(pot) = self.build_potential() {
            if pot.unbounded_below() {
                out.push(
                    "potential is not bounded below (odd N power or negative coefficient); \
                     runaway solutions are possible"
                        .into(),
                );
            }
        }
        out
    }
}
