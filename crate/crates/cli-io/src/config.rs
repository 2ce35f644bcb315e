use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Section {
    pub speed: f64,
    pub t_star: f64,
    pub t_end: f64,
    pub incoming_angle: f64,
    pub deflection: f64,
    pub p_plus: f64,
    pub samples: usize,
    pub tol: f64,
    pub time_scale: f64,
    /// `(t, x, y)` rows replacing the default two-leg path.
    pub breakpoints: Option<Vec<[f64; 3]>>,
}

impl Default for Fig1Section {
    fn default() -> Self {
        let d = adiabatic_engine::Fig1Config::default();
        Self {
            speed: d.speed,
            t_star: d.t_star,
            t_end: d.t_end,
            incoming_angle: d.incoming_angle,
            deflection: d.deflection,
            p_plus: d.p_plus,
            samples: d.samples,
            tol: d.tol,
            time_scale: d.time_scale,
            breakpoints: d.breakpoints,
        }
    }
}

impl Fig1Section {
    pub fn engine(&self) -> adiabatic_engine::Fig1Config {
        adiabatic_engine::Fig1Config {
            speed: self.speed,
            t_star: self.t_star,
            t_end: self.t_end,
            incoming_angle: self.incoming_angle,
            deflection: self.deflection,
            p_plus: self.p_plus,
            samples: self.samples,
            tol: self.tol,
            time_scale: self.time_scale,
            breakpoints: self.breakpoints.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WormholeSection {
    /// Fock truncation; the convergence gate reruns at `3n/2`.
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
}

impl Default for WormholeSection {
    fn default() -> Self {
        Self { n: 64, r_max: 3.0, points: 60 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeChoice {
    Largest,
    First,
    Second,
}

impl GaugeChoice {
    pub fn gauge(self) -> spectral_core::Gauge {
        match self {
            GaugeChoice::Largest => spectral_core::Gauge::LargestComponent,
            GaugeChoice::First => spectral_core::Gauge::Component(0),
            GaugeChoice::Second => spectral_core::Gauge::Component(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PlaneModel {
    /// `x σx + y σy`.
    Cone,
    /// `x·σ` on the plane at height `z`.
    Spin { z: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldMapSection {
    pub model: PlaneModel,
    pub band: usize,
    pub gauge: GaugeChoice,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl Default for FieldMapSection {
    fn default() -> Self {
        Self { model: PlaneModel::Cone, band: 1, gauge: GaugeChoice::First, x_range: [-1.0, 1.0], y_range: [-1.0, 1.0], nx: 20, ny: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SphereModel {
    /// `s x·σ`.
    Spin { scale: f64 },
    /// Two equal crossings at `(±d, 0, 0)`.
    TwinCone { separation: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChargeSection {
    pub model: SphereModel,
    pub center: [f64; 3],
    pub radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Samples per transition-function curve on the three-cap cover.
    pub cover_samples: usize,
}

impl Default for ChargeSection {
    fn default() -> Self {
        Self { model: SphereModel::Spin { scale: 1.0 }, center: [0.0; 3], radius: 1.0, n_theta: 64, n_phi: 128, cover_samples: 201 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlavorChoice {
    /// Connection built with the band projector.
    Projected,
    /// Connection built from the full derivative.
    Full,
}

impl FlavorChoice {
    pub fn flavor(self) -> open_system::Flavor {
        match self {
            FlavorChoice::Projected => open_system::Flavor::CalA,
            FlavorChoice::Full => open_system::Flavor::FrakA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpenSection {
    pub epsilon: f64,
    /// Duration of the quarter-turn path.
    pub period: f64,
    pub samples: usize,
    pub flavor: FlavorChoice,
    pub system_band: usize,
    pub environment_level: usize,
    pub tol: f64,
}

impl Default for OpenSection {
    fn default() -> Self {
        Self { epsilon: 0.01, period: 150.0, samples: 1501, flavor: FlavorChoice::Projected, system_band: 1, environment_level: 0, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KoopmanSection {
    pub omega: f64,
    pub duration: f64,
    pub theta0: f64,
    pub kappa: f64,
    pub band: usize,
    pub samples: usize,
    pub tol: f64,
    pub grids: Vec<usize>,
}

impl Default for KoopmanSection {
    fn default() -> Self {
        let d = koopman::CircleCorrespondence::default();
        Self { omega: d.omega, duration: d.duration, theta0: d.theta0, kappa: d.kappa, band: d.band, samples: d.samples, tol: d.tol, grids: vec![128, 256, 512] }
    }
}

impl KoopmanSection {
    pub fn model(&self) -> koopman::CircleCorrespondence {
        koopman::CircleCorrespondence {
            omega: self.omega,
            duration: self.duration,
            theta0: self.theta0,
            kappa: self.kappa,
            band: self.band,
            samples: self.samples,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Loop durations on the unit circle.
    pub periods: Vec<f64>,
    pub band: usize,
    pub samples: usize,
    pub tol: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { periods: vec![10.0, 20.0, 40.0, 80.0], band: 1, samples: 2001, tol: 1e-11 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub fig1: Fig1Section,
    pub wormhole_scan: WormholeSection,
    pub field_map: FieldMapSection,
    pub charge: ChargeSection,
    pub open: OpenSection,
    pub koopman: KoopmanSection,
    pub sweep: SweepSection,
}

/// 1-based line of `key` inside `section` of a JSON text, if both appear.
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines.iter().position(|l| l.contains(&format!("\"{section}\"")))?;
    lines[start..].iter().position(|l| l.contains(&format!("\"{key}\""))).map(|k| start + k + 1)
}

struct Checker<'a> {
    text: Option<&'a str>,
    problems: Vec<String>,
}

impl Checker<'_> {
    fn require(&mut self, ok: bool, section: &str, key: &str, what: &str) {
        if !ok {
            let at = self.text.and_then(|t| locate(t, section, key)).map(|l| format!("line {l}: ")).unwrap_or_default();
            self.problems.push(format!("{at}{section}.{key}: {what}"));
        }
    }
}

fn tol_ok(t: f64) -> bool {
    t > 1e-13 && t < 1e-4
}

fn pos(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl RunConfig {
    /// Parses a JSON document; syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.validate_against(Some(text))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.validate_against(None)
    }

    fn validate_against(&self, text: Option<&str>) -> Result<(), CliError> {
        let mut c = Checker { text, problems: Vec::new() };
        c.require(self.threads.is_none_or(|k| k > 0), "threads", "threads", "must be at least 1");

        let f = &self.fig1;
        c.require(pos(f.speed), "fig1", "speed", "must be positive");
        c.require(f.t_star > 0.0 && f.t_end > f.t_star, "fig1", "t_end", "need 0 < t_star < t_end");
        c.require((0.0..=1.0).contains(&f.p_plus), "fig1", "p_plus", "must lie in [0, 1]");
        c.require(f.samples >= 3, "fig1", "samples", "must be at least 3");
        c.require(tol_ok(f.tol), "fig1", "tol", "must lie in (1e-13, 1e-4)");
        c.require(pos(f.time_scale), "fig1", "time_scale", "must be positive");
        c.require(f.deflection.abs() <= PI && f.incoming_angle.is_finite(), "fig1", "deflection", "must lie in [−π, π]");

        let w = &self.wormhole_scan;
        c.require(w.n >= 8 && w.n <= 400, "wormhole_scan", "n", "must lie in [8, 400]");
        c.require(pos(w.r_max) && w.r_max * w.r_max <= w.n as f64 / 4.0, "wormhole_scan", "r_max", "must be positive with r_max² ≤ n/4");
        c.require(w.points >= 2, "wormhole_scan", "points", "must be at least 2");

        let m = &self.field_map;
        c.require(m.band < 2, "field_map", "band", "must be 0 or 1");
        c.require(m.nx >= 1 && m.ny >= 1, "field_map", "nx", "grid must be non-empty");
        c.require(m.x_range[0].is_finite() && m.x_range[1] > m.x_range[0], "field_map", "x_range", "must be increasing");
        c.require(m.y_range[0].is_finite() && m.y_range[1] > m.y_range[0], "field_map", "y_range", "must be increasing");

        let q = &self.charge;
        c.require(pos(q.radius), "charge", "radius", "must be positive");
        c.require(q.n_theta >= 4 && q.n_phi >= 4, "charge", "n_theta", "mesh needs at least 4 × 4 cells");
        c.require(q.cover_samples >= 3, "charge", "cover_samples", "must be at least 3");
        match q.model {
            SphereModel::Spin { scale } => c.require(scale.is_finite() && scale != 0.0, "charge", "scale", "must be non-zero"),
            SphereModel::TwinCone { separation } => c.require(separation.is_finite(), "charge", "separation", "must be finite"),
        }

        let o = &self.open;
        c.require(o.epsilon.is_finite() && o.epsilon >= 0.0 && o.epsilon < 0.1, "open", "epsilon", "must lie in [0, 0.1)");
        c.require(pos(o.period), "open", "period", "must be positive");
        c.require(o.samples >= 2, "open", "samples", "must be at least 2");
        c.require(o.system_band < 2, "open", "system_band", "must be 0 or 1");
        c.require(o.environment_level < 3, "open", "environment_level", "must be 0, 1 or 2");
        c.require(tol_ok(o.tol), "open", "tol", "must lie in (1e-13, 1e-4)");

        let k = &self.koopman;
        c.require(k.omega.is_finite(), "koopman", "omega", "must be finite");
        c.require(pos(k.duration), "koopman", "duration", "must be positive");
        c.require(pos(k.kappa), "koopman", "kappa", "must be positive");
        c.require(k.band < 2, "koopman", "band", "must be 0 or 1");
        c.require(k.samples >= 2, "koopman", "samples", "must be at least 2");
        c.require(k.tol > 1e-14 && k.tol < 1e-4, "koopman", "tol", "must lie in (1e-14, 1e-4)");
        c.require(!k.grids.is_empty() && k.grids.iter().all(|&m| (4..=8192).contains(&m)), "koopman", "grids", "sizes must lie in [4, 8192]");

        let s = &self.sweep;
        c.require(!s.periods.is_empty() && s.periods.iter().all(|&p| pos(p)), "sweep", "periods", "must be positive");
        c.require(s.band < 2, "sweep", "band", "must be 0 or 1");
        c.require(s.samples >= 3, "sweep", "samples", "must be at least 3");
        c.require(tol_ok(s.tol), "sweep", "tol", "must lie in (1e-13, 1e-4)");

        if c.problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(c.problems.join("; ")))
        }
    }

    /// Small sizes for fast end-to-end runs of every command.
    pub fn quick() -> Self {
        Self {
            fig1: Fig1Section { samples: 201, ..Default::default() },
            wormhole_scan: WormholeSection { n: 16, r_max: 1.5, points: 7 },
            field_map: FieldMapSection { nx: 4, ny: 4, ..Default::default() },
            charge: ChargeSection { n_theta: 16, n_phi: 32, cover_samples: 101, ..Default::default() },
            open: OpenSection { period: 20.0, samples: 101, ..Default::default() },
            koopman: KoopmanSection { duration: 2.0, samples: 11, kappa: 50.0, grids: vec![32, 64], ..Default::default() },
            sweep: SweepSection { periods: vec![10.0, 20.0], samples: 401, ..Default::default() },
            ..Default::default()
        }
    }
}
