use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use adiabatic_engine::{adiabatic_propagate_single, fig1, schrodinger_propagate};
use fuzzy_gravity::{fig3_report, ScanRow};
use gauge_geometry::{berry_connection, berry_curvature, cover_charge, monopole_charge_on, PatchCover, SphereMesh};
use open_system::{bipartite_oracle, entropy_of, quarter_arc, trace_distance, weak_adiabatic_propagate, QubitBath};
use spectral_core::{eigendecompose, Circle, ConicalModel, HamiltonianFamily, HermitianOperator, ParameterPath, SpinField, TwinCone};

use crate::config::{PlaneModel, RunConfig, SphereModel};
use crate::{format_real, Cell, CliError, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fig1,
    WormholeScan,
    FieldMap,
    Charge,
    Open,
    Koopman,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] =
        [Command::Fig1, Command::WormholeScan, Command::FieldMap, Command::Charge, Command::Open, Command::Koopman, Command::Sweep];

    pub fn name(self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::WormholeScan => "wormhole-scan",
            Command::FieldMap => "field-map",
            Command::Charge => "charge",
            Command::Open => "open",
            Command::Koopman => "koopman",
            Command::Sweep => "sweep",
        }
    }
}

/// Files produced by a command, its summary, and a numeric failure if one was detected.
#[derive(Clone, Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Value,
    pub failure: Option<String>,
}

impl CommandOutput {
    fn table(&mut self, name: &str, t: &Table) {
        self.files.push((name.to_string(), t.to_csv().into_bytes()));
    }

    fn json(&mut self, name: &str, v: &Value) {
        let mut bytes = serde_json::to_vec_pretty(v).expect("serialisable");
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: Command,
    pub version: &'static str,
    pub config: RunConfig,
    pub outputs: BTreeMap<String, String>,
    pub summary: Value,
    pub status: String,
    pub wall_clock_seconds: f64,
}

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Real numbers in summaries, as the same 17-digit strings the tables use.
fn r(v: f64) -> Value {
    Value::String(format_real(v))
}

fn opt(v: Option<f64>) -> Value {
    v.map(r).unwrap_or(Value::Null)
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    match cmd {
        Command::Fig1 => cmd_fig1(cfg),
        Command::WormholeScan => cmd_wormhole_scan(cfg),
        Command::FieldMap => cmd_field_map(cfg),
        Command::Charge => cmd_charge(cfg),
        Command::Open => cmd_open(cfg),
        Command::Koopman => cmd_koopman(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}

/// Runs `cmd`, writes its files and the manifest into `out`, and returns the manifest.
/// A detected numeric failure still writes everything before it is returned as an error.
pub fn run_to_dir(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let output = execute(cmd, cfg)?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut outputs = BTreeMap::new();
    for (name, bytes) in &output.files {
        let path: PathBuf = out.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        outputs.insert(name.clone(), sha256_hex(bytes));
    }
    let manifest = RunManifest {
        command: cmd,
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        outputs,
        summary: output.summary,
        status: output.failure.clone().map(|f| format!("numeric failure: {f}")).unwrap_or_else(|| "ok".into()),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out.join(MANIFEST);
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serialisable");
    bytes.push(b'\n');
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    match output.failure {
        Some(f) => Err(CliError::Numeric(f)),
        None => Ok(manifest),
    }
}

fn cmd_fig1(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let engine = cfg.fig1.engine();
    engine.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let run = fig1::run(&engine).map_err(CliError::numeric)?;
    let times = run.path.times();
    let mut path = Table::new(&["t", "x", "y"]);
    let mut bare = Table::new(&["t", "p0", "p1"]);
    let mut inst = Table::new(&["t", "p_plus", "p_minus"]);
    for (k, &t) in times.iter().enumerate() {
        let x = &run.path.points()[k];
        path.push_reals(&[t, x[0], x[1]]);
        bare.push_reals(&[t, run.bare[k][0], run.bare[k][1]]);
        inst.push_reals(&[t, run.instantaneous[k][0], run.instantaneous[k][1]]);
    }
    let tr = &run.transit;
    let t_star = engine.crossing_time();
    let (e_up, e_lo) = tr.stated_error();
    let mut out = CommandOutput::default();
    out.table("fig1_path.csv", &path);
    out.table("fig1_bare.csv", &bare);
    out.table("fig1_instantaneous.csv", &inst);
    out.summary = json!({
        "crossing_time": r(t_star),
        "alpha": r(tr.alpha),
        "beta": r(tr.beta),
        "plateau_deviation": r(run.plateau_deviation(t_star, 0.01 * engine.time_scale)),
        "after_crossing_ode": [r(tr.ode.0), r(tr.ode.1)],
        "after_crossing_stated_map": [r(tr.stated.0), r(tr.stated.1)],
        "after_crossing_sudden_map": [r(tr.sudden.0), r(tr.sudden.1)],
        "stated_map_error": [r(e_up), r(e_lo)],
        "sudden_map_error": r(tr.sudden_error()),
        "norm_drift": r(run.trajectory.norm_drift),
    });
    Ok(out)
}

fn cmd_wormhole_scan(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let w = &cfg.wormhole_scan;
    let rep = fig3_report(w.n, w.r_max, w.points).map_err(CliError::numeric)?;
    let mut table = Table::new(&ScanRow::HEADER);
    for row in &rep.rows {
        table.push_reals(&row.values());
    }
    let mut out = CommandOutput::default();
    out.table("wormhole_scan.csv", &table);
    let failures: Vec<Value> = rep.failures.iter().map(|(a, e)| json!({"abs_alpha": r(*a), "error": e})).collect();
    out.summary = json!({
        "truncation": w.n,
        "check_truncation": w.n * 3 / 2,
        "points": w.points,
        "failed_points": failures,
        "symmetry": r(rep.symmetry),
        "crossing_brackets": rep.brackets.iter().map(|(a, b)| [r(*a), r(*b)]).collect::<Vec<_>>(),
        "crossing": opt(rep.crossing),
        "crossing_probability": opt(rep.crossing_probability),
        "throat_probability": r(rep.throat_probability),
        "monotone_near_crossing": rep.monotone_near_crossing,
        "profile_error": r(rep.profile_error.0),
        "profile_error_at": r(rep.profile_error.1),
        "far_coupling": r(rep.far_coupling),
        "truncation_change": r(rep.truncation_change),
    });
    if rep.failures.len() * 100 > w.points {
        out.failure = Some(format!("{} of {} scan points failed", rep.failures.len(), w.points));
    }
    Ok(out)
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (range[0] + range[1])];
    }
    (0..n).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64).collect()
}

fn cmd_field_map(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let m = &cfg.field_map;
    let family: Box<dyn HamiltonianFamily> = match m.model {
        PlaneModel::Cone => Box::new(ConicalModel),
        PlaneModel::Spin { .. } => Box::new(SpinField::default()),
    };
    let lift = |x: f64, y: f64| match m.model {
        PlaneModel::Cone => vec![x, y],
        PlaneModel::Spin { z } => vec![x, y, z],
    };
    let gauge = m.gauge.gauge();
    let mut table = Table::new(&["x", "y", "a_x", "a_y", "f_xy_curl", "f_xy_sum_over_states"]);
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    for &y in &linspace(m.y_range, m.ny) {
        for &x in &linspace(m.x_range, m.nx) {
            let p = lift(x, y);
            let row = berry_connection(family.as_ref(), &p, m.band, &[0, 1], &gauge).and_then(|a| {
                let f = berry_curvature(family.as_ref(), &p, m.band)?;
                Ok((a, f))
            });
            match row {
                Ok((a, f)) => {
                    let k = f.pairs.iter().position(|&q| q == (0, 1)).expect("pair (0, 1) present");
                    worst = worst.max((f.curl[k] - f.sum_over_states[k]).abs());
                    table.push_reals(&[x, y, a.a[0], a.a[1], f.curl[k], f.sum_over_states[k]]);
                }
                Err(e) => {
                    failed.push(json!({"x": r(x), "y": r(y), "error": e.to_string()}));
                    table.push_reals(&[x, y, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
                }
            }
        }
    }
    let total = m.nx * m.ny;
    let mut out = CommandOutput::default();
    out.table("field_map.csv", &table);
    out.summary = json!({"points": total, "failed_points": failed, "route_discrepancy": r(worst)});
    if failed.len() * 100 > total {
        out.failure = Some(format!("{} of {total} field points failed", failed.len()));
    }
    Ok(out)
}

fn cmd_charge(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let q = &cfg.charge;
    let family: Box<dyn HamiltonianFamily> = match q.model {
        SphereModel::Spin { scale } => Box::new(SpinField { scale }),
        SphereModel::TwinCone { separation } => Box::new(TwinCone { separation }),
    };
    let mesh = SphereMesh { n_theta: q.n_theta, n_phi: q.n_phi };
    let mut bands = Vec::new();
    let mut failure = None;
    for band in 0..family.dim() {
        let plaq = monopole_charge_on(family.as_ref(), &q.center, q.radius, band, mesh).map_err(CliError::numeric)?;
        let cover = PatchCover::three_caps(family.as_ref(), q.center, q.radius, band)
            .and_then(|c| cover_charge(family.as_ref(), &c, q.cover_samples));
        let (cocycle, detail) = match &cover {
            Ok(c) => (json!(c.charge), json!({"north": c.north.integer, "south": c.south.integer, "north_residual": r(c.north.residual), "south_residual": r(c.south.residual)})),
            Err(e) => (Value::Null, json!({"error": e.to_string()})),
        };
        if plaq.residual > gauge_geometry::sphere::CHARGE_RESIDUAL {
            failure.get_or_insert(format!("band {band}: flux {} is not near an integer", plaq.flux));
        }
        match &cover {
            Ok(c) if c.charge != plaq.charge => {
                failure.get_or_insert(format!("band {band}: cocycle {} disagrees with plaquette {}", c.charge, plaq.charge));
            }
            Err(e) => {
                failure.get_or_insert(format!("band {band}: {e}"));
            }
            _ => {}
        }
        bands.push(json!({
            "band": band,
            "plaquette_charge": plaq.charge,
            "flux": r(plaq.flux),
            "residual": r(plaq.residual),
            "cocycle_charge": cocycle,
            "cocycle": detail,
        }));
    }
    let report = json!({"mesh": [q.n_theta, q.n_phi], "bands": bands});
    let mut out = CommandOutput::default();
    out.json("charge.json", &report);
    out.summary = report;
    out.failure = failure;
    Ok(out)
}

fn hermitian_spectrum(m: &spectral_core::CMatrix) -> Result<Vec<f64>, CliError> {
    let h = HermitianOperator::symmetrized(m.clone()).map_err(CliError::numeric)?;
    Ok(eigendecompose(&h).map_err(CliError::numeric)?.values)
}

fn cmd_open(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let o = &cfg.open;
    let model = match cfg.seed {
        Some(s) => QubitBath::with_seed(o.epsilon, s),
        None => QubitBath::new(o.epsilon),
    };
    let path = quarter_arc(o.period, o.samples).map_err(CliError::numeric)?;
    let (a, alpha) = (o.system_band, o.environment_level);
    let run = weak_adiabatic_propagate(&model, &path, a, alpha, o.flavor.flavor()).map_err(CliError::numeric)?;
    let oracle = bipartite_oracle(&model, &path, a, alpha, o.tol).map_err(CliError::numeric)?;
    let mut table = Table::new(&["t", "x", "y", "trace", "purity", "entropy", "oracle_purity", "oracle_entropy", "trace_distance"]);
    let mut worst = 0.0f64;
    for (k, &t) in run.times.iter().enumerate() {
        let s = &run.states[k];
        let tr = s.trace().re;
        let purity = s.iter().map(|z| z.norm_sqr()).sum::<f64>() / (tr * tr);
        let p: Vec<f64> = hermitian_spectrum(s)?.iter().map(|v| (v / tr).max(0.0)).collect();
        let d = trace_distance(s, oracle[k].matrix());
        worst = worst.max(d);
        let x = &path.points()[k];
        table.push_reals(&[t, x[0], x[1], tr, purity, entropy_of(&p), oracle[k].purity(), oracle[k].von_neumann_entropy(), d]);
    }
    let mut out = CommandOutput::default();
    out.table("open.csv", &table);
    out.summary = json!({
        "epsilon": r(o.epsilon),
        "max_trace_distance": r(worst),
        "trace_drift": r(run.trace_drift),
        "entropy_shift": r(run.entropy_shift),
        "min_eigenvalue": r(run.min_eigenvalue),
        "gap_warnings": run.warnings.iter().map(|(k, w)| json!({"sample": k, "warning": w})).collect::<Vec<_>>(),
    });
    Ok(out)
}

fn cmd_koopman(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let k = &cfg.koopman;
    let model = k.model();
    model.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let mut conv = Table::new(&koopman::ConvergenceRow::HEADER);
    let mut devs = Vec::new();
    let mut finest = None;
    for &m in &k.grids {
        let run = model.run(m).map_err(CliError::numeric)?;
        conv.push(vec![Cell::from(m), Cell::from(run.deviation), Cell::from(run.norm_drift)]);
        devs.push(run.deviation);
        finest = Some(run);
    }
    let run = finest.expect("at least one grid");
    let mut trace = Table::new(&["t", "theta", "deviation"]);
    for ((t, s), psi) in run.sk.times.iter().zip(&run.sk.states).zip(&run.reference.states) {
        let theta = model.theta(*t);
        let v = s.evaluate(&run.operator, theta);
        let v = &v / spectral_core::c64(v.norm(), 0.0);
        trace.push_reals(&[*t, theta, (v - psi).norm()]);
    }
    let mut out = CommandOutput::default();
    out.table("koopman_convergence.csv", &conv);
    out.table("koopman_trace.csv", &trace);
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    out.summary = json!({"grids": k.grids, "deviations": devs.iter().map(|&d| r(d)).collect::<Vec<_>>(), "decreasing": decreasing});
    if !decreasing {
        out.failure = Some(format!("deviation does not fall under grid refinement: {devs:?}"));
    }
    Ok(out)
}

/// Largest distance between the single-band solution and the exact state on one loop of the unit circle.
pub fn adiabatic_loop_error(period: f64, band: usize, samples: usize, tol: f64) -> Result<f64, CliError> {
    let c = Circle::new(1.0, 2.0 * std::f64::consts::PI / period);
    let path = ParameterPath::from_curve(Arc::new(c), 0.0, period, samples).map_err(CliError::numeric)?;
    let ad = adiabatic_propagate_single(&ConicalModel, &path, band, &spectral_core::Gauge::Component(0)).map_err(CliError::numeric)?;
    let ex = schrodinger_propagate(&ConicalModel, &path, &ad.trajectory.states[0], tol).map_err(CliError::numeric)?;
    Ok(ad.trajectory.states.iter().zip(&ex.states).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

fn cmd_sweep(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let s = &cfg.sweep;
    let mut table = Table::new(&["period", "max_error"]);
    let mut errs = Vec::new();
    for &p in &s.periods {
        let e = adiabatic_loop_error(p, s.band, s.samples, s.tol)?;
        table.push_reals(&[p, e]);
        errs.push(e);
    }
    let order = if errs.len() > 1 { -log_slope(&s.periods, &errs) } else { f64::NAN };
    let mut out = CommandOutput::default();
    out.table("sweep.csv", &table);
    out.summary = json!({"observed_order": r(order), "errors": errs.iter().map(|&e| r(e)).collect::<Vec<_>>()});
    Ok(out)
}
