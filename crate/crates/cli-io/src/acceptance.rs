//! The eleven acceptance criteria, each run at its stated tolerance and time budget.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::sync::Arc;
use std::time::Instant;

use adiabatic_engine::{fig1, Fig1Config};
use fuzzy_gravity::{coherent_im_z, coherent_overlap, coherent_state, fig3_report, plane_chart, quasi_coherent, shift_vector};
use fuzzy_gravity::{single_sheet_decay, FuzzyGeometry, Generator, Wormhole, STENCIL};
use gauge_geometry::{berry_connection, cover_charge, loop_circulation, monopole_charge_on, PatchCover, SphereMesh};
use open_system::{bipartite_oracle, eigen_mixed_state, operator_connection, quarter_arc, weak_adiabatic_propagate, Flavor, QubitBath};
use spectral_core::{c64, frame_at, inner, Circle, ConicalModel, CVector, Gauge, ParameterPath, SpinField, C64};

use crate::commands::{adiabatic_loop_error, log_slope};
use crate::{run_to_dir, Command, RunConfig, MANIFEST};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {}: {} [{:.1} s of {:.0} s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds,
            self.budget
        )
    }
}

type Check = fn() -> Result<(bool, String), String>;

pub const CRITERIA: [(usize, &str, f64, Check); 11] = [
    (1, "two-level eigenpairs", 5.0, two_level),
    (2, "loop holonomy", 1.0, holonomy),
    (3, "monopole charge", 10.0, monopole),
    (4, "bent crossing passage", 30.0, crossing_passage),
    (5, "adiabatic convergence", 60.0, convergence),
    (6, "open-system identities", 60.0, open_identities),
    (7, "wormhole closed form", 10.0, wormhole_closed_form),
    (8, "double-sheet scan", 300.0, double_sheet),
    (9, "plane quasi-coherence", 30.0, plane),
    (10, "Koopman correspondence", 60.0, correspondence),
    (11, "determinism", f64::INFINITY, determinism),
];

pub fn run_one(id: usize) -> Outcome {
    let (id, title, budget, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let res = check();
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match res {
        Ok((ok, d)) => (ok && seconds <= budget, if seconds > budget { format!("{d}; over time budget") } else { d }),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, title, pass, detail, seconds, budget }
}

/// Runs every criterion in order, reporting each line through `report` as it completes.
pub fn run_all(mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    (1..=CRITERIA.len())
        .map(|id| {
            let o = run_one(id);
            report(&o);
            o
        })
        .collect()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn two_level() -> Result<(bool, String), String> {
    let mut worst = 0.0f64;
    let s = 0.5f64.sqrt();
    for i in 0..100 {
        for j in 0..100 {
            let x = -2.0 + 4.0 * (i as f64 + 0.5) / 100.0;
            let y = -2.0 + 4.0 * (j as f64 + 0.5) / 100.0;
            let (r, th) = (x.hypot(y), y.atan2(x));
            let f = frame_at(&ConicalModel, &[x, y]).map_err(err)?.with_gauge(&Gauge::Component(0)).map_err(err)?;
            let plus = CVector::from_vec(vec![c64(s, 0.0), C64::from_polar(s, th)]);
            let minus = CVector::from_vec(vec![c64(s, 0.0), -C64::from_polar(s, th)]);
            worst = worst
                .max((f.values[0] + r).abs())
                .max((f.values[1] - r).abs())
                .max((f.vector(1) - plus).norm())
                .max((f.vector(0) - minus).norm());
        }
    }
    let a = berry_connection(&ConicalModel, &[0.0, 1.0], 1, &[0, 1], &Gauge::Component(0)).map_err(err)?.a;
    let a_err = (a[0] + 0.5).abs().max(a[1].abs());
    Ok((worst < 1e-12 && a_err < 1e-6, format!("eigenpair error {worst:.2e}, A+(0,1) = ({:.9}, {:.2e})", a[0], a[1])))
}

fn holonomy() -> Result<(bool, String), String> {
    let c = Circle::new(1.0, 1.0);
    let path = ParameterPath::from_curve(Arc::new(c), 0.0, 2.0 * PI, 401).map_err(err)?;
    let up = loop_circulation(&ConicalModel, &path, 1, &Gauge::Component(0)).map_err(err)?;
    let lo = loop_circulation(&ConicalModel, &path, 0, &Gauge::Component(1)).map_err(err)?;
    let raw = (up.raw - PI).abs().max((lo.raw + PI).abs());
    let turns = (up.turns - 0.5).abs().max((lo.turns + 0.5).abs());
    let factor = (up.holonomy() + 1.0).norm().max((lo.holonomy() + 1.0).norm());
    Ok((
        raw < 1e-6 && turns < 1e-6 && factor < 1e-6,
        format!("circulations {:.9} / {:.9} (turns {:.9} / {:.9}), phase factor error {factor:.2e}", up.raw, lo.raw, up.turns, lo.turns),
    ))
}

fn monopole() -> Result<(bool, String), String> {
    let fam = SpinField::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (band, want) in [(0usize, -1i64), (1, 1)] {
        let q = monopole_charge_on(&fam, &[0.0; 3], 1.0, band, SphereMesh { n_theta: 64, n_phi: 128 }).map_err(err)?;
        let cover = PatchCover::three_caps(&fam, [0.0; 3], 1.0, band).map_err(err)?;
        let c = cover_charge(&fam, &cover, 201).map_err(err)?;
        ok &= q.charge == want && q.residual < 0.05 && c.charge == q.charge;
        parts.push(format!("band {band}: plaquette {} (residual {:.1e}), cocycle {}", q.charge, q.residual, c.charge));
    }
    Ok((ok, parts.join("; ")))
}

fn crossing_passage() -> Result<(bool, String), String> {
    let base = fig1::run(&Fig1Config::default()).map_err(err)?;
    let plateau = base.plateau_deviation(0.5, 0.01);
    let before = base.instantaneous[0];
    let after = *base.instantaneous.last().ok_or("no samples")?;
    let swap = (after[0] - before[0]).abs();
    let start_ok = (before[0] - 0.2).abs() < 1e-6 && (before[1] - 0.8).abs() < 1e-6;
    let mut stated = Vec::new();
    let mut sudden = Vec::new();
    for scale in [1.0, 2.0, 4.0] {
        let run = fig1::run(&Fig1Config { time_scale: scale, ..Fig1Config::default() }).map_err(err)?;
        let (u, l) = run.transit.stated_error();
        stated.push(u.max(l));
        sudden.push(run.transit.sudden_error());
    }
    let within = stated.last().is_some_and(|&e| e < 0.02);
    let monotone = stated.windows(2).all(|w| w[1] <= w[0]);
    let pass = start_ok && plateau < 0.005 && swap > 0.3 && within && monotone;
    Ok((
        pass,
        format!(
            "plateau {plateau:.1e}, swap {swap:.3}; stated map vs ODE {:.3}/{:.3}/{:.3} at 1×/2×/4× (needs < 0.02); exact sudden map vs ODE {:.1e}",
            stated[0],
            stated[1],
            stated[2],
            sudden.iter().cloned().fold(0.0, f64::max)
        ),
    ))
}

fn convergence() -> Result<(bool, String), String> {
    let periods = [10.0, 20.0, 40.0, 80.0];
    let errs: Vec<f64> = periods.iter().map(|&p| adiabatic_loop_error(p, 1, 2001, 1e-11)).collect::<Result<_, _>>().map_err(err)?;
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let order = -log_slope(&periods, &errs);
    Ok((
        decreasing && order >= 0.9,
        format!("errors {:.2e} {:.2e} {:.2e} {:.2e}, observed order {order:.3}", errs[0], errs[1], errs[2], errs[3]),
    ))
}

fn open_identities() -> Result<(bool, String), String> {
    let eps = 0.01;
    let m = QubitBath::new(eps);
    let mut avg_err = 0.0f64;
    for x in [[0.6, 0.8], [1.0, 0.0], [-0.3, 1.2]] {
        for flavor in [Flavor::CalA, Flavor::FrakA] {
            let c = operator_connection(&m, 1, 0, &x, flavor).map_err(err)?;
            for (avg, scalar) in c.averages().iter().zip(&c.scalar) {
                avg_err = avg_err.max((avg.re - scalar).abs()).max(avg.im.abs());
            }
        }
    }
    let loss = |e: f64| eigen_mixed_state(&QubitBath::new(e), 1, 0, &[0.6, 0.8]).map(|s| 1.0 - s.rho.purity());
    let ratio = loss(eps).map_err(err)? / loss(eps / 2.0).map_err(err)?;
    let path = quarter_arc(150.0, 1501).map_err(err)?;
    let oracle = bipartite_oracle(&m, &path, 1, 0, 1e-10).map_err(err)?;
    let mut dist = Vec::new();
    for flavor in [Flavor::CalA, Flavor::FrakA] {
        let run = weak_adiabatic_propagate(&m, &path, 1, 0, flavor).map_err(err)?;
        let worst = run.states.iter().zip(&oracle).map(|(s, o)| open_system::trace_distance(s, o.matrix())).fold(0.0, f64::max);
        dist.push(worst);
    }
    let worst = dist.iter().cloned().fold(0.0, f64::max);
    Ok((
        avg_err < 1e-8 && (ratio - 4.0).abs() < 0.5 && worst < 5.0 * eps,
        format!("averaged connections {avg_err:.1e}, purity-loss ratio {ratio:.3}, trace distance {:.2e}/{:.2e} (bound {:.2})", dist[0], dist[1], 5.0 * eps),
    ))
}

fn wormhole_closed_form() -> Result<(bool, String), String> {
    let mut worst = 0.0f64;
    for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let got = coherent_im_z(c64(r, 0.0), 64).map_err(err)?;
        worst = worst.max((got + FRAC_PI_2 * (-r * r).exp()).abs());
    }
    let w = Wormhole::new(64).map_err(err)?;
    let fit = single_sheet_decay(&w, c64(0.0, 0.0), 3.0, 61, Generator::Dissipative).map_err(err)?;
    let rel = (fit.rate - FRAC_PI_2).abs() / FRAC_PI_2;
    Ok((worst < 1e-8 && rel < 0.02, format!("closed-form error {worst:.1e}, decay rate {:.6} ({:.2}% from π/2)", fit.rate, 100.0 * rel)))
}

fn double_sheet() -> Result<(bool, String), String> {
    let rep = fig3_report(64, 3.0, 60).map_err(err)?;
    let symmetric = rep.symmetry < 1e-9;
    let single = rep.brackets.len() == 1;
    let located = rep.crossing.is_some_and(|c| c > 0.5 && c < 1.5);
    let equi = rep.crossing_probability.is_some_and(|p| (p - 0.5).abs() < 0.02);
    let profile = rep.profile_error.0 < 0.05;
    let far = rep.far_coupling < 1e-6;
    let gate = rep.truncation_change < 1e-6;
    let pass = rep.failures.is_empty() && symmetric && single && located && equi && profile && far && gate;
    let mark = |b: bool| if b { "ok" } else { "miss" };
    Ok((
        pass,
        format!(
            "symmetry {:.1e} {}; crossings {} {}; location {:.3} {}; probability {:.4} {}; profile {:.1}% at {:.2} {}; far coupling {:.2e} {}; N→1.5N {:.1e} {}",
            rep.symmetry,
            mark(symmetric),
            rep.brackets.len(),
            mark(single),
            rep.crossing.unwrap_or(f64::NAN),
            mark(located),
            rep.crossing_probability.unwrap_or(f64::NAN),
            mark(equi),
            100.0 * rep.profile_error.0,
            rep.profile_error.1,
            mark(profile),
            rep.far_coupling,
            mark(far),
            rep.truncation_change,
            mark(gate)
        ),
    ))
}

fn plane() -> Result<(bool, String), String> {
    let g = FuzzyGeometry::plane(64).map_err(err)?;
    let (mut lam, mut ov) = (0.0f64, 1.0f64);
    for (x, y) in [(0.0, 0.0), (1.0, 0.5), (3.0, 0.0), (0.0, -3.0), (1.5, 2.2), (-2.0, -2.0), (-2.1, 2.1)] {
        let q = quasi_coherent(&g, &[x, y, 0.0]).map_err(err)?;
        let c = coherent_state(c64(x, y), 64).map_err(err)?;
        lam = lam.max(q.lambda.abs());
        ov = ov.min(inner(&c.vector, &q.state.rows(0, 64).into_owned()).norm_sqr());
    }
    let mut shift = 0.0f64;
    let h = 1e-5;
    for (x, y) in [(0.3, 0.2), (1.0, -1.5), (-2.0, 0.5)] {
        let a = shift_vector(&g, plane_chart, [x, y], STENCIL, 0).map_err(err)?;
        let at = c64(x, y);
        let d = |dx: f64, dy: f64| (coherent_overlap(at, c64(x + dx, y + dy)) - coherent_overlap(at, c64(x - dx, y - dy))) / c64(2.0 * h, 0.0);
        let oracle = [(c64(0.0, -1.0) * d(h, 0.0)).re, (c64(0.0, -1.0) * d(0.0, h)).re];
        shift = shift
            .max((a.coordinate[0] - oracle[0]).abs())
            .max((a.coordinate[1] - oracle[1]).abs())
            .max((a.coordinate[0] + y).abs())
            .max((a.coordinate[1] - x).abs());
    }
    Ok((
        lam < 1e-10 && ov > 1.0 - 1e-8 && shift < 1e-6,
        format!("|λ0| ≤ {lam:.1e}, overlap ≥ 1 − {:.1e}, shift vector error {shift:.1e}", 1.0 - ov),
    ))
}

fn correspondence() -> Result<(bool, String), String> {
    let rows = koopman::CircleCorrespondence::default().convergence(&[256, 512]).map_err(err)?;
    let (a, b) = (rows[0].deviation, rows[1].deviation);
    let drift = rows.iter().map(|r| r.norm_drift).fold(0.0, f64::max);
    Ok((a < 1e-3 && b <= 0.5 * a, format!("deviation {a:.2e} at m = 256, {b:.2e} at m = 512, norm drift {drift:.1e}")))
}

fn determinism() -> Result<(bool, String), String> {
    let cfg = RunConfig::quick();
    let dirs = [tempfile::tempdir().map_err(err)?, tempfile::tempdir().map_err(err)?];
    let mut differing = Vec::new();
    let mut files = 0;
    for cmd in Command::ALL {
        let mut listings = Vec::new();
        for d in &dirs {
            let out = d.path().join(cmd.name());
            // Numeric failures still write their files; determinism is about the bytes.
            let _ = run_to_dir(cmd, &cfg, &out);
            let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join(MANIFEST)).map_err(err)?).map_err(err)?;
            let mut names: Vec<String> = fs::read_dir(&out).map_err(err)?.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
            names.retain(|n| n != MANIFEST);
            names.sort();
            let bytes: Vec<Vec<u8>> = names.iter().map(|n| fs::read(out.join(n))).collect::<Result<_, _>>().map_err(err)?;
            listings.push((names, bytes, manifest["outputs"].clone()));
        }
        files += listings[0].0.len();
        if listings[0] != listings[1] || listings[0].0.is_empty() {
            differing.push(cmd.name());
        }
    }
    Ok((
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} commands, {files} files bit-identical across two runs", Command::ALL.len())
        } else {
            format!("outputs differ for {}", differing.join(", "))
        },
    ))
}
