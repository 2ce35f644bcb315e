//! The bent passage through the two-level crossing.

use std::f64::consts::PI;
use std::sync::Arc;

use spectral_core::{
    frame_at, inner, phase_fixed, CVector, ConicalModel, Curve, Gauge, ParameterPath, Polyline, C64,
};

use crate::transit::{approach_offset, bend_half_angle};
use crate::{
    adiabatic_propagate_single, compute_beta, crossing_transit, occupation_probabilities, schrodinger_propagate,
    sudden_transit_matrix, Basis, EngineError, StateTrajectory, TransitCoefficients,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Config {
    /// Radial speed in control units per a.u.
    pub speed: f64,
    pub t_star: f64,
    pub t_end: f64,
    /// Polar angle of the starting point.
    pub incoming_angle: f64,
    /// Turn between incoming and outgoing tangents, `2α`.
    pub deflection: f64,
    /// Initial population of the upper band.
    pub p_plus: f64,
    pub samples: usize,
    pub tol: f64,
    /// Uniform stretch of every time; speeds are divided by it.
    pub time_scale: f64,
    /// Explicit `(t, x, y)` breakpoints replacing the two radial legs.
    pub breakpoints: Option<Vec<[f64; 3]>>,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            speed: 10.0,
            t_star: 0.5,
            t_end: 1.0,
            incoming_angle: 0.75 * PI,
            deflection: PI / 3.0,
            p_plus: 0.2,
            samples: 1001,
            tol: 1e-10,
            time_scale: 1.0,
            breakpoints: None,
        }
    }
}

impl Fig1Config {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: &str| Err(EngineError::Invalid(m.to_string()));
        if !(self.speed > 0.0) || !self.speed.is_finite() {
            return bad("speed must be positive");
        }
        if !(self.t_star > 0.0 && self.t_end > self.t_star) {
            return bad("need 0 < t_star < t_end");
        }
        if !(0.0..=1.0).contains(&self.p_plus) {
            return bad("p_plus must lie in [0, 1]");
        }
        if self.samples < 3 {
            return bad("need at least 3 samples");
        }
        if !(self.time_scale > 0.0) {
            return bad("time_scale must be positive");
        }
        if !(self.tol > 1e-13 && self.tol < 1e-4) {
            return bad("tol must lie in (1e-13, 1e-4)");
        }
        Ok(())
    }

    pub fn crossing_time(&self) -> f64 {
        self.t_star * self.time_scale
    }

    pub fn path(&self) -> Result<ParameterPath, EngineError> {
        self.validate()?;
        let s = self.time_scale;
        let poly = match &self.breakpoints {
            Some(bp) => Polyline::new(bp.iter().map(|b| b[0] * s).collect(), bp.iter().map(|b| vec![b[1], b[2]]).collect())?,
            None => {
                let r_in = self.speed * self.t_star;
                let r_out = self.speed * (self.t_end - self.t_star);
                let din = [self.incoming_angle.cos(), self.incoming_angle.sin()];
                let tin = [-din[0], -din[1]];
                let (sn, cs) = self.deflection.sin_cos();
                let tout = [cs * tin[0] - sn * tin[1], sn * tin[0] + cs * tin[1]];
                Polyline::new(
                    vec![0.0, self.t_star * s, self.t_end * s],
                    vec![vec![r_in * din[0], r_in * din[1]], vec![0.0, 0.0], vec![r_out * tout[0], r_out * tout[1]]],
                )?
            }
        };
        let t1 = poly.breakpoints().last().map(|(t, _)| t).expect("breakpoints");
        let at = poly.position(self.crossing_time());
        if at.iter().any(|c| c.abs() > 1e-9) {
            return Err(EngineError::Invalid(format!("path is at {at:?}, not the crossing, at t_star")));
        }
        Ok(ParameterPath::from_curve(Arc::new(poly), 0.0, t1, self.samples)?)
    }
}

/// Populations of (upper, lower) just after the crossing, by three routes.
#[derive(Clone, Debug)]
pub struct TransitReport {
    pub alpha: f64,
    pub beta: f64,
    /// ODE amplitudes on (upper, lower) just before the crossing.
    pub incoming: (C64, C64),
    /// Same amplitudes predicted by single-band phase transport.
    pub incoming_predicted: (C64, C64),
    /// The stated transit map applied to `incoming_predicted`.
    pub stated: (f64, f64),
    /// Sudden overlap matrix applied to `incoming_predicted`.
    pub sudden: (f64, f64),
    /// ODE populations just after the crossing.
    pub ode: (f64, f64),
}

impl TransitReport {
    pub fn stated_error(&self) -> (f64, f64) {
        ((self.stated.0 - self.ode.0).abs(), (self.stated.1 - self.ode.1).abs())
    }

    pub fn sudden_error(&self) -> f64 {
        (self.sudden.0 - self.ode.0).abs().max((self.sudden.1 - self.ode.1).abs())
    }
}

pub struct Fig1Run {
    pub path: ParameterPath,
    pub trajectory: StateTrajectory,
    /// `(p0, p1)` in the standard basis.
    pub bare: Vec<[f64; 2]>,
    /// `(p_plus, p_minus)` in the instantaneous eigenbasis.
    pub instantaneous: Vec<[f64; 2]>,
    pub transit: TransitReport,
}

impl Fig1Run {
    /// Largest deviation of the instantaneous populations from their value at the
    /// start (before the crossing) or at the end (after), outside `|t − t*| < margin`.
    pub fn plateau_deviation(&self, t_star: f64, margin: f64) -> f64 {
        let first = self.instantaneous[0];
        let last = *self.instantaneous.last().expect("samples");
        let mut worst: f64 = 0.0;
        for (t, p) in self.path.times().iter().zip(&self.instantaneous) {
            if (t - t_star).abs() < margin {
                continue;
            }
            let r = if *t < t_star { first } else { last };
            worst = worst.max((p[0] - r[0]).abs()).max((p[1] - r[1]).abs());
        }
        worst
    }
}

const GAUGE: Gauge = Gauge::Component(0);
const UPPER: usize = 1;
const LOWER: usize = 0;

pub fn run(config: &Fig1Config) -> Result<Fig1Run, EngineError> {
    let path = config.path()?;
    let model = ConicalModel;
    let f0 = frame_at(&model, &path.points()[0])?;
    let up0 = phase_fixed(&f0.vector(UPPER), &GAUGE, UPPER)?;
    let lo0 = phase_fixed(&f0.vector(LOWER), &GAUGE, LOWER)?;
    let (cp, cm) = (config.p_plus.sqrt(), (1.0 - config.p_plus).sqrt());
    let psi0: CVector = &up0 * C64::new(cp, 0.0) + &lo0 * C64::new(cm, 0.0);
    let trajectory = schrodinger_propagate(&model, &path, &psi0, config.tol)?;
    let bare = occupation_probabilities(&trajectory, &model, &path, Basis::Bare)?
        .into_iter()
        .map(|p| [p[0], p[1]])
        .collect();
    let instantaneous = occupation_probabilities(&trajectory, &model, &path, Basis::Instantaneous)?
        .into_iter()
        .map(|p| [p[UPPER], p[LOWER]])
        .collect();

    let t_star = config.crossing_time();
    let d = approach_offset(&path);
    let alpha = bend_half_angle(&path, t_star)?;
    let beta = compute_beta(&model, &path, t_star, (UPPER, LOWER), &GAUGE)?;

    // Oracle amplitudes either side of the crossing.
    let fine = |t: f64| ParameterPath::from_curve(Arc::new(PathCurve(path.clone())), 0.0, t, 2001);
    let before = schrodinger_propagate(&model, &fine(t_star - d)?, &psi0, config.tol)?;
    let fin = frame_at(&model, &path.position(t_star - d))?;
    let amp = |f: &spectral_core::EigenFrame, r: usize, s: &CVector| -> Result<C64, EngineError> {
        Ok(inner(&phase_fixed(&f.vector(r), &GAUGE, r)?, s))
    };
    let incoming = (amp(&fin, UPPER, before.last())?, amp(&fin, LOWER, before.last())?);
    let after = schrodinger_propagate(&model, &fine(t_star + d)?, &psi0, config.tol)?;
    let fout = frame_at(&model, &path.position(t_star + d))?;
    let ode = (amp(&fout, UPPER, after.last())?.norm_sqr(), amp(&fout, LOWER, after.last())?.norm_sqr());

    // Model amplitudes from single-band phases on the incoming leg.
    let leg = fine(t_star - d)?;
    let su = adiabatic_propagate_single(&model, &leg, UPPER, &GAUGE)?;
    let sl = adiabatic_propagate_single(&model, &leg, LOWER, &GAUGE)?;
    let roll = |c: f64, r: &crate::SingleBandRun| C64::from_polar(c, -(r.phases.dynamical + r.phases.geometric));
    let incoming_predicted = (roll(cp, &su), roll(cm, &sl));

    let tc = TransitCoefficients::new(incoming_predicted.0, incoming_predicted.1, alpha, beta)?;
    let (c1, c2) = crossing_transit(&tc);
    let m = sudden_transit_matrix(&model, &path, t_star, (UPPER, LOWER), &GAUGE)?;
    let s1 = m[(0, 0)] * incoming_predicted.0 + m[(0, 1)] * incoming_predicted.1;
    let s2 = m[(1, 0)] * incoming_predicted.0 + m[(1, 1)] * incoming_predicted.1;
    let transit = TransitReport {
        alpha,
        beta,
        incoming,
        incoming_predicted,
        stated: (c1.norm_sqr(), c2.norm_sqr()),
        sudden: (s1.norm_sqr(), s2.norm_sqr()),
        ode,
    };
    Ok(Fig1Run { path, trajectory, bare, instantaneous, transit })
}

/// Re-exposes a path's analytic curve for sub-interval sampling.
struct PathCurve(ParameterPath);

impl Curve for PathCurve {
    fn n_params(&self) -> usize {
        self.0.n_params()
    }
    fn position(&self, t: f64) -> Vec<f64> {
        self.0.position(t)
    }
    fn velocity(&self, t: f64) -> Vec<f64> {
        self.0.velocity(t)
    }
    fn kinks(&self) -> Vec<f64> {
        self.0.kinks()
    }
}
