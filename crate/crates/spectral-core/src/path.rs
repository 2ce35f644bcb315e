use std::sync::Arc;

use crate::SpectralError;

/// A parametrised curve `t ↦ x(t)` with analytic velocity.
pub trait Curve: Send + Sync {
    fn n_params(&self) -> usize;
    fn position(&self, t: f64) -> Vec<f64>;
    fn velocity(&self, t: f64) -> Vec<f64>;
    /// Times at which the velocity jumps.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Uniform circular motion in the plane.
#[derive(Clone, Copy, Debug)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Circle {
    pub fn new(radius: f64, omega: f64) -> Self {
        Self { center: [0.0, 0.0], radius, omega, phase: 0.0 }
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega.abs()
    }
}

impl Curve for Circle {
    fn n_params(&self) -> usize {
        2
    }
    fn position(&self, t: f64) -> Vec<f64> {
        let a = self.phase + self.omega * t;
        vec![self.center[0] + self.radius * a.cos(), self.center[1] + self.radius * a.sin()]
    }
    fn velocity(&self, t: f64) -> Vec<f64> {
        let a = self.phase + self.omega * t;
        let s = self.radius * self.omega;
        vec![-s * a.sin(), s * a.cos()]
    }
}

/// Piecewise-linear motion through timed breakpoints.
#[derive(Clone, Debug)]
pub struct Polyline {
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl Polyline {
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self, SpectralError> {
        validate_samples(&times, &points)?;
        Ok(Self { times, points })
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().copied().zip(self.points.iter().map(|p| p.as_slice()))
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.times.len();
        match self.times.iter().position(|&s| s > t) {
            None => n - 2,
            Some(0) => 0,
            Some(k) => (k - 1).min(n - 2),
        }
    }
}

impl Curve for Polyline {
    fn n_params(&self) -> usize {
        self.points[0].len()
    }
    fn position(&self, t: f64) -> Vec<f64> {
        let k = self.segment(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let s = (t - t0) / (t1 - t0);
        self.points[k].iter().zip(&self.points[k + 1]).map(|(a, b)| a + s * (b - a)).collect()
    }
    fn velocity(&self, t: f64) -> Vec<f64> {
        let k = self.segment(t);
        let dt = self.times[k + 1] - self.times[k];
        self.points[k].iter().zip(&self.points[k + 1]).map(|(a, b)| (b - a) / dt).collect()
    }
    fn kinks(&self) -> Vec<f64> {
        self.times[1..self.times.len() - 1].to_vec()
    }
}

/// Curve given by position and velocity closures.
pub struct FnCurve<P, V> {
    n: usize,
    pos: P,
    vel: V,
    kinks: Vec<f64>,
}

impl<P, V> FnCurve<P, V>
where
    P: Fn(f64) -> Vec<f64> + Send + Sync,
    V: Fn(f64) -> Vec<f64> + Send + Sync,
{
    pub fn new(n: usize, pos: P, vel: V) -> Self {
        Self { n, pos, vel, kinks: Vec::new() }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }
}

impl<P, V> Curve for FnCurve<P, V>
where
    P: Fn(f64) -> Vec<f64> + Send + Sync,
    V: Fn(f64) -> Vec<f64> + Send + Sync,
{
    fn n_params(&self) -> usize {
        self.n
    }
    fn position(&self, t: f64) -> Vec<f64> {
        (self.pos)(t)
    }
    fn velocity(&self, t: f64) -> Vec<f64> {
        (self.vel)(t)
    }
    fn kinks(&self) -> Vec<f64> {
        self.kinks.clone()
    }
}

fn validate_samples(times: &[f64], points: &[Vec<f64>]) -> Result<(), SpectralError> {
    if times.len() < 2 {
        return Err(SpectralError::InvalidPath("need at least two samples".into()));
    }
    if times.len() != points.len() {
        return Err(SpectralError::InvalidPath(format!("{} times for {} points", times.len(), points.len())));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SpectralError::InvalidPath("times must be strictly increasing".into()));
    }
    let n = points[0].len();
    if points.iter().any(|p| p.len() != n) {
        return Err(SpectralError::InvalidPath("points have inconsistent dimension".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(SpectralError::InvalidPath("non-finite sample".into()));
    }
    Ok(())
}

/// Sampled path through the control manifold, optionally backed by an analytic curve.
#[derive(Clone)]
pub struct ParameterPath {
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
    curve: Option<Arc<dyn Curve>>,
}

impl std::fmt::Debug for ParameterPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParameterPath")
            .field("samples", &self.times.len())
            .field("span", &(self.t0(), self.t1()))
            .field("analytic", &self.curve.is_some())
            .finish()
    }
}

impl ParameterPath {
    /// Sampled path; positions between samples are linear, velocities finite differences.
    pub fn sampled(times: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self, SpectralError> {
        validate_samples(&times, &points)?;
        Ok(Self { times, points, curve: None })
    }

    /// `n` uniform samples of `curve` on `[t0, t1]`, with the curve's kinks added to the grid.
    pub fn from_curve(curve: Arc<dyn Curve>, t0: f64, t1: f64, n: usize) -> Result<Self, SpectralError> {
        if n < 2 || !(t1 > t0) {
            return Err(SpectralError::InvalidPath("need t1 > t0 and n ≥ 2".into()));
        }
        let mut times: Vec<f64> = (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect();
        let gap = (t1 - t0) / (n - 1) as f64 * 1e-9;
        for k in curve.kinks() {
            if k > t0 && k < t1 && times.iter().all(|&s| (s - k).abs() > gap) {
                times.push(k);
            }
        }
        times.sort_by(f64::total_cmp);
        let points: Vec<Vec<f64>> = times.iter().map(|&t| curve.position(t)).collect();
        validate_samples(&times, &points)?;
        Ok(Self { times, points, curve: Some(curve) })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t1(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn n_params(&self) -> usize {
        self.points[0].len()
    }

    pub fn is_analytic(&self) -> bool {
        self.curve.is_some()
    }

    /// Velocity discontinuities inside the time span.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.curve {
            Some(c) => c.kinks().into_iter().filter(|&k| k > self.t0() && k < self.t1()).collect(),
            None => self.times[1..self.times.len() - 1].to_vec(),
        }
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.times.len();
        match self.times.iter().position(|&s| s > t) {
            None => n - 2,
            Some(0) => 0,
            Some(k) => (k - 1).min(n - 2),
        }
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        if let Some(c) = &self.curve {
            return c.position(t);
        }
        let k = self.interval(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let s = (t - t0) / (t1 - t0);
        self.points[k].iter().zip(&self.points[k + 1]).map(|(a, b)| a + s * (b - a)).collect()
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        if let Some(c) = &self.curve {
            return c.velocity(t);
        }
        if let Some(k) = self.times.iter().position(|&s| s == t) {
            if k > 0 && k + 1 < self.times.len() {
                return self.sample_velocity(k);
            }
        }
        let k = self.interval(t);
        let dt = self.times[k + 1] - self.times[k];
        self.points[k].iter().zip(&self.points[k + 1]).map(|(a, b)| (b - a) / dt).collect()
    }

    /// Three-point non-uniform derivative at interior sample `k`.
    fn sample_velocity(&self, k: usize) -> Vec<f64> {
        let (tm, t0, tp) = (self.times[k - 1], self.times[k], self.times[k + 1]);
        let (hm, hp) = (t0 - tm, tp - t0);
        (0..self.n_params())
            .map(|i| {
                let (xm, x0, xp) = (self.points[k - 1][i], self.points[k][i], self.points[k + 1][i]);
                (-hp / (hm * (hm + hp))) * xm + ((hp - hm) / (hm * hp)) * x0 + (hm / (hp * (hm + hp))) * xp
            })
            .collect()
    }

    /// One-sided velocity: `side < 0` looks backwards from `t`, otherwise forwards.
    pub fn one_sided_velocity(&self, t: f64, side: i32, h: f64) -> Vec<f64> {
        let x0 = self.position(t);
        if side < 0 {
            let xm = self.position(t - h);
            x0.iter().zip(&xm).map(|(a, b)| (a - b) / h).collect()
        } else {
            let xp = self.position(t + h);
            xp.iter().zip(&x0).map(|(a, b)| (a - b) / h).collect()
        }
    }

    /// Sample indices whose times bracket `[a, b]`.
    pub fn samples_between(&self, a: f64, b: f64) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.times[k] >= a && self.times[k] <= b).collect()
    }
}
