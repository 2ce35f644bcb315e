use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use spectral_core::{c64, CMatrix, C64};

use crate::KoopmanError;

/// Uniform periodic grid `θ_j = 2πj/m` on the circle with weights `2π/m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicGrid {
    pub m: usize,
}

impl PeriodicGrid {
    pub fn new(m: usize) -> Result<Self, KoopmanError> {
        if m < 4 {
            return Err(KoopmanError::Grid(m));
        }
        Ok(Self { m })
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.m as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    /// Signed wavenumber of FFT bin `k`; the Nyquist bin of an even grid maps to `+m/2`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        let m = self.m as i64;
        let k = k as i64;
        if 2 * k <= m {
            k
        } else {
            k - m
        }
    }

    fn is_nyquist(&self, k: usize) -> bool {
        self.m.is_multiple_of(2) && 2 * k == self.m
    }
}

/// Generator `𝓛 f = v(θ) ∂_θ f` of the classical flow, with spectral derivatives.
#[derive(Clone)]
pub struct LiouvilleOperator {
    pub grid: PeriodicGrid,
    /// Flow velocity at each node.
    pub velocity: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LiouvilleOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiouvilleOperator").field("grid", &self.grid).field("velocity", &self.velocity).finish()
    }
}

impl LiouvilleOperator {
    /// Rigid rotation `θ̇ = ω`.
    pub fn rotation(grid: PeriodicGrid, omega: f64) -> Self {
        Self::advection(grid, vec![omega; grid.m]).expect("velocity matches the grid")
    }

    pub fn advection(grid: PeriodicGrid, velocity: Vec<f64>) -> Result<Self, KoopmanError> {
        if velocity.len() != grid.m {
            return Err(KoopmanError::Dimension(format!("{} velocities for {} nodes", velocity.len(), grid.m)));
        }
        if velocity.iter().any(|v| !v.is_finite()) {
            return Err(KoopmanError::Invalid("flow velocity must be finite".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { forward: planner.plan_fft_forward(grid.m), inverse: planner.plan_fft_inverse(grid.m), grid, velocity })
    }

    /// `∂_θ f` of the band-limited interpolant; the Nyquist mode is dropped.
    pub fn derivative(&self, f: &[C64]) -> Vec<C64> {
        let m = self.grid.m;
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            *c = if self.grid.is_nyquist(k) { c64(0.0, 0.0) } else { *c * c64(0.0, self.grid.wavenumber(k) as f64 / m as f64) };
        }
        self.inverse.process(&mut buf);
        buf
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        self.derivative(f).into_iter().zip(&self.velocity).map(|(d, v)| d * *v).collect()
    }

    /// Dense matrix of the operator, column by column.
    pub fn matrix(&self) -> CMatrix {
        let m = self.grid.m;
        let mut out = CMatrix::zeros(m, m);
        let mut e = vec![c64(0.0, 0.0); m];
        for j in 0..m {
            e[j] = c64(1.0, 0.0);
            let col = self.apply(&e);
            for i in 0..m {
                out[(i, j)] = col[i];
            }
            e[j] = c64(0.0, 0.0);
        }
        out
    }

    /// Fourier coefficients `c_k` with `f(θ_j) = Σ_k c_k e^{ik θ_j}`.
    pub fn coefficients(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        let m = self.grid.m as f64;
        buf.iter().map(|c| c / m).collect()
    }

    /// Band-limited interpolant at `θ`; the Nyquist mode enters as a cosine.
    pub fn interpolate(&self, f: &[C64], theta: f64) -> C64 {
        self.coefficients(f)
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let n = self.grid.wavenumber(k) as f64;
                if self.grid.is_nyquist(k) {
                    c * (n * theta).cos()
                } else {
                    c * C64::from_polar(1.0, n * theta)
                }
            })
            .sum()
    }
}
