use adiabatic_engine::{integrate, OdeOptions};
use spectral_core::{CMatrix, CVector, HamiltonianFamily, C64};

use crate::{KoopmanError, LiouvilleOperator, SKState};

#[derive(Clone, Debug)]
pub struct SkTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SKState>,
    /// `max_t |‖Ψ(t)‖_μ / ‖Ψ(0)‖_μ − 1|`.
    pub norm_drift: f64,
}

impl SkTrajectory {
    pub fn last(&self) -> &SKState {
        self.states.last().expect("non-empty trajectory")
    }
}

/// Block-diagonal part of the joint generator: `H(x(θ_j))` at each node.
#[derive(Clone, Debug)]
pub struct NodeHamiltonians {
    pub blocks: Vec<CMatrix>,
}

impl NodeHamiltonians {
    pub fn sample<F: HamiltonianFamily + ?Sized>(family: &F, op: &LiouvilleOperator, chart: impl Fn(f64) -> Vec<f64>) -> Self {
        Self { blocks: op.grid.nodes().into_iter().map(|t| family.hamiltonian(&chart(t))).collect() }
    }

    pub fn zero(dim: usize, m: usize) -> Self {
        Self { blocks: vec![CMatrix::zeros(dim, dim); m] }
    }
}

/// Right-hand side of `∂_t Ψ = −i H Ψ − 𝓛 Ψ`.
pub fn sk_generator(h: &NodeHamiltonians, op: &LiouvilleOperator, dim: usize, y: &CVector) -> CVector {
    let m = op.grid.m;
    let mut out = CVector::zeros(dim * m);
    let minus_i = C64::new(0.0, -1.0);
    for (j, block) in h.blocks.iter().enumerate() {
        let hy = block * y.rows(j * dim, dim);
        out.rows_mut(j * dim, dim).copy_from(&(hy * minus_i));
    }
    for a in 0..dim {
        let f: Vec<C64> = (0..m).map(|j| y[j * dim + a]).collect();
        for (j, v) in op.apply(&f).into_iter().enumerate() {
            out[j * dim + a] -= v;
        }
    }
    out
}

/// Adaptive integration of the joint equation through `times` (first entry is the start).
pub fn sk_propagate(
    h: &NodeHamiltonians,
    op: &LiouvilleOperator,
    psi0: &SKState,
    times: &[f64],
    tol: f64,
) -> Result<SkTrajectory, KoopmanError> {
    if h.blocks.len() != op.grid.m || psi0.grid != op.grid {
        return Err(KoopmanError::Dimension("state, Hamiltonians and operator must share the grid".into()));
    }
    if h.blocks.iter().any(|b| b.nrows() != psi0.dim || b.ncols() != psi0.dim) {
        return Err(KoopmanError::Dimension(format!("node Hamiltonians must be {0}×{0}", psi0.dim)));
    }
    if times.is_empty() {
        return Err(KoopmanError::Invalid("no output times".into()));
    }
    if !(tol > 1e-14 && tol < 1e-4) {
        return Err(KoopmanError::Invalid(format!("tolerance {tol} outside (1e-14, 1e-4)")));
    }
    let dim = psi0.dim;
    let opts = OdeOptions::with_rtol(tol);
    let (values, _) = integrate(|_t, y| sk_generator(h, op, dim, y), times[0], &psi0.values, times, &opts)?;
    let n0 = psi0.mu_norm();
    let states: Vec<SKState> = values.into_iter().map(|v| SKState { dim, grid: op.grid, values: v }).collect();
    let norm_drift = states.iter().map(|s| (s.mu_norm() / n0 - 1.0).abs()).fold(0.0, f64::max);
    Ok(SkTrajectory { times: times.to_vec(), states, norm_drift })
}
