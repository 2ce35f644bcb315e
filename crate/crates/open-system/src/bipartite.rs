use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::{c64, pauli, CMatrix, HamiltonianFamily, HermitianOperator, C64};

use crate::OpenError;

/// Operator on `ℂ^{d_S} ⊗ ℂ^{d_E}`, system index major.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteOperator {
    pub dims: (usize, usize),
    pub matrix: CMatrix,
}

impl BipartiteOperator {
    pub fn new(matrix: CMatrix, dims: (usize, usize)) -> Result<Self, OpenError> {
        let n = dims.0 * dims.1;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(OpenError::Dimension(format!("{}×{} matrix for {}⊗{}", matrix.nrows(), matrix.ncols(), dims.0, dims.1)));
        }
        HermitianOperator::new(matrix.clone())?;
        Ok(Self { dims, matrix })
    }

    /// `H_S ⊗ 1`.
    pub fn system(h: &CMatrix, d_env: usize) -> Result<Self, OpenError> {
        Self::new(h.kronecker(&CMatrix::identity(d_env, d_env)), (h.nrows(), d_env))
    }

    /// `1 ⊗ H_E`.
    pub fn environment(d_sys: usize, h: &CMatrix) -> Result<Self, OpenError> {
        Self::new(CMatrix::identity(d_sys, d_sys).kronecker(h), (d_sys, h.nrows()))
    }
}

/// `H_S ⊗ 1 + 1 ⊗ H_E + ε V`.
pub fn tensor_assemble(h_sys: &CMatrix, h_env: &CMatrix, v: &CMatrix, eps: f64) -> Result<BipartiteOperator, OpenError> {
    if !(eps >= 0.0) {
        return Err(OpenError::Invalid(format!("coupling strength {eps} must be non-negative")));
    }
    let (ds, de) = (h_sys.nrows(), h_env.nrows());
    if v.nrows() != ds * de || v.ncols() != ds * de {
        return Err(OpenError::Dimension(format!("interaction is {}×{}, expected {}", v.nrows(), v.ncols(), ds * de)));
    }
    let s = BipartiteOperator::system(h_sys, de)?;
    let e = BipartiteOperator::environment(ds, h_env)?;
    BipartiteOperator::new(s.matrix + e.matrix + v * c64(eps, 0.0), (ds, de))
}

pub trait BipartiteFamily: Send + Sync {
    fn dims(&self) -> (usize, usize);
    fn n_params(&self) -> usize;
    fn system(&self, x: &[f64]) -> CMatrix;
    fn environment(&self, x: &[f64]) -> CMatrix;
    fn interaction(&self, x: &[f64]) -> CMatrix;
    fn epsilon(&self) -> f64;

    fn fd_step(&self) -> f64 {
        1e-4
    }

    fn total(&self, x: &[f64]) -> Result<BipartiteOperator, OpenError> {
        tensor_assemble(&self.system(x), &self.environment(x), &self.interaction(x), self.epsilon())
    }
}

/// The total Hamiltonian of a bipartite family as an ordinary family.
pub struct Total<'a, B: ?Sized>(pub &'a B);

impl<B: BipartiteFamily + ?Sized> HamiltonianFamily for Total<'_, B> {
    fn dim(&self) -> usize {
        let (s, e) = self.0.dims();
        s * e
    }
    fn n_params(&self) -> usize {
        self.0.n_params()
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        let (s, e) = self.0.dims();
        self.0.system(x).kronecker(&CMatrix::identity(e, e))
            + CMatrix::identity(s, s).kronecker(&self.0.environment(x))
            + self.0.interaction(x) * c64(self.0.epsilon(), 0.0)
    }
    fn fd_step(&self) -> f64 {
        self.0.fd_step()
    }
}

/// The system part alone.
pub(crate) struct SystemPart<'a, B: ?Sized>(pub &'a B);

impl<B: BipartiteFamily + ?Sized> HamiltonianFamily for SystemPart<'_, B> {
    fn dim(&self) -> usize {
        self.0.dims().0
    }
    fn n_params(&self) -> usize {
        self.0.n_params()
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        self.0.system(x)
    }
    fn fd_step(&self) -> f64 {
        self.0.fd_step()
    }
}

type MatrixFn = Box<dyn Fn(&[f64]) -> CMatrix + Send + Sync>;

/// Bipartite family from closures.
pub struct FnBipartite {
    dims: (usize, usize),
    n_params: usize,
    eps: f64,
    system: MatrixFn,
    environment: MatrixFn,
    interaction: MatrixFn,
}

impl FnBipartite {
    pub fn new(
        dims: (usize, usize),
        n_params: usize,
        eps: f64,
        system: impl Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
        environment: impl Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
        interaction: impl Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        Self { dims, n_params, eps, system: Box::new(system), environment: Box::new(environment), interaction: Box::new(interaction) }
    }
}

impl BipartiteFamily for FnBipartite {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }
    fn n_params(&self) -> usize {
        self.n_params
    }
    fn system(&self, x: &[f64]) -> CMatrix {
        (self.system)(x)
    }
    fn environment(&self, x: &[f64]) -> CMatrix {
        (self.environment)(x)
    }
    fn interaction(&self, x: &[f64]) -> CMatrix {
        (self.interaction)(x)
    }
    fn epsilon(&self) -> f64 {
        self.eps
    }
}

/// Qubit `x σ_x + y σ_y` coupled to a driven three-level environment by a
/// fixed random Hermitian interaction.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitBath {
    pub epsilon: f64,
    pub interaction: CMatrix,
}

impl QubitBath {
    pub const DEFAULT_SEED: u64 = 7;

    pub fn new(epsilon: f64) -> Self {
        Self::with_seed(epsilon, Self::DEFAULT_SEED)
    }

    pub fn with_seed(epsilon: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = CMatrix::from_fn(6, 6, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        Self { epsilon, interaction: (&r + r.adjoint()) * c64(0.25, 0.0) }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, interaction: self.interaction.clone() }
    }
}

impl BipartiteFamily for QubitBath {
    fn dims(&self) -> (usize, usize) {
        (2, 3)
    }
    fn n_params(&self) -> usize {
        2
    }
    fn system(&self, x: &[f64]) -> CMatrix {
        pauli(0) * c64(x[0], 0.0) + pauli(1) * c64(x[1], 0.0)
    }
    fn environment(&self, x: &[f64]) -> CMatrix {
        let z = c64(0.0, 0.0);
        let o = c64(1.0, 0.0);
        let i = c64(0.0, 1.0);
        let g1 = CMatrix::from_row_slice(3, 3, &[z, o, z, o, z, o, z, o, z]);
        let g2 = CMatrix::from_row_slice(3, 3, &[z, -i, z, i, z, i * 0.5, z, -i * 0.5, z]);
        let base = CMatrix::from_diagonal(&spectral_core::CVector::from_vec(vec![z, c64(0.7, 0.0), c64(1.5, 0.0)]));
        base + (g1 * c64(x[0], 0.0) + g2 * c64(x[1], 0.0)) * c64(0.2, 0.0)
    }
    fn interaction(&self, _x: &[f64]) -> CMatrix {
        self.interaction.clone()
    }
    fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::frame_at;

    #[test]
    fn uncoupled_spectrum_is_the_sum_of_factors() {
        let m = QubitBath::new(0.0);
        let x = [0.3, -0.4];
        let tot = frame_at(&Total(&m), &x).unwrap().values;
        let s = frame_at(&SystemPart(&m), &x).unwrap().values;
        let e = spectral_core::eigendecompose(&HermitianOperator::new(m.environment(&x)).unwrap()).unwrap().values;
        let mut sums: Vec<f64> = s.iter().flat_map(|a| e.iter().map(move |b| a + b)).collect();
        sums.sort_by(f64::total_cmp);
        for (a, b) in tot.iter().zip(&sums) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kronecker_layout_matches_explicit_indices() {
        let hs = CMatrix::from_fn(2, 2, |i, j| c64((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let hs = (&hs + hs.adjoint()) * c64(0.5, 0.0);
        let he = CMatrix::from_fn(2, 2, |i, j| c64((3 * i + j) as f64, 2.0 * ((j as f64) - (i as f64))));
        let he = (&he + he.adjoint()) * c64(0.5, 0.0);
        let v = CMatrix::from_fn(4, 4, |i, j| c64(((i * j) % 3) as f64, 0.0));
        let v = (&v + v.adjoint()) * c64(0.5, 0.0);
        let h = tensor_assemble(&hs, &he, &v, 0.3).unwrap();
        for s1 in 0..2 {
            for e1 in 0..2 {
                for s2 in 0..2 {
                    for e2 in 0..2 {
                        let mut want = v[(2 * s1 + e1, 2 * s2 + e2)] * 0.3;
                        if e1 == e2 {
                            want += hs[(s1, s2)];
                        }
                        if s1 == s2 {
                            want += he[(e1, e2)];
                        }
                        assert!((h.matrix[(2 * s1 + e1, 2 * s2 + e2)] - want).norm() < 1e-15);
                    }
                }
            }
        }
        assert!((&h.matrix - h.matrix.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn mismatched_and_negative_inputs_fail() {
        let hs = pauli(2);
        assert!(tensor_assemble(&hs, &hs, &CMatrix::zeros(3, 3), 0.1).is_err());
        assert!(tensor_assemble(&hs, &hs, &CMatrix::zeros(4, 4), -0.1).is_err());
    }

    #[test]
    fn seeded_interaction_is_reproducible() {
        assert_eq!(QubitBath::new(0.01), QubitBath::new(0.01));
        assert_ne!(QubitBath::with_seed(0.01, 8).interaction, QubitBath::new(0.01).interaction);
    }
}
