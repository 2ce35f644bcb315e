use spectral_core::{eigendecompose, frame_at, inner, CVector, EigenFrame, HermitianOperator};

use crate::bipartite::SystemPart;
use crate::density::{partial_trace_matrix, DensityMatrix, Keep};
use crate::{BipartiteFamily, OpenError, Total};

/// Smallest accepted `|⟨ψ_k | a⟩⊗|α⟩|` when attaching product labels.
pub const LABEL_OVERLAP: f64 = 0.5;
/// Gaps `|μ_b + ν_β − μ_c − ν_α|` must exceed this multiple of ε.
pub const RESONANCE_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub system: usize,
    pub environment: usize,
}

/// Bipartite spectrum with each eigenvector tagged by the product state it
/// continues from.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub point: Vec<f64>,
    pub total: EigenFrame,
    pub system: EigenFrame,
    pub environment: EigenFrame,
    /// `index[a][α]` into `total`.
    pub index: Vec<Vec<usize>>,
    pub overlap: Vec<Vec<f64>>,
}

impl Labeling {
    pub fn vector(&self, a: usize, alpha: usize) -> CVector {
        self.total.vector(self.index[a][alpha])
    }

    pub fn energy(&self, a: usize, alpha: usize) -> f64 {
        self.total.values[self.index[a][alpha]]
    }

    /// `min |μ_b + ν_β − μ_c − ν_α|` over `β ≠ α` and all `b, c`.
    pub fn resonance_gap(&self, alpha: usize) -> f64 {
        let mu = &self.system.values;
        let nu = &self.environment.values;
        let mut g = f64::INFINITY;
        for (beta, nb) in nu.iter().enumerate() {
            if beta == alpha {
                continue;
            }
            for mb in mu {
                for mc in mu {
                    g = g.min((mb + nb - mc - nu[alpha]).abs());
                }
            }
        }
        g
    }
}

pub fn labeled_spectrum<B: BipartiteFamily + ?Sized>(family: &B, x: &[f64]) -> Result<Labeling, OpenError> {
    let (ds, de) = family.dims();
    if x.len() != family.n_params() {
        return Err(OpenError::Dimension(format!("point has {} coordinates, family {}", x.len(), family.n_params())));
    }
    let total = frame_at(&Total(family), x)?;
    let system = frame_at(&SystemPart(family), x)?;
    let mut environment = eigendecompose(&HermitianOperator::new(family.environment(x))?)?;
    environment.point = x.to_vec();
    if system.dim() != ds || environment.dim() != de {
        return Err(OpenError::Dimension("factor Hamiltonians disagree with declared dims".into()));
    }
    let mut index = vec![vec![0; de]; ds];
    let mut overlap = vec![vec![0.0; de]; ds];
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; ds * de];
    for a in 0..ds {
        for alpha in 0..de {
            let p = system.vector(a).kronecker(&environment.vector(alpha));
            let (k, o) = (0..ds * de)
                .map(|k| (k, inner(&total.vector(k), &p).norm()))
                .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if o < LABEL_OVERLAP {
                return Err(OpenError::Labeling { a, alpha, overlap: o });
            }
            if let Some((b, beta)) = owner[k] {
                return Err(OpenError::AmbiguousLabel { a: b, alpha: beta, b: a, beta: alpha });
            }
            owner[k] = Some((a, alpha));
            index[a][alpha] = k;
            overlap[a][alpha] = o;
        }
    }
    Ok(Labeling { point: x.to_vec(), total, system, environment, index, overlap })
}

#[derive(Clone, Debug)]
pub struct EigenMixedState {
    pub label: Label,
    pub rho: DensityMatrix,
    pub energy: f64,
    pub vector: CVector,
    pub overlap: f64,
    pub resonance_gap: f64,
    /// Set when the gap condition `gap > 10ε` fails.
    pub warning: Option<String>,
}

/// `tr_E |a,α,x⟩⟨a,α,x|` for the bipartite eigenvector continuing `|a⟩⊗|α⟩`.
pub fn eigen_mixed_state<B: BipartiteFamily + ?Sized>(family: &B, a: usize, alpha: usize, x: &[f64]) -> Result<EigenMixedState, OpenError> {
    let (ds, de) = family.dims();
    if a >= ds || alpha >= de {
        return Err(OpenError::Invalid(format!("label ({a}, {alpha}) outside {ds}⊗{de}")));
    }
    let lab = labeled_spectrum(family, x)?;
    mixed_from(&lab, family, a, alpha, None)
}

pub(crate) fn mixed_from<B: BipartiteFamily + ?Sized>(
    lab: &Labeling,
    family: &B,
    a: usize,
    alpha: usize,
    vector: Option<CVector>,
) -> Result<EigenMixedState, OpenError> {
    let v = vector.unwrap_or_else(|| lab.vector(a, alpha));
    let rho = DensityMatrix::new(reduced(&v, family.dims())?)?;
    let gap = lab.resonance_gap(alpha);
    let eps = family.epsilon();
    let warning = (gap <= RESONANCE_FACTOR * eps).then(|| format!("gap {gap:.3e} is not above 10ε = {:.3e}", RESONANCE_FACTOR * eps));
    Ok(EigenMixedState {
        label: Label { system: a, environment: alpha },
        rho,
        energy: lab.energy(a, alpha),
        vector: v,
        overlap: lab.overlap[a][alpha],
        resonance_gap: gap,
        warning,
    })
}

pub(crate) fn reduced(v: &CVector, dims: (usize, usize)) -> Result<spectral_core::CMatrix, OpenError> {
    let m = v * v.adjoint();
    let r = partial_trace_matrix(&m, dims, Keep::System)?;
    Ok((&r + r.adjoint()) * spectral_core::c64(0.5, 0.0))
}
