use spectral_core::{c64, CMatrix, CVector, C64};

use crate::FuzzyError;

/// Truncated oscillator space with basis `|0⟩ … |N−1⟩`.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub dim: usize,
    pub annihilation: CMatrix,
    pub creation: CMatrix,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self, FuzzyError> {
        if dim < 2 {
            return Err(FuzzyError::Truncation(dim));
        }
        let mut a = CMatrix::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = c64((n as f64).sqrt(), 0.0);
        }
        let creation = a.adjoint();
        Ok(Self { dim, annihilation: a, creation })
    }

    pub fn number(&self) -> CMatrix {
        &self.creation * &self.annihilation
    }

    /// `X = (a + a†)/2`, `Y = (a − a†)/(2i)`.
    pub fn plane_coordinates(&self) -> (CMatrix, CMatrix) {
        let x = (&self.annihilation + &self.creation) * c64(0.5, 0.0);
        let y = (&self.annihilation - &self.creation) * c64(0.0, -0.5);
        (x, y)
    }

    /// Largest deviation of `[a, a†]` from the identity outside the last diagonal entry,
    /// and the value of that corner entry.
    pub fn commutator_defect(&self) -> (f64, C64) {
        let c = &self.annihilation * &self.creation - &self.creation * &self.annihilation;
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == n - 1 && j == n - 1 {
                    continue;
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((c[(i, j)] - c64(target, 0.0)).norm());
            }
        }
        (worst, c[(n - 1, n - 1)])
    }
}

#[derive(Clone, Debug)]
pub struct CoherentState {
    pub alpha: C64,
    pub vector: CVector,
    /// Probability weight of the untruncated state beyond `|N−1⟩`.
    pub tail: f64,
}

/// Normalised truncation of `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<CoherentState, FuzzyError> {
    if dim < 2 {
        return Err(FuzzyError::Truncation(dim));
    }
    let limit = (dim as f64 / 4.0).sqrt();
    if alpha.norm() > limit {
        return Err(FuzzyError::TailGuard { modulus: alpha.norm(), limit });
    }
    let mut amp = vec![c64((-0.5 * alpha.norm_sqr()).exp(), 0.0)];
    for n in 1..dim {
        let prev = amp[n - 1];
        amp.push(prev * alpha / (n as f64).sqrt());
    }
    let v = CVector::from_vec(amp);
    let kept = v.norm_squared();
    let tail = (1.0 - kept).max(0.0);
    Ok(CoherentState { alpha, vector: &v / c64(kept.sqrt(), 0.0), tail })
}

/// Closed form `⟨β|α⟩ = exp(−(|α|² + |β|²)/2 + β̄α)` of untruncated coherent states.
pub fn coherent_overlap(beta: C64, alpha: C64) -> C64 {
    (c64(-0.5 * (alpha.norm_sqr() + beta.norm_sqr()), 0.0) + beta.conj() * alpha).exp()
}
