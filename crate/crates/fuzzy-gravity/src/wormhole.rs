use std::f64::consts::FRAC_PI_2;

use spectral_core::{c64, inner, CMatrix, CVector, C64};

use crate::fock::coherent_state;
use crate::geometry::{spin_of, FuzzyGeometry};
use crate::quasi::minimal_modulus;
use crate::FuzzyError;

/// `ln(√n + √(n−1))` for `n ≥ 1`, and `0` at `n = 0` where only the imaginary part survives.
pub fn re_z_entry(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        ((n as f64).sqrt() + ((n - 1) as f64).sqrt()).ln()
    }
}

/// `Im Z = −(π/2)|0⟩⟨0|`.
pub fn im_z_entry(n: usize) -> f64 {
    if n == 0 {
        -FRAC_PI_2
    } else {
        0.0
    }
}

/// Classical height `z(α) = ln(|α| + √(|α|² − 1))` with `√−1 = −i` inside the throat,
/// so `z = −i·arccos|α|` for `|α| < 1`.
pub fn throat_height(alpha: C64) -> C64 {
    let r = alpha.norm();
    if r >= 1.0 {
        c64(r.acosh(), 0.0)
    } else {
        c64(0.0, -r.acos())
    }
}

/// Expectation of `Im Z` in the truncated coherent state `|α⟩`.
pub fn coherent_im_z(alpha: C64, n: usize) -> Result<f64, FuzzyError> {
    let c = coherent_state(alpha, n)?;
    Ok((0..n).map(|k| im_z_entry(k) * c.vector[k].norm_sqr()).sum())
}

/// Non-self-adjoint single-sheet Dirac operator split as `hermitian + anti_hermitian`.
#[derive(Clone, Debug)]
pub struct DiracOperator {
    pub hermitian: CMatrix,
    pub anti_hermitian: CMatrix,
}

impl DiracOperator {
    pub fn full(&self) -> CMatrix {
        &self.hermitian + &self.anti_hermitian
    }

    /// Eigenvalues of `(D − D†)/(2i)`, ascending.
    pub fn dissipation_spectrum(&self) -> Vec<f64> {
        let g = &self.anti_hermitian * c64(0.0, -1.0);
        let mut v: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Quantum Morris–Thorne wormhole of throat radius `ℓ_P` on a Fock space of size `n`.
#[derive(Clone, Debug)]
pub struct Wormhole {
    pub n: usize,
    /// Upper sheet `(X, Y, Re Z)`.
    pub geometry: FuzzyGeometry,
}

#[derive(Clone, Debug)]
pub struct SheetState {
    pub lambda: f64,
    pub vector: CVector,
    /// `⟨P₊⟩`, probability of the upper sheet.
    pub p_up: f64,
    /// Sheet-signed `⟨τ_z ⊗ Re Z⟩`.
    pub re_z: f64,
    /// `⟨σ⟩` summed over both sheets.
    pub spin: [f64; 3],
}

/// The two minimal-modulus eigenstates of the double-sheet operator, labelled
/// so that `plus` has the larger probability on the upper sheet.
#[derive(Clone, Debug)]
pub struct SheetPair {
    pub alpha: C64,
    pub plus: SheetState,
    pub minus: SheetState,
    /// The pair is degenerate (`|λ| ≈ 0` twice), so the states are not individually defined.
    pub degenerate: bool,
    /// `|⟨0+| C |0−⟩|` with `C` the sheet-coupling block.
    pub coupling: f64,
}

/// Relative tie window for the sheet probabilities.
pub const TIE_TOL: f64 = 1e-10;
/// Pairs with `|λ|` below this are degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

impl Wormhole {
    pub fn new(n: usize) -> Result<Self, FuzzyError> {
        Ok(Self { n, geometry: FuzzyGeometry::fock_built(n, re_z_entry)? })
    }

    fn block_diag(&self, f: impl Fn(usize) -> C64) -> CMatrix {
        let (u, d) = (self.geometry.up, self.geometry.down);
        CMatrix::from_diagonal(&CVector::from_iterator(u + d, (0..u).chain(0..d).map(f)))
    }

    fn probe(alpha: C64) -> [f64; 3] {
        [alpha.re, alpha.im, throat_height(alpha).re]
    }

    /// `[[Z − z, a† − ᾱ], [a − α, −Z† + z̄]]`.
    pub fn single_sheet(&self, alpha: C64) -> DiracOperator {
        let hermitian = self.geometry.dirac(&Self::probe(alpha));
        let zi = throat_height(alpha).im;
        let anti_hermitian = self.block_diag(|k| c64(0.0, im_z_entry(k) - zi));
        DiracOperator { hermitian, anti_hermitian }
    }

    /// `i Im Z ⊗ id`, the dissipative part carried by the operator `Z` itself.
    pub fn dissipator(&self) -> CMatrix {
        self.block_diag(|k| c64(0.0, im_z_entry(k)))
    }

    /// `D^±` with `±Re(Z − z)` on the diagonal.
    pub fn sheet(&self, sign: f64, alpha: C64) -> CMatrix {
        let g = &self.geometry;
        let [dx, dy, dz] = g.displaced(&Self::probe(alpha));
        let zero = CMatrix::zeros(g.ambient(), g.ambient());
        g.spin_assemble(&zero, &dx, &dy, &(dz * c64(sign, 0.0)))
    }

    /// `Im(Z − z) ⊗ id` on one sheet.
    fn coupling_diag(&self, alpha: C64) -> CMatrix {
        let zi = throat_height(alpha).im;
        self.block_diag(|k| c64(im_z_entry(k) - zi, 0.0))
    }

    /// `[[0, iC], [−iC, 0]]` in the sheet basis.
    pub fn sheet_coupling(&self, alpha: C64) -> CMatrix {
        let c = self.coupling_diag(alpha);
        let m = c.nrows();
        let mut out = CMatrix::zeros(2 * m, 2 * m);
        out.view_mut((0, m), (m, m)).copy_from(&(&c * c64(0.0, 1.0)));
        out.view_mut((m, 0), (m, m)).copy_from(&(&c * c64(0.0, -1.0)));
        out
    }

    /// Hermitian double-sheet operator in the basis `(|+⟩, |−⟩)` of sheet presence.
    pub fn double_sheet(&self, alpha: C64) -> CMatrix {
        let m = self.geometry.dim();
        let mut out = self.sheet_coupling(alpha);
        out.view_mut((0, 0), (m, m)).copy_from(&self.sheet(1.0, alpha));
        out.view_mut((m, m), (m, m)).copy_from(&self.sheet(-1.0, alpha));
        out
    }

    /// Sheet chirality `τ_x ⊗ σ_z`, which anticommutes with the double-sheet operator.
    pub fn chirality(&self) -> CMatrix {
        let (u, d) = (self.geometry.up, self.geometry.down);
        let m = u + d;
        let s = CMatrix::from_diagonal(&CVector::from_iterator(m, (0..m).map(|k| c64(if k < u { 1.0 } else { -1.0 }, 0.0))));
        let mut out = CMatrix::zeros(2 * m, 2 * m);
        out.view_mut((0, m), (m, m)).copy_from(&s);
        out.view_mut((m, 0), (m, m)).copy_from(&s);
        out
    }

    fn sheet_state(&self, lambda: f64, v: CVector) -> SheetState {
        let (u, d) = (self.geometry.up, self.geometry.down);
        let m = u + d;
        let p_up = v.rows(0, m).norm_squared();
        let height = |k: usize| if k < u { re_z_entry(k) } else { re_z_entry(k - u) };
        let mut re_z = 0.0;
        for k in 0..m {
            re_z += height(k) * (v[k].norm_sqr() - v[m + k].norm_sqr());
        }
        let a = spin_of(&v.rows(0, m).into_owned(), u, d);
        let b = spin_of(&v.rows(m, m).into_owned(), u, d);
        SheetState { lambda, p_up, re_z, spin: [a[0] + b[0], a[1] + b[1], a[2] + b[2]], vector: v }
    }

    /// Minimal displacement-energy pair of the double sheet at `α`.
    pub fn solve(&self, alpha: C64) -> Result<SheetPair, FuzzyError> {
        let d = self.double_sheet(alpha);
        let mut pairs = minimal_modulus(&d, 2)?;
        let second = pairs.pop().ok_or_else(|| FuzzyError::Invalid("missing eigenpair".into()))?;
        let first = pairs.pop().ok_or_else(|| FuzzyError::Invalid("missing eigenpair".into()))?;
        let a = self.sheet_state(first.value, first.vector);
        let b = self.sheet_state(second.value, second.vector);
        let degenerate = a.lambda.abs().max(b.lambda.abs()) < DEGENERATE_TOL;
        let a_first = if (a.p_up - b.p_up).abs() <= TIE_TOL { a.re_z >= b.re_z } else { a.p_up > b.p_up };
        let (plus, minus) = if a_first { (a, b) } else { (b, a) };
        let coupling = inner(&plus.vector, &(self.sheet_coupling(alpha) * &minus.vector)).norm();
        Ok(SheetPair { alpha, plus, minus, degenerate, coupling })
    }

    /// `min |Sp(D^±)|` for the two single sheets.
    pub fn single_sheet_minima(&self, alpha: C64) -> Result<(f64, f64), FuzzyError> {
        let up = minimal_modulus(&self.sheet(1.0, alpha), 1)?[0].value.abs();
        let down = minimal_modulus(&self.sheet(-1.0, alpha), 1)?[0].value.abs();
        Ok((up, down))
    }
}
