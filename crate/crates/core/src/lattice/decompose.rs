use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::BilinearSpace;
use crate::linalg::{
    extend_to_basis, from_integer_matrix, int_combine, smith, to_integer_matrix, QMatrix, QVec,
    Smith,
};
use crate::scalar::Rational;

/// Splitting of the dual lattice into perpendicular, null, isotropic partner
/// and discrete parts, plus the lattice splitting `Λ = N ⊕ Λ^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualDecomposition {
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub perp_basis: Vec<QVec>,
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub gamma_basis: Vec<QVec>,
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub null_basis: Vec<QVec>,
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub complement_basis: Vec<QVec>,
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub v_basis: Vec<QVec>,
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub f_basis: Vec<QVec>,
    #[serde(serialize_with = "crate::io::ser_vectors")]
    pub d_basis: Vec<QVec>,
}

impl DualDecomposition {
    /// Rows `V, N, F, D` stacked; a basis of the whole space.
    pub fn coordinate_basis(&self) -> Vec<QVec> {
        let mut rows = self.v_basis.clone();
        rows.extend(self.null_basis.iter().cloned());
        rows.extend(self.f_basis.iter().cloned());
        rows.extend(self.d_basis.iter().cloned());
        rows
    }

    pub fn block_sizes(&self) -> (usize, usize, usize, usize) {
        (
            self.v_basis.len(),
            self.null_basis.len(),
            self.f_basis.len(),
            self.d_basis.len(),
        )
    }
}

pub(crate) struct Decomposed {
    pub decomposition: DualDecomposition,
    /// Smith form of the Gram matrix of `Λ^c` in the `Λ^c` basis; governs
    /// the reduction of `D` coordinates.
    pub d_smith: Smith,
}

/// Builds the decomposition. `basis` is an even lattice basis (r × n).
pub(crate) fn decompose(space: &BilinearSpace, basis: &[QVec]) -> Decomposed {
    let n = space.dim();
    let r = basis.len();

    // Split Λ = Λ^c ⊕ N through the Smith form of its Gram matrix.
    let lattice_gram = space.gram_of(basis);
    let gram_int = to_integer_matrix(&lattice_gram).expect("even lattice has integral Gram matrix");
    let split = smith(&gram_int, r, r);
    let d = split.diag.iter().filter(|x| !x.is_zero()).count();
    let rebased: Vec<QVec> = (0..r)
        .map(|j| {
            let col: Vec<BigInt> = (0..r).map(|i| split.q[i][j].clone()).collect();
            int_combine(&col, basis, n)
        })
        .collect();
    let complement_basis = rebased[..d].to_vec();
    let null_basis = rebased[d..].to_vec();

    // Λ^⊥ = kernel of x ↦ (⟨b_i, x⟩)_i.
    let pairing = QMatrix::from_rows(basis, n).mul(space.gram());
    let perp_basis = pairing.kernel();

    // Γ: the dual basis to the rebased lattice basis inside
    // W = span(Λ^c) ⊕ (standard vectors completing Λ^c ⊕ Λ^⊥).
    let mut seed = complement_basis.clone();
    seed.extend(perp_basis.iter().cloned());
    let completed = extend_to_basis(&seed, n);
    let mut w_rows = complement_basis.clone();
    w_rows.extend(completed[seed.len()..].iter().cloned());
    debug_assert_eq!(w_rows.len(), r);
    let mut gamma_basis = if r == 0 {
        Vec::new()
    } else {
        let h = space.cross_gram(&w_rows, &rebased);
        let y = h
            .inverse()
            .expect("W meets the perpendicular space trivially");
        let w = QMatrix::from_rows(&w_rows, n);
        y.mul(&w).to_rows()
    };

    // Make F isotropic by moving each partner along span N; this changes
    // neither its pairings with Λ nor its orthogonality to D.
    let k = null_basis.len();
    if k > 0 {
        let f_gram = space.gram_of(&gamma_basis[d..]);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        for j in 0..k {
            let mut v = gamma_basis[d + j].clone();
            for l in 0..k {
                let c = &f_gram[(j, l)] * &half;
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(&null_basis[l]) {
                    *x -= &c * y;
                }
            }
            gamma_basis[d + j] = v;
        }
    }
    let d_basis = gamma_basis[..d].to_vec();
    let f_basis = gamma_basis[d..].to_vec();

    // V = vectors of Λ^⊥ orthogonal to F.
    let v_basis = if perp_basis.is_empty() {
        Vec::new()
    } else if f_basis.is_empty() {
        perp_basis.clone()
    } else {
        let cross = space.cross_gram(&f_basis, &perp_basis);
        cross
            .kernel()
            .iter()
            .map(|t| crate::linalg::combine(t, &perp_basis, n))
            .collect()
    };

    // Smith data of D/(D∩Λ): D∩Λ = Λ^c has D-coordinates given by the rows
    // of the Λ^c Gram matrix.
    let complement_gram = space.gram_of(&complement_basis);
    let complement_int = to_integer_matrix(&complement_gram).expect("integral");
    let d_smith = smith(&complement_int, d, d);
    debug_assert!(from_integer_matrix(&complement_int, d).rank() == d);

    Decomposed {
        decomposition: DualDecomposition {
            perp_basis,
            gamma_basis,
            null_basis,
            complement_basis,
            v_basis,
            f_basis,
            d_basis,
        },
        d_smith,
    }
}
