//! Bosonic lattice data: a rational bilinear space, an even lattice in it and
//! a distinguished coset of the dual lattice, together with the derived
//! decomposition of the dual lattice and the canonical section.

mod data;
mod decompose;

pub use data::{
    validate, validate_with, BosonicLatticeData, Coset, SectionConvention, SmithSummary,
};
pub use decompose::DualDecomposition;

use thiserror::Error;

use crate::linalg::{QMatrix, QVec};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("NonSymmetricGram: entries ({0},{1}) and ({1},{0}) differ")]
    NonSymmetricGram(usize, usize),
    #[error("DegenerateForm: the Gram matrix has determinant zero")]
    DegenerateForm,
    #[error("DependentBasis: lattice generators are linearly dependent over ℚ")]
    DependentBasis,
    #[error("OddLattice: pairing of generators {0} and {1} is {2}")]
    OddLattice(usize, usize, String),
    #[error("FFNotInDual: the distinguished vector pairs non-integrally with generator {0}")]
    FFNotInDual(usize),
    #[error("InfiniteDiscriminant: the quotient of the dual lattice by the lattice is infinite")]
    InfiniteDiscriminant,
    #[error("NotInDual: vector pairs non-integrally with generator {0}")]
    NotInDual(usize),
}

impl LatticeError {
    pub fn name(&self) -> &'static str {
        match self {
            LatticeError::ShapeMismatch(_) => "ShapeMismatch",
            LatticeError::NonSymmetricGram(..) => "NonSymmetricGram",
            LatticeError::DegenerateForm => "DegenerateForm",
            LatticeError::DependentBasis => "DependentBasis",
            LatticeError::OddLattice(..) => "OddLattice",
            LatticeError::FFNotInDual(_) => "FFNotInDual",
            LatticeError::InfiniteDiscriminant => "InfiniteDiscriminant",
            LatticeError::NotInDual(_) => "NotInDual",
        }
    }
}

/// A finite-dimensional rational vector space with a symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearSpace {
    gram: QMatrix,
}

impl BilinearSpace {
    pub fn new(gram: QMatrix) -> Result<Self, LatticeError> {
        if gram.nrows() != gram.ncols() || gram.nrows() == 0 {
            return Err(LatticeError::ShapeMismatch(format!(
                "Gram matrix is {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        for i in 0..gram.nrows() {
            for j in 0..i {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(LatticeError::NonSymmetricGram(j, i));
                }
            }
        }
        use num_traits::Zero;
        if gram.det().is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        Ok(BilinearSpace { gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let gv = self.gram.mul_vec(v);
        let mut s = Rational::default();
        for (a, b) in u.iter().zip(&gv) {
            s += a * b;
        }
        s
    }

    pub fn norm(&self, u: &[Rational]) -> Rational {
        self.pair(u, u)
    }

    /// Gram matrix `(⟨v_i, v_j⟩)` of a list of vectors.
    pub fn gram_of(&self, vs: &[QVec]) -> QMatrix {
        let mut m = QMatrix::zeros(vs.len(), vs.len());
        for i in 0..vs.len() {
            for j in 0..=i {
                let p = self.pair(&vs[i], &vs[j]);
                m[(j, i)] = p.clone();
                m[(i, j)] = p;
            }
        }
        m
    }

    /// `(⟨u_i, v_j⟩)`.
    pub fn cross_gram(&self, us: &[QVec], vs: &[QVec]) -> QMatrix {
        let mut m = QMatrix::zeros(us.len(), vs.len());
        for (i, u) in us.iter().enumerate() {
            for (j, v) in vs.iter().enumerate() {
                m[(i, j)] = self.pair(u, v);
            }
        }
        m
    }

    /// Vectors `w_i` with `⟨w_i, v_j⟩ = δ_ij` for a basis `v` of the space.
    pub fn dual_basis(&self, basis: &[QVec]) -> Vec<QVec> {
        let n = self.dim();
        // Rows w satisfy W G Vᵀ = I, so W = (G Vᵀ)^{-1}.
        let v = QMatrix::from_rows(basis, n);
        let gvt = self.gram.mul(&v.transpose());
        let w = gvt.inverse().expect("basis of a non-degenerate space");
        w.to_rows()
    }
}
