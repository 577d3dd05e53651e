//! Small named lattices used by tests, benches and documentation.

use crate::lattice::{validate, validate_with, BosonicLatticeData, SectionConvention};
use crate::linalg::{QMatrix, QVec};
use crate::scalar::{rat, Rational};

fn ints(rows: &[&[i64]]) -> Vec<QVec> {
    rows.iter()
        .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
        .collect()
}

fn build(
    gram: &[&[i64]],
    basis: &[&[i64]],
    ff: QVec,
    convention: SectionConvention,
) -> BosonicLatticeData {
    let g = ints(gram);
    let n = g.len();
    validate_with(QMatrix::from_rows(&g, n), ints(basis), ff, convention)
        .expect("catalog data is valid")
}

/// Root lattice A1: `G = [[2]]`, basis `[1]`.
pub fn a1(ff: Rational) -> BosonicLatticeData {
    build(&[&[2]], &[&[1]], vec![ff], SectionConvention::NonNegative)
}

/// Root lattice A2 with the identity basis.
pub fn a2(ff: QVec) -> BosonicLatticeData {
    build(
        &[&[2, -1], &[-1, 2]],
        &[&[1, 0], &[0, 1]],
        ff,
        SectionConvention::NonNegative,
    )
}

/// A2 built with the alternative residue convention.
pub fn a2_alt(ff: QVec) -> BosonicLatticeData {
    build(
        &[&[2, -1], &[-1, 2]],
        &[&[1, 0], &[0, 1]],
        ff,
        SectionConvention::NonPositive,
    )
}

/// Rank-2 even lattice `G = [[6,2],[2,2]]` with discriminant `ℤ/2 × ℤ/4`.
pub fn rank2_order8(ff: QVec) -> BosonicLatticeData {
    build(
        &[&[6, 2], &[2, 2]],
        &[&[1, 0], &[0, 1]],
        ff,
        SectionConvention::NonNegative,
    )
}

/// `A2 ⊕ A2`, discriminant of order 9; used by the benches.
pub fn a2_squared(ff: QVec) -> BosonicLatticeData {
    build(
        &[
            &[2, -1, 0, 0],
            &[-1, 2, 0, 0],
            &[0, 0, 2, -1],
            &[0, 0, -1, 2],
        ],
        &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]],
        ff,
        SectionConvention::NonNegative,
    )
}

/// The hyperbolic plane `[[0,1],[1,0]]` with lattice `{(0,m)}` and
/// distinguished vector `(1,0)`.
pub fn half_rank() -> BosonicLatticeData {
    build(
        &[&[0, 1], &[1, 0]],
        &[&[0, 1]],
        vec![rat(1, 1), rat(0, 1)],
        SectionConvention::NonNegative,
    )
}

/// No lattice at all in an `n`-dimensional Euclidean space.
pub fn empty(n: usize, ff: QVec) -> BosonicLatticeData {
    let g: Vec<QVec> = (0..n)
        .map(|i| (0..n).map(|j| rat(if i == j { 1 } else { 0 }, 1)).collect())
        .collect();
    validate(QMatrix::from_rows(&g, n), Vec::new(), ff).expect("valid")
}

/// `k·L` for the lattice of `data`, same space and distinguished vector.
pub fn scaled(data: &BosonicLatticeData, k: i64) -> BosonicLatticeData {
    let basis: Vec<QVec> = data
        .lattice_basis()
        .iter()
        .map(|b| b.iter().map(|x| x * rat(k, 1)).collect())
        .collect();
    validate(data.space().gram().clone(), basis, data.ff_rep().to_vec())
        .expect("sublattice of an even lattice is even")
}
