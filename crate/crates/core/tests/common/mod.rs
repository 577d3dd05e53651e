#![allow(dead_code)]

use std::collections::BTreeMap;

use gvlat::linalg::QVec;
use gvlat::scalar::{rat, Rational};
use gvlat::BosonicLatticeData;

pub fn v(xs: &[(i64, i64)]) -> QVec {
    xs.iter().map(|&(p, q)| rat(p, q)).collect()
}

pub fn ints(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| rat(x, 1)).collect()
}

pub fn zero(n: usize) -> QVec {
    vec![rat(0, 1); n]
}

/// `uᵀ G v` computed directly from the Gram rows.
pub fn pair_direct(gram: &[QVec], u: &[Rational], w: &[Rational]) -> Rational {
    let mut acc = rat(0, 1);
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            acc += &u[i] * g * &w[j];
        }
    }
    acc
}

/// p_n(d): choose a multiplicity for each part size, with `n` colours.
pub fn colored_partitions(n: usize, d: i64) -> i64 {
    fn choose(a: i64, b: i64) -> i64 {
        (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1))
    }
    fn go(n: i64, remaining: i64, part: i64) -> i64 {
        if part == 0 {
            return (remaining == 0) as i64;
        }
        (0..=remaining / part)
            .map(|k| choose(n + k - 1, k) * go(n, remaining - k * part, part - 1))
            .sum()
    }
    go(n as i64, d, d)
}

/// Brute-force character coefficients for exponents `≤ max_exp`: every
/// lattice point in a box, convolved with colored partition counts.
pub fn brute_character(
    data: &BosonicLatticeData,
    gram: &[Vec<Rational>],
    rep: &[Rational],
    box_size: i64,
    max_exp: &Rational,
) -> BTreeMap<Rational, i64> {
    let basis = data.lattice_basis().to_vec();
    let r = basis.len();
    let n = data.dim();
    let x: Vec<Rational> = rep.iter().zip(data.ff_rep()).map(|(a, b)| a - b).collect();
    let shift = rat(-(n as i64), 24);
    let mut out = BTreeMap::new();
    let mut idx = vec![-box_size; r];
    loop {
        let mut y = x.clone();
        for (c, b) in idx.iter().zip(&basis) {
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += rat(*c, 1) * bi;
            }
        }
        let e = pair_direct(gram, &y, &y) * rat(1, 2) + &shift;
        let mut d = 0;
        while &e + rat(d, 1) <= *max_exp {
            *out.entry(&e + rat(d, 1)).or_insert(0) += colored_partitions(n, d);
            d += 1;
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] <= box_size {
                break;
            }
            idx[i] = -box_size;
        }
    }
}

pub fn gram_rows(data: &BosonicLatticeData) -> Vec<Vec<Rational>> {
    data.space().gram().to_rows()
}
