use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use super::decompose::{decompose, DualDecomposition};
use super::{BilinearSpace, LatticeError};
use crate::linalg::{
    add, combine, from_integer_matrix, int_combine, sub, unimodular_inverse, IMatrix, QMatrix,
    QVec, Smith,
};
use crate::scalar::{format_rational, rat, rem_euclid, Rational};

/// How the canonical section picks residues.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionConvention {
    /// Null coordinates in `[0, 1)`, discrete coordinates in `[0, d_i)`.
    #[default]
    NonNegative,
    /// Null coordinates in `(-1, 0]`, discrete coordinates in `(-d_i, 0]`.
    NonPositive,
}

/// An element of `Λ*/Λ`, stored through its canonical representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    parent: u64,
    rep: QVec,
}

impl Coset {
    pub fn rep(&self) -> &[Rational] {
        &self.rep
    }

    pub fn parent(&self) -> u64 {
        self.parent
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rep.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for Coset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.rep.iter().map(format_rational).collect();
        v.serialize(serializer)
    }
}

/// Validated bosonic lattice data with its decomposition and section.
#[derive(Clone, Debug)]
pub struct BosonicLatticeData {
    space: BilinearSpace,
    basis: Vec<QVec>,
    ff_rep: QVec,
    ff: Coset,
    decomposition: DualDecomposition,
    snf: Smith,
    snf_p_inv: IMatrix,
    convention: SectionConvention,
    id: u64,
    /// Rows `b_i G`: a vector is in the dual lattice iff this map is integral.
    pairing: QMatrix,
    /// `x ↦ x · coords` gives lattice coordinates for vectors in `span Λ`.
    lattice_coords: QMatrix,
    /// Inverse of the stacked `V, N, F, D` basis.
    decomposition_coords: QMatrix,
}

pub fn validate(
    gram: QMatrix,
    basis: Vec<QVec>,
    ff_rep: QVec,
) -> Result<BosonicLatticeData, LatticeError> {
    validate_with(gram, basis, ff_rep, SectionConvention::NonNegative)
}

pub fn validate_with(
    gram: QMatrix,
    basis: Vec<QVec>,
    ff_rep: QVec,
    convention: SectionConvention,
) -> Result<BosonicLatticeData, LatticeError> {
    let space = BilinearSpace::new(gram)?;
    let n = space.dim();
    if let Some(bad) = basis.iter().find(|b| b.len() != n) {
        return Err(LatticeError::ShapeMismatch(format!(
            "lattice generator of length {} in dimension {n}",
            bad.len()
        )));
    }
    if ff_rep.len() != n {
        return Err(LatticeError::ShapeMismatch(format!(
            "distinguished vector of length {} in dimension {n}",
            ff_rep.len()
        )));
    }
    let r = basis.len();
    if r > n || QMatrix::from_rows(&basis, n).rank() < r {
        return Err(LatticeError::DependentBasis);
    }
    let two = rat(2, 1);
    for i in 0..r {
        for j in 0..=i {
            let p = space.pair(&basis[i], &basis[j]);
            let ok = if i == j {
                (&p / &two).is_integer()
            } else {
                p.is_integer()
            };
            if !ok {
                return Err(LatticeError::OddLattice(j, i, format_rational(&p)));
            }
        }
    }
    let pairing = QMatrix::from_rows(&basis, n).mul(space.gram());
    if let Some(i) = first_nonintegral(&pairing, &ff_rep) {
        return Err(LatticeError::FFNotInDual(i));
    }

    let parts = decompose(&space, &basis);
    let snf_p_inv = unimodular_inverse(&parts.d_smith.p);
    let lattice_coords = if r == 0 {
        QMatrix::zeros(n, 0)
    } else {
        let b = QMatrix::from_rows(&basis, n);
        let bbt_inv = b.mul(&b.transpose()).inverse().expect("independent rows");
        b.transpose().mul(&bbt_inv)
    };
    let stacked = parts.decomposition.coordinate_basis();
    let decomposition_coords = QMatrix::from_rows(&stacked, n)
        .inverse()
        .expect("decomposition spans the space");

    let mut hasher = DefaultHasher::new();
    for row in space.gram().to_rows().iter().chain(basis.iter()) {
        for x in row {
            x.hash(&mut hasher);
        }
    }
    ff_rep.hash(&mut hasher);
    convention.hash(&mut hasher);
    let id = hasher.finish();

    let mut data = BosonicLatticeData {
        space,
        basis,
        ff_rep: ff_rep.clone(),
        ff: Coset {
            parent: id,
            rep: Vec::new(),
        },
        decomposition: parts.decomposition,
        snf: parts.d_smith,
        snf_p_inv,
        convention,
        id,
        pairing,
        lattice_coords,
        decomposition_coords,
    };
    data.ff = data.coset(&ff_rep).expect("checked above");
    Ok(data)
}

fn first_nonintegral(pairing: &QMatrix, x: &[Rational]) -> Option<usize> {
    pairing.mul_vec(x).iter().position(|v| !v.is_integer())
}

impl BosonicLatticeData {
    pub fn space(&self) -> &BilinearSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn lattice_basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn ff_rep(&self) -> &[Rational] {
        &self.ff_rep
    }

    pub fn ff(&self) -> &Coset {
        &self.ff
    }

    pub fn decomposition(&self) -> &DualDecomposition {
        &self.decomposition
    }

    pub fn smith(&self) -> &Smith {
        &self.snf
    }

    pub fn convention(&self) -> SectionConvention {
        self.convention
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Rational {
        self.space.pair(u, v)
    }

    /// Invariant factors of `D/(D∩Λ)`.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.snf.diag
    }

    /// True when `Λ*/Λ` is finite, i.e. `V` and `N` are both trivial.
    pub fn is_full_rank(&self) -> bool {
        self.decomposition.v_basis.is_empty() && self.decomposition.null_basis.is_empty()
    }

    /// `|Λ*/Λ|` when finite.
    pub fn discriminant_order(&self) -> Option<BigInt> {
        self.is_full_rank()
            .then(|| self.snf.diag.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    pub fn in_dual(&self, x: &[Rational]) -> bool {
        x.len() == self.dim() && first_nonintegral(&self.pairing, x).is_none()
    }

    /// Integer coordinates in the lattice basis, if `v ∈ Λ`.
    pub fn lattice_coords(&self, v: &[Rational]) -> Option<Vec<BigInt>> {
        if v.len() != self.dim() {
            return None;
        }
        let c = self.lattice_coords.vec_mul(v);
        if !c.iter().all(|x| x.is_integer()) {
            return None;
        }
        let back = combine(&c, &self.basis, self.dim());
        (back == v).then(|| c.iter().map(|x| x.to_integer()).collect())
    }

    pub fn in_lattice(&self, v: &[Rational]) -> bool {
        self.lattice_coords(v).is_some()
    }

    /// Coordinates of `x` in the stacked `V, N, F, D` basis.
    pub fn decomposition_coords(&self, x: &[Rational]) -> QVec {
        self.decomposition_coords.vec_mul(x)
    }

    /// The `V`, `span N`, `F` and `D` components of `x`.
    pub fn components(&self, x: &[Rational]) -> [QVec; 4] {
        let c = self.decomposition_coords(x);
        let (v, k, f, d) = self.decomposition.block_sizes();
        let dec = &self.decomposition;
        let n = self.dim();
        [
            combine(&c[..v], &dec.v_basis, n),
            combine(&c[v..v + k], &dec.null_basis, n),
            combine(&c[v + k..v + k + f], &dec.f_basis, n),
            combine(&c[v + k + f..v + k + f + d], &dec.d_basis, n),
        ]
    }

    fn reduce_unit(&self, x: &Rational) -> Rational {
        let r = rem_euclid(x, &Rational::one());
        match self.convention {
            SectionConvention::NonNegative => r,
            SectionConvention::NonPositive => {
                if r.is_zero() {
                    r
                } else {
                    r - Rational::one()
                }
            }
        }
    }

    fn reduce_mod(&self, y: &BigInt, m: &BigInt) -> BigInt {
        let r = y.mod_floor(m);
        match self.convention {
            SectionConvention::NonNegative => r,
            SectionConvention::NonPositive => {
                if r.is_zero() {
                    r
                } else {
                    r - m
                }
            }
        }
    }

    /// Canonical representative of the coset of `x`.
    pub fn section_apply(&self, x: &[Rational]) -> Result<QVec, LatticeError> {
        if x.len() != self.dim() {
            return Err(LatticeError::ShapeMismatch(format!(
                "vector of length {} in dimension {}",
                x.len(),
                self.dim()
            )));
        }
        if let Some(i) = first_nonintegral(&self.pairing, x) {
            return Err(LatticeError::NotInDual(i));
        }
        Ok(self.section_unchecked(x))
    }

    pub(crate) fn section_unchecked(&self, x: &[Rational]) -> QVec {
        let mut c = self.decomposition_coords(x);
        let (v, k, f, d) = self.decomposition.block_sizes();
        for x in c[v..v + k].iter_mut() {
            *x = self.reduce_unit(x);
        }
        let start = v + k + f;
        if d > 0 {
            let dc: Vec<BigInt> = c[start..].iter().map(|x| x.to_integer()).collect();
            let y: Vec<BigInt> = (0..d)
                .map(|i| {
                    let yi: BigInt = (0..d).map(|j| &self.snf.p[i][j] * &dc[j]).sum();
                    self.reduce_mod(&yi, &self.snf.diag[i])
                })
                .collect();
            for i in 0..d {
                let ci: BigInt = (0..d).map(|j| &self.snf_p_inv[i][j] * &y[j]).sum();
                c[start + i] = Rational::from_integer(ci);
            }
        }
        combine(&c, &self.decomposition.coordinate_basis(), self.dim())
    }

    pub fn coset(&self, x: &[Rational]) -> Result<Coset, LatticeError> {
        Ok(Coset {
            parent: self.id,
            rep: self.section_apply(x)?,
        })
    }

    pub(crate) fn coset_unchecked(&self, x: &[Rational]) -> Coset {
        Coset {
            parent: self.id,
            rep: self.section_unchecked(x),
        }
    }

    pub fn zero_coset(&self) -> Coset {
        Coset {
            parent: self.id,
            rep: vec![Rational::zero(); self.dim()],
        }
    }

    /// `k(a, b) = s(a + b) − s(a) − s(b)`, a lattice vector.
    pub fn k_cocycle(&self, a: &Coset, b: &Coset) -> QVec {
        let sum = add(&a.rep, &b.rep);
        sub(&self.section_unchecked(&sum), &sum)
    }

    /// All cosets of `Λ*/Λ` when the quotient is finite, in lexicographic
    /// order of their Smith coordinates.
    pub fn discriminant_enumerate(&self) -> Result<Vec<Coset>, LatticeError> {
        if !self.is_full_rank() {
            return Err(LatticeError::InfiniteDiscriminant);
        }
        let diag = &self.snf.diag;
        let d = diag.len();
        let n = self.dim();
        let mut out = Vec::new();
        let mut y: Vec<BigInt> = vec![BigInt::zero(); d];
        loop {
            let signed: Vec<BigInt> = y
                .iter()
                .zip(diag)
                .map(|(yi, m)| self.reduce_mod(yi, m))
                .collect();
            let c: Vec<BigInt> = (0..d)
                .map(|i| (0..d).map(|j| &self.snf_p_inv[i][j] * &signed[j]).sum())
                .collect();
            let rep = int_combine(&c, &self.decomposition.d_basis, n);
            out.push(Coset {
                parent: self.id,
                rep,
            });
            // Odometer with the last coordinate fastest.
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                y[i] += 1;
                if y[i] < diag[i] {
                    break;
                }
                y[i] = BigInt::zero();
            }
        }
    }

    /// A pseudo-random coset: small rational `V` and null coordinates,
    /// small integer `F` coordinates, uniform discrete residues.
    pub fn random_coset<R: Rng + ?Sized>(&self, rng: &mut R) -> Coset {
        let (v, k, f, d) = self.decomposition.block_sizes();
        let mut c: QVec = Vec::with_capacity(self.dim());
        for _ in 0..v {
            c.push(rat(rng.gen_range(-12..=12), rng.gen_range(1..=6)));
        }
        for _ in 0..k {
            c.push(rat(rng.gen_range(-24..=24), rng.gen_range(1..=8)));
        }
        for _ in 0..f {
            c.push(rat(rng.gen_range(-5..=5), 1));
        }
        for i in 0..d {
            let m = self.snf.diag[i].to_i64().unwrap_or(i64::MAX).max(1);
            let offset: i64 = rng.gen_range(-2..=2) * m;
            c.push(rat(rng.gen_range(0..m) + offset, 1));
        }
        // D coordinates above are Smith coordinates; move to the D basis.
        if d > 0 {
            let start = v + k + f;
            let y: Vec<BigInt> = c[start..].iter().map(|x| x.to_integer()).collect();
            for i in 0..d {
                let ci: BigInt = (0..d).map(|j| &self.snf_p_inv[i][j] * &y[j]).sum();
                c[start + i] = Rational::from_integer(ci);
            }
        }
        let x = combine(&c, &self.decomposition.coordinate_basis(), self.dim());
        self.coset_unchecked(&x)
    }

    /// A pseudo-random lattice vector with small coordinates.
    pub fn random_lattice_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> QVec {
        let c: Vec<BigInt> = (0..self.rank())
            .map(|_| BigInt::from(rng.gen_range(-4..=4)))
            .collect();
        int_combine(&c, &self.basis, self.dim())
    }

    /// Stored Smith transform rendered for serialization.
    pub fn smith_summary(&self) -> SmithSummary {
        SmithSummary {
            invariant_factors: self.snf.diag.iter().map(|x| x.to_string()).collect(),
            p: self
                .snf
                .p
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
            q: self
                .snf
                .q
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }

    /// Unimodularity check used by tests of the stored transform.
    pub fn smith_is_consistent(&self) -> bool {
        let d = self.snf.diag.len();
        let p = from_integer_matrix(&self.snf.p, d);
        let det = p.det();
        det == Rational::one() || det == -Rational::one() || (d == 0 && det.is_positive())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmithSummary {
    pub invariant_factors: Vec<String>,
    pub p: Vec<Vec<String>>,
    pub q: Vec<Vec<String>>,
}
