//! The sign cocycle on a lattice and the trivializing cochain needed for
//! simple-current extensions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gvcat::GVCategory;
use crate::io::vector_strings;
use crate::lattice::{BosonicLatticeData, Coset};
use crate::linalg::{
    add, from_integer_matrix, int_combine, smith, unimodular_inverse, IMatrix, QMatrix, QVec,
};
use crate::scalar::{Phase, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CocycleError {
    #[error("NotABasis: the given vectors do not form a ℤ-basis of the lattice")]
    NotABasis,
    #[error("InfiniteQuotient: the sublattice has smaller rank ({0} < {1})")]
    InfiniteQuotient(usize, usize),
    #[error("NotASublattice: {0}")]
    NotASublattice(String),
    #[error("FFMismatch: the distinguished coset of the sublattice is not contained in that of the larger lattice")]
    FFMismatch,
    #[error("Unsolvable: no cochain satisfies the trivialization conditions (defect at {0:?})")]
    Unsolvable(Vec<Vec<String>>),
}

impl CocycleError {
    pub fn name(&self) -> &'static str {
        match self {
            CocycleError::NotABasis => "NotABasis",
            CocycleError::InfiniteQuotient(..) => "InfiniteQuotient",
            CocycleError::NotASublattice(_) => "NotASublattice",
            CocycleError::FFMismatch => "FFMismatch",
            CocycleError::Unsolvable(_) => "Unsolvable",
        }
    }
}

/// A bimultiplicative `±1`-valued cocycle given on an ordered ℤ-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCocycle {
    basis: Vec<QVec>,
    /// `table[i][j]` is true when `ε(b_i, b_j) = −1`.
    table: Vec<Vec<bool>>,
    coords: QMatrix,
}

fn coordinate_map(basis: &[QVec], n: usize) -> QMatrix {
    if basis.is_empty() {
        return QMatrix::zeros(n, 0);
    }
    let b = QMatrix::from_rows(basis, n);
    let bbt_inv = b.mul(&b.transpose()).inverse().expect("independent rows");
    b.transpose().mul(&bbt_inv)
}

/// Checks that `basis` is a ℤ-basis of the lattice of `data`.
fn check_basis(data: &BosonicLatticeData, basis: &[QVec]) -> Result<(), CocycleError> {
    if basis.len() != data.rank() || basis.iter().any(|b| b.len() != data.dim()) {
        return Err(CocycleError::NotABasis);
    }
    let rows: Option<Vec<Vec<BigInt>>> = basis.iter().map(|b| data.lattice_coords(b)).collect();
    let Some(rows) = rows else {
        return Err(CocycleError::NotABasis);
    };
    let det = from_integer_matrix(&rows, data.rank()).det();
    if det != Rational::one() && det != -Rational::one() {
        return Err(CocycleError::NotABasis);
    }
    Ok(())
}

/// `ε(b_i, b_j) = (−1)^{⟨b_i, b_j⟩}` for `i < j` and `1` otherwise.
pub fn epsilon_from_basis(
    data: &BosonicLatticeData,
    ordered_basis: &[QVec],
) -> Result<TwoCocycle, CocycleError> {
    check_basis(data, ordered_basis)?;
    let r = ordered_basis.len();
    let table = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    i < j
                        && data
                            .pair(&ordered_basis[i], &ordered_basis[j])
                            .to_integer()
                            .is_odd()
                })
                .collect()
        })
        .collect();
    Ok(TwoCocycle {
        basis: ordered_basis.to_vec(),
        table,
        coords: coordinate_map(ordered_basis, data.dim()),
    })
}

impl TwoCocycle {
    /// The cocycle built from the stored lattice basis.
    pub fn standard(data: &BosonicLatticeData) -> TwoCocycle {
        epsilon_from_basis(data, data.lattice_basis()).expect("stored basis is a basis")
    }

    /// An arbitrary sign table; `true` entries are `−1`. Used to exercise the
    /// verifier on tables that are not cocycles.
    pub fn from_table(
        data: &BosonicLatticeData,
        ordered_basis: &[QVec],
        table: Vec<Vec<bool>>,
    ) -> Result<TwoCocycle, CocycleError> {
        check_basis(data, ordered_basis)?;
        let r = ordered_basis.len();
        if table.len() != r || table.iter().any(|row| row.len() != r) {
            return Err(CocycleError::NotABasis);
        }
        Ok(TwoCocycle {
            basis: ordered_basis.to_vec(),
            table,
            coords: coordinate_map(ordered_basis, data.dim()),
        })
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn table(&self) -> &[Vec<bool>] {
        &self.table
    }

    fn coords(&self, v: &[Rational]) -> Vec<BigInt> {
        let c = self.coords.vec_mul(v);
        debug_assert!(
            c.iter().all(|x| x.is_integer()),
            "ε evaluated off the lattice"
        );
        c.iter().map(|x| x.to_integer()).collect()
    }

    /// `ε(α, β)` for lattice vectors.
    pub fn eval(&self, alpha: &[Rational], beta: &[Rational]) -> Phase {
        if self.basis.is_empty() {
            return Phase::one();
        }
        let a = self.coords(alpha);
        let b = self.coords(beta);
        let mut parity = BigInt::zero();
        for (i, row) in self.table.iter().enumerate() {
            if a[i].is_even() {
                continue;
            }
            for (j, &odd) in row.iter().enumerate() {
                if odd {
                    parity += &b[j];
                }
            }
        }
        Phase::sign(parity.is_odd())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub pass: bool,
    pub checked: usize,
    pub witness: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub conditions: Vec<ConditionReport>,
}

impl CocycleReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

/// Verifies normalization, the cocycle identity and the commutator rule
/// for `ε`, on basis tuples plus `samples` random triples.
pub fn verify_two_cocycle(
    data: &BosonicLatticeData,
    eps: &TwoCocycle,
    samples: usize,
    seed: u64,
) -> CocycleReport {
    verify_cocycle_fn(data, |a, b| eps.eval(a, b), samples, seed)
}

/// As [`verify_two_cocycle`] for any function on pairs of lattice vectors.
pub fn verify_cocycle_fn<E>(
    data: &BosonicLatticeData,
    eps: E,
    samples: usize,
    seed: u64,
) -> CocycleReport
where
    E: Fn(&[Rational], &[Rational]) -> Phase,
{
    let n = data.dim();
    let zero = vec![Rational::zero(); n];
    let mut vectors: Vec<QVec> = data.lattice_basis().to_vec();
    let basis_count = vectors.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        vectors.push(data.random_lattice_vector(&mut rng));
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis_count {
        for j in 0..basis_count {
            pairs.push((i, j));
        }
    }
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..basis_count {
        for j in 0..basis_count {
            for k in 0..basis_count {
                triples.push((i, j, k));
            }
        }
    }
    if !vectors.is_empty() {
        use rand::Rng;
        let len = vectors.len();
        for _ in 0..samples {
            let (i, j, k) = (
                rng.gen_range(0..len),
                rng.gen_range(0..len),
                rng.gen_range(0..len),
            );
            pairs.push((i, j));
            triples.push((i, j, k));
        }
    }

    let mut normalization = ConditionReport {
        condition: "normalization".into(),
        pass: true,
        checked: 0,
        witness: Vec::new(),
    };
    for v in &vectors {
        normalization.checked += 1;
        if !eps(v, &zero).is_one() || !eps(&zero, v).is_one() {
            normalization.pass = false;
            normalization.witness = vec![vector_strings(v)];
            break;
        }
    }

    let mut cocycle = ConditionReport {
        condition: "cocycle".into(),
        pass: true,
        checked: 0,
        witness: Vec::new(),
    };
    for &(i, j, k) in &triples {
        cocycle.checked += 1;
        let (a, b, c) = (&vectors[i], &vectors[j], &vectors[k]);
        let lhs = eps(b, c) * eps(&add(a, b), c).inv() * eps(a, &add(b, c)) * eps(a, b).inv();
        if !lhs.is_one() {
            cocycle.pass = false;
            cocycle.witness = vec![vector_strings(a), vector_strings(b), vector_strings(c)];
            break;
        }
    }

    let mut commutator = ConditionReport {
        condition: "commutator".into(),
        pass: true,
        checked: 0,
        witness: Vec::new(),
    };
    for &(i, j) in &pairs {
        commutator.checked += 1;
        let (a, b) = (&vectors[i], &vectors[j]);
        let expected = Phase::sign(data.pair(a, b).to_integer().is_odd());
        if eps(a, b) / eps(b, a) != expected {
            commutator.pass = false;
            commutator.witness = vec![vector_strings(a), vector_strings(b)];
            break;
        }
    }

    CocycleReport {
        conditions: vec![normalization, cocycle, commutator],
    }
}

/// A cochain on the finite group `Λ₂/Λ₁`, elements stored as cosets of the
/// smaller lattice (element 0 is the identity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaCochain {
    group: Vec<Coset>,
    index: HashMap<Coset, usize>,
    sum: Vec<Vec<usize>>,
    values: Vec<Vec<Phase>>,
    seed_exact: bool,
}

impl SigmaCochain {
    pub fn group(&self) -> &[Coset] {
        &self.group
    }

    pub fn index_of(&self, c: &Coset) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn value(&self, i: usize, j: usize) -> &Phase {
        &self.values[i][j]
    }

    pub fn values(&self) -> &[Vec<Phase>] {
        &self.values
    }

    /// Whether the `ε`-seed already satisfied every condition.
    pub fn seed_exact(&self) -> bool {
        self.seed_exact
    }

    pub fn sum_index(&self, i: usize, j: usize) -> usize {
        self.sum[i][j]
    }

    pub fn get(&self, a: &Coset, b: &Coset) -> Option<&Phase> {
        Some(&self.values[self.index_of(a)?][self.index_of(b)?])
    }

    fn with_values(&self, values: Vec<Vec<Phase>>) -> SigmaCochain {
        SigmaCochain {
            values,
            ..self.clone()
        }
    }
}

/// Enumerates `Λ₂/Λ₁` as cosets of `Λ₁` after checking the inclusion
/// conditions.
pub fn enumerate_quotient(
    data1: &BosonicLatticeData,
    data2: &BosonicLatticeData,
) -> Result<Vec<Coset>, CocycleError> {
    if data1.space().gram() != data2.space().gram() {
        return Err(CocycleError::NotASublattice(
            "the two data live in different spaces".into(),
        ));
    }
    let r1 = data1.rank();
    let r2 = data2.rank();
    let rows: Option<IMatrix> = data1
        .lattice_basis()
        .iter()
        .map(|b| data2.lattice_coords(b))
        .collect();
    let Some(t) = rows else {
        return Err(CocycleError::NotASublattice(
            "a generator of the first lattice is not an integer combination of the second".into(),
        ));
    };
    if r1 < r2 {
        return Err(CocycleError::InfiniteQuotient(r1, r2));
    }
    let diff: QVec = data1
        .ff_rep()
        .iter()
        .zip(data2.ff_rep())
        .map(|(a, b)| a - b)
        .collect();
    if !data2.in_lattice(&diff) {
        return Err(CocycleError::FFMismatch);
    }
    // Λ₁ in Λ₂-coordinates is the column span of tᵀ.
    let tt: IMatrix = (0..r2)
        .map(|j| (0..r1).map(|i| t[i][j].clone()).collect())
        .collect();
    let s = smith(&tt, r2, r1);
    let p_inv = unimodular_inverse(&s.p);
    let diag = s.diag.clone();
    let mut out = Vec::new();
    let mut y: Vec<BigInt> = vec![BigInt::zero(); r2];
    loop {
        let c: Vec<BigInt> = (0..r2)
            .map(|i| (0..r2).map(|j| &p_inv[i][j] * &y[j]).sum())
            .collect();
        let v = int_combine(&c, data2.lattice_basis(), data2.dim());
        out.push(data1.coset(&v).expect("Λ₂ lies in the dual of Λ₁"));
        let mut i = r2;
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

fn group_tables(
    data1: &BosonicLatticeData,
    group: &[Coset],
) -> (HashMap<Coset, usize>, Vec<Vec<usize>>) {
    let index: HashMap<Coset, usize> = group
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let sum = group
        .iter()
        .map(|a| {
            group
                .iter()
                .map(|b| {
                    let c = data1.coset(&add(a.rep(), b.rep())).expect("closed");
                    index[&c]
                })
                .collect()
        })
        .collect();
    (index, sum)
}

/// Report of the three trivialization conditions, checked exhaustively.
pub fn verify_sigma(cat1: &GVCategory, sigma: &SigmaCochain) -> CocycleReport {
    let g = &sigma.group;
    let labels = |ids: &[usize]| {
        ids.iter()
            .map(|&i| vector_strings(g[i].rep()))
            .collect::<Vec<_>>()
    };
    let mut normalization = ConditionReport {
        condition: "normalization".into(),
        pass: true,
        checked: 0,
        witness: Vec::new(),
    };
    for i in 0..g.len() {
        normalization.checked += 1;
        if !sigma.values[i][0].is_one() || !sigma.values[0][i].is_one() {
            normalization.pass = false;
            normalization.witness = labels(&[i]);
            break;
        }
    }
    let mut commutator = ConditionReport {
        condition: "commutator".into(),
        pass: true,
        checked: 0,
        witness: Vec::new(),
    };
    'pairs: for i in 0..g.len() {
        for j in 0..g.len() {
            commutator.checked += 1;
            if &sigma.values[i][j] / &sigma.values[j][i] != cat1.braiding_unchecked(&g[i], &g[j]) {
                commutator.pass = false;
                commutator.witness = labels(&[i, j]);
                break 'pairs;
            }
        }
    }
    let mut coboundary = ConditionReport {
        condition: "coboundary".into(),
        pass: true,
        checked: 0,
        witness: Vec::new(),
    };
    'triples: for a in 0..g.len() {
        for b in 0..g.len() {
            for c in 0..g.len() {
                coboundary.checked += 1;
                if coboundary_defect(cat1, sigma, a, b, c).is_some() {
                    coboundary.pass = false;
                    coboundary.witness = labels(&[a, b, c]);
                    break 'triples;
                }
            }
        }
    }
    CocycleReport {
        conditions: vec![normalization, commutator, coboundary],
    }
}

/// `F(a,b,c) / δσ(a,b,c)` when it is not 1.
fn coboundary_defect(
    cat1: &GVCategory,
    s: &SigmaCochain,
    a: usize,
    b: usize,
    c: usize,
) -> Option<Phase> {
    let v = &s.values;
    let ab = s.sum[a][b];
    let bc = s.sum[b][c];
    let delta = &v[b][c] * &v[ab][c].inv();
    let delta = &(&delta * &v[a][bc]) * &v[a][b].inv();
    let g = &s.group;
    let defect = cat1.associator_unchecked(&g[a], &g[b], &g[c]) / delta;
    (!defect.is_one()).then_some(defect)
}

/// Solves for `σ` on `Λ₂/Λ₁`: seeds with `ε₂` on the section
/// representatives, then corrects by a symmetric cochain found from a
/// linear system over `ℚ/2ℤ`.
pub fn solve_sigma(
    data1: &BosonicLatticeData,
    data2: &BosonicLatticeData,
) -> Result<SigmaCochain, CocycleError> {
    let group = enumerate_quotient(data1, data2)?;
    let cat1 = GVCategory::new(data1.clone());
    let eps2 = TwoCocycle::standard(data2);
    let (index, sum) = group_tables(data1, &group);
    let values: Vec<Vec<Phase>> = group
        .iter()
        .map(|a| group.iter().map(|b| eps2.eval(a.rep(), b.rep())).collect())
        .collect();
    let seed = SigmaCochain {
        group,
        index,
        sum,
        values,
        seed_exact: false,
    };
    let m = seed.group.len();

    // Unknown exponents on unordered pairs of nonzero elements.
    let mut unknown = HashMap::new();
    for i in 1..m {
        for j in i..m {
            let k = unknown.len();
            unknown.insert((i, j), k);
        }
    }
    let var = |i: usize, j: usize| -> Option<usize> {
        if i == 0 || j == 0 {
            None
        } else {
            Some(unknown[&(i.min(j), i.max(j))])
        }
    };
    let mut rows: IMatrix = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut witnesses: Vec<(usize, usize, usize)> = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let defect = coboundary_defect(&cat1, &seed, a, b, c)
                    .map(|p| p.exponent().clone())
                    .unwrap_or_else(Rational::zero);
                let mut row = vec![BigInt::zero(); unknown.len()];
                let ab = seed.sum[a][b];
                let bc = seed.sum[b][c];
                for (i, j, s) in [(b, c, 1), (ab, c, -1), (a, bc, 1), (a, b, -1)] {
                    if let Some(k) = var(i, j) {
                        row[k] += s;
                    }
                }
                if row.iter().all(Zero::is_zero) && defect.is_zero() {
                    continue;
                }
                rows.push(row);
                rhs.push(defect);
                witnesses.push((a, b, c));
            }
        }
    }
    let seed_exact = rhs.iter().all(Zero::is_zero);
    let values = if seed_exact {
        seed.values.clone()
    } else {
        correct_seed(&seed, &rows, &rhs, &witnesses, &unknown)?
    };
    let sigma = SigmaCochain {
        seed_exact,
        ..seed.with_values(values)
    };
    let report = verify_sigma(&cat1, &sigma);
    if !report.pass() {
        let w = report
            .conditions
            .iter()
            .find(|c| !c.pass)
            .map(|c| c.witness.clone())
            .unwrap_or_default();
        return Err(CocycleError::Unsolvable(w));
    }
    Ok(sigma)
}

/// Exhaustive search over fourth roots of unity, for groups of order at
/// most 4. Values on unordered pairs are free; the commutator rule fixes
/// the transposed entry.
pub fn solve_sigma_brute_force(
    data1: &BosonicLatticeData,
    data2: &BosonicLatticeData,
) -> Result<Option<SigmaCochain>, CocycleError> {
    let group = enumerate_quotient(data1, data2)?;
    let m = group.len();
    if m > 4 {
        return Ok(None);
    }
    let cat1 = GVCategory::new(data1.clone());
    let (index, sum) = group_tables(data1, &group);
    let mut pairs = Vec::new();
    for i in 1..m {
        for j in i..m {
            pairs.push((i, j));
        }
    }
    let base = SigmaCochain {
        group,
        index,
        sum,
        values: vec![vec![Phase::one(); m]; m],
        seed_exact: false,
    };
    let total = 4usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut values = vec![vec![Phase::one(); m]; m];
        let mut c = code;
        for &(i, j) in &pairs {
            let k = (c % 4) as i64;
            c /= 4;
            let v = Phase::new(Rational::new(BigInt::from(k), BigInt::from(2)));
            let omega = cat1.braiding_unchecked(&base.group[i], &base.group[j]);
            values[j][i] = &v / &omega;
            values[i][j] = v;
        }
        let candidate = base.with_values(values);
        if verify_sigma(&cat1, &candidate).pass() {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Symmetric correction of the seed: solves `δx ≡ r (mod 2)` for exponents
/// `x` on unordered pairs of nonzero elements via a Smith form.
fn correct_seed(
    seed: &SigmaCochain,
    rows: &IMatrix,
    rhs: &[Rational],
    witnesses: &[(usize, usize, usize)],
    unknown: &HashMap<(usize, usize), usize>,
) -> Result<Vec<Vec<Phase>>, CocycleError> {
    let m = seed.group.len();
    let unsolvable = |k: usize| {
        let (a, b, c) = witnesses[k];
        CocycleError::Unsolvable(
            [a, b, c]
                .iter()
                .map(|&i| vector_strings(seed.group[i].rep()))
                .collect(),
        )
    };
    let eqs = rows.len();
    let vars = unknown.len();
    if vars == 0 {
        return Err(unsolvable(0));
    }
    let s = smith(rows, eqs, vars);
    // P A Q = S; with x = Q x', need S x' ≡ P r (mod 2).
    let pr: Vec<Rational> = (0..eqs)
        .map(|i| {
            let mut acc = Rational::zero();
            for (p, r) in s.p[i].iter().zip(rhs) {
                if !p.is_zero() && !r.is_zero() {
                    acc += Rational::from_integer(p.clone()) * r;
                }
            }
            acc
        })
        .collect();
    let two = Rational::from_integer(BigInt::from(2));
    let mut xp = vec![Rational::zero(); vars];
    for i in 0..eqs {
        let d = if i < vars {
            s.diag[i].clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            if !(&pr[i] / &two).is_integer() {
                return Err(unsolvable(i.min(witnesses.len() - 1)));
            }
        } else {
            xp[i] = &pr[i] / Rational::from_integer(d);
        }
    }
    let q = from_integer_matrix(&s.q, vars);
    let x = q.mul_vec(&xp);
    let mut values = seed.values.clone();
    for i in 1..m {
        for j in 1..m {
            let k = unknown[&(i.min(j), i.max(j))];
            values[i][j] = &values[i][j] * &Phase::new(x[k].clone());
        }
    }
    Ok(values)
}
