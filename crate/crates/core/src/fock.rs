//! Truncated Fock spaces of the Heisenberg algebra on `𝔥`, the Virasoro
//! action of the deformed conformal vector, untwisted vertex operators and
//! the checks that tie them back to the category scalars.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::gvcat::GVCategory;
use crate::io::vector_strings;
use crate::lattice::{BosonicLatticeData, Coset};
use crate::linalg::{add, neg, QMatrix, QVec};
use crate::scalar::{rat, to_f64, Phase, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("LevelOverflow: level {level} exceeds the bound {max_level}")]
    LevelOverflow { level: u32, max_level: u32 },
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("ConvergenceNotReached: last partial ratios {last:?}, tolerance {tol}")]
    ConvergenceNotReached { last: [f64; 2], tol: f64 },
    #[error("InconclusiveCancellation while comparing coefficients")]
    Inconclusive,
}

impl FockError {
    pub fn name(&self) -> &'static str {
        match self {
            FockError::LevelOverflow { .. } => "LevelOverflow",
            FockError::ShapeMismatch(_) => "ShapeMismatch",
            FockError::ConvergenceNotReached { .. } => "ConvergenceNotReached",
            FockError::Inconclusive => "InconclusiveCancellation",
        }
    }
}

/// Coefficient field of Fock vectors.
pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync {
    fn additive_zero() -> Self;
    fn from_rational(r: Rational) -> Self;
    fn is_exact_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times_rational(&self, r: &Rational) -> Self;
}

impl Coefficient for Rational {
    fn additive_zero() -> Self {
        Zero::zero()
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times_rational(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Coefficient for Scalar {
    fn additive_zero() -> Self {
        Scalar::zero()
    }
    fn from_rational(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
    fn is_exact_zero(&self) -> bool {
        self.normalized().is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times_rational(&self, r: &Rational) -> Self {
        self.scale(r)
    }
}

/// A PBW monomial `∏ (e_i)_{−m}` on a highest-weight vector, stored as a
/// sorted list of `(direction, mode)` with `mode ≥ 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockMonomial {
    modes: Vec<(usize, u32)>,
}

impl FockMonomial {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn new(mut modes: Vec<(usize, u32)>) -> Self {
        modes.retain(|&(_, m)| m > 0);
        modes.sort_unstable();
        FockMonomial { modes }
    }

    pub fn modes(&self) -> &[(usize, u32)] {
        &self.modes
    }

    pub fn level(&self) -> u32 {
        self.modes.iter().map(|&(_, m)| m).sum()
    }

    fn with(&self, dir: usize, mode: u32) -> Self {
        let mut modes = self.modes.clone();
        let pos = modes.partition_point(|&x| x < (dir, mode));
        modes.insert(pos, (dir, mode));
        FockMonomial { modes }
    }

    fn without(&self, index: usize) -> Self {
        let mut modes = self.modes.clone();
        modes.remove(index);
        FockMonomial { modes }
    }
}

/// A vector in a single Fock space `F_λ`, truncated at `max_level`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<C: Coefficient = Rational> {
    weight: QVec,
    max_level: u32,
    terms: BTreeMap<FockMonomial, C>,
}

impl<C: Coefficient> FockVector<C> {
    pub fn zero(weight: QVec, max_level: u32) -> Self {
        FockVector {
            weight,
            max_level,
            terms: BTreeMap::new(),
        }
    }

    /// The highest-weight vector `|λ⟩`.
    pub fn highest(weight: QVec, max_level: u32) -> Self {
        let mut v = Self::zero(weight, max_level);
        v.add_term(FockMonomial::vacuum(), C::from_rational(Rational::one()));
        v
    }

    pub fn monomial(
        weight: QVec,
        max_level: u32,
        m: FockMonomial,
        c: C,
    ) -> Result<Self, FockError> {
        if m.level() > max_level {
            return Err(FockError::LevelOverflow {
                level: m.level(),
                max_level,
            });
        }
        let mut v = Self::zero(weight, max_level);
        v.add_term(m, c);
        Ok(v)
    }

    pub fn weight(&self) -> &[Rational] {
        &self.weight
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn with_max_level(mut self, max_level: u32) -> Self {
        self.max_level = max_level;
        self.terms.retain(|m, _| m.level() <= max_level);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &FockMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::additive_zero)
    }

    /// Highest level carrying a nonzero coefficient.
    pub fn top_level(&self) -> u32 {
        self.terms
            .keys()
            .map(FockMonomial::level)
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, m: FockMonomial, c: C) {
        if c.is_exact_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = slot.plus(&c);
                if slot.is_exact_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector<C>, r: &Rational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.times_rational(r));
        }
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.weight.clone(), self.max_level);
        out.add_scaled(self, r);
        out
    }

    pub fn map_coefficients<D: Coefficient, F: Fn(&C) -> D>(&self, f: F) -> FockVector<D> {
        let mut out = FockVector::zero(self.weight.clone(), self.max_level);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Component of level exactly `d`.
    pub fn level_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.weight.clone(), self.max_level);
        for (m, c) in &self.terms {
            if m.level() == d {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }
}

impl FockVector<Scalar> {
    pub fn mul_phase(&self, p: &Phase) -> Self {
        self.map_coefficients(|c| c.mul_phase(p))
    }

    /// Exact comparison through the scalar zero test.
    pub fn equals(&self, other: &Self) -> Result<bool, FockError> {
        let mut diff = self.clone();
        for (m, c) in &other.terms {
            diff.add_term(m.clone(), -c);
        }
        for c in diff.terms.values() {
            if !c.is_zero().map_err(|_| FockError::Inconclusive)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All monomials of level exactly `d` in `n` directions.
pub fn basis_monomials(n: usize, d: u32) -> Vec<FockMonomial> {
    fn go(
        n: usize,
        remaining: u32,
        max_part: (u32, usize),
        acc: &mut Vec<(usize, u32)>,
        out: &mut Vec<FockMonomial>,
    ) {
        if remaining == 0 {
            out.push(FockMonomial::new(acc.clone()));
            return;
        }
        // Parts in non-increasing (mode, direction) order avoid duplicates.
        for m in (1..=remaining.min(max_part.0)).rev() {
            let dir_cap = if m == max_part.0 {
                max_part.1
            } else {
                n.saturating_sub(1)
            };
            for i in 0..=dir_cap.min(n.saturating_sub(1)) {
                acc.push((i, m));
                go(n, remaining - m, (m, i), acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(FockMonomial::vacuum());
        }
        return out;
    }
    go(n, d, (d, n - 1), &mut Vec::new(), &mut out);
    out
}

/// `dim F_λ[d]`, the number of `n`-coloured partitions of `d`.
pub fn graded_dimension(data: &BosonicLatticeData, _weight: &[Rational], d: u32) -> BigInt {
    crate::scalar::colored_partition_counts(data.dim() as u32, d as usize)
        .pop()
        .unwrap_or_else(BigInt::zero)
}

/// Heisenberg and Virasoro modes for a fixed bilinear form and conformal
/// deformation vector. Virasoro actions on monomials are memoized.
pub struct ModeAlgebra {
    gram: QMatrix,
    ginv: QMatrix,
    gamma: QVec,
    cache: RefCell<HashMap<(i64, QVec, FockMonomial), Vec<(FockMonomial, Rational)>>>,
}

impl ModeAlgebra {
    pub fn new(data: &BosonicLatticeData) -> Self {
        Self::with_gamma(data, data.ff_rep().to_vec())
    }

    pub fn with_gamma(data: &BosonicLatticeData, gamma: QVec) -> Self {
        let gram = data.space().gram().clone();
        let ginv = gram.inverse().expect("non-degenerate");
        ModeAlgebra {
            gram,
            ginv,
            gamma,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    /// `c = dim 𝔥 − 12⟨γ, γ⟩`.
    pub fn central_charge(&self) -> Rational {
        let g = &self.gamma;
        let norm: Rational = (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .map(|(i, j)| &g[i] * &self.gram[(i, j)] * &g[j])
            .sum();
        rat(self.dim() as i64, 1) - rat(12, 1) * norm
    }

    fn pair_with_basis(&self, i: usize, w: &[Rational]) -> Rational {
        (0..self.dim()).map(|j| &self.gram[(i, j)] * &w[j]).sum()
    }

    /// `(e_i)_m` on a monomial of `F_λ`, with no level bound.
    fn basis_mode(
        &self,
        i: usize,
        m: i64,
        weight: &[Rational],
        mono: &FockMonomial,
    ) -> Vec<(FockMonomial, Rational)> {
        match m.cmp(&0) {
            std::cmp::Ordering::Less => vec![(mono.with(i, (-m) as u32), Rational::one())],
            std::cmp::Ordering::Equal => {
                let c = self.pair_with_basis(i, weight);
                if c.is_zero() {
                    Vec::new()
                } else {
                    vec![(mono.clone(), c)]
                }
            }
            std::cmp::Ordering::Greater => {
                let mut out = Vec::new();
                for (t, &(j, k)) in mono.modes.iter().enumerate() {
                    if k as i64 == m && !self.gram[(i, j)].is_zero() {
                        out.push((mono.without(t), rat(m, 1) * &self.gram[(i, j)]));
                    }
                }
                out
            }
        }
    }

    /// `α_m` for a direction vector, truncating results above `max_level`.
    fn direction_mode_truncated<C: Coefficient>(
        &self,
        alpha: &[Rational],
        m: i64,
        v: &FockVector<C>,
    ) -> FockVector<C> {
        let mut out = FockVector::zero(v.weight.clone(), v.max_level);
        for (mono, c) in &v.terms {
            if m < 0 && mono.level() as i64 - m > v.max_level as i64 {
                continue;
            }
            for (i, a) in alpha.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (res, k) in self.basis_mode(i, m, &v.weight, mono) {
                    out.add_term(res, c.times_rational(&(a * k)));
                }
            }
        }
        out
    }

    /// `α_m v` with an explicit level check.
    pub fn heisenberg_act<C: Coefficient>(
        &self,
        alpha: &[Rational],
        m: i64,
        v: &FockVector<C>,
    ) -> Result<FockVector<C>, FockError> {
        if alpha.len() != self.dim() {
            return Err(FockError::ShapeMismatch(format!(
                "direction of length {} in dimension {}",
                alpha.len(),
                self.dim()
            )));
        }
        if m < 0 {
            let top = v.top_level() as i64 - m;
            if !v.is_empty() && top > v.max_level as i64 {
                return Err(FockError::LevelOverflow {
                    level: top as u32,
                    max_level: v.max_level,
                });
            }
        }
        Ok(self.direction_mode_truncated(alpha, m, v))
    }

    /// `L_m` on one monomial:
    /// `½ Σ_k Σ_ij G⁻¹_ij :(e_i)_k (e_j)_{m−k}: − (m+1) γ_m`.
    fn virasoro_monomial(
        &self,
        m: i64,
        weight: &[Rational],
        mono: &FockMonomial,
    ) -> Vec<(FockMonomial, Rational)> {
        let key = (m, weight.to_vec(), mono.clone());
        if let Some(hit) = self.cache.borrow().get(&key) {
            return hit.clone();
        }
        let n = self.dim();
        let lv = mono.level() as i64;
        let mut acc: BTreeMap<FockMonomial, Rational> = BTreeMap::new();
        let mut push = |mono: FockMonomial, c: Rational| {
            let slot = acc.entry(mono).or_insert_with(Rational::zero);
            *slot += c;
        };
        let half = rat(1, 2);
        for i in 0..n {
            for j in 0..n {
                let g = &self.ginv[(i, j)];
                if g.is_zero() {
                    continue;
                }
                let coeff = &half * g;
                for k in (m - lv)..=lv {
                    let (first, first_mode, second, second_mode) = if k > 0 {
                        (i, k, j, m - k)
                    } else {
                        (j, m - k, i, k)
                    };
                    for (mid, c1) in self.basis_mode(first, first_mode, weight, mono) {
                        for (res, c2) in self.basis_mode(second, second_mode, weight, &mid) {
                            push(res, &coeff * &c1 * c2);
                        }
                    }
                }
            }
        }
        let shift = rat(-(m + 1), 1);
        if !shift.is_zero() {
            for (i, g) in self.gamma.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                for (res, c) in self.basis_mode(i, m, weight, mono) {
                    push(res, &shift * g * c);
                }
            }
        }
        let out: Vec<(FockMonomial, Rational)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.cache.borrow_mut().insert(key, out.clone());
        out
    }

    /// `L_m v`.
    pub fn virasoro_mode<C: Coefficient>(
        &self,
        m: i64,
        v: &FockVector<C>,
    ) -> Result<FockVector<C>, FockError> {
        let top = v.top_level() as i64 - m;
        if !v.is_empty() && top > v.max_level as i64 {
            return Err(FockError::LevelOverflow {
                level: top as u32,
                max_level: v.max_level,
            });
        }
        let mut out = FockVector::zero(v.weight.clone(), v.max_level);
        for (mono, c) in &v.terms {
            for (res, k) in self.virasoro_monomial(m, &v.weight, mono) {
                out.add_term(res, c.times_rational(&k));
            }
        }
        Ok(out)
    }

    /// `[L_m, L_k] v − (m−k) L_{m+k} v − (c/12)(m³−m) δ_{m+k,0} v`.
    pub fn virasoro_defect(&self, m: i64, k: i64, v: &FockVector) -> Result<FockVector, FockError> {
        let lk = self.virasoro_mode(k, v)?;
        let mut out = self.virasoro_mode(m, &lk)?;
        let lm = self.virasoro_mode(m, v)?;
        out.add_scaled(&self.virasoro_mode(k, &lm)?, &-Rational::one());
        out.add_scaled(&self.virasoro_mode(m + k, v)?, &rat(-(m - k), 1));
        if m + k == 0 {
            let c = self.central_charge() * rat(m * m * m - m, 12);
            out.add_scaled(v, &-c);
        }
        Ok(out)
    }

    /// `[L_m, α_k] v + k α_{m+k} v + m(m+1)⟨γ, α⟩ δ_{m+k,0} v`.
    pub fn current_defect(
        &self,
        m: i64,
        alpha: &[Rational],
        k: i64,
        v: &FockVector,
    ) -> Result<FockVector, FockError> {
        let ak = self.heisenberg_act(alpha, k, v)?;
        let mut out = self.virasoro_mode(m, &ak)?;
        let lm = self.virasoro_mode(m, v)?;
        out.add_scaled(&self.heisenberg_act(alpha, k, &lm)?, &-Rational::one());
        out.add_scaled(&self.heisenberg_act(alpha, m + k, v)?, &rat(k, 1));
        if m + k == 0 {
            let g: Rational = (0..self.dim())
                .map(|i| &alpha[i] * self.pair_with_basis(i, &self.gamma))
                .sum();
            out.add_scaled(v, &(rat(m * (m + 1), 1) * g));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub pass: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

/// Virasoro relations on every basis monomial of level `≤ level` over each
/// weight in `weights`, for `|m|, |k| ≤ mode_bound`.
pub fn check_virasoro(
    data: &BosonicLatticeData,
    weights: &[QVec],
    level: u32,
    mode_bound: i64,
) -> Result<IdentityReport, FockError> {
    let alg = ModeAlgebra::new(data);
    let cap = level + 2 * mode_bound as u32;
    let mut checked = 0;
    for w in weights {
        for d in 0..=level {
            for mono in basis_monomials(data.dim(), d) {
                let v = FockVector::monomial(w.clone(), cap, mono.clone(), Rational::one())?;
                for m in -mode_bound..=mode_bound {
                    for k in -mode_bound..=mode_bound {
                        checked += 1;
                        if !alg.virasoro_defect(m, k, &v)?.is_empty() {
                            return Ok(IdentityReport {
                                identity: "virasoro".into(),
                                pass: false,
                                checked,
                                witness: Some(format!(
                                    "m={m} k={k} weight={:?} monomial={:?}",
                                    vector_strings(w),
                                    mono.modes()
                                )),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(IdentityReport {
        identity: "virasoro".into(),
        pass: true,
        checked,
        witness: None,
    })
}

/// `[L_m, α_k]` relations for basis directions on monomials of level `≤ level`.
pub fn check_current_commutators(
    data: &BosonicLatticeData,
    weights: &[QVec],
    level: u32,
    mode_bound: i64,
) -> Result<IdentityReport, FockError> {
    let alg = ModeAlgebra::new(data);
    let n = data.dim();
    let cap = level + 2 * mode_bound as u32;
    let mut checked = 0;
    for w in weights {
        for d in 0..=level {
            for mono in basis_monomials(n, d) {
                let v = FockVector::monomial(w.clone(), cap, mono.clone(), Rational::one())?;
                for i in 0..n {
                    let alpha = crate::linalg::unit_vec(n, i);
                    for m in -mode_bound..=mode_bound {
                        for k in -mode_bound..=mode_bound {
                            checked += 1;
                            if !alg.current_defect(m, &alpha, k, &v)?.is_empty() {
                                return Ok(IdentityReport {
                                    identity: "current".into(),
                                    pass: false,
                                    checked,
                                    witness: Some(format!(
                                        "m={m} k={k} direction={i} monomial={:?}",
                                        mono.modes()
                                    )),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(IdentityReport {
        identity: "current".into(),
        pass: true,
        checked,
        witness: None,
    })
}

/// The state inserted into the vertex operator, on top of `|μ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub enum Insertion {
    /// `|μ⟩` itself.
    Vacuum,
    /// `α_{−1}|μ⟩`.
    Current(QVec),
    /// `α_{−2}|μ⟩`.
    Derivative(QVec),
    /// `α_{−1} β_{−1}|μ⟩`.
    Product(QVec, QVec),
}

impl Insertion {
    pub fn level(&self) -> i64 {
        match self {
            Insertion::Vacuum => 0,
            Insertion::Current(_) => 1,
            Insertion::Derivative(_) | Insertion::Product(..) => 2,
        }
    }
}

/// `Σ_j z^{base + j} v_j` with all `v_j` in one Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct ZSeries<C: Coefficient = Rational> {
    pub base: Rational,
    pub weight: QVec,
    pub coeffs: BTreeMap<i64, FockVector<C>>,
}

impl<C: Coefficient> ZSeries<C> {
    pub fn coefficient(&self, j: i64) -> FockVector<C> {
        self.coeffs
            .get(&j)
            .cloned()
            .unwrap_or_else(|| FockVector::zero(self.weight.clone(), self.max_level()))
    }

    fn max_level(&self) -> u32 {
        self.coeffs.values().map(|v| v.max_level).max().unwrap_or(0)
    }

    fn add_at(&mut self, j: i64, v: &FockVector<C>, max_level: u32) {
        if v.is_empty() {
            return;
        }
        let slot = self
            .coeffs
            .entry(j)
            .or_insert_with(|| FockVector::zero(self.weight.clone(), max_level));
        slot.add_scaled(v, &Rational::one());
        if slot.is_empty() {
            self.coeffs.remove(&j);
        }
    }
}

/// Coefficients of `exp(Σ_{n≥1} c_n A_n x^n)` applied to `v`, where
/// `A_n v` is supplied by `step(n, v)`: returns `w_s` with
/// `s w_s = Σ_{n=1}^s n c_n A_n w_{s−n}`.
fn exponential_series<C, F>(v: &FockVector<C>, terms: usize, step: F) -> Vec<FockVector<C>>
where
    C: Coefficient,
    F: Fn(i64, &FockVector<C>) -> FockVector<C>,
{
    let mut out = vec![v.clone()];
    for s in 1..=terms {
        let mut w = FockVector::zero(v.weight.clone(), v.max_level);
        for n in 1..=s {
            let t = step(n as i64, &out[s - n]);
            w.add_scaled(&t, &Rational::one());
        }
        out.push(w.scaled(&rat(1, s as i64)));
    }
    out
}

impl ModeAlgebra {
    /// `Y(p, z)` applied to `v`, as `(z-shift, vector)` pairs, truncated at
    /// the level bound of `v`.
    fn insertion_terms<C: Coefficient>(
        &self,
        p: &Insertion,
        v: &FockVector<C>,
    ) -> Vec<(i64, FockVector<C>)> {
        let lv = v.top_level() as i64;
        let room = v.max_level as i64;
        match p {
            Insertion::Vacuum => vec![(0, v.clone())],
            Insertion::Current(a) | Insertion::Derivative(a) => {
                let derivative = matches!(p, Insertion::Derivative(_));
                (-room..=lv)
                    .map(|n| {
                        let w = self.direction_mode_truncated(a, n, v);
                        if derivative {
                            (-n - 2, w.scaled(&rat(-n - 1, 1)))
                        } else {
                            (-n - 1, w)
                        }
                    })
                    .filter(|(_, w)| !w.is_empty())
                    .collect()
            }
            Insertion::Product(a, b) => {
                let mut out = Vec::new();
                for n in -room..=lv {
                    for m in -room..=lv {
                        // Normal order: the positive mode acts first.
                        let w = if n > 0 {
                            let first = self.direction_mode_truncated(a, n, v);
                            self.direction_mode_truncated(b, m, &first)
                        } else {
                            let first = self.direction_mode_truncated(b, m, v);
                            self.direction_mode_truncated(a, n, &first)
                        };
                        if !w.is_empty() {
                            out.push((-n - m - 2, w));
                        }
                    }
                }
                out
            }
        }
    }

    /// `I(p|μ⟩, z) v = z^{⟨μ,ν⟩} e^μ E^−(μ,z) Y(p,z) E^+(μ,z) v`, keeping
    /// output levels `≤ max_level`.
    pub fn apply_vertex<C: Coefficient>(
        &self,
        p: &Insertion,
        mu: &[Rational],
        v: &FockVector<C>,
        max_level: u32,
    ) -> ZSeries<C> {
        let nu = v.weight.clone();
        let out_weight = add(mu, &nu);
        let base: Rational = (0..self.dim())
            .map(|i| &mu[i] * self.pair_with_basis(i, &nu))
            .sum();
        let input = v.clone().with_max_level(max_level.max(v.max_level));
        let lv = input.top_level() as usize;
        let minus_mu = neg(mu);
        let plus_terms = exponential_series(&input, lv, |n, w| {
            self.direction_mode_truncated(&minus_mu, n, w)
        });
        let mut series = ZSeries {
            base,
            weight: out_weight.clone(),
            coeffs: BTreeMap::new(),
        };
        for (s, w) in plus_terms.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let w = w.clone().with_max_level(max_level);
            for (shift, x) in self.insertion_terms(p, &w) {
                let x_level = x.top_level();
                let room = max_level.saturating_sub(
                    x.terms
                        .keys()
                        .map(FockMonomial::level)
                        .min()
                        .unwrap_or(x_level),
                ) as usize;
                let minus_terms =
                    exponential_series(&x, room, |n, y| self.direction_mode_truncated(mu, -n, y));
                for (t, y) in minus_terms.into_iter().enumerate() {
                    if y.is_empty() {
                        continue;
                    }
                    let moved = FockVector {
                        weight: out_weight.clone(),
                        max_level,
                        terms: y.terms,
                    };
                    series.add_at(t as i64 - s as i64 + shift, &moved, max_level);
                }
            }
        }
        series
    }
}

/// A vertex operator `I_{μ,ν}(p|μ⟩, z)` tabulated on the basis monomials
/// of `F_ν` up to `input_level`.
#[derive(Clone, Debug)]
pub struct TruncatedVertexOperator {
    pub insertion: Insertion,
    pub mu: QVec,
    pub nu: QVec,
    pub max_level: u32,
    pub columns: BTreeMap<FockMonomial, ZSeries>,
}

impl TruncatedVertexOperator {
    /// Lowest z-exponent `⟨μ, ν⟩` of the operator on `F_ν`.
    pub fn base_exponent(&self, data: &BosonicLatticeData) -> Rational {
        data.pair(&self.mu, &self.nu)
    }

    pub fn column(&self, m: &FockMonomial) -> Option<&ZSeries> {
        self.columns.get(m)
    }
}

pub fn vertex_operator(
    data: &BosonicLatticeData,
    insertion: Insertion,
    mu: &[Rational],
    nu: &[Rational],
    input_level: u32,
    max_level: u32,
) -> Result<TruncatedVertexOperator, FockError> {
    if mu.len() != data.dim() || nu.len() != data.dim() {
        return Err(FockError::ShapeMismatch("weights must lie in 𝔥".into()));
    }
    if input_level > max_level {
        return Err(FockError::LevelOverflow {
            level: input_level,
            max_level,
        });
    }
    let alg = ModeAlgebra::new(data);
    let mut columns = BTreeMap::new();
    for d in 0..=input_level {
        for mono in basis_monomials(data.dim(), d) {
            let v = FockVector::monomial(nu.to_vec(), max_level, mono.clone(), Rational::one())?;
            columns.insert(mono, alg.apply_vertex(&insertion, mu, &v, max_level));
        }
    }
    Ok(TruncatedVertexOperator {
        insertion,
        mu: mu.to_vec(),
        nu: nu.to_vec(),
        max_level,
        columns,
    })
}

/// Cocycle prefactor `(−1)^{⟨s(a), α₂⟩} ε(α₁, α₂) ε(α₁+α₂, k(a, b))` of the
/// intertwiner between the summands `F_{s(a)+α₁}` and `F_{s(b)+α₂}`.
pub fn intertwiner_prefactor(
    cat: &GVCategory,
    a: &Coset,
    b: &Coset,
    alpha1: &[Rational],
    alpha2: &[Rational],
) -> Phase {
    let data = cat.data();
    let k = data.k_cocycle(a, b);
    let eps = cat.epsilon();
    Phase::new(data.pair(a.rep(), alpha2))
        * eps.eval(alpha1, alpha2)
        * eps.eval(&add(alpha1, alpha2), &k)
}

/// The lattice intertwiner restricted to one pair of Fock summands.
pub struct LatticeIntertwiner {
    pub prefactor: Phase,
    pub operator: TruncatedVertexOperator,
}

pub fn lattice_intertwiner(
    cat: &GVCategory,
    a: &Coset,
    b: &Coset,
    alpha1: &[Rational],
    alpha2: &[Rational],
    input_level: u32,
    max_level: u32,
) -> Result<LatticeIntertwiner, FockError> {
    let data = cat.data();
    if !data.in_lattice(alpha1) || !data.in_lattice(alpha2) {
        return Err(FockError::ShapeMismatch(
            "summand shifts must be lattice vectors".into(),
        ));
    }
    let mu = add(a.rep(), alpha1);
    let nu = add(b.rep(), alpha2);
    Ok(LatticeIntertwiner {
        prefactor: intertwiner_prefactor(cat, a, b, alpha1, alpha2),
        operator: vertex_operator(data, Insertion::Vacuum, &mu, &nu, input_level, max_level)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewReport {
    pub labels: [Coset; 2],
    pub extracted: Option<Phase>,
    pub braiding: Phase,
    pub pass: bool,
    pub checked_coefficients: usize,
    pub witness: Option<String>,
}

/// Compares `e^{zL₋₁} 𝒴_{b,a}(w, e^{iπ}z) u` with `Ω · 𝒴_{a,b}(u, z) w`
/// coefficientwise for highest-weight `u, w` drawn from several summand
/// pairs. The phase is extracted from the lowest coefficient of the first
/// pair and must match every coefficient of every pair.
pub fn check_skew_symmetry(
    cat: &GVCategory,
    a: &Coset,
    b: &Coset,
    max_level: u32,
) -> Result<SkewReport, FockError> {
    let data = cat.data();
    let alg = ModeAlgebra::new(data);
    let n = data.dim();
    let mut shifts: Vec<QVec> = vec![vec![Rational::zero(); n]];
    shifts.extend(data.lattice_basis().iter().cloned());
    if let Some(b0) = data.lattice_basis().first() {
        shifts.push(neg(b0));
    }
    let braiding = cat.braiding_unchecked(a, b);
    let mut extracted: Option<Phase> = None;
    let mut checked = 0;
    let fail = |extracted: Option<Phase>, checked, witness: String| SkewReport {
        labels: [a.clone(), b.clone()],
        extracted,
        braiding: braiding.clone(),
        pass: false,
        checked_coefficients: checked,
        witness: Some(witness),
    };
    for alpha1 in &shifts {
        for alpha2 in &shifts {
            let u_weight = add(a.rep(), alpha1);
            let w_weight = add(b.rep(), alpha2);
            let pf_ab = intertwiner_prefactor(cat, a, b, alpha1, alpha2);
            let pf_ba = intertwiner_prefactor(cat, b, a, alpha2, alpha1);
            let u = FockVector::<Rational>::highest(u_weight.clone(), max_level);
            let w = FockVector::<Rational>::highest(w_weight.clone(), max_level);
            let forward = alg.apply_vertex(&Insertion::Vacuum, &u_weight, &w, max_level);
            let backward = alg.apply_vertex(&Insertion::Vacuum, &w_weight, &u, max_level);
            let e = forward.base.clone();
            let lift = |v: &FockVector| v.map_coefficients(|c| Scalar::from_rational(c.clone()));
            // L₋₁^k on each backward coefficient, with 1/k! folded in.
            let mut powers: Vec<Vec<FockVector<Scalar>>> = Vec::new();
            for jj in 0..=max_level as i64 {
                let mut chain = vec![lift(&backward.coefficient(jj))];
                for k in 1..=(max_level as i64 - jj) {
                    let prev = chain.last().expect("nonempty");
                    let next = alg.virasoro_mode(-1, prev)?.scaled(&rat(1, k));
                    chain.push(next);
                }
                powers.push(chain);
            }
            for big_j in 0..=max_level as i64 {
                let mut lhs = FockVector::<Scalar>::zero(forward.weight.clone(), max_level);
                for k in 0..=big_j {
                    let jj = big_j - k;
                    let term = powers[jj as usize][k as usize]
                        .mul_phase(&(Phase::new(&e + rat(jj, 1)) * &pf_ba));
                    lhs.add_scaled(&term, &Rational::one());
                }
                let rhs_base = lift(&forward.coefficient(big_j)).mul_phase(&pf_ab);
                if big_j == 0 && extracted.is_none() {
                    let l0 = lhs.coefficient(&FockMonomial::vacuum());
                    let r0 = rhs_base.coefficient(&FockMonomial::vacuum());
                    match l0.ratio(&r0) {
                        Some((p, c)) if c.is_one() => extracted = Some(p),
                        Some((p, c)) if (-&c).is_one() => extracted = Some(p * Phase::minus_one()),
                        _ => {
                            return Ok(fail(
                                None,
                                checked,
                                "leading coefficients are not proportional by a phase".into(),
                            ))
                        }
                    }
                }
                let omega = extracted.clone().expect("set at J = 0");
                checked += 1;
                if !lhs.equals(&rhs_base.mul_phase(&omega))? {
                    return Ok(fail(
                        extracted,
                        checked,
                        format!(
                            "z-power offset {big_j} with shifts {:?}, {:?}",
                            vector_strings(alpha1),
                            vector_strings(alpha2)
                        ),
                    ));
                }
            }
        }
    }
    let pass = extracted.as_ref() == Some(&braiding);
    Ok(SkewReport {
        labels: [a.clone(), b.clone()],
        extracted,
        braiding,
        pass,
        checked_coefficients: checked,
        witness: if pass {
            None
        } else {
            Some("extracted phase differs from the braiding".into())
        },
    })
}

/// Wynn's epsilon algorithm on a sequence of partial sums; returns the
/// last two estimates from the highest even column reached.
pub fn wynn_epsilon(partials: &[f64]) -> [f64; 2] {
    let n = partials.len();
    if n < 3 {
        let last = partials.last().copied().unwrap_or(0.0);
        let prev = if n >= 2 { partials[n - 2] } else { last };
        return [prev, last];
    }
    // table[k] holds column k; column 0 is the input.
    let mut prev_col: Vec<f64> = vec![0.0; n + 1];
    let mut col: Vec<f64> = partials.to_vec();
    let mut best = [partials[n - 2], partials[n - 1]];
    let mut k = 0;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let diff = col[i + 1] - col[i];
            let inv = if diff.abs() < 1e-300 {
                f64::INFINITY
            } else {
                1.0 / diff
            };
            next.push(prev_col[i + 1] + inv);
        }
        prev_col = col;
        col = next;
        k += 1;
        if k % 2 == 0 && col.len() >= 2 && col.iter().all(|x| x.is_finite()) {
            best = [col[col.len() - 2], col[col.len() - 1]];
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociativityReport {
    pub labels: [Coset; 3],
    pub associator: Phase,
    pub ratio: f64,
    pub error: f64,
    pub last_partial_ratios: [f64; 2],
    pub max_level: u32,
    pub pass: bool,
}

/// Numeric comparison of products and iterates of intertwiners on
/// highest-weight vectors at `x₁ > x₂ > x₁ − x₂ > 0`, projected onto the
/// highest-weight vector of the target. Partial sums over intermediate
/// levels are accelerated with Wynn's epsilon algorithm.
pub fn check_associativity_numeric(
    cat: &GVCategory,
    a: &Coset,
    b: &Coset,
    c: &Coset,
    x1: &Rational,
    x2: &Rational,
    max_level: u32,
    tol: f64,
) -> Result<AssociativityReport, FockError> {
    let data = cat.data();
    let x0 = x1 - x2;
    if !(x2 > &Rational::zero() && x0 > Rational::zero() && x1 > x2 && x2 > &x0) {
        return Err(FockError::ShapeMismatch(
            "need x1 > x2 > x1 - x2 > 0".into(),
        ));
    }
    let alg = ModeAlgebra::new(data);
    let (sa, sb, sc) = (a.rep().to_vec(), b.rep().to_vec(), c.rep().to_vec());
    let zero = vec![Rational::zero(); data.dim()];
    let ab = cat.fuse_unchecked(a, b);
    let bc = cat.fuse_unchecked(b, c);

    // Product side: 𝒴_{a,b+c}(u, x₁) 𝒴_{b,c}(v, x₂) w.
    let shift_bc = neg(&data.k_cocycle(b, c));
    let pf_product = intertwiner_prefactor(cat, b, c, &zero, &zero)
        * intertwiner_prefactor(cat, a, &bc, &zero, &shift_bc);
    let inner = alg.apply_vertex(
        &Insertion::Vacuum,
        &sb,
        &FockVector::<Rational>::highest(sc.clone(), max_level),
        max_level,
    );
    let (fx0, fx1, fx2) = (to_f64(&x0), to_f64(x1), to_f64(x2));
    let pair_f = |u: &[Rational], v: &[Rational]| to_f64(&data.pair(u, v));
    let e23 = pair_f(&sb, &sc);
    let e1_23 = pair_f(&sa, &add(&sb, &sc));
    let top_functional = |v: &FockVector, weight: &[Rational]| -> f64 {
        // ⟨top| E^+(μ, x) on a monomial: ∏ (−⟨μ, e_i⟩), the x^{−level}
        // factor is applied by the caller.
        v.terms()
            .map(|(m, coeff)| {
                let prod: Rational = m
                    .modes()
                    .iter()
                    .map(|&(i, _)| -data.pair(weight, &crate::linalg::unit_vec(data.dim(), i)))
                    .fold(Rational::one(), |acc, t| acc * t);
                to_f64(&(prod * coeff))
            })
            .sum()
    };
    let mut product_partials = Vec::new();
    let mut acc = 0.0;
    for j in 0..=max_level as i64 {
        let vj = inner.coefficient(j);
        let term = fx2.powf(e23 + j as f64) * fx1.powf(e1_23 - j as f64) * top_functional(&vj, &sa);
        acc += term;
        product_partials.push(acc);
    }

    // Iterate side: 𝒴_{a+b,c}(𝒴_{a,b}(u, x₀) v, x₂) w.
    let shift_ab = neg(&data.k_cocycle(a, b));
    let pf_iterate = intertwiner_prefactor(cat, a, b, &zero, &zero)
        * intertwiner_prefactor(cat, &ab, c, &shift_ab, &zero);
    let first = alg.apply_vertex(
        &Insertion::Vacuum,
        &sa,
        &FockVector::<Rational>::highest(sb.clone(), max_level),
        max_level,
    );
    let e12 = pair_f(&sa, &sb);
    let e12_3 = pair_f(&add(&sa, &sb), &sc);
    // ⟨top| Y(p e^λ, x) |μ₃⟩ keeps only zero modes: each (e_i)_{−m}
    // contributes (−1)^{m−1} ⟨e_i, μ₃⟩ x^{−m}.
    let zero_mode_functional = |v: &FockVector| -> f64 {
        v.terms()
            .map(|(m, coeff)| {
                let prod: Rational = m
                    .modes()
                    .iter()
                    .map(|&(i, mode)| {
                        let t = data.pair(&crate::linalg::unit_vec(data.dim(), i), &sc);
                        if mode % 2 == 0 {
                            -t
                        } else {
                            t
                        }
                    })
                    .fold(Rational::one(), |acc, t| acc * t);
                to_f64(&(prod * coeff))
            })
            .sum()
    };
    let mut iterate_partials = Vec::new();
    let mut acc = 0.0;
    for j in 0..=max_level as i64 {
        let uj = first.coefficient(j);
        let term =
            fx0.powf(e12 + j as f64) * fx2.powf(e12_3 - j as f64) * zero_mode_functional(&uj);
        acc += term;
        iterate_partials.push(acc);
    }

    let prefactor: Complex64 = (pf_iterate / pf_product).to_complex();
    let raw: Vec<f64> = iterate_partials
        .iter()
        .zip(&product_partials)
        .map(|(i, p)| i / p)
        .collect();
    let last_partial_ratios = [raw[raw.len().saturating_sub(2)], raw[raw.len() - 1]];
    let it = wynn_epsilon(&iterate_partials);
    let pr = wynn_epsilon(&product_partials);
    let estimates = [it[0] / pr[0], it[1] / pr[1]];
    let ratio_c = prefactor * estimates[1];
    let associator = cat.associator_unchecked(a, b, c);
    let error = (ratio_c - associator.to_complex()).norm();
    if (estimates[1] - estimates[0]).abs() > tol {
        return Err(FockError::ConvergenceNotReached {
            last: last_partial_ratios,
            tol,
        });
    }
    Ok(AssociativityReport {
        labels: [a.clone(), b.clone(), c.clone()],
        associator,
        ratio: ratio_c.re,
        error,
        last_partial_ratios,
        max_level,
        pass: error < tol,
    })
}

/// Weight of the contragredient of `F_ρ`, read off from the opposed field
/// of `α_{−1}|0⟩`: its zero mode is `−α₀ − (L₁ α_{−1}|0⟩)`, so `⟨α, ρ'⟩ =
/// −⟨α, ρ⟩ − c_α` where `L₁ α_{−1}|0⟩ = c_α |0⟩`.
pub fn contragredient_weight(data: &BosonicLatticeData, rho: &Coset) -> Result<Coset, FockError> {
    let alg = ModeAlgebra::new(data);
    let n = data.dim();
    let zero = vec![Rational::zero(); n];
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        let v = FockVector::<Rational>::monomial(
            zero.clone(),
            2,
            FockMonomial::new(vec![(i, 1)]),
            Rational::one(),
        )?;
        let l1 = alg.virasoro_mode(1, &v)?;
        let c = l1.coefficient(&FockMonomial::vacuum());
        let e = crate::linalg::unit_vec(n, i);
        rhs.push(-data.pair(&e, rho.rep()) - c);
    }
    // ⟨e_i, ρ'⟩ = rhs_i, i.e. G ρ' = rhs.
    let weight = data
        .space()
        .gram()
        .solve(&rhs)
        .ok_or_else(|| FockError::ShapeMismatch("singular form".into()))?;
    data.coset(&weight)
        .map_err(|e| FockError::ShapeMismatch(e.to_string()))
}

/// `h_λ = ½⟨λ, λ − 2γ⟩` computed by acting with `L₀` on `|λ⟩`.
pub fn conformal_weight(
    data: &BosonicLatticeData,
    weight: &[Rational],
) -> Result<Rational, FockError> {
    let alg = ModeAlgebra::new(data);
    let v = FockVector::<Rational>::highest(weight.to_vec(), 0);
    Ok(alg
        .virasoro_mode(0, &v)?
        .coefficient(&FockMonomial::vacuum()))
}
