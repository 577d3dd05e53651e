//! Characters of lattice modules as q-series, their factorization along the
//! dual-lattice decomposition, T-phases, the finite S-matrix and Verlinde
//! multiplicities.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::exec::Exec;
use crate::gvcat::GVCategory;
use crate::io::vector_strings;
use crate::lattice::{BilinearSpace, BosonicLatticeData, Coset, LatticeError};
use crate::linalg::{add, combine, sub, QMatrix, QVec};
use crate::scalar::{eta_inverse_series, format_rational, rat, to_f64, Phase, QSeries, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModularError {
    #[error("NonDiscreteCharacter: {0}; see character_factorize for the symbolic form")]
    NonDiscreteCharacter(String),
    #[error("InfiniteDiscriminant: the S-matrix needs a finite discriminant group")]
    InfiniteDiscriminant,
    #[error("ConvergenceNotReached: tail bound {tail:e} exceeds tolerance {tol:e}")]
    ConvergenceNotReached { tail: f64, tol: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl ModularError {
    pub fn name(&self) -> &'static str {
        match self {
            ModularError::NonDiscreteCharacter(_) => "NonDiscreteCharacter",
            ModularError::InfiniteDiscriminant => "InfiniteDiscriminant",
            ModularError::ConvergenceNotReached { .. } => "ConvergenceNotReached",
            ModularError::Lattice(e) => e.name(),
        }
    }
}

/// Leading principal minors all positive.
pub fn is_positive_definite(gram: &QMatrix) -> bool {
    let n = gram.nrows();
    (1..=n).all(|k| {
        let rows: Vec<QVec> = (0..k).map(|i| gram.row(i)[..k].to_vec()).collect();
        QMatrix::from_rows(&rows, k).det().is_positive()
    })
}

/// Lattice points `λ = Σ l_i b_i` with `½‖x + λ‖² ≤ bound`, returned with
/// that value. The basis must have a positive-definite Gram matrix.
pub(crate) fn lattice_points_below(
    space: &BilinearSpace,
    basis: &[QVec],
    x: &[Rational],
    bound: &Rational,
) -> Vec<(Rational, QVec)> {
    let n = space.dim();
    let r = basis.len();
    let half_norm = |v: &[Rational]| space.pair(v, v) * rat(1, 2);
    if r == 0 {
        let e = half_norm(x);
        return if &e <= bound {
            vec![(e, x.to_vec())]
        } else {
            Vec::new()
        };
    }
    let gram = space.gram_of(basis);
    let ginv = gram.inverse().expect("positive definite");
    let pairings: QVec = basis.iter().map(|b| space.pair(x, b)).collect();
    let centre: QVec = ginv.mul_vec(&pairings).into_iter().map(|c| -c).collect();
    // ‖x + λ‖² = ‖x_⊥‖² + (l − l*)ᵀ G (l − l*)
    let shift = combine(&centre, basis, n);
    let floor_norm = space.norm(&add(x, &shift));
    let room = bound * rat(2, 1) - &floor_norm;
    if room.is_negative() {
        return Vec::new();
    }
    let room_f = to_f64(&room);
    let ranges: Vec<(i64, i64)> = (0..r)
        .map(|i| {
            let c = to_f64(&centre[i]);
            let w = (room_f * to_f64(&ginv[(i, i)])).sqrt() + 1e-9;
            ((c - w).ceil() as i64, (c + w).floor() as i64)
        })
        .collect();
    let mut out = Vec::new();
    let mut l: Vec<i64> = ranges.iter().map(|&(lo, _)| lo).collect();
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return out;
    }
    loop {
        let coeffs: QVec = l.iter().map(|&k| rat(k, 1)).collect();
        let y = add(x, &combine(&coeffs, basis, n));
        let e = half_norm(&y);
        if &e <= bound {
            out.push((e, y));
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            l[i] += 1;
            if l[i] <= ranges[i].1 {
                break;
            }
            l[i] = ranges[i].0;
        }
    }
}

fn shifted_rep(data: &BosonicLatticeData, gamma: &Coset) -> QVec {
    sub(gamma.rep(), data.ff_rep())
}

fn lattice_gram(data: &BosonicLatticeData) -> QMatrix {
    data.space().gram_of(data.lattice_basis())
}

/// Theta series `Σ_{λ} q^{½‖x+λ‖²}` over a positive-definite lattice,
/// truncated below `order`.
fn theta_series(
    space: &BilinearSpace,
    basis: &[QVec],
    x: &[Rational],
    order: &Rational,
) -> QSeries {
    let offset = space.norm(x) * rat(1, 2);
    let points = lattice_points_below(space, basis, x, order);
    let terms = points
        .into_iter()
        .filter(|(e, _)| e < order)
        .map(|(e, _)| (e, Rational::from_integer(1.into())));
    QSeries::from_terms(offset, 1, order.clone(), terms)
        .expect("even lattice keeps exponents on one class")
}

/// `θ(q) η(q)^{-k}` known below `order`; `θ` must be known below
/// `order + k/24`.
fn over_eta(theta: QSeries, k: u32, order: &Rational) -> QSeries {
    let eta_order = order - theta.valuation();
    let eta = eta_inverse_series(k, &eta_order);
    theta.mul(&eta).truncate(order)
}

/// `χ_γ = Σ_{λ∈Λ} q^{½‖s(γ)+λ−β̃‖²} η^{−dim 𝔥}`, exactly, below `order`.
pub fn character_qseries(
    data: &BosonicLatticeData,
    gamma: &Coset,
    order: &Rational,
) -> Result<QSeries, ModularError> {
    if !data.decomposition().null_basis.is_empty() {
        return Err(ModularError::NonDiscreteCharacter(
            "the lattice has isotropic directions, so each exponent has infinite multiplicity"
                .into(),
        ));
    }
    if !is_positive_definite(&lattice_gram(data)) {
        return Err(ModularError::NonDiscreteCharacter(
            "the form is not positive definite on the lattice".into(),
        ));
    }
    let n = data.dim() as u32;
    let shift = rat(n as i64, 24);
    let x = shifted_rep(data, gamma);
    let theta = theta_series(data.space(), data.lattice_basis(), &x, &(order + &shift));
    Ok(over_eta(theta, n, order))
}

#[derive(Clone, Debug, Serialize)]
pub struct VPart {
    pub weight: Vec<String>,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub exponent: Rational,
    pub eta_power: u32,
}

/// Symbolic record of the isotropic factor: a q-power, an η-power and a
/// sum of δ-distributions on `F` supported where `ζ_F + τ(γ_F − β_F) ∈ F`,
/// each weighted by `e^{2πi⟨γ_∘, f⟩}`.
#[derive(Clone, Debug, Serialize)]
pub struct CircPart {
    pub rank: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub prefactor_exponent: Rational,
    pub eta_power: u32,
    pub f_shift: Vec<String>,
    pub circ_component: Vec<String>,
    pub support: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterDescriptor {
    pub label: Coset,
    pub v_part: VPart,
    pub circ_part: CircPart,
    pub d_part: Option<QSeries>,
    pub assembled: Option<QSeries>,
}

/// The three factors of `χ_γ` attached to `V`, `span N ⊕ F` and `D`.
pub fn character_factorize(
    data: &BosonicLatticeData,
    gamma: &Coset,
    order: &Rational,
) -> CharacterDescriptor {
    let [gv, gc, gf, gd] = data.components(gamma.rep());
    let [bv, bc, bf, bd] = data.components(data.ff_rep());
    let space = data.space();
    let dec = data.decomposition();
    let xv = sub(&gv, &bv);
    let v_exponent = space.norm(&xv) * rat(1, 2);
    let dim_v = dec.v_basis.len() as u32;
    let rank_n = dec.null_basis.len();
    let f_shift = sub(&gf, &bf);
    let circ_part = CircPart {
        rank: rank_n,
        prefactor_exponent: space.pair(&bc, &sub(&bf, &gf)),
        eta_power: 2 * rank_n as u32,
        f_shift: vector_strings(&f_shift),
        circ_component: vector_strings(&gc),
        support: if rank_n == 0 { "none" } else { "delta_F" },
    };
    let xd = sub(&gd, &bd);
    let rank_d = dec.d_basis.len() as u32;
    let complement = &dec.complement_basis;
    let d_part = is_positive_definite(&space.gram_of(complement)).then(|| {
        let d_order = order - &v_exponent + rat(dim_v as i64, 24);
        let theta = theta_series(space, complement, &xd, &(&d_order + rat(rank_d as i64, 24)));
        over_eta(theta, rank_d, &d_order)
    });
    let assembled = match (&d_part, rank_n) {
        (Some(d), 0) => {
            let v_order = order - d.valuation();
            let v_series = QSeries::from_terms(
                v_exponent.clone(),
                1,
                &v_order + rat(dim_v as i64, 24),
                [(v_exponent.clone(), Rational::from_integer(1.into()))],
            )
            .expect("single term");
            let v_series = over_eta(v_series, dim_v, &v_order);
            Some(v_series.mul(d).truncate(order))
        }
        _ => None,
    };
    CharacterDescriptor {
        label: gamma.clone(),
        v_part: VPart {
            weight: vector_strings(&xv),
            exponent: v_exponent,
            eta_power: dim_v,
        },
        circ_part,
        d_part,
        assembled,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TConvention {
    /// `e^{iπ⟨γ−ξ, γ−ξ⟩}`.
    Paper,
    /// The `Paper` phase times `e^{−iπ dim 𝔥 / 12}` from `η(τ+1)^{−dim 𝔥}`.
    Derived,
}

pub fn t_phase(data: &BosonicLatticeData, gamma: &Coset, convention: TConvention) -> Phase {
    let x = shifted_rep(data, gamma);
    let paper = Phase::new(data.space().norm(&x));
    match convention {
        TConvention::Paper => paper,
        TConvention::Derived => paper * Phase::new(rat(-(data.dim() as i64), 12)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TermwiseTReport {
    pub label: Coset,
    pub order: String,
    pub terms: usize,
    pub derived_matches: bool,
    pub paper_matches: bool,
    pub paper_discrepancy: Phase,
}

/// Applies `τ ↦ τ+1` to each term of `χ_γ` and compares with both
/// conventions for the T-phase.
pub fn check_t_termwise(
    data: &BosonicLatticeData,
    gamma: &Coset,
    order: &Rational,
) -> Result<TermwiseTReport, ModularError> {
    let chi = character_qseries(data, gamma, order)?;
    let derived = t_phase(data, gamma, TConvention::Derived);
    let paper = t_phase(data, gamma, TConvention::Paper);
    let phases: Vec<Phase> = chi
        .terms()
        .map(|(e, _)| Phase::new(e * rat(2, 1)))
        .collect();
    Ok(TermwiseTReport {
        label: gamma.clone(),
        order: format_rational(order),
        terms: phases.len(),
        derived_matches: phases.iter().all(|p| p == &derived),
        paper_matches: phases.iter().all(|p| p == &paper),
        paper_discrepancy: derived / paper,
    })
}

/// `S_{γμ} = e^{−2πi⟨s(γ)−β̃, s(μ)−β̃⟩} / √|G|` over the discriminant group.
#[derive(Clone, Debug, Serialize)]
pub struct SMatrix {
    pub labels: Vec<Coset>,
    pub entries: Vec<Vec<Phase>>,
    pub group_order: usize,
}

impl SMatrix {
    pub fn prefactor(&self) -> f64 {
        1.0 / (self.group_order as f64).sqrt()
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j].to_complex() * self.prefactor()
    }

    pub fn index_of(&self, label: &Coset) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.labels.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// `max |(S S̄ᵀ − 1)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.labels.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: Complex64 = (0..n)
                    .map(|k| self.value(i, k) * self.value(j, k).conj())
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Numeric `S²`.
    pub fn squared(&self) -> Vec<Vec<Complex64>> {
        let n = self.labels.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.value(i, k) * self.value(k, j)).sum())
                    .collect()
            })
            .collect()
    }
}

pub fn s_matrix(data: &BosonicLatticeData) -> Result<SMatrix, ModularError> {
    let labels = data
        .discriminant_enumerate()
        .map_err(|_| ModularError::InfiniteDiscriminant)?;
    let shifted: Vec<QVec> = labels.iter().map(|l| shifted_rep(data, l)).collect();
    let entries = shifted
        .iter()
        .map(|x| {
            shifted
                .iter()
                .map(|y| Phase::new(data.pair(x, y) * rat(-2, 1)))
                .collect()
        })
        .collect();
    Ok(SMatrix {
        group_order: labels.len(),
        labels,
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SSquaredReport {
    /// `γ ↦ μ` where `(S²)_{γμ}` is the unique entry of modulus one.
    pub permutation: Vec<(Coset, Coset)>,
    /// Phase of each such entry.
    pub phases: Vec<f64>,
    pub max_off_support: f64,
    pub matches_dual_object: bool,
    pub is_involution: bool,
}

/// Measures the label permutation induced by `S²`.
pub fn s_squared_permutation(cat: &GVCategory) -> Result<SSquaredReport, ModularError> {
    let s = s_matrix(cat.data())?;
    let sq = s.squared();
    let n = s.labels.len();
    let mut permutation = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut max_off: f64 = 0.0;
    let mut image = Vec::with_capacity(n);
    for (i, row) in sq.iter().enumerate() {
        let (j, best) = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("nonempty");
        for (k, v) in row.iter().enumerate() {
            if k != j {
                max_off = max_off.max(v.norm());
            }
        }
        phases.push(best.arg() / PI);
        permutation.push((s.labels[i].clone(), s.labels[j].clone()));
        image.push(j);
    }
    let matches_dual_object = permutation.iter().all(|(a, b)| &cat.dual_object(a) == b);
    let is_involution = (0..n).all(|i| image[image[i]] == i);
    Ok(SSquaredReport {
        permutation,
        phases,
        max_off_support: max_off,
        matches_dual_object,
        is_involution,
    })
}

/// `η(it)` by its product formula.
fn eta_imaginary(t: f64) -> f64 {
    let q = (-2.0 * PI * t).exp();
    let mut acc = (-2.0 * PI * t / 24.0).exp();
    let mut qk = q;
    while qk > 1e-18 {
        acc *= 1.0 - qk;
        qk *= q;
    }
    acc
}

fn character_at(data: &BosonicLatticeData, gamma: &Coset, t: f64, bound: &Rational) -> f64 {
    let x = shifted_rep(data, gamma);
    let mut values: Vec<f64> = lattice_points_below(data.space(), data.lattice_basis(), &x, bound)
        .into_iter()
        .map(|(e, _)| (-2.0 * PI * t * to_f64(&e)).exp())
        .collect();
    // Fixed summation order keeps reports reproducible.
    values.sort_by(|a, b| a.total_cmp(b));
    values.iter().sum::<f64>() / eta_imaginary(t).powi(data.dim() as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct SCheckReport {
    pub t: f64,
    pub radius: f64,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `χ_γ(i/t)` with `Σ_μ S_{γμ} χ_μ(it)` by direct lattice sums
/// over `½‖·‖² ≤ radius²`.
pub fn verify_s_numeric(
    data: &BosonicLatticeData,
    t: f64,
    radius: Option<f64>,
    tol: f64,
) -> Result<SCheckReport, ModularError> {
    if !data.decomposition().null_basis.is_empty() || !is_positive_definite(&lattice_gram(data)) {
        return Err(ModularError::NonDiscreteCharacter(
            "numeric S check needs a positive-definite lattice".into(),
        ));
    }
    let s = s_matrix(data)?;
    let t_min = t.min(1.0 / t);
    let radius = radius.unwrap_or_else(|| (45.0 / (2.0 * PI * t_min)).sqrt().ceil());
    let bound = Rational::from_integer(BigInt::from((radius * radius).ceil() as i64));
    // Each omitted term is below e^{−2π t_min R²}; the number of shells
    // grows polynomially, which this generous factor covers.
    let tail = (-2.0 * PI * t_min * radius * radius).exp() * 1e3;
    if tail > tol {
        return Err(ModularError::ConvergenceNotReached { tail, tol });
    }
    let exec = Exec::default();
    let at_t = exec.map(&s.labels, |l| character_at(data, l, t, &bound));
    let at_inv = exec.map(&s.labels, |l| character_at(data, l, 1.0 / t, &bound));
    let deviations: Vec<f64> = (0..s.labels.len())
        .map(|i| {
            let rhs: Complex64 = (0..s.labels.len()).map(|j| s.value(i, j) * at_t[j]).sum();
            (rhs - at_inv[i]).norm()
        })
        .collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(SCheckReport {
        t,
        radius,
        deviations,
        max_deviation,
        tol,
        pass: max_deviation < tol,
    })
}

/// `Σ_κ S_{λκ} S_{μκ} S̄_{ρκ} / S_{0κ}`.
pub fn verlinde(
    data: &BosonicLatticeData,
    lambda: &Coset,
    mu: &Coset,
    rho: &Coset,
) -> Result<Complex64, ModularError> {
    let s = s_matrix(data)?;
    let idx = |c: &Coset| {
        s.index_of(c).ok_or_else(|| {
            ModularError::Lattice(LatticeError::ShapeMismatch(format!(
                "label {c} is not in the group"
            )))
        })
    };
    let (l, m, r) = (idx(lambda)?, idx(mu)?, idx(rho)?);
    let unit = idx(&data.zero_coset())?;
    Ok((0..s.labels.len())
        .map(|k| s.value(l, k) * s.value(m, k) * s.value(r, k).conj() / s.value(unit, k))
        .sum())
}

/// All `N_{λμ}^ρ` at once, keyed by label indices.
pub fn verlinde_table(
    data: &BosonicLatticeData,
) -> Result<(Vec<Coset>, BTreeMap<(usize, usize, usize), Complex64>), ModularError> {
    let s = s_matrix(data)?;
    let n = s.labels.len();
    let unit = s.index_of(&data.zero_coset()).expect("zero is a label");
    let mut table = BTreeMap::new();
    for l in 0..n {
        for m in 0..n {
            for r in 0..n {
                let v: Complex64 = (0..n)
                    .map(|k| {
                        s.value(l, k) * s.value(m, k) * s.value(r, k).conj() / s.value(unit, k)
                    })
                    .sum();
                table.insert((l, m, r), v);
            }
        }
    }
    Ok((s.labels, table))
}

/// Number of summation points used for a bound, for diagnostics.
pub fn lattice_point_count(data: &BosonicLatticeData, gamma: &Coset, bound: &Rational) -> usize {
    let x = shifted_rep(data, gamma);
    lattice_points_below(data.space(), data.lattice_basis(), &x, bound).len()
}
