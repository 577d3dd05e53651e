//! Simple-current extensions `Λ₁ ⊂ Λ₂`: the algebra object on `Λ₂/Λ₁`,
//! its local modules and their comparison with the category of `Λ₂`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cocycle::{
    solve_sigma, verify_cocycle_fn, verify_sigma, CocycleError, CocycleReport, SigmaCochain,
    TwoCocycle,
};
use crate::gvcat::GVCategory;
use crate::lattice::{BosonicLatticeData, Coset, LatticeError};
use crate::linalg::{add, sub, QVec};
use crate::scalar::{Phase, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error("TwistNotTrivial: twist on support label {0} is not 1")]
    TwistNotTrivial(Coset),
    #[error("NotHaploid: the unit appears {0} times in the support")]
    NotHaploid(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl ExtensionError {
    pub fn name(&self) -> &'static str {
        match self {
            ExtensionError::Cocycle(e) => e.name(),
            ExtensionError::TwistNotTrivial(_) => "TwistNotTrivial",
            ExtensionError::NotHaploid(_) => "NotHaploid",
            ExtensionError::Lattice(e) => e.name(),
        }
    }
}

/// `A = ⊕_{λ ∈ Λ₂/Λ₁} ℂ_λ` with multiplication twisted by `σ`.
#[derive(Clone, Debug)]
pub struct ExtensionAlgebra {
    base: GVCategory,
    target: BosonicLatticeData,
    sigma: SigmaCochain,
}

impl ExtensionAlgebra {
    pub fn base(&self) -> &GVCategory {
        &self.base
    }

    pub fn target(&self) -> &BosonicLatticeData {
        &self.target
    }

    pub fn support(&self) -> &[Coset] {
        self.sigma.group()
    }

    pub fn sigma(&self) -> &SigmaCochain {
        &self.sigma
    }

    /// Multiplication `ℂ_λ ⊗ ℂ_μ → ℂ_{λ+μ}` as `(λ+μ, σ(λ, μ))`.
    pub fn multiply(&self, a: &Coset, b: &Coset) -> Option<(Coset, Phase)> {
        let i = self.sigma.index_of(a)?;
        let j = self.sigma.index_of(b)?;
        let k = self.sigma.sum_index(i, j);
        Some((
            self.sigma.group()[k].clone(),
            self.sigma.value(i, j).clone(),
        ))
    }
}

pub fn build_algebra(
    data1: &BosonicLatticeData,
    data2: &BosonicLatticeData,
) -> Result<ExtensionAlgebra, ExtensionError> {
    let sigma = solve_sigma(data1, data2)?;
    let base = GVCategory::new(data1.clone());
    let units = sigma.group().iter().filter(|c| c.is_zero()).count();
    if units != 1 {
        return Err(ExtensionError::NotHaploid(units));
    }
    if let Some(bad) = sigma.group().iter().find(|c| !base.twist(c).is_one()) {
        return Err(ExtensionError::TwistNotTrivial(bad.clone()));
    }
    Ok(ExtensionAlgebra {
        base,
        target: data2.clone(),
        sigma,
    })
}

/// One simple local module class: its `Λ₂*/Λ₂` label and the `Λ₁*/Λ₁`
/// labels of the induced module `A ⊗ ℂ_α`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalClass {
    pub label: Coset,
    pub induced: Vec<Coset>,
}

/// `α ∈ Λ₁*/Λ₁` is local when `⟨s₁(λ), s₁(α)⟩ ∈ ℤ` for every support label.
pub fn is_local(alg: &ExtensionAlgebra, alpha: &Coset) -> bool {
    let data1 = alg.base.data();
    alg.support()
        .iter()
        .all(|l| data1.pair(l.rep(), alpha.rep()).is_integer())
}

pub fn local_modules(alg: &ExtensionAlgebra) -> Result<Vec<LocalClass>, ExtensionError> {
    let data1 = alg.base.data();
    let labels = data1.discriminant_enumerate()?;
    let mut classes: BTreeMap<Coset, Vec<Coset>> = BTreeMap::new();
    for alpha in labels.into_iter().filter(|a| is_local(alg, a)) {
        let label = alg.target.coset(alpha.rep())?;
        classes.entry(label).or_default().push(alpha);
    }
    Ok(classes
        .into_iter()
        .map(|(label, induced)| LocalClass { label, induced })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceCheck {
    pub property: String,
    pub pass: bool,
    pub checked: usize,
    pub witness: Vec<Coset>,
}

impl EquivalenceCheck {
    fn new(property: &str) -> Self {
        EquivalenceCheck {
            property: property.into(),
            pass: true,
            checked: 0,
            witness: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, witness: &[&Coset]) {
        self.checked += 1;
        if !ok && self.pass {
            self.pass = false;
            self.witness = witness.iter().map(|c| (*c).clone()).collect();
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub local_classes: usize,
    pub target_labels: usize,
    pub checks: Vec<EquivalenceCheck>,
    pub sigma: CocycleReport,
    pub sigma_seed_exact: bool,
    pub field_cocycle: CocycleReport,
    /// Whether `τ` agrees with the standard `ε₂` on every compared pair.
    /// Reported only; the two may differ by a coboundary.
    pub field_matches_standard: bool,
    pub field_pairs_compared: usize,
}

impl EquivalenceReport {
    pub fn pass(&self) -> bool {
        self.local_classes == self.target_labels
            && self.checks.iter().all(|c| c.pass)
            && self.sigma.pass()
            && self.field_cocycle.pass()
    }
}

/// The normalization `τ(γ, δ)` on `Λ₂` induced by `ε₁` and `σ`:
/// `(−1)^{⟨s₁(γ), δ−s₁(δ)⟩} ε₁(γ−s₁(γ), δ−s₁(δ)) ε₁(Σ, k₁(γ, δ)) σ(γ, δ)`.
pub fn field_cocycle(alg: &ExtensionAlgebra, gamma: &[Rational], delta: &[Rational]) -> Phase {
    let data1 = alg.base.data();
    let eps1 = alg.base.epsilon();
    let cg = data1.coset(gamma).expect("Λ₂ lies in the dual of Λ₁");
    let cd = data1.coset(delta).expect("Λ₂ lies in the dual of Λ₁");
    let ag = sub(gamma, cg.rep());
    let ad = sub(delta, cd.rep());
    let k = data1.k_cocycle(&cg, &cd);
    let sigma = alg.sigma.get(&cg, &cd).expect("support label").clone();
    Phase::new(data1.pair(cg.rep(), &ad))
        * eps1.eval(&ag, &ad)
        * eps1.eval(&add(&ag, &ad), &k)
        * sigma
}

/// Compares the local-module category with the category of `Λ₂`:
/// quadratic form, twist, duals and fusion of classes, plus the σ and
/// field-normalization cocycle conditions.
pub fn verify_equivalence(
    alg: &ExtensionAlgebra,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport, ExtensionError> {
    let cat1 = &alg.base;
    let cat2 = GVCategory::new(alg.target.clone());
    let classes = local_modules(alg)?;
    let target_labels = alg.target.discriminant_enumerate()?.len();

    let mut q = EquivalenceCheck::new("quadratic_form");
    let mut theta = EquivalenceCheck::new("twist");
    let mut dual = EquivalenceCheck::new("dual");
    let mut fusion = EquivalenceCheck::new("fusion");
    let mut size = EquivalenceCheck::new("induced_size");
    let class_of = |c: &Coset| {
        alg.target
            .coset(c.rep())
            .expect("local labels lie in the dual of Λ₂")
    };
    for class in &classes {
        size.record(class.induced.len() == alg.support().len(), &[&class.label]);
        for alpha in &class.induced {
            q.record(
                cat1.quadratic_form(alpha) == cat2.quadratic_form(&class.label),
                &[alpha, &class.label],
            );
            theta.record(
                cat1.twist(alpha) == cat2.twist(&class.label),
                &[alpha, &class.label],
            );
            let d1 = class_of(&cat1.dual_object(alpha));
            dual.record(d1 == cat2.dual_object(&class.label), &[alpha, &class.label]);
        }
        for other in &classes {
            let (a, b) = (&class.induced[0], &other.induced[0]);
            let lhs = class_of(&cat1.fuse_unchecked(a, b));
            fusion.record(
                lhs == cat2.fuse_unchecked(&class.label, &other.label),
                &[&class.label, &other.label],
            );
        }
    }
    let mut unit = EquivalenceCheck::new("dualizing_object");
    unit.record(
        class_of(&cat1.dualizing_object()) == cat2.dualizing_object(),
        &[&cat2.dualizing_object()],
    );

    let field = verify_cocycle_fn(&alg.target, |g, d| field_cocycle(alg, g, d), samples, seed);
    let eps2 = TwoCocycle::standard(&alg.target);
    let grid = small_combinations(alg.target.lattice_basis(), 81);
    let mut field_matches_standard = true;
    for g in &grid {
        for d in &grid {
            field_matches_standard &= field_cocycle(alg, g, d) == eps2.eval(g, d);
        }
    }
    Ok(EquivalenceReport {
        local_classes: classes.len(),
        target_labels,
        checks: vec![q, theta, dual, fusion, size, unit],
        sigma: verify_sigma(cat1, &alg.sigma),
        sigma_seed_exact: alg.sigma.seed_exact(),
        field_cocycle: field,
        field_matches_standard,
        field_pairs_compared: grid.len() * grid.len(),
    })
}

/// Combinations `Σ cᵢ bᵢ` with `cᵢ ∈ {−1, 0, 1}`, at most `cap` of them.
fn small_combinations(basis: &[QVec], cap: usize) -> Vec<QVec> {
    let dim = basis.first().map_or(0, |b| b.len());
    let mut out = vec![vec![Rational::from_integer(0.into()); dim]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * 3);
        for v in &out {
            next.push(v.clone());
            next.push(add(v, b));
            next.push(sub(v, b));
        }
        next.truncate(cap);
        out = next;
    }
    out
}
