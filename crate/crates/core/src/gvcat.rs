//! The pointed ribbon GV category attached to bosonic lattice data:
//! labels are cosets, structure morphisms are phases.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cocycle::TwoCocycle;
use crate::exec::Exec;
use crate::lattice::{BosonicLatticeData, Coset};
use crate::linalg::{add, scale, sub, QVec};
use crate::scalar::{rat, Phase, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GvError {
    #[error("ParentMismatch: labels belong to different lattice data")]
    ParentMismatch,
}

impl GvError {
    pub fn name(&self) -> &'static str {
        "ParentMismatch"
    }
}

#[derive(Clone, Debug)]
pub struct GVCategory {
    data: BosonicLatticeData,
    epsilon: TwoCocycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub pass: bool,
    pub checked: usize,
    pub witness: Vec<Coset>,
}

impl AxiomReport {
    fn single(axiom: &str, pass: bool, labels: &[&Coset]) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            pass,
            checked: 1,
            witness: if pass {
                Vec::new()
            } else {
                labels.iter().map(|c| (*c).clone()).collect()
            },
        }
    }

    /// Folds single-tuple reports, keeping the first witness in input order.
    pub fn merge(axiom: &str, reports: impl IntoIterator<Item = AxiomReport>) -> AxiomReport {
        let mut out = AxiomReport {
            axiom: axiom.to_string(),
            pass: true,
            checked: 0,
            witness: Vec::new(),
        };
        for r in reports {
            out.checked += r.checked;
            if out.pass && !r.pass {
                out.pass = false;
                out.witness = r.witness;
            }
        }
        out
    }
}

impl GVCategory {
    /// The category with the cocycle built from the stored lattice basis.
    pub fn new(data: BosonicLatticeData) -> Self {
        let epsilon = TwoCocycle::standard(&data);
        GVCategory { data, epsilon }
    }

    pub fn with_epsilon(data: BosonicLatticeData, epsilon: TwoCocycle) -> Self {
        GVCategory { data, epsilon }
    }

    pub fn data(&self) -> &BosonicLatticeData {
        &self.data
    }

    pub fn epsilon(&self) -> &TwoCocycle {
        &self.epsilon
    }

    fn same_parent(&self, labels: &[&Coset]) -> Result<(), GvError> {
        if labels.iter().all(|c| c.parent() == self.data.id()) {
            Ok(())
        } else {
            Err(GvError::ParentMismatch)
        }
    }

    pub fn fuse(&self, a: &Coset, b: &Coset) -> Result<Coset, GvError> {
        self.same_parent(&[a, b])?;
        Ok(self.fuse_unchecked(a, b))
    }

    pub(crate) fn fuse_unchecked(&self, a: &Coset, b: &Coset) -> Coset {
        self.data.coset_unchecked(&add(a.rep(), b.rep()))
    }

    pub fn braiding(&self, a: &Coset, b: &Coset) -> Result<Phase, GvError> {
        self.same_parent(&[a, b])?;
        Ok(self.braiding_unchecked(a, b))
    }

    pub(crate) fn braiding_unchecked(&self, a: &Coset, b: &Coset) -> Phase {
        Phase::new(self.data.pair(a.rep(), b.rep()))
    }

    pub fn associator(&self, a: &Coset, b: &Coset, c: &Coset) -> Result<Phase, GvError> {
        self.same_parent(&[a, b, c])?;
        Ok(self.associator_unchecked(a, b, c))
    }

    pub(crate) fn associator_unchecked(&self, a: &Coset, b: &Coset, c: &Coset) -> Phase {
        let ab = self.fuse_unchecked(a, b);
        let bc = self.fuse_unchecked(b, c);
        let k_ab = self.data.k_cocycle(a, b);
        let k_bc = self.data.k_cocycle(b, c);
        let k_ab_c = self.data.k_cocycle(&ab, c);
        let k_a_bc = self.data.k_cocycle(a, &bc);
        let sign = Phase::new(self.data.pair(a.rep(), &k_bc));
        sign * self.epsilon.eval(&k_ab, &k_ab_c) / self.epsilon.eval(&k_bc, &k_a_bc)
    }

    pub fn quadratic_form(&self, a: &Coset) -> Phase {
        Phase::new(self.data.pair(a.rep(), a.rep()))
    }

    pub fn twist(&self, a: &Coset) -> Phase {
        let shifted = sub(a.rep(), &scale(self.data.ff_rep(), &rat(2, 1)));
        Phase::new(self.data.pair(a.rep(), &shifted))
    }

    pub fn dual_object(&self, a: &Coset) -> Coset {
        let two_ff = scale(self.data.ff_rep(), &rat(2, 1));
        self.data.coset_unchecked(&sub(&two_ff, a.rep()))
    }

    pub fn dualizing_object(&self) -> Coset {
        self.data
            .coset_unchecked(&scale(self.data.ff_rep(), &rat(2, 1)))
    }

    pub fn check_pentagon(&self, a: &Coset, b: &Coset, c: &Coset, d: &Coset) -> AxiomReport {
        let f = |x: &Coset, y: &Coset, z: &Coset| self.associator_unchecked(x, y, z);
        let ab = self.fuse_unchecked(a, b);
        let bc = self.fuse_unchecked(b, c);
        let cd = self.fuse_unchecked(c, d);
        let lhs = f(&ab, c, d) * f(a, b, &cd);
        let rhs = f(a, b, c) * f(a, &bc, d) * f(b, c, d);
        AxiomReport::single("pentagon", lhs == rhs, &[a, b, c, d])
    }

    pub fn check_hexagons(&self, a: &Coset, b: &Coset, c: &Coset) -> [AxiomReport; 2] {
        let f = |x: &Coset, y: &Coset, z: &Coset| self.associator_unchecked(x, y, z);
        let om = |x: &Coset, y: &Coset| self.braiding_unchecked(x, y);
        let ab = self.fuse_unchecked(a, b);
        let bc = self.fuse_unchecked(b, c);
        let first = f(b, c, a) * om(a, &bc) * f(a, b, c) == om(a, b) * f(b, a, c) * om(a, c);
        let second = f(c, a, b).inv() * om(&ab, c) * f(a, b, c).inv()
            == om(a, c) * f(a, c, b).inv() * om(b, c);
        [
            AxiomReport::single("hexagon1", first, &[a, b, c]),
            AxiomReport::single("hexagon2", second, &[a, b, c]),
        ]
    }

    pub fn check_balancing(&self, a: &Coset, b: &Coset) -> AxiomReport {
        let ab = self.fuse_unchecked(a, b);
        let lhs = self.twist(&ab);
        let rhs = self.braiding_unchecked(a, b)
            * self.braiding_unchecked(b, a)
            * self.twist(a)
            * self.twist(b);
        AxiomReport::single("balancing", lhs == rhs, &[a, b])
    }

    pub fn check_ribbon_gv(&self, a: &Coset) -> AxiomReport {
        let pass = self.twist(&self.dual_object(a)) == self.twist(a);
        AxiomReport::single("ribbon_gv", pass, &[a])
    }

    pub fn hopf(&self) -> HopfView<'_> {
        HopfView::new(self)
    }
}

/// Structure constants tabulated over a finite list of labels closed under
/// fusion.
pub struct LabelTables {
    labels: Vec<Coset>,
    sum: Vec<Vec<usize>>,
    assoc: Vec<Phase>,
    braid: Vec<Vec<Phase>>,
    twist: Vec<Phase>,
    dual: Vec<usize>,
}

impl LabelTables {
    pub fn new(cat: &GVCategory, labels: &[Coset], exec: Exec) -> Self {
        let n = labels.len();
        let index: HashMap<&Coset, usize> =
            labels.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let sum: Vec<Vec<usize>> = exec.map(labels, |a| {
            labels
                .iter()
                .map(|b| index[&cat.fuse_unchecked(a, b)])
                .collect()
        });
        let triples: Vec<(usize, usize, usize)> = (0..n * n * n)
            .map(|t| (t / (n * n), (t / n) % n, t % n))
            .collect();
        let assoc = exec.map(&triples, |&(a, b, c)| {
            cat.associator_unchecked(&labels[a], &labels[b], &labels[c])
        });
        let braid = exec.map(labels, |a| {
            labels
                .iter()
                .map(|b| cat.braiding_unchecked(a, b))
                .collect()
        });
        let twist = labels.iter().map(|a| cat.twist(a)).collect();
        let dual = labels.iter().map(|a| index[&cat.dual_object(a)]).collect();
        LabelTables {
            labels: labels.to_vec(),
            sum,
            assoc,
            braid,
            twist,
            dual,
        }
    }

    fn f(&self, a: usize, b: usize, c: usize) -> &Phase {
        let n = self.labels.len();
        &self.assoc[(a * n + b) * n + c]
    }

    fn witness(&self, ids: &[usize]) -> Vec<Coset> {
        ids.iter().map(|&i| self.labels[i].clone()).collect()
    }

    fn sweep<F>(&self, axiom: &str, arity: u32, exec: Exec, check: F) -> AxiomReport
    where
        F: Fn(&[usize]) -> bool + Sync + Send,
    {
        let n = self.labels.len();
        // Parallel over the leading label; each chunk scans the rest in order.
        let heads: Vec<usize> = (0..n).collect();
        let tail = n.pow(arity - 1);
        let chunks = exec.map(&heads, |&h| {
            let mut ids = vec![0usize; arity as usize];
            ids[0] = h;
            for t in 0..tail {
                let mut r = t;
                for slot in (1..arity as usize).rev() {
                    ids[slot] = r % n;
                    r /= n;
                }
                if !check(&ids) {
                    return (tail, Some(ids));
                }
            }
            (tail, None)
        });
        let mut report = AxiomReport {
            axiom: axiom.to_string(),
            pass: true,
            checked: 0,
            witness: Vec::new(),
        };
        for (count, failure) in chunks {
            report.checked += count;
            if let (true, Some(ids)) = (report.pass, failure) {
                report.pass = false;
                report.witness = self.witness(&ids);
            }
        }
        report
    }

    /// Pentagon, both hexagons, balancing and ribbon-GV over every tuple.
    pub fn verify_all(&self, exec: Exec) -> Vec<AxiomReport> {
        let s = &self.sum;
        let pentagon = self.sweep("pentagon", 4, exec, |x| {
            let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
            self.f(s[a][b], c, d) * self.f(a, b, s[c][d])
                == self.f(a, b, c) * self.f(a, s[b][c], d) * self.f(b, c, d)
        });
        let om = &self.braid;
        let hexagon1 = self.sweep("hexagon1", 3, exec, |x| {
            let (a, b, c) = (x[0], x[1], x[2]);
            self.f(b, c, a) * &om[a][s[b][c]] * self.f(a, b, c)
                == &om[a][b] * self.f(b, a, c) * &om[a][c]
        });
        let hexagon2 = self.sweep("hexagon2", 3, exec, |x| {
            let (a, b, c) = (x[0], x[1], x[2]);
            self.f(c, a, b).inv() * &om[s[a][b]][c] * self.f(a, b, c).inv()
                == &om[a][c] * self.f(a, c, b).inv() * &om[b][c]
        });
        let t = &self.twist;
        let balancing = self.sweep("balancing", 2, exec, |x| {
            let (a, b) = (x[0], x[1]);
            t[s[a][b]] == &om[a][b] * &om[b][a] * &t[a] * &t[b]
        });
        let ribbon = self.sweep("ribbon_gv", 1, exec, |x| t[self.dual[x[0]]] == t[x[0]]);
        vec![pentagon, hexagon1, hexagon2, balancing, ribbon]
    }
}

/// Exhaustive axiom sweep over the finite discriminant group.
pub fn verify_axioms_exhaustive(
    cat: &GVCategory,
    exec: Exec,
) -> Result<Vec<AxiomReport>, crate::lattice::LatticeError> {
    let labels = cat.data().discriminant_enumerate()?;
    Ok(LabelTables::new(cat, &labels, exec).verify_all(exec))
}

/// Axioms on `samples` random tuples of random labels.
pub fn verify_axioms_sampled(
    cat: &GVCategory,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Vec<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuples: Vec<[Coset; 4]> = (0..samples)
        .map(|_| std::array::from_fn(|_| cat.data().random_coset(&mut rng)))
        .collect();
    let results = exec.map(&tuples, |[a, b, c, d]| {
        let [h1, h2] = cat.check_hexagons(a, b, c);
        [
            cat.check_pentagon(a, b, c, d),
            h1,
            h2,
            cat.check_balancing(a, b),
            cat.check_ribbon_gv(a),
        ]
    });
    let names = ["pentagon", "hexagon1", "hexagon2", "balancing", "ribbon_gv"];
    names
        .iter()
        .enumerate()
        .map(|(k, name)| AxiomReport::merge(name, results.iter().map(|r| r[k].clone())))
        .collect()
}

/// Evaluation of the formal ribbon element, R-matrix and coassociator on
/// homogeneous components, through the module action of the lattice Hopf
/// algebra.
pub struct HopfView<'a> {
    cat: &'a GVCategory,
    perp: Vec<QVec>,
    gamma: Vec<QVec>,
    perp_dual: Vec<QVec>,
    gamma_dual: Vec<QVec>,
}

impl<'a> HopfView<'a> {
    fn new(cat: &'a GVCategory) -> Self {
        let dec = cat.data().decomposition();
        let perp = dec.perp_basis.clone();
        let gamma = dec.gamma_basis.clone();
        let mut joint = perp.clone();
        joint.extend(gamma.iter().cloned());
        let dual = cat.data().space().dual_basis(&joint);
        let gamma_dual = dual[perp.len()..].to_vec();
        let perp_dual = dual[..perp.len()].to_vec();
        HopfView {
            cat,
            perp,
            gamma,
            perp_dual,
            gamma_dual,
        }
    }

    /// Action of a primitive element `μ ∈ Λ^⊥` on the component of `a`.
    pub fn act_primitive(&self, mu: &[Rational], a: &Coset) -> Rational {
        self.cat.data().pair(mu, a.rep())
    }

    /// Action of the group-like `K_ν` on the component of `a`.
    pub fn act_grouplike(&self, nu: &[Rational], a: &Coset) -> Phase {
        Phase::turns(&self.cat.data().pair(nu, a.rep()))
    }

    /// `X` evaluated on the component of the vector `x`.
    fn x_part(&self, x: &[Rational]) -> QVec {
        let data = self.cat.data();
        let mut out = vec![Rational::from_integer(0.into()); data.dim()];
        for (mu, mu_dual) in self.perp.iter().zip(&self.perp_dual) {
            out = add(&out, &scale(mu_dual, &data.pair(mu, x)));
        }
        out
    }

    /// `log_s K` evaluated on the component of the vector `x`.
    fn log_k_part(&self, x: &[Rational]) -> QVec {
        let data = self.cat.data();
        let mut out = vec![Rational::from_integer(0.into()); data.dim()];
        for (nu, nu_dual) in self.gamma.iter().zip(&self.gamma_dual) {
            out = add(&out, &scale(nu_dual, &data.pair(nu, x)));
        }
        out
    }

    /// `X + log_s K` on the component of `a`; equals `s(a)`.
    pub fn weight(&self, a: &Coset) -> QVec {
        add(&self.x_part(a.rep()), &self.log_k_part(a.rep()))
    }

    pub fn ribbon(&self, a: &Coset) -> Phase {
        let data = self.cat.data();
        let w = self.weight(a);
        let s_ff = data.coset_unchecked(data.ff_rep());
        let shifted = sub(&w, &scale(s_ff.rep(), &rat(2, 1)));
        Phase::new(-data.pair(&w, &shifted))
    }

    pub fn r_matrix(&self, a: &Coset, b: &Coset) -> Phase {
        Phase::new(self.cat.data().pair(&self.weight(a), &self.weight(b)))
    }

    pub fn coassociator(&self, a: &Coset, b: &Coset, c: &Coset) -> Phase {
        let data = self.cat.data();
        let eps = self.cat.epsilon();
        let wa = self.weight(a);
        let wb = self.weight(b);
        let wc = self.weight(c);
        let bc = self.cat.fuse_unchecked(b, c);
        let log_sum = sub(
            &add(&self.log_k_part(&wb), &self.log_k_part(&wc)),
            &self.log_k_part(bc.rep()),
        );
        let phase = Phase::new(data.pair(&wa, &log_sum));
        // k evaluated on the reconstructed weights.
        let k = |x: &[Rational], y: &[Rational]| -> QVec {
            let sum = add(x, y);
            sub(&data.coset_unchecked(&sum).rep(), &sum)
        };
        let ab = self.cat.fuse_unchecked(a, b);
        let numer = eps.eval(&k(&wa, &wb), &k(ab.rep(), &wc));
        let denom = eps.eval(&k(&wb, &wc), &k(&wa, bc.rep()));
        phase * numer / denom
    }
}

/// A finite direct sum of simple objects with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedObject {
    multiplicities: BTreeMap<Coset, u64>,
}

impl GradedObject {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn simple(c: Coset) -> Self {
        let mut g = Self::new();
        g.insert(c, 1);
        g
    }

    pub fn insert(&mut self, c: Coset, m: u64) {
        if m > 0 {
            *self.multiplicities.entry(c).or_insert(0) += m;
        }
    }

    pub fn multiplicity(&self, c: &Coset) -> u64 {
        self.multiplicities.get(c).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Coset, u64)> {
        self.multiplicities.iter().map(|(c, m)| (c, *m))
    }

    pub fn total_dimension(&self) -> u64 {
        self.multiplicities.values().sum()
    }
}

pub fn fuse_objects(
    cat: &GVCategory,
    x: &GradedObject,
    y: &GradedObject,
) -> Result<GradedObject, GvError> {
    let mut out = GradedObject::new();
    for (a, m) in x.support() {
        for (b, n) in y.support() {
            out.insert(cat.fuse(a, b)?, m * n);
        }
    }
    Ok(out)
}
