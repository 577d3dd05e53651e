mod common;

use std::time::Instant;

use common::{v, zero};
use gvlat::catalog;
use gvlat::fock::{
    basis_monomials, check_associativity_numeric, check_current_commutators, check_skew_symmetry,
    check_virasoro, conformal_weight, contragredient_weight, graded_dimension,
    intertwiner_prefactor, lattice_intertwiner, vertex_operator, wynn_epsilon, FockMonomial,
    FockVector, Insertion, ModeAlgebra,
};
use gvlat::gvcat::GVCategory;
use gvlat::scalar::{rat, Phase, Rational};
use gvlat::BosonicLatticeData;
use num_bigint::BigInt;
use num_traits::One;

/// Number of multisets of (colour, part) pairs with parts summing to `d`.
fn brute_colored_partitions(n: usize, d: u32) -> u64 {
    fn go(n: usize, remaining: u32, largest: u32, colour_cap: usize) -> u64 {
        if remaining == 0 {
            return 1;
        }
        let mut total = 0;
        for part in (1..=remaining.min(largest)).rev() {
            let cap = if part == largest { colour_cap } else { n };
            for colour in 0..cap {
                total += go(n, remaining - part, part, colour + 1);
            }
        }
        total
    }
    go(n, d, d, n)
}

#[test]
fn graded_dimensions() {
    let a1 = catalog::a1(rat(0, 1));
    let a2 = catalog::a2(zero(2));
    assert_eq!(graded_dimension(&a1, &zero(1), 5), BigInt::from(7));
    assert_eq!(graded_dimension(&a1, &zero(1), 0), BigInt::from(1));
    assert_eq!(graded_dimension(&a2, &zero(2), 2), BigInt::from(5));
    for d in 0..=8 {
        assert_eq!(
            graded_dimension(&a1, &zero(1), d),
            BigInt::from(brute_colored_partitions(1, d))
        );
        assert_eq!(
            graded_dimension(&a2, &zero(2), d),
            BigInt::from(brute_colored_partitions(2, d))
        );
        assert_eq!(
            basis_monomials(2, d).len() as u64,
            brute_colored_partitions(2, d)
        );
        assert_eq!(
            basis_monomials(3, d).len() as u64,
            brute_colored_partitions(3, d)
        );
    }
}

#[test]
fn heisenberg_examples() {
    let data = catalog::a2(zero(2));
    let alg = ModeAlgebra::new(&data);
    let alpha = v(&[(1, 1), (2, 1)]);
    let norm = data.pair(&alpha, &alpha);
    let vac = FockVector::<Rational>::highest(zero(2), 4);
    let once = alg.heisenberg_act(&alpha, -1, &vac).unwrap();
    let back = alg.heisenberg_act(&alpha, 1, &once).unwrap();
    assert_eq!(back, vac.scaled(&norm));

    let lambda = v(&[(1, 3), (2, 3)]);
    let mono = FockMonomial::new(vec![(0, 1), (1, 2)]);
    let w = FockVector::monomial(lambda.clone(), 4, mono, rat(1, 1)).unwrap();
    assert_eq!(
        alg.heisenberg_act(&alpha, 0, &w).unwrap(),
        w.scaled(&data.pair(&alpha, &lambda))
    );

    let twice = alg.heisenberg_act(&alpha, -1, &once).unwrap();
    assert!(alg.heisenberg_act(&alpha, 2, &twice).unwrap().is_empty());

    let top = FockVector::<Rational>::highest(zero(2), 1);
    let err = alg.heisenberg_act(&alpha, -2, &top).unwrap_err();
    assert_eq!(err.name(), "LevelOverflow");
    assert_eq!(
        alg.heisenberg_act(&[rat(1, 1)], -1, &top)
            .unwrap_err()
            .name(),
        "ShapeMismatch"
    );
}

#[test]
fn conformal_weights_and_central_charge() {
    let half = catalog::half_rank();
    for n in -4..=4 {
        let h = conformal_weight(&half, &v(&[(0, 1), (n, 1)])).unwrap();
        assert_eq!(h, rat(-n, 1));
    }
    assert_eq!(ModeAlgebra::new(&half).central_charge(), rat(2, 1));

    let data = catalog::a2(v(&[(2, 3), (1, 3)]));
    let gamma = data.ff_rep().to_vec();
    for lambda in [v(&[(1, 3), (2, 3)]), v(&[(-1, 1), (5, 3)]), zero(2)] {
        let shifted: Vec<Rational> = lambda
            .iter()
            .zip(&gamma)
            .map(|(l, g)| l - g * rat(2, 1))
            .collect();
        let expected = data.pair(&lambda, &shifted) * rat(1, 2);
        assert_eq!(conformal_weight(&data, &lambda).unwrap(), expected);
    }

    // [L_2, L_{−2}]|0⟩ − 4L_0|0⟩ = (c/2)|0⟩ with c = 2
    let alg = ModeAlgebra::new(&half);
    let vac = FockVector::<Rational>::highest(zero(2), 4);
    let lm = alg.virasoro_mode(-2, &vac).unwrap();
    let mut bracket = alg.virasoro_mode(2, &lm).unwrap();
    let other = alg
        .virasoro_mode(-2, &alg.virasoro_mode(2, &vac).unwrap())
        .unwrap();
    bracket.add_scaled(&other, &rat(-1, 1));
    bracket.add_scaled(&alg.virasoro_mode(0, &vac).unwrap(), &rat(-4, 1));
    assert_eq!(bracket, vac.scaled(&rat(1, 1)));
}

#[test]
fn l0_grades_by_level() {
    let data = catalog::rank2_order8(v(&[(0, 1), (1, 2)]));
    let alg = ModeAlgebra::new(&data);
    let lambda = v(&[(1, 2), (1, 2)]);
    let h = conformal_weight(&data, &lambda).unwrap();
    for d in 0..=4 {
        for mono in basis_monomials(2, d) {
            let w = FockVector::monomial(lambda.clone(), 6, mono, rat(1, 1)).unwrap();
            assert_eq!(
                alg.virasoro_mode(0, &w).unwrap(),
                w.scaled(&(&h + rat(d as i64, 1)))
            );
        }
    }
}

#[test]
fn virasoro_relations() {
    let cases: Vec<(BosonicLatticeData, Vec<Vec<Rational>>)> = vec![
        (catalog::a1(rat(1, 2)), vec![zero(1), v(&[(1, 2)])]),
        (catalog::half_rank(), vec![zero(2), v(&[(1, 1), (1, 3)])]),
        (
            catalog::a2(v(&[(2, 3), (1, 3)])),
            vec![v(&[(1, 3), (2, 3)])],
        ),
    ];
    for (data, weights) in &cases {
        let report = check_virasoro(data, weights, 6, 3).unwrap();
        assert!(report.pass, "{report:?}");
        let report = check_current_commutators(data, weights, 4, 3).unwrap();
        assert!(report.pass, "{report:?}");
    }
}

#[test]
fn current_commutator_anomaly() {
    // L_1 α_{−1}|0⟩ = −2⟨γ, α⟩|0⟩
    let data = catalog::half_rank();
    let alg = ModeAlgebra::new(&data);
    let alpha = v(&[(0, 1), (1, 1)]);
    let vac = FockVector::<Rational>::highest(zero(2), 3);
    let a = alg.heisenberg_act(&alpha, -1, &vac).unwrap();
    let out = alg.virasoro_mode(1, &a).unwrap();
    let gamma = data.ff_rep().to_vec();
    assert_eq!(out, vac.scaled(&(data.pair(&gamma, &alpha) * rat(-2, 1))));
    // L_{−1} does not see γ
    let plain = ModeAlgebra::with_gamma(&data, zero(2));
    assert_eq!(
        alg.virasoro_mode(-1, &a).unwrap(),
        plain.virasoro_mode(-1, &a).unwrap()
    );
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k, 1))
}

#[test]
fn vertex_operator_expansion_rank_one() {
    // I(|μ⟩, z)|ν⟩ = z^{⟨μ,ν⟩} Σ_t z^t S_t |μ+ν⟩ with
    // S_t = Σ_{partitions} ∏ (c e)_{−n}^{a_n} / (n^{a_n} a_n!).
    let data = catalog::a1(rat(0, 1));
    let (mu, nu) = (v(&[(3, 2)]), v(&[(-1, 2)]));
    let op = vertex_operator(&data, Insertion::Vacuum, &mu, &nu, 0, 6).unwrap();
    let col = op.column(&FockMonomial::vacuum()).unwrap();
    assert_eq!(col.base, data.pair(&mu, &nu));
    assert_eq!(op.base_exponent(&data), col.base);
    for t in 0..=6u32 {
        let coeff = col.coefficient(t as i64);
        let mut expected = 0;
        for mono in basis_monomials(1, t) {
            let mut counts = [0u32; 7];
            for &(_, m) in mono.modes() {
                counts[m as usize] += 1;
            }
            let mut c = Rational::one();
            for (n, &a) in counts.iter().enumerate().skip(1) {
                for _ in 0..a {
                    c *= &mu[0] / rat(n as i64, 1);
                }
                c /= factorial(a);
            }
            assert_eq!(coeff.coefficient(&mono), c);
            expected += 1;
        }
        assert_eq!(coeff.len(), expected);
        assert_eq!(coeff.weight(), &[rat(1, 1)][..]);
    }
    assert!(col.coefficient(-1).is_empty());
}

#[test]
fn vertex_operator_leading_terms() {
    let data = catalog::a2(zero(2));
    let mu = v(&[(2, 3), (1, 3)]);
    let nu = v(&[(1, 3), (2, 3)]);
    let op = vertex_operator(&data, Insertion::Vacuum, &mu, &nu, 2, 4).unwrap();
    let col = op.column(&FockMonomial::vacuum()).unwrap();
    let sum = vec![rat(1, 1), rat(1, 1)];
    assert_eq!(col.coefficient(0), FockVector::highest(sum.clone(), 4));
    // first order: μ_{−1}|μ+ν⟩
    let first = col.coefficient(1);
    assert_eq!(first.coefficient(&FockMonomial::new(vec![(0, 1)])), mu[0]);
    assert_eq!(first.coefficient(&FockMonomial::new(vec![(1, 1)])), mu[1]);
    assert_eq!(first.len(), 2);

    // μ = 0 is the identity at leading order
    let id = vertex_operator(&data, Insertion::Vacuum, &zero(2), &nu, 2, 4).unwrap();
    for (mono, col) in &id.columns {
        let lead = col.coefficient(0);
        assert_eq!(lead.len(), 1);
        assert_eq!(lead.coefficient(mono), rat(1, 1));
        for j in col.coeffs.keys() {
            assert_eq!(*j, 0);
        }
    }

    // Current insertion at μ = 0 reproduces α(z) = Σ α_n z^{−n−1}.
    let alpha = v(&[(1, 1), (0, 1)]);
    let cur = vertex_operator(
        &data,
        Insertion::Current(alpha.clone()),
        &zero(2),
        &nu,
        1,
        3,
    )
    .unwrap();
    let col = cur.column(&FockMonomial::vacuum()).unwrap();
    assert_eq!(
        col.coefficient(-1),
        FockVector::highest(nu.clone(), 3).scaled(&data.pair(&alpha, &nu))
    );
    let raised = col.coefficient(0);
    assert_eq!(
        raised.coefficient(&FockMonomial::new(vec![(0, 1)])),
        rat(1, 1)
    );
    assert_eq!(raised.len(), 1);

    // Derivative insertion: ∂α(z) has z^{−2} coefficient −α_0.
    let der = vertex_operator(
        &data,
        Insertion::Derivative(alpha.clone()),
        &zero(2),
        &nu,
        0,
        3,
    )
    .unwrap();
    let col = der.column(&FockMonomial::vacuum()).unwrap();
    assert_eq!(
        col.coefficient(-2),
        FockVector::highest(nu.clone(), 3).scaled(&-data.pair(&alpha, &nu))
    );

    // :αβ:(z) at z^{−2} on |ν⟩ is ⟨α,ν⟩⟨β,ν⟩|ν⟩.
    let beta = v(&[(0, 1), (1, 1)]);
    let prod = vertex_operator(
        &data,
        Insertion::Product(alpha.clone(), beta.clone()),
        &zero(2),
        &nu,
        0,
        3,
    )
    .unwrap();
    let col = prod.column(&FockMonomial::vacuum()).unwrap();
    assert_eq!(
        col.coefficient(-2),
        FockVector::highest(nu.clone(), 3)
            .scaled(&(data.pair(&alpha, &nu) * data.pair(&beta, &nu)))
    );
    assert_eq!(Insertion::Product(alpha, beta).level(), 2);

    assert_eq!(
        vertex_operator(&data, Insertion::Vacuum, &mu, &nu, 5, 4)
            .unwrap_err()
            .name(),
        "LevelOverflow"
    );
}

#[test]
fn intertwiner_prefactors() {
    let cat = GVCategory::new(catalog::a1(rat(0, 1)));
    let data = cat.data();
    let zero_c = data.zero_coset();
    let h = data.coset(&v(&[(1, 2)])).unwrap();
    assert!(intertwiner_prefactor(&cat, &zero_c, &zero_c, &zero(1), &zero(1)).is_one());
    assert!(intertwiner_prefactor(&cat, &h, &h, &zero(1), &zero(1)).is_one());
    assert_eq!(
        intertwiner_prefactor(&cat, &h, &h, &zero(1), &v(&[(-1, 1)])),
        Phase::minus_one()
    );
    let li = lattice_intertwiner(&cat, &h, &h, &zero(1), &zero(1), 0, 2).unwrap();
    let col = li.operator.column(&FockMonomial::vacuum()).unwrap();
    assert_eq!(col.base, rat(1, 2));
    assert_eq!(col.coefficient(0), FockVector::highest(v(&[(1, 1)]), 2));
    assert!(lattice_intertwiner(&cat, &h, &h, &v(&[(1, 2)]), &zero(1), 0, 2).is_err());
}

fn full_rank_cats() -> Vec<GVCategory> {
    vec![
        GVCategory::new(catalog::a1(rat(0, 1))),
        GVCategory::new(catalog::a1(rat(1, 2))),
        GVCategory::new(catalog::a2(zero(2))),
        GVCategory::new(catalog::a2_alt(v(&[(1, 3), (2, 3)]))),
        GVCategory::new(catalog::rank2_order8(zero(2))),
    ]
}

#[test]
fn skew_symmetry_matches_braiding() {
    for cat in full_rank_cats() {
        let labels = cat.data().discriminant_enumerate().unwrap();
        for a in &labels {
            for b in &labels {
                let report = check_skew_symmetry(&cat, a, b, 3).unwrap();
                assert!(report.pass, "{report:?}");
                assert_eq!(
                    report.extracted.as_ref(),
                    Some(&cat.braiding(a, b).unwrap())
                );
            }
        }
    }
    let cat = GVCategory::new(catalog::a1(rat(0, 1)));
    let h = cat.data().coset(&v(&[(1, 2)])).unwrap();
    let report = check_skew_symmetry(&cat, &h, &h, 3).unwrap();
    assert_eq!(report.extracted, Some(Phase::new(rat(1, 2))));
    let z = cat.data().zero_coset();
    assert!(check_skew_symmetry(&cat, &z, &z, 3)
        .unwrap()
        .extracted
        .unwrap()
        .is_one());
}

#[test]
fn skew_symmetry_half_rank() {
    let cat = GVCategory::new(catalog::half_rank());
    let data = cat.data();
    let a = data.coset(&v(&[(1, 1), (0, 1)])).unwrap();
    let b = data.coset(&v(&[(0, 1), (1, 2)])).unwrap();
    let report = check_skew_symmetry(&cat, &a, &b, 3).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(report.extracted, Some(Phase::new(rat(1, 2))));
}

/// `(1 − y)^p = Σ_j binom(p, j)(−y)^j`, summed in floating point.
fn binomial_series(p: f64, y: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    for j in 1..400 {
        term *= (p - (j - 1) as f64) / j as f64 * (-y);
        acc += term;
    }
    acc
}

#[test]
fn associativity_matches_associator() {
    let (x1, x2) = (rat(5, 2), rat(3, 2));
    let start = Instant::now();
    let cases = [
        GVCategory::new(catalog::a1(rat(0, 1))),
        GVCategory::new(catalog::a2(zero(2))),
    ];
    for cat in &cases {
        let labels = cat.data().discriminant_enumerate().unwrap();
        for a in &labels {
            for b in &labels {
                for c in &labels {
                    let report =
                        check_associativity_numeric(cat, a, b, c, &x1, &x2, 12, 1e-6).unwrap();
                    assert!(report.pass, "{report:?}");
                    assert!(report.error < 1e-6);
                }
            }
        }
    }
    assert!(start.elapsed().as_secs() < 60);

    // Product side against its closed form for A1 (½,½,½).
    let cat = &cases[0];
    let h = cat.data().coset(&v(&[(1, 2)])).unwrap();
    let report = check_associativity_numeric(cat, &h, &h, &h, &x1, &x2, 12, 1e-6).unwrap();
    assert!((report.ratio + 1.0).abs() < 1e-6);
    let closed = binomial_series(0.5, 1.5 / 2.5);
    assert!((closed - (1.0f64 - 0.6).powf(0.5)).abs() < 1e-12);

    let z = cat.data().zero_coset();
    let trivial = check_associativity_numeric(cat, &z, &z, &z, &x1, &x2, 12, 1e-6).unwrap();
    assert!((trivial.ratio - 1.0).abs() < 1e-12);
    assert!(check_associativity_numeric(cat, &h, &h, &h, &x2, &x1, 12, 1e-6).is_err());
}

#[test]
fn associativity_reports_slow_convergence() {
    let cat = GVCategory::new(catalog::a2(zero(2)));
    let w = cat.data().coset(&v(&[(2, 3), (1, 3)])).unwrap();
    let err = check_associativity_numeric(&cat, &w, &w, &w, &rat(5, 2), &rat(3, 2), 1, 1e-12)
        .unwrap_err();
    assert_eq!(err.name(), "ConvergenceNotReached");
}

#[test]
fn wynn_accelerates_geometric_and_log_series() {
    let partials: Vec<f64> = (0..10)
        .scan(0.0, |s, k| {
            *s += 0.9f64.powi(k);
            Some(*s)
        })
        .collect();
    let est = wynn_epsilon(&partials);
    assert!((est[1] - 10.0).abs() < 1e-9);
    let alt: Vec<f64> = (1..14)
        .scan(0.0, |s, k| {
            *s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            Some(*s)
        })
        .collect();
    assert!((wynn_epsilon(&alt)[1] - 2f64.ln()).abs() < 1e-8);
}

#[test]
fn contragredient_is_dual_object() {
    let cases = vec![
        catalog::a1(rat(0, 1)),
        catalog::a1(rat(1, 2)),
        catalog::a2(v(&[(2, 3), (1, 3)])),
        catalog::rank2_order8(v(&[(0, 1), (1, 2)])),
        catalog::half_rank(),
    ];
    for data in cases {
        let cat = GVCategory::new(data.clone());
        let labels: Vec<_> = if data.is_full_rank() {
            data.discriminant_enumerate().unwrap()
        } else {
            [
                v(&[(0, 1), (0, 1)]),
                v(&[(1, 1), (1, 3)]),
                v(&[(-2, 1), (3, 4)]),
            ]
            .iter()
            .map(|x| data.coset(x).unwrap())
            .collect()
        };
        for rho in labels {
            assert_eq!(
                contragredient_weight(&data, &rho).unwrap(),
                cat.dual_object(&rho)
            );
        }
    }
    let half = catalog::half_rank();
    let dual_vac = contragredient_weight(&half, &half.zero_coset()).unwrap();
    assert_eq!(dual_vac, half.coset(&v(&[(2, 1), (0, 1)])).unwrap());
    let a1 = catalog::a1(rat(1, 2));
    let h = a1.coset(&v(&[(1, 2)])).unwrap();
    assert_eq!(contragredient_weight(&a1, &h).unwrap(), h);
    assert!(contragredient_weight(&a1, &a1.zero_coset())
        .unwrap()
        .is_zero());
}
