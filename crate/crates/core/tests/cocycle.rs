mod common;

use common::{ints, v, zero};
use gvlat::catalog;
use gvlat::cocycle::{
    enumerate_quotient, epsilon_from_basis, solve_sigma, solve_sigma_brute_force, verify_sigma,
    verify_two_cocycle, TwoCocycle,
};
use gvlat::gvcat::GVCategory;
use gvlat::lattice::validate;
use gvlat::linalg::{add, QMatrix};
use gvlat::scalar::{rat, Phase};
use gvlat::BosonicLatticeData;

fn hyperbolic() -> BosonicLatticeData {
    let g = vec![ints(&[0, 1]), ints(&[1, 0])];
    validate(
        QMatrix::from_rows(&g, 2),
        vec![ints(&[1, 0]), ints(&[0, 1])],
        zero(2),
    )
    .unwrap()
}

#[test]
fn epsilon_examples() {
    let a1 = catalog::a1(rat(0, 1));
    let eps = TwoCocycle::standard(&a1);
    for m in -3..=3 {
        for k in -3..=3 {
            assert!(eps.eval(&ints(&[m]), &ints(&[k])).is_one());
        }
    }
    let half = catalog::half_rank();
    let eps = TwoCocycle::standard(&half);
    assert!(eps.eval(&ints(&[0, 3]), &ints(&[0, -5])).is_one());

    let hyp = hyperbolic();
    let eps = TwoCocycle::standard(&hyp);
    assert_eq!(eps.eval(&ints(&[1, 0]), &ints(&[0, 1])), Phase::minus_one());
    assert!(eps.eval(&ints(&[0, 1]), &ints(&[1, 0])).is_one());
    assert!(verify_two_cocycle(&hyp, &eps, 100, 0).pass());
}

#[test]
fn verifier_finds_bad_commutator() {
    let hyp = hyperbolic();
    let basis = vec![ints(&[1, 0]), ints(&[0, 1])];
    let bad =
        TwoCocycle::from_table(&hyp, &basis, vec![vec![false, false], vec![false, false]]).unwrap();
    let report = verify_two_cocycle(&hyp, &bad, 100, 0);
    let comm = report.condition("commutator").unwrap();
    assert!(!comm.pass);
    assert_eq!(comm.witness, vec![vec!["1/1", "0/1"], vec!["0/1", "1/1"]]);
    assert!(report.condition("normalization").unwrap().pass);
    assert!(report.condition("cocycle").unwrap().pass);
}

#[test]
fn empty_lattice_is_vacuous() {
    let empty = catalog::empty(2, zero(2));
    let eps = TwoCocycle::standard(&empty);
    assert!(verify_two_cocycle(&empty, &eps, 100, 0).pass());
}

#[test]
fn standard_epsilon_passes_everywhere() {
    for (i, data) in [
        catalog::a1(rat(0, 1)),
        catalog::a2(zero(2)),
        catalog::rank2_order8(zero(2)),
        catalog::a2_squared(zero(4)),
        catalog::half_rank(),
        hyperbolic(),
    ]
    .iter()
    .enumerate()
    {
        let eps = TwoCocycle::standard(data);
        let report = verify_two_cocycle(data, &eps, 100, i as u64);
        assert!(report.pass(), "{report:?}");
        assert!(report
            .conditions
            .iter()
            .all(|c| c.checked > 0 || data.rank() == 0));
    }
}

#[test]
fn reordered_basis_is_a_cocycle_too() {
    let data = catalog::a2_squared(zero(4));
    let basis = vec![
        ints(&[0, 0, 0, 1]),
        ints(&[1, 1, 0, 0]),
        ints(&[0, 0, 1, 0]),
        ints(&[0, 1, 0, 0]),
    ];
    let eps = epsilon_from_basis(&data, &basis).unwrap();
    assert!(verify_two_cocycle(&data, &eps, 100, 3).pass());
}

#[test]
fn not_a_basis() {
    let a1 = catalog::a1(rat(0, 1));
    assert_eq!(
        epsilon_from_basis(&a1, &[ints(&[2])]).unwrap_err().name(),
        "NotABasis"
    );
    assert_eq!(
        epsilon_from_basis(&a1, &[v(&[(1, 2)])]).unwrap_err().name(),
        "NotABasis"
    );
    assert_eq!(
        epsilon_from_basis(&a1, &[]).unwrap_err().name(),
        "NotABasis"
    );
}

/// Independent check of the trivialization conditions straight from the
/// category scalars, with the group law recomputed from representatives.
fn check_sigma_directly(data1: &BosonicLatticeData, data2: &BosonicLatticeData) {
    let sigma = solve_sigma(data1, data2).unwrap();
    let cat = GVCategory::new(data1.clone());
    let g = sigma.group().to_vec();
    let zero = data1.zero_coset();
    assert_eq!(g[0], zero);
    for a in &g {
        assert!(sigma.get(a, &zero).unwrap().is_one());
        assert!(sigma.get(&zero, a).unwrap().is_one());
        for b in &g {
            let comm = sigma.get(a, b).unwrap() / sigma.get(b, a).unwrap();
            assert_eq!(comm, cat.braiding(a, b).unwrap());
            for c in &g {
                let ab = data1.coset(&add(a.rep(), b.rep())).unwrap();
                let bc = data1.coset(&add(b.rep(), c.rep())).unwrap();
                let delta = sigma.get(b, c).unwrap() / sigma.get(&ab, c).unwrap();
                let delta = &(&delta * sigma.get(a, &bc).unwrap()) / sigma.get(a, b).unwrap();
                assert_eq!(delta, cat.associator(a, b, c).unwrap(), "{a} {b} {c}");
            }
        }
    }
    assert!(verify_sigma(&cat, &sigma).pass());
}

#[test]
fn sigma_for_a1_index_two() {
    let a1 = catalog::a1(rat(0, 1));
    let sub = catalog::scaled(&a1, 2);
    let group = enumerate_quotient(&sub, &a1).unwrap();
    assert_eq!(group.len(), 2);
    check_sigma_directly(&sub, &a1);

    // Exhaustive search over all ±1 tables on ℤ/2.
    let cat = GVCategory::new(sub.clone());
    let g = &group;
    let mut solutions = 0;
    for code in 0..16u32 {
        let val = |i: usize, j: usize| Phase::sign(code >> (2 * i + j) & 1 == 1);
        let ok = (0..2).all(|i| val(i, 0).is_one() && val(0, i).is_one())
            && (0..2).all(|i| {
                (0..2).all(|j| val(i, j) / val(j, i) == cat.braiding(&g[i], &g[j]).unwrap())
            })
            && (0..2).all(|a| {
                (0..2).all(|b| {
                    (0..2).all(|c| {
                        let (ab, bc) = ((a + b) % 2, (b + c) % 2);
                        val(b, c) / val(ab, c) * val(a, bc) / val(a, b)
                            == cat.associator(&g[a], &g[b], &g[c]).unwrap()
                    })
                })
            });
        solutions += ok as u32;
    }
    assert!(solutions > 0);
    assert!(solve_sigma_brute_force(&sub, &a1).unwrap().is_some());
}

#[test]
fn sigma_for_index_three_and_nine() {
    let a1 = catalog::a1(rat(0, 1));
    check_sigma_directly(&catalog::scaled(&a1, 3), &a1);
    let a2 = catalog::a2(zero(2));
    let sub = catalog::scaled(&a2, 3);
    assert_eq!(enumerate_quotient(&sub, &a2).unwrap().len(), 9);
    check_sigma_directly(&sub, &a2);
    let r8 = catalog::rank2_order8(zero(2));
    check_sigma_directly(&catalog::scaled(&r8, 2), &r8);
}

#[test]
fn brute_force_agrees_on_small_groups() {
    let a1 = catalog::a1(rat(0, 1));
    for k in [2, 3] {
        let sub = catalog::scaled(&a1, k);
        let brute = solve_sigma_brute_force(&sub, &a1)
            .unwrap()
            .expect("a solution exists");
        let cat = GVCategory::new(sub.clone());
        assert!(verify_sigma(&cat, &brute).pass());
    }
    let a2 = catalog::a2(zero(2));
    assert!(solve_sigma_brute_force(&catalog::scaled(&a2, 3), &a2)
        .unwrap()
        .is_none());
}

#[test]
fn trivial_extension() {
    let a2 = catalog::a2(zero(2));
    let sigma = solve_sigma(&a2, &a2).unwrap();
    assert_eq!(sigma.group().len(), 1);
    assert!(sigma.value(0, 0).is_one());
}

#[test]
fn sigma_errors() {
    let a1 = catalog::a1(rat(0, 1));
    let sub = catalog::scaled(&a1, 2);
    assert_eq!(solve_sigma(&a1, &sub).unwrap_err().name(), "NotASublattice");

    let half = catalog::half_rank();
    let full = {
        let g = vec![ints(&[0, 1]), ints(&[1, 0])];
        validate(
            QMatrix::from_rows(&g, 2),
            vec![ints(&[1, 0]), ints(&[0, 1])],
            ints(&[1, 0]),
        )
        .unwrap()
    };
    assert_eq!(
        solve_sigma(&half, &full).unwrap_err().name(),
        "InfiniteQuotient"
    );

    let shifted_sub = validate(
        QMatrix::from_rows(&[ints(&[2])], 1),
        vec![ints(&[2])],
        v(&[(1, 4)]),
    )
    .unwrap();
    assert_eq!(
        solve_sigma(&shifted_sub, &a1).unwrap_err().name(),
        "FFMismatch"
    );

    let other_space = catalog::a2(zero(2));
    assert_eq!(
        solve_sigma(&sub, &other_space).unwrap_err().name(),
        "NotASublattice"
    );
}
