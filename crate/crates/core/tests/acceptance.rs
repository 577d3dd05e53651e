//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_character, gram_rows, ints, v, zero};
use gvlat::catalog;
use gvlat::cocycle::verify_sigma;
use gvlat::extension::{build_algebra, local_modules, verify_equivalence};
use gvlat::fock::{
    check_associativity_numeric, check_skew_symmetry, check_virasoro, conformal_weight,
    contragredient_weight, ModeAlgebra,
};
use gvlat::gvcat::{verify_axioms_exhaustive, GVCategory};
use gvlat::io::{load_data, LatticeInput};
use gvlat::linalg::{sub, QVec};
use gvlat::modular::{
    character_qseries, check_t_termwise, s_matrix, verify_s_numeric, verlinde_table,
};
use gvlat::scalar::{rat, rem_euclid, Phase, Rational};
use gvlat::{BosonicLatticeData, Coset, Exec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// A1, A2 and the order-8 lattice, each with `ff = 0` and one nonzero coset.
fn test_lattices() -> Vec<(&'static str, BosonicLatticeData)> {
    vec![
        ("A1", catalog::a1(rat(0, 1))),
        ("A1(ξ=1/2)", catalog::a1(rat(1, 2))),
        ("A2", catalog::a2(zero(2))),
        ("A2(ξ=ω)", catalog::a2(v(&[(2, 3), (1, 3)]))),
        ("L8", catalog::rank2_order8(zero(2))),
        ("L8(ξ)", catalog::rank2_order8(v(&[(0, 1), (1, 2)]))),
    ]
}

fn labels(data: &BosonicLatticeData) -> Vec<Coset> {
    data.discriminant_enumerate().expect("full rank")
}

fn half_rank_samples(n: usize, seed: u64) -> Vec<QVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            v(&[
                (rng.gen_range(-20..=20), 1),
                (rng.gen_range(-30..=30), rng.gen_range(1..=9)),
            ])
        })
        .collect()
}

fn axiom_suite() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (name, data) in test_lattices() {
        let n = labels(&data).len();
        let cat = GVCategory::new(data);
        let reports = verify_axioms_exhaustive(&cat, Exec::default()).map_err(|e| e.to_string())?;
        let expected = [n.pow(4), n.pow(3), n.pow(3), n * n, n];
        for (r, want) in reports.iter().zip(expected) {
            ensure!(r.pass, "{name}: {} fails at {:?}", r.axiom, r.witness);
            ensure!(
                r.checked == want,
                "{name}: {} covered {} of {want} tuples",
                r.axiom,
                r.checked
            );
            checked += r.checked;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "{checked} tuples, 0 failures, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn closed_form_values() -> Outcome {
    let cat = GVCategory::new(catalog::half_rank());
    let data = cat.data();
    let frac = |x: &Rational| rem_euclid(x, &rat(1, 1));
    let xs = half_rank_samples(200, 42);
    for (i, x) in xs.iter().enumerate() {
        let y = &xs[(i + 1) % xs.len()];
        let z = &xs[(i + 2) % xs.len()];
        let (cx, cy, cz) = (
            data.coset(x).unwrap(),
            data.coset(y).unwrap(),
            data.coset(z).unwrap(),
        );
        let omega = Phase::new(&x[0] * frac(&y[1]) + frac(&x[1]) * &y[0]);
        ensure!(cat.braiding(&cx, &cy).unwrap() == omega, "Ω at {cx}, {cy}");
        let f = Phase::new(&x[0] * (frac(&y[1]) + frac(&z[1]) - frac(&(&y[1] + &z[1]))));
        ensure!(
            cat.associator(&cx, &cy, &cz).unwrap() == f,
            "F at {cx}, {cy}, {cz}"
        );
        ensure!(
            cat.quadratic_form(&cx) == Phase::turns(&(&x[0] * frac(&x[1]))),
            "q at {cx}"
        );
        ensure!(
            cat.twist(&cx) == Phase::turns(&((&x[0] - rat(1, 1)) * frac(&x[1]))),
            "Q at {cx}"
        );
    }
    for n in -5..=5 {
        let h = conformal_weight(data, &ints(&[0, n])).map_err(|e| e.to_string())?;
        ensure!(h == rat(-n, 1), "h at n = {n} is {h}");
    }
    let c = ModeAlgebra::new(data).central_charge();
    ensure!(c == rat(2, 1), "c = {c}");
    Ok("Ω, F, q, Q on 200 labels; h_{nβ} = −n for |n| ≤ 5; c = 2".into())
}

fn cross_realization() -> Outcome {
    let mut checked = 0;
    let mut compare = |cat: &GVCategory, ls: &[Coset], exhaustive: bool| -> Result<(), String> {
        let hopf = cat.hopf();
        for (i, a) in ls.iter().enumerate() {
            ensure!(hopf.ribbon(a) == cat.twist(a).inv(), "ribbon at {a}");
            checked += 1;
            let partners: Vec<&Coset> = if exhaustive {
                ls.iter().collect()
            } else {
                vec![&ls[(i + 1) % ls.len()]]
            };
            for b in &partners {
                ensure!(
                    hopf.r_matrix(a, b) == cat.braiding(a, b).unwrap(),
                    "R at {a}, {b}"
                );
                checked += 1;
                let thirds: Vec<&Coset> = if exhaustive {
                    ls.iter().collect()
                } else {
                    vec![&ls[(i + 2) % ls.len()]]
                };
                for c in thirds {
                    ensure!(
                        hopf.coassociator(a, b, c) == cat.associator(a, b, c).unwrap(),
                        "Φ at {a}, {b}, {c}"
                    );
                    checked += 1;
                }
            }
        }
        Ok(())
    };
    for (_, data) in test_lattices() {
        let ls = labels(&data);
        compare(&GVCategory::new(data), &ls, true)?;
    }
    let half = GVCategory::new(catalog::half_rank());
    let ls: Vec<Coset> = half_rank_samples(200, 7)
        .iter()
        .map(|x| half.data().coset(x).unwrap())
        .collect();
    compare(&half, &ls, false)?;
    Ok(format!("{checked} comparisons"))
}

fn voa_consistency() -> Outcome {
    let mut details = Vec::new();
    let rank_le_two = [
        catalog::a1(rat(1, 2)),
        catalog::a2(v(&[(2, 3), (1, 3)])),
        catalog::rank2_order8(v(&[(0, 1), (1, 2)])),
        catalog::half_rank(),
    ];
    for data in &rank_le_two {
        let weights = vec![zero(data.dim()), data.ff_rep().to_vec()];
        let r = check_virasoro(data, &weights, 6, 3).map_err(|e| e.to_string())?;
        ensure!(r.pass, "Virasoro: {:?}", r.witness);
    }
    details.push("Virasoro exact at level 6".to_string());

    let mut pairs = 0;
    for (name, data) in test_lattices() {
        let ls = labels(&data);
        let cat = GVCategory::new(data);
        for a in &ls {
            for b in &ls {
                let r = check_skew_symmetry(&cat, a, b, 3).map_err(|e| e.to_string())?;
                let braiding = cat.braiding(a, b).unwrap();
                ensure!(
                    r.pass && r.extracted.as_ref() == Some(&braiding),
                    "{name}: skew at {a}, {b}: {r:?}"
                );
                pairs += 1;
            }
        }
    }
    details.push(format!("skew-symmetry on {pairs} pairs"));

    let start = Instant::now();
    let (x1, x2) = (rat(5, 2), rat(3, 2));
    let mut worst: f64 = 0.0;
    let mut triples = 0;
    for data in [catalog::a1(rat(0, 1)), catalog::a2(zero(2))] {
        let ls = labels(&data);
        let cat = GVCategory::new(data);
        for a in &ls {
            for b in &ls {
                for c in &ls {
                    let r = check_associativity_numeric(&cat, a, b, c, &x1, &x2, 12, 1e-6)
                        .map_err(|e| e.to_string())?;
                    let expected = cat.associator(a, b, c).unwrap().to_complex();
                    // the associator is ±1 on these lattices
                    let deviation = (r.ratio - expected.re).abs();
                    ensure!(
                        expected.im.abs() < 1e-12 && deviation < 1e-6,
                        "associativity at {a}, {b}, {c}: {r:?}"
                    );
                    worst = worst.max(deviation);
                    triples += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(
        elapsed < Duration::from_secs(60),
        "associativity took {elapsed:?}"
    );
    details.push(format!(
        "associativity on {triples} triples, max error {worst:.1e}, {:.1}s",
        elapsed.as_secs_f64()
    ));
    Ok(details.join("; "))
}

fn contragredient() -> Outcome {
    let mut checked = 0;
    let mut cases: Vec<(BosonicLatticeData, Vec<Coset>)> = test_lattices()
        .into_iter()
        .map(|(_, d)| {
            let ls = labels(&d);
            (d, ls)
        })
        .collect();
    let half = catalog::half_rank();
    let ls = half_rank_samples(50, 3)
        .iter()
        .map(|x| half.coset(x).unwrap())
        .collect();
    cases.push((half, ls));
    for (data, ls) in cases {
        let cat = GVCategory::new(data.clone());
        let two_xi: QVec = data.ff_rep().iter().map(|x| x * rat(2, 1)).collect();
        for rho in &ls {
            let w = contragredient_weight(&data, rho).map_err(|e| e.to_string())?;
            let expected = data.coset(&sub(&two_xi, rho.rep())).unwrap();
            ensure!(
                w == expected && w == cat.dual_object(rho),
                "at {rho}: {w} vs {expected}"
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} labels"))
}

fn modular_suite() -> Outcome {
    let mut worst_unitary: f64 = 0.0;
    let mut worst_verlinde: f64 = 0.0;
    for (name, data) in test_lattices() {
        let s = s_matrix(&data).map_err(|e| e.to_string())?;
        worst_unitary = worst_unitary.max(s.unitarity_defect());
        ensure!(s.unitarity_defect() < 1e-9, "{name}: S not unitary");
        let cat = GVCategory::new(data.clone());
        let (ls, table) = verlinde_table(&data).map_err(|e| e.to_string())?;
        for (&(l, m, r), value) in &table {
            let delta = if cat.fuse(&ls[l], &ls[m]).unwrap() == ls[r] {
                1.0
            } else {
                0.0
            };
            let deviation = (value.re - delta).hypot(value.im);
            worst_verlinde = worst_verlinde.max(deviation);
            ensure!(
                deviation < 1e-9,
                "{name}: Verlinde at ({l}, {m}, {r}) is {value}"
            );
        }
    }
    let mut worst_s: f64 = 0.0;
    for (name, data) in [("A1", catalog::a1(rat(0, 1))), ("A2", catalog::a2(zero(2)))] {
        for t in [0.8, 1.0, 1.3] {
            let r = verify_s_numeric(&data, t, None, 1e-6).map_err(|e| e.to_string())?;
            ensure!(
                r.max_deviation < 1e-6,
                "{name}: S check at t = {t} deviates by {}",
                r.max_deviation
            );
            worst_s = worst_s.max(r.max_deviation);
        }
    }
    let mut discrepancies = Vec::new();
    for (name, data) in test_lattices() {
        for g in labels(&data) {
            let r = check_t_termwise(&data, &g, &rat(10, 1)).map_err(|e| e.to_string())?;
            ensure!(
                r.derived_matches,
                "{name}: derived T-phase fails termwise at {g}"
            );
            ensure!(
                !r.paper_matches,
                "{name}: Paper-convention T-phase unexpectedly matches at {g}"
            );
            // the gap is e^{−iπ n/12}
            ensure!(
                r.paper_discrepancy == Phase::new(rat(-(data.dim() as i64), 12)),
                "{name}: gap at {g}"
            );
            let gap = format!("{}: e^(-iπ·{}/12)", name, data.dim());
            if !discrepancies.contains(&gap) {
                discrepancies.push(gap);
            }
        }
    }
    Ok(format!(
        "unitarity {worst_unitary:.1e}, S-check {worst_s:.1e}, Verlinde {worst_verlinde:.1e}; \
         T derived matches to order 10, Paper convention off by {}",
        discrepancies.join(", ")
    ))
}

fn character_oracle() -> Outcome {
    let order = rat(6, 1);
    let mut coefficients = 0;
    for (name, data) in test_lattices().into_iter().take(4) {
        let gram = gram_rows(&data);
        for g in labels(&data) {
            let chi = character_qseries(&data, &g, &rat(7, 1)).map_err(|e| e.to_string())?;
            let brute = brute_character(&data, &gram, g.rep(), 6, &order);
            for (e, c) in &brute {
                ensure!(
                    chi.coefficient(e) == rat(*c, 1),
                    "{name} {g}: coefficient of q^{e}"
                );
                coefficients += 1;
            }
            for (e, c) in chi.terms() {
                if e <= order {
                    ensure!(
                        brute.get(&e).is_some_and(|b| rat(*b, 1) == *c),
                        "{name} {g}: extra term q^{e}"
                    );
                }
            }
        }
    }
    Ok(format!("{coefficients} coefficients on A1 and A2"))
}

fn extension_suite() -> Outcome {
    let mut details = Vec::new();
    for (name, data2, k, det) in [
        ("A1/2A1", catalog::a1(rat(0, 1)), 2, 2),
        ("A2/3A2", catalog::a2(zero(2)), 3, 3),
    ] {
        let data1 = catalog::scaled(&data2, k);
        let alg = build_algebra(&data1, &data2).map_err(|e| e.to_string())?;
        let sigma = verify_sigma(alg.base(), alg.sigma());
        ensure!(sigma.pass(), "{name}: σ fails {sigma:?}");
        let classes = local_modules(&alg).map_err(|e| e.to_string())?;
        ensure!(
            classes.len() == det,
            "{name}: {} local classes, expected {det}",
            classes.len()
        );
        let report = verify_equivalence(&alg, 200, 11).map_err(|e| e.to_string())?;
        for c in &report.checks {
            ensure!(c.pass, "{name}: {} fails at {:?}", c.property, c.witness);
        }
        ensure!(report.field_cocycle.pass(), "{name}: τ is not a 2-cocycle");
        details.push(format!(
            "{name}: |Λ₂/Λ₁| = {}, {} classes",
            alg.support().len(),
            classes.len()
        ));
    }
    Ok(details.join("; "))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Value {
    let p: i64 = rng.gen_range(-5..=5);
    match rng.gen_range(0..3) {
        0 => json!(format!("{p}/{}", rng.gen_range(1..=6))),
        _ => json!(p),
    }
}

fn robustness() -> Outcome {
    let named = [
        (
            json!({"dim": 1, "gram": [[1]], "lattice_basis": [[1]], "ff": [0]}),
            "OddLattice",
        ),
        (
            json!({"dim": 2, "gram": [[1, 1], [1, 1]], "lattice_basis": [[1, 0]], "ff": [0, 0]}),
            "DegenerateForm",
        ),
        (
            json!({"dim": 1, "gram": [[2]], "lattice_basis": [[1]], "ff": ["1/3"]}),
            "FFNotInDual",
        ),
    ];
    for (input, error) in &named {
        match load_data(&input.to_string()) {
            Err(e) => ensure!(e.name() == *error, "expected {error}, got {}", e.name()),
            Ok(_) => return Err(format!("{error} input was accepted")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut accepted = 0;
    for i in 0..1000 {
        let dim = rng.gen_range(1..=3);
        let mut gram = vec![vec![json!(0); dim]; dim];
        for a in 0..dim {
            for b in a..dim {
                let x = random_rational(&mut rng);
                gram[a][b] = x.clone();
                gram[b][a] = x;
            }
        }
        let rank = rng.gen_range(0..=dim);
        let basis: Vec<Vec<Value>> = (0..rank)
            .map(|_| (0..dim).map(|_| random_rational(&mut rng)).collect())
            .collect();
        let ff: Vec<Value> = (0..dim).map(|_| random_rational(&mut rng)).collect();
        let text = json!({"dim": dim, "gram": gram, "lattice_basis": basis, "ff": ff}).to_string();
        let outcome = catch_unwind(AssertUnwindSafe(|| -> Option<()> {
            let data = load_data(&text).ok()?;
            let cat = GVCategory::new(data.clone());
            let mut local = ChaCha8Rng::seed_from_u64(i);
            let a = data.random_coset(&mut local);
            let b = data.random_coset(&mut local);
            cat.check_pentagon(&a, &b, &a, &b);
            cat.check_hexagons(&a, &b, &a);
            let _ = cat.dual_object(&a);
            let _ = LatticeInput::from_data(&data).build().ok()?;
            Some(())
        }));
        match outcome {
            Ok(Some(())) => accepted += 1,
            Ok(None) => {}
            Err(_) => return Err(format!("panic on input {text}")),
        }
    }
    Ok(format!(
        "named errors OK; 1000 fuzz inputs, {accepted} valid, no crash"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("axiom suite", axiom_suite),
        ("closed-form values", closed_form_values),
        ("cross-realization", cross_realization),
        ("VOA consistency", voa_consistency),
        ("contragredient", contragredient),
        ("modular suite", modular_suite),
        ("character oracle", character_oracle),
        ("extension suite", extension_suite),
        ("robustness", robustness),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS ({detail})", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} ({name}): FAIL ({why})", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
