use std::path::Path;

use gvlat::cocycle::{solve_sigma_brute_force, verify_sigma};
use gvlat::extension::{build_algebra, local_modules, verify_equivalence};
use gvlat::fock::{
    check_associativity_numeric, check_current_commutators, check_skew_symmetry, check_virasoro,
    conformal_weight, contragredient_weight, ModeAlgebra,
};
use gvlat::gvcat::{verify_axioms_exhaustive, verify_axioms_sampled, AxiomReport, GVCategory};
use gvlat::io::{load_data, parse_rational_vector, vector_strings, InputError};
use gvlat::lattice::LatticeError;
use gvlat::modular::{
    character_factorize, character_qseries, check_t_termwise, s_matrix, s_squared_permutation,
    t_phase, verify_s_numeric, verlinde_table, TConvention,
};
use gvlat::scalar::{format_rational, parse_rational, rat};
use gvlat::{BosonicLatticeData, Coset, Exec, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{read_input, CliError, Input, LabelArgs, Outcome};

fn load(input: &Input) -> Result<BosonicLatticeData, CliError> {
    load_path(&input.file)
}

fn load_path(path: &Path) -> Result<BosonicLatticeData, CliError> {
    Ok(load_data(&read_input(path)?)?)
}

fn parse_label(data: &BosonicLatticeData, text: &str) -> Result<Coset, CliError> {
    let v = parse_rational_vector(text)?;
    if v.len() != data.dim() {
        return Err(InputError::Malformed(format!(
            "label {text:?} has {} entries, expected {}",
            v.len(),
            data.dim()
        ))
        .into());
    }
    Ok(data.coset(&v)?)
}

fn parse_order(text: &str) -> Result<Rational, CliError> {
    let order = parse_rational(text).map_err(|e| CliError::Usage(format!("--order: {e}")))?;
    if order < rat(0, 1) || order > rat(200, 1) {
        return Err(CliError::Usage("--order must lie in [0, 200]".into()));
    }
    Ok(order)
}

fn finite_labels(data: &BosonicLatticeData) -> Result<Vec<Coset>, CliError> {
    Ok(data.discriminant_enumerate()?)
}

/// Labels named on the command line, else the whole group, else `0` and `ξ`.
fn selected_labels(data: &BosonicLatticeData, args: &LabelArgs) -> Result<Vec<Coset>, CliError> {
    if !args.labels.is_empty() {
        return args.labels.iter().map(|l| parse_label(data, l)).collect();
    }
    match data.discriminant_enumerate() {
        Ok(labels) => Ok(labels),
        Err(LatticeError::InfiniteDiscriminant) => {
            let mut labels = vec![data.zero_coset()];
            if !data.ff().is_zero() {
                labels.push(data.ff().clone());
            }
            Ok(labels)
        }
        Err(e) => Err(e.into()),
    }
}

fn axioms_pass(reports: &[AxiomReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports are plain data")
}

pub fn validate(input: &Input) -> Outcome {
    let data = load(input)?;
    let cat = GVCategory::new(data.clone());
    let (v, n, f, d) = data.decomposition().block_sizes();
    Ok((
        true,
        json!({
            "dim": data.dim(),
            "rank": data.rank(),
            "full_rank": data.is_full_rank(),
            "discriminant_order": data.discriminant_order().map(|o| o.to_string()),
            "invariant_factors": data.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "blocks": { "v": v, "null": n, "f": f, "d": d },
            "ff": data.ff(),
            "dualizing_object": cat.dualizing_object(),
            "convention": data.convention(),
        }),
    ))
}

pub fn decompose(input: &Input) -> Outcome {
    let data = load(input)?;
    let [fv, fn_, ff, fd] = data.components(data.ff_rep());
    Ok((
        true,
        json!({
            "decomposition": data.decomposition(),
            "smith": data.smith_summary(),
            "ff_components": {
                "v": vector_strings(&fv),
                "null": vector_strings(&fn_),
                "f": vector_strings(&ff),
                "d": vector_strings(&fd),
            },
        }),
    ))
}

pub fn structure(input: &Input, max_table: usize) -> Outcome {
    let data = load(input)?;
    let labels = finite_labels(&data)?;
    let cat = GVCategory::new(data);
    let rows: Vec<Value> = labels
        .iter()
        .map(|a| {
            json!({
                "label": a,
                "q": cat.quadratic_form(a),
                "theta": cat.twist(a),
                "dual": cat.dual_object(a),
            })
        })
        .collect();
    let mut body = json!({
        "labels": labels,
        "order": labels.len(),
        "dualizing_object": cat.dualizing_object(),
        "table": rows,
    });
    if labels.len() <= max_table {
        let mut omega = Vec::new();
        let mut assoc = Vec::new();
        for a in &labels {
            let mut row = Vec::new();
            for b in &labels {
                row.push(to_value(&cat.braiding(a, b)?));
                for c in &labels {
                    assoc.push(json!([a, b, c, cat.associator(a, b, c)?]));
                }
            }
            omega.push(Value::Array(row));
        }
        body["omega"] = Value::Array(omega);
        body["associator"] = Value::Array(assoc);
    } else {
        body["tables_omitted"] = json!(format!(
            "group order {} exceeds --max-table {max_table}",
            labels.len()
        ));
    }
    Ok((true, body))
}

pub fn axioms(input: &Input, samples: usize, max_exhaustive: usize, seed: u64) -> Outcome {
    let data = load(input)?;
    let order = data.discriminant_order();
    let exhaustive = order.as_ref().is_some_and(|o| *o <= max_exhaustive.into());
    let cat = GVCategory::new(data);
    let exec = Exec::default();
    let reports = if exhaustive {
        verify_axioms_exhaustive(&cat, exec)?
    } else {
        verify_axioms_sampled(&cat, samples, seed, exec)
    };
    let mut body = json!({
        "mode": if exhaustive { "exhaustive" } else { "sampled" },
        "reports": reports,
    });
    if !exhaustive {
        body["seed"] = json!(seed);
        body["samples"] = json!(samples);
    }
    Ok((axioms_pass(&reports), body))
}

pub fn fuse(input: &Input, a: &str, b: &str) -> Outcome {
    let data = load(input)?;
    let (a, b) = (parse_label(&data, a)?, parse_label(&data, b)?);
    let cat = GVCategory::new(data);
    let product = cat.fuse(&a, &b)?;
    Ok((true, json!({ "a": a, "b": b, "product": product })))
}

pub fn dual(input: &Input, a: &str) -> Outcome {
    let data = load(input)?;
    let a = parse_label(&data, a)?;
    let cat = GVCategory::new(data);
    Ok((
        true,
        json!({
            "label": a,
            "dual": cat.dual_object(&a),
            "dualizing_object": cat.dualizing_object(),
            "twist": cat.twist(&a),
            "dual_twist": cat.twist(&cat.dual_object(&a)),
        }),
    ))
}

pub fn characters(input: &Input, args: &LabelArgs, order: &str) -> Outcome {
    let data = load(input)?;
    let order = parse_order(order)?;
    let labels = selected_labels(&data, args)?;
    let entries: Vec<Value> = labels
        .iter()
        .map(|g| {
            let mut entry = json!({ "factorization": character_factorize(&data, g, &order) });
            match character_qseries(&data, g, &order) {
                Ok(series) => entry["series"] = to_value(&series),
                Err(e) => entry["series_error"] = json!(e.name()),
            }
            entry
        })
        .collect();
    Ok((
        true,
        json!({ "order": format_rational(&order), "characters": entries }),
    ))
}

pub fn tmatrix(input: &Input, args: &LabelArgs, order: &str) -> Outcome {
    let data = load(input)?;
    let order = parse_order(order)?;
    let labels = selected_labels(&data, args)?;
    let mut pass = true;
    let entries: Vec<Value> = labels
        .iter()
        .map(|g| {
            let mut entry = json!({
                "label": g,
                "paper": t_phase(&data, g, TConvention::Paper),
                "derived": t_phase(&data, g, TConvention::Derived),
            });
            match check_t_termwise(&data, g, &order) {
                Ok(report) => {
                    pass &= report.derived_matches;
                    entry["termwise"] = to_value(&report);
                }
                Err(e) => entry["termwise_error"] = json!(e.name()),
            }
            entry
        })
        .collect();
    Ok((
        pass,
        json!({ "order": format_rational(&order), "entries": entries }),
    ))
}

pub fn smatrix(input: &Input) -> Outcome {
    let data = load(input)?;
    let s = s_matrix(&data)?;
    let cat = GVCategory::new(data);
    let squared = s_squared_permutation(&cat)?;
    let defect = s.unitarity_defect();
    let pass =
        defect < 1e-9 && s.is_symmetric() && squared.matches_dual_object && squared.is_involution;
    Ok((
        pass,
        json!({
            "prefactor": s.prefactor(),
            "s": s,
            "symmetric": s.is_symmetric(),
            "unitarity_defect": defect,
            "s_squared": squared,
        }),
    ))
}

pub fn verify_s(input: &Input, ts: &[f64], radius: Option<f64>, tol: f64) -> Outcome {
    if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CliError::Usage("--t values must be positive".into()));
    }
    if radius.is_some_and(|r| !(r.is_finite() && r > 0.0 && r < 1e3)) {
        return Err(CliError::Usage("--radius must lie in (0, 1000)".into()));
    }
    let data = load(input)?;
    let reports = ts
        .iter()
        .map(|&t| verify_s_numeric(&data, t, radius, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok((pass, json!({ "checks": reports })))
}

pub fn verlinde(input: &Input, tol: f64) -> Outcome {
    let data = load(input)?;
    let cat = GVCategory::new(data.clone());
    let (labels, table) = verlinde_table(&data)?;
    let mut max_deviation: f64 = 0.0;
    let mut witness = Value::Null;
    let mut fusion = Vec::new();
    for (&(l, m, r), value) in &table {
        let expected = cat.fuse(&labels[l], &labels[m])? == labels[r];
        let target = if expected { 1.0 } else { 0.0 };
        let deviation = (value.re - target).hypot(value.im);
        if deviation > max_deviation {
            max_deviation = deviation;
            witness = json!([labels[l], labels[m], labels[r]]);
        }
        if expected {
            fusion.push(
                json!({ "a": labels[l], "b": labels[m], "product": labels[r], "n": value.re }),
            );
        }
    }
    let pass = max_deviation < tol;
    Ok((
        pass,
        json!({
            "triples": table.len(),
            "max_deviation": max_deviation,
            "tol": tol,
            "worst": witness,
            "fusion": fusion,
        }),
    ))
}

pub struct FockOptions {
    pub level: u32,
    pub mode_bound: i64,
    pub skew_level: u32,
    pub max_labels: usize,
    pub associativity: bool,
    pub tol: f64,
    pub seed: u64,
}

fn fock_labels(
    data: &BosonicLatticeData,
    max: usize,
    seed: u64,
) -> Result<(Vec<Coset>, bool), CliError> {
    match data.discriminant_enumerate() {
        Ok(mut labels) => {
            labels.truncate(max.max(1));
            Ok((labels, false))
        }
        Err(LatticeError::InfiniteDiscriminant) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut labels = vec![data.zero_coset(), data.ff().clone()];
            while labels.len() < max {
                labels.push(data.random_coset(&mut rng));
            }
            labels.dedup();
            Ok((labels, true))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn fock_check(input: &Input, opts: FockOptions) -> Outcome {
    if opts.level > 12 || opts.skew_level > 6 || !(0..=4).contains(&opts.mode_bound) {
        return Err(CliError::Usage(
            "fock-check needs --level ≤ 12, --skew-level ≤ 6, --mode-bound in 0..=4".into(),
        ));
    }
    let data = load(input)?;
    let cat = GVCategory::new(data.clone());
    let (labels, sampled) = fock_labels(&data, opts.max_labels, opts.seed)?;
    let weights: Vec<_> = labels.iter().map(|l| l.rep().to_vec()).collect();

    let virasoro = check_virasoro(&data, &weights, opts.level, opts.mode_bound)?;
    let currents = check_current_commutators(&data, &weights, opts.level.min(4), opts.mode_bound)?;
    let mut pass = virasoro.pass && currents.pass;

    let mut modules = Vec::new();
    for l in &labels {
        let contragredient = contragredient_weight(&data, l)?;
        let dual = cat.dual_object(l);
        pass &= contragredient == dual;
        modules.push(json!({
            "label": l,
            "conformal_weight": format_rational(&conformal_weight(&data, l.rep())?),
            "contragredient": contragredient,
            "dual_object": dual,
        }));
    }

    let mut skew = Vec::new();
    for a in &labels {
        for b in &labels {
            let report = check_skew_symmetry(&cat, a, b, opts.skew_level)?;
            pass &= report.pass;
            skew.push(report);
        }
    }

    let mut body = json!({
        "central_charge": format_rational(&ModeAlgebra::new(&data).central_charge()),
        "labels_sampled": sampled,
        "virasoro": virasoro,
        "currents": currents,
        "modules": modules,
        "skew_symmetry": skew,
    });
    if sampled {
        body["seed"] = json!(opts.seed);
    }
    if opts.associativity {
        let (x1, x2) = (rat(5, 2), rat(3, 2));
        let mut reports = Vec::new();
        for a in &labels {
            for b in &labels {
                for c in &labels {
                    let report =
                        check_associativity_numeric(&cat, a, b, c, &x1, &x2, 12, opts.tol)?;
                    pass &= report.pass;
                    reports.push(report);
                }
            }
        }
        body["associativity"] = to_value(&reports);
    }
    Ok((pass, body))
}

pub fn extend(base: &Path, target: &Path, samples: usize, brute_force: bool, seed: u64) -> Outcome {
    let data1 = load_path(base)?;
    let data2 = load_path(target)?;
    let alg = build_algebra(&data1, &data2)?;
    let classes = local_modules(&alg)?;
    let report = verify_equivalence(&alg, samples, seed)?;
    let multiplication: Vec<Value> = alg
        .support()
        .iter()
        .flat_map(|a| alg.support().iter().map(move |b| (a, b)))
        .map(|(a, b)| {
            let (sum, sigma) = alg.multiply(a, b).expect("support labels");
            json!([a, b, sum, sigma])
        })
        .collect();
    let mut pass = report.pass();
    let mut body = json!({
            "support": alg.support(),
            "multiplication": multiplication,
            "local_modules": classes,
            "equivalence": report,
            "seed": seed,
    });
    if brute_force {
        body["brute_force"] =
            match solve_sigma_brute_force(&data1, &data2).map_err(gvlat::Error::from)? {
                Some(sigma) => {
                    let check = verify_sigma(alg.base(), &sigma);
                    pass &= check.pass();
                    json!({ "found": true, "sigma": sigma.values(), "check": check })
                }
                None if alg.support().len() > 4 => {
                    json!({ "found": false, "skipped": "quotient larger than 4" })
                }
                None => {
                    pass = false;
                    json!({ "found": false })
                }
            };
    }
    Ok((pass, body))
}
