//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lrb_core::families::{braid_faces, free_lrb, move_to_front_measure};
use lrb_core::lattice::{build_support_lattice, SupportLattice};
use lrb_core::linalg::rational::{integer, rational};
use lrb_core::linalg::{poly_product_of_linear_factors, Rational, RationalMatrix};
use lrb_core::semigroup::{ElementId, MultiplicationTable};
use lrb_core::spectra::{
    algebra_multiply, build_eigen_polys, lambda_table, support_decompose, multiply_by_linear_factors,
    regular_representation, spectrum_report, ActionSide, WeightedElement,
};
use lrb_core::walks::{check_strict_monotonicity, measure_report, validate_probability};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEED: u64 = 0x5eed;

type Check = fn() -> Result<String, String>;

struct Instance {
    name: &'static str,
    t: MultiplicationTable,
    l: SupportLattice,
}

fn instance(name: &'static str, t: MultiplicationTable) -> Instance {
    let l = build_support_lattice(&t).unwrap();
    Instance { name, t, l }
}

fn small_instances() -> Vec<Instance> {
    vec![
        instance("free_lrb(2)", free_lrb(2).unwrap()),
        instance("free_lrb(3)", free_lrb(3).unwrap()),
        instance("braid_faces(3)", braid_faces(3).unwrap()),
    ]
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.random_range(-6i64..=6);
    let den = rng.random_range(1i64..=7);
    rational(num, den)
}

/// Random element with each coefficient nonzero with probability 3/4.
fn random_element(rng: &mut ChaCha8Rng, t: &MultiplicationTable) -> WeightedElement {
    let mut w = WeightedElement::zero();
    for s in t.elements() {
        if rng.random_bool(0.75) {
            w.add_term(s, &random_rational(rng));
        }
    }
    w
}

/// `λ_{σ(s)}` straight from the key fact: the sum of `w_t` over `t` with `st = s`.
fn lambda_by_key_fact(s: ElementId, w: &WeightedElement, t: &MultiplicationTable) -> Rational {
    w.terms().filter(|&(x, _)| t.product(s, x) == s).map(|(_, c)| c.clone()).sum()
}

fn hypothesis_instances(rng: &mut ChaCha8Rng, inst: &Instance, count: usize) -> Vec<WeightedElement> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w = random_element(rng, &inst.t);
        if lambda_table(&w, &inst.l).unwrap().hypothesis_ok() {
            out.push(w);
        }
    }
    out
}

fn product_of_shifts(m: &RationalMatrix, roots: &[Rational]) -> RationalMatrix {
    roots.iter().fold(RationalMatrix::identity(m.rows()), |acc, r| acc.mul(&m.shifted(r).unwrap()).unwrap())
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for inst in small_instances() {
        for w in hypothesis_instances(&mut rng, &inst, 100) {
            let lt = lambda_table(&w, &inst.l).unwrap();
            let roots = lt.distinct();
            let one = WeightedElement::unit(inst.t.identity());
            if !multiply_by_linear_factors(&one, &w, roots, &inst.t).is_zero() {
                return Err(format!("{}: product nonzero in the algebra", inst.name));
            }
            let m = regular_representation(&w, &inst.t, ActionSide::Right).unwrap();
            if !product_of_shifts(&m, roots).is_zero() {
                return Err(format!("{}: matrix product nonzero", inst.name));
            }
            checked += 1;
        }
    }
    within(start, Duration::from_secs(30), format!("{checked} elements annihilated"))
}

fn criterion_2() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut checked = 0;
    for inst in small_instances() {
        let t = &inst.t;
        let l = &inst.l;
        for s in t.elements() {
            for x in t.elements() {
                if !l.leq(l.sigma(s), l.sigma(x)) && !l.lt(l.sigma(t.product(s, x)), l.sigma(s)) {
                    return Err(format!("{}: no strict drop for {} * {}", inst.name, t.label(s), t.label(x)));
                }
            }
        }
        for _ in 0..100 {
            let w = random_element(&mut rng, t);
            for s in t.elements() {
                let d = support_decompose(s, &w, t, l).map_err(|e| format!("{}: {e}", inst.name))?;
                if d.scalar != lambda_by_key_fact(s, &w, t) {
                    return Err(format!("{}: scalar for {} disagrees", inst.name, t.label(s)));
                }
                if d.residual.support().any(|y| !l.lt(l.sigma(y), l.sigma(s))) {
                    return Err(format!("{}: residual for {} not below its support", inst.name, t.label(s)));
                }
                let lhs = d.residual.add(&WeightedElement::term(s, d.scalar.clone()));
                if lhs != algebra_multiply(&WeightedElement::unit(s), &w, t) {
                    return Err(format!("{}: decomposition of {} * w fails", inst.name, t.label(s)));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} decompositions, 0 failures"))
}

fn criterion_3() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for inst in small_instances() {
        for w in hypothesis_instances(&mut rng, &inst, 100) {
            let lt = lambda_table(&w, &inst.l).unwrap();
            let polys = build_eigen_polys(&lt, &inst.l).unwrap();
            for s in inst.t.elements() {
                let roots = polys.p_roots(inst.l.sigma(s));
                if !multiply_by_linear_factors(&WeightedElement::unit(s), &w, roots, &inst.t).is_zero() {
                    return Err(format!("{}: s = {} not killed", inst.name, inst.t.label(s)));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} products vanish"))
}

fn criterion_4() -> Result<String, String> {
    let mut tables = Vec::new();
    for n in 1..=4 {
        tables.push((format!("free_lrb({n})"), free_lrb(n).unwrap()));
        tables.push((format!("braid_faces({n})"), braid_faces(n).unwrap()));
    }
    let mut pairs = 0usize;
    for (name, t) in &tables {
        let l = build_support_lattice(t).unwrap();
        // containment of the ideals computed from scratch
        let ideal = |s: ElementId| -> Vec<bool> {
            let mut v = vec![false; t.len()];
            for x in t.elements() {
                v[t.product(x, s).0] = true;
            }
            v
        };
        let ideals: Vec<Vec<bool>> = t.elements().map(ideal).collect();
        for s in t.elements() {
            for x in t.elements() {
                let subset = ideals[s.0].iter().zip(&ideals[x.0]).all(|(a, b)| !a || *b);
                if subset != l.leq(l.sigma(s), l.sigma(x)) {
                    return Err(format!("{name}: order mismatch at ({}, {})", t.label(s), t.label(x)));
                }
                if subset != (t.product(s, x) == s) {
                    return Err(format!("{name}: key fact fails at ({}, {})", t.label(s), t.label(x)));
                }
                if l.sigma(t.product(s, x)) != l.meet(l.sigma(s), l.sigma(x)) {
                    return Err(format!("{name}: support of ({}, {}) is not the meet", t.label(s), t.label(x)));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs over {} tables", tables.len()))
}

fn criterion_5() -> Result<String, String> {
    let start = Instant::now();
    let t = free_lrb(3).unwrap();
    let l = build_support_lattice(&t).unwrap();
    let weights = [rational(1, 2), rational(1, 3), rational(1, 6)];
    let w = move_to_front_measure(&weights).unwrap();
    let r = spectrum_report(&w, &t, &l, ActionSide::Right).map_err(|e| e.to_string())?;

    let mut lambdas = r.lambda_table.values().to_vec();
    lambdas.sort();
    let mut subset_sums: Vec<Rational> = (0..8u32)
        .map(|mask| (0..3).filter(|i| mask >> i & 1 == 1).map(|i| weights[i].clone()).sum())
        .collect();
    subset_sums.sort();
    let expected: Vec<Rational> = [0, 1, 2, 3, 3, 4, 5, 6].iter().map(|&k| rational(k, 6)).collect();
    if lambdas != subset_sums || lambdas != expected {
        return Err(format!("lambda multiset {lambdas:?}"));
    }
    if !r.hypothesis_ok() {
        return Err("hypothesis fails".into());
    }
    let measure = validate_probability(w.clone()).map_err(|e| e.to_string())?;
    if !check_strict_monotonicity(&r.lambda_table, &l).ok() || !measure_report(&measure, &t, &l).unwrap().monotonicity.ok() {
        return Err("monotonicity fails".into());
    }
    let candidates: Vec<Rational> = (0..=6).map(|k| rational(k, 6)).collect();
    let roots: Vec<Rational> = candidates.iter().filter(|c| r.minimal_poly.eval(c).is_zero()).cloned().collect();
    if !r.squarefree || r.minimal_poly != poly_product_of_linear_factors(&roots) {
        return Err(format!("minimal polynomial {} is not squarefree over the subset sums", r.minimal_poly));
    }
    if !r.all_checks_pass() {
        return Err("a verification flag is false".into());
    }
    within(start, Duration::from_secs(5), format!("minimal polynomial {}", r.minimal_poly))
}

fn lrb_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lrb"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = lrb_bin().args(args).output().expect("spawn lrb");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn criterion_6() -> Result<String, String> {
    let t = free_lrb(2).unwrap();
    let l = build_support_lattice(&t).unwrap();
    let ab = t.find_label("12").unwrap();
    let ba = t.find_label("21").unwrap();
    let w = WeightedElement::from_terms([(ab, integer(1)), (ba, integer(-1))]);
    let r = spectrum_report(&w, &t, &l, ActionSide::Right).map_err(|e| e.to_string())?;
    if r.lambda_table.values().iter().any(|v| !v.is_zero()) {
        return Err("some lambda is nonzero".into());
    }
    if r.hypothesis_ok() || r.diagonalizable {
        return Err("hypothesis or diagonalizability unexpectedly true".into());
    }
    if r.minimal_poly != poly_product_of_linear_factors(&[integer(0), integer(0)]) {
        return Err(format!("minimal polynomial {}", r.minimal_poly));
    }

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("free2.json");
    let weights = dir.path().join("w.json");
    let (code, _) = run_cli(&["family", "free", "--n", "2", "--out", path_str(&table)]);
    if code != 0 {
        return Err(format!("family exited {code}"));
    }
    std::fs::write(&weights, r#"{"weights": {"12": "1", "21": "-1"}}"#).unwrap();
    let (code, stdout) = run_cli(&["spectrum", path_str(&table), "--weights", path_str(&weights)]);
    if code != 3 {
        return Err(format!("spectrum exited {code}, expected 3"));
    }
    let report: Value = serde_json::from_slice(&stdout).map_err(|e| e.to_string())?;
    let coefficients = &report["minimal_polynomial"]["coefficients"];
    if coefficients != &serde_json::json!(["0", "0", "1"]) || report["diagonalizable"] != Value::Bool(false) {
        return Err(format!("CLI report disagrees: {coefficients} / {}", report["diagonalizable"]));
    }
    Ok("all lambdas 0, minimal polynomial z^2, CLI exit 3".into())
}

fn criterion_7() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let t = free_lrb(3).unwrap();
    let l = build_support_lattice(&t).unwrap();
    for k in 0..50 {
        let raw: Vec<i64> = (0..3).map(|_| rng.random_range(1i64..=20)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Rational> = raw.iter().map(|&x| rational(x, total)).collect();
        let p = validate_probability(move_to_front_measure(&weights).unwrap()).map_err(|e| e.to_string())?;
        let report = measure_report(&p, &t, &l).map_err(|e| e.to_string())?;
        if !report.generates_all || !report.monotonicity.ok() {
            return Err(format!("measure {k} ({raw:?}) fails"));
        }
    }
    let letter = t.find_label("1").unwrap();
    let p = validate_probability(WeightedElement::unit(letter)).unwrap();
    let report = measure_report(&p, &t, &l).map_err(|e| e.to_string())?;
    if report.generates_all || report.monotonicity.ok() {
        return Err("point mass on a letter should fail on S".into());
    }
    let restricted = report.restricted.ok_or("no restricted recomputation")?;
    if !restricted.monotonicity.ok() || restricted.submonoid.table.len() != 2 {
        return Err("restricted check fails".into());
    }
    Ok("50 measures generate and are strictly monotone; point mass recovers after restriction".into())
}

fn criterion_8() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut summary = Vec::new();
    for (name, t, elements, ideals) in
        [("free_lrb(4)", free_lrb(4).unwrap(), 65, 16), ("braid_faces(4)", braid_faces(4).unwrap(), 75, 15)]
    {
        let l = build_support_lattice(&t).unwrap();
        if t.len() != elements || l.len() != ideals {
            return Err(format!("{name}: {} elements, {} ideals", t.len(), l.len()));
        }
        let inst = Instance { name, t, l };
        let w = hypothesis_instances(&mut rng, &inst, 1).remove(0);
        let r = spectrum_report(&w, &inst.t, &inst.l, ActionSide::Right).map_err(|e| e.to_string())?;
        let flags = [
            r.hypothesis_ok(),
            r.decomposition_ok,
            r.local_annihilation_ok == Some(true),
            r.annihilation_ok == Some(true),
            r.minimal_poly_divides_product == Some(true),
            r.squarefree,
            r.diagonalizable,
        ];
        if !flags.iter().all(|&f| f) {
            return Err(format!("{name}: flags {flags:?}"));
        }
        let dims: usize = r.kernel_dims.iter().map(|(_, d)| d).sum();
        if dims != inst.t.len() {
            return Err(format!("{name}: eigenspaces cover {dims} of {}", inst.t.len()));
        }
        summary.push(format!("{name} degree {}", r.minimal_poly.degree().unwrap_or(0)));
    }
    within(start, Duration::from_secs(300), summary.join(", "))
}

fn criterion_9() -> Result<String, String> {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let free3 = p("free3.json");
    let braid3 = p("braid3.json");
    run_cli(&["family", "free", "--n", "3", "--out", path_str(&free3)]);
    run_cli(&["family", "braid", "--n", "3", "--out", path_str(&braid3)]);
    let mtf = p("mtf.json");
    std::fs::write(&mtf, r#"{"weights": {"1": "1/2", "2": "1/3", "3": "1/6"}}"#).unwrap();
    let letter = p("letter.json");
    std::fs::write(&letter, r#"{"weights": {"1": "1"}}"#).unwrap();
    let faces = p("faces.json");
    std::fs::write(&faces, r#"{"weights": {"1|23": "1/3", "2|13": "1/3", "3|12": "1/3"}}"#).unwrap();

    let f3 = path_str(&free3);
    let b3 = path_str(&braid3);
    let commands: Vec<Vec<&str>> = vec![
        vec!["family", "free", "--n", "3"],
        vec!["family", "braid", "--n", "4"],
        vec!["validate", f3],
        vec!["validate", b3],
        vec!["lattice", f3],
        vec!["lattice", b3, "--dot"],
        vec!["spectrum", f3, "--weights", path_str(&mtf)],
        vec!["spectrum", f3, "--weights", path_str(&mtf), "--side", "left"],
        vec!["spectrum", b3, "--weights", path_str(&faces)],
        vec!["walk", f3, "--weights", path_str(&mtf)],
        vec!["walk", f3, "--weights", path_str(&letter), "--states", "all"],
        vec!["walk", b3, "--weights", path_str(&faces)],
    ];
    for args in &commands {
        let (c1, o1) = run_cli(args);
        let (c2, o2) = run_cli(args);
        if c1 != c2 || o1 != o2 || o1.is_empty() {
            return Err(format!("`lrb {}` differs between runs (exit {c1}/{c2})", args.join(" ")));
        }
        let out1 = p("a.out");
        let out2 = p("b.out");
        let mut with_out = args.clone();
        with_out.extend(["--out", path_str(&out1)]);
        run_cli(&with_out);
        with_out.pop();
        with_out.push(path_str(&out2));
        run_cli(&with_out);
        let (f1, f2) = (std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
        if f1 != f2 || f1 != o1 {
            return Err(format!("`lrb {}` --out output differs", args.join(" ")));
        }
    }
    Ok(format!("{} commands byte-identical across runs", commands.len()))
}

fn within(start: Instant, limit: Duration, detail: String) -> Result<String, String> {
    let elapsed = start.elapsed();
    if elapsed > limit {
        Err(format!("{detail}, but took {elapsed:.1?} (limit {limit:?})"))
    } else {
        Ok(format!("{detail} in {elapsed:.1?}"))
    }
}

fn main() {
    // quiet the default hook; failures are reported below
    panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, Check); 9] = [
        ("product of (w - lambda) vanishes", criterion_1),
        ("decomposition of s*w", criterion_2),
        ("s * p_sigma(s)(w) vanishes", criterion_3),
        ("support order and meet", criterion_4),
        ("move-to-front spectrum", criterion_5),
        ("non-diagonalizable sentinel", criterion_6),
        ("probability measures", criterion_7),
        ("scale", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
