//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` are expected to fail; the run
//! fails if any other criterion fails or a listed one starts passing.

#[path = "../../core/tests/common/closed_forms.rs"]
mod closed_forms;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;

use qdha_cli::parse::{load_problem, parse_element, Problem};
use qdha_core::cyclotomic::CycScalar;
use qdha_core::deform::{
    check_deformation_laws, extract_mu, graded_dimension_check, h_multiply, DeformationLaw,
    DeformationReport,
};
use qdha_core::families::{bazlov_berenstein, build_family, ReflectionGroupSpec};
use qdha_core::group::Group;
use qdha_core::koszul::{d3_star_constant, d_squared, is_fully_invariant};
use qdha_core::pbw::{diamond_check, ls_check, KappaMap};
use qdha_core::qalgebra::{Monomial, QTuple, SkewElement};
use qdha_core::sampling::{instance_from_seed, InstanceRng, SeedableRng};
use closed_forms::{keys, rank, sign_maps, symmetric_maps};

/// Criteria that fail for reasons recorded in the project notes:
/// G(3,3,4) keeps a one-dimensional cocycle space, and the cyclic example
/// has three basis maps rather than one.
const KNOWN_DEVIATIONS: &[u32] = &[3, 5];

const CYCLIC: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/cyclic3.qdh");

struct Outcome {
    passed: bool,
    detail: String,
}

/// A classified family: its group, q and the kappa basis read back from JSON.
struct Classified {
    label: String,
    problem: Problem,
    basis: Vec<KappaMap>,
}

fn cli_json(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["qdha", "--json"];
    argv.extend_from_slice(args);
    let out = qdha_cli::run(argv);
    let doc = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, doc)
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().filter_map(|s| s.as_str().map(str::to_string)).collect())
        .unwrap_or_default()
}

/// Rebuilds the CLI's basis from its JSON document on one group.
fn read_basis(label: &str, doc: &Value) -> Classified {
    let problem_lines = strings(&doc["problem"]);
    let base = load_problem(&(problem_lines.join("\n") + "\n")).expect("problem lines parse");
    let mut basis = Vec::new();
    for entry in doc["basis"].as_array().into_iter().flatten() {
        let mut lines = problem_lines.clone();
        lines.extend(strings(&entry["kappa_lines"]));
        let p = load_problem(&(lines.join("\n") + "\n")).expect("kappa lines parse");
        let k = p.kappa.expect("nonzero basis element");
        let mut pairs = Vec::new();
        for ((i, j), v) in k.pairs() {
            let moved = v
                .iter()
                .map(|(&g, c)| (base.group.index_of(p.group.element(g)).unwrap(), c.clone()))
                .collect();
            pairs.push(((i, j), moved));
        }
        basis.push(KappaMap::from_pairs(&base.q, pairs).unwrap());
    }
    Classified {
        label: label.to_string(),
        problem: base,
        basis,
    }
}

fn classify(label: &str, args: &[&str]) -> (i32, Option<u64>, Classified) {
    let mut full = vec!["classify"];
    full.extend_from_slice(args);
    let (code, doc) = cli_json(&full);
    (code, doc["dimension"].as_u64(), read_basis(label, &doc))
}

fn all_pass_pbw(c: &Classified) -> bool {
    c.basis.iter().all(|k| {
        ls_check(k, &c.problem.group, &c.problem.q).passed()
            && diamond_check(k, &c.problem.group, &c.problem.q).passed()
    })
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn criterion_1(store: &mut Vec<Classified>) -> Outcome {
    let start = Instant::now();
    let (code, dim, c) = classify("S4", &["--family", "natural", "--m", "1", "--p", "1", "--n", "4"]);
    let pbw = all_pass_pbw(&c);
    let g = &c.problem.group;
    let q = &c.problem.q;
    let closed = symmetric_maps(g, q, 4);
    let k = keys(g, 4);
    let mut both = c.basis.clone();
    both.extend(closed.iter().cloned());
    let (r_found, r_thm, r_both) = (rank(&c.basis, &k), rank(&closed, &k), rank(&both, &k));
    let elapsed = start.elapsed();
    let passed = code == 0
        && dim == Some(5)
        && pbw
        && r_found == 5
        && r_thm == 5
        && r_both == 5
        && elapsed < Duration::from_secs(30);
    store.push(c);
    Outcome {
        passed,
        detail: format!(
            "dimension {dim:?}, ls+diamond {pbw}, ranks found/closed form/union {r_found}/{r_thm}/{r_both}, {}",
            secs(elapsed)
        ),
    }
}

fn criterion_2(store: &mut Vec<Classified>) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in ["1", "2"] {
        let label = format!("G(2,{p},4)");
        let (code, dim, c) = classify(&label, &["--family", "natural", "--m", "2", "--p", p, "--n", "4"]);
        let g = &c.problem.group;
        let k = keys(g, 4);
        let map = sign_maps(g, &c.problem.q, 4).swap_remove(0);
        let mut with = c.basis.clone();
        with.push(map);
        let contains = rank(&with, &k) == rank(&c.basis, &k);
        let pbw = all_pass_pbw(&c);
        ok &= code == 0 && dim == Some(2) && contains && pbw;
        parts.push(format!("{label}: dimension {dim:?}, contains closed-form map {contains}, ls+diamond {pbw}"));
        store.push(c);
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    Outcome {
        passed: ok,
        detail: format!("{}, {}", parts.join("; "), secs(elapsed)),
    }
}

fn criterion_3(store: &mut Vec<Classified>) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, p) in [(3, 1), (3, 3), (4, 1), (4, 2), (4, 4)] {
        let label = format!("G({m},{p},4)");
        let (ms, ps) = (m.to_string(), p.to_string());
        let (code, dim, c) = classify(&label, &["--family", "natural", "--m", &ms, "--p", &ps, "--n", "4"]);
        ok &= code == 0 && dim == Some(0);
        parts.push(format!("{label} {}", dim.map_or("?".into(), |d| d.to_string())));
        if !c.basis.is_empty() {
            store.push(c);
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(600);
    Outcome {
        passed: ok,
        detail: format!("dimensions {}, {}", parts.join(", "), secs(elapsed)),
    }
}

fn criterion_4(store: &mut Vec<Classified>) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut rng = InstanceRng::seed_from_u64(0x5eed);
    let mut sampled = 0;
    for m in [2u32, 4] {
        let label = format!("symplectic G({m},1,3)");
        let ms = m.to_string();
        let (code, dim, c) = classify(&label, &["--family", "symplectic", "--m", &ms, "--n", "3"]);
        ok &= code == 0 && dim == Some(m as u64 + 1);
        parts.push(format!("m={m}: dimension {dim:?}"));
        let (g, q) = build_family(&ReflectionGroupSpec::symplectic(m, 3)).unwrap();
        let nn = q.conductor();
        for d in (1..=m).filter(|d| m % d == 0) {
            for _ in 0..3 {
                let c1 = CycScalar::root_of_unity(nn, rng.gen_range(0..nn as i64));
                let coeffs: BTreeMap<u32, CycScalar> = (1..d)
                    .map(|l| (l, CycScalar::from_int(nn, rng.gen_range(-3..=3))))
                    .collect();
                let k = bazlov_berenstein(&g, m, 3, d, &c1, &coeffs).unwrap();
                ok &= ls_check(&k, &g, &q).passed();
                sampled += 1;
            }
        }
        store.push(c);
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(600);
    Outcome {
        passed: ok,
        detail: format!(
            "{}; {sampled} sampled braided Cherednik maps checked, {}",
            parts.join(", "),
            secs(elapsed)
        ),
    }
}

fn criterion_5(store: &mut Vec<Classified>) -> Outcome {
    let start = Instant::now();
    let (code, doc) = cli_json(&["cocycles", CYCLIC]);
    let c = read_basis("cyclic example", &doc);
    let p = load_problem(&std::fs::read_to_string(CYCLIC).unwrap()).unwrap();
    let given = p.kappa.clone().unwrap();
    let g = &c.problem.group;
    let k = keys(g, 3);
    let mut with = c.basis.clone();
    with.push(given.clone());
    let exact = code == 0 && c.basis.len() == 1 && rank(&with, &k) == 1;
    let basis_words: Vec<String> = doc["basis"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|e| strings(&e["kappa_lines"]).join(" "))
        .collect();

    let pbw_code = qdha_cli::run(["qdha", "pbw", CYCLIC]).code;
    let mul = |x: &str, y: &str| {
        h_multiply(
            &parse_element(x, &p).unwrap(),
            &parse_element(y, &p).unwrap(),
            &given,
            &p.group,
            &p.q,
        )
        .unwrap()
    };
    // v2v1 = q v1v2 - q g, v3v2 = q v2v3, v1v3 = q v3v1, with t marking kappa
    let rel1 = mul("v2", "v1") == parse_element("z^1*v1*v2 - z^1*g*t", &p).unwrap();
    let rel2 = mul("v3", "v2") == parse_element("z^1*v2*v3", &p).unwrap();
    let mut q_v3v1 = mul("v3", "v1");
    q_v3v1 = h_multiply(&parse_element("z^1", &p).unwrap(), &q_v3v1, &given, &p.group, &p.q).unwrap();
    let rel3 = mul("v1", "v3") == q_v3v1;
    let elapsed = start.elapsed();
    store.push(c);
    Outcome {
        passed: exact && pbw_code == 0 && rel1 && rel2 && rel3 && elapsed < Duration::from_secs(1),
        detail: format!(
            "basis [{}], exactly f_12g {exact}, pbw exit {pbw_code}, relations {rel1}/{rel2}/{rel3}, {}",
            basis_words.join("; "),
            secs(elapsed)
        ),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut agree = 0;
    let mut disagreements = Vec::new();
    let mut passing = 0;
    let mut in_bounds = true;
    let total = 256u64;
    for seed in 0..total {
        let inst = instance_from_seed(seed);
        in_bounds &= inst.group.order() <= 24 && inst.q.dim() <= 3;
        let ls = ls_check(&inst.kappa, &inst.group, &inst.q).passed();
        let dia = diamond_check(&inst.kappa, &inst.group, &inst.q).passed();
        let graded = graded_dimension_check(&inst.kappa, &inst.group, &inst.q, 3).passed();
        if ls == dia && dia == graded {
            agree += 1;
            passing += ls as usize;
        } else {
            disagreements.push(format!("seed {seed} ({}): {ls}/{dia}/{graded}", inst.label));
        }
    }
    Outcome {
        passed: in_bounds && disagreements.is_empty(),
        detail: format!(
            "{agree}/{total} agree ({passing} PBW, {} not), bounds respected {in_bounds}{}, {}",
            agree - passing,
            if disagreements.is_empty() { String::new() } else { format!(", first {}", disagreements[0]) },
            secs(start.elapsed())
        ),
    }
}

fn random_q(rng: &mut InstanceRng, n: usize, conductor: u32) -> QTuple {
    let table: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..conductor as i64)).collect();
    QTuple::from_upper_exponents(n, conductor, |i, j| table[i * n + j])
}

fn criterion_7(store: &[Classified], laws: &mut Vec<(String, DeformationReport)>) -> Outcome {
    let start = Instant::now();
    let mut rng = InstanceRng::seed_from_u64(17);
    let mut dd_ok = true;
    for trial in 0..10 {
        let n = 2 + trial % 3;
        let q = random_q(&mut rng, n, [3u32, 4, 5, 6, 12][trial % 5]);
        for m in 2..=n {
            dd_ok &= d_squared(m, &q).is_empty();
        }
    }
    let mut closed = true;
    let mut count = 0;
    for c in store {
        for k in &c.basis {
            let cochain = k.to_cochain();
            closed &= d3_star_constant(&cochain, &c.problem.group, &c.problem.q).is_empty();
            closed &= is_fully_invariant(&c.problem.group, &cochain, &c.problem.q);
            count += 1;
        }
    }
    let mut cocycle_ok = true;
    let mut triples = 0;
    for c in store {
        for (b, k) in c.basis.iter().enumerate() {
            let r = check_deformation_laws(k, &c.problem.group, &c.problem.q, 3)
                .expect("classified maps satisfy the PBW conditions");
            cocycle_ok &= !matches!(
                &r.failure,
                Some(f) if matches!(f.law, DeformationLaw::Cocycle | DeformationLaw::Associativity)
            );
            triples += r.triples_checked;
            laws.push((format!("{} #{}", c.label, b + 1), r));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        passed: dd_ok && closed && cocycle_ok && elapsed < Duration::from_secs(300),
        detail: format!(
            "d^2 = 0 {dd_ok}, {count} basis maps closed and invariant {closed}, \
             cocycle identity {cocycle_ok} over {triples} triples, {}",
            secs(elapsed)
        ),
    }
}

fn var(n: usize, i: usize, nn: u32) -> SkewElement {
    SkewElement::term(Monomial::var(n, i), 0, CycScalar::one(nn))
}

fn criterion_8(store: &[Classified], laws: &[(String, DeformationReport)]) -> Outcome {
    let start = Instant::now();
    let degree_ok = laws.iter().all(|(_, r)| r.passed());
    let mut recovered = true;
    let mut maps = 0;
    for c in store {
        let (g, q): (&Group, &QTuple) = (&c.problem.group, &c.problem.q);
        let n = q.dim();
        let nn = q.conductor();
        for k in &c.basis {
            maps += 1;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let (vi, vj) = (var(n, i, nn), var(n, j, nn));
                    let mut mu = extract_mu(1, &vj, &vi, k, g, q).unwrap();
                    mu.sub(&extract_mu(1, &vi, &vj, k, g, q).unwrap().scale(q.get(j, i)));
                    let mut expected = SkewElement::zero();
                    for (h, v) in k.get(j, i, q) {
                        expected.add_term(Monomial::one(n), h, v);
                    }
                    recovered &= mu == expected;
                }
            }
        }
    }
    let failing: Vec<&str> = laws.iter().filter(|(_, r)| !r.passed()).map(|(l, _)| l.as_str()).collect();
    Outcome {
        passed: degree_ok && recovered,
        detail: format!(
            "{} maps: degree law {degree_ok}{}, kappa recovered from mu_1 {recovered} ({maps} maps), {}",
            laws.len(),
            if failing.is_empty() { String::new() } else { format!(" (failing {})", failing.join(", ")) },
            secs(start.elapsed())
        ),
    }
}

fn main() {
    let names = [
        "symmetric group classification",
        "hyperoctahedral and type D classification",
        "vanishing for m >= 3",
        "symplectic classification and braided Cherednik maps",
        "diagonal worked example",
        "oracle equivalence on random instances",
        "homological soundness",
        "deformation round trip",
    ];
    let mut store = Vec::new();
    let mut laws = Vec::new();
    let mut results = vec![
        criterion_1(&mut store),
        criterion_2(&mut store),
        criterion_3(&mut store),
        criterion_4(&mut store),
        criterion_5(&mut store),
        criterion_6(),
    ];
    results.push(criterion_7(&store, &mut laws));
    results.push(criterion_8(&store, &laws));

    let mut unexpected = Vec::new();
    for (idx, (name, r)) in names.iter().zip(&results).enumerate() {
        let id = idx as u32 + 1;
        let known = KNOWN_DEVIATIONS.contains(&id);
        let tag = match (r.passed, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known deviation)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as deviation)",
        };
        println!("criterion {id} {tag}: {name}: {}", r.detail);
        if r.passed == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!(
        "acceptance: {} of {} criteria pass; deviations {:?} behave as recorded",
        results.iter().filter(|r| r.passed).count(),
        results.len(),
        KNOWN_DEVIATIONS
    );
}
