//! Subcommand dispatch. Every command returns its report as both a text
//! table and a JSON document; `--json` picks which one is printed.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qdha_core::deform::{h_multiply, DeformError};
use qdha_core::families::{
    build_family, diagonal_classify, diagonal_hh_dim, FamilyError, ReflectionGroupSpec,
};
use qdha_core::group::{check_exterior_extension, check_q_action, ActionReport, Group, Matrix};
use qdha_core::koszul::{solve_constant_cocycles, KoszulError};
use qdha_core::par;
use qdha_core::pbw::{diamond_check, ls_check, DiamondWitness, KappaMap, LsWitness};
use qdha_core::qalgebra::QTuple;

use crate::parse::{load_problem, parse_element, ParseError, Problem};
use crate::render;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qdha", version, about = "Quantum Drinfeld Hecke algebra toolkit")]
pub struct Cli {
    /// Print a JSON document instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for the solver and checks (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Natural,
    Symplectic,
    Diagonal,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that the group acts on S_q(V) and on the quantum exterior algebra.
    Check { file: PathBuf },
    /// Solve for the constant 2-cocycles.
    Cocycles { file: PathBuf },
    /// Classify kappa maps for a reflection-group family.
    Classify {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        n: usize,
    },
    /// Run the PBW checks on the file's kappa.
    Pbw { file: PathBuf },
    /// Multiply two elements of the deformation.
    Mul {
        file: PathBuf,
        x: String,
        y: String,
        /// Highest power of t to print.
        #[arg(long)]
        tcap: Option<u32>,
    },
    /// Count Hochschild cohomology candidates for a diagonal action.
    DiagHh {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        polycap: usize,
    },
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Failure {
        match e {
            FamilyError::InvalidSpec(_) => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<KoszulError> for Failure {
    fn from(e: KoszulError) -> Failure {
        Failure::Math(e.to_string())
    }
}

impl From<DeformError> for Failure {
    fn from(e: DeformError) -> Failure {
        Failure::Math(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let msg = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome { code, stdout: msg, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: msg }
            };
        }
    };
    let json = cli.json;
    let result = par::with_threads(cli.threads, move || dispatch(&cli.command));
    match result {
        Ok(r) => {
            let stdout = if json {
                let mut s = serde_json::to_string_pretty(&r.json).expect("json serialization");
                s.push('\n');
                s
            } else {
                r.text
            };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(Failure::Usage(m)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
        },
        Err(Failure::Math(m)) => {
            let stdout = if json {
                let mut s = serde_json::to_string_pretty(&json!({"passed": false, "error": m}))
                    .expect("json serialization");
                s.push('\n');
                s
            } else {
                String::new()
            };
            Outcome { code: EXIT_FAIL, stdout, stderr: format!("error: {m}\n") }
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Check { file } => check(&load(file)?),
        Command::Cocycles { file } => cocycles(&load(file)?),
        Command::Classify { family, m, p, n } => classify(*family, *m, *p, *n),
        Command::Pbw { file } => pbw(&load(file)?),
        Command::Mul { file, x, y, tcap } => mul(&load(file)?, x, y, *tcap),
        Command::DiagHh { file, degree, polycap } => diag_hh(&load(file)?, *degree, *polycap),
    }
}

fn load(path: &PathBuf) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    load_problem(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn kappa_of(p: &Problem) -> KappaMap {
    p.kappa
        .clone()
        .unwrap_or_else(|| KappaMap::zero(p.q.dim(), p.q.conductor()))
}

fn action_json(group: &Group, r: &ActionReport) -> Value {
    let v: Vec<Value> = r
        .violations
        .iter()
        .map(|x| {
            json!({
                "element": render::element(group, x.element),
                "indices": [x.i + 1, x.j + 1, x.k + 1, x.l + 1],
                "residual": render::scalar(&x.residual),
            })
        })
        .collect();
    json!({"passed": r.passed(), "total_violations": r.total_violations, "violations": v})
}

fn action_rows(group: &Group, name: &str, r: &ActionReport) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        name.to_string(),
        verdict(r.passed()).to_string(),
        r.total_violations.to_string(),
        String::new(),
    ]];
    for x in &r.violations {
        rows.push(vec![
            String::new(),
            String::new(),
            String::new(),
            format!(
                "{} at ({},{},{},{}): {}",
                render::element(group, x.element),
                x.i + 1,
                x.j + 1,
                x.k + 1,
                x.l + 1,
                render::scalar(&x.residual)
            ),
        ]);
    }
    rows
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn check(p: &Problem) -> Result<Report, Failure> {
    let action = check_q_action(&p.group, &p.q);
    let ext = check_exterior_extension(&p.group, &p.q);
    let ok = action.passed() && ext.passed();
    let mut rows = action_rows(&p.group, "q-action", &action);
    rows.extend(action_rows(&p.group, "exterior extension", &ext));
    let text = format!(
        "group order {}\n{}",
        p.group.order(),
        render::table(&["check", "verdict", "violations", "witness"], &rows)
    );
    Ok(Report {
        code: if ok { EXIT_PASS } else { EXIT_FAIL },
        text,
        json: json!({
            "group_order": p.group.order(),
            "q_action": action_json(&p.group, &action),
            "exterior_extension": action_json(&p.group, &ext),
            "passed": ok,
        }),
    })
}

fn basis_report(group: &Group, q: &QTuple, basis: &[KappaMap], header: String) -> Report {
    let lines: Vec<Vec<String>> = basis.iter().map(|k| render::kappa_lines(k, group)).collect();
    let mut rows = Vec::new();
    for (b, ls) in lines.iter().enumerate() {
        for (k, l) in ls.iter().enumerate() {
            let label = if k == 0 { (b + 1).to_string() } else { String::new() };
            rows.push(vec![label, l.clone()]);
        }
    }
    let mut text = format!("{header}\ndimension {}\n", basis.len());
    if !rows.is_empty() {
        text.push_str(&render::table(&["basis", "kappa"], &rows));
    }
    Report {
        code: EXIT_PASS,
        text,
        json: json!({
            "dimension": basis.len(),
            "group_order": group.order(),
            "problem": render::problem_lines(group, q),
            "basis": lines.iter().map(|l| json!({"kappa_lines": l})).collect::<Vec<_>>(),
        }),
    }
}

fn cocycles(p: &Problem) -> Result<Report, Failure> {
    let sol = solve_constant_cocycles(&p.group, &p.q)?;
    let n = p.q.dim();
    let nn = p.q.conductor();
    let basis: Vec<KappaMap> = sol
        .basis
        .iter()
        .map(|c| KappaMap::from_cochain(c, n, nn))
        .collect();
    Ok(basis_report(
        &p.group,
        &p.q,
        &basis,
        format!("group order {}", p.group.order()),
    ))
}

/// The diagonal subgroup `{diag(z^l) : sum l = 0 mod p}` of `G(m,p,n)`
/// with `q_ij = -1`.
pub fn diagonal_family(m: u32, p: u32, n: usize) -> Result<(Group, QTuple), String> {
    if m == 0 || p == 0 || n == 0 || m % p != 0 {
        return Err("diagonal family needs m, p, n > 0 and p | m".into());
    }
    let nn = ReflectionGroupSpec::natural(m, p, n).conductor();
    let step = (nn / m) as i64;
    let mut gens = Vec::new();
    if p != m {
        let mut e = vec![0i64; n];
        e[0] = p as i64 * step;
        gens.push(("t".to_string(), Matrix::diagonal_roots(nn, &e)));
    }
    for i in 1..n {
        let mut e = vec![0i64; n];
        e[0] = step;
        e[i] = -step;
        gens.push((format!("u{i}"), Matrix::diagonal_roots(nn, &e)));
    }
    let group = Group::generate(n, nn, gens, 1 << 20).map_err(|e| e.to_string())?;
    Ok((group, QTuple::minus_one(n, nn)))
}

fn classify(family: Family, m: u32, p: Option<u32>, n: usize) -> Result<Report, Failure> {
    let (group, q, label) = match family {
        Family::Natural => {
            let p = p.unwrap_or(1);
            let (g, q) = build_family(&ReflectionGroupSpec::natural(m, p, n))?;
            (g, q, format!("natural G({m},{p},{n})"))
        }
        Family::Symplectic => {
            if p.is_some_and(|p| p != 1) {
                return Err(Failure::Usage("the symplectic family takes no --p".into()));
            }
            let (g, q) = build_family(&ReflectionGroupSpec::symplectic(m, n))?;
            (g, q, format!("symplectic G({m},1,{n})"))
        }
        Family::Diagonal => {
            let p = p.unwrap_or(1);
            let (g, q) = diagonal_family(m, p, n).map_err(Failure::Usage)?;
            (g, q, format!("diagonal subgroup of G({m},{p},{n})"))
        }
    };
    let basis = if family == Family::Diagonal {
        diagonal_classify(&group, &q)?
    } else {
        let sol = solve_constant_cocycles(&group, &q)?;
        sol.basis
            .iter()
            .map(|c| KappaMap::from_cochain(c, q.dim(), q.conductor()))
            .collect()
    };
    let mut r = basis_report(
        &group,
        &q,
        &basis,
        format!("{label}, group order {}", group.order()),
    );
    r.json["family"] = json!(label);
    Ok(r)
}

fn pbw(p: &Problem) -> Result<Report, Failure> {
    let kappa = kappa_of(p);
    let ls = ls_check(&kappa, &p.group, &p.q);
    let dia = diamond_check(&kappa, &p.group, &p.q);
    let ok = ls.passed() && dia.passed();
    let ls_w: Vec<String> = ls
        .violations
        .iter()
        .map(|w| match *w {
            LsWitness::Overlap { g, i, j, k } => format!(
                "condition (i) at {} on ({},{},{})",
                render::element(&p.group, g),
                i + 1,
                j + 1,
                k + 1
            ),
            LsWitness::Conjugation { h, g, i, j } => format!(
                "condition (ii) for {} at {} on ({},{})",
                p.group.generator_names()[h],
                render::element(&p.group, g),
                i + 1,
                j + 1
            ),
        })
        .collect();
    let dia_w: Vec<String> = dia
        .failures
        .iter()
        .map(|w| match *w {
            DiamondWitness::Overlap { k, j, i } => format!("overlap v{}v{}v{}", k + 1, j + 1, i + 1),
            DiamondWitness::Conjugation { h, j, i } => format!(
                "{} applied to v{}v{}",
                p.group.generator_names()[h],
                j + 1,
                i + 1
            ),
        })
        .collect();
    let rows = vec![
        vec![
            "ls".to_string(),
            verdict(ls.passed()).into(),
            ls.total_violations.to_string(),
            ls_w.first().cloned().unwrap_or_default(),
        ],
        vec![
            "diamond".to_string(),
            verdict(dia.passed()).into(),
            dia.failures.len().to_string(),
            dia_w.first().cloned().unwrap_or_default(),
        ],
    ];
    Ok(Report {
        code: if ok { EXIT_PASS } else { EXIT_FAIL },
        text: render::table(&["check", "verdict", "failures", "first witness"], &rows),
        json: json!({
            "ls_check": {"passed": ls.passed(), "total_violations": ls.total_violations, "witnesses": ls_w},
            "diamond_check": {"passed": dia.passed(), "failures": dia.failures.len(), "witnesses": dia_w},
            "passed": ok,
        }),
    })
}

fn mul(p: &Problem, x: &str, y: &str, tcap: Option<u32>) -> Result<Report, Failure> {
    let bad = |which: &str, e: ParseError| Failure::Usage(format!("{which}: {}", e.message));
    let a = parse_element(x, p).map_err(|e| bad("first element", e))?;
    let b = parse_element(y, p).map_err(|e| bad("second element", e))?;
    let kappa = kappa_of(p);
    let prod = h_multiply(&a, &b, &kappa, &p.group, &p.q)?;
    let top = prod.max_t().unwrap_or(0);
    let cap = tcap.map_or(top, |c| c.min(top));
    let mut rows = Vec::new();
    let mut parts = serde_json::Map::new();
    for e in 0..=cap {
        let s = prod.t_part(e).render(&p.group);
        rows.push(vec![format!("t^{e}"), s.clone()]);
        parts.insert(e.to_string(), json!(s));
    }
    Ok(Report {
        code: EXIT_PASS,
        text: render::table(&["power", "coefficient"], &rows),
        json: json!({
            "product": prod.render(&p.group),
            "t_expansion": parts,
            "max_t": top,
        }),
    })
}

fn diag_hh(p: &Problem, degree: usize, polycap: usize) -> Result<Report, Failure> {
    let d = diagonal_hh_dim(&p.group, &p.q, degree, polycap)?;
    Ok(Report {
        code: EXIT_PASS,
        text: render::table(
            &["degree", "polycap", "dimension"],
            &[vec![degree.to_string(), polycap.to_string(), d.to_string()]],
        ),
        json: json!({"degree": degree, "polycap": polycap, "dimension": d}),
    })
}
