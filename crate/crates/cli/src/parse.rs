//! The problem-file grammar and the element expressions used by `mul`.

use std::collections::BTreeMap;
use std::fmt;

use qdha_core::cyclotomic::CycScalar;
use qdha_core::deform::FilteredElement;
use qdha_core::group::{Group, GroupError, Matrix};
use qdha_core::pbw::KappaMap;
use qdha_core::qalgebra::{GroupAlgebraElement, Monomial, QTuple, QTupleError};

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// One `c * word` summand of a kappa value, with its source position.
#[derive(Debug, Clone)]
pub struct WordTerm {
    pub coeff: CycScalar,
    pub word: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct KappaLine {
    pub line: usize,
    pub i: usize,
    pub j: usize,
    pub terms: Vec<WordTerm>,
}

/// The raw contents of a problem file.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub conductor: u32,
    pub dim: usize,
    /// Upper and lower entries as given, 0-based.
    pub q_entries: BTreeMap<(usize, usize), (usize, CycScalar)>,
    pub generators: Vec<(String, Matrix)>,
    pub kappa: Vec<KappaLine>,
}

/// A problem with its group closed and its q-tuple validated.
#[derive(Debug, Clone)]
pub struct Problem {
    pub group: Group,
    pub q: QTuple,
    pub kappa: Option<KappaMap>,
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    /// 1-based column of a subslice of this line.
    fn col(&self, part: &str) -> usize {
        part.as_ptr() as usize - self.text.as_ptr() as usize + 1
    }
}

fn parse_index(line: &Line, tok: &str, dim: usize) -> Result<usize, ParseError> {
    let v: usize = tok
        .parse()
        .map_err(|_| err(line.number, line.col(tok), format!("expected an index, found `{tok}`")))?;
    if v == 0 || v > dim {
        return Err(err(line.number, line.col(tok), format!("index {v} is outside 1..={dim}")));
    }
    Ok(v - 1)
}

fn scalar(line: &Line, text: &str, conductor: u32) -> Result<CycScalar, ParseError> {
    CycScalar::parse(text, conductor).map_err(|e| {
        err(
            line.number,
            line.col(text) + e.column.saturating_sub(1),
            e.message,
        )
    })
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits at top-level `+`/`-`, keeping each sign with its summand.
fn split_sum(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = text.as_bytes();
    for (p, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && p > 0 => {
                let prev = text[..p].trim_end();
                let binary = !prev.is_empty() && !prev.ends_with(['^', '*', '+', '-']);
                if binary {
                    out.push((start, &text[start..p]));
                    start = p;
                }
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

/// Splits at top-level `*`.
fn split_product(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (p, b) in text.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'*' if depth == 0 => {
                out.push((start, &text[start..p]));
                start = p + 1;
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

/// A product term: scalar factors, variables `v<i>^<e>`, generator names,
/// `e`, and `t^<e>`, in any order; generator names are kept in order.
#[derive(Debug, Clone)]
pub(crate) struct Factors {
    pub coeff: CycScalar,
    pub vars: Vec<(usize, u16)>,
    pub word: Vec<String>,
    pub t: u32,
}

fn parse_factors(
    line: &Line,
    text: &str,
    conductor: u32,
    allow_vars: bool,
    is_gen: &dyn Fn(&str) -> bool,
) -> Result<Factors, ParseError> {
    let mut t = text.trim();
    let mut coeff = CycScalar::one(conductor);
    if let Some(rest) = t.strip_prefix('-') {
        coeff = -coeff;
        t = rest.trim_start();
    } else if let Some(rest) = t.strip_prefix('+') {
        t = rest.trim_start();
    }
    if t.is_empty() {
        return Err(err(line.number, line.col(text), "empty term"));
    }
    let mut out = Factors {
        coeff,
        vars: Vec::new(),
        word: Vec::new(),
        t: 0,
    };
    for (_, raw) in split_product(t) {
        let f = raw.trim();
        let col = line.col(raw);
        if f.is_empty() {
            return Err(err(line.number, col, "empty factor"));
        }
        if let Some(inner) = f.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            out.coeff *= &scalar(line, inner, conductor)?;
        } else if f.starts_with(|c: char| c.is_ascii_digit()) || f.starts_with("z^") {
            out.coeff *= &scalar(line, raw.trim(), conductor)?;
        } else if allow_vars && f.starts_with('v') && f[1..].starts_with(|c: char| c.is_ascii_digit()) {
            let (idx, exp) = match f[1..].split_once('^') {
                Some((a, b)) => (a, b),
                None => (&f[1..], "1"),
            };
            let i: usize = idx
                .parse()
                .map_err(|_| err(line.number, col, format!("bad variable `{f}`")))?;
            let e: u16 = exp
                .parse()
                .map_err(|_| err(line.number, col, format!("bad exponent in `{f}`")))?;
            if i == 0 {
                return Err(err(line.number, col, "variables are numbered from 1"));
            }
            out.vars.push((i - 1, e));
        } else if allow_vars && !is_gen(f) && (f == "t" || f.starts_with("t^")) {
            let e: u32 = match f.strip_prefix("t^") {
                Some(x) => x
                    .parse()
                    .map_err(|_| err(line.number, col, format!("bad exponent in `{f}`")))?,
                None => 1,
            };
            out.t += e;
        } else if f == "e" || f == "1" {
        } else if is_name(f) {
            out.word.push(f.to_string());
        } else {
            return Err(err(line.number, col, format!("cannot read factor `{f}`")));
        }
    }
    Ok(out)
}

fn parse_matrix(line: &Line, text: &str, conductor: u32) -> Result<Vec<Vec<CycScalar>>, ParseError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line.number, line.col(text), "matrix must be written [[..],..]"))?;
    let mut rows = Vec::new();
    let mut rest = inner;
    loop {
        let r = rest.trim_start();
        if r.is_empty() {
            break;
        }
        let r = r.strip_prefix(',').map(str::trim_start).unwrap_or(r);
        let open = r
            .strip_prefix('[')
            .ok_or_else(|| err(line.number, line.col(r), "expected `[` starting a row"))?;
        let close = open
            .find(']')
            .ok_or_else(|| err(line.number, line.col(r), "unclosed row"))?;
        let body = &open[..close];
        let row = body
            .split(',')
            .map(|s| scalar(line, s.trim(), conductor))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
        rest = &open[close + 1..];
    }
    Ok(rows)
}

/// Parses the line-oriented problem grammar.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, ParseError> {
    let mut conductor: Option<u32> = None;
    let mut dim: Option<usize> = None;
    let mut q_entries = BTreeMap::new();
    let mut generators: Vec<(String, Matrix)> = Vec::new();
    let mut kappa = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let line = Line { number, text: raw };
        let trimmed = body.trim_start();
        let (kw, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let need_field = |conductor: Option<u32>| {
            conductor.ok_or_else(|| err(number, 1, "`field` must come before this line"))
        };
        let need_dim = |dim: Option<usize>| dim.ok_or_else(|| err(number, 1, "`dim` must come before this line"));
        match kw {
            "field" => {
                let tok = rest.trim();
                let n: u32 = tok
                    .parse()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err(number, line.col(rest.trim_start()), "field needs a positive conductor"))?;
                if conductor.replace(n).is_some() {
                    return Err(err(number, 1, "duplicate `field` line"));
                }
            }
            "dim" => {
                let n: usize = rest
                    .trim()
                    .parse()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err(number, line.col(rest.trim_start()), "dim needs a positive integer"))?;
                if dim.replace(n).is_some() {
                    return Err(err(number, 1, "duplicate `dim` line"));
                }
            }
            "q" => {
                let nn = need_field(conductor)?;
                let n = need_dim(dim)?;
                let mut parts = rest.trim_start().splitn(3, char::is_whitespace);
                let (Some(a), Some(b), Some(s)) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(err(number, 1, "expected `q i j <scalar>`"));
                };
                let i = parse_index(&line, a, n)?;
                let j = parse_index(&line, b, n)?;
                let v = scalar(&line, s.trim(), nn)?;
                if i == j && !v.is_one() {
                    return Err(err(number, line.col(s), format!("q{}{} must be 1", i + 1, j + 1)));
                }
                if v.root_exponent().is_none() {
                    return Err(err(number, line.col(s), format!("q entries must be powers of z, the primitive {nn}th root of unity")));
                }
                if q_entries.insert((i, j), (number, v)).is_some() {
                    return Err(err(number, 1, format!("q {} {} given twice", i + 1, j + 1)));
                }
            }
            "gen" => {
                let nn = need_field(conductor)?;
                let n = need_dim(dim)?;
                let r = rest.trim_start();
                let (name, mat) = r.split_once(char::is_whitespace).unwrap_or((r, ""));
                if !is_name(name) || name == "e" {
                    return Err(err(number, line.col(name), format!("invalid generator name `{name}`")));
                }
                if generators.iter().any(|(g, _)| g == name) {
                    return Err(err(number, line.col(name), format!("generator `{name}` defined twice")));
                }
                let rows = parse_matrix(&line, mat, nn)?;
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(err(number, line.col(mat), format!("generator `{name}` must be {n}x{n}")));
                }
                let m = Matrix::from_rows(rows).map_err(|e| err(number, line.col(mat), e.to_string()))?;
                if m.determinant().is_zero() {
                    return Err(err(number, line.col(mat), format!("generator `{name}` is singular")));
                }
                generators.push((name.to_string(), m));
            }
            "kappa" => {
                let nn = need_field(conductor)?;
                let n = need_dim(dim)?;
                let (lhs, rhs) = rest
                    .split_once(":=")
                    .ok_or_else(|| err(number, 1, "expected `kappa i j := ...`"))?;
                let mut idx = lhs.split_whitespace();
                let (Some(a), Some(b), None) = (idx.next(), idx.next(), idx.next()) else {
                    return Err(err(number, 1, "expected two indices before `:=`"));
                };
                let i = parse_index(&line, a, n)?;
                let j = parse_index(&line, b, n)?;
                let rhs = rhs.split('#').next().unwrap_or("");
                let mut terms = Vec::new();
                if rhs.trim() != "0" {
                    for (_, part) in split_sum(rhs) {
                        let f = parse_factors(&line, part, nn, false, &|_| true)?;
                        terms.push(WordTerm {
                            coeff: f.coeff,
                            word: f.word,
                        });
                    }
                }
                kappa.push(KappaLine {
                    line: number,
                    i,
                    j,
                    terms,
                });
            }
            other => {
                return Err(err(number, 1, format!("unknown keyword `{other}`")));
            }
        }
    }
    let conductor = conductor.ok_or_else(|| err(0, 0, "missing `field` line"))?;
    let dim = dim.ok_or_else(|| err(0, 0, "missing `dim` line"))?;
    Ok(ProblemSpec {
        conductor,
        dim,
        q_entries,
        generators,
        kappa,
    })
}

fn eval_word(group: &Group, word: &[String], line: usize) -> Result<usize, ParseError> {
    let mut x = group.identity();
    for name in word {
        let g = group
            .generator_by_name(name)
            .ok_or_else(|| err(line, 1, format!("unknown generator `{name}`")))?;
        x = group.mul(x, g);
    }
    Ok(x)
}

impl ProblemSpec {
    pub fn qtuple(&self) -> Result<QTuple, ParseError> {
        let n = self.dim;
        let nn = self.conductor;
        let mut table = vec![CycScalar::one(nn); n * n];
        let mut source = vec![0usize; n * n];
        for (&(i, j), (line, v)) in &self.q_entries {
            let inv = v.inv().map_err(|e| err(*line, 1, e.to_string()))?;
            for (a, b, val) in [(i, j, v.clone()), (j, i, inv)] {
                if source[a * n + b] != 0 && table[a * n + b] != val {
                    return Err(err(
                        *line,
                        1,
                        format!("q {} {} contradicts line {}", i + 1, j + 1, source[a * n + b]),
                    ));
                }
                table[a * n + b] = val;
                source[a * n + b] = *line;
            }
        }
        QTuple::new(n, nn, table).map_err(|e: QTupleError| err(0, 0, e.to_string()))
    }

    pub fn build(&self, cap: usize) -> Result<Problem, ParseError> {
        let q = self.qtuple()?;
        let group = Group::generate(self.dim, self.conductor, self.generators.clone(), cap)
            .map_err(|e: GroupError| err(0, 0, e.to_string()))?;
        let kappa = if self.kappa.is_empty() {
            None
        } else {
            let mut entries = Vec::new();
            for k in &self.kappa {
                let mut v = GroupAlgebraElement::new();
                for t in &k.terms {
                    let g = eval_word(&group, &t.word, k.line)?;
                    let slot = v.entry(g).or_insert_with(|| CycScalar::zero(self.conductor));
                    *slot += &t.coeff;
                }
                v.retain(|_, c| !c.is_zero());
                entries.push(((k.i, k.j), v));
            }
            let line = self.kappa[0].line;
            Some(KappaMap::from_pairs(&q, entries).map_err(|e| err(line, 1, e.to_string()))?)
        };
        Ok(Problem { group, q, kappa })
    }
}

pub fn load_problem(text: &str) -> Result<Problem, ParseError> {
    parse_problem(text)?.build(DEFAULT_CLOSURE_CAP)
}

/// Parses an element of the deformed algebra, such as `2*v1^2*v3*g + (z^1)*v2*t`.
/// A generator named `t` shadows the deformation parameter.
pub fn parse_element(text: &str, problem: &Problem) -> Result<FilteredElement, ParseError> {
    let line = Line { number: 0, text };
    let n = problem.q.dim();
    let nn = problem.q.conductor();
    let mut out = FilteredElement::zero();
    if text.trim() == "0" {
        return Ok(out);
    }
    for (_, part) in split_sum(text) {
        let is_gen = |name: &str| problem.group.generator_by_name(name).is_some();
        let f = parse_factors(&line, part, nn, true, &is_gen)?;
        // variables are read left to right as a word
        let mut w = Vec::new();
        for (i, e) in &f.vars {
            if *i >= n {
                return Err(err(0, 1, format!("variable v{} exceeds dim {n}", i + 1)));
            }
            w.extend(std::iter::repeat_n(*i, *e as usize));
        }
        let (c, mono) = qdha_core::qalgebra::sq_normalize(&w, &problem.q);
        let g = eval_word(&problem.group, &f.word, 0)?;
        let mut coeff = f.coeff;
        coeff *= &c;
        out.add_term(mono, g, f.t, coeff);
    }
    Ok(out)
}

/// `v1^a1 ... vn^an` as a monomial, for tests and rendering.
pub fn monomial(e: &[u16]) -> Monomial {
    Monomial::from_exponents(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "field 3\ndim 3\nq 2 1 z^1\nq 3 2 z^1\nq 1 3 z^1\ngen g [[z^1,0,0],[0,z^2,0],[0,0,1]]\nkappa 1 2 := 1*g\n";

    #[test]
    fn example_file() {
        let p = load_problem(EXAMPLE).unwrap();
        assert_eq!(p.group.order(), 3);
        assert_eq!(p.q.get(1, 0), &CycScalar::root_of_unity(3, 1));
        assert_eq!(p.q.get(0, 1), &CycScalar::root_of_unity(3, 2));
        let k = p.kappa.unwrap();
        let g = p.group.generator_by_name("g").unwrap();
        assert_eq!(k.kappa_g(g, 0, 1, &p.q), CycScalar::one(3));
    }

    #[test]
    fn missing_field() {
        let e = parse_problem("dim 2\n").unwrap_err();
        assert!(e.message.contains("field"));
        let e = parse_problem("field 2\n").unwrap_err();
        assert!(e.message.contains("dim"));
    }

    #[test]
    fn diagonal_q_must_be_one() {
        let e = parse_problem("field 3\ndim 2\nq 1 1 z^1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 7));
    }

    #[test]
    fn singular_generator() {
        assert!(parse_problem("field 1\ndim 2\ngen a [[1,1],[1,1]]\n").is_err());
    }

    #[test]
    fn split_respects_parentheses_and_exponents() {
        let parts: Vec<&str> = split_sum("(1 - z^1)*g + -2*h - z^-1*e").into_iter().map(|p| p.1).collect();
        assert_eq!(parts, vec!["(1 - z^1)*g ", "+ -2*h ", "- z^-1*e"]);
    }

    #[test]
    fn element_expressions() {
        let p = load_problem(EXAMPLE).unwrap();
        let x = parse_element("v2*v1", &p).unwrap();
        let mut expected = FilteredElement::zero();
        expected.add_term(monomial(&[1, 1, 0]), 0, 0, CycScalar::root_of_unity(3, 1));
        assert_eq!(x, expected);
        let y = parse_element("(1/2)*v3^2*g*t", &p).unwrap();
        assert_eq!(y.terms().count(), 1);
        assert!(parse_element("v7", &p).is_err());
    }
}
