//! Text tables and the textual forms shared by text and JSON output.

use qdha_core::cyclotomic::CycScalar;
use qdha_core::group::{Group, Matrix};
use qdha_core::pbw::KappaMap;
use qdha_core::qalgebra::QTuple;

/// Roots of unity print as `z^k` (or `-1`, `-z^k`); anything else uses
/// the power-basis form.
pub fn scalar(c: &CycScalar) -> String {
    let n = c.conductor();
    if let Some(k) = c.root_exponent() {
        return match k {
            0 => "1".into(),
            k if 2 * k == n => "-1".into(),
            k => format!("z^{k}"),
        };
    }
    if let Some(k) = (-c).root_exponent() {
        return if k == 0 { "-1".into() } else { format!("-z^{k}") };
    }
    c.to_string()
}

/// Group elements are named by their shortest generator word.
pub fn element(group: &Group, g: usize) -> String {
    group.word_string(g)
}

/// One `kappa i j := ...` line per nonzero pair, in the input grammar.
pub fn kappa_lines(kappa: &KappaMap, group: &Group) -> Vec<String> {
    kappa
        .pairs()
        .map(|((i, j), v)| {
            let rhs: Vec<String> = v
                .iter()
                .map(|(&g, c)| format!("({})*{}", scalar(c), element(group, g)))
                .collect();
            format!("kappa {} {} := {}", i + 1, j + 1, rhs.join(" + "))
        })
        .collect()
}

pub fn matrix(m: &Matrix) -> String {
    let n = m.dim();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let row: Vec<String> = (0..n).map(|j| scalar(m.get(i, j))).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// A problem file describing `group` and `q`, without kappa lines.
pub fn problem_lines(group: &Group, q: &QTuple) -> Vec<String> {
    let n = q.dim();
    let mut out = vec![format!("field {}", q.conductor()), format!("dim {n}")];
    for i in 0..n {
        for j in i + 1..n {
            let v = q.get(i, j);
            if !v.is_one() {
                out.push(format!("q {} {} {}", i + 1, j + 1, scalar(v)));
            }
        }
    }
    for (name, &g) in group.generator_names().iter().zip(group.generators()) {
        out.push(format!("gen {name} {}", matrix(group.element(g))));
    }
    out
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(headers.to_vec()));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&rule.join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_print_as_powers() {
        assert_eq!(scalar(&CycScalar::root_of_unity(6, 2)), "z^2");
        assert_eq!(scalar(&CycScalar::root_of_unity(6, 3)), "-1");
        assert_eq!(scalar(&-CycScalar::root_of_unity(3, 1)), "-z^1");
        assert_eq!(scalar(&CycScalar::from_int(3, 2)), "2");
        assert_eq!(scalar(&-CycScalar::one(3)), "-1");
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a", "long"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    long\n---  ----\nxyz  1\n");
    }
}
