//! Text and JSON formats.
//!
//! Matrix text: a header line `m n`, then `m` lines of `n` whitespace
//! separated entries `p` or `p/q` with `q > 0`. `#` starts a comment.
//! Patterns use the same format with 0/1 entries.
//!
//! Graph text: a header line `L R`, then one line per left vertex listing its
//! right neighbours (1-based); `-` or an empty line means no neighbours.
//!
//! JSON documents carry `"schema": 1` and a `"kind"` tag. Row and column
//! indices in JSON reports are 1-based.

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::embed::SubspaceEmbedding;
use crate::error::{Error, Result};
use crate::exact::{fmt_rational, parse_rational, QMatrix, Rational, Subspace};
use crate::pattern::{BipartiteGraph, SupportPattern};
use crate::psd::{Order3Certificate, PsdFactorization, SqrtRank};

pub const SCHEMA: u64 = 1;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_header(tok: &[&str], line: usize) -> Result<(usize, usize)> {
    match tok {
        [a, b] => {
            let a = a.parse().map_err(|_| parse_err(line, format!("bad count {a:?}")))?;
            let b = b.parse().map_err(|_| parse_err(line, format!("bad count {b:?}")))?;
            Ok((a, b))
        }
        _ => Err(parse_err(line, "expected a header with two counts")),
    }
}

/// Parses a matrix in text or JSON form.
pub fn parse_matrix(text: &str) -> Result<QMatrix> {
    if text.trim_start().starts_with('{') {
        return matrix_from_json(&serde_json::from_str(text)?);
    }
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (m, n) = parse_header(&header.split_whitespace().collect::<Vec<_>>(), hl)?;
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(hl, format!("expected {m} rows, found {}", rows.len())))?;
        let row = line
            .split_whitespace()
            .map(|t| parse_rational(t, false).ok_or_else(|| parse_err(ln, format!("bad entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(parse_err(ln, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing data after the last row"));
    }
    if m == 0 {
        return Ok(QMatrix::zeros(0, n));
    }
    QMatrix::from_rows(rows)
}

/// Writes a matrix in the text format.
pub fn write_matrix(m: &QMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for row in m.to_string_rows() {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a 0/1 pattern (text or JSON).
pub fn parse_pattern(text: &str) -> Result<SupportPattern> {
    let m = parse_matrix(text)?;
    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    if let Some(bad) = m.entries().iter().find(|x| **x != one && **x != zero) {
        return Err(parse_err(0, format!("pattern entry {bad} is not 0 or 1")));
    }
    Ok(crate::pattern::support(&m))
}

pub fn write_pattern(p: &SupportPattern) -> String {
    write_matrix(&p.to_matrix())
}

pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with('#'));
    let (hl, header) = loop {
        match lines.next() {
            Some((i, l)) if !strip_comment(l).is_empty() => break (i, strip_comment(l)),
            Some(_) => continue,
            None => return Err(parse_err(1, "empty input")),
        }
    };
    let (left, right) = parse_header(&header.split_whitespace().collect::<Vec<_>>(), hl)?;
    let mut g = BipartiteGraph::empty(left, right);
    for u in 0..left {
        let Some((ln, line)) = lines.next() else {
            return Err(parse_err(hl, format!("expected {left} adjacency lines, found {u}")));
        };
        let line = strip_comment(line);
        if line == "-" {
            continue;
        }
        for t in line.split_whitespace() {
            let v: usize = t.parse().map_err(|_| parse_err(ln, format!("bad vertex {t:?}")))?;
            if v == 0 || v > right {
                return Err(parse_err(ln, format!("right vertex {v} outside 1..={right}")));
            }
            g.add_edge(u, v - 1);
        }
    }
    if let Some((ln, _)) = lines.find(|(_, l)| !strip_comment(l).is_empty()) {
        return Err(parse_err(ln, "trailing data after the last adjacency line"));
    }
    Ok(g)
}

pub fn write_graph(g: &BipartiteGraph) -> String {
    let mut out = format!("{} {}\n", g.left_count(), g.right_count());
    for u in 0..g.left_count() {
        let n: Vec<String> = g.neighbors(u).iter().map(|v| (v + 1).to_string()).collect();
        if n.is_empty() {
            out.push_str("-\n");
        } else {
            out.push_str(&n.join(" "));
            out.push('\n');
        }
    }
    out
}

fn entries_json(m: &QMatrix) -> Value {
    json!(m.to_string_rows())
}

pub fn matrix_to_json(m: &QMatrix) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": "matrix",
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": entries_json(m),
    })
}

fn scalar_from_json(v: &Value, allow_decimal: bool) -> Result<Rational> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(parse_err(0, format!("expected a number, found {v}"))),
    };
    let allow = allow_decimal || matches!(v, Value::Number(_));
    parse_rational(&s, allow).ok_or_else(|| parse_err(0, format!("bad entry {s:?}")))
}

fn rows_from_json(v: &Value, allow_decimal: bool) -> Result<Vec<Vec<Rational>>> {
    v.as_array()
        .ok_or_else(|| parse_err(0, "expected an array of rows"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| parse_err(0, "expected a row array"))?
                .iter()
                .map(|x| scalar_from_json(x, allow_decimal))
                .collect()
        })
        .collect()
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(0, format!("missing field {key:?}")))
}

fn count_field(obj: &Value, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .and_then(|x| x.to_usize())
        .ok_or_else(|| parse_err(0, format!("field {key:?} is not a count")))
}

fn check_schema(obj: &Value, kind: &str) -> Result<()> {
    if let Some(s) = obj.get("schema") {
        if s.as_u64() != Some(SCHEMA) {
            return Err(parse_err(0, format!("unsupported schema {s}")));
        }
    }
    match obj.get("kind").and_then(Value::as_str) {
        Some(k) if k != kind => Err(parse_err(0, format!("expected kind {kind:?}, found {k:?}"))),
        _ => Ok(()),
    }
}

pub fn matrix_from_json(v: &Value) -> Result<QMatrix> {
    check_schema(v, "matrix")?;
    let rows = count_field(v, "rows")?;
    let cols = count_field(v, "cols")?;
    let entries = rows_from_json(field(v, "entries")?, false)?;
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(parse_err(0, format!("entries do not form a {rows}x{cols} matrix")));
    }
    if rows == 0 {
        return Ok(QMatrix::zeros(0, cols));
    }
    QMatrix::from_rows(entries)
}

fn subspace_json(s: &Subspace) -> Value {
    entries_json(s.basis())
}

pub fn embedding_to_json(e: &SubspaceEmbedding) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": "embedding",
        "ambient_dim": e.ambient_dim(),
        "U": e.row_spaces().iter().map(subspace_json).collect::<Vec<_>>(),
        "V": e.col_spaces().iter().map(subspace_json).collect::<Vec<_>>(),
    })
}

pub fn embedding_from_json(v: &Value) -> Result<SubspaceEmbedding> {
    check_schema(v, "embedding")?;
    let q = count_field(v, "ambient_dim")?;
    let spaces = |key: &str| -> Result<Vec<Subspace>> {
        field(v, key)?
            .as_array()
            .ok_or_else(|| parse_err(0, format!("{key:?} is not an array")))?
            .iter()
            .map(|basis| Subspace::from_vectors(q, &rows_from_json(basis, false)?))
            .collect()
    };
    SubspaceEmbedding::new(q, spaces("U")?, spaces("V")?)
}

fn flat_json(m: &QMatrix) -> Value {
    json!(m.entries().iter().map(fmt_rational).collect::<Vec<_>>())
}

/// Factorization document; `target` is the matrix the factors represent.
pub fn factorization_to_json(f: &PsdFactorization, target: Option<&QMatrix>) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("kind".into(), json!("psd_factorization"));
    obj.insert("order".into(), json!(f.order()));
    obj.insert("A".into(), json!(f.row_factors().iter().map(flat_json).collect::<Vec<_>>()));
    obj.insert("B".into(), json!(f.col_factors().iter().map(flat_json).collect::<Vec<_>>()));
    if let Some(t) = target {
        obj.insert("target".into(), matrix_to_json(t));
    }
    Value::Object(obj)
}

fn factors_from_json(v: &Value, key: &str, q: usize) -> Result<Vec<QMatrix>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| parse_err(0, format!("{key:?} is not an array")))?
        .iter()
        .map(|flat| {
            let entries = flat
                .as_array()
                .ok_or_else(|| parse_err(0, "factor is not an array"))?
                .iter()
                .map(|x| scalar_from_json(x, true))
                .collect::<Result<Vec<_>>>()?;
            QMatrix::from_vec(q, q, entries)
        })
        .collect()
}

/// Factorization and optional target matrix. Decimal entries are converted
/// to exact rationals.
pub fn factorization_from_json(v: &Value) -> Result<(PsdFactorization, Option<QMatrix>)> {
    check_schema(v, "psd_factorization")?;
    let q = count_field(v, "order")?;
    let f = PsdFactorization::new(q, factors_from_json(v, "A", q)?, factors_from_json(v, "B", q)?)?;
    let target = v.get("target").map(matrix_from_json).transpose()?;
    Ok((f, target))
}

/// Floating-point view of a factorization document, for rank reduction.
pub struct FloatFactorization {
    pub row_factors: Vec<DMatrix<f64>>,
    pub col_factors: Vec<DMatrix<f64>>,
    pub target: DMatrix<f64>,
}

pub fn to_f64(m: &QMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_f64().unwrap_or(f64::NAN))
}

pub fn float_factorization_from_json(v: &Value) -> Result<FloatFactorization> {
    let (f, target) = factorization_from_json(v)?;
    let target = target.unwrap_or_else(|| f.product_matrix());
    Ok(FloatFactorization {
        row_factors: f.row_factors().iter().map(to_f64).collect(),
        col_factors: f.col_factors().iter().map(to_f64).collect(),
        target: to_f64(&target),
    })
}

/// Decimal factorization document for floating-point factors `X = G G^T`.
pub fn float_factorization_to_json(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> Value {
    let flat = |m: &DMatrix<f64>| -> Vec<String> {
        (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| format!("{:e}", m[(i, j)]))
            .collect()
    };
    let order = a.first().or(b.first()).map_or(0, DMatrix::nrows);
    json!({
        "schema": SCHEMA,
        "kind": "psd_factorization",
        "order": order,
        "A": a.iter().map(flat).collect::<Vec<_>>(),
        "B": b.iter().map(flat).collect::<Vec<_>>(),
    })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

pub fn sqrt_rank_to_json(r: &SqrtRank) -> Value {
    let counts: Map<String, Value> = r.rank_counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "min_rank": r.min_rank,
        "assignments_checked": r.assignments_checked,
        "rank_counts": counts,
        "witness": {
            "positions": r.witness.positions.iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
            "signs": r.witness.signs_string(),
            "matrix": (0..r.witness_matrix.rows())
                .map(|i| r.witness_matrix.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        },
    })
}

/// Certificate document with fields `claim`, `bound`, `rows`, `cols`,
/// `assignments_checked`, `min_rank` and `witness`, plus the hypothesis
/// checks behind the row and column selection.
pub fn certificate_to_json(c: &Order3Certificate) -> Value {
    let proves = c.proves_bound();
    let e = c.enumeration.as_ref().map(sqrt_rank_to_json);
    json!({
        "schema": SCHEMA,
        "kind": "order3_exclusion",
        "claim": if proves { "psd_rank_at_least_4" } else { "inconclusive" },
        "bound": if proves { json!(4) } else { Value::Null },
        "window": [c.window.0, c.window.1],
        "rows": one_based(&c.rows),
        "cols": one_based(&c.cols),
        "assignments_checked": e.as_ref().map_or(json!(0), |e| e["assignments_checked"].clone()),
        "min_rank": e.as_ref().map_or(Value::Null, |e| e["min_rank"].clone()),
        "rank_counts": e.as_ref().map_or(Value::Null, |e| e["rank_counts"].clone()),
        "witness": e.as_ref().map_or(Value::Null, |e| e["witness"].clone()),
        "row_checks": c.row_checks.iter().map(|r| json!({
            "row": r.row + 1,
            "zero_cols": [r.zero_cols.0 + 1, r.zero_cols.1 + 1],
        })).collect::<Vec<_>>(),
        "col_checks": c.col_checks.iter().map(|r| json!({
            "col": r.col + 1,
            "zero_rows": [r.zero_rows.0 + 1, r.zero_rows.1 + 1],
        })).collect::<Vec<_>>(),
        "skipped_windows": c.skipped_windows.iter().map(|w| [w.0, w.1]).collect::<Vec<_>>(),
        "distinctness_check": "zero patterns",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};
    use crate::psd::generate_sn;

    #[test]
    fn matrix_text_roundtrip() {
        let text = "# a comment\n2 3\n1 -2/4 0 # trailing\n\n3 4 5/7\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.get(0, 1), &frac(-1, 2));
        assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
        let j = matrix_to_json(&m);
        assert_eq!(parse_matrix(&j.to_string()).unwrap(), m);
    }

    #[test]
    fn matrix_text_errors() {
        assert!(matches!(parse_matrix(""), Err(Error::Parse { .. })));
        assert!(parse_matrix("2 2\n1 2\n").is_err());
        assert!(parse_matrix("1 2\n1 2 3\n").is_err());
        assert!(parse_matrix("1 1\n1/0\n").is_err());
        assert!(parse_matrix("1 1\n0.5\n").is_err());
        assert!(parse_matrix("1 1\n1\n2\n").is_err());
        let e = parse_matrix("1 2\n1 x\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn pattern_and_graph_formats() {
        let p = parse_pattern("2 2\n1 0\n0 1\n").unwrap();
        assert_eq!(p, SupportPattern::identity(2));
        assert!(parse_pattern("1 1\n2\n").is_err());
        let g = parse_graph("3 2\n1 2\n-\n2\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (2, 1)]);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        assert!(parse_graph("1 2\n3\n").is_err());
        assert!(parse_graph("2 2\n1\n").is_err());
        let blank = parse_graph("2 2\n\n2\n").unwrap();
        assert_eq!(blank.edge_count(), 1);
    }

    #[test]
    fn embedding_and_factorization_json() {
        let s = generate_sn(6).unwrap();
        let e = crate::embed::embedding_from_rank_factorization(&s);
        let back = embedding_from_json(&embedding_to_json(&e)).unwrap();
        assert_eq!(back, e);
        let (f, t) = crate::embed::psd_from_embedding(&e);
        let doc = factorization_to_json(&f, Some(&t));
        let (f2, t2) = factorization_from_json(&serde_json::from_str(&doc.to_string()).unwrap()).unwrap();
        assert_eq!(f2, f);
        assert_eq!(t2, Some(t));
    }

    #[test]
    fn decimal_factor_entries() {
        let doc = json!({"schema": 1, "order": 1, "A": [["0.5"]], "B": [[2]]});
        let (f, t) = factorization_from_json(&doc).unwrap();
        assert_eq!(f.row_factors()[0].get(0, 0), &frac(1, 2));
        assert_eq!(f.product_matrix().get(0, 0), &int(1));
        assert!(t.is_none());
        assert!(factorization_from_json(&json!({"schema": 2, "order": 1, "A": [], "B": []})).is_err());
    }
}
