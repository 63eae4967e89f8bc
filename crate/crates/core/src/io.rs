//! Text formats: edge-list graphs, edge and vertex potential files, CSV.
//!
//! Graph files hold one `u<TAB>v<TAB>w` line per edge. Potential files start
//! with a `#d=<d>` header followed by `u<TAB>v<TAB>m11 m12 ... mdd` lines
//! (row-major); vertex potential files use `i<TAB>m11 ... mdd`. Lines
//! starting with `#` and blank lines are ignored. Numbers are written with
//! `%.17g`, so load(save(x)) reproduces x bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::numeric::{fmt_g17, orthogonality_defect};
use crate::potentials::{project_to_orthogonal, EdgePotential, Mat, VertexPotential, DEFAULT_ORTH_TOL};

/// Potentials read from files within this defect are re-projected onto O(d).
pub const REPROJECT_TOL: f64 = 1e-6;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, byte)),
            (true, Some((column, from))) => {
                out.push(Token { column, text: &line[from..byte] });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((column, from)) = start {
        out.push(Token { column, text: &line[from..] });
    }
    out
}

struct Source<'a> {
    name: &'a str,
}

impl Source<'_> {
    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: self.name.to_string(), line, column, message: message.into() }
    }

    fn index(&self, line: usize, tok: &Token<'_>) -> Result<usize> {
        tok.text
            .parse()
            .map_err(|_| self.error(line, tok.column, format!("expected a vertex id, found `{}`", tok.text)))
    }

    fn real(&self, line: usize, tok: &Token<'_>) -> Result<f64> {
        match tok.text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(self.error(line, tok.column, format!("expected a finite number, found `{}`", tok.text))),
        }
    }

    fn matrix(&self, line: usize, end_column: usize, toks: &[Token<'_>], d: usize) -> Result<Mat> {
        if toks.len() != d * d {
            let column = toks.get(d * d).map_or(end_column, |t| t.column);
            return Err(self.error(line, column, format!("expected {} matrix entries, found {}", d * d, toks.len())));
        }
        let mut values = Vec::with_capacity(d * d);
        for tok in toks {
            values.push(self.real(line, tok)?);
        }
        Ok(Mat::from_row_slice(d, d, &values))
    }
}

/// Header directives `#key=value`; other comment lines yield `None`.
fn directive<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix('#')?.trim().strip_prefix(key)?.strip_prefix('=').map(str::trim)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn header_value(src: &Source<'_>, text: &str, key: &str) -> Result<Option<usize>> {
    for (i, line) in text.lines().enumerate() {
        if let Some(v) = directive(line, key) {
            return v
                .parse()
                .map(Some)
                .map_err(|_| src.error(i + 1, 1, format!("malformed `#{key}=` header")));
        }
    }
    Ok(None)
}

pub fn parse_graph(text: &str, name: &str) -> Result<WeightedGraph> {
    let src = Source { name };
    let declared_n = header_value(&src, text, "n")?;
    let mut list = Vec::new();
    for (line, raw) in content_lines(text) {
        let toks = tokens(raw);
        if toks.len() != 3 {
            let column = toks.get(3).map_or(raw.chars().count() + 1, |t| t.column);
            return Err(src.error(line, column, format!("expected `u v w`, found {} fields", toks.len())));
        }
        let u = src.index(line, &toks[0])?;
        let v = src.index(line, &toks[1])?;
        let w = src.real(line, &toks[2])?;
        list.push((u, v, w));
    }
    let implied = list.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared_n.unwrap_or(implied);
    WeightedGraph::new(n, &list)
}

pub fn format_graph(g: &WeightedGraph) -> String {
    let mut out = format!("#n={}\n", g.n());
    for e in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", e.u, e.v, fmt_g17(e.weight));
    }
    out
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    parse_graph(&read_text(path)?, &path.display().to_string())
}

pub fn write_graph(path: &Path, g: &WeightedGraph) -> Result<()> {
    write_text(path, &format_graph(g))
}

fn required_d(src: &Source<'_>, text: &str) -> Result<usize> {
    match header_value(src, text, "d")? {
        Some(d) if d > 0 => Ok(d),
        Some(_) => Err(src.error(1, 1, "`#d=` must be positive")),
        None => Err(src.error(1, 1, "missing `#d=<d>` header")),
    }
}

/// Keep nearly orthogonal matrices, re-project small drift, reject the rest.
fn settle_orthogonal(m: Mat, what: impl Fn() -> String) -> Result<Mat> {
    let defect = orthogonality_defect(&m);
    if defect <= DEFAULT_ORTH_TOL {
        Ok(m)
    } else if defect <= REPROJECT_TOL {
        project_to_orthogonal(&m)
    } else {
        Err(Error::Validation(format!("{} is not orthogonal (defect {defect:e})", what())))
    }
}

/// Parse an edge potential for `g`. Every edge must appear exactly once;
/// a line written as `v u` with `u < v` holds ρ_vu and is transposed.
pub fn parse_potential(text: &str, name: &str, g: &WeightedGraph) -> Result<EdgePotential> {
    let src = Source { name };
    let d = required_d(&src, text)?;
    let mut blocks: Vec<Option<Mat>> = vec![None; g.m()];
    for (line, raw) in content_lines(text) {
        let toks = tokens(raw);
        if toks.len() < 2 {
            return Err(src.error(line, raw.chars().count() + 1, "expected `u v` followed by matrix entries"));
        }
        let a = src.index(line, &toks[0])?;
        let b = src.index(line, &toks[1])?;
        let m = src.matrix(line, raw.chars().count() + 1, &toks[2..], d)?;
        let e = g
            .edge_index(a, b)
            .ok_or_else(|| src.error(line, toks[0].column, format!("({a}, {b}) is not an edge of the graph")))?;
        if blocks[e].is_some() {
            return Err(src.error(line, toks[0].column, format!("edge ({a}, {b}) listed twice")));
        }
        let m = if g.edge(e).u == a { m } else { m.transpose() };
        blocks[e] = Some(settle_orthogonal(m, || format!("potential on edge ({a}, {b})"))?);
    }
    let mut out = Vec::with_capacity(g.m());
    for (e, b) in blocks.into_iter().enumerate() {
        let edge = g.edge(e);
        out.push(b.ok_or_else(|| Error::Validation(format!("no potential given for edge ({}, {})", edge.u, edge.v)))?);
    }
    EdgePotential::new(d, out)
}

fn push_matrix(out: &mut String, m: &Mat) {
    let d = m.nrows();
    for r in 0..d {
        for c in 0..d {
            if r + c > 0 {
                out.push(' ');
            }
            out.push_str(&fmt_g17(m[(r, c)]));
        }
    }
    out.push('\n');
}

pub fn format_potential(g: &WeightedGraph, rho: &EdgePotential) -> String {
    let mut out = format!("#d={}\n", rho.d());
    for (e, edge) in g.edges().iter().enumerate() {
        let _ = write!(out, "{}\t{}\t", edge.u, edge.v);
        push_matrix(&mut out, rho.block(e));
    }
    out
}

pub fn read_potential(path: &Path, g: &WeightedGraph) -> Result<EdgePotential> {
    parse_potential(&read_text(path)?, &path.display().to_string(), g)
}

pub fn write_potential(path: &Path, g: &WeightedGraph, rho: &EdgePotential) -> Result<()> {
    write_text(path, &format_potential(g, rho))
}

pub fn format_vertex_potential(f: &VertexPotential) -> String {
    let mut out = format!("#d={}\n", f.d());
    for i in 0..f.len() {
        let _ = write!(out, "{i}\t");
        push_matrix(&mut out, &f.get(i));
    }
    out
}

/// Parse a vertex potential on `n` vertices; every vertex exactly once.
pub fn parse_vertex_potential(text: &str, name: &str, n: usize) -> Result<VertexPotential> {
    let src = Source { name };
    let d = required_d(&src, text)?;
    let mut blocks: Vec<Option<Mat>> = vec![None; n];
    for (line, raw) in content_lines(text) {
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let i = src.index(line, &toks[0])?;
        if i >= n {
            return Err(src.error(line, toks[0].column, format!("vertex {i} out of range for {n} vertices")));
        }
        if blocks[i].is_some() {
            return Err(src.error(line, toks[0].column, format!("vertex {i} listed twice")));
        }
        let m = src.matrix(line, raw.chars().count() + 1, &toks[1..], d)?;
        blocks[i] = Some(settle_orthogonal(m, || format!("vertex potential at {i}"))?);
    }
    let blocks = blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::Validation(format!("no block given for vertex {i}"))))
        .collect::<Result<Vec<_>>>()?;
    VertexPotential::from_blocks(d, &blocks)
}

/// Comma-separated table with a header line.
pub fn format_csv<R, I>(header: &str, rows: R) -> String
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.into_iter().collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{random_edge_potential, random_vertex_potential, random_weighted_graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn graph_with_comments_and_blanks() {
        let text = "# a triangle\n\n0\t1\t1.5\n  \n1\t2\t2\n# trailing\n0 2 0.25\n";
        let g = parse_graph(text, "tri").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(g.edge(2).weight, 0.25);
    }

    #[test]
    fn graph_header_keeps_isolated_vertices() {
        let g = parse_graph("#n=5\n0\t1\t1\n", "x").unwrap();
        assert_eq!(g.n(), 5);
        let back = parse_graph(&format_graph(&g), "y").unwrap();
        assert_eq!(back.n(), 5);
    }

    #[test]
    fn graph_parse_errors_name_the_spot() {
        match parse_graph("0\t1\t1\n1\tx\t2\n", "g.tsv") {
            Err(Error::Parse { line, column, path, .. }) => {
                assert_eq!((line, column), (2, 3));
                assert_eq!(path, "g.tsv");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_graph("0\t1\n", "g"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("0\t1\t-1\n", "g"), Err(Error::NonpositiveWeight { .. })));
    }

    #[test]
    fn potential_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_weighted_graph(30, 21, &mut rng);
        assert_eq!(g.m(), 50);
        let rho = random_edge_potential(&g, 3, &mut rng);
        let text = format_potential(&g, &rho);
        let back = parse_potential(&text, "p", &g).unwrap();
        assert_eq!(back, rho);
        let g2 = parse_graph(&format_graph(&g), "g").unwrap();
        assert_eq!(g2.edges(), g.edges());
    }

    #[test]
    fn reversed_lines_are_transposed() {
        let g = parse_graph("0\t1\t1\n", "g").unwrap();
        let text = "#d=2\n1\t0\t0 -1 1 0\n";
        let rho = parse_potential(text, "p", &g).unwrap();
        assert_eq!(rho.block(0), &Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn short_matrix_row_names_the_line() {
        let g = parse_graph("0\t1\t1\n1\t2\t1\n", "g").unwrap();
        let text = "#d=2\n0\t1\t1 0 0 1\n1\t2\t1 0 0\n";
        match parse_potential(text, "p.pot", &g) {
            Err(e @ Error::Parse { line: 3, .. }) => assert!(e.to_string().contains("p.pot:3:")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orthogonality_tolerances() {
        let g = parse_graph("0\t1\t1\n", "g").unwrap();
        let drift = "#d=2\n0\t1\t1.0000001 0 0 1\n";
        let rho = parse_potential(drift, "p", &g).unwrap();
        assert!(orthogonality_defect(rho.block(0)) < 1e-14);
        let bad = "#d=2\n0\t1\t2 0 0 1\n";
        assert!(matches!(parse_potential(bad, "p", &g), Err(Error::Validation(_))));
    }

    #[test]
    fn potential_coverage_checks() {
        let g = parse_graph("0\t1\t1\n1\t2\t1\n", "g").unwrap();
        assert!(matches!(parse_potential("0\t1\t1\n", "p", &g), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("#d=1\n0\t1\t1\n", "p", &g), Err(Error::Validation(_))));
        assert!(matches!(
            parse_potential("#d=1\n0\t1\t1\n1\t0\t1\n1\t2\t1\n", "p", &g),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse_potential("#d=1\n0\t2\t1\n", "p", &g), Err(Error::Parse { .. })));
    }

    #[test]
    fn vertex_potential_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_vertex_potential(7, 4, &mut rng);
        let text = format_vertex_potential(&f);
        assert!(text.starts_with("#d=4\n0\t"));
        assert_eq!(parse_vertex_potential(&text, "v", 7).unwrap(), f);
        assert!(parse_vertex_potential(&text, "v", 8).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = vec![vec!["0".to_string(), "1".to_string()], vec!["1".into(), "0".into()]];
        assert_eq!(format_csv("vertex,label", rows), "vertex,label\n0,1\n1,0\n");
    }
}
