//! Plain-text filtration files.
//!
//! ```text
//! filtration v1
//! n <n>
//! edges <m>
//! <u> <v>          # m lines, in filtration order, u < v
//! columns <t>      # optional; absent means default tie policy
//! <u> <v> <w>      # t lines, u < v < w
//! ```
//!
//! Blank lines and `#` comments are ignored by the reader.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flagfilt::{n_edges, n_triangles, EdgeOrder, Filtration};
use crate::randmodels::VrSample;

pub fn write_filtration(f: &Filtration, with_columns: bool) -> String {
    let e = f.edge_order();
    let mut s = String::new();
    let _ = writeln!(s, "filtration v1\nn {}\nedges {}", e.n(), e.m());
    for &(u, v) in e.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    if with_columns {
        let t = f.column_order().triangles();
        let _ = writeln!(s, "columns {}", t.len());
        for [u, v, w] in t {
            let _ = writeln!(s, "{u} {v} {w}");
        }
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-blank line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                self.last = i + 1;
                return Some((i + 1, body));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| Error::Parse {
            line: self.last + 1,
            reason: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn header(lines: &mut Lines, key: &str) -> Result<usize> {
    let (line, body) = lines.expect(key)?;
    let mut it = body.split_whitespace();
    match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
        (Some(k), Some(Ok(v)), None) if k == key => Ok(v),
        _ => Err(Error::Parse { line, reason: format!("expected `{key} <count>`, found {body:?}") }),
    }
}

fn numbers<const K: usize>(line: usize, body: &str) -> Result<[u32; K]> {
    let parsed: Vec<u32> = body
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse { line, reason: format!("{e} in {body:?}") })?;
    parsed
        .try_into()
        .map_err(|_| Error::Parse { line, reason: format!("expected {K} vertex indices, found {body:?}") })
}

pub fn parse_filtration(text: &str) -> Result<Filtration> {
    let mut lines = Lines::new(text);
    let (line, magic) = lines.expect("header")?;
    if magic != "filtration v1" {
        return Err(Error::Parse { line, reason: format!("expected `filtration v1`, found {magic:?}") });
    }
    let n = header(&mut lines, "n")?;
    let m = header(&mut lines, "edges")?;
    if m != n_edges(n) {
        return Err(Error::Parse {
            line: lines.last,
            reason: format!("edges {m} but a complete graph on {n} vertices has {}", n_edges(n)),
        });
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, body) = lines.expect("an edge")?;
        let [u, v] = numbers::<2>(line, body)?;
        edges.push((u, v));
    }
    let order = EdgeOrder::new(n, edges)?;
    let Some((line, body)) = lines.next_line() else {
        return Ok(Filtration::with_default_ties(order));
    };
    let mut it = body.split_whitespace();
    let t = match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
        (Some("columns"), Some(Ok(t)), None) => t,
        _ => return Err(Error::Parse { line, reason: format!("expected `columns <count>`, found {body:?}") }),
    };
    if t != n_triangles(n) {
        return Err(Error::Validation(format!("columns {t} but there are {} triangles", n_triangles(n))));
    }
    let mut triangles = Vec::with_capacity(t);
    for _ in 0..t {
        let (line, body) = lines.expect("a triangle")?;
        triangles.push(numbers::<3>(line, body)?);
    }
    if let Some((line, body)) = lines.next_line() {
        return Err(Error::Parse { line, reason: format!("trailing content {body:?}") });
    }
    Filtration::from_parts(order, triangles)
}

pub fn read_filtration(path: &Path) -> Result<Filtration> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_filtration(&text).map_err(|e| match e {
        Error::Parse { line, reason } => Error::Parse { line, reason: format!("{}: {reason}", path.display()) },
        Error::Validation(r) => Error::Validation(format!("{}: {r}", path.display())),
        other => other,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Point coordinates followed by the length of the edge at each rank.
pub fn write_vr_sidecar(s: &VrSample) -> String {
    let pts = &s.points;
    let mut out = String::new();
    let _ = writeln!(out, "points v1\nn {}\ndim {}", pts.len(), pts.dim());
    for i in 0..pts.len() {
        let coords: Vec<String> = pts.point(i).iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    let _ = writeln!(out, "lengths {}", s.lengths.len());
    for (rank, len) in s.lengths.iter().enumerate() {
        let (u, v) = s.order.edge(rank);
        let _ = writeln!(out, "{rank} {u} {v} {len:?}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flagfilt::tests::four_vertex_order;
    use crate::flagfilt::TiePolicy;

    #[test]
    fn round_trip_default_ties() {
        let f = Filtration::with_default_ties(four_vertex_order());
        let text = write_filtration(&f, false);
        assert_eq!(text.lines().count(), 3 + 6);
        assert_eq!(parse_filtration(&text).unwrap(), f);
        assert_eq!(parse_filtration(&write_filtration(&f, true)).unwrap(), f);
    }

    #[test]
    fn round_trip_explicit_columns() {
        let e = four_vertex_order();
        let f = Filtration::new(e, &TiePolicy::Explicit(vec![[0, 2, 3], [0, 1, 2], [1, 2, 3], [0, 1, 3]])).unwrap();
        let text = write_filtration(&f, true);
        assert!(text.contains("columns 4\n0 2 3\n0 1 2\n"));
        assert_eq!(parse_filtration(&text).unwrap(), f);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# made by hand\nfiltration v1\n\nn 2\nedges 1\n0 1  # only edge\n";
        let f = parse_filtration(text).unwrap();
        assert_eq!(f.edge_order().edges(), &[(0, 1)]);
        assert!(f.column_order().is_empty());
    }

    #[test]
    fn duplicate_edge() {
        let text = "filtration v1\nn 3\nedges 3\n0 1\n0 2\n0 1\n";
        assert!(matches!(parse_filtration(text), Err(Error::Validation(_))));
    }

    #[test]
    fn decreasing_entry_times() {
        let text = "filtration v1\nn 4\nedges 6\n1 2\n0 3\n0 1\n2 3\n0 2\n1 3\ncolumns 4\n0 1 2\n0 1 3\n1 2 3\n0 2 3\n";
        assert!(matches!(parse_filtration(text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let cases = [
            ("filtration v2\n", 1),
            ("filtration v1\nn x\n", 2),
            ("filtration v1\nn 3\nedges 3\n0 1\n0 two\n", 5),
            ("filtration v1\nn 3\nedges 3\n0 1\n0 2\n", 6),
            ("filtration v1\nn 3\nedges 3\n0 1\n0 2\n1 2\nbogus\n", 7),
            ("filtration v1\nn 3\nedges 3\n0 1\n0 2 1\n", 5),
            ("filtration v1\nn 3\nedges 2\n", 3),
        ];
        for (text, want) in cases {
            match parse_filtration(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn vr_sidecar_lists_every_rank() {
        use crate::randmodels::{sample_vr, Seed};
        let s = sample_vr(5, 2, Seed::new(3), "t", 0).unwrap();
        let text = write_vr_sidecar(&s);
        assert_eq!(text.lines().count(), 3 + 5 + 1 + 10);
        assert!(text.contains("lengths 10\n"));
    }
}
