//! The PACE 2020 `tdp` text formats.

use std::fmt::Write;

use crate::error::PaceError;
use crate::forest::RootedForest;
use crate::graph::Graph;

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'))
}

fn parse_num(line: usize, tok: Option<&str>, what: &str) -> Result<usize, PaceError> {
    let tok = tok.ok_or_else(|| PaceError::Syntax {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| PaceError::Syntax {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

/// Parses `p tdp <n> <m>` followed by `m` lines of 1-based edges.
pub fn parse_pace_graph(text: &str) -> Result<Graph, PaceError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(PaceError::MissingHeader)?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("p") || toks.next() != Some("tdp") {
        return Err(PaceError::MissingHeader);
    }
    let n = parse_num(hline, toks.next(), "vertex count")?;
    let m = parse_num(hline, toks.next(), "edge count")?;
    if let Some(extra) = toks.next() {
        return Err(PaceError::Syntax {
            line: hline,
            msg: format!("unexpected token `{extra}`"),
        });
    }
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let mut endpoint = || -> Result<usize, PaceError> {
            let v = parse_num(line, toks.next(), "endpoint")?;
            if v == 0 || v > n {
                return Err(PaceError::IndexOutOfRange { line, vertex: v, n });
            }
            Ok(v - 1)
        };
        let u = endpoint()?;
        let v = endpoint()?;
        if toks.next().is_some() {
            return Err(PaceError::Syntax {
                line,
                msg: "an edge line has exactly two endpoints".into(),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(PaceError::EdgeCount {
            expected: m,
            found: edges.len(),
        });
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// Depth on the first line, then the 1-based parent of every vertex (`0` for
/// roots).
pub fn emit_pace_forest(f: &RootedForest) -> String {
    let mut out = String::new();
    writeln!(out, "{}", f.depth()).unwrap();
    for v in 0..f.len() {
        writeln!(out, "{}", f.parent(v).map_or(0, |p| p + 1)).unwrap();
    }
    out
}

/// Inverse of [`emit_pace_forest`] for a graph on `n` vertices. The declared
/// depth must match the parent pointers.
pub fn parse_pace_forest(text: &str, n: usize) -> Result<RootedForest, PaceError> {
    let mut lines = content_lines(text);
    let (dline, dtext) = lines.next().ok_or_else(|| PaceError::Syntax {
        line: 1,
        msg: "missing depth line".into(),
    })?;
    let depth = parse_num(dline, Some(dtext), "depth")?;
    let mut parent = Vec::with_capacity(n);
    let mut last = dline;
    for (line, l) in lines {
        last = line;
        let p = parse_num(line, Some(l), "parent")?;
        if p > n {
            return Err(PaceError::IndexOutOfRange { line, vertex: p, n });
        }
        parent.push(p.checked_sub(1));
    }
    if parent.len() != n {
        return Err(PaceError::Syntax {
            line: last,
            msg: format!("expected {n} parent lines, found {}", parent.len()),
        });
    }
    let f = RootedForest::from_parents(parent)?;
    if f.depth() != depth {
        return Err(PaceError::Syntax {
            line: dline,
            msg: format!("declared depth {depth} but the forest has depth {}", f.depth()),
        });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let k2 = parse_pace_graph("p tdp 2 1\n1 2").unwrap();
        assert_eq!(k2.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let k1 = parse_pace_graph("c comment\np tdp 1 0").unwrap();
        assert_eq!((k1.n(), k1.m()), (1, 0));
        assert!(matches!(
            parse_pace_graph("p tdp 2 1\n1 3"),
            Err(PaceError::IndexOutOfRange { vertex: 3, .. })
        ));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_pace_graph(""), Err(PaceError::MissingHeader)));
        assert!(matches!(parse_pace_graph("p td 2 1\n1 2"), Err(PaceError::MissingHeader)));
        assert!(matches!(
            parse_pace_graph("p tdp 3 2\n1 2"),
            Err(PaceError::EdgeCount { expected: 2, found: 1 })
        ));
        assert!(matches!(parse_pace_graph("p tdp 2 1\n1 1"), Err(PaceError::Graph(_))));
        assert!(matches!(
            parse_pace_graph("p tdp 2 2\n1 2\n2 1"),
            Err(PaceError::Graph(_))
        ));
        assert!(matches!(parse_pace_graph("p tdp x 1"), Err(PaceError::Syntax { .. })));
    }

    #[test]
    fn emit_examples() {
        assert_eq!(emit_pace_forest(&RootedForest::singleton()), "1\n0\n");
        assert_eq!(emit_pace_forest(&RootedForest::chain(&[0, 1])), "2\n0\n1\n");
        let star = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        assert_eq!(emit_pace_forest(&star), "2\n2\n0\n2\n");
    }

    #[test]
    fn forest_round_trip() {
        let f = RootedForest::from_parents(vec![Some(2), Some(2), None, Some(0)]).unwrap();
        assert_eq!(parse_pace_forest(&emit_pace_forest(&f), 4).unwrap(), f);
        assert!(parse_pace_forest("3\n0\n1", 2).is_err());
        assert!(parse_pace_forest("1\n2\n1", 2).is_err());
    }
}
