//! Plain-text graph format.
//!
//! ```text
//! n m
//! id weight      (n lines)
//! u v            (m lines, identifiers)
//! ```

use std::fmt::Write as _;

use super::{GraphError, NodeId, WeightedGraph};

pub fn save(g: &WeightedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for v in 0..g.n() {
        writeln!(out, "{} {}", g.id(v), g.weight(v)).unwrap();
    }
    for (u, v) in g.edge_list() {
        writeln!(out, "{} {}", g.id(u), g.id(v)).unwrap();
    }
    out
}

pub fn load(text: &str) -> Result<WeightedGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let [n, m] = pair::<usize>(line, header, "header `n m`")?;

    let mut ids = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let (line, text) = lines.next().ok_or(GraphError::Parse {
            line: line + k + 1,
            msg: format!("expected {n} node lines, found {k}"),
        })?;
        let [id, weight] = pair::<i128>(line, text, "node line `id weight`")?;
        let id = NodeId::try_from(id).map_err(|_| GraphError::Parse {
            line,
            msg: format!("identifier {id} is not a non-negative 64-bit integer"),
        })?;
        if weight < 0 {
            return Err(GraphError::NegativeWeight { id, weight });
        }
        let weight = u64::try_from(weight).map_err(|_| GraphError::WeightOverflow)?;
        ids.push(id);
        weights.push(weight);
    }

    let index: std::collections::HashMap<NodeId, usize> =
        ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (line, text) = lines.next().ok_or(GraphError::Parse {
            line: line + n + k + 1,
            msg: format!("expected {m} edge lines, found {k}"),
        })?;
        let [u, v] = pair::<NodeId>(line, text, "edge line `u v`")?;
        let lookup = |id| {
            index.get(&id).copied().ok_or(GraphError::Parse {
                line,
                msg: format!("edge references unknown node identifier {id}"),
            })
        };
        edges.push((lookup(u)?, lookup(v)?));
    }
    if let Some((line, _)) = lines.next() {
        return Err(GraphError::Parse {
            line,
            msg: "trailing content after the declared edges".into(),
        });
    }
    WeightedGraph::with_ids(ids, weights, &edges)
}

fn pair<T: std::str::FromStr>(line: usize, text: &str, what: &str) -> Result<[T; 2], GraphError> {
    let err = || GraphError::Parse {
        line,
        msg: format!("malformed {what}: {text:?}"),
    };
    let mut parts = text.split_whitespace();
    let a = parts.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    let b = parts.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    if parts.next().is_some() {
        return Err(err());
    }
    Ok([a, b])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_text() {
        let g = WeightedGraph::from_edges(vec![5], &[]).unwrap();
        assert_eq!(save(&g), "1 0\n0 5\n");
        assert_eq!(load("1 0\n0 5\n").unwrap(), g);
    }

    #[test]
    fn triangle_round_trip() {
        let g = WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let text = save(&g);
        assert!(text.starts_with("3 3\n"));
        assert_eq!(text.lines().count(), 7);
        assert_eq!(load(&text).unwrap(), g);
    }

    #[test]
    fn malformed_inputs() {
        let unknown = load("2 1\n0 1\n1 1\n0 9\n").unwrap_err();
        assert!(matches!(unknown, GraphError::Parse { line: 4, .. }), "{unknown}");
        assert!(matches!(load("x y\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(load("2 0\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(
            load("1 0\n0 -3\n"),
            Err(GraphError::NegativeWeight { id: 0, weight: -3 })
        ));
        assert!(matches!(load("2 1\n0 1\n1 1\n0 0\n"), Err(GraphError::SelfLoop(0))));
        assert!(matches!(load("1 0\n0 1\n0 0\n"), Err(GraphError::Parse { line: 3, .. })));
    }
}
