//! Immutable simple undirected graphs.
//!
//! Adjacency is stored in compressed sparse row form with every neighbor list
//! sorted ascending. Construction rejects self-loops and silently collapses
//! duplicate edges, so every [`Graph`] satisfies:
//!
//! * no node is its own neighbor,
//! * `v ∈ N(u)` iff `u ∈ N(v)`,
//! * neighbor lists are strictly increasing, and `m = Σ deg / 2`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, ParseProblem, Result};

/// Distance reported by [`bfs_distances`] for nodes the source cannot reach.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            edge_count: 0,
        }
    }

    /// Builds a graph from undirected edges. Duplicates (in either
    /// orientation) collapse; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::invalid(format!("{n} nodes exceeds the supported maximum")));
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange { node: u, n });
            }
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on node {u}")));
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        Ok(Self::from_neighbor_lists(lists))
    }

    /// Builds from per-node neighbor lists that are already symmetric and
    /// loop-free; lists are sorted and deduplicated here.
    pub(crate) fn from_neighbor_lists(mut lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut total = 0usize;
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            total += list.len();
            offsets.push(total);
        }
        let mut targets = Vec::with_capacity(total);
        for list in lists {
            targets.extend_from_slice(&list);
        }
        let g = Graph {
            offsets,
            targets,
            edge_count: total / 2,
        };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Verifies the structural invariants. Cheap enough for tests and debug
    /// assertions; construction already guarantees them.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.node_count();
        for u in 0..n {
            let nb = self.neighbors(u);
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("neighbors of {u} not strictly increasing"));
                }
            }
            for &v in nb {
                let v = v as usize;
                if v == u {
                    return Err(format!("self-loop on {u}"));
                }
                if v >= n || self.neighbors(v).binary_search(&(u as u32)).is_err() {
                    return Err(format!("edge {u}-{v} not symmetric"));
                }
            }
        }
        if self.targets.len() != 2 * self.edge_count {
            return Err("edge count mismatch".into());
        }
        Ok(())
    }

    /// Subgraph induced by `nodes` (original ids). Node `i` of the result is
    /// `nodes[i]`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![u32::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new as u32;
        }
        let lists = nodes
            .iter()
            .map(|&old| {
                self.neighbors(old)
                    .iter()
                    .map(|&w| index[w as usize])
                    .filter(|&w| w != u32::MAX)
                    .collect()
            })
            .collect();
        Graph::from_neighbor_lists(lists)
    }

    /// Copy with node `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::invalid("permutation length differs from node count"));
        }
        Graph::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }
}

/// A graph read from an edge list, with the original node names.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: Graph,
    /// `labels[i]` is the file token that became node `i`.
    pub labels: Vec<String>,
}

/// Parses whitespace-separated edge-list text.
///
/// Lines that are blank or start with `#` are skipped. Each remaining line
/// must carry at least two tokens; extra columns (weights, timestamps) are
/// ignored. Node tokens get dense ids in order of first appearance. Edges are
/// undirected and duplicates collapse.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    read_edge_list(text.as_bytes())
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<LabeledGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&id) = ids.get(tok) {
            return id;
        }
        let id = labels.len();
        ids.insert(tok.to_owned(), id);
        labels.push(tok.to_owned());
        id
    };
    for (ix, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = ix + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let (a, b) = match (toks.next(), toks.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    problem: ParseProblem::Malformed,
                })
            }
        };
        if a == b {
            return Err(Error::Parse {
                line: lineno,
                problem: ParseProblem::SelfLoop,
            });
        }
        let u = intern(a, &mut labels);
        let v = intern(b, &mut labels);
        edges.push((u, v));
    }
    let graph = Graph::from_edges(labels.len(), edges)?;
    Ok(LabeledGraph { graph, labels })
}

/// Serializes edges as `u v` lines (u < v), using `labels` when given.
pub fn write_edge_list(g: &Graph, labels: Option<&[String]>) -> String {
    let mut out = String::with_capacity(g.edge_count() * 8);
    for (u, v) in g.edges() {
        match labels {
            Some(l) => writeln!(out, "{} {}", l[u], l[v]),
            None => writeln!(out, "{u} {v}"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

/// Hop distances from `source`; unreachable nodes get [`UNREACHABLE`].
pub fn bfs_distances(g: &Graph, source: usize) -> Result<Vec<u32>> {
    let n = g.node_count();
    if source >= n {
        return Err(Error::NodeOutOfRange { node: source, n });
    }
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in g.neighbors(u) {
            let v = v as usize;
            if dist[v] == UNREACHABLE {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Connected components. Each component is labelled by its smallest node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub label: Vec<usize>,
    pub sizes: BTreeMap<usize, usize>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Label of a maximum-size component; ties go to the smallest label,
    /// which is also the smallest member id.
    pub fn largest(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (&label, &size) in &self.sizes {
            if best.is_none_or(|(_, s)| size > s) {
                best = Some((label, size));
            }
        }
        best.map(|(label, _)| label)
    }
}

pub fn connected_components(g: &Graph) -> ComponentLabeling {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut sizes = BTreeMap::new();
    let mut stack = Vec::new();
    for root in 0..n {
        if label[root] != usize::MAX {
            continue;
        }
        label[root] = root;
        stack.push(root);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in g.neighbors(u) {
                let v = v as usize;
                if label[v] == usize::MAX {
                    label[v] = root;
                    stack.push(v);
                }
            }
        }
        sizes.insert(root, size);
    }
    ComponentLabeling { label, sizes }
}

/// Induced subgraph on a largest component plus the original id of each of
/// its nodes (ascending).
pub fn largest_component(g: &Graph) -> (Graph, Vec<usize>) {
    let comps = connected_components(g);
    match comps.largest() {
        None => (Graph::empty(0), Vec::new()),
        Some(_) if comps.component_count() == 1 => (g.clone(), (0..g.node_count()).collect()),
        Some(target) => {
            let nodes: Vec<usize> = (0..g.node_count()).filter(|&v| comps.label[v] == target).collect();
            (g.induced_subgraph(&nodes), nodes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn parses_triangle() {
        let lg = parse_edge_list("0 1\n1 2\n0 2").unwrap();
        assert_eq!(lg.graph.node_count(), 3);
        assert_eq!(lg.graph.edge_count(), 3);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let lg = parse_edge_list("a b\nb a").unwrap();
        assert_eq!(lg.graph.node_count(), 2);
        assert_eq!(lg.graph.edge_count(), 1);
        assert_eq!(lg.labels, vec!["a", "b"]);
    }

    #[test]
    fn self_loop_is_rejected_with_line() {
        match parse_edge_list("0 0") {
            Err(Error::Parse { line: 1, problem: ParseProblem::SelfLoop }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("# header\n1 2\n\n3 3\n") {
            Err(Error::Parse { line: 4, problem: ParseProblem::SelfLoop }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_is_rejected_with_line() {
        match parse_edge_list("1 2\nlonely\n") {
            Err(Error::Parse { line: 2, problem: ParseProblem::Malformed }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_crlf_and_extra_columns() {
        let lg = parse_edge_list("# comment\r\nx y 0.5\r\n  # indented comment\r\ny z\r\n").unwrap();
        assert_eq!(lg.labels, vec!["x", "y", "z"]);
        assert_eq!(lg.graph.edge_count(), 2);
    }

    #[test]
    fn bfs_examples() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(bfs_distances(&path, 0).unwrap(), vec![0, 1, 2]);
        assert_eq!(bfs_distances(&cycle(5), 0).unwrap(), vec![0, 1, 2, 2, 1]);
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(bfs_distances(&two, 0).unwrap(), vec![0, 1, UNREACHABLE, UNREACHABLE]);
        assert!(matches!(bfs_distances(&two, 4), Err(Error::NodeOutOfRange { node: 4, n: 4 })));
    }

    #[test]
    fn component_examples() {
        let tri = cycle(3);
        let c = connected_components(&tri);
        assert_eq!(c.sizes, BTreeMap::from([(0, 3)]));

        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let c = connected_components(&two);
        assert_eq!(c.label, vec![0, 0, 2, 2]);
        assert_eq!(c.sizes, BTreeMap::from([(0, 2), (2, 2)]));

        let c = connected_components(&Graph::empty(4));
        assert_eq!(c.component_count(), 4);
        assert!(c.sizes.values().all(|&s| s == 1));
    }

    #[test]
    fn largest_component_examples() {
        let tri = cycle(3);
        let (lcc, map) = largest_component(&tri);
        assert_eq!(lcc, tri);
        assert_eq!(map, vec![0, 1, 2]);

        // single edge first so the K3 does not own the smallest id
        let g = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4), (2, 4)]).unwrap();
        let (lcc, map) = largest_component(&g);
        assert_eq!(map, vec![2, 3, 4]);
        assert_eq!(lcc.edge_count(), 3);

        let (lcc, map) = largest_component(&Graph::empty(3));
        assert_eq!(lcc.node_count(), 1);
        assert_eq!(map, vec![0]);
    }

    #[test]
    fn from_edges_rejects_bad_endpoints() {
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
        assert!(Graph::from_edges(2, [(1, 1)]).is_err());
    }

    #[test]
    fn write_then_parse_keeps_shape() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5)]).unwrap();
        let text = write_edge_list(&g, None);
        let back = parse_edge_list(&text).unwrap().graph;
        assert_eq!(back.node_count(), 6);
        assert_eq!(back.edge_count(), 5);
    }
}
