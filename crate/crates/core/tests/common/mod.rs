#![allow(dead_code)]

use rand::Rng;
use smallworld::Graph;

/// Uniform random simple graph with `n` nodes and edge probability `p`,
/// built pair by pair (independent of the crate's generators).
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// (triangles, open triples) by enumerating every node triple.
pub fn brute_triads(g: &Graph) -> (u64, u64) {
    let a = adjacency(g);
    let n = g.node_count();
    let (mut t, mut v) = (0, 0);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                match a[i][j] as u8 + a[i][k] as u8 + a[j][k] as u8 {
                    3 => t += 1,
                    2 => v += 1,
                    _ => {}
                }
            }
        }
    }
    (t, v)
}

/// Floyd–Warshall over the whole graph, then the sum of distances and the
/// number of unordered pairs inside a largest component (ties broken by the
/// smallest member id).
pub fn floyd_warshall_lcc(g: &Graph) -> (u64, u64, usize) {
    let n = g.node_count();
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    // component of i = reachable set; pick largest, earliest min id
    let mut best: Option<Vec<usize>> = None;
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| d[i][j] < INF).collect();
        for &j in &comp {
            seen[j] = true;
        }
        if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
            best = Some(comp);
        }
    }
    let comp = best.unwrap_or_default();
    let mut sum = 0;
    let mut pairs = 0;
    for (x, &i) in comp.iter().enumerate() {
        for &j in &comp[x + 1..] {
            sum += d[i][j];
            pairs += 1;
        }
    }
    (sum, pairs, comp.len())
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}
