//! Brute-force ground truth and instance generators. Test-only in spirit:
//! memo tables are exponential in `n`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::OracleError;
use crate::forest::{check_sensible, is_elimination_forest, RootedForest};
use crate::graph::Graph;

pub const MAX_TD_VERTICES: usize = 20;
pub const MAX_COUNT_VERTICES: usize = 7;

const UNKNOWN: u8 = u8::MAX;

struct TdMemo {
    adj: Vec<u32>,
    memo: Vec<u8>,
}

impl TdMemo {
    fn td(&mut self, set: u32) -> u8 {
        if set == 0 {
            return 0;
        }
        if self.memo[set as usize] != UNKNOWN {
            return self.memo[set as usize];
        }
        let first = self.component_of(set, set.trailing_zeros());
        let val = if first != set {
            let mut best = 0;
            let mut rest = set;
            while rest != 0 {
                let c = self.component_of(set, rest.trailing_zeros());
                best = best.max(self.td(c));
                rest &= !c;
            }
            best
        } else {
            let mut best = u8::MAX;
            let mut rest = set;
            while rest != 0 {
                let v = rest.trailing_zeros();
                rest &= rest - 1;
                best = best.min(1 + self.td(set & !(1 << v)));
            }
            best
        };
        self.memo[set as usize] = val;
        val
    }

    fn component_of(&self, set: u32, v: u32) -> u32 {
        let mut comp = 1u32 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let x = frontier.trailing_zeros();
            frontier &= frontier - 1;
            let new = self.adj[x as usize] & set & !comp;
            comp |= new;
            frontier |= new;
        }
        comp
    }
}

/// Treedepth by exhaustive recursion over vertex subsets (`n <= 20`).
pub fn brute_td(g: &Graph) -> Result<usize, OracleError> {
    let n = g.n();
    if n > MAX_TD_VERTICES {
        return Err(OracleError::TooLarge {
            n,
            max: MAX_TD_VERTICES,
        });
    }
    let adj = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut memo = TdMemo {
        adj,
        memo: vec![UNKNOWN; 1 << n],
    };
    let all = if n == 0 { 0 } else { (1u32 << n) - 1 };
    Ok(memo.td(all) as usize)
}

/// Calls `visit` on every elimination tree (single root) of `g` with depth at
/// most `d` that is sensible with respect to `t`.
fn for_each_sensible_tree(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    mut visit: impl FnMut(&RootedForest),
) -> Result<(), OracleError> {
    let n = g.n();
    if n > MAX_COUNT_VERTICES {
        return Err(OracleError::TooLarge {
            n,
            max: MAX_COUNT_VERTICES,
        });
    }
    if n == 0 {
        return Ok(());
    }
    // choice[v] == v encodes "root"
    let mut choice = vec![0usize; n];
    loop {
        let roots = (0..n).filter(|&v| choice[v] == v).count();
        if roots == 1 {
            let parents = (0..n)
                .map(|v| (choice[v] != v).then_some(choice[v]))
                .collect();
            if let Ok(r) = RootedForest::from_parents(parents) {
                if r.depth() <= d && is_elimination_forest(g, &r) && check_sensible(t, &r) {
                    visit(&r);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            choice[i] += 1;
            if choice[i] < n {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Number of labeled elimination trees of `g` with depth at most `d` that are
/// sensible with respect to `t` (`n <= 7`).
pub fn brute_count_sensible(g: &Graph, t: &RootedForest, d: usize) -> Result<u64, OracleError> {
    let mut count = 0u64;
    for_each_sensible_tree(g, t, d, |_| count += 1)?;
    Ok(count)
}

/// Like [`brute_count_sensible`], split by the root of the counted tree.
pub fn brute_count_sensible_by_root(
    g: &Graph,
    t: &RootedForest,
    d: usize,
) -> Result<Vec<u64>, OracleError> {
    let mut per_root = vec![0u64; g.n()];
    for_each_sensible_tree(g, t, d, |r| per_root[r.roots()[0]] += 1)?;
    Ok(per_root)
}

/// Vertices `v` with `td(g - v) < td(g)`, for connected `g`.
pub fn brute_root_candidates(g: &Graph) -> Result<Vec<usize>, OracleError> {
    let td = brute_td(g)?;
    let mut out = Vec::new();
    for v in 0..g.n() {
        if brute_td(&g.without_vertex(v))? < td {
            out.push(v);
        }
    }
    Ok(out)
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycles need at least 3 vertices");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle")
}

pub fn clique(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("clique")
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
    Graph::from_edges(a + b, edges).expect("bipartite")
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star")
}

/// Uniform graph with `n` vertices and `m` distinct edges.
pub fn random_graph(n: usize, m: usize, seed: u64) -> Graph {
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(m <= pairs.len(), "too many edges requested");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = pairs.partial_shuffle(&mut rng, m);
    Graph::from_edges(n, chosen.iter().copied()).expect("random graph")
}

/// Random labeled tree: vertex `i` of a random order attaches to a uniformly
/// chosen earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let edges: Vec<(usize, usize)> = (1..n)
        .map(|i| (order[rng.gen_range(0..i)], order[i]))
        .collect();
    Graph::from_edges(n, edges).expect("random tree")
}

/// Random connected graph: a random tree plus `extra` further random edges
/// (fewer if the graph fills up).
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let tree = random_tree(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !tree.has_edge(u, v))
        .collect();
    let k = extra.min(missing.len());
    let (chosen, _) = missing.partial_shuffle(&mut rng, k);
    Graph::from_edges(n, tree.edges().chain(chosen.iter().copied())).expect("connected graph")
}

pub fn disjoint_union(graphs: &[Graph]) -> Graph {
    graphs
        .iter()
        .fold(Graph::new(0), |acc, g| acc.disjoint_union(g))
}

fn pair_bit(n: usize, u: usize, v: usize) -> u32 {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    // row-major index into the strict upper triangle
    (u * (2 * n - u - 1) / 2 + (v - u - 1)) as u32
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// One representative per isomorphism class of connected graphs on exactly
/// `n` vertices (`1 <= n <= 7`).
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "catalog supports 1..=7 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if edges.len() + 1 < n {
            continue;
        }
        let g = Graph::from_edges(n, edges.iter().copied()).expect("catalog graph");
        if !g.is_connected() {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                edges
                    .iter()
                    .fold(0u32, |m, &(u, v)| m | 1 << pair_bit(n, p[u], p[v]))
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

/// Connected graphs on `1..=max_n` vertices, one per isomorphism class.
pub fn connected_catalog(max_n: usize) -> Vec<Graph> {
    (1..=max_n).flat_map(connected_graphs).collect()
}

/// Every graph (connected or not, labeled) on `n <= 6` vertices.
pub fn all_labeled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= 6, "labeled enumeration supports at most 6 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..(1u32 << pairs.len())).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        Graph::from_edges(n, edges).expect("labeled graph")
    })
}

/// Relabels `g` by `perm` (vertex `v` becomes `perm[v]`).
pub fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    Graph::from_edges(g.n(), g.edges().map(|(u, v)| (perm[u], perm[v]))).expect("relabel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dfs_elimination_forest;

    #[test]
    fn td_examples() {
        for n in 1..=6 {
            assert_eq!(brute_td(&clique(n)).unwrap(), n);
        }
        assert_eq!(brute_td(&path(3)).unwrap(), 2);
        assert_eq!(brute_td(&cycle(5)).unwrap(), 4);
        assert_eq!(brute_td(&cycle(4)).unwrap(), 3);
        assert_eq!(brute_td(&path(7)).unwrap(), 3);
        assert_eq!(brute_td(&path(8)).unwrap(), 4);
        assert_eq!(brute_td(&Graph::new(0)).unwrap(), 0);
        assert_eq!(brute_td(&Graph::new(4)).unwrap(), 1);
        assert!(brute_td(&Graph::new(21)).is_err());
    }

    #[test]
    fn count_examples() {
        let k1 = Graph::new(1);
        assert_eq!(brute_count_sensible(&k1, &RootedForest::singleton(), 1).unwrap(), 1);
        let k2 = clique(2);
        assert_eq!(brute_count_sensible(&k2, &dfs_elimination_forest(&k2), 2).unwrap(), 2);
        let k3 = clique(3);
        assert_eq!(brute_count_sensible(&k3, &dfs_elimination_forest(&k3), 3).unwrap(), 6);
        let p3 = path(3);
        let t = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        assert_eq!(brute_count_sensible_by_root(&p3, &t, 2).unwrap(), vec![0, 1, 0]);
        assert!(brute_count_sensible(&Graph::new(8), &RootedForest::chain(&[0]), 1).is_err());
    }

    #[test]
    fn generators() {
        assert_eq!(path(3).edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(clique(4).m(), 6);
        assert_eq!(complete_bipartite(2, 3).m(), 6);
        assert_eq!(star(3).degree(0), 3);
        assert_eq!(random_graph(10, 15, 7), random_graph(10, 15, 7));
        assert_eq!(random_graph(10, 15, 7).m(), 15);
        let t = random_tree(30, 3);
        assert!(t.is_connected());
        assert_eq!(t.m(), 29);
        assert!(random_connected(12, 5, 1).is_connected());
        assert_eq!(disjoint_union(&[path(2), path(3)]).n(), 5);
    }

    #[test]
    fn catalog_sizes() {
        let sizes: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn root_candidates() {
        assert_eq!(brute_root_candidates(&path(3)).unwrap(), vec![1]);
        assert_eq!(brute_root_candidates(&star(3)).unwrap(), vec![0]);
        assert_eq!(brute_root_candidates(&clique(3)).unwrap(), vec![0, 1, 2]);
    }
}
