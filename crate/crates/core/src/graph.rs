//! Simple undirected graphs and the graph-side machinery the solvers consume:
//! connectivity, the DFS approximation forest, the `d`-improved graph,
//! greedy matchings and matching contraction.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::GraphError;
use crate::forest::RootedForest;

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
            m += list.len();
        }
        Ok(Graph { adj, m: m / 2 })
    }

    /// Like [`Graph::from_edges`] but silently drops loops and parallel edges.
    pub(crate) fn from_edges_dedup<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Graph { adj, m: m / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `vertices`; local vertex `i` is `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut m = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if local[w] != usize::MAX {
                    adj[i].push(local[w]);
                }
            }
            adj[i].sort_unstable();
            m += adj[i].len();
        }
        Graph { adj, m: m / 2 }
    }

    /// `G - v`; vertices above `v` shift down by one.
    pub fn without_vertex(&self, v: usize) -> Graph {
        let kept: Vec<usize> = (0..self.n()).filter(|&u| u != v).collect();
        self.induced_subgraph(&kept)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|list| list.iter().map(|&v| v + off).collect()),
        );
        Graph {
            adj,
            m: self.m + other.m,
        }
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || connected_components(self).len() == 1
    }
}

/// Lower bound on the treewidth: repeatedly contract a minimum-degree vertex
/// into the neighbour sharing the fewest neighbours with it, and keep the
/// largest minimum degree seen. Every intermediate graph is a minor of `g`, so
/// `td(g) >= minor_min_width(g) + 1`.
pub fn minor_min_width(g: &Graph) -> usize {
    let mut adj: Vec<BTreeSet<usize>> = (0..g.n())
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: BTreeSet<usize> = (0..g.n()).collect();
    let mut best = 0;
    while let Some(v) = alive.iter().copied().min_by_key(|&v| adj[v].len()) {
        best = best.max(adj[v].len());
        alive.remove(&v);
        let nb = std::mem::take(&mut adj[v]);
        let into = nb
            .iter()
            .copied()
            .min_by_key(|&u| adj[u].intersection(&nb).count());
        for &w in &nb {
            adj[w].remove(&v);
        }
        if let Some(u) = into {
            for &w in &nb {
                if w != u {
                    adj[u].insert(w);
                    adj[w].insert(u);
                }
            }
        }
    }
    best
}

/// One connected component together with its mapping back to the host graph.
#[derive(Clone, Debug)]
pub struct Component {
    /// `vertices[i]` is the host index of local vertex `i` (ascending).
    pub vertices: Vec<usize>,
    pub graph: Graph,
}

/// Connected components ordered by their smallest vertex.
pub fn connected_components(g: &Graph) -> Vec<Component> {
    let labels = component_labels(g);
    let count = labels.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (v, &c) in labels.iter().enumerate() {
        buckets[c].push(v);
    }
    buckets
        .into_iter()
        .map(|vertices| {
            let graph = g.induced_subgraph(&vertices);
            Component { vertices, graph }
        })
        .collect()
}

/// Component id per vertex, numbered in order of smallest member.
pub fn component_labels(g: &Graph) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n()];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Connected pieces of `vertices` once the vertices flagged in `removed` are
/// gone.
fn pieces(g: &Graph, vertices: &[usize], removed: &[bool], mark: &mut [bool]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for &s in vertices {
        if removed[s] || mark[s] {
            continue;
        }
        mark[s] = true;
        let mut piece = vec![s];
        let mut i = 0;
        while i < piece.len() {
            let v = piece[i];
            i += 1;
            for &w in g.neighbors(v) {
                if !removed[w] && !mark[w] {
                    mark[w] = true;
                    piece.push(w);
                }
            }
        }
        out.push(piece);
    }
    for p in &out {
        for &v in p {
            mark[v] = false;
        }
    }
    out
}

/// Elimination forest built top-down: each component is rooted at the vertex
/// whose removal leaves the smallest largest piece (lowest index on ties).
/// Quadratic per component; meant for small graphs.
pub fn separator_elimination_forest(g: &Graph) -> RootedForest {
    let n = g.n();
    let mut parent = vec![None; n];
    let mut removed = vec![false; n];
    let mut mark = vec![false; n];
    let all: Vec<usize> = (0..n).collect();
    let mut work: Vec<(Vec<usize>, Option<usize>)> = pieces(g, &all, &removed, &mut mark)
        .into_iter()
        .map(|p| (p, None))
        .collect();
    while let Some((comp, par)) = work.pop() {
        let mut best = (usize::MAX, usize::MAX);
        for &v in &comp {
            removed[v] = true;
            let largest = pieces(g, &comp, &removed, &mut mark)
                .iter()
                .map(Vec::len)
                .max()
                .unwrap_or(0);
            removed[v] = false;
            best = best.min((largest, v));
        }
        let v = best.1;
        parent[v] = par;
        removed[v] = true;
        for piece in pieces(g, &comp, &removed, &mut mark) {
            work.push((piece, Some(v)));
        }
    }
    RootedForest::from_parents(parent).expect("parents point upwards")
}

/// Forest of recursive DFS calls. Each component is entered at its smallest
/// vertex and neighbours are explored in ascending order. Every non-tree edge
/// of a DFS is a back edge, so the result is an elimination forest.
pub fn dfs_elimination_forest(g: &Graph) -> RootedForest {
    let n = g.n();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    // (vertex, position of the next neighbour to try)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push((s, 0));
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            if pos == g.degree(v) {
                stack.pop();
                continue;
            }
            top.1 += 1;
            let w = g.neighbors(v)[pos];
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                stack.push((w, 0));
            }
        }
    }
    RootedForest::from_parents(parent).expect("DFS parents form a forest")
}

/// The `d`-improved graph: `g` plus an edge between every non-adjacent pair
/// having at least `d + 1` common neighbours of degree at most `d`.
///
/// Only vertices of degree `<= d` can witness an added edge, so each one
/// contributes its `O(d^2)` neighbour pairs; the pairs are then bucketed by
/// sorting.
pub fn improved_graph(g: &Graph, d: usize) -> Graph {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for w in 0..g.n() {
        let nb = g.neighbors(w);
        if nb.len() > d {
            continue;
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    let mut added = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i;
        while j < pairs.len() && pairs[j] == pairs[i] {
            j += 1;
        }
        let (a, b) = pairs[i];
        if j - i > d && !g.has_edge(a, b) {
            added.push((a, b));
        }
        i = j;
    }
    if added.is_empty() {
        return g.clone();
    }
    Graph::from_edges_dedup(g.n(), g.edges().chain(added))
}

/// Whether the closed neighbourhood of `v` is a clique of `g`.
pub fn is_simplicial(g: &Graph, v: usize) -> bool {
    let nb = g.neighbors(v);
    nb.iter()
        .enumerate()
        .all(|(i, &a)| nb[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// Vertices whose closed neighbourhood in `improved_graph(g, d)` is a clique
/// there, in ascending order.
pub fn improved_simplicial_vertices(g: &Graph, d: usize) -> Vec<usize> {
    let imp = improved_graph(g, d);
    (0..imp.n()).filter(|&v| is_simplicial(&imp, v)).collect()
}

/// Certifies a clique of size at least `d + 1` in an (improved) graph through
/// a simplicial vertex of degree at least `d`. A positive answer implies
/// treedepth larger than `d`; a negative one proves nothing.
pub fn has_large_clique(g_imp: &Graph, d: usize) -> bool {
    (0..g_imp.n()).any(|v| g_imp.degree(v) >= d && is_simplicial(g_imp, v))
}

/// A set of vertex-disjoint edges, each stored as `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks disjointness and that every pair is an edge of `g`.
    pub fn is_matching_of(&self, g: &Graph) -> bool {
        let mut used = vec![false; g.n()];
        for &(u, v) in &self.edges {
            if u >= g.n() || v >= g.n() || !g.has_edge(u, v) || used[u] || used[v] {
                return false;
            }
            used[u] = true;
            used[v] = true;
        }
        true
    }

    pub fn is_maximal_in(&self, g: &Graph) -> bool {
        let mut used = vec![false; g.n()];
        for &(u, v) in &self.edges {
            used[u] = true;
            used[v] = true;
        }
        g.edges().all(|(u, v)| used[u] || used[v])
    }
}

/// Greedy maximal matching scanning edges in ascending `(min, max)` order.
pub fn greedy_maximal_matching(g: &Graph) -> Matching {
    let mut used = vec![false; g.n()];
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            edges.push((u, v));
        }
    }
    Matching { edges }
}

/// Result of contracting a matching.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: Graph,
    /// Pre-images of each contracted vertex: one host vertex, or the two
    /// endpoints `(a, b)` of a matched edge with `a < b`.
    pub preimages: Vec<Vec<usize>>,
}

/// Contracts every edge of `m`. Contracted vertices keep the relative order
/// of their smallest pre-image.
pub fn contract_matching(g: &Graph, m: &Matching) -> Contraction {
    let n = g.n();
    let mut partner = vec![usize::MAX; n];
    for &(a, b) in &m.edges {
        partner[a] = b;
        partner[b] = a;
    }
    let mut image = vec![usize::MAX; n];
    let mut preimages = Vec::new();
    for v in 0..n {
        if image[v] != usize::MAX {
            continue;
        }
        let id = preimages.len();
        image[v] = id;
        let p = partner[v];
        if p != usize::MAX {
            image[p] = id;
            preimages.push(vec![v.min(p), v.max(p)]);
        } else {
            preimages.push(vec![v]);
        }
    }
    let graph = Graph::from_edges_dedup(
        preimages.len(),
        g.edges().map(|(u, v)| (image[u], image[v])),
    );
    Contraction { graph, preimages }
}

/// Configuration of the matching/simplicial dispatch.
#[derive(Clone, Debug, PartialEq)]
pub struct BodlaenderConfig {
    /// Overrides the fraction constant `c(d)`; the default is `72 (d+1)^6`.
    pub fraction_constant: Option<f64>,
}

impl Default for BodlaenderConfig {
    fn default() -> Self {
        BodlaenderConfig {
            fraction_constant: None,
        }
    }
}

impl BodlaenderConfig {
    pub fn constant(&self, d: usize) -> f64 {
        self.fraction_constant
            .unwrap_or_else(|| 72.0 * ((d + 1) as f64).powi(6))
    }

    /// Size threshold `n / c(d)`.
    pub fn threshold(&self, n: usize, d: usize) -> f64 {
        n as f64 / self.constant(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BodlaenderOutcome {
    LargeMatching(Matching),
    SimplicialSet(Vec<usize>),
    TooDeep,
}

/// One step of the contraction scheme.
///
/// `TooDeep` is returned only on a certificate: an improved-simplicial vertex
/// whose closed neighbourhood is a clique of at least `d + 1` vertices.
/// Otherwise the greedy matching is preferred when it reaches `n / c(d)`, then
/// the improved-simplicial set; if neither reaches the threshold the larger
/// of the two is returned so the caller always makes progress.
///
/// Caller must ensure `m <= d * n`.
pub fn bodlaender_step(g: &Graph, d: usize, cfg: &BodlaenderConfig) -> BodlaenderOutcome {
    let imp = improved_graph(g, d);
    let simplicial: Vec<usize> = (0..imp.n()).filter(|&v| is_simplicial(&imp, v)).collect();
    if simplicial.iter().any(|&v| imp.degree(v) >= d) {
        return BodlaenderOutcome::TooDeep;
    }
    let threshold = cfg.threshold(g.n(), d);
    let matching = greedy_maximal_matching(g);
    if !matching.is_empty() && matching.len() as f64 >= threshold {
        return BodlaenderOutcome::LargeMatching(matching);
    }
    if !simplicial.is_empty() && simplicial.len() as f64 >= threshold {
        return BodlaenderOutcome::SimplicialSet(simplicial);
    }
    if matching.len() >= simplicial.len() && !matching.is_empty() {
        BodlaenderOutcome::LargeMatching(matching)
    } else {
        BodlaenderOutcome::SimplicialSet(simplicial)
    }
}
