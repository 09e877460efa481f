//! Rooted forests stored as parent arrays, the ancestor machinery built on
//! them, and the forest surgeries used by both solvers.

use std::collections::BTreeSet;

use crate::error::ForestError;
use crate::graph::{component_labels, Contraction, Graph};

/// Rooted forest on vertices `0..n`. Roots have depth one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RootedForest {
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
}

impl RootedForest {
    /// Builds a forest from parent pointers (`None` marks a root).
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, ForestError> {
        let n = parent.len();
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(ForestError::ParentOutOfRange { vertex: v, parent: p });
                }
            }
        }
        // 0 = unknown; filled bottom-up along each parent chain
        let mut depth = vec![0usize; n];
        let mut chain = Vec::new();
        for s in 0..n {
            let mut v = s;
            while depth[v] == 0 {
                chain.push(v);
                if chain.len() > n {
                    return Err(ForestError::Cycle(s));
                }
                match parent[v] {
                    Some(p) => v = p,
                    None => break,
                }
            }
            let mut base = if depth[v] == 0 { 0 } else { depth[v] };
            while let Some(u) = chain.pop() {
                base += 1;
                depth[u] = base;
            }
        }
        Ok(RootedForest { parent, depth })
    }

    pub fn empty() -> Self {
        RootedForest::default()
    }

    pub fn singleton() -> Self {
        RootedForest {
            parent: vec![None],
            depth: vec![1],
        }
    }

    /// A single path `order[0] -> order[1] -> ...` on `order.len()` vertices.
    pub fn chain(order: &[usize]) -> Self {
        let mut parent = vec![None; order.len()];
        for w in order.windows(2) {
            parent[w[1]] = Some(w[0]);
        }
        RootedForest::from_parents(parent).expect("chain is a forest")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn depth_of(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Maximum vertex depth; zero for the empty forest.
    pub fn depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.parent[v].is_none()).collect()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(v);
            }
        }
        ch
    }

    /// Vertices ordered so that every ancestor precedes its descendants.
    pub fn preorder(&self) -> Vec<usize> {
        let ch = self.children();
        let mut order = Vec::with_capacity(self.len());
        let mut stack: Vec<usize> = self.roots().into_iter().rev().collect();
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(ch[v].iter().rev());
        }
        order
    }

    /// `a` is an ancestor of `b` (every vertex is its own ancestor).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut v = b;
        while self.depth[v] > self.depth[a] {
            v = self.parent[v].expect("depth > 1 implies a parent");
        }
        v == a
    }

    /// The ancestor/descendant relation in either direction.
    pub fn anc(&self, u: usize, v: usize) -> bool {
        if self.depth[u] <= self.depth[v] {
            self.is_ancestor(u, v)
        } else {
            self.is_ancestor(v, u)
        }
    }

    /// `tail[u]`: ancestors of `u` including `u`.
    pub fn tail(&self, u: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut v = Some(u);
        while let Some(x) = v {
            out.insert(x);
            v = self.parent[x];
        }
        out
    }

    /// `tree[u]`: descendants of `u` including `u`.
    pub fn tree(&self, u: usize) -> BTreeSet<usize> {
        (0..self.len()).filter(|&v| self.is_ancestor(u, v)).collect()
    }

    /// `comp[u] = tail[u] ∪ tree[u]`.
    pub fn comp(&self, u: usize) -> BTreeSet<usize> {
        let mut out = self.tail(u);
        out.extend(self.tree(u));
        out
    }

    /// Ancestor closure: union of tails of the given vertices.
    pub fn closure<I: IntoIterator<Item = usize>>(&self, vertices: I) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for u in vertices {
            let mut v = Some(u);
            while let Some(x) = v {
                if !out.insert(x) {
                    break;
                }
                v = self.parent[x];
            }
        }
        out
    }

    /// Forest on `vertices` (local index `i` is `vertices[i]`) with the
    /// ancestor relation inherited from `self`.
    pub fn induced(&self, vertices: &[usize]) -> RootedForest {
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let parent = vertices
            .iter()
            .map(|&v| {
                let mut p = self.parent[v];
                while let Some(x) = p {
                    if local[x] != usize::MAX {
                        return Some(local[x]);
                    }
                    p = self.parent[x];
                }
                None
            })
            .collect();
        RootedForest::from_parents(parent).expect("inherited relation is a forest")
    }
}

/// Whether `f` is an elimination forest of `g` of depth at most `d`.
pub fn validate_elimination_forest(g: &Graph, f: &RootedForest, d: usize) -> bool {
    f.len() == g.n() && f.depth() <= d && g.edges().all(|(u, v)| f.anc(u, v))
}

/// Whether every edge of `g` is bound by the ancestor relation of `f`.
pub fn is_elimination_forest(g: &Graph, f: &RootedForest) -> bool {
    f.len() == g.n() && g.edges().all(|(u, v)| f.anc(u, v))
}

/// Splits an elimination forest along the connected components of `g`: the
/// parent of `u` becomes its nearest proper ancestor lying in the same
/// component. Depths never increase. Runs a single DFS over `f`.
pub fn restrict_to_components(g: &Graph, f: &RootedForest) -> RootedForest {
    let label = component_labels(g);
    let comps = label.iter().map(|&c| c + 1).max().unwrap_or(0);
    let ch = f.children();
    let mut last: Vec<Option<usize>> = vec![None; comps];
    let mut parent = vec![None; f.len()];
    // (vertex, saved last[label[vertex]], entering?)
    let mut stack: Vec<(usize, Option<usize>, bool)> =
        f.roots().into_iter().rev().map(|r| (r, None, true)).collect();
    while let Some((v, saved, entering)) = stack.pop() {
        let c = label[v];
        if entering {
            parent[v] = last[c];
            let prev = last[c];
            last[c] = Some(v);
            stack.push((v, prev, false));
            for &w in ch[v].iter().rev() {
                stack.push((w, None, true));
            }
        } else {
            last[c] = saved;
        }
    }
    RootedForest::from_parents(parent).expect("restriction is a forest")
}

/// Deletes `v`; its children adopt its parent (or become roots). Vertices
/// above `v` shift down by one, matching [`Graph::without_vertex`].
pub fn remove_vertex(f: &RootedForest, v: usize) -> RootedForest {
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let parent = (0..f.len())
        .filter(|&u| u != v)
        .map(|u| match f.parent[u] {
            Some(p) if p == v => f.parent[v].map(shift),
            Some(p) => Some(shift(p)),
            None => None,
        })
        .collect();
    RootedForest::from_parents(parent).expect("removal keeps a forest")
}

/// Inserts a new vertex at index `v` (existing vertices `>= v` shift up) and
/// makes it the parent of every former root.
pub fn attach_root(f: &RootedForest, v: usize) -> RootedForest {
    assert!(v <= f.len(), "insertion index out of range");
    let shift = |x: usize| if x >= v { x + 1 } else { x };
    let mut parent = Vec::with_capacity(f.len() + 1);
    for u in 0..=f.len() {
        if u == v {
            parent.push(None);
        }
        if u < f.len() {
            parent.push(Some(f.parent[u].map(shift).unwrap_or(v)));
        }
    }
    RootedForest::from_parents(parent).expect("attaching a root keeps a forest")
}

/// Reverts a matching contraction: each contracted vertex is replaced by its
/// two pre-images, the smaller one taking its place and the larger one
/// hanging below it and adopting its children.
pub fn expand_contracted_forest(f: &RootedForest, c: &Contraction) -> RootedForest {
    let n: usize = c.preimages.iter().map(Vec::len).sum();
    // the vertex standing in for x towards its children
    let bottom = |x: usize| *c.preimages[x].last().unwrap();
    let mut parent = vec![None; n];
    for (x, pre) in c.preimages.iter().enumerate() {
        parent[pre[0]] = f.parent(x).map(bottom);
        if pre.len() == 2 {
            parent[pre[1]] = Some(pre[0]);
        }
    }
    RootedForest::from_parents(parent).expect("expansion keeps a forest")
}

/// Re-inserts the improved-simplicial vertices `order` one by one, each below
/// its lowest already present neighbour in `g_imp` (or as a new root).
///
/// `f_rest` is a forest on `kept` (local index `i` is host vertex `kept[i]`).
/// Returns `None` when `td(g_imp) > d` is certified: some re-inserted vertex
/// sees a clique of `d` or more neighbours, or the result is deeper than `2d`.
pub fn lift_simplicial(
    f_rest: &RootedForest,
    kept: &[usize],
    g_imp: &Graph,
    order: &[usize],
    d: usize,
) -> Option<RootedForest> {
    let n = g_imp.n();
    let mut parent = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut present = vec![false; n];
    for (i, &v) in kept.iter().enumerate() {
        parent[v] = f_rest.parent(i).map(|p| kept[p]);
        depth[v] = f_rest.depth_of(i);
        present[v] = true;
    }
    for &v in order {
        let mut count = 0;
        let mut lowest: Option<usize> = None;
        for &w in g_imp.neighbors(v) {
            if present[w] {
                count += 1;
                if lowest.map_or(true, |l| depth[w] > depth[l]) {
                    lowest = Some(w);
                }
            }
        }
        if count >= d {
            return None;
        }
        parent[v] = lowest;
        depth[v] = lowest.map_or(1, |l| depth[l] + 1);
        if depth[v] > 2 * d {
            return None;
        }
        present[v] = true;
    }
    Some(RootedForest::from_parents(parent).expect("lifting keeps a forest"))
}

/// Whether `r` is sensible with respect to `t`: for every `u` and distinct
/// children `v1, v2` of `u` in `t`,
/// `cl_r(comp_t[v1]) ∩ cl_r(comp_t[v2]) = cl_r(tail_t[u])`.
pub fn check_sensible(t: &RootedForest, r: &RootedForest) -> bool {
    let ch = t.children();
    for u in 0..t.len() {
        if ch[u].len() < 2 {
            continue;
        }
        let base = r.closure(t.tail(u));
        let closures: Vec<BTreeSet<usize>> = ch[u].iter().map(|&v| r.closure(t.comp(v))).collect();
        for i in 0..closures.len() {
            for j in i + 1..closures.len() {
                let inter: BTreeSet<usize> = closures[i].intersection(&closures[j]).copied().collect();
                if inter != base {
                    return false;
                }
            }
        }
    }
    true
}

/// Sentinel parent of the root of a [`PrefixTree`].
pub const NO_PARENT: u8 = u8::MAX;

/// Small rooted tree used as the skeleton `K` of the counting recursion.
/// Vertices are `0..len()`; new vertices are only appended and removed again
/// from the end, so the tree doubles as an undo stack.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixTree {
    parent: Vec<u8>,
    depth: Vec<u8>,
    anc: Vec<u128>,
    desc: Vec<u128>,
}

impl PrefixTree {
    pub fn new() -> Self {
        PrefixTree::default()
    }

    /// A path on `p` vertices rooted at vertex 0.
    pub fn path(p: usize) -> Self {
        let mut k = PrefixTree::new();
        k.push_path(None, p);
        k
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    pub fn depth_of(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    pub fn depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.parent[v] == NO_PARENT
    }

    /// Appends a fresh path `w -> w1 -> ... -> wp` below `w` (or a new root
    /// path when `w` is `None`). Returns the index of `w1`; `wp` is
    /// `w1 + p - 1`.
    pub fn push_path(&mut self, w: Option<usize>, p: usize) -> usize {
        let first = self.len();
        assert!(first + p <= 128, "prefix tree too large");
        let (mut par, mut dep, mut above) = match w {
            Some(w) => (w as u8, self.depth[w], self.anc[w]),
            None => (NO_PARENT, 0, 0),
        };
        for i in 0..p {
            let x = first + i;
            dep += 1;
            above |= 1 << x;
            self.parent.push(par);
            self.depth.push(dep);
            self.anc.push(above);
            self.desc.push(0);
            let mut m = above;
            while m != 0 {
                let a = m.trailing_zeros() as usize;
                m &= m - 1;
                self.desc[a] |= 1 << x;
            }
            par = x as u8;
        }
        first
    }

    /// `K[w, w1, ..., wp]` as a new tree.
    pub fn extended(&self, w: usize, p: usize) -> Self {
        let mut k = self.clone();
        k.push_path(Some(w), p);
        k
    }

    pub fn truncate(&mut self, len: usize) {
        if len >= self.len() {
            return;
        }
        self.parent.truncate(len);
        self.depth.truncate(len);
        self.anc.truncate(len);
        self.desc.truncate(len);
        let keep = if len >= 128 { u128::MAX } else { (1u128 << len) - 1 };
        for m in &mut self.desc {
            *m &= keep;
        }
    }

    /// `a` is an ancestor of `b` (inclusive).
    #[inline]
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.anc[b] >> a & 1 == 1
    }

    /// Bit `a` is set for every ancestor `a` of `v` (inclusive).
    #[inline]
    pub fn ancestor_mask(&self, v: usize) -> u128 {
        self.anc[v]
    }

    /// Bit `b` is set for every descendant `b` of `v` (inclusive).
    #[inline]
    pub fn descendant_mask(&self, v: usize) -> u128 {
        self.desc[v]
    }

    /// All vertices as a mask.
    #[inline]
    pub fn full_mask(&self) -> u128 {
        match self.len() {
            128 => u128::MAX,
            l => (1u128 << l) - 1,
        }
    }

    #[inline]
    pub fn anc(&self, a: usize, b: usize) -> bool {
        (self.anc[b] | self.desc[b]) >> a & 1 == 1
    }

    /// Leaves of the tree in ascending order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut internal = vec![false; self.len()];
        for &p in &self.parent {
            if p != NO_PARENT {
                internal[p as usize] = true;
            }
        }
        (0..self.len()).filter(|&v| !internal[v]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn rejects_cycles() {
        assert_eq!(
            RootedForest::from_parents(vec![Some(1), Some(0)]),
            Err(ForestError::Cycle(0))
        );
        assert!(RootedForest::from_parents(vec![Some(3)]).is_err());
    }

    #[test]
    fn ancestor_queries_on_chain() {
        let f = RootedForest::chain(&[0, 1, 2]);
        assert_eq!(f.tail(2), set(&[0, 1, 2]));
        assert_eq!(f.tree(0), set(&[0, 1, 2]));
        assert_eq!(f.comp(1), set(&[0, 1, 2]));
        for u in 0..3 {
            assert!(f.is_ancestor(u, u));
        }
        let two = RootedForest::from_parents(vec![None, None]).unwrap();
        assert_eq!(two.closure([0, 1]), set(&[0, 1]));
        assert!(!two.is_ancestor(0, 1));
        assert!(!two.anc(0, 1));
    }

    #[test]
    fn validation_examples() {
        let p3 = path(3);
        let star = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        assert!(validate_elimination_forest(&p3, &star, 2));
        let chain = RootedForest::chain(&[0, 1, 2]);
        assert!(!validate_elimination_forest(&p3, &chain, 2));
        assert!(validate_elimination_forest(&p3, &chain, 3));
        let split = RootedForest::from_parents(vec![None, None]).unwrap();
        assert!(!validate_elimination_forest(&path(2), &split, 2));
    }

    #[test]
    fn restriction_examples() {
        let r = restrict_to_components(&Graph::new(2), &RootedForest::chain(&[0, 1]));
        assert_eq!(r.roots(), vec![0, 1]);
        assert_eq!(r.depth(), 1);

        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let r = restrict_to_components(&g, &RootedForest::chain(&[0, 1, 2, 3]));
        assert_eq!(r.parents(), &[None, Some(0), None, Some(2)]);

        let star = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        assert_eq!(restrict_to_components(&path(3), &star), star);
    }

    #[test]
    fn removal_and_attachment() {
        let f = remove_vertex(&RootedForest::chain(&[0, 1, 2]), 1);
        assert_eq!(f.parents(), &[None, Some(0)]);
        let f = remove_vertex(&RootedForest::chain(&[0, 1]), 0);
        assert_eq!(f, RootedForest::singleton());
        let star = RootedForest::from_parents(vec![None, Some(0), Some(0)]).unwrap();
        assert_eq!(remove_vertex(&star, 0).roots(), vec![0, 1]);

        assert_eq!(attach_root(&RootedForest::empty(), 0), RootedForest::singleton());
        let two = RootedForest::from_parents(vec![None, None]).unwrap();
        let s = attach_root(&two, 0);
        assert_eq!(s.parents(), &[None, Some(0), Some(0)]);
        assert_eq!(s.depth(), 2);
        let deep = attach_root(&RootedForest::chain(&[0, 1, 2]), 3);
        assert_eq!(deep.depth(), 4);
        assert_eq!(deep.roots(), vec![3]);
    }

    #[test]
    fn expansion_examples() {
        use crate::graph::{contract_matching, Matching};
        let k2 = path(2);
        let c = contract_matching(&k2, &Matching { edges: vec![(0, 1)] });
        let f = expand_contracted_forest(&RootedForest::singleton(), &c);
        assert_eq!(f.depth(), 2);
        assert!(validate_elimination_forest(&k2, &f, 2));

        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let c = contract_matching(&c4, &Matching { edges: vec![(0, 1), (2, 3)] });
        let f = expand_contracted_forest(&RootedForest::chain(&[0, 1]), &c);
        assert_eq!(f.depth(), 4);
        assert!(validate_elimination_forest(&c4, &f, 4));

        // unmatched vertices keep their relative order
        let p4 = path(4);
        let c = contract_matching(&p4, &Matching { edges: vec![(1, 2)] });
        let fm = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        let f = expand_contracted_forest(&fm, &c);
        assert!(f.is_ancestor(1, 0) && f.is_ancestor(1, 3));
        assert!(validate_elimination_forest(&p4, &f, 4));
    }

    #[test]
    fn lifting_examples() {
        // isolated vertex becomes a root
        let g = Graph::new(2);
        let f = lift_simplicial(&RootedForest::singleton(), &[0], &g, &[1], 2).unwrap();
        assert_eq!(f.roots(), vec![0, 1]);

        // leaf 2 adjacent only to 1
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let f = lift_simplicial(&RootedForest::chain(&[0, 1]), &[0, 1], &g, &[2], 3).unwrap();
        assert_eq!(f.parent(2), Some(1));
        assert_eq!(f.depth_of(2), 3);

        // d+1 pairwise adjacent simplicial vertices hanging off a depth-d chain
        let d = 2;
        let chain_len = d;
        let extra = d + 1;
        let n = chain_len + extra;
        let mut edges: Vec<(usize, usize)> = (1..chain_len).map(|i| (i - 1, i)).collect();
        for a in chain_len..n {
            edges.push((chain_len - 1, a));
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        let kept: Vec<usize> = (0..chain_len).collect();
        let order: Vec<usize> = (chain_len..n).collect();
        assert!(lift_simplicial(&RootedForest::chain(&kept), &kept, &g, &order, d).is_none());
    }

    #[test]
    fn sensible_examples() {
        let chain = RootedForest::chain(&[0, 1, 2]);
        let any = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        assert!(check_sensible(&chain, &any));
        let star = RootedForest::from_parents(vec![Some(1), None, Some(1)]).unwrap();
        assert!(check_sensible(&star, &star));
        // star at 0 over {1, 2, 3}; r hangs 1 and 2 below 3 but not 0
        let t = RootedForest::from_parents(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        let r = RootedForest::from_parents(vec![None, Some(3), Some(3), None]).unwrap();
        assert!(!check_sensible(&t, &r));
    }

    #[test]
    fn prefix_tree_paths() {
        let mut k = PrefixTree::path(2);
        assert_eq!(k.leaves(), vec![1]);
        let first = k.push_path(Some(0), 2);
        assert_eq!(first, 2);
        assert_eq!(k.depth_of(3), 3);
        assert!(k.is_ancestor(0, 3) && !k.anc(1, 3));
        assert_eq!(k.leaves(), vec![1, 3]);
        k.truncate(2);
        assert_eq!(k, PrefixTree::path(2));
        assert_eq!(PrefixTree::path(2).extended(1, 1).depth(), 3);
    }
}
