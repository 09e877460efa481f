//! Counting elimination trees of depth at most `d` that are sensible with
//! respect to an auxiliary elimination tree `T`, in polynomial space.
//!
//! Two mutually recursive polynomials are evaluated over `T`: `f(u, K, phi, A)`
//! and `g(u, K, phi, A)`, where `K` is a small prefix skeleton, `phi` maps the
//! ancestors of `u` into `K` and `A` is the set of `K`-vertices that may still
//! receive images. The count is the free term of `h`.
//!
//! With pruning enabled every call carries the window of degrees its caller
//! actually reads, and an image that breaks an edge is rejected as soon as it
//! is assigned rather than at the leaves. Only the free term of `h` is
//! meaningful in that mode; the unpruned mode evaluates every polynomial in
//! full (up to the cap) and is the reference.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::error::CountError;
use crate::forest::{is_elimination_forest, restrict_to_components, PrefixTree, RootedForest};
use crate::graph::{connected_components, Graph};
use crate::polyring::{CoefficientRing, Integers, Ring, TruncatedPolynomial, ZmodBig, Zmod64};

/// Largest supported `d * k`; `A` is kept as a 128-bit mask over `V(K)`.
pub const MAX_PREFIX: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// Degree cap of every polynomial; `None` means `d * k`.
    pub cap: Option<usize>,
    /// Degree windows and early edge checks.
    pub prune: bool,
    /// Give up with [`CountError::DeadlineExceeded`] once this passes.
    pub deadline: Option<Instant>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            cap: None,
            prune: true,
            deadline: None,
        }
    }
}

impl EngineOptions {
    pub fn unpruned(cap: Option<usize>) -> Self {
        EngineOptions {
            cap,
            prune: false,
            deadline: None,
        }
    }

    pub fn with_deadline(deadline: Option<Instant>) -> Self {
        EngineOptions {
            deadline,
            ..EngineOptions::default()
        }
    }
}

/// One evaluated `f(u, ...)`, reported to a probe.
pub struct Frame<'a, R: Ring> {
    pub u: usize,
    /// `|tree_T[u]|`
    pub subtree_size: usize,
    pub prefix_len: usize,
    pub poly: &'a TruncatedPolynomial<R>,
}

pub type Probe<'p, R> = &'p mut dyn FnMut(&Frame<'_, R>);

type Poly<R> = TruncatedPolynomial<R>;

struct Engine<'a, 'p, R: Ring> {
    ring: &'a R,
    children: Vec<Vec<usize>>,
    tdepth: Vec<usize>,
    below: Vec<usize>,
    up: Vec<Vec<usize>>,
    d: usize,
    cap: usize,
    prune: bool,
    weights: Option<&'a [R::Elem]>,
    k: PrefixTree,
    phi: Vec<usize>,
    tpath: Vec<usize>,
    /// Preorder of `T` and each vertex's position in it.
    order: Vec<usize>,
    pos: Vec<usize>,
    probe: Option<Probe<'p, R>>,
    deadline: Option<Instant>,
    ticks: u32,
    expired: bool,
}

fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let b = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(b)
    })
}

impl<'a, 'p, R: Ring> Engine<'a, 'p, R> {
    fn zero(&self) -> Poly<R> {
        Poly::zero(self.cap)
    }

    fn one(&self) -> Poly<R> {
        Poly::one(self.cap, self.ring)
    }

    fn zero_in_window(&self, p: &Poly<R>, lo: usize, hi: usize) -> bool {
        p.coeffs()
            .iter()
            .enumerate()
            .skip(lo)
            .take_while(|(i, _)| *i <= hi)
            .all(|(_, c)| self.ring.is_zero(c))
    }

    /// Vertices of `K` comparable to the images of all upward neighbours of
    /// `u`, and those below all of them.
    fn edge_masks(&self, u: usize) -> (u128, u128) {
        let mut comparable = self.k.full_mask();
        let mut below = comparable;
        for &j in &self.up[u] {
            let x = self.phi[j - 1];
            let dm = self.k.descendant_mask(x);
            comparable &= dm | self.k.ancestor_mask(x);
            below &= dm;
        }
        (comparable, below)
    }

    /// Pruned `f` at a leaf of `T` is `c0 + c1 x`: `u` either takes a fresh
    /// child of some vertex below all its upward neighbours, or a free vertex
    /// of `A`.
    fn leaf_coeffs(&self, u: usize, a: u128, used: u128, lo: usize, hi: usize) -> (R::Elem, R::Elem) {
        let hi = hi.min(self.cap - 1);
        let (comparable, below) = self.edge_masks(u);
        let mut c0 = self.ring.zero();
        let mut c1 = self.ring.zero();
        if lo == 0 {
            let fresh = bits(below).filter(|&w| self.k.depth_of(w) < self.d).count();
            c0 = self.ring.from_i64(fresh as i64);
        }
        if hi >= 1 && lo <= 1 {
            let targets = a & !used & comparable;
            c1 = self.ring.from_i64((targets & !1).count_ones() as i64);
            if targets & 1 == 1 {
                match self.weights {
                    Some(w) => self.ring.add_assign(&mut c1, &w[u]),
                    None => self.ring.add_assign(&mut c1, &self.ring.one()),
                }
            }
        }
        (c0, c1)
    }

    fn used_mask(&self, t: usize) -> u128 {
        self.phi[..t - 1].iter().fold(0u128, |m, &v| m | 1 << v)
    }

    fn leaf_respects(&self, u: usize) -> bool {
        (1..=self.tdepth[u]).all(|i| {
            let x = self.tpath[i - 1];
            self.up[x]
                .iter()
                .all(|&j| self.k.anc(self.phi[i - 1], self.phi[j - 1]))
        })
    }

    fn root_weight(&self, u: usize, p: &mut Poly<R>) {
        if let Some(w) = self.weights {
            p.scale_in_place(&w[u], self.ring);
        }
    }

    fn eval_g(&mut self, u: usize, a: u128, lo: usize, hi: usize) -> Poly<R> {
        if let Some(dl) = self.deadline {
            self.ticks = self.ticks.wrapping_add(1);
            if self.ticks % 1024 == 0 && Instant::now() >= dl {
                self.expired = true;
            }
            if self.expired {
                return self.zero();
            }
        }
        let s = self.below[u];
        let mut hi = hi.min(self.cap - 1);
        if self.prune {
            hi = hi.min(s);
            if lo > hi {
                return self.zero();
            }
        }
        if self.children[u].is_empty() {
            if !self.prune && !self.leaf_respects(u) {
                return self.zero();
            }
            return self.one();
        }
        let mut acc = self.one();
        for i in 0..self.children[u].len() {
            let c = self.children[u][i];
            let sc = self.below[c] + 1;
            let (lo_c, hi_c) = if self.prune {
                (lo.saturating_sub(s - sc), hi.min(sc))
            } else {
                (0, hi)
            };
            if self.prune && self.probe.is_none() && self.children[c].is_empty() {
                if lo_c > 1 {
                    return self.zero();
                }
                let used = self.used_mask(self.tdepth[c]);
                let (c0, c1) = self.leaf_coeffs(c, a, used, lo_c, hi_c);
                if self.ring.is_zero(&c0) && self.ring.is_zero(&c1) {
                    return self.zero();
                }
                acc.mul_linear_upto(&c0, &c1, hi.saturating_add(1), self.ring);
                if acc.is_zero() {
                    return acc;
                }
                continue;
            }
            let fc = self.eval_f(c, a, lo_c, hi_c);
            if self.zero_in_window(&fc, lo_c, hi_c) {
                return self.zero();
            }
            acc = acc.mul_upto(&fc, hi.saturating_add(1), self.ring);
        }
        acc
    }

    fn eval_f(&mut self, u: usize, a: u128, lo: usize, hi: usize) -> Poly<R> {
        let t = self.tdepth[u];
        let s = self.below[u];
        let hi = hi.min(self.cap - 1);
        self.tpath[t - 1] = u;
        let mut out = self.zero();
        if self.prune && lo > s + 1 {
            return out;
        }

        // Images of tail_T(u). Landing on one of them is a surplus that no
        // later division pays for, so with pruning those branches are skipped.
        let used = if self.prune { self.used_mask(t) } else { 0 };

        if self.prune && self.children[u].is_empty() {
            let (c0, c1) = self.leaf_coeffs(u, a, used, lo, hi);
            out = Poly::from_coeffs(vec![c0, c1], self.cap, self.ring);
            self.report(u, s, &out);
            return out;
        }
        let (comparable, below) = if self.prune {
            self.edge_masks(u)
        } else {
            (u128::MAX, u128::MAX)
        };

        // u lands on a vertex of K
        if hi >= 1 {
            for v in bits(a & !used & comparable) {
                self.phi[t - 1] = v;
                let mut gp = self.eval_g(u, a, lo.saturating_sub(1), hi - 1);
                if gp.is_zero() {
                    continue;
                }
                if self.k.is_root(v) {
                    self.root_weight(u, &mut gp);
                }
                out.add_shifted(&gp, 1, hi, self.ring);
            }
        }

        // u lands on the end of a fresh path hanging below w
        let klen = self.k.len();
        let reach = if self.prune { self.reach_masks(u) } else { Vec::new() };
        for w in 0..klen {
            if below >> w & 1 == 0 {
                continue;
            }
            // vertices below u that could land on a fresh vertex under w
            let hitters = if self.prune {
                let tail_w = self.k.ancestor_mask(w);
                reach.iter().filter(|&&m| m & !tail_w == 0).count()
            } else {
                usize::MAX
            };
            for p in 1..=self.d - self.k.depth_of(w) {
                // every w_1..w_{p-1} needs its own preimage, otherwise the
                // signed sum over B cancels
                if p - 1 > hitters {
                    break;
                }
                let (glo, ghi) = if self.prune {
                    (lo + p - 1, hi.saturating_add(p - 1))
                } else {
                    (0, usize::MAX)
                };
                if self.prune && glo > s {
                    break;
                }
                let first = self.k.push_path(Some(w), p);
                let wp = first + p - 1;
                self.phi[t - 1] = wp;
                let inner = self.inclusion_exclusion(u, a, first, p, glo, ghi);
                self.k.truncate(first);
                out.add_shifted(&inner.div_by_x_power(p - 1), 0, hi, self.ring);
            }
        }

        self.report(u, s, &out);
        out
    }

    fn report(&mut self, u: usize, s: usize, out: &Poly<R>) {
        let prefix_len = self.k.len();
        if let Some(probe) = self.probe.as_mut() {
            probe(&Frame {
                u,
                subtree_size: s + 1,
                prefix_len,
                poly: out,
            });
        }
    }

    /// For every vertex strictly below `u` in `T`, the images of its
    /// neighbours in `tail_T(u)`.
    fn reach_masks(&self, u: usize) -> Vec<u128> {
        let t = self.tdepth[u];
        let start = self.pos[u] + 1;
        self.order[start..start + self.below[u]]
            .iter()
            .map(|&x| {
                self.up[x]
                    .iter()
                    .filter(|&&j| j < t)
                    .fold(0u128, |m, &j| m | 1 << self.phi[j - 1])
            })
            .collect()
    }

    /// `sum over B of (-1)^{p-1-|B|} g(u, K', phi, A + B + {w_p})` where the
    /// fresh path occupies `first..first + p`.
    fn inclusion_exclusion(
        &mut self,
        u: usize,
        a: u128,
        first: usize,
        p: usize,
        lo: usize,
        hi: usize,
    ) -> Poly<R> {
        let wp = first + p - 1;
        let mut pos = self.zero();
        let mut neg = self.zero();
        for b in 0..(1u128 << (p - 1)) {
            let mask = a | (b << first) | (1u128 << wp);
            let gp = self.eval_g(u, mask, lo, hi);
            if gp.is_zero() {
                continue;
            }
            if (p - 1 - b.count_ones() as usize) % 2 == 0 {
                pos.add_shifted(&gp, 0, usize::MAX, self.ring);
            } else {
                neg.add_shifted(&gp, 0, usize::MAX, self.ring);
            }
        }
        pos.sub_assign(&neg, self.ring);
        pos
    }

    fn eval_h(&mut self, root: usize) -> Poly<R> {
        let mut h = self.zero();
        self.tpath[0] = root;
        for p in 1..=self.d {
            if self.prune && p - 1 > self.below[root] {
                break;
            }
            self.k = PrefixTree::path(p);
            let wp = p - 1;
            self.phi[0] = wp;
            let (lo, hi) = if self.prune {
                (p - 1, p - 1)
            } else {
                (0, usize::MAX)
            };
            let mut inner = self.inclusion_exclusion(root, 0, 0, p, lo, hi);
            if p == 1 {
                self.root_weight(root, &mut inner);
            }
            h.add_shifted(&inner.div_by_x_power(p - 1), 0, usize::MAX, self.ring);
        }
        h
    }
}

/// The polynomial `h` for a connected `g` with elimination tree `t`. Budgets
/// above `n` are clamped to `n`. With pruning only the free term is exact.
pub fn h_polynomial<R: Ring>(
    ring: &R,
    g: &Graph,
    t: &RootedForest,
    d: usize,
    weights: Option<&[R::Elem]>,
    opts: &EngineOptions,
    probe: Option<Probe<'_, R>>,
) -> Result<TruncatedPolynomial<R>, CountError> {
    let n = g.n();
    check_tree(g, t)?;
    if let Some(w) = weights {
        if w.len() != n {
            return Err(CountError::WeightLength {
                expected: n,
                got: w.len(),
            });
        }
    }
    if opts.deadline.is_some_and(|dl| Instant::now() >= dl) {
        return Err(CountError::DeadlineExceeded);
    }
    let d = d.min(n);
    let k = t.depth();
    let cap = opts.cap.unwrap_or(d * k).max(1);
    if d == 0 {
        return Ok(Poly::zero(cap));
    }
    if d * k > MAX_PREFIX {
        return Err(CountError::PrefixTooLarge { d, k });
    }

    let children = t.children();
    let tdepth: Vec<usize> = (0..n).map(|v| t.depth_of(v)).collect();
    let mut below = vec![0usize; n];
    for &v in t.preorder().iter().rev() {
        if let Some(p) = t.parent(v) {
            below[p] += below[v] + 1;
        }
    }
    let up: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .filter(|&&x| tdepth[x] < tdepth[v])
                .map(|&x| tdepth[x])
                .collect()
        })
        .collect();
    let root = t.roots()[0];
    let order = t.preorder();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut engine = Engine {
        ring,
        children,
        tdepth,
        below,
        up,
        d,
        cap,
        prune: opts.prune,
        weights,
        k: PrefixTree::new(),
        phi: vec![0; k],
        tpath: vec![0; k],
        order,
        pos,
        probe,
        deadline: opts.deadline,
        ticks: 0,
        expired: false,
    };
    let h = engine.eval_h(root);
    if engine.expired {
        return Err(CountError::DeadlineExceeded);
    }
    Ok(h)
}

fn check_tree(g: &Graph, t: &RootedForest) -> Result<(), CountError> {
    if t.len() != g.n() {
        return Err(CountError::SizeMismatch {
            graph: g.n(),
            forest: t.len(),
        });
    }
    if g.n() == 0 || !g.is_connected() {
        return Err(CountError::NotConnected);
    }
    if !is_elimination_forest(g, t) || t.roots().len() != 1 {
        return Err(CountError::NotEliminationForest);
    }
    Ok(())
}

fn count_in<R: Ring>(
    ring: &R,
    g: &Graph,
    t: &RootedForest,
    d: usize,
    weights: Option<&[BigInt]>,
    opts: &EngineOptions,
) -> Result<BigInt, CountError> {
    let w: Option<Vec<R::Elem>> = weights.map(|w| w.iter().map(|x| ring.from_bigint(x)).collect());
    let h = h_polynomial(ring, g, t, d, w.as_deref(), opts, None)?;
    Ok(ring.to_bigint(&h.free_term(ring)))
}

fn check_ring(ring: &CoefficientRing) -> Result<(), CountError> {
    if let Some(m) = ring.modulus() {
        if *m < BigUint::from(2u32) {
            return Err(crate::error::RingError::InvalidModulus.into());
        }
    }
    Ok(())
}

/// Weighted number of elimination trees of the connected graph `g` with depth
/// at most `d` that are sensible with respect to the elimination tree `t`.
/// With weights `mu` the result is `sum_i t_i * mu_i`, where `t_i` counts the
/// trees rooted at vertex `i`. The value is reduced into `ring`.
pub fn count_elim_trees(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
    weights: Option<&[BigInt]>,
) -> Result<BigInt, CountError> {
    count_elim_trees_with(g, t, d, ring, weights, &EngineOptions::default())
}

pub fn count_elim_trees_with(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
    weights: Option<&[BigInt]>,
    opts: &EngineOptions,
) -> Result<BigInt, CountError> {
    check_ring(ring)?;
    match ring {
        CoefficientRing::Exact => count_in(&Integers, g, t, d, weights, opts),
        CoefficientRing::Modular(m) => match m.to_u64().filter(|&m| m < 1 << 63) {
            Some(m) => count_in(&Zmod64::new(m)?, g, t, d, weights, opts),
            None => count_in(&ZmodBig::new(m.clone())?, g, t, d, weights, opts),
        },
    }
}

/// Forest version: `t` may be any elimination forest of `g`. Returns the
/// product over components of the per-component counts (weights, if given,
/// are applied inside each component).
pub fn count_elim_forests(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
    weights: Option<&[BigInt]>,
) -> Result<BigInt, CountError> {
    count_elim_forests_with(g, t, d, ring, weights, &EngineOptions::default())
}

pub fn count_elim_forests_with(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
    weights: Option<&[BigInt]>,
    opts: &EngineOptions,
) -> Result<BigInt, CountError> {
    if t.len() != g.n() {
        return Err(CountError::SizeMismatch {
            graph: g.n(),
            forest: t.len(),
        });
    }
    if let Some(w) = weights {
        if w.len() != g.n() {
            return Err(CountError::WeightLength {
                expected: g.n(),
                got: w.len(),
            });
        }
    }
    if !is_elimination_forest(g, t) {
        return Err(CountError::NotEliminationForest);
    }
    check_ring(ring)?;
    let t = restrict_to_components(g, t);
    let mut total = ring.reduce(&BigInt::from(1));
    for comp in connected_components(g) {
        let tc = t.induced(&comp.vertices);
        let wc: Option<Vec<BigInt>> =
            weights.map(|w| comp.vertices.iter().map(|&v| w[v].clone()).collect());
        let c = count_elim_trees_with(&comp.graph, &tc, d, ring, wc.as_deref(), opts)?;
        total = ring.reduce(&(total * c));
        if total == BigInt::from(0) {
            break;
        }
    }
    Ok(total)
}
