//! Randomized solver: one random prime for hashing, color coding to pinpoint
//! roots, and matching contraction / simplicial removal to shrink the input.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::{merge_components, Outcome};
use crate::counting::{count_elim_forests_with, count_elim_trees_with, EngineOptions};
use crate::error::CountError;
use crate::forest::{
    attach_root, expand_contracted_forest, lift_simplicial, remove_vertex, restrict_to_components,
    validate_elimination_forest, RootedForest,
};
use crate::graph::{
    bodlaender_step, connected_components, contract_matching, improved_graph,
    separator_elimination_forest, BodlaenderConfig, BodlaenderOutcome, Contraction, Graph,
};
use crate::polyring::{is_prime, mod_inverse, sample_prime, CoefficientRing, PrimeSamplerConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConfig {
    pub prime: PrimeSamplerConfig,
    /// Colors per coloring; `None` means `min(n, (d+1)^{2(d+1)})`.
    pub colors: Option<usize>,
    pub bodlaender: BodlaenderConfig,
    /// Colorings tried before the color count is doubled.
    pub max_coloring_retries: usize,
    pub seed: u64,
    /// Wall-clock budget; `None` runs to completion.
    pub deadline: Option<Duration>,
}

impl Default for LinearConfig {
    fn default() -> Self {
        LinearConfig {
            prime: PrimeSamplerConfig::default(),
            colors: None,
            bodlaender: BodlaenderConfig::default(),
            max_coloring_retries: 20,
            seed: 0,
            deadline: None,
        }
    }
}

impl LinearConfig {
    pub fn with_seed(seed: u64) -> Self {
        LinearConfig {
            seed,
            ..LinearConfig::default()
        }
    }

    /// Color count for a component of `n` vertices at depth `d`.
    pub fn color_count(&self, n: usize, d: usize) -> usize {
        let default = (d as u32 + 1)
            .checked_pow(2 * (d as u32 + 1))
            .map_or(usize::MAX, |b| b as usize);
        self.colors.unwrap_or(default).min(n).max(1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearStats {
    pub colorings: u64,
    pub roots_found: u64,
    pub counting_calls: u64,
    pub levels: u64,
}

/// `Z_p` for the global prime when `r >= log2 n`, otherwise `Z_m` with
/// `m = r (dk 2^d)^r + 1` and `k = 2d`, which exceeds every weighted count on
/// `r` vertices.
pub fn choose_modulus(r: usize, n: usize, d: usize, prime: u64) -> CoefficientRing {
    if uses_prime(r, n) {
        return CoefficientRing::modular(prime);
    }
    let k = 2 * d;
    let base = BigUint::from(d * k) << d;
    let m = BigUint::from(r) * base.pow(r as u32) + BigUint::one();
    CoefficientRing::Modular(m)
}

fn uses_prime(r: usize, n: usize) -> bool {
    r as f64 >= (n.max(1) as f64).log2()
}

/// Smallest `d' <= d` with a nonzero count for the connected `g`, if any.
pub fn determine_exact_depth(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
) -> Result<Option<usize>, CountError> {
    exact_depth_with(g, t, d, ring, &EngineOptions::default())
}

fn exact_depth_with(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
    opts: &EngineOptions,
) -> Result<Option<usize>, CountError> {
    for dd in 1..=d.min(g.n()) {
        if !count_elim_trees_with(g, t, dd, ring, None, opts)?.is_zero() {
            return Ok(Some(dd));
        }
    }
    Ok(None)
}

enum Level {
    Matching(Graph, Contraction),
    Simplicial {
        graph: Graph,
        improved: Graph,
        kept: Vec<usize>,
        order: Vec<usize>,
    },
}

/// Largest graph handed to [`separator_elimination_forest`].
const SEPARATOR_LIMIT: usize = 256;

/// `t`, or a heuristic forest of `g` if that one is shallower. Any
/// elimination forest is a valid input to the counting engine, and its cost
/// grows quickly with the depth.
fn shallower(g: &Graph, t: RootedForest) -> RootedForest {
    if g.n() > SEPARATOR_LIMIT {
        return t;
    }
    let h = separator_elimination_forest(g);
    if h.depth() < t.depth() {
        h
    } else {
        t
    }
}

/// Holds the random state of one run: the global prime, the coloring stream
/// and counters.
pub struct LinearSolver {
    cfg: LinearConfig,
    rng: ChaCha8Rng,
    prime: u64,
    n0: usize,
    stats: LinearStats,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl LinearSolver {
    /// Seeds the stream and draws the global prime for inputs of `n`
    /// vertices and budget `d`.
    pub fn new(cfg: &LinearConfig, n: usize, d: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let a = cfg.prime.interval_bound(n, d);
        let prime = sample_prime(a, cfg.prime.max_trials, &mut rng)
            .unwrap_or_else(|| (a + 1..).find(|&c| is_prime(c)).expect("a prime exists"));
        LinearSolver {
            cfg: cfg.clone(),
            rng,
            prime,
            n0: n,
            stats: LinearStats::default(),
            deadline: cfg.deadline.map(|dl| Instant::now() + dl),
            timed_out: false,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn stats(&self) -> &LinearStats {
        &self.stats
    }

    fn expired(&mut self) -> bool {
        if let Some(dl) = self.deadline {
            if Instant::now() >= dl {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    fn count(
        &mut self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
        ring: &CoefficientRing,
        w: Option<&[BigInt]>,
    ) -> Result<BigInt, CountError> {
        self.stats.counting_calls += 1;
        count_elim_trees_with(g, t, d, ring, w, &self.opts())
    }

    fn opts(&self) -> EngineOptions {
        EngineOptions::with_deadline(self.deadline)
    }

    /// Recovers the index `num / den` of an isolated root candidate, if the
    /// division makes sense in `ring`.
    fn recover(&self, num: &BigInt, den: &BigInt, ring: &CoefficientRing) -> Option<usize> {
        let m = ring.modulus()?;
        let i = if m.to_u64() == Some(self.prime) && is_prime(self.prime) {
            let inv = mod_inverse(den, ring).ok()?;
            ring.reduce(&(num * inv))
        } else {
            if !(num % den).is_zero() {
                return None;
            }
            num / den
        };
        i.to_usize()
    }

    /// A vertex `v` of the connected `g` with `td(g - v) = d - 1`, where
    /// `td(g) = d`. `None` when every retry failed or the deadline passed.
    pub fn find_root_colorcoding(
        &mut self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
        ring: &CoefficientRing,
    ) -> Result<Option<usize>, CountError> {
        let n = g.n();
        if n == 1 {
            return Ok(Some(0));
        }
        let mut colors = self.cfg.color_count(n, d);
        loop {
            for _ in 0..self.cfg.max_coloring_retries.max(1) {
                if self.expired() {
                    return Ok(None);
                }
                self.stats.colorings += 1;
                let coloring: Vec<usize> = (0..n).map(|_| self.rng.gen_range(0..colors)).collect();
                let mut used = vec![false; colors];
                for &c in &coloring {
                    used[c] = true;
                }
                for c in (0..colors).filter(|&c| used[c]) {
                    let x: Vec<BigInt> = coloring
                        .iter()
                        .map(|&cv| BigInt::from((cv == c) as u8))
                        .collect();
                    let den = self.count(g, t, d, ring, Some(&x))?;
                    if den.is_zero() {
                        continue;
                    }
                    let y: Vec<BigInt> = coloring
                        .iter()
                        .enumerate()
                        .map(|(i, &cv)| if cv == c { BigInt::from(i + 1) } else { BigInt::zero() })
                        .collect();
                    let num = self.count(g, t, d, ring, Some(&y))?;
                    let Some(i) = self.recover(&num, &den, ring) else {
                        continue;
                    };
                    if i == 0 || i > n || coloring[i - 1] != c {
                        continue;
                    }
                    let v = i - 1;
                    self.stats.counting_calls += 1;
                    let (gv, tv) = (g.without_vertex(v), remove_vertex(t, v));
                    let rest = count_elim_forests_with(&gv, &tv, d - 1, ring, None, &self.opts())?;
                    if !rest.is_zero() {
                        self.stats.roots_found += 1;
                        return Ok(Some(v));
                    }
                }
            }
            if colors >= n {
                return Ok(None);
            }
            colors = (2 * colors).min(n);
        }
    }

    fn construct_tree(
        &mut self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
    ) -> Result<Option<RootedForest>, CountError> {
        if self.expired() {
            return Ok(None);
        }
        let ring = choose_modulus(g.n(), self.n0, d, self.prime);
        let Some(exact) = exact_depth_with(g, t, d, &ring, &self.opts())? else {
            return Ok(None);
        };
        if g.n() == 1 {
            return Ok(Some(RootedForest::singleton()));
        }
        let Some(v) = self.find_root_colorcoding(g, t, exact, &ring)? else {
            return Ok(None);
        };
        let rest = self.construct_forest(&g.without_vertex(v), &remove_vertex(t, v), exact - 1)?;
        Ok(rest.map(|f| attach_root(&f, v)))
    }

    fn construct_forest(
        &mut self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
    ) -> Result<Option<RootedForest>, CountError> {
        let t = restrict_to_components(g, t);
        let mut parts = Vec::new();
        for comp in connected_components(g) {
            let tc = t.induced(&comp.vertices);
            match self.construct_tree(&comp.graph, &tc, d)? {
                Some(f) => parts.push((comp.vertices, f)),
                None => return Ok(None),
            }
        }
        Ok(Some(merge_components(g.n(), &parts)))
    }

    /// Depth-`d` elimination forest of `g` from an elimination forest `t` of
    /// depth at most `2d`, one color-coded root at a time.
    pub fn construct_linear(
        &mut self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
    ) -> Result<Outcome, CountError> {
        if t.len() != g.n() {
            return Err(CountError::SizeMismatch {
                graph: g.n(),
                forest: t.len(),
            });
        }
        if !crate::forest::is_elimination_forest(g, t) {
            return Err(CountError::NotEliminationForest);
        }
        match self.construct_forest(g, t, d) {
            Ok(f) => Ok(self.finish(f)),
            Err(CountError::DeadlineExceeded) => {
                self.timed_out = true;
                Ok(Outcome::Timeout)
            }
            Err(e) => Err(e),
        }
    }

    fn finish(&self, f: Option<RootedForest>) -> Outcome {
        match f {
            Some(f) => Outcome::Feasible(f),
            None if self.timed_out => Outcome::Timeout,
            None => Outcome::Infeasible,
        }
    }

    /// Full pipeline: shrink by contraction or simplicial removal down to a
    /// single vertex, then rebuild level by level.
    pub fn solve(&mut self, g: &Graph, d: usize) -> Result<Outcome, CountError> {
        if d == 0 {
            return Ok(if g.n() == 0 {
                Outcome::Feasible(RootedForest::empty())
            } else {
                Outcome::Infeasible
            });
        }
        let mut levels: Vec<Level> = Vec::new();
        let mut cur = g.clone();
        while cur.n() > 1 {
            if self.expired() {
                return Ok(Outcome::Timeout);
            }
            if cur.m() > d * cur.n() {
                return Ok(Outcome::Infeasible);
            }
            self.stats.levels += 1;
            match bodlaender_step(&cur, d, &self.cfg.bodlaender) {
                BodlaenderOutcome::TooDeep => return Ok(Outcome::Infeasible),
                BodlaenderOutcome::LargeMatching(m) => {
                    let c = contract_matching(&cur, &m);
                    let next = c.graph.clone();
                    levels.push(Level::Matching(cur, c));
                    cur = next;
                }
                BodlaenderOutcome::SimplicialSet(order) => {
                    let improved = improved_graph(&cur, d);
                    let mut removed = vec![false; cur.n()];
                    for &v in &order {
                        removed[v] = true;
                    }
                    let kept: Vec<usize> = (0..cur.n()).filter(|&v| !removed[v]).collect();
                    let next = improved.induced_subgraph(&kept);
                    levels.push(Level::Simplicial {
                        graph: cur,
                        improved,
                        kept,
                        order,
                    });
                    cur = next;
                }
            }
        }

        let mut f = if cur.n() == 1 {
            RootedForest::singleton()
        } else {
            RootedForest::empty()
        };
        while let Some(level) = levels.pop() {
            let (graph, t) = match level {
                Level::Matching(graph, c) => {
                    let t = expand_contracted_forest(&f, &c);
                    (graph, t)
                }
                Level::Simplicial {
                    graph,
                    improved,
                    kept,
                    order,
                } => match lift_simplicial(&f, &kept, &improved, &order, d) {
                    Some(t) => (graph, t),
                    None => return Ok(Outcome::Infeasible),
                },
            };
            let t = shallower(&graph, t);
            if t.depth() <= d {
                f = t;
                continue;
            }
            match self.construct_linear(&graph, &t, d)? {
                Outcome::Feasible(next) => f = next,
                other => return Ok(other),
            }
        }
        assert!(
            validate_elimination_forest(g, &f, d),
            "randomized solver produced an invalid forest"
        );
        Ok(Outcome::Feasible(f))
    }
}

/// Randomized decision and construction. Never returns an invalid forest;
/// `Infeasible` may be a false negative with small probability.
pub fn solve_randomized(
    g: &Graph,
    d: usize,
    cfg: &LinearConfig,
) -> Result<(Outcome, LinearStats), CountError> {
    let mut s = LinearSolver::new(cfg, g.n(), d);
    let out = s.solve(g, d)?;
    Ok((out, s.stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dfs_elimination_forest;
    use crate::oracle::{clique, path, star};

    #[test]
    fn modulus_cases() {
        assert_eq!(choose_modulus(8, 16, 3, 101), CoefficientRing::modular(101));
        assert_eq!(choose_modulus(3, 256, 2, 101), CoefficientRing::modular(98305));
        assert!(!uses_prime(1, 16));
    }

    #[test]
    fn exact_depths() {
        let r = CoefficientRing::Exact;
        let k1 = Graph::new(1);
        assert_eq!(determine_exact_depth(&k1, &RootedForest::singleton(), 1, &r).unwrap(), Some(1));
        let k2 = clique(2);
        let t = dfs_elimination_forest(&k2);
        assert_eq!(determine_exact_depth(&k2, &t, 3, &r).unwrap(), Some(2));
        let p7 = path(7);
        let t = dfs_elimination_forest(&p7);
        assert_eq!(determine_exact_depth(&p7, &t, 3, &r).unwrap(), Some(3));
        assert_eq!(determine_exact_depth(&p7, &t, 2, &r).unwrap(), None);
    }

    #[test]
    fn color_coding_finds_unique_roots() {
        for (g, root) in [(path(3), 1), (star(3), 0)] {
            let t = dfs_elimination_forest(&g);
            let mut s = LinearSolver::new(&LinearConfig::with_seed(5), g.n(), 2);
            let ring = choose_modulus(g.n(), g.n(), 2, s.prime());
            assert_eq!(s.find_root_colorcoding(&g, &t, 2, &ring).unwrap(), Some(root));
        }
    }

    #[test]
    fn solve_examples() {
        let cfg = LinearConfig::with_seed(1);
        let (out, _) = solve_randomized(&Graph::new(1), 1, &cfg).unwrap();
        assert_eq!(out.forest().unwrap().depth(), 1);
        let (out, _) = solve_randomized(&clique(4), 3, &cfg).unwrap();
        assert_eq!(out, Outcome::Infeasible);
        // 7 edges on 3 vertices is impossible; use K4 at d = 1 for the edge filter
        let (out, stats) = solve_randomized(&clique(4), 1, &cfg).unwrap();
        assert_eq!(out, Outcome::Infeasible);
        assert_eq!(stats.levels, 0);
        let p3 = path(3);
        let (out, _) = solve_randomized(&p3, 2, &cfg).unwrap();
        assert_eq!(out.forest().unwrap().parents(), &[Some(1), None, Some(1)]);
        let p15 = path(15);
        let (out, _) = solve_randomized(&p15, 4, &cfg).unwrap();
        assert!(validate_elimination_forest(&p15, out.forest().unwrap(), 4));
    }

    #[test]
    fn same_seed_same_answer() {
        let g = crate::oracle::random_connected(12, 6, 3);
        let a = solve_randomized(&g, 5, &LinearConfig::with_seed(9)).unwrap();
        let b = solve_randomized(&g, 5, &LinearConfig::with_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deadline_zero_times_out() {
        let cfg = LinearConfig {
            deadline: Some(Duration::ZERO),
            ..LinearConfig::default()
        };
        let (out, _) = solve_randomized(&path(20), 5, &cfg).unwrap();
        assert_eq!(out, Outcome::Timeout);
    }
}
