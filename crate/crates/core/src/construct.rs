//! Deterministic solver: root-by-root self-reduction on top of the counting
//! engine, driven by iterative compression.

use num_traits::Zero;
use rayon::prelude::*;

use std::time::{Duration, Instant};

use crate::counting::{count_elim_forests_with, count_elim_trees_with, EngineOptions};
use crate::error::CountError;
use crate::forest::{
    attach_root, remove_vertex, restrict_to_components, validate_elimination_forest, RootedForest,
};
use crate::graph::{connected_components, minor_min_width, Graph};
use crate::polyring::CoefficientRing;

/// Result of a solver run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// An elimination forest of depth at most the budget.
    Feasible(RootedForest),
    /// `td(G) > d`; certified in the exact ring, possibly a false negative
    /// under modular arithmetic.
    Infeasible,
    /// The randomized solver hit its deadline.
    Timeout,
}

impl Outcome {
    pub fn forest(&self) -> Option<&RootedForest> {
        match self {
            Outcome::Feasible(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicConfig {
    /// Worker threads for the root search; 1 runs inline.
    pub threads: usize,
    /// Wall-clock budget; `None` runs to completion.
    pub deadline: Option<Duration>,
}

impl Default for DeterministicConfig {
    fn default() -> Self {
        DeterministicConfig {
            threads: 1,
            deadline: None,
        }
    }
}

/// Places the per-component forests back into the index space of `g`.
pub(crate) fn merge_components(n: usize, parts: &[(Vec<usize>, RootedForest)]) -> RootedForest {
    let mut parent = vec![None; n];
    for (vertices, f) in parts {
        for (local, &v) in vertices.iter().enumerate() {
            parent[v] = f.parent(local).map(|p| vertices[p]);
        }
    }
    RootedForest::from_parents(parent).expect("merged forest is acyclic")
}

fn is_positive(c: &num_bigint::BigInt) -> bool {
    !c.is_zero()
}

struct Constructor<'a> {
    ring: &'a CoefficientRing,
    pool: Option<rayon::ThreadPool>,
    opts: EngineOptions,
}

impl Constructor<'_> {
    fn find_root(&self, g: &Graph, t: &RootedForest, d: usize) -> Result<Option<usize>, CountError> {
        let feasible = |v: usize| -> Result<bool, CountError> {
            let (gv, tv) = (g.without_vertex(v), remove_vertex(t, v));
            let c = count_elim_forests_with(&gv, &tv, d - 1, self.ring, None, &self.opts)?;
            Ok(is_positive(&c))
        };
        match &self.pool {
            None => {
                for v in 0..g.n() {
                    if feasible(v)? {
                        return Ok(Some(v));
                    }
                }
                Ok(None)
            }
            Some(pool) => pool.install(|| {
                let hit = (0..g.n())
                    .into_par_iter()
                    .map(|v| feasible(v).map(|ok| ok.then_some(v)))
                    .find_first(|r| !matches!(r, Ok(None)));
                hit.unwrap_or(Ok(None))
            }),
        }
    }

    /// Connected `g`, `t` an elimination tree of it. `checked` means the count
    /// is already known to be positive.
    fn tree(
        &self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
        checked: bool,
    ) -> Result<Option<RootedForest>, CountError> {
        if d == 0 {
            return Ok(None);
        }
        if g.n() == 1 {
            return Ok(Some(RootedForest::singleton()));
        }
        if !checked && !is_positive(&count_elim_trees_with(g, t, d, self.ring, None, &self.opts)?) {
            return Ok(None);
        }
        let Some(v) = self.find_root(g, t, d)? else {
            return Ok(None);
        };
        let rest = self.forest(&g.without_vertex(v), &remove_vertex(t, v), d - 1, true)?;
        Ok(rest.map(|f| attach_root(&f, v)))
    }

    fn forest(
        &self,
        g: &Graph,
        t: &RootedForest,
        d: usize,
        checked: bool,
    ) -> Result<Option<RootedForest>, CountError> {
        let t = restrict_to_components(g, t);
        let mut parts = Vec::new();
        for comp in connected_components(g) {
            let tc = t.induced(&comp.vertices);
            match self.tree(&comp.graph, &tc, d, checked)? {
                Some(f) => parts.push((comp.vertices, f)),
                None => return Ok(None),
            }
        }
        Ok(Some(merge_components(g.n(), &parts)))
    }
}

fn constructor<'a>(ring: &'a CoefficientRing, cfg: &DeterministicConfig) -> Constructor<'a> {
    let pool = (cfg.threads > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("thread pool")
    });
    let opts = EngineOptions::with_deadline(cfg.deadline.map(|dl| Instant::now() + dl));
    Constructor { ring, pool, opts }
}

/// Turns an expired deadline into [`Outcome::Timeout`].
fn timeout_ok(r: Result<Outcome, CountError>) -> Result<Outcome, CountError> {
    match r {
        Err(CountError::DeadlineExceeded) => Ok(Outcome::Timeout),
        other => other,
    }
}

/// Either an elimination forest of `g` of depth at most `d`, or `Infeasible`.
/// `t` must be an elimination forest of `g`.
pub fn construct_elim_forest(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
) -> Result<Outcome, CountError> {
    construct_with(g, t, d, ring, &DeterministicConfig::default())
}

pub fn construct_with(
    g: &Graph,
    t: &RootedForest,
    d: usize,
    ring: &CoefficientRing,
    cfg: &DeterministicConfig,
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
    let c = constructor(ring, cfg);
    timeout_ok(c.forest(g, t, d, false).map(|f| match f {
        Some(f) => Outcome::Feasible(f),
        None => Outcome::Infeasible,
    }))
}

/// Exact, deterministic decision and construction by iterative compression in
/// the integers. `Infeasible` certifies `td(g) > d`.
pub fn solve_deterministic(g: &Graph, d: usize) -> Result<Outcome, CountError> {
    solve_deterministic_with(g, d, &DeterministicConfig::default())
}

pub fn solve_deterministic_with(
    g: &Graph,
    d: usize,
    cfg: &DeterministicConfig,
) -> Result<Outcome, CountError> {
    if g.n() > 0 && minor_min_width(g) >= d {
        return Ok(Outcome::Infeasible);
    }
    let ring = CoefficientRing::Exact;
    let c = constructor(&ring, cfg);
    timeout_ok(compress(g, d, &c))
}

fn compress(g: &Graph, d: usize, c: &Constructor<'_>) -> Result<Outcome, CountError> {
    let mut parts = Vec::new();
    for comp in connected_components(g) {
        let mut f = RootedForest::empty();
        for i in 0..comp.vertices.len() {
            let prefix: Vec<usize> = (0..=i).collect();
            let gi = comp.graph.induced_subgraph(&prefix);
            let t = attach_root(&f, i);
            match c.forest(&gi, &t, d, false)? {
                Some(next) => f = next,
                None => return Ok(Outcome::Infeasible),
            }
        }
        parts.push((comp.vertices, f));
    }
    let f = merge_components(g.n(), &parts);
    assert!(
        validate_elimination_forest(g, &f, d),
        "deterministic solver produced an invalid forest"
    );
    Ok(Outcome::Feasible(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{clique, cycle, path};

    #[test]
    fn construct_examples() {
        let k2 = clique(2);
        let t = RootedForest::chain(&[0, 1]);
        assert_eq!(
            construct_elim_forest(&k2, &t, 1, &CoefficientRing::Exact).unwrap(),
            Outcome::Infeasible
        );

        let p3 = path(3);
        let t = RootedForest::chain(&[0, 1, 2]);
        let out = construct_elim_forest(&p3, &t, 2, &CoefficientRing::Exact).unwrap();
        let f = out.forest().unwrap();
        assert_eq!(f.parents(), &[Some(1), None, Some(1)]);

        let k3 = clique(3);
        let out = construct_elim_forest(&k3, &RootedForest::chain(&[2, 0, 1]), 3, &CoefficientRing::Exact)
            .unwrap();
        assert!(validate_elimination_forest(&k3, out.forest().unwrap(), 3));
    }

    #[test]
    fn solve_examples() {
        let out = solve_deterministic(&Graph::new(1), 1).unwrap();
        assert_eq!(out.forest().unwrap().depth(), 1);
        let p7 = path(7);
        let out = solve_deterministic(&p7, 3).unwrap();
        assert!(validate_elimination_forest(&p7, out.forest().unwrap(), 3));
        assert_eq!(solve_deterministic(&p7, 2).unwrap(), Outcome::Infeasible);
        assert_eq!(solve_deterministic(&clique(4), 3).unwrap(), Outcome::Infeasible);
        assert!(solve_deterministic(&clique(4), 4).unwrap().is_feasible());
        assert!(solve_deterministic(&Graph::new(0), 0).unwrap().is_feasible());
    }

    #[test]
    fn threads_give_same_answer() {
        let g = cycle(6).disjoint_union(&path(5));
        let one = solve_deterministic(&g, 3).unwrap();
        let cfg = DeterministicConfig {
            threads: 4,
            ..DeterministicConfig::default()
        };
        let four = solve_deterministic_with(&g, 3, &cfg).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn zero_deadline_times_out() {
        let cfg = DeterministicConfig {
            deadline: Some(Duration::ZERO),
            ..DeterministicConfig::default()
        };
        let g = crate::oracle::random_connected(30, 15, 1);
        assert_eq!(solve_deterministic_with(&g, 6, &cfg).unwrap(), Outcome::Timeout);
    }
}
