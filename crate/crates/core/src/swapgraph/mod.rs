//! Swap state graphs over point-to-edge matchings.
//!
//! A matching sends hull edge i (from hull vertex i to i+1) to interior point
//! π(i). Two matched triangles that intersect can be swapped; the graph on
//! all n! matchings with those swaps as directed edges is conjectured to be
//! acyclic for every point set in general position.

pub mod db;
pub mod scan;

use std::collections::{HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactgeom::{Orientation, Sign};
use crate::pointsets::PointSet;
use crate::registry::Registry;

pub const DEFAULT_GRAPH_BOUND: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SwapError {
    #[error("swap indices must differ (got {0} twice)")]
    SameIndex(usize),
    #[error("index {0} out of range for {1} edges")]
    OutOfRange(usize, usize),
    #[error("graph needs {0}! vertices, bound is {1}")]
    TooLarge(usize, usize),
    #[error("expected 2n points with n on the hull, got {0} points and hull {1}")]
    BadInstance(usize, usize),
    #[error("{0}")]
    UnknownStrategy(String),
}

/// n hull vertices (counterclockwise) and n interior points, all in general
/// position.
#[derive(Clone, Debug)]
pub struct MatchingInstance<P: Orientation> {
    pub hull: Vec<P>,
    pub interior: Vec<P>,
}

impl MatchingInstance<crate::exactgeom::Point> {
    pub fn from_point_set(ps: &PointSet) -> Result<Self, SwapError> {
        let h = ps.hull_size();
        if ps.len() != 2 * h {
            return Err(SwapError::BadInstance(ps.len(), h));
        }
        Ok(MatchingInstance {
            hull: ps.hull.iter().map(|&i| ps.points[i].clone()).collect(),
            interior: ps
                .interior_indices()
                .iter()
                .map(|&i| ps.points[i].clone())
                .collect(),
        })
    }
}

impl<P: Orientation> MatchingInstance<P> {
    pub fn new(hull: Vec<P>, interior: Vec<P>) -> Result<Self, SwapError> {
        if hull.len() != interior.len() {
            return Err(SwapError::BadInstance(
                hull.len() + interior.len(),
                hull.len(),
            ));
        }
        Ok(MatchingInstance { hull, interior })
    }

    pub fn n(&self) -> usize {
        self.hull.len()
    }

    /// Point ids: hull vertex k is k, interior point t is n + t.
    fn pt(&self, id: usize) -> &P {
        let n = self.n();
        if id < n {
            &self.hull[id]
        } else {
            &self.interior[id - n]
        }
    }

    pub fn orient_ids(&self, a: usize, b: usize, c: usize) -> Sign {
        P::orient(self.pt(a), self.pt(b), self.pt(c))
    }

    /// Triangle of edge i under π as point ids (hull i, interior π(i), hull i+1).
    pub fn triangle(&self, pi: &[usize], i: usize) -> [usize; 3] {
        let n = self.n();
        [i, n + pi[i], (i + 1) % n]
    }

    pub fn intersects(
        &self,
        rule: &dyn IntersectionRule,
        pi: &[usize],
        i: usize,
        j: usize,
    ) -> bool {
        let o = |a: usize, b: usize, c: usize| self.orient_ids(a, b, c);
        rule.intersects(&o, self.triangle(pi, i), self.triangle(pi, j))
    }

    /// No two matched triangles intersect.
    pub fn triangles_disjoint(&self, rule: &dyn IntersectionRule, pi: &[usize]) -> bool {
        self.intersecting_pairs(rule, pi).is_empty()
    }

    /// Intersecting pairs (i, j), i < j, in lexicographic order.
    pub fn intersecting_pairs(
        &self,
        rule: &dyn IntersectionRule,
        pi: &[usize],
    ) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.intersects(rule, pi, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Transposes entries i and j when their triangles intersect. The swapped
    /// pair is checked to be disjoint; `Ok(Err(ρ))` reports a swap whose new
    /// pair still intersects.
    pub fn swap_edge(
        &self,
        rule: &dyn IntersectionRule,
        pi: &[usize],
        i: usize,
        j: usize,
    ) -> Result<Option<Result<Vec<usize>, Vec<usize>>>, SwapError> {
        let n = self.n();
        if i == j {
            return Err(SwapError::SameIndex(i));
        }
        if i >= n || j >= n {
            return Err(SwapError::OutOfRange(i.max(j), n));
        }
        if !self.intersects(rule, pi, i, j) {
            return Ok(None);
        }
        let mut rho = pi.to_vec();
        rho.swap(i, j);
        if self.intersects(rule, &rho, i, j) {
            return Ok(Some(Err(rho)));
        }
        Ok(Some(Ok(rho)))
    }
}

/// When two matched triangles count as intersecting. Works on point ids via
/// an orientation oracle, so one rule serves every coordinate type.
pub trait IntersectionRule: Send + Sync {
    fn name(&self) -> &'static str;
    fn intersects(
        &self,
        o: &dyn Fn(usize, usize, usize) -> Sign,
        t: [usize; 3],
        u: [usize; 3],
    ) -> bool;
}

fn segments_meet(
    o: &dyn Fn(usize, usize, usize) -> Sign,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> bool {
    let o1 = o(a, b, c);
    let o2 = o(a, b, d);
    let o3 = o(c, d, a);
    let o4 = o(c, d, b);
    o1 * o2 != Sign::Positive && o3 * o4 != Sign::Positive && !(o1.is_zero() && o2.is_zero())
}

fn in_closed_triangle(o: &dyn Fn(usize, usize, usize) -> Sign, t: [usize; 3], p: usize) -> bool {
    let s = o(t[0], t[1], t[2]);
    (0..3).all(|k| {
        let v = o(t[k], t[(k + 1) % 3], p);
        v == s || v.is_zero()
    })
}

/// Closed triangles meeting anywhere except at a vertex they share.
pub struct ClosedMinusShared;

impl IntersectionRule for ClosedMinusShared {
    fn name(&self) -> &'static str {
        "closed-minus-shared"
    }

    fn intersects(
        &self,
        o: &dyn Fn(usize, usize, usize) -> Sign,
        t: [usize; 3],
        u: [usize; 3],
    ) -> bool {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            for l in 0..3 {
                let (c, d) = (u[l], u[(l + 1) % 3]);
                if a == c || a == d || b == c || b == d {
                    // in general position these meet only at the shared vertex
                    continue;
                }
                if segments_meet(o, a, b, c, d) {
                    return true;
                }
            }
        }
        t.iter()
            .any(|&p| !u.contains(&p) && in_closed_triangle(o, u, p))
            || u.iter()
                .any(|&p| !t.contains(&p) && in_closed_triangle(o, t, p))
    }
}

/// Open interiors overlap.
pub struct OpenInterior;

impl IntersectionRule for OpenInterior {
    fn name(&self) -> &'static str {
        "open-interior"
    }

    fn intersects(
        &self,
        o: &dyn Fn(usize, usize, usize) -> Sign,
        t: [usize; 3],
        u: [usize; 3],
    ) -> bool {
        let separated = |p: [usize; 3], q: [usize; 3]| {
            let s = o(p[0], p[1], p[2]);
            (0..3).any(|k| q.iter().all(|&v| o(p[k], p[(k + 1) % 3], v) != s))
        };
        !(separated(t, u) || separated(u, t))
    }
}

pub const DEFAULT_RULE: &str = "closed-minus-shared";

pub fn intersection_rules() -> &'static Registry<dyn IntersectionRule> {
    static REG: OnceLock<Registry<dyn IntersectionRule>> = OnceLock::new();
    REG.get_or_init(|| {
        let r: Registry<dyn IntersectionRule> = Registry::new("intersection rule");
        r.register("closed-minus-shared", Arc::new(ClosedMinusShared));
        r.register("open-interior", Arc::new(OpenInterior));
        r
    })
}

pub fn intersection_rule(name: &str) -> Result<Arc<dyn IntersectionRule>, SwapError> {
    intersection_rules()
        .lookup(name)
        .map_err(SwapError::UnknownStrategy)
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lehmer rank of a permutation of 0..n.
pub fn perm_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

pub fn perm_unrank(mut rank: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    digits.iter().map(|&d| pool.remove(d)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateGraph {
    pub n: usize,
    /// Successor ranks per permutation rank.
    pub adj: Vec<Vec<u32>>,
    /// Swaps whose new pair still intersected.
    pub asymmetric_swaps: usize,
}

impl StateGraph {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&(b as u32))
    }

    /// Matchings with no outgoing swap.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.adj.len())
            .filter(|&v| self.adj[v].is_empty())
            .collect()
    }
}

pub fn build_state_graph<P: Orientation>(
    inst: &MatchingInstance<P>,
    rule: &dyn IntersectionRule,
    bound: usize,
) -> Result<StateGraph, SwapError> {
    let n = inst.n();
    if n > bound {
        return Err(SwapError::TooLarge(n, bound));
    }
    let total = factorial(n);
    let mut adj = vec![Vec::new(); total];
    let mut asymmetric_swaps = 0;
    for (r, out) in adj.iter_mut().enumerate() {
        let pi = perm_unrank(r, n);
        for (i, j) in inst.intersecting_pairs(rule, &pi) {
            let mut rho = pi.clone();
            rho.swap(i, j);
            if inst.intersects(rule, &rho, i, j) {
                asymmetric_swaps += 1;
            }
            out.push(perm_rank(&rho) as u32);
        }
    }
    Ok(StateGraph {
        n,
        adj,
        asymmetric_swaps,
    })
}

/// Kahn's algorithm.
pub fn is_acyclic(g: &StateGraph) -> bool {
    let v = g.adj.len();
    let mut indeg = vec![0usize; v];
    for out in &g.adj {
        for &w in out {
            indeg[w as usize] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..v).filter(|&x| indeg[x] == 0).collect();
    let mut seen = 0;
    while let Some(x) = queue.pop_front() {
        seen += 1;
        for &w in &g.adj[x] {
            let w = w as usize;
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    seen == v
}

/// Picks which intersecting pair to swap next.
pub trait TieBreak: Send + Sync {
    fn name(&self) -> &'static str;
    /// Index into the lexicographically sorted, nonempty `pairs`.
    fn choose(&self, pairs: &[(usize, usize)], step: usize) -> usize;
}

pub struct LexFirst;
pub struct LexLast;
pub struct RandomPair {
    pub seed: u64,
}

impl TieBreak for LexFirst {
    fn name(&self) -> &'static str {
        "lex-first"
    }
    fn choose(&self, _pairs: &[(usize, usize)], _step: usize) -> usize {
        0
    }
}

impl TieBreak for LexLast {
    fn name(&self) -> &'static str {
        "lex-last"
    }
    fn choose(&self, pairs: &[(usize, usize)], _step: usize) -> usize {
        pairs.len() - 1
    }
}

impl TieBreak for RandomPair {
    fn name(&self) -> &'static str {
        "random"
    }
    fn choose(&self, pairs: &[(usize, usize)], step: usize) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(
            self.seed ^ (step as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        );
        rng.gen_range(0..pairs.len())
    }
}

pub const DEFAULT_TIEBREAK: &str = "lex-first";

pub fn tiebreaks() -> &'static Registry<dyn TieBreak> {
    static REG: OnceLock<Registry<dyn TieBreak>> = OnceLock::new();
    REG.get_or_init(|| {
        let r: Registry<dyn TieBreak> = Registry::new("tie-break rule");
        r.register("lex-first", Arc::new(LexFirst));
        r.register("lex-last", Arc::new(LexLast));
        r.register("random", Arc::new(RandomPair { seed: 0 }));
        r
    })
}

pub fn tiebreak(name: &str) -> Result<Arc<dyn TieBreak>, SwapError> {
    tiebreaks().lookup(name).map_err(SwapError::UnknownStrategy)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeuristicOutcome {
    /// Reached a matching with disjoint triangles.
    Done {
        matching: Vec<usize>,
        steps: usize,
        path: Vec<Vec<usize>>,
    },
    /// Revisited `matching`; the instance refutes termination.
    Cycle {
        matching: Vec<usize>,
        steps: usize,
        path: Vec<Vec<usize>>,
    },
}

impl HeuristicOutcome {
    pub fn steps(&self) -> usize {
        match self {
            HeuristicOutcome::Done { steps, .. } | HeuristicOutcome::Cycle { steps, .. } => *steps,
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, HeuristicOutcome::Cycle { .. })
    }
}

pub fn run_swap_heuristic<P: Orientation>(
    inst: &MatchingInstance<P>,
    rule: &dyn IntersectionRule,
    start: &[usize],
    tb: &dyn TieBreak,
) -> HeuristicOutcome {
    let mut cur = start.to_vec();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut path = vec![cur.clone()];
    seen.insert(cur.clone());
    let mut steps = 0;
    loop {
        let pairs = inst.intersecting_pairs(rule, &cur);
        if pairs.is_empty() {
            return HeuristicOutcome::Done {
                matching: cur,
                steps,
                path,
            };
        }
        let (i, j) = pairs[tb.choose(&pairs, steps)];
        cur.swap(i, j);
        steps += 1;
        path.push(cur.clone());
        if !seen.insert(cur.clone()) {
            return HeuristicOutcome::Cycle {
                matching: cur,
                steps,
                path,
            };
        }
    }
}
