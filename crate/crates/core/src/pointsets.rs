//! Point sets, (generalized) double circle generators and their certificates,
//! order-type signatures and the general⁺ perturbation.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactgeom::{
    convex_hull, int, is_general_plus_position, is_general_position, orient, ratio,
    rational_from_f64, GeomError, Point, Scalar, Sign,
};
use crate::tri::is_unavoidable_edge;

/// Denominator used for the rational n-gon approximation.
const NGON_DENOMINATOR: i64 = 1 << 24;
const MAX_EPSILON_HALVINGS: usize = 60;
const MAX_PERTURB_ROUNDS: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointSetError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("points are not in general position")]
    NotGeneralPosition,
    #[error("invalid double circle spec: {0}")]
    InvalidSpec(String),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("could not certify generated set after {0} halvings")]
    CertificationFailed(usize),
    #[error("perturbation failed after {0} rounds")]
    PerturbationFailed(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub hull: Vec<usize>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<PointSet, PointSetError> {
        if !is_general_position(&points) {
            return Err(PointSetError::NotGeneralPosition);
        }
        let hull = convex_hull(&points)?;
        Ok(PointSet { points, hull })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hull_size(&self) -> usize {
        self.hull.len()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        let mut on_hull = vec![false; self.len()];
        for &h in &self.hull {
            on_hull[h] = true;
        }
        (0..self.len()).filter(|&i| !on_hull[i]).collect()
    }

    pub fn is_hull_vertex(&self, i: usize) -> bool {
        self.hull.contains(&i)
    }

    /// Reflection across the y axis.
    pub fn mirrored(&self) -> PointSet {
        let pts = self
            .points
            .iter()
            .map(|p| Point::new(-&p.x, p.y.clone()))
            .collect();
        PointSet::new(pts).expect("reflection preserves general position")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdcSpec {
    pub counts: Vec<usize>,
}

impl GdcSpec {
    pub fn new(counts: Vec<usize>) -> Result<GdcSpec, PointSetError> {
        if counts.len() < 3 {
            return Err(PointSetError::InvalidSpec(format!(
                "need at least 3 hull edges, got {}",
                counts.len()
            )));
        }
        Ok(GdcSpec { counts })
    }

    pub fn ones(n: usize) -> Result<GdcSpec, PointSetError> {
        GdcSpec::new(vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn total_points(&self) -> usize {
        self.n() + self.counts.iter().sum::<usize>()
    }
}

/// Generalized double circle. Points are laid out as P₁..Pₙ first, then the
/// chain points edge by edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdcPointSet {
    pub base: PointSet,
    pub outer: Vec<usize>,
    pub inner: Vec<Vec<usize>>,
    pub spec: GdcSpec,
    pub epsilon: Scalar,
}

impl GdcPointSet {
    pub fn n(&self) -> usize {
        self.outer.len()
    }

    /// P₁ A₁,₁ … A₁,c₁ P₂ … in order.
    pub fn cycle(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.base.len());
        for i in 0..self.n() {
            out.push(self.outer[i]);
            out.extend(self.inner[i].iter().copied());
        }
        out
    }

    pub fn cycle_edges(&self) -> Vec<(usize, usize)> {
        let c = self.cycle();
        (0..c.len()).map(|k| (c[k], c[(k + 1) % c.len()])).collect()
    }

    /// Chain Pᵢ, Aᵢ,₁ … Aᵢ,cᵢ, Pᵢ₊₁.
    pub fn chain(&self, i: usize) -> Vec<usize> {
        let n = self.n();
        let mut v = vec![self.outer[i]];
        v.extend(self.inner[i].iter().copied());
        v.push(self.outer[(i + 1) % n]);
        v
    }
}

fn regular_polygon(n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Point::new(
                rational_from_f64(t.cos(), NGON_DENOMINATOR),
                rational_from_f64(t.sin(), NGON_DENOMINATOR),
            )
        })
        .collect()
}

fn build_gdc(spec: &GdcSpec, outer: &[Point], eps: &Scalar) -> GdcPointSet {
    let n = spec.n();
    let mut points = outer.to_vec();
    let mut inner = Vec::with_capacity(n);
    for i in 0..n {
        let a = &outer[i];
        let b = &outer[(i + 1) % n];
        let c = spec.counts[i];
        let m = a.midpoint(b);
        let (mx, my) = m.to_f64();
        let rho = rational_from_f64((mx * mx + my * my).sqrt(), NGON_DENOMINATOR);
        let inward = Point::new(-&m.x / &rho, -&m.y / &rho);
        let mut ids = Vec::with_capacity(c);
        for j in 1..=c {
            let s = ratio(j as i64, c as i64 + 1);
            let bump = int(4) * &s * (Scalar::one() - &s) * eps;
            let q = &a.lerp(b, &s) + &inward.scale(&bump);
            ids.push(points.len());
            points.push(q);
        }
        inner.push(ids);
    }
    let hull = convex_hull(&points).unwrap_or_default();
    GdcPointSet {
        base: PointSet { points, hull },
        outer: (0..n).collect(),
        inner,
        spec: spec.clone(),
        epsilon: eps.clone(),
    }
}

pub fn gen_generalized_double_circle(spec: &GdcSpec) -> Result<GdcPointSet, PointSetError> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, GdcPointSet>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("gdc cache").get(&spec.counts) {
        return Ok(g.clone());
    }
    let g = build_certified_gdc(spec)?;
    cache
        .lock()
        .expect("gdc cache")
        .insert(spec.counts.clone(), g.clone());
    Ok(g)
}

fn build_certified_gdc(spec: &GdcSpec) -> Result<GdcPointSet, PointSetError> {
    let outer = regular_polygon(spec.n());
    let (mx, my) = outer[0].midpoint(&outer[1]).to_f64();
    let mut eps = rational_from_f64((mx * mx + my * my).sqrt() / 4.0, NGON_DENOMINATOR);
    for _ in 0..MAX_EPSILON_HALVINGS {
        let cand = build_gdc(spec, &outer, &eps);
        let half = &eps / int(2);
        if certify_gdc(&cand) {
            let next = build_gdc(spec, &outer, &half);
            if let (Ok(s1), Ok(s2)) = (
                order_type_signature(&cand.base),
                order_type_signature(&next.base),
            ) {
                if s1 == s2 {
                    return Ok(cand);
                }
            }
        }
        eps = half;
    }
    Err(PointSetError::CertificationFailed(MAX_EPSILON_HALVINGS))
}

pub fn gen_double_circle(n: usize) -> Result<GdcPointSet, PointSetError> {
    gen_generalized_double_circle(&GdcSpec::ones(n)?)
}

/// Same construction with an explicit offset; used to compare ε against ε/2.
pub fn gen_generalized_double_circle_with_epsilon(spec: &GdcSpec, eps: &Scalar) -> GdcPointSet {
    build_gdc(spec, &regular_polygon(spec.n()), eps)
}

pub fn certify_gdc(ps: &GdcPointSet) -> bool {
    let pts = &ps.base.points;
    let n = ps.n();
    if n < 3 || ps.inner.len() != n || ps.spec.counts.len() != n {
        return false;
    }
    if ps
        .inner
        .iter()
        .zip(&ps.spec.counts)
        .any(|(v, &c)| v.len() != c)
    {
        return false;
    }
    let mut all: Vec<usize> = ps.cycle();
    all.sort_unstable();
    if all != (0..pts.len()).collect::<Vec<_>>() {
        return false;
    }
    if !is_general_position(pts) {
        return false;
    }
    let hull = match convex_hull(pts) {
        Ok(h) => h,
        Err(_) => return false,
    };
    if hull.len() != n {
        return false;
    }
    let start = match hull.iter().position(|&h| h == ps.outer[0]) {
        Some(s) => s,
        None => return false,
    };
    if (0..n).any(|k| hull[(start + k) % n] != ps.outer[k]) {
        return false;
    }
    // each closed chain P_i A.. P_{i+1} P_i turns clockwise at every vertex
    for i in 0..n {
        let ch = ps.chain(i);
        if ch.len() < 3 {
            continue;
        }
        let m = ch.len();
        for k in 0..m {
            if orient(&pts[ch[k]], &pts[ch[(k + 1) % m]], &pts[ch[(k + 2) % m]]) != Sign::Negative {
                return false;
            }
        }
    }
    ps.cycle_edges()
        .iter()
        .all(|&e| is_unavoidable_edge(&ps.base, e))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderTypeSignature {
    pub n: usize,
    /// Signs for i<j<k in lexicographic order.
    pub signs: Vec<i8>,
}

impl OrderTypeSignature {
    pub fn sign(&self, i: usize, j: usize, k: usize) -> i8 {
        let mut t = [i, j, k];
        let mut parity = 1i8;
        // bubble sort with parity tracking
        for a in 0..3 {
            for b in 0..2 - a {
                if t[b] > t[b + 1] {
                    t.swap(b, b + 1);
                    parity = -parity;
                }
            }
        }
        if t[0] == t[1] || t[1] == t[2] {
            return 0;
        }
        parity * self.signs[triple_rank(self.n, t[0], t[1], t[2])]
    }
}

fn triple_rank(n: usize, i: usize, j: usize, k: usize) -> usize {
    // number of triples before (i,j,k) in lexicographic order
    let c3 = |m: usize| if m < 3 { 0 } else { m * (m - 1) * (m - 2) / 6 };
    let c2 = |m: usize| if m < 2 { 0 } else { m * (m - 1) / 2 };
    let before_i = c3(n) - c3(n - i);
    let before_j = c2(n - i - 1) - c2(n - j);
    before_i + before_j + (k - j - 1)
}

pub fn order_type_signature(ps: &PointSet) -> Result<OrderTypeSignature, PointSetError> {
    signature_of_points(&ps.points)
}

pub fn signature_of_points(pts: &[Point]) -> Result<OrderTypeSignature, PointSetError> {
    let n = pts.len();
    let mut signs = Vec::with_capacity(n * n * n / 6);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let s = orient(&pts[i], &pts[j], &pts[k]);
                if s.is_zero() {
                    return Err(PointSetError::NotGeneralPosition);
                }
                signs.push(s.as_i8());
            }
        }
    }
    Ok(OrderTypeSignature { n, signs })
}

/// True iff orient(pᵢ,pⱼ,pₖ) = orient(q_f(i),q_f(j),q_f(k)) for all triples.
pub fn same_order_type(p: &PointSet, q: &PointSet, f: &[usize]) -> bool {
    let n = p.len();
    if q.len() != n || f.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in f {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let a = orient(&p.points[i], &p.points[j], &p.points[k]);
                let b = orient(&q.points[f[i]], &q.points[f[j]], &q.points[f[k]]);
                if a != b {
                    return false;
                }
            }
        }
    }
    true
}

fn diameter_bound(pts: &[Point]) -> Scalar {
    let mut lo_x = pts[0].x.clone();
    let mut hi_x = pts[0].x.clone();
    let mut lo_y = pts[0].y.clone();
    let mut hi_y = pts[0].y.clone();
    for p in pts {
        if p.x < lo_x {
            lo_x = p.x.clone();
        }
        if p.x > hi_x {
            hi_x = p.x.clone();
        }
        if p.y < lo_y {
            lo_y = p.y.clone();
        }
        if p.y > hi_y {
            hi_y = p.y.clone();
        }
    }
    let d = (hi_x - lo_x) + (hi_y - lo_y);
    if d.is_positive() {
        d
    } else {
        Scalar::one()
    }
}

/// Deterministic perturbation into general⁺ position that keeps the order
/// type. Inputs that already qualify are returned unchanged.
pub fn perturb_to_general_plus(ps: &PointSet, seed: u64) -> Result<PointSet, PointSetError> {
    if !is_general_position(&ps.points) {
        return Err(PointSetError::NotGeneralPosition);
    }
    if is_general_plus_position(&ps.points) {
        return Ok(ps.clone());
    }
    let sig = order_type_signature(ps)?;
    let diam = diameter_bound(&ps.points);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grain: i64 = 1 << 6;
    for k in 6..6 + MAX_PERTURB_ROUNDS {
        let scale = &diam / Scalar::from_integer(num_bigint::BigInt::one() << k);
        let moved: Vec<Point> = ps
            .points
            .iter()
            .map(|p| {
                let dx = ratio(rng.gen_range(-grain..=grain), grain);
                let dy = ratio(rng.gen_range(-grain..=grain), grain);
                Point::new(&p.x + &dx * &scale, &p.y + &dy * &scale)
            })
            .collect();
        if let Ok(s2) = signature_of_points(&moved) {
            if s2 == sig && is_general_plus_position(&moved) {
                return PointSet::new(moved);
            }
        }
    }
    Err(PointSetError::PerturbationFailed(MAX_PERTURB_ROUNDS))
}

/// n hull points on a rational near-circle plus `interior` points sampled
/// strictly inside, in general position. Used by tests and the CLI.
pub fn random_point_set(
    hull: usize,
    interior: usize,
    seed: u64,
) -> Result<PointSet, PointSetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..1000 {
        let mut angles: Vec<f64> = (0..hull)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut pts: Vec<Point> = angles
            .iter()
            .map(|t| {
                Point::new(
                    rational_from_f64(1000.0 * t.cos(), 1),
                    rational_from_f64(1000.0 * t.sin(), 1),
                )
            })
            .collect();
        let outer = pts.clone();
        if convex_hull(&outer).map(|h| h.len()) != Ok(hull) {
            continue;
        }
        let poly = crate::exactgeom::ConvexPolygon::new(
            convex_hull(&outer)
                .unwrap()
                .iter()
                .map(|&i| outer[i].clone())
                .collect(),
        )?;
        let mut tries = 0;
        while pts.len() < hull + interior && tries < 100_000 {
            tries += 1;
            let q = Point::from_ints(rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000));
            if poly.contains(&q) != crate::exactgeom::Location::Inside {
                continue;
            }
            let ok = (0..pts.len()).all(|i| {
                (i + 1..pts.len()).all(|j| !orient(&pts[i], &pts[j], &q).is_zero()) && pts[i] != q
            });
            if ok {
                pts.push(q);
            }
        }
        if pts.len() == hull + interior {
            if let Ok(ps) = PointSet::new(pts) {
                if ps.hull_size() == hull {
                    return Ok(ps);
                }
            }
        }
    }
    Err(PointSetError::InvalidSpec(
        "could not sample a random set".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_circle_sizes() {
        for n in 3..=8 {
            let dc = gen_double_circle(n).unwrap();
            assert_eq!(dc.base.len(), 2 * n);
            assert_eq!(dc.base.hull_size(), n);
            assert!(certify_gdc(&dc));
        }
    }

    #[test]
    fn generalized_examples() {
        let g = gen_generalized_double_circle(&GdcSpec::new(vec![1, 2, 3]).unwrap()).unwrap();
        assert_eq!(g.base.len(), 9);
        assert_eq!(g.base.hull_size(), 3);
        let g = gen_generalized_double_circle(&GdcSpec::new(vec![0, 0, 2]).unwrap()).unwrap();
        assert_eq!(g.base.len(), 5);
        assert!(certify_gdc(&g));
        let dc = gen_double_circle(3).unwrap();
        let g = gen_generalized_double_circle(&GdcSpec::new(vec![1, 1, 1]).unwrap()).unwrap();
        assert_eq!(dc, g);
    }

    #[test]
    fn spec_rejects_small() {
        assert!(GdcSpec::new(vec![1, 1]).is_err());
    }

    #[test]
    fn halving_epsilon_keeps_signature() {
        let dc = gen_double_circle(5).unwrap();
        let half = gen_generalized_double_circle_with_epsilon(&dc.spec, &(&dc.epsilon / int(2)));
        let id: Vec<usize> = (0..10).collect();
        assert!(same_order_type(&dc.base, &half.base, &id));
    }

    #[test]
    fn certify_negatives() {
        let dc = gen_double_circle(5).unwrap();
        let mut moved = dc.clone();
        let a = moved.inner[0][0];
        let p = moved.base.points[a].clone();
        moved.base.points[a] = Point::new(&p.x * int(3), &p.y * int(3));
        assert!(!certify_gdc(&moved));
        let mut swapped = dc.clone();
        let (x, y) = (swapped.inner[0][0], swapped.inner[1][0]);
        swapped.inner[0][0] = y;
        swapped.inner[1][0] = x;
        assert!(!certify_gdc(&swapped));
    }

    #[test]
    fn signature_mirror_negates() {
        let ps = PointSet::new(vec![
            Point::from_ints(0, 0),
            Point::from_ints(1, 0),
            Point::from_ints(0, 1),
        ])
        .unwrap();
        let s = order_type_signature(&ps).unwrap();
        assert_eq!(s.signs, vec![1]);
        let m = order_type_signature(&ps.mirrored()).unwrap();
        assert_eq!(m.signs, vec![-1]);
        assert!(!same_order_type(&ps, &ps.mirrored(), &[0, 1, 2]));
        assert!(same_order_type(&ps, &ps, &[0, 1, 2]));
    }

    #[test]
    fn signature_lookup_matches_orient() {
        let ps = random_point_set(4, 3, 7).unwrap();
        let s = order_type_signature(&ps).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let o = orient(&ps.points[i], &ps.points[j], &ps.points[k]).as_i8();
                    assert_eq!(s.sign(i, j, k), o);
                }
            }
        }
    }

    #[test]
    fn perturb_hexagon() {
        let hex: Vec<Point> = [(2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2)]
            .iter()
            .map(|&(x, y)| Point::from_ints(x, y))
            .collect();
        let ps = PointSet::new(hex).unwrap();
        let out = perturb_to_general_plus(&ps, 1).unwrap();
        assert!(is_general_plus_position(&out.points));
        assert_eq!(
            order_type_signature(&out).unwrap(),
            order_type_signature(&ps).unwrap()
        );
        assert_eq!(perturb_to_general_plus(&out, 99).unwrap(), out);
    }
}
