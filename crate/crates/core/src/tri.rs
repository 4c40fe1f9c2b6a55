//! Triangulations of point sets and simple polygons, unavoidable edges,
//! porting along a vertex correspondence and the compatibility verifier.

use std::collections::BTreeSet;

use num_traits::Signed;
use thiserror::Error;

use crate::exactgeom::{orient, polygon_area2, segments_cross, Crossing, Point, Segment, Sign};
use crate::pointsets::PointSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("required edges ({0},{1}) and ({2},{3}) cross")]
    RequiredEdgesCross(usize, usize, usize, usize),
    #[error("edge index out of range: ({0},{1}) with n = {2}")]
    IndexOutOfRange(usize, usize, usize),
    #[error("polygon is not simple: {0}")]
    NotSimple(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn new(n: usize) -> EdgeSet {
        EdgeSet {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<EdgeSet, TriError> {
        let mut e = EdgeSet::new(n);
        for (a, b) in pairs {
            e.insert(a, b)?;
        }
        Ok(e)
    }

    pub fn insert(&mut self, a: usize, b: usize) -> Result<bool, TriError> {
        if a >= self.n || b >= self.n || a == b {
            return Err(TriError::IndexOutOfRange(a, b, self.n));
        }
        Ok(self.edges.insert(norm(a, b)))
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&norm(a, b))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Image under an index map.
    pub fn mapped(&self, f: &[usize]) -> EdgeSet {
        let mut out = EdgeSet::new(self.n);
        for (a, b) in self.iter() {
            out.edges.insert(norm(f[a], f[b]));
        }
        out
    }
}

pub fn norm(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePolygon {
    pub vertices: Vec<Point>,
}

impl SimplePolygon {
    /// Validates simplicity and counterclockwise orientation.
    pub fn new(vertices: Vec<Point>) -> Result<SimplePolygon, TriError> {
        let n = vertices.len();
        if n < 3 {
            return Err(TriError::NotSimple(format!("{n} vertices")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(TriError::NotSimple("repeated vertex".into()));
                }
            }
        }
        for i in 0..n {
            let s = Segment {
                a: vertices[i].clone(),
                b: vertices[(i + 1) % n].clone(),
            };
            for j in i + 1..n {
                let t = Segment {
                    a: vertices[j].clone(),
                    b: vertices[(j + 1) % n].clone(),
                };
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let c = segments_cross(&s, &t);
                let bad = if adjacent {
                    c == Crossing::Overlap
                } else {
                    c != Crossing::Disjoint
                };
                if bad {
                    return Err(TriError::NotSimple(format!("edges {i} and {j} intersect")));
                }
            }
        }
        if !polygon_area2(&vertices).is_positive() {
            return Err(TriError::NotSimple("not counterclockwise".into()));
        }
        Ok(SimplePolygon { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn v(&self, i: usize) -> &Point {
        &self.vertices[i % self.vertices.len()]
    }
}

/// Bijection between two equal-size point sets, `map[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub map: Vec<usize>,
}

impl Correspondence {
    pub fn new(map: Vec<usize>) -> Result<Correspondence, TriError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(TriError::Precondition("map is not a permutation".into()));
            }
            seen[v] = true;
        }
        Ok(Correspondence { map })
    }

    pub fn identity(n: usize) -> Correspondence {
        Correspondence {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> Correspondence {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Correspondence { map: inv }
    }
}

fn crosses_properly(pts: &[Point], e: (usize, usize), f: (usize, usize)) -> bool {
    if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
        return false;
    }
    let (a, b, c, d) = (&pts[e.0], &pts[e.1], &pts[f.0], &pts[f.1]);
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 == Sign::Negative && o3 * o4 == Sign::Negative
}

/// Segments between input points intersect somewhere other than a shared
/// endpoint (covers collinear overlaps for degenerate inputs).
fn edges_conflict(pts: &[Point], e: (usize, usize), f: (usize, usize)) -> bool {
    if norm(e.0, e.1) == norm(f.0, f.1) {
        return false;
    }
    let s = Segment {
        a: pts[e.0].clone(),
        b: pts[e.1].clone(),
    };
    let t = Segment {
        a: pts[f.0].clone(),
        b: pts[f.1].clone(),
    };
    matches!(segments_cross(&s, &t), Crossing::Proper | Crossing::Overlap)
}

/// An edge lies in every triangulation iff no other edge properly crosses it.
pub fn is_unavoidable_edge(ps: &PointSet, e: (usize, usize)) -> bool {
    let n = ps.len();
    for a in 0..n {
        for b in a + 1..n {
            if crosses_properly(&ps.points, e, (a, b)) {
                return false;
            }
        }
    }
    true
}

pub fn expected_edge_count(ps: &PointSet) -> usize {
    3 * ps.len() - 3 - ps.hull_size()
}

/// Greedy completion of `required` to a full triangulation, scanning candidate
/// edges lexicographically.
pub fn triangulate_point_set(ps: &PointSet, required: &EdgeSet) -> Result<EdgeSet, TriError> {
    let pts = &ps.points;
    let n = ps.len();
    let req: Vec<(usize, usize)> = required.iter().collect();
    for (k, &e) in req.iter().enumerate() {
        if e.0 >= n || e.1 >= n {
            return Err(TriError::IndexOutOfRange(e.0, e.1, n));
        }
        for &f in &req[k + 1..] {
            if edges_conflict(pts, e, f) {
                return Err(TriError::RequiredEdgesCross(e.0, e.1, f.0, f.1));
            }
        }
    }
    let mut out = EdgeSet {
        n,
        edges: required.edges.clone(),
    };
    for a in 0..n {
        for b in a + 1..n {
            if out.contains(a, b) {
                continue;
            }
            // an edge through another point is never part of a triangulation
            if (0..n).any(|k| k != a && k != b && point_in_open_segment(pts, (a, b), k)) {
                continue;
            }
            if out.iter().all(|f| !edges_conflict(pts, (a, b), f)) {
                out.edges.insert((a, b));
            }
        }
    }
    Ok(out)
}

fn point_in_open_segment(pts: &[Point], e: (usize, usize), k: usize) -> bool {
    let (a, b, p) = (&pts[e.0], &pts[e.1], &pts[k]);
    orient(a, b, p).is_zero() && (p - a).dot(&(p - b)).is_negative()
}

pub fn verify_triangulation(ps: &PointSet, t: &EdgeSet) -> bool {
    let pts = &ps.points;
    let n = ps.len();
    if t.n != n || n < 3 || t.len() != expected_edge_count(ps) {
        return false;
    }
    let edges: Vec<(usize, usize)> = t.iter().collect();
    for &(a, b) in &edges {
        if a >= n || b >= n || a == b {
            return false;
        }
        if (0..n).any(|k| k != a && k != b && point_in_open_segment(pts, (a, b), k)) {
            return false;
        }
    }
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if edges_conflict(pts, edges[i], edges[j]) {
                return false;
            }
        }
    }
    true
}

pub fn verify_compatible(
    p: &PointSet,
    q: &PointSet,
    f: &Correspondence,
    tp: &EdgeSet,
    tq: &EdgeSet,
) -> bool {
    if p.len() != q.len() || f.len() != p.len() || Correspondence::new(f.map.clone()).is_err() {
        return false;
    }
    if tp.len() != tq.len() {
        return false;
    }
    if !verify_triangulation(p, tp) || !verify_triangulation(q, tq) {
        return false;
    }
    tp.mapped(&f.map) == *tq
}

/// `f0[k]` is the image of `P.hull[k]`. True iff hull edges map to hull edges
/// in both directions; orientation is not checked.
pub fn check_cyclic_mapping(p: &PointSet, q: &PointSet, f0: &[usize]) -> bool {
    let h = p.hull_size();
    if q.hull_size() != h || f0.len() != h {
        return false;
    }
    let mut img: Vec<usize> = f0.to_vec();
    img.sort_unstable();
    let mut qh = q.hull.clone();
    qh.sort_unstable();
    if img != qh {
        return false;
    }
    let q_edges: BTreeSet<(usize, usize)> = (0..h)
        .map(|k| norm(q.hull[k], q.hull[(k + 1) % h]))
        .collect();
    let mapped: BTreeSet<(usize, usize)> = (0..h).map(|k| norm(f0[k], f0[(k + 1) % h])).collect();
    mapped == q_edges
}

/// f0 for "hull vertex k of P ↦ hull vertex k + r of Q".
pub fn rotation_mapping(p: &PointSet, q: &PointSet, r: usize) -> Vec<usize> {
    let h = q.hull_size();
    (0..p.hull_size()).map(|k| q.hull[(k + r) % h]).collect()
}

/// Ear clipping, smallest-index ear first. Returns triangles as vertex index
/// triples in counterclockwise order.
pub fn ear_clip(poly: &SimplePolygon) -> Result<Vec<[usize; 3]>, TriError> {
    let pts = &poly.vertices;
    let mut ring: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::with_capacity(pts.len().saturating_sub(2));
    while ring.len() > 3 {
        let m = ring.len();
        let mut clipped = false;
        for k in 0..m {
            let (a, b, c) = (ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]);
            if orient(&pts[a], &pts[b], &pts[c]) != Sign::Positive {
                continue;
            }
            let blocked = ring.iter().any(|&v| {
                v != a && v != b && v != c && {
                    let p = &pts[v];
                    orient(&pts[a], &pts[b], p) != Sign::Negative
                        && orient(&pts[b], &pts[c], p) != Sign::Negative
                        && orient(&pts[c], &pts[a], p) != Sign::Negative
                }
            });
            if blocked {
                continue;
            }
            tris.push([a, b, c]);
            ring.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(TriError::NotSimple("no ear found".into()));
        }
    }
    tris.push([ring[0], ring[1], ring[2]]);
    Ok(tris)
}

/// Diagonals of a triangle list over polygon vertices.
pub fn diagonals_of(p: usize, tris: &[[usize; 3]]) -> EdgeSet {
    let mut out = EdgeSet::new(p);
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let adjacent = (a + 1) % p == b || (b + 1) % p == a;
            if !adjacent {
                out.edges.insert(norm(a, b));
            }
        }
    }
    out
}

pub fn triangulate_polygon(poly: &SimplePolygon) -> Result<EdgeSet, TriError> {
    let tris = ear_clip(poly)?;
    Ok(diagonals_of(poly.len(), &tris))
}

/// True iff the open segment between vertices i and j lies strictly inside.
pub fn diagonal_inside_polygon(poly: &SimplePolygon, i: usize, j: usize) -> Result<bool, TriError> {
    let n = poly.len();
    if i >= n || j >= n {
        return Err(TriError::IndexOutOfRange(i, j, n));
    }
    if i == j || (i + 1) % n == j || (j + 1) % n == i {
        return Err(TriError::Precondition(format!(
            "({i},{j}) is not a diagonal candidate"
        )));
    }
    let (a, b) = (poly.v(i), poly.v(j));
    // leaves vertex i into the interior cone
    let prev = poly.v(i + n - 1);
    let next = poly.v(i + 1);
    let in_cone = if orient(prev, a, next) != Sign::Negative {
        orient(a, next, b) == Sign::Positive && orient(a, b, prev) == Sign::Positive
    } else {
        !(orient(a, b, next) != Sign::Negative && orient(a, prev, b) != Sign::Negative)
    };
    if !in_cone {
        return Ok(false);
    }
    let d = Segment {
        a: a.clone(),
        b: b.clone(),
    };
    for k in 0..n {
        let (u, w) = (k, (k + 1) % n);
        if u == i || u == j || w == i || w == j {
            // edges at the endpoints only matter through collinear overlap
            let e = Segment {
                a: poly.v(u).clone(),
                b: poly.v(w).clone(),
            };
            if segments_cross(&d, &e) == Crossing::Overlap {
                return Ok(false);
            }
            continue;
        }
        let e = Segment {
            a: poly.v(u).clone(),
            b: poly.v(w).clone(),
        };
        if segments_cross(&d, &e) != Crossing::Disjoint {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reuses the index pairs of `tq` on `poly_p` after checking that each
/// diagonal is a genuine diagonal of `poly_p`.
pub fn port_polygon_triangulation(
    poly_p: &SimplePolygon,
    poly_q: &SimplePolygon,
    tq: &EdgeSet,
) -> Result<EdgeSet, TriError> {
    let p = poly_p.len();
    if poly_q.len() != p || tq.n != p {
        return Err(TriError::Precondition(format!(
            "sizes {} vs {} vs {}",
            p,
            poly_q.len(),
            tq.n
        )));
    }
    for (a, b) in tq.iter() {
        if (a + 1) % p == b || (b + 1) % p == a {
            continue;
        }
        if !diagonal_inside_polygon(poly_p, a, b)? {
            return Err(TriError::Precondition(format!(
                "diagonal ({a},{b}) is not inside the target polygon"
            )));
        }
    }
    let out = EdgeSet {
        n: p,
        edges: tq.edges.clone(),
    };
    if !verify_polygon_triangulation(poly_p, &out) {
        return Err(TriError::Precondition(
            "ported diagonals do not triangulate the target".into(),
        ));
    }
    Ok(out)
}

/// Diagonal set validity: count p − 3, each inside, pairwise non-crossing.
pub fn verify_polygon_triangulation(poly: &SimplePolygon, diags: &EdgeSet) -> bool {
    let p = poly.len();
    let d: Vec<(usize, usize)> = diags
        .iter()
        .filter(|&(a, b)| (a + 1) % p != b && (b + 1) % p != a)
        .collect();
    if d.len() + 3 != p {
        return false;
    }
    for &(a, b) in &d {
        if diagonal_inside_polygon(poly, a, b) != Ok(true) {
            return false;
        }
    }
    for x in 0..d.len() {
        for y in x + 1..d.len() {
            if crosses_properly(&poly.vertices, d[x], d[y]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::gen_double_circle;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn square() -> PointSet {
        PointSet::new(vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)]).unwrap()
    }

    #[test]
    fn unavoidable_examples() {
        let sq = square();
        assert!(is_unavoidable_edge(&sq, (0, 1)));
        assert!(!is_unavoidable_edge(&sq, (0, 2)));
        let dc = gen_double_circle(4).unwrap();
        for e in dc.cycle_edges() {
            assert!(is_unavoidable_edge(&dc.base, e));
        }
    }

    #[test]
    fn triangulate_examples() {
        let t3 = PointSet::new(vec![p(0, 0), p(1, 0), p(0, 1)]).unwrap();
        let t = triangulate_point_set(&t3, &EdgeSet::new(3)).unwrap();
        assert_eq!(t.len(), 3);
        let sq = square();
        let req = EdgeSet::from_pairs(4, [(1, 3)]).unwrap();
        let t = triangulate_point_set(&sq, &req).unwrap();
        assert_eq!(t.len(), 5);
        assert!(t.contains(1, 3));
        assert!(verify_triangulation(&sq, &t));
        let bad = EdgeSet::from_pairs(4, [(1, 3), (0, 2)]).unwrap();
        assert!(matches!(
            triangulate_point_set(&sq, &bad),
            Err(TriError::RequiredEdgesCross(..))
        ));
        let dc = gen_double_circle(5).unwrap();
        let req = EdgeSet::from_pairs(10, dc.cycle_edges()).unwrap();
        let t = triangulate_point_set(&dc.base, &req).unwrap();
        assert!(verify_triangulation(&dc.base, &t));
    }

    #[test]
    fn verify_rejects_hull_only() {
        let sq = square();
        let hull = EdgeSet::from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!verify_triangulation(&sq, &hull));
    }

    #[test]
    fn polygon_triangulations() {
        let tri = SimplePolygon::new(vec![p(0, 0), p(1, 0), p(0, 1)]).unwrap();
        assert!(triangulate_polygon(&tri).unwrap().is_empty());
        let pent = SimplePolygon::new(vec![p(0, 0), p(4, 0), p(5, 3), p(2, 5), p(-1, 3)]).unwrap();
        let d = triangulate_polygon(&pent).unwrap();
        assert_eq!(d.len(), 2);
        assert!(verify_polygon_triangulation(&pent, &d));
    }

    #[test]
    fn not_simple_rejected() {
        let bow = vec![p(0, 0), p(2, 2), p(2, 0), p(0, 2)];
        assert!(SimplePolygon::new(bow).is_err());
        let cw = vec![p(0, 0), p(0, 1), p(1, 0)];
        assert!(SimplePolygon::new(cw).is_err());
    }

    /// Dart: reflex vertex 2 blocks the diagonal (1,3).
    fn dart() -> SimplePolygon {
        SimplePolygon::new(vec![p(0, 0), p(4, -3), p(1, 0), p(4, 3)]).unwrap()
    }

    #[test]
    fn diagonal_checks() {
        let d = dart();
        assert_eq!(diagonal_inside_polygon(&d, 1, 3), Ok(false));
        assert_eq!(diagonal_inside_polygon(&d, 0, 2), Ok(true));
        assert!(diagonal_inside_polygon(&d, 0, 1).is_err());
        let pent = SimplePolygon::new(vec![p(0, 0), p(4, 0), p(5, 3), p(2, 5), p(-1, 3)]).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j && (i + 1) % 5 != j && (j + 1) % 5 != i {
                    assert_eq!(diagonal_inside_polygon(&pent, i, j), Ok(true));
                }
            }
        }
    }

    #[test]
    fn porting_examples() {
        let convex = SimplePolygon::new(vec![p(0, 0), p(4, -3), p(6, 0), p(4, 3)]).unwrap();
        let fan_bad = EdgeSet::from_pairs(4, [(1, 3)]).unwrap();
        assert!(port_polygon_triangulation(&dart(), &convex, &fan_bad).is_err());
        let fan_ok = EdgeSet::from_pairs(4, [(0, 2)]).unwrap();
        let out = port_polygon_triangulation(&dart(), &convex, &fan_ok).unwrap();
        assert_eq!(out, fan_ok);
    }

    #[test]
    fn cyclic_mapping_examples() {
        let a = PointSet::new(vec![p(0, 0), p(4, 0), p(5, 3), p(2, 5), p(-1, 3)]).unwrap();
        let b = PointSet::new(vec![p(0, 0), p(6, 0), p(7, 4), p(3, 6), p(-2, 3)]).unwrap();
        for r in 0..5 {
            assert!(check_cyclic_mapping(&a, &b, &rotation_mapping(&a, &b, r)));
        }
        let mut f = rotation_mapping(&a, &b, 0);
        f.swap(0, 1);
        assert!(!check_cyclic_mapping(&a, &b, &f));
        let refl: Vec<usize> = (0..5).map(|k| b.hull[(5 - k) % 5]).collect();
        assert!(check_cyclic_mapping(&a, &b, &refl));
    }

    #[test]
    fn compatible_identity() {
        let sq = square();
        let t = triangulate_point_set(&sq, &EdgeSet::new(4)).unwrap();
        let id = Correspondence::identity(4);
        assert!(verify_compatible(&sq, &sq, &id, &t, &t));
        let mut short = t.clone();
        let first = *short.edges.iter().next().unwrap();
        short.edges.remove(&first);
        assert!(!verify_compatible(&sq, &sq, &id, &t, &short));
    }
}
