//! Visibility subdivision of a convex polygon P₁…Pₙ with apexes Q₁…Qₙ₋₁
//! outside the edges PᵢPᵢ₊₁: cell i is convex and stays convex when merged
//! with triangle (Pᵢ, Qᵢ, Pᵢ₊₁).
//!
//! Distances to edge lines are replaced by the cross products
//! crossᵢ(A) = cross3(Pᵢ, Pᵢ₊₁, A), rescaled by weights Wᵢ. Cell i is where
//! crossᵢ/Wᵢ is smallest.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactgeom::{
    clip_convex, convex_interiors_overlap, cross3, orient, rational_from_f64, simplify_ring,
    ConvexPolygon, Line, Location, Point, Ray, Scalar, Sign,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no admissible split ray at vertex {0}")]
    NoRay(usize),
}

/// Polygon (counterclockwise, 0-based) with apex `apexes[j]` outside edge
/// (vⱼ, vⱼ₊₁) for j < n−1. The last edge has no apex.
#[derive(Clone, Debug)]
pub struct ApexInput {
    pub polygon: ConvexPolygon,
    pub apexes: Vec<Point>,
}

impl ApexInput {
    pub fn new(polygon: ConvexPolygon, apexes: Vec<Point>) -> Result<ApexInput, SkeletonError> {
        let n = polygon.len();
        let pre = |m: String| Err(SkeletonError::Precondition(m));
        if n < 3 {
            return pre(format!("{n} vertices"));
        }
        if !polygon.is_strictly_convex() {
            return pre("polygon has a flat angle".into());
        }
        if apexes.len() != n - 1 {
            return pre(format!("expected {} apexes, got {}", n - 1, apexes.len()));
        }
        let closing = (polygon.vertex(n - 1), polygon.vertex(0));
        for (j, q) in apexes.iter().enumerate() {
            let (a, b) = polygon.edge(j);
            if orient(a, b, q) != Sign::Negative {
                return pre(format!("apex {j} is not outside its edge"));
            }
            if orient(closing.0, closing.1, q) != Sign::Positive {
                return pre(format!(
                    "apex {j} is not on the polygon side of the closing edge"
                ));
            }
        }
        for i in 0..apexes.len() {
            for j in i + 1..apexes.len() {
                let (a, b) = polygon.edge(i);
                let (c, d) = polygon.edge(j);
                let ti = [a.clone(), apexes[i].clone(), b.clone()];
                let tj = [c.clone(), apexes[j].clone(), d.clone()];
                if convex_interiors_overlap(&ti, &tj) {
                    return pre(format!("apex triangles {i} and {j} overlap"));
                }
            }
        }
        Ok(ApexInput { polygon, apexes })
    }

    pub fn n(&self) -> usize {
        self.polygon.len()
    }
}

/// One ray per vertex. `tight[i]` marks vertices where the feasible cone
/// collapsed to a single direction (the two neighbouring apex triangles
/// close the full angle around the vertex).
#[derive(Clone, Debug)]
pub struct SplitRays {
    pub rays: Vec<Ray>,
    pub tight: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparators {
    pub weights: Vec<Scalar>,
}

/// crossⱼ(A)·Wᵢ − crossᵢ(A)·Wⱼ, nonnegative where cell i beats cell j.
pub fn comparator_line(input: &ApexInput, w: &Comparators, i: usize, j: usize) -> Line {
    let (pi, qi) = input.polygon.edge(i);
    let (pj, qj) = input.polygon.edge(j);
    let li = Line::through(pi, qi);
    let lj = Line::through(pj, qj);
    let (wi, wj) = (&w.weights[i], &w.weights[j]);
    Line {
        a: &lj.a * wi - &li.a * wj,
        b: &lj.b * wi - &li.b * wj,
        c: &lj.c * wi - &li.c * wj,
    }
}

impl Comparators {
    /// crossᵢ(A)/Wᵢ.
    pub fn value(&self, input: &ApexInput, i: usize, a: &Point) -> Scalar {
        let (p, q) = input.polygon.edge(i);
        cross3(p, q, a) / &self.weights[i]
    }
}

fn l1_unit(v: &Point) -> Point {
    v.scale(&(Scalar::from_integer(1.into()) / v.l1_norm()))
}

/// The four strict constraints on a split direction `d` at vertex i.
fn ray_ok(u: &Point, v: &Point, a: &Point, c: &Point, d: &Point) -> bool {
    v.cross(d).is_positive()
        && d.cross(u).is_positive()
        && d.cross(a).is_positive()
        && c.cross(d).is_positive()
}

/// Direction of ray i from the vertex: interior, between the previous edge
/// and the next, and keeping both neighbouring merged cells convex.
pub fn compute_split_rays(input: &ApexInput) -> Result<SplitRays, SkeletonError> {
    let n = input.n();
    let v = &input.polygon.vertices;
    let mut rays = Vec::with_capacity(n);
    let mut tight = vec![false; n];
    rays.push(Ray::new(v[0].clone(), &v[n - 1] - &v[0]).expect("distinct vertices"));
    for i in 1..n - 1 {
        let p = &v[i];
        let u = &v[i - 1] - p;
        let w = &v[i + 1] - p;
        let a = &input.apexes[i - 1] - p;
        let c = &input.apexes[i] - p;
        // lower bound: edge toward v[i+1] or the extension of Q_{i-1}
        let na = -&a;
        let lo = if w.cross(&na).is_positive() {
            na
        } else {
            w.clone()
        };
        let nc = -&c;
        let hi = if u.cross(&nc).is_positive() {
            u.clone()
        } else {
            nc
        };
        let gap = lo.cross(&hi);
        let d = if gap.is_positive() {
            let (lf, hf) = (lo.to_f64(), hi.to_f64());
            let norm = |x: (f64, f64)| (x.0 * x.0 + x.1 * x.1).sqrt();
            let (nl, nh) = (norm(lf), norm(hf));
            let guess = (lf.0 / nl + hf.0 / nh, lf.1 / nl + hf.1 / nh);
            let rounded = Point::new(
                rational_from_f64(guess.0, 1 << 12),
                rational_from_f64(guess.1, 1 << 12),
            );
            if !rounded.is_zero() && ray_ok(&u, &w, &a, &c, &rounded) {
                rounded
            } else {
                let exact = &l1_unit(&lo) + &l1_unit(&hi);
                if !ray_ok(&u, &w, &a, &c, &exact) {
                    return Err(SkeletonError::NoRay(i));
                }
                exact
            }
        } else if gap.is_zero() && lo.dot(&hi).is_positive() {
            tight[i] = true;
            lo
        } else {
            return Err(SkeletonError::NoRay(i));
        };
        rays.push(Ray::new(p.clone(), d).expect("nonzero direction"));
    }
    rays.push(Ray::new(v[n - 1].clone(), &v[0] - &v[n - 1]).expect("distinct vertices"));
    Ok(SplitRays { rays, tight })
}

/// W₀ = 1 and Wᵢ = Wᵢ₋₁·crossᵢ(D)/crossᵢ₋₁(D) for a point D on interior ray i.
pub fn compute_comparators(input: &ApexInput, rays: &SplitRays) -> Comparators {
    let n = input.n();
    let mut weights = Vec::with_capacity(n - 1);
    weights.push(Scalar::from_integer(1.into()));
    for i in 1..n - 1 {
        let d = rays.rays[i].at(&Scalar::from_integer(1.into()));
        let (a, b) = input.polygon.edge(i);
        let (c, e) = input.polygon.edge(i - 1);
        let ci = cross3(a, b, &d);
        let cp = cross3(c, e, &d);
        let prev = weights[i - 1].clone();
        weights.push(prev * ci / cp);
    }
    Comparators { weights }
}

/// Cells, one per apex; `None` for a cell with empty interior.
pub fn visibility_subdivision(
    input: &ApexInput,
) -> Result<Vec<Option<ConvexPolygon>>, SkeletonError> {
    let rays = compute_split_rays(input)?;
    let w = compute_comparators(input, &rays);
    Ok(cells_from(input, &w))
}

pub fn cells_from(input: &ApexInput, w: &Comparators) -> Vec<Option<ConvexPolygon>> {
    let k = input.apexes.len();
    (0..k)
        .map(|i| {
            let mut cur = input.polygon.vertices.clone();
            for j in 0..k {
                if j == i || cur.len() < 3 {
                    continue;
                }
                cur = clip_convex(&cur, &comparator_line(input, w, i, j));
            }
            let cur = simplify_ring(cur);
            if cur.len() < 3 {
                None
            } else {
                ConvexPolygon::new(cur).ok()
            }
        })
        .collect()
}

/// Cell i with the apex triangle glued on along edge i.
pub fn merged_polygon(input: &ApexInput, i: usize, cell: &ConvexPolygon) -> Option<Vec<Point>> {
    let (a, b) = input.polygon.edge(i);
    let m = cell.len();
    let start = (0..m).find(|&k| cell.vertex(k) == a && cell.vertex(k + 1) == b)?;
    let mut out = Vec::with_capacity(m + 1);
    for t in 0..m {
        out.push(cell.vertex(start + t).clone());
        if t == 0 {
            out.push(input.apexes[i].clone());
        }
    }
    Some(out)
}

/// No right turns and positive area.
pub fn is_convex_ring(v: &[Point]) -> bool {
    let n = v.len();
    n >= 3
        && (0..n).all(|i| orient(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]) != Sign::Negative)
        && crate::exactgeom::polygon_area2(v).is_positive()
}

/// Checks cells against the visibility contract.
pub fn check_visibility_subdivision(
    input: &ApexInput,
    cells: &[Option<ConvexPolygon>],
) -> Result<(), String> {
    let k = input.apexes.len();
    if cells.len() != k {
        return Err(format!("expected {k} cells"));
    }
    let mut area = Scalar::zero();
    for i in 0..k {
        let Some(c) = &cells[i] else { continue };
        area += c.area2();
        let (a, b) = input.polygon.edge(i);
        if c.contains(&a.midpoint(b)) != Location::Boundary {
            return Err(format!("cell {i} misses its edge"));
        }
        let merged = merged_polygon(input, i, c)
            .ok_or_else(|| format!("cell {i} does not have edge {i}"))?;
        if !is_convex_ring(&merged) {
            return Err(format!(
                "cell {i} merged with its apex triangle is not convex"
            ));
        }
        for j in i + 1..k {
            if let Some(d) = &cells[j] {
                if convex_interiors_overlap(&c.vertices, &d.vertices) {
                    return Err(format!("cells {i} and {j} overlap"));
                }
            }
        }
    }
    if area != input.polygon.area2() {
        return Err("cells do not cover the polygon".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn pentagon() -> ApexInput {
        let poly =
            ConvexPolygon::new(vec![p(0, 0), p(10, 0), p(14, 8), p(5, 14), p(-4, 8)]).unwrap();
        ApexInput::new(poly, vec![p(5, -3), p(15, 2), p(11, 14), p(-1, 14)]).unwrap()
    }

    #[test]
    fn first_weight_is_one() {
        let inp = pentagon();
        let w = compute_comparators(&inp, &compute_split_rays(&inp).unwrap());
        assert_eq!(w.weights[0], Scalar::from_integer(1.into()));
        assert!(w.weights.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn comparators_agree_on_rays() {
        let inp = pentagon();
        let rays = compute_split_rays(&inp).unwrap();
        let w = compute_comparators(&inp, &rays);
        for i in 1..inp.n() - 1 {
            for t in [1i64, 3] {
                let d = rays.rays[i].at(&Scalar::from_integer(t.into()));
                assert_eq!(w.value(&inp, i, &d), w.value(&inp, i - 1, &d));
            }
        }
    }

    #[test]
    fn pentagon_cells_valid() {
        let inp = pentagon();
        let cells = visibility_subdivision(&inp).unwrap();
        check_visibility_subdivision(&inp, &cells).unwrap();
    }

    #[test]
    fn isosceles_bisector_keeps_weight() {
        // kite symmetric about x = 0 with equal edges at the middle vertex
        let poly = ConvexPolygon::new(vec![p(-4, 0), p(0, -3), p(4, 0), p(0, 6)]).unwrap();
        let inp = ApexInput::new(poly, vec![p(-4, -4), p(4, -4), p(6, 5)]).unwrap();
        let rays = compute_split_rays(&inp).unwrap();
        assert!(rays.rays[1].direction.x.is_zero());
        let w = compute_comparators(&inp, &rays);
        assert_eq!(w.weights[1], w.weights[0]);
    }

    #[test]
    fn too_many_apexes_rejected() {
        let poly = ConvexPolygon::new(vec![p(0, 0), p(4, 0), p(0, 4)]).unwrap();
        let r = ApexInput::new(poly, vec![p(2, -2), p(4, 4), p(-2, 2)]);
        assert!(matches!(r, Err(SkeletonError::Precondition(_))));
    }

    #[test]
    fn shared_apex_is_tight() {
        // both apex triangles meet along the segment from vertex 1 to W
        let poly = ConvexPolygon::new(vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)]).unwrap();
        let inp = ApexInput::new(poly, vec![p(6, -2), p(6, -2), p(2, 6)]).unwrap();
        let rays = compute_split_rays(&inp).unwrap();
        assert!(rays.tight[1]);
        let cells = visibility_subdivision(&inp).unwrap();
        check_visibility_subdivision(&inp, &cells).unwrap();
    }
}
