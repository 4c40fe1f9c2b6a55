//! Counted convex subdivision: split a convex polygon into convex regions, one
//! per edge, holding prescribed numbers of interior points.
//!
//! The recursion works on labeled pieces. Edges carrying a label are whole
//! edges of the input polygon; unlabeled edges are cuts and carry count zero.
//! Zero counts on input edges are removed up front by placing a virtual point
//! just inside the edge midpoint.

pub mod arrangement;
pub mod sweep;

use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactgeom::{
    clip_convex, convex_interiors_overlap, int, is_general_plus_position, orient, orient_h, ratio,
    simplify_ring, ConvexPolygon, HomogPoint, Line, Location, Point, Scalar, Sign,
};
use crate::registry::Registry;

pub use arrangement::{face_representatives, ArrangementOracle, Part, TriangleJob};
pub use sweep::{RsSweep, SweepEnd, SweepTrace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivideError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no split point found: {0}")]
    NoSplitPoint(String),
    #[error("sweep anomaly: {0}")]
    SweepAnomaly(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("{0}")]
    UnknownStrategy(String),
}

/// Strategy for the three-way triangle split.
pub trait TriangleSplitter: Send + Sync {
    fn name(&self) -> &'static str;
    fn split(&self, job: &TriangleJob) -> Result<Point, SubdivideError>;
}

pub const DEFAULT_SPLITTER: &str = "sweep";

pub fn splitters() -> &'static Registry<dyn TriangleSplitter> {
    static REG: OnceLock<Registry<dyn TriangleSplitter>> = OnceLock::new();
    REG.get_or_init(|| {
        let r: Registry<dyn TriangleSplitter> = Registry::new("splitter");
        r.register("sweep", Arc::new(RsSweep { fallback: true }));
        r.register("sweep-strict", Arc::new(RsSweep { fallback: false }));
        r.register("arrangement", Arc::new(ArrangementOracle));
        r
    })
}

pub fn splitter(name: &str) -> Result<Arc<dyn TriangleSplitter>, SubdivideError> {
    splitters()
        .lookup(name)
        .map_err(SubdivideError::UnknownStrategy)
}

/// Full general⁺ rechecks are skipped above this many points; the local
/// collinearity clearance still applies.
pub const FULL_GENERAL_PLUS_LIMIT: usize = 16;

#[derive(Clone, Debug)]
pub struct CountedSubdivisionRequest {
    pub polygon: ConvexPolygon,
    pub interior: Vec<Point>,
    pub counts: Vec<usize>,
}

impl CountedSubdivisionRequest {
    pub fn new(
        polygon: ConvexPolygon,
        interior: Vec<Point>,
        counts: Vec<usize>,
    ) -> CountedSubdivisionRequest {
        CountedSubdivisionRequest {
            polygon,
            interior,
            counts,
        }
    }

    pub fn validate(&self, check_general_plus: bool) -> Result<(), SubdivideError> {
        let n = self.polygon.len();
        if self.counts.len() != n {
            return Err(SubdivideError::Precondition(format!(
                "{} counts for {} edges",
                self.counts.len(),
                n
            )));
        }
        let total: usize = self.counts.iter().sum();
        if total != self.interior.len() {
            return Err(SubdivideError::Precondition(format!(
                "counts sum to {} but there are {} points",
                total,
                self.interior.len()
            )));
        }
        if !self.polygon.is_strictly_convex() {
            return Err(SubdivideError::Precondition(
                "polygon has a flat angle".into(),
            ));
        }
        for p in &self.interior {
            if self.polygon.contains(p) != Location::Inside {
                return Err(SubdivideError::Precondition(format!(
                    "point {p} is not strictly inside"
                )));
            }
        }
        if check_general_plus {
            let mut all = self.polygon.vertices.clone();
            all.extend(self.interior.iter().cloned());
            if !is_general_plus_position(&all) {
                return Err(SubdivideError::Precondition(
                    "points are not in general⁺ position".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionAssignment {
    pub regions: Vec<Option<ConvexPolygon>>,
    /// Indices into the request's interior points, per region, ascending.
    pub members: Vec<Vec<usize>>,
}

/// Points sorted by angle around a pivot, counterclockwise from the ray
/// toward `reference`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngularOrder {
    pub pivot: HomogPoint,
    pub reference: Point,
    pub order: Vec<usize>,
}

impl AngularOrder {
    pub fn new(pivot: &HomogPoint, reference: &Point, points: &[Point]) -> AngularOrder {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| angular_cmp(pivot, &points[a], &points[b]));
        AngularOrder {
            pivot: pivot.clone(),
            reference: reference.clone(),
            order,
        }
    }

    /// `a` comes strictly before `b`.
    pub fn before(&self, a: &Point, b: &Point) -> bool {
        orient_h(&self.pivot, a, b) == Sign::Positive
    }

    pub fn is_strict(&self, points: &[Point]) -> bool {
        self.order
            .windows(2)
            .all(|w| self.before(&points[w[0]], &points[w[1]]))
    }
}

fn angular_cmp(pivot: &HomogPoint, a: &Point, b: &Point) -> Ordering {
    match orient_h(pivot, a, b) {
        Sign::Positive => Ordering::Less,
        Sign::Negative => Ordering::Greater,
        Sign::Zero => Ordering::Equal,
    }
}

#[derive(Clone, Debug)]
pub struct SubdivisionOptions {
    pub splitter: Arc<dyn TriangleSplitter>,
    pub check_general_plus: bool,
}

impl Default for SubdivisionOptions {
    fn default() -> Self {
        SubdivisionOptions {
            splitter: splitter(DEFAULT_SPLITTER).expect("default splitter"),
            check_general_plus: true,
        }
    }
}

impl std::fmt::Debug for dyn TriangleSplitter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TriangleSplitter({})", self.name())
    }
}

/// Moves `q` inside its arrangement face until the augmented point set is in
/// general⁺ position.
fn settle_general_plus(
    job: &TriangleJob,
    q: Point,
    extra: &[Point],
) -> Result<Point, SubdivideError> {
    let mut base: Vec<Point> = extra.to_vec();
    base.push(job.left.clone());
    base.push(job.right.clone());
    if let Some(a) = job.apex.to_point() {
        base.push(a);
    }
    base.extend(job.points.iter().cloned());
    let ok = |c: &Point| {
        let mut all = base.clone();
        all.push(c.clone());
        is_general_plus_position(&all)
    };
    if ok(&q) {
        return Ok(q);
    }
    let lines = job.arrangement_lines();
    for k in 1..64i64 {
        let dir = Point::from_ints(k, k * k % 17 - 8);
        let mut t: Option<Scalar> = None;
        for l in &lines {
            let r = l.rate(&dir);
            if r.is_zero() {
                continue;
            }
            let root = (-l.eval(&q) / r).abs();
            if t.as_ref().map_or(true, |c| &root < c) {
                t = Some(root);
            }
        }
        let t = t.unwrap_or_else(Scalar::one) / int(2 + k);
        let cand = &q + &dir.scale(&t);
        if job.accepts(&cand) && ok(&cand) {
            return Ok(cand);
        }
    }
    Err(SubdivideError::NoSplitPoint(
        "could not restore general⁺ position".into(),
    ))
}

fn triangle_job(
    p1: &Point,
    pi: &Point,
    pj: &Point,
    interior: &[Point],
    ct: usize,
    ci: usize,
    cb: usize,
) -> Result<TriangleJob, SubdivideError> {
    let job = TriangleJob {
        apex: p1.to_homog(),
        left: pi.clone(),
        right: pj.clone(),
        points: interior.to_vec(),
        ct,
        ci,
        cb,
        blockers: Vec::new(),
    };
    job.validate()?;
    let mut all = vec![p1.clone(), pi.clone(), pj.clone()];
    all.extend(interior.iter().cloned());
    if !is_general_plus_position(&all) {
        return Err(SubdivideError::Precondition(
            "points are not in general⁺ position".into(),
        ));
    }
    Ok(job)
}

/// Q strictly inside (p1, pi, pj) with exactly ct, cb, ci points inside
/// (p1, pi, Q), (p1, Q, pj), (Q, pi, pj). Uses the R/S sweep.
pub fn split_triangle_three(
    p1: &Point,
    pi: &Point,
    pj: &Point,
    interior: &[Point],
    ct: usize,
    ci: usize,
    cb: usize,
) -> Result<Point, SubdivideError> {
    split_triangle_three_with(
        splitter(DEFAULT_SPLITTER)?.as_ref(),
        p1,
        pi,
        pj,
        interior,
        ct,
        ci,
        cb,
    )
}

/// Same contract, computed by trying the faces of the full arrangement.
pub fn split_triangle_three_oracle(
    p1: &Point,
    pi: &Point,
    pj: &Point,
    interior: &[Point],
    ct: usize,
    ci: usize,
    cb: usize,
) -> Result<Point, SubdivideError> {
    split_triangle_three_with(&ArrangementOracle, p1, pi, pj, interior, ct, ci, cb)
}

#[allow(clippy::too_many_arguments)]
pub fn split_triangle_three_with(
    splitter: &dyn TriangleSplitter,
    p1: &Point,
    pi: &Point,
    pj: &Point,
    interior: &[Point],
    ct: usize,
    ci: usize,
    cb: usize,
) -> Result<Point, SubdivideError> {
    let job = triangle_job(p1, pi, pj, interior, ct, ci, cb)?;
    let q = splitter.split(&job)?;
    if !job.accepts(&q) {
        return Err(SubdivideError::Internal(format!(
            "{} returned a point with wrong counts",
            splitter.name()
        )));
    }
    let q = job.snapped(&q);
    settle_general_plus(&job, q, &[])
}

#[derive(Clone, Debug)]
pub struct PivotSplit {
    /// Triangle (P₀, Pᵢ, Pᵢ₊₁) with 0-based vertex index i.
    pub edge: usize,
    pub q: Point,
    pub order: AngularOrder,
    pub ct: usize,
    pub ci: usize,
    pub cb: usize,
}

struct FanSplit {
    /// 0-based index into the fan: triangle (X, fan[k], fan[k+1]).
    k: usize,
    /// May lie beyond the line at infinity when the pivot does.
    q: HomogPoint,
    order: AngularOrder,
    ct: usize,
    ci: usize,
    cb: usize,
}

/// Pivot split of the polygon X, fan[0], …, fan[K−2] (counterclockwise) with
/// `counts[e]` points for edge e (edge 0 is X→fan[0], the last is back to X).
fn fan_split(
    x: &HomogPoint,
    fan: &[Point],
    counts: &[usize],
    pts: &[Point],
    blockers: &[Point],
    splitter: &dyn TriangleSplitter,
) -> Result<FanSplit, SubdivideError> {
    let kk = counts.len();
    if fan.len() + 1 != kk || kk < 3 {
        return Err(SubdivideError::Internal(format!(
            "fan of {} with {} counts",
            fan.len(),
            kk
        )));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(SubdivideError::Precondition(
            "pivot split needs positive counts".into(),
        ));
    }
    let m = pts.len();
    let order = AngularOrder::new(x, &fan[0], pts);
    if !order.is_strict(pts) {
        return Err(SubdivideError::Precondition(
            "two points are collinear with the pivot".into(),
        ));
    }
    let mut prefix = vec![0usize; kk + 1];
    for e in 0..kk {
        prefix[e + 1] = prefix[e] + counts[e];
    }
    // paper index i (2..K−1) is fan position i−2; chunk i+1 starts at prefix[i]
    let before_vertex = |p: &Point, v: &Point| order.before(p, v);
    let mut chosen = None;
    for i in 2..kk {
        let first_next = &pts[order.order[prefix[i]]];
        if before_vertex(first_next, &fan[i - 1]) {
            chosen = Some(i);
            break;
        }
    }
    let i = chosen.ok_or_else(|| {
        SubdivideError::Internal("no pivot triangle satisfies the chunk inequalities".into())
    })?;
    let (va, vb) = (&fan[i - 2], &fan[i - 1]);
    let m1 = pts.iter().filter(|p| before_vertex(p, va)).count();
    let m2 = pts.iter().filter(|p| before_vertex(vb, p)).count();
    let ct = prefix[i - 1]
        .checked_sub(m1)
        .ok_or_else(|| SubdivideError::Internal("negative top count".into()))?;
    let cb = (m - prefix[i])
        .checked_sub(m2)
        .ok_or_else(|| SubdivideError::Internal("negative bottom count".into()))?;
    let ci = counts[i - 1];
    let mut inside = Vec::new();
    let mut others: Vec<Point> = blockers.to_vec();
    for p in pts {
        if before_vertex(va, p) && before_vertex(p, vb) {
            inside.push(p.clone());
        } else {
            others.push(p.clone());
        }
    }
    if inside.len() != ct + ci + cb {
        return Err(SubdivideError::Internal(format!(
            "triangle holds {} points, expected {}+{}+{}",
            inside.len(),
            ct,
            ci,
            cb
        )));
    }
    let chart = if x.w.is_negative() {
        Some(Chart::separating(x, fan)?)
    } else {
        None
    };
    let job = match &chart {
        None => TriangleJob {
            apex: x.clone(),
            left: va.clone(),
            right: vb.clone(),
            points: inside,
            ct,
            ci,
            cb,
            blockers: others,
        },
        Some(t) => TriangleJob {
            apex: t
                .map_h(x)
                .ok_or_else(|| SubdivideError::Internal("pivot left the chart".into()))?
                .to_homog(),
            left: t
                .map(va)
                .ok_or_else(|| SubdivideError::Internal("fan vertex left the chart".into()))?,
            right: t
                .map(vb)
                .ok_or_else(|| SubdivideError::Internal("fan vertex left the chart".into()))?,
            points: inside
                .iter()
                .map(|p| t.map(p))
                .collect::<Option<Vec<Point>>>()
                .ok_or_else(|| SubdivideError::Internal("interior point left the chart".into()))?,
            ct,
            ci,
            cb,
            blockers: others.iter().filter_map(|p| t.map(p)).collect(),
        },
    };
    let q = splitter.split(&job)?;
    if !job.accepts(&q) {
        return Err(SubdivideError::Internal(format!(
            "{} returned a point with wrong counts",
            splitter.name()
        )));
    }
    let q = job.snapped(&q);
    let q = match &chart {
        None => q.to_homog(),
        Some(t) => t.unmap(&q),
    };
    Ok(FanSplit {
        k: i - 2,
        q,
        order,
        ct,
        ci,
        cb,
    })
}

/// Projective chart that sends a line separating an antipodal pivot from its
/// fan to infinity, so the pivot triangle becomes an ordinary triangle.
/// Maps (x, y, 1) to (x, y, n·p + k).
struct Chart {
    n: Point,
    k: Scalar,
}

impl Chart {
    fn separating(x: &HomogPoint, fan: &[Point]) -> Result<Chart, SubdivideError> {
        let xa = x
            .to_point()
            .ok_or_else(|| SubdivideError::Internal("pivot at infinity".into()))?;
        let chord = (&fan[fan.len() - 1] - &fan[0]).perp();
        let n = if chord.dot(&(&fan[0] - &xa)).is_negative() {
            -&chord
        } else {
            chord
        };
        let depth = fan
            .iter()
            .map(|f| n.dot(&(f - &xa)))
            .min()
            .expect("nonempty fan");
        if !depth.is_positive() {
            return Err(SubdivideError::Internal(
                "fan does not face the pivot".into(),
            ));
        }
        let k = -n.dot(&xa) - depth / int(2);
        Ok(Chart { n, k })
    }

    fn map(&self, p: &Point) -> Option<Point> {
        let w = self.n.dot(p) + &self.k;
        (!w.is_zero()).then(|| Point::new(&p.x / &w, &p.y / &w))
    }

    fn map_h(&self, p: &HomogPoint) -> Option<Point> {
        let w = &self.n.x * &p.x + &self.n.y * &p.y + &self.k * &p.w;
        (!w.is_zero()).then(|| Point::new(&p.x / &w, &p.y / &w))
    }

    fn unmap(&self, q: &Point) -> HomogPoint {
        let w = (Scalar::one() - self.n.dot(q)) / &self.k;
        HomogPoint {
            x: q.x.clone(),
            y: q.y.clone(),
            w,
        }
    }
}

/// Pivot split with the pivot at vertex 0; all counts must be positive.
pub fn pivot_split(
    req: &CountedSubdivisionRequest,
    splitter: &dyn TriangleSplitter,
) -> Result<PivotSplit, SubdivideError> {
    req.validate(false)?;
    let n = req.polygon.len();
    let x = req.polygon.vertex(0).to_homog();
    let fan: Vec<Point> = req.polygon.vertices[1..].to_vec();
    let blockers = vec![req.polygon.vertex(0).clone()];
    let fs = fan_split(&x, &fan, &req.counts, &req.interior, &blockers, splitter)?;
    debug_assert!(fs.k + 2 < n + 1);
    let q =
        fs.q.to_point()
            .ok_or_else(|| SubdivideError::Internal("split point at infinity".into()))?;
    Ok(PivotSplit {
        edge: fs.k + 1,
        q,
        order: fs.order,
        ct: fs.ct,
        ci: fs.ci,
        cb: fs.cb,
    })
}

#[derive(Clone, Debug)]
struct Piece {
    verts: Vec<Point>,
    labels: Vec<Option<usize>>,
}

impl Piece {
    fn polygon(&self) -> Result<ConvexPolygon, SubdivideError> {
        ConvexPolygon::new(self.verts.clone())
            .map_err(|e| SubdivideError::Internal(format!("bad piece: {e}")))
    }

    fn rotated(&self, r: usize) -> Piece {
        let n = self.verts.len();
        Piece {
            verts: (0..n).map(|j| self.verts[(j + r) % n].clone()).collect(),
            labels: (0..n).map(|j| self.labels[(j + r) % n]).collect(),
        }
    }

    /// Keeps the closed side where `line.eval >= 0`; new edges are unlabeled.
    fn clip(&self, line: &Line) -> Option<Piece> {
        let n = self.verts.len();
        let vals: Vec<Scalar> = self.verts.iter().map(|p| line.eval(p)).collect();
        let mut verts = Vec::with_capacity(n + 2);
        let mut labels = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (&vals[i], &vals[j]);
            let crossing =
                (a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive());
            let cut = if crossing {
                let t = a / (a - b);
                Some(self.verts[i].lerp(&self.verts[j], &t))
            } else {
                None
            };
            if !a.is_negative() {
                verts.push(self.verts[i].clone());
                // leaving through the cut starts an unlabeled edge
                labels.push(if b.is_negative() && !a.is_zero() {
                    self.labels[i]
                } else if b.is_negative() {
                    None
                } else {
                    self.labels[i]
                });
                if let Some(c) = cut {
                    verts.push(c);
                    labels.push(None);
                }
            } else if let Some(c) = cut {
                verts.push(c);
                labels.push(self.labels[i]);
            }
        }
        // a vertex on the line followed by an outside vertex opens a cut edge
        let m = verts.len();
        for k in 0..m {
            let next = &verts[(k + 1) % m];
            if line.eval(&verts[k]).is_zero() && line.eval(next).is_zero() && labels[k].is_some() {
                // edge lies on the clip line: keep its label only if it was
                // an original edge of this piece
                let orig = self.verts.iter().position(|v| v == &verts[k]);
                let orig_next = self.verts.iter().position(|v| v == next);
                let kept = matches!((orig, orig_next), (Some(a), Some(b)) if (a + 1) % n == b);
                if !kept {
                    labels[k] = None;
                }
            }
        }
        let piece = Piece { verts, labels }.simplified();
        if piece.verts.len() < 3 || !crate::exactgeom::polygon_area2(&piece.verts).is_positive() {
            return None;
        }
        Some(piece)
    }

    fn simplified(mut self) -> Piece {
        loop {
            let n = self.verts.len();
            if n < 3 {
                return self;
            }
            let mut changed = false;
            for k in 0..n {
                let nk = (k + 1) % n;
                if self.verts[k] == self.verts[nk] {
                    self.verts.remove(k);
                    self.labels.remove(k);
                    changed = true;
                    break;
                }
                let pk = (k + n - 1) % n;
                if orient(&self.verts[pk], &self.verts[k], &self.verts[nk]).is_zero() {
                    let merged = self.labels[pk].or(self.labels[k]);
                    self.labels[pk] = merged;
                    self.verts.remove(k);
                    self.labels.remove(k);
                    changed = true;
                    break;
                }
            }
            if !changed {
                return self;
            }
        }
    }
}

struct Recursion<'a> {
    pts: &'a [Point],
    counts: &'a [usize],
    splitter: &'a dyn TriangleSplitter,
    outer: &'a [Point],
    regions: Vec<Option<ConvexPolygon>>,
    members: Vec<Vec<usize>>,
}

/// Orients `line` so that `p` is on its positive side.
fn facing(line: Line, p: &Point) -> Result<Line, SubdivideError> {
    match line.side(p) {
        Sign::Positive => Ok(line),
        Sign::Negative => Ok(line.negated()),
        Sign::Zero => Err(SubdivideError::Internal(format!(
            "reference point {p} lies on a cut"
        ))),
    }
}

impl<'a> Recursion<'a> {
    fn count(&self, label: Option<usize>) -> usize {
        label.map_or(0, |l| self.counts[l])
    }

    fn record(
        &mut self,
        label: usize,
        poly: ConvexPolygon,
        inside: Vec<usize>,
    ) -> Result<(), SubdivideError> {
        if self.regions[label].is_some() {
            return Err(SubdivideError::Internal(format!(
                "edge {label} assigned twice"
            )));
        }
        if inside.len() != self.counts[label] {
            return Err(SubdivideError::Internal(format!(
                "region {label} holds {} points, expected {}",
                inside.len(),
                self.counts[label]
            )));
        }
        self.regions[label] = Some(poly);
        let mut inside = inside;
        inside.sort_unstable();
        self.members[label] = inside;
        Ok(())
    }

    fn partition(&self, piece: &Piece, inside: &[usize]) -> Result<Vec<usize>, SubdivideError> {
        let poly = piece.polygon()?;
        let mut out = Vec::new();
        for &k in inside {
            match poly.contains(&self.pts[k]) {
                Location::Inside => out.push(k),
                Location::Boundary => {
                    return Err(SubdivideError::Internal(format!(
                        "point {} lies on a region boundary",
                        self.pts[k]
                    )))
                }
                Location::Outside => {}
            }
        }
        Ok(out)
    }

    fn run(&mut self, piece: Piece, inside: Vec<usize>) -> Result<(), SubdivideError> {
        let n = piece.verts.len();
        let nz: Vec<bool> = piece.labels.iter().map(|&l| self.count(l) > 0).collect();
        let kk = nz.iter().filter(|&&b| b).count();
        let total: usize = piece.labels.iter().map(|&l| self.count(l)).sum();
        if total != inside.len() {
            return Err(SubdivideError::Internal(format!(
                "piece holds {} points, counts say {}",
                inside.len(),
                total
            )));
        }
        if kk == 0 {
            return Ok(());
        }
        let start = if kk == n {
            0
        } else {
            let starts: Vec<usize> = (0..n).filter(|&k| nz[k] && !nz[(k + n - 1) % n]).collect();
            if starts.len() != 1 {
                return Err(SubdivideError::Internal(
                    "nonzero edges are not consecutive".into(),
                ));
            }
            starts[0]
        };
        let piece = piece.rotated((start + kk) % n);
        let v = &piece.verts;
        if kk == 1 {
            let label = piece.labels[n - 1].expect("nonzero edge carries a label");
            let poly = piece.polygon()?;
            return self.record(label, poly, inside);
        }
        if kk == 2 {
            return self.two_edges(&piece, inside);
        }
        let i = n - kk;
        let x = if i == 0 {
            v[0].to_homog()
        } else {
            let l1 = Line::through(&v[0], &v[n - 1]);
            let l2 = Line::through(&v[i], &v[i + 1]);
            let mut x = l1.meet(&l2);
            if x.x.is_zero() && x.y.is_zero() && x.w.is_zero() {
                return Err(SubdivideError::Internal("boundary lines coincide".into()));
            }
            // the pivot must lie beyond V_{i+1} as seen from V_{i+2}
            let xy = Point::new(x.x.clone(), x.y.clone());
            let rel = &xy - &v[i + 1].scale(&x.w);
            if rel.dot(&(&v[i] - &v[i + 1])).is_negative() {
                x = x.negated();
            }
            match x.to_point() {
                Some(p) if x.w.is_positive() => p.to_homog(),
                _ => x,
            }
        };
        let fan: Vec<Point> = v[i + 1..].to_vec();
        let counts: Vec<usize> = (i..n).map(|e| self.count(piece.labels[e])).collect();
        if orient_h(&x, &fan[0], &fan[fan.len() - 1]) != Sign::Positive {
            return Err(SubdivideError::Internal(
                "pivot polygon is not counterclockwise".into(),
            ));
        }
        let pts: Vec<Point> = inside.iter().map(|&k| self.pts[k].clone()).collect();
        let blockers: Vec<Point> = self.outer.to_vec();
        let fs = fan_split(&x, &fan, &counts, &pts, &blockers, self.splitter)?;
        let a = &fan[fs.k];
        let b = &fan[fs.k + 1];
        let q = &fs.q;
        let mid_label = piece.labels[i + fs.k + 1].expect("middle edge carries a label");
        let lxq = Line::join(&x, q);
        let la = Line::join(&a.to_homog(), q);
        let lb = Line::join(q, &b.to_homog());
        let alpha_cut = [facing(lxq.clone(), a)?, facing(la.clone(), b)?.negated()];
        let beta_cut = [facing(la, b)?, facing(lb.clone(), a)?];
        let gamma_cut = [facing(lxq, b)?, facing(lb, a)?.negated()];
        let clip2 = |cuts: &[Line; 2]| piece.clip(&cuts[0]).and_then(|p| p.clip(&cuts[1]));
        let beta = clip2(&beta_cut)
            .ok_or_else(|| SubdivideError::Internal("empty middle region".into()))?;
        let alpha = clip2(&alpha_cut);
        let gamma = clip2(&gamma_cut);
        let in_beta = self.partition(&beta, &inside)?;
        let in_alpha = match &alpha {
            Some(p) => self.partition(p, &inside)?,
            None => Vec::new(),
        };
        let in_gamma = match &gamma {
            Some(p) => self.partition(p, &inside)?,
            None => Vec::new(),
        };
        if in_alpha.len() + in_beta.len() + in_gamma.len() != inside.len() {
            return Err(SubdivideError::Internal(
                "points lost while splitting a piece".into(),
            ));
        }
        self.record(mid_label, beta.polygon()?, in_beta)?;
        if let Some(p) = alpha {
            self.run(p, in_alpha)?;
        } else if !in_alpha.is_empty() {
            return Err(SubdivideError::Internal("points in an empty region".into()));
        }
        if let Some(p) = gamma {
            self.run(p, in_gamma)?;
        } else if !in_gamma.is_empty() {
            return Err(SubdivideError::Internal("points in an empty region".into()));
        }
        Ok(())
    }

    /// Two consecutive nonzero edges meeting at the last vertex: a ray from
    /// that vertex separates the points by angle.
    fn two_edges(&mut self, piece: &Piece, inside: Vec<usize>) -> Result<(), SubdivideError> {
        let n = piece.verts.len();
        let v = &piece.verts;
        let corner = &v[n - 1];
        let label_first = piece.labels[n - 2].expect("labeled");
        let label_last = piece.labels[n - 1].expect("labeled");
        let c_last = self.counts[label_last];
        let mut sorted = inside.clone();
        let pivot = corner.to_homog();
        sorted.sort_by(|&a, &b| angular_cmp(&pivot, &self.pts[a], &self.pts[b]));
        let pa = &self.pts[sorted[c_last - 1]];
        let pb = &self.pts[sorted[c_last]];
        if orient(corner, pa, pb) != Sign::Positive {
            return Err(SubdivideError::Internal(
                "points collinear with a corner".into(),
            ));
        }
        let u = &(pa - corner) + &(pb - corner);
        let ray_end = corner + &u;
        let line = Line::through(corner, &ray_end);
        let to_last = facing(line.clone(), &v[0])?;
        let to_first = facing(line, &v[n - 2])?;
        let r_last = piece
            .clip(&to_last)
            .ok_or_else(|| SubdivideError::Internal("empty region".into()))?;
        let r_first = piece
            .clip(&to_first)
            .ok_or_else(|| SubdivideError::Internal("empty region".into()))?;
        let in_last = self.partition(&r_last, &inside)?;
        let in_first = self.partition(&r_first, &inside)?;
        if in_last.len() + in_first.len() != inside.len() {
            return Err(SubdivideError::Internal(
                "points lost at a corner ray".into(),
            ));
        }
        self.record(label_last, r_last.polygon()?, in_last)?;
        self.record(label_first, r_first.polygon()?, in_first)
    }
}

fn subdivide_positive(
    polygon: &ConvexPolygon,
    pts: &[Point],
    counts: &[usize],
    splitter: &dyn TriangleSplitter,
) -> Result<RegionAssignment, SubdivideError> {
    let n = polygon.len();
    let mut rec = Recursion {
        pts,
        counts,
        splitter,
        outer: &polygon.vertices,
        regions: vec![None; n],
        members: vec![Vec::new(); n],
    };
    let piece = Piece {
        verts: polygon.vertices.clone(),
        labels: (0..n).map(Some).collect(),
    };
    rec.run(piece, (0..pts.len()).collect())?;
    Ok(RegionAssignment {
        regions: rec.regions,
        members: rec.members,
    })
}

/// Virtual point just inside the midpoint of edge `j`, at depth 2^-k of the
/// edge length, nudged along the edge so symmetric inputs stay generic.
pub fn virtual_point(polygon: &ConvexPolygon, j: usize, k: u32) -> Point {
    let (a, b) = polygon.edge(j);
    let e = b - a;
    let inward = e.perp();
    let depth = Scalar::new(BigInt::one(), BigInt::one() << k);
    let nudge = Scalar::new(
        BigInt::from(j as i64 + 1),
        BigInt::from(polygon.len() as i64 + 3) << (k + 3),
    );
    &(&a.midpoint(b) + &inward.scale(&depth)) + &e.scale(&nudge)
}

fn clear_of(points: &[Point], q: &Point) -> bool {
    for i in 0..points.len() {
        if &points[i] == q {
            return false;
        }
        for j in i + 1..points.len() {
            if orient(&points[i], &points[j], q).is_zero() {
                return false;
            }
        }
    }
    true
}

pub fn convex_subdivision(
    req: &CountedSubdivisionRequest,
) -> Result<RegionAssignment, SubdivideError> {
    convex_subdivision_with(req, &SubdivisionOptions::default())
}

pub fn convex_subdivision_with(
    req: &CountedSubdivisionRequest,
    opts: &SubdivisionOptions,
) -> Result<RegionAssignment, SubdivideError> {
    req.validate(opts.check_general_plus)?;
    let n = req.polygon.len();
    let zeros: Vec<usize> = (0..n).filter(|&j| req.counts[j] == 0).collect();
    if zeros.is_empty() {
        return subdivide_positive(
            &req.polygon,
            &req.interior,
            &req.counts,
            opts.splitter.as_ref(),
        );
    }
    let m = req.interior.len();
    let mut counts = req.counts.clone();
    for &j in &zeros {
        counts[j] = 1;
    }
    let mut last_err = None;
    for k in 3..48u32 {
        let mut pts = req.interior.clone();
        let mut all = req.polygon.vertices.clone();
        all.extend(req.interior.iter().cloned());
        let mut ok = true;
        for &j in &zeros {
            let vp = virtual_point(&req.polygon, j, k);
            if req.polygon.contains(&vp) != Location::Inside || !clear_of(&all, &vp) {
                ok = false;
                break;
            }
            all.push(vp.clone());
            pts.push(vp);
        }
        if !ok {
            continue;
        }
        match subdivide_positive(&req.polygon, &pts, &counts, opts.splitter.as_ref()) {
            Ok(mut ra) => {
                let own = zeros
                    .iter()
                    .enumerate()
                    .all(|(t, &j)| ra.members[j] == vec![m + t]);
                if !own {
                    last_err = Some(SubdivideError::Internal(format!(
                        "virtual points at depth {k} not isolated"
                    )));
                    continue;
                }
                for &j in &zeros {
                    ra.members[j].clear();
                }
                return Ok(ra);
            }
            Err(e @ SubdivideError::Precondition(_)) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err
        .unwrap_or_else(|| SubdivideError::Internal("virtual point placement failed".into())))
}

/// Full postcondition check of a counted subdivision.
pub fn check_region_assignment(
    req: &CountedSubdivisionRequest,
    ra: &RegionAssignment,
) -> Result<(), String> {
    let n = req.polygon.len();
    if ra.regions.len() != n || ra.members.len() != n {
        return Err(format!("expected {n} regions"));
    }
    let mut area = Scalar::zero();
    for i in 0..n {
        let Some(r) = &ra.regions[i] else {
            if req.counts[i] > 0 {
                return Err(format!("region {i} missing"));
            }
            continue;
        };
        let checked =
            ConvexPolygon::new(r.vertices.clone()).map_err(|e| format!("region {i}: {e}"))?;
        area += checked.area2();
        let (a, b) = req.polygon.edge(i);
        let mid = a.midpoint(b);
        if [a, b, &mid]
            .iter()
            .any(|p| r.contains(p) != Location::Boundary)
        {
            return Err(format!("region {i} does not contain edge {i}"));
        }
        let mut inside = Vec::new();
        for (k, p) in req.interior.iter().enumerate() {
            match r.contains(p) {
                Location::Inside => inside.push(k),
                Location::Boundary => return Err(format!("point {k} on boundary of region {i}")),
                Location::Outside => {}
            }
        }
        if inside != ra.members[i] || inside.len() != req.counts[i] {
            return Err(format!(
                "region {i} holds {:?}, expected {} points",
                inside, req.counts[i]
            ));
        }
        for j in i + 1..n {
            if let Some(s) = &ra.regions[j] {
                if convex_interiors_overlap(&r.vertices, &s.vertices) {
                    return Err(format!("regions {i} and {j} overlap"));
                }
            }
        }
    }
    let full = req.counts.iter().all(|&c| c > 0) || ra.regions.iter().all(|r| r.is_some());
    if full && area != req.polygon.area2() {
        return Err("regions do not cover the polygon".into());
    }
    Ok(())
}

/// Canonical clipping of a convex polygon by a list of half-planes.
pub fn clip_all(poly: &[Point], cuts: &[Line]) -> Vec<Point> {
    let mut cur = poly.to_vec();
    for c in cuts {
        if cur.len() < 3 {
            break;
        }
        cur = clip_convex(&cur, c);
    }
    simplify_ring(cur)
}

#[doc(hidden)]
pub fn _ratio_for_tests(n: i64, d: i64) -> Scalar {
    ratio(n, d)
}
