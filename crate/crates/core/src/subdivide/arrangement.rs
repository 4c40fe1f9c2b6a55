//! Triangle jobs, exact part counting, arrangement face representatives and
//! the brute-force splitter that tries every face.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::exactgeom::{angle_cmp, int, orient, orient_h, HomogPoint, Line, Point, Scalar, Sign};

use super::{SubdivideError, TriangleSplitter};

/// One three-way split request: apex X (possibly at infinity), base L–R and
/// the points strictly inside triangle (X, L, R).
#[derive(Clone, Debug)]
pub struct TriangleJob {
    pub apex: HomogPoint,
    pub left: Point,
    pub right: Point,
    pub points: Vec<Point>,
    pub ct: usize,
    pub ci: usize,
    pub cb: usize,
    /// Other points the split point must not be collinear with (pairs among
    /// `points`, `blockers` and the finite corners are checked).
    pub blockers: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Top,
    Middle,
    Bottom,
}

impl TriangleJob {
    /// Orientation of the job triangle.
    pub fn s0(&self) -> Sign {
        orient_h(&self.apex, &self.left, &self.right)
    }

    fn inside_with(&self, p: &Point, allow_boundary: bool) -> bool {
        let s0 = self.s0();
        let ok = |s: Sign| s == s0 || (allow_boundary && s.is_zero());
        ok(orient_h(&self.apex, &self.left, p))
            && ok(orient(&self.left, &self.right, p))
            && ok(orient_h(&self.apex, p, &self.right))
    }

    pub fn strictly_inside(&self, p: &Point) -> bool {
        self.inside_with(p, false)
    }

    pub fn inside_closed(&self, p: &Point) -> bool {
        self.inside_with(p, true)
    }

    /// Part of `p` for split point `q`; `None` if `p` lies on a cut.
    pub fn part_of(&self, q: &Point, p: &Point) -> Option<Part> {
        let s0 = self.s0();
        let side_xq = orient_h(&self.apex, q, p);
        let side_lq = orient(&self.left, q, p);
        let side_rq = orient(&self.right, q, p);
        if side_xq.is_zero() || side_lq.is_zero() || side_rq.is_zero() {
            // on a line through q; only a problem on the segments themselves
            let on_segment = (side_xq.is_zero() && self.height(p) > self.height(q))
                || (side_lq.is_zero() && (p - &self.left).dot(&(p - q)).is_negative())
                || (side_rq.is_zero() && (p - &self.right).dot(&(p - q)).is_negative());
            if on_segment || p == q {
                return None;
            }
        }
        // top = (X, L, Q), bottom = (X, Q, R), middle = (Q, L, R)
        if side_xq == -s0 && side_lq == s0 {
            return Some(Part::Top);
        }
        if side_xq == s0 && side_rq == -s0 {
            return Some(Part::Bottom);
        }
        if side_lq == -s0 && side_rq == s0 {
            return Some(Part::Middle);
        }
        None
    }

    /// (top, middle, bottom) counts for split point `q`, `None` if any point
    /// lies on a cut or `q` is not strictly inside.
    pub fn counts_for(&self, q: &Point) -> Option<(usize, usize, usize)> {
        if !self.strictly_inside(q) {
            return None;
        }
        let mut c = (0, 0, 0);
        for p in &self.points {
            match self.part_of(q, p)? {
                Part::Top => c.0 += 1,
                Part::Middle => c.1 += 1,
                Part::Bottom => c.2 += 1,
            }
        }
        Some(c)
    }

    pub fn target(&self) -> (usize, usize, usize) {
        (self.ct, self.ci, self.cb)
    }

    /// Affine height above the base, positive toward the apex.
    pub fn height(&self, p: &Point) -> Scalar {
        let v = crate::exactgeom::cross3(&self.left, &self.right, p);
        if self.s0() == Sign::Negative {
            -v
        } else {
            v
        }
    }

    /// Lines of the arrangement: the triangle sides plus every line joining a
    /// corner to an interior point.
    pub fn arrangement_lines(&self) -> Vec<Line> {
        let mut lines = vec![
            Line::through_h(&self.apex, &self.left),
            Line::through_h(&self.apex, &self.right),
            Line::through(&self.left, &self.right),
        ];
        for p in &self.points {
            lines.push(Line::through_h(&self.apex, p));
            lines.push(Line::through(&self.left, p));
            lines.push(Line::through(&self.right, p));
        }
        lines.retain(|l| !l.is_degenerate());
        dedup_lines(lines)
    }

    /// Q avoids every line through two points of the job (interior points,
    /// blockers and finite corners).
    pub fn clear_of_collinearity(&self, q: &Point) -> bool {
        let mut pts: Vec<&Point> = self.points.iter().chain(self.blockers.iter()).collect();
        pts.push(&self.left);
        pts.push(&self.right);
        let apex_aff = self.apex.to_point();
        if let Some(a) = apex_aff.as_ref() {
            pts.push(a);
        }
        pts.sort();
        pts.dedup();
        for i in 0..pts.len() {
            if pts[i] == q {
                return false;
            }
            for j in i + 1..pts.len() {
                if orient(pts[i], pts[j], q).is_zero() {
                    return false;
                }
            }
        }
        // lines toward a direction apex
        if !self.apex.is_finite() {
            for p in &pts {
                if orient_h(&self.apex, p, q).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn accepts(&self, q: &Point) -> bool {
        if !self.strictly_inside(q) {
            return false;
        }
        let mut c = [0usize; 3];
        let want = [self.ct, self.ci, self.cb];
        for p in &self.points {
            let k = match self.part_of(q, p) {
                Some(Part::Top) => 0,
                Some(Part::Middle) => 1,
                Some(Part::Bottom) => 2,
                None => return false,
            };
            c[k] += 1;
            if c[k] > want[k] {
                return false;
            }
        }
        self.clear_of_collinearity(q)
    }

    /// Coarsest dyadic rounding of an accepted `q` that is still accepted.
    pub fn snapped(&self, q: &Point) -> Point {
        let mut d = Scalar::one();
        for _ in 0..48 {
            let cand = Point::new((&q.x * &d).round() / &d, (&q.y * &d).round() / &d);
            if cand == *q || self.accepts(&cand) {
                return cand;
            }
            d = d * int(2);
        }
        q.clone()
    }

    pub fn validate(&self) -> Result<(), SubdivideError> {
        if self.ct + self.ci + self.cb != self.points.len() {
            return Err(SubdivideError::Precondition(format!(
                "counts {}+{}+{} do not sum to {}",
                self.ct,
                self.ci,
                self.cb,
                self.points.len()
            )));
        }
        if self.ci == 0 {
            return Err(SubdivideError::Precondition(
                "middle count must be at least 1".into(),
            ));
        }
        if self.s0().is_zero() {
            return Err(SubdivideError::Precondition("degenerate triangle".into()));
        }
        if let Some(p) = self.points.iter().find(|p| !self.strictly_inside(p)) {
            return Err(SubdivideError::Precondition(format!(
                "point {p} not strictly inside the triangle"
            )));
        }
        Ok(())
    }
}

pub fn dedup_lines(lines: Vec<Line>) -> Vec<Line> {
    let mut seen = std::collections::HashSet::with_capacity(lines.len());
    lines
        .into_iter()
        .filter(|l| seen.insert(l.canonical()))
        .collect()
}

/// One point in each open face of the arrangement touching `e`, in angular
/// order around `e`. Each lies closer to `e` than any line not through `e`.
pub fn face_representatives(e: &Point, lines: &[Line]) -> Vec<Point> {
    let vals: Vec<Scalar> = lines.iter().map(|l| l.eval(e)).collect();
    let through: Vec<&Line> = lines
        .iter()
        .zip(&vals)
        .filter(|(_, v)| v.is_zero())
        .map(|(l, _)| l)
        .collect();
    if through.is_empty() {
        return vec![e.clone()];
    }
    let mut dirs: Vec<Point> = Vec::with_capacity(2 * through.len());
    for l in &through {
        let d = l.direction();
        dirs.push(-&d);
        dirs.push(d);
    }
    dirs.sort_by(angle_cmp);
    dirs.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);
    let mut out = Vec::with_capacity(dirs.len());
    for k in 0..dirs.len() {
        let d1 = &dirs[k];
        let d2 = &dirs[(k + 1) % dirs.len()];
        let u = if d1.cross(d2).is_zero() {
            d1.perp()
        } else {
            let a = d1.scale(&(Scalar::one() / d1.l1_norm()));
            let b = d2.scale(&(Scalar::one() / d2.l1_norm()));
            &a + &b
        };
        let mut t: Option<Scalar> = None;
        for (l, v) in lines.iter().zip(&vals) {
            if v.is_zero() {
                continue;
            }
            let r = l.rate(&u);
            if r.is_zero() {
                continue;
            }
            let root = -v / &r;
            if root.is_positive() && t.as_ref().map_or(true, |cur| &root < cur) {
                t = Some(root);
            }
        }
        let t = t.map(|v| v / int(2)).unwrap_or_else(Scalar::one);
        out.push(e + &u.scale(&t));
    }
    out
}

const SHRINK_FACTORS: [i64; 5] = [1, 3, 7, 13, 29];

/// Face representatives at successively smaller distances along the same
/// wedge bisectors; used to dodge accidental collinearities.
pub fn shrunk_representatives(e: &Point, reps: &[Point], factor: i64) -> Vec<Point> {
    let f = Scalar::new(One::one(), factor.into());
    reps.iter().map(|r| e + &(r - e).scale(&f)).collect()
}

/// Searches the faces around `e` for an accepted split point.
pub fn search_around(job: &TriangleJob, e: &Point, lines: &[Line]) -> Option<Point> {
    let reps = face_representatives(e, lines);
    for factor in SHRINK_FACTORS {
        for q in shrunk_representatives(e, &reps, factor) {
            if job.accepts(&q) {
                return Some(q);
            }
        }
    }
    None
}

/// Brute force over every vertex of the arrangement inside the closed
/// triangle.
pub struct ArrangementOracle;

impl ArrangementOracle {
    pub fn vertices(job: &TriangleJob, lines: &[Line]) -> Vec<Point> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let m = lines[i].meet(&lines[j]);
                if m.w.is_zero() {
                    continue;
                }
                let p = Point::new(&m.x / &m.w, &m.y / &m.w);
                if job.inside_closed(&p) && seen.insert(p.clone()) {
                    out.push(p);
                }
            }
        }
        out
    }
}

impl TriangleSplitter for ArrangementOracle {
    fn name(&self) -> &'static str {
        "arrangement"
    }

    fn split(&self, job: &TriangleJob) -> Result<Point, SubdivideError> {
        job.validate()?;
        let lines = job.arrangement_lines();
        let verts = ArrangementOracle::vertices(job, &lines);
        let mut reps: Vec<Vec<Point>> = Vec::with_capacity(verts.len());
        for e in &verts {
            let r = face_representatives(e, &lines);
            if let Some(q) = r.iter().find(|q| job.accepts(q)) {
                return Ok(q.clone());
            }
            reps.push(r);
        }
        for factor in &SHRINK_FACTORS[1..] {
            for (e, r) in verts.iter().zip(&reps) {
                if let Some(q) = shrunk_representatives(e, r, *factor)
                    .into_iter()
                    .find(|q| job.accepts(q))
                {
                    return Ok(q);
                }
            }
        }
        Err(SubdivideError::NoSplitPoint(format!(
            "no face with counts {:?} among {} vertices",
            job.target(),
            verts.len()
        )))
    }
}
