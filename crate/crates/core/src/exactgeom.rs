//! Exact rational kernel: orientation predicates, lines, segments, hulls and
//! convex polygon clipping. Nothing in here touches floating point except the
//! explicit `to_f64` helpers used for rendering.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("the two lines are identical")]
    IdenticalLines,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
}

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest rational with the given denominator.
pub fn rational_from_f64(v: f64, den: i64) -> Scalar {
    let n = (v * den as f64).round() as i64;
    ratio(n, den)
}

pub fn scalar_to_f64(v: &Scalar) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: &Scalar) -> Sign {
        if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn of_int<T: Zero + PartialOrd>(v: &T) -> Sign {
        let z = T::zero();
        if *v > z {
            Sign::Positive
        } else if *v < z {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * rhs.as_i8())
    }
}

/// A point, also used as a plain 2D vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Point {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Point {
        Point::new(int(x), int(y))
    }

    pub fn zero() -> Point {
        Point::new(Scalar::zero(), Scalar::zero())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (scalar_to_f64(&self.x), scalar_to_f64(&self.y))
    }

    pub fn scale(&self, s: &Scalar) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, o: &Point) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(&self, o: &Point) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    /// Counterclockwise quarter turn.
    pub fn perp(&self) -> Point {
        Point::new(-&self.y, self.x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn l1_norm(&self) -> Scalar {
        self.x.abs() + self.y.abs()
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        let half = ratio(1, 2);
        Point::new((&self.x + &o.x) * &half, (&self.y + &o.y) * &half)
    }

    pub fn lerp(&self, o: &Point, t: &Scalar) -> Point {
        self + &(o - self).scale(t)
    }

    pub fn to_homog(&self) -> HomogPoint {
        HomogPoint::from_point(self)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl<'a> Add<&'a Point> for &'a Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a Point> for &'a Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-&self.x, -&self.y)
    }
}

/// Twice the signed area of (a, b, c).
pub fn cross3(a: &Point, b: &Point, c: &Point) -> Scalar {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

pub fn orient(a: &Point, b: &Point, c: &Point) -> Sign {
    orient_xy(&a.x, &a.y, b, c)
}

fn orient_xy(ax: &Scalar, ay: &Scalar, b: &Point, c: &Point) -> Sign {
    if let Some(s) = orient_small(ax, ay, b, c).or_else(|| orient_small_ratio(ax, ay, b, c)) {
        return s;
    }
    // denominators are positive, so the sign survives clearing them
    let diff = |p: &Scalar, q: &Scalar| {
        (
            p.numer() * q.denom() - q.numer() * p.denom(),
            p.denom() * q.denom(),
        )
    };
    let (xn1, xd1) = diff(&b.x, ax);
    let (yn2, yd2) = diff(&c.y, ay);
    let (yn1, yd1) = diff(&b.y, ay);
    let (xn2, xd2) = diff(&c.x, ax);
    let lhs = xn1 * yn2 * (&yd1 * &xd2);
    let rhs = yn1 * xn2 * (&xd1 * &yd2);
    Sign::of_int(&(lhs - rhs))
}

const SMALL: i64 = 1 << 62;

fn small_int(v: &Scalar) -> Option<i128> {
    if !v.denom().is_one() {
        return None;
    }
    v.numer()
        .to_i64()
        .filter(|x| x.abs() < SMALL)
        .map(i128::from)
}

fn orient_small(ax: &Scalar, ay: &Scalar, b: &Point, c: &Point) -> Option<Sign> {
    let (ax, ay) = (small_int(ax)?, small_int(ay)?);
    let (bx, by) = (small_int(&b.x)?, small_int(&b.y)?);
    let (cx, cy) = (small_int(&c.x)?, small_int(&c.y)?);
    let v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    Some(Sign::of_int(&v))
}

fn small_ratio(v: &Scalar) -> Option<(i128, i128)> {
    Some((
        i128::from(v.numer().to_i64()?),
        i128::from(v.denom().to_i64()?),
    ))
}

fn orient_small_ratio(ax: &Scalar, ay: &Scalar, b: &Point, c: &Point) -> Option<Sign> {
    let diff = |p: &Scalar, q: &Scalar| -> Option<(i128, i128)> {
        let ((pn, pd), (qn, qd)) = (small_ratio(p)?, small_ratio(q)?);
        Some((
            pn.checked_mul(qd)?.checked_sub(qn.checked_mul(pd)?)?,
            pd.checked_mul(qd)?,
        ))
    };
    let (xn1, xd1) = diff(&b.x, ax)?;
    let (yn2, yd2) = diff(&c.y, ay)?;
    let (yn1, yd1) = diff(&b.y, ay)?;
    let (xn2, xd2) = diff(&c.x, ax)?;
    let lhs = xn1.checked_mul(yn2)?.checked_mul(yd1.checked_mul(xd2)?)?;
    let rhs = yn1.checked_mul(xn2)?.checked_mul(xd1.checked_mul(yd2)?)?;
    Some(Sign::of_int(&lhs.checked_sub(rhs)?))
}

/// Orientation over any coordinate type; lets the swap-graph scan run on
/// machine integers.
pub trait Orientation: Clone + Send + Sync {
    fn orient(a: &Self, b: &Self, c: &Self) -> Sign;
}

impl Orientation for Point {
    fn orient(a: &Self, b: &Self, c: &Self) -> Sign {
        orient(a, b, c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoint {
    pub x: i64,
    pub y: i64,
}

impl IntPoint {
    pub fn new(x: i64, y: i64) -> IntPoint {
        IntPoint { x, y }
    }

    pub fn to_point(self) -> Point {
        Point::from_ints(self.x, self.y)
    }
}

impl Orientation for IntPoint {
    fn orient(a: &Self, b: &Self, c: &Self) -> Sign {
        let v = (b.x as i128 - a.x as i128) * (c.y as i128 - a.y as i128)
            - (b.y as i128 - a.y as i128) * (c.x as i128 - a.x as i128);
        Sign::of_int(&v)
    }
}

/// Projective point; `w = 0` is a direction. Representatives with `w < 0`
/// stand for the antipode in the oriented projective plane, which keeps
/// orientation tests consistent when a pivot sits "behind" a polygon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogPoint {
    pub x: Scalar,
    pub y: Scalar,
    pub w: Scalar,
}

impl HomogPoint {
    pub fn new(x: Scalar, y: Scalar, w: Scalar) -> Result<HomogPoint, GeomError> {
        if x.is_zero() && y.is_zero() && w.is_zero() {
            return Err(GeomError::Degenerate("homogeneous point (0,0,0)".into()));
        }
        Ok(HomogPoint { x, y, w })
    }

    pub fn from_point(p: &Point) -> HomogPoint {
        HomogPoint {
            x: p.x.clone(),
            y: p.y.clone(),
            w: Scalar::one(),
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.w.is_zero()
    }

    pub fn to_point(&self) -> Option<Point> {
        if self.w.is_zero() {
            None
        } else {
            Some(Point::new(&self.x / &self.w, &self.y / &self.w))
        }
    }

    pub fn negated(&self) -> HomogPoint {
        HomogPoint {
            x: -&self.x,
            y: -&self.y,
            w: -&self.w,
        }
    }

    /// Scaled so that the first nonzero of (w, x, y) is 1; equal points in the
    /// unoriented projective plane map to equal values.
    pub fn canonical(&self) -> HomogPoint {
        let d = if !self.w.is_zero() {
            self.w.clone()
        } else if !self.x.is_zero() {
            self.x.clone()
        } else {
            self.y.clone()
        };
        HomogPoint {
            x: &self.x / &d,
            y: &self.y / &d,
            w: &self.w / &d,
        }
    }
}

/// det[[a.x,a.y,a.w],[b.x,b.y,b.w],[c.x,c.y,c.w]]
pub fn det3_h(a: &HomogPoint, b: &HomogPoint, c: &HomogPoint) -> Scalar {
    &a.x * (&b.y * &c.w - &b.w * &c.y) - &a.y * (&b.x * &c.w - &b.w * &c.x)
        + &a.w * (&b.x * &c.y - &b.y * &c.x)
}

/// Orientation of (x, a, b) with a possibly infinite or antipodal `x`.
pub fn orient_h(x: &HomogPoint, a: &Point, b: &Point) -> Sign {
    if x.w.is_one() {
        return orient_xy(&x.x, &x.y, a, b);
    }
    // det with rows (x), (a,1), (b,1)
    let v = &x.x * (&a.y - &b.y) - &x.y * (&a.x - &b.x) + &x.w * (&a.x * &b.y - &a.y * &b.x);
    Sign::of(&v)
}

/// Line `a*x + b*y + c = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl Line {
    /// Positive side is to the left of p→q.
    pub fn through(p: &Point, q: &Point) -> Line {
        Line {
            a: &p.y - &q.y,
            b: &q.x - &p.x,
            c: &p.x * &q.y - &p.y * &q.x,
        }
    }

    /// Line through a homogeneous point and an affine point; positive side
    /// agrees with `orient_h(x, p, ·)`.
    pub fn through_h(x: &HomogPoint, p: &Point) -> Line {
        Line {
            a: &x.y - &x.w * &p.y,
            b: &x.w * &p.x - &x.x,
            c: &x.x * &p.y - &x.y * &p.x,
        }
    }

    /// Line through two projective points.
    pub fn join(p: &HomogPoint, q: &HomogPoint) -> Line {
        Line {
            a: &p.y * &q.w - &p.w * &q.y,
            b: &p.w * &q.x - &p.x * &q.w,
            c: &p.x * &q.y - &p.y * &q.x,
        }
    }

    pub fn eval(&self, p: &Point) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn eval_h(&self, p: &HomogPoint) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c * &p.w
    }

    pub fn side(&self, p: &Point) -> Sign {
        Sign::of(&self.eval(p))
    }

    pub fn negated(&self) -> Line {
        Line {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Change of `eval` per unit step along `dir`.
    pub fn rate(&self, dir: &Point) -> Scalar {
        &self.a * &dir.x + &self.b * &dir.y
    }

    pub fn direction(&self) -> Point {
        Point::new(-&self.b, self.a.clone())
    }

    pub fn meet(&self, o: &Line) -> HomogPoint {
        HomogPoint {
            x: &self.b * &o.c - &self.c * &o.b,
            y: &self.c * &o.a - &self.a * &o.c,
            w: &self.a * &o.b - &self.b * &o.a,
        }
    }

    /// Primitive integer coefficients, first nonzero of (a, b) positive.
    pub fn canonical(&self) -> (BigInt, BigInt, BigInt) {
        let l = self.a.denom().lcm(self.b.denom()).lcm(self.c.denom());
        let scaled = |v: &Scalar| v.numer() * (&l / v.denom());
        let (mut a, mut b, mut c) = (scaled(&self.a), scaled(&self.b), scaled(&self.c));
        let g = a.gcd(&b).gcd(&c);
        if !g.is_zero() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            (-a, -b, -c)
        } else {
            (a, b, c)
        }
    }

    pub fn same_as(&self, o: &Line) -> bool {
        let m = self.meet(o);
        m.x.is_zero() && m.y.is_zero() && m.w.is_zero()
    }
}

pub fn line_intersection(
    l1: (&Point, &Point),
    l2: (&Point, &Point),
) -> Result<HomogPoint, GeomError> {
    if l1.0 == l1.1 || l2.0 == l2.1 {
        return Err(GeomError::Degenerate(
            "line through a repeated point".into(),
        ));
    }
    let a = Line::through(l1.0, l1.1);
    let b = Line::through(l2.0, l2.1);
    let m = a.meet(&b);
    if m.x.is_zero() && m.y.is_zero() && m.w.is_zero() {
        return Err(GeomError::IdenticalLines);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Segment, GeomError> {
        if a == b {
            return Err(GeomError::Degenerate("segment endpoints coincide".into()));
        }
        Ok(Segment { a, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    Disjoint,
    SharedEndpoint,
    Proper,
    Overlap,
}

fn on_closed_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient(a, b, p).is_zero()
        && (&a.x).min(&b.x) <= &p.x
        && &p.x <= (&a.x).max(&b.x)
        && (&a.y).min(&b.y) <= &p.y
        && &p.y <= (&a.y).max(&b.y)
}

pub fn segments_cross(s: &Segment, t: &Segment) -> Crossing {
    let (a, b, c, d) = (&s.a, &s.b, &t.a, &t.b);
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != Sign::Zero && o2 != Sign::Zero && o3 != Sign::Zero && o4 != Sign::Zero {
        return if o1 != o2 && o3 != o4 {
            Crossing::Proper
        } else {
            Crossing::Disjoint
        };
    }
    let shared = [(a, c), (a, d), (b, c), (b, d)]
        .iter()
        .filter(|(p, q)| p == q)
        .count();
    // any endpoint lying on the other segment other than a shared endpoint
    let touches = |p: &Point, u: &Point, v: &Point| p != u && p != v && on_closed_segment(u, v, p);
    let interior_touch =
        touches(a, c, d) || touches(b, c, d) || touches(c, a, b) || touches(d, a, b);
    if interior_touch || shared == 2 {
        return Crossing::Overlap;
    }
    if shared == 1 {
        return Crossing::SharedEndpoint;
    }
    Crossing::Disjoint
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

impl Ray {
    pub fn new(origin: Point, direction: Point) -> Result<Ray, GeomError> {
        if direction.is_zero() {
            return Err(GeomError::Degenerate("ray direction is zero".into()));
        }
        Ok(Ray { origin, direction })
    }

    pub fn at(&self, t: &Scalar) -> Point {
        &self.origin + &self.direction.scale(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Convex polygon, counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPolygon {
    pub vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Accepts flat angles (orientation 0) but requires positive area.
    pub fn new(vertices: Vec<Point>) -> Result<ConvexPolygon, GeomError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeomError::InvalidPolygon(format!("{n} vertices")));
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(GeomError::InvalidPolygon("repeated vertex".into()));
            }
            if orient(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n])
                == Sign::Negative
            {
                return Err(GeomError::InvalidPolygon(
                    "reflex or clockwise corner".into(),
                ));
            }
        }
        let poly = ConvexPolygon { vertices };
        if !poly.area2().is_positive() {
            return Err(GeomError::InvalidPolygon("non-positive area".into()));
        }
        // a positive-area polygon with no right turns could still wind twice
        let mut turns = 0usize;
        let v = &poly.vertices;
        for i in 0..n {
            let e = &v[(i + 1) % n] - &v[i];
            let f = &v[(i + 2) % n] - &v[(i + 1) % n];
            if e.y.is_negative() || (e.y.is_zero() && e.x.is_negative()) {
                if !(f.y.is_negative() || (f.y.is_zero() && f.x.is_negative())) {
                    turns += 1;
                }
            }
        }
        if turns > 1 {
            return Err(GeomError::InvalidPolygon(
                "polygon winds more than once".into(),
            ));
        }
        Ok(poly)
    }

    pub fn new_strict(vertices: Vec<Point>) -> Result<ConvexPolygon, GeomError> {
        let p = ConvexPolygon::new(vertices)?;
        if !p.is_strictly_convex() {
            return Err(GeomError::InvalidPolygon("flat angle".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i % self.vertices.len()]
    }

    pub fn edge(&self, i: usize) -> (&Point, &Point) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn is_strictly_convex(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            orient(self.vertex(i), self.vertex(i + 1), self.vertex(i + 2)) == Sign::Positive
        })
    }

    /// Twice the signed area.
    pub fn area2(&self) -> Scalar {
        polygon_area2(&self.vertices)
    }

    pub fn contains(&self, p: &Point) -> Location {
        point_in_convex_polygon(p, self)
    }

    /// Strictly-interior witness point (vertex centroid).
    pub fn centroid(&self) -> Point {
        let n = int(self.len() as i64);
        let mut s = Point::zero();
        for v in &self.vertices {
            s = &s + v;
        }
        Point::new(&s.x / &n, &s.y / &n)
    }

    /// Keeps the part where `line.eval >= 0`; `None` if nothing of positive
    /// area remains.
    pub fn clip(&self, line: &Line) -> Option<ConvexPolygon> {
        let out = clip_convex(&self.vertices, line);
        ConvexPolygon::new(out).ok()
    }

    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.vertices.iter().map(|p| p.to_f64()).collect()
    }
}

pub fn polygon_area2(v: &[Point]) -> Scalar {
    let n = v.len();
    let mut s = Scalar::zero();
    for i in 0..n {
        s += v[i].cross(&v[(i + 1) % n]);
    }
    s
}

pub fn point_in_convex_polygon(p: &Point, poly: &ConvexPolygon) -> Location {
    let n = poly.len();
    let mut on_edge = false;
    for i in 0..n {
        match orient(poly.vertex(i), poly.vertex(i + 1), p) {
            Sign::Negative => return Location::Outside,
            Sign::Zero => on_edge = true,
            Sign::Positive => {}
        }
    }
    if on_edge {
        Location::Boundary
    } else {
        Location::Inside
    }
}

/// Sutherland–Hodgman against one closed half-plane, then drops repeated and
/// collinear vertices.
pub fn clip_convex(vertices: &[Point], line: &Line) -> Vec<Point> {
    let n = vertices.len();
    let vals: Vec<Scalar> = vertices.iter().map(|p| line.eval(p)).collect();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (vi, vj) = (&vals[i], &vals[j]);
        if !vi.is_negative() {
            out.push(vertices[i].clone());
        }
        if (vi.is_positive() && vj.is_negative()) || (vi.is_negative() && vj.is_positive()) {
            let t = vi / (vi - vj);
            out.push(vertices[i].lerp(&vertices[j], &t));
        }
    }
    simplify_ring(out)
}

pub fn simplify_ring(mut v: Vec<Point>) -> Vec<Point> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let mut removed = false;
        for i in 0..n {
            let a = &v[(i + n - 1) % n];
            let b = &v[i];
            let c = &v[(i + 1) % n];
            if a == b || orient(a, b, c).is_zero() {
                v.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return v;
        }
    }
}

/// Counterclockwise hull indices via monotone chain. Collinear boundary points
/// are rejected.
pub fn convex_hull(points: &[Point]) -> Result<Vec<usize>, GeomError> {
    let n = points.len();
    if n < 3 {
        return Err(GeomError::Degenerate(format!("{n} points")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| points[a].cmp(&points[b]));
    for w in idx.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(GeomError::Degenerate("duplicate point".into()));
        }
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && orient(
                &points[lower[lower.len() - 2]],
                &points[lower[lower.len() - 1]],
                &points[i],
            ) != Sign::Positive
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && orient(
                &points[upper[upper.len() - 2]],
                &points[upper[upper.len() - 1]],
                &points[i],
            ) != Sign::Positive
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(GeomError::Degenerate("all points collinear".into()));
    }
    let h = lower.len();
    for (k, p) in points.iter().enumerate() {
        if lower.contains(&k) {
            continue;
        }
        for e in 0..h {
            if orient(&points[lower[e]], &points[lower[(e + 1) % h]], p).is_zero() {
                return Err(GeomError::Degenerate("point on a hull edge".into()));
            }
        }
    }
    Ok(lower)
}

pub fn is_general_position(points: &[Point]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return false;
            }
            for k in j + 1..n {
                if orient(&points[i], &points[j], &points[k]).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Integer coordinates after clearing all denominators; orientation and
/// concurrency are invariant under the uniform scaling.
pub fn to_common_integer_grid(points: &[Point]) -> Vec<(BigInt, BigInt)> {
    let mut l = BigInt::one();
    for p in points {
        l = l.lcm(p.x.denom());
        l = l.lcm(p.y.denom());
    }
    points
        .iter()
        .map(|p| {
            let x = p.x.numer() * (&l / p.x.denom());
            let y = p.y.numer() * (&l / p.y.denom());
            (x, y)
        })
        .collect()
}

type IntLine<T> = (T, T, T);

fn int_line<T: Integer + Clone>(p: &(T, T), q: &(T, T)) -> IntLine<T> {
    (
        p.1.clone() - q.1.clone(),
        q.0.clone() - p.0.clone(),
        p.0.clone() * q.1.clone() - p.1.clone() * q.0.clone(),
    )
}

fn canonical_meet<T: Integer + Signed + Clone>(l: &IntLine<T>, m: &IntLine<T>) -> IntLine<T> {
    let x = l.1.clone() * m.2.clone() - l.2.clone() * m.1.clone();
    let y = l.2.clone() * m.0.clone() - l.0.clone() * m.2.clone();
    let w = l.0.clone() * m.1.clone() - l.1.clone() * m.0.clone();
    let g = x.gcd(&y).gcd(&w);
    let (x, y, w) = if g.is_zero() {
        (x, y, w)
    } else {
        (x / g.clone(), y / g.clone(), w / g)
    };
    let lead_negative = if !w.is_zero() {
        w.is_negative()
    } else if !x.is_zero() {
        x.is_negative()
    } else {
        y.is_negative()
    };
    if lead_negative {
        (-x, -y, -w)
    } else {
        (x, y, w)
    }
}

fn no_concurrent_triple<T: Integer + Signed + Clone>(g: &[(T, T)]) -> bool {
    let n = g.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let lines: Vec<IntLine<T>> = pairs.iter().map(|&(i, j)| int_line(&g[i], &g[j])).collect();
    let disjoint =
        |a: (usize, usize), b: (usize, usize)| a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1;
    let mut meets: Vec<(IntLine<T>, usize)> = Vec::with_capacity(lines.len());
    for l1 in 0..lines.len() {
        meets.clear();
        for l2 in l1 + 1..lines.len() {
            if disjoint(pairs[l1], pairs[l2]) {
                meets.push((canonical_meet(&lines[l1], &lines[l2]), l2));
            }
        }
        meets.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        for group in meets.chunk_by(|a, b| a.0 == b.0) {
            for (k, a) in group.iter().enumerate() {
                if group[k + 1..]
                    .iter()
                    .any(|b| disjoint(pairs[a.1], pairs[b.1]))
                {
                    return false;
                }
            }
        }
    }
    true
}

/// General position plus: no three lines spanned by six distinct points are
/// concurrent. Parallel triples count as concurrent (they meet at infinity),
/// matching a zero determinant of the three line vectors.
pub fn is_general_plus_position(points: &[Point]) -> bool {
    if !is_general_position(points) {
        return false;
    }
    if points.len() < 6 {
        return true;
    }
    let g = to_common_integer_grid(points);
    // meet coordinates are cubic in the inputs: 2^30 keeps them inside i128
    let small: Option<Vec<(i128, i128)>> = g
        .iter()
        .map(|(x, y)| {
            let f = |v: &BigInt| v.to_i64().filter(|v| v.abs() < 1 << 30).map(i128::from);
            Some((f(x)?, f(y)?))
        })
        .collect();
    match small {
        Some(s) => no_concurrent_triple(&s),
        None => no_concurrent_triple(&g),
    }
}

/// Brute-force variant of [`is_general_plus_position`] built on the 3×3
/// determinant of line coefficient vectors.
pub fn is_general_plus_position_bruteforce(points: &[Point]) -> bool {
    if !is_general_position(points) {
        return false;
    }
    let n = points.len();
    let mut lines = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let l = Line::through(&points[i], &points[j]);
            lines.push((
                (i, j),
                HomogPoint {
                    x: l.a,
                    y: l.b,
                    w: l.c,
                },
            ));
        }
    }
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            for c in b + 1..lines.len() {
                let ids = [
                    lines[a].0 .0,
                    lines[a].0 .1,
                    lines[b].0 .0,
                    lines[b].0 .1,
                    lines[c].0 .0,
                    lines[c].0 .1,
                ];
                let mut s = ids.to_vec();
                s.sort_unstable();
                s.dedup();
                if s.len() < 6 {
                    continue;
                }
                if det3_h(&lines[a].1, &lines[b].1, &lines[c].1).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Closed triangles overlap in more than shared vertices.
pub fn triangles_interiors_overlap(t: [&Point; 3], u: [&Point; 3]) -> bool {
    let a: Vec<Point> = t.iter().map(|p| (*p).clone()).collect();
    let b: Vec<Point> = u.iter().map(|p| (*p).clone()).collect();
    convex_interiors_overlap(&a, &b)
}

/// Interiors of two convex polygons (either winding) intersect.
pub fn convex_interiors_overlap(a: &[Point], b: &[Point]) -> bool {
    // separating axis on the edge lines, strict separation needed
    let ccw = |v: &[Point]| -> Vec<Point> {
        let mut v = v.to_vec();
        if polygon_area2(&v).is_negative() {
            v.reverse();
        }
        v
    };
    let a = ccw(a);
    let b = ccw(b);
    let separated = |p: &[Point], q: &[Point]| {
        (0..p.len()).any(|i| {
            let (s, e) = (&p[i], &p[(i + 1) % p.len()]);
            s != e && q.iter().all(|v| orient(s, e, v) != Sign::Positive)
        })
    };
    !(separated(&a, &b) || separated(&b, &a))
}

/// Sort key helper: compares directions `u`, `v` by angle in [0, 2π) from the
/// positive x-axis.
pub fn angle_cmp(u: &Point, v: &Point) -> Ordering {
    let half = |p: &Point| -> u8 {
        if p.y.is_positive() || (p.y.is_zero() && p.x.is_positive()) {
            0
        } else {
            1
        }
    };
    half(u)
        .cmp(&half(v))
        .then_with(|| match Sign::of(&u.cross(v)) {
            Sign::Positive => Ordering::Less,
            Sign::Negative => Ordering::Greater,
            Sign::Zero => Ordering::Equal,
        })
}
