//! SVG figures. Coordinates are flipped so y points up; the viewBox is the
//! bounding box grown by 5% on every side.

use std::fmt::Write as _;

use svg::node::element::{Circle, Group, Line as SvgLine, Polygon, Text};
use svg::Document;

use crate::compat::CompatResult;
use crate::exactgeom::{scalar_to_f64, Point};
use crate::pointsets::{GdcPointSet, PointSet};
use crate::tri::EdgeSet;

pub const MARGIN: f64 = 0.05;
pub const CYCLE_COLOR: &str = "#1f4fd8";
pub const EDGE_COLOR: &str = "#555555";
pub const HULL_POINT_COLOR: &str = "#111111";
pub const INTERIOR_POINT_COLOR: &str = "#c0392b";
pub const REGION_FILLS: [&str; 6] = [
    "#cfe3ff", "#ffe1c4", "#d5f5d0", "#f3d1f0", "#fff3b0", "#d7d7d7",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub stroke: String,
    pub fill: String,
    /// Stroke width in user units.
    pub width: f64,
    /// Point radius in user units.
    pub radius: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            stroke: EDGE_COLOR.into(),
            fill: "none".into(),
            width: 0.01,
            radius: 0.02,
        }
    }
}

impl Style {
    pub fn stroke(color: &str, width: f64) -> Style {
        Style {
            stroke: color.into(),
            width,
            ..Style::default()
        }
    }

    pub fn dot(color: &str, radius: f64) -> Style {
        Style {
            stroke: "none".into(),
            fill: color.into(),
            radius,
            ..Style::default()
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Scene {
    pub points: Vec<(Point, Style)>,
    pub segments: Vec<(Point, Point, Style)>,
    pub polygons: Vec<(Vec<Point>, Style)>,
    pub labels: Vec<(Point, String, Style)>,
}

impl Scene {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
            && self.segments.is_empty()
            && self.polygons.is_empty()
            && self.labels.is_empty()
    }

    fn coords(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let pts = self.points.iter().map(|(p, _)| p);
        let segs = self.segments.iter().flat_map(|(a, b, _)| [a, b]);
        let polys = self.polygons.iter().flat_map(|(v, _)| v.iter());
        let labels = self.labels.iter().map(|(p, _, _)| p);
        pts.chain(segs)
            .chain(polys)
            .chain(labels)
            .map(|p| (scalar_to_f64(&p.x), scalar_to_f64(&p.y)))
    }

    /// (min x, min y, max x, max y) in scene coordinates.
    pub fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        self.coords().fold(None, |acc, (x, y)| match acc {
            None => Some((x, y, x, y)),
            Some((a, b, c, d)) => Some((a.min(x), b.min(y), c.max(x), d.max(y))),
        })
    }

    /// Copy moved by (dx, dy).
    pub fn translated(
        &self,
        dx: &crate::exactgeom::Scalar,
        dy: &crate::exactgeom::Scalar,
    ) -> Scene {
        let mv = |p: &Point| Point::new(&p.x + dx, &p.y + dy);
        Scene {
            points: self
                .points
                .iter()
                .map(|(p, s)| (mv(p), s.clone()))
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|(a, b, s)| (mv(a), mv(b), s.clone()))
                .collect(),
            polygons: self
                .polygons
                .iter()
                .map(|(v, s)| (v.iter().map(mv).collect(), s.clone()))
                .collect(),
            labels: self
                .labels
                .iter()
                .map(|(p, t, s)| (mv(p), t.clone(), s.clone()))
                .collect(),
        }
    }

    pub fn extend(&mut self, other: Scene) {
        self.points.extend(other.points);
        self.segments.extend(other.segments);
        self.polygons.extend(other.polygons);
        self.labels.extend(other.labels);
    }
}

fn num(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{:.4}", v).expect("string write");
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

fn xy(p: &Point) -> (String, String) {
    (num(scalar_to_f64(&p.x)), num(-scalar_to_f64(&p.y)))
}

fn view_box(scene: &Scene) -> (f64, f64, f64, f64) {
    let (x0, y0, x1, y1) = scene.bounds().unwrap_or((0.0, 0.0, 1.0, 1.0));
    let (w, h) = ((x1 - x0).max(1e-9), (y1 - y0).max(1e-9));
    let m = MARGIN * w.max(h);
    (x0 - m, -(y1 + m), w + 2.0 * m, h + 2.0 * m)
}

/// Scale that makes the rendered width `pixels`.
pub fn fit_scale(scene: &Scene, pixels: f64) -> f64 {
    pixels / view_box(scene).2
}

/// Renders `scene`; `scale` sets the pixel width per user unit.
pub fn render_svg(scene: &Scene, scale: f64) -> String {
    let (vx, vy, vw, vh) = view_box(scene);
    let mut doc = Document::new()
        .set(
            "viewBox",
            format!("{} {} {} {}", num(vx), num(vy), num(vw), num(vh)),
        )
        .set("width", num(vw * scale))
        .set("height", num(vh * scale));

    let mut polys = Group::new().set("id", "polygons");
    for (v, s) in &scene.polygons {
        let pts: Vec<String> = v
            .iter()
            .map(|p| {
                let (x, y) = xy(p);
                format!("{x},{y}")
            })
            .collect();
        polys = polys.add(
            Polygon::new()
                .set("points", pts.join(" "))
                .set("fill", s.fill.as_str())
                .set("stroke", s.stroke.as_str())
                .set("stroke-width", num(s.width)),
        );
    }
    let mut segs = Group::new().set("id", "segments");
    for (a, b, s) in &scene.segments {
        let ((ax, ay), (bx, by)) = (xy(a), xy(b));
        segs = segs.add(
            SvgLine::new()
                .set("x1", ax)
                .set("y1", ay)
                .set("x2", bx)
                .set("y2", by)
                .set("stroke", s.stroke.as_str())
                .set("stroke-width", num(s.width)),
        );
    }
    let mut dots = Group::new().set("id", "points");
    for (p, s) in &scene.points {
        let (x, y) = xy(p);
        dots = dots.add(
            Circle::new()
                .set("cx", x)
                .set("cy", y)
                .set("r", num(s.radius))
                .set("fill", s.fill.as_str())
                .set("stroke", s.stroke.as_str()),
        );
    }
    let mut labels = Group::new().set("id", "labels");
    for (p, t, s) in &scene.labels {
        let (x, y) = xy(p);
        labels = labels.add(
            Text::new(t.as_str())
                .set("x", x)
                .set("y", y)
                .set("font-size", num(s.radius * 3.0))
                .set("fill", s.fill.as_str()),
        );
    }
    doc = doc.add(polys).add(segs).add(dots).add(labels);
    let mut out = doc.to_string();
    out.push('\n');
    out
}

fn add_edges(scene: &mut Scene, pts: &[Point], edges: &EdgeSet, style: &Style) {
    for (a, b) in edges.iter() {
        scene
            .segments
            .push((pts[a].clone(), pts[b].clone(), style.clone()));
    }
}

fn add_points(scene: &mut Scene, ps: &PointSet, radius: f64) {
    for (i, p) in ps.points.iter().enumerate() {
        let color = if ps.is_hull_vertex(i) {
            HULL_POINT_COLOR
        } else {
            INTERIOR_POINT_COLOR
        };
        scene.points.push((p.clone(), Style::dot(color, radius)));
    }
}

fn unit(ps: &PointSet) -> f64 {
    let s = Scene {
        points: ps
            .points
            .iter()
            .map(|p| (p.clone(), Style::default()))
            .collect(),
        ..Default::default()
    };
    s.bounds()
        .map(|(a, b, c, d)| (c - a).max(d - b))
        .filter(|v| *v > 0.0)
        .unwrap_or(1.0)
}

/// Point set with optional edges.
pub fn point_set_scene(ps: &PointSet, edges: Option<&EdgeSet>) -> Scene {
    let u = unit(ps);
    let mut s = Scene::default();
    if let Some(e) = edges {
        add_edges(&mut s, &ps.points, e, &Style::stroke(EDGE_COLOR, u * 0.004));
    }
    add_points(&mut s, ps, u * 0.012);
    s
}

/// Generalized double circle with its spanning cycle in blue.
pub fn gdc_scene(g: &GdcPointSet) -> Scene {
    let u = unit(&g.base);
    let mut s = Scene::default();
    for (a, b) in g.cycle_edges() {
        s.segments.push((
            g.base.points[a].clone(),
            g.base.points[b].clone(),
            Style::stroke(CYCLE_COLOR, u * 0.006),
        ));
    }
    add_points(&mut s, &g.base, u * 0.012);
    s
}

/// Labelled polygons, one fill per region.
pub fn regions_scene(regions: &[Vec<Point>], points: &[Point]) -> Scene {
    let mut s = Scene::default();
    for (i, r) in regions.iter().enumerate() {
        let st = Style {
            fill: REGION_FILLS[i % REGION_FILLS.len()].into(),
            width: 0.0,
            ..Style::default()
        };
        s.polygons.push((r.clone(), st));
    }
    let u = s
        .bounds()
        .map(|(a, b, c, d)| (c - a).max(d - b))
        .unwrap_or(1.0);
    for r in &mut s.polygons {
        r.1.width = u * 0.003;
    }
    for p in points {
        s.points
            .push((p.clone(), Style::dot(INTERIOR_POINT_COLOR, u * 0.01)));
    }
    s
}

/// Two scenes next to each other, the second shifted right of the first.
pub fn side_by_side(left: &Scene, right: &Scene) -> Scene {
    use crate::exactgeom::rational_from_f64;
    let (Some(l), Some(r)) = (left.bounds(), right.bounds()) else {
        let mut s = left.clone();
        s.extend(right.clone());
        return s;
    };
    let gap = 0.1 * (l.2 - l.0).max(r.2 - r.0);
    let dx = rational_from_f64(l.2 + gap - r.0, 1 << 16);
    let dy = rational_from_f64(l.1 - r.1, 1 << 16);
    let mut s = left.clone();
    s.extend(right.translated(&dx, &dy));
    s
}

/// Both triangulations of a compatible pair, source left.
pub fn compat_scene(p: &PointSet, q: &PointSet, res: &CompatResult) -> Scene {
    side_by_side(
        &point_set_scene(p, Some(&res.tp)),
        &point_set_scene(q, Some(&res.tq)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::gen_double_circle;

    #[test]
    fn empty_scene_is_valid() {
        let s = render_svg(&Scene::default(), 100.0);
        assert!(s.starts_with("<svg"));
        assert!(s.contains("viewBox=\"-0.05 -1.05 1.1 1.1\""));
    }

    #[test]
    fn double_circle_figure_is_deterministic() {
        let g = gen_double_circle(5).unwrap();
        let a = render_svg(&gdc_scene(&g), 200.0);
        assert_eq!(a, render_svg(&gdc_scene(&g), 200.0));
        assert_eq!(a.matches("<line").count(), 10);
        assert_eq!(a.matches("<circle").count(), 10);
        assert!(a.contains(CYCLE_COLOR));
    }

    #[test]
    fn panels_do_not_overlap() {
        let g = gen_double_circle(4).unwrap();
        let s = point_set_scene(&g.base, None);
        let both = side_by_side(&s, &s);
        let (a, _, c, _) = both.bounds().unwrap();
        let (a0, _, c0, _) = s.bounds().unwrap();
        assert!(c - a > 2.0 * (c0 - a0));
    }
}
