//! Event-driven R/S sweep for the three-way triangle split.
//!
//! R starts on the base where the ray from the apex through the (ct+1)-th
//! point (in angular order) meets it, S likewise for the (ct+ci)-th point.
//! Both climb at equal height. A point moving "toward" the apex follows the
//! line apex→A for the point A on its cut; a point moving "away" follows the
//! line from its base corner through the last point B its base cut picked up.
//! The procedure ends when R and S meet in one of the terminal situations; the
//! split point is then taken from a face of the arrangement next to the
//! meeting vertex.

use num_traits::{Signed, Zero};

use crate::exactgeom::{Line, Point, Scalar};

use super::arrangement::{search_around, ArrangementOracle, TriangleJob};
use super::{SubdivideError, TriangleSplitter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Climbing along apex→A for point index A.
    Toward(usize),
    /// Moving away from the base corner along corner→B.
    Away(usize),
}

#[derive(Clone, Debug)]
struct Mover {
    pos: Point,
    mode: Mode,
    /// Position change per unit of height.
    vel: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    R,
    S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SweepEnd {
    /// Both moving away and met.
    BothAway,
    /// Merged on a toward-line and a base cut picked up a point.
    Swap,
    /// Merged and reached the point on their shared cut.
    ReachedPoint,
}

#[derive(Clone, Debug)]
pub struct SweepTrace {
    pub events: usize,
    pub end: SweepEnd,
    pub meeting: Point,
}

#[derive(Clone, Copy, Debug)]
enum Event {
    /// Base cut of the mover picks up point B.
    Pickup(Side, usize),
    /// Mover reaches the point on its toward-line.
    Reach(Side),
    /// Apex cut of an away mover hits point A.
    ApexHit(Side, usize),
    Meet,
    MergedPickup,
    MergedReach,
}

pub struct RsSweep {
    /// Fall back to the arrangement oracle when the sweep cannot finish.
    pub fallback: bool,
}

const MAX_EVENTS_PER_POINT: usize = 64;

impl RsSweep {
    fn corner<'a>(job: &'a TriangleJob, side: Side) -> &'a Point {
        match side {
            Side::R => &job.left,
            Side::S => &job.right,
        }
    }

    fn velocity(job: &TriangleJob, dir: &Point) -> Option<Point> {
        // height is affine; its linear part applied to dir
        let rate = job.height(&(&job.left + dir)) - job.height(&job.left);
        if !rate.is_positive() {
            return None;
        }
        Some(dir.scale(&(Scalar::from_integer(1.into()) / rate)))
    }

    fn meet_point(a: &Line, b: &Line) -> Option<Point> {
        a.meet(b).to_point()
    }

    fn toward_mover(job: &TriangleJob, pos: Point, a: usize) -> Option<Mover> {
        let target = &job.points[a];
        let dir = target - &pos;
        let vel = Self::velocity(job, &dir)?;
        Some(Mover {
            pos,
            mode: Mode::Toward(a),
            vel,
        })
    }

    fn away_mover(job: &TriangleJob, side: Side, pos: Point, b: usize) -> Option<Mover> {
        let dir = &pos - Self::corner(job, side);
        let vel = Self::velocity(job, &dir)?;
        Some(Mover {
            pos,
            mode: Mode::Away(b),
            vel,
        })
    }

    /// Earliest event height for one mover.
    fn next_event(job: &TriangleJob, m: &Mover, side: Side, h: &Scalar) -> Option<(Scalar, Event)> {
        let corner = Self::corner(job, side);
        let mut best: Option<(Scalar, Event)> = None;
        let consider = |hh: Scalar, ev: Event, best: &mut Option<(Scalar, Event)>| {
            if &hh > h && best.as_ref().map_or(true, |(b, _)| &hh < b) {
                *best = Some((hh, ev));
            }
        };
        match m.mode {
            Mode::Toward(a) => {
                let ha = job.height(&job.points[a]);
                consider(ha.clone(), Event::Reach(side), &mut best);
                let path = Line::through_h(&job.apex, &job.points[a]);
                for (b, pb) in job.points.iter().enumerate() {
                    if b == a {
                        continue;
                    }
                    if let Some(e) = Self::meet_point(&path, &Line::through(corner, pb)) {
                        let he = job.height(&e);
                        if he < ha && job.height(pb) < he && job.height(pb).is_positive() {
                            consider(he, Event::Pickup(side, b), &mut best);
                        }
                    }
                }
            }
            Mode::Away(b) => {
                let path = Line::through(corner, &job.points[b]);
                for (a, pa) in job.points.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    if let Some(e) = Self::meet_point(&path, &Line::through_h(&job.apex, pa)) {
                        let he = job.height(&e);
                        if job.height(pa) > he {
                            consider(he, Event::ApexHit(side, a), &mut best);
                        }
                    }
                }
            }
        }
        best
    }

    fn advance(m: &Mover, dh: &Scalar) -> Point {
        &m.pos + &m.vel.scale(dh)
    }

    /// Height offset at which R and S coincide, if ahead.
    fn meet_offset(job: &TriangleJob, r: &Mover, s: &Mover) -> Option<Scalar> {
        let base = &job.right - &job.left;
        let tr = (&r.pos - &job.left).dot(&base);
        let ts = (&s.pos - &job.left).dot(&base);
        let vr = r.vel.dot(&base);
        let vs = s.vel.dot(&base);
        let dv = vr - vs;
        if dv.is_zero() {
            return None;
        }
        let off = (ts - tr) / dv;
        if off.is_positive() {
            Some(off)
        } else {
            None
        }
    }

    pub fn run(&self, job: &TriangleJob) -> Result<(Point, SweepTrace), SubdivideError> {
        job.validate()?;
        let anomaly = |msg: &str| SubdivideError::SweepAnomaly(msg.to_string());
        let m = job.points.len();
        // angular order around the apex, from the left side toward the right
        let s0 = job.s0();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            let o = crate::exactgeom::orient_h(&job.apex, &job.points[a], &job.points[b]);
            if o == s0 {
                std::cmp::Ordering::Less
            } else if o.is_zero() {
                std::cmp::Ordering::Equal
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let base_line = Line::through(&job.left, &job.right);
        let a_r = order[job.ct];
        let a_s = order[job.ct + job.ci - 1];
        let start = |a: usize| -> Option<Point> {
            Self::meet_point(&Line::through_h(&job.apex, &job.points[a]), &base_line)
        };
        let r0 = start(a_r).ok_or_else(|| anomaly("apex ray misses the base"))?;
        let s0p = start(a_s).ok_or_else(|| anomaly("apex ray misses the base"))?;
        let lines = job.arrangement_lines();
        let mut h = Scalar::zero();
        let mut events = 0usize;
        let limit = MAX_EVENTS_PER_POINT * (m + 1);

        let finish = |e: Point,
                      end: SweepEnd,
                      events: usize|
         -> Result<(Point, SweepTrace), SubdivideError> {
            match search_around(job, &e, &lines) {
                Some(q) => Ok((
                    q,
                    SweepTrace {
                        events,
                        end,
                        meeting: e,
                    },
                )),
                None => Err(SubdivideError::SweepAnomaly(format!(
                    "no admissible face next to {e}"
                ))),
            }
        };

        // merged phase: both on the apex line through `a`
        let merged = |mut pos: Point,
                      a: usize,
                      h: Scalar,
                      mut events: usize|
         -> Result<(Point, SweepTrace), SubdivideError> {
            let mv = Self::toward_mover(job, pos.clone(), a)
                .ok_or_else(|| anomaly("merged mover cannot climb"))?;
            let ha = job.height(&job.points[a]);
            let path = Line::through_h(&job.apex, &job.points[a]);
            let mut best: Option<(Scalar, Event)> = Some((ha.clone(), Event::MergedReach));
            let mut tie = false;
            for side in [Side::R, Side::S] {
                let corner = Self::corner(job, side);
                for (b, pb) in job.points.iter().enumerate() {
                    if b == a {
                        continue;
                    }
                    if let Some(e) = Self::meet_point(&path, &Line::through(corner, pb)) {
                        let he = job.height(&e);
                        let hb = job.height(pb);
                        if he > h && he < ha && hb < he && hb.is_positive() {
                            match &best {
                                Some((cur, _)) if he == *cur => tie = true,
                                Some((cur, _)) if he > *cur => {}
                                _ => {
                                    best = Some((he, Event::MergedPickup));
                                    tie = false;
                                }
                            }
                        }
                    }
                }
            }
            if tie {
                return Err(anomaly("coincident events in merged phase"));
            }
            let (he, ev) = best.expect("reach event always present");
            pos = Self::advance(&mv, &(&he - &h));
            events += 1;
            match ev {
                Event::MergedReach => finish(pos, SweepEnd::ReachedPoint, events),
                Event::MergedPickup => finish(pos, SweepEnd::Swap, events),
                _ => unreachable!(),
            }
        };

        if a_r == a_s {
            return merged(r0, a_r, h, events);
        }
        let mut r = Self::toward_mover(job, r0, a_r).ok_or_else(|| anomaly("R cannot climb"))?;
        let mut s = Self::toward_mover(job, s0p, a_s).ok_or_else(|| anomaly("S cannot climb"))?;

        loop {
            if events > limit {
                return Err(anomaly("event limit exceeded"));
            }
            let er = Self::next_event(job, &r, Side::R, &h);
            let es = Self::next_event(job, &s, Side::S, &h);
            let em = Self::meet_offset(job, &r, &s).map(|off| (&h + &off, Event::Meet));
            let mut cands: Vec<(Scalar, Event)> = [er, es, em].into_iter().flatten().collect();
            if cands.is_empty() {
                return Err(anomaly("no further events"));
            }
            cands.sort_by(|a, b| a.0.cmp(&b.0));
            if cands.len() > 1 && cands[0].0 == cands[1].0 {
                // an away mover crossing the toward line meets the toward
                // mover there, and its apex cut then passes the toward point
                let toward = |side: Side| match (side, r.mode, s.mode) {
                    (Side::R, _, Mode::Toward(a)) | (Side::S, Mode::Toward(a), _) => Some(a),
                    _ => None,
                };
                let lead = cands[0].0.clone();
                let tied: Vec<&Event> =
                    cands.iter().filter(|c| c.0 == lead).map(|c| &c.1).collect();
                let benign = tied.len() == 2
                    && tied.iter().any(|e| matches!(e, Event::Meet))
                    && tied
                        .iter()
                        .any(|e| matches!(e, Event::ApexHit(side, a) if toward(*side) == Some(*a)));
                if !benign {
                    return Err(anomaly("coincident events"));
                }
                cands.retain(|c| c.0 != lead || matches!(c.1, Event::Meet));
            }
            let (he, ev) = cands.swap_remove(0);
            let dh = &he - &h;
            let rp = Self::advance(&r, &dh);
            let sp = Self::advance(&s, &dh);
            h = he;
            events += 1;
            match ev {
                Event::Meet => {
                    return match (r.mode, s.mode) {
                        (Mode::Away(_), Mode::Away(_)) => finish(rp, SweepEnd::BothAway, events),
                        (Mode::Toward(a), Mode::Away(_)) | (Mode::Away(_), Mode::Toward(a)) => {
                            merged(rp, a, h, events)
                        }
                        (Mode::Toward(_), Mode::Toward(_)) => {
                            Err(anomaly("toward movers met below the apex"))
                        }
                    };
                }
                Event::Pickup(side, b) => {
                    let pos = if side == Side::R {
                        rp.clone()
                    } else {
                        sp.clone()
                    };
                    let mv = Self::away_mover(job, side, pos, b)
                        .ok_or_else(|| anomaly("away mover cannot climb"))?;
                    if side == Side::R {
                        r = mv;
                        s.pos = sp;
                    } else {
                        s = mv;
                        r.pos = rp;
                    }
                }
                Event::Reach(side) => {
                    let (pos, a) = match (side, r.mode, s.mode) {
                        (Side::R, Mode::Toward(a), _) => (rp.clone(), a),
                        (Side::S, _, Mode::Toward(a)) => (sp.clone(), a),
                        _ => return Err(anomaly("reach without a toward mover")),
                    };
                    let mv = Self::away_mover(job, side, pos, a)
                        .ok_or_else(|| anomaly("away mover cannot climb"))?;
                    if side == Side::R {
                        r = mv;
                        s.pos = sp;
                    } else {
                        s = mv;
                        r.pos = rp;
                    }
                }
                Event::ApexHit(side, a) => {
                    let pos = if side == Side::R {
                        rp.clone()
                    } else {
                        sp.clone()
                    };
                    let mv = Self::toward_mover(job, pos, a)
                        .ok_or_else(|| anomaly("toward mover cannot climb"))?;
                    if side == Side::R {
                        r = mv;
                        s.pos = sp;
                    } else {
                        s = mv;
                        r.pos = rp;
                    }
                }
                Event::MergedPickup | Event::MergedReach => unreachable!(),
            }
        }
    }
}

impl TriangleSplitter for RsSweep {
    fn name(&self) -> &'static str {
        if self.fallback {
            "sweep"
        } else {
            "sweep-strict"
        }
    }

    fn split(&self, job: &TriangleJob) -> Result<Point, SubdivideError> {
        match self.run(job) {
            Ok((q, _)) => Ok(q),
            Err(SubdivideError::Precondition(msg)) => Err(SubdivideError::Precondition(msg)),
            Err(e) if !self.fallback => Err(e),
            Err(_) => ArrangementOracle.split(job),
        }
    }
}
