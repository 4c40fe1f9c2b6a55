//! Compatible triangulations between a (generalized) double circle P and an
//! arbitrary point set Q with the same number of points and hull vertices.
//!
//! Q is split into convex regions, one per hull edge, holding as many points
//! as the matching chain of P. Each region yields a chain from Qᵢ to Qᵢ₊₁;
//! points the chain misses are spliced in with fans guided by the visibility
//! subdivision. The closed chain then plays the role of P's unavoidable
//! cycle, and triangulations of the inner polygon and the outer caps are
//! ported across.

use num_traits::Signed;
use thiserror::Error;

use crate::exactgeom::{
    convex_hull, convex_interiors_overlap, orient, polygon_area2, ConvexPolygon, Location, Point,
    Scalar, Sign,
};
use crate::pointsets::{
    gen_double_circle, perturb_to_general_plus, GdcPointSet, PointSet, PointSetError,
};
use crate::skeleton::{merged_polygon, visibility_subdivision, ApexInput, SkeletonError};
use crate::subdivide::{
    convex_subdivision_with, CountedSubdivisionRequest, SubdivideError, SubdivisionOptions,
};
use crate::tri::{
    ear_clip, port_polygon_triangulation, verify_compatible, Correspondence, EdgeSet,
    SimplePolygon, TriError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompatError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Subdivide(#[from] SubdivideError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Tri(#[from] TriError),
    #[error(transparent)]
    PointSet(#[from] PointSetError),
    #[error("construction failed: {0}")]
    Construction(String),
}

/// Prescribed hull correspondence: P's outer vertex i goes to Q's hull
/// vertex i + k, or an explicit list of images of P's outer vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HullMap {
    Rotation(usize),
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct CompatOptions {
    pub subdivision: SubdivisionOptions,
    pub perturb_seed: u64,
}

impl Default for CompatOptions {
    fn default() -> Self {
        CompatOptions {
            subdivision: SubdivisionOptions::default(),
            perturb_seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompatResult {
    pub f: Correspondence,
    pub tp: EdgeSet,
    pub tq: EdgeSet,
    /// Images of P's outer vertices in Q.
    pub hull_q: Vec<usize>,
    /// Final chains in Q, chain i from hull_q[i] to hull_q[i+1].
    pub chains: Vec<Vec<usize>>,
    /// Chains before splicing.
    pub initial_chains: Vec<Vec<usize>>,
    /// Q was reflected to turn the hull map into a rotation.
    pub mirrored: bool,
    /// Fan triangles checked against their merged cells.
    pub fan_triangles: usize,
}

/// Finds (working copy of Q, rotation, mirrored) realizing the hull map.
fn resolve_hull_map(
    p: &GdcPointSet,
    q: &PointSet,
    f0: &HullMap,
) -> Result<(PointSet, usize, bool), CompatError> {
    let n = p.n();
    if q.hull_size() != n {
        return Err(CompatError::Precondition(format!(
            "hull sizes {} and {}",
            n,
            q.hull_size()
        )));
    }
    match f0 {
        HullMap::Rotation(k) => Ok((q.clone(), k % n, false)),
        HullMap::Explicit(img) => {
            if img.len() != n {
                return Err(CompatError::Precondition(format!(
                    "hull map has {} entries",
                    img.len()
                )));
            }
            for (mirrored, cand) in [(false, q.clone()), (true, q.mirrored())] {
                if let Some(k) = cand.hull.iter().position(|&h| h == img[0]) {
                    if (0..n).all(|i| cand.hull[(k + i) % n] == img[i]) {
                        return Ok((cand, k, mirrored));
                    }
                }
            }
            Err(CompatError::Precondition(
                "hull map does not preserve the cyclic order".into(),
            ))
        }
    }
}

/// Chain from `a` to `b` along the hull of {a, b} ∪ members, avoiding the
/// direct edge.
fn region_chain(
    pts: &[Point],
    a: usize,
    b: usize,
    members: &[usize],
) -> Result<Vec<usize>, CompatError> {
    if members.is_empty() {
        return Ok(vec![a, b]);
    }
    let mut ids = vec![a, b];
    ids.extend_from_slice(members);
    let local: Vec<Point> = ids.iter().map(|&i| pts[i].clone()).collect();
    let h = if local.len() == 3 {
        if orient(&local[0], &local[1], &local[2]) == Sign::Positive {
            vec![0, 1, 2]
        } else {
            vec![0, 2, 1]
        }
    } else {
        convex_hull(&local).map_err(|e| CompatError::Construction(format!("region hull: {e}")))?
    };
    let m = h.len();
    let pos = h
        .iter()
        .position(|&x| x == 0)
        .ok_or_else(|| CompatError::Construction("Qᵢ not on region hull".into()))?;
    if h[(pos + 1) % m] != 1 {
        return Err(CompatError::Construction(
            "hull edge is not an edge of its region hull".into(),
        ));
    }
    let mut chain = Vec::with_capacity(m);
    let mut k = pos;
    loop {
        chain.push(ids[h[k]]);
        if h[k] == 1 {
            break;
        }
        k = (k + m - 1) % m;
    }
    Ok(chain)
}

fn sorted3(t: [usize; 3]) -> [usize; 3] {
    let mut s = t;
    s.sort_unstable();
    s
}

/// Splices the points of `deficient` into chain `chain`, updating the
/// triangulation inside the closed chain.
fn splice_chain(
    pts: &[Point],
    chain: &[usize],
    deficient: &[usize],
    tris: &mut Vec<[usize; 3]>,
) -> Result<(Vec<usize>, usize), CompatError> {
    let p = chain.len();
    let mut apex = Vec::with_capacity(p - 1);
    let mut apex_tri = Vec::with_capacity(p - 1);
    for j in 0..p - 1 {
        let (a, b) = (chain[j], chain[j + 1]);
        let found: Vec<usize> = (0..tris.len())
            .filter(|&t| tris[t].contains(&a) && tris[t].contains(&b))
            .collect();
        if found.len() != 1 {
            return Err(CompatError::Construction(format!(
                "chain edge ({a},{b}) borders {} triangles",
                found.len()
            )));
        }
        let t = tris[found[0]];
        apex.push(
            *t.iter()
                .find(|&&v| v != a && v != b)
                .expect("triangle has a third vertex"),
        );
        apex_tri.push(sorted3(t));
    }
    // counterclockwise polygon: the chain reversed; edge k is chain edge p−2−k
    let rv: Vec<Point> = chain.iter().rev().map(|&i| pts[i].clone()).collect();
    let apexes: Vec<Point> = (0..p - 1).map(|k| pts[apex[p - 2 - k]].clone()).collect();
    let polygon = ConvexPolygon::new_strict(rv)
        .map_err(|e| CompatError::Construction(format!("chain polygon: {e}")))?;
    let input = ApexInput::new(polygon, apexes)?;
    let cells = visibility_subdivision(&input)?;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); p - 1];
    for &d in deficient {
        let k = (0..p - 1)
            .find(|&k| {
                cells[k]
                    .as_ref()
                    .is_some_and(|c| c.contains(&pts[d]) != Location::Outside)
            })
            .ok_or_else(|| CompatError::Construction(format!("point {d} lies in no cell")))?;
        buckets[p - 2 - k].push(d);
    }
    let mut fans = 0usize;
    let mut out = Vec::with_capacity(p + deficient.len());
    for j in 0..p - 1 {
        out.push(chain[j]);
        if buckets[j].is_empty() {
            continue;
        }
        let (a, b, w) = (chain[j], chain[j + 1], apex[j]);
        let s = orient(&pts[w], &pts[a], &pts[b]);
        let mut vs = buckets[j].clone();
        vs.sort_by(|&x, &y| {
            let o = orient(&pts[w], &pts[x], &pts[y]);
            if o == s {
                std::cmp::Ordering::Less
            } else if o.is_zero() {
                std::cmp::Ordering::Equal
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let k = p - 2 - j;
        let cell = cells[k].as_ref().expect("cell holding points exists");
        let merged = merged_polygon(&input, k, cell)
            .ok_or_else(|| CompatError::Construction("cell lost its edge".into()))?;
        let merged = ConvexPolygon::new(merged)
            .map_err(|e| CompatError::Construction(format!("merged cell: {e}")))?;
        let mut path = vec![a];
        path.extend(vs.iter().copied());
        path.push(b);
        let pos = tris
            .iter()
            .position(|t| sorted3(*t) == apex_tri[j])
            .ok_or_else(|| CompatError::Construction("apex triangle vanished".into()))?;
        tris.remove(pos);
        for win in path.windows(2) {
            let t = [w, win[0], win[1]];
            if t.iter()
                .any(|&v| merged.contains(&pts[v]) == Location::Outside)
            {
                return Err(CompatError::Construction(format!(
                    "fan triangle {t:?} leaves its merged cell"
                )));
            }
            if orient(&pts[w], &pts[win[0]], &pts[win[1]]) != s {
                return Err(CompatError::Construction(format!(
                    "fan triangle {t:?} is flipped"
                )));
            }
            tris.push(t);
            fans += 1;
        }
        out.extend(vs);
    }
    out.push(chain[p - 1]);
    Ok((out, fans))
}

fn add_triangle_edges(es: &mut EdgeSet, tris: &[[usize; 3]]) -> Result<(), CompatError> {
    for t in tris {
        for k in 0..3 {
            es.insert(t[k], t[(k + 1) % 3])?;
        }
    }
    Ok(())
}

/// Ports a triangulated ring of Q (point ids) onto the matching ring of P.
fn port_ring(
    p: &PointSet,
    q: &[Point],
    ring_p: &[usize],
    ring_q: &[usize],
) -> Result<Vec<[usize; 3]>, CompatError> {
    let poly_q = SimplePolygon::new(ring_q.iter().map(|&i| q[i].clone()).collect())?;
    let poly_p = SimplePolygon::new(ring_p.iter().map(|&i| p.points[i].clone()).collect())?;
    let tris = ear_clip(&poly_q)?;
    let diags = crate::tri::diagonals_of(ring_q.len(), &tris);
    port_polygon_triangulation(&poly_p, &poly_q, &diags)?;
    Ok(tris
        .iter()
        .map(|t| [ring_q[t[0]], ring_q[t[1]], ring_q[t[2]]])
        .collect())
}

pub fn compat_generalized(
    gdc: &GdcPointSet,
    q: &PointSet,
    f0: &HullMap,
) -> Result<CompatResult, CompatError> {
    compat_generalized_with(gdc, q, f0, &CompatOptions::default())
}

pub fn compat_generalized_with(
    gdc: &GdcPointSet,
    q: &PointSet,
    f0: &HullMap,
    opts: &CompatOptions,
) -> Result<CompatResult, CompatError> {
    let p = &gdc.base;
    if p.len() != q.len() {
        return Err(CompatError::Precondition(format!(
            "|P| = {} but |Q| = {}",
            p.len(),
            q.len()
        )));
    }
    let n = gdc.n();
    let (work, k, mirrored) = resolve_hull_map(gdc, q, f0)?;
    let moved = perturb_to_general_plus(&work, opts.perturb_seed)?;
    let pts = &moved.points;
    let hull_q: Vec<usize> = (0..n).map(|i| work.hull[(i + k) % n]).collect();
    let interior = work.interior_indices();
    let polygon = ConvexPolygon::new_strict(hull_q.iter().map(|&i| pts[i].clone()).collect())
        .map_err(|e| CompatError::Construction(format!("hull polygon: {e}")))?;
    let req = CountedSubdivisionRequest::new(
        polygon,
        interior.iter().map(|&i| pts[i].clone()).collect(),
        gdc.spec.counts.clone(),
    );
    // the perturbation already certified general⁺ position
    let sub_opts = SubdivisionOptions {
        check_general_plus: false,
        ..opts.subdivision.clone()
    };
    let ra = convex_subdivision_with(&req, &sub_opts)?;

    let mut chains = Vec::with_capacity(n);
    let mut deficient = Vec::with_capacity(n);
    for i in 0..n {
        let members: Vec<usize> = ra.members[i].iter().map(|&t| interior[t]).collect();
        let chain = region_chain(pts, hull_q[i], hull_q[(i + 1) % n], &members)?;
        deficient.push(
            members
                .iter()
                .copied()
                .filter(|m| !chain.contains(m))
                .collect::<Vec<usize>>(),
        );
        chains.push(chain);
    }
    let initial_chains = chains.clone();

    let ring = |chains: &[Vec<usize>]| -> Vec<usize> {
        chains
            .iter()
            .flat_map(|c| c[..c.len() - 1].iter().copied())
            .collect()
    };
    let l_ring = ring(&chains);
    let l_poly = SimplePolygon::new(l_ring.iter().map(|&i| pts[i].clone()).collect())?;
    let mut tris: Vec<[usize; 3]> = ear_clip(&l_poly)?
        .iter()
        .map(|t| [l_ring[t[0]], l_ring[t[1]], l_ring[t[2]]])
        .collect();

    let mut fan_triangles = 0;
    for i in 0..n {
        if deficient[i].is_empty() {
            continue;
        }
        let (spliced, fans) = splice_chain(pts, &chains[i], &deficient[i], &mut tris)?;
        chains[i] = spliced;
        fan_triangles += fans;
    }
    for i in 0..n {
        if chains[i].len() != gdc.spec.counts[i] + 2 {
            return Err(CompatError::Construction(format!(
                "chain {i} has {} inner points, expected {}",
                chains[i].len() - 2,
                gdc.spec.counts[i]
            )));
        }
    }

    // chain points to P's cycle
    let mut fmap = vec![usize::MAX; p.len()];
    for i in 0..n {
        let pc = gdc.chain(i);
        for (a, b) in pc.iter().zip(chains[i].iter()) {
            fmap[*a] = *b;
        }
    }
    let f = Correspondence::new(fmap)
        .map_err(|_| CompatError::Construction("chains do not cover Q".into()))?;
    let finv = f.inverse();

    let l_ring = ring(&chains);
    let p_ring: Vec<usize> = l_ring.iter().map(|&v| finv.map[v]).collect();
    let l_poly = SimplePolygon::new(l_ring.iter().map(|&i| pts[i].clone()).collect())?;
    let p_poly = SimplePolygon::new(p_ring.iter().map(|&i| p.points[i].clone()).collect())?;
    if tris.len() + 2 != l_ring.len() {
        return Err(CompatError::Construction(
            "inner triangulation has the wrong size".into(),
        ));
    }
    let pos_of = |v: usize| l_ring.iter().position(|&x| x == v).expect("vertex on ring");
    let inner_tri: Vec<[usize; 3]> = tris
        .iter()
        .map(|t| [pos_of(t[0]), pos_of(t[1]), pos_of(t[2])])
        .collect();
    let inner_diags = crate::tri::diagonals_of(l_ring.len(), &inner_tri);
    port_polygon_triangulation(&p_poly, &l_poly, &inner_diags)?;

    let mut tq = EdgeSet::new(q.len());
    add_triangle_edges(&mut tq, &tris)?;
    for i in 0..n {
        tq.insert(hull_q[i], hull_q[(i + 1) % n])?;
        let c = &chains[i];
        for w in c.windows(2) {
            tq.insert(w[0], w[1])?;
        }
        if c.len() > 2 {
            let mut cap_q = vec![c[0], c[c.len() - 1]];
            cap_q.extend(c[1..c.len() - 1].iter().rev().copied());
            let cap_p: Vec<usize> = cap_q.iter().map(|&v| finv.map[v]).collect();
            let cap_tris = port_ring(p, pts, &cap_p, &cap_q)?;
            add_triangle_edges(&mut tq, &cap_tris)?;
        }
    }
    let tp = tq.mapped(&finv.map);
    let result = CompatResult {
        f,
        tp,
        tq,
        hull_q,
        chains,
        initial_chains,
        mirrored,
        fan_triangles,
    };
    if !verify_compatible(p, q, &result.f, &result.tp, &result.tq) {
        return Err(CompatError::Construction(
            "result failed verification".into(),
        ));
    }
    Ok(result)
}

pub fn compat_double_circle(q: &PointSet, f0: &HullMap) -> Result<CompatResult, CompatError> {
    let n = q.hull_size();
    if q.len() != 2 * n {
        return Err(CompatError::Precondition(format!(
            "{} points with {} on the hull",
            q.len(),
            n
        )));
    }
    let dc = gen_double_circle(n)?;
    compat_generalized(&dc, q, f0)
}

/// For a double-circle result: (interior point of Q, hull edge index) pairs,
/// after checking that the triangles (Qᵢ, Bᵢ, Qᵢ₊₁) do not overlap.
pub fn extract_association(
    q: &PointSet,
    result: &CompatResult,
) -> Result<Vec<(usize, usize)>, CompatError> {
    if result.chains.iter().any(|c| c.len() != 3) {
        return Err(CompatError::Precondition(
            "not a double-circle result".into(),
        ));
    }
    let tri = |c: &Vec<usize>| -> Vec<Point> { c.iter().map(|&i| q.points[i].clone()).collect() };
    let n = result.chains.len();
    for i in 0..n {
        for j in i + 1..n {
            if convex_interiors_overlap(&tri(&result.chains[i]), &tri(&result.chains[j])) {
                return Err(CompatError::Construction(format!(
                    "triangles {i} and {j} overlap"
                )));
            }
        }
    }
    Ok(result
        .chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c[1], i))
        .collect())
}

/// Inner polygon plus the chain caps tile the hull (absolute areas, so a
/// mirrored run checks the same way).
pub fn chains_cover_hull(q: &PointSet, result: &CompatResult) -> bool {
    let area = |ids: &[usize]| -> Scalar {
        let v: Vec<Point> = ids.iter().map(|&i| q.points[i].clone()).collect();
        polygon_area2(&v).abs()
    };
    let ring: Vec<usize> = result
        .chains
        .iter()
        .flat_map(|c| c[..c.len() - 1].iter().copied())
        .collect();
    let mut total = area(&ring);
    for c in result.chains.iter().filter(|c| c.len() > 2) {
        let mut cap = vec![c[0], c[c.len() - 1]];
        cap.extend(c[1..c.len() - 1].iter().rev());
        total += area(&cap);
    }
    total == area(&result.hull_q)
}
