//! Acceptance criteria. Each check prints one `PASS` or `FAIL` line; checks
//! that depend on the external order-type database print `FAIL` with the
//! reason when the file is absent instead of aborting the run.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use compatri::compat::{compat_double_circle, compat_generalized, CompatResult, HullMap};
use compatri::exactgeom::{orient, ratio, ConvexPolygon, Point, Scalar, Sign};
use compatri::formats::{
    parse_compat_result, parse_gdc, parse_points, parse_triangulation, write_compat_result,
    write_gdc, write_points, write_triangulation,
};
use compatri::pointsets::{
    gen_double_circle, gen_generalized_double_circle, perturb_to_general_plus, random_point_set,
    GdcSpec, PointSet,
};
use compatri::render::{compat_scene, gdc_scene, render_svg, side_by_side, Scene};
use compatri::skeleton::{merged_polygon, visibility_subdivision, ApexInput};
use compatri::subdivide::{
    convex_subdivision, split_triangle_three, split_triangle_three_oracle,
    split_triangle_three_with, splitter, CountedSubdivisionRequest,
};
use compatri::swapgraph::db::{default_db_path, DbReader};
use compatri::swapgraph::intersection_rule;
use compatri::swapgraph::scan::{scan_conjecture, scan_mode, scan_records, ScanConfig};
use compatri::tri::{
    is_unavoidable_edge, triangulate_point_set, triangulate_polygon, verify_compatible, EdgeSet,
    SimplePolygon,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, ok: bool, detail: &str, t: Duration) -> bool {
    println!(
        "{} {name}: {detail} [{:.2}s]",
        if ok { "PASS" } else { "FAIL" },
        t.as_secs_f64()
    );
    ok
}

// ---- independent predicates ----

fn strictly_inside_triangle(a: &Point, b: &Point, c: &Point, p: &Point) -> bool {
    let s = orient(a, b, c);
    orient(a, b, p) == s && orient(b, c, p) == s && orient(c, a, p) == s
}

fn area2(v: &[Point]) -> Scalar {
    let mut s = Scalar::from_integer(0.into());
    for i in 0..v.len() {
        let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
        s += &a.x * &b.y - &a.y * &b.x;
    }
    s
}

fn convex_ccw(v: &[Point]) -> bool {
    let n = v.len();
    n >= 3
        && (0..n).all(|i| orient(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]) != Sign::Negative)
        && area2(v) > Scalar::from_integer(0.into())
}

/// Open interiors of two convex counterclockwise polygons meet.
fn convex_overlap(a: &[Point], b: &[Point]) -> bool {
    let separated = |p: &[Point], q: &[Point]| {
        (0..p.len()).any(|i| {
            let (u, v) = (&p[i], &p[(i + 1) % p.len()]);
            u != v && q.iter().all(|x| orient(u, v, x) != Sign::Positive)
        })
    };
    !(separated(a, b) || separated(b, a))
}

fn on_boundary(v: &[Point], p: &Point) -> bool {
    (0..v.len()).any(|i| {
        let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
        orient(a, b, p) == Sign::Zero && (p - a).dot(&(p - b)) <= Scalar::from_integer(0.into())
    })
}

fn strictly_inside_convex(v: &[Point], p: &Point) -> bool {
    (0..v.len()).all(|i| orient(&v[i], &v[(i + 1) % v.len()], p) == Sign::Positive)
}

fn crosses(p: &[Point], e: (usize, usize), f: (usize, usize)) -> bool {
    if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
        return false;
    }
    let s = |a: usize, b: usize, c: usize| orient(&p[a], &p[b], &p[c]);
    s(e.0, e.1, f.0) != s(e.0, e.1, f.1) && s(f.0, f.1, e.0) != s(f.0, f.1, e.1)
}

/// Every triangulation as a maximal non-crossing edge set.
fn all_triangulations(p: &[Point]) -> Vec<BTreeSet<(usize, usize)>> {
    let n = p.len();
    let segs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let free: Vec<bool> = segs
        .iter()
        .map(|&s| segs.iter().all(|&t| !crosses(p, s, t)))
        .collect();
    let mut out = Vec::new();
    fn go(
        k: usize,
        p: &[Point],
        segs: &[(usize, usize)],
        free: &[bool],
        chosen: &mut Vec<(usize, usize)>,
        out: &mut Vec<BTreeSet<(usize, usize)>>,
    ) {
        if k == segs.len() {
            let maximal = segs
                .iter()
                .all(|s| chosen.contains(s) || chosen.iter().any(|&c| crosses(p, *s, c)));
            if maximal {
                out.push(chosen.iter().cloned().collect());
            }
            return;
        }
        let s = segs[k];
        if chosen.iter().all(|&c| !crosses(p, s, c)) {
            chosen.push(s);
            go(k + 1, p, segs, free, chosen, out);
            chosen.pop();
        }
        if !free[k] {
            go(k + 1, p, segs, free, chosen, out);
        }
    }
    go(0, p, &segs, &free, &mut Vec::new(), &mut out);
    out
}

fn hull_count(ps: &PointSet) -> usize {
    ps.hull.len()
}

fn edge_count_ok(ps: &PointSet, t: &EdgeSet) -> bool {
    t.len() == 3 * ps.len() - 3 - hull_count(ps)
}

// ---- order-type database ----

#[test]
fn database_n8_counts() {
    let t = Instant::now();
    let path = default_db_path(8, None).unwrap();
    if !path.exists() {
        report(
            "db-n8-record-counts",
            false,
            &format!("database not found at {} (set COMPATRI_DB_DIR); expected 3315 records, 1468 with hull 4", path.display()),
            t.elapsed(),
        );
        return;
    }
    let mut total = 0;
    let mut hull4 = 0;
    for r in DbReader::open(&path, 8).unwrap() {
        total += 1;
        hull4 += (r.unwrap().hull().len() == 4) as usize;
    }
    let ok = total == 3315 && hull4 == 1468 && t.elapsed() < Duration::from_secs(10);
    report(
        "db-n8-record-counts",
        ok,
        &format!("{total} records, {hull4} with hull 4 (want 3315, 1468)"),
        t.elapsed(),
    );
    assert!(ok);
}

#[test]
fn database_n8_acyclic() {
    let t = Instant::now();
    let path = default_db_path(8, None).unwrap();
    if !path.exists() {
        report(
            "db-n8-swap-graphs-acyclic",
            false,
            &format!(
                "database not found at {}; expected 1468 scanned, 1468 acyclic",
                path.display()
            ),
            t.elapsed(),
        );
        return;
    }
    let cfg = ScanConfig {
        hull: Some(4),
        shards: 4,
        cross_check: Some(intersection_rule("open-interior").unwrap()),
        ..Default::default()
    };
    let r = scan_conjecture(&path, 8, &cfg).unwrap();
    let ok = r.scanned == 1468
        && r.acyclic == 1468
        && r.counterexamples.is_empty()
        && r.asymmetric_swaps == 0
        && r.sink_mismatches == 0
        && t.elapsed() < Duration::from_secs(120);
    report(
        "db-n8-swap-graphs-acyclic",
        ok,
        &format!(
            "{} scanned, {} acyclic, {} counterexamples, {} rule disagreements",
            r.scanned,
            r.acyclic,
            r.counterexamples.len(),
            r.rule_disagreements
        ),
        t.elapsed(),
    );
    assert!(ok);
}

#[test]
#[ignore = "hours; run with --ignored and the n=10 database"]
fn database_n10_long_run() {
    let t = Instant::now();
    let path = default_db_path(10, None).unwrap();
    let mut total = 0usize;
    let mut hull5 = 0usize;
    for r in DbReader::open(&path, 10).unwrap() {
        total += 1;
        hull5 += (r.unwrap().hull().len() == 5) as usize;
    }
    let cfg = ScanConfig {
        hull: Some(5),
        shards: 8,
        ..Default::default()
    };
    let r = scan_conjecture(&path, 10, &cfg).unwrap();
    let ok = total == 14309547 && hull5 == 2628738 && r.counterexamples.is_empty();
    report(
        "db-n10-long-run",
        ok,
        &format!("{total} records, {hull5} hull 5, {} acyclic", r.acyclic),
        t.elapsed(),
    );
    assert!(ok);
}

/// Stand-in while the database is unavailable: random 8-point sets with a
/// 4-gon hull through the same scan. Informational, not a criterion.
#[test]
fn random_hull4_scan() {
    use compatri::exactgeom::IntPoint;
    use compatri::swapgraph::db::OrderTypeRecord;
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut recs = Vec::new();
    while recs.len() < 300 {
        let pts: Vec<IntPoint> = (0..8)
            .map(|_| IntPoint::new(rng.gen_range(0..256), rng.gen_range(0..256)))
            .collect();
        let r = OrderTypeRecord { points: pts };
        if r.is_general_position() && r.hull().len() == 4 {
            recs.push(r);
        }
    }
    let cfg = ScanConfig {
        cross_check: Some(intersection_rule("open-interior").unwrap()),
        shards: 4,
        ..Default::default()
    };
    let g = scan_records(&recs, &cfg).unwrap();
    let h = scan_records(
        &recs,
        &ScanConfig {
            mode: scan_mode("heuristic").unwrap(),
            ..Default::default()
        },
    )
    .unwrap();
    println!(
        "INFO random-hull4-scan: graph {} scanned, {} acyclic, {} disagreements; heuristic {} terminated, max {} steps [{:.2}s]",
        g.scanned,
        g.acyclic,
        g.rule_disagreements,
        h.acyclic,
        h.max_steps,
        t.elapsed().as_secs_f64()
    );
    assert_eq!(
        (g.acyclic, h.acyclic, g.asymmetric_swaps, g.sink_mismatches),
        (300, 300, 0, 0)
    );
    assert_eq!(g.rule_disagreements, 0);
}

// ---- end-to-end pipeline ----

#[test]
fn pipeline_double_circle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut runs, mut bad) = (0, Vec::new());
    for inst in 0..200u64 {
        let n = rng.gen_range(3..=10);
        let q = random_point_set(n, n, 10_000 + inst).unwrap();
        let dc = gen_double_circle(n).unwrap();
        for k in 0..n {
            runs += 1;
            match compat_double_circle(&q, &HullMap::Rotation(k)) {
                Ok(res) if verify_compatible(&dc.base, &q, &res.f, &res.tp, &res.tq) => {}
                Ok(_) => bad.push(format!("{inst}/{k}: unverified")),
                Err(e) => bad.push(format!("{inst}/{k}: {e}")),
            }
        }
    }
    let ok = bad.is_empty() && t.elapsed() < Duration::from_secs(60);
    report(
        "pipeline-double-circle",
        ok,
        &format!(
            "200 instances, {runs} rotations, {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(bad.is_empty());
}

#[test]
fn pipeline_generalized() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = Vec::new();
    let mut inst = 0u64;
    while inst < 100 {
        let n = rng.gen_range(3..=8);
        let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let total = n + counts.iter().sum::<usize>();
        if total > 30 {
            continue;
        }
        let spec = GdcSpec::new(counts.clone()).unwrap();
        let gdc = gen_generalized_double_circle(&spec).unwrap();
        let q = random_point_set(n, total - n, 20_000 + inst).unwrap();
        let k = rng.gen_range(0..n);
        match compat_generalized(&gdc, &q, &HullMap::Rotation(k)) {
            Ok(res) if verify_compatible(&gdc.base, &q, &res.f, &res.tp, &res.tq) => {}
            Ok(_) => bad.push(format!("{counts:?}: unverified")),
            Err(e) => bad.push(format!("{counts:?}: {e}")),
        }
        inst += 1;
    }
    let ok = bad.is_empty() && t.elapsed() < Duration::from_secs(300);
    report(
        "pipeline-generalized",
        ok,
        &format!(
            "100 instances, {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(bad.is_empty());
}

// ---- oracle equivalence ----

fn random_triangle_job(rng: &mut ChaCha8Rng) -> (Point, Point, Point, Vec<Point>, [usize; 3]) {
    loop {
        let c = |rng: &mut ChaCha8Rng| {
            Point::from_ints(rng.gen_range(-400..=400), rng.gen_range(-400..=400))
        };
        let (a, b, cc) = (c(rng), c(rng), c(rng));
        if orient(&a, &b, &cc) != Sign::Positive {
            continue;
        }
        let m = rng.gen_range(1..=10);
        let mut pts = Vec::new();
        let mut tries = 0;
        while pts.len() < m && tries < 5000 {
            tries += 1;
            let p = c(rng);
            if strictly_inside_triangle(&a, &b, &cc, &p) && !pts.contains(&p) {
                pts.push(p);
            }
        }
        if pts.len() < m {
            continue;
        }
        let mut all = vec![a.clone(), b.clone(), cc.clone()];
        all.extend(pts.iter().cloned());
        let Ok(ps) = PointSet::new(all) else { continue };
        let Ok(moved) = perturb_to_general_plus(&ps, rng.gen()) else {
            continue;
        };
        let pts = moved.points[3..].to_vec();
        let ct = rng.gen_range(0..m);
        let ci = rng.gen_range(1..=m - ct);
        let cb = m - ct - ci;
        let [a, b, cc] = [
            moved.points[0].clone(),
            moved.points[1].clone(),
            moved.points[2].clone(),
        ];
        return (a, b, cc, pts, [ct, ci, cb]);
    }
}

fn triple(a: &Point, b: &Point, c: &Point, q: &Point, pts: &[Point]) -> [usize; 3] {
    let cnt = |x: &Point, y: &Point, z: &Point| {
        pts.iter()
            .filter(|p| strictly_inside_triangle(x, y, z, p))
            .count()
    };
    [cnt(a, b, q), cnt(q, b, c), cnt(a, q, c)]
}

#[test]
fn oracle_sweep_vs_arrangement() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let strict = splitter("sweep-strict").unwrap();
    let (mut agree, mut strict_ok, mut bad) = (0, 0, Vec::new());
    for i in 0..200 {
        let (a, b, c, pts, [ct, ci, cb]) = random_triangle_job(&mut rng);
        let s = split_triangle_three(&a, &b, &c, &pts, ct, ci, cb);
        let o = split_triangle_three_oracle(&a, &b, &c, &pts, ct, ci, cb);
        match (s, o) {
            (Ok(qs), Ok(qo)) => {
                let (ts, to) = (triple(&a, &b, &c, &qs, &pts), triple(&a, &b, &c, &qo, &pts));
                if ts == to && ts == [ct, ci, cb] && strictly_inside_triangle(&a, &b, &c, &qs) {
                    agree += 1;
                } else {
                    bad.push(format!(
                        "#{i}: sweep {ts:?} oracle {to:?} want {:?}",
                        [ct, ci, cb]
                    ));
                }
            }
            (s, o) => bad.push(format!("#{i}: sweep {:?} oracle {:?}", s.err(), o.err())),
        }
        if let Ok(q) = split_triangle_three_with(strict.as_ref(), &a, &b, &c, &pts, ct, ci, cb) {
            strict_ok += (triple(&a, &b, &c, &q, &pts) == [ct, ci, cb]) as usize;
        }
    }
    let ok = bad.is_empty();
    report(
        "oracle-sweep-vs-arrangement",
        ok,
        &format!(
            "{agree}/200 identical count triples; strict sweep alone solved {strict_ok}/200; {:?}",
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(ok);
}

#[test]
fn oracle_unavoidable_edges() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let (mut edges, mut triangulations, mut bad) = (0, 0, Vec::new());
    for s in 0..50u64 {
        let total = rng.gen_range(3..=7);
        let h = rng.gen_range(3..=total);
        let ps = random_point_set(h, total - h, 30_000 + s).unwrap();
        let all = all_triangulations(&ps.points);
        triangulations += all.len();
        if all.iter().any(|t| t.len() != 3 * total - 3 - h) {
            bad.push(format!("set {s}: enumeration produced a wrong cardinality"));
        }
        for a in 0..total {
            for b in a + 1..total {
                edges += 1;
                let expect = all.iter().all(|t| t.contains(&(a, b)));
                if is_unavoidable_edge(&ps, (a, b)) != expect {
                    bad.push(format!("set {s} edge ({a},{b})"));
                }
            }
        }
    }
    let ok = bad.is_empty();
    report(
        "oracle-unavoidable-edges",
        ok,
        &format!(
            "50 sets, {edges} edges, {triangulations} triangulations enumerated, {} disagreements",
            bad.len()
        ),
        t.elapsed(),
    );
    assert!(ok, "{bad:?}");
}

// ---- geometric invariants ----

fn check_subdivision(
    req: &CountedSubdivisionRequest,
    regions: &[Option<ConvexPolygon>],
) -> Result<(), String> {
    let poly = &req.polygon.vertices;
    let mut present = Vec::new();
    for (i, r) in regions.iter().enumerate() {
        match r {
            Some(c) => {
                if !convex_ccw(&c.vertices) {
                    return Err(format!("region {i} not convex"));
                }
                let inside = req
                    .interior
                    .iter()
                    .filter(|p| strictly_inside_convex(&c.vertices, p))
                    .count();
                if inside != req.counts[i] {
                    return Err(format!("region {i} holds {inside}, want {}", req.counts[i]));
                }
                if req.interior.iter().any(|p| on_boundary(&c.vertices, p)) {
                    return Err(format!("a point lies on the boundary of region {i}"));
                }
                if c.vertices
                    .iter()
                    .any(|v| !strictly_inside_convex(poly, v) && !on_boundary(poly, v))
                {
                    return Err(format!("region {i} leaves the polygon"));
                }
                present.push(c.vertices.clone());
            }
            None if req.counts[i] == 0 => {}
            None => return Err(format!("region {i} missing")),
        }
    }
    for i in 0..present.len() {
        for j in i + 1..present.len() {
            if convex_overlap(&present[i], &present[j]) {
                return Err(format!("regions overlap ({i},{j})"));
            }
        }
    }
    let total: Scalar = present.iter().map(|v| area2(v)).sum();
    if total != area2(poly) {
        return Err("areas do not add up".into());
    }
    Ok(())
}

#[test]
fn invariant_convex_subdivision() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    let (mut with_zero, mut bad) = (0, Vec::new());
    let mut done = 0u64;
    while done < 200 {
        let k = rng.gen_range(3..=6);
        let m = rng.gen_range(0..=9);
        let Ok(ps) = random_point_set(k, m, 40_000 + done) else {
            continue;
        };
        let Ok(ps) = perturb_to_general_plus(&ps, done) else {
            continue;
        };
        let polygon =
            ConvexPolygon::new(ps.hull.iter().map(|&i| ps.points[i].clone()).collect()).unwrap();
        let interior: Vec<Point> = ps
            .interior_indices()
            .iter()
            .map(|&i| ps.points[i].clone())
            .collect();
        let mut counts = vec![0; k];
        for _ in 0..m {
            counts[rng.gen_range(0..k)] += 1;
        }
        if counts.contains(&0) {
            with_zero += 1;
        }
        let req = CountedSubdivisionRequest::new(polygon, interior, counts.clone());
        match convex_subdivision(&req) {
            Ok(ra) => {
                if let Err(e) = check_subdivision(&req, &ra.regions) {
                    bad.push(format!("#{done} {counts:?}: {e}"));
                }
            }
            Err(e) => bad.push(format!("#{done} {counts:?}: {e}")),
        }
        done += 1;
    }
    let ok = bad.is_empty();
    report(
        "invariant-convex-subdivision",
        ok,
        &format!(
            "200 instances ({with_zero} with zero counts), {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(ok);
}

fn random_apex_input(rng: &mut ChaCha8Rng, seed: u64) -> ApexInput {
    loop {
        let k = rng.gen_range(3..=7);
        let Ok(ps) = random_point_set(k, 0, seed ^ rng.gen::<u64>()) else {
            continue;
        };
        let v: Vec<Point> = ps.hull.iter().map(|&i| ps.points[i].clone()).collect();
        let Ok(polygon) = ConvexPolygon::new_strict(v.clone()) else {
            continue;
        };
        let apexes: Vec<Point> = (0..k - 1)
            .map(|j| {
                let (a, b) = (&v[j], &v[j + 1]);
                let along = ratio(rng.gen_range(10..=90), 100);
                let out = ratio(rng.gen_range(2..=40), 100);
                let base = a + &(b - a).scale(&along);
                let normal = Point::new(&b.y - &a.y, &a.x - &b.x);
                &base + &normal.scale(&out)
            })
            .collect();
        if let Ok(input) = ApexInput::new(polygon, apexes) {
            return input;
        }
    }
}

#[test]
fn invariant_visibility_subdivision() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut bad = Vec::new();
    for s in 0..100u64 {
        let input = random_apex_input(&mut rng, s);
        let cells = match visibility_subdivision(&input) {
            Ok(c) => c,
            Err(e) => {
                bad.push(format!("#{s}: {e}"));
                continue;
            }
        };
        let total: Scalar = cells.iter().flatten().map(|c| area2(&c.vertices)).sum();
        if total != area2(&input.polygon.vertices) {
            bad.push(format!("#{s}: areas differ"));
        }
        for (i, c) in cells.iter().enumerate() {
            let Some(c) = c else { continue };
            match merged_polygon(&input, i, c) {
                Some(m) if convex_ccw(&m) => {}
                _ => bad.push(format!("#{s}: merged polygon {i} not convex")),
            }
        }
    }
    let ok = bad.is_empty();
    report(
        "invariant-visibility-subdivision",
        ok,
        &format!(
            "100 instances, {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(ok);
}

#[test]
fn invariant_triangulation_cardinality() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let mut bad = Vec::new();
    let (mut sets, mut polys) = (0, 0);
    for s in 0..60u64 {
        let h = rng.gen_range(3..=8);
        let ps = random_point_set(h, rng.gen_range(0..=10), 50_000 + s).unwrap();
        let tri = triangulate_point_set(&ps, &EdgeSet::new(ps.len())).unwrap();
        sets += 1;
        if !edge_count_ok(&ps, &tri) {
            bad.push(format!("set {s}: {} edges", tri.len()));
        }
    }
    for s in 0..20u64 {
        let n = rng.gen_range(3..=7);
        let q = random_point_set(n, n, 60_000 + s).unwrap();
        let res = compat_double_circle(&q, &HullMap::Rotation(0)).unwrap();
        sets += 2;
        let p = gen_double_circle(n).unwrap().base;
        if !edge_count_ok(&p, &res.tp) || !edge_count_ok(&q, &res.tq) {
            bad.push(format!("compat {s}"));
        }
    }
    for s in 0..60u64 {
        // star-shaped polygon around the origin
        let k = rng.gen_range(3..=14);
        let mut angles: Vec<i64> = (0..k).map(|_| rng.gen_range(0..3600)).collect();
        angles.sort();
        angles.dedup();
        if angles.len() < 3 {
            continue;
        }
        let v: Vec<Point> = angles
            .iter()
            .map(|&a| {
                let r = rng.gen_range(200..1000) as f64;
                let th = a as f64 / 3600.0 * std::f64::consts::TAU;
                Point::from_ints((r * th.cos()).round() as i64, (r * th.sin()).round() as i64)
            })
            .collect();
        let Ok(poly) = SimplePolygon::new(v) else {
            continue;
        };
        polys += 1;
        match triangulate_polygon(&poly) {
            Ok(d) if d.len() == poly.len() - 3 => {}
            Ok(d) => bad.push(format!(
                "polygon {s}: {} diagonals for {} vertices",
                d.len(),
                poly.len()
            )),
            Err(e) => bad.push(format!("polygon {s}: {e}")),
        }
    }
    let ok = bad.is_empty();
    report(
        "invariant-triangulation-cardinality",
        ok,
        &format!(
            "{sets} point-set triangulations, {polys} polygons, {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(ok);
}

// ---- determinism and formats ----

fn same_result(a: &CompatResult, b: &CompatResult) -> bool {
    a.f == b.f && a.tp == b.tp && a.tq == b.tq && a.hull_q == b.hull_q && a.chains == b.chains
}

#[test]
fn determinism_and_formats() {
    let t = Instant::now();
    let mut bad = Vec::new();
    for s in 0..10u64 {
        let n = 3 + (s as usize % 5);
        let q1 = random_point_set(n, n + 1, 70_000 + s).unwrap();
        let q2 = random_point_set(n, n + 1, 70_000 + s).unwrap();
        if q1 != q2 {
            bad.push(format!("random_point_set seed {s} not deterministic"));
        }
        let mut counts = vec![1; n];
        counts[0] = 2;
        let gdc = gen_generalized_double_circle(&GdcSpec::new(counts).unwrap()).unwrap();
        let r1 = compat_generalized(&gdc, &q1, &HullMap::Rotation(s as usize)).unwrap();
        let r2 = compat_generalized(&gdc, &q2, &HullMap::Rotation(s as usize)).unwrap();
        let text = write_compat_result(&r1);
        if text != write_compat_result(&r2) {
            bad.push(format!("compat output differs for seed {s}"));
        }
        match parse_compat_result(&text) {
            Ok(back) if same_result(&back, &r1) && write_compat_result(&back) == text => {}
            _ => bad.push(format!("compat result {s} does not round-trip")),
        }
        for decimal in [false] {
            let pts = write_points(&q1.points, decimal);
            if parse_points(&pts).ok().as_ref() != Some(&q1.points) {
                bad.push(format!("points {s} do not round-trip"));
            }
        }
        let tri = write_triangulation(&r1.tq);
        if parse_triangulation(&tri).ok().as_ref() != Some(&r1.tq) {
            bad.push(format!("triangulation {s} does not round-trip"));
        }
        match parse_gdc(&write_gdc(&gdc, false)) {
            Ok(g)
                if g.base.points == gdc.base.points
                    && g.inner == gdc.inner
                    && g.outer == gdc.outer => {}
            _ => bad.push(format!("gdc {s} does not round-trip")),
        }
        let scenes = [
            compat_scene(&gdc.base, &q1, &r1),
            gdc_scene(&gdc),
            Scene::default(),
            side_by_side(&gdc_scene(&gdc), &Scene::default()),
        ];
        for (k, sc) in scenes.iter().enumerate() {
            let svg = render_svg(sc, 50.0);
            if svg != render_svg(sc, 50.0) {
                bad.push(format!("svg {s}/{k} not deterministic"));
            }
            match roxmltree::Document::parse(&svg) {
                Ok(doc) if doc.root_element().tag_name().name() == "svg" => {}
                Ok(_) => bad.push(format!("svg {s}/{k}: wrong root")),
                Err(e) => bad.push(format!("svg {s}/{k}: {e}")),
            }
        }
    }
    let dc = gen_double_circle(5).unwrap();
    let svg = render_svg(&gdc_scene(&dc), 100.0);
    if svg.matches("#1f4fd8").count() != 10 {
        bad.push("double-circle figure lacks the blue cycle".into());
    }
    let ok = bad.is_empty();
    report(
        "determinism-and-formats",
        ok,
        &format!(
            "10 seeds, {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
        t.elapsed(),
    );
    assert!(ok);
}
