use proptest::prelude::*;

use compatri::compat::{compat_double_circle, extract_association, HullMap};
use compatri::exactgeom::{
    convex_hull, cross3, is_general_plus_position, is_general_plus_position_bruteforce,
    line_intersection, orient, ratio, ConvexPolygon, Line, Location, Point, Sign,
};
use compatri::formats::{format_scalar, parse_points, parse_scalar, write_points};
use compatri::pointsets::{
    order_type_signature, perturb_to_general_plus, random_point_set, same_order_type, PointSet,
};
use compatri::skeleton::{check_visibility_subdivision, visibility_subdivision, ApexInput};
use compatri::subdivide::{check_region_assignment, convex_subdivision, CountedSubdivisionRequest};
use compatri::swapgraph::db::{parse_order_type_bytes, record_size, OrderTypeRecord};
use compatri::swapgraph::{
    build_state_graph, factorial, is_acyclic, perm_rank, perm_unrank, run_swap_heuristic,
    ClosedMinusShared, HeuristicOutcome, LexFirst, MatchingInstance, RandomPair,
};
use compatri::tri::{
    triangulate_point_set, verify_compatible, verify_triangulation, Correspondence, EdgeSet,
};

fn pt() -> impl Strategy<Value = Point> {
    (-50i64..=50, -50i64..=50).prop_map(|(x, y)| Point::from_ints(x, y))
}

fn rpt() -> impl Strategy<Value = Point> {
    let coord = prop_oneof![
        (-50i64..=50, 1i64..=40).prop_map(|(n, d)| ratio(n, d)),
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| ratio(n, d)),
    ];
    (coord.clone(), coord).prop_map(|(x, y)| Point::new(x, y))
}

fn matching_instance(seed: u64, n: usize) -> MatchingInstance<Point> {
    MatchingInstance::from_point_set(&random_point_set(n, n, seed).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn orientation_is_alternating(a in pt(), b in pt(), c in pt()) {
        let s = orient(&a, &b, &c);
        prop_assert_eq!(orient(&b, &c, &a), s);
        prop_assert_eq!(orient(&b, &a, &c), -s);
        prop_assert_eq!(Line::through(&a, &b).eval(&c), cross3(&a, &b, &c));
    }

    #[test]
    fn orientation_matches_rational_cross(a in rpt(), b in rpt(), c in rpt()) {
        prop_assert_eq!(orient(&a, &b, &c), Sign::of(&cross3(&a, &b, &c)));
    }

    #[test]
    fn intersection_lies_on_both_lines(a in pt(), b in pt(), c in pt(), d in pt()) {
        if let Ok(x) = line_intersection((&a, &b), (&c, &d)) {
            if let Some(p) = x.to_point() {
                prop_assert_eq!(orient(&a, &b, &p), Sign::Zero);
                prop_assert_eq!(orient(&c, &d, &p), Sign::Zero);
            }
        }
    }

    #[test]
    fn hull_encloses_every_point(pts in prop::collection::vec(pt(), 3..12)) {
        if let Ok(h) = convex_hull(&pts) {
            if h.len() >= 3 {
                let poly = ConvexPolygon::new(h.iter().map(|&i| pts[i].clone()).collect()).unwrap();
                for p in &pts {
                    prop_assert_ne!(poly.contains(p), Location::Outside);
                }
            }
        }
    }

    #[test]
    fn general_plus_fast_matches_bruteforce(pts in prop::collection::vec(pt(), 3..8)) {
        prop_assert_eq!(is_general_plus_position(&pts), is_general_plus_position_bruteforce(&pts));
    }

    #[test]
    fn scalars_round_trip(n in -10_000i64..10_000, d in 1i64..5_000) {
        let v = ratio(n, d);
        prop_assert_eq!(parse_scalar(&format_scalar(&v, false)), Some(v));
    }

    #[test]
    fn points_round_trip(pts in prop::collection::vec((pt(), 1i64..9), 0..10)) {
        let pts: Vec<Point> = pts.into_iter().map(|(p, d)| p.scale(&ratio(1, d))).collect();
        prop_assert_eq!(parse_points(&write_points(&pts, false)).unwrap(), pts);
    }

    #[test]
    fn lehmer_is_a_bijection(n in 0usize..7, r in 0usize..5040) {
        let r = r % factorial(n);
        let p = perm_unrank(r, n);
        let mut sorted = p.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(perm_rank(&p), r);
    }

    #[test]
    fn correspondence_inverse_is_involution(perm in Just((0..9usize).collect::<Vec<_>>()).prop_shuffle()) {
        let f = Correspondence::new(perm).unwrap();
        prop_assert_eq!(f.inverse().inverse(), f.clone());
        let e = EdgeSet::from_pairs(9, [(0, 1), (2, 5), (3, 8)]).unwrap();
        prop_assert_eq!(e.mapped(&f.map).mapped(&f.inverse().map), e);
    }

    #[test]
    fn db_bytes_round_trip(seed in any::<u64>(), count in 0usize..6) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut bytes = Vec::new();
        let mut kept = 0;
        while kept < count {
            let rec: Vec<u8> = (0..12).map(|_| rng.gen()).collect();
            if parse_order_type_bytes(&rec, 6).is_ok() {
                bytes.extend(rec);
                kept += 1;
            }
        }
        let recs: Vec<OrderTypeRecord> = parse_order_type_bytes(&bytes, 6).unwrap();
        prop_assert_eq!(recs.len() * record_size(6).unwrap(), bytes.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbation_keeps_order_type(h in 3usize..6, k in 0usize..6, seed in any::<u64>()) {
        let ps = random_point_set(h, k, seed).unwrap();
        let moved = perturb_to_general_plus(&ps, seed).unwrap();
        prop_assert!(is_general_plus_position(&moved.points));
        prop_assert_eq!(order_type_signature(&ps).unwrap(), order_type_signature(&moved).unwrap());
        prop_assert!(same_order_type(&ps, &moved, &(0..ps.len()).collect::<Vec<_>>()));
    }

    #[test]
    fn triangulations_have_full_cardinality(h in 3usize..8, k in 0usize..8, seed in any::<u64>()) {
        let ps = random_point_set(h, k, seed).unwrap();
        let t = triangulate_point_set(&ps, &EdgeSet::new(ps.len())).unwrap();
        prop_assert!(verify_triangulation(&ps, &t));
        prop_assert_eq!(t.len(), 3 * ps.len() - 3 - h);
    }

    #[test]
    fn counted_subdivision_postconditions(k in 3usize..6, m in 0usize..7, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let ps = perturb_to_general_plus(&random_point_set(k, m, seed).unwrap(), seed).unwrap();
        let polygon = ConvexPolygon::new(ps.hull.iter().map(|&i| ps.points[i].clone()).collect()).unwrap();
        let interior: Vec<Point> = ps.interior_indices().iter().map(|&i| ps.points[i].clone()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0; k];
        for _ in 0..m {
            counts[rng.gen_range(0..k)] += 1;
        }
        let req = CountedSubdivisionRequest::new(polygon, interior, counts);
        let ra = convex_subdivision(&req).unwrap();
        prop_assert_eq!(check_region_assignment(&req, &ra), Ok(()));
    }

    #[test]
    fn visibility_cells_tile_the_polygon(seed in any::<u64>(), out in 5i64..40) {
        let ps = random_point_set(5, 0, seed).unwrap();
        let v: Vec<Point> = ps.hull.iter().map(|&i| ps.points[i].clone()).collect();
        let apexes: Vec<Point> = (0..4)
            .map(|j| {
                let (a, b) = (&v[j], &v[j + 1]);
                &a.midpoint(b) + &Point::new(&b.y - &a.y, &a.x - &b.x).scale(&ratio(out, 100))
            })
            .collect();
        let Ok(input) = ApexInput::new(ConvexPolygon::new_strict(v).unwrap(), apexes) else {
            return Ok(());
        };
        let cells = visibility_subdivision(&input).unwrap();
        prop_assert_eq!(check_visibility_subdivision(&input, &cells), Ok(()));
    }

    #[test]
    fn double_circle_compat_any_rotation(n in 3usize..6, seed in any::<u64>(), k in 0usize..6) {
        let q = random_point_set(n, n, seed).unwrap();
        let res = compat_double_circle(&q, &HullMap::Rotation(k % n)).unwrap();
        let p: PointSet = compatri::pointsets::gen_double_circle(n).unwrap().base;
        prop_assert!(verify_compatible(&p, &q, &res.f, &res.tp, &res.tq));
        prop_assert_eq!(extract_association(&q, &res).unwrap().len(), n);
    }

    #[test]
    fn swap_graph_invariants(n in 3usize..5, seed in any::<u64>(), start in 0usize..24) {
        let inst = matching_instance(seed, n);
        let g = build_state_graph(&inst, &ClosedMinusShared, 6).unwrap();
        for (r, out) in g.adj.iter().enumerate() {
            let pi = perm_unrank(r, n);
            // sinks are exactly the disjoint matchings
            prop_assert_eq!(out.is_empty(), inst.triangles_disjoint(&ClosedMinusShared, &pi));
            for &w in out {
                // anti-symmetry
                prop_assert!(!g.has_edge(w as usize, r));
                let rho = perm_unrank(w as usize, n);
                prop_assert_eq!(pi.iter().zip(&rho).filter(|(a, b)| a != b).count(), 2);
            }
        }
        prop_assert!(is_acyclic(&g));
        let start = perm_unrank(start % factorial(n), n);
        for out in [
            run_swap_heuristic(&inst, &ClosedMinusShared, &start, &LexFirst),
            run_swap_heuristic(&inst, &ClosedMinusShared, &start, &RandomPair { seed }),
        ] {
            let HeuristicOutcome::Done { path, steps, .. } = out else {
                return Err(TestCaseError::fail("heuristic cycled"));
            };
            prop_assert!(steps < factorial(n));
            for w in path.windows(2) {
                prop_assert!(g.has_edge(perm_rank(&w[0]), perm_rank(&w[1])));
            }
        }
    }
}
