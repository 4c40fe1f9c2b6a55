//! Conjecture scans over order-type records.

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::db::{DbError, DbReader, OrderTypeRecord};
use super::{
    build_state_graph, factorial, intersection_rule, is_acyclic, perm_unrank, run_swap_heuristic,
    IntersectionRule, LexFirst, MatchingInstance, SwapError, DEFAULT_GRAPH_BOUND, DEFAULT_RULE,
};
use crate::exactgeom::IntPoint;
use crate::registry::Registry;

/// Verdict for one record.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecordVerdict {
    pub acyclic: bool,
    pub asymmetric_swaps: usize,
    /// Sinks that are not disjoint matchings or vice versa.
    pub sink_mismatches: usize,
    /// Heuristic mode: longest run.
    pub max_steps: usize,
    /// Set when the cross-check rule gives a different graph.
    pub rule_disagreement: bool,
}

pub trait ScanMode: Send + Sync {
    fn name(&self) -> &'static str;
    fn analyze(
        &self,
        inst: &MatchingInstance<IntPoint>,
        rule: &dyn IntersectionRule,
        bound: usize,
    ) -> Result<RecordVerdict, SwapError>;
}

/// Full state graph plus DAG check.
pub struct GraphMode;

impl ScanMode for GraphMode {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn analyze(
        &self,
        inst: &MatchingInstance<IntPoint>,
        rule: &dyn IntersectionRule,
        bound: usize,
    ) -> Result<RecordVerdict, SwapError> {
        let g = build_state_graph(inst, rule, bound)?;
        let mut v = RecordVerdict {
            acyclic: is_acyclic(&g),
            asymmetric_swaps: g.asymmetric_swaps,
            ..Default::default()
        };
        for (r, out) in g.adj.iter().enumerate() {
            let pi = perm_unrank(r, g.n);
            if out.is_empty() != inst.triangles_disjoint(rule, &pi) {
                v.sink_mismatches += 1;
            }
            for &w in out {
                if g.has_edge(w as usize, r) {
                    v.asymmetric_swaps += 1;
                }
            }
        }
        Ok(v)
    }
}

/// Lex-first heuristic from every starting matching.
pub struct HeuristicMode;

impl ScanMode for HeuristicMode {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn analyze(
        &self,
        inst: &MatchingInstance<IntPoint>,
        rule: &dyn IntersectionRule,
        bound: usize,
    ) -> Result<RecordVerdict, SwapError> {
        let n = inst.n();
        if n > bound {
            return Err(SwapError::TooLarge(n, bound));
        }
        let mut v = RecordVerdict {
            acyclic: true,
            ..Default::default()
        };
        for r in 0..factorial(n) {
            let out = run_swap_heuristic(inst, rule, &perm_unrank(r, n), &LexFirst);
            v.max_steps = v.max_steps.max(out.steps());
            if out.is_cycle() {
                v.acyclic = false;
            }
        }
        Ok(v)
    }
}

pub fn scan_modes() -> &'static Registry<dyn ScanMode> {
    static REG: OnceLock<Registry<dyn ScanMode>> = OnceLock::new();
    REG.get_or_init(|| {
        let r: Registry<dyn ScanMode> = Registry::new("scan mode");
        r.register("graph", Arc::new(GraphMode));
        r.register("heuristic", Arc::new(HeuristicMode));
        r
    })
}

pub fn scan_mode(name: &str) -> Result<Arc<dyn ScanMode>, SwapError> {
    scan_modes()
        .lookup(name)
        .map_err(SwapError::UnknownStrategy)
}

#[derive(Clone)]
pub struct ScanConfig {
    /// Hull size to keep; defaults to half the point count.
    pub hull: Option<usize>,
    pub mode: Arc<dyn ScanMode>,
    pub rule: Arc<dyn IntersectionRule>,
    /// Second rule whose graph must agree with `rule`.
    pub cross_check: Option<Arc<dyn IntersectionRule>>,
    pub shards: usize,
    pub bound: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            hull: None,
            mode: scan_mode("graph").expect("registered"),
            rule: intersection_rule(DEFAULT_RULE).expect("registered"),
            cross_check: None,
            shards: 1,
            bound: DEFAULT_GRAPH_BOUND,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanReport {
    pub mode: String,
    pub records: usize,
    /// Records passing the hull filter.
    pub scanned: usize,
    pub acyclic: usize,
    /// Record indices (in file order) that failed.
    pub counterexamples: Vec<usize>,
    pub asymmetric_swaps: usize,
    pub sink_mismatches: usize,
    pub rule_disagreements: usize,
    pub max_steps: usize,
    pub wall_time: Duration,
}

impl ScanReport {
    fn absorb(&mut self, index: usize, v: &RecordVerdict) {
        self.scanned += 1;
        if v.acyclic {
            self.acyclic += 1;
        } else {
            self.counterexamples.push(index);
        }
        self.asymmetric_swaps += v.asymmetric_swaps;
        self.sink_mismatches += v.sink_mismatches;
        self.rule_disagreements += v.rule_disagreement as usize;
        self.max_steps = self.max_steps.max(v.max_steps);
    }

    pub fn has_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} scanned, {} acyclic", self.scanned, self.acyclic)?;
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "records: {}", self.records)?;
        writeln!(f, "hull_filtered: {}", self.scanned)?;
        writeln!(f, "counterexamples: {}", self.counterexamples.len())?;
        writeln!(f, "asymmetric_swaps: {}", self.asymmetric_swaps)?;
        writeln!(f, "sink_mismatches: {}", self.sink_mismatches)?;
        writeln!(f, "rule_disagreements: {}", self.rule_disagreements)?;
        if self.mode == "heuristic" {
            writeln!(f, "max_steps: {}", self.max_steps)?;
        }
        write!(f, "wall_time_ms: {}", self.wall_time.as_millis())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error(transparent)]
    Db(#[from] DbError),
    #[error("record {0}: {1}")]
    Record(usize, SwapError),
}

/// Instance from a record, with hull vertices in counterclockwise order.
pub fn instance_of(rec: &OrderTypeRecord) -> Option<MatchingInstance<IntPoint>> {
    let hull = rec.hull();
    if 2 * hull.len() != rec.points.len() {
        return None;
    }
    let interior = (0..rec.points.len())
        .filter(|i| !hull.contains(i))
        .map(|i| rec.points[i])
        .collect();
    MatchingInstance::new(hull.iter().map(|&i| rec.points[i]).collect(), interior).ok()
}

fn analyze_one(
    cfg: &ScanConfig,
    inst: &MatchingInstance<IntPoint>,
) -> Result<RecordVerdict, SwapError> {
    let mut v = cfg.mode.analyze(inst, cfg.rule.as_ref(), cfg.bound)?;
    if let Some(other) = &cfg.cross_check {
        let a = build_state_graph(inst, cfg.rule.as_ref(), cfg.bound)?;
        let b = build_state_graph(inst, other.as_ref(), cfg.bound)?;
        v.rule_disagreement = a.adj != b.adj;
    }
    Ok(v)
}

/// Scans in-memory records. Shards are contiguous index ranges; results are
/// merged in index order, so the report does not depend on `shards`.
pub fn scan_records(
    records: &[OrderTypeRecord],
    cfg: &ScanConfig,
) -> Result<ScanReport, ScanError> {
    let start = Instant::now();
    let mut report = ScanReport {
        mode: cfg.mode.name().to_string(),
        records: records.len(),
        ..Default::default()
    };
    let keep = |r: &OrderTypeRecord| {
        let h = r.hull().len();
        match cfg.hull {
            Some(want) => h == want && 2 * h == r.points.len(),
            None => 2 * h == r.points.len(),
        }
    };
    let chosen: Vec<(usize, MatchingInstance<IntPoint>)> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| keep(r))
        .filter_map(|(i, r)| instance_of(r).map(|inst| (i, inst)))
        .collect();
    let verdicts: Vec<Result<RecordVerdict, ScanError>> = if cfg.shards <= 1 {
        chosen
            .iter()
            .map(|(i, inst)| analyze_one(cfg, inst).map_err(|e| ScanError::Record(*i, e)))
            .collect()
    } else {
        let chunk = chosen.len().div_ceil(cfg.shards).max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.shards)
            .build()
            .expect("thread pool");
        pool.install(|| {
            chosen
                .par_chunks(chunk)
                .flat_map_iter(|c| {
                    c.iter().map(|(i, inst)| {
                        analyze_one(cfg, inst).map_err(|e| ScanError::Record(*i, e))
                    })
                })
                .collect()
        })
    };
    for ((i, _), v) in chosen.iter().zip(verdicts) {
        report.absorb(*i, &v?);
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Streams a database file and scans records whose hull holds half the points.
pub fn scan_conjecture(path: &Path, n: usize, cfg: &ScanConfig) -> Result<ScanReport, ScanError> {
    let start = Instant::now();
    let records: Vec<OrderTypeRecord> = DbReader::open(path, n)?.collect::<Result<_, _>>()?;
    let mut report = scan_records(&records, cfg)?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Counts records by hull size (index = hull size).
pub fn hull_histogram(path: &Path, n: usize) -> Result<Vec<usize>, DbError> {
    let mut hist = vec![0; n + 1];
    for r in DbReader::open(path, n)? {
        hist[r?.hull().len()] += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swapgraph::db::write_order_type_db;

    fn rec(pts: &[(i64, i64)]) -> OrderTypeRecord {
        OrderTypeRecord {
            points: pts.iter().map(|&(x, y)| IntPoint::new(x, y)).collect(),
        }
    }

    fn sample() -> Vec<OrderTypeRecord> {
        vec![
            // triangle with three interior points
            rec(&[(0, 0), (100, 0), (50, 90), (40, 20), (60, 25), (50, 50)]),
            // convex hexagon: filtered out
            rec(&[(0, 10), (10, 0), (30, 0), (40, 10), (30, 20), (10, 20)]),
            rec(&[(0, 0), (200, 10), (90, 180), (70, 40), (120, 60), (95, 110)]),
        ]
    }

    #[test]
    fn empty_scan() {
        let r = scan_records(&[], &ScanConfig::default()).unwrap();
        assert_eq!((r.records, r.scanned, r.acyclic), (0, 0, 0));
        assert!(r.to_string().starts_with("0 scanned, 0 acyclic"));
    }

    #[test]
    fn filters_and_shards_agree() {
        let recs = sample();
        let one = scan_records(&recs, &ScanConfig::default()).unwrap();
        assert_eq!((one.records, one.scanned, one.acyclic), (3, 2, 2));
        assert_eq!((one.asymmetric_swaps, one.sink_mismatches), (0, 0));
        let many = scan_records(
            &recs,
            &ScanConfig {
                shards: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(
            (many.scanned, many.acyclic, many.counterexamples),
            (2, 2, vec![])
        );
    }

    #[test]
    fn heuristic_and_cross_check() {
        let cfg = ScanConfig {
            mode: scan_mode("heuristic").unwrap(),
            cross_check: Some(intersection_rule("open-interior").unwrap()),
            ..Default::default()
        };
        let r = scan_records(&sample(), &cfg).unwrap();
        assert_eq!((r.scanned, r.acyclic, r.rule_disagreements), (2, 2, 0));
    }

    #[test]
    fn file_scan_matches_memory_scan() {
        let dir = tempdir();
        let path = dir.join("otypes06.b08");
        write_order_type_db(&path, 6, &sample()).unwrap();
        let r = scan_conjecture(&path, 6, &ScanConfig::default()).unwrap();
        assert_eq!((r.records, r.scanned), (3, 2));
        assert_eq!(hull_histogram(&path, 6).unwrap(), vec![0, 0, 0, 2, 0, 0, 1]);
        std::fs::remove_dir_all(dir).ok();
    }

    fn tempdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("compatri-scan-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }
}
