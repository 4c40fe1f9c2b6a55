use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use compatri::compat::{compat_generalized_with, CompatError, CompatOptions, HullMap};
use compatri::exactgeom::ConvexPolygon;
use compatri::formats::{
    parse_compat_result, parse_counts, parse_gdc, parse_point_set, parse_points,
    parse_triangulation, write_assignment, write_compat_result, write_gdc, write_points,
};
use compatri::pointsets::{
    gen_double_circle, gen_generalized_double_circle, random_point_set, GdcSpec, PointSet,
};
use compatri::render::{
    compat_scene, fit_scale, gdc_scene, point_set_scene, regions_scene, render_svg,
};
use compatri::skeleton::{check_visibility_subdivision, visibility_subdivision, ApexInput};
use compatri::subdivide::{
    check_region_assignment, convex_subdivision_with, splitter, CountedSubdivisionRequest,
    SubdivisionOptions, DEFAULT_SPLITTER,
};
use compatri::swapgraph::db::{default_db_path, DB_DIR_ENV};
use compatri::swapgraph::scan::{scan_conjecture, scan_mode, ScanConfig};
use compatri::swapgraph::{intersection_rule, DEFAULT_GRAPH_BOUND, DEFAULT_RULE};
use compatri::tri::verify_compatible;

#[derive(Parser)]
#[command(
    name = "compatri",
    version,
    about = "Compatible triangulations, counted subdivisions and swap graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Counted convex subdivision of a polygon.
    Subdivide(SubdivideArgs),
    /// Visibility subdivision of a polygon with apexes.
    Skeleton(SkeletonArgs),
    /// Compatible triangulations of a generalized double circle and a target.
    Compat(CompatArgs),
    /// Check a compat result file.
    Verify(VerifyArgs),
    /// Scan an order-type database for swap-graph cycles.
    Swapgraph(SwapArgs),
    /// Write an SVG figure.
    Render {
        #[command(subcommand)]
        kind: RenderKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Double circle on `n` hull points.
    DoubleCircle {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generalized double circle with chain sizes c1,...,cn.
    Gdc {
        #[arg(long)]
        counts: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random set in general position: `hull` points on a circle and
    /// `interior` inside.
    Random {
        #[arg(long)]
        hull: usize,
        #[arg(long)]
        interior: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lossy decimal coordinates instead of exact fractions.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct SubdivideArgs {
    #[arg(long)]
    polygon: PathBuf,
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    counts: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value = DEFAULT_SPLITTER)]
    splitter: String,
}

#[derive(Args)]
struct SkeletonArgs {
    #[arg(long)]
    polygon: PathBuf,
    #[arg(long)]
    apexes: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CompatArgs {
    /// Chain sizes c1,...,cn of the source set.
    #[arg(long)]
    spec: String,
    #[arg(long)]
    target: PathBuf,
    /// Hull vertex i of the source goes to hull vertex i+k of the target.
    #[arg(long, conflicts_with = "map")]
    rotate: Option<usize>,
    /// Explicit hull images (target point indices), comma separated.
    #[arg(long)]
    map: Option<String>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, default_value = DEFAULT_SPLITTER)]
    splitter: String,
    /// Result file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the source point set here.
    #[arg(long)]
    source_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Graph,
    Heuristic,
}

#[derive(Args)]
struct SwapArgs {
    /// Database file, or a bare name like `otypes08` resolved under the
    /// database directory.
    #[arg(long)]
    db: Option<PathBuf>,
    /// Points per record.
    #[arg(long)]
    n: usize,
    /// Hull size filter; defaults to n/2.
    #[arg(long)]
    hull: Option<usize>,
    #[arg(long, value_enum, default_value = "graph")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[arg(long, default_value = DEFAULT_RULE)]
    rule: String,
    /// Second intersection rule that must give identical graphs.
    #[arg(long)]
    cross_check: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GRAPH_BOUND)]
    bound: usize,
    #[arg(long, env = DB_DIR_ENV)]
    db_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RenderKind {
    /// A point set, optionally with a triangulation file.
    Points {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// A generalized double circle with its spanning cycle.
    Gdc {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Both triangulations of a compat result.
    Compat {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Region files next to the points they split.
    Regions {
        #[arg(long, num_args = 1.., required = true)]
        regions: Vec<PathBuf>,
        #[arg(long)]
        points: Option<PathBuf>,
        #[command(flatten)]
        svg: SvgArgs,
    },
}

#[derive(Args)]
struct SvgArgs {
    #[arg(long)]
    out: PathBuf,
    /// Pixels per user unit; by default the figure is 800 pixels wide.
    #[arg(long)]
    scale: Option<f64>,
}

/// Semantic failure (exit 1), as opposed to bad input (exit 2).
#[derive(Debug)]
struct Rejected(String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn spec_of(counts: &str) -> Result<GdcSpec> {
    Ok(GdcSpec::new(parse_counts(counts)?)?)
}

fn cmd_gen(kind: GenKind) -> Result<()> {
    match kind {
        GenKind::DoubleCircle { n, out } => {
            let g = gen_double_circle(n)?;
            emit(out.out.as_deref(), &write_gdc(&g, out.decimal))
        }
        GenKind::Gdc { counts, out } => {
            let g = gen_generalized_double_circle(&spec_of(&counts)?)?;
            emit(out.out.as_deref(), &write_gdc(&g, out.decimal))
        }
        GenKind::Random {
            hull,
            interior,
            seed,
            out,
        } => {
            let ps = random_point_set(hull, interior, seed)?;
            emit(out.out.as_deref(), &write_points(&ps.points, out.decimal))
        }
    }
}

fn write_regions(dir: &Path, regions: &[Option<ConvexPolygon>]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, r) in regions.iter().enumerate() {
        let text = match r {
            Some(poly) => write_points(&poly.vertices, false),
            None => "# empty region\n".to_string(),
        };
        fs::write(dir.join(format!("region_{i}.txt")), text)?;
    }
    Ok(())
}

fn cmd_subdivide(a: SubdivideArgs) -> Result<()> {
    let polygon = ConvexPolygon::new(parse_points(&read(&a.polygon)?)?)?;
    let points = parse_points(&read(&a.points)?)?;
    let req = CountedSubdivisionRequest::new(polygon, points, parse_counts(&a.counts)?);
    let opts = SubdivisionOptions {
        splitter: splitter(&a.splitter)?,
        ..Default::default()
    };
    let ra = convex_subdivision_with(&req, &opts)?;
    check_region_assignment(&req, &ra).map_err(Rejected)?;
    write_regions(&a.out_dir, &ra.regions)?;
    let empty: Vec<bool> = ra.regions.iter().map(Option::is_none).collect();
    fs::write(
        a.out_dir.join("assignment.txt"),
        write_assignment(&ra.members, &empty),
    )?;
    println!(
        "{} regions written to {}",
        ra.regions.len(),
        a.out_dir.display()
    );
    Ok(())
}

fn cmd_skeleton(a: SkeletonArgs) -> Result<()> {
    let polygon = ConvexPolygon::new(parse_points(&read(&a.polygon)?)?)?;
    let input = ApexInput::new(polygon, parse_points(&read(&a.apexes)?)?)?;
    let cells = visibility_subdivision(&input)?;
    check_visibility_subdivision(&input, &cells).map_err(Rejected)?;
    write_regions(&a.out_dir, &cells)?;
    println!("{} regions written to {}", cells.len(), a.out_dir.display());
    Ok(())
}

fn cmd_compat(a: CompatArgs) -> Result<()> {
    let gdc = gen_generalized_double_circle(&spec_of(&a.spec)?)?;
    let q = parse_point_set(&read(&a.target)?)?;
    let f0 = match (&a.rotate, &a.map) {
        (_, Some(m)) => HullMap::Explicit(parse_counts(m)?),
        (Some(k), None) => HullMap::Rotation(*k),
        (None, None) => HullMap::Rotation(0),
    };
    let opts = CompatOptions {
        subdivision: SubdivisionOptions {
            splitter: splitter(&a.splitter)?,
            ..Default::default()
        },
        perturb_seed: a.seed,
    };
    let res = match compat_generalized_with(&gdc, &q, &f0, &opts) {
        Ok(r) => r,
        Err(CompatError::Construction(m)) => return Err(Rejected(m).into()),
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &a.source_out {
        fs::write(p, write_gdc(&gdc, false))?;
    }
    emit(a.out.as_deref(), &write_compat_result(&res))?;
    eprintln!("verified: {} edges on {} points", res.tp.len(), q.len());
    Ok(())
}

fn load_pair(
    pair: &Path,
    source: &Path,
    target: &Path,
) -> Result<(PointSet, PointSet, compatri::compat::CompatResult)> {
    let res = parse_compat_result(&read(pair)?)?;
    let p = parse_point_set(&read(source)?)?;
    let q = parse_point_set(&read(target)?)?;
    if p.len() != res.f.len() || q.len() != res.f.len() {
        bail!(
            "result has {} points, source {}, target {}",
            res.f.len(),
            p.len(),
            q.len()
        );
    }
    Ok((p, q, res))
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    let (p, q, res) = load_pair(&a.pair, &a.source, &a.target)?;
    if verify_compatible(&p, &q, &res.f, &res.tp, &res.tq) {
        println!("compatible");
        Ok(())
    } else {
        Err(Rejected("not compatible".into()).into())
    }
}

fn resolve_db(a: &SwapArgs) -> Result<PathBuf> {
    let dir = a.db_dir.as_deref();
    match &a.db {
        None => Ok(default_db_path(a.n, dir)?),
        Some(p) if p.exists() => Ok(p.clone()),
        Some(p) => {
            let named = default_db_path(a.n, dir)?;
            let stem = named.file_stem().map(|s| s.to_os_string());
            if p.components().count() == 1 && Some(p.as_os_str().to_os_string()) == stem {
                Ok(named)
            } else {
                Ok(p.clone())
            }
        }
    }
}

fn cmd_swapgraph(a: SwapArgs) -> Result<()> {
    let path = resolve_db(&a)?;
    let mode = match a.mode {
        Mode::Graph => "graph",
        Mode::Heuristic => "heuristic",
    };
    let cfg = ScanConfig {
        hull: a.hull,
        mode: scan_mode(mode)?,
        rule: intersection_rule(&a.rule)?,
        cross_check: a
            .cross_check
            .as_deref()
            .map(intersection_rule)
            .transpose()?,
        shards: a.shards,
        bound: a.bound,
    };
    let report = scan_conjecture(&path, a.n, &cfg)?;
    println!("{report}");
    if report.has_counterexample() {
        return Err(Rejected(format!(
            "counterexamples at records {:?}",
            report.counterexamples
        ))
        .into());
    }
    Ok(())
}

fn cmd_render(kind: RenderKind) -> Result<()> {
    let (scene, svg) = match kind {
        RenderKind::Points { input, edges, svg } => {
            let ps = parse_point_set(&read(&input)?)?;
            let e = edges
                .map(|p| read(&p).map(|t| parse_triangulation(&t)))
                .transpose()?
                .transpose()?;
            if let Some(e) = &e {
                if e.n != ps.len() {
                    bail!("triangulation has {} vertices, point set {}", e.n, ps.len());
                }
            }
            (point_set_scene(&ps, e.as_ref()), svg)
        }
        RenderKind::Gdc { input, svg } => (gdc_scene(&parse_gdc(&read(&input)?)?), svg),
        RenderKind::Compat {
            pair,
            source,
            target,
            svg,
        } => {
            let (p, q, res) = load_pair(&pair, &source, &target)?;
            (compat_scene(&p, &q, &res), svg)
        }
        RenderKind::Regions {
            regions,
            points,
            svg,
        } => {
            let polys = regions
                .iter()
                .map(|r| Ok(parse_points(&read(r)?)?))
                .collect::<Result<Vec<_>>>()?;
            let polys: Vec<_> = polys.into_iter().filter(|v| !v.is_empty()).collect();
            let pts = points
                .map(|p| read(&p).map(|t| parse_points(&t)))
                .transpose()?
                .transpose()?;
            (regions_scene(&polys, pts.as_deref().unwrap_or(&[])), svg)
        }
    };
    let scale = svg.scale.unwrap_or_else(|| fit_scale(&scene, 800.0));
    if !(scale.is_finite() && scale > 0.0) {
        return Err(anyhow!("scale must be positive"));
    }
    fs::write(&svg.out, render_svg(&scene, scale))
        .with_context(|| format!("writing {}", svg.out.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Subdivide(a) => cmd_subdivide(a),
        Command::Skeleton(a) => cmd_skeleton(a),
        Command::Compat(a) => cmd_compat(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Swapgraph(a) => cmd_swapgraph(a),
        Command::Render { kind } => cmd_render(kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Rejected>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
