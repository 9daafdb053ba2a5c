use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use heisenlab::contact::{
    grid_lipschitz, holder_exponent_estimate_with, injectivity_collision_search_limited,
    loop_integral_prediction, loop_integral_residual, nn_distance_percentile_with, rank_report_with,
    RankOptions, SampledMap,
};
use heisenlab::extension::{
    circle_bound, extend_circle_with, extend_interval_with, Domain, ExtensionOptions, PartialCurveData,
};
use heisenlab::generators::{
    curved_lift_map, identity_plane_map, isotropic_axis_map, isotropic_lift_map, lagrangian_graph_map,
    pure_t_map, quadratic_contact_map, suite_grid_size, twisted_control_map,
};
use heisenlab::horizontal::{cc_distance, cc_length, geodesic, horizontal_lift, PlanarPolyline};
use heisenlab::io;
use heisenlab::measure::{
    content_decay_experiment_with, greedy_covering, sard_covering, CloudMetric, DecayConfig, PointCloud,
};
use heisenlab::symplectic::{isometry_between_isotropic, random_isotropic, Subspace};
use heisenlab::{koranyi_dist, Error, Exec, HPoint};

use crate::config;
use crate::trace;

#[derive(Debug, Parser)]
#[command(name = "heisenlab", version, about = "Experiments on the Heisenberg group")]
pub struct Cli {
    /// JSON object of flag values for the subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run every analysis on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Horizontal lift of a planar polyline.
    Lift(LiftArgs),
    /// Carnot-Carathéodory geodesic between two points.
    Geodesic(GeodesicArgs),
    /// Lipschitz extension of knot data on an interval or circle.
    Extend(ExtendArgs),
    /// Isometry carrying one isotropic subspace onto another.
    Isometry(IsometryArgs),
    /// Contact residual, rank and isotropy at every interior grid point.
    ContactReport(ReportArgs),
    /// Loop integral of the symplectic pullback around one grid point.
    LoopResidual(LoopArgs),
    /// Ball covering and Hausdorff content of a sampled image.
    Content(ContentArgs),
    /// Covering decay of a rank-j contact map over an mdiv ladder.
    Decay(DecayArgs),
    /// Hölder exponent profile of a sampled map.
    Holder(HolderArgs),
    /// Pairs of distant grid points with nearly equal images.
    Collide(CollideArgs),
    /// Traceability table: one row per result with its check and status.
    Trace(TraceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    IsotropicLift,
    Quadratic,
    LagrangianGraph,
    CurvedLift,
    IdentityPlane,
    Twisted,
    PureT,
    IsotropicAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    Koranyi,
    Euclidean,
}

/// A point given as `x1,y1,…,t` or as `{"n":…,"z":[…],"t":…}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Coords(Vec<f64>),
    Point(HPoint),
}

impl PointSpec {
    fn resolve(&self) -> Result<HPoint> {
        Ok(match self {
            PointSpec::Coords(c) => HPoint::from_coords(c)?,
            PointSpec::Point(p) => HPoint::new(p.z().to_vec(), p.t())?,
        })
    }
}

fn parse_point(s: &str) -> std::result::Result<PointSpec, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(PointSpec::Coords)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MapArgs {
    /// Sampled map JSON: {"k","n","box","shape","values"}.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Built-in test map instead of --map.
    #[arg(long, value_enum)]
    generator: Option<Generator>,
    /// Domain dimension.
    #[arg(long, value_parser = positive_arg)]
    k: Option<usize>,
    /// Target group is Hⁿ.
    #[arg(long, value_parser = positive_arg)]
    n: Option<usize>,
    /// Isotropic dimension for generators that take one.
    #[arg(long)]
    j: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl MapArgs {
    fn load(&self) -> Result<SampledMap> {
        match (&self.map, self.generator) {
            (Some(_), Some(_)) => bail!("give either --map or --generator, not both"),
            (None, None) => bail!("one of --map or --generator is required"),
            (Some(path), None) => {
                let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let m: SampledMap = serde_json::from_reader(BufReader::new(f))
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(m)
            }
            (None, Some(g)) => {
                let k = positive(self.k.unwrap_or(2), "k")?;
                let n = positive(self.n.unwrap_or(1), "n")?;
                let j = self.j.unwrap_or(1);
                let size = self.size.unwrap_or_else(|| suite_grid_size(k));
                let seed = self.seed.unwrap_or(0);
                Ok(match g {
                    Generator::IsotropicLift => isotropic_lift_map(k, n, j, size, seed)?,
                    Generator::Quadratic => quadratic_contact_map(k, n, size, seed)?,
                    Generator::LagrangianGraph => lagrangian_graph_map(k, n, j, size, seed)?,
                    Generator::CurvedLift => {
                        if (k, n) != (2, 1) {
                            bail!("the curved-lift generator is a map ℝ² → H¹ (k = 2, n = 1)");
                        }
                        curved_lift_map(size)?
                    }
                    Generator::IdentityPlane => identity_plane_map(k, n, size)?,
                    Generator::Twisted => twisted_control_map(k, n, size, seed)?,
                    Generator::PureT => pure_t_map(k, n, size)?,
                    Generator::IsotropicAxis => isotropic_axis_map(k, n, size)?,
                })
            }
        }
    }
}

fn positive_arg(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive(v: usize, name: &str) -> Result<usize> {
    if v == 0 {
        bail!("{name} must be at least 1");
    }
    Ok(v)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct LiftArgs {
    /// Planar polyline JSON: {"samples": [[x1,y1,…],…], "closed": bool} or a bare list of points.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Height of the first point.
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    /// Output CSV (stdout if omitted); a JSON sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GeodesicArgs {
    /// Start point.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    from: Option<PointSpec>,
    /// End point.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    to: Option<PointSpec>,
    /// Relative length tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExtendArgs {
    /// Knot data JSON: {"domain": {...}, "knots": [{"param", "value"}], "lipschitz"}.
    #[arg(long)]
    knots: Option<PathBuf>,
    /// Geodesic tolerance for the bridges.
    #[arg(long)]
    tol: Option<f64>,
    /// Random parameter pairs for the measured Lipschitz constant.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct IsometryArgs {
    #[arg(long, value_parser = positive_arg)]
    n: Option<usize>,
    /// Dimension of the random isotropic subspaces.
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Source subspace JSON {"n", "basis"}; random if omitted.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Target subspace JSON {"n", "basis"}; random if omitted.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Output JSON (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    /// Residual threshold for contact points (default 10h).
    #[arg(long)]
    contact_tol: Option<f64>,
    /// Relative singular value threshold for the numeric rank.
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct LoopArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    /// Grid index `i1,i2,…` of the center (default: grid center).
    #[arg(long, value_delimiter = ',')]
    index: Option<Vec<usize>>,
    /// Loop radius (default 8h).
    #[arg(long)]
    radius: Option<f64>,
    /// The two domain axes spanning the loop plane.
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ContentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    /// Content exponent (default k).
    #[arg(long)]
    s: Option<f64>,
    /// Largest ball radius for the greedy covering (default 8h).
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    /// Use the cube covering with this many divisions per axis instead.
    #[arg(long)]
    mdiv: Option<usize>,
    /// Lipschitz constant for the cube covering (default: grid estimate).
    #[arg(long)]
    lipschitz: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DecayArgs {
    #[arg(long, value_parser = positive_arg)]
    k: Option<usize>,
    #[arg(long, value_parser = positive_arg)]
    n: Option<usize>,
    /// Rank of the test map.
    #[arg(long)]
    j: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    size: Option<usize>,
    /// Divisions per axis, e.g. 2,4,8,16,32.
    #[arg(long, value_delimiter = ',')]
    mdiv: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HolderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CollideArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    /// Image distance threshold (default: the --quantile of nearest-neighbour distances).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    quantile: Option<f64>,
    /// Minimum domain distance (default: --delta-spacings grid spacings).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_spacings: Option<f64>,
    /// Stop after this many pairs.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TraceArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Lift(a) => lift(config::merge(&a, cfg)?),
        Command::Geodesic(a) => geodesic_cmd(config::merge(&a, cfg)?),
        Command::Extend(a) => extend(config::merge(&a, cfg)?, exec),
        Command::Isometry(a) => isometry(config::merge(&a, cfg)?),
        Command::ContactReport(a) => contact_report(config::merge(&a, cfg)?, exec),
        Command::LoopResidual(a) => loop_residual(config::merge(&a, cfg)?),
        Command::Content(a) => content(config::merge(&a, cfg)?, exec),
        Command::Decay(a) => decay(config::merge(&a, cfg)?, exec),
        Command::Holder(a) => holder(config::merge(&a, cfg)?, exec),
        Command::Collide(a) => collide(config::merge(&a, cfg)?, exec),
        Command::Trace(a) => {
            let a = config::merge(&a, cfg)?;
            let rows = trace::run(a.seed.unwrap_or(0));
            let failed = rows.iter().filter(|r| !r.passed).count();
            trace::write_csv(sink(&a.out)?, &rows)?;
            if failed > 0 {
                bail!("{failed} trace checks failed");
            }
            Ok(())
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Buffered writer on `out`, or on stdout.
fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            if path.extension().is_some_and(|e| e == "json") {
                bail!("{}: CSV output must not use the .json extension reserved for sidecars", path.display());
            }
            Box::new(io::create(path)?)
        }
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

/// JSON sidecar next to `out`, or one line on stderr.
fn sidecar<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    match out {
        Some(path) => io::write_json_file(&io::sidecar_path(path), value)?,
        None => eprintln!("{}", serde_json::to_string(value)?),
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().with_context(|| format!("missing required --{flag}"))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlanarInput {
    Full {
        samples: Vec<Vec<f64>>,
        #[serde(default)]
        closed: bool,
    },
    Bare(Vec<Vec<f64>>),
}

fn lift(a: LiftArgs) -> Result<()> {
    let input: PlanarInput = read_json(&required(&a.curve, "curve")?)?;
    let planar = match input {
        PlanarInput::Full { samples, closed } => PlanarPolyline::new(samples, closed)?,
        PlanarInput::Bare(samples) => PlanarPolyline::new(samples, false)?,
    };
    let t0 = a.t0.unwrap_or(0.0);
    let curve = horizontal_lift(&planar, t0);
    io::write_curve_csv(sink(&a.out)?, &curve)?;
    #[derive(Serialize)]
    struct Summary {
        t0: f64,
        length: f64,
        t_gap: f64,
        closed: bool,
    }
    sidecar(
        &a.out,
        &Summary {
            t0,
            length: cc_length(&curve),
            t_gap: curve.end().t() - curve.start().t(),
            closed: curve.is_closed(),
        },
    )
}

fn geodesic_cmd(a: GeodesicArgs) -> Result<()> {
    let p = required(&a.from, "from")?.resolve()?;
    let q = required(&a.to, "to")?.resolve()?;
    let tol = a.tol.unwrap_or(1e-8);
    let distance = cc_distance(&p, &q, tol)?;
    let curve = geodesic(&p, &q, tol)?;
    io::write_curve_csv(sink(&a.out)?, &curve)?;
    #[derive(Serialize)]
    struct Summary {
        distance: f64,
        koranyi: f64,
        polyline_length: f64,
        vertices: usize,
        tol: f64,
    }
    sidecar(
        &a.out,
        &Summary {
            distance,
            koranyi: koranyi_dist(&p, &q)?,
            polyline_length: cc_length(&curve),
            vertices: curve.samples().len(),
            tol,
        },
    )
}

fn extend(a: ExtendArgs, exec: Exec) -> Result<()> {
    let raw: PartialCurveData = read_json(&required(&a.knots, "knots")?)?;
    let data = PartialCurveData::new(raw.domain, raw.knots, raw.lipschitz)?;
    data.check_lipschitz()?;
    let mut opts = ExtensionOptions::default();
    if let Some(tol) = a.tol {
        opts.geodesic.tol = tol;
    }
    let (e, bound) = match data.domain {
        Domain::Interval { .. } => (extend_interval_with(&data, &opts, exec)?, data.lipschitz),
        Domain::Circle { .. } => (extend_circle_with(&data, &opts, exec)?, circle_bound(data.lipschitz)),
    };
    let measured = e.measured_lipschitz(a.pairs.unwrap_or(2000), a.seed.unwrap_or(0), exec)?;
    io::write_curve_csv(sink(&a.out)?, e.curve())?;
    #[derive(Serialize)]
    struct Summary {
        declared_lipschitz: f64,
        bound: f64,
        measured_lipschitz: f64,
        knot_agreement: f64,
        vertices: usize,
    }
    sidecar(
        &a.out,
        &Summary {
            declared_lipschitz: data.lipschitz,
            bound,
            measured_lipschitz: measured,
            knot_agreement: e.knot_agreement(),
            vertices: e.curve().samples().len(),
        },
    )
}

fn isometry(a: IsometryArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0));
    let n = a.n.unwrap_or(1);
    let j = a.j.unwrap_or(1);
    let mut pick = |path: &Option<PathBuf>| -> Result<Subspace> {
        match path {
            Some(p) => read_json(p),
            None => {
                if j == 0 || j > n {
                    return Err(Error::InvalidArgument(format!("need 1 ≤ j ≤ n, got j = {j}, n = {n}")).into());
                }
                Ok(random_isotropic(n, j, &mut rng))
            }
        }
    };
    let v = pick(&a.source)?;
    let w = pick(&a.target)?;
    let phi = isometry_between_isotropic(&v, &w)?;
    let image_residual = v
        .basis()
        .iter()
        .map(|b| w.residual(&phi.apply_vec(b)))
        .fold(0.0, f64::max);
    #[derive(Serialize)]
    struct Output<'a> {
        source: &'a Subspace,
        target: &'a Subspace,
        isometry: &'a heisenlab::symplectic::HIsometry,
        orthogonality_defect: f64,
        symplectic_defect: f64,
        image_residual: f64,
    }
    let out = Output {
        source: &v,
        target: &w,
        isometry: &phi,
        orthogonality_defect: phi.orthogonality_defect(),
        symplectic_defect: phi.symplectic_defect(),
        image_residual,
    };
    let mut w: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(io::create(path)?),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    serde_json::to_writer_pretty(&mut w, &out)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn contact_report(a: ReportArgs, exec: Exec) -> Result<()> {
    let m = a.map.load()?;
    let mut opts = RankOptions::for_map(&m);
    if let Some(t) = a.contact_tol {
        opts.contact_tol = t;
    }
    if let Some(t) = a.rank_tol {
        opts.rank_tol = t;
    }
    let report = rank_report_with(&m, &opts, exec);
    io::write_report_csv(sink(&a.out)?, &m, &report)?;
    #[derive(Serialize)]
    struct Summary {
        k: usize,
        n: usize,
        interior_points: usize,
        contact_points: usize,
        contact_tol: f64,
        rank_tol: f64,
        max_residual: f64,
        max_contact_rank: usize,
        flagged: usize,
    }
    sidecar(
        &a.out,
        &Summary {
            k: m.k(),
            n: m.n(),
            interior_points: report.points.len(),
            contact_points: report.contact_points,
            contact_tol: opts.contact_tol,
            rank_tol: opts.rank_tol,
            max_residual: report.max_residual(),
            max_contact_rank: report.max_contact_rank(),
            flagged: report.flagged.len(),
        },
    )
}

fn loop_residual(a: LoopArgs) -> Result<()> {
    let m = a.map.load()?;
    let idx = a.index.clone().unwrap_or_else(|| m.shape().iter().map(|s| s / 2).collect());
    let axes = a.axes.clone().unwrap_or_else(|| vec![0, 1]);
    let [a0, a1] = axes[..] else {
        bail!("--axes takes exactly two axes, got {axes:?}");
    };
    let r = a.radius.unwrap_or(8.0 * m.max_spacing());
    let value = loop_integral_residual(&m, &idx, r, (a0, a1))?;
    let prediction = loop_integral_prediction(&m, &idx, r, (a0, a1))?;
    let mut out = csv::Writer::from_writer(sink(&a.out)?);
    out.write_record(["idx", "axis_a", "axis_b", "radius", "loop", "prediction", "relative_error"])?;
    let rel = if prediction != 0.0 {
        fmt((value - prediction).abs() / prediction.abs())
    } else {
        String::new()
    };
    out.write_record([
        idx.iter().map(usize::to_string).collect::<Vec<_>>().join(":"),
        a0.to_string(),
        a1.to_string(),
        fmt(r),
        fmt(value),
        fmt(prediction),
        rel,
    ])?;
    out.flush()?;
    Ok(())
}

fn content(a: ContentArgs, exec: Exec) -> Result<()> {
    let m = a.map.load()?;
    #[derive(Serialize)]
    struct Summary {
        method: &'static str,
        s: f64,
        r_max: Option<f64>,
        mdiv: Option<usize>,
        lipschitz: Option<f64>,
        c_observed: Option<f64>,
        balls: usize,
        max_radius: f64,
        content: f64,
    }
    let (covering, summary) = if let Some(mdiv) = a.mdiv {
        let j = a.map.j.unwrap_or(m.n().min(m.k()));
        let lipschitz = a.lipschitz.unwrap_or_else(|| grid_lipschitz(&m).0);
        let sc = sard_covering(&m, j, mdiv, lipschitz)?;
        let s = a.s.unwrap_or(sc.covering.s);
        let summary = Summary {
            method: "cube",
            s,
            r_max: None,
            mdiv: Some(mdiv),
            lipschitz: Some(lipschitz),
            c_observed: Some(sc.c_observed),
            balls: sc.covering.balls.len(),
            max_radius: sc.covering.max_radius(),
            content: sc.covering.content_at(s),
        };
        (sc.covering, summary)
    } else {
        let metric = match a.metric.unwrap_or(MetricArg::Koranyi) {
            MetricArg::Koranyi => CloudMetric::Koranyi,
            MetricArg::Euclidean => CloudMetric::Euclidean,
        };
        let cloud = PointCloud::from_map(&m, metric);
        let s = a.s.unwrap_or(m.k() as f64);
        let r_max = a.r_max.unwrap_or(8.0 * m.max_spacing());
        let c = greedy_covering(&cloud, s, r_max, exec)?;
        let summary = Summary {
            method: "greedy",
            s,
            r_max: Some(r_max),
            mdiv: None,
            lipschitz: None,
            c_observed: None,
            balls: c.balls.len(),
            max_radius: c.max_radius(),
            content: c.content(),
        };
        (c, summary)
    };
    io::write_covering_csv(sink(&a.out)?, &covering)?;
    sidecar(&a.out, &summary)
}

fn decay(a: DecayArgs, exec: Exec) -> Result<()> {
    let k = a.k.unwrap_or(2);
    let n = a.n.unwrap_or(1);
    if n == 0 || k <= n {
        return Err(Error::HypothesisViolation { k, n }.into());
    }
    let mut config = DecayConfig::new(k, n, a.j.unwrap_or(1), a.seed.unwrap_or(0));
    if let Some(size) = a.size {
        config.size = size;
    }
    if let Some(mdivs) = &a.mdiv {
        config.mdivs = mdivs.clone();
    }
    let table = content_decay_experiment_with(&config, exec)?;
    io::write_decay_csv(sink(&a.out)?, &table)?;
    sidecar(&a.out, &io::DecaySidecar::from(&table))
}

fn holder(a: HolderArgs, exec: Exec) -> Result<()> {
    let m = a.map.load()?;
    let est = holder_exponent_estimate_with(&m, exec)?;
    let mut out = csv::Writer::from_writer(sink(&a.out)?);
    out.write_record(["axis", "step", "separation", "max_dist", "beta"])?;
    for p in &est.profile {
        out.write_record([
            p.axis.to_string(),
            p.step.to_string(),
            fmt(p.separation),
            fmt(p.max_dist),
            fmt(p.beta),
        ])?;
    }
    out.flush()?;
    #[derive(Serialize)]
    struct Summary {
        alpha_hat: f64,
        scales: usize,
    }
    sidecar(
        &a.out,
        &Summary {
            alpha_hat: est.alpha_hat,
            scales: est.profile.len(),
        },
    )
}

fn collide(a: CollideArgs, exec: Exec) -> Result<()> {
    let m = a.map.load()?;
    let quantile = a.quantile.unwrap_or(0.01);
    let eps = match a.eps {
        Some(e) => e,
        None => nn_distance_percentile_with(&m, quantile, exec)?,
    };
    let delta = a
        .delta
        .unwrap_or(a.delta_spacings.unwrap_or(10.0) * m.max_spacing());
    let limit = a.limit.unwrap_or(10_000);
    let pairs = injectivity_collision_search_limited(&m, eps, delta, limit, exec);
    let label = |f: usize| {
        m.multi_index(f)
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(":")
    };
    let mut out = csv::Writer::from_writer(sink(&a.out)?);
    out.write_record(["a", "b", "image_distance", "domain_distance"])?;
    for &(i, j) in &pairs {
        out.write_record([
            label(i),
            label(j),
            fmt(heisenlab::heisenberg::koranyi_dist_coords(m.value(i), m.value(j))),
            fmt(m.domain_dist(i, j)),
        ])?;
    }
    out.flush()?;
    #[derive(Serialize)]
    struct Summary {
        eps: f64,
        delta: f64,
        pairs: usize,
        limit: usize,
        truncated: bool,
    }
    sidecar(
        &a.out,
        &Summary {
            eps,
            delta,
            pairs: pairs.len(),
            limit,
            truncated: pairs.len() >= limit,
        },
    )
}
