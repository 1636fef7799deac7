//! The `bistable` command line. Each subcommand writes one JSON document to
//! stdout (or `--out`); failures print a single-line JSON error on stderr.

pub mod server;

use std::path::{Path, PathBuf};

use bistable::complexes::{
    cech_filtration, degree_cech_bifiltration, degree_rips_bifiltration, full_simplex_count, kfold_cech_complex,
    rips_filtration, subdivision_bifiltration, Bigrade, DegreeRips, GridSpec, RConvention, EXPLICIT_SIMPLEX_GUARD,
};
use bistable::error::{Error, Result};
use bistable::experiments::{appendix_a, consistency, nerve_check, AppendixAConfig, ConsistencyConfig, NerveConfig};
use bistable::homology::Line;
use bistable::interleave::{
    discontinuity_demo, stability_audit, tightness_main, tightness_warmup, AuditConfig, AuditMode, Construction,
};
use bistable::io::{self, AnyBifiltration, MultColumn};
use bistable::measures::{check_pr_wass_bounds, prohorov_bruteforce, prohorov_flow, wasserstein_p};
use bistable::metric::{distance_matrix, Metric, PointCloud};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "bistable", version, about = "Density-sensitive bifiltrations and their stability")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Grid size as `KxR` lines.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long, global = true, default_value_t = 2)]
    pub maxdim: usize,
    /// l1, l2 or linf.
    #[arg(long, global = true, default_value = "l2")]
    pub metric: Metric,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// How to read the last CSV column.
    #[arg(long, global = true, value_enum, default_value_t = MultArg::Auto)]
    pub mult: MultArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultArg {
    Auto,
    Always,
    Never,
}

impl From<MultArg> for MultColumn {
    fn from(m: MultArg) -> Self {
        match m {
            MultArg::Auto => MultColumn::Auto,
            MultArg::Always => MultColumn::Always,
            MultArg::Never => MultColumn::Never,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuildMode {
    DegreeRips,
    /// The implicit flag form of degree-Rips; scales to hundreds of points.
    DegreeRipsFlag,
    DegreeCech,
    SubdivRips,
    SubdivCech,
    KfoldCech,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProhorovMethod {
    Brute,
    Flow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nested,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Rips,
    Cech,
}

/// A bifiltration JSON or a points CSV (read as degree-Rips).
#[derive(Debug, Clone, Args)]
pub struct ModuleInput {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Largest grid radius; defaults to the largest radius in the input.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Read a CSV input with closed balls.
    #[arg(long)]
    pub closed: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a bifiltration from a points CSV.
    Build {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BuildMode::DegreeRips)]
        mode: BuildMode,
        /// Divide subdivision densities by the number of points.
        #[arg(long)]
        normalize: bool,
        /// Cover multiplicity for kfold-cech.
        #[arg(long)]
        k: Option<usize>,
        /// Radius for kfold-cech.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Prohorov distance between two measures on the points of a CSV.
    Prohorov {
        points: PathBuf,
        mu: PathBuf,
        eta: PathBuf,
        #[arg(long, value_enum, default_value_t = ProhorovMethod::Flow)]
        method: ProhorovMethod,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// p-Wasserstein distance and the Prohorov bounds it implies.
    Wasserstein {
        points: PathBuf,
        mu: PathBuf,
        eta: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Hilbert function on a grid.
    Hilbert(ModuleInput),
    /// Bigraded Betti numbers on a grid.
    Betti(ModuleInput),
    /// Barcode along a line, given by `--angle/--offset` or `--through`.
    Barcode {
        #[command(flatten)]
        module: ModuleInput,
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long)]
        offset: Option<f64>,
        /// `k1,r1,k2,r2`.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        through: Option<Vec<f64>>,
    },
    /// Stability audit between two clouds.
    Audit {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Symmetric)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = ConstructionArg::Rips)]
        construction: ConstructionArg,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Round the bifiltrations onto the grid before auditing.
        #[arg(long)]
        coarsen: bool,
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// The interleaving lower-bound constructions.
    #[command(subcommand)]
    Tightness(Tightness),
    /// Multicover nerve check on seeded planar clouds.
    NerveCheck {
        #[arg(long, default_value_t = 20)]
        clouds: usize,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    #[command(subcommand)]
    Experiment(Experiment),
    /// Serve a module over HTTP.
    Serve {
        /// Bifiltration JSON or points CSV; without it only static assets are served.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static UI assets served under `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        closed: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum Tightness {
    Warmup {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    Main {
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        copies: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Annulus, noisy annulus and disc study; `--grid` sets the Hilbert grid.
    AppendixA {
        #[arg(long, default_value_t = 5)]
        coarse_step: usize,
        #[arg(long)]
        no_audits: bool,
        /// Extra barcode lines as `angle,offset`; repeatable.
        #[arg(long = "line", value_parser = parse_pair)]
        lines: Vec<(f64, f64)>,
    },
    Consistency {
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400")]
        sizes: Vec<usize>,
    },
    Discontinuity {
        #[arg(long, default_value_t = 16)]
        n_max: usize,
    },
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected KxR, got `{s}`"))?;
    let k = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let r = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if k < 2 || r < 2 {
        return Err("a grid needs at least two lines on each axis".into());
    }
    Ok((k, r))
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got `{s}`"))?;
    Ok((a.trim().parse().map_err(|_| format!("bad number `{a}`"))?, b.trim().parse().map_err(|_| format!("bad number `{b}`"))?))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Loads a module source: JSON bifiltrations as they are, CSVs as
/// degree-Rips in flag form.
pub fn load_module(path: &Path, g: &Global, closed: bool) -> Result<AnyBifiltration> {
    if is_json(path) {
        return AnyBifiltration::from_json(&io::read_json_file(path)?);
    }
    let cloud = io::read_points_file(path, g.metric, g.mult.into())?;
    let mut dr = DegreeRips::from_cloud(&cloud)?;
    if closed {
        dr = dr.with_convention(RConvention::Closed);
    }
    Ok(AnyBifiltration::Flag(dr))
}

/// `uniform(1, r_max, K, R)`; `r_max` defaults to the input's largest
/// radius, nudged up so open grades at that radius are reached.
pub fn module_grid(g: &Global, bif: &AnyBifiltration, r_max: Option<f64>, default: (usize, usize)) -> Result<GridSpec> {
    let (nk, nr) = g.grid.unwrap_or(default);
    let r_max = match r_max {
        Some(r) => r,
        None => {
            let r = bif.max_radius();
            if r > 0.0 {
                r * (1.0 + 1.0 / nr as f64)
            } else {
                1.0
            }
        }
    };
    GridSpec::uniform(1.0, r_max, nk, nr)
}

fn cloud_grid(g: &Global, cloud: &PointCloud, r_max: Option<f64>, default: (usize, usize)) -> Result<GridSpec> {
    let (nk, nr) = g.grid.unwrap_or(default);
    let r_max = r_max.unwrap_or_else(|| {
        let half = cloud.row_distances().diameter() / 2.0;
        if half > 0.0 {
            half * (1.0 + 1.0 / nr as f64)
        } else {
            1.0
        }
    });
    GridSpec::uniform(1.0, r_max, nk, nr)
}

pub fn line_from(angle: Option<f64>, offset: Option<f64>, through: Option<&[f64]>) -> Result<Line> {
    match (angle, offset, through) {
        (_, _, Some(p)) if p.len() == 4 => {
            Line::through(Bigrade::new(p[0], p[1]), Bigrade::new(p[2], p[3]))
        }
        (Some(a), Some(o), None) => Line::from_angle_offset(a, o),
        _ => Err(Error::InvalidInput("give --angle and --offset, or --through k1,r1,k2,r2".into())),
    }
}

fn with_schema(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.insert("schema".into(), io::SCHEMA.into());
    }
    v
}

/// Moves `seconds` from the payload to a log line, so reruns stay
/// byte-identical.
fn without_timing(mut report: Value) -> Value {
    if let Some(secs) = report.as_object_mut().and_then(|o| o.remove("seconds")) {
        log(&json!({ "log": "timing", "seconds": secs }));
    }
    report
}

fn build(g: &Global, input: &Path, mode: BuildMode, normalize: bool, k: Option<usize>, r: Option<f64>, r_max: Option<f64>) -> Result<Value> {
    let cloud = io::read_points_file(input, g.metric, g.mult.into())?;
    let n = cloud.total_multiplicity();
    match mode {
        BuildMode::DegreeRips => {
            let count = full_simplex_count(n, g.maxdim);
            log(&json!({ "log": "build", "mode": "degree-rips", "points": n, "maxdim": g.maxdim, "simplices": count }));
            if count > EXPLICIT_SIMPLEX_GUARD {
                log(&json!({ "log": "build", "note": "too large to list explicitly; writing the flag form" }));
                return build(g, input, BuildMode::DegreeRipsFlag, normalize, k, r, r_max);
            }
            let bif = degree_rips_bifiltration(&distance_matrix(&cloud), g.maxdim, None)?;
            Ok(match g.grid {
                Some(_) => bif.coarsen(&cloud_grid(g, &cloud, r_max, (20, 20))?).to_json(),
                None => bif.to_json(),
            })
        }
        BuildMode::DegreeRipsFlag => {
            let dr = DegreeRips::from_cloud(&cloud)?;
            Ok(match g.grid {
                Some(_) => dr.coarsen(&cloud_grid(g, &cloud, r_max, (20, 20))?).to_json(),
                None => dr.to_json(),
            })
        }
        BuildMode::DegreeCech => {
            let bif = match g.grid {
                Some(_) => {
                    let grid = cloud_grid(g, &cloud, r_max, (20, 20))?;
                    degree_cech_bifiltration(&cloud, g.maxdim, Some(&grid))?.coarsen(&grid)
                }
                None => degree_cech_bifiltration(&cloud, g.maxdim, None)?,
            };
            Ok(bif.to_json())
        }
        BuildMode::SubdivRips | BuildMode::SubdivCech => {
            let top = n.saturating_sub(1);
            let filtration = if mode == BuildMode::SubdivRips {
                rips_filtration(&distance_matrix(&cloud), top)?
            } else {
                cech_filtration(&cloud, top)?
            };
            let (bif, labels) = subdivision_bifiltration(&filtration, g.maxdim, normalize)?;
            let mut v = bif.to_json();
            v["labels"] = json!(labels);
            Ok(v)
        }
        BuildMode::KfoldCech => {
            let (Some(k), Some(r)) = (k, r) else {
                return Err(Error::InvalidInput("kfold-cech needs --k and --r".into()));
            };
            let (complex, labels) = kfold_cech_complex(&cloud, k, r, g.maxdim)?;
            Ok(json!({
                "schema": io::SCHEMA,
                "k": k,
                "r": r,
                "simplices": complex.iter().collect::<Vec<_>>(),
                "labels": labels,
            }))
        }
    }
}

fn measures(g: &Global, points: &Path, mu: &Path, eta: &Path) -> Result<(bistable::metric::FiniteMetricSpace, bistable::measures::EmpiricalMeasure, bistable::measures::EmpiricalMeasure)> {
    let cloud = io::read_points_file(points, g.metric, MultColumn::Never)?;
    Ok((
        cloud.row_distances(),
        io::measure_from_json(&io::read_json_file(mu)?)?,
        io::measure_from_json(&io::read_json_file(eta)?)?,
    ))
}

/// Runs one parsed command and returns its JSON payload.
pub fn execute(cli: &Cli) -> Result<Value> {
    let g = &cli.global;
    match &cli.command {
        Command::Build { input, mode, normalize, k, r, r_max } => build(g, input, *mode, *normalize, *k, *r, *r_max),
        Command::Prohorov { points, mu, eta, method, tol } => {
            let (space, mu, eta) = measures(g, points, mu, eta)?;
            let d = match method {
                ProhorovMethod::Brute => prohorov_bruteforce(&space, &mu, &eta)?,
                ProhorovMethod::Flow => prohorov_flow(&space, &mu, &eta, *tol)?,
            };
            let method = if *method == ProhorovMethod::Brute { "brute" } else { "flow" };
            Ok(json!({ "schema": io::SCHEMA, "method": method, "d_pr": d }))
        }
        Command::Wasserstein { points, mu, eta, p } => {
            let (space, mu, eta) = measures(g, points, mu, eta)?;
            let d = wasserstein_p(&space, &mu, &eta, *p)?;
            let bounds = check_pr_wass_bounds(&space, &mu, &eta, *p)?;
            Ok(json!({ "schema": io::SCHEMA, "p": p, "d_w": d, "bounds": bounds }))
        }
        Command::Hilbert(m) => {
            let bif = load_module(&m.input, g, m.closed)?;
            let grid = module_grid(g, &bif, m.r_max, (20, 20))?;
            Ok(bif.as_dyn().hilbert(m.degree, &grid)?.to_json())
        }
        Command::Betti(m) => {
            let bif = load_module(&m.input, g, m.closed)?;
            let grid = module_grid(g, &bif, m.r_max, (20, 20))?;
            Ok(bif.as_dyn().betti(m.degree, &grid)?.to_json())
        }
        Command::Barcode { module, angle, offset, through } => {
            let line = line_from(*angle, *offset, through.as_deref())?;
            let bif = load_module(&module.input, g, module.closed)?;
            Ok(bif.as_dyn().fibered_barcode(&line, module.degree)?.to_json())
        }
        Command::Audit { x, y, mode, construction, degree, coarsen, r_max } => {
            let x = io::read_points_file(x, g.metric, g.mult.into())?;
            let y = io::read_points_file(y, g.metric, g.mult.into())?;
            let joint = PointCloud::new(x.points().iter().chain(y.points()).cloned().collect(), g.metric)?;
            let grid = cloud_grid(g, &joint, *r_max, (20, 20))?;
            let mode = if *mode == ModeArg::Nested { AuditMode::Nested } else { AuditMode::Symmetric };
            let construction = if *construction == ConstructionArg::Rips { Construction::Rips } else { Construction::Cech };
            let mut cfg = AuditConfig::new(construction, mode, *degree, grid);
            cfg.coarsen = *coarsen;
            Ok(stability_audit(&x, &y, &cfg)?.to_json())
        }
        Command::Tightness(Tightness::Warmup { c, r0, delta, eps }) => {
            Ok(with_schema(serde_json::to_value(tightness_warmup(*c, *r0, *delta, *eps)?)?))
        }
        Command::Tightness(Tightness::Main { m, copies, c, r0, delta, eps }) => {
            Ok(with_schema(serde_json::to_value(tightness_main(*m, *copies, *c, *r0, *delta, *eps)?)?))
        }
        Command::NerveCheck { clouds, n_min, n_max } => {
            let cfg = NerveConfig { seed: g.seed, clouds: *clouds, n_min: *n_min, n_max: *n_max };
            Ok(without_timing(nerve_check(&cfg)?.to_json()))
        }
        Command::Experiment(Experiment::AppendixA { coarse_step, no_audits, lines }) => {
            let mut cfg = AppendixAConfig { seed: g.seed, coarse_step: *coarse_step, audits: !no_audits, ..Default::default() };
            if let Some((nk, nr)) = g.grid {
                if nk != nr {
                    return Err(Error::InvalidInput("the study uses a square grid".into()));
                }
                cfg.grid_lines = nk;
            }
            cfg.lines.extend(lines.iter().copied());
            Ok(without_timing(appendix_a(&cfg)?.to_json()))
        }
        Command::Experiment(Experiment::Consistency { sizes }) => {
            let cfg = ConsistencyConfig { seed: g.seed, sizes: sizes.clone(), ..Default::default() };
            Ok(consistency(&cfg)?.to_json())
        }
        Command::Experiment(Experiment::Discontinuity { n_max }) => {
            Ok(with_schema(serde_json::to_value(discontinuity_demo(*n_max)?)?))
        }
        Command::Serve { .. } => Err(Error::InvalidInput("serve does not produce a document".into())),
    }
}

/// Progress lines go to stderr so stdout keeps only the payload.
pub fn log(value: &Value) {
    eprintln!("{value}");
}

/// Machine-readable error line.
pub fn error_json(code: &str, message: &str) -> String {
    json!({ "error": code, "message": message }).to_string()
}

/// Exit status for a library error: 2 for missing or unreadable input, 1
/// otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EmptyInput | Error::Parse(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

pub fn write_output(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}
