//! Command-line front end: `analyze`, `classify`, `spectrum`, `schwarz`.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::catalog::{get_map, get_metric, parse_constant, CatalogMetric};
use crate::classify::{classify_points, default_tolerance};
use crate::curvature::{ric1_potential_residual, PointGeometry};
use crate::error::{GeomError, Result};
use crate::maps::SharedMap;
use crate::metric::SampleRegion;
use crate::point::ChartPoint;
use crate::report::{matrix_json, record, write_records, Format, Record, RecordMeta};
use crate::sampling::{rng, SampleSpec};
use crate::schwarz::{aubin_yau_residual, chern_lu_residual, SchwarzIdentity};
use crate::spectra::{bisectional_min_at, operator_spectrum, rbc_range_at, spectral_bound_check_at, CurvatureOperator};
use crate::wirtinger::{DiffEngineConfig, Engine};

#[derive(Debug, Parser)]
#[command(name = "chernlab", version, about = "Chern connection curvature, classifiers, curvature operators and Schwarz-lemma identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-point metric, connection, torsion, curvature and Ricci data.
    Analyze(CommonArgs),
    /// Kähler, balanced, pluriclosed, Kähler-like and Einstein verdicts over samples.
    Classify(CommonArgs),
    /// Spectrum of the complex curvature operator and curvature bounds per point.
    Spectrum(CommonArgs),
    /// Chern–Lu (and optionally Aubin–Yau) identity terms for a holomorphic map.
    Schwarz(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Jets,
    Fd,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Metric: catalog name with optional `:key=value,...` arguments, or `file:PATH`.
    #[arg(long)]
    pub metric: String,
    /// Target metric for `schwarz` (defaults to `--metric`).
    #[arg(long)]
    pub target_metric: Option<String>,
    /// Holomorphic map for `schwarz`: catalog name or `file:PATH`.
    #[arg(long)]
    pub map: Option<String>,
    /// Explicit points, e.g. `(1,0);(0.2-0.1i,0.3)`.
    #[arg(long, conflicts_with_all = ["grid", "random"])]
    pub points: Option<String>,
    /// Lattice over the box, one factor per real coordinate `x1, y1, x2, ...`, e.g. `3x3`.
    #[arg(long, conflicts_with = "random")]
    pub grid: Option<String>,
    /// Number of seeded random points in the box.
    #[arg(long)]
    pub random: Option<usize>,
    /// Box `lo,hi` applied to every real coordinate.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bbox: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Jets)]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 1e-4)]
    pub fd_step: f64,
    #[arg(long, default_value_t = 2)]
    pub richardson: u8,
    /// Pass/fail tolerance; defaults depend on the command and engine.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (standard output by default).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Also evaluate the Aubin–Yau identity (requires an invertible map).
    #[arg(long)]
    pub aubin_yau: bool,
    /// Random samples per point for curvature bounds in `spectrum`.
    #[arg(long, default_value_t = 200)]
    pub bound_samples: usize,
}

/// Where evaluation points come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    Explicit(Vec<ChartPoint>),
    Grid { counts: Vec<usize>, lo: f64, hi: f64 },
    Random { count: usize, lo: f64, hi: f64 },
}

/// Parses `(a,b);(c,d)`; entries are complex constants such as `0.5-0.1i`.
pub fn parse_points(text: &str) -> Result<Vec<ChartPoint>> {
    let bad = |msg: String| GeomError::Config(format!("--points: {msg}"));
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ';' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| bad(format!("expected '(' at '{rest}'")))?;
        let close = body.find(')').ok_or_else(|| bad("missing ')'".into()))?;
        let coords = body[..close]
            .split(',')
            .map(|s| parse_constant(s.trim()).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<Complex64>>>()?;
        out.push(ChartPoint::new(coords)?);
        rest = &body[close + 1..];
    }
    if out.is_empty() {
        return Err(bad("no points given".into()));
    }
    Ok(out)
}

pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    let counts = text
        .split('x')
        .map(|s| s.trim().parse::<usize>().ok().filter(|&c| c > 0))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| GeomError::Config(format!("--grid must look like 3x3, got '{text}'")))?;
    Ok(counts)
}

pub fn parse_box(text: &str) -> Result<(f64, f64)> {
    let bad = || GeomError::Config(format!("--box must be lo,hi with lo < hi, got '{text}'"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Default box: the largest cube centred at 0 inside the outer radius of the region.
pub fn default_box(region: &SampleRegion, n: usize) -> (f64, f64) {
    let h = 0.99 * region.r_max / (2.0 * n as f64).sqrt();
    (-h, h)
}

/// Lattice points; factor `k` runs over real coordinate `k` (`x1, y1, x2, ...`),
/// the rest sit at the box midpoint.
pub fn grid_points(n: usize, counts: &[usize], lo: f64, hi: f64) -> Result<Vec<ChartPoint>> {
    if counts.len() > 2 * n {
        return Err(GeomError::Config(format!("--grid has {} factors, chart has {} real coordinates", counts.len(), 2 * n)));
    }
    let mid = 0.5 * (lo + hi);
    let axis = |c: usize, i: usize| if c == 1 { mid } else { lo + (hi - lo) * i as f64 / (c - 1) as f64 };
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut real = vec![mid; 2 * n];
            for (k, &c) in counts.iter().enumerate().rev() {
                real[k] = axis(c, idx % c);
                idx /= c;
            }
            ChartPoint::new((0..n).map(|a| Complex64::new(real[2 * a], real[2 * a + 1])).collect())
        })
        .collect()
}

/// Seeded uniform points in the box, accepted by `accept`.
pub fn random_points(n: usize, count: usize, lo: f64, hi: f64, seed: u64, accept: impl Fn(&[Complex64]) -> bool) -> Result<Vec<ChartPoint>> {
    use rand::Rng;
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let limit = 10_000 + 1_000 * count;
    for _ in 0..limit {
        if out.len() == count {
            return Ok(out);
        }
        let z: Vec<Complex64> = (0..n).map(|_| Complex64::new(r.gen_range(lo..hi), r.gen_range(lo..hi))).collect();
        if accept(&z) {
            out.push(ChartPoint::new(z)?);
        }
    }
    if out.len() == count {
        return Ok(out);
    }
    Err(GeomError::DomainViolation {
        field: "random point box".into(),
        point: format!("[{lo}, {hi}]^{}: only {} of {count} draws landed in the domain", 2 * n, out.len()),
    })
}

impl CommonArgs {
    pub fn engine_config(&self) -> Result<DiffEngineConfig> {
        let engine = match self.engine {
            EngineArg::Jets => Engine::Jets,
            EngineArg::Fd => Engine::FiniteDifference,
        };
        DiffEngineConfig::new(engine, self.fd_step, self.richardson)
    }

    pub fn tolerance(&self, default: f64) -> Result<f64> {
        match self.tol {
            Some(t) if !(t > 0.0 && t.is_finite()) => Err(GeomError::Config(format!("--tol must be positive, got {t}"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    pub fn point_source(&self, region: &SampleRegion, n: usize) -> Result<Option<PointSource>> {
        let (lo, hi) = match &self.bbox {
            Some(b) => parse_box(b)?,
            None => default_box(region, n),
        };
        Ok(match (&self.points, &self.grid, self.random) {
            (Some(p), _, _) => Some(PointSource::Explicit(parse_points(p)?)),
            (_, Some(g), _) => Some(PointSource::Grid { counts: parse_grid(g)?, lo, hi }),
            (_, _, Some(count)) => Some(PointSource::Random { count, lo, hi }),
            _ => None,
        })
    }
}

/// Points to evaluate, with lattice points outside the domain reported as skips.
fn resolve_points(
    source: PointSource,
    n: usize,
    seed: u64,
    accept: &dyn Fn(&[Complex64]) -> bool,
) -> Result<(Vec<ChartPoint>, Vec<ChartPoint>)> {
    let check_dim = |p: &ChartPoint| {
        if p.dim() != n {
            Err(GeomError::DimensionMismatch(format!("point has {} coordinates, chart has {n}", p.dim())))
        } else {
            Ok(())
        }
    };
    match source {
        PointSource::Explicit(pts) => {
            for p in &pts {
                check_dim(p)?;
            }
            Ok((pts, Vec::new()))
        }
        PointSource::Grid { counts, lo, hi } => {
            let (keep, skip) = grid_points(n, &counts, lo, hi)?.into_iter().partition(|p| accept(p.coords()));
            Ok((keep, skip))
        }
        PointSource::Random { count, lo, hi } => Ok((random_points(n, count, lo, hi, seed, accept)?, Vec::new())),
    }
}

#[derive(Serialize)]
struct SkipBody {
    point: Vec<[f64; 2]>,
    reason: &'static str,
}

fn skip_records(meta: &RecordMeta, skipped: &[ChartPoint]) -> Result<Vec<Record>> {
    skipped
        .iter()
        .map(|p| {
            record(meta, "skip", &SkipBody {
                point: p.pairs(),
                reason: "outside the domain",
            })
        })
        .collect()
}

fn analyze_record(m: &CatalogMetric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<Value> {
    let geo = PointGeometry::compute(m.metric.as_ref(), p.coords(), cfg)?;
    let potential = ric1_potential_residual(m.metric.as_ref(), &geo, cfg)?;
    Ok(serde_json::json!({
        "metric": m.name,
        "point": p.pairs(),
        "g": matrix_json(&geo.metric.g),
        "gamma_max": geo.gamma.max_norm(),
        "torsion_max": geo.torsion.max_norm(),
        "tau_norm": geo.torsion.tau_norm(),
        "curvature_max": geo.curvature.max_norm(),
        "curvature_cross_check": geo.curvature.cross_check,
        "conjugate_symmetry_residual": geo.curvature.conjugate_symmetry_residual(),
        "ric1": matrix_json(&geo.ricci.ric1),
        "ric2": matrix_json(&geo.ricci.ric2),
        "ric3": matrix_json(&geo.ricci.ric3),
        "ric4": matrix_json(&geo.ricci.ric4),
        "scalar2": geo.ricci.scalar2,
        "ric1_potential_residual": potential,
    }))
}

fn spectrum_record(m: &CatalogMetric, p: &ChartPoint, cfg: &DiffEngineConfig, tol: f64, samples: usize, seed: u64) -> Result<Value> {
    let geo = PointGeometry::compute(m.metric.as_ref(), p.coords(), cfg)?;
    let spectrum = operator_spectrum(&CurvatureOperator::from_geometry(&geo)?)?;
    let (rbc_min, rbc_max) = rbc_range_at(&geo, samples, seed);
    let b_min = bisectional_min_at(&geo, samples, seed);
    let bound = match spectral_bound_check_at(&geo, tol, samples, seed) {
        Ok(b) => Some(b),
        Err(GeomError::NotEinsteinNormalized(_)) => None,
        Err(e) => return Err(e),
    };
    let einstein_residual = crate::linalg::max_abs(&(&geo.ricci.ric2 - &geo.metric.g));
    Ok(serde_json::json!({
        "metric": m.name,
        "point": p.pairs(),
        "eigenvalues": spectrum.eigenvalues,
        "self_adjoint": spectrum.self_adjoint,
        "self_adjoint_residual": spectrum.self_adjoint_residual,
        "rbc_min": rbc_min,
        "rbc_max": rbc_max,
        "b_min_estimate": b_min,
        "einstein_residual": einstein_residual,
        "bound_check": bound,
    }))
}

fn schwarz_records(
    f: &SharedMap,
    source: &CatalogMetric,
    target: &CatalogMetric,
    p: &ChartPoint,
    cfg: &DiffEngineConfig,
    tol: f64,
    aubin_yau: bool,
) -> Result<Vec<Value>> {
    let (s, t) = (source.metric.as_ref(), target.metric.as_ref());
    let wrap = |r: crate::schwarz::SchwarzReport| -> Result<Value> {
        let mut v = serde_json::to_value(&r).map_err(|e| GeomError::Config(e.to_string()))?;
        let obj = v.as_object_mut().expect("reports serialize as objects");
        obj.insert("map".into(), f.label().into());
        obj.insert("source".into(), source.name.clone().into());
        obj.insert("target".into(), target.name.clone().into());
        obj.insert("pass".into(), (r.residual <= tol).into());
        Ok(v)
    };
    let mut out = vec![wrap(chern_lu_residual(f.as_ref(), s, t, p, cfg)?)?];
    if aubin_yau {
        let q = ChartPoint::new(f.apply(p.coords())?)?;
        out.push(wrap(aubin_yau_residual(f.as_ref(), s, t, &q, cfg)?)?);
    }
    Ok(out)
}

fn records_for(cmd: &Command) -> Result<Vec<Record>> {
    let (name, args) = match cmd {
        Command::Analyze(a) => ("analyze", a),
        Command::Classify(a) => ("classify", a),
        Command::Spectrum(a) => ("spectrum", a),
        Command::Schwarz(a) => ("schwarz", a),
    };
    let cfg = args.engine_config()?;
    let m = get_metric(&args.metric)?;
    let n = m.dim();
    let region = m.region();
    let source = args.point_source(&region, n)?;
    let default_tol = match cmd {
        Command::Schwarz(_) if args.aubin_yau => 1e-4,
        Command::Schwarz(_) => 1e-5,
        _ => default_tolerance(&cfg),
    };
    let tol = args.tolerance(default_tol)?;
    let meta = RecordMeta {
        command: name,
        engine: cfg.engine,
        seed: args.seed,
        tolerance: tol,
    };
    let in_domain = |z: &[Complex64]| m.metric.contains(z);

    match cmd {
        Command::Analyze(_) | Command::Spectrum(_) => {
            let source = source.ok_or_else(|| GeomError::Config("give one of --points, --grid or --random".into()))?;
            let (points, skipped) = resolve_points(source, n, args.seed, &in_domain)?;
            let bodies = points
                .par_iter()
                .enumerate()
                .map(|(i, p)| match cmd {
                    Command::Analyze(_) => analyze_record(&m, p, &cfg),
                    _ => spectrum_record(&m, p, &cfg, tol, args.bound_samples, args.seed.wrapping_add(i as u64)),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut out = bodies.iter().map(|b| record(&meta, "point", b)).collect::<Result<Vec<_>>>()?;
            out.extend(skip_records(&meta, &skipped)?);
            Ok(out)
        }
        Command::Classify(_) => {
            let spec = SampleSpec::new(50, args.seed, region);
            let points = match source {
                None => spec.points(m.metric.as_ref()),
                Some(PointSource::Random { count, .. }) if args.bbox.is_none() => {
                    SampleSpec::new(count, args.seed, region).points(m.metric.as_ref())
                }
                Some(s) => resolve_points(s, n, args.seed, &in_domain)?.0,
            };
            let spec = SampleSpec::new(points.len(), args.seed, region);
            let report = classify_points(m.metric.as_ref(), &points, &spec, &cfg, tol)?;
            Ok(vec![record(&meta, "classification", &report)?])
        }
        Command::Schwarz(_) => {
            let map_spec = args.map.as_deref().ok_or_else(|| GeomError::Config("schwarz needs --map".into()))?;
            let f = get_map(map_spec)?;
            let target = get_metric(args.target_metric.as_deref().unwrap_or(&args.metric))?;
            if args.aubin_yau && !f.has_inverse() {
                return Err(GeomError::MissingInverse);
            }
            let accept = |z: &[Complex64]| {
                m.metric.contains(z) && f.apply(z).map(|w| target.metric.contains(&w)).unwrap_or(false)
            };
            let source = source.ok_or_else(|| GeomError::Config("give one of --points, --grid or --random".into()))?;
            let (points, skipped) = resolve_points(source, n, args.seed, &accept)?;
            let bodies = points
                .par_iter()
                .map(|p| schwarz_records(&f, &m, &target, p, &cfg, tol, args.aubin_yau))
                .collect::<Result<Vec<_>>>()?;
            let mut out = Vec::new();
            for group in bodies {
                for b in group {
                    let kind = b["identity"].as_str().unwrap_or(SchwarzIdentity::ChernLu.as_str()).to_string();
                    out.push(record(&meta, &kind, &b)?);
                }
            }
            out.extend(skip_records(&meta, &skipped)?);
            Ok(out)
        }
    }
}

fn explain(e: &GeomError) -> String {
    match e {
        GeomError::MissingInverse => {
            "error: the map has no inverse; --aubin-yau needs an invertible map (identity, dilation or linear)".into()
        }
        _ => format!("error: {e}"),
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match &cli.command {
        Command::Analyze(a) | Command::Classify(a) | Command::Spectrum(a) | Command::Schwarz(a) => a,
    };
    let result = records_for(&cli.command).and_then(|records| match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| GeomError::Config(format!("cannot create {}: {e}", path.display())))?;
            write_records(&records, args.format, &mut file)
        }
        None => write_records(&records, args.format, stdout),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", explain(&e));
            e.exit_code()
        }
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            code
        }
    }
}
