//! The `bml` experiment driver.
//!
//! Every subcommand writes its result files plus a `manifest.json` (or
//! `<file>.manifest.json` when `--out` names a single file) with the
//! parameters, seed and sha256 of each output. Result records are
//! JSON-lines by default, CSV with `--format csv`.
//!
//! `--config FILE` reads flat `key = value` lines and splices them in as
//! `--key value` ahead of the command-line flags, which therefore win.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance::{self, CRITERIA, DEFAULT_SEED};
use crate::csbp::{laplace_transform, merge_count_mean, sample_merge_ppp, survival_probability, CsbpSampler};
use crate::error::{Error, Result};
use crate::geodesic::{
    box_dimension, enumerate_geodesics, frame_box_dimension, sample_pairs, star_census, SnakeMapSpace, Space,
};
use crate::gff::{
    frame_fraction, geodesic_overlay, random_boundary_pairs, sample_dgff, write_overlay_csv, write_overlay_svg,
    WeightedMetric, DEFAULT_GAMMA,
};
use crate::manifest::RunManifest;
use crate::planar_map::{label_distances, sample_quadrangulation, QuadFile};
use crate::rng::RngStream;
use crate::snake_map::{quotient_metric_with_cap, read_dmat, write_dmat, DEFAULT_POINT_CAP};
use crate::stats::mean_se;
use crate::stochastic::sample_snake;

#[derive(Debug, Parser)]
#[command(name = "bml", version, about = "Brownian map experiments", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Master seed; required by every stochastic command.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    /// Output directory, or a file path for single-artifact commands.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Brownian snake and its discretized map (binary distance matrix).
    #[command(args_override_self = true)]
    SampleSnake(SnakeArgs),
    /// Uniform quadrangulation via the CVS bijection (JSON half-edge tables).
    #[command(args_override_self = true)]
    SampleQuad(QuadArgs),
    /// Monte Carlo check of the CSBP Laplace and survival laws.
    #[command(args_override_self = true)]
    Csbp(CsbpArgs),
    /// Monte Carlo check of the merge Poisson point process counts.
    #[command(args_override_self = true)]
    MergePpp(MergeArgs),
    /// Discrete GFF, its vertex-weight metric and a geodesic overlay.
    #[command(args_override_self = true)]
    Gff(GffArgs),
    /// Geodesic analytics on a stored map.
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Run the acceptance suite and print a pass/fail table.
    #[command(args_override_self = true)]
    Acceptance(AcceptanceArgs),
}

#[derive(Debug, Args, Serialize)]
struct SnakeArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
    cap: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct QuadArgs {
    /// Number of faces.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct CsbpArgs {
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    y0: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct MergeArgs {
    /// Depth threshold.
    #[arg(long, default_value_t = 0.1)]
    w: f64,
    /// Boundary length.
    #[arg(long, default_value_t = 0.5)]
    ell: f64,
    /// Smallest simulated depth (defaults to `w`).
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct GffArgs {
    /// Side of the box, frame included.
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Random frame-to-frame geodesics in the overlay.
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeArgs {
    /// A quadrangulation (`.json`) or a snake-map dump (`.bin`).
    #[arg(long)]
    input: PathBuf,
    /// Random pairs for geodesic bundles.
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    /// Geodesics listed per pair before truncating.
    #[arg(long, default_value_t = 1000)]
    cap: usize,
    /// Random centers for the star census.
    #[arg(long, default_value_t = 10)]
    centers: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Star radius; defaults to a tenth of the sampled diameter.
    #[arg(long)]
    radius: Option<f64>,
    /// Box-counting scales, comma separated; defaults to a geometric ladder.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct AcceptanceArgs {
    #[arg(long, default_value = "primary", value_parser = ["primary"])]
    suite: String,
    /// Criterion numbers to run, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u32>>,
    #[command(flatten)]
    common: Common,
}

/// Runs the driver on `argv` (program name first) and returns the exit
/// code: 0 on success, 1 when a run or a check fails, 2 on usage errors.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    run_with(&argv, &mut std::io::stdout())
}

/// [`run`] with the table and summaries discarded; `args` excludes the
/// program name.
pub fn run_quiet(args: &[String]) -> i32 {
    let mut argv = vec!["bml".to_string()];
    argv.extend_from_slice(args);
    run_with(&argv, &mut std::io::sink())
}

fn run_with(argv: &[String], console: &mut (dyn Write + Send)) -> i32 {
    let argv = match splice_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, console) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

/// Replaces `--config FILE` by the file's `key = value` lines, placed right
/// after the subcommand so later flags override them.
fn splice_config(argv: &[String]) -> std::result::Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or("--config needs a file")?.clone());
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let injected = config_args(&text).map_err(|e| format!("{path}: {e}"))?;
    let at = rest.len().min(2);
    rest.splice(at..at, injected);
    Ok(rest)
}

fn config_args(text: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(format!("line {}: expected key = value", no + 1))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_') {
            return Err(format!("line {}: bad key {key:?}", no + 1));
        }
        if key == "config" {
            return Err(format!("line {}: config files do not nest", no + 1));
        }
        out.push(format!("--{}", key.replace('_', "-")));
        out.push(value.trim().to_string());
    }
    Ok(out)
}

type Outcome = std::result::Result<bool, Failure>;

fn dispatch(command: Command, console: &mut (dyn Write + Send)) -> Outcome {
    let threads = match &command {
        Command::SampleSnake(a) => a.common.threads,
        Command::SampleQuad(a) => a.common.threads,
        Command::Csbp(a) => a.common.threads,
        Command::MergePpp(a) => a.common.threads,
        Command::Gff(a) => a.common.threads,
        Command::Analyze(a) => a.common.threads,
        Command::Acceptance(a) => a.common.threads,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Failure::Usage(e.to_string()))?;
    pool.install(|| match command {
        Command::SampleSnake(a) => sample_snake_cmd(a, console),
        Command::SampleQuad(a) => sample_quad_cmd(a, console),
        Command::Csbp(a) => csbp_cmd(a, console),
        Command::MergePpp(a) => merge_ppp_cmd(a, console),
        Command::Gff(a) => gff_cmd(a, console),
        Command::Analyze(a) => analyze_cmd(a, console),
        Command::Acceptance(a) => acceptance_cmd(a, console),
    })
}

fn require_seed(common: &Common) -> std::result::Result<u64, Failure> {
    common.seed.ok_or_else(|| Failure::Usage("--seed is required for this command".into()))
}

/// Where a command writes: a directory, or one named file whose siblings
/// share its stem.
struct Sink {
    dir: PathBuf,
    file: Option<PathBuf>,
    format: Format,
    manifest: RunManifest,
}

impl Sink {
    fn open<A: Serialize>(command: &str, args: &A, common: &Common) -> std::result::Result<Self, Failure> {
        let target = match &common.out {
            Some(p) => p.clone(),
            None => {
                let root = std::env::var_os("BML_DATA_DIR").map_or_else(|| PathBuf::from("bml-data"), PathBuf::from);
                let tag = common.seed.map_or_else(|| "default".to_string(), |s| s.to_string());
                root.join(format!("{command}-{tag}"))
            }
        };
        let (dir, file) = if target.extension().is_some() {
            let dir = target.parent().map(Path::to_path_buf).unwrap_or_default();
            (dir, Some(target))
        } else {
            (target, None)
        };
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(&dir)?;
        }
        let mut manifest = RunManifest::new(command, common.seed);
        if let Value::Object(map) = serde_json::to_value(args).map_err(Error::from)? {
            flatten_params("", &map, &mut manifest.parameters);
        }
        Ok(Self { dir, file, format: common.format, manifest })
    }

    /// Path of the main artifact.
    fn primary(&self, default_name: &str) -> PathBuf {
        self.file.clone().unwrap_or_else(|| self.dir.join(default_name))
    }

    /// Path of a secondary artifact.
    fn sibling(&self, name: &str) -> PathBuf {
        match &self.file {
            Some(f) => {
                let stem = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                self.dir.join(format!("{stem}.{name}"))
            }
            None => self.dir.join(name),
        }
    }

    fn records(&self) -> std::result::Result<RecordWriter, Failure> {
        let name = match self.format {
            Format::Json => "results.jsonl",
            Format::Csv => "results.csv",
        };
        RecordWriter::create(self.sibling(name), self.format)
    }

    fn record(&mut self, path: &Path) -> std::result::Result<(), Failure> {
        Ok(self.manifest.record_output(path)?)
    }

    fn finish(mut self) -> std::result::Result<PathBuf, Failure> {
        self.manifest.finish();
        let path = match &self.file {
            Some(f) => {
                let name = f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                self.dir.join(format!("{name}.manifest.json"))
            }
            None => self.dir.join("manifest.json"),
        };
        self.manifest.write(&path)?;
        Ok(path)
    }
}

fn flatten_params(prefix: &str, map: &serde_json::Map<String, Value>, out: &mut BTreeMap<String, String>) {
    for (k, v) in map {
        match v {
            Value::Object(inner) => flatten_params(prefix, inner, out),
            Value::Null => {}
            Value::String(s) => {
                out.insert(format!("{prefix}{k}"), s.clone());
            }
            other => {
                out.insert(format!("{prefix}{k}"), other.to_string());
            }
        }
    }
}

/// JSON-lines records are written and flushed one at a time; CSV needs the
/// union of keys for its header, so its rows are held until `close`.
struct RecordWriter {
    path: PathBuf,
    format: Format,
    json: Option<BufWriter<File>>,
    rows: Vec<serde_json::Map<String, Value>>,
}

impl RecordWriter {
    fn create(path: PathBuf, format: Format) -> std::result::Result<Self, Failure> {
        let json = match format {
            Format::Json => Some(BufWriter::new(File::create(&path)?)),
            Format::Csv => None,
        };
        Ok(Self { path, format, json, rows: Vec::new() })
    }

    fn push(&mut self, record: Value) -> std::result::Result<(), Failure> {
        match (&mut self.json, record) {
            (Some(w), rec) => {
                serde_json::to_writer(&mut *w, &rec).map_err(Error::from)?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
            (None, Value::Object(map)) => self.rows.push(map),
            (None, other) => {
                let mut map = serde_json::Map::new();
                map.insert("value".into(), other);
                self.rows.push(map);
            }
        }
        Ok(())
    }

    fn close(self, sink: &mut Sink) -> std::result::Result<(), Failure> {
        if self.format == Format::Csv {
            let mut keys: Vec<String> = Vec::new();
            for row in &self.rows {
                for k in row.keys() {
                    if !keys.contains(k) {
                        keys.push(k.clone());
                    }
                }
            }
            let mut w = csv::Writer::from_path(&self.path).map_err(csv_error)?;
            w.write_record(&keys).map_err(csv_error)?;
            for row in &self.rows {
                let cells = keys.iter().map(|k| match row.get(k) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                });
                w.write_record(cells).map_err(csv_error)?;
            }
            w.flush()?;
        } else if let Some(mut w) = self.json {
            w.flush()?;
        }
        sink.record(&self.path)
    }
}

fn csv_error(e: csv::Error) -> Failure {
    Failure::Run(Error::Io(std::io::Error::other(e)))
}

fn report(console: &mut (dyn Write + Send), manifest: &Path) {
    let _ = writeln!(console, "manifest: {}", manifest.display());
}

fn sample_snake_cmd(a: SnakeArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = require_seed(&a.common)?;
    let mut sink = Sink::open("sample-snake", &a, &a.common)?;
    let snake = sample_snake(a.n, a.length, RngStream::new(seed, 0))?;
    let map = quotient_metric_with_cap(&snake, a.cap)?;
    let path = sink.primary("map.bin");
    let mut w = BufWriter::new(File::create(&path)?);
    write_dmat(&map, seed, &mut w)?;
    w.flush()?;
    drop(w);
    sink.record(&path)?;
    let diameter = map.dmat().iter().copied().fold(0.0, f64::max);
    let mut rec = sink.records()?;
    rec.push(json!({
        "n": map.len(),
        "root_index": map.root_index,
        "dual_root_index": map.dual_root_index,
        "min_label": snake.min_label(),
        "diameter": diameter,
        "non_generic": map.non_generic,
    }))?;
    rec.close(&mut sink)?;
    let _ = writeln!(console, "snake map: {} points, diameter {diameter:.4}", map.len());
    report(console, &sink.finish()?);
    Ok(true)
}

fn sample_quad_cmd(a: QuadArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = require_seed(&a.common)?;
    let mut sink = Sink::open("sample-quad", &a, &a.common)?;
    let (tree, q) = sample_quadrangulation(a.n, RngStream::new(seed, 0))?;
    let path = sink.primary("quadrangulation.json");
    let file = QuadFile::from_quad(&q, Some(seed));
    fs::write(&path, serde_json::to_string(&file).map_err(Error::from)? + "\n")?;
    sink.record(&path)?;
    let radius = label_distances(&tree).into_iter().max().unwrap_or(0);
    let mut rec = sink.records()?;
    rec.push(json!({
        "n_faces": q.n_faces,
        "n_vertices": q.n_vertices,
        "n_edges": q.n_edges(),
        "root_half_edge": q.root_half_edge,
        "pointed_vertex": q.pointed_vertex,
        "radius_from_pointed_vertex": radius,
    }))?;
    rec.close(&mut sink)?;
    let _ = writeln!(console, "quadrangulation: {} faces, {} vertices, radius {radius}", q.n_faces, q.n_vertices);
    report(console, &sink.finish()?);
    Ok(true)
}

fn csbp_cmd(a: CsbpArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = require_seed(&a.common)?;
    if a.reps < 2 {
        return Err(Failure::Usage("--reps must be at least 2".into()));
    }
    let mut sink = Sink::open("csbp", &a, &a.common)?;
    let sampler = CsbpSampler::new(a.alpha, a.c, a.dt)?;
    let values: Vec<f64> = (0..a.reps)
        .into_par_iter()
        .map(|r| sampler.marginals(a.y0, &[a.t], RngStream::for_replica(seed, "csbp", r))[0])
        .collect();
    let laplace: Vec<f64> = values.iter().map(|y| (-a.lambda * y).exp()).collect();
    let alive: Vec<f64> = values.iter().map(|&y| f64::from(y > 0.0)).collect();
    let (m, s) = (mean_se(&laplace), mean_se(&alive));
    let target = laplace_transform(a.alpha, a.c, a.y0, a.lambda, a.t);
    let survival_target = survival_probability(a.alpha, a.c, a.y0, a.t);
    let mut rec = sink.records()?;
    rec.push(json!({
        "quantity": "laplace",
        "alpha": a.alpha, "c": a.c, "y0": a.y0, "t": a.t, "lambda": a.lambda,
        "reps": a.reps, "dt": a.dt,
        "estimate": m.mean, "se": m.se, "target": target,
    }))?;
    rec.push(json!({
        "quantity": "survival",
        "alpha": a.alpha, "c": a.c, "y0": a.y0, "t": a.t,
        "reps": a.reps, "dt": a.dt,
        "estimate": s.mean, "se": s.se, "target": survival_target,
    }))?;
    rec.close(&mut sink)?;
    let _ = writeln!(
        console,
        "E exp(-lambda Y_t) = {:.5} +- {:.5} (target {target:.5}); P(Y_t > 0) = {:.5} (target {survival_target:.5})",
        m.mean, m.se, s.mean
    );
    report(console, &sink.finish()?);
    Ok(true)
}

fn merge_ppp_cmd(a: MergeArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = require_seed(&a.common)?;
    let x_min = a.x_min.unwrap_or(a.w);
    if !(x_min > 0.0 && x_min <= a.w) {
        return Err(Failure::Usage("--x-min must lie in (0, w]".into()));
    }
    if a.reps < 2 {
        return Err(Failure::Usage("--reps must be at least 2".into()));
    }
    let mut sink = Sink::open("merge-ppp", &a, &a.common)?;
    let counts: Vec<f64> = (0..a.reps)
        .into_par_iter()
        .map(|r| sample_merge_ppp(x_min, RngStream::for_replica(seed, "merge-ppp", r)).map(|p| p.count_above(a.w, a.ell) as f64))
        .collect::<Result<_>>()?;
    let m = mean_se(&counts);
    let var = counts.iter().map(|c| (c - m.mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    let target = merge_count_mean(a.w, a.ell);
    let mut rec = sink.records()?;
    rec.push(json!({
        "w": a.w, "ell": a.ell, "x_min": x_min, "reps": a.reps,
        "mean": m.mean, "se": m.se, "variance": var, "target": target,
    }))?;
    rec.close(&mut sink)?;
    let _ = writeln!(console, "mean count {:.5} +- {:.5} (target {target:.5}), variance {var:.5}", m.mean, m.se);
    report(console, &sink.finish()?);
    Ok(true)
}

fn gff_cmd(a: GffArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = require_seed(&a.common)?;
    let mut sink = Sink::open("gff", &a, &a.common)?;
    sink.manifest.param(
        "normalization",
        "unit conductances, zero boundary: covariance is the inverse of (4 I - A) on the interior",
    );
    let field = sample_dgff(a.n, RngStream::new(seed, 0))?;
    let metric = WeightedMetric::new(&field, a.gamma)?;
    let pairs = random_boundary_pairs(&field, a.pairs, RngStream::new(seed, 1));
    let overlay = geodesic_overlay(&metric, &pairs)?;

    let field_path = sink.sibling("field.csv");
    let mut w = BufWriter::new(File::create(&field_path)?);
    field.write_csv(&mut w)?;
    w.flush()?;
    drop(w);
    sink.record(&field_path)?;
    let overlay_path = sink.sibling("overlay.csv");
    let mut w = BufWriter::new(File::create(&overlay_path)?);
    write_overlay_csv(a.n, &overlay, &mut w)?;
    w.flush()?;
    drop(w);
    sink.record(&overlay_path)?;
    let svg_path = sink.sibling("overlay.svg");
    let mut w = BufWriter::new(File::create(&svg_path)?);
    write_overlay_svg(&field, &overlay, &mut w)?;
    w.flush()?;
    drop(w);
    sink.record(&svg_path)?;

    let fraction = frame_fraction(&metric, &overlay);
    let mut rec = sink.records()?;
    for &(p, q) in &pairs {
        let dist = metric.distances_from(q)[p];
        rec.push(json!({"kind": "pair", "a": p, "b": q, "length": metric.vertex_length(p, q, dist)}))?;
    }
    rec.push(json!({"kind": "summary", "n": a.n, "gamma": a.gamma, "pairs": pairs.len(), "frame_fraction": fraction}))?;
    rec.close(&mut sink)?;
    let _ = writeln!(console, "GFF n = {}: {} geodesics cover {:.4} of the box", a.n, pairs.len(), fraction);
    report(console, &sink.finish()?);
    Ok(true)
}

fn analyze_cmd(a: AnalyzeArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = require_seed(&a.common)?;
    let is_dump = a.input.extension().is_some_and(|e| e == "bin");
    if is_dump {
        let (header, d) = read_dmat(File::open(&a.input)?)?;
        let space = SnakeMapSpace::from_matrix(header.n, &d)?;
        analyze_space(&space, &a, seed, "snake-map", console)
    } else {
        let file: QuadFile = serde_json::from_str(&fs::read_to_string(&a.input)?).map_err(Error::from)?;
        let q = file.into_quad()?;
        analyze_space(&q, &a, seed, "quadrangulation", console)
    }
}

fn analyze_space<S: Space>(space: &S, a: &AnalyzeArgs, seed: u64, kind: &str, console: &mut (dyn Write + Send)) -> Outcome {
    let mut sink = Sink::open("analyze", a, &a.common)?;
    sink.manifest.param("input_kind", kind);
    let pairs = sample_pairs(space, a.pairs, RngStream::new(seed, 0))?;
    let bundles = pairs
        .par_iter()
        .map(|&(p, q)| enumerate_geodesics(space, p, q, None, a.cap))
        .collect::<Result<Vec<_>>>()?;
    let diameter = bundles.iter().map(|b| b.length).fold(0.0, f64::max);
    let mut rec = sink.records()?;
    for b in &bundles {
        let sig = b.signature;
        rec.push(json!({
            "kind": "bundle",
            "a": b.endpoints.0,
            "b": b.endpoints.1,
            "length": b.length,
            "geodesics": b.paths.len(),
            "truncated": b.truncated,
            "i": sig.map(|s| s.i), "j": sig.map(|s| s.j), "k": sig.map(|s| s.k),
        }))?;
    }
    let radius = a.radius.unwrap_or_else(|| {
        let r = diameter / 10.0;
        if space.is_integral() {
            r.round().max(1.0)
        } else {
            r
        }
    });
    if radius > 0.0 && a.k >= 2 && a.centers > 0 {
        for s in star_census(space, a.k, radius, a.centers, RngStream::new(seed, 1))? {
            rec.push(json!({"kind": "star", "center": s.center, "k": s.k, "radius": s.disjoint_radius, "skipped": s.skipped}))?;
        }
    }
    let scales = match &a.scales {
        Some(s) => s.clone(),
        None => {
            let top = (diameter / 4.0).max(1.0);
            (0..5).map(|i| top / 2f64.powi(4 - i)).collect()
        }
    };
    if a.pairs > 0 {
        match frame_box_dimension(space, a.pairs, &scales, RngStream::new(seed, 2)) {
            Ok(f) => rec.push(json!({"kind": "frame", "slope": f.slope, "stderr": f.stderr, "scales": f.scales, "counts": f.counts}))?,
            Err(Error::InvalidArgument(msg)) => rec.push(json!({"kind": "frame", "skipped": msg}))?,
            Err(e) => return Err(e.into()),
        }
        let all: Vec<usize> = (0..space.len()).collect();
        match box_dimension(space, &all, &scales) {
            Ok(f) => rec.push(json!({"kind": "space", "slope": f.slope, "stderr": f.stderr, "scales": f.scales, "counts": f.counts}))?,
            Err(Error::InvalidArgument(msg)) => rec.push(json!({"kind": "space", "skipped": msg}))?,
            Err(e) => return Err(e.into()),
        }
    }
    rec.close(&mut sink)?;
    let _ = writeln!(console, "{kind}: {} points, {} bundles, longest pair {diameter}", space.len(), bundles.len());
    report(console, &sink.finish()?);
    Ok(true)
}

fn acceptance_cmd(a: AcceptanceArgs, console: &mut (dyn Write + Send)) -> Outcome {
    let seed = a.common.seed.unwrap_or(DEFAULT_SEED);
    let ids = a.only.clone().unwrap_or_else(|| CRITERIA.to_vec());
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        return Err(Failure::Usage(format!("no acceptance criterion {bad}")));
    }
    let mut sink = Sink::open("acceptance", &a, &a.common)?;
    sink.manifest.seed = Some(seed);
    let mut rec = sink.records()?;
    let mut failure = None;
    let reports = acceptance::run_suite(&ids, seed, |r| {
        let _ = writeln!(console, "{}", r.line());
        let _ = console.flush();
        if let Err(e) = serde_json::to_value(r).map_err(Error::from).map_err(Failure::from).and_then(|v| rec.push(v)) {
            failure.get_or_insert(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    rec.close(&mut sink)?;
    let passed = reports.iter().filter(|r| r.passed).count();
    let _ = writeln!(console, "{passed} / {} criteria passed", reports.len());
    report(console, &sink.finish()?);
    Ok(passed == reports.len())
}
