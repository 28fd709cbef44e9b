//! Command implementations behind the `quadsolid` binary.
//!
//! Every command returns a [`RunReport`], printed as JSON on stdout.
//! Diagnostics go to stderr and the process exit code encodes the outcome:
//! 0 success, 1 failed checks, 2 parse error, 3 unbounded solid, 4 I/O.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use quadsolid::classics::{self, circumscribed_box_volume};
use quadsolid::cubature::volume_by_octree;
use quadsolid::mesh::{build_wireframe, triangulate_patch, write_obj, WireMesh};
use quadsolid::montecarlo::{self, Method};
use quadsolid::revenge::{self, CurvedPiece, ReportConfig};
use quadsolid::{dsl, parallel, Aabb, ImplicitSolid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// JSON numbers with 17 significant digits; NaN and infinities become `null`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn ser_num<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_number(*v)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// A parameter echoed back in the report.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
    Nums(Vec<f64>),
    Missing,
}

impl Serialize for Input {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Input::Num(v) => ser_num(v, s),
            Input::Int(v) => s.serialize_u64(*v),
            Input::Text(t) => s.serialize_str(t),
            Input::Flag(b) => s.serialize_bool(*b),
            Input::Nums(vs) => {
                let raw = format!("[{}]", vs.iter().map(|v| format_number(*v)).collect::<Vec<_>>().join(","));
                RawValue::from_string(raw).map_err(serde::ser::Error::custom)?.serialize(s)
            }
            Input::Missing => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultEntry {
    pub name: String,
    #[serde(serialize_with = "ser_num")]
    pub value: f64,
    #[serde(serialize_with = "ser_num")]
    pub error_bound_or_stderr: f64,
    pub method: String,
}

impl ResultEntry {
    pub fn new(name: &str, value: f64, error: f64, method: &str) -> Self {
        Self {
            name: name.into(),
            value,
            error_bound_or_stderr: error,
            method: method.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(serialize_with = "ser_num")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_num")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_num")]
    pub tolerance: f64,
}

impl Check {
    /// `pass` is `|lhs − rhs| ≤ tolerance`; NaN anywhere fails.
    pub fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: (lhs - rhs).abs() <= tolerance,
            lhs,
            rhs,
            tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Input>,
    pub results: Vec<ResultEntry>,
    pub checks: Vec<Check>,
    pub wall_time_ms: u64,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            results: Vec::new(),
            checks: Vec::new(),
            wall_time_ms: 0,
        }
    }

    fn input(&mut self, key: &str, value: Input) -> &mut Self {
        self.inputs.insert(key.into(), value);
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn result(&self, name: &str) -> Option<&ResultEntry> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Unbounded(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Invalid(_) => EXIT_PARSE,
            CliError::Unbounded(_) => EXIT_UNBOUNDED,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<quadsolid::Error> for CliError {
    fn from(e: quadsolid::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "quadsolid", version, about = "Volumes of solids bounded by quadric inequalities")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "QS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume of a solid read from a .solid file.
    Volume(VolumeArgs),
    /// Closed-form decomposition of the three-hyperboloid solid with numerical cross-checks.
    Revenge(RevengeArgs),
    /// Bicylinder and tricylinder volumes.
    Classics(ClassicsArgs),
    /// Write the boundary wireframe as OBJ.
    Mesh(MeshArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VolumeMethod {
    Mc,
    Octree,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "octree")]
    pub method: VolumeMethod,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 4_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Octree absolute tolerance.
    #[arg(long, default_value_t = 2e-3)]
    pub tol: f64,
    /// Enclosing box as `xlo,xhi,ylo,yhi,zlo,zhi`.
    #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
    pub bbox: Option<Aabb>,
    #[arg(long, default_value_t = 12)]
    pub max_depth: u32,
}

#[derive(Debug, Args)]
pub struct RevengeArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Bicylinder,
    Tricylinder,
}

#[derive(Debug, Args)]
pub struct ClassicsArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Angle between the bicylinder axes in degrees.
    #[arg(long, default_value_t = 90.0)]
    pub angle: f64,
    #[arg(long, default_value_t = 4_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Octree tolerance on the volume divided by the enclosing box volume.
    #[arg(long, default_value_t = 2e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 12)]
    pub max_depth: u32,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Rulings per family on each curved piece.
    #[arg(long, default_value_t = 17)]
    pub rulings: usize,
    /// Also emit triangulated surface patches.
    #[arg(long)]
    pub patches: bool,
    /// Grid resolution of each patch.
    #[arg(long, default_value_t = 16)]
    pub patch_resolution: usize,
}

pub fn parse_bbox(s: &str) -> Result<Aabb, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 6 {
        return Err(format!("expected 6 comma-separated numbers, got {}", v.len()));
    }
    let b = Aabb::new([v[0], v[2], v[4]], [v[1], v[3], v[5]]).map_err(|e| e.to_string())?;
    if !b.is_solid() {
        return Err("bbox needs lo < hi on every axis".into());
    }
    Ok(b)
}

/// Runs a parsed command line. The report is returned alongside the exit
/// code so callers can print it even when checks fail.
pub fn run(cli: &Cli) -> Result<(RunReport, i32), CliError> {
    let start = Instant::now();
    let mut report = parallel::with_threads(cli.threads, || match &cli.command {
        Command::Volume(a) => cmd_volume(a),
        Command::Revenge(a) => cmd_revenge(a),
        Command::Classics(a) => cmd_classics(a),
        Command::Mesh(a) => cmd_mesh(a),
    })?;
    report.input("threads", cli.threads.map_or(Input::Missing, |t| Input::Int(t as u64)));
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    let code = if report.all_pass() { EXIT_OK } else { EXIT_CHECKS_FAILED };
    Ok((report, code))
}

fn bbox_input(b: &Aabb) -> Input {
    Input::Nums(vec![b.lo[0], b.hi[0], b.lo[1], b.hi[1], b.lo[2], b.hi[2]])
}

pub fn load_solid(path: &Path) -> Result<ImplicitSolid, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    dsl::parse(&text).map_err(|e| CliError::Parse(format!("{}:{e}", path.display())))
}

pub fn cmd_volume(a: &VolumeArgs) -> Result<RunReport, CliError> {
    let solid = load_solid(&a.file)?;
    let region = match a.bbox {
        Some(b) => b,
        None => solid.enclosure().ok_or_else(|| {
            CliError::Unbounded(format!(
                "{}: could not certify a bounding box; pass --bbox",
                a.file.display()
            ))
        })?,
    };
    if !region.is_solid() {
        return Err(CliError::Unbounded(format!(
            "{}: enclosing box is flat; the solid has no volume to sample",
            a.file.display()
        )));
    }
    let mut r = RunReport::new("volume");
    r.input("file", Input::Text(a.file.display().to_string()))
        .input("bbox", bbox_input(&region));
    match a.method {
        VolumeMethod::Mc => {
            r.input("method", Input::Text("mc".into()))
                .input("n", Input::Int(a.n))
                .input("seed", Input::Int(a.seed));
            let e = montecarlo::estimate(&solid, &region, a.n, a.seed)?;
            r.results.push(ResultEntry::new("volume", e.value, e.stderr, Method::MonteCarlo.as_str()));
        }
        VolumeMethod::Octree => {
            r.input("method", Input::Text("octree".into()))
                .input("tol", Input::Num(a.tol))
                .input("max_depth", Input::Int(a.max_depth.into()));
            let q = volume_by_octree(&solid, &region, a.tol, a.max_depth)?;
            r.results.push(ResultEntry::new("volume", q.value, q.abs_error_bound, Method::Cubature.as_str()));
            r.checks.push(Check::new("octree_bound_within_tol", q.abs_error_bound, 0.0, a.tol));
        }
    }
    Ok(r)
}

pub fn cmd_revenge(a: &RevengeArgs) -> Result<RunReport, CliError> {
    let mut cfg = ReportConfig::new(a.tol);
    cfg.mc_samples = a.n;
    cfg.seed = a.seed;
    let d = revenge::full_report_with(&cfg)?;
    let mut r = RunReport::new("revenge");
    r.input("tol", Input::Num(a.tol))
        .input("n", Input::Int(a.n))
        .input("seed", Input::Int(a.seed));
    let closed = Method::ClosedForm.as_str();
    let cub = Method::Cubature.as_str();
    for (name, v) in [
        ("vol_pi1", d.vol_pi1),
        ("vol_pi2", d.vol_pi2),
        ("I", d.i),
        ("I1", d.i1),
        ("I2", d.i2),
        ("V1", d.v1),
        ("total", d.total),
    ] {
        r.results.push(ResultEntry::new(name, v, 0.0, closed));
    }
    for (name, q) in [
        ("I_quadrature", d.i_quadrature),
        ("I1_quadrature", d.i1_quadrature),
        ("I2_quadrature", d.i2_quadrature),
        ("li", d.li),
    ] {
        r.results.push(ResultEntry::new(name, q.value, q.abs_error_bound, cub));
    }
    if let Some(e) = &d.monte_carlo {
        r.results.push(ResultEntry::new("total_mc", e.value, e.stderr, Method::MonteCarlo.as_str()));
    }
    if let Some(q) = &d.octree {
        r.results.push(ResultEntry::new("total_octree", q.value, q.abs_error_bound, cub));
    }
    for c in &d.cross_checks {
        r.checks.push(Check::new(&c.name, c.lhs, c.rhs, c.tolerance));
    }
    if !d.converged {
        r.checks.push(Check::new("quadratures_converged", 0.0, 1.0, 0.0));
    }
    Ok(r)
}

fn degrees_to_angle(deg: f64) -> f64 {
    if deg == 90.0 {
        FRAC_PI_2
    } else {
        deg.to_radians()
    }
}

pub fn cmd_classics(a: &ClassicsArgs) -> Result<RunReport, CliError> {
    let mut r = RunReport::new("classics");
    r.input("radius", Input::Num(a.radius))
        .input("n", Input::Int(a.n))
        .input("seed", Input::Int(a.seed))
        .input("tol", Input::Num(a.tol))
        .input("max_depth", Input::Int(a.max_depth.into()));
    let mc = Method::MonteCarlo.as_str();
    let cub = Method::Cubature.as_str();
    match a.shape {
        Shape::Bicylinder => {
            r.input("shape", Input::Text("bicylinder".into()))
                .input("angle_deg", Input::Num(a.angle));
            let angle = degrees_to_angle(a.angle);
            let solid = classics::bicylinder(a.radius, angle)?;
            let box_volume = circumscribed_box_volume(a.radius, angle)?;
            let region = solid.bbox().expect("bicylinder carries its box");
            let q = volume_by_octree(&solid, &region, a.tol * box_volume, a.max_depth)?;
            let ratio = classics::bicylinder_box_ratio(a.radius, angle, a.n, a.seed)?;
            r.results.push(ResultEntry::new("volume", q.value, q.abs_error_bound, cub));
            r.results.push(ResultEntry::new(
                "volume_mc",
                ratio.ratio * box_volume,
                ratio.stderr * box_volume,
                mc,
            ));
            r.results.push(ResultEntry::new("box_volume", box_volume, 0.0, Method::ClosedForm.as_str()));
            let octree_ratio = q.value / box_volume;
            r.results.push(ResultEntry::new("box_ratio", octree_ratio, q.abs_error_bound / box_volume, cub));
            r.results.push(ResultEntry::new("box_ratio_mc", ratio.ratio, ratio.stderr, mc));
            if angle == FRAC_PI_2 {
                r.checks.push(Check::new("box_ratio_two_thirds", octree_ratio, 2.0 / 3.0, 2e-3));
            } else {
                r.checks.push(Check::new("box_ratio_two_thirds", ratio.ratio, 2.0 / 3.0, 5e-3));
            }
            r.checks.push(Check::new(
                "octree_vs_mc",
                q.value,
                ratio.ratio * box_volume,
                q.abs_error_bound + 4.0 * ratio.stderr * box_volume,
            ));
        }
        Shape::Tricylinder => {
            r.input("shape", Input::Text("tricylinder".into()));
            let solid = classics::tricylinder(a.radius)?;
            let region = solid.bbox().expect("tricylinder carries its box");
            let q = volume_by_octree(&solid, &region, a.tol * region.volume(), a.max_depth)?;
            let e = montecarlo::estimate(&solid, &region, a.n, a.seed)?;
            r.results.push(ResultEntry::new("volume", q.value, q.abs_error_bound, cub));
            r.results.push(ResultEntry::new("volume_mc", e.value, e.stderr, mc));
            r.checks.push(Check::new(
                "octree_vs_mc",
                q.value,
                e.value,
                q.abs_error_bound + 4.0 * e.stderr,
            ));
        }
    }
    Ok(r)
}

/// Wireframe plus, optionally, the 24 curved boundary patches.
pub fn assemble_mesh(rulings: usize, patches: bool, resolution: usize) -> WireMesh {
    let mut m = build_wireframe(rulings);
    if patches {
        for piece in CurvedPiece::ALL {
            let base = triangulate_patch(piece, resolution);
            for signs in 0..8 {
                let mut p = base.clone();
                for v in &mut p.vertices {
                    for (k, c) in v.iter_mut().enumerate() {
                        if signs >> k & 1 == 1 {
                            *c = -*c + 0.0;
                        }
                    }
                }
                m.append(&p);
            }
        }
    }
    m
}

/// Writes `text` next to `path` and renames it into place.
pub fn write_atomically(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn cmd_mesh(a: &MeshArgs) -> Result<RunReport, CliError> {
    let m = assemble_mesh(a.rulings, a.patches, a.patch_resolution.max(1));
    write_atomically(&a.out, &write_obj(&m))?;
    let mut r = RunReport::new("mesh");
    r.input("out", Input::Text(a.out.display().to_string()))
        .input("rulings", Input::Int(a.rulings as u64))
        .input("patches", Input::Flag(a.patches));
    if a.patches {
        r.input("patch_resolution", Input::Int(a.patch_resolution.max(1) as u64));
    }
    for (name, count) in [
        ("vertices", m.vertices.len()),
        ("segments", m.segments.len()),
        ("faces", m.faces.len()),
    ] {
        r.results.push(ResultEntry::new(name, count as f64, 0.0, "count"));
    }
    Ok(r)
}
