//! Batch pipeline: generate snapshots, decompose them, compare spectra.
//!
//! Every verb prints its fully resolved configuration to stderr before
//! doing any work. Exit codes: 0 success, 1 usage, 2 data/format,
//! 3 numerical.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{compare, report_csv, verdicts_csv};
use crate::cases1d::{
    gen_advected_jump, gen_sigmoid, solve_heat1d, Heat1DConfig, HeatScheme, InitialCondition1D,
    SIGMOID_STEEP, SIGMOID_STRETCHED,
};
use crate::error::{Error, ErrorClass, Result};
use crate::grid_field::{read_snap, write_snap, Grid1D, SnapshotMatrix};
use crate::pod::{
    component_split, decompose, read_spectrum_csv, write_spectrum_csv, PodSpectrum, SvdMethod,
};
use crate::solidify2d::{run_case, SimConfig, ViscosityKind};

#[derive(Debug, Parser)]
#[command(
    name = "solidrom",
    version,
    about = "Snapshot generation, POD and singular-value decay analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// 1D heat equation with a rectangular initial condition.
    GenHeat1d(HeatArgs),
    /// Advected jump u = 1 for x <= t, t in [0, 1].
    GenJump(ProfileArgs),
    /// Advected sigmoid 1/(1 + exp(-k (t - x))).
    GenSigmoid(SigmoidArgs),
    /// 2D solidifying cavity (config file required).
    GenCavity2d(CavityArgs),
    /// POD of a snapshot file, written as spectrum CSV(s).
    Pod(PodArgs),
    /// Compare spectrum CSVs: mode counts, decay fits, pairwise verdicts.
    Analyze(AnalyzeArgs),
    /// Run every case and report in one go.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
struct HeatArgs {
    /// Case file with [grid] nodes/x_min/x_max, [time] dt/snapshots/scheme,
    /// [material] alpha/rect_left/rect_right/rect_height. Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of grid nodes [default: 256]
    #[arg(long)]
    nodes: Option<usize>,
    /// Number of snapshots, including the initial condition [default: 128]
    #[arg(long)]
    snapshots: Option<usize>,
    /// Thermal diffusivity [default: 1.0]
    #[arg(long)]
    alpha: Option<f64>,
    /// Time step [default: 0.001]
    #[arg(long)]
    dt: Option<f64>,
    /// implicit or explicit Euler [default: implicit]
    #[arg(long)]
    scheme: Option<HeatScheme>,
    /// Left edge of the rectangular initial condition [default: 0.25]
    #[arg(long)]
    rect_left: Option<f64>,
    /// Right edge of the rectangular initial condition [default: 0.75]
    #[arg(long)]
    rect_right: Option<f64>,
    /// Height of the rectangular initial condition [default: 1.0]
    #[arg(long)]
    rect_height: Option<f64>,
    /// Output snapshot file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Number of grid nodes on [0, 1]
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    /// Number of snapshots, uniform in t on [0, 1]
    #[arg(long, default_value_t = 128)]
    snapshots: usize,
    /// Output snapshot file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SigmoidArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// Steepness k of the sigmoid
    #[arg(long, default_value_t = SIGMOID_STEEP)]
    steepness: f64,
}

#[derive(Debug, Args)]
struct CavityArgs {
    /// Case file (sections grid, time, material, boundary, output)
    #[arg(long)]
    config: PathBuf,
    /// Override [material] viscosity_model (mushy | sharp_jump)
    #[arg(long)]
    viscosity_model: Option<ViscosityKind>,
    /// Override [time] n_steps
    #[arg(long)]
    steps: Option<usize>,
    /// Override [output] snap_every
    #[arg(long)]
    snap_every: Option<usize>,
    /// Output snapshot file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PodArgs {
    /// Input snapshot file
    #[arg(long = "in")]
    input: PathBuf,
    /// Output spectrum CSV; per-field spectra go to <stem>.<field>.csv
    #[arg(long)]
    out: PathBuf,
    /// combined | all | <field name>
    #[arg(long, default_value = "combined")]
    components: String,
    /// auto | direct | method_of_snapshots
    #[arg(long, default_value = "auto")]
    method: SvdMethod,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Spectrum CSVs; each case is named after its file stem
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Energy thresholds (repeatable)
    #[arg(long = "threshold", num_args = 1.., default_values_t = [0.9999])]
    thresholds: Vec<f64>,
    /// First index of the decay fit window (1-based)
    #[arg(long, default_value_t = 4)]
    fit_start: usize,
    /// Last index of the decay fit window (inclusive)
    #[arg(long, default_value_t = 64)]
    fit_end: usize,
    /// Per-case report CSV
    #[arg(long)]
    out: PathBuf,
    /// Pairwise verdict CSV [default: <out stem>.verdicts.csv]
    #[arg(long)]
    verdicts_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReproArgs {
    /// Directory for all outputs
    #[arg(long)]
    out_dir: PathBuf,
    /// Optional 2D case file applied to both cavity runs
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip the 2D cavity runs
    #[arg(long, default_value_t = false)]
    skip_2d: bool,
}

/// Parse `argv` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Numerical => 3,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenHeat1d(a) => gen_heat(a),
        Command::GenJump(a) => {
            eprintln!(
                "gen-jump nodes = {} snapshots = {} out = {}",
                a.nodes,
                a.snapshots,
                a.out.display()
            );
            let m = gen_advected_jump(&Grid1D::unit(a.nodes)?, a.snapshots)?;
            write_snap(&m, &a.out)
        }
        Command::GenSigmoid(a) => {
            eprintln!(
                "gen-sigmoid nodes = {} snapshots = {} steepness = {} out = {}",
                a.profile.nodes,
                a.profile.snapshots,
                a.steepness,
                a.profile.out.display()
            );
            let m = gen_sigmoid(
                &Grid1D::unit(a.profile.nodes)?,
                a.profile.snapshots,
                a.steepness,
            )?;
            write_snap(&m, &a.profile.out)
        }
        Command::GenCavity2d(a) => gen_cavity(a),
        Command::Pod(a) => pod(a),
        Command::Analyze(a) => analyze(a),
        Command::Repro(a) => repro(a),
    }
}

fn bad(k: &str, v: &str, n: usize) -> Error {
    Error::Config {
        line: n + 1,
        reason: format!("cannot parse '{v}' for key '{k}'"),
    }
}

fn parse_heat_config(text: &str) -> Result<Heat1DConfig> {
    let mut cfg = Heat1DConfig::default();
    let (mut nodes, mut x_min, mut x_max) =
        (cfg.grid.n_nodes(), cfg.grid.x_min(), cfg.grid.x_max());
    let InitialCondition1D::Rectangle {
        mut left,
        mut right,
        mut height,
    } = cfg.ic.clone()
    else {
        unreachable!()
    };
    let mut section = String::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Config {
            line: n + 1,
            reason,
        };
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            section = name.trim().to_string();
            if !["grid", "time", "material", "boundary", "output"].contains(&section.as_str()) {
                return Err(err(format!("unknown section [{section}]")));
            }
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (k, v) = (k.trim(), v.trim());
        match (section.as_str(), k) {
            ("grid", "nodes") => nodes = v.parse().map_err(|_| bad(k, v, n))?,
            ("grid", "x_min") => x_min = v.parse().map_err(|_| bad(k, v, n))?,
            ("grid", "x_max") => x_max = v.parse().map_err(|_| bad(k, v, n))?,
            ("time", "dt") => cfg.dt = v.parse().map_err(|_| bad(k, v, n))?,
            ("time", "snapshots") => cfg.n_snaps = v.parse().map_err(|_| bad(k, v, n))?,
            ("time", "scheme") => cfg.scheme = v.parse().map_err(|e: Error| err(e.to_string()))?,
            ("material", "alpha") => cfg.alpha = v.parse().map_err(|_| bad(k, v, n))?,
            ("material", "rect_left") => left = v.parse().map_err(|_| bad(k, v, n))?,
            ("material", "rect_right") => right = v.parse().map_err(|_| bad(k, v, n))?,
            ("material", "rect_height") => height = v.parse().map_err(|_| bad(k, v, n))?,
            _ => return Err(err(format!("unknown key '{k}' in section [{section}]"))),
        }
    }
    cfg.grid = Grid1D::new(nodes, x_min, x_max)?;
    cfg.ic = InitialCondition1D::Rectangle {
        left,
        right,
        height,
    };
    Ok(cfg)
}

fn gen_heat(a: HeatArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => parse_heat_config(&fs::read_to_string(path)?)?,
        None => Heat1DConfig::default(),
    };
    if let Some(n) = a.nodes {
        cfg.grid = Grid1D::new(n, cfg.grid.x_min(), cfg.grid.x_max())?;
    }
    if let Some(s) = a.snapshots {
        cfg.n_snaps = s;
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.dt {
        cfg.dt = v;
    }
    if let Some(v) = a.scheme {
        cfg.scheme = v;
    }
    if let InitialCondition1D::Rectangle {
        left,
        right,
        height,
    } = &mut cfg.ic
    {
        *left = a.rect_left.unwrap_or(*left);
        *right = a.rect_right.unwrap_or(*right);
        *height = a.rect_height.unwrap_or(*height);
    }
    eprintln!("{cfg}\n[output]\nout = {}", a.out.display());
    let m = solve_heat1d(&cfg)?;
    write_snap(&m, &a.out)
}

fn load_cavity_config(path: &Path) -> Result<SimConfig> {
    fs::read_to_string(path)?.parse()
}

fn gen_cavity(a: CavityArgs) -> Result<()> {
    let mut cfg = load_cavity_config(&a.config)?;
    if let Some(k) = a.viscosity_model {
        cfg.viscosity.kind = k;
    }
    if let Some(s) = a.steps {
        cfg.n_steps = s;
    }
    if let Some(s) = a.snap_every {
        cfg.snap_every = s;
    }
    cfg.validate()?;
    eprintln!("{cfg}\nout = {}", a.out.display());
    let m = run_case(&cfg)?;
    write_snap(&m, &a.out)
}

fn distinct_paths(inputs: &[&Path], outputs: &[&Path]) -> Result<()> {
    for o in outputs {
        if inputs.iter().any(|i| same_path(i, o)) {
            return Err(Error::Argument(format!(
                "output path {} is also an input",
                o.display()
            )));
        }
    }
    Ok(())
}

fn same_path(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// `<dir>/<stem>.<field>.csv` next to the combined output.
fn component_path(out: &Path, field: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{field}.csv"))
}

/// Decompose and write spectra; returns the written `(path, spectrum)` pairs.
fn pod_outputs(
    m: &SnapshotMatrix,
    out: &Path,
    components: &str,
    method: SvdMethod,
) -> Result<Vec<(PathBuf, PodSpectrum)>> {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut jobs: Vec<(PathBuf, String, SnapshotMatrix)> = Vec::new();
    match components {
        "combined" => jobs.push((out.to_path_buf(), stem.clone(), m.clone())),
        "all" => {
            for (name, sub) in component_split(m)? {
                jobs.push((component_path(out, &name), format!("{stem}.{name}"), sub));
            }
            jobs.push((out.to_path_buf(), stem.clone(), m.clone()));
        }
        field => jobs.push((out.to_path_buf(), stem.clone(), m.field(field)?)),
    }
    let results: Vec<Result<(PathBuf, PodSpectrum)>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(path, label, sub)| {
                s.spawn(move || {
                    let b = decompose(sub, method)?;
                    Ok((path.clone(), b.spectrum().clone().with_label(label.clone())))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("POD worker panicked"))
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    for (path, spec) in &results {
        write_spectrum_csv(spec, path)?;
    }
    Ok(results)
}

fn pod(a: PodArgs) -> Result<()> {
    eprintln!(
        "pod in = {} out = {} components = {} method = {}",
        a.input.display(),
        a.out.display(),
        a.components,
        a.method.as_str()
    );
    let m = read_snap(&a.input)?;
    let mut outs = vec![a.out.clone()];
    if a.components == "all" {
        outs.extend(
            m.layout()
                .segments()
                .iter()
                .map(|s| component_path(&a.out, &s.name)),
        );
    }
    let out_refs: Vec<&Path> = outs.iter().map(|p| p.as_path()).collect();
    distinct_paths(&[&a.input], &out_refs)?;
    pod_outputs(&m, &a.out, &a.components, a.method)?;
    Ok(())
}

fn verdicts_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.verdicts.csv"))
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let verdicts_out = a
        .verdicts_out
        .clone()
        .unwrap_or_else(|| verdicts_path(&a.out));
    eprintln!(
        "analyze in = [{}] thresholds = {:?} fit_range = [{}, {}] out = {} verdicts_out = {}",
        a.inputs
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", "),
        a.thresholds,
        a.fit_start,
        a.fit_end,
        a.out.display(),
        verdicts_out.display()
    );
    let ins: Vec<&Path> = a.inputs.iter().map(|p| p.as_path()).collect();
    distinct_paths(&ins, &[&a.out, &verdicts_out])?;
    let spectra = a
        .inputs
        .iter()
        .map(|p| {
            let s = read_spectrum_csv(p)?;
            Ok((s.source_label().to_string(), s))
        })
        .collect::<Result<Vec<_>>>()?;
    write_report(
        &spectra,
        &a.thresholds,
        (a.fit_start, a.fit_end),
        &a.out,
        &verdicts_out,
    )
}

fn write_report(
    spectra: &[(String, PodSpectrum)],
    thresholds: &[f64],
    fit_range: (usize, usize),
    out: &Path,
    verdicts_out: &Path,
) -> Result<()> {
    let report = compare(spectra, thresholds, fit_range)?;
    fs::write(out, report_csv(&report))?;
    fs::write(verdicts_out, verdicts_csv(&report))?;
    Ok(())
}

fn repro(a: ReproArgs) -> Result<()> {
    let dir = &a.out_dir;
    fs::create_dir_all(dir)?;
    let base_2d = match &a.config {
        Some(p) => load_cavity_config(p)?,
        None => SimConfig::default(),
    };
    let mushy = SimConfig {
        viscosity: crate::solidify2d::ViscosityModel {
            kind: ViscosityKind::Mushy,
            ..base_2d.viscosity
        },
        ..base_2d.clone()
    };
    let pure = SimConfig {
        viscosity: crate::solidify2d::ViscosityModel {
            kind: ViscosityKind::SharpJump,
            ..base_2d.viscosity
        },
        ..base_2d
    };
    let heat = Heat1DConfig::default();
    eprintln!("repro out_dir = {}\n# heat1d\n{heat}", dir.display());
    eprintln!("# jump/sigmoid nodes = 256 snapshots = 128 steep = {SIGMOID_STEEP} stretched = {SIGMOID_STRETCHED}");
    if !a.skip_2d {
        eprintln!("# cavity (mushy; pure differs only in viscosity_model)\n{mushy}");
    }

    let grid = Grid1D::unit(256)?;
    type Job<'a> = (
        &'a str,
        Box<dyn FnOnce() -> Result<SnapshotMatrix> + Send + 'a>,
    );
    let mut jobs: Vec<Job> = vec![
        ("heat", Box::new(|| solve_heat1d(&heat))),
        ("jump", Box::new(move || gen_advected_jump(&grid, 128))),
        (
            "sigmoid_steep",
            Box::new(move || gen_sigmoid(&grid, 128, SIGMOID_STEEP)),
        ),
        (
            "sigmoid_stretched",
            Box::new(move || gen_sigmoid(&grid, 128, SIGMOID_STRETCHED)),
        ),
    ];
    if !a.skip_2d {
        jobs.push(("cavity_mushy", Box::new(|| run_case(&mushy))));
        jobs.push(("cavity_pure", Box::new(|| run_case(&pure))));
    }
    let generated: Vec<(String, Result<SnapshotMatrix>)> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(name, job)| (name.to_string(), s.spawn(job)))
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| (name, h.join().expect("generator panicked")))
            .collect()
    });

    let mut spectra_1d = Vec::new();
    let mut spectra_2d = Vec::new();
    let mut spectra_parts = Vec::new();
    for (name, m) in generated {
        let m = m?;
        write_snap(&m, dir.join(format!("{name}.snap")))?;
        let is_2d = name.starts_with("cavity");
        let comps = if is_2d { "all" } else { "combined" };
        let written = pod_outputs(&m, &dir.join(format!("{name}.csv")), comps, SvdMethod::Auto)?;
        for (path, spec) in written {
            let label = spec.source_label().to_string();
            let _ = path;
            if !is_2d {
                spectra_1d.push((label, spec));
            } else if label == name {
                spectra_2d.push((label, spec));
            } else if name == "cavity_pure" {
                spectra_parts.push((label, spec));
            }
        }
    }
    let thresholds = [0.99, 0.999, 0.9999];
    let fit = crate::analysis::DEFAULT_FIT_RANGE;
    write_report(
        &spectra_1d,
        &thresholds,
        fit,
        &dir.join("report_1d.csv"),
        &dir.join("report_1d.verdicts.csv"),
    )?;
    if !a.skip_2d {
        write_report(
            &spectra_2d,
            &thresholds,
            fit,
            &dir.join("report_2d.csv"),
            &dir.join("report_2d.verdicts.csv"),
        )?;
        write_report(
            &spectra_parts,
            &thresholds,
            fit,
            &dir.join("report_components.csv"),
            &dir.join("report_components.verdicts.csv"),
        )?;
    }
    Ok(())
}
