//! Command-line front end for survival-probability correlation analysis.
//!
//! Subcommands wrap the library routes one to one and emit either a JSON
//! report (with a schema_version field and the resolved seed) or CSV figure
//! data. Exit codes are scriptable: 0 ok, 2 dimension/range, 3 degenerate
//! readout, 4 parse, 5 non-Hermitian, 64 usage.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use survcorr_core::echo::{
    affine_rigidity_fit, short_time_pcc_gap, variance_limit_pcc, EchoConfig, RigidityFit,
    ShortTimeReport,
};
use survcorr_core::json::{parse_ensemble, parse_hermitian, parse_unitary};
use survcorr_core::qubit::{
    closed_form_pcc, fringe_grid, pcc_sweep, BlochPoint, RamseyControl,
};
use survcorr_core::sample::{complement_violation, mc_stats, overlap_probe};
use survcorr_core::stats::{exact_stats, exact_stats_permsum, optimal_contrast, ContrastReport};
use survcorr_core::{CorrelationReport, EnsembleSpec, Error, RngStream, UnitaryMatrix};

/// Version stamped into every JSON report.
const SCHEMA_VERSION: u32 = 1;

/// Probe pass thresholds: eigenvector-refined overlap must reach 1 within
/// this slack, a complement violation below this floor is treated as
/// "maps sum to one", and the correlation must stay this far above -1.
const OVERLAP_PASS_SLACK: f64 = 1e-9;
const VIOLATION_PASS_FLOOR: f64 = 1e-3;
const PCC_BOUND_SLACK: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "survcorr",
    version,
    about = "Correlation structure of state-survival probabilities under unitary drives",
    propagate_version = true
)]
struct Cli {
    /// Cap rayon worker threads; results are identical for any cap
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact correlation report, computed by both independent routes
    Exact(ExactArgs),
    /// Monte Carlo correlation report over a state ensemble
    Sample(SampleArgs),
    /// Closed-form qubit correlation with a full-matrix cross-check
    Qubit(QubitArgs),
    /// Survival fringe of one rotation drive on a Bloch-sphere grid (CSV)
    Fringe(FringeArgs),
    /// Qubit correlation versus axis separation (CSV)
    Sweep(SweepArgs),
    /// Short-time echo analysis of two Hamiltonian drives
    Echo(EchoArgs),
    /// Differential-readout contrast curve and variance floor
    Contrast(ContrastArgs),
    /// Randomized impossibility probes for a drive pair
    Probe(ProbeArgs),
}

#[derive(Args)]
struct ExactArgs {
    /// First drive: JSON unitary file
    #[arg(long, value_name = "FILE")]
    u1: PathBuf,
    /// Second drive: JSON unitary file
    #[arg(long, value_name = "FILE")]
    u2: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["samples", "ensemble"]))]
struct SampleArgs {
    #[arg(long, value_name = "FILE")]
    u1: PathBuf,
    #[arg(long, value_name = "FILE")]
    u2: PathBuf,
    /// Number of Haar-random sample states (at least 100)
    #[arg(short = 'n', long = "samples", value_name = "N")]
    samples: Option<usize>,
    /// Explicit ensemble JSON file instead of Haar sampling
    #[arg(long, value_name = "FILE")]
    ensemble: Option<PathBuf>,
    /// RNG seed; fixed seed means bit-identical output
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QubitArgs {
    /// Rotation angle of the first drive, in (0, 2*pi)
    #[arg(long, value_name = "RAD", default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    theta1: f64,
    /// Rotation angle of the second drive, in (0, 2*pi)
    #[arg(long, value_name = "RAD", default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    theta2: f64,
    /// Angle between the two rotation axes, in [0, pi]
    #[arg(long, value_name = "RAD", allow_negative_numbers = true)]
    delta: f64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FringeArgs {
    /// Rotation angle, in (0, 2*pi)
    #[arg(long, value_name = "RAD")]
    theta: f64,
    /// Rotation axis as x,y,z (normalized internally)
    #[arg(long, value_name = "X,Y,Z", default_value = "0,0,1", value_parser = parse_axis)]
    axis: Axis,
    /// Grid as POLARxAZIMUTH, endpoints included
    #[arg(long, value_name = "PxA", default_value = "61x121", value_parser = parse_grid)]
    grid: Grid,
    /// CSV destination (required: the grid is figure data, not a report)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Number of axis-separation grid points over [0, pi]
    #[arg(long, value_name = "N", default_value_t = 181)]
    points: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EchoArgs {
    /// First drive: JSON Hermitian file
    #[arg(long, value_name = "FILE")]
    h1: PathBuf,
    /// Second drive: JSON Hermitian file
    #[arg(long, value_name = "FILE")]
    h2: PathBuf,
    /// Evolution times, comma separated, each in (0, 0.5]
    #[arg(long, value_name = "T1,T2,...", value_delimiter = ',', required = true)]
    times: Vec<f64>,
    /// Haar sample count for the sampled variance-limit cross-check
    #[arg(short = 'n', long = "samples", value_name = "N", default_value_t = 10_000)]
    samples: usize,
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ContrastArgs {
    #[arg(long, value_name = "FILE")]
    u1: PathBuf,
    #[arg(long, value_name = "FILE")]
    u2: PathBuf,
    /// Grid points for the kappa curve (rounded up to odd)
    #[arg(long, value_name = "N", default_value_t = 101)]
    grid: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, value_name = "FILE")]
    u1: PathBuf,
    #[arg(long, value_name = "FILE")]
    u2: PathBuf,
    /// Random states per probe
    #[arg(short = 'n', long = "samples", value_name = "N", default_value_t = 10_000)]
    samples: usize,
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy)]
struct Axis([f64; 3]);

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut axis = [0.0f64; 3];
    for (slot, part) in axis.iter_mut().zip(parts.iter()) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad axis component {part:?}: {e}"))?;
    }
    Ok(Axis(axis))
}

#[derive(Clone, Copy)]
struct Grid {
    polar: usize,
    azimuth: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let (p, a) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected POLARxAZIMUTH, got {s:?}"))?;
    Ok(Grid {
        polar: p.trim().parse().map_err(|e| format!("bad polar count {p:?}: {e}"))?,
        azimuth: a.trim().parse().map_err(|e| format!("bad azimuth count {a:?}: {e}"))?,
    })
}

enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::DimensionMismatch { .. }
                | Error::OutOfRange(_)
                | Error::GridTooSmall { .. }
                | Error::InvalidAxis { .. }
                | Error::NotUnitary { .. } => 2,
                Error::DegenerateReadout { .. } => 3,
                Error::Json(_)
                | Error::WrongLength { .. }
                | Error::NonFinite
                | Error::NotNormalized { .. } => 4,
                Error::NotHermitian { .. } => 5,
                Error::TooFewSamples { .. } => 64,
                Error::ConvergenceFailure => 1,
            },
            CliError::Io(..) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    // a closed pipe on help output is not an error
                    let _ = write!(std::io::stdout(), "{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    // usage problems take the sysexits convention
                    eprint!("{e}");
                    ExitCode::from(64)
                }
            };
        }
    };

    if let Some(k) = cli.threads {
        // a cap of 0 means "let the library decide", mirroring rayon
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("survcorr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Exact(args) => run_exact(args),
        Command::Sample(args) => run_sample(args),
        Command::Qubit(args) => run_qubit(args),
        Command::Fringe(args) => run_fringe(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Echo(args) => run_echo(args),
        Command::Contrast(args) => run_contrast(args),
        Command::Probe(args) => run_probe(args),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_unitary(path: &Path) -> Result<UnitaryMatrix, CliError> {
    Ok(parse_unitary(&read_file(path)?)?)
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    /// RNG seed the run resolved to; null for fully deterministic commands.
    seed: Option<u64>,
    #[serde(flatten)]
    payload: T,
}

fn emit_json<T: Serialize>(
    seed: Option<u64>,
    payload: T,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        seed,
        payload,
    };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(Error::from)?;
    text.push('\n');
    write_output(out, &text)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Ok(()) => Ok(()),
                // the consumer stopped reading (e.g. piped into head);
                // standard tools end quietly here
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Io(PathBuf::from("<stdout>"), e)),
            }
        }
    }
}

/// Round-trippable CSV cell: 17 significant digits, exponent form.
fn csv_cell(value: f64) -> String {
    format!("{value:.16e}")
}

fn run_exact(args: ExactArgs) -> Result<(), CliError> {
    let u1 = load_unitary(&args.u1)?;
    let u2 = load_unitary(&args.u2)?;

    #[derive(Serialize)]
    struct Payload {
        closed_form: CorrelationReport,
        permsum: CorrelationReport,
    }
    let payload = Payload {
        closed_form: exact_stats(&u1, &u2)?,
        permsum: exact_stats_permsum(&u1, &u2)?,
    };
    emit_json(None, payload, args.out.as_deref())
}

fn run_sample(args: SampleArgs) -> Result<(), CliError> {
    let u1 = load_unitary(&args.u1)?;
    let u2 = load_unitary(&args.u2)?;
    let ensemble = match (&args.ensemble, args.samples) {
        (Some(path), None) => parse_ensemble(&read_file(path)?)?,
        (None, Some(n)) => EnsembleSpec::haar(n),
        // clap's source group guarantees exactly one of the two
        _ => unreachable!("argument group enforces one sample source"),
    };

    #[derive(Serialize)]
    struct Payload {
        report: CorrelationReport,
    }
    let report = mc_stats(&u1, &u2, &ensemble, &RngStream::new(args.seed))?;
    emit_json(Some(args.seed), Payload { report }, args.out.as_deref())
}

fn run_qubit(args: QubitArgs) -> Result<(), CliError> {
    if !(0.0..=std::f64::consts::PI).contains(&args.delta) {
        return Err(Error::OutOfRange(format!(
            "axis separation must lie in [0, pi], got {}",
            args.delta
        ))
        .into());
    }
    // place the axes in the xz-plane: delta is the full relative geometry
    let c1 = RamseyControl::new(args.theta1, BlochPoint::new(0.0, 0.0, 1.0)?)?;
    let c2 = RamseyControl::new(
        args.theta2,
        BlochPoint::new(args.delta.sin(), 0.0, args.delta.cos())?,
    )?;
    let report = exact_stats(&c1.rotation(), &c2.rotation())?;

    #[derive(Serialize)]
    struct Payload {
        theta1: f64,
        theta2: f64,
        delta: f64,
        /// Axis-separation closed form; must agree with report.pcc.
        pcc_closed_form: f64,
        report: CorrelationReport,
    }
    let payload = Payload {
        theta1: args.theta1,
        theta2: args.theta2,
        delta: args.delta,
        pcc_closed_form: closed_form_pcc(args.delta),
        report,
    };
    emit_json(None, payload, args.out.as_deref())
}

fn run_fringe(args: FringeArgs) -> Result<(), CliError> {
    let control = RamseyControl::with_normalized_axis(args.theta, args.axis.0)?;
    let samples = fringe_grid(&control, args.grid.polar, args.grid.azimuth)?;
    let mut csv = String::from("polar,azimuth,x,y,z,fidelity\n");
    for s in &samples {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            csv_cell(s.polar),
            csv_cell(s.azimuth),
            csv_cell(s.x),
            csv_cell(s.y),
            csv_cell(s.z),
            csv_cell(s.fidelity)
        );
    }
    write_output(Some(&args.out), &csv)
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let rows = pcc_sweep(args.points)?;
    let mut csv = String::from("delta,pcc\n");
    for (delta, pcc) in &rows {
        let _ = writeln!(csv, "{},{}", csv_cell(*delta), csv_cell(*pcc));
    }
    write_output(args.out.as_deref(), &csv)
}

fn run_echo(args: EchoArgs) -> Result<(), CliError> {
    let h1 = parse_hermitian(&read_file(&args.h1)?)?;
    let h2 = parse_hermitian(&read_file(&args.h2)?)?;
    let config = EchoConfig::new(h1.clone(), h2.clone(), args.times)?;
    let report = short_time_pcc_gap(&config)?;
    let ensemble = EnsembleSpec::haar(args.samples);
    let stream = RngStream::new(args.seed);
    let sampled_limit = variance_limit_pcc(&h1, &h2, &ensemble, &stream)?;
    let rigidity = affine_rigidity_fit(&h1, &h2, &ensemble, &stream)?;

    #[derive(Serialize)]
    struct Payload {
        #[serde(flatten)]
        report: ShortTimeReport,
        /// Monte Carlo cross-check of records[*].pcc_variance_limit.
        pcc_variance_limit_sampled: f64,
        rigidity: RigidityFit,
    }
    let payload = Payload {
        report,
        pcc_variance_limit_sampled: sampled_limit,
        rigidity,
    };
    emit_json(Some(args.seed), payload, args.out.as_deref())
}

fn run_contrast(args: ContrastArgs) -> Result<(), CliError> {
    let u1 = load_unitary(&args.u1)?;
    let u2 = load_unitary(&args.u2)?;
    let report = exact_stats(&u1, &u2)?;

    #[derive(Serialize)]
    struct Payload {
        report: ContrastReport,
    }
    let contrast = optimal_contrast(&report, args.grid)?;
    emit_json(None, Payload { report: contrast }, args.out.as_deref())
}

fn run_probe(args: ProbeArgs) -> Result<(), CliError> {
    let u1 = load_unitary(&args.u1)?;
    let u2 = load_unitary(&args.u2)?;
    // degenerate drive pairs have no defined correlation: fail before probing
    let exact = exact_stats(&u1, &u2)?;
    let stream = RngStream::new(args.seed);
    let witness = overlap_probe(&u1, &u2, args.samples, &stream)?;
    let violation = complement_violation(&u1, &u2, args.samples, &stream)?;

    let max_overlap_pass = witness.max_overlap >= 1.0 - OVERLAP_PASS_SLACK;
    let complement_violation_pass = violation > VIOLATION_PASS_FLOOR;
    let pcc_min_bound_check = exact.pcc > -1.0 + PCC_BOUND_SLACK;

    #[derive(Serialize)]
    struct Payload {
        max_overlap: f64,
        max_overlap_pass: bool,
        complement_violation: f64,
        complement_violation_pass: bool,
        pcc: f64,
        pcc_min_bound_check: bool,
    }
    let payload = Payload {
        max_overlap: witness.max_overlap,
        max_overlap_pass,
        complement_violation: violation,
        complement_violation_pass,
        pcc: exact.pcc,
        pcc_min_bound_check,
    };

    // human-readable verdicts stay on stderr so stdout is pure JSON
    eprintln!(
        "probe: max overlap {:.12} [{}]",
        witness.max_overlap,
        if max_overlap_pass { "PASS" } else { "FAIL" }
    );
    eprintln!(
        "probe: complement violation {:.6e} [{}]",
        violation,
        if complement_violation_pass { "PASS" } else { "FAIL" }
    );
    eprintln!(
        "probe: pcc {:.12} above -1 [{}]",
        exact.pcc,
        if pcc_min_bound_check { "PASS" } else { "FAIL" }
    );

    emit_json(Some(args.seed), payload, None)
}
