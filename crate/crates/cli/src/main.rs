//! qcorr: quantum and super-quantum correlation measures for two-qubit
//! states, with closed forms, a numeric minimizer, decoherence dynamics,
//! level surfaces and parameter sweeps.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use output::{fmt_sig, render_both, render_result, render_surface, render_table, write_out, Format};
use qcorr_core::{
    apply_channel, bell_diagonal, bell_measure, channel_measure_bell, channel_measure_werner,
    level_surface, measure_numeric, phase_flip_channel, sample_bell_diagonal, sweep, werner,
    werner_measure, GridAxis, MeasureKind, MeasureResult, OptimizerOptions, PhaseFlipParams,
    ProbabilityAxis, StateDescriptor, StrengthAxis, SurfaceRequest, SweepFamily, SweepSpec,
    TwoQubitState, WeakStrength, WernerParams,
};

const USAGE_EXIT: u8 = 2;
const COMPUTE_EXIT: u8 = 1;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Quantum correlation measures for two-qubit states")]
struct Cli {
    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a correlation measure of a two-qubit state.
    Compute(ComputeArgs),
    /// Evaluate a measure of a state passed through the phase-flip channel.
    Channel(ChannelArgs),
    /// Tabulate measures over a parameter grid (CSV or JSON).
    Sweep(SweepArgs),
    /// Extract a constant-measure level surface over the Bell-diagonal
    /// tetrahedron as a point cloud.
    Surface(SurfaceArgs),
    /// Compare the closed forms against the numeric minimizer on random
    /// Bell-diagonal states and report the maximum deviation.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateArgs {
    /// State descriptor as JSON, e.g. '{"family":"werner","z":0.5}' or
    /// '{"family":"bell_diagonal","c":[0.3,-0.4,0.56]}'.
    #[arg(long)]
    state: Option<String>,

    /// Werner state shortcut: the mixing parameter z in [-1/3, 1].
    #[arg(long, value_name = "Z", allow_negative_numbers = true)]
    werner: Option<f64>,

    /// Bell-diagonal shortcut: the coefficients c1,c2,c3.
    #[arg(long, value_name = "C1,C2,C3", allow_hyphen_values = true)]
    bell: Option<String>,
}

impl StateArgs {
    fn descriptor(&self) -> Result<StateDescriptor, CliError> {
        if let Some(json) = &self.state {
            return StateDescriptor::parse(json).map_err(CliError::compute);
        }
        if let Some(z) = self.werner {
            return Ok(StateDescriptor::Werner { z });
        }
        if let Some(spec) = &self.bell {
            let c = parse_triple(spec)?;
            return Ok(StateDescriptor::BellDiagonal { c });
        }
        unreachable!("clap enforces the state group")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Discord,
    SuperDiscord,
    Deficit,
    WeakDeficit,
}

impl From<MeasureArg> for MeasureKind {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Discord => MeasureKind::Discord,
            MeasureArg::SuperDiscord => MeasureKind::SuperDiscord,
            MeasureArg::Deficit => MeasureKind::Deficit,
            MeasureArg::WeakDeficit => MeasureKind::WeakDeficit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Closed,
    Numeric,
    Both,
}

#[derive(Args)]
struct OptimizerArgs {
    /// Coarse grid for the basis search, as THETAxPHI points.
    #[arg(long, default_value = "64x64", value_name = "NxM")]
    grid: String,

    /// Stop refinement once the simplex value spread is below this.
    #[arg(long, default_value_t = 1e-12)]
    refine_tolerance: f64,

    #[arg(long, default_value_t = 200)]
    max_refine_iters: usize,
}

impl OptimizerArgs {
    fn options(&self) -> Result<OptimizerOptions, CliError> {
        let (a, b) = self
            .grid
            .split_once(['x', 'X'])
            .ok_or_else(|| CliError::usage("--grid expects THETAxPHI, e.g. 64x64"))?;
        let coarse_grid = (
            a.trim().parse().map_err(|_| CliError::usage("bad --grid"))?,
            b.trim().parse().map_err(|_| CliError::usage("bad --grid"))?,
        );
        Ok(OptimizerOptions {
            coarse_grid,
            refine_tolerance: self.refine_tolerance,
            max_refine_iters: self.max_refine_iters,
        })
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    state: StateArgs,

    /// Which measure to evaluate.
    #[arg(long, value_enum)]
    measure: MeasureArg,

    /// Measurement strength for the weak measures: a positive number or
    /// "inf" for the projective limit.
    #[arg(long, value_name = "X|inf")]
    x: Option<String>,

    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    method: MethodArg,

    #[command(flatten)]
    optimizer: OptimizerArgs,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the output to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelArgs {
    #[command(flatten)]
    compute: ComputeArgs,

    /// Flip probability p in [0, 1].
    #[arg(long, conflicts_with_all = ["gamma", "t"])]
    p: Option<f64>,

    /// Phase damping rate (used with --t: p = 1 - exp(-gamma t)).
    #[arg(long, requires = "t")]
    gamma: Option<f64>,

    /// Evolution time (used with --gamma).
    #[arg(long, requires = "gamma")]
    t: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Werner,
    BellDiagonal,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,

    /// z grid for the Werner family, as start:stop:count.
    #[arg(long, default_value = "0:1:101", value_name = "A:B:N")]
    z_grid: String,

    /// Bell-diagonal coefficients (required for --family bell-diagonal).
    #[arg(long, value_name = "C1,C2,C3", allow_hyphen_values = true)]
    c: Option<String>,

    /// Fixed measurement strength, or "inf".
    #[arg(long, value_name = "X|inf", conflicts_with = "x_grid")]
    x: Option<String>,

    /// Sweep the strength over a grid of finite values.
    #[arg(long, value_name = "A:B:N")]
    x_grid: Option<String>,

    /// Fixed flip probability (0 disables the channel).
    #[arg(long, conflicts_with = "p_grid")]
    p: Option<f64>,

    /// Sweep the flip probability over a grid.
    #[arg(long, value_name = "A:B:N")]
    p_grid: Option<String>,

    /// Comma-separated measures to tabulate.
    #[arg(
        long,
        value_delimiter = ',',
        value_enum,
        default_value = "discord,super-discord,deficit,weak-deficit"
    )]
    kinds: Vec<MeasureArg>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long, value_enum)]
    kind: MeasureArg,

    /// Level value in bits.
    #[arg(long)]
    target: f64,

    #[arg(long, value_name = "X|inf", default_value = "inf")]
    x: String,

    /// Grid cells per axis in [16, 512].
    #[arg(long, default_value_t = 64)]
    resolution: usize,

    /// Skip re-checking sampled surface points against the numeric oracle.
    #[arg(long)]
    no_spot_check: bool,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 100)]
    samples: usize,

    /// Strength used for the weak measures.
    #[arg(long, default_value_t = 1.0)]
    x: f64,

    /// Seed for the random-state sampler.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Maximum allowed |closed - numeric| deviation.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,

    #[command(flatten)]
    optimizer: OptimizerArgs,
}

enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    fn compute(err: impl std::fmt::Display) -> Self {
        Self::Compute(err.to_string())
    }
}

impl From<qcorr_core::Error> for CliError {
    fn from(err: qcorr_core::Error) -> Self {
        Self::Compute(err.to_string())
    }
}

fn parse_triple(spec: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "expected three comma-separated numbers, got '{spec}'"
        )));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad number '{part}'")))?;
    }
    Ok(out)
}

fn parse_axis(spec: &str) -> Result<GridAxis, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "expected start:stop:count, got '{spec}'"
        )));
    }
    let start = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::usage("bad grid start"))?;
    let stop = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::usage("bad grid stop"))?;
    let count = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::usage("bad grid count"))?;
    Ok(GridAxis::new(start, stop, count))
}

fn parse_strength(spec: &str) -> Result<WeakStrength, CliError> {
    let s = spec.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("projective") {
        return Ok(WeakStrength::Projective);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| CliError::usage(format!("bad strength '{spec}'")))?;
    WeakStrength::new(x).map_err(CliError::compute)
}

/// Weak kinds need --x; the projective kinds reject it.
fn resolve_strength(kind: MeasureKind, x: &Option<String>) -> Result<WeakStrength, CliError> {
    match (kind.is_weak(), x) {
        (true, Some(spec)) => parse_strength(spec),
        (true, None) => Err(CliError::usage(format!(
            "--measure {kind} needs --x <strength|inf>"
        ))),
        (false, None) => Ok(WeakStrength::Projective),
        (false, Some(_)) => Err(CliError::usage(format!(
            "--x does not apply to --measure {kind}; it is a projective measure"
        ))),
    }
}

fn closed_measure(
    descriptor: &StateDescriptor,
    kind: MeasureKind,
    x: WeakStrength,
    flip: Option<&PhaseFlipParams>,
) -> Result<MeasureResult, CliError> {
    if let Some(z) = descriptor.werner_params()? {
        return Ok(match flip {
            Some(p) => channel_measure_werner(kind, z, x, p)?,
            None => werner_measure(kind, z, x)?,
        });
    }
    if let Some(c) = descriptor.bell_params()? {
        return Ok(match flip {
            Some(p) => channel_measure_bell(kind, &c, x, p)?,
            None => bell_measure(kind, &c, x)?,
        });
    }
    Err(CliError::compute(
        "closed forms need a werner or bell_diagonal state; use --method numeric for raw matrices",
    ))
}

fn numeric_measure(
    descriptor: &StateDescriptor,
    kind: MeasureKind,
    x: WeakStrength,
    flip: Option<&PhaseFlipParams>,
    opts: &OptimizerOptions,
) -> Result<MeasureResult, CliError> {
    let state: TwoQubitState = descriptor.to_state()?;
    let state = match flip {
        Some(p) => apply_channel(&state, &phase_flip_channel(p)),
        None => state,
    };
    Ok(measure_numeric(kind, &state, x, opts)?)
}

fn run_measure_command(args: &ComputeArgs, flip: Option<&PhaseFlipParams>) -> Result<(), CliError> {
    let descriptor = args.state.descriptor()?;
    let kind: MeasureKind = args.measure.into();
    let x = resolve_strength(kind, &args.x)?;
    let opts = args.optimizer.options()?;

    let content = match args.method {
        MethodArg::Closed => {
            let r = closed_measure(&descriptor, kind, x, flip)?;
            render_result(&r, args.format)
        }
        MethodArg::Numeric => {
            let r = numeric_measure(&descriptor, kind, x, flip, &opts)?;
            render_result(&r, args.format)
        }
        MethodArg::Both => {
            let closed = closed_measure(&descriptor, kind, x, flip)?;
            let numeric = numeric_measure(&descriptor, kind, x, flip, &opts)?;
            render_both(&closed, &numeric, args.format)
        }
    };
    write_out(&args.out, &content).map_err(CliError::compute)
}

fn run_channel(args: &ChannelArgs) -> Result<(), CliError> {
    let flip = match (args.p, args.gamma, args.t) {
        (Some(p), None, None) => PhaseFlipParams::new(p)?,
        (None, Some(gamma), Some(t)) => PhaseFlipParams::from_rate_time(gamma, t)?,
        _ => {
            return Err(CliError::usage(
                "channel needs either --p <v> or --gamma <v> --t <v>",
            ))
        }
    };
    run_measure_command(&args.compute, Some(&flip))
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let family = match args.family {
        FamilyArg::Werner => SweepFamily::Werner {
            z: parse_axis(&args.z_grid)?,
        },
        FamilyArg::BellDiagonal => {
            let spec = args
                .c
                .as_ref()
                .ok_or_else(|| CliError::usage("--family bell-diagonal needs --c c1,c2,c3"))?;
            SweepFamily::BellDiagonal {
                c: parse_triple(spec)?,
            }
        }
    };
    let x = match (&args.x, &args.x_grid) {
        (_, Some(grid)) => StrengthAxis::Grid(parse_axis(grid)?),
        (Some(spec), None) => StrengthAxis::Fixed(parse_strength(spec)?),
        (None, None) => StrengthAxis::Fixed(WeakStrength::Projective),
    };
    let p = match (&args.p, &args.p_grid) {
        (_, Some(grid)) => ProbabilityAxis::Grid(parse_axis(grid)?),
        (Some(p), None) => ProbabilityAxis::Fixed(*p),
        (None, None) => ProbabilityAxis::Fixed(0.0),
    };
    let spec = SweepSpec {
        family,
        kinds: args.kinds.iter().map(|k| (*k).into()).collect(),
        x,
        p,
    };
    let table = sweep(&spec)?;
    write_out(&args.out, &render_table(&table, args.format)).map_err(CliError::compute)
}

fn run_surface(args: &SurfaceArgs) -> Result<(), CliError> {
    let mut req = SurfaceRequest::new(
        args.kind.into(),
        args.target,
        parse_strength(&args.x)?,
        args.resolution,
    )?;
    req.oracle_spot_check = !args.no_spot_check;
    let cloud = level_surface(&req)?;
    write_out(&args.out, &render_surface(&cloud, args.format)).map_err(CliError::compute)
}

fn run_selfcheck(args: &SelfcheckArgs) -> Result<(), CliError> {
    let opts = args.optimizer.options()?;
    let x = WeakStrength::new(args.x)?;

    println!(
        "selfcheck: {} samples, x = {}, seed = {}, grid {}x{}",
        args.samples, args.x, args.seed, opts.coarse_grid.0, opts.coarse_grid.1
    );
    let mut overall: f64 = 0.0;
    for kind in MeasureKind::ALL {
        let strength = if kind.is_weak() {
            x
        } else {
            WeakStrength::Projective
        };
        let mut rng_kind = ChaCha8Rng::seed_from_u64(args.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..args.samples {
            let params = sample_bell_diagonal(&mut rng_kind);
            let closed = bell_measure(kind, &params, strength)?.value;
            let numeric =
                measure_numeric(kind, &bell_diagonal(&params), strength, &opts)?.value;
            worst = worst.max((closed - numeric).abs());
        }
        println!("  {:<14} max |closed - numeric| = {}", kind.name(), fmt_sig(worst));
        overall = overall.max(worst);
    }
    // Cross-family spot check to exercise the Werner closed forms too.
    let wz = WernerParams::new(0.5).unwrap();
    let closed = werner_measure(MeasureKind::Discord, wz, WeakStrength::Projective)?.value;
    let numeric = measure_numeric(
        MeasureKind::Discord,
        &werner(&wz),
        WeakStrength::Projective,
        &opts,
    )?
    .value;
    overall = overall.max((closed - numeric).abs());

    let ok = overall <= args.tolerance;
    println!(
        "max deviation = {} (tolerance {}): {}",
        fmt_sig(overall),
        fmt_sig(args.tolerance),
        if ok { "OK" } else { "EXCEEDED" }
    );
    if ok {
        Ok(())
    } else {
        Err(CliError::Compute(format!(
            "selfcheck deviation {} exceeds tolerance {}",
            fmt_sig(overall),
            fmt_sig(args.tolerance)
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Build the global pool once; results do not depend on thread count.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }

    let outcome = match &cli.command {
        Command::Compute(args) => run_measure_command(args, None),
        Command::Channel(args) => run_channel(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Surface(args) => run_surface(args),
        Command::Selfcheck(args) => run_selfcheck(args),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(USAGE_EXIT)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(COMPUTE_EXIT)
        }
    }
}
