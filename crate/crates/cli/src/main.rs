use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pimfft::arith::schedule_table;
use pimfft::harness::{
    self, emit_report, emit_reports, emit_table, BenchConfig, FormatPreset, Report, ReportFormat, Workload,
};
use pimfft::Error;

/// Cycle-accurate memristive crossbar simulator: in-memory FFT and
/// polynomial multiplication benchmarks.
#[derive(Parser, Debug)]
#[command(name = "pimfft", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Simulate one configuration and emit its report.
    Run(RunArgs),
    /// Simulate every combination of the listed values.
    Sweep(SweepArgs),
    /// Like `run`, defaulting to the verify workload (replay oracle + DFT).
    Verify(RunArgs),
    /// Print the gate-schedule cost table of a format.
    Schedules {
        #[arg(long, env = "PIMFFT_FORMAT", default_value = "single-complex-64")]
        format: FormatPreset,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write to this file instead of stdout.
    #[arg(long, env = "PIMFFT_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "PIMFFT_EMIT", default_value = "json", value_parser = ["json", "csv"])]
    emit: String,
}

#[derive(Args, Debug)]
struct Machine {
    /// Units per row for `--config 2rb`.
    #[arg(long, env = "PIMFFT_BETA", default_value_t = 2)]
    beta: usize,
    #[arg(long, env = "PIMFFT_MEMORY_GB", default_value_t = 8)]
    memory_gb: u64,
    #[arg(long, env = "PIMFFT_ROWS", default_value_t = 1024)]
    rows: usize,
    #[arg(long, env = "PIMFFT_COLS", default_value_t = 1024)]
    cols: usize,
    #[arg(long, env = "PIMFFT_CLOCK_HZ", default_value_t = pimfft::crossbar::CLOCK_HZ)]
    clock_hz: f64,
    #[arg(long, env = "PIMFFT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "PIMFFT_TRIALS", default_value_t = 1)]
    trials: usize,
    /// Execute the input bit-reversal instead of relabelling it away.
    #[arg(long, env = "PIMFFT_PERMUTE_INPUT")]
    permute_input: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, env = "PIMFFT_WORKLOAD")]
    workload: Option<Workload>,
    #[arg(long, env = "PIMFFT_N", default_value_t = 2048)]
    n: usize,
    #[arg(long, env = "PIMFFT_FORMAT", default_value = "single-complex-64")]
    format: FormatPreset,
    /// r, 2r, 2rb (with --beta) or 2rb<beta>.
    #[arg(long, env = "PIMFFT_CONFIG", default_value = "2r")]
    config: String,
    #[arg(long, env = "PIMFFT_PARTITIONS", default_value_t = 1)]
    partitions: usize,
    /// Sequence file to use instead of seeded random input.
    #[arg(long, env = "PIMFFT_INPUT")]
    input: Option<PathBuf>,
    #[command(flatten)]
    machine: Machine,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, env = "PIMFFT_WORKLOAD", value_delimiter = ',', default_value = "fft")]
    workload: Vec<Workload>,
    #[arg(long, env = "PIMFFT_N", value_delimiter = ',', default_value = "2048")]
    n: Vec<usize>,
    #[arg(long, env = "PIMFFT_FORMAT", value_delimiter = ',', default_value = "single-complex-64")]
    format: Vec<FormatPreset>,
    #[arg(long, env = "PIMFFT_CONFIG", value_delimiter = ',', default_value = "2r")]
    config: Vec<String>,
    #[arg(long, env = "PIMFFT_PARTITIONS", value_delimiter = ',', default_value = "1")]
    partitions: Vec<usize>,
    #[command(flatten)]
    machine: Machine,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Verification,
    Config(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.into())
    }
}

fn bench_config(
    m: &Machine,
    workload: Workload,
    n: usize,
    format: FormatPreset,
    config: &str,
    partitions: usize,
) -> Result<BenchConfig, Error> {
    let config = harness::parse_config(config, m.beta)?;
    Ok(BenchConfig {
        partitions,
        memory_gb: m.memory_gb,
        rows: m.rows,
        cols: m.cols,
        clock_hz: m.clock_hz,
        seed: m.seed,
        trials: m.trials,
        permute_input: m.permute_input,
        ..BenchConfig::new(workload, n, format, config)
    })
}

fn sink(out: &OutArgs) -> Result<(Box<dyn Write>, ReportFormat), Failure> {
    let format = out.emit.parse()?;
    let w: Box<dyn Write> = match &out.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    Ok((w, format))
}

fn summary(r: &Report) -> String {
    format!(
        "{}: {} n={} {} {} k={} cycles={} rel_l2={:.3e} throughput={:.4e}/s",
        if r.passed() { "pass" } else { "FAIL" },
        r.workload,
        r.n,
        r.format,
        r.config,
        r.partitions,
        r.cycles,
        r.rel_l2_error,
        r.throughput
    )
}

fn run(args: &RunArgs, default: Workload) -> Result<(), Failure> {
    let workload = args.workload.unwrap_or(default);
    let cfg = bench_config(&args.machine, workload, args.n, args.format, &args.config, args.partitions)?;
    let report = match &args.input {
        Some(path) => {
            let seq = harness::read_sequence_file(BufReader::new(File::open(path)?))?;
            if seq.format != cfg.format {
                return Err(Error::Config(format!("{} holds {} values", path.display(), seq.format)).into());
            }
            harness::run_on_input(&cfg, &seq.values)?
        }
        None => harness::run(&cfg)?,
    };
    let (mut w, format) = sink(&args.out)?;
    emit_report(&report, &mut w, format)?;
    eprintln!("{}", summary(&report));
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let mut configs = Vec::new();
    for &workload in &args.workload {
        for config in &args.config {
            for &format in &args.format {
                for &n in &args.n {
                    for &k in &args.partitions {
                        configs.push(bench_config(&args.machine, workload, n, format, config, k)?);
                    }
                }
            }
        }
    }
    let outcome = harness::sweep(&configs);
    let (mut w, format) = sink(&args.out)?;
    emit_reports(&outcome.reports, &mut w, format)?;
    for r in &outcome.reports {
        eprintln!("{}", summary(r));
    }
    if let Some((i, e)) = outcome.aborted {
        eprintln!("sweep stopped at member {i} of {}; reports above are partial", configs.len());
        return Err(e.into());
    }
    if outcome.reports.iter().all(Report::passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(a) => run(a, Workload::Fft),
        Cmd::Verify(a) => run(a, Workload::Verify),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Schedules { format, out } => sink(out).and_then(|(mut w, emit)| {
            emit_table(&schedule_table(format.format()), &mut w, emit).map_err(Failure::from)
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
