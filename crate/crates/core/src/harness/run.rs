use num_complex::Complex64;

use super::report::Measured;
use super::{random_sequence, BenchConfig, Report, Workload};
use crate::arith::NumberFormat;
use crate::crossbar::CrossbarDims;
use crate::error::{Error, Result};
use crate::fft::{self, Direction, Workspace};
use crate::oracle::{self, rel_l2_error, rel_max_error, ConvMode};
use crate::polymul::{self, PolyOperands, PolySetup};

/// Relative L2 error bound used to verify a run in `format`.
pub fn tolerance(format: NumberFormat) -> f64 {
    match format {
        NumberFormat::SINGLE => 1e-4,
        _ => 2e-2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon data parallelism; identical to `Sequential` without the
    /// `parallel` feature.
    Parallel,
}

impl Exec {
    pub const DEFAULT: Exec = if cfg!(feature = "parallel") { Exec::Parallel } else { Exec::Sequential };
}

/// Maps `f` over `items`; output order always follows input order.
pub fn execute_with<T: Sync, R: Send>(items: &[T], exec: Exec, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

pub fn execute<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    execute_with(items, Exec::DEFAULT, f)
}

fn dft_reference(x: &[Complex64], d: Direction) -> Vec<Complex64> {
    // the quadratic DFT is the reference up to the sizes used by the criteria
    match (d, x.len() <= 4096) {
        (Direction::Forward, true) => oracle::naive_dft(x),
        (Direction::Inverse, true) => oracle::naive_idft(x),
        (Direction::Forward, false) => oracle::host_fft(x),
        (Direction::Inverse, false) => oracle::host_ifft(x),
    }
}

fn transform_trial(cfg: &BenchConfig, input: Vec<Complex64>) -> Result<Measured> {
    let format = cfg.format.format();
    let direction = match cfg.workload {
        Workload::Ifft => Direction::Inverse,
        _ => Direction::Forward,
    };
    let dims = CrossbarDims::new(cfg.used_rows()?, cfg.cols)?;
    let plan = fft::plan_fft(cfg.n, dims, format, cfg.config, direction)?
        .with_skip_permutation(!cfg.permute_input)
        .with_partitions(cfg.partitions > 1);
    let mut xbar = fft::new_crossbar(&plan, cfg.cols, cfg.partitions)?;
    let mut ws = Workspace::new(plan, &xbar, 1, 0)?;
    fft::load_sequence(&mut ws, &mut xbar, 0, &input)?;
    let verify = cfg.workload == Workload::Verify;
    if verify {
        ws.enable_log();
    }
    let before = ws.snapshot(&xbar);
    let run = fft::run_transform(&mut ws, &mut xbar, 0, direction, true)?;
    let got = fft::read_sequence(&ws, &xbar, 0);
    let want = dft_reference(&input, direction);
    let replay = verify.then(|| {
        let log = ws.take_log();
        fft::replay_mismatches(&ws, &xbar, &before, &log) as u64
    });
    let l2 = rel_l2_error(&got, &want);
    Ok(Measured {
        trace: run.trace,
        footprint_columns: ws.footprint(),
        pass: l2 <= tolerance(format) && replay.unwrap_or(0) == 0,
        rel_l2_error: l2,
        rel_max_error: rel_max_error(&got, &want),
        replay_mismatches: replay,
        imag_residue: None,
    })
}

fn polymul_trial(cfg: &BenchConfig, mut v: Vec<Complex64>) -> Result<Measured> {
    let format = cfg.format.format();
    let m = cfg.n / 2;
    let real = cfg.workload == Workload::PolymulReal;
    if real {
        v.iter_mut().for_each(|z| z.im = 0.0);
    }
    let (a, b) = v.split_at(m);
    let ops = PolyOperands::new(a.to_vec(), b.to_vec(), ConvMode::Acyclic)?.with_padded_n(cfg.n)?;
    let setup = PolySetup {
        partitions: cfg.partitions,
        use_partitions: cfg.partitions > 1,
        skip_permutation: !cfg.permute_input,
        ..PolySetup::new(format, cfg.config, cfg.cols)
    };
    let (mut xbar, mut ws) = setup.build(cfg.n)?;
    let r = if real {
        polymul::polymul_real_on(&mut ws, &mut xbar, &ops)?
    } else {
        polymul::polymul_complex_on(&mut ws, &mut xbar, &ops)?
    };
    let want = oracle::schoolbook_polymul(a, b, ConvMode::Acyclic);
    let got = if real {
        r.coeffs.iter().map(|c| Complex64::new(c.re, 0.0)).collect()
    } else {
        r.coeffs.clone()
    };
    let l2 = rel_l2_error(&got, &want);
    Ok(Measured {
        trace: r.trace,
        footprint_columns: ws.footprint(),
        pass: l2 <= tolerance(format),
        rel_l2_error: l2,
        rel_max_error: rel_max_error(&got, &want),
        replay_mismatches: None,
        imag_residue: real.then_some(r.imag_residue),
    })
}

fn trial(cfg: &BenchConfig, input: Vec<Complex64>) -> Result<Measured> {
    if cfg.workload.is_polymul() {
        polymul_trial(cfg, input)
    } else {
        transform_trial(cfg, input)
    }
}

/// Runs one trial on a supplied sequence of length `n`. Polynomial workloads
/// take the first half as one operand and the second half as the other (real
/// workloads ignore imaginary parts).
pub fn run_on_input(cfg: &BenchConfig, input: &[Complex64]) -> Result<Report> {
    cfg.validate()?;
    if input.len() != cfg.n {
        return Err(Error::Length {
            expected: cfg.n,
            got: input.len(),
        });
    }
    let cfg = BenchConfig { trials: 1, ..cfg.clone() };
    Report::assemble(&cfg, trial(&cfg, input.to_vec())?)
}

/// Simulates `cfg.trials` instances (seeds `seed`, `seed + 1`, ...) and
/// reports the shared cost counters with the worst error over all trials.
pub fn run(cfg: &BenchConfig) -> Result<Report> {
    cfg.validate()?;
    let trials: Vec<usize> = (0..cfg.trials).collect();
    let results = execute(&trials, |&t| trial(cfg, random_sequence(cfg.n, cfg.seed.wrapping_add(t as u64))));
    let mut merged: Option<Measured> = None;
    for r in results {
        let r = r?;
        merged = Some(match merged {
            None => r,
            Some(mut m) => {
                if m.trace.cycles != r.trace.cycles || m.trace.gate_ops != r.trace.gate_ops {
                    return Err(Error::Verification("cost counters depend on the input data".into()));
                }
                m.trace.flags = m.trace.flags.merge(r.trace.flags);
                m.pass &= r.pass;
                m.rel_l2_error = m.rel_l2_error.max(r.rel_l2_error);
                m.rel_max_error = m.rel_max_error.max(r.rel_max_error);
                m.replay_mismatches = m.replay_mismatches.zip(r.replay_mismatches).map(|(a, b)| a + b);
                m.imag_residue = m.imag_residue.zip(r.imag_residue).map(|(a, b)| a.max(b));
                m
            }
        });
    }
    Report::assemble(cfg, merged.expect("at least one trial"))
}

/// Reports of a sweep, in configuration order. A failing member stops the
/// sweep: `reports` then holds the members before it and `aborted` names it.
#[derive(Debug)]
pub struct SweepOutcome {
    pub reports: Vec<Report>,
    pub aborted: Option<(usize, Error)>,
}

pub fn sweep(configs: &[BenchConfig]) -> SweepOutcome {
    sweep_with(configs, Exec::DEFAULT)
}

pub fn sweep_with(configs: &[BenchConfig], exec: Exec) -> SweepOutcome {
    let mut reports = Vec::new();
    for (i, r) in execute_with(configs, exec, run).into_iter().enumerate() {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                return SweepOutcome {
                    reports,
                    aborted: Some((i, e)),
                }
            }
        }
    }
    SweepOutcome { reports, aborted: None }
}

#[cfg(test)]
mod tests;
