use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{BenchConfig, FormatPreset, Workload};
use crate::crossbar::Trace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verification {
    Pass,
    Fail,
}

/// Result of one benchmark configuration. Every derived field can be
/// recomputed from the counters and the configuration fields.
///
/// "Instance" is one transform or one polynomial product. Power covers only
/// the dynamic energy of the simulated gates; peripheral and static power are
/// out of scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub workload: Workload,
    pub n: usize,
    pub format: FormatPreset,
    pub config: String,
    pub beta: usize,
    pub partitions: usize,
    pub memory_gb: u64,
    pub rows: usize,
    pub cols: usize,
    pub clock_hz: f64,
    pub seed: u64,
    pub trials: usize,
    pub permute_input: bool,
    pub cycles: u64,
    pub gate_ops: u64,
    pub write_ops: u64,
    pub energy_fj_per_instance: f64,
    pub latency_s: f64,
    pub footprint_columns: usize,
    pub crossbar_count: u64,
    pub batch_per_crossbar: u64,
    pub throughput: f64,
    pub power_w: f64,
    pub throughput_per_watt: f64,
    pub verification: Verification,
    /// Worst relative L2 error over all trials.
    pub rel_l2_error: f64,
    /// Worst relative max-norm error over all trials.
    pub rel_max_error: f64,
    /// Replay-oracle mismatches (verify workload only).
    pub replay_mismatches: Option<u64>,
    /// Largest imaginary part left by real polynomial multiplication.
    pub imag_residue: Option<f64>,
    pub underflow: bool,
    pub overflow: bool,
    pub invalid: bool,
}

/// CSV column order; identical to the field order of [`Report`].
pub const CSV_COLUMNS: [&str; 32] = [
    "workload",
    "n",
    "format",
    "config",
    "beta",
    "partitions",
    "memory_gb",
    "rows",
    "cols",
    "clock_hz",
    "seed",
    "trials",
    "permute_input",
    "cycles",
    "gate_ops",
    "write_ops",
    "energy_fj_per_instance",
    "latency_s",
    "footprint_columns",
    "crossbar_count",
    "batch_per_crossbar",
    "throughput",
    "power_w",
    "throughput_per_watt",
    "verification",
    "rel_l2_error",
    "rel_max_error",
    "replay_mismatches",
    "imag_residue",
    "underflow",
    "overflow",
    "invalid",
];

pub struct Measured {
    pub trace: Trace,
    pub footprint_columns: usize,
    pub pass: bool,
    pub rel_l2_error: f64,
    pub rel_max_error: f64,
    pub replay_mismatches: Option<u64>,
    pub imag_residue: Option<f64>,
}

impl Report {
    pub(crate) fn assemble(cfg: &BenchConfig, m: Measured) -> Result<Self> {
        let t = m.trace;
        let energy = t.energy_fj();
        let latency = t.latency_s(cfg.clock_hz);
        let crossbar_count = cfg.crossbar_count();
        let batch = cfg.batch_per_crossbar()?;
        let throughput = (crossbar_count * batch) as f64 / latency;
        let power_w = energy * 1e-15 * throughput;
        Ok(Report {
            workload: cfg.workload,
            n: cfg.n,
            format: cfg.format,
            config: cfg.config.name(),
            beta: cfg.config.units(),
            partitions: cfg.partitions,
            memory_gb: cfg.memory_gb,
            rows: cfg.rows,
            cols: cfg.cols,
            clock_hz: cfg.clock_hz,
            seed: cfg.seed,
            trials: cfg.trials,
            permute_input: cfg.permute_input,
            cycles: t.cycles,
            gate_ops: t.gate_ops,
            write_ops: t.write_ops,
            energy_fj_per_instance: energy,
            latency_s: latency,
            footprint_columns: m.footprint_columns,
            crossbar_count,
            batch_per_crossbar: batch,
            throughput,
            power_w,
            throughput_per_watt: throughput / power_w,
            verification: if m.pass { Verification::Pass } else { Verification::Fail },
            rel_l2_error: m.rel_l2_error,
            rel_max_error: m.rel_max_error,
            replay_mismatches: m.replay_mismatches,
            imag_residue: m.imag_residue,
            underflow: t.flags.underflow,
            overflow: t.flags.overflow,
            invalid: t.flags.invalid,
        })
    }

    pub fn passed(&self) -> bool {
        self.verification == Verification::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Config(format!("unknown report format: {s}"))),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn emit_report(report: &Report, sink: impl Write, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, report).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(sink)?;
            Ok(())
        }
        ReportFormat::Csv => emit_reports(std::slice::from_ref(report), sink, format),
    }
}

/// Several reports: a JSON array, or one CSV header followed by one row each.
pub fn emit_reports(reports: &[Report], mut sink: impl Write, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, reports).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(sink)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
            w.write_record(CSV_COLUMNS).map_err(csv_err)?;
            for r in reports {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Any flat serializable rows: a JSON array, or CSV with a header taken from
/// the field names.
pub fn emit_table<T: Serialize>(rows: &[T], mut sink: impl Write, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, rows).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(sink)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for r in rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
