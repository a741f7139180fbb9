//! Batched benchmark runs: one crossbar is simulated end to end and the
//! result is extrapolated to every crossbar of a memory of the given size.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::NumberFormat;
use crate::crossbar::CLOCK_HZ;
use crate::error::{Error, Result};
use crate::fft::FftConfig;

mod input;
mod report;
mod run;

pub use input::{random_sequence, read_sequence_file, write_sequence_file, SequenceFile};
pub use report::{emit_report, emit_reports, emit_table, Report, ReportFormat, CSV_COLUMNS};
pub use run::{execute, execute_with, run, run_on_input, sweep, sweep_with, Exec, tolerance, SweepOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Workload {
    Fft,
    Ifft,
    PolymulComplex,
    PolymulReal,
    /// Forward transform checked bit for bit against the replay oracle and
    /// against a double-precision DFT.
    Verify,
}

impl Workload {
    pub const ALL: [Workload; 5] = [
        Workload::Fft,
        Workload::Ifft,
        Workload::PolymulComplex,
        Workload::PolymulReal,
        Workload::Verify,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Workload::Fft => "fft",
            Workload::Ifft => "ifft",
            Workload::PolymulComplex => "polymul-complex",
            Workload::PolymulReal => "polymul-real",
            Workload::Verify => "verify",
        }
    }

    pub fn is_polymul(&self) -> bool {
        matches!(self, Workload::PolymulComplex | Workload::PolymulReal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormatPreset {
    #[serde(rename = "single-complex-64")]
    Single,
    #[serde(rename = "half-complex-32")]
    Half,
}

impl FormatPreset {
    pub fn name(&self) -> &'static str {
        match self {
            FormatPreset::Single => "single-complex-64",
            FormatPreset::Half => "half-complex-32",
        }
    }

    pub fn format(&self) -> NumberFormat {
        match self {
            FormatPreset::Single => NumberFormat::SINGLE,
            FormatPreset::Half => NumberFormat::HALF,
        }
    }
}

macro_rules! named_enum {
    ($t:ty, $all:expr) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $t {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                $all.into_iter()
                    .find(|v| v.name() == s)
                    .ok_or_else(|| Error::Config(format!("unknown {}: {s}", stringify!($t))))
            }
        }
    };
}

named_enum!(Workload, Workload::ALL);
named_enum!(FormatPreset, [FormatPreset::Single, FormatPreset::Half, ]);

/// Parses `r`, `2r`, or `2rb` with `beta` units; `2rb<k>` names the unit
/// count inline and ignores `beta`.
pub fn parse_config(name: &str, beta: usize) -> Result<FftConfig> {
    if let Some(k) = name.strip_prefix("2rb").filter(|k| !k.is_empty() && *k != "eta") {
        let k = k.parse().map_err(|_| Error::Config(format!("unknown config: {name}")))?;
        return parse_config("2rb", k);
    }
    match name {
        "r" => Ok(FftConfig::R),
        "2r" => Ok(FftConfig::TwoR),
        "2rb" | "2rbeta" => {
            if beta < 2 || !beta.is_power_of_two() {
                return Err(Error::Config(format!("beta must be a power of two >= 2, got {beta}")));
            }
            Ok(FftConfig::TwoRBeta { beta })
        }
        _ => Err(Error::Config(format!("unknown config: {name}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub workload: Workload,
    /// Transform length; for polynomial workloads the padded length, with
    /// operands of `n / 2` coefficients each.
    pub n: usize,
    pub format: FormatPreset,
    pub config: FftConfig,
    pub partitions: usize,
    pub memory_gb: u64,
    pub rows: usize,
    pub cols: usize,
    pub clock_hz: f64,
    pub seed: u64,
    pub trials: usize,
    /// Execute the input bit-reversal instead of relabelling it away.
    pub permute_input: bool,
}

impl BenchConfig {
    pub fn new(workload: Workload, n: usize, format: FormatPreset, config: FftConfig) -> Self {
        Self {
            workload,
            n,
            format,
            config,
            partitions: 1,
            memory_gb: 8,
            rows: 1024,
            cols: 1024,
            clock_hz: CLOCK_HZ,
            seed: 0,
            trials: 1,
            permute_input: false,
        }
    }

    pub fn with_partitions(mut self, k: usize) -> Self {
        self.partitions = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_memory_gb(mut self, gb: u64) -> Self {
        self.memory_gb = gb;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 2 {
            return Err(Error::Config(format!("n must be a power of two >= 2, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if !(self.clock_hz.is_finite() && self.clock_hz > 0.0) {
            return Err(Error::Config(format!("invalid clock {}", self.clock_hz)));
        }
        if self.memory_gb == 0 {
            return Err(Error::Config("memory size must be positive".into()));
        }
        let used = self.used_rows()?;
        if used > self.rows {
            return Err(Error::Config(format!(
                "n = {} needs {used} rows under {}, the crossbar has {}",
                self.n,
                self.config.name(),
                self.rows
            )));
        }
        Ok(())
    }

    /// Rows occupied by one transform.
    pub fn used_rows(&self) -> Result<usize> {
        let per_row = self.config.per_row();
        if self.n < per_row {
            return Err(Error::Config(format!("n = {} is too short for {}", self.n, self.config.name())));
        }
        Ok(self.n / per_row)
    }

    /// Independent instances stacked in the rows of one crossbar; they share
    /// every column operation and therefore the latency.
    pub fn batch_per_crossbar(&self) -> Result<u64> {
        Ok((self.rows / self.used_rows()?) as u64)
    }

    pub fn crossbar_count(&self) -> u64 {
        let bytes = self.memory_gb << 30;
        bytes / (self.rows as u64 * self.cols as u64 / 8)
    }
}
