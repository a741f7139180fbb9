//! Radix-2 FFT mapped onto one crossbar.
//!
//! Three storage configurations are supported: `R` keeps one element per row
//! (`n = r`), `TwoR` two per row (`n = 2r`), and `TwoRBeta` spreads `2β`
//! elements per row over `β` column units (`n = 2rβ`). Every stage runs the
//! butterfly schedule once per unit over all rows in parallel; data movement
//! between stages uses NOT-gate copies along columns and rows.

mod engine;
pub mod layout;
mod workspace;


use serde::{Deserialize, Serialize};

use crate::arith::{self, BinaryOp, NumberFormat};
use crate::crossbar::CrossbarDims;
use crate::error::{Error, Result};
pub use engine::{
    bit_reversal_permute, load_sequence, read_sequence, read_words, run_fft, run_inverse_fft, run_transform,
    FftRun, PhaseCycles, StageCycles,
};
pub use layout::{BitLayout, Coord, Geometry, Loc};
pub use workspace::{Kernel, SlotRef, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FftConfig {
    R,
    TwoR,
    TwoRBeta { beta: usize },
}

impl FftConfig {
    pub fn units(&self) -> usize {
        match *self {
            FftConfig::TwoRBeta { beta } => beta,
            _ => 1,
        }
    }

    pub fn slots(&self) -> usize {
        match self {
            FftConfig::R => 1,
            _ => 2,
        }
    }

    /// Elements stored per row.
    pub fn per_row(&self) -> usize {
        self.units() * self.slots()
    }

    pub fn geometry(&self, n: usize) -> Geometry {
        Geometry {
            rows: n / self.per_row(),
            units: self.units(),
            slots: self.slots(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FftConfig::R => "r".into(),
            FftConfig::TwoR => "2r".into(),
            FftConfig::TwoRBeta { beta } => format!("2rb{beta}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Immutable description of one transform.
#[derive(Debug, Clone, Serialize)]
pub struct FftPlan {
    pub n: usize,
    pub config: FftConfig,
    pub format: NumberFormat,
    pub direction: Direction,
    pub geometry: Geometry,
    /// Run the input bit-reversal physically (otherwise positions are relabeled).
    pub skip_input_permutation: bool,
    /// Execute the β units in lockstep on separate partitions.
    pub use_partitions: bool,
    /// Columns per complex element.
    pub element_columns: usize,
    /// Scratch columns per unit.
    pub scratch_columns: usize,
    /// Data, alignment and twiddle columns per unit (single data region).
    pub unit_columns: usize,
}

impl FftPlan {
    pub fn stages(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn with_skip_permutation(mut self, skip: bool) -> Self {
        self.skip_input_permutation = skip;
        self
    }

    pub fn with_partitions(mut self, on: bool) -> Self {
        self.use_partitions = on;
        self
    }

    pub fn with_direction(mut self, d: Direction) -> Self {
        self.direction = d;
        self
    }

    /// Twiddle word `ω_{2^s}^j` for the butterfly whose upper input sits at
    /// `position` in stage `s`, rounded once from double precision.
    pub fn twiddle(&self, stage: u32, position: usize, direction: Direction) -> u64 {
        let half = 1usize << (stage - 1);
        let j = position % half;
        let w = crate::oracle::root_of_unity(2 * half, j, direction == Direction::Inverse);
        self.format.encode_complex(w)
    }

    /// Column footprint of a single-region transform without partitions.
    pub fn footprint(&self) -> usize {
        self.config.units() * self.unit_columns + self.scratch_columns
    }
}

/// Scratch columns needed by the heaviest element-wise schedule (and by the
/// three staging words used for swaps).
pub fn scratch_columns(format: NumberFormat) -> usize {
    let w = format.complex_bits();
    let bf = arith::butterfly(format, 0, w, 2 * w, 3 * w).scratch();
    let mul = arith::complex_op(format, BinaryOp::Mul, 0, w, 2 * w, 3 * w).scratch();
    bf.max(mul).max(3 * w)
}

pub fn plan_fft(n: usize, dims: CrossbarDims, format: NumberFormat, config: FftConfig, direction: Direction) -> Result<FftPlan> {
    if !format.is_float() {
        return Err(Error::Format("the FFT requires a floating-point format".into()));
    }
    if !n.is_power_of_two() {
        return Err(Error::Config(format!("n = {n} is not a power of two")));
    }
    if let FftConfig::TwoRBeta { beta } = config {
        if beta == 0 || !beta.is_power_of_two() {
            return Err(Error::Config(format!("beta = {beta} must be a power of two")));
        }
    }
    if !n.is_multiple_of(config.per_row()) || n / config.per_row() != dims.rows {
        return Err(Error::Config(format!(
            "{} configuration stores {} elements per row: n = {n} does not match r = {}",
            config.name(),
            config.per_row(),
            dims.rows
        )));
    }
    let w = format.complex_bits();
    let extra = if config == FftConfig::R { 2 } else { 1 };
    let plan = FftPlan {
        n,
        config,
        format,
        direction,
        geometry: config.geometry(n),
        skip_input_permutation: false,
        use_partitions: false,
        element_columns: w,
        scratch_columns: scratch_columns(format),
        unit_columns: (config.slots() + extra) * w,
    };
    if plan.footprint() > dims.cols {
        return Err(Error::Footprint {
            needed: plan.footprint(),
            available: dims.cols,
        });
    }
    Ok(plan)
}

/// Zeroed crossbar with `plan.geometry.rows` rows, `cols` columns and `k` even partitions.
pub fn new_crossbar(plan: &FftPlan, cols: usize, k: usize) -> Result<crate::crossbar::Crossbar> {
    use crate::crossbar::{Crossbar, Init, PartitionConfig};
    let dims = CrossbarDims::new(plan.geometry.rows, cols)?;
    Crossbar::new(dims, PartitionConfig::even(cols, k)?, Init::Zeros)
}

/// Replays `log` from the register values in `before` and checks every
/// storage cell of the workspace against the replayed register it holds.
/// Returns the number of mismatching cells.
pub fn replay_mismatches(ws: &Workspace, xbar: &crate::crossbar::Crossbar, before: &[u64], log: &[crate::oracle::LogOp]) -> usize {
    replay_mismatches_with(ws, xbar, before, log, crate::oracle::Rounding::Faithful)
}

pub fn replay_mismatches_with(
    ws: &Workspace,
    xbar: &crate::crossbar::Crossbar,
    before: &[u64],
    log: &[crate::oracle::LogOp],
    rounding: crate::oracle::Rounding,
) -> usize {
    let regs = crate::oracle::replay_with(ws.plan.format, log, before, rounding);
    let after = ws.snapshot(xbar);
    after
        .iter()
        .zip(ws.register_map())
        .filter(|(&word, &r)| word != regs[r])
        .count()
}
