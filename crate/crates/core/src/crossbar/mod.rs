//! Binary crossbar model with single-cycle stateful logic on columns and rows.
//!
//! State is stored column-major: each column is a bitset over the rows, so a
//! row-parallel column gate is a handful of word operations. Every mutation
//! goes through a timed operation, except [`Crossbar::host_store`], which models
//! untimed initialization from the host.

mod mask;
mod partition;
mod trace;

use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use mask::Mask;
pub use partition::{PartitionConfig, MAX_PARTITIONS};
pub use trace::{Flags, Trace, CLOCK_HZ, GATE_ENERGY_FJ};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossbarDims {
    pub rows: usize,
    pub cols: usize,
}

impl CrossbarDims {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config(format!("crossbar dims {rows}x{cols} must be positive")));
        }
        Ok(Self { rows, cols })
    }

    /// Bytes of storage in one crossbar.
    pub fn bytes(&self) -> u64 {
        (self.rows as u64 * self.cols as u64) / 8
    }
}

impl Default for CrossbarDims {
    fn default() -> Self {
        Self {
            rows: 1024,
            cols: 1024,
        }
    }
}

/// Stateful gate kinds. The output cell is initialized as part of the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Nor(usize, usize),
    Not(usize),
}

impl Gate {
    fn inputs(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Nor(a, b) => (a, Some(b)),
            Gate::Not(a) => (a, None),
        }
    }

    pub fn offset(self, by: usize) -> Gate {
        match self {
            Gate::Nor(a, b) => Gate::Nor(a + by, b + by),
            Gate::Not(a) => Gate::Not(a + by),
        }
    }
}

/// A gate writing one output column (or row, for row operations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnOp {
    pub gate: Gate,
    pub out: usize,
}

impl ColumnOp {
    pub fn nor(a: usize, b: usize, out: usize) -> Self {
        Self {
            gate: Gate::Nor(a, b),
            out,
        }
    }

    pub fn not(a: usize, out: usize) -> Self {
        Self {
            gate: Gate::Not(a),
            out,
        }
    }

    pub fn offset(self, by: usize) -> Self {
        Self {
            gate: self.gate.offset(by),
            out: self.out + by,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Init {
    Zeros,
    Ones,
    /// Row-major explicit contents.
    Matrix(Vec<Vec<bool>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagKind {
    Underflow,
    Overflow,
    Invalid,
}

#[derive(Debug, Clone)]
pub struct Crossbar {
    dims: CrossbarDims,
    partitions: PartitionConfig,
    words_per_col: usize,
    state: Vec<u64>,
    trace: Trace,
}

impl Crossbar {
    pub fn new(dims: CrossbarDims, partitions: PartitionConfig, init: Init) -> Result<Self> {
        let dims = CrossbarDims::new(dims.rows, dims.cols)?;
        // Re-validate against this crossbar's width.
        let partitions = PartitionConfig::from_ranges(dims.cols, partitions.ranges().to_vec())?;
        let words_per_col = dims.rows.div_ceil(64);
        let mut xbar = Self {
            dims,
            partitions,
            words_per_col,
            state: vec![0; words_per_col * dims.cols],
            trace: Trace::default(),
        };
        match init {
            Init::Zeros => {}
            Init::Ones => {
                let all = Mask::all(dims.rows);
                for c in 0..dims.cols {
                    xbar.col_words_mut(c).copy_from_slice(all.words());
                }
            }
            Init::Matrix(m) => {
                if m.len() != dims.rows || m.iter().any(|r| r.len() != dims.cols) {
                    return Err(Error::Config("initial matrix does not match dims".into()));
                }
                for (r, row) in m.iter().enumerate() {
                    for (c, &b) in row.iter().enumerate() {
                        xbar.set_bit(r, c, b);
                    }
                }
            }
        }
        Ok(xbar)
    }

    /// Unpartitioned crossbar of zeros.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(CrossbarDims::new(rows, cols)?, PartitionConfig::single(cols), Init::Zeros)
    }

    pub fn dims(&self) -> CrossbarDims {
        self.dims
    }

    pub fn rows(&self) -> usize {
        self.dims.rows
    }

    pub fn cols(&self) -> usize {
        self.dims.cols
    }

    pub fn partitions(&self) -> &PartitionConfig {
        &self.partitions
    }

    pub fn trace(&self) -> Trace {
        self.trace
    }

    pub fn reset_trace(&mut self) {
        self.trace = Trace::default();
    }

    pub fn all_rows(&self) -> Mask {
        Mask::all(self.dims.rows)
    }

    pub fn all_cols(&self) -> Mask {
        Mask::all(self.dims.cols)
    }

    #[inline]
    fn col_words(&self, c: usize) -> &[u64] {
        &self.state[c * self.words_per_col..(c + 1) * self.words_per_col]
    }

    #[inline]
    fn col_words_mut(&mut self, c: usize) -> &mut [u64] {
        &mut self.state[c * self.words_per_col..(c + 1) * self.words_per_col]
    }

    #[inline]
    pub fn bit(&self, row: usize, col: usize) -> bool {
        (self.state[col * self.words_per_col + row / 64] >> (row % 64)) & 1 == 1
    }

    #[inline]
    fn set_bit(&mut self, row: usize, col: usize, v: bool) {
        let w = &mut self.state[col * self.words_per_col + row / 64];
        let m = 1u64 << (row % 64);
        if v {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    fn check_col(&self, c: usize) -> Result<()> {
        if c >= self.dims.cols {
            return Err(Error::OutOfRange {
                what: "column",
                index: c,
                limit: self.dims.cols,
            });
        }
        Ok(())
    }

    fn check_row(&self, r: usize) -> Result<()> {
        if r >= self.dims.rows {
            return Err(Error::OutOfRange {
                what: "row",
                index: r,
                limit: self.dims.rows,
            });
        }
        Ok(())
    }

    fn check_mask(&self, m: &Mask, len: usize, what: &'static str) -> Result<()> {
        if m.len() != len {
            return Err(Error::Config(format!(
                "{what} mask has length {} but crossbar has {len}",
                m.len()
            )));
        }
        Ok(())
    }

    fn validate_column_op(&self, op: &ColumnOp, bridged: bool) -> Result<()> {
        let (a, b) = op.gate.inputs();
        self.check_col(a)?;
        self.check_col(op.out)?;
        if let Some(b) = b {
            self.check_col(b)?;
            if b == op.out {
                return Err(Error::OutputAliasesInput(op.out));
            }
        }
        if a == op.out {
            return Err(Error::OutputAliasesInput(op.out));
        }
        if !bridged && self.partitions.count() > 1 {
            let p = self.partitions.partition_of(op.out);
            for c in std::iter::once(a).chain(b) {
                let q = self.partitions.partition_of(c);
                if q != p {
                    return Err(Error::PartitionSpan(q, p));
                }
            }
        }
        Ok(())
    }

    fn apply_column_op(&mut self, op: &ColumnOp, rows: &Mask) {
        let w = self.words_per_col;
        let (a, b) = op.gate.inputs();
        let m = rows.words();
        for i in 0..w {
            let va = self.state[a * w + i];
            let v = match b {
                Some(b) => !(va | self.state[b * w + i]),
                None => !va,
            };
            let o = &mut self.state[op.out * w + i];
            *o = (*o & !m[i]) | (v & m[i]);
        }
    }

    fn column_op_inner(&mut self, op: ColumnOp, rows: &Mask, bridged: bool) -> Result<()> {
        self.check_mask(rows, self.dims.rows, "row")?;
        self.validate_column_op(&op, bridged)?;
        self.apply_column_op(&op, rows);
        self.trace.cycles += 1;
        self.trace.column_ops += 1;
        self.trace.gate_ops += rows.count() as u64;
        Ok(())
    }

    /// Row-parallel gate on columns; one cycle regardless of how many rows are active.
    pub fn column_op(&mut self, op: ColumnOp, rows: &Mask) -> Result<()> {
        self.column_op_inner(op, rows, false)
    }

    pub fn nor_columns(&mut self, a: usize, b: usize, out: usize, rows: &Mask) -> Result<()> {
        self.column_op(ColumnOp::nor(a, b, out), rows)
    }

    pub fn not_column(&mut self, a: usize, out: usize, rows: &Mask) -> Result<()> {
        self.column_op(ColumnOp::not(a, out), rows)
    }

    /// Explicit inter-partition copy step: a column gate whose operands may lie
    /// in different partitions. Executes alone, in one cycle.
    pub fn column_op_bridged(&mut self, op: ColumnOp, rows: &Mask) -> Result<()> {
        self.column_op_inner(op, rows, true)
    }

    /// Issue up to one column gate per partition in a single cycle.
    pub fn parallel_partition_step(&mut self, ops: &[(ColumnOp, &Mask)]) -> Result<()> {
        let mut used = [false; MAX_PARTITIONS];
        for (op, rows) in ops {
            self.check_mask(rows, self.dims.rows, "row")?;
            self.validate_column_op(op, false)?;
            let p = self.partitions.partition_of(op.out);
            let (a, b) = op.gate.inputs();
            for c in std::iter::once(a).chain(b) {
                let q = self.partitions.partition_of(c);
                if q != p {
                    return Err(Error::PartitionSpan(q, p));
                }
            }
            if used[p] {
                return Err(Error::PartitionConflict(p));
            }
            used[p] = true;
        }
        if ops.is_empty() {
            return Ok(());
        }
        let mut gates = 0;
        for (op, rows) in ops {
            self.apply_column_op(op, rows);
            gates += rows.count() as u64;
        }
        self.trace.cycles += 1;
        self.trace.column_ops += ops.len() as u64;
        self.trace.gate_ops += gates;
        if ops.len() > 1 {
            self.trace.parallel_steps += 1;
        }
        Ok(())
    }

    /// Column-parallel gate on rows, restricted to the columns in `cols`.
    pub fn row_op(&mut self, op: ColumnOp, cols: &Mask) -> Result<()> {
        self.check_mask(cols, self.dims.cols, "column")?;
        let (a, b) = op.gate.inputs();
        self.check_row(a)?;
        self.check_row(op.out)?;
        if let Some(b) = b {
            self.check_row(b)?;
            if b == op.out {
                return Err(Error::OutputAliasesInput(op.out));
            }
        }
        if a == op.out {
            return Err(Error::OutputAliasesInput(op.out));
        }
        for c in cols.iter_ones() {
            let v = match b {
                Some(b) => !(self.bit(a, c) | self.bit(b, c)),
                None => !self.bit(a, c),
            };
            self.set_bit(op.out, c, v);
        }
        self.trace.cycles += 1;
        self.trace.row_ops += 1;
        self.trace.gate_ops += cols.count() as u64;
        Ok(())
    }

    pub fn nor_rows(&mut self, a: usize, b: usize, out: usize, cols: &Mask) -> Result<()> {
        self.row_op(ColumnOp::nor(a, b, out), cols)
    }

    pub fn not_row(&mut self, a: usize, out: usize, cols: &Mask) -> Result<()> {
        self.row_op(ColumnOp::not(a, out), cols)
    }

    /// Timed write of one column segment: `values[r]` is stored for every row in `rows`.
    /// Costs one cycle and no gate energy.
    pub fn write_column(&mut self, col: usize, rows: &Mask, values: &Mask) -> Result<()> {
        self.check_col(col)?;
        self.check_mask(rows, self.dims.rows, "row")?;
        self.check_mask(values, self.dims.rows, "value")?;
        let m = rows.words().to_vec();
        let v = values.words();
        for (i, o) in self.col_words_mut(col).iter_mut().enumerate() {
            *o = (*o & !m[i]) | (v[i] & m[i]);
        }
        self.trace.cycles += 1;
        self.trace.write_ops += 1;
        Ok(())
    }

    /// Timed write of one row segment.
    pub fn write_row(&mut self, row: usize, cols: &Mask, values: &Mask) -> Result<()> {
        self.check_row(row)?;
        self.check_mask(cols, self.dims.cols, "column")?;
        self.check_mask(values, self.dims.cols, "value")?;
        for c in cols.iter_ones() {
            self.set_bit(row, c, values.get(c));
        }
        self.trace.cycles += 1;
        self.trace.write_ops += 1;
        Ok(())
    }

    /// Host-side copy of a rectangular region; does not touch the trace.
    pub fn read_region(&self, rows: Range<usize>, cols: Range<usize>) -> Result<Vec<Vec<bool>>> {
        if rows.end > self.dims.rows {
            return Err(Error::OutOfRange {
                what: "row",
                index: rows.end - 1,
                limit: self.dims.rows,
            });
        }
        if cols.end > self.dims.cols {
            return Err(Error::OutOfRange {
                what: "column",
                index: cols.end - 1,
                limit: self.dims.cols,
            });
        }
        Ok(rows
            .map(|r| cols.clone().map(|c| self.bit(r, c)).collect())
            .collect())
    }

    /// Host-side read of up to 64 bits of a row; column `start` is the least significant bit.
    pub fn read_word(&self, row: usize, start: usize, width: usize) -> u64 {
        assert!(width <= 64 && start + width <= self.dims.cols && row < self.dims.rows);
        (0..width).fold(0u64, |acc, i| acc | ((self.bit(row, start + i) as u64) << i))
    }

    /// Untimed host initialization of up to 64 bits of a row.
    pub fn host_store(&mut self, row: usize, start: usize, width: usize, value: u64) {
        assert!(width <= 64 && start + width <= self.dims.cols && row < self.dims.rows);
        for i in 0..width {
            self.set_bit(row, start + i, (value >> i) & 1 == 1);
        }
    }

    /// Simulator instrumentation: raise `kind` if any selected row holds a one in `col`.
    /// Not a crossbar operation; costs nothing.
    pub fn probe_flag(&mut self, col: usize, rows: &Mask, kind: FlagKind) {
        let hit = self
            .col_words(col)
            .iter()
            .zip(rows.words())
            .any(|(w, m)| w & m != 0);
        if hit {
            match kind {
                FlagKind::Underflow => self.trace.flags.underflow = true,
                FlagKind::Overflow => self.trace.flags.overflow = true,
                FlagKind::Invalid => self.trace.flags.invalid = true,
            }
        }
    }
}

#[cfg(test)]
mod tests;
