//! Column placement, schedule execution and data movement for one crossbar.

use std::collections::HashMap;

use super::layout::{BitLayout, Loc};
use super::{FftConfig, FftPlan};
use crate::arith::{self, cols, BinaryOp, Circuit, Program, UnaryOp};
use crate::crossbar::{ColumnOp, Crossbar, Mask};
use crate::error::{Error, Result};
use crate::oracle::LogOp;

/// A word-sized column group inside a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotRef {
    /// Element slot of a data region.
    Data { region: usize, slot: usize },
    /// Partner copy used by the one-element-per-row configuration.
    Align,
    Twiddle,
    /// Shared slot outside the units.
    Extra(usize),
}

/// An element-wise schedule applied to every active row of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Butterfly { u: SlotRef, v: SlotRef, w: SlotRef },
    /// `(u, v) <- (u + v, u - v)`
    SumDiff { u: SlotRef, v: SlotRef },
    Binary { op: BinaryOp, a: SlotRef, b: SlotRef, dst: SlotRef },
    Unary { op: UnaryOp, src: SlotRef, dst: SlotRef },
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    row: usize,
    col: usize,
    id: usize,
}

/// Placement of one or more `n`-element regions (plus shared extra slots) on a
/// crossbar, with register tracking for replay.
#[derive(Debug)]
pub struct Workspace {
    pub plan: FftPlan,
    regions: usize,
    extras: usize,
    w: usize,
    unit_base: Vec<usize>,
    extra_base: usize,
    scratch_base: Vec<usize>,
    all_rows: Mask,
    programs: HashMap<(Kernel, usize), Program>,
    who: Vec<usize>,
    /// Location of every position, per region.
    pub layouts: Vec<BitLayout>,
    log: Option<Vec<LogOp>>,
}

impl Workspace {
    pub fn new(plan: FftPlan, xbar: &Crossbar, regions: usize, extras: usize) -> Result<Self> {
        let g = plan.geometry;
        if xbar.rows() != g.rows {
            return Err(Error::Config(format!(
                "plan needs {} rows, crossbar has {}",
                g.rows,
                xbar.rows()
            )));
        }
        let w = plan.element_columns;
        let r_extra = usize::from(plan.config == FftConfig::R);
        let unit_width = (regions * g.slots + r_extra + 1) * w;
        let scratch = plan.scratch_columns;
        let parts = xbar.partitions();
        let (unit_base, scratch_base, extra_base) = if parts.count() > 1 {
            if g.units > parts.count() {
                return Err(Error::Config(format!(
                    "{} units need at least as many partitions (have {})",
                    g.units,
                    parts.count()
                )));
            }
            if extras > 0 {
                return Err(Error::Config("shared slots need an unpartitioned crossbar".into()));
            }
            let mut ub = Vec::new();
            let mut sb = Vec::new();
            for u in 0..g.units {
                let range = parts.ranges()[u].clone();
                if unit_width + scratch > range.len() {
                    return Err(Error::Footprint {
                        needed: unit_width + scratch,
                        available: range.len(),
                    });
                }
                ub.push(range.start);
                sb.push(range.start + unit_width);
            }
            (ub, sb, 0)
        } else {
            let ub: Vec<usize> = (0..g.units).map(|u| u * unit_width).collect();
            let extra_base = g.units * unit_width;
            let s = extra_base + extras * w;
            let needed = s + scratch;
            if needed > xbar.cols() {
                return Err(Error::Footprint {
                    needed,
                    available: xbar.cols(),
                });
            }
            (ub, vec![s; g.units], extra_base)
        };
        if plan.use_partitions {
            let ok = matches!(plan.config, FftConfig::TwoRBeta { .. }) && parts.count() >= g.units && g.units > 1;
            if !ok {
                return Err(Error::Config(
                    "partition-parallel execution needs TwoRBeta with beta <= partition count".into(),
                ));
            }
        }
        let cells = regions * g.len() + extras * g.rows;
        Ok(Self {
            layouts: vec![BitLayout::natural(&g); regions],
            plan,
            regions,
            extras,
            w,
            unit_base,
            extra_base,
            scratch_base,
            all_rows: xbar.all_rows(),
            programs: HashMap::new(),
            who: (0..cells).collect(),
            log: None,
        })
    }

    pub fn regions(&self) -> usize {
        self.regions
    }

    pub fn element_columns(&self) -> usize {
        self.w
    }

    pub fn all_rows(&self) -> &Mask {
        &self.all_rows
    }

    /// Rightmost column used, plus one.
    pub fn footprint(&self) -> usize {
        self.scratch_base.iter().max().copied().unwrap_or(0) + self.plan.scratch_columns
    }

    pub fn col(&self, unit: usize, s: SlotRef) -> usize {
        let g = self.plan.geometry;
        let base = self.unit_base[unit];
        let data = self.regions * g.slots;
        match s {
            SlotRef::Data { region, slot } => base + (region * g.slots + slot) * self.w,
            SlotRef::Align => base + data * self.w,
            SlotRef::Twiddle => {
                let r = usize::from(self.plan.config == FftConfig::R);
                base + (data + r) * self.w
            }
            SlotRef::Extra(i) => self.extra_base + i * self.w,
        }
    }

    fn cell(&self, region: usize, l: Loc) -> Cell {
        let g = self.plan.geometry;
        Cell {
            row: l.row,
            col: self.col(l.unit, SlotRef::Data { region, slot: l.slot }),
            id: region * g.len() + g.index(l),
        }
    }

    fn extra_cell(&self, e: usize, row: usize) -> Cell {
        let g = self.plan.geometry;
        Cell {
            row,
            col: self.col(0, SlotRef::Extra(e)),
            id: self.regions * g.len() + e * g.rows + row,
        }
    }

    fn slot_cell(&self, unit: usize, row: usize, s: SlotRef) -> Option<Cell> {
        match s {
            SlotRef::Data { region, slot } => Some(self.cell(region, Loc { row, unit, slot })),
            SlotRef::Extra(e) => Some(self.extra_cell(e, row)),
            _ => None,
        }
    }

    pub fn read_word(&self, xbar: &Crossbar, region: usize, l: Loc) -> u64 {
        let c = self.cell(region, l);
        xbar.read_word(c.row, c.col, self.w)
    }

    /// Untimed host store of one element.
    pub fn store_word(&self, xbar: &mut Crossbar, region: usize, l: Loc, word: u64) {
        let c = self.cell(region, l);
        xbar.host_store(c.row, c.col, self.w, word);
    }

    /// Register currently held by the element slot at `l`.
    pub fn register(&self, region: usize, l: Loc) -> usize {
        self.who[self.cell(region, l).id]
    }

    pub fn register_of_slot(&self, unit: usize, row: usize, s: SlotRef) -> usize {
        self.who[self.slot_cell(unit, row, s).expect("slot holds no register").id]
    }

    pub fn enable_log(&mut self) {
        self.log = Some(Vec::new());
    }

    pub fn take_log(&mut self) -> Vec<LogOp> {
        self.log.take().unwrap_or_default()
    }

    pub fn logging(&self) -> bool {
        self.log.is_some()
    }

    pub fn record(&mut self, op: LogOp) {
        if let Some(l) = &mut self.log {
            l.push(op);
        }
    }

    fn all_cells(&self) -> Vec<Cell> {
        let g = self.plan.geometry;
        let mut v: Vec<Cell> = (0..self.regions)
            .flat_map(|r| (0..g.len()).map(move |i| (r, i)))
            .map(|(r, i)| self.cell(r, g.loc(i)))
            .collect();
        for e in 0..self.extras {
            v.extend((0..g.rows).map(|row| self.extra_cell(e, row)));
        }
        v.sort_by_key(|c| c.id);
        v
    }

    /// Memory word of every storage cell, indexed by cell id.
    pub fn snapshot(&self, xbar: &Crossbar) -> Vec<u64> {
        self.all_cells()
            .iter()
            .map(|c| xbar.read_word(c.row, c.col, self.w))
            .collect()
    }

    /// Register held by each cell, indexed by cell id.
    pub fn register_map(&self) -> &[usize] {
        &self.who
    }

    fn build(&self, k: Kernel, unit: usize) -> Program {
        let base = self.unit_base[unit];
        let rel = |s: SlotRef| self.col(unit, s) - base;
        let fmt = self.plan.format;
        let n = self.w;
        let mut c = Circuit::new();
        match k {
            Kernel::Butterfly { u, v, w } => arith::ops::butterfly_circuit(&mut c, fmt, rel(u), rel(v), rel(w)),
            Kernel::SumDiff { u, v } => arith::ops::sum_diff_circuit(&mut c, fmt, rel(u), rel(v)),
            Kernel::Binary { op, a, b, dst } => {
                let r = arith::ops::complex_binary(&mut c, fmt, op, &cols(rel(a), n), &cols(rel(b), n));
                c.store_bits(&cols(rel(dst), n), &r);
            }
            Kernel::Unary { op, src, dst } => {
                let r = arith::ops::complex_unary(&mut c, fmt, op, &cols(rel(src), n));
                c.store_bits(&cols(rel(dst), n), &r);
            }
        }
        let p = c.compile(self.scratch_base[unit] - base);
        assert!(p.scratch() <= self.plan.scratch_columns, "kernel exceeds the scratch budget");
        p
    }

    fn program(&mut self, k: Kernel, unit: usize) -> &Program {
        if !self.programs.contains_key(&(k, unit)) {
            let p = self.build(k, unit);
            self.programs.insert((k, unit), p);
        }
        &self.programs[&(k, unit)]
    }

    /// Runs `k` on every unit over `rows`: in lockstep across partitions when
    /// the plan asks for it, otherwise one unit after another.
    pub fn run_kernel(&mut self, xbar: &mut Crossbar, k: Kernel, rows: &Mask) -> Result<()> {
        let units = self.plan.geometry.units;
        if self.plan.use_partitions && units > 1 {
            let bases = self.unit_base.clone();
            self.program(k, 0).clone().run_parallel(xbar, &bases, rows)?;
        } else {
            for u in 0..units {
                let base = self.unit_base[u];
                let p = self.program(k, u).clone();
                p.run(xbar, base, rows)?;
            }
        }
        if self.log.is_some() {
            self.log_kernel(k, rows);
        }
        Ok(())
    }

    /// Runs `k` on a single unit.
    pub fn run_kernel_on(&mut self, xbar: &mut Crossbar, k: Kernel, unit: usize, rows: &Mask) -> Result<()> {
        let base = self.unit_base[unit];
        let p = self.program(k, unit).clone();
        p.run(xbar, base, rows)?;
        if self.log.is_some() {
            self.log_kernel_unit(k, unit, rows);
        }
        Ok(())
    }

    fn log_kernel(&mut self, k: Kernel, rows: &Mask) {
        for u in 0..self.plan.geometry.units {
            self.log_kernel_unit(k, u, rows);
        }
    }

    fn log_kernel_unit(&mut self, k: Kernel, u: usize, rows: &Mask) {
        let reg = |s: SlotRef, row: usize| self.register_of_slot(u, row, s);
        let ops: Vec<LogOp> = match k {
            Kernel::Butterfly { .. } => return,
            Kernel::SumDiff { u: a, v: b } => rows
                .iter_ones()
                .map(|row| LogOp::SumDiff {
                    u: reg(a, row),
                    v: reg(b, row),
                })
                .collect(),
            Kernel::Binary { op, a, b, dst } => rows
                .iter_ones()
                .map(|row| LogOp::Binary {
                    op,
                    dst: reg(dst, row),
                    a: reg(a, row),
                    b: reg(b, row),
                })
                .collect(),
            Kernel::Unary { op, src, dst } => rows
                .iter_ones()
                .map(|row| LogOp::Unary {
                    op,
                    dst: reg(dst, row),
                    src: reg(src, row),
                })
                .collect(),
        };
        for op in ops {
            self.record(op);
        }
    }
}

/// Data movement. Every copy is a NOT gate, so values travel through an even
/// number of inversions: columns are staged in scratch words `G1..G3`.
impl Workspace {
    /// Timed write of one word per row (`words[row]`) into a unit slot; one
    /// cycle per bit column.
    pub fn write_words(&mut self, xbar: &mut Crossbar, unit: usize, s: SlotRef, rows: &Mask, words: &[u64]) -> Result<()> {
        let start = self.col(unit, s);
        for b in 0..self.w {
            let bits: Vec<bool> = words.iter().map(|w| (w >> b) & 1 == 1).collect();
            let values = Mask::from_bools(&bits);
            xbar.write_column(start + b, rows, &values)?;
        }
        Ok(())
    }

    fn staging(&self, col: usize) -> [usize; 3] {
        // scratch of the unit that owns `col` (all units share it when unpartitioned)
        let u = self
            .unit_base
            .iter()
            .rposition(|&b| b <= col)
            .unwrap_or(0);
        let s = self.scratch_base[u];
        [s, s + self.w, s + 2 * self.w]
    }

    fn not_word(&self, xbar: &mut Crossbar, src: usize, dst: usize, rows: &Mask) -> Result<()> {
        let parts = xbar.partitions().clone();
        for b in 0..self.w {
            let op = ColumnOp::not(src + b, dst + b);
            if parts.partition_of(src + b) == parts.partition_of(dst + b) {
                xbar.column_op(op, rows)?;
            } else {
                xbar.column_op_bridged(op, rows)?;
            }
        }
        Ok(())
    }

    fn word_mask(&self, xbar: &Crossbar, col: usize) -> Mask {
        Mask::from_range(xbar.cols(), col..col + self.w)
    }

    /// Exchanges the contents of disjoint cell pairs.
    fn swap_round(&mut self, xbar: &mut Crossbar, pairs: &[(Cell, Cell)]) -> Result<()> {
        let rows = xbar.rows();
        let mut same: Vec<((usize, usize), Vec<usize>)> = Vec::new();
        // (col_a, col_b) -> batches of (pairs, rows on side a, rows on side b)
        type Batch = (Vec<(usize, usize)>, Mask, Mask);
        let mut cross: Vec<((usize, usize), Vec<Batch>)> = Vec::new();
        for &(a, b) in pairs {
            if a.id == b.id {
                continue;
            }
            let (a, b) = if a.col <= b.col { (a, b) } else { (b, a) };
            if a.row == b.row {
                let key = (a.col, b.col);
                match same.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, v)) => v.push(a.row),
                    None => same.push((key, vec![a.row])),
                }
            } else {
                let key = (a.col, b.col);
                let idx = match cross.iter().position(|(k, _)| *k == key) {
                    Some(i) => i,
                    None => {
                        cross.push((key, Vec::new()));
                        cross.len() - 1
                    }
                };
                let batches = &mut cross[idx].1;
                let fit = batches
                    .iter()
                    .position(|(_, ra, rb)| !rb.get(a.row) && !ra.get(b.row));
                let bi = match fit {
                    Some(i) => i,
                    None => {
                        batches.push((Vec::new(), Mask::none(rows), Mask::none(rows)));
                        batches.len() - 1
                    }
                };
                let (ps, ra, rb) = &mut batches[bi];
                ps.push((a.row, b.row));
                ra.set(a.row, true);
                rb.set(b.row, true);
            }
            self.who.swap(a.id, b.id);
        }
        for ((ca, cb), rs) in same {
            let mask = Mask::from_indices(rows, rs);
            let [g1, g2, _] = self.staging(ca);
            self.not_word(xbar, ca, g1, &mask)?;
            self.not_word(xbar, cb, g2, &mask)?;
            self.not_word(xbar, g2, ca, &mask)?;
            self.not_word(xbar, g1, cb, &mask)?;
        }
        for ((ca, cb), batches) in cross {
            let [g1, g2, g3] = self.staging(ca);
            let m1 = self.word_mask(xbar, g1);
            let m2 = self.word_mask(xbar, g2);
            for (ps, ra, rb) in batches {
                self.not_word(xbar, ca, g1, &ra)?;
                self.not_word(xbar, cb, g2, &rb)?;
                for &(r_a, r_b) in &ps {
                    xbar.row_op(ColumnOp::not(r_a, r_b), &m1)?;
                }
                for &(r_a, r_b) in &ps {
                    xbar.row_op(ColumnOp::not(r_b, r_a), &m2)?;
                }
                self.not_word(xbar, g1, g3, &rb)?;
                self.not_word(xbar, g2, g3, &ra)?;
                if ca == cb {
                    self.not_word(xbar, g3, ca, &ra.union(&rb))?;
                } else {
                    self.not_word(xbar, g3, cb, &rb)?;
                    self.not_word(xbar, g3, ca, &ra)?;
                }
            }
        }
        Ok(())
    }

    /// Moves the element at location index `i` of `region` to `perm[i]`, using
    /// one swap round for involutions and two otherwise.
    pub fn permute(&mut self, xbar: &mut Crossbar, region: usize, perm: &[usize]) -> Result<()> {
        let g = self.plan.geometry;
        for round in swap_rounds(perm) {
            let cell = |i: usize| self.cell(region, g.loc(i));
            let pairs: Vec<(Cell, Cell)> = round.iter().map(|&(a, b)| (cell(a), cell(b))).collect();
            self.swap_round(xbar, &pairs)?;
        }
        Ok(())
    }

    /// Physically rearranges `region` from its current layout to `to`.
    pub fn relocate(&mut self, xbar: &mut Crossbar, region: usize, to: &BitLayout) -> Result<()> {
        let g = self.plan.geometry;
        let from = self.layouts[region].table(&g);
        let dest = to.table(&g);
        let mut perm = vec![0; g.len()];
        for q in 0..g.len() {
            perm[g.index(from[q])] = g.index(dest[q]);
        }
        self.permute(xbar, region, &perm)?;
        self.layouts[region] = to.clone();
        Ok(())
    }

    /// One-element-per-row alignment: copies the element of each `v` row next to
    /// its `u` partner (into the align slot). One column pass plus one row copy
    /// per pair; a single inversion each, so the copy arrives with true polarity.
    pub fn align_rows(&mut self, xbar: &mut Crossbar, region: usize, pairs: &[(usize, usize)]) -> Result<()> {
        let rows = xbar.rows();
        let d = self.col(0, SlotRef::Data { region, slot: 0 });
        let v = self.col(0, SlotRef::Align);
        let vrows = Mask::from_indices(rows, pairs.iter().map(|p| p.1));
        self.not_word(xbar, d, v, &vrows)?;
        let m = self.word_mask(xbar, v);
        for &(u, vr) in pairs {
            xbar.row_op(ColumnOp::not(vr, u), &m)?;
        }
        Ok(())
    }

    /// Inverse of [`Self::align_rows`]: returns the updated partner elements.
    pub fn restore_rows(&mut self, xbar: &mut Crossbar, region: usize, pairs: &[(usize, usize)]) -> Result<()> {
        let rows = xbar.rows();
        let d = self.col(0, SlotRef::Data { region, slot: 0 });
        let v = self.col(0, SlotRef::Align);
        let m = self.word_mask(xbar, v);
        for &(u, vr) in pairs {
            xbar.row_op(ColumnOp::not(u, vr), &m)?;
        }
        let vrows = Mask::from_indices(rows, pairs.iter().map(|p| p.1));
        self.not_word(xbar, v, d, &vrows)
    }
}

/// Splits a permutation into rounds of disjoint transpositions: one round for
/// an involution, else two (each cycle `c_0 -> c_1 -> ...` is the reflection
/// `c_i <-> c_-i` followed by `c_i <-> c_1-i`).
pub(crate) fn swap_rounds(perm: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let n = perm.len();
    if (0..n).all(|i| perm[perm[i]] == i) {
        let round: Vec<(usize, usize)> = (0..n).filter(|&i| perm[i] > i).map(|i| (i, perm[i])).collect();
        return if round.is_empty() { vec![] } else { vec![round] };
    }
    let mut seen = vec![false; n];
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut cyc = vec![s];
        seen[s] = true;
        let mut x = perm[s];
        while x != s {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        let m = cyc.len();
        if m == 1 {
            continue;
        }
        for i in 0..m {
            let j = (m - i) % m;
            if i < j {
                r1.push((cyc[i], cyc[j]));
            }
            let k = (m + 1 - i) % m;
            if i < k {
                r2.push((cyc[i], cyc[k]));
            }
        }
    }
    vec![r1, r2]
}
