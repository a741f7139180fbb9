//! Stage sequencing for the forward and inverse transforms.

use num_complex::Complex64;
use serde::Serialize;

use super::layout::BitLayout;
use super::workspace::{Kernel, SlotRef, Workspace};
use super::{Direction, FftConfig};
use crate::arith::UnaryOp;
use crate::crossbar::{Crossbar, Mask, Trace};
use crate::error::{Error, Result};
use crate::oracle::{bit_reverse, LogOp};

/// Cycles spent in each phase of a transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCycles {
    pub permute: u64,
    pub align: u64,
    pub twiddle: u64,
    pub butterfly: u64,
    pub swap: u64,
    pub scale: u64,
    #[serde(rename = "final")]
    pub final_relocate: u64,
}

impl PhaseCycles {
    pub fn total(&self) -> u64 {
        self.permute + self.align + self.twiddle + self.butterfly + self.swap + self.scale + self.final_relocate
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageCycles {
    pub stage: u32,
    pub align: u64,
    pub twiddle: u64,
    pub butterfly: u64,
    pub swap: u64,
}

impl StageCycles {
    pub fn total(&self) -> u64 {
        self.align + self.twiddle + self.butterfly + self.swap
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FftRun {
    pub trace: Trace,
    pub phases: PhaseCycles,
    pub stages: Vec<StageCycles>,
}

/// Untimed host load of `values` in natural (snake) order.
pub fn load_sequence(ws: &mut Workspace, xbar: &mut Crossbar, region: usize, values: &[Complex64]) -> Result<()> {
    let g = ws.plan.geometry;
    if values.len() != g.len() {
        return Err(Error::Length {
            expected: g.len(),
            got: values.len(),
        });
    }
    let lay = BitLayout::natural(&g);
    let fmt = ws.plan.format;
    for (j, v) in values.iter().enumerate() {
        ws.store_word(xbar, region, lay.locate(&g, j), fmt.encode_complex(*v));
    }
    ws.layouts[region] = lay;
    Ok(())
}

/// Element words in position order of the region's current layout.
pub fn read_words(ws: &Workspace, xbar: &Crossbar, region: usize) -> Vec<u64> {
    let g = ws.plan.geometry;
    ws.layouts[region]
        .table(&g)
        .into_iter()
        .map(|l| ws.read_word(xbar, region, l))
        .collect()
}

pub fn read_sequence(ws: &Workspace, xbar: &Crossbar, region: usize) -> Vec<Complex64> {
    let fmt = ws.plan.format;
    read_words(ws, xbar, region)
        .into_iter()
        .map(|w| fmt.decode_complex(w))
        .collect()
}

/// Physically moves element `j` to the location of element `bitrev(j)`.
pub fn bit_reversal_permute(ws: &mut Workspace, xbar: &mut Crossbar, region: usize) -> Result<()> {
    let g = ws.plan.geometry;
    let bits = g.len().trailing_zeros();
    let table = ws.layouts[region].table(&g);
    let mut perm = vec![0; g.len()];
    for j in 0..g.len() {
        perm[g.index(table[j])] = g.index(table[bit_reverse(j, bits)]);
    }
    ws.permute(xbar, region, &perm)
}

pub fn run_fft(ws: &mut Workspace, xbar: &mut Crossbar, region: usize) -> Result<FftRun> {
    run_transform(ws, xbar, region, Direction::Forward, true)
}

pub fn run_inverse_fft(ws: &mut Workspace, xbar: &mut Crossbar, region: usize) -> Result<FftRun> {
    run_transform(ws, xbar, region, Direction::Inverse, true)
}

/// Transforms `region` in place. The output (position `k` holds bin `k`) is
/// left in the last stage layout unless `natural_output` is set.
pub fn run_transform(
    ws: &mut Workspace,
    xbar: &mut Crossbar,
    region: usize,
    direction: Direction,
    natural_output: bool,
) -> Result<FftRun> {
    let start = xbar.trace();
    let g = ws.plan.geometry;
    let n = g.len();
    let stages = n.trailing_zeros();
    let mut ph = PhaseCycles::default();
    let mut per_stage = Vec::new();
    let mut mark = xbar.trace().cycles;
    let mut lap = |xbar: &Crossbar| {
        let c = xbar.trace().cycles;
        let d = c - mark;
        mark = c;
        d
    };

    if ws.plan.skip_input_permutation {
        ws.layouts[region] = ws.layouts[region].bit_reversed();
    } else {
        bit_reversal_permute(ws, xbar, region)?;
    }
    ph.permute = lap(xbar);

    let all = ws.all_rows().clone();
    for s in 1..=stages {
        let mut st = StageCycles { stage: s, ..Default::default() };
        let half = 1usize << (s - 1);
        if ws.plan.config == FftConfig::R {
            let table = ws.layouts[region].table(&g);
            let pairs: Vec<(usize, usize, usize)> = (0..n)
                .filter(|q| q & half == 0)
                .map(|q| (q, table[q].row, table[q + half].row))
                .collect();
            let rows: Vec<(usize, usize)> = pairs.iter().map(|p| (p.1, p.2)).collect();
            ws.align_rows(xbar, region, &rows)?;
            st.align = lap(xbar);
            let mut words = vec![0u64; g.rows];
            for &(q, u, _) in &pairs {
                words[u] = ws.plan.twiddle(s, q, direction);
            }
            let umask = Mask::from_indices(g.rows, rows.iter().map(|p| p.0));
            ws.write_words(xbar, 0, SlotRef::Twiddle, &umask, &words)?;
            st.twiddle = lap(xbar);
            let k = Kernel::Butterfly {
                u: SlotRef::Data { region, slot: 0 },
                v: SlotRef::Align,
                w: SlotRef::Twiddle,
            };
            ws.run_kernel(xbar, k, &umask)?;
            if ws.logging() {
                for &(q, _, _) in &pairs {
                    let op = LogOp::Butterfly {
                        u: ws.register(region, table[q]),
                        v: ws.register(region, table[q + half]),
                        w: words[table[q].row],
                    };
                    ws.record(op);
                }
            }
            st.butterfly = lap(xbar);
            ws.restore_rows(xbar, region, &rows)?;
            st.align += lap(xbar);
        } else {
            let lay = BitLayout::stage(&g, s);
            ws.relocate(xbar, region, &lay)?;
            st.swap = lap(xbar);
            let table = lay.table(&g);
            let mut pos = vec![0; n];
            for (q, l) in table.iter().enumerate() {
                pos[g.index(*l)] = q;
            }
            let mut tw = vec![vec![0u64; g.rows]; g.units];
            for (u, words) in tw.iter_mut().enumerate() {
                for (row, w) in words.iter_mut().enumerate() {
                    let q = pos[g.index(super::Loc { row, unit: u, slot: 0 })];
                    *w = ws.plan.twiddle(s, q, direction);
                }
                ws.write_words(xbar, u, SlotRef::Twiddle, &all, words)?;
            }
            st.twiddle = lap(xbar);
            let k = Kernel::Butterfly {
                u: SlotRef::Data { region, slot: 0 },
                v: SlotRef::Data { region, slot: 1 },
                w: SlotRef::Twiddle,
            };
            ws.run_kernel(xbar, k, &all)?;
            if ws.logging() {
                for (u, words) in tw.iter().enumerate() {
                    for (row, &w) in words.iter().enumerate() {
                        let loc = |slot| super::Loc { row, unit: u, slot };
                        let op = LogOp::Butterfly {
                            u: ws.register(region, loc(0)),
                            v: ws.register(region, loc(1)),
                            w,
                        };
                        ws.record(op);
                    }
                }
            }
            st.butterfly = lap(xbar);
        }
        ph.align += st.align;
        ph.twiddle += st.twiddle;
        ph.butterfly += st.butterfly;
        ph.swap += st.swap;
        per_stage.push(st);
    }

    if natural_output {
        ws.relocate(xbar, region, &BitLayout::natural(&g))?;
    }
    ph.final_relocate = lap(xbar);

    if direction == Direction::Inverse {
        for _ in 0..stages {
            for slot in 0..g.slots {
                let d = SlotRef::Data { region, slot };
                ws.run_kernel(xbar, Kernel::Unary { op: UnaryOp::Halve, src: d, dst: d }, &all)?;
            }
        }
    }
    ph.scale = lap(xbar);

    Ok(FftRun {
        trace: xbar.trace() - start,
        phases: ph,
        stages: per_stage,
    })
}
