//! Polynomial multiplication through the convolution theorem.
//!
//! Both operands are transformed in place, multiplied element by element and
//! transformed back. The input bit-reversal of the forward transforms and of
//! the inverse transform cancel out, so by default neither is executed: the
//! forward outputs stay in bit-reversed position order and the inverse
//! relabels them instead of moving them.
//!
//! For real coefficients the two forward transforms are fused into one complex
//! transform of `z = a + i b`, and the spectra are separated with
//! `A_k = (conj(Z_{n-k}) + Z_k) / 2` and `B_k = i (conj(Z_{n-k}) - Z_k) / 2`
//! (indices mod `n`), using only conjugation, a reversal by swaps, a sum and
//! difference, multiplication by `i` and halving.

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{BinaryOp, NumberFormat, UnaryOp};
use crate::crossbar::{CrossbarDims, Trace};
use crate::error::{Error, Result};
use crate::fft::{self, Direction, FftConfig, Kernel, SlotRef, Workspace};
use crate::oracle::ConvMode;

const A: usize = 0;
const B: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyOperands {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub padded_n: usize,
    pub mode: ConvMode,
}

impl PolyOperands {
    /// Acyclic operands are zero-padded to the smallest power of two holding
    /// the full product; cyclic operands must share a power-of-two length.
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>, mode: ConvMode) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Config("empty polynomial".into()));
        }
        let padded_n = match mode {
            ConvMode::Acyclic => (a.len() + b.len() - 1).next_power_of_two(),
            ConvMode::Cyclic => {
                if a.len() != b.len() || !a.len().is_power_of_two() {
                    return Err(Error::Config(
                        "cyclic operands need equal power-of-two lengths".into(),
                    ));
                }
                a.len()
            }
        };
        Ok(Self { a, b, padded_n, mode })
    }

    pub fn real(a: &[f64], b: &[f64], mode: ConvMode) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(c(a), c(b), mode)
    }

    /// Pads further to `n` (acyclic only).
    pub fn with_padded_n(mut self, n: usize) -> Result<Self> {
        let need = self.a.len() + self.b.len() - 1;
        if self.mode != ConvMode::Acyclic || !n.is_power_of_two() || n < need {
            return Err(Error::Config(format!("cannot pad to n = {n}")));
        }
        self.padded_n = n;
        Ok(self)
    }

    pub fn output_len(&self) -> usize {
        match self.mode {
            ConvMode::Acyclic => self.a.len() + self.b.len() - 1,
            ConvMode::Cyclic => self.padded_n,
        }
    }

    pub fn is_real(&self) -> bool {
        self.a.iter().chain(&self.b).all(|v| v.im == 0.0)
    }

    fn padded(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        out.resize(self.padded_n, Complex64::new(0.0, 0.0));
        out
    }
}

/// Crossbar shape and execution options for one multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolySetup {
    pub format: NumberFormat,
    pub config: FftConfig,
    pub cols: usize,
    pub partitions: usize,
    pub use_partitions: bool,
    pub skip_permutation: bool,
}

impl PolySetup {
    pub fn new(format: NumberFormat, config: FftConfig, cols: usize) -> Self {
        Self {
            format,
            config,
            cols,
            partitions: 1,
            use_partitions: false,
            skip_permutation: true,
        }
    }

    /// Crossbar and two-region workspace for transforms of length `n`.
    pub fn build(&self, n: usize) -> Result<(crate::crossbar::Crossbar, Workspace)> {
        let per_row = self.config.per_row();
        if !n.is_multiple_of(per_row) {
            return Err(Error::Config(format!("n = {n} is too short for {}", self.config.name())));
        }
        let dims = CrossbarDims::new(n / per_row, self.cols)?;
        let plan = fft::plan_fft(n, dims, self.format, self.config, Direction::Forward)?
            .with_skip_permutation(self.skip_permutation)
            .with_partitions(self.use_partitions);
        let xbar = fft::new_crossbar(&plan, self.cols, self.partitions)?;
        let ws = Workspace::new(plan, &xbar, 2, 0)?;
        Ok((xbar, ws))
    }
}

#[derive(Debug, Clone)]
pub struct PolyResult {
    pub coeffs: Vec<Complex64>,
    pub trace: Trace,
    /// Largest imaginary magnitude left in a real product (zero for complex runs).
    pub imag_residue: f64,
}

fn transform(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar, region: usize, d: Direction) -> Result<()> {
    // the permuted variant runs textbook transforms with natural order in and out
    let natural = !ws.plan.skip_input_permutation || d == Direction::Inverse;
    fft::run_transform(ws, xbar, region, d, natural)?;
    Ok(())
}

fn for_slots(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar, f: impl Fn(usize) -> Vec<Kernel>) -> Result<()> {
    let rows = ws.all_rows().clone();
    for slot in 0..ws.plan.geometry.slots {
        for k in f(slot) {
            ws.run_kernel(xbar, k, &rows)?;
        }
    }
    Ok(())
}

fn data(region: usize, slot: usize) -> SlotRef {
    SlotRef::Data { region, slot }
}

fn multiply_into_a(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar) -> Result<()> {
    if ws.layouts[A] != ws.layouts[B] {
        return Err(Error::Config("operand spectra are not aligned".into()));
    }
    for_slots(ws, xbar, |s| {
        vec![Kernel::Binary {
            op: BinaryOp::Mul,
            a: data(A, s),
            b: data(B, s),
            dst: data(A, s),
        }]
    })
}

fn finish(ws: &Workspace, xbar: &crate::crossbar::Crossbar, ops: &PolyOperands, start: Trace) -> (Vec<Complex64>, Trace) {
    let mut out = fft::read_sequence(ws, xbar, A);
    out.truncate(ops.output_len());
    (out, xbar.trace() - start)
}

/// Multiplies two complex polynomials on a prepared two-region workspace.
pub fn polymul_complex_on(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar, ops: &PolyOperands) -> Result<PolyResult> {
    check_size(ws, ops)?;
    fft::load_sequence(ws, xbar, A, &ops.padded(&ops.a))?;
    fft::load_sequence(ws, xbar, B, &ops.padded(&ops.b))?;
    let start = xbar.trace();
    transform(ws, xbar, A, Direction::Forward)?;
    transform(ws, xbar, B, Direction::Forward)?;
    multiply_into_a(ws, xbar)?;
    transform(ws, xbar, A, Direction::Inverse)?;
    let (coeffs, trace) = finish(ws, xbar, ops, start);
    Ok(PolyResult {
        coeffs,
        trace,
        imag_residue: 0.0,
    })
}

fn check_size(ws: &Workspace, ops: &PolyOperands) -> Result<()> {
    if ws.plan.n != ops.padded_n {
        return Err(Error::Length {
            expected: ws.plan.n,
            got: ops.padded_n,
        });
    }
    if ws.regions() < 2 {
        return Err(Error::Config("polynomial multiplication needs two data regions".into()));
    }
    Ok(())
}

/// Untimed host load of `z = x + i y` into `region`.
pub fn pack_real_pair(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar, region: usize, x: &[f64], y: &[f64]) -> Result<()> {
    let n = ws.plan.n;
    if x.len() > n || y.len() > n {
        return Err(Error::Length {
            expected: n,
            got: x.len().max(y.len()),
        });
    }
    let z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(x.get(k).copied().unwrap_or(0.0), y.get(k).copied().unwrap_or(0.0)))
        .collect();
    fft::load_sequence(ws, xbar, region, &z)
}

/// Separates the spectrum `Z` of a packed pair held in region `A`: afterwards
/// region `B` holds `X` and region `A` holds `Y`, in the same layout.
pub fn unpack_real_pair(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar) -> Result<()> {
    // B <- conj(Z)
    for_slots(ws, xbar, |s| {
        vec![Kernel::Unary {
            op: UnaryOp::Conjugate,
            src: data(A, s),
            dst: data(B, s),
        }]
    })?;
    ws.layouts[B] = ws.layouts[A].clone();
    // B_k <- conj(Z_{n-k}): swap positions k and n - k
    let g = ws.plan.geometry;
    let n = g.len();
    let table = ws.layouts[B].table(&g);
    let mut perm = vec![0; n];
    for q in 0..n {
        perm[g.index(table[q])] = g.index(table[(n - q) % n]);
    }
    ws.permute(xbar, B, &perm)?;
    // (B, A) <- (conj(Z_{n-k}) + Z_k, conj(Z_{n-k}) - Z_k); A <- i A; halve both
    for_slots(ws, xbar, |s| {
        let (b, a) = (data(B, s), data(A, s));
        vec![
            Kernel::SumDiff { u: b, v: a },
            Kernel::Unary { op: UnaryOp::MulByI, src: a, dst: a },
            Kernel::Unary { op: UnaryOp::Halve, src: b, dst: b },
            Kernel::Unary { op: UnaryOp::Halve, src: a, dst: a },
        ]
    })
}

/// Multiplies two real polynomials with a single forward transform.
pub fn polymul_real_on(ws: &mut Workspace, xbar: &mut crate::crossbar::Crossbar, ops: &PolyOperands) -> Result<PolyResult> {
    check_size(ws, ops)?;
    if !ops.is_real() {
        return Err(Error::Config("real multiplication needs real coefficients".into()));
    }
    let re = |v: &[Complex64]| v.iter().map(|c| c.re).collect::<Vec<f64>>();
    pack_real_pair(ws, xbar, A, &re(&ops.a), &re(&ops.b))?;
    let start = xbar.trace();
    // the reversal and the element-wise steps need the spectrum in a known layout,
    // which every transform provides; keep bit-reversed order when skipping
    transform(ws, xbar, A, Direction::Forward)?;
    unpack_real_pair(ws, xbar)?;
    multiply_into_a(ws, xbar)?;
    transform(ws, xbar, A, Direction::Inverse)?;
    let (coeffs, trace) = finish(ws, xbar, ops, start);
    let imag_residue = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    Ok(PolyResult {
        coeffs,
        trace,
        imag_residue,
    })
}

pub fn polymul_complex(ops: &PolyOperands, setup: &PolySetup) -> Result<PolyResult> {
    let (mut xbar, mut ws) = setup.build(ops.padded_n)?;
    polymul_complex_on(&mut ws, &mut xbar, ops)
}

pub fn polymul_real(ops: &PolyOperands, setup: &PolySetup) -> Result<PolyResult> {
    let (mut xbar, mut ws) = setup.build(ops.padded_n)?;
    polymul_real_on(&mut ws, &mut xbar, ops)
}

#[cfg(test)]
mod tests;
