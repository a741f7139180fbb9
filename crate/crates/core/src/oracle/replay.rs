//! Replays a recorded arithmetic sequence under the format emulator.

use serde::Serialize;

use super::FormatEmulator;
use crate::arith::{BinaryOp, NumberFormat, UnaryOp};

/// One element-level arithmetic step over a register file of complex words.
/// Registers are storage cells; data movement is not recorded because it is
/// bit-preserving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LogOp {
    /// `(u, v) <- (u + w v, u - w v)` with the twiddle word `w`.
    Butterfly { u: usize, v: usize, w: u64 },
    /// `(u, v) <- (u + v, u - v)`.
    SumDiff { u: usize, v: usize },
    Binary { op: BinaryOp, dst: usize, a: usize, b: usize },
    Unary { op: UnaryOp, dst: usize, src: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    Faithful,
    /// Negative control: every butterfly result has its last bit flipped.
    Perturbed,
}

/// Applies `ops` to a copy of `registers` and returns the final register file.
pub fn replay_sequence(format: NumberFormat, ops: &[LogOp], registers: &[u64]) -> Vec<u64> {
    replay_with(format, ops, registers, Rounding::Faithful)
}

pub fn replay_with(format: NumberFormat, ops: &[LogOp], registers: &[u64], rounding: Rounding) -> Vec<u64> {
    let emu = FormatEmulator::new(format);
    let mut r = registers.to_vec();
    for op in ops {
        match *op {
            LogOp::Butterfly { u, v, w } => {
                let (a, b) = emu.butterfly(r[u], r[v], w);
                let (a, b) = match rounding {
                    Rounding::Faithful => (a, b),
                    Rounding::Perturbed => (a ^ 1, b ^ 1),
                };
                r[u] = a;
                r[v] = b;
            }
            LogOp::SumDiff { u, v } => {
                let (a, b) = (emu.cadd(r[u], r[v]), emu.csub(r[u], r[v]));
                r[u] = a;
                r[v] = b;
            }
            LogOp::Binary { op, dst, a, b } => {
                r[dst] = match op {
                    BinaryOp::Add => emu.cadd(r[a], r[b]),
                    BinaryOp::Sub => emu.csub(r[a], r[b]),
                    BinaryOp::Mul => emu.cmul(r[a], r[b]),
                };
            }
            LogOp::Unary { op, dst, src } => {
                let x = r[src];
                r[dst] = match op {
                    UnaryOp::Copy => x,
                    UnaryOp::Negate => emu.mul_by_i(emu.mul_by_i(x)),
                    UnaryOp::Halve => emu.chalve(x),
                    UnaryOp::Conjugate => emu.conj(x),
                    UnaryOp::MulByI => emu.mul_by_i(x),
                };
            }
        }
    }
    r
}
