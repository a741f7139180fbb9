//! Element-wise operations on real and complex words, compiled to programs.
//!
//! Every operation reads its operands from unit-relative column offsets and
//! writes its result only after all inputs are consumed, so destinations may
//! alias sources. A complex word stores the real part in its low `N` columns
//! and the imaginary part in the next `N`.

use serde::Serialize;

use super::circuit::{cols, Bits, Circuit, Program, Sig};
use super::format::NumberFormat;
use super::{fixed, float};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UnaryOp {
    Copy,
    Negate,
    Halve,
    Conjugate,
    MulByI,
}

pub fn real_add(c: &mut Circuit, fmt: NumberFormat, a: &[Sig], b: &[Sig]) -> Bits {
    match fmt.float_spec() {
        Some(s) => float::add(c, s, a, b, false),
        None => fixed::add(c, a, b),
    }
}

pub fn real_sub(c: &mut Circuit, fmt: NumberFormat, a: &[Sig], b: &[Sig]) -> Bits {
    match fmt.float_spec() {
        Some(s) => float::add(c, s, a, b, true),
        None => fixed::sub(c, a, b),
    }
}

pub fn real_mul(c: &mut Circuit, fmt: NumberFormat, a: &[Sig], b: &[Sig]) -> Bits {
    match fmt {
        NumberFormat::Float { exp_bits, man_bits } => {
            float::mul(c, super::FloatSpec::new(exp_bits, man_bits), a, b)
        }
        NumberFormat::Fixed { frac_bits, .. } => fixed::mul(c, a, b, frac_bits as usize),
    }
}

pub fn real_negate(c: &mut Circuit, fmt: NumberFormat, a: &[Sig]) -> Bits {
    if fmt.is_float() {
        float::negate(c, a)
    } else {
        fixed::negate(c, a)
    }
}

pub fn real_halve(c: &mut Circuit, fmt: NumberFormat, a: &[Sig]) -> Bits {
    match fmt.float_spec() {
        Some(s) => float::halve(c, s, a),
        None => fixed::halve(a),
    }
}

pub fn real_binary(c: &mut Circuit, fmt: NumberFormat, op: BinaryOp, a: &[Sig], b: &[Sig]) -> Bits {
    match op {
        BinaryOp::Add => real_add(c, fmt, a, b),
        BinaryOp::Sub => real_sub(c, fmt, a, b),
        BinaryOp::Mul => real_mul(c, fmt, a, b),
    }
}

fn split(a: &[Sig]) -> (&[Sig], &[Sig]) {
    a.split_at(a.len() / 2)
}

fn join(re: Bits, im: Bits) -> Bits {
    let mut v = re;
    v.extend(im);
    v
}

/// `(a + bi)(c + di) = (ac - bd) + (ad + bc)i`, each step rounded.
pub fn complex_mul(c: &mut Circuit, fmt: NumberFormat, x: &[Sig], y: &[Sig]) -> Bits {
    let (a, b) = split(x);
    let (cr, d) = split(y);
    let ac = real_mul(c, fmt, a, cr);
    let bd = real_mul(c, fmt, b, d);
    let re = real_sub(c, fmt, &ac, &bd);
    let ad = real_mul(c, fmt, a, d);
    let bc = real_mul(c, fmt, b, cr);
    let im = real_add(c, fmt, &ad, &bc);
    join(re, im)
}

pub fn complex_binary(c: &mut Circuit, fmt: NumberFormat, op: BinaryOp, x: &[Sig], y: &[Sig]) -> Bits {
    if op == BinaryOp::Mul {
        return complex_mul(c, fmt, x, y);
    }
    let (a, b) = split(x);
    let (cr, d) = split(y);
    let re = real_binary(c, fmt, op, a, cr);
    let im = real_binary(c, fmt, op, b, d);
    join(re, im)
}

pub fn complex_unary(c: &mut Circuit, fmt: NumberFormat, op: UnaryOp, x: &[Sig]) -> Bits {
    let (a, b) = split(x);
    match op {
        UnaryOp::Copy => x.to_vec(),
        UnaryOp::Negate => {
            let re = real_negate(c, fmt, a);
            let im = real_negate(c, fmt, b);
            join(re, im)
        }
        UnaryOp::Halve => {
            let re = real_halve(c, fmt, a);
            let im = real_halve(c, fmt, b);
            join(re, im)
        }
        UnaryOp::Conjugate => {
            let im = real_negate(c, fmt, b);
            join(a.to_vec(), im)
        }
        UnaryOp::MulByI => {
            let re = real_negate(c, fmt, b);
            join(re, a.to_vec())
        }
    }
}

/// Radix-2 butterfly `(u, v) <- (u + w v, u - w v)`.
pub fn butterfly_circuit(c: &mut Circuit, fmt: NumberFormat, u: usize, v: usize, w: usize) {
    let n = fmt.complex_bits();
    let (u, v, w) = (cols(u, n), cols(v, n), cols(w, n));
    let t = complex_mul(c, fmt, &w, &v);
    let d = complex_binary(c, fmt, BinaryOp::Sub, &u, &t);
    c.store_bits(&v, &d);
    let s = complex_binary(c, fmt, BinaryOp::Add, &u, &t);
    c.store_bits(&u, &s);
}

/// Unit-twiddle butterfly `(u, v) <- (u + v, u - v)`.
pub fn sum_diff_circuit(c: &mut Circuit, fmt: NumberFormat, u: usize, v: usize) {
    let n = fmt.complex_bits();
    let (u, v) = (cols(u, n), cols(v, n));
    let d = complex_binary(c, fmt, BinaryOp::Sub, &u, &v);
    let s = complex_binary(c, fmt, BinaryOp::Add, &u, &v);
    c.store_bits(&v, &d);
    c.store_bits(&u, &s);
}

pub fn butterfly(fmt: NumberFormat, u: usize, v: usize, w: usize, scratch: usize) -> Program {
    let mut c = Circuit::new();
    butterfly_circuit(&mut c, fmt, u, v, w);
    c.compile(scratch)
}

pub fn complex_op(fmt: NumberFormat, op: BinaryOp, a: usize, b: usize, dst: usize, scratch: usize) -> Program {
    let n = fmt.complex_bits();
    let mut c = Circuit::new();
    let r = complex_binary(&mut c, fmt, op, &cols(a, n), &cols(b, n));
    c.store_bits(&cols(dst, n), &r);
    c.compile(scratch)
}

pub fn real_op(fmt: NumberFormat, op: BinaryOp, a: usize, b: usize, dst: usize, scratch: usize) -> Program {
    let n = fmt.bits();
    let mut c = Circuit::new();
    let r = real_binary(&mut c, fmt, op, &cols(a, n), &cols(b, n));
    c.store_bits(&cols(dst, n), &r);
    c.compile(scratch)
}

pub fn unary_op(fmt: NumberFormat, op: UnaryOp, src: usize, dst: usize, scratch: usize) -> Program {
    let n = fmt.complex_bits();
    let mut c = Circuit::new();
    let r = complex_unary(&mut c, fmt, op, &cols(src, n));
    c.store_bits(&cols(dst, n), &r);
    c.compile(scratch)
}

/// Gate schedule summary of one operation.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleInfo {
    pub op: String,
    pub format: String,
    /// Cycles for one unit (gates executed in sequence).
    pub cycles: usize,
    /// Scratch columns the schedule occupies per unit.
    pub scratch_columns: usize,
    /// Columns of one operand.
    pub operand_columns: usize,
}

/// Schedules of every element-wise operation for `fmt`, with operands laid
/// out back to back and destinations distinct from sources.
pub fn schedule_table(fmt: NumberFormat) -> Vec<ScheduleInfo> {
    let n = fmt.bits();
    let cn = fmt.complex_bits();
    let info = |op: &str, width: usize, p: Program| ScheduleInfo {
        op: op.to_string(),
        format: fmt.to_string(),
        cycles: p.cycles(),
        scratch_columns: p.scratch(),
        operand_columns: width,
    };
    let mut rows = Vec::new();
    for (name, op) in [("add", BinaryOp::Add), ("sub", BinaryOp::Sub), ("mul", BinaryOp::Mul)] {
        rows.push(info(name, n, real_op(fmt, op, 0, n, 2 * n, 3 * n)));
    }
    for (name, op) in [
        ("complex_add", BinaryOp::Add),
        ("complex_sub", BinaryOp::Sub),
        ("complex_mul", BinaryOp::Mul),
    ] {
        rows.push(info(name, cn, complex_op(fmt, op, 0, cn, 2 * cn, 3 * cn)));
    }
    for (name, op) in [
        ("copy", UnaryOp::Copy),
        ("halve", UnaryOp::Halve),
        ("conjugate", UnaryOp::Conjugate),
        ("mul_by_i", UnaryOp::MulByI),
    ] {
        rows.push(info(name, cn, unary_op(fmt, op, 0, cn, 2 * cn)));
        rows.push(info(&format!("{name}_in_place"), cn, unary_op(fmt, op, 0, 0, cn)));
    }
    rows.push(info("butterfly", cn, butterfly(fmt, 0, cn, 2 * cn, 3 * cn)));
    rows
}
