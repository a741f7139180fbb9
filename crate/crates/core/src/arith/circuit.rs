//! Builder for row-parallel gate schedules.
//!
//! Arithmetic is described on symbolic signals and lowered to a flat list of
//! NOR/NOT column gates. Constants are folded while building, temporaries are
//! mapped onto physical scratch columns by a linear-scan allocator, and the
//! resulting [`Program`] is position independent: every column is relative to
//! a unit base, so the same schedule can run on several column units either
//! one after another or in lockstep across partitions.

use std::collections::{BTreeSet, HashMap};

use crate::crossbar::{ColumnOp, Crossbar, FlagKind, Gate, Mask};
use crate::error::{Error, Result};

/// A symbolic bit: a fixed (unit-relative) column, a temporary, or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sig {
    Col(usize),
    Tmp(u32),
    Zero,
    One,
}

impl Sig {
    pub fn konst(b: bool) -> Sig {
        if b {
            Sig::One
        } else {
            Sig::Zero
        }
    }

    pub fn as_const(self) -> Option<bool> {
        match self {
            Sig::Zero => Some(false),
            Sig::One => Some(true),
            _ => None,
        }
    }
}

/// Little-endian bit vector.
pub type Bits = Vec<Sig>;

pub fn cols(start: usize, width: usize) -> Bits {
    (start..start + width).map(Sig::Col).collect()
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Nor(Sig, Sig),
    Not(Sig),
}

#[derive(Debug, Clone, Copy)]
struct Step {
    node: Node,
    out: Sig,
}

#[derive(Debug, Default)]
pub struct Circuit {
    steps: Vec<Step>,
    next_tmp: u32,
    complement: HashMap<Sig, Sig>,
    anchor: Option<usize>,
    consts: [Option<Sig>; 2],
    probes: Vec<(Sig, FlagKind)>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> Sig {
        let t = Sig::Tmp(self.next_tmp);
        self.next_tmp += 1;
        t
    }

    fn note_col(&mut self, s: Sig) {
        if let (Sig::Col(c), None) = (s, self.anchor) {
            self.anchor = Some(c);
        }
    }

    fn emit(&mut self, node: Node) -> Sig {
        let out = self.fresh();
        self.steps.push(Step { node, out });
        out
    }

    pub fn gate_count(&self) -> usize {
        self.steps.len()
    }

    pub fn not(&mut self, a: Sig) -> Sig {
        if let Some(c) = a.as_const() {
            return Sig::konst(!c);
        }
        if let Some(&n) = self.complement.get(&a) {
            return n;
        }
        self.note_col(a);
        let n = self.emit(Node::Not(a));
        self.complement.insert(a, n);
        self.complement.insert(n, a);
        n
    }

    pub fn nor(&mut self, a: Sig, b: Sig) -> Sig {
        match (a.as_const(), b.as_const()) {
            (Some(true), _) | (_, Some(true)) => return Sig::Zero,
            (Some(false), Some(false)) => return Sig::One,
            (Some(false), None) => return self.not(b),
            (None, Some(false)) => return self.not(a),
            _ => {}
        }
        if a == b {
            return self.not(a);
        }
        if self.complement.get(&a) == Some(&b) {
            return Sig::Zero;
        }
        self.note_col(a);
        self.note_col(b);
        self.emit(Node::Nor(a, b))
    }

    pub fn or(&mut self, a: Sig, b: Sig) -> Sig {
        let n = self.nor(a, b);
        self.not(n)
    }

    pub fn and(&mut self, a: Sig, b: Sig) -> Sig {
        let na = self.not(a);
        let nb = self.not(b);
        self.nor(na, nb)
    }

    /// `a & !b`
    pub fn and_not(&mut self, a: Sig, b: Sig) -> Sig {
        let na = self.not(a);
        self.nor(na, b)
    }

    pub fn xnor(&mut self, a: Sig, b: Sig) -> Sig {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => return Sig::konst(x == y),
            (Some(true), None) => return b,
            (None, Some(true)) => return a,
            (Some(false), None) => return self.not(b),
            (None, Some(false)) => return self.not(a),
            _ => {}
        }
        let t1 = self.nor(a, b);
        let t2 = self.nor(a, t1);
        let t3 = self.nor(b, t1);
        self.nor(t2, t3)
    }

    pub fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        let x = self.xnor(a, b);
        self.not(x)
    }

    /// `sel ? b : a`
    pub fn mux(&mut self, sel: Sig, a: Sig, b: Sig) -> Sig {
        if let Some(s) = sel.as_const() {
            return if s { b } else { a };
        }
        if a == b {
            return a;
        }
        match (a.as_const(), b.as_const()) {
            (Some(false), _) => return self.and(sel, b),
            (_, Some(false)) => return self.and_not(a, sel),
            (Some(true), _) => {
                let ns = self.not(sel);
                return self.or(ns, b);
            }
            (_, Some(true)) => return self.or(sel, a),
            _ => {}
        }
        let ns = self.not(sel);
        let x = self.nor(ns, b); // sel & !b
        let y = self.nor(sel, a); // !sel & !a
        self.nor(x, y)
    }

    pub fn mux_bits(&mut self, sel: Sig, a: &[Sig], b: &[Sig]) -> Bits {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| self.mux(sel, x, y)).collect()
    }

    pub fn or_all(&mut self, bits: &[Sig]) -> Sig {
        match bits.len() {
            0 => Sig::Zero,
            1 => bits[0],
            _ => {
                let (l, r) = bits.split_at(bits.len() / 2);
                let a = self.or_all(l);
                let b = self.or_all(r);
                self.or(a, b)
            }
        }
    }

    pub fn nor_all(&mut self, bits: &[Sig]) -> Sig {
        match bits.len() {
            0 => Sig::One,
            1 => self.not(bits[0]),
            _ => {
                let (l, r) = bits.split_at(bits.len() / 2);
                let a = self.or_all(l);
                let b = self.or_all(r);
                self.nor(a, b)
            }
        }
    }

    pub fn full_adder(&mut self, a: Sig, b: Sig, c: Sig) -> (Sig, Sig) {
        // Move constants to the back to fold them.
        let mut v = [a, b, c];
        v.sort_by_key(|s| s.as_const().is_some());
        let [a, b, c] = v;
        match (b.as_const(), c.as_const()) {
            (Some(x), Some(y)) => match (x, y) {
                (false, false) => (a, Sig::Zero),
                (true, true) => (a, Sig::One),
                _ => {
                    let s = self.not(a);
                    (s, a)
                }
            },
            (None, Some(false)) => self.half_adder(a, b),
            (None, Some(true)) => {
                let t1 = self.nor(a, b);
                let t2 = self.nor(a, t1);
                let t3 = self.nor(b, t1);
                let s = self.nor(t2, t3);
                let co = self.not(t1);
                (s, co)
            }
            _ => {
                let t1 = self.nor(a, b);
                let t2 = self.nor(a, t1);
                let t3 = self.nor(b, t1);
                let x1 = self.nor(t2, t3);
                let t4 = self.nor(x1, c);
                let t5 = self.nor(x1, t4);
                let t6 = self.nor(c, t4);
                let s = self.nor(t5, t6);
                let co = self.nor(t1, t4);
                (s, co)
            }
        }
    }

    pub fn half_adder(&mut self, a: Sig, b: Sig) -> (Sig, Sig) {
        if a.as_const().is_some() || b.as_const().is_some() {
            return self.full_adder(a, b, Sig::Zero);
        }
        let t1 = self.nor(a, b);
        let t2 = self.nor(a, t1);
        let t3 = self.nor(b, t1);
        let x1 = self.nor(t2, t3);
        let s = self.not(x1);
        let co = self.nor(t1, s);
        (s, co)
    }

    /// Ripple-carry `a + b + cin`; returns the sum (width of `a`) and carry out.
    pub fn add(&mut self, a: &[Sig], b: &[Sig], cin: Sig) -> (Bits, Sig) {
        assert_eq!(a.len(), b.len());
        let mut c = cin;
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (s, co) = self.full_adder(x, y, c);
            out.push(s);
            c = co;
        }
        (out, c)
    }

    /// `a - b` in two's complement; the carry out is set when `a >= b` (unsigned).
    pub fn sub(&mut self, a: &[Sig], b: &[Sig]) -> (Bits, Sig) {
        let nb: Bits = b.iter().map(|&x| self.not(x)).collect();
        self.add(a, &nb, Sig::One)
    }

    /// Carry out of `a + !b + 1`, i.e. `a >= b` for unsigned operands.
    pub fn ge(&mut self, a: &[Sig], b: &[Sig]) -> Sig {
        assert_eq!(a.len(), b.len());
        let mut c = Sig::One;
        for (&x, &y) in a.iter().zip(b) {
            let ny = self.not(y);
            c = self.carry(x, ny, c);
        }
        c
    }

    fn carry(&mut self, a: Sig, b: Sig, c: Sig) -> Sig {
        let consts = [a, b, c].iter().filter(|s| s.as_const().is_some()).count();
        if consts > 0 {
            return self.full_adder(a, b, c).1;
        }
        let t1 = self.nor(a, b);
        let t2 = self.nor(a, t1);
        let t3 = self.nor(b, t1);
        let x1 = self.nor(t2, t3);
        let t4 = self.nor(x1, c);
        self.nor(t1, t4)
    }

    /// Write `value` into the fixed column `dst`; later reads of `dst` see the
    /// new value. Costs two gates (one when `!value` is already available).
    pub fn store(&mut self, dst: usize, value: Sig) {
        self.note_col(Sig::Col(dst));
        let src = match value {
            Sig::Zero | Sig::One => self.materialize(value),
            s => s,
        };
        let n = self.not(src);
        self.store_not(dst, n);
    }

    /// Write `!n` into the fixed column `dst` with a single gate.
    pub fn store_not(&mut self, dst: usize, n: Sig) {
        self.note_col(Sig::Col(dst));
        let mut n = match n {
            Sig::Zero | Sig::One => self.materialize(n),
            s => s,
        };
        if n == Sig::Col(dst) {
            // a gate cannot overwrite its own input
            let t = self.not(n);
            n = self.emit(Node::Not(t));
        }
        self.complement.retain(|k, v| *k != Sig::Col(dst) && *v != Sig::Col(dst));
        self.steps.push(Step {
            node: Node::Not(n),
            out: Sig::Col(dst),
        });
    }

    /// Store a word. All sources are read before any destination is written,
    /// so `value` may reference `dst` columns (in-place updates). Bits whose
    /// value is already in place are skipped.
    pub fn store_bits(&mut self, dst: &[Sig], value: &[Sig]) {
        assert_eq!(dst.len(), value.len());
        let mut pending = Vec::with_capacity(dst.len());
        for (&d, &v) in dst.iter().zip(value) {
            let Sig::Col(col) = d else {
                panic!("store target must be a fixed column")
            };
            if v == d {
                continue;
            }
            let v = match v {
                Sig::Zero | Sig::One => {
                    self.note_col(d);
                    self.materialize(v)
                }
                s => s,
            };
            pending.push((col, self.not(v)));
        }
        for (col, n) in pending {
            self.store_not(col, n);
        }
    }

    fn materialize(&mut self, konst: Sig) -> Sig {
        let idx = (konst == Sig::One) as usize;
        if let Some(s) = self.consts[idx] {
            return s;
        }
        let zero = match self.consts[0] {
            Some(z) => z,
            None => {
                let anchor = Sig::Col(self.anchor.expect("circuit has no column to derive constants from"));
                let n = self.emit(Node::Not(anchor));
                let z = self.emit(Node::Nor(anchor, n));
                self.consts[0] = Some(z);
                z
            }
        };
        if idx == 0 {
            return zero;
        }
        let one = self.emit(Node::Not(zero));
        self.consts[1] = Some(one);
        one
    }

    /// Raise `kind` on the crossbar trace after execution if `sig` is set in any active row.
    pub fn probe(&mut self, sig: Sig, kind: FlagKind) {
        match sig {
            Sig::Zero => {}
            Sig::One => {
                let s = self.materialize(Sig::One);
                self.probes.push((s, kind));
            }
            s => self.probes.push((s, kind)),
        }
    }

    /// Drop gates whose temporary result is never read.
    fn eliminate_dead(&mut self) {
        let mut live: std::collections::HashSet<Sig> = self.probes.iter().map(|p| p.0).collect();
        let mut keep = vec![false; self.steps.len()];
        for (i, st) in self.steps.iter().enumerate().rev() {
            if matches!(st.out, Sig::Col(_)) || live.contains(&st.out) {
                keep[i] = true;
                match st.node {
                    Node::Nor(a, b) => {
                        live.insert(a);
                        live.insert(b);
                    }
                    Node::Not(a) => {
                        live.insert(a);
                    }
                }
            }
        }
        let mut k = keep.iter();
        self.steps.retain(|_| *k.next().unwrap());
    }

    /// Lower to physical columns. Temporaries are allocated upward from `scratch_base`.
    pub fn compile(mut self, scratch_base: usize) -> Program {
        self.eliminate_dead();
        let n = self.steps.len();
        let mut last_use: HashMap<u32, usize> = HashMap::new();
        for (i, st) in self.steps.iter().enumerate() {
            let ins = match st.node {
                Node::Nor(a, b) => [Some(a), Some(b)],
                Node::Not(a) => [Some(a), None],
            };
            for s in ins.into_iter().flatten() {
                if let Sig::Tmp(t) = s {
                    last_use.insert(t, i);
                }
            }
        }
        for (s, _) in &self.probes {
            if let Sig::Tmp(t) = s {
                last_use.insert(*t, n);
            }
        }
        let mut free: BTreeSet<usize> = BTreeSet::new();
        let mut high = 0usize;
        let mut phys: HashMap<u32, usize> = HashMap::new();
        let mut ops = Vec::with_capacity(n);
        let resolve = |s: Sig, phys: &HashMap<u32, usize>| -> usize {
            match s {
                Sig::Col(c) => c,
                Sig::Tmp(t) => scratch_base + phys[&t],
                _ => unreachable!("constants are folded before lowering"),
            }
        };
        for (i, st) in self.steps.iter().enumerate() {
            let gate = match st.node {
                Node::Nor(a, b) => Gate::Nor(resolve(a, &phys), resolve(b, &phys)),
                Node::Not(a) => Gate::Not(resolve(a, &phys)),
            };
            let out = match st.out {
                Sig::Tmp(t) => {
                    let slot = match free.pop_first() {
                        Some(s) => s,
                        None => {
                            high += 1;
                            high - 1
                        }
                    };
                    phys.insert(t, slot);
                    scratch_base + slot
                }
                s => resolve(s, &phys),
            };
            ops.push(ColumnOp { gate, out });
            let ins = match st.node {
                Node::Nor(a, b) => [Some(a), Some(b)],
                Node::Not(a) => [Some(a), None],
            };
            for s in ins.into_iter().flatten() {
                if let Sig::Tmp(t) = s {
                    if last_use.get(&t) == Some(&i) {
                        if let Some(p) = phys.get(&t) {
                            free.insert(*p);
                        }
                    }
                }
            }
            if let Sig::Tmp(t) = st.out {
                if !last_use.contains_key(&t) {
                    free.insert(phys[&t]);
                }
            }
        }
        let probes = self
            .probes
            .iter()
            .map(|(s, k)| (resolve(*s, &phys), *k))
            .collect();
        Program {
            ops,
            scratch: high,
            scratch_base,
            probes,
        }
    }
}

/// A compiled, position-independent gate schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    ops: Vec<ColumnOp>,
    scratch: usize,
    scratch_base: usize,
    probes: Vec<(usize, FlagKind)>,
}

impl Program {
    /// Number of gate steps (cycles when run on one unit).
    pub fn cycles(&self) -> usize {
        self.ops.len()
    }

    /// Scratch columns needed above the scratch base.
    pub fn scratch(&self) -> usize {
        self.scratch
    }

    /// Highest relative column touched, plus one.
    pub fn footprint(&self) -> usize {
        self.scratch_base + self.scratch
    }

    pub fn ops(&self) -> &[ColumnOp] {
        &self.ops
    }

    /// Run on one unit whose relative column 0 is at `base`.
    pub fn run(&self, xbar: &mut Crossbar, base: usize, rows: &Mask) -> Result<()> {
        for op in &self.ops {
            xbar.column_op(op.offset(base), rows)?;
        }
        self.probe(xbar, &[base], rows);
        Ok(())
    }

    /// Run on several units in lockstep, one gate per partition per cycle.
    pub fn run_parallel(&self, xbar: &mut Crossbar, bases: &[usize], rows: &Mask) -> Result<()> {
        if bases.len() > xbar.partitions().count() {
            return Err(Error::Config(format!(
                "{} units cannot run in parallel on {} partitions",
                bases.len(),
                xbar.partitions().count()
            )));
        }
        let mut step: Vec<(ColumnOp, &Mask)> = Vec::with_capacity(bases.len());
        for op in &self.ops {
            step.clear();
            step.extend(bases.iter().map(|&b| (op.offset(b), rows)));
            xbar.parallel_partition_step(&step)?;
        }
        self.probe(xbar, bases, rows);
        Ok(())
    }

    fn probe(&self, xbar: &mut Crossbar, bases: &[usize], rows: &Mask) {
        for &b in bases {
            for &(c, k) in &self.probes {
                xbar.probe_flag(b + c, rows, k);
            }
        }
    }
}
