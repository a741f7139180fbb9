use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Energy of one device-level gate evaluation, in femtojoules.
pub const GATE_ENERGY_FJ: f64 = 6.4;

/// Default crossbar clock, in Hz (333.3 MHz).
pub const CLOCK_HZ: f64 = 333_333_333.0;

/// Data-dependent conditions raised by arithmetic schedules.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Some row produced a result below the normal range and flushed it to zero.
    pub underflow: bool,
    /// Some row produced a result above the finite range.
    pub overflow: bool,
    /// Some row consumed an infinity or NaN encoding.
    pub invalid: bool,
}

impl Flags {
    pub fn merge(self, other: Flags) -> Flags {
        Flags {
            underflow: self.underflow | other.underflow,
            overflow: self.overflow | other.overflow,
            invalid: self.invalid | other.invalid,
        }
    }

    pub fn any(&self) -> bool {
        self.underflow | self.overflow | self.invalid
    }
}

/// Execution counters attached to a crossbar.
///
/// Energy is derived from `gate_ops` on demand so that it is always the exact
/// product `gate_ops * 6.4` rather than an accumulated float.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub cycles: u64,
    pub gate_ops: u64,
    pub column_ops: u64,
    pub row_ops: u64,
    pub write_ops: u64,
    /// Cycles in which more than one partition executed a gate.
    pub parallel_steps: u64,
    pub flags: Flags,
}

impl Trace {
    pub fn energy_fj(&self) -> f64 {
        self.gate_ops as f64 * GATE_ENERGY_FJ
    }

    pub fn latency_s(&self, clock_hz: f64) -> f64 {
        self.cycles as f64 / clock_hz
    }

    /// Counter difference `self - earlier`; flags are taken from `self`.
    pub fn since(&self, earlier: &Trace) -> Trace {
        *self - *earlier
    }
}

impl Add for Trace {
    type Output = Trace;

    fn add(self, o: Trace) -> Trace {
        Trace {
            cycles: self.cycles + o.cycles,
            gate_ops: self.gate_ops + o.gate_ops,
            column_ops: self.column_ops + o.column_ops,
            row_ops: self.row_ops + o.row_ops,
            write_ops: self.write_ops + o.write_ops,
            parallel_steps: self.parallel_steps + o.parallel_steps,
            flags: self.flags.merge(o.flags),
        }
    }
}

impl Sub for Trace {
    type Output = Trace;

    fn sub(self, o: Trace) -> Trace {
        Trace {
            cycles: self.cycles - o.cycles,
            gate_ops: self.gate_ops - o.gate_ops,
            column_ops: self.column_ops - o.column_ops,
            row_ops: self.row_ops - o.row_ops,
            write_ops: self.write_ops - o.write_ops,
            parallel_steps: self.parallel_steps - o.parallel_steps,
            flags: self.flags,
        }
    }
}
