//! Element-parallel arithmetic built from NOR/NOT column gates.
//!
//! Each crossbar row holds one independent set of operands; a schedule is a
//! sequence of column gates, so it processes every active row at once and its
//! cycle count does not depend on how many rows participate.

pub mod circuit;
pub mod fixed;
pub mod float;
pub mod format;
pub mod ops;


pub use circuit::{cols, Bits, Circuit, Program, Sig};
pub use format::{FloatSpec, NumberFormat};
pub use ops::{
    butterfly, complex_op, real_op, schedule_table, unary_op, BinaryOp, ScheduleInfo, UnaryOp,
};
