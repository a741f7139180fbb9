//! Host-side references: exact transforms, schoolbook products, and a
//! bit-exact emulator of the in-memory arithmetic.

pub mod emulator;
pub mod reference;

pub use emulator::FormatEmulator;
pub use reference::*;
pub mod replay;

pub use replay::{replay_sequence, replay_with, LogOp, Rounding};
