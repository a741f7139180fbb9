//! Cycle-accurate simulation of a digital memristive processing-in-memory
//! crossbar running in-memory FFT and FFT-based polynomial multiplication.
//!
//! The crate is layered bottom-up:
//!
//! - [`crossbar`]: the binary crossbar with single-cycle NOR/NOT gates on
//!   columns and rows, partitions, and exact cycle/gate/energy accounting.
//! - [`arith`]: element-parallel bit-serial arithmetic built only from those
//!   gates (fixed point, floating point, complex numbers).
//! - [`fft`]: the r, 2r and 2rβ crossbar mappings of the radix-2 FFT.
//! - [`polymul`]: polynomial multiplication through the convolution theorem.
//! - [`oracle`]: host-side references used for verification.
//! - [`harness`]: batched benchmark runs, reports and sweeps.

pub mod arith;
pub mod crossbar;
pub mod error;
pub mod fft;
pub mod harness;
pub mod oracle;
pub mod polymul;

pub use error::{Error, Result};
