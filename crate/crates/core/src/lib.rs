//! Digital self-interference cancellation for full-duplex baseband links.
//!
//! Two cancellers are provided and compared by a packet-level Monte Carlo
//! harness:
//!
//! * [`hammerstein`]: the conventional memory-polynomial canceller, which
//!   regenerates the self-interference symbols from the transmitted symbols.
//! * [`mf`]: a learned receive filter fitted by least squares on pilot
//!   signal/symbol pairs, so that the filter output reproduces the known
//!   transmitted symbols and cancellation becomes a plain subtraction.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! parallel packet executor live in the `fdsic` crate.

#![no_std]

extern crate alloc;

pub mod complexity;
pub mod error;
pub mod frontend;
pub mod hammerstein;
pub mod lsq;
pub mod mf;
pub mod signal;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
