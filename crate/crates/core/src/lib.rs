//! Numerical Besov-space machinery on periodic grids.
//!
//! The crate computes two independent measurements of Besov smoothness for
//! functions sampled on uniform periodic grids over `[-L, L)^n`:
//!
//! * a dyadic frequency decomposition with smooth annular filters, summed
//!   into the classical norm (`littlewood_paley`), and
//! * an integral of mollifier-convolution deviations `|f - f * rho_eps|`
//!   against the weight `eps^(-sq-1)` (`rate`).
//!
//! Whether the two agree is governed by the moment structure of the
//! mollifier `rho`: the order of its first non-vanishing moment tensor caps
//! the smoothness range on which the rate functional is equivalent to the
//! norm. The `kernels` module measures that structure, and `verify` packages
//! cross-checking experiments of the whole chain.
//!
//! The crate is `no_std` (alloc required); parsing, file formats and the
//! command-line front end live in the companion `besov-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod fft;
pub mod grid;
pub mod kernels;
pub mod littlewood_paley;
pub mod rate;
pub mod verify;

mod error;

pub use error::Error;

/// Result alias for fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;
