//! Coined discrete-time quantum walks and classical random walks on a ring
//! with randomly placed perfect absorbing traps.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! kernels:
//!
//! * [`walk`]: chiral amplitude fields, coin/shift/absorb steps and
//!   single-walker survival curves.
//! * [`crw`]: exact enumeration of the classical walk, including the
//!   aggregate single-vector propagation.
//! * [`traps`] and [`ensemble`]: quenched trap configurations, per-configuration
//!   survival and the configurational average.
//! * [`measurement`]: density-operator walk on a line window with a
//!   probabilistic position-measurement channel.
//! * [`analysis`]: stretched-exponential fits, crossover detection and
//!   closed-form exponent predictions.
//!
//! Site labels are 1-based throughout the public API (`1..=K`, with `K + 1`
//! identified with `1` and `0` with `K`).
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod analysis;
pub mod coin;
pub mod crw;
pub mod ensemble;
mod error;
pub mod measurement;
mod rng;
pub mod traps;
pub mod walk;

pub use num_complex::Complex64;

pub use crate::coin::CoinSpec;
pub use crate::error::{Error, Result};
pub use crate::rng::ConfigSeed;
pub use crate::traps::TrapConfiguration;
pub use crate::walk::{ChiralAmplitudeField, Chirality, InitialCondition};
