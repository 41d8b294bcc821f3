//! Han-Kobayashi superposition coding with irregular LDPC codes over the
//! two-user Gaussian interference channel.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. The `parallel` feature spreads Monte-Carlo populations and
//! GF(2) elimination over a rayon pool; outputs are identical either way.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod decoder;
pub mod density;
pub mod ensemble;
pub mod error;
pub mod gic;
pub mod hk;
pub mod math;
pub mod optimizer;
pub mod region;
pub mod rng;

pub use error::{Error, Result};
