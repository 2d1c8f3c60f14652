// SPDX-License-Identifier: Apache-2.0

//! Computational laboratory for toric periods of quaternionic modular forms.
//!
//! The pipeline runs from class groups of imaginary quadratic fields
//! ([`bqf`]) through the Shimura set of a definite quaternion algebra of
//! prime discriminant ([`quat`]), the special-points map ([`special`]) and
//! finally the toric periods and their reductions modulo a prime above `p`
//! ([`periods`]). [`ledger`] collects the arithmetic bookkeeping around the
//! elliptic curve and [`lvalue`] a numerical central-value oracle.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod bqf;
pub mod cache;
pub mod characters;
pub mod curve;
pub mod cyclo;
pub mod error;
pub mod exec;
pub mod ffield;
pub mod ledger;
pub mod lvalue;
pub mod periods;
pub mod quat;
pub mod serde_util;
pub mod special;
pub mod stability;

pub use error::{Error, Result};
pub use exec::Execution;
