//! Computational laboratory for limsup sets of approximation theory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting;
pub mod error;
pub mod exact;
pub mod farey;
pub mod functions;
pub mod geodesics;
pub mod horoballs;
pub mod intervals;
pub mod seed;
pub mod systems;
pub mod ubiquity;

pub use error::{Error, Result};
