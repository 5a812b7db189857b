//! Event-driven hard-sphere dynamics with collision-strength accounting.
//!
//! * [`kernel`]: vector helpers, wedge norms, spacetime lifts.
//! * [`dynamics`]: exact event-driven simulation and JSONL event logs.
//! * [`ledger`]: kink ledger, bulk invariants, hodographs, bound ratios.
//! * [`tensor`]: mass-momentum tensor on the spacetime trajectory graph.
//! * [`detmass`]: determinantal masses and planar Minkowski polygons.
//! * [`harness`]: scenario generators, transformations, experiments, sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod detmass;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod exec;
pub mod harness;
pub mod ledger;
pub mod tensor;

pub use error::{Error, Result};
