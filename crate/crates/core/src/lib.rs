//! Ball proximal point method: broximal oracles, the BPM loop and
//! numerical checks of the assumptions it relies on.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod bpm;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod objective;
pub mod oracle;
pub mod suite;
pub mod verify;

pub use bpm::{BpmConfig, Termination, Trajectory};
pub use error::{BroxError, Result};
pub use geometry::{Ball, Geometry, GeometrySpec};
pub use objective::{catalog, ExtReal, Objective, Window};
pub use oracle::{BroxResult, OracleConfig, OracleKind};
pub use verify::{Report, Verdict, VerifyConfig};
