//! Deterministic polynomial identity testing over prime fields.

pub mod algebra;
pub mod concentrate;
pub mod depth3;
pub mod error;
pub mod io;
pub mod isolate;
pub mod kron;
pub mod points;
pub mod roabp;
pub mod verify;

pub use error::{Limits, PitError, Result};
