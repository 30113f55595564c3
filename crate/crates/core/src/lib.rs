//! Structural complexity of measurement sequences drawn from 1-D quantum
//! lattice ground states: DMRG, word statistics, causal states and the
//! quantum memory of their unifilar models.

pub mod compmech;
pub mod dmrg;
pub mod error;
pub mod exec;
pub mod models;
pub mod mps;
pub mod oracle;
pub mod pipeline;
pub mod qmodel;
pub mod sweep;
pub mod tensor;
pub mod validate;

pub(crate) mod contract;

pub use error::{Error, Result};
pub use exec::Exec;
