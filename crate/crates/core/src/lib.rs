//! Fleet-mix sizing under uncertainty.
//!
//! The pipeline samples yearly mission scenarios ([`safe`]), enumerates the
//! minimal platform combinations per task ([`ptma`]), evolves Pareto-optimal
//! assignments per scenario ([`nsga2`]) and then scores every resulting fleet
//! against the whole scenario ensemble ([`analysis`]).

pub mod analysis;
pub mod domain;
pub mod error;
pub mod exec;
pub mod nsga2;
pub mod pipeline;
pub mod ptma;
pub mod safe;
pub mod seed;
pub mod textfmt;

pub use error::{Error, Result};
pub use exec::Exec;
