//! Continuous mean distance of weighted graphs.

pub mod aggregate;
pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod paths;
pub mod roof;
pub mod spt;
pub mod subdivision;
pub mod sum;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerance;
