//! File formats and command runner behind the `duality-lab` binary.

pub mod error;
pub mod format;
pub mod job;

pub use error::{JobError, ParseError};
pub use job::{run, Command, Family, JobSpec, Outcome};
