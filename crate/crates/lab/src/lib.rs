//! Files, reports and the command-line front end for `contraction-core`.
//!
//! Instances are read from and written to JSON ([`instance`]), results are rendered as JSON
//! or plain text ([`report`]), certification and falsification run on a thread pool
//! ([`parallel`]) and the built-in corpus is checked against its expected outcomes
//! ([`corpus_run`]).

pub mod commands;
pub mod corpus_run;
pub mod instance;
pub mod parallel;
pub mod report;

pub use commands::{Globals, SpecInput};
pub use instance::{load_instance, parse_instance, save_instance, LoadError, LoadOptions};
pub use report::{Rendered, Status};
