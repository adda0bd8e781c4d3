//! Scenario-file and output-document types of the `qmix` command-line tool,
//! exposed as a library so integration tests can validate round trips
//! against the exact serialization schema.

pub mod output;
pub mod scenario;
