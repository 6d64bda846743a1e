//! Library surface of the command-line tool: report assembly, the appendix
//! claim runner and the chamber-graph cache. The binary in `main.rs` is a
//! thin argument-parsing layer over these.

pub mod appendix_run;
pub mod cache;
pub mod report;
