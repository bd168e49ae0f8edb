//! File formats, git ingestion, reports and the command-line driver around
//! [`bugmatch_core`].

pub mod cli;
pub mod config;
pub mod ingest;
pub mod io;
pub mod report;
pub mod snapshot;
pub mod synth;

pub use bugmatch_core as core;
