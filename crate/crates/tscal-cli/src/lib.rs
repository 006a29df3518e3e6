//! Scenario runner and randomized sweep harness for the `tscal` engine.
//!
//! The binary front end (`tscal`) exposes three subcommands:
//! `verify` runs one scenario file, `sweep` runs randomized soundness or
//! falsification sweeps for a theorem family, and `con-search` hunts for
//! violations of the monomial ladder ratio condition on generated scales.

pub mod config;
pub mod consearch;
pub mod report;
pub mod run;
pub mod scalegen;
pub mod sweep;
