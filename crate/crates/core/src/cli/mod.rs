//! Configuration, experiment drivers and file output behind the `wdg` binary.

pub mod config;
pub mod output;
pub mod run;
pub mod selftest;

pub use config::{ExperimentKind, SimulationConfig};
pub use run::{convergence_study, simulate, LevelReport, SimulateReport, StudyReport, Timings};
