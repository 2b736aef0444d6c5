//! File formats, a parallel packet executor and the command-line front end
//! for `fdsic-core`.

pub mod cli;
pub mod config_file;
pub mod executor;
pub mod mf_csv;
pub mod report;

pub use executor::RayonExecutor;
