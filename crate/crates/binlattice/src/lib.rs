//! File formats, parallel grids and the command-line front end for
//! [`binlattice_core`].

pub mod cli;
pub mod output;
pub mod parallel;

pub use cli::{execute, run, CliError, Output};
