//! File IO, reports, DOT rendering and the command line for `maidkit-core`.

pub mod cli;
pub mod dot;
pub mod io;
pub mod report;
