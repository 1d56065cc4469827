//! Monte Carlo calibration, input parsing, report formats and the command
//! line front end for `powgof-core`.

pub mod cli;
pub mod io;
pub mod report;
pub mod simulation;
