//! IO, experiment drivers and CSV rendering for the `spectral-feast` CLI.

pub mod driver;
pub mod io;
