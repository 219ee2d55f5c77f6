//! Expansive block empirical likelihood (EBEL) for the mean and smooth
//! functions of the mean of weakly dependent time series, with the
//! overlapping-block BEL baseline, limit-law calibration and Monte Carlo
//! study drivers.

pub mod bel;
pub mod blocking;
pub mod el;
pub mod error;
pub mod experiment;
pub mod inference;
pub mod interval;
pub mod io;
pub mod limit_law;
pub mod processes;
pub mod rng;
pub mod series;
pub mod stats;

pub use error::{Error, Result};
