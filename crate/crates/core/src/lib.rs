//! Static, spherically symmetric perfect-fluid stars in general relativity
//! with a positive cosmological constant.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod eos;
pub mod export;
pub mod integrate;
pub mod metric;
pub mod model;
pub mod odecore;
pub mod numeric;
pub mod units;
pub mod verify;

pub use units::{Constants, UnitSystem};
