//! Fringe shifts and visibility reduction factors for three-grating
//! Talbot-Lau matter-wave interferometers under rotation, gravity and
//! grating vibrations, with a Monte Carlo cross-check of every closed form,
//! fringe fitting, accelerometer spectra and design budgets.
//!
//! All library quantities are SI. Unit-bearing strings only appear at the
//! command-line boundary (see [`units`]).

pub mod budget;
pub mod cli;
pub mod error;
pub mod fringe;
pub mod inertial;
pub mod model;
pub mod numfmt;
pub mod oracle;
pub mod specfun;
pub mod spectrum;
pub mod units;
pub mod vibration;

pub use error::{Error, Result};
