//! DoF regions, rate-splitting power allocation and Monte Carlo checks for
//! two-receiver MIMO broadcast and interference channels with imperfect CSIT.

pub mod channel;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod power;
pub mod ratesim;
pub mod region;

pub use error::{Error, Result};
