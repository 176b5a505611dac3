//! Ergodic robust control of river sediment replenishment under costly,
//! Erlang-distributed observation of a jump-driven streamflow.

pub mod cli;
pub mod config;
pub mod discretization;
pub mod error;
pub mod gcbi;
pub mod kernel;
pub mod optim;
pub mod problem;
pub mod sediment;
pub mod simulate;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
