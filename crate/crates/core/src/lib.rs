//! Exact-arithmetic toolkit for rational polyhedral Banach spaces and
//! nonexpansive operators, with finite-stage approximants of the isometrically
//! universal operator on the Gurarii space.

pub mod error;
pub mod exactlin;
pub mod polytope;
pub mod banach;
pub mod amalgam;
pub mod rationalize;
pub mod report;
pub mod fraisse;
pub mod io;
pub mod cli;

pub use error::{Error, Result};
