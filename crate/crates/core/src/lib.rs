//! Position-dependent ac Stark shifts for trapped-ion qubit addressing.
//!
//! A far-detuned Gaussian beam, displaced from the centre of an ion chain,
//! shifts the qubit transition of every ion by a different amount. This crate
//! evaluates those shifts and the photon-scattering they cost, and turns them
//! into addressing plans:
//!
//! * [`atomic_data`]: species records and transition tables.
//! * [`chain`]: equilibrium positions and axial normal modes of an ion chain.
//! * [`beam`]: the displaced Gaussian beam and its geometry factor.
//! * [`stark`]: shift-per-intensity, splittings, scattering and power solves.
//! * [`planner`]: individual/pair addressing plans and mechanical checks.
//! * [`cli`]: sweep engine and report assembly used by the `acstark` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic_data;
pub mod beam;
pub mod chain;
pub mod cli;
pub mod constants;
pub mod error;
pub mod numeric;
pub mod planner;
pub mod report;
pub mod stark;
pub mod sweep;

pub use error::{Error, Result};
