//! Probe spectroscopy of exactly solvable lattice models.
//!
//! Forward models for weakly coupled two-level probes, the inverse problem that
//! turns measured resonance amplitudes into a momentum-resolved spectrum, two-probe
//! correlation maps, the continuum master equation, and exact small-system oracles.

// Negated comparisons are how the validators reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlations;
pub mod error;
pub mod grid;
pub mod lindblad;
pub mod models;
pub mod oracle;
pub mod probe;
pub mod rates;
pub mod reconstruct;
pub mod scenarios;

pub use error::{Error, Result};
