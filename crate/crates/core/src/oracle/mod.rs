//! Exact small-system references: real-space BdG, Fock-space ring, probe plus modes.

mod bdg;
mod fock;
mod probe_modes;

pub use bdg::{bdg_spectrum, BdgSolution};
pub use fock::FockRing;
pub use probe_modes::FockSystem;

/// Default Hilbert-space cap for exact evolution.
pub const DEFAULT_CAPACITY: usize = 1 << 16;
