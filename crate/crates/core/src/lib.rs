//! Numerical laboratory for objectivity diagnostics of a qubit coupled to an
//! N-level environment through a Gaussian-orthogonal random coupling.
//!
//! The crate covers the full pipeline: Hamiltonians and initial states
//! ([`model`]), exact propagation ([`evolve`]), two environment partitioning
//! schemes ([`fragment`]), mutual information with its accessible/discord
//! split ([`infometrics`]), the spectrum-broadcast distance bound ([`sbs`]),
//! and the experiment driver behind the `objectivity` binary ([`harness`]).
//!
//! Fragment sweeps run on rayon when the default `parallel` feature is on and
//! fall back to a sequential loop otherwise; every task draws from its own
//! seeded stream so both builds produce identical numbers.

pub mod error;
pub mod evolve;
pub mod fragment;
pub mod harness;
pub mod infometrics;
pub mod model;
pub mod par;
pub mod qstate;
pub mod rng;
pub mod sbs;
pub mod search;

pub use error::{Error, Result};
