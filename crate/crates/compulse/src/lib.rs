//! Composite pulse sequences for robust single-qubit gates.
//!
//! `compulse` constructs, verifies and optimizes trains of phased
//! rectangular pulses whose relative phases (and optionally amplitudes)
//! are chosen so that the net SU(2) propagator implements an X or
//! Hadamard gate robustly under simultaneous Rabi-frequency, detuning
//! and duration errors.
//!
//! The crate is organized around a 2×2 matrix pipeline:
//!
//! - [`su2`] — exact propagators, sequence composition, target gates and
//!   the average gate fidelity.
//! - [`jet`] — truncated bivariate Taylor (jet) arithmetic delivering
//!   exact mixed error derivatives of the total propagator.
//! - [`catalog`] — the named sequences with provenance, claimed
//!   derivative orders and self-checks of their closed-form constants.
//! - [`designer`] — phase solving for symmetric π-pulse sequences from
//!   gate and derivative-cancellation conditions.
//! - [`optimizer`] — multi-start projected gradient descent on the
//!   average infidelity over an error box.
//! - [`landscape`] — infidelity fields over `(ε, δ)` boxes, contour
//!   extraction and robustness metrics.
//!
//! A walk-through with runnable snippets lives in the `book/` directory;
//! its code blocks are compiled as doc-tests of this crate.
//!
//! # Quick start
//!
//! ```
//! use compulse::catalog;
//! use compulse::su2::{compose, infidelity, ErrorPoint};
//!
//! let record = catalog::get("X5a")?;
//! let u = compose(&record.sequence, &ErrorPoint::ORIGIN);
//! let err = infidelity(&u.to_gate(), &record.sequence.target_matrix());
//! assert!(err < 1e-12);
//! # Ok::<(), compulse::Error>(())
//! ```

pub mod catalog;
pub mod designer;
mod error;
pub mod jet;
pub mod landscape;
pub mod optimizer;
pub mod su2;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book_doctests;
