//! Exact arithmetic for q-series and quasimodular forms, together with the
//! descendent potentials of K3 surfaces in the divisibility-two class.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the companion CLI crate.

#![no_std]

extern crate alloc;

pub mod catalogue;
pub mod degeneration;
pub mod error;
pub mod hecke;
pub mod linalg;
pub mod modforms;
pub mod potentials;
pub mod qseries;

pub use error::{Error, Result};
pub use modforms::{Generator, Level, QMForm};
pub use qseries::{QSeries, Rational};
