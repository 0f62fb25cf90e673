//! Document format, name lookup and verification suites for the
//! `quasimod` command.

pub mod document;
pub mod names;
pub mod ops;
pub mod suites;
