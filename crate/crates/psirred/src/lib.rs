//! Exact decision procedures for the irreducibility of principal series of
//! p-adic reductive groups, for both smooth and locally analytic (Banach)
//! inductions.
//!
//! The crate is organised bottom-up:
//!
//! * [`rootdata`] — relative root data, weighted `rho`, Weyl groups;
//! * [`charalg`] — exact character arithmetic over finitely presented groups;
//! * [`criteria`] — the irreducibility engines, each returning a [`criteria::Verdict`];
//! * [`rgroups`] — `F_2` linear algebra counting R-group sizes;
//! * [`glnd`] — segment combinatorics for `GL_n(D)`;
//! * [`mupoles`] — Plancherel factorization and rank-one pole tables;
//! * [`cli`] — input documents, dispatch and deterministic reports.

pub mod charalg;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod glnd;
pub mod linalg;
pub mod mupoles;
pub mod rgroups;
pub mod rootdata;

pub use error::{Error, Result};
