//! Toolkit for probing chaos-adjacent properties of dynamical systems
//! under explicit finite budgets.
//!
//! The crate is layered. `dyncore` fixes the phase-space vocabulary
//! (points, metrics, iteration). `systems` builds concrete families:
//! interval maps, circle rotations, subshifts from forbidden words,
//! substitution systems, odometers, and cellular automata. `symlang`
//! carries the combinatorics of symbolic languages (de Bruijn graphs,
//! factor counting, covers). `ca` evolves one-dimensional automata on
//! finite windows with honest error tracking. `detectors` turns the
//! asymptotic definitions (scrambled pairs, sensitivity, transitivity,
//! distality, entropy estimates) into budgeted three-valued tests, and
//! `profile` assembles their verdicts, closes them under a curated set of
//! implications, and cross-checks for contradictions.
//!
//! Every randomized procedure takes an explicit seed and all parallel
//! reductions are ordered, so identical inputs yield identical reports.

pub mod ca;
pub mod detectors;
pub mod dyncore;
pub mod error;
pub mod profile;
pub mod report;
pub mod rng;
pub mod symlang;
pub mod systems;
pub mod verdict;

pub use error::{Error, Result};
