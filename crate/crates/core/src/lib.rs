//! Toolkit for building MPI parallelization datasets from C programs and
//! scoring predicted MPI code.
//!
//! The pipeline: [`cst`] parses and standardizes C, [`linearizer`] turns trees
//! into SBT / X-SBT sequences, [`mpiedit`] finds and prunes MPI calls,
//! [`corpus`] builds the JSON Lines dataset, [`stats`] summarizes a corpus,
//! [`predictor`] defines the prediction exchange format plus a heuristic
//! baseline, [`eval`] scores predictions and [`bench`] runs the numerical
//! benchmark suite.

pub mod bench;
pub mod corpus;
pub mod cst;
pub mod eval;
pub mod linearizer;
pub mod mpiedit;
pub mod predictor;
pub mod stats;
