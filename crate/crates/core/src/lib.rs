//! Stationary Nash points of smooth N-player games by descent on the
//! gradient-based Nikaido-Isoda merit function.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod blocks;
pub mod diagnostics;
pub mod error;
pub mod game;
pub mod games;
pub mod gni;
pub mod linalg;
pub mod math;
pub mod residual;
pub mod rng;
pub mod solvers;

pub use blocks::{BlockStructure, JointPoint};
pub use error::{Error, Result};
pub use game::{Game, GameClass, StationaryReport};
pub use gni::{GniEvaluation, GniParams, StepSetting};
pub use linalg::{Matrix, Vector};
pub use residual::ResidualEvaluation;
pub use solvers::{solve, Method, SolverConfig, Status, StepPolicy, Trace};
