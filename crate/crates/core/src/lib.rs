//! Haplotype assembly as rank-one matrix completion with an error-correction
//! cost, solved by Riemannian gradient descent on the manifold of rank-one
//! matrices.
//!
//! The read matrix `R` holds ±1 observations on a set Ω of (read, SNP) pairs.
//! [`solver::solve`] minimizes the arctan-smoothed ℓp mismatch
//! `Σ_Ω |r_ij − γ₁ atan(γ₂ x_ij)|^p` over rank-one `X` and reads the haplotype
//! off the sign of the right singular vector. [`baselines`] holds the
//! least-squares comparison methods and [`bench`] the sweep harness.

pub mod baselines;
pub mod bench;
pub mod datagen;
pub mod error;
pub mod io;
pub mod manifold;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    Entry, GroundTruth, Haplotype, RankOneFactors, ReadMatrix, Sign, SolverConfig, SolverParams, TangentVector,
};
