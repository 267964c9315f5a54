//! Smoothed error-correction cost
//!
//! ```text
//! f(X) = Σ_{(i,j)∈Ω} |r_ij − γ₁ atan(γ₂ x_ij)|^p
//! ```
//!
//! and its Euclidean and Riemannian gradients. With `γ₁ < 2/π` every residual
//! satisfies `|e_ij| ≥ 1 − γ₁π/2 > 0`, so `|·|^p` is differentiable on Ω even
//! for `p = 1`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::manifold::project_observed;
use crate::model::{RankOneFactors, ReadMatrix, SolverConfig, TangentVector};

/// A cost on rank-one matrices that only looks at observed entries.
pub trait SmoothCost {
    fn value(&self, rm: &ReadMatrix, x: &RankOneFactors) -> f64;

    /// Euclidean gradient restricted to Ω, aligned with `rm.entries()`.
    fn observed_gradient(&self, rm: &ReadMatrix, x: &RankOneFactors) -> Vec<f64>;

    fn riemannian_gradient(&self, rm: &ReadMatrix, x: &RankOneFactors) -> TangentVector {
        project_observed(x, rm, &self.observed_gradient(rm, x))
    }
}

/// Scatter Ω-aligned values into a dense `m × n` matrix.
pub fn scatter(rm: &ReadMatrix, values: &[f64]) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(rm.rows(), rm.cols());
    for (e, &value) in rm.entries().iter().zip(values) {
        g[(e.row, e.col)] = value;
    }
    g
}

/// The arctan-smoothed ℓp error-correction cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MecCost {
    pub gamma1: f64,
    pub gamma2: f64,
    pub p: f64,
}

impl MecCost {
    pub fn new(cfg: &SolverConfig) -> Self {
        Self {
            gamma1: cfg.gamma1(),
            gamma2: cfg.gamma2(),
            p: cfg.p(),
        }
    }

    /// Lower bound `|Ω| (1 − γ₁π/2)^p` on the cost.
    pub fn lower_bound(&self, observed: usize) -> f64 {
        observed as f64 * (1.0 - self.gamma1 * std::f64::consts::FRAC_PI_2).powf(self.p)
    }

    #[inline]
    fn residual(&self, r: f64, x: f64) -> f64 {
        r - self.gamma1 * (self.gamma2 * x).atan()
    }
}

/// `e_ij = r_ij − γ₁ atan(γ₂ x_ij)` for each observed entry.
pub fn residuals(rm: &ReadMatrix, x: &RankOneFactors, cfg: &SolverConfig) -> Result<Vec<f64>> {
    x.check_dims(rm.rows(), rm.cols())?;
    let c = MecCost::new(cfg);
    Ok(rm
        .entries()
        .iter()
        .map(|e| c.residual(e.value.value(), x.entry(e.row, e.col)))
        .collect())
}

impl SmoothCost for MecCost {
    fn value(&self, rm: &ReadMatrix, x: &RankOneFactors) -> f64 {
        let mut total = 0.0;
        for e in rm.entries() {
            let r = self.residual(e.value.value(), x.entry(e.row, e.col)).abs();
            total += (self.p * r.ln()).exp();
        }
        total
    }

    fn observed_gradient(&self, rm: &ReadMatrix, x: &RankOneFactors) -> Vec<f64> {
        let scale = self.p * self.gamma1 * self.gamma2;
        rm.entries()
            .iter()
            .map(|e| {
                let xij = x.entry(e.row, e.col);
                let r = self.residual(e.value.value(), xij);
                let z = self.gamma2 * xij;
                // |e|^{p−1} via exp/ln; |e| is bounded away from zero
                let mag = ((self.p - 1.0) * r.abs().ln()).exp();
                -scale * mag * r.signum() / (1.0 + z * z)
            })
            .collect()
    }
}

pub fn cost(rm: &ReadMatrix, x: &RankOneFactors, cfg: &SolverConfig) -> Result<f64> {
    x.check_dims(rm.rows(), rm.cols())?;
    Ok(MecCost::new(cfg).value(rm, x))
}

/// Dense Euclidean gradient, zero off Ω.
pub fn euclidean_gradient(rm: &ReadMatrix, x: &RankOneFactors, cfg: &SolverConfig) -> Result<DMatrix<f64>> {
    x.check_dims(rm.rows(), rm.cols())?;
    Ok(scatter(rm, &MecCost::new(cfg).observed_gradient(rm, x)))
}

pub fn riemannian_gradient(rm: &ReadMatrix, x: &RankOneFactors, cfg: &SolverConfig) -> Result<TangentVector> {
    x.check_dims(rm.rows(), rm.cols())?;
    Ok(MecCost::new(cfg).riemannian_gradient(rm, x))
}
