//! Least-squares completion baselines: alternating minimization over the
//! factors `u vᵀ`, and Riemannian descent of `‖P_Ω(R) − P_Ω(X)‖_F²` on the
//! rank-one manifold.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{RankOneFactors, ReadMatrix, SolverConfig};
use crate::objective::{scatter, SmoothCost};
use crate::solver::{descend, initial_point, SolveResult};

/// Denominators below this abort an alternating update.
pub const MIN_DENOMINATOR: f64 = 1e-14;
pub const ALTMIN_REL_TOL: f64 = 1e-8;
pub const ALTMIN_MAX_ITERS: usize = 500;

/// `Σ_{(i,j)∈Ω} (r_ij − x_ij)²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrobeniusCost;

impl SmoothCost for FrobeniusCost {
    fn value(&self, rm: &ReadMatrix, x: &RankOneFactors) -> f64 {
        rm.entries()
            .iter()
            .map(|e| {
                let d = e.value.value() - x.entry(e.row, e.col);
                d * d
            })
            .sum()
    }

    fn observed_gradient(&self, rm: &ReadMatrix, x: &RankOneFactors) -> Vec<f64> {
        rm.entries()
            .iter()
            .map(|e| -2.0 * (e.value.value() - x.entry(e.row, e.col)))
            .collect()
    }
}

pub fn frobenius_cost(rm: &ReadMatrix, x: &RankOneFactors) -> Result<f64> {
    x.check_dims(rm.rows(), rm.cols())?;
    Ok(FrobeniusCost.value(rm, x))
}

pub fn frobenius_gradient(rm: &ReadMatrix, x: &RankOneFactors) -> Result<DMatrix<f64>> {
    x.check_dims(rm.rows(), rm.cols())?;
    Ok(scatter(rm, &FrobeniusCost.observed_gradient(rm, x)))
}

/// Riemannian descent on the Frobenius residual from the rank-one
/// approximation of `P_Ω(R)`. No admissibility guard applies.
pub fn frobenius_manifold_solve(rm: &ReadMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    let x0 = initial_point(rm)?;
    descend(&FrobeniusCost, rm, x0, cfg)
}

pub fn frobenius_manifold_solve_from(rm: &ReadMatrix, x0: RankOneFactors, cfg: &SolverConfig) -> Result<SolveResult> {
    descend(&FrobeniusCost, rm, x0, cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AltMinResult {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    /// Completed sweeps (one `u` update and one `v` update each).
    pub iterations: usize,
    /// Objective after initialization and after every half-step.
    pub objective_trace: Vec<f64>,
}

impl AltMinResult {
    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.u * self.v.transpose()
    }

    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().unwrap_or(&f64::NAN)
    }
}

fn altmin_objective(rm: &ReadMatrix, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    rm.entries()
        .iter()
        .map(|e| {
            let d = e.value.value() - u[e.row] * v[e.col];
            d * d
        })
        .sum()
}

/// Closed-form least-squares update of one factor given the other.
/// `by_row` updates `u` from `v`; otherwise `v` from `u`.
fn half_step(rm: &ReadMatrix, fixed: &DVector<f64>, len: usize, by_row: bool) -> Result<DVector<f64>> {
    let mut num = DVector::zeros(len);
    let mut den = DVector::zeros(len);
    for e in rm.entries() {
        let (k, other) = if by_row { (e.row, e.col) } else { (e.col, e.row) };
        num[k] += e.value.value() * fixed[other];
        den[k] += fixed[other] * fixed[other];
    }
    for k in 0..len {
        if den[k] < MIN_DENOMINATOR {
            return Err(Error::DegenerateUpdate {
                axis: if by_row { "row" } else { "column" },
                index: k,
                denominator: den[k],
            });
        }
        num[k] /= den[k];
    }
    Ok(num)
}

/// Alternating minimization of `‖P_Ω(R) − P_Ω(u vᵀ)‖_F²`, `u` first, from
/// the rank-one approximation of `P_Ω(R)` split as `u = √σ u₀`, `v = √σ v₀`.
pub fn altmin_factorize(rm: &ReadMatrix, max_iters: usize, rel_tol: f64) -> Result<AltMinResult> {
    let (per_row, per_col) = rm.counts();
    if let Some(i) = per_row.iter().position(|&c| c == 0) {
        return Err(Error::EmptyRowOrColumn { axis: "row", index: i });
    }
    if let Some(j) = per_col.iter().position(|&c| c == 0) {
        return Err(Error::EmptyRowOrColumn {
            axis: "column",
            index: j,
        });
    }
    let x0 = initial_point(rm)?;
    let scale = x0.sigma().sqrt();
    let mut u = x0.u() * scale;
    let mut v = x0.v() * scale;
    let mut prev = altmin_objective(rm, &u, &v);
    let mut objective_trace = vec![prev];
    let mut iterations = 0;
    while iterations < max_iters {
        u = half_step(rm, &v, rm.rows(), true)?;
        objective_trace.push(altmin_objective(rm, &u, &v));
        v = half_step(rm, &u, rm.cols(), false)?;
        let cur = altmin_objective(rm, &u, &v);
        objective_trace.push(cur);
        iterations += 1;
        if cur == 0.0 || (prev - cur) <= rel_tol * prev {
            break;
        }
        prev = cur;
    }
    Ok(AltMinResult {
        u,
        v,
        iterations,
        objective_trace,
    })
}
