//! Riemannian gradient descent with Armijo backtracking on the rank-one
//! manifold.
//!
//! [`descend`] is the shared engine; [`solve`] runs it on the smoothed MEC
//! cost behind the initialization guard, and the Frobenius baseline in
//! [`crate::baselines`] runs it on the least-squares cost.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{self, retract_with_report, top_singular_triplet, DEFAULT_SVD_MAX_ITERS, DEFAULT_SVD_TOL};
use crate::model::{Haplotype, RankOneFactors, ReadMatrix, Sign, SolverConfig, TangentVector};
use crate::objective::{MecCost, SmoothCost};

/// `|v_j|` below this is treated as zero when reading off the haplotype.
pub const SIGN_TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    GradientTolerance,
    MaxIters,
    LineSearchFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub x_final: RankOneFactors,
    pub haplotype: Haplotype,
    pub iterations: usize,
    /// `f(X₀), f(X₁), …, f(X_final)`.
    pub cost_trace: Vec<f64>,
    pub converged: bool,
    pub termination: Termination,
    pub final_gradient_norm: f64,
    /// Entries of `v` that were zero when the haplotype was extracted.
    pub sign_ties: usize,
    /// Retractions whose top singular value was not unique.
    pub degenerate_retractions: usize,
}

/// Haplotype read off a rank-one point, with the number of sign ties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub haplotype: Haplotype,
    pub ties: usize,
}

/// `sign(v)` entrywise; entries with `|v_j| < 1e-12` become `+1`.
pub fn extract_haplotype(x: &RankOneFactors) -> Extraction {
    let mut ties = 0;
    let values = x
        .v()
        .iter()
        .map(|&vj| {
            if vj.abs() < SIGN_TIE_TOL {
                ties += 1;
                Sign::Plus
            } else {
                Sign::of(vj)
            }
        })
        .collect();
    Extraction {
        haplotype: Haplotype::new(values),
        ties,
    }
}

/// Rank-one approximation of `P_Ω(R)`.
pub fn initial_point(rm: &ReadMatrix) -> Result<RankOneFactors> {
    if rm.observed() == 0 {
        return Err(Error::ZeroMatrix);
    }
    top_singular_triplet(&rm.dense(), DEFAULT_SVD_TOL, DEFAULT_SVD_MAX_ITERS)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InitCheck {
    pub f0: f64,
    pub omega_count: usize,
    pub admissible: bool,
}

/// Whether `x0` satisfies the convergence precondition `f(X₀) < |Ω|`.
pub fn check_initialization(rm: &ReadMatrix, x0: &RankOneFactors, cfg: &SolverConfig) -> InitCheck {
    let f0 = MecCost::new(cfg).value(rm, x0);
    let omega_count = rm.observed();
    InitCheck {
        f0,
        omega_count,
        admissible: f0 < omega_count as f64,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmijoStep {
    pub m_star: usize,
    pub step: f64,
    pub x_next: RankOneFactors,
    pub f_next: f64,
    pub degenerate: bool,
}

/// Smallest `m ≥ 0` with
/// `f(X) − f(R_X(ᾱβ^m ξ)) ≥ σ ᾱ β^m ⟨ξ, ξ⟩_X`.
///
/// A trial step whose retraction collapses to the zero matrix is treated as
/// failing the inequality.
pub fn armijo_step<C: SmoothCost + ?Sized>(
    cost: &C,
    rm: &ReadMatrix,
    x: &RankOneFactors,
    f_x: f64,
    xi: &TangentVector,
    cfg: &SolverConfig,
) -> Result<ArmijoStep> {
    let xi_sq = manifold::inner(x, xi, xi);
    let mut step = cfg.alpha_bar();
    for m in 0..=cfg.max_backtracks() {
        match retract_with_report(x, &xi.scaled(step)) {
            Ok(r) => {
                let f_next = cost.value(rm, &r.point);
                if f_x - f_next >= cfg.sigma_armijo() * step * xi_sq {
                    return Ok(ArmijoStep {
                        m_star: m,
                        step,
                        x_next: r.point,
                        f_next,
                        degenerate: r.degenerate,
                    });
                }
            }
            Err(Error::ZeroMatrix) => {}
            Err(e) => return Err(e),
        }
        step *= cfg.beta();
    }
    Err(Error::LineSearchFailure {
        backtracks: cfg.max_backtracks(),
    })
}

/// Gradient descent from `x0` until `‖grad f‖ < τ`, `max_iters`, or a
/// line-search failure.
pub fn descend<C: SmoothCost + ?Sized>(
    cost: &C,
    rm: &ReadMatrix,
    x0: RankOneFactors,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    x0.check_dims(rm.rows(), rm.cols())?;
    let mut x = x0;
    let mut f = cost.value(rm, &x);
    let mut cost_trace = vec![f];
    let mut iterations = 0;
    let mut degenerate_retractions = 0;
    let (termination, final_gradient_norm) = loop {
        let xi = -cost.riemannian_gradient(rm, &x);
        let grad_norm = manifold::norm(&x, &xi);
        if grad_norm < cfg.tau() {
            break (Termination::GradientTolerance, grad_norm);
        }
        if iterations >= cfg.max_iters() {
            break (Termination::MaxIters, grad_norm);
        }
        match armijo_step(cost, rm, &x, f, &xi, cfg) {
            Ok(step) => {
                x = step.x_next;
                f = step.f_next;
                degenerate_retractions += usize::from(step.degenerate);
                cost_trace.push(f);
                iterations += 1;
            }
            Err(Error::LineSearchFailure { .. }) => break (Termination::LineSearchFailure, grad_norm),
            Err(e) => return Err(e),
        }
    };
    let Extraction { haplotype, ties } = extract_haplotype(&x);
    Ok(SolveResult {
        x_final: x,
        haplotype,
        iterations,
        cost_trace,
        converged: termination == Termination::GradientTolerance,
        termination,
        final_gradient_norm,
        sign_ties: ties,
        degenerate_retractions,
    })
}

/// Minimizes the smoothed MEC cost from the rank-one approximation of
/// `P_Ω(R)`. Refuses to start unless `f(X₀) < |Ω|`.
pub fn solve(rm: &ReadMatrix, cfg: &SolverConfig) -> Result<SolveResult> {
    let x0 = initial_point(rm)?;
    // σ₀ ≤ ‖P_Ω(R)‖_F = √|Ω|, so the start is norm-bounded
    assert!(x0.sigma() <= (rm.observed() as f64).sqrt() * (1.0 + 1e-9));
    solve_from(rm, x0, cfg)
}

pub fn solve_from(rm: &ReadMatrix, x0: RankOneFactors, cfg: &SolverConfig) -> Result<SolveResult> {
    x0.check_dims(rm.rows(), rm.cols())?;
    let check = check_initialization(rm, &x0, cfg);
    if !check.admissible {
        return Err(Error::InadmissibleStart {
            f0: check.f0,
            omega_count: check.omega_count,
        });
    }
    descend(&MecCost::new(cfg), rm, x0, cfg)
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use super::*;
    use crate::model::Entry;

    #[test]
    fn extraction_of_scaled_haplotype() {
        let h = [1.0, -1.0, 1.0, -1.0, -1.0];
        let x = RankOneFactors::from_outer(&DVector::from_element(3, 1.0), &DVector::from_row_slice(&h)).unwrap();
        let ex = extract_haplotype(&x);
        assert_eq!(ex.haplotype, Haplotype::from_i64(&[1, -1, 1, -1, -1]).unwrap());
        assert_eq!(ex.ties, 0);
    }

    #[test]
    fn extraction_tie_breaks_to_plus() {
        let x = RankOneFactors::new(
            DVector::from_element(1, 1.0),
            1.0,
            DVector::from_vec(vec![0.6, 0.0, -0.8]),
        )
        .unwrap();
        let ex = extract_haplotype(&x);
        assert_eq!(ex.haplotype, Haplotype::from_i64(&[1, 1, -1]).unwrap());
        assert_eq!(ex.ties, 1);
    }

    #[test]
    fn single_entry_initial_point() {
        let rm = ReadMatrix::new(
            1,
            1,
            vec![Entry {
                row: 0,
                col: 0,
                value: Sign::Plus,
            }],
        )
        .unwrap();
        let x = initial_point(&rm).unwrap();
        assert_eq!(x.sigma(), 1.0);
        assert_eq!(x.u()[0], 1.0);
        assert_eq!(x.v()[0], 1.0);
    }

    #[test]
    fn empty_read_matrix_has_no_initial_point() {
        let rm = ReadMatrix::new(3, 4, vec![]).unwrap();
        assert_eq!(initial_point(&rm), Err(Error::ZeroMatrix));
    }

    #[test]
    fn origin_is_inadmissible() {
        let rm = ReadMatrix::new(
            1,
            2,
            vec![Entry {
                row: 0,
                col: 1,
                value: Sign::Minus,
            }],
        )
        .unwrap();
        let cfg = SolverConfig::default();
        let check = check_initialization(&rm, &RankOneFactors::zero_limit(1, 2), &cfg);
        assert_eq!(check.f0, 1.0);
        assert_eq!(check.omega_count, 1);
        assert!(!check.admissible);
        assert!(matches!(
            solve_from(&rm, RankOneFactors::zero_limit(1, 2), &cfg),
            Err(Error::InadmissibleStart { .. })
        ));
    }

    #[test]
    fn zero_direction_is_accepted_immediately() {
        let rm = ReadMatrix::new(
            1,
            1,
            vec![Entry {
                row: 0,
                col: 0,
                value: Sign::Plus,
            }],
        )
        .unwrap();
        let cfg = SolverConfig::default();
        let x = initial_point(&rm).unwrap();
        let cost = MecCost::new(&cfg);
        let f = cost.value(&rm, &x);
        let step = armijo_step(&cost, &rm, &x, f, &TangentVector::zero(1, 1), &cfg).unwrap();
        assert_eq!(step.m_star, 0);
        assert_eq!(step.x_next, x);
    }
}
