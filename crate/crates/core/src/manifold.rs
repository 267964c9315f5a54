//! Geometry of the manifold of `m × n` rank-one matrices.
//!
//! Points are stored as `σ u vᵀ` and tangent vectors as `(M, u_p, v_p)` with
//! `ξ = M u vᵀ + u_p vᵀ + u v_pᵀ`, `u_p ⊥ u`, `v_p ⊥ v`. The metric is the
//! trace inner product inherited from `ℝ^{m×n}`, and the retraction is
//! truncation of `X + ξ` to its dominant singular triplet.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{RankOneFactors, ReadMatrix, TangentVector};

pub const DEFAULT_SVD_TOL: f64 = 1e-10;
pub const DEFAULT_SVD_MAX_ITERS: usize = 5000;

/// Relative gap `(σ₁ − σ₂)/σ₁` below which the top triplet is reported as
/// degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const FALLBACK_START_SEED: u64 = 0x5eed_f00d;
const PROBE_ITERS: usize = 200;

/// Dominant singular triplet together with solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct DominantTriplet {
    pub factors: RankOneFactors,
    /// Set when the two largest singular values coincide to within
    /// [`DEGENERACY_GAP`], so the triplet is not unique.
    pub degenerate: bool,
    pub iterations: usize,
}

/// Top singular triplet `(u, σ₁, v)` of `a` with the factor sign convention
/// applied.
pub fn top_singular_triplet(a: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<RankOneFactors> {
    dominant_triplet(a, tol, max_iters).map(|t| t.factors)
}

pub fn dominant_triplet(a: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<DominantTriplet> {
    if a.nrows() == 0 || a.ncols() == 0 || a.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    if a.ncols() <= 2 {
        return small_gram_triplet(a);
    }
    if a.nrows() <= 2 {
        let t = small_gram_triplet(&a.transpose())?;
        let f = t.factors;
        return Ok(DominantTriplet {
            factors: RankOneFactors::new(f.v().clone(), f.sigma(), f.u().clone())?,
            ..t
        });
    }
    power_triplet(a, tol, max_iters)
}

/// Exact triplet for matrices with at most two columns, from the closed-form
/// eigendecomposition of the 1×1 or 2×2 Gram matrix.
fn small_gram_triplet(a: &DMatrix<f64>) -> Result<DominantTriplet> {
    let (v, degenerate) = if a.ncols() == 1 {
        (DVector::from_element(1, 1.0), false)
    } else {
        let c0 = a.column(0);
        let c1 = a.column(1);
        let p = c0.dot(&c0);
        let q = c0.dot(&c1);
        let r = c1.dot(&c1);
        let rad = (0.5 * (p - r)).hypot(q);
        let lambda = 0.5 * (p + r) + rad;
        let v = if q == 0.0 {
            if p >= r {
                DVector::from_vec(vec![1.0, 0.0])
            } else {
                DVector::from_vec(vec![0.0, 1.0])
            }
        } else {
            let a1 = DVector::from_vec(vec![lambda - r, q]);
            let a2 = DVector::from_vec(vec![q, lambda - p]);
            let w = if a1.norm() >= a2.norm() { a1 } else { a2 };
            let norm = w.norm();
            w / norm
        };
        (v, 2.0 * rad <= DEGENERACY_GAP * lambda)
    };
    let w = a * &v;
    let sigma = w.norm();
    if sigma == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(DominantTriplet {
        factors: RankOneFactors::new(w / sigma, sigma, v)?,
        degenerate,
        iterations: 0,
    })
}

struct PowerState {
    u: DVector<f64>,
    sigma: f64,
    v: DVector<f64>,
    iterations: usize,
}

/// Alternating power iteration `v ← aᵀ a v / ‖aᵀ a v‖` until
/// `‖aᵀ u − σ v‖ ≤ tol · σ` with `u = a v / σ`, `σ = ‖a v‖`.
fn power_iterate(a: &DMatrix<f64>, start: DVector<f64>, tol: f64, max_iters: usize) -> Result<PowerState> {
    let mut v = start;
    let mut residual = f64::INFINITY;
    for k in 1..=max_iters.max(1) {
        let w = a * &v;
        let sigma = w.norm();
        if sigma == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let u = w / sigma;
        let z = a.tr_mul(&u);
        residual = (&z - &v * sigma).norm() / sigma;
        if residual <= tol {
            return Ok(PowerState {
                u,
                sigma,
                v,
                iterations: k,
            });
        }
        let zn = z.norm();
        v = z / zn;
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        residual,
    })
}

fn seeded_unit(len: usize, stream: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(FALLBACK_START_SEED);
    rng.set_stream(stream);
    let x = DVector::from_fn(len, |_, _| rng.random::<f64>() - 0.5);
    let n = x.norm();
    x / n
}

fn power_triplet(a: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<DominantTriplet> {
    let n = a.ncols();
    let frob2 = a.norm_squared();
    let mut start = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    // All-ones start in the null space: no progress possible from it.
    if (a * &start).norm_squared() <= 1e-28 * frob2 {
        start = seeded_unit(n, 0);
    }
    let mut state = power_iterate(a, start, tol, max_iters)?;
    let mut total = state.iterations;
    let mut degenerate = false;

    // Any other singular value satisfies σ_k² ≤ ‖a‖_F² − σ². When that bound
    // does not already rule out a larger one, the start may have been
    // orthogonal to the dominant direction: probe the deflated matrix.
    if frob2 - state.sigma * state.sigma >= state.sigma * state.sigma {
        let deflated = a - &state.u * state.sigma * state.v.transpose();
        let mut probe = seeded_unit(n, 1);
        probe -= &state.v * state.v.dot(&probe);
        let norm = probe.norm();
        if norm > 0.0 {
            probe /= norm;
            let mut estimate = 0.0;
            for _ in 0..PROBE_ITERS {
                let w = &deflated * &probe;
                estimate = w.norm();
                if estimate == 0.0 {
                    break;
                }
                let z = deflated.tr_mul(&(w / estimate));
                let zn = z.norm();
                if zn == 0.0 {
                    break;
                }
                probe = z / zn;
                if estimate > state.sigma * (1.0 + DEGENERACY_GAP) {
                    break;
                }
            }
            total += PROBE_ITERS;
            if estimate > state.sigma * (1.0 + DEGENERACY_GAP) {
                state = power_iterate(a, probe, tol, max_iters)?;
                total += state.iterations;
            } else if estimate >= state.sigma * (1.0 - DEGENERACY_GAP) {
                degenerate = true;
            }
        }
    }

    Ok(DominantTriplet {
        factors: RankOneFactors::new(state.u, state.sigma, state.v)?,
        degenerate,
        iterations: total,
    })
}

/// Orthogonal projection of an ambient matrix onto `T_X`.
pub fn project_tangent(x: &RankOneFactors, g: &DMatrix<f64>) -> TangentVector {
    let gv = g * x.v();
    let gtu = g.tr_mul(x.u());
    tangent_from_products(x, gv, gtu)
}

/// Projection of a matrix supported on the observation set of `rm`;
/// `values[k]` is the entry at `rm.entries()[k]`.
pub fn project_observed(x: &RankOneFactors, rm: &ReadMatrix, values: &[f64]) -> TangentVector {
    debug_assert_eq!(values.len(), rm.observed());
    let u = x.u();
    let v = x.v();
    let mut gv = DVector::zeros(x.rows());
    let mut gtu = DVector::zeros(x.cols());
    for (e, &g) in rm.entries().iter().zip(values) {
        gv[e.row] += g * v[e.col];
        gtu[e.col] += g * u[e.row];
    }
    tangent_from_products(x, gv, gtu)
}

fn tangent_from_products(x: &RankOneFactors, gv: DVector<f64>, gtu: DVector<f64>) -> TangentVector {
    let u = x.u();
    let v = x.v();
    let m_scalar = u.dot(&gv);
    let mut u_p = gv - u * m_scalar;
    let mut v_p = gtu - v * m_scalar;
    // second Gram–Schmidt pass
    u_p -= u * u.dot(&u_p);
    v_p -= v * v.dot(&v_p);
    TangentVector { m_scalar, u_p, v_p }
}

/// `tr(ξᵀ η)` evaluated in factored form.
pub fn inner(_x: &RankOneFactors, xi: &TangentVector, eta: &TangentVector) -> f64 {
    xi.m_scalar * eta.m_scalar + xi.u_p.dot(&eta.u_p) + xi.v_p.dot(&eta.v_p)
}

pub fn norm(x: &RankOneFactors, xi: &TangentVector) -> f64 {
    inner(x, xi, xi).sqrt()
}

/// Result of a retraction with its degeneracy flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Retraction {
    pub point: RankOneFactors,
    pub degenerate: bool,
}

/// Best rank-one approximation of `X + ξ`.
pub fn retract(x: &RankOneFactors, xi: &TangentVector) -> Result<RankOneFactors> {
    retract_with_report(x, xi).map(|r| r.point)
}

/// Structured retraction. `X + ξ = [u û] S [v v̂]ᵀ` with
/// `S = [[σ + M, ‖v_p‖], [‖u_p‖, 0]]`, `û = u_p/‖u_p‖`, `v̂ = v_p/‖v_p‖`;
/// both bases are orthonormal, so the top triplet of the 2×2 core lifts to
/// the top triplet of `X + ξ`.
pub fn retract_with_report(x: &RankOneFactors, xi: &TangentVector) -> Result<Retraction> {
    if xi.is_zero() {
        return Ok(Retraction {
            point: x.clone(),
            degenerate: false,
        });
    }
    let unit = |w: &DVector<f64>| {
        let n = w.norm();
        if n > 0.0 {
            (w / n, n)
        } else {
            (DVector::zeros(w.len()), 0.0)
        }
    };
    let (u_hat, a) = unit(&xi.u_p);
    let (v_hat, b) = unit(&xi.v_p);
    let core = DMatrix::from_row_slice(2, 2, &[x.sigma() + xi.m_scalar, b, a, 0.0]);
    let t = dominant_triplet(&core, DEFAULT_SVD_TOL, DEFAULT_SVD_MAX_ITERS)?;
    let cu = t.factors.u();
    let cv = t.factors.v();
    let u = x.u() * cu[0] + u_hat * cu[1];
    let v = x.v() * cv[0] + v_hat * cv[1];
    let (u, _) = unit(&u);
    let (v, _) = unit(&v);
    Ok(Retraction {
        point: RankOneFactors::new(u, t.factors.sigma(), v)?,
        degenerate: t.degenerate,
    })
}

/// Retraction through the dense `m × n` matrix `X + ξ`.
pub fn retract_dense(x: &RankOneFactors, xi: &TangentVector, tol: f64, max_iters: usize) -> Result<RankOneFactors> {
    let y = x.to_dense() + xi.to_dense(x);
    top_singular_triplet(&y, tol, max_iters)
}
