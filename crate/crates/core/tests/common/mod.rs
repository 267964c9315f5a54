#![allow(dead_code)]

use haplo_core::io::{parse_ground_truth, parse_read_matrix};
use haplo_core::manifold::project_tangent;
use haplo_core::{GroundTruth, RankOneFactors, ReadMatrix, SolverConfig, TangentVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE_READS: &str = include_str!("../../../cli/fixtures/example1/reads.txt");
pub const EXAMPLE_TRUTH: &str = include_str!("../../../cli/fixtures/example1/truth.txt");

pub fn example_reads() -> ReadMatrix {
    parse_read_matrix(EXAMPLE_READS).unwrap()
}

pub fn example_truth() -> GroundTruth {
    parse_ground_truth(EXAMPLE_TRUTH).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn uniform_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_point(rng: &mut ChaCha8Rng, m: usize, n: usize) -> RankOneFactors {
    let a = uniform_vector(rng, m);
    let b = uniform_vector(rng, n);
    let scale = rng.random_range(0.5..3.0);
    RankOneFactors::from_outer(&(a * scale), &b).unwrap()
}

pub fn random_tangent(rng: &mut ChaCha8Rng, x: &RankOneFactors) -> TangentVector {
    let g = uniform_matrix(rng, x.rows(), x.cols());
    project_tangent(x, &g)
}

/// Random read matrix with each entry observed with probability `pd`, at
/// least one entry guaranteed.
pub fn random_reads(rng: &mut ChaCha8Rng, m: usize, n: usize, pd: f64) -> ReadMatrix {
    let mut a = DMatrix::from_fn(m, n, |_, _| {
        if rng.random_bool(pd) {
            if rng.random_bool(0.5) {
                1.0
            } else {
                -1.0
            }
        } else {
            0.0
        }
    });
    if a.iter().all(|&x| x == 0.0) {
        a[(0, 0)] = 1.0;
    }
    ReadMatrix::from_dense(&a).unwrap()
}

/// Top singular triplet from nalgebra's full SVD, sign-normalized so the
/// largest-magnitude entry of `u` is positive.
pub fn svd_top(a: &DMatrix<f64>) -> (f64, DVector<f64>, DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let k = order[0];
    let second = order.get(1).map_or(0.0, |&j| svd.singular_values[j]);
    let mut u: DVector<f64> = svd.u.as_ref().unwrap().column(k).into_owned();
    let mut v: DVector<f64> = svd.v_t.as_ref().unwrap().row(k).transpose().into_owned();
    let imax = u.iamax();
    if u[imax] < 0.0 {
        u = -u;
        v = -v;
    }
    (svd.singular_values[k], u, v, second)
}

/// Smoothed sign-agreement cost on an arbitrary dense matrix, written out
/// entry by entry.
pub fn mec_cost_dense(rm: &ReadMatrix, x: &DMatrix<f64>, cfg: &SolverConfig) -> f64 {
    let mut total = 0.0;
    for e in rm.entries() {
        let r = e.value.value();
        let s = cfg.gamma1() * (cfg.gamma2() * x[(e.row, e.col)]).atan();
        total += (r - s).abs().powf(cfg.p());
    }
    total
}

pub fn frobenius_cost_dense(rm: &ReadMatrix, x: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for e in rm.entries() {
        let d = e.value.value() - x[(e.row, e.col)];
        total += d * d;
    }
    total
}

pub fn central_difference(f: impl Fn(&DMatrix<f64>) -> f64, x: &DMatrix<f64>, d: &DMatrix<f64>, t: f64) -> f64 {
    (f(&(x + d * t)) - f(&(x - d * t))) / (2.0 * t)
}

pub fn rel_err(got: f64, want: f64, scale: f64) -> f64 {
    (got - want).abs() / want.abs().max(scale)
}
