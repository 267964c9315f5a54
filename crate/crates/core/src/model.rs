//! Domain types shared across the crate: the sparse read matrix, the
//! ground-truth haplotype pair, and points and tangent vectors on the
//! manifold of rank-one matrices.

use std::f64::consts::FRAC_2_PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `‖u‖ = ‖v‖ = 1` accepted by [`RankOneFactors::new`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// An allele value at an observed SNP site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Sign of a real number; zero maps to `Plus`.
    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// One observed entry of the read matrix, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: Sign,
}

/// Partially observed `m × n` matrix of ±1 reads.
///
/// Entries are kept sorted row-major and unique, so the observation set Ω
/// is exactly the set of `(row, col)` pairs in `entries()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
}

impl ReadMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<Entry>) -> Result<Self> {
        for e in &entries {
            if e.row >= rows || e.col >= cols {
                return Err(Error::InvalidReadMatrix(format!(
                    "entry ({}, {}) outside {}x{}",
                    e.row, e.col, rows, cols
                )));
            }
        }
        entries.sort_unstable_by_key(|e| (e.row, e.col));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].row, w[0].col) == (w[1].row, w[1].col))
        {
            return Err(Error::InvalidReadMatrix(format!(
                "duplicate entry ({}, {})",
                w[0].row, w[0].col
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a read matrix from a dense `{-1, 0, +1}` matrix, treating
    /// zeros as unobserved.
    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self> {
        let mut entries = Vec::new();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let x = a[(i, j)];
                if x == 0.0 {
                    continue;
                }
                let value = if x == 1.0 {
                    Sign::Plus
                } else if x == -1.0 {
                    Sign::Minus
                } else {
                    return Err(Error::InvalidReadMatrix(format!(
                        "value {x} at ({i}, {j}) is not in {{-1, 0, 1}}"
                    )));
                };
                entries.push(Entry { row: i, col: j, value });
            }
        }
        Self::new(a.nrows(), a.ncols(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// |Ω|.
    pub fn observed(&self) -> usize {
        self.entries.len()
    }

    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.entries
            .binary_search_by_key(&(row, col), |e| (e.row, e.col))
            .is_ok()
    }

    /// Observations per row and per column.
    pub fn counts(&self) -> (Vec<usize>, Vec<usize>) {
        let mut per_row = vec![0; self.rows];
        let mut per_col = vec![0; self.cols];
        for e in &self.entries {
            per_row[e.row] += 1;
            per_col[e.col] += 1;
        }
        (per_row, per_col)
    }

    /// `P_Ω(R)`: observed entries keep their sign, everything else is 0.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.rows, self.cols);
        for e in &self.entries {
            a[(e.row, e.col)] = e.value.value();
        }
        a
    }
}

/// A haplotype: one ±1 value per SNP site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Haplotype(Vec<Sign>);

impl Haplotype {
    pub fn new(values: Vec<Sign>) -> Self {
        Self(values)
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| {
                Sign::from_i64(v).ok_or_else(|| Error::InvalidReadMatrix(format!("haplotype value {v} is not ±1")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Sign] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| s.flip()).collect())
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|s| s.value()))
    }
}

/// The haplotype `h` and per-read strand labels `c` that generate the
/// complete matrix `c hᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub h: Haplotype,
    pub c: Vec<Sign>,
}

impl GroundTruth {
    pub fn new(h: Haplotype, c: Vec<Sign>) -> Self {
        Self { h, c }
    }

    pub fn rows(&self) -> usize {
        self.c.len()
    }

    pub fn cols(&self) -> usize {
        self.h.len()
    }

    pub fn value(&self, row: usize, col: usize) -> Sign {
        self.c[row].times(self.h.values()[col])
    }

    /// The complete rank-one matrix `c hᵀ`.
    pub fn full_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.value(i, j).value())
    }
}

fn unit_basis(len: usize) -> DVector<f64> {
    let mut e = DVector::zeros(len);
    if len > 0 {
        e[0] = 1.0;
    }
    e
}

/// Index of the largest-magnitude entry, lowest index on ties.
pub(crate) fn argmax_abs(x: &DVector<f64>) -> usize {
    let mut best = 0;
    for (k, value) in x.iter().enumerate() {
        if value.abs() > x[best].abs() {
            best = k;
        }
    }
    best
}

/// A point `σ u vᵀ` on the rank-one manifold, kept in factored form.
///
/// `u` and `v` are unit vectors and the largest-magnitude entry of `u` is
/// positive, which makes the factorization unique for `σ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneFactors {
    u: DVector<f64>,
    sigma: f64,
    v: DVector<f64>,
}

impl RankOneFactors {
    pub fn new(mut u: DVector<f64>, sigma: f64, mut v: DVector<f64>) -> Result<Self> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::InvalidFactors("empty factor".into()));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidFactors(format!("sigma = {sigma}")));
        }
        for (name, x) in [("u", &u), ("v", &v)] {
            let norm = x.norm();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidFactors(format!("‖{name}‖ = {norm}")));
            }
        }
        if u[argmax_abs(&u)] < 0.0 {
            u.neg_mut();
            v.neg_mut();
        }
        Ok(Self { u, sigma, v })
    }

    /// Factors of the outer product `a bᵀ`.
    pub fn from_outer(a: &DVector<f64>, b: &DVector<f64>) -> Result<Self> {
        let (na, nb) = (a.norm(), b.norm());
        if na == 0.0 || nb == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Self::new(a / na, na * nb, b / nb)
    }

    /// The `σ = 0` limit point, used to evaluate costs at the origin.
    pub fn zero_limit(rows: usize, cols: usize) -> Self {
        Self {
            u: unit_basis(rows),
            sigma: 0.0,
            v: unit_basis(cols),
        }
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rows(&self) -> usize {
        self.u.len()
    }

    pub fn cols(&self) -> usize {
        self.v.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u.len(), self.v.len())
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.sigma * self.u[row] * self.v[col]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.u * self.sigma * self.v.transpose()
    }

    /// `t X`; a negative factor is absorbed into `v`.
    pub fn scaled(&self, t: f64) -> Self {
        let v = if t < 0.0 { -&self.v } else { self.v.clone() };
        Self {
            u: self.u.clone(),
            sigma: self.sigma * t.abs(),
            v,
        }
    }

    pub(crate) fn check_dims(&self, rows: usize, cols: usize) -> Result<()> {
        if self.dims() != (rows, cols) {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                got: self.dims(),
            });
        }
        Ok(())
    }
}

/// Tangent vector `ξ = M u vᵀ + u_p vᵀ + u v_pᵀ` at a base point `σ u vᵀ`,
/// with `u_p ⊥ u` and `v_p ⊥ v`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub m_scalar: f64,
    pub u_p: DVector<f64>,
    pub v_p: DVector<f64>,
}

impl TangentVector {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            m_scalar: 0.0,
            u_p: DVector::zeros(rows),
            v_p: DVector::zeros(cols),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m_scalar == 0.0 && self.u_p.iter().all(|&x| x == 0.0) && self.v_p.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            m_scalar: t * self.m_scalar,
            u_p: &self.u_p * t,
            v_p: &self.v_p * t,
        }
    }

    /// Dense `m × n` embedding at base point `x`.
    pub fn to_dense(&self, x: &RankOneFactors) -> DMatrix<f64> {
        let u = x.u();
        let v = x.v();
        let u_col = u * self.m_scalar + &self.u_p;
        u_col * v.transpose() + u * self.v_p.transpose()
    }
}

impl std::ops::Neg for TangentVector {
    type Output = TangentVector;

    fn neg(self) -> Self::Output {
        self.scaled(-1.0)
    }
}

/// Unvalidated solver parameters. Convert with [`SolverConfig::new`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Amplitude of the arctan sign surrogate; must stay below 2/π.
    pub gamma1: f64,
    /// Slope of the arctan sign surrogate.
    pub gamma2: f64,
    /// Exponent of the ℓp residual norm, in [1, 2].
    pub p: f64,
    /// Initial Armijo step.
    pub alpha_bar: f64,
    /// Backtracking shrink factor.
    pub beta: f64,
    /// Sufficient-decrease constant.
    pub sigma_armijo: f64,
    /// Stop once the Riemannian gradient norm drops below this.
    pub tau: f64,
    pub max_iters: usize,
    pub max_backtracks: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            gamma1: 0.5,
            gamma2: 2.0,
            p: 1.2,
            alpha_bar: 1.0,
            beta: 0.5,
            sigma_armijo: 1e-4,
            tau: 1e-6,
            max_iters: 2000,
            max_backtracks: 60,
        }
    }
}

/// Validated solver configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SolverConfig(SolverParams);

impl SolverConfig {
    pub fn new(params: SolverParams) -> Result<Self> {
        let SolverParams {
            gamma1,
            gamma2,
            p,
            alpha_bar,
            beta,
            sigma_armijo,
            tau,
            ..
        } = params;
        let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(Error::InvalidConfig(what)) };
        check(
            gamma1 > 0.0 && gamma1 < FRAC_2_PI,
            format!("gamma1 = {gamma1} must lie in (0, 2/π)"),
        )?;
        check(
            gamma2 > 0.0 && gamma2.is_finite(),
            format!("gamma2 = {gamma2} must be positive"),
        )?;
        check((1.0..=2.0).contains(&p), format!("p = {p} must lie in [1, 2]"))?;
        check(
            alpha_bar > 0.0 && alpha_bar.is_finite(),
            format!("alpha_bar = {alpha_bar} must be positive"),
        )?;
        check(beta > 0.0 && beta < 1.0, format!("beta = {beta} must lie in (0, 1)"))?;
        check(
            sigma_armijo > 0.0 && sigma_armijo < 1.0,
            format!("sigma = {sigma_armijo} must lie in (0, 1)"),
        )?;
        check(tau > 0.0, format!("tau = {tau} must be positive"))?;
        Ok(Self(params))
    }

    pub fn params(&self) -> &SolverParams {
        &self.0
    }

    pub fn gamma1(&self) -> f64 {
        self.0.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.0.gamma2
    }

    pub fn p(&self) -> f64 {
        self.0.p
    }

    pub fn alpha_bar(&self) -> f64 {
        self.0.alpha_bar
    }

    pub fn beta(&self) -> f64 {
        self.0.beta
    }

    pub fn sigma_armijo(&self) -> f64 {
        self.0.sigma_armijo
    }

    pub fn tau(&self) -> f64 {
        self.0.tau
    }

    pub fn max_iters(&self) -> usize {
        self.0.max_iters
    }

    pub fn max_backtracks(&self) -> usize {
        self.0.max_backtracks
    }
}
