//! Evaluation quantities. Counts are exact integers; only NMSE is a float.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{Haplotype, RankOneFactors, ReadMatrix, Sign};

/// Mismatches between the observed entries of row `i` and `h`.
pub fn hamming_row(rm: &ReadMatrix, i: usize, h: &Haplotype) -> Result<usize> {
    if i >= rm.rows() {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: rm.rows(),
        });
    }
    check_len(rm.cols(), h.len())?;
    Ok(row_mismatches(rm, h)[i].0)
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

/// Per row: (mismatches against `h`, mismatches against `−h`).
fn row_mismatches(rm: &ReadMatrix, h: &Haplotype) -> Vec<(usize, usize)> {
    let hv = h.values();
    let mut out = vec![(0, 0); rm.rows()];
    for e in rm.entries() {
        if e.value == hv[e.col] {
            out[e.row].1 += 1;
        } else {
            out[e.row].0 += 1;
        }
    }
    out
}

/// `Σ_i min(hd(r_i, h), hd(r_i, −h))`.
pub fn mec(rm: &ReadMatrix, h: &Haplotype) -> Result<usize> {
    check_len(rm.cols(), h.len())?;
    Ok(row_mismatches(rm, h).into_iter().map(|(a, b)| a.min(b)).sum())
}

/// Hamming distance minimized over the global sign of the estimate.
pub fn haplotype_distance(h_true: &Haplotype, h_est: &Haplotype) -> Result<usize> {
    check_len(h_true.len(), h_est.len())?;
    let differ = h_true
        .values()
        .iter()
        .zip(h_est.values())
        .filter(|(a, b)| a != b)
        .count();
    Ok(differ.min(h_true.len() - differ))
}

/// `‖R̄ − R̂‖_F² / ‖R̄‖_F²`.
pub fn nmse(r_true: &DMatrix<f64>, r_est: &DMatrix<f64>) -> Result<f64> {
    if r_true.shape() != r_est.shape() {
        return Err(Error::DimensionMismatch {
            expected: r_true.shape(),
            got: r_est.shape(),
        });
    }
    let denom = r_true.norm_squared();
    if denom == 0.0 {
        return Err(Error::ZeroTruth);
    }
    Ok((r_true - r_est).norm_squared() / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignDiscrepancy {
    /// Observed entries where `sign(x_ij) ≠ r_ij`, zeros included.
    pub count: usize,
    /// Observed entries where `x_ij = 0`.
    pub zeros: usize,
}

/// `‖P_Ω(sign(X)) − P_Ω(R)‖₀`.
pub fn sign_discrepancy(rm: &ReadMatrix, x: &RankOneFactors) -> Result<SignDiscrepancy> {
    x.check_dims(rm.rows(), rm.cols())?;
    let mut out = SignDiscrepancy { count: 0, zeros: 0 };
    for e in rm.entries() {
        let xij = x.entry(e.row, e.col);
        if xij == 0.0 {
            out.zeros += 1;
            out.count += 1;
        } else if Sign::of(xij) != e.value {
            out.count += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Entry;

    fn h() -> Haplotype {
        Haplotype::from_i64(&[1, -1, 1, -1, -1]).unwrap()
    }

    #[test]
    fn hamming_row_edge_cases() {
        let rm = ReadMatrix::new(
            2,
            5,
            vec![
                Entry {
                    row: 1,
                    col: 0,
                    value: Sign::Plus,
                },
                Entry {
                    row: 1,
                    col: 1,
                    value: Sign::Minus,
                },
                Entry {
                    row: 1,
                    col: 4,
                    value: Sign::Minus,
                },
            ],
        )
        .unwrap();
        assert_eq!(hamming_row(&rm, 0, &h()).unwrap(), 0);
        assert_eq!(hamming_row(&rm, 1, &h()).unwrap(), 0);
        assert_eq!(hamming_row(&rm, 1, &h().negated()).unwrap(), 3);
        assert!(matches!(hamming_row(&rm, 2, &h()), Err(Error::IndexOutOfRange { .. })));
        let short = Haplotype::from_i64(&[1]).unwrap();
        assert!(matches!(hamming_row(&rm, 0, &short), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn haplotype_distance_is_sign_invariant() {
        assert_eq!(haplotype_distance(&h(), &h()).unwrap(), 0);
        assert_eq!(haplotype_distance(&h(), &h().negated()).unwrap(), 0);
        let h2 = Haplotype::from_i64(&[1, -1, -1, -1, -1]).unwrap();
        assert_eq!(haplotype_distance(&h(), &h2).unwrap(), 1);
        assert!(haplotype_distance(&h(), &Haplotype::from_i64(&[1]).unwrap()).is_err());
    }

    #[test]
    fn nmse_reference_values() {
        let r = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(nmse(&r, &r).unwrap(), 0.0);
        assert_eq!(nmse(&r, &(-&r)).unwrap(), 4.0);
        assert_eq!(nmse(&r, &DMatrix::zeros(2, 2)).unwrap(), 1.0);
        assert_eq!(nmse(&DMatrix::zeros(2, 2), &r), Err(Error::ZeroTruth));
        assert!(matches!(
            nmse(&r, &DMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_entries_count_as_discrepancies() {
        let rm = ReadMatrix::new(
            1,
            2,
            vec![Entry {
                row: 0,
                col: 0,
                value: Sign::Plus,
            }],
        )
        .unwrap();
        let x = RankOneFactors::zero_limit(1, 2);
        assert_eq!(
            sign_discrepancy(&rm, &x).unwrap(),
            SignDiscrepancy { count: 1, zeros: 1 }
        );
    }
}
