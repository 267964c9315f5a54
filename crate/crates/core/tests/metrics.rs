mod common;

use common::*;
use haplo_core::datagen::{generate, InstanceSpec};
use haplo_core::metrics::{hamming_row, haplotype_distance, mec, sign_discrepancy, SignDiscrepancy};
use haplo_core::{Haplotype, RankOneFactors, ReadMatrix, Sign};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const REFERENCE_TRUTH: [f64; 15] = [
    1.0, -1.0, 1.0, -1.0, -1.0, //
    1.0, -1.0, 1.0, -1.0, -1.0, //
    1.0, -1.0, 1.0, -1.0, -1.0,
];

const REFERENCE_OBSERVED: [f64; 15] = [
    1.0, 0.0, 1.0, -1.0, 1.0, //
    -1.0, -1.0, 1.0, -1.0, -1.0, //
    1.0, -1.0, -1.0, -1.0, -1.0,
];

fn h1() -> Haplotype {
    Haplotype::from_i64(&[1, -1, 1, -1, -1]).unwrap()
}

fn h2() -> Haplotype {
    Haplotype::from_i64(&[1, -1, -1, -1, -1]).unwrap()
}

#[test]
fn example_matrices_match_the_reference_ones() {
    assert_eq!(
        example_truth().full_matrix(),
        DMatrix::from_row_slice(3, 5, &REFERENCE_TRUTH)
    );
    assert_eq!(
        example_reads().dense(),
        DMatrix::from_row_slice(3, 5, &REFERENCE_OBSERVED)
    );
    assert!(!example_reads().is_observed(0, 1));
    assert_eq!(example_reads().observed(), 14);
}

#[test]
fn example_flipped_entries() {
    let truth = example_truth().full_matrix();
    let rm = example_reads();
    let flipped: Vec<(usize, usize)> = rm
        .entries()
        .iter()
        .filter(|e| e.value.value() != truth[(e.row, e.col)])
        .map(|e| (e.row, e.col))
        .collect();
    assert_eq!(flipped, vec![(0, 4), (1, 0), (2, 2)]);
}

#[test]
fn example_counts() {
    let rm = example_reads();
    assert_eq!(hamming_row(&rm, 0, &h1()).unwrap(), 1);
    assert_eq!(mec(&rm, &h1()).unwrap(), 3);
    assert_eq!(haplotype_distance(&h1(), &h2()).unwrap(), 1);
}

#[test]
fn example_sign_discrepancies() {
    let rm = example_reads();
    let one = RankOneFactors::from_outer(
        &DVector::from_vec(vec![0.763, 1.0, 1.0]),
        &DVector::from_vec(vec![0.2955, -1.0, 0.2955, -1.07, -0.479]),
    )
    .unwrap();
    assert_eq!(
        sign_discrepancy(&rm, &one).unwrap(),
        SignDiscrepancy { count: 3, zeros: 0 }
    );
    for (eps, gamma) in [(1e-3, 1e-3), (1e-9, 1e-6)] {
        let two = RankOneFactors::from_outer(
            &DVector::from_vec(vec![-eps, 1.0, 1.0]),
            &DVector::from_vec(vec![gamma, -0.9975, -gamma, -0.9975, -0.9975]),
        )
        .unwrap();
        assert_eq!(
            sign_discrepancy(&rm, &two).unwrap(),
            SignDiscrepancy { count: 4, zeros: 0 }
        );
    }
}

#[test]
fn empty_row_has_no_mismatches() {
    let rm = ReadMatrix::new(2, 5, vec![]).unwrap();
    assert_eq!(hamming_row(&rm, 1, &h1()).unwrap(), 0);
}

#[test]
fn sign_discrepancy_checks_dimensions() {
    let x = RankOneFactors::from_outer(&DVector::from_element(2, 1.0), &DVector::from_element(2, 1.0)).unwrap();
    assert!(matches!(
        sign_discrepancy(&example_reads(), &x),
        Err(haplo_core::Error::DimensionMismatch { .. })
    ));
}

fn haplotype(bits: &[bool]) -> Haplotype {
    Haplotype::new(bits.iter().map(|&b| if b { Sign::Plus } else { Sign::Minus }).collect())
}

proptest! {
    #[test]
    fn mec_is_bounded_and_sign_symmetric(seed in any::<u64>(), m in 1usize..15, n in 1usize..15, bits in proptest::collection::vec(any::<bool>(), 15)) {
        let rm = random_reads(&mut rng(seed), m, n, 0.5);
        let h = haplotype(&bits[..n]);
        let total: usize = (0..m).map(|i| hamming_row(&rm, i, &h).unwrap()).sum();
        let value = mec(&rm, &h).unwrap();
        prop_assert!(value <= total);
        prop_assert_eq!(value, mec(&rm, &h.negated()).unwrap());
    }

    #[test]
    fn distance_is_a_sign_invariant_pseudometric(a in proptest::collection::vec(any::<bool>(), 1..20), seed in any::<u64>()) {
        let n = a.len();
        let mut r = rng(seed);
        let b: Vec<bool> = (0..n).map(|_| rand::Rng::random_bool(&mut r, 0.5)).collect();
        let c: Vec<bool> = (0..n).map(|_| rand::Rng::random_bool(&mut r, 0.5)).collect();
        let (a, b, c) = (haplotype(&a), haplotype(&b), haplotype(&c));
        let d = |x: &Haplotype, y: &Haplotype| haplotype_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &a.negated()), 0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b), d(&a.negated(), &b));
        prop_assert_eq!(d(&a, &b), d(&a, &b.negated()));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert!(d(&a, &b) <= n / 2);
    }

    #[test]
    fn clean_samples_have_no_errors(seed in any::<u64>(), m in 1usize..20, n in 1usize..20, pd in 0.2f64..1.0) {
        let inst = generate(&InstanceSpec { m, n, pd, err_ratio: 0.0, seed }).unwrap();
        prop_assert_eq!(mec(&inst.rm, &inst.gt.h).unwrap(), 0);
        let c = DVector::from_iterator(m, inst.gt.c.iter().map(|s| s.value()));
        let exact = RankOneFactors::from_outer(&c, &inst.gt.h.to_vector()).unwrap();
        prop_assert_eq!(sign_discrepancy(&inst.rm, &exact).unwrap().count, 0);
    }
}
