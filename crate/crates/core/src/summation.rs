//! Fixed-order pairwise summation.

use num_complex::Complex64;

const LEAF: usize = 8;

/// Sum with a fixed binary tree; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().fold(0.0, |acc, x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= LEAF {
        return xs.iter().fold(Complex64::new(0.0, 0.0), |acc, x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}
