//! Deterministic summation helpers.
//!
//! Every reduction in this crate happens in a fixed order so that reruns
//! (and reruns under different thread counts, which reduce over the same
//! index-ordered buffers) reproduce results bit for bit.

use alloc::vec::Vec;
use num_complex::Complex64;

/// Neumaier-compensated accumulator for streaming sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated streaming sum of complex terms (per-component Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierComplex {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Pairwise sum of a slice, splitting at the midpoint.
///
/// The recursion shape depends only on the slice length, so the result is a
/// pure function of the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut acc = Neumaier::new();
        for &x in xs {
            acc.add(x);
        }
        return acc.value();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of complex terms.
pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        let mut acc = NeumaierComplex::new();
        for &x in xs {
            acc.add(x);
        }
        return acc.value();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}

/// Maps each index to a term, collects in index order, then reduces pairwise.
pub fn sum_indexed<F: FnMut(usize) -> f64>(n: usize, mut term: F) -> f64 {
    let terms: Vec<f64> = (0..n).map(|i| term(i)).collect();
    pairwise_sum(&terms)
}
