//! Discrete Fourier transforms of arbitrary length.
//!
//! Convention: the forward transform uses the positive exponent,
//! X[j] = sum_t x[t] e^(+2 pi i j t / n), matching character sums
//! chi_j(g^t) = e^(2 pi i j t / m) so that transforming the sequence
//! indexed by discrete logs evaluates all characters at once.
//!
//! Power-of-two lengths run straight radix-2; everything else goes through
//! Bluestein's chirp-z reduction to a power-of-two cyclic convolution. The
//! chirp phases use exact integer arithmetic (t^2 mod 2n) so no accuracy is
//! lost at large indices. [`naive_transform`] is the quadratic reference
//! implementation the fast path is tested against and that callers use for
//! independent cross-checks.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// A planned transform of fixed length.
#[derive(Debug, Clone)]
pub struct Dft {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Pow2 {
        twiddles: Vec<Complex64>,
    },
    Bluestein {
        len: usize,
        chirp: Vec<Complex64>,
        b_hat: Vec<Complex64>,
        twiddles: Vec<Complex64>,
    },
}

impl Dft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        if n.is_power_of_two() {
            return Dft { n, kind: Kind::Pow2 { twiddles: forward_twiddles(n) } };
        }
        let len = (2 * n - 1).next_power_of_two();
        let chirp: Vec<Complex64> = (0..n)
            .map(|t| {
                // e^(i pi t^2 / n), reduced exactly: t^2 mod 2n keeps the
                // angle in [0, 2 pi) without floating-point wraparound.
                let r = (t as u64 * t as u64) % (2 * n as u64);
                let theta = PI * r as f64 / n as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let twiddles = forward_twiddles(len);
        let mut b = vec![Complex64::new(0.0, 0.0); len];
        b[0] = Complex64::new(1.0, 0.0);
        for k in 1..n {
            let v = chirp[k].conj();
            b[k] = v;
            b[len - k] = v;
        }
        fft_in_place(&mut b, &twiddles, false);
        Dft { n, kind: Kind::Bluestein { len, chirp, b_hat: b, twiddles } }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Forward transform; input length must equal the planned length.
    pub fn transform(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        match &self.kind {
            Kind::Pow2 { twiddles } => {
                let mut buf = x.to_vec();
                fft_in_place(&mut buf, twiddles, false);
                buf
            }
            Kind::Bluestein { len, chirp, b_hat, twiddles } => {
                let mut a = vec![Complex64::new(0.0, 0.0); *len];
                for t in 0..self.n {
                    a[t] = x[t] * chirp[t];
                }
                fft_in_place(&mut a, twiddles, false);
                for (av, bv) in a.iter_mut().zip(b_hat) {
                    *av *= bv;
                }
                fft_in_place(&mut a, twiddles, true);
                (0..self.n).map(|j| chirp[j] * a[j]).collect()
            }
        }
    }
}

/// Quadratic-time reference transform, same positive-exponent convention.
/// Each phase comes from the exactly reduced product (j*t) mod n.
pub fn naive_transform(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &xt) in x.iter().enumerate() {
                let r = (j as u64 * t as u64) % n as u64;
                let theta = 2.0 * PI * r as f64 / n as f64;
                acc += xt * Complex64::new(theta.cos(), theta.sin());
            }
            acc
        })
        .collect()
}

/// e^(+2 pi i k / n) for k < n/2 (the rest follow by symmetry inside the
/// butterfly loop).
fn forward_twiddles(n: usize) -> Vec<Complex64> {
    (0..n / 2)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn fft_in_place(buf: &mut [Complex64], twiddles: &[Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    debug_assert!(n.is_power_of_two());
    // Bit-reversal permutation.
    let shift = n.leading_zeros() + 1;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let mut w = twiddles[k * step];
                if inverse {
                    w = w.conj();
                }
                let t = w * buf[start + half + k];
                buf[start + half + k] = buf[start + k] - t;
                buf[start + k] += t;
            }
        }
        len *= 2;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Deterministic pseudo-random vector for fixed-length checks.
    fn lcg_vector(n: usize, mut seed: u64) -> Vec<Complex64> {
        (0..n)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = ((seed >> 33) as f64) / (1u64 << 31) as f64 - 1.0;
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = ((seed >> 33) as f64) / (1u64 << 31) as f64 - 1.0;
                Complex64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn frozen_length_four() {
        let x: Vec<Complex64> =
            [1.0, 2.0, 3.0, 4.0].iter().map(|&r| Complex64::new(r, 0.0)).collect();
        let out = Dft::new(4).transform(&x);
        assert!(close(out[0], Complex64::new(10.0, 0.0), 1e-12));
        assert!(close(out[1], Complex64::new(-2.0, -2.0), 1e-12));
        assert!(close(out[2], Complex64::new(-2.0, 0.0), 1e-12));
        assert!(close(out[3], Complex64::new(-2.0, 2.0), 1e-12));
    }

    #[test]
    fn matches_naive_across_lengths() {
        for n in (1..=24).chain([26, 31, 32, 60, 127, 128]) {
            let x = lcg_vector(n, 0x9e3779b97f4a7c15 ^ n as u64);
            let fast = Dft::new(n).transform(&x);
            let slow = naive_transform(&x);
            for (f, s) in fast.iter().zip(&slow) {
                assert!(close(*f, *s, 1e-9 * (n as f64)), "length {n}");
            }
        }
    }

    #[test]
    fn delta_and_constant_vectors() {
        let n = 12;
        let mut delta = vec![Complex64::new(0.0, 0.0); n];
        delta[0] = Complex64::new(1.0, 0.0);
        for v in Dft::new(n).transform(&delta) {
            assert!(close(v, Complex64::new(1.0, 0.0), 1e-12));
        }
        let ones = vec![Complex64::new(1.0, 0.0); n];
        let out = Dft::new(n).transform(&ones);
        assert!(close(out[0], Complex64::new(n as f64, 0.0), 1e-10));
        for v in &out[1..] {
            assert!(close(*v, Complex64::new(0.0, 0.0), 1e-10));
        }
    }

    proptest! {
        #[test]
        fn parseval_identity(n in 1usize..40, seed in any::<u64>()) {
            let x = lcg_vector(n, seed);
            let out = Dft::new(n).transform(&x);
            let input_energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let output_energy: f64 = out.iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((output_energy / n as f64 - input_energy).abs() < 1e-9 * (1.0 + input_energy));
        }

        #[test]
        fn transform_is_linear(n in 2usize..20, s1 in any::<u64>(), s2 in any::<u64>()) {
            let x = lcg_vector(n, s1);
            let y = lcg_vector(n, s2);
            let plan = Dft::new(n);
            let sum_xy: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = plan.transform(&sum_xy);
            let fx = plan.transform(&x);
            let fy = plan.transform(&y);
            for j in 0..n {
                prop_assert!(close(lhs[j], fx[j] + fy[j], 1e-9 * n as f64));
            }
        }
    }
}
