//! Dirichlet L-functions attached to characters mod a prime Q of degree d.
//!
//! For non-principal chi the L-function is the polynomial
//! L(u, chi) = sum_{n=0}^{d-1} c_n(chi) u^n with c_n(chi) the sum of chi
//! over all monic polynomials of degree n (the sum vanishes for n >= d).
//! The central value is L at u = q^(-1/2) and the zeros of the degree-(d-1)
//! polynomial are expected on the circle |u| = q^(-1/2), apart from the
//! forced zero at u = 1 carried by every even character.
//!
//! Coefficients can be computed two independent ways: a per-character naive
//! sum, and one length-m DFT per degree applied to the discrete-log
//! histogram of monic polynomials. The two routes share no code beyond the
//! character table and are cross-checked in the tests and the verification
//! suite.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dft::Dft;
use crate::residue::CharacterTable;
use crate::sum::{pairwise_sum_complex, NeumaierComplex};
use crate::{Error, Result};

/// Which evaluation route fills the coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Per-character sums over monic polynomials.
    Naive,
    /// One DFT per degree over the discrete-log histogram.
    Dft,
}

/// All coefficients c_n(chi_j) for one modulus: rows n = 0..d-1, columns
/// j = 0..m-1. Column 0 holds the raw principal-character sums, which are
/// q^n rather than L-function data; callers exclude it from statistics.
#[derive(Debug, Clone)]
pub struct LSeriesTable {
    q: u64,
    degree: usize,
    order: u64,
    evens: Vec<bool>,
    inv_sqrt_norm: Vec<f64>,
    coeffs: Vec<Vec<Complex64>>,
}

impl LSeriesTable {
    pub fn build(ct: &CharacterTable, route: Route) -> Self {
        let d = ct.degree();
        let m = ct.order();
        let field = ct.field();
        let coeffs: Vec<Vec<Complex64>> = match route {
            Route::Dft => {
                let plan = Dft::new(m as usize);
                (0..d)
                    .map(|n| {
                        // Monic f with deg f < d is its own residue mod Q.
                        let mut hist = vec![Complex64::new(0.0, 0.0); m as usize];
                        for code in field.monic_code_range(n as u32) {
                            let t = ct.dlog(code).expect("low-degree monic is a unit");
                            hist[t as usize] += 1.0;
                        }
                        plan.transform(&hist)
                    })
                    .collect()
            }
            Route::Naive => {
                let mut rows = vec![vec![Complex64::new(0.0, 0.0); m as usize]; d];
                for n in 0..d {
                    let logs: Vec<u32> = field
                        .monic_code_range(n as u32)
                        .map(|code| ct.dlog(code).expect("low-degree monic is a unit"))
                        .collect();
                    for j in 0..m {
                        let mut acc = NeumaierComplex::new();
                        for &t in &logs {
                            acc.add(ct.root_of_unity(j * t as u64));
                        }
                        rows[n][j as usize] = acc.value();
                    }
                }
                rows
            }
        };
        let inv_sqrt_norm = (0..d).map(|n| (field.pow(n as u32) as f64).sqrt().recip()).collect();
        LSeriesTable {
            q: field.q(),
            degree: d,
            order: m,
            evens: (0..m).map(|j| ct.is_even(j)).collect(),
            inv_sqrt_norm,
            coeffs,
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree d of the modulus.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Character group order m = |Q| - 1.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_even(&self, j: u64) -> bool {
        self.evens[j as usize]
    }

    pub fn coefficient(&self, n: usize, j: u64) -> Complex64 {
        self.coeffs[n][j as usize]
    }

    /// The polynomial coefficients c_0..c_{d-1} of L(u, chi_j).
    pub fn coefficients_for(&self, j: u64) -> Vec<Complex64> {
        (0..self.degree).map(|n| self.coeffs[n][j as usize]).collect()
    }

    /// L(1/2, chi_j) = sum_n c_n q^(-n/2).
    pub fn central_value(&self, j: u64) -> Complex64 {
        let mut acc = NeumaierComplex::new();
        for n in 0..self.degree {
            acc.add(self.coeffs[n][j as usize] * self.inv_sqrt_norm[n]);
        }
        acc.value()
    }

    /// Central values for every character index, principal included.
    pub fn central_values(&self) -> Vec<Complex64> {
        (0..self.order).map(|j| self.central_value(j)).collect()
    }

    /// L(1, chi_j) = sum_n c_n, exactly zero for even non-principal chi.
    pub fn value_at_one(&self, j: u64) -> Complex64 {
        let mut acc = NeumaierComplex::new();
        for n in 0..self.degree {
            acc.add(self.coeffs[n][j as usize]);
        }
        acc.value()
    }

    /// Truncated approximation to |L(1/2)|^2: twice the real part of the
    /// double sum over a + b <= d - 1 of c_a conj(c_b) q^(-(a+b)/2).
    pub fn central_sq_truncated(&self, j: u64) -> f64 {
        let mut acc = NeumaierComplex::new();
        for a in 0..self.degree {
            for b in 0..self.degree - a {
                let term = self.coeffs[a][j as usize]
                    * self.coeffs[b][j as usize].conj()
                    * (self.inv_sqrt_norm[a] * self.inv_sqrt_norm[b]);
                acc.add(term);
            }
        }
        2.0 * acc.value().re
    }

    /// Worst truncation error max_j | truncated - |L|^2 | over j != 0.
    pub fn truncation_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 1..self.order {
            let exact = self.central_value(j).norm_sqr();
            let err = (self.central_sq_truncated(j) - exact).abs();
            worst = worst.max(err);
        }
        worst
    }

    /// Roots of L(u, chi_j), j non-principal.
    pub fn zeros(&self, j: u64) -> Result<ZeroReport> {
        if j == 0 {
            return Err(Error::PrincipalCharacter);
        }
        if j >= self.order {
            return Err(Error::CharIndexRange { index: j, order: self.order });
        }
        let coeffs = self.coefficients_for(j);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        let lead = coeffs.last().copied().unwrap_or_default();
        if lead.norm() <= 1e-6 * scale {
            return Err(Error::Invalid(alloc::format!(
                "leading coefficient vanished for index {j}"
            )));
        }
        let target = (self.q as f64).sqrt().recip();
        let mut roots = polynomial_roots(&coeffs, 1.1 * target);
        roots.sort_by(|a, b| {
            (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite roots")
        });
        let is_even = self.evens[j as usize];
        let (trivial_root, nontrivial) = if is_even {
            let one = Complex64::new(1.0, 0.0);
            let nearest = roots
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (*a - one).norm().partial_cmp(&(*b - one).norm()).expect("finite")
                })
                .map(|(i, _)| i)
                .expect("non-empty root set");
            let trivial = roots.remove(nearest);
            (Some(trivial), roots)
        } else {
            (None, roots)
        };
        let max_radius_deviation = nontrivial
            .iter()
            .map(|z| (z.norm() - target).abs())
            .fold(0.0f64, f64::max);
        Ok(ZeroReport {
            index: j,
            is_even,
            value_at_one: self.value_at_one(j),
            trivial_root,
            nontrivial,
            max_radius_deviation,
        })
    }
}

/// Zero data for one non-principal character.
#[derive(Debug, Clone)]
pub struct ZeroReport {
    pub index: u64,
    pub is_even: bool,
    pub value_at_one: Complex64,
    /// For even characters, the root nearest u = 1 (forced there exactly).
    pub trivial_root: Option<Complex64>,
    pub nontrivial: Vec<Complex64>,
    /// max over nontrivial roots of | |u| - q^(-1/2) |.
    pub max_radius_deviation: f64,
}

/// Direct single-coefficient evaluation, valid for any degree n (including
/// n >= d, where non-principal sums vanish). Reduces each monic mod Q, so
/// it is independent of the table construction above.
pub fn coefficient_direct(ct: &CharacterTable, n: u32, j: u64) -> Complex64 {
    let field = ct.field();
    let terms: Vec<Complex64> = field
        .monic_code_range(n)
        .map(|code| {
            let f = field.decode(code).expect("range codes are monic");
            ct.eval(j, &f)
        })
        .collect();
    pairwise_sum_complex(&terms)
}

fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn eval_poly_deriv(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * k as f64;
    }
    acc
}

/// All roots of a complex polynomial given by ascending coefficients with
/// non-negligible leading term. Degree <= 2 is closed form; otherwise
/// Durand-Kerner from a deterministic circle of radius `init_radius`,
/// finished with a few Newton steps per root.
fn polynomial_roots(coeffs: &[Complex64], init_radius: f64) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    match deg {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => {
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            // Pick the sign that avoids cancellation in -b -+ disc.
            let s = if (b + disc).norm() >= (b - disc).norm() { disc } else { -disc };
            let r1 = (-b - s) / (2.0 * a);
            let r2 = c / (a * r1);
            vec![r1, r2]
        }
        _ => {
            let lead = *coeffs.last().unwrap();
            let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
            let mut z: Vec<Complex64> = (0..deg)
                .map(|k| {
                    let theta =
                        core::f64::consts::TAU * (k as f64 + 0.25) / deg as f64;
                    init_radius * Complex64::new(theta.cos(), theta.sin())
                })
                .collect();
            for _ in 0..200 {
                let mut moved = 0.0f64;
                for k in 0..deg {
                    let mut den = Complex64::new(1.0, 0.0);
                    for l in 0..deg {
                        if l != k {
                            den *= z[k] - z[l];
                        }
                    }
                    let delta = eval_poly(&monic, z[k]) / den;
                    z[k] -= delta;
                    moved = moved.max(delta.norm());
                }
                if moved < 1e-14 {
                    break;
                }
            }
            for r in z.iter_mut() {
                for _ in 0..3 {
                    let dp = eval_poly_deriv(&monic, *r);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    *r -= eval_poly(&monic, *r) / dp;
                }
            }
            z
        }
    }
}
