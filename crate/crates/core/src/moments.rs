//! Moment sums of central values and the tail measure of large values.
//!
//! M_k = sum over non-principal chi of |L(1/2, chi)|^(2k), normalized by
//! phi_star * d^(k^2) (log base q of |Q| is exactly d, so the normalization
//! is free of transcendental noise). Orthogonality gives closed forms for
//! the k = 1/2-ish low moments: with S = (q^(d/2) - 1)/(sqrt(q) - 1),
//! sum of L is (|Q|-1) - S and sum of |L|^2 is (|Q|-1) d - S^2, because the
//! monic polynomials of degree < d are distinct and invertible mod Q. Those
//! two identities are the end-to-end oracle for the whole pipeline.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ffpoly::{Field, PrimeTables};
use crate::lseries::{LSeriesTable, Route};
use crate::residue::CharacterTable;
use crate::sum::Neumaier;
use crate::{Error, Result};

/// Sum of |L_j|^(2k) over j != 0, compensated, in index order. The slice
/// is indexed by character: entry 0 is the principal column and is skipped.
/// Vanishing central values contribute 0 for k > 0 and 1 for k = 0; other
/// powers go through exp(2k log|L|). k = 1 takes the exact product path so
/// that weighted variants with unit weights reproduce it bit for bit.
pub fn moment(values: &[Complex64], k: f64) -> Result<f64> {
    if k < 0.0 {
        return Err(Error::NegativeMomentOrder);
    }
    let mut acc = Neumaier::new();
    for v in &values[1..] {
        let ns = v.norm_sqr();
        if k == 0.0 {
            acc.add(1.0);
        } else if ns == 0.0 {
            // skip
        } else if k == 1.0 {
            acc.add(ns);
        } else {
            acc.add((k * ns.ln()).exp());
        }
    }
    Ok(acc.value())
}

/// r_k = M_k / (phi_star * d^(k^2)).
pub fn moment_ratio(m_k: f64, phi_star: u64, degree: usize, k: f64) -> f64 {
    m_k / (phi_star as f64 * (degree as f64).powf(k * k))
}

/// Exact values of the first two central-value sums over j != 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowMomentOracles {
    /// sum L_j = (|Q|-1) - S.
    pub first: f64,
    /// sum |L_j|^2 = (|Q|-1) d - S^2.
    pub second: f64,
}

pub fn exact_low_moment_oracles(q: u64, degree: usize) -> LowMomentOracles {
    let m = (q.pow(degree as u32) - 1) as f64;
    let sq = (q as f64).sqrt();
    let s = (sq.powi(degree as i32) - 1.0) / (sq - 1.0);
    LowMomentOracles { first: m - s, second: m * degree as f64 - s * s }
}

/// Closed form for the k = 1 ratio: ((|Q|-1) d - S^2) / ((|Q|-2) d).
pub fn oracle_ratio_k1(q: u64, degree: usize) -> f64 {
    let phi_star = q.pow(degree as u32) - 2;
    moment_ratio(exact_low_moment_oracles(q, degree).second, phi_star, degree, 1.0)
}

/// Large-value regime boundaries, in the notation lam2 = log log |Q|,
/// lam3 = log lam2 (natural logs). Only meaningful when lam2 > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBoundaries {
    /// 10 sqrt(lam2): start of the Gaussian-decay range.
    pub gaussian_lo: f64,
    /// lam2: end of the Gaussian-decay range.
    pub gaussian_hi: f64,
    /// lam2 * lam3 / 4: end of the intermediate range.
    pub intermediate_hi: f64,
    /// 6 log|Q| / lam2: counts vanish identically beyond this point.
    pub vanishing_hi: f64,
}

/// Exact counts of large central values over a grid of thresholds.
#[derive(Debug, Clone)]
pub struct TailHistogram {
    pub v_grid: Vec<f64>,
    /// #{ j != 0 : log|L_j| >= V }.
    pub counts: Vec<u64>,
    /// phi_star * P(N(0, lam2) >= V): the Gaussian reference tail with
    /// variance log log |Q| (report-only, nothing is asserted against it).
    pub gaussian_reference: Vec<f64>,
    pub max_log_l: f64,
    /// None when log log |Q| <= 1 (regime classification suppressed for
    /// the smallest moduli).
    pub regimes: Option<RegimeBoundaries>,
    /// 6 log|Q| / log log |Q|: the threshold beyond which no character may
    /// survive.
    pub hard_cutoff: f64,
    /// Characters with log|L| above the hard cutoff, if any.
    pub offenders: Vec<u64>,
}

/// Scans log|L_j| over j != 0 against a strictly increasing grid.
pub fn tail(values: &[Complex64], q: u64, degree: usize, v_grid: &[f64]) -> Result<TailHistogram> {
    if v_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::GridNotIncreasing);
    }
    let logs: Vec<f64> = values[1..]
        .iter()
        .map(|v| {
            let ns = v.norm_sqr();
            if ns == 0.0 {
                f64::NEG_INFINITY
            } else {
                0.5 * ns.ln()
            }
        })
        .collect();
    let max_log_l = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let counts: Vec<u64> =
        v_grid.iter().map(|&v| logs.iter().filter(|&&l| l >= v).count() as u64).collect();
    let log_norm = degree as f64 * (q as f64).ln();
    let lam2 = log_norm.ln();
    let phi_star = (values.len() - 2) as f64;
    let gaussian_reference = v_grid
        .iter()
        .map(|&v| {
            if lam2 <= 0.0 {
                0.0
            } else {
                phi_star * 0.5 * libm::erfc(v / (2.0 * lam2).sqrt())
            }
        })
        .collect();
    let regimes = if lam2 > 1.0 {
        let lam3 = lam2.ln();
        Some(RegimeBoundaries {
            gaussian_lo: 10.0 * lam2.sqrt(),
            gaussian_hi: lam2,
            intermediate_hi: lam2 * lam3 / 4.0,
            vanishing_hi: 6.0 * log_norm / lam2,
        })
    } else {
        None
    };
    let hard_cutoff = 6.0 * log_norm / lam2;
    let offenders = logs
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > hard_cutoff)
        .map(|(i, _)| (i + 1) as u64)
        .collect();
    Ok(TailHistogram {
        v_grid: v_grid.to_vec(),
        counts,
        gaussian_reference,
        max_log_l,
        regimes,
        hard_cutoff,
        offenders,
    })
}

/// One degree's worth of the growth experiment: moments and normalized
/// ratios at the lowest-code prime modulus of that degree.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub degree: usize,
    pub modulus_code: u64,
    pub phi_star: u64,
    pub moments: Vec<f64>,
    pub ratios: Vec<f64>,
}

pub fn growth_row(
    field: Field,
    tables: &mut PrimeTables,
    degree: usize,
    k_list: &[f64],
    route: Route,
) -> Result<GrowthRow> {
    let modulus = tables.lowest_prime_of_degree(degree);
    let modulus_code = field.encode(&modulus);
    let ct = CharacterTable::new(field, modulus, tables)?;
    let ls = LSeriesTable::build(&ct, route);
    let values = ls.central_values();
    let phi_star = ct.phi_star();
    let mut moments = Vec::with_capacity(k_list.len());
    let mut ratios = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let m_k = moment(&values, k)?;
        moments.push(m_k);
        ratios.push(moment_ratio(m_k, phi_star, degree, k));
    }
    Ok(GrowthRow { degree, modulus_code, phi_star, moments, ratios })
}
