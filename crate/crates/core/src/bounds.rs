//! Upper-bound machinery for log|L(1/2, chi)|: windowed prime-sum proxies,
//! an exact mean-value identity over the full character group, and the
//! segmentation of characters by the sizes of their block sums.
//!
//! Cutoffs x are carried as exact exponent fractions x = |Q|^(num/den), so
//! window membership (|P| <= x means n*den <= d*num) and the polynomial
//! weights log(x/|P|)/log x = (d*num - n*den)/(d*num) are decided in integer
//! arithmetic; only the final coefficients are floating point.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ffpoly::{MonicPoly, PrimeTables};
use crate::lseries::LSeriesTable;
use crate::mollifier::truncated_exp;
use crate::residue::CharacterTable;
use crate::sum::{Neumaier, NeumaierComplex};
use crate::{Error, Result};

/// Cutoff x = |Q|^(num/den) plus the choice between the two proxy forms:
/// with the prime-square sum, or primes only (valid off the real character).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProxyParams {
    pub x_num: u64,
    pub x_den: u64,
    pub include_squares: bool,
}

impl ProxyParams {
    fn validate(&self, q: u64, degree: usize) -> Result<()> {
        if self.x_num == 0 || self.x_den == 0 || self.x_num > self.x_den {
            return Err(Error::CutoffOutOfRange);
        }
        // x >= 2: d * (num/den) * ln q >= ln 2.
        let ln_x = degree as f64 * self.x_num as f64 / self.x_den as f64 * (q as f64).ln();
        if ln_x < core::f64::consts::LN_2 {
            return Err(Error::CutoffOutOfRange);
        }
        Ok(())
    }
}

/// The prime-sum upper-bound proxy for log|L(1/2, chi_j)|, excluding the
/// bounded additive constant that is fitted downstream: real part of the
/// weighted prime sum (plus the prime-square sum when requested) plus
/// log|Q|/log x = den/num.
pub fn proxy_log_bound(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    j: u64,
    params: &ProxyParams,
) -> Result<f64> {
    ct.check_index(j)?;
    if j == 0 {
        return Err(Error::PrincipalCharacter);
    }
    params.validate(ct.field().q(), ct.degree())?;
    let q = ct.field().q();
    let d = ct.degree() as u64;
    let (num, den) = (params.x_num, params.x_den);
    let lnq = (q as f64).ln();
    let ln_x = d as f64 * num as f64 / den as f64 * lnq;
    let m = ct.order();

    let mut acc = NeumaierComplex::new();
    let n_max = (d * num / den) as usize;
    tables.build_to(n_max);
    let beta = 0.5 + ln_x.recip();
    for n in 1..=n_max as u64 {
        if n * den > d * num {
            break;
        }
        let weight = (d * num - n * den) as f64 / (d * num) as f64;
        let coef = (-beta * n as f64 * lnq).exp() * weight;
        for p in tables.get(n as usize).expect("built") {
            let t = match ct.reduce_dlog(p) {
                Some(t) => t as u64,
                None => continue, // P = Q contributes nothing
            };
            acc.add(ct.root_of_unity(j * t % m) * coef);
        }
    }
    if params.include_squares {
        let beta2 = 1.0 + 2.0 * ln_x.recip();
        let n_sq_max = (d * num / (2 * den)) as usize;
        for n in 1..=n_sq_max as u64 {
            if 2 * n * den > d * num {
                break;
            }
            let weight = (d * num - 2 * n * den) as f64 / (2 * d * num) as f64;
            let coef = (-beta2 * n as f64 * lnq).exp() * weight;
            for p in tables.get(n as usize).expect("built") {
                let t = match ct.reduce_dlog(p) {
                    Some(t) => t as u64,
                    None => continue,
                };
                acc.add(ct.root_of_unity(j * (2 * t % m) % m) * coef);
            }
        }
    }
    Ok(acc.value().re + den as f64 / num as f64)
}

/// Per-character slack of the proxy over the true log-value.
#[derive(Debug, Clone)]
pub struct ProxySweep {
    /// (character index, proxy - log|L|) in index order.
    pub deficits: Vec<(u64, f64)>,
    pub min_deficit: f64,
    /// The fitted additive constant: max(0, -min_deficit).
    pub fitted_c: f64,
}

/// Sweeps proxy - log|L_j| over non-principal j. The primes-only form
/// skips the real character (the one j with chi_j^2 principal).
pub fn proxy_deficit_sweep(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    ls: &LSeriesTable,
    params: &ProxyParams,
) -> Result<ProxySweep> {
    let real = ct.real_character();
    let mut deficits = Vec::new();
    let mut min_deficit = f64::INFINITY;
    for j in 1..ct.order() {
        if !params.include_squares && Some(j) == real {
            continue;
        }
        let proxy = proxy_log_bound(ct, tables, j, params)?;
        let ns = ls.central_value(j).norm_sqr();
        let log_l = if ns == 0.0 { f64::NEG_INFINITY } else { 0.5 * ns.ln() };
        let deficit = proxy - log_l;
        min_deficit = min_deficit.min(deficit);
        deficits.push((j, deficit));
    }
    Ok(ProxySweep { deficits, min_deficit, fitted_c: (-min_deficit).max(0.0) })
}

/// Result of the mean-value identity check at one (m, y) configuration.
#[derive(Debug, Clone, Copy)]
pub struct MeanValueRecord {
    /// sum over all characters of |sum_P a(P) chi(P)/sqrt|P||^(2m).
    pub lhs: f64,
    /// phi(Q) times the diagonal sum of |a_{m,y}(f)|^2/|f| over products of
    /// exactly m primes, via the multinomial expansion.
    pub rhs_exact: f64,
    /// |Q| m! (sum |a(P)|^2/|P|)^m.
    pub rhs_bound: f64,
    /// lhs == rhs_exact within 1e-9 relative.
    pub diagonal_ok: bool,
    /// lhs <= rhs_bound within 1e-9 relative.
    pub bound_ok: bool,
}

/// Both sides of the mean-value identity, computed by genuinely different
/// routes: the left side sums character values directly, the right side
/// never touches a character. The modulus itself is excluded from the prime
/// set (its character values vanish identically, so including it on the
/// diagonal would break the identity at y = |Q|).
pub fn mean_value_check<F>(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    m_power: u32,
    y_degree: u32,
    a_of: F,
) -> Result<MeanValueRecord>
where
    F: Fn(&MonicPoly) -> Complex64,
{
    assert!(m_power >= 1 && y_degree >= 1);
    let d = ct.degree() as u32;
    if y_degree * m_power > d {
        let q = ct.field().q();
        return Err(Error::HypothesisViolated {
            y_pow_m: q.checked_pow(y_degree * m_power).unwrap_or(u64::MAX),
            modulus_norm: ct.field().pow(d),
        });
    }
    let field = ct.field();
    let q = field.q();
    let m = ct.order();
    tables.build_to(y_degree as usize);

    // (a(P), dlog, degree) per admitted prime.
    let mut primes: Vec<(Complex64, u64, u32)> = Vec::new();
    for n in 1..=y_degree as usize {
        for p in tables.get(n).expect("built") {
            let t = match ct.reduce_dlog(p) {
                Some(t) => t as u64,
                None => continue,
            };
            primes.push((a_of(p), t, n as u32));
        }
    }

    let mut lhs_acc = Neumaier::new();
    for j in 0..m {
        let mut inner = NeumaierComplex::new();
        for &(a, t, n) in &primes {
            let inv_sqrt = (field.pow(n) as f64).sqrt().recip();
            inner.add(a * ct.root_of_unity(j * t % m) * inv_sqrt);
        }
        lhs_acc.add(inner.value().norm_sqr().powi(m_power as i32));
    }
    let lhs = lhs_acc.value();

    // Diagonal route: enumerate multisets of m primes, expand the
    // multinomial coefficient, accumulate |coef|^2 / |f|.
    let mut rhs_acc = Neumaier::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(m_power as usize);
    enumerate_multisets(primes.len(), m_power as usize, 0, &mut chosen, &mut |multiset| {
        let mut coef = Complex64::new(factorial_u64(m_power as u64) as f64, 0.0);
        let mut f_degree = 0u32;
        let mut idx = 0;
        while idx < multiset.len() {
            let p = multiset[idx];
            let mut mult = 0u32;
            while idx < multiset.len() && multiset[idx] == p {
                mult += 1;
                idx += 1;
            }
            let (a, _, n) = primes[p];
            coef /= factorial_u64(mult as u64) as f64;
            for _ in 0..mult {
                coef *= a;
            }
            f_degree += mult * n;
        }
        rhs_acc.add(coef.norm_sqr() / (q as f64).powi(f_degree as i32));
    });
    let phi = (m as f64) * rhs_acc.value();
    let rhs_exact = phi;

    let mut sq = Neumaier::new();
    for &(a, _, n) in &primes {
        sq.add(a.norm_sqr() / field.pow(n) as f64);
    }
    let rhs_bound =
        field.pow(d) as f64 * factorial_u64(m_power as u64) as f64 * sq.value().powi(m_power as i32);

    let scale = rhs_exact.abs().max(1e-300);
    Ok(MeanValueRecord {
        lhs,
        rhs_exact,
        rhs_bound,
        diagonal_ok: (lhs - rhs_exact).abs() <= 1e-9 * scale,
        bound_ok: lhs <= rhs_bound * (1.0 + 1e-9),
    })
}

fn enumerate_multisets(
    n_items: usize,
    remaining: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        visit(chosen);
        return;
    }
    for i in start..n_items {
        chosen.push(i);
        enumerate_multisets(n_items, remaining - 1, i, chosen, visit);
        chosen.pop();
    }
}

fn factorial_u64(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// Geometric exponent schedule alpha_0 = log2/log|Q|, alpha_i = 20^(i-1)/
/// lambda^2, truncated at 10^(-T). The numerators 20^(i-1) are held as
/// exact integers; lambda_eff stands in for log log |Q|, which collapses
/// the schedule at desk scale if used literally.
#[derive(Debug, Clone)]
pub struct HarperSchedule {
    q: u64,
    degree: usize,
    pub t_param: u32,
    pub lambda_eff: f64,
    pub alpha0: f64,
    /// 20^(i-1) for i = 1..=J (kept exact).
    nums: Vec<u64>,
    /// J: windows and weights are indexed 1..=J.
    pub j_cap: usize,
    /// True when alpha_1 already exceeds 10^(-T); no partition exists.
    pub degenerate: bool,
    /// Windows are truncated to this prime degree to stay enumerable.
    pub degree_cap: usize,
}

/// Largest n with q^n within the enumerable range (about 2^20 monics).
pub fn default_degree_cap(q: u64) -> usize {
    let mut n = 0usize;
    let mut pow = 1u64;
    while pow * q <= (1 << 20) {
        pow *= q;
        n += 1;
    }
    n
}

pub fn harper_schedule(
    q: u64,
    degree: usize,
    t_param: u32,
    lambda_eff: f64,
    degree_cap: Option<usize>,
) -> Result<HarperSchedule> {
    if !(lambda_eff > 0.0) {
        return Err(Error::Invalid(alloc::format!("lambda_eff must be positive")));
    }
    let lambda_sq = lambda_eff * lambda_eff;
    let cutoff = 10f64.powi(-(t_param as i32));
    let mut nums = vec![1u64];
    let degenerate = 1.0 / lambda_sq > cutoff;
    let mut j_cap = 0usize;
    if !degenerate {
        // J = 1 + max{i >= 1 : 20^(i-1)/lambda^2 <= 10^(-T)}.
        let mut i = 1usize;
        loop {
            let next = nums[i - 1].checked_mul(20).expect("schedule numerator overflow");
            if next as f64 / lambda_sq <= cutoff {
                nums.push(next);
                i += 1;
            } else {
                nums.push(next); // alpha_J itself, first past the cutoff
                j_cap = i + 1;
                break;
            }
        }
    }
    let alpha0 = core::f64::consts::LN_2 / (degree as f64 * (q as f64).ln());
    Ok(HarperSchedule {
        q,
        degree,
        t_param,
        lambda_eff,
        alpha0,
        nums,
        j_cap,
        degenerate,
        degree_cap: degree_cap.unwrap_or_else(|| default_degree_cap(q)),
    })
}

/// One window of the schedule resolved to prime degrees: norms in
/// (|Q|^alpha_{i-1}, |Q|^alpha_i] are exactly degrees in (d alpha_{i-1},
/// d alpha_i].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowInfo {
    pub index: usize,
    pub degree_lo: usize,
    pub degree_hi: usize,
    /// True when the upper edge was truncated at the degree cap.
    pub clipped: bool,
}

impl WindowInfo {
    pub fn is_empty(&self) -> bool {
        self.degree_lo > self.degree_hi
    }
}

impl HarperSchedule {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alpha(&self, i: usize) -> f64 {
        if i == 0 {
            self.alpha0
        } else {
            self.nums[i - 1] as f64 / (self.lambda_eff * self.lambda_eff)
        }
    }

    /// alpha_i^(-3/4), the block-size threshold for window i.
    pub fn threshold(&self, i: usize) -> f64 {
        self.alpha(i).powf(-0.75)
    }

    pub fn window(&self, i: usize) -> WindowInfo {
        assert!(i >= 1 && i <= self.j_cap);
        let d = self.degree as f64;
        let cap = self.degree_cap;
        let lo = (d * self.alpha(i - 1)).floor() as usize + 1;
        let hi_real = d * self.alpha(i);
        let (hi, clipped) = if hi_real > cap as f64 {
            (cap, true)
        } else {
            (hi_real.floor() as usize, false)
        };
        let clipped = clipped && lo <= cap;
        WindowInfo { index: i, degree_lo: lo.min(cap + 1), degree_hi: hi, clipped }
    }

    pub fn windows(&self) -> Vec<WindowInfo> {
        (1..=self.j_cap).map(|i| self.window(i)).collect()
    }
}

/// The block sum over primes with norms in window i, weighted and damped
/// with the cutoff x = |Q|^alpha_l. Requires 1 <= i <= l <= J.
pub fn m_block(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    j: u64,
    i: usize,
    l: usize,
    sched: &HarperSchedule,
) -> Result<Complex64> {
    ct.check_index(j)?;
    if j == 0 {
        return Err(Error::PrincipalCharacter);
    }
    if i < 1 || i > l || l > sched.j_cap {
        return Err(Error::BlockIndexOrder { i, l, j_cap: sched.j_cap });
    }
    let window = sched.window(i);
    if window.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let q = ct.field().q();
    let d = ct.degree();
    let lnq = (q as f64).ln();
    let dx = d as f64 * sched.alpha(l); // log_q of the cutoff
    let ln_x = dx * lnq;
    let beta = 0.5 + ln_x.recip();
    let m = ct.order();
    tables.build_to(window.degree_hi);
    let mut acc = NeumaierComplex::new();
    for n in window.degree_lo..=window.degree_hi {
        let weight = (dx - n as f64) / dx;
        let coef = (-beta * n as f64 * lnq).exp() * weight;
        for p in tables.get(n).expect("built") {
            let t = match ct.reduce_dlog(p) {
                Some(t) => t as u64,
                None => continue,
            };
            acc.add(ct.root_of_unity(j * t % m) * coef);
        }
    }
    Ok(acc.value())
}

/// The character partition induced by the block-size thresholds.
#[derive(Debug, Clone)]
pub struct PartitionReport {
    /// assignment[j] = S-index of chi_j (None at the principal slot).
    pub assignment: Vec<Option<usize>>,
    /// sizes[s] = |S(s)| under the first-failure assignment, s = 0..=J.
    pub sizes: Vec<u64>,
    /// Every character belongs to at least one S(s) per the set definitions.
    pub cover_ok: bool,
    /// No character belongs to two different S(s).
    pub disjoint_ok: bool,
    pub windows: Vec<WindowInfo>,
}

/// Assigns every non-principal character to its segment: S(s) collects the
/// characters whose windows 1..=s all pass their thresholds under every
/// admissible weight, with window s+1 failing for some weight; S(J) holds
/// the all-pass characters. Membership is then re-derived from the set
/// definitions directly to certify the partition is an exact disjoint cover.
pub fn classify_partition(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    sched: &HarperSchedule,
) -> Result<PartitionReport> {
    if sched.degenerate || sched.j_cap == 0 {
        return Err(Error::DegenerateSchedule);
    }
    let j_cap = sched.j_cap;
    let m = ct.order();
    let q = ct.field().q();
    let d = ct.degree();
    let lnq = (q as f64).ln();

    // Window prime data (dlog, degree), built once.
    let mut window_primes: Vec<Vec<(u64, usize)>> = Vec::with_capacity(j_cap + 1);
    window_primes.push(Vec::new()); // dummy index 0
    for i in 1..=j_cap {
        let w = sched.window(i);
        let mut list = Vec::new();
        if !w.is_empty() {
            tables.build_to(w.degree_hi);
            for n in w.degree_lo..=w.degree_hi {
                for p in tables.get(n).expect("built") {
                    if let Some(t) = ct.reduce_dlog(p) {
                        list.push((t as u64, n));
                    }
                }
            }
        }
        window_primes.push(list);
    }

    // re_blocks[(i, l)][j] = Re M_{i,l}(chi_j), for 1 <= i <= l <= J.
    let mut re_blocks: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); j_cap + 1]; j_cap + 1];
    for i in 1..=j_cap {
        for l in i..=j_cap {
            let dx = d as f64 * sched.alpha(l);
            let beta = 0.5 + (dx * lnq).recip();
            let coefs: Vec<(u64, f64)> = window_primes[i]
                .iter()
                .map(|&(t, n)| {
                    let weight = (dx - n as f64) / dx;
                    (t, (-beta * n as f64 * lnq).exp() * weight)
                })
                .collect();
            let mut per_j = vec![0.0f64; m as usize];
            for (jj, slot) in per_j.iter_mut().enumerate().skip(1) {
                let mut acc = Neumaier::new();
                for &(t, coef) in &coefs {
                    acc.add(ct.root_of_unity(jj as u64 * t % m).re * coef);
                }
                *slot = acc.value();
            }
            re_blocks[i][l] = per_j;
        }
    }

    let ok = |i: usize, l: usize, jj: usize| -> bool {
        re_blocks[i][l][jj].abs() <= sched.threshold(i)
    };

    let mut assignment: Vec<Option<usize>> = vec![None; m as usize];
    let mut sizes = vec![0u64; j_cap + 1];
    let mut cover_ok = true;
    let mut disjoint_ok = true;
    for jj in 1..m as usize {
        // First-failure rule.
        let mut s = j_cap;
        'outer: for i in 1..=j_cap {
            for l in i..=j_cap {
                if !ok(i, l, jj) {
                    s = i - 1;
                    break 'outer;
                }
            }
        }
        assignment[jj] = Some(s);
        sizes[s] += 1;

        // Literal set memberships.
        let mut member_count = 0usize;
        let mut is_member_of_assigned = false;
        for cand in 0..=j_cap {
            let is_member = if cand == j_cap {
                (1..=j_cap).all(|i| ok(i, j_cap, jj))
            } else if cand == 0 {
                (1..=j_cap).any(|l| !ok(1, l, jj))
            } else {
                let pass = (1..=cand).all(|i| (i..=j_cap).all(|l| ok(i, l, jj)));
                let fail_next = (cand + 1..=j_cap).any(|l| !ok(cand + 1, l, jj));
                pass && fail_next
            };
            if is_member {
                member_count += 1;
                if cand == s {
                    is_member_of_assigned = true;
                }
            }
        }
        cover_ok &= member_count >= 1 && is_member_of_assigned;
        disjoint_ok &= member_count <= 1;
    }

    Ok(PartitionReport {
        assignment,
        sizes,
        cover_ok,
        disjoint_ok,
        windows: sched.windows(),
    })
}

/// Outcome of the truncated-exponential majorant test for one character.
#[derive(Debug, Clone, Copy)]
pub struct MajorantRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Checks exp(2k sum_i Re M_{i,s}) <= prod_i E_{e^2 k alpha_i^{-3/4}}
/// (k Re M_{i,s})^2 within 1e-6 for a character assigned to S(s), s >= 1.
/// The precondition |Re M_{i,s}| <= alpha_i^{-3/4} is enforced.
pub fn majorant_check(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    j: u64,
    sched: &HarperSchedule,
    k: f64,
    s: usize,
) -> Result<MajorantRecord> {
    if k < 0.0 {
        return Err(Error::NegativeMomentOrder);
    }
    if s < 1 || s > sched.j_cap {
        return Err(Error::BlockIndexOrder { i: s, l: s, j_cap: sched.j_cap });
    }
    let mut sum_re = Neumaier::new();
    let mut rhs = 1.0f64;
    for i in 1..=s {
        let re = m_block(ct, tables, j, i, s, sched)?.re;
        let threshold = sched.threshold(i);
        if re.abs() > threshold {
            return Err(Error::MajorantPrecondition { block: i, value: re, threshold });
        }
        sum_re.add(re);
        let ell = core::f64::consts::E.powi(2) * k * threshold;
        let e = truncated_exp(ell, k * re);
        rhs *= e * e;
    }
    let lhs = (2.0 * k * sum_re.value()).exp();
    Ok(MajorantRecord { lhs, rhs, ok: lhs <= rhs * (1.0 + 1e-6) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::Field;
    use crate::lseries::Route;

    fn setup(q: u64, code: u64) -> (CharacterTable, PrimeTables) {
        let field = Field::new(q).unwrap();
        let mut tables = PrimeTables::new(field);
        let modulus = field.decode(code).unwrap();
        let ct = CharacterTable::new(field, modulus, &mut tables).unwrap();
        (ct, tables)
    }

    fn setup_degree(q: u64, d: usize) -> (CharacterTable, PrimeTables) {
        let field = Field::new(q).unwrap();
        let mut tables = PrimeTables::new(field);
        let modulus = tables.lowest_prime_of_degree(d);
        let ct = CharacterTable::new(field, modulus, &mut tables).unwrap();
        (ct, tables)
    }

    // -- proxy tests --

    #[test]
    fn proxy_rejects_bad_cutoffs_and_principal() {
        let (ct, mut tables) = setup(3, 34);
        let too_big = ProxyParams { x_num: 3, x_den: 2, include_squares: false };
        assert!(matches!(
            proxy_log_bound(&ct, &mut tables, 1, &too_big),
            Err(Error::CutoffOutOfRange)
        ));
        let zero = ProxyParams { x_num: 0, x_den: 1, include_squares: false };
        assert!(proxy_log_bound(&ct, &mut tables, 1, &zero).is_err());
        let fine = ProxyParams { x_num: 1, x_den: 2, include_squares: false };
        assert!(matches!(
            proxy_log_bound(&ct, &mut tables, 0, &fine),
            Err(Error::PrincipalCharacter)
        ));
    }

    #[test]
    fn additive_term_is_exactly_one_at_full_cutoff() {
        let (ct, mut tables) = setup(3, 34);
        // Zero out the prime sum by comparing against the hand-built sum.
        let params = ProxyParams { x_num: 1, x_den: 1, include_squares: false };
        let v = proxy_log_bound(&ct, &mut tables, 13, &params).unwrap();
        let mut hand = NeumaierComplex::new();
        let lnq = 3f64.ln();
        let ln_x = 3.0 * lnq;
        for n in 1..=3usize {
            let weight = (3 - n) as f64 / 3.0;
            let coef = (-(0.5 + ln_x.recip()) * n as f64 * lnq).exp() * weight;
            for p in tables.primes_of_degree(n).to_vec() {
                if let Some(t) = ct.reduce_dlog(&p) {
                    hand.add(ct.root_of_unity(13 * t as u64 % 26) * coef);
                }
            }
        }
        assert!((v - (hand.value().re + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn boundary_primes_carry_zero_weight() {
        // At x = |Q| the degree-d primes sit exactly on the cutoff, so they
        // contribute 0 and the sweep result is insensitive to them.
        let (ct, mut tables) = setup(3, 34);
        let params = ProxyParams { x_num: 1, x_den: 1, include_squares: false };
        let with_them = proxy_log_bound(&ct, &mut tables, 5, &params).unwrap();
        // Hand-build the same sum stopping at degree d-1.
        let mut hand = NeumaierComplex::new();
        let lnq = 3f64.ln();
        let ln_x = 3.0 * lnq;
        for n in 1..=2usize {
            let weight = (3 - n) as f64 / 3.0;
            let coef = (-(0.5 + ln_x.recip()) * n as f64 * lnq).exp() * weight;
            for p in tables.primes_of_degree(n).to_vec() {
                let t = ct.reduce_dlog(&p).unwrap();
                hand.add(ct.root_of_unity(5 * t as u64 % 26) * coef);
            }
        }
        assert_eq!(with_them, hand.value().re + 1.0);
    }

    #[test]
    fn deficit_sweep_fits_a_small_constant() {
        let field = Field::new(3).unwrap();
        let mut tables = PrimeTables::new(field);
        for d in [3usize, 4] {
            let modulus = tables.lowest_prime_of_degree(d);
            let ct = CharacterTable::new(field, modulus, &mut tables).unwrap();
            let ls = LSeriesTable::build(&ct, Route::Dft);
            for include_squares in [true, false] {
                let params = ProxyParams { x_num: 1, x_den: 2, include_squares };
                let sweep = proxy_deficit_sweep(&ct, &mut tables, &ls, &params).unwrap();
                assert!(sweep.fitted_c <= 5.0, "d={d} sq={include_squares} c={}", sweep.fitted_c);
                let expected = ct.order() - 1 - u64::from(!include_squares);
                assert_eq!(sweep.deficits.len() as u64, expected);
            }
        }
    }

    // -- mean value tests --

    #[test]
    fn mean_value_single_prime_case_frozen() {
        let (ct, mut tables) = setup_degree(3, 5);
        let one = |_: &MonicPoly| Complex64::new(1.0, 0.0);
        let rec = mean_value_check(&ct, &mut tables, 1, 1, one).unwrap();
        // phi(Q) * pi(1)/q = 242 * 1 = 242.
        assert!((rec.lhs - 242.0).abs() < 1e-9 * 242.0);
        assert!(rec.diagonal_ok && rec.bound_ok);
    }

    #[test]
    fn mean_value_identity_all_small_configs() {
        let (ct, mut tables) = setup_degree(3, 5);
        let one = |_: &MonicPoly| Complex64::new(1.0, 0.0);
        for (m_power, y_degree) in [(1u32, 1u32), (1, 2), (2, 1), (2, 2)] {
            let rec = mean_value_check(&ct, &mut tables, m_power, y_degree, one).unwrap();
            assert!(rec.diagonal_ok, "m={m_power} y={y_degree}: {rec:?}");
            assert!(rec.bound_ok, "m={m_power} y={y_degree}: {rec:?}");
        }
    }

    #[test]
    fn mean_value_with_twisted_weights() {
        let (ct, mut tables) = setup_degree(3, 5);
        let field = ct.field();
        let a = move |p: &MonicPoly| {
            let code = field.encode(p) as f64;
            Complex64::new((0.3 * code).cos(), (0.7 * code).sin()) * 0.5
        };
        let rec = mean_value_check(&ct, &mut tables, 2, 2, a).unwrap();
        assert!(rec.diagonal_ok, "{rec:?}");
        assert!(rec.bound_ok, "{rec:?}");
    }

    #[test]
    fn mean_value_zero_weights_and_hypothesis() {
        let (ct, mut tables) = setup_degree(3, 5);
        let zero = |_: &MonicPoly| Complex64::new(0.0, 0.0);
        let rec = mean_value_check(&ct, &mut tables, 1, 1, zero).unwrap();
        assert_eq!(rec.lhs, 0.0);
        assert_eq!(rec.rhs_exact, 0.0);
        let one = |_: &MonicPoly| Complex64::new(1.0, 0.0);
        assert!(matches!(
            mean_value_check(&ct, &mut tables, 2, 3, one),
            Err(Error::HypothesisViolated { .. })
        ));
    }

    // -- schedule tests --

    #[test]
    fn schedule_is_geometric_with_exact_ratio() {
        let sched = harper_schedule(3, 5, 3, 100.0, None).unwrap();
        assert!(!sched.degenerate);
        assert_eq!(sched.j_cap, 2);
        assert!((sched.alpha(1) - 1e-4).abs() < 1e-19);
        for i in 1..sched.j_cap {
            let ratio = sched.alpha(i + 1) / sched.alpha(i);
            assert!((ratio - 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_degenerates_at_desk_scale_lambda() {
        // |Q| = 3^7: log log |Q| ~ 2.04, alpha_1 ~ 0.24 > 10^-1.
        let lambda = (7.0 * 3f64.ln()).ln();
        let sched = harper_schedule(3, 7, 1, lambda, None).unwrap();
        assert!(sched.degenerate);
        assert_eq!(sched.j_cap, 0);
        let field = Field::new(3).unwrap();
        let mut tables = PrimeTables::new(field);
        let modulus = tables.lowest_prime_of_degree(7);
        let ct = CharacterTable::new(field, modulus, &mut tables).unwrap();
        assert!(matches!(
            classify_partition(&ct, &mut tables, &sched),
            Err(Error::DegenerateSchedule)
        ));
    }

    #[test]
    fn window_resolution_and_clipping() {
        // lambda = 2 keeps every alpha dyadic: alpha_1 = 1/4, alpha_2 = 5.
        let sched = harper_schedule(3, 5, 0, 2.0, None).unwrap();
        assert_eq!(sched.j_cap, 2);
        let w1 = sched.window(1);
        assert_eq!((w1.degree_lo, w1.degree_hi, w1.clipped), (1, 1, false));
        // Window 2 runs to degree 25 before the q=3 cap of 12 bites.
        let w2 = sched.window(2);
        assert_eq!((w2.degree_lo, w2.degree_hi, w2.clipped), (2, 12, true));

        // d = 8: window 1 widens to degrees 1..=2.
        let sched = harper_schedule(3, 8, 0, 2.0, None).unwrap();
        let w1 = sched.window(1);
        assert_eq!((w1.degree_lo, w1.degree_hi, w1.clipped), (1, 2, false));
        assert_eq!(default_degree_cap(3), 12);
        assert_eq!(default_degree_cap(5), 8);
        assert_eq!(default_degree_cap(7), 7);
    }

    // -- block tests --

    #[test]
    fn empty_window_block_is_zero() {
        let (ct, mut tables) = setup_degree(3, 5);
        let sched = harper_schedule(3, 5, 1, 10f64.sqrt(), None).unwrap();
        for j in [1u64, 7, 100] {
            let b = m_block(&ct, &mut tables, j, 1, 1, &sched).unwrap();
            assert_eq!(b, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn block_rejects_bad_indices() {
        let (ct, mut tables) = setup_degree(3, 5);
        let sched = harper_schedule(3, 5, 1, 10f64.sqrt(), None).unwrap();
        assert!(matches!(
            m_block(&ct, &mut tables, 1, 2, 1, &sched),
            Err(Error::BlockIndexOrder { .. })
        ));
        assert!(matches!(
            m_block(&ct, &mut tables, 1, 1, 3, &sched),
            Err(Error::BlockIndexOrder { .. })
        ));
        assert!(matches!(
            m_block(&ct, &mut tables, 0, 1, 1, &sched),
            Err(Error::PrincipalCharacter)
        ));
    }

    #[test]
    fn degree_one_window_block_matches_direct_sum() {
        // T = 0, lambda = 3/2, d = 3: window 1 holds exactly degree 1.
        let (ct, mut tables) = setup(3, 34);
        let sched = harper_schedule(3, 3, 0, 1.5, None).unwrap();
        let w1 = sched.window(1);
        assert_eq!((w1.degree_lo, w1.degree_hi), (1, 1));
        for j in 1..ct.order() {
            let b = m_block(&ct, &mut tables, j, 1, 1, &sched).unwrap();
            let dx = 3.0 * sched.alpha(1);
            let lnq = 3f64.ln();
            let beta = 0.5 + (dx * lnq).recip();
            let coef = (-beta * lnq).exp() * (dx - 1.0) / dx;
            let mut direct = Complex64::new(0.0, 0.0);
            for p in tables.primes_of_degree(1).to_vec() {
                let t = ct.reduce_dlog(&p).unwrap();
                direct += ct.root_of_unity(j * t as u64 % 26) * coef;
            }
            assert!((b - direct).norm() < 1e-12, "j={j}");
            // Triangle inequality against the unweighted envelope.
            let envelope = 3.0 * 3f64.sqrt().recip();
            assert!(b.norm() <= envelope + 1e-12);
        }
    }

    // -- partition tests --

    #[test]
    fn partition_is_exact_when_all_windows_are_empty() {
        let (ct, mut tables) = setup_degree(3, 5);
        let sched = harper_schedule(3, 5, 3, 100.0, None).unwrap();
        let report = classify_partition(&ct, &mut tables, &sched).unwrap();
        assert!(report.cover_ok && report.disjoint_ok);
        assert_eq!(report.sizes.iter().sum::<u64>(), ct.phi_star());
        // All blocks vanish, so everyone lands in S(J).
        assert_eq!(report.sizes[sched.j_cap], ct.phi_star());
    }

    #[test]
    fn partition_is_exact_with_live_windows() {
        let (ct, mut tables) = setup_degree(3, 5);
        let sched = harper_schedule(3, 5, 0, 2.0, None).unwrap();
        let report = classify_partition(&ct, &mut tables, &sched).unwrap();
        assert!(report.cover_ok, "cover failed");
        assert!(report.disjoint_ok, "disjointness failed");
        assert_eq!(report.sizes.iter().sum::<u64>(), ct.phi_star());
        // Window 2 is live (degrees 2..=12), so the split is nontrivial.
        let nonempty = report.sizes.iter().filter(|&&s| s > 0).count();
        assert!(nonempty >= 2, "sizes {:?}", report.sizes);
        // Window 1 holds the three linear primes; their block sums cannot
        // reach the threshold alpha_1^(-3/4) = 2^(3/2), so S(0) is empty.
        assert_eq!(report.sizes[0], 0);
    }

    // -- majorant tests --

    #[test]
    fn majorant_trivial_when_blocks_vanish() {
        let (ct, mut tables) = setup_degree(3, 5);
        let sched = harper_schedule(3, 5, 3, 100.0, None).unwrap();
        for k in [0.0, 0.5, 1.0, 2.0] {
            let rec = majorant_check(&ct, &mut tables, 7, &sched, k, sched.j_cap).unwrap();
            assert_eq!(rec.lhs, 1.0);
            assert_eq!(rec.rhs, 1.0);
            assert!(rec.ok);
        }
    }

    #[test]
    fn majorant_scalar_grid() {
        // e^(2kt) <= E_l(kt)^2 (1 + 1e-6) for l = 24 over a small t-grid,
        // independent of any character data.
        for k in [0.5f64, 1.0, 2.0] {
            let mut t = -2.0f64;
            while t <= 2.0 {
                let lhs = (2.0 * k * t).exp();
                let e = truncated_exp(24.0, k * t);
                assert!(lhs <= e * e * (1.0 + 1e-6), "k={k} t={t}");
                t += 0.125;
            }
        }
    }

    #[test]
    fn majorant_precondition_enforced() {
        // T = 0, lambda = 1: threshold is 1, many characters exceed it.
        let (ct, mut tables) = setup(3, 34);
        let sched = harper_schedule(3, 3, 0, 1.0, None).unwrap();
        let report = classify_partition(&ct, &mut tables, &sched).unwrap();
        assert!(report.cover_ok && report.disjoint_ok);
        let mut saw_rejection = false;
        for j in 1..ct.order() {
            match majorant_check(&ct, &mut tables, j, &sched, 1.0, sched.j_cap) {
                Ok(_) => {}
                Err(Error::MajorantPrecondition { .. }) => saw_rejection = true,
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        // With threshold 1 and a live degree-1..3 window someone must trip.
        assert!(saw_rejection);
    }
}
