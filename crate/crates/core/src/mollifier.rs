//! The mollifier apparatus: the even ell sequence, prime windows keyed by
//! norm thresholds, truncated exponentials, the mollifier in product and
//! Dirichlet-polynomial form, twisted moments, and the Hölder chains that
//! tie them to the plain moments.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ffpoly::{Field, MonicPoly, PrimeTables};
use crate::lseries::LSeriesTable;
use crate::residue::CharacterTable;
use crate::sum::{Neumaier, NeumaierComplex};
use crate::{Error, Result};

/// Taylor sum of e^x through degree floor(ell), by Horner in fixed order.
/// Beyond 512 terms the partial sum is machine-identical to a forward
/// accumulation with early exit, which is used to keep the cost bounded.
pub fn truncated_exp(ell: f64, x: f64) -> f64 {
    let cap = ell.max(0.0).floor();
    let degree = if cap > u32::MAX as f64 { u32::MAX as u64 } else { cap as u64 };
    if degree == 0 {
        return 1.0;
    }
    if degree <= 512 {
        let mut acc = 1.0f64;
        for j in (1..=degree).rev() {
            acc = 1.0 + acc * x / j as f64;
        }
        acc
    } else {
        let mut acc = 1.0f64;
        let mut term = 1.0f64;
        for j in 1..=degree {
            term *= x / j as f64;
            acc += term;
            if j as f64 > x.abs() && term.abs() <= acc.abs() * 1e-20 {
                break;
            }
        }
        acc
    }
}

/// Complex variant of `truncated_exp`; same term count and ordering.
pub fn trunc_exp(ell: f64, x: Complex64) -> Complex64 {
    let cap = ell.max(0.0).floor();
    let degree = if cap > u32::MAX as f64 { u32::MAX as u64 } else { cap as u64 };
    if degree == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    if degree <= 512 {
        let mut acc = one;
        for j in (1..=degree).rev() {
            acc = one + acc * x / j as f64;
        }
        acc
    } else {
        let mut acc = one;
        let mut term = one;
        for j in 1..=degree {
            term *= x / j as f64;
            acc += term;
            if j as f64 > x.norm() && term.norm() <= acc.norm() * 1e-20 {
                break;
            }
        }
        acc
    }
}

/// The decreasing even sequence ell_1 = 2 ceil(N lambda), ell_{j+1} =
/// 2 ceil(N log ell_j), cut at the first index at or below 10^M.
#[derive(Debug, Clone)]
pub struct EllSequence {
    pub n_param: u32,
    pub m_param: u32,
    pub lambda: f64,
    /// ell_1 ..= ell_R.
    pub ells: Vec<u64>,
    pub r: usize,
    /// Set when the recursion yields no term above 10^M, or the side
    /// condition ell_j > ell_{j+1}^2 fails, and a single window is kept.
    pub desk_scale_fallback: bool,
    /// ell_j > ell_{j+1}^2 for all j < R (vacuous at R = 1).
    pub side_ok: bool,
}

pub fn ell_sequence(
    q: u64,
    degree: usize,
    n_param: u32,
    m_param: u32,
    lambda_override: Option<f64>,
) -> Result<EllSequence> {
    assert!(n_param >= 1 && m_param >= 1);
    let lambda = match lambda_override {
        Some(l) => {
            if !(l > 0.0) {
                return Err(Error::Invalid(alloc::format!("lambda must be positive")));
            }
            l
        }
        None => (degree as f64 * (q as f64).ln()).ln(),
    };
    let ell_1 = 2 * (n_param as f64 * lambda).ceil() as u64;
    let mut seq = vec![ell_1];
    loop {
        let prev = *seq.last().expect("nonempty");
        let next = 2 * (n_param as f64 * (prev as f64).ln()).ceil() as u64;
        if next >= prev {
            break; // stagnation: the recursion has bottomed out
        }
        seq.push(next);
    }
    let floor = 10u64.pow(m_param);
    let r = seq.iter().take_while(|&&l| l > floor).count();
    if r == 0 {
        return Ok(EllSequence {
            n_param,
            m_param,
            lambda,
            ells: vec![ell_1],
            r: 1,
            desk_scale_fallback: true,
            side_ok: true,
        });
    }
    seq.truncate(r);
    let side_ok = (0..r - 1).all(|i| {
        seq[i + 1].checked_mul(seq[i + 1]).map_or(false, |sq| seq[i] > sq)
    });
    if !side_ok {
        return Ok(EllSequence {
            n_param,
            m_param,
            lambda,
            ells: vec![ell_1],
            r: 1,
            desk_scale_fallback: true,
            side_ok: false,
        });
    }
    Ok(EllSequence {
        n_param,
        m_param,
        lambda,
        ells: seq,
        r,
        desk_scale_fallback: false,
        side_ok: true,
    })
}

/// Window j holds the primes with norm in (|Q|^(1/ell_{j-1}^2),
/// |Q|^(1/ell_j^2)], resolved to degrees (floor(d/ell_{j-1}^2),
/// floor(d/ell_j^2)].
#[derive(Debug, Clone)]
pub struct MollifierWindow {
    pub index: usize,
    pub ell: u64,
    pub degree_lo: usize,
    pub degree_hi: usize,
    /// (poly, dlog, degree) per prime; the modulus never qualifies.
    primes: Vec<(MonicPoly, u64, u32)>,
}

impl MollifierWindow {
    pub fn is_empty(&self) -> bool {
        self.degree_lo > self.degree_hi
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }
}

#[derive(Debug, Clone)]
pub struct MollifierPlan {
    pub ell: EllSequence,
    pub windows: Vec<MollifierWindow>,
}

fn degree_threshold(degree: usize, ell: u64) -> usize {
    match ell.checked_mul(ell) {
        Some(sq) if sq <= degree as u64 => (degree as u64 / sq) as usize,
        _ => 0,
    }
}

pub fn build_plan(
    ct: &CharacterTable,
    tables: &mut PrimeTables,
    ell: EllSequence,
) -> MollifierPlan {
    let d = ct.degree();
    let mut windows = Vec::with_capacity(ell.r);
    let mut prev_threshold = 0usize;
    for (idx, &l) in ell.ells.iter().enumerate() {
        let hi = degree_threshold(d, l);
        let lo = prev_threshold + 1;
        let mut primes = Vec::new();
        if lo <= hi {
            tables.build_to(hi);
            for n in lo..=hi {
                for p in tables.get(n).expect("built") {
                    if let Some(t) = ct.reduce_dlog(p) {
                        primes.push((p.clone(), t as u64, n as u32));
                    }
                }
            }
        }
        windows.push(MollifierWindow {
            index: idx + 1,
            ell: l,
            degree_lo: lo,
            degree_hi: hi,
            primes,
        });
        prev_threshold = prev_threshold.max(hi);
    }
    MollifierPlan { ell, windows }
}

/// The window prime sum of chi_j over window w (1-based). The principal
/// character is allowed: it contributes 1 per prime.
pub fn p_window_sum(ct: &CharacterTable, plan: &MollifierPlan, w: usize, j: u64) -> Complex64 {
    let window = &plan.windows[w - 1];
    let m = ct.order();
    let field = ct.field();
    let mut acc = NeumaierComplex::new();
    for &(_, t, n) in &window.primes {
        let inv_sqrt = (field.pow(n) as f64).sqrt().recip();
        acc.add(ct.root_of_unity(j * t % m) * inv_sqrt);
    }
    acc.value()
}

/// Product form: prod_w E_{ell_w}(alpha P_w(chi_j)).
pub fn mollifier_eval(ct: &CharacterTable, plan: &MollifierPlan, j: u64, alpha: f64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for w in 1..=plan.windows.len() {
        let p = p_window_sum(ct, plan, w, j);
        acc *= trunc_exp(plan.windows[w - 1].ell as f64, p * alpha);
    }
    acc
}

/// log_q of the support envelope |Q|^(2 sum 1/ell_j).
pub fn support_envelope_exponent(plan: &MollifierPlan, degree: usize) -> f64 {
    let mut s = Neumaier::new();
    for w in &plan.windows {
        s.add((w.ell as f64).recip());
    }
    2.0 * s.value() * degree as f64
}

/// The mollifier as a Dirichlet polynomial: coefficient of f is
/// alpha^Omega(f) / (w(f) sqrt|f|) over products of at most ell_j primes
/// per window j. Coefficients are real for the real alpha used here.
#[derive(Debug, Clone)]
pub struct DirichletPoly {
    pub coeffs: BTreeMap<u64, f64>,
    pub max_norm: u64,
}

impl DirichletPoly {
    pub fn evaluate(&self, ct: &CharacterTable, j: u64) -> Complex64 {
        let field = ct.field();
        let mut acc = NeumaierComplex::new();
        for (&code, &v) in &self.coeffs {
            let f = field.decode(code).expect("support codes are monic");
            acc.add(ct.eval(j, &f) * v);
        }
        acc.value()
    }

    /// Range of u_a = coeff(a) sqrt|a| over the support.
    pub fn u_range(&self, field: Field) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (&code, &v) in &self.coeffs {
            let f = field.decode(code).expect("support codes are monic");
            let u = v * (field.norm(&f) as f64).sqrt();
            lo = lo.min(u);
            hi = hi.max(u);
        }
        (lo, hi)
    }
}

pub const DEFAULT_TERM_BUDGET: u64 = 1 << 22;

fn multiset_count(n_items: u64, max_size: u64) -> u64 {
    // sum_{s=0}^{max_size} C(n_items + s - 1, s), saturating.
    let mut total: u128 = 0;
    for s in 0..=max_size {
        let mut c: u128 = 1;
        for i in 0..s {
            c = c.saturating_mul((n_items + i) as u128) / (i + 1) as u128;
            if c > u64::MAX as u128 {
                return u64::MAX;
            }
        }
        total = total.saturating_add(c);
        if total > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    total as u64
}

pub fn mollifier_coeffs(
    ct: &CharacterTable,
    plan: &MollifierPlan,
    alpha: f64,
    term_budget: u64,
) -> Result<DirichletPoly> {
    let field = ct.field();
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    acc.insert(field.encode(&MonicPoly::one()), 1.0);
    for window in &plan.windows {
        let needed = multiset_count(window.primes.len() as u64, window.ell);
        if needed > term_budget {
            return Err(Error::MemoryBudget {
                window: window.index,
                needed,
                budget: term_budget,
            });
        }
        if window.primes.is_empty() {
            continue;
        }
        let mut factor: Vec<(MonicPoly, f64)> = Vec::with_capacity(needed as usize);
        build_window_terms(
            field,
            &window.primes,
            alpha,
            window.ell as usize,
            0,
            0,
            MonicPoly::one(),
            1.0,
            &mut factor,
        );
        let mut next: BTreeMap<u64, f64> = BTreeMap::new();
        for (&code, &va) in &acc {
            let fa = field.decode(code).expect("monic");
            for (fb, vb) in &factor {
                let prod = field.mul_monic(&fa, fb);
                next.insert(field.encode(&prod), va * vb);
            }
        }
        acc = next;
    }
    let max_norm = acc
        .keys()
        .map(|&code| field.norm(&field.decode(code).expect("monic")))
        .max()
        .unwrap_or(1);
    Ok(DirichletPoly { coeffs: acc, max_norm })
}

/// Enumerates multisets as non-decreasing prime-index sequences, carrying
/// alpha^Omega / w(f) incrementally; every node is one support element.
#[allow(clippy::too_many_arguments)]
fn build_window_terms(
    field: Field,
    primes: &[(MonicPoly, u64, u32)],
    alpha: f64,
    remaining: usize,
    start: usize,
    run_length: usize,
    f: MonicPoly,
    weight: f64,
    out: &mut Vec<(MonicPoly, f64)>,
) {
    let norm = field.norm(&f) as f64;
    out.push((f.clone(), weight / norm.sqrt()));
    if remaining == 0 {
        return;
    }
    for i in start..primes.len() {
        let mult = if i == start { run_length + 1 } else { 1 };
        let next_f = field.mul_monic(&f, &primes[i].0);
        build_window_terms(
            field,
            primes,
            alpha,
            remaining - 1,
            i,
            mult,
            next_f,
            weight * alpha / mult as f64,
            out,
        );
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TwistedMoments {
    /// sum over j != 0 of L_j N(conj chi_j, k) N(chi_j, k-1).
    pub first: Complex64,
    /// sum over j != 0 of |L_j N(chi_j, k-1)|^2.
    pub second: f64,
}

pub fn twisted_moments(
    ct: &CharacterTable,
    ls: &LSeriesTable,
    plan: &MollifierPlan,
    k: f64,
) -> TwistedMoments {
    let m = ct.order();
    let mut first = NeumaierComplex::new();
    let mut second = Neumaier::new();
    for j in 1..m {
        let l = ls.central_value(j);
        let n_bar_k = mollifier_eval(ct, plan, ct.conj_index(j), k);
        let n_km1 = mollifier_eval(ct, plan, j, k - 1.0);
        first.add(l * n_bar_k * n_km1);
        second.add((l * n_km1).norm_sqr());
    }
    TwistedMoments { first: first.value(), second: second.value() }
}

#[derive(Debug, Clone, Copy)]
pub struct HolderRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Evaluates the applicable Hölder chain from the actual sums. For
/// 0 < k < 1 the three-factor split (exponents 1/2, (1-k)/2, k/2); for
/// k > 1 the two-factor split (1/(2k), (2k-1)/(2k)). k = 1 has no chain.
pub fn holder_chain_check(
    ct: &CharacterTable,
    ls: &LSeriesTable,
    plan: &MollifierPlan,
    k: f64,
) -> Result<HolderRecord> {
    if k <= 0.0 {
        return Err(Error::NegativeMomentOrder);
    }
    if k == 1.0 {
        return Err(Error::HolderExponentOne);
    }
    let tw = twisted_moments(ct, ls, plan, k);
    let lhs = tw.first.norm();
    let values = ls.central_values();
    let m_2k = crate::moments::moment(&values, k)?;
    let m = ct.order();
    let rhs = if k < 1.0 {
        let mut t3 = Neumaier::new();
        for j in 1..m {
            let nk = mollifier_eval(ct, plan, j, k).norm();
            let nkm1 = mollifier_eval(ct, plan, j, k - 1.0).norm_sqr();
            t3.add(nk.powf(2.0 / k) * nkm1);
        }
        m_2k.sqrt() * tw.second.powf((1.0 - k) / 2.0) * t3.value().powf(k / 2.0)
    } else {
        let mut t2 = Neumaier::new();
        for j in 1..m {
            let prod =
                (mollifier_eval(ct, plan, j, k) * mollifier_eval(ct, plan, j, k - 1.0)).norm();
            t2.add(prod.powf(2.0 * k / (2.0 * k - 1.0)));
        }
        m_2k.powf(1.0 / (2.0 * k)) * t2.value().powf((2.0 * k - 1.0) / (2.0 * k))
    };
    Ok(HolderRecord { lhs, rhs, ok: lhs <= rhs * (1.0 + 1e-9) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lseries::Route;

    fn setup(q: u64, d: usize) -> (CharacterTable, PrimeTables) {
        let field = Field::new(q).unwrap();
        let mut tables = PrimeTables::new(field);
        let modulus = tables.lowest_prime_of_degree(d);
        let ct = CharacterTable::new(field, modulus, &mut tables).unwrap();
        (ct, tables)
    }

    fn plan_d5() -> (CharacterTable, PrimeTables, MollifierPlan) {
        let (ct, mut tables) = setup(3, 5);
        let ell = ell_sequence(3, 5, 2, 1, Some(0.5)).unwrap();
        let plan = build_plan(&ct, &mut tables, ell);
        (ct, tables, plan)
    }

    // -- truncated exponential --

    #[test]
    fn trunc_exp_frozen_values() {
        for x in [-3.0, 0.0, 1.7, 250.0] {
            assert_eq!(truncated_exp(0.0, x), 1.0);
            assert_eq!(truncated_exp(0.9, x), 1.0);
        }
        assert_eq!(truncated_exp(2.0, 1.0), 2.5);
        assert!((truncated_exp(3.0, -2.0) + 1.0 / 3.0).abs() < 1e-15);
        // E_2(i) = 1 + i - 1/2.
        let v = trunc_exp(2.0, Complex64::new(0.0, 1.0));
        assert_eq!(v, Complex64::new(0.5, 1.0));
    }

    #[test]
    fn trunc_exp_real_and_complex_agree() {
        for ell in [1.0, 2.0, 5.5, 12.0] {
            let mut x = -2.0f64;
            while x <= 2.0 {
                let r = truncated_exp(ell, x);
                let c = trunc_exp(ell, Complex64::new(x, 0.0));
                assert_eq!(c.re, r);
                assert_eq!(c.im, 0.0);
                x += 0.25;
            }
        }
    }

    #[test]
    fn trunc_exp_taylor_remainder_envelope() {
        for ell in [2.0f64, 3.0, 5.0, 8.0] {
            let terms = ell as i32;
            let mut x = -2.0f64;
            while x <= 2.0 {
                let e = truncated_exp(ell, x);
                let fact: f64 = (1..=terms as u64 + 1).product::<u64>() as f64;
                let envelope = x.abs().powi(terms + 1) / fact * x.abs().exp();
                assert!((e - x.exp()).abs() <= envelope + 1e-15, "ell={ell} x={x}");
                x += 0.25;
            }
        }
    }

    #[test]
    fn trunc_exp_long_and_short_paths_match() {
        // Degree past 512 takes the forward path; compare against a Horner
        // run at the same degree on arguments where both are exact enough.
        for x in [-1.5f64, 0.3, 2.0] {
            let forward = truncated_exp(600.0, x);
            assert!((forward - x.exp()).abs() <= 1e-14 * x.exp().abs());
        }
    }

    // -- ell sequence --

    #[test]
    fn ell_sequence_desk_scale_fallback() {
        // ceil(N lambda) = 4 with N = 2: ells would be 8, 10, not
        // decreasing and never above 10^1, so one window survives.
        let seq = ell_sequence(3, 5, 2, 1, Some(1.75)).unwrap();
        assert_eq!(seq.ells, vec![8]);
        assert_eq!(seq.r, 1);
        assert!(seq.desk_scale_fallback);
        // The default lambda = log log |Q| lands in the same regime.
        let seq = ell_sequence(3, 5, 2, 1, None).unwrap();
        assert_eq!(seq.ells, vec![8]);
        assert!(seq.desk_scale_fallback);
    }

    #[test]
    fn ell_sequence_honest_two_window_case() {
        let seq = ell_sequence(3, 5, 1, 1, Some(1e9)).unwrap();
        assert_eq!(seq.ells, vec![2_000_000_000, 44]);
        assert_eq!(seq.r, 2);
        assert!(!seq.desk_scale_fallback);
        assert!(seq.side_ok);
        assert!(seq.ells.iter().all(|l| l % 2 == 0));
        let sum: f64 = seq.ells.iter().map(|&l| (l as f64).recip()).sum();
        assert!(sum <= 2.0 / seq.ells[seq.r - 1] as f64);
    }

    #[test]
    fn ell_sequence_side_condition_fallback() {
        // ell_1 = 60, ell_2 = 2 ceil(2 log 60) = 18 > 10, but 60 < 18^2.
        let seq = ell_sequence(3, 5, 2, 1, Some(15.0)).unwrap();
        assert_eq!(seq.ells, vec![60]);
        assert!(seq.desk_scale_fallback);
        assert!(!seq.side_ok);
    }

    // -- windows --

    #[test]
    fn windows_resolve_disjoint_degree_ranges() {
        let (ct, mut tables) = setup(3, 8);
        let ell = EllSequence {
            n_param: 2,
            m_param: 1,
            lambda: 1.0,
            ells: vec![4, 2],
            r: 2,
            desk_scale_fallback: false,
            side_ok: false,
        };
        let plan = build_plan(&ct, &mut tables, ell);
        assert!(plan.windows[0].is_empty()); // floor(8/16) = 0
        let w2 = &plan.windows[1];
        assert_eq!((w2.degree_lo, w2.degree_hi), (1, 2));
        assert_eq!(w2.prime_count(), 6); // three linear, three quadratic
    }

    #[test]
    fn criterion_style_plan_has_one_degree_one_window() {
        let (_, _, plan) = plan_d5();
        assert_eq!(plan.windows.len(), 1);
        let w = &plan.windows[0];
        assert_eq!((w.ell, w.degree_lo, w.degree_hi), (2, 1, 1));
        assert_eq!(w.prime_count(), 3);
    }

    // -- window sums and product form --

    #[test]
    fn window_sum_principal_and_triangle() {
        let (ct, _, plan) = plan_d5();
        let principal = p_window_sum(&ct, &plan, 1, 0);
        assert!((principal.re - 3f64.sqrt()).abs() < 1e-12); // pi(1)/sqrt(q)
        assert!(principal.im.abs() < 1e-12);
        for j in 1..ct.order() {
            let s = p_window_sum(&ct, &plan, 1, j);
            assert!(s.norm() <= 3f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn mollifier_eval_degenerate_cases() {
        let (ct, _, plan) = plan_d5();
        for j in (0..ct.order()).step_by(17) {
            assert_eq!(mollifier_eval(&ct, &plan, j, 0.0), Complex64::new(1.0, 0.0));
        }
        // Empty windows leave the product at exactly 1.
        let (ct8, mut tables8) = setup(3, 8);
        let ell = ell_sequence(3, 8, 2, 1, Some(1.75)).unwrap(); // ell_1 = 8
        let plan8 = build_plan(&ct8, &mut tables8, ell);
        assert!(plan8.windows[0].is_empty()); // floor(8/64) = 0
        for j in (0..ct8.order()).step_by(311) {
            assert_eq!(mollifier_eval(&ct8, &plan8, j, 0.6), Complex64::new(1.0, 0.0));
        }
    }

    // -- coefficient form --

    #[test]
    fn coefficients_frozen_small_cases() {
        let (ct, _, plan) = plan_d5();
        let field = ct.field();
        let alpha = 0.6;
        let poly = mollifier_coeffs(&ct, &plan, alpha, DEFAULT_TERM_BUDGET).unwrap();
        // 1, three primes, three squares, three cross products.
        assert_eq!(poly.coeffs.len(), 10);
        assert_eq!(poly.coeffs[&field.encode(&MonicPoly::one())], 1.0);
        // Single linear prime T (code 3): alpha/sqrt(3).
        let p_t = poly.coeffs[&3];
        assert!((p_t - alpha / 3f64.sqrt()).abs() < 1e-15);
        // T^2 (code 9): alpha^2/(2|T|) = alpha^2/6.
        let p_t2 = poly.coeffs[&9];
        assert!((p_t2 - alpha * alpha / 6.0).abs() < 1e-15);
        // T(T+1) = T^2+T (code 12): alpha^2/3, w = 1.
        let p_tt1 = poly.coeffs[&12];
        assert!((p_tt1 - alpha * alpha / 3.0).abs() < 1e-15);
        assert_eq!(poly.max_norm, 9);
        let (u_lo, u_hi) = poly.u_range(field);
        assert!((u_lo - alpha * alpha / 2.0).abs() < 1e-15);
        assert_eq!(u_hi, 1.0);
    }

    #[test]
    fn coefficient_form_matches_product_form() {
        let (ct, _, plan) = plan_d5();
        for alpha in [0.6, -0.4] {
            let poly = mollifier_coeffs(&ct, &plan, alpha, DEFAULT_TERM_BUDGET).unwrap();
            let mut j = 1u64;
            for _ in 0..30 {
                let via_product = mollifier_eval(&ct, &plan, j, alpha);
                let via_coeffs = poly.evaluate(&ct, j);
                let scale = 1.0 + via_product.norm();
                assert!(
                    (via_product - via_coeffs).norm() <= 1e-8 * scale,
                    "alpha={alpha} j={j}"
                );
                j += 7;
            }
        }
    }

    #[test]
    fn support_respects_envelope_and_budget() {
        let (ct, _, plan) = plan_d5();
        let poly = mollifier_coeffs(&ct, &plan, 0.6, DEFAULT_TERM_BUDGET).unwrap();
        let max_deg_exponent = support_envelope_exponent(&plan, ct.degree());
        let max_supported = (3f64).powf(max_deg_exponent);
        assert!((poly.max_norm as f64) <= max_supported + 1e-9);
        assert!(matches!(
            mollifier_coeffs(&ct, &plan, 0.6, 2),
            Err(Error::MemoryBudget { window: 1, .. })
        ));
    }

    // -- twisted moments and Hölder --

    #[test]
    fn twisted_second_moment_at_k_one_is_plain_second_moment() {
        let (ct, _, plan) = plan_d5();
        let ls = LSeriesTable::build(&ct, Route::Dft);
        let tw = twisted_moments(&ct, &ls, &plan, 1.0);
        let plain = crate::moments::moment(&ls.central_values(), 1.0).unwrap();
        assert_eq!(tw.second, plain);
    }

    #[test]
    fn twisted_first_moment_is_real_and_positive() {
        let (ct, _, plan) = plan_d5();
        let ls = LSeriesTable::build(&ct, Route::Dft);
        for k in [0.6, 1.0] {
            let tw = twisted_moments(&ct, &ls, &plan, k);
            assert!(tw.first.im.abs() <= 1e-8 * tw.first.norm(), "k={k}");
            assert!(tw.first.re > 0.0, "k={k}");
        }
    }

    #[test]
    fn holder_chains_hold_and_k_one_is_rejected() {
        let (ct, _, plan) = plan_d5();
        let ls = LSeriesTable::build(&ct, Route::Dft);
        for k in [0.5, 0.6, 2.0] {
            let rec = holder_chain_check(&ct, &ls, &plan, k).unwrap();
            assert!(rec.ok, "k={k}: lhs={} rhs={}", rec.lhs, rec.rhs);
        }
        assert!(matches!(
            holder_chain_check(&ct, &ls, &plan, 1.0),
            Err(Error::HolderExponentOne)
        ));
        assert!(matches!(
            holder_chain_check(&ct, &ls, &plan, -0.5),
            Err(Error::NegativeMomentOrder)
        ));
    }
}
