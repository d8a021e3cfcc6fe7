//! End-to-end verification harness. Each criterion is a self-contained
//! check with pinned tolerances; `run_all` executes all twelve inside a
//! rayon pool of the requested width. Every parallel section collects in
//! index order before reducing, so scalar outputs are identical for any
//! thread count.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use polymoment_core::bounds::{
    classify_partition, harper_schedule, majorant_check, mean_value_check, proxy_deficit_sweep,
    ProxyParams,
};
use polymoment_core::ffpoly::{Field, PrimeTables};
use polymoment_core::lseries::{coefficient_direct, LSeriesTable, Route};
use polymoment_core::mollifier;
use polymoment_core::moments::{growth_row, moment, oracle_ratio_k1};
use polymoment_core::residue::CharacterTable;

use crate::runner::first_moment_sum;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Named scalar outputs, used for cross-thread-count comparison.
    pub scalars: Vec<(String, f64)>,
    pub info: String,
}

impl CriterionResult {
    fn new(index: usize, name: &'static str) -> Self {
        CriterionResult { index, name, passed: true, scalars: Vec::new(), info: String::new() }
    }

    fn scalar(&mut self, name: impl Into<String>, value: f64) {
        self.scalars.push((name.into(), value));
    }

    fn require(&mut self, ok: bool, what: &str) {
        if !ok {
            self.passed = false;
            if !self.info.is_empty() {
                self.info.push_str("; ");
            }
            self.info.push_str("failed: ");
            self.info.push_str(what);
        }
    }

    fn note(&mut self, what: &str) {
        if !self.info.is_empty() {
            self.info.push_str("; ");
        }
        self.info.push_str(what);
    }
}

/// Criteria 1-11 under a pool of the requested width, then the
/// determinism criterion, which manages its own 1- and 8-thread pools.
pub fn run_all(threads: usize) -> Vec<CriterionResult> {
    let mut results = pool_criteria(threads);
    results.push(criterion_12());
    results
}

fn context(q: u64, degree: usize) -> (CharacterTable, PrimeTables) {
    let field = Field::new(q).expect("prime q");
    let mut tables = PrimeTables::new(field);
    let modulus = tables.lowest_prime_of_degree(degree);
    let ct = CharacterTable::new(field, modulus, &mut tables).expect("prime modulus");
    (ct, tables)
}

fn context_coeffs(q: u64, coeffs: &[u64]) -> (CharacterTable, PrimeTables) {
    let field = Field::new(q).expect("prime q");
    let mut tables = PrimeTables::new(field);
    let modulus = field.monic_from_coeffs(coeffs).expect("monic");
    let ct = CharacterTable::new(field, modulus, &mut tables).expect("prime modulus");
    (ct, tables)
}

fn rel_err(actual: f64, expected: f64) -> f64 {
    ((actual - expected) / expected).abs()
}

/// Second moment of |L(1/2)| against the closed forms 59 - 8 sqrt(3)
/// (q = 3, Q = T^3 + 2T + 1) and 42 - 2 sqrt(5) (q = 5, Q = T^2 + 2),
/// each within 1e-9 relative and under one second.
pub fn criterion_1() -> CriterionResult {
    let mut r = CriterionResult::new(1, "exact second-moment values");
    let cases: [(u64, &[u64], f64); 2] = [
        (3, &[1, 2, 0, 1], 59.0 - 8.0 * 3.0f64.sqrt()),
        (5, &[2, 0, 1], 42.0 - 2.0 * 5.0f64.sqrt()),
    ];
    for (q, coeffs, expected) in cases {
        let t0 = Instant::now();
        let (ct, _tables) = context_coeffs(q, coeffs);
        let ls = LSeriesTable::build(&ct, Route::Dft);
        let m = moment(&ls.central_values(), 1.0).expect("k = 1");
        let secs = t0.elapsed().as_secs_f64();
        let err = rel_err(m, expected);
        r.scalar(format!("second_moment_q{q}"), m);
        r.scalar(format!("rel_err_q{q}"), err);
        r.require(err <= 1e-9, &format!("q = {q} second moment off by {err:.3e}"));
        r.require(secs < 1.0, &format!("q = {q} took {secs:.2}s"));
    }
    r
}

/// First moment sum_j L(1/2, chi_j) = (|Q| - 1) - (q^(d/2) - 1)/(sqrt q - 1)
/// for q = 3 and the lowest prime modulus of each degree 3..=8, within
/// 1e-9 relative with imaginary part at most 1e-9 |Q|; under 30 s total.
pub fn criterion_2() -> CriterionResult {
    let mut r = CriterionResult::new(2, "first-moment closed form");
    let t0 = Instant::now();
    let degrees: Vec<usize> = (3..=8).collect();
    let rows: Vec<(f64, f64)> = degrees
        .par_iter()
        .map(|&d| {
            let (ct, _tables) = context(3, d);
            let ls = LSeriesTable::build(&ct, Route::Dft);
            let s = first_moment_sum(&ls);
            (s.re, s.im)
        })
        .collect();
    for (&d, &(re, im)) in degrees.iter().zip(&rows) {
        let modulus_norm = 3.0f64.powi(d as i32);
        let sq = 3.0f64.sqrt();
        let expected = (modulus_norm - 1.0) - (sq.powi(d as i32) - 1.0) / (sq - 1.0);
        let err = rel_err(re, expected);
        r.scalar(format!("first_moment_d{d}"), re);
        r.require(err <= 1e-9, &format!("degree {d} first moment off by {err:.3e}"));
        r.require(
            im.abs() <= 1e-9 * modulus_norm,
            &format!("degree {d} imaginary part {im:.3e}"),
        );
    }
    let secs = t0.elapsed().as_secs_f64();
    r.scalar("elapsed_s", secs);
    r.require(secs < 30.0, &format!("took {secs:.1}s"));
    r
}

/// Sieved prime counts match the divisor-sum formula exactly for q in
/// {3, 5} through degree 8, and the prime-norm partial sums track n log q
/// within 2 log q through degree 10.
pub fn criterion_3() -> CriterionResult {
    let mut r = CriterionResult::new(3, "prime counts and partial sums");
    for q in [3u64, 5] {
        let field = Field::new(q).expect("prime q");
        let mut tables = PrimeTables::new(field);
        tables.build_to(8);
        for n in 1..=8usize {
            let sieved = tables.get(n).expect("built").len().to_string();
            let formula = field.prime_count(n as u32).to_string();
            r.require(
                sieved == formula,
                &format!("q = {q} degree {n}: sieve {sieved} vs formula {formula}"),
            );
        }
        let lnq = (q as f64).ln();
        let mut worst = 0.0f64;
        for n in 1..=10 {
            let sums = field.mertens(n);
            let dev = (sums.s_log - n as f64 * lnq).abs();
            worst = worst.max(dev);
            r.require(
                dev <= 2.0 * lnq,
                &format!("q = {q} degree {n}: log-weight sum off by {dev:.3}"),
            );
        }
        r.scalar(format!("max_log_dev_q{q}"), worst);
    }
    r
}

/// Series coefficients vanish at and beyond the modulus degree: for q = 3,
/// degrees 3..=6, every non-principal character has |c_n| <= 1e-8 q^(n/2)
/// at n = d and n = d + 1, via the direct reduction route.
pub fn criterion_4() -> CriterionResult {
    let mut r = CriterionResult::new(4, "coefficient support cutoff");
    for d in 3..=6usize {
        let (ct, _tables) = context(3, d);
        let order = ct.order();
        for n in [d as u32, d as u32 + 1] {
            let tolerance = 1e-8 * 3.0f64.powf(n as f64 / 2.0);
            let maxima: Vec<f64> = (1..order)
                .into_par_iter()
                .map(|j| coefficient_direct(&ct, n, j).norm())
                .collect();
            let worst = maxima.iter().fold(0.0f64, |a, &b| a.max(b));
            r.scalar(format!("max_c{n}_d{d}"), worst);
            r.require(
                worst <= tolerance,
                &format!("degree {d}, n = {n}: |c_n| reaches {worst:.3e}"),
            );
        }
    }
    r
}

/// Every nontrivial zero sits on |u| = q^(-1/2) within 1e-6 of sqrt(q)|u|,
/// for q = 3 and degrees 3..=5; trivial roots appear exactly for even
/// characters and are excluded from the radius check.
pub fn criterion_5() -> CriterionResult {
    let mut r = CriterionResult::new(5, "zero radii");
    let sq = 3.0f64.sqrt();
    for d in 3..=5usize {
        let (ct, _tables) = context(3, d);
        let ls = LSeriesTable::build(&ct, Route::Dft);
        let rows: Vec<(f64, bool)> = (1..ct.order())
            .into_par_iter()
            .map(|j| {
                let report = ls.zeros(j).expect("non-principal");
                let dev = report
                    .nontrivial
                    .iter()
                    .map(|z| (z.norm() * sq - 1.0).abs())
                    .fold(0.0f64, f64::max);
                let classified = report.is_even == report.trivial_root.is_some();
                (dev, classified)
            })
            .collect();
        let worst = rows.iter().map(|&(dev, _)| dev).fold(0.0f64, f64::max);
        let all_classified = rows.iter().all(|&(_, ok)| ok);
        r.scalar(format!("max_radius_dev_d{d}"), worst);
        r.require(worst <= 1e-6, &format!("degree {d}: radius deviation {worst:.3e}"));
        r.require(all_classified, &format!("degree {d}: trivial-root classification"));
    }
    r
}

/// The truncated-square surrogate for |L(1/2)|^2 should stay consistent
/// across degrees: finite everywhere, with the worst-case error at degree 6
/// below the degree-3 error and at most one inversion along the way. The
/// surrogate's dropped cross band grows with the degree, so this check
/// fails; the errors are reported per degree.
pub fn criterion_6() -> CriterionResult {
    let mut r = CriterionResult::new(6, "truncated-square consistency");
    let mut errs = Vec::new();
    for d in 3..=6usize {
        let (ct, _tables) = context(3, d);
        let ls = LSeriesTable::build(&ct, Route::Dft);
        let worst: f64 = (1..ct.order())
            .map(|j| (ls.central_sq_truncated(j) - ls.central_value(j).norm_sqr()).abs())
            .fold(0.0, f64::max);
        r.scalar(format!("surrogate_err_d{d}"), worst);
        r.require(worst.is_finite(), &format!("degree {d} error not finite"));
        errs.push(worst);
    }
    let inversions = errs.windows(2).filter(|w| w[1] > w[0]).count();
    r.scalar("inversions", inversions as f64);
    r.require(
        errs[3] < errs[0],
        &format!("degree-6 error {:.3} is not below degree-3 error {:.3}", errs[3], errs[0]),
    );
    r.require(inversions <= 1, &format!("{inversions} inversions across degrees 3..=6"));
    r
}

/// Mean-value identity at q = 3, degree 5, unit weights: the character-sum
/// side matches the diagonal side to 1e-9 relative and respects the
/// m! |Q| (sum 1/|P|)^m bound, for (m, y) in {1, 2}^2.
pub fn criterion_7() -> CriterionResult {
    let mut r = CriterionResult::new(7, "mean-value identity");
    let (ct, mut tables) = context(3, 5);
    for (m, y) in [(1u32, 1u32), (1, 2), (2, 1), (2, 2)] {
        let record = mean_value_check(&ct, &mut tables, m, y, |_| Complex64::new(1.0, 0.0))
            .expect("hypothesis holds");
        let dev = rel_err(record.lhs, record.rhs_exact);
        r.scalar(format!("rel_dev_m{m}_y{y}"), dev);
        r.require(record.diagonal_ok, &format!("(m, y) = ({m}, {y}) diagonal off by {dev:.3e}"));
        r.require(record.bound_ok, &format!("(m, y) = ({m}, {y}) exceeds the moment bound"));
    }
    r
}

/// The prime-sum proxy for log|L(1/2)| needs only a bounded additive
/// constant: for q = 3, degrees 3..=6, cutoffs x = |Q|^(1/3), |Q|^(1/2),
/// |Q|, and both forms, the fitted constant stays at most 5.
pub fn criterion_8() -> CriterionResult {
    let mut r = CriterionResult::new(8, "proxy-bound fitted constant");
    let mut configs = Vec::new();
    for d in 3..=6usize {
        for (num, den) in [(1u64, 3u64), (1, 2), (1, 1)] {
            for include_squares in [false, true] {
                configs.push((d, num, den, include_squares));
            }
        }
    }
    let cs: Vec<f64> = configs
        .par_iter()
        .map(|&(d, num, den, include_squares)| {
            let (ct, mut tables) = context(3, d);
            let ls = LSeriesTable::build(&ct, Route::Dft);
            let params = ProxyParams { x_num: num, x_den: den, include_squares };
            proxy_deficit_sweep(&ct, &mut tables, &ls, &params).expect("valid cutoff").fitted_c
        })
        .collect();
    let mut max_c = 0.0f64;
    for (&(d, num, den, include_squares), &c) in configs.iter().zip(&cs) {
        max_c = max_c.max(c);
        r.require(
            c <= 5.0,
            &format!("degree {d}, x = |Q|^({num}/{den}), squares = {include_squares}: C = {c:.3}"),
        );
    }
    r.scalar("max_fitted_c", max_c);
    r
}

/// Multi-scale segmentation at q = 3, degree 5. With T = 3 and a large
/// lambda the ladder has two empty windows, so the partition puts every
/// character in the final segment and the majorant holds with equality;
/// all of that is asserted, including the product bound for k in
/// {0.5, 1, 2}. A second, live-window schedule (T = 0, lambda = 2) must
/// still partition exactly; its majorant outcome is reported only.
pub fn criterion_9() -> CriterionResult {
    let mut r = CriterionResult::new(9, "block partition and majorant");
    let (ct, mut tables) = context(3, 5);

    let sched = harper_schedule(3, 5, 3, 100.0, None).expect("schedule");
    r.require(!sched.degenerate, "asserted schedule is degenerate");
    r.scalar("asserted_j_cap", sched.j_cap as f64);
    let part = classify_partition(&ct, &mut tables, &sched).expect("non-degenerate");
    r.require(part.cover_ok, "asserted schedule: cover");
    r.require(part.disjoint_ok, "asserted schedule: disjointness");
    let assigned: u64 = part.sizes.iter().sum();
    r.scalar("asserted_assigned", assigned as f64);
    r.require(assigned == ct.order() - 1, "asserted schedule misses characters");
    r.require(
        part.sizes[sched.j_cap] == ct.order() - 1,
        "asserted schedule: empty windows must send everyone to the last segment",
    );
    let mut checked = 0u64;
    for (j, slot) in part.assignment.iter().enumerate() {
        let Some(s) = *slot else { continue };
        if s == 0 {
            continue;
        }
        for k in [0.5, 1.0, 2.0] {
            let rec = majorant_check(&ct, &mut tables, j as u64, &sched, k, s)
                .expect("blocks vanish, precondition holds");
            r.require(
                rec.ok && rec.lhs == 1.0 && rec.rhs == 1.0,
                &format!("majorant at j = {j}, k = {k} is not the exact 1 <= 1 case"),
            );
            checked += 1;
        }
    }
    r.scalar("asserted_majorant_checks", checked as f64);
    r.require(checked == 3 * (ct.order() - 1), "not every character was majorant-checked");

    let live = harper_schedule(3, 5, 0, 2.0, None).expect("schedule");
    r.require(!live.degenerate, "live schedule is degenerate");
    let live_part = classify_partition(&ct, &mut tables, &live).expect("non-degenerate");
    r.require(live_part.cover_ok, "live schedule: cover");
    r.require(live_part.disjoint_ok, "live schedule: disjointness");
    let live_assigned: u64 = live_part.sizes.iter().sum();
    r.require(live_assigned == ct.order() - 1, "live schedule misses characters");
    let mut live_pass = 0u64;
    let mut live_fail = 0u64;
    let mut live_rejected = 0u64;
    for (j, slot) in live_part.assignment.iter().enumerate() {
        let Some(s) = *slot else { continue };
        if s == 0 {
            continue;
        }
        for k in [0.5, 1.0, 2.0] {
            match majorant_check(&ct, &mut tables, j as u64, &live, k, s) {
                Ok(rec) if rec.ok => live_pass += 1,
                Ok(_) => live_fail += 1,
                Err(polymoment_core::Error::MajorantPrecondition { .. }) => live_rejected += 1,
                Err(err) => panic!("unexpected majorant error: {err}"),
            }
        }
    }
    r.scalar("live_majorant_pass", live_pass as f64);
    r.scalar("live_majorant_fail", live_fail as f64);
    r.scalar("live_majorant_rejected", live_rejected as f64);
    r.note(&format!(
        "live-window majorant (report only): {live_pass} pass, {live_fail} fail, \
         {live_rejected} precondition-rejected"
    ));
    r
}

/// Mollifier checks at q = 3, degree 5, single length-2 window: the
/// product form matches the coefficient form to 1e-8 relative on the first
/// 30 characters at alpha = 0.6 and -0.4; the twisted second moment at
/// k = 1 equals the plain second moment bit for bit; the Hoelder chains
/// hold at k = 0.5, 0.6, and 2.
pub fn criterion_10() -> CriterionResult {
    let mut r = CriterionResult::new(10, "mollifier identities");
    let (ct, mut tables) = context(3, 5);
    let ells = mollifier::ell_sequence(3, 5, 2, 1, Some(0.5)).expect("lambda > 0");
    let plan = mollifier::build_plan(&ct, &mut tables, ells);
    let ls = LSeriesTable::build(&ct, Route::Dft);

    let mut worst = 0.0f64;
    for alpha in [0.6, -0.4] {
        let poly =
            mollifier::mollifier_coeffs(&ct, &plan, alpha, 1u64 << 20).expect("small support");
        for j in 1..=30u64 {
            let direct = mollifier::mollifier_eval(&ct, &plan, j, alpha);
            let dev = (direct - poly.evaluate(&ct, j)).norm() / (1.0 + direct.norm());
            worst = worst.max(dev);
        }
    }
    r.scalar("identity_max_rel_dev", worst);
    r.require(worst <= 1e-8, &format!("coefficient form deviates by {worst:.3e}"));

    let tw = mollifier::twisted_moments(&ct, &ls, &plan, 1.0);
    let plain = moment(&ls.central_values(), 1.0).expect("k = 1");
    r.scalar("twisted_second_k1", tw.second);
    r.scalar("plain_second", plain);
    r.require(
        tw.second.to_bits() == plain.to_bits(),
        "twisted second moment at k = 1 is not bitwise the plain second moment",
    );

    for k in [0.5, 0.6, 2.0] {
        let rec = mollifier::holder_chain_check(&ct, &ls, &plan, k).expect("k != 1");
        r.scalar(format!("holder_margin_k{k}"), rec.rhs - rec.lhs);
        r.require(rec.ok, &format!("Hoelder chain fails at k = {k}"));
    }
    r
}

/// Moment growth at q = 3 over degrees 3..=8 for k in {0.5, 1, 2}: the
/// normalized ratios m_k / (phi* d^(k^2)) stay within a factor 3 across
/// degrees, the k = 1 ratios match the closed form to 1e-9 relative, and
/// the sweep finishes inside ten minutes.
pub fn criterion_11() -> CriterionResult {
    let mut r = CriterionResult::new(11, "moment growth");
    let t0 = Instant::now();
    let ks = [0.5, 1.0, 2.0];
    let degrees: Vec<usize> = (3..=8).collect();
    let rows: Vec<Vec<f64>> = degrees
        .par_iter()
        .map(|&d| {
            let field = Field::new(3).expect("prime q");
            let mut tables = PrimeTables::new(field);
            growth_row(field, &mut tables, d, &ks, Route::Dft).expect("k >= 0").ratios
        })
        .collect();
    for (ki, &k) in ks.iter().enumerate() {
        let ratios: Vec<f64> = rows.iter().map(|row| row[ki]).collect();
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = max / min;
        r.scalar(format!("ratio_spread_k{k}"), spread);
        r.require(spread <= 3.0, &format!("k = {k} ratio spread {spread:.3}"));
        if k == 1.0 {
            let worst = degrees
                .iter()
                .zip(&ratios)
                .map(|(&d, &ratio)| rel_err(ratio, oracle_ratio_k1(3, d)))
                .fold(0.0f64, f64::max);
            r.scalar("oracle_rel_err_k1", worst);
            r.require(worst <= 1e-9, &format!("k = 1 ratio off by {worst:.3e}"));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    r.scalar("elapsed_s", secs);
    r.require(secs < 600.0, &format!("took {secs:.0}s"));
    r
}

/// The full verification run is thread-count independent: every scalar
/// output of criteria 1-11 agrees between a 1-thread and an 8-thread pool
/// to 1e-9 relative. The summation orders are fixed, so the outputs are
/// expected to agree bitwise; wall-clock scalars are excluded.
pub fn criterion_12() -> CriterionResult {
    let mut r = CriterionResult::new(12, "thread-count determinism");
    let single = pool_criteria(1);
    let wide = pool_criteria(8);
    let mut worst = 0.0f64;
    let mut bitwise = true;
    let mut compared = 0usize;
    for (a, b) in single.iter().zip(&wide) {
        r.require(a.index == b.index, "criterion orders differ");
        r.require(a.scalars.len() == b.scalars.len(), "scalar shapes differ");
        r.require(a.passed == b.passed, "pass/fail outcomes differ across thread counts");
        for ((name_a, va), (name_b, vb)) in a.scalars.iter().zip(&b.scalars) {
            r.require(name_a == name_b, "scalar orders differ");
            if name_a.ends_with("elapsed_s") {
                continue;
            }
            bitwise &= va.to_bits() == vb.to_bits();
            let dev = if *va == *vb {
                0.0
            } else {
                (va - vb).abs() / va.abs().max(vb.abs()).max(f64::MIN_POSITIVE)
            };
            worst = worst.max(dev);
            compared += 1;
            r.require(
                dev <= 1e-9,
                &format!("criterion {} {name_a}: 1 vs 8 threads deviate by {dev:.3e}", a.index),
            );
        }
    }
    r.scalar("scalars_compared", compared as f64);
    r.scalar("max_rel_dev", worst);
    r.scalar("bitwise_equal", if bitwise { 1.0 } else { 0.0 });
    r.note(if bitwise { "outputs agree bitwise" } else { "outputs differ in low bits" });
    r
}

/// Criteria 1-11 inside a fresh pool of the given width.
fn pool_criteria(threads: usize) -> Vec<CriterionResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        vec![
            criterion_1(),
            criterion_2(),
            criterion_3(),
            criterion_4(),
            criterion_5(),
            criterion_6(),
            criterion_7(),
            criterion_8(),
            criterion_9(),
            criterion_10(),
            criterion_11(),
        ]
    })
}
