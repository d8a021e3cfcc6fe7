//! Subcommand execution: resolve arguments into core calls and package the
//! results into a report document.

use std::time::Instant;

use num_complex::Complex64;
use serde_json::{json, Value};

use polymoment_core::bounds::{proxy_deficit_sweep, ProxyParams};
use polymoment_core::ffpoly::{Field, MonicPoly, PrimeTables};
use polymoment_core::lseries::{LSeriesTable, Route};
use polymoment_core::mollifier;
use polymoment_core::moments;
use polymoment_core::residue::CharacterTable;
use polymoment_core::sum::NeumaierComplex;

use crate::cache;
use crate::cli::{Cli, Command, ModulusArgs, RouteArg, SquaresArg};
use crate::report::{complex_value, Report};
use crate::{CliError, CliResult};

/// Runs one parsed invocation. The returned exit code is zero unless the
/// subcommand defines a softer failure mode (verify-all with failing
/// criteria exits 1 after emitting its report).
pub fn execute(cli: &Cli) -> CliResult<(Report, i32)> {
    let started = Instant::now();
    let (mut report, code) = dispatch(cli)?;
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok((report, code))
}

fn dispatch(cli: &Cli) -> CliResult<(Report, i32)> {
    match &cli.command {
        Command::Primes { q, max_deg } => Ok((primes(cli, *q, *max_deg)?, 0)),
        Command::Lvalues { q, modulus, route, zeros } => {
            Ok((lvalues(cli, *q, modulus, *route, *zeros)?, 0))
        }
        Command::Moments { q, deg_range, k, route } => {
            Ok((moments_cmd(cli, *q, deg_range, k, *route)?, 0))
        }
        Command::Tail { q, modulus, grid_min, grid_max, grid_steps } => {
            Ok((tail(cli, *q, modulus, *grid_min, *grid_max, *grid_steps)?, 0))
        }
        Command::Bounds { q, modulus, x_exponents, squares, per_char } => {
            Ok((bounds(cli, *q, modulus, x_exponents, *squares, *per_char)?, 0))
        }
        Command::Meanvalue { q, modulus, m, y } => Ok((meanvalue(cli, *q, modulus, *m, *y)?, 0)),
        Command::Harper { q, modulus, t_param, lambda, degree_cap, k } => {
            Ok((harper(cli, *q, modulus, *t_param, *lambda, *degree_cap, k)?, 0))
        }
        Command::Mollify { q, modulus, k, n_param, m_param, lambda, term_budget } => {
            Ok((mollify(cli, *q, modulus, *k, *n_param, *m_param, *lambda, *term_budget)?, 0))
        }
        Command::VerifyAll => verify_all(cli),
    }
}

fn make_field(q: u64) -> CliResult<Field> {
    Ok(Field::new(q)?)
}

fn route_of(arg: RouteArg) -> Route {
    match arg {
        RouteArg::Dft => Route::Dft,
        RouteArg::Naive => Route::Naive,
    }
}

fn route_name(arg: RouteArg) -> &'static str {
    match arg {
        RouteArg::Dft => "dft",
        RouteArg::Naive => "naive",
    }
}

/// Resolves the modulus selection to a concrete prime polynomial.
fn resolve_modulus(
    field: Field,
    tables: &mut PrimeTables,
    args: &ModulusArgs,
) -> CliResult<MonicPoly> {
    match (&args.modulus, args.degree) {
        (Some(text), None) => {
            let coeffs = crate::cli::parse_u64_list(text, "modulus coefficient")?;
            Ok(field.monic_from_coeffs(&coeffs)?)
        }
        (None, Some(degree)) => {
            if degree < 2 {
                return Err(CliError::Config(format!(
                    "modulus degree {degree} is below the minimum of 2"
                )));
            }
            Ok(tables.lowest_prime_of_degree(degree as usize))
        }
        (None, None) => Err(CliError::Config("pass either --modulus or --degree".into())),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    }
}

/// Builds the character table for a subcommand, with cached prime tables
/// warmed through the modulus degree.
fn character_context(
    cli: &Cli,
    q: u64,
    args: &ModulusArgs,
) -> CliResult<(CharacterTable, PrimeTables, u64)> {
    let field = make_field(q)?;
    let cache_dir = cache::resolve_dir(cli.cache_dir.as_deref());
    let warm_degree = args
        .degree
        .map(|d| d as usize)
        .or_else(|| {
            args.modulus
                .as_ref()
                .and_then(|text| crate::cli::parse_u64_list(text, "modulus coefficient").ok())
                .map(|coeffs| coeffs.len().saturating_sub(1))
        })
        .unwrap_or(2)
        .max(2);
    let mut tables = cache::tables_with_cache(field, warm_degree, cache_dir.as_deref());
    let modulus = resolve_modulus(field, &mut tables, args)?;
    let code = field.encode(&modulus);
    let ct = CharacterTable::new(field, modulus, &mut tables)?;
    Ok((ct, tables, code))
}

fn stamp(report: &mut Report, ct: &CharacterTable, code: u64) {
    report.modulus_code = Some(code);
    report.phi_star = Some(ct.phi_star());
}

fn primes(cli: &Cli, q: u64, max_deg: u32) -> CliResult<Report> {
    if max_deg == 0 {
        return Err(CliError::Config("max degree must be at least 1".into()));
    }
    let field = make_field(q)?;
    let cache_dir = cache::resolve_dir(cli.cache_dir.as_deref());
    let tables = cache::tables_with_cache(field, max_deg as usize, cache_dir.as_deref());
    let lnq = (q as f64).ln();
    let mut counts = Vec::new();
    for n in 1..=max_deg as usize {
        let sieved = tables.get(n).expect("built").len() as u64;
        let formula = field.prime_count(n as u32);
        counts.push(json!({
            "degree": n,
            "sieve": sieved,
            "formula": formula.to_string(),
            "agree": formula.to_string() == sieved.to_string(),
        }));
    }
    let mut mertens = Vec::new();
    for n in 1..=max_deg {
        let row = field.mertens(n);
        mertens.push(json!({
            "max_norm_degree": n,
            "s_log": row.s_log,
            "s_recip": row.s_recip,
            "fitted_b": row.fitted_b,
            "log_deviation": (row.s_log - n as f64 * lnq).abs(),
        }));
    }
    let config = json!({
        "command": "primes",
        "q": q,
        "max_deg": max_deg,
        "threads": cli.threads,
    });
    Ok(Report::new(q, config, json!({ "counts": counts, "mertens": mertens })))
}

fn lvalues(
    cli: &Cli,
    q: u64,
    modulus: &ModulusArgs,
    route: RouteArg,
    zeros: bool,
) -> CliResult<Report> {
    let (ct, _tables, code) = character_context(cli, q, modulus)?;
    let ls = LSeriesTable::build(&ct, route_of(route));
    let mut rows = Vec::new();
    let mut max_radius_deviation = 0.0f64;
    let mut zero_central_values = 0u64;
    for j in 1..ct.order() {
        let l = ls.central_value(j);
        if l.norm_sqr() == 0.0 {
            zero_central_values += 1;
        }
        let mut row = json!({
            "j": j,
            "is_even": ls.is_even(j),
            "l": { "re": l.re, "im": l.im },
            "abs": l.norm(),
        });
        if zeros {
            let report = ls.zeros(j)?;
            max_radius_deviation = max_radius_deviation.max(report.max_radius_deviation);
            row["zeros"] = json!({
                "trivial_root": report.trivial_root.map(complex_value),
                "nontrivial_count": report.nontrivial.len(),
                "max_radius_deviation": report.max_radius_deviation,
            });
        }
        rows.push(row);
    }
    let mut data = json!({
        "truncation_error": ls.truncation_error(),
        "zero_central_values": zero_central_values,
        "characters": rows,
    });
    if zeros {
        data["max_radius_deviation"] = json!(max_radius_deviation);
    }
    let config = json!({
        "command": "lvalues",
        "q": q,
        "modulus_code": code,
        "route": route_name(route),
        "zeros": zeros,
        "threads": cli.threads,
    });
    let mut report = Report::new(q, config, data);
    stamp(&mut report, &ct, code);
    Ok(report)
}

fn moments_cmd(cli: &Cli, q: u64, deg_range: &str, k: &str, route: RouteArg) -> CliResult<Report> {
    let (lo, hi) = crate::cli::parse_degree_range(deg_range)?;
    if lo < 2 {
        return Err(CliError::Config(format!("modulus degree {lo} is below the minimum of 2")));
    }
    let k_list = crate::cli::parse_f64_list(k, "moment order")?;
    let field = make_field(q)?;
    let cache_dir = cache::resolve_dir(cli.cache_dir.as_deref());
    let mut tables = cache::tables_with_cache(field, hi as usize, cache_dir.as_deref());
    let mut rows = Vec::new();
    let mut per_degree = Vec::new();
    for d in lo..=hi {
        let row = moments::growth_row(field, &mut tables, d as usize, &k_list, route_of(route))?;
        per_degree.push(row.ratios.clone());
        rows.push(json!({
            "degree": row.degree,
            "modulus_code": row.modulus_code,
            "phi_star": row.phi_star,
            "moments": row.moments,
            "ratios": row.ratios,
        }));
    }
    let mut summary = Vec::new();
    for (ki, &k) in k_list.iter().enumerate() {
        let ratios: Vec<f64> = per_degree.iter().map(|r| r[ki]).collect();
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let oracle_rel_err = if k == 1.0 {
            let worst = (lo..=hi)
                .zip(&ratios)
                .map(|(d, &r)| {
                    let oracle = moments::oracle_ratio_k1(q, d as usize);
                    ((r - oracle) / oracle).abs()
                })
                .fold(0.0f64, f64::max);
            Some(worst)
        } else {
            None
        };
        summary.push(json!({
            "k": k,
            "ratio_spread": max / min,
            "oracle_rel_err": oracle_rel_err,
        }));
    }
    let config = json!({
        "command": "moments",
        "q": q,
        "deg_range": [lo, hi],
        "k": k_list,
        "route": route_name(route),
        "threads": cli.threads,
    });
    Ok(Report::new(q, config, json!({ "rows": rows, "summary": summary })))
}

fn tail(
    cli: &Cli,
    q: u64,
    modulus: &ModulusArgs,
    grid_min: f64,
    grid_max: Option<f64>,
    grid_steps: u32,
) -> CliResult<Report> {
    if grid_steps == 0 {
        return Err(CliError::Config("grid needs at least one step".into()));
    }
    let (ct, _tables, code) = character_context(cli, q, modulus)?;
    let ls = LSeriesTable::build(&ct, Route::Dft);
    let values = ls.central_values();
    let lam2 = (ct.degree() as f64 * (q as f64).ln()).ln();
    let hard_cutoff = 6.0 * (ct.degree() as f64 * (q as f64).ln()) / lam2;
    let top = grid_max.unwrap_or(hard_cutoff * 1.05);
    if !(top > grid_min) {
        return Err(CliError::Config(format!("grid range [{grid_min}, {top}] is empty")));
    }
    let step = (top - grid_min) / grid_steps as f64;
    let v_grid: Vec<f64> = (0..=grid_steps).map(|i| grid_min + i as f64 * step).collect();
    let hist = moments::tail(&values, q, ct.degree(), &v_grid)?;
    let rows: Vec<Value> = hist
        .v_grid
        .iter()
        .zip(&hist.counts)
        .zip(&hist.gaussian_reference)
        .map(|((&v, &count), &gauss)| json!({ "v": v, "count": count, "gaussian_reference": gauss }))
        .collect();
    let regimes = hist.regimes.as_ref().map(|r| {
        json!({
            "gaussian_lo": r.gaussian_lo,
            "gaussian_hi": r.gaussian_hi,
            "intermediate_hi": r.intermediate_hi,
            "vanishing_hi": r.vanishing_hi,
        })
    });
    let data = json!({
        "rows": rows,
        "max_log_l": hist.max_log_l,
        "hard_cutoff": hist.hard_cutoff,
        "regimes": regimes,
        "offenders": hist.offenders,
    });
    let config = json!({
        "command": "tail",
        "q": q,
        "modulus_code": code,
        "grid_min": grid_min,
        "grid_max": top,
        "grid_steps": grid_steps,
        "threads": cli.threads,
    });
    let mut report = Report::new(q, config, data);
    stamp(&mut report, &ct, code);
    Ok(report)
}

fn bounds(
    cli: &Cli,
    q: u64,
    modulus: &ModulusArgs,
    x_exponents: &str,
    squares: SquaresArg,
    per_char: bool,
) -> CliResult<Report> {
    let exponents = crate::cli::parse_exponent_list(x_exponents)?;
    let forms: &[bool] = match squares {
        SquaresArg::Both => &[false, true],
        SquaresArg::With => &[true],
        SquaresArg::Without => &[false],
    };
    let (ct, mut tables, code) = character_context(cli, q, modulus)?;
    let ls = LSeriesTable::build(&ct, Route::Dft);
    let mut rows = Vec::new();
    let mut max_fitted_c = 0.0f64;
    for &(num, den) in &exponents {
        for &include_squares in forms {
            let params = ProxyParams { x_num: num, x_den: den, include_squares };
            let sweep = proxy_deficit_sweep(&ct, &mut tables, &ls, &params)?;
            max_fitted_c = max_fitted_c.max(sweep.fitted_c);
            let mut row = json!({
                "x_exponent": format!("{num}/{den}"),
                "include_squares": include_squares,
                "min_deficit": sweep.min_deficit,
                "fitted_c": sweep.fitted_c,
                "characters": sweep.deficits.len(),
            });
            if per_char {
                row["deficits"] = sweep
                    .deficits
                    .iter()
                    .map(|&(j, d)| json!({ "j": j, "deficit": d }))
                    .collect();
            }
            rows.push(row);
        }
    }
    let config = json!({
        "command": "bounds",
        "q": q,
        "modulus_code": code,
        "x_exponents": exponents.iter().map(|&(n, d)| format!("{n}/{d}")).collect::<Vec<_>>(),
        "squares": forms,
        "per_char": per_char,
        "threads": cli.threads,
    });
    let mut report = Report::new(q, config, json!({ "rows": rows, "max_fitted_c": max_fitted_c }));
    stamp(&mut report, &ct, code);
    Ok(report)
}

fn meanvalue(cli: &Cli, q: u64, modulus: &ModulusArgs, m: u32, y: u32) -> CliResult<Report> {
    if m == 0 || y == 0 {
        return Err(CliError::Config("both m and y must be at least 1".into()));
    }
    let (ct, mut tables, code) = character_context(cli, q, modulus)?;
    let record =
        polymoment_core::bounds::mean_value_check(&ct, &mut tables, m, y, |_| Complex64::new(1.0, 0.0))?;
    let data = json!({
        "lhs": record.lhs,
        "rhs_exact": record.rhs_exact,
        "rhs_bound": record.rhs_bound,
        "diagonal_ok": record.diagonal_ok,
        "bound_ok": record.bound_ok,
    });
    let config = json!({
        "command": "meanvalue",
        "q": q,
        "modulus_code": code,
        "m": m,
        "y": y,
        "weights": "unit",
        "threads": cli.threads,
    });
    let mut report = Report::new(q, config, data);
    stamp(&mut report, &ct, code);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn harper(
    cli: &Cli,
    q: u64,
    modulus: &ModulusArgs,
    t_param: u32,
    lambda: f64,
    degree_cap: Option<usize>,
    k: &str,
) -> CliResult<Report> {
    let k_list = crate::cli::parse_f64_list(k, "moment order")?;
    let (ct, mut tables, code) = character_context(cli, q, modulus)?;
    let sched =
        polymoment_core::bounds::harper_schedule(q, ct.degree(), t_param, lambda, degree_cap)?;
    let windows: Vec<Value> = sched
        .windows()
        .iter()
        .map(|w| {
            json!({
                "index": w.index,
                "alpha": sched.alpha(w.index),
                "threshold": sched.threshold(w.index),
                "degree_lo": w.degree_lo,
                "degree_hi": w.degree_hi,
                "clipped": w.clipped,
                "empty": w.is_empty(),
            })
        })
        .collect();
    let partition = polymoment_core::bounds::classify_partition(&ct, &mut tables, &sched)?;
    let mut majorant_rows = Vec::new();
    for &kk in &k_list {
        for s in 1..=sched.j_cap {
            let members: Vec<u64> = partition
                .assignment
                .iter()
                .enumerate()
                .filter_map(|(j, a)| (*a == Some(s)).then_some(j as u64))
                .collect();
            let mut passes = 0u64;
            let mut rejected = 0u64;
            let mut worst_margin = f64::NEG_INFINITY;
            for &j in &members {
                match polymoment_core::bounds::majorant_check(&ct, &mut tables, j, &sched, kk, s) {
                    Ok(rec) => {
                        if rec.ok {
                            passes += 1;
                        }
                        worst_margin = worst_margin.max(rec.lhs - rec.rhs);
                    }
                    Err(polymoment_core::Error::MajorantPrecondition { .. }) => rejected += 1,
                    Err(err) => return Err(err.into()),
                }
            }
            majorant_rows.push(json!({
                "k": kk,
                "segment": s,
                "characters": members.len(),
                "passes": passes,
                "precondition_rejected": rejected,
                "worst_margin": if worst_margin.is_finite() { Some(worst_margin) } else { None },
            }));
        }
    }
    let data = json!({
        "alpha0": sched.alpha0,
        "lambda_eff": sched.lambda_eff,
        "j_cap": sched.j_cap,
        "degenerate": sched.degenerate,
        "degree_cap": sched.degree_cap,
        "windows": windows,
        "partition": {
            "sizes": partition.sizes,
            "cover_ok": partition.cover_ok,
            "disjoint_ok": partition.disjoint_ok,
        },
        "majorant": majorant_rows,
    });
    let config = json!({
        "command": "harper",
        "q": q,
        "modulus_code": code,
        "T": t_param,
        "lambda": lambda,
        "degree_cap": degree_cap,
        "k": k_list,
        "threads": cli.threads,
    });
    let mut report = Report::new(q, config, data);
    stamp(&mut report, &ct, code);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn mollify(
    cli: &Cli,
    q: u64,
    modulus: &ModulusArgs,
    k: f64,
    n_param: u32,
    m_param: u32,
    lambda: Option<f64>,
    term_budget: u64,
) -> CliResult<Report> {
    if n_param == 0 || m_param == 0 {
        return Err(CliError::Config("both N and M must be at least 1".into()));
    }
    let (ct, mut tables, code) = character_context(cli, q, modulus)?;
    let ells = mollifier::ell_sequence(q, ct.degree(), n_param, m_param, lambda)?;
    let plan = mollifier::build_plan(&ct, &mut tables, ells);
    let ls = LSeriesTable::build(&ct, Route::Dft);

    let window_rows: Vec<Value> = plan
        .windows
        .iter()
        .map(|w| {
            json!({
                "index": w.index,
                "ell": w.ell,
                "degree_lo": w.degree_lo,
                "degree_hi": w.degree_hi,
                "primes": w.prime_count(),
                "empty": w.is_empty(),
            })
        })
        .collect();

    let poly_k = mollifier::mollifier_coeffs(&ct, &plan, k, term_budget)?;
    let poly_km1 = mollifier::mollifier_coeffs(&ct, &plan, k - 1.0, term_budget)?;
    let sample = (ct.order() - 1).min(30);
    let mut identity_max_rel_dev = 0.0f64;
    for j in 1..=sample {
        for (alpha, poly) in [(k, &poly_k), (k - 1.0, &poly_km1)] {
            let direct = mollifier::mollifier_eval(&ct, &plan, j, alpha);
            let via_coeffs = poly.evaluate(&ct, j);
            let dev = (direct - via_coeffs).norm() / (1.0 + direct.norm());
            identity_max_rel_dev = identity_max_rel_dev.max(dev);
        }
    }

    let tw = mollifier::twisted_moments(&ct, &ls, &plan, k);
    let holder = if k == 1.0 {
        None
    } else {
        Some(mollifier::holder_chain_check(&ct, &ls, &plan, k)?)
    };
    let phi_star = ct.phi_star() as f64;
    let (u_lo, u_hi) = poly_k.u_range(ct.field());

    let data = json!({
        "ells": plan.ell.ells,
        "R": plan.ell.r,
        "lambda": plan.ell.lambda,
        "desk_scale_fallback": plan.ell.desk_scale_fallback,
        "side_ok": plan.ell.side_ok,
        "window_degree_ranges": window_rows,
        "support_envelope_exponent": mollifier::support_envelope_exponent(&plan, ct.degree()),
        "coefficient_terms": [poly_k.coeffs.len(), poly_km1.coeffs.len()],
        "u_range": [u_lo, u_hi],
        "identity_max_rel_dev": identity_max_rel_dev,
        "first_moment": complex_value(tw.first),
        "second_moment": tw.second,
        "ratios": {
            "first_per_char": tw.first.re / phi_star,
            "second_per_char": tw.second / phi_star,
        },
        "holder": holder.map(|rec| json!({ "lhs": rec.lhs, "rhs": rec.rhs })),
        "holder_ok": holder.map(|rec| rec.ok),
    });
    let config = json!({
        "command": "mollify",
        "q": q,
        "modulus_code": code,
        "k": k,
        "N": n_param,
        "M": m_param,
        "lambda": lambda,
        "term_budget": term_budget,
        "threads": cli.threads,
    });
    let mut report = Report::new(q, config, data);
    stamp(&mut report, &ct, code);
    Ok(report)
}

fn verify_all(cli: &Cli) -> CliResult<(Report, i32)> {
    let threads = if cli.threads == 0 { 1 } else { cli.threads };
    let results = crate::verify::run_all(threads);
    let mut all_passed = true;
    let mut rows = Vec::new();
    for r in &results {
        eprintln!("criterion {}: {} - {}", r.index, if r.passed { "PASS" } else { "FAIL" }, r.name);
        all_passed &= r.passed;
        let scalars: serde_json::Map<String, Value> =
            r.scalars.iter().map(|(name, v)| (name.clone(), json!(v))).collect();
        rows.push(json!({
            "index": r.index,
            "name": r.name,
            "passed": r.passed,
            "scalars": scalars,
            "info": r.info,
        }));
    }
    let config = json!({ "command": "verify-all", "threads": threads });
    let report = Report::new(0, config, json!({ "criteria": rows, "all_passed": all_passed }));
    Ok((report, if all_passed { 0 } else { 1 }))
}

/// Sum of central values over non-principal characters.
pub fn first_moment_sum(ls: &LSeriesTable) -> Complex64 {
    let mut acc = NeumaierComplex::new();
    for j in 1..ls.order() {
        acc.add(ls.central_value(j));
    }
    acc.value()
}
