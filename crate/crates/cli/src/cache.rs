//! On-disk prime tables. One file per (q, degree) holding the sorted codes of
//! all monic irreducibles of that degree; writes go through a temp file plus
//! rename so concurrent runs never observe a torn table.

use std::fs;
use std::path::{Path, PathBuf};

use polymoment_core::ffpoly::{Field, PrimeTables};

pub const ENV_VAR: &str = "POLYMOMENT_CACHE";
const HEADER_TAG: &str = "ffprimes v1";

/// Effective cache directory: the environment variable wins over the flag;
/// `None` disables caching.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Ok(env_dir) = std::env::var(ENV_VAR) {
        if !env_dir.is_empty() {
            return Some(PathBuf::from(env_dir));
        }
    }
    flag.map(Path::to_path_buf)
}

fn table_path(dir: &Path, q: u64, n: usize) -> PathBuf {
    dir.join(format!("ffprimes-q{q}-d{n}.txt"))
}

/// Build prime tables through `max_degree`, reading any valid cached degree
/// files first and writing back the ones that were missing. A malformed or
/// stale file is ignored and recomputed; its replacement is written fresh.
pub fn tables_with_cache(field: Field, max_degree: usize, dir: Option<&Path>) -> PrimeTables {
    let mut tables = PrimeTables::new(field);
    let Some(dir) = dir else {
        tables.build_to(max_degree);
        return tables;
    };
    let mut missing = Vec::new();
    for n in 1..=max_degree {
        match read_table(dir, &field, n) {
            Some(primes) => {
                if tables.insert_precomputed(n, primes).is_err() {
                    eprintln!(
                        "warning: cache file {} failed validation, recomputing",
                        table_path(dir, field.q(), n).display()
                    );
                    missing.push(n);
                }
            }
            None => missing.push(n),
        }
    }
    tables.build_to(max_degree);
    if missing.is_empty() {
        return tables;
    }
    if let Err(err) = fs::create_dir_all(dir) {
        eprintln!("warning: cannot create cache dir {}: {err}", dir.display());
        return tables;
    }
    for n in missing {
        let primes = tables.get(n).expect("built through max_degree");
        if let Err(err) = write_table(dir, &field, n, primes) {
            eprintln!(
                "warning: cannot write cache file {}: {err}",
                table_path(dir, field.q(), n).display()
            );
        }
    }
    tables
}

fn read_table(dir: &Path, field: &Field, n: usize) -> Option<Vec<polymoment_core::ffpoly::MonicPoly>> {
    let path = table_path(dir, field.q(), n);
    let text = fs::read_to_string(&path).ok()?;
    let mut lines = text.lines();
    let header = lines.next()?;
    let expected_count = parse_header(header, field.q(), n)?;
    let mut primes = Vec::with_capacity(expected_count);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let code: u64 = line.parse().ok()?;
        primes.push(field.decode(code).ok()?);
    }
    if primes.len() != expected_count {
        return None;
    }
    Some(primes)
}

fn parse_header(header: &str, q: u64, n: usize) -> Option<usize> {
    let rest = header.strip_prefix(HEADER_TAG)?.trim();
    let mut count = None;
    let mut q_ok = false;
    let mut n_ok = false;
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=')?;
        match key {
            "q" => q_ok = value.parse::<u64>().ok()? == q,
            "n" => n_ok = value.parse::<usize>().ok()? == n,
            "count" => count = value.parse::<usize>().ok(),
            _ => return None,
        }
    }
    if q_ok && n_ok {
        count
    } else {
        None
    }
}

fn write_table(
    dir: &Path,
    field: &Field,
    n: usize,
    primes: &[polymoment_core::ffpoly::MonicPoly],
) -> std::io::Result<()> {
    let path = table_path(dir, field.q(), n);
    let mut body = format!("{HEADER_TAG} q={} n={} count={}\n", field.q(), n, primes.len());
    for p in primes {
        body.push_str(&field.encode(p).to_string());
        body.push('\n');
    }
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    fs::write(&tmp, body)?;
    match fs::rename(&tmp, &path) {
        Ok(()) => Ok(()),
        Err(err) => {
            let _ = fs::remove_file(&tmp);
            Err(err)
        }
    }
}
