//! Monic polynomial arithmetic over F_q[T] for prime q.
//!
//! A monic polynomial of degree n is identified with the integer code
//! sum(coeffs[i] * q^i); monic codes of degree n form the contiguous range
//! [q^n, 2*q^n). The norm of f is |f| = q^deg(f). Irreducibles play the role
//! primes play over the integers, and the counting function pi_q(n) obeys an
//! exact Moebius-inversion formula that the sieve is tested against.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
// Float supplies ln/recip on f64 when std's inherent methods are absent.
use num_traits::{ToPrimitive, Zero};

use crate::sum::Neumaier;
use crate::{Error, Result};

/// The coefficient field F_q. Only prime q is supported; prime-power
/// coefficient fields would need a different residue representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    q: u64,
}

/// A monic polynomial, coefficients low degree first, leading coefficient 1.
///
/// The zero polynomial is not representable; the constant 1 is (degree 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonicPoly {
    coeffs: Vec<u64>,
}

impl MonicPoly {
    /// The constant polynomial 1.
    pub fn one() -> Self {
        MonicPoly { coeffs: vec![1] }
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, _) => write!(f, "{c}T")?,
                (_, 1) => write!(f, "T^{i}")?,
                (_, _) => write!(f, "{c}T^{i}")?,
            }
        }
        Ok(())
    }
}

impl Field {
    /// Builds the field, rejecting composite or unit q.
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 || !is_prime_u64(q) {
            return Err(Error::Invalid(alloc::format!("q = {q} is not prime")));
        }
        Ok(Field { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// q^n as a machine integer. Callers stay within the desk-scale range
    /// where this fits; the exact counting formula below uses big integers.
    pub fn pow(&self, n: u32) -> u64 {
        self.q.checked_pow(n).expect("q^n exceeds u64")
    }

    #[inline]
    fn csub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    fn cmul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.q
    }

    /// Integer code of a coefficient vector (low degree first).
    pub fn code_of(&self, coeffs: &[u64]) -> u64 {
        let mut code: u64 = 0;
        for &c in coeffs.iter().rev() {
            code = code
                .checked_mul(self.q)
                .and_then(|x| x.checked_add(c))
                .expect("code exceeds u64");
        }
        code
    }

    /// Base-q digits of a code, low digit first. Zero decodes to an empty
    /// vector (the zero polynomial).
    pub fn coeffs_of(&self, code: u64) -> Vec<u64> {
        let mut coeffs = Vec::new();
        let mut rest = code;
        while rest > 0 {
            coeffs.push(rest % self.q);
            rest /= self.q;
        }
        coeffs
    }

    /// Canonical integer code of a monic polynomial.
    pub fn encode(&self, f: &MonicPoly) -> u64 {
        self.code_of(&f.coeffs)
    }

    /// Inverse of [`encode`]: rejects codes whose leading base-q digit is
    /// not 1 (non-monic), including code 0.
    pub fn decode(&self, code: u64) -> Result<MonicPoly> {
        let coeffs = self.coeffs_of(code);
        match coeffs.last() {
            Some(&1) => Ok(MonicPoly { coeffs }),
            _ => Err(Error::NonMonicCode { code }),
        }
    }

    /// Validates an explicit coefficient vector (low degree first).
    pub fn monic_from_coeffs(&self, coeffs: &[u64]) -> Result<MonicPoly> {
        for &c in coeffs {
            if c >= self.q {
                return Err(Error::CoefficientRange { coeff: c, q: self.q });
            }
        }
        match coeffs.last() {
            Some(&1) => Ok(MonicPoly { coeffs: coeffs.to_vec() }),
            _ => Err(Error::NonMonicCode { code: self.code_of(coeffs) }),
        }
    }

    /// |f| = q^deg(f).
    pub fn norm(&self, f: &MonicPoly) -> u64 {
        self.pow(f.deg() as u32)
    }

    /// Codes of the monic polynomials of degree n, in ascending order.
    pub fn monic_code_range(&self, n: u32) -> core::ops::Range<u64> {
        let lo = self.pow(n);
        lo..2 * lo
    }

    fn trim(coeffs: &mut Vec<u64>) {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
    }

    /// Product of two coefficient vectors; empty input means zero.
    pub fn poly_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = Vec::new();
        self.poly_mul_into(a, b, &mut out);
        out
    }

    fn poly_mul_into(&self, a: &[u64], b: &[u64], out: &mut Vec<u64>) {
        out.clear();
        if a.is_empty() || b.is_empty() {
            return;
        }
        out.resize(a.len() + b.len() - 1, 0);
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % self.q;
            }
        }
        Self::trim(out);
    }

    /// Product of two monic polynomials (always monic).
    pub fn mul_monic(&self, a: &MonicPoly, b: &MonicPoly) -> MonicPoly {
        MonicPoly { coeffs: self.poly_mul(&a.coeffs, &b.coeffs) }
    }

    /// Remainder of a modulo the monic divisor m (division needs no
    /// inversions because m is monic). Empty result means m divides a.
    pub fn poly_rem(&self, a: &[u64], m: &MonicPoly) -> Vec<u64> {
        assert!(m.deg() >= 1, "divisor must be non-constant");
        let mut rem = a.to_vec();
        Self::trim(&mut rem);
        let d = m.deg();
        while rem.len() > d {
            let lead = *rem.last().unwrap();
            let shift = rem.len() - 1 - d;
            if lead != 0 {
                for (i, &mc) in m.coeffs.iter().enumerate() {
                    rem[shift + i] = self.csub(rem[shift + i], self.cmul(lead, mc));
                }
            }
            rem.pop();
            Self::trim(&mut rem);
        }
        rem
    }

    /// a * b mod m for arbitrary (possibly zero) residue inputs.
    pub fn poly_mulmod(&self, a: &[u64], b: &[u64], m: &MonicPoly) -> Vec<u64> {
        let prod = self.poly_mul(a, b);
        self.poly_rem(&prod, m)
    }

    /// base^exp mod m by square and multiply.
    pub fn poly_powmod(&self, base: &[u64], exp: u64, m: &MonicPoly) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut acc = self.poly_rem(base, m);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = self.poly_mulmod(&result, &acc, m);
            }
            acc = self.poly_mulmod(&acc, &acc, m);
            e >>= 1;
        }
        result
    }

    /// Number of monic irreducibles of degree n, by Moebius inversion of
    /// sum_{d | n} d*pi(d) = q^n. Accumulated in big integers so no q^n
    /// overflow can occur.
    pub fn prime_count(&self, n: u32) -> BigUint {
        assert!(n >= 1, "prime_count needs n >= 1");
        let q = BigInt::from(self.q);
        let mut acc = BigInt::zero();
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            let mu = mobius_u64(d as u64);
            if mu == 0 {
                continue;
            }
            let term = q.pow(n / d);
            if mu > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (quot, rem) = num_integer_div_rem(&acc, n as i64);
        debug_assert!(rem.is_zero(), "Moebius sum not divisible by n");
        quot.to_biguint().expect("prime count is non-negative")
    }

    /// Partial Mertens-type sums over prime norms up to q^n:
    /// s_log = sum deg(P) * ln(q) / |P|, s_recip = sum 1 / |P|,
    /// and the fitted constant s_recip - ln(ln(q^n)).
    pub fn mertens(&self, max_norm_degree: u32) -> MertensSums {
        assert!(max_norm_degree >= 1);
        let lnq = (self.q as f64).ln();
        let mut s_log = Neumaier::new();
        let mut s_recip = Neumaier::new();
        for j in 1..=max_norm_degree {
            let pi_j = self.prime_count(j).to_f64().expect("count fits f64");
            let inv_norm = (self.pow(j) as f64).recip();
            s_log.add(pi_j * (j as f64) * lnq * inv_norm);
            s_recip.add(pi_j * inv_norm);
        }
        let s_recip = s_recip.value();
        MertensSums {
            max_norm_degree,
            s_log: s_log.value(),
            s_recip,
            fitted_b: s_recip - (max_norm_degree as f64 * lnq).ln(),
        }
    }
}

/// Partial sums over primes of norm up to q^n, natural-log units.
#[derive(Debug, Clone, Copy)]
pub struct MertensSums {
    pub max_norm_degree: u32,
    pub s_log: f64,
    pub s_recip: f64,
    pub fitted_b: f64,
}

fn num_integer_div_rem(a: &BigInt, b: i64) -> (BigInt, BigInt) {
    let b = BigInt::from(b);
    (a / &b, a % &b)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Moebius function of a machine integer (used on divisors of small n).
fn mobius_u64(mut n: u64) -> i32 {
    let mut primes = 0;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A prime factorization: (prime, exponent) pairs in ascending degree then
/// ascending code order. The empty list is the factorization of 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(MonicPoly, u32)>,
}

impl Factorization {
    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Multiplicative bookkeeping read off a factorization.
///
/// `big_omega` counts prime factors with multiplicity; `omega_distinct` is
/// the distinct-primes variant kept alongside for comparison. `von_mangoldt`
/// is in degree units (log base q): deg(P) on prime powers, 0 elsewhere.
/// `w` is the product of factorials of the exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArithRecord {
    pub mobius: i32,
    pub von_mangoldt: f64,
    pub big_omega: u32,
    pub omega_distinct: u32,
    pub tau: u64,
    pub w: u64,
}

/// Cached tables of monic irreducibles, built degree by degree with a
/// product-marking sieve and verified against the counting formula by the
/// test suite. Lists are sorted by code.
#[derive(Debug, Clone)]
pub struct PrimeTables {
    field: Field,
    by_degree: Vec<Option<Vec<MonicPoly>>>,
}

impl PrimeTables {
    pub fn new(field: Field) -> Self {
        PrimeTables { field, by_degree: Vec::new() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Ensures all degrees up to n are sieved.
    pub fn build_to(&mut self, n: usize) {
        if self.by_degree.len() < n + 1 {
            self.by_degree.resize(n + 1, None);
        }
        for d in 1..=n {
            if self.by_degree[d].is_none() {
                let sieved = self.sieve_degree(d);
                self.by_degree[d] = Some(sieved);
            }
        }
    }

    /// The sorted irreducibles of degree n (degree 0 has none).
    pub fn primes_of_degree(&mut self, n: usize) -> &[MonicPoly] {
        if n == 0 {
            return &[];
        }
        self.build_to(n);
        self.by_degree[n].as_deref().unwrap()
    }

    /// Read-only access after `build_to`.
    pub fn get(&self, n: usize) -> Option<&[MonicPoly]> {
        if n == 0 {
            return Some(&[]);
        }
        self.by_degree.get(n).and_then(|o| o.as_deref())
    }

    /// Installs an externally cached list (e.g. loaded from disk). The list
    /// is validated by count against the exact formula, by strict code
    /// order, and by degree; content is otherwise trusted.
    pub fn insert_precomputed(&mut self, n: usize, primes: Vec<MonicPoly>) -> Result<()> {
        if n == 0 {
            return Err(Error::Invalid(alloc::format!("degree 0 has no primes")));
        }
        let expected = self.field.prime_count(n as u32);
        if BigUint::from(primes.len() as u64) != expected {
            return Err(Error::Invalid(alloc::format!(
                "degree {n} list has {} entries, expected {expected}",
                primes.len()
            )));
        }
        let mut prev = 0u64;
        for p in &primes {
            if p.deg() != n {
                return Err(Error::Invalid(alloc::format!("degree mismatch in cached list")));
            }
            let code = self.field.encode(p);
            if code <= prev {
                return Err(Error::Invalid(alloc::format!("cached list not sorted by code")));
            }
            prev = code;
        }
        if self.by_degree.len() < n + 1 {
            self.by_degree.resize(n + 1, None);
        }
        self.by_degree[n] = Some(primes);
        Ok(())
    }

    /// Marks every product (prime of degree <= n/2) * (monic of complementary
    /// degree); the unmarked monic codes of degree n are the irreducibles.
    fn sieve_degree(&mut self, n: usize) -> Vec<MonicPoly> {
        let field = self.field;
        let lo = field.pow(n as u32);
        let mut reducible = vec![false; lo as usize];
        let mut g_buf: Vec<u64> = Vec::new();
        let mut prod: Vec<u64> = Vec::new();
        for d in 1..=n / 2 {
            let co_lo = field.pow((n - d) as u32);
            // Clone keeps the borrow checker happy; lists are small compared
            // with the degree-n candidate range.
            let primes_d = self.by_degree[d].clone().expect("lower degrees built first");
            for p in &primes_d {
                for g_code in co_lo..2 * co_lo {
                    digits_into(g_code, field.q, &mut g_buf);
                    field.poly_mul_into(&p.coeffs, &g_buf, &mut prod);
                    let code = field.code_of(&prod);
                    reducible[(code - lo) as usize] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (off, &marked) in reducible.iter().enumerate() {
            if !marked {
                out.push(field.decode(lo + off as u64).expect("range codes are monic"));
            }
        }
        out
    }

    /// Trial division by primes of degree up to deg(f)/2. Constants are
    /// rejected; degree-1 polynomials are always irreducible.
    pub fn is_irreducible(&mut self, f: &MonicPoly) -> Result<bool> {
        let deg = f.deg();
        if deg == 0 {
            return Err(Error::ConstantPolynomial);
        }
        if deg == 1 {
            return Ok(true);
        }
        self.build_to(deg / 2);
        let field = self.field;
        for d in 1..=deg / 2 {
            for p in self.by_degree[d].as_deref().unwrap() {
                if field.poly_rem(&f.coeffs, p).is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Deterministic trial division, ascending degree then ascending code.
    pub fn factorize(&mut self, f: &MonicPoly) -> Factorization {
        let field = self.field;
        let mut factors: Vec<(MonicPoly, u32)> = Vec::new();
        let mut rem = f.coeffs.clone();
        let mut d = 1usize;
        while rem.len() > 1 && 2 * d <= rem.len() - 1 {
            self.build_to(d);
            let primes_d = self.by_degree[d].clone().expect("built");
            for p in &primes_d {
                if 2 * d > rem.len() - 1 {
                    break;
                }
                let mut mult = 0u32;
                loop {
                    let (quot, divides) = divide_exact(field, &rem, p);
                    if !divides {
                        break;
                    }
                    rem = quot;
                    mult += 1;
                }
                if mult > 0 {
                    factors.push((p.clone(), mult));
                }
            }
            d += 1;
        }
        if rem.len() > 1 {
            // Whatever is left has no factor of degree <= deg/2, so it is prime.
            factors.push((MonicPoly { coeffs: rem }, 1));
        }
        Factorization { factors }
    }

    /// All five multiplicative statistics from one factorization pass.
    pub fn arith(&mut self, f: &MonicPoly) -> ArithRecord {
        let fact = self.factorize(f);
        let mut mobius = 1i32;
        let mut big_omega = 0u32;
        let mut tau = 1u64;
        let mut w = 1u64;
        for (_, e) in &fact.factors {
            if *e >= 2 {
                mobius = 0;
            }
            big_omega += e;
            tau *= (*e as u64) + 1;
            w *= factorial(*e as u64);
        }
        if mobius != 0 && fact.factors.len() % 2 == 1 {
            mobius = -1;
        }
        let von_mangoldt = if fact.factors.len() == 1 {
            fact.factors[0].0.deg() as f64
        } else {
            0.0
        };
        ArithRecord {
            mobius,
            von_mangoldt,
            big_omega,
            omega_distinct: fact.factors.len() as u32,
            tau,
            w,
        }
    }

    /// The irreducible of degree n with the smallest code.
    pub fn lowest_prime_of_degree(&mut self, n: usize) -> MonicPoly {
        assert!(n >= 1);
        self.primes_of_degree(n)[0].clone()
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

fn digits_into(code: u64, q: u64, out: &mut Vec<u64>) {
    out.clear();
    let mut rest = code;
    while rest > 0 {
        out.push(rest % q);
        rest /= q;
    }
}

/// Divides a by p when p | a, returning (quotient, true); otherwise
/// (garbage, false). Monic divisor, so no coefficient inversions.
fn divide_exact(field: Field, a: &[u64], p: &MonicPoly) -> (Vec<u64>, bool) {
    if a.len() <= p.deg() {
        return (Vec::new(), false);
    }
    let mut rem = a.to_vec();
    let d = p.deg();
    let mut quot = vec![0u64; rem.len() - d];
    while rem.len() > d {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - d;
        quot[shift] = lead;
        if lead != 0 {
            for (i, &mc) in p.coeffs().iter().enumerate() {
                rem[shift + i] = field.csub(rem[shift + i], field.cmul(lead, mc));
            }
        }
        rem.pop();
        Field::trim(&mut rem);
    }
    (quot, rem.is_empty())
}
