//! Dirichlet characters modulo a monic irreducible Q in F_q[T].
//!
//! Since Q is prime, the unit group of F_q[T]/(Q) is cyclic of order
//! m = |Q| - 1. We pick the smallest-code generator g, tabulate discrete
//! logarithms for every nonzero residue, and realize the m characters as
//! chi_j(g^t) = e^(2 pi i j t / m). Index j = 0 is the principal character.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::ffpoly::{Field, MonicPoly, PrimeTables};
use crate::{Error, Result};

/// Sentinel discrete log for the zero residue.
const ZERO_RESIDUE: u32 = u32::MAX;

/// Precomputed character data for one prime modulus.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    field: Field,
    modulus: MonicPoly,
    order: u64,
    generator_code: u64,
    dlog: Vec<u32>,
    unity: Vec<Complex64>,
}

impl CharacterTable {
    /// Builds the table. The modulus must be irreducible of degree >= 2
    /// (degree 1 leaves no non-trivial coefficient sums downstream).
    pub fn new(field: Field, modulus: MonicPoly, tables: &mut PrimeTables) -> Result<Self> {
        if modulus.deg() < 2 {
            return Err(Error::ModulusDegree { degree: modulus.deg() });
        }
        if !tables.is_irreducible(&modulus)? {
            return Err(Error::NonPrimeModulus { code: field.encode(&modulus) });
        }
        let norm = field.norm(&modulus);
        let order = norm - 1;
        let factors = distinct_prime_factors(order);
        let generator_code = (2..norm)
            .find(|&cand| {
                let base = field.coeffs_of(cand);
                factors.iter().all(|&p| {
                    let pow = field.poly_powmod(&base, order / p, &modulus);
                    pow != [1]
                })
            })
            .ok_or_else(|| Error::Invalid(alloc::format!("no generator found")))?;

        let mut dlog = vec![ZERO_RESIDUE; norm as usize];
        let gen_coeffs = field.coeffs_of(generator_code);
        let mut acc: Vec<u64> = vec![1];
        for t in 0..order {
            let code = field.code_of(&acc) as usize;
            debug_assert_eq!(dlog[code], ZERO_RESIDUE, "generator order too small");
            dlog[code] = t as u32;
            acc = field.poly_mulmod(&acc, &gen_coeffs, &modulus);
        }
        debug_assert_eq!(acc, vec![1], "generator order mismatch");

        let unity = (0..order)
            .map(|t| {
                let theta = TAU * t as f64 / order as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();

        Ok(CharacterTable { field, modulus, order, generator_code, dlog, unity })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn modulus(&self) -> &MonicPoly {
        &self.modulus
    }

    /// Degree d of the modulus.
    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    /// Order m = |Q| - 1 of the character group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of non-principal characters, |Q| - 2.
    pub fn phi_star(&self) -> u64 {
        self.order - 1
    }

    pub fn generator_code(&self) -> u64 {
        self.generator_code
    }

    /// Checks 0 <= j < m.
    pub fn check_index(&self, j: u64) -> Result<()> {
        if j < self.order {
            Ok(())
        } else {
            Err(Error::CharIndexRange { index: j, order: self.order })
        }
    }

    /// Discrete log of a residue code base g, or None for the zero residue.
    pub fn dlog(&self, residue_code: u64) -> Option<u32> {
        match self.dlog[residue_code as usize] {
            ZERO_RESIDUE => None,
            t => Some(t),
        }
    }

    /// e^(2 pi i k / m) from the precomputed table.
    pub fn root_of_unity(&self, k: u64) -> Complex64 {
        self.unity[(k % self.order) as usize]
    }

    /// chi_j on a residue code (must be < |Q|). Zero residue gives 0.
    pub fn char_value(&self, j: u64, residue_code: u64) -> Complex64 {
        match self.dlog[residue_code as usize] {
            ZERO_RESIDUE => Complex64::new(0.0, 0.0),
            t => self.unity[((j % self.order) * t as u64 % self.order) as usize],
        }
    }

    /// chi_j on an arbitrary monic polynomial (reduced mod Q first).
    pub fn eval(&self, j: u64, f: &MonicPoly) -> Complex64 {
        let rem = self.field.poly_rem(f.coeffs(), &self.modulus);
        self.char_value(j, self.field.code_of(&rem))
    }

    /// Discrete log of f mod Q, or None when Q | f.
    pub fn reduce_dlog(&self, f: &MonicPoly) -> Option<u32> {
        let rem = self.field.poly_rem(f.coeffs(), &self.modulus);
        self.dlog(self.field.code_of(&rem))
    }

    /// Index of the conjugate character.
    pub fn conj_index(&self, j: u64) -> u64 {
        if j == 0 {
            0
        } else {
            self.order - j
        }
    }

    /// A character is even when it is trivial on the scalar constants
    /// F_q^*. Checked by definition, constant by constant.
    pub fn is_even(&self, j: u64) -> bool {
        let m = self.order;
        (2..self.field.q()).all(|c| {
            let t = self.dlog[c as usize] as u64;
            (j % m) * t % m == 0
        })
    }

    /// Index of the order-2 (real non-principal) character, when m is even.
    pub fn real_character(&self) -> Option<u64> {
        if self.order % 2 == 0 {
            Some(self.order / 2)
        } else {
            None
        }
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table_q3_d3() -> CharacterTable {
        let field = Field::new(3).unwrap();
        let mut tables = PrimeTables::new(field);
        let q = field.decode(34).unwrap();
        CharacterTable::new(field, q, &mut tables).unwrap()
    }

    fn table_q5_d2() -> CharacterTable {
        let field = Field::new(5).unwrap();
        let mut tables = PrimeTables::new(field);
        let q = field.decode(27).unwrap();
        CharacterTable::new(field, q, &mut tables).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        let field = Field::new(3).unwrap();
        let mut tables = PrimeTables::new(field);
        let reducible = field.monic_from_coeffs(&[2, 0, 1]).unwrap();
        assert!(matches!(
            CharacterTable::new(field, reducible, &mut tables),
            Err(Error::NonPrimeModulus { code: 11 })
        ));
        let linear = field.monic_from_coeffs(&[0, 1]).unwrap();
        assert!(matches!(
            CharacterTable::new(field, linear, &mut tables),
            Err(Error::ModulusDegree { degree: 1 })
        ));
    }

    #[test]
    fn group_sizes() {
        let ct = table_q3_d3();
        assert_eq!(ct.order(), 26);
        assert_eq!(ct.phi_star(), 25);
        assert_eq!(ct.degree(), 3);
        let ct = table_q5_d2();
        assert_eq!(ct.order(), 24);
        assert_eq!(ct.phi_star(), 23);
    }

    #[test]
    fn dlog_is_a_bijection_on_nonzero_residues() {
        for ct in [table_q3_d3(), table_q5_d2()] {
            let norm = ct.order() + 1;
            let mut seen = vec![false; ct.order() as usize];
            assert!(ct.dlog(0).is_none());
            for code in 1..norm {
                let t = ct.dlog(code).expect("nonzero residue has a log");
                assert!(!seen[t as usize], "duplicate log");
                seen[t as usize] = true;
            }
            assert!(seen.iter().all(|&s| s));
            assert_eq!(ct.dlog(1), Some(0));
            assert_eq!(ct.dlog(ct.generator_code()), Some(1));
        }
    }

    #[test]
    fn generator_passes_order_checks() {
        let ct = table_q3_d3();
        let field = ct.field();
        let base = field.coeffs_of(ct.generator_code());
        assert_eq!(field.poly_powmod(&base, 26, ct.modulus()), vec![1]);
        assert_ne!(field.poly_powmod(&base, 13, ct.modulus()), vec![1]);
        assert_ne!(field.poly_powmod(&base, 2, ct.modulus()), vec![1]);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = table_q3_d3();
        let b = table_q3_d3();
        assert_eq!(a.generator_code(), b.generator_code());
        assert_eq!(a.dlog, b.dlog);
    }

    #[test]
    fn character_row_orthogonality() {
        // sum over all chi of chi(f) is m at f = 1 and 0 elsewhere.
        for ct in [table_q3_d3(), table_q5_d2()] {
            let m = ct.order();
            for res in 1..=(m / 2) {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    acc += ct.char_value(j, res);
                }
                let expect = if res == 1 { m as f64 } else { 0.0 };
                assert!((acc.re - expect).abs() < 1e-9 * m as f64, "res={res}");
                assert!(acc.im.abs() < 1e-9 * m as f64);
            }
        }
    }

    #[test]
    fn character_column_orthogonality() {
        // sum over residues of chi_j vanishes for j != 0.
        let ct = table_q3_d3();
        let m = ct.order();
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for res in 1..=m {
                acc += ct.char_value(j, res);
            }
            let expect = if j == 0 { m as f64 } else { 0.0 };
            assert!((acc.re - expect).abs() < 1e-9 * m as f64, "j={j}");
            assert!(acc.im.abs() < 1e-9 * m as f64);
        }
    }

    #[test]
    fn even_characters_are_multiples_of_q_minus_1() {
        let ct = table_q3_d3();
        let evens: Vec<u64> = (0..ct.order()).filter(|&j| ct.is_even(j)).collect();
        let expected: Vec<u64> = (0..ct.order()).filter(|&j| j % 2 == 0).collect();
        assert_eq!(evens, expected);
        assert!(!ct.is_even(13));
        assert_eq!(evens.len() - 1, 12); // non-principal even count

        let ct = table_q5_d2();
        let evens: Vec<u64> = (1..ct.order()).filter(|&j| ct.is_even(j)).collect();
        assert_eq!(evens, vec![4, 8, 12, 16, 20]);
    }

    #[test]
    fn real_character_index() {
        assert_eq!(table_q3_d3().real_character(), Some(13));
        assert_eq!(table_q5_d2().real_character(), Some(12));
    }

    #[test]
    fn eval_vanishes_on_multiples_of_the_modulus() {
        let ct = table_q3_d3();
        let field = ct.field();
        let h = field.monic_from_coeffs(&[2, 1]).unwrap();
        let f = field.mul_monic(ct.modulus(), &h);
        for j in 0..ct.order() {
            assert_eq!(ct.eval(j, &f), Complex64::new(0.0, 0.0));
        }
        assert!(ct.reduce_dlog(&f).is_none());
    }

    proptest! {
        #[test]
        fn characters_are_completely_multiplicative(
            j in 0u64..26,
            a in 1u64..27,
            b in 1u64..27,
        ) {
            let ct = table_q3_d3();
            let field = ct.field();
            let pa = field.coeffs_of(a);
            let pb = field.coeffs_of(b);
            let prod = field.poly_mulmod(&pa, &pb, ct.modulus());
            let lhs = ct.char_value(j, a) * ct.char_value(j, b);
            let rhs = ct.char_value(j, field.code_of(&prod));
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn conjugate_index_conjugates_values(j in 0u64..26, res in 1u64..27) {
            let ct = table_q3_d3();
            let lhs = ct.char_value(ct.conj_index(j), res);
            let rhs = ct.char_value(j, res).conj();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn unit_modulus_off_zero(j in 0u64..26, res in 1u64..27) {
            let ct = table_q3_d3();
            let v = ct.char_value(j, res);
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
