//! Multivariate polynomials over F_p in variables Y_1, ..., Y_k.
//!
//! These model the stages S_k = F_p[Y_1,...,Y_k] of a generic tower.
//! Terms are kept in a map ordered by graded lexicographic order with
//! Y_1 > Y_2 > ... (smallest monomial first), with no stored zero
//! coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fp::{self, pow_mod};

/// An exponent vector, ordered graded-lex (total degree first, then
/// lexicographically with the first variable most significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(j: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scale_exponents(&self, factor: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * factor).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => self.0.cmp(&other.0),
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in F_p[Y_1,...,Y_nvars].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPoly {
    p: u64,
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl MultiPoly {
    pub fn zero(p: u64, nvars: usize) -> Self {
        MultiPoly {
            p,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: i64, p: u64, nvars: usize) -> Self {
        let mut poly = Self::zero(p, nvars);
        poly.add_term(&Monomial::one(nvars), c.rem_euclid(p as i64) as u64);
        poly
    }

    pub fn one(p: u64, nvars: usize) -> Self {
        Self::constant(1, p, nvars)
    }

    /// The variable Y_{j+1} (zero-based index `j`).
    pub fn var(j: usize, p: u64, nvars: usize) -> Self {
        assert!(j < nvars);
        let mut poly = Self::zero(p, nvars);
        poly.add_term(&Monomial::var(j, nvars), 1);
        poly
    }

    pub fn from_terms(p: u64, nvars: usize, terms: &[(Vec<u32>, i64)]) -> Self {
        let mut poly = Self::zero(p, nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars);
            poly.add_term(&Monomial(exps.clone()), c.rem_euclid(p as i64) as u64);
        }
        poly
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    /// Total degree; `None` is the sentinel for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    fn add_term(&mut self, m: &Monomial, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert(0);
        *entry = (*entry + c) % self.p;
        if *entry == 0 {
            self.terms.remove(m);
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.nvars, other.nvars, "mixed variable counts");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.p, self.nvars);
        for (m, c) in self.terms() {
            out.add_term(m, self.p - c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = c.rem_euclid(self.p as i64) as u64;
        let mut out = Self::zero(self.p, self.nvars);
        for (m, k) in self.terms() {
            out.add_term(m, k * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = Self::zero(self.p, self.nvars);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(&m1.mul(m2), c1 * c2 % self.p);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p, self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self^(p^k)`: coefficients are fixed by Frobenius over F_p, so
    /// only the exponents scale.
    pub fn frobenius_pow(&self, k: u32) -> Self {
        let factor = (self.p as u128).pow(k);
        assert!(factor <= u32::MAX as u128, "Frobenius exponent overflow");
        let mut out = Self::zero(self.p, self.nvars);
        for (m, c) in self.terms() {
            out.add_term(&m.scale_exponents(factor as u32), pow_mod(c, factor as u64, self.p));
        }
        out
    }

    /// The Artin-Schreier image `self^p - self`.
    pub fn artin_schreier(&self) -> Self {
        self.frobenius_pow(1).sub(self)
    }

    /// Substitutes `assignment[j]` for Y_{j+1}.  All images must share
    /// this polynomial's modulus and variable count.
    pub fn substitute(&self, assignment: &[MultiPoly]) -> Self {
        assert_eq!(assignment.len(), self.nvars);
        let mut out = Self::zero(self.p, self.nvars);
        // Cache powers of each image as they are needed.
        let mut powers: Vec<Vec<MultiPoly>> = assignment
            .iter()
            .map(|f| vec![Self::one(self.p, self.nvars), f.clone()])
            .collect();
        for (m, c) in self.terms() {
            let mut term = Self::constant(c as i64, self.p, self.nvars);
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().mul(&assignment[j]);
                    powers[j].push(next);
                }
                term = term.mul(&powers[j][e as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Reinterprets the polynomial in a ring with `nvars` variables
    /// (which must contain all variables actually used).
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(self.p, nvars);
        for (m, c) in self.terms() {
            let mut e = m.0.clone();
            e.resize(nvars, 0);
            out.add_term(&Monomial(e), c);
        }
        out
    }
}

impl std::fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if *c != 1 || m.total_degree() == 0 {
                factors.push(format!("{c}"));
            }
            for (j, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("Y{}", j + 1)),
                    _ => factors.push(format!("Y{}^{}", j + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Compares coefficient vectors: lower total degree first, then the
/// graded-lex-ordered coefficient list read from the largest monomial
/// down, smaller residue first.  This is the tie-break used when a
/// solver must pick one representative from an affine solution set.
pub fn poly_key_cmp(a: &MultiPoly, b: &MultiPoly) -> Ordering {
    let da = a.total_degree().map(|d| d as i64).unwrap_or(-1);
    let db = b.total_degree().map(|d| d as i64).unwrap_or(-1);
    if da != db {
        return da.cmp(&db);
    }
    let mut monos: Vec<&Monomial> = a.terms.keys().chain(b.terms.keys()).collect();
    monos.sort();
    monos.dedup();
    for m in monos.into_iter().rev() {
        let ca = a.coeff(m);
        let cb = b.coeff(m);
        if ca != cb {
            return ca.cmp(&cb);
        }
    }
    Ordering::Equal
}

/// All monomials in `nvars` variables of total degree at most `bound`,
/// in ascending graded-lex order.
pub fn monomials_up_to(nvars: usize, bound: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    loop {
        out.push(Monomial(current.clone()));
        // Enumerate all vectors with sum <= bound by odometer.
        let mut j = nvars;
        loop {
            if j == 0 {
                out.sort();
                return out;
            }
            j -= 1;
            current[j] += 1;
            if current.iter().sum::<u32>() <= bound {
                break;
            }
            current[j] = 0;
        }
    }
}

/// Validates modulus before building polynomials from untrusted input.
pub fn validate_modulus(p: u64) -> Result<(), super::AlgebraError> {
    fp::require_prime(p)
}
