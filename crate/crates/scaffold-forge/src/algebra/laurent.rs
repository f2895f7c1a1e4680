//! Laurent polynomials and their ratios over F_p.
//!
//! `LaurentFrac` is the exact model of a nonzero element of
//! K = F_p((pi)) that the library computes with: a ratio of Laurent
//! polynomials in the uniformizer.  The canonical form keeps the whole
//! pi-power in the numerator, so the denominator always lies in
//! 1 + pi*F_p[pi].  Ratios are deliberately *not* reduced by polynomial
//! gcds: every operation here is exact without reduction, and the
//! printed form of a cofactor ratio then shows the same factorization
//! the determinant expansion produced.

use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fp::{inv_mod, pow_mod, require_prime};
use super::AlgebraError;

/// A Laurent polynomial `sum c_k pi^k` with finitely many terms.
///
/// `coeffs[i]` is the coefficient of `pi^(min_exp + i)`; the first and
/// last entries are nonzero unless the polynomial is zero (empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    p: u64,
    min_exp: i64,
    coeffs: Vec<u64>,
}

impl LaurentPoly {
    pub fn zero(p: u64) -> Self {
        LaurentPoly {
            p,
            min_exp: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn monomial(p: u64, c: i64, exp: i64) -> Self {
        let c = c.rem_euclid(p as i64) as u64;
        if c == 0 {
            Self::zero(p)
        } else {
            LaurentPoly {
                p,
                min_exp: exp,
                coeffs: vec![c],
            }
        }
    }

    pub fn one(p: u64) -> Self {
        Self::monomial(p, 1, 0)
    }

    pub fn from_coeffs(p: u64, min_exp: i64, coeffs: Vec<u64>) -> Self {
        let mut poly = LaurentPoly { p, min_exp, coeffs };
        poly.trim();
        poly
    }

    fn trim(&mut self) {
        for c in self.coeffs.iter_mut() {
            *c %= self.p;
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.min_exp += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.min_exp = 0;
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1] && self.min_exp == 0
    }

    /// pi-adic valuation; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.min_exp)
    }

    pub fn coeff(&self, exp: i64) -> u64 {
        if self.is_zero() || exp < self.min_exp {
            return 0;
        }
        let idx = (exp - self.min_exp) as usize;
        self.coeffs.get(idx).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (self.min_exp + i as i64, c))
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed moduli");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let min = self.min_exp.min(other.min_exp);
        let max = (self.min_exp + self.coeffs.len() as i64)
            .max(other.min_exp + other.coeffs.len() as i64);
        let mut coeffs = vec![0u64; (max - min) as usize];
        for (e, c) in self.terms() {
            coeffs[(e - min) as usize] = (coeffs[(e - min) as usize] + c) % self.p;
        }
        for (e, c) in other.terms() {
            coeffs[(e - min) as usize] = (coeffs[(e - min) as usize] + c) % self.p;
        }
        Self::from_coeffs(self.p, min, coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect();
        Self::from_coeffs(self.p, self.min_exp, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = (coeffs[i + j] + a * b) % self.p;
            }
        }
        Self::from_coeffs(self.p, self.min_exp + other.min_exp, coeffs)
    }

    pub fn scale(&self, c: u64) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| a * (c % self.p) % self.p).collect();
        Self::from_coeffs(self.p, self.min_exp, coeffs)
    }

    /// Multiplies by pi^k.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly {
            p: self.p,
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `self^(p^k)` via the Frobenius: exponents scale by p^k.
    pub fn frobenius_pow(&self, k: u32) -> Self {
        let factor = (self.p as i128).pow(k);
        assert!(factor <= i64::MAX as i128);
        let factor = factor as i64;
        let mut coeffs = vec![0u64; self.coeffs.len().saturating_sub(1) * factor as usize + 1];
        if self.is_zero() {
            return Self::zero(self.p);
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * factor as usize] = pow_mod(c, factor as u64, self.p);
        }
        Self::from_coeffs(self.p, self.min_exp * factor, coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// An element of F_p((pi)) as a ratio of Laurent polynomials.
///
/// Canonical form: the denominator has constant term 1 and no negative
/// or pure pi-power part (it lies in 1 + pi*F_p[pi]); the numerator
/// carries the valuation.
#[derive(Clone, Debug)]
pub struct LaurentFrac {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl LaurentFrac {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut frac = LaurentFrac { num, den };
        frac.normalize();
        Ok(frac)
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        let p = num.p;
        LaurentFrac {
            num,
            den: LaurentPoly::one(p),
        }
    }

    pub fn zero(p: u64) -> Self {
        Self::from_poly(LaurentPoly::zero(p))
    }

    pub fn one(p: u64) -> Self {
        Self::from_poly(LaurentPoly::one(p))
    }

    pub fn constant(p: u64, c: i64) -> Self {
        Self::from_poly(LaurentPoly::monomial(p, c, 0))
    }

    /// The monomial c * pi^exp.
    pub fn monomial(p: u64, c: i64, exp: i64) -> Self {
        Self::from_poly(LaurentPoly::monomial(p, c, exp))
    }

    /// pi^exp.
    pub fn pi_pow(p: u64, exp: i64) -> Self {
        Self::monomial(p, 1, exp)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one(self.num.p);
            return;
        }
        // Pull the pi-power and the unit constant of the denominator
        // into the numerator.
        let v = self.den.min_exp;
        let c = self.den.coeffs[0];
        let cinv = inv_mod(c, self.den.p);
        self.den = self.den.shift(-v).scale(cinv);
        self.num = self.num.shift(-v).scale(cinv);
        debug_assert_eq!(self.den.min_exp, 0);
        debug_assert_eq!(self.den.coeffs[0], 1);
    }

    pub fn p(&self) -> u64 {
        self.num.p
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// pi-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.num.valuation()
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        LaurentFrac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero denominator")
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        Self::one(self.p()).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Self, AlgebraError> {
        if e >= 0 {
            Ok(LaurentFrac {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            })
        } else {
            self.inv()?.pow(-e)
        }
    }

    /// `self^(p^k)`.
    pub fn frobenius_pow(&self, k: u32) -> Self {
        LaurentFrac {
            num: self.num.frobenius_pow(k),
            den: self.den.frobenius_pow(k),
        }
    }

    /// Laurent-series coefficients of `self` for every exponent from
    /// the valuation up to `prec` inclusive (zeros included).
    pub fn series(&self, prec: i64) -> Result<Vec<(i64, u64)>, AlgebraError> {
        let v = self.valuation().ok_or(AlgebraError::NoLeadingTerm)?;
        if prec < v {
            return Err(AlgebraError::PrecisionBelowValuation { prec, valuation: v });
        }
        let p = self.p();
        let len = (prec - v + 1) as usize;
        // num/den with den = 1 + d_1 pi + ...: forward substitution.
        let mut out = vec![0u64; len];
        for k in 0..len {
            let target = self.num.coeff(v + k as i64);
            let mut acc = 0u64;
            for j in 0..k {
                let d = self.den.coeff((k - j) as i64);
                acc = (acc + out[j] * d) % p;
            }
            out[k] = (p + target % p - acc) % p;
        }
        Ok(out
            .into_iter()
            .enumerate()
            .map(|(i, c)| (v + i as i64, c))
            .collect())
    }

    pub fn parse(p: u64, input: &str) -> Result<Self, AlgebraError> {
        require_prime(p)?;
        Parser::new(p, input).parse()
    }
}

/// Equality of the represented field elements (cross-multiplication);
/// two unreduced representations of the same value are equal.
impl PartialEq for LaurentFrac {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for LaurentFrac {}

fn poly_string(poly: &LaurentPoly, base_shift: i64) -> String {
    let mut parts = Vec::new();
    for (e, c) in poly.terms() {
        let e = e + base_shift;
        let part = match (c, e) {
            (_, 0) => format!("{c}"),
            (1, 1) => "pi".to_string(),
            (1, _) => format!("pi^{e}"),
            (_, 1) => format!("{c}*pi"),
            (_, _) => format!("{c}*pi^{e}"),
        };
        parts.push(part);
    }
    parts.join("+")
}

impl std::fmt::Display for LaurentFrac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.num.min_exp;
        // N = num / pi^v has nonzero constant term.
        let n_terms = self.num.coeffs.iter().filter(|&&c| c != 0).count();
        let num_plain = |shift: i64| poly_string(&self.num, shift);
        let wrap = |s: String, multi: bool| if multi { format!("({s})") } else { s };
        let pi_pow = |e: i64| if e == 1 { "pi".to_string() } else { format!("pi^{e}") };
        if self.den.is_one() {
            if v >= 0 {
                write!(f, "{}", num_plain(0))
            } else {
                write!(f, "{}/{}", wrap(num_plain(-v), n_terms > 1), pi_pow(-v))
            }
        } else {
            let den_str = poly_string(&self.den, 0);
            if v < 0 {
                write!(
                    f,
                    "{}/({}*({}))",
                    wrap(num_plain(-v), n_terms > 1),
                    pi_pow(-v),
                    den_str
                )
            } else if v == 0 {
                write!(f, "{}/({})", wrap(num_plain(0), n_terms > 1), den_str)
            } else {
                write!(
                    f,
                    "{}*{}/({})",
                    pi_pow(v),
                    wrap(num_plain(-v), n_terms > 1),
                    den_str
                )
            }
        }
    }
}

impl Serialize for LaurentFrac {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Deserializes from the textual syntax; the modulus must be carried
/// out of band, so this only works inside containers that fix p = 2.
/// Job files instead parse explicitly with the job's field modulus.
impl<'de> Deserialize<'de> for LaurentFrac {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LaurentFrac::parse(2, &s).map_err(D::Error::custom)
    }
}

struct Parser<'a> {
    p: u64,
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Parser<'a> {
    fn new(p: u64, input: &'a str) -> Self {
        Parser {
            p,
            chars: input.chars().peekable(),
        }
    }

    fn parse(mut self) -> Result<LaurentFrac, AlgebraError> {
        let value = self.expr()?;
        self.skip_ws();
        match self.chars.peek() {
            None => Ok(value),
            Some(c) => Err(AlgebraError::Parse(format!("unexpected character '{c}'"))),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn eat(&mut self, expected: char) -> bool {
        self.skip_ws();
        if self.chars.peek() == Some(&expected) {
            self.chars.next();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentFrac, AlgebraError> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentFrac, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                acc = acc.div(&self.factor()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentFrac, AlgebraError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let neg = self.eat('-');
            let e = self.integer()? as i64;
            base.pow(if neg { -e } else { e })
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<LaurentFrac, AlgebraError> {
        self.skip_ws();
        match self.chars.peek() {
            Some('(') => {
                self.chars.next();
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(AlgebraError::Parse("expected ')'".into()));
                }
                Ok(inner)
            }
            Some('p') => {
                for expected in "pi".chars() {
                    if self.chars.next() != Some(expected) {
                        return Err(AlgebraError::Parse("expected 'pi'".into()));
                    }
                }
                Ok(LaurentFrac::pi_pow(self.p, 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(LaurentFrac::constant(self.p, (n % self.p as u128) as i64))
            }
            other => Err(AlgebraError::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn integer(&mut self) -> Result<u128, AlgebraError> {
        self.skip_ws();
        let mut digits = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap());
        }
        if digits.is_empty() {
            return Err(AlgebraError::Parse("expected an integer".into()));
        }
        digits
            .parse::<u128>()
            .map_err(|e| AlgebraError::Parse(e.to_string()))
    }
}

impl FromStr for LaurentFrac {
    type Err = AlgebraError;

    /// Parses with p = 2 (the modulus of every worked example); use
    /// [`LaurentFrac::parse`] for other primes.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LaurentFrac::parse(2, s)
    }
}
