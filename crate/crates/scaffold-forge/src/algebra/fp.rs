//! Scalars in the prime field F_p = Z/pZ.

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Returns true if `p` is prime (trial division; moduli here are tiny).
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Checks that `p` is prime, for constructor validation.
pub fn require_prime(p: u64) -> Result<(), AlgebraError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(AlgebraError::NonPrimeModulus(p))
    }
}

/// `a^e mod p` by square-and-multiply.
pub fn pow_mod(a: u64, mut e: u64, p: u64) -> u64 {
    let mut base = a % p;
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Inverse of `a` mod a prime `p`, via Fermat.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

/// An element of F_p, carrying its modulus.
///
/// The modulus is validated once at construction; arithmetic between
/// scalars with different moduli panics (it is always a programming error).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u64,
    p: u64,
}

impl FpScalar {
    pub fn new(value: i64, p: u64) -> Result<Self, AlgebraError> {
        require_prime(p)?;
        Ok(Self::reduce(value, p))
    }

    /// Reduces `value` mod `p` without re-checking primality.
    pub fn reduce(value: i64, p: u64) -> Self {
        let m = value.rem_euclid(p as i64) as u64;
        FpScalar { value: m, p }
    }

    pub fn zero(p: u64) -> Self {
        FpScalar { value: 0, p }
    }

    pub fn one(p: u64) -> Self {
        FpScalar { value: 1 % p, p }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed moduli {} and {}", self.p, other.p);
    }

    pub fn inv(&self) -> Self {
        FpScalar {
            value: inv_mod(self.value, self.p),
            p: self.p,
        }
    }
}

impl std::ops::Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: FpScalar) -> FpScalar {
        self.check(&rhs);
        FpScalar {
            value: (self.value + rhs.value) % self.p,
            p: self.p,
        }
    }
}

impl std::ops::Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: FpScalar) -> FpScalar {
        self.check(&rhs);
        FpScalar {
            value: (self.p + self.value - rhs.value) % self.p,
            p: self.p,
        }
    }
}

impl std::ops::Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: FpScalar) -> FpScalar {
        self.check(&rhs);
        FpScalar {
            value: self.value * rhs.value % self.p,
            p: self.p,
        }
    }
}

impl std::ops::Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            value: (self.p - self.value) % self.p,
            p: self.p,
        }
    }
}

impl std::fmt::Display for FpScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}
