//! Exact rationals whose denominator is a power of p.
//!
//! Valuations of elements in a totally ramified p^n-tower live in
//! (1/p^n)Z, so this is the only denominator shape the library needs.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

/// `num / p^pow`, stored in lowest terms (`p` does not divide `num`
/// unless the value is zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PRational {
    p: u64,
    num: i128,
    pow: u32,
}

/// Reports serialize rationals in their printed form ("-53/2"), or as
/// a bare integer when the denominator is trivial.
impl Serialize for PRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.pow == 0 && self.num.abs() <= i64::MAX as i128 {
            serializer.serialize_i64(self.num as i64)
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl PRational {
    pub fn new(p: u64, num: i128, pow: u32) -> Self {
        let mut r = PRational { p, num, pow };
        r.reduce();
        r
    }

    pub fn integer(p: u64, n: i128) -> Self {
        Self::new(p, n, 0)
    }

    pub fn zero(p: u64) -> Self {
        PRational { p, num: 0, pow: 0 }
    }

    fn reduce(&mut self) {
        if self.num == 0 {
            self.pow = 0;
            return;
        }
        let p = self.p as i128;
        while self.pow > 0 && self.num % p == 0 {
            self.num /= p;
            self.pow -= 1;
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator_pow(&self) -> u32 {
        self.pow
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// The integer value, if the denominator is trivial.
    pub fn as_integer(&self) -> Option<i128> {
        (self.pow == 0).then_some(self.num)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.p as i128;
        let target = self.pow.max(other.pow);
        let a = self.num * p.pow(target - self.pow);
        let b = other.num * p.pow(target - other.pow);
        Self::new(self.p, a + b, target)
    }

    pub fn neg(&self) -> Self {
        PRational {
            p: self.p,
            num: -self.num,
            pow: self.pow,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.num * other.num, self.pow + other.pow)
    }

    pub fn mul_int(&self, k: i128) -> Self {
        Self::new(self.p, self.num * k, self.pow)
    }

    /// Multiplies by p^k (k may be negative).
    pub fn mul_p_pow(&self, k: i32) -> Self {
        if k >= 0 {
            Self::new(self.p, self.num * (self.p as i128).pow(k as u32), self.pow)
        } else {
            Self::new(self.p, self.num, self.pow + (-k) as u32)
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Ord for PRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check(other);
        let p = self.p as i128;
        let target = self.pow.max(other.pow);
        let a = self.num * p.pow(target - self.pow);
        let b = other.num * p.pow(target - other.pow);
        a.cmp(&b)
    }
}

impl PartialOrd for PRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for PRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, (self.p as i128).pow(self.pow))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let r = PRational::new(2, 6, 1); // 6/2 = 3
        assert_eq!(r.as_integer(), Some(3));
        let r = PRational::new(2, -53, 1);
        assert_eq!(r.to_string(), "-53/2");
    }

    #[test]
    fn arithmetic_and_order() {
        let a = PRational::new(2, -1, 0); // -1
        let b = PRational::new(2, -3, 1); // -3/2
        assert_eq!(a.add(&b).to_string(), "-5/2");
        assert!(b < a);
        assert_eq!(a.min(b), b);
        assert_eq!(b.mul_int(4).as_integer(), Some(-6));
        assert_eq!(b.mul_p_pow(3).as_integer(), Some(-12));
        assert_eq!(b.mul_p_pow(-1).to_string(), "-3/4");
    }
}
