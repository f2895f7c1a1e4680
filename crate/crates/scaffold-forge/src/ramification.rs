//! Ramification breaks: upper/lower conversion, Hasse-Herbrand maps,
//! valuation bounds for the specialized tower polynomials, and the
//! realizability checkers.
//!
//! For a totally ramified p^n-extension whose ramification filtration
//! jumps by index p at each of n lower breaks b_1 < ... < b_n, the
//! upper breaks u_i satisfy b_1 = u_1 and
//! b_(i+1) - b_i = p^i (u_(i+1) - u_i).  Whether a prescribed upper
//! sequence is realized by the generic tower comes down to comparing
//! each b_i against the K-valuation of d_i = D_i(alpha_1, ...,
//! alpha_(i-1)), which is bounded monomial by monomial using
//! v_K(alpha_h) = -u_h / p.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::PRational;
use crate::generic::GenericTower;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamError {
    #[error("break sequence must be strictly increasing and positive")]
    NotIncreasing,
    #[error("expected {expected} breaks, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("upper break u_{index} = {value} is divisible by p = {p}")]
    NotCoprime { index: usize, value: i64, p: u64 },
    #[error("lower breaks must satisfy p^i | b_(i+1) - b_i; fails at i = {0}")]
    Divisibility(usize),
}

/// Upper and lower ramification breaks of a totally ramified
/// p^n-extension with simple jumps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BreakData {
    #[serde(skip)]
    pub p: u64,
    #[serde(rename = "u")]
    pub upper: Vec<i64>,
    #[serde(rename = "b")]
    pub lower: Vec<i64>,
}

fn require_increasing(seq: &[i64]) -> Result<(), RamError> {
    if seq.is_empty() || seq[0] <= 0 || seq.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RamError::NotIncreasing);
    }
    Ok(())
}

impl BreakData {
    /// Lower breaks from upper: b_1 = u_1,
    /// b_(i+1) = b_i + p^i (u_(i+1) - u_i).
    pub fn from_upper(p: u64, upper: &[i64]) -> Result<Self, RamError> {
        require_increasing(upper)?;
        let mut lower = Vec::with_capacity(upper.len());
        let mut b = upper[0];
        lower.push(b);
        for i in 1..upper.len() {
            b += (p as i64).pow(i as u32) * (upper[i] - upper[i - 1]);
            lower.push(b);
        }
        let data = BreakData {
            p,
            upper: upper.to_vec(),
            lower,
        };
        data.assert_known_inequalities();
        Ok(data)
    }

    /// Upper breaks from lower; requires p^i | b_(i+1) - b_i.
    pub fn from_lower(p: u64, lower: &[i64]) -> Result<Self, RamError> {
        require_increasing(lower)?;
        let mut upper = Vec::with_capacity(lower.len());
        let mut u = lower[0];
        upper.push(u);
        for i in 1..lower.len() {
            let diff = lower[i] - lower[i - 1];
            let step = (p as i64).pow(i as u32);
            if diff % step != 0 {
                return Err(RamError::Divisibility(i));
            }
            u += diff / step;
            upper.push(u);
        }
        if upper.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RamError::NotIncreasing);
        }
        let data = BreakData {
            p,
            upper,
            lower: lower.to_vec(),
        };
        data.assert_known_inequalities();
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.upper.len()
    }

    /// b_j - b_i <= p^(j-1)(u_j - u_i), hence b_j <= p^(j-1) u_j
    /// (indices here are 1-based as in the statement).
    fn assert_known_inequalities(&self) {
        let p = self.p as i64;
        for j in 1..=self.n() {
            let factor = p.pow((j - 1) as u32);
            for i in 1..=j {
                let lhs = self.lower[j - 1] - self.lower[i - 1];
                assert!(
                    lhs <= factor * (self.upper[j - 1] - self.upper[i - 1]),
                    "break inequality violated"
                );
            }
            assert!(
                self.lower[j - 1] <= factor * self.upper[j - 1],
                "b_j <= p^(j-1) u_j violated"
            );
        }
    }
}

/// The Hasse-Herbrand transition function of a ramification profile:
/// phi is piecewise linear with slope 1/|G_0 : G_t|, psi its inverse.
///
/// Knots carry multiplicities so profiles with non-simple jumps can be
/// represented; breaks produced by this crate always have
/// multiplicity 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerbrandMap {
    p: u64,
    /// (lower break, phi(lower break), jump multiplicity).
    knots: Vec<(i64, PRational, u32)>,
}

impl HerbrandMap {
    pub fn from_breaks(data: &BreakData) -> Self {
        Self::from_profile(
            data.p,
            &data.lower.iter().map(|&b| (b, 1)).collect::<Vec<_>>(),
        )
    }

    /// Builds phi from a (lower break, multiplicity) profile: the
    /// group order drops by p^mult at each break.
    pub fn from_profile(p: u64, profile: &[(i64, u32)]) -> Self {
        let mut knots = Vec::with_capacity(profile.len());
        let mut value = PRational::zero(p);
        let mut prev_x = 0i64;
        let mut depth = 0u32;
        for &(b, mult) in profile {
            let segment = PRational::integer(p, (b - prev_x) as i128).mul_p_pow(-(depth as i32));
            value = value.add(&segment);
            knots.push((b, value, mult));
            prev_x = b;
            depth += mult;
        }
        HerbrandMap { p, knots }
    }

    fn depth_after(&self, k: usize) -> u32 {
        self.knots[..=k].iter().map(|&(_, _, m)| m).sum()
    }

    /// phi(x), exactly.
    pub fn phi(&self, x: &PRational) -> PRational {
        let first = self
            .knots
            .first()
            .map(|&(b, _, _)| PRational::integer(self.p, b as i128));
        match first {
            None => *x,
            Some(b1) if *x <= b1 => *x,
            _ => {
                let mut k = 0;
                while k + 1 < self.knots.len()
                    && PRational::integer(self.p, self.knots[k + 1].0 as i128) < *x
                {
                    k += 1;
                }
                let (bk, uk, _) = self.knots[k];
                let depth = self.depth_after(k);
                let dx = x.sub(&PRational::integer(self.p, bk as i128));
                uk.add(&dx.mul_p_pow(-(depth as i32)))
            }
        }
    }

    /// psi(x) = phi^{-1}(x), exactly.
    pub fn psi(&self, x: &PRational) -> PRational {
        let first = self.knots.first().map(|&(_, u, _)| u);
        match first {
            None => *x,
            Some(u1) if *x <= u1 => *x,
            _ => {
                let mut k = 0;
                while k + 1 < self.knots.len() && self.knots[k + 1].1 < *x {
                    k += 1;
                }
                let (bk, uk, _) = self.knots[k];
                let depth = self.depth_after(k);
                let dx = x.sub(&uk);
                PRational::integer(self.p, bk as i128).add(&dx.mul_p_pow(depth as i32))
            }
        }
    }
}

/// Valuation data for d_i = D_i(alpha_1, ..., alpha_(i-1)).
///
/// `bound` is the minimum over the monomials Y^e of D_i of
/// sum_h e_h (-u_h / p); the true v_K(d_i) is always >= bound, with
/// equality when a single monomial achieves the minimum (`exact`).
/// The bound never drops below the coarse degree bound
/// -l_i u_(i-1) / p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DValuation {
    pub level: usize,
    pub exact: Option<PRational>,
    pub bound: PRational,
    pub unique_min: bool,
}

/// Monomial-by-monomial valuation analysis of D_i at the prefix
/// u_1, ..., u_(i-1).
pub fn d_valuation(tower: &GenericTower, i: usize, u: &[i64]) -> DValuation {
    assert!(!tower.sigma().contains(&i), "D_i = 0 on Sigma levels");
    assert!(u.len() >= i - 1, "need u_1..u_(i-1)");
    let p = tower.p();
    let d = tower.d(i);
    let mut best: Option<PRational> = None;
    let mut unique = true;
    for (mono, _) in d.terms() {
        let mut val = PRational::zero(p);
        for (h, &e) in mono.0.iter().enumerate() {
            if e > 0 {
                val = val.add(&PRational::new(p, -(e as i128) * u[h] as i128, 1));
            }
        }
        match &best {
            None => best = Some(val),
            Some(b) => {
                if val < *b {
                    best = Some(val);
                    unique = true;
                } else if val == *b {
                    unique = false;
                }
            }
        }
    }
    let bound = best.expect("D_i is nonzero off Sigma");
    DValuation {
        level: i,
        exact: unique.then_some(bound),
        bound,
        unique_min: unique,
    }
}

/// One level's inequality in a realizability report.
#[derive(Clone, Debug, Serialize)]
pub struct LevelCheck {
    #[serde(rename = "i")]
    pub level: usize,
    /// b_i.
    pub lhs: PRational,
    /// The threshold b_i must exceed.
    pub rhs: PRational,
    /// lhs - rhs; positive means pass.
    pub margin: PRational,
    /// True when a tied monomial minimum forced the conservative
    /// lower bound on v_K(d_i).
    pub conservative: bool,
    pub pass: bool,
}

/// Outcome of a realizability check over a full break sequence.
#[derive(Clone, Debug, Serialize)]
pub struct RamReport {
    pub pass: bool,
    pub per_level: Vec<LevelCheck>,
    pub breaks: BreakData,
    /// The growth constant: any p-coprime strictly increasing
    /// sequence with u_(i+1) > M u_i passes the degree-bound check.
    #[serde(rename = "M")]
    pub m: i64,
}

fn validate_upper(tower: &GenericTower, u: &[i64]) -> Result<(), RamError> {
    if u.len() != tower.n() {
        return Err(RamError::BadLength {
            expected: tower.n(),
            got: u.len(),
        });
    }
    require_increasing(u)?;
    for (idx, &ui) in u.iter().enumerate() {
        if ui % tower.p() as i64 == 0 {
            return Err(RamError::NotCoprime {
                index: idx + 1,
                value: ui,
                p: tower.p(),
            });
        }
    }
    Ok(())
}

/// Checks b_i > -p^(i-1) v_K(d_i) for every i outside Sigma, using
/// the monomial minimum of D_i (exact when unique, a conservative
/// lower bound otherwise).  On pass, the tower realizes a G-extension
/// with upper breaks u, lower breaks b, and ramification subgroups
/// exactly the chosen filtration.
pub fn check_ramfilt(tower: &GenericTower, u: &[i64]) -> Result<RamReport, RamError> {
    validate_upper(tower, u)?;
    let p = tower.p();
    let breaks = BreakData::from_upper(p, u)?;
    let mut per_level = Vec::new();
    for i in 2..=tower.n() {
        if tower.sigma().contains(&i) {
            continue;
        }
        let dv = d_valuation(tower, i, u);
        let rhs = dv.bound.mul_p_pow(i as i32 - 1).neg();
        let lhs = PRational::integer(p, breaks.lower[i - 1] as i128);
        let margin = lhs.sub(&rhs);
        per_level.push(LevelCheck {
            level: i,
            pass: lhs > rhs,
            conservative: !dv.unique_min,
            lhs,
            rhs,
            margin,
        });
    }
    Ok(RamReport {
        pass: per_level.iter().all(|c| c.pass),
        per_level,
        breaks,
        m: m_constant(tower),
    })
}

/// The coarser realizability check b_i > p^(i-2) l_i u_(i-1), which
/// depends only on the total degrees l_i.
pub fn check_ramfiltcor(tower: &GenericTower, u: &[i64]) -> Result<RamReport, RamError> {
    validate_upper(tower, u)?;
    let p = tower.p();
    let breaks = BreakData::from_upper(p, u)?;
    let mut per_level = Vec::new();
    for i in 2..=tower.n() {
        if tower.sigma().contains(&i) {
            continue;
        }
        let l = tower.degree(i).expect("D_i nonzero off Sigma") as i128;
        let rhs = PRational::integer(p, l * u[i - 2] as i128).mul_p_pow(i as i32 - 2);
        let lhs = PRational::integer(p, breaks.lower[i - 1] as i128);
        let margin = lhs.sub(&rhs);
        per_level.push(LevelCheck {
            level: i,
            pass: lhs > rhs,
            conservative: false,
            lhs,
            rhs,
            margin,
        });
    }
    Ok(RamReport {
        pass: per_level.iter().all(|c| c.pass),
        per_level,
        breaks,
        m: m_constant(tower),
    })
}

/// M = max p^(i-2) l_i over i outside Sigma, and 1 when Sigma is
/// full.
pub fn m_constant(tower: &GenericTower) -> i64 {
    let mut m = 1i64;
    for i in 2..=tower.n() {
        if tower.sigma().contains(&i) {
            continue;
        }
        let l = tower.degree(i).expect("D_i nonzero off Sigma") as i64;
        m = m.max((tower.p() as i64).pow(i as u32 - 2) * l);
    }
    m
}
