//! Galois-scaffold data over the base field K = F_p((pi)): cofactor
//! elements t_ij and their valuation laws, the ratios mu_ij, scaffold
//! precision, truncated-exponential generators Theta_i in K[G], the
//! associated-order display, and the greedy break search.
//!
//! The input is a choice of a in K* with p not dividing v_K(a) and
//! units-free scale factors omega_1, ..., omega_n; the tower equations
//! then use a_i = a * omega_i^(p^(n-1)), so all upper breaks are
//! congruent mod p^(n-1) and the cofactor construction below applies.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, LaurentFrac};
use crate::generic::GenericTower;
use crate::pgroup::PFilteredGroup;
use crate::ramification::{d_valuation, BreakData, RamError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaffoldError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Breaks(#[from] RamError),
    #[error("expected {expected} scale factors, got {got}")]
    BadOmegaCount { expected: usize, got: usize },
    #[error("a and omegas must be nonzero")]
    ZeroInput,
    #[error("p divides v_K(a) = {0}")]
    RamifiedBase(i64),
    #[error("derived breaks are not strictly increasing and positive: {0:?}")]
    BreaksNotIncreasing(Vec<i64>),
    #[error("cofactor t_{i}{j} vanished")]
    ZeroCofactor { i: usize, j: usize },
    #[error("u_1 = {u1} violates the mode congruence ({requirement})")]
    BadSeed { u1: i64, requirement: String },
}

/// Validated scaffold input data.
#[derive(Clone, Debug)]
pub struct ScaffoldInput {
    p: u64,
    n: usize,
    a: LaurentFrac,
    omegas: Vec<LaurentFrac>,
    a_i: Vec<LaurentFrac>,
    /// m_i = -v_K(omega_i).
    m: Vec<i64>,
    /// u_i = -v_K(a_i) = -v_K(a) + p^(n-1) m_i.
    u: Vec<i64>,
}

impl ScaffoldInput {
    pub fn new(
        p: u64,
        a: LaurentFrac,
        omegas: Vec<LaurentFrac>,
    ) -> Result<Self, ScaffoldError> {
        let n = omegas.len();
        if n == 0 {
            return Err(ScaffoldError::BadOmegaCount {
                expected: 1,
                got: 0,
            });
        }
        let va = a.valuation().ok_or(ScaffoldError::ZeroInput)?;
        if va.rem_euclid(p as i64) == 0 {
            return Err(ScaffoldError::RamifiedBase(va));
        }
        let mut m = Vec::with_capacity(n);
        let mut a_i = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        for omega in &omegas {
            let vo = omega.valuation().ok_or(ScaffoldError::ZeroInput)?;
            m.push(-vo);
            let ai = a.mul(&omega.frobenius_pow(n as u32 - 1));
            u.push(-ai.valuation().expect("product of nonzero elements"));
            a_i.push(ai);
        }
        if u[0] <= 0 || u.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ScaffoldError::BreaksNotIncreasing(u));
        }
        Ok(ScaffoldInput {
            p,
            n,
            a,
            omegas,
            a_i,
            m,
            u,
        })
    }

    /// Pure pi-power realization of an upper break sequence:
    /// a = pi^(-u_1), omega_i = pi^(-(u_i - u_1)/p^(n-1)).
    pub fn from_breaks(p: u64, u: &[i64]) -> Result<Self, ScaffoldError> {
        let n = u.len();
        let step = (p as i64).pow(n as u32 - 1);
        let a = LaurentFrac::pi_pow(p, -u[0]);
        let omegas = u
            .iter()
            .map(|&ui| {
                if (ui - u[0]) % step != 0 {
                    return Err(ScaffoldError::Breaks(RamError::Divisibility(0)));
                }
                Ok(LaurentFrac::pi_pow(p, -(ui - u[0]) / step))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(p, a, omegas)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &LaurentFrac {
        &self.a
    }

    pub fn omegas(&self) -> &[LaurentFrac] {
        &self.omegas
    }

    pub fn a_terms(&self) -> &[LaurentFrac] {
        &self.a_i
    }

    pub fn scale_valuations(&self) -> &[i64] {
        &self.m
    }

    pub fn upper_breaks(&self) -> &[i64] {
        &self.u
    }

    pub fn breaks(&self) -> Result<BreakData, RamError> {
        BreakData::from_upper(self.p, &self.u)
    }
}

/// t_ij for 1 <= i <= j: the signed (i,1) minor of the j x j matrix
/// whose first column is the alpha placeholder and whose k-th further
/// column is omega^(p^(n-j+k-1)).  t_11 is the empty determinant 1.
pub fn cofactors(input: &ScaffoldInput, j: usize) -> Result<Vec<LaurentFrac>, ScaffoldError> {
    assert!(j >= 1 && j <= input.n);
    let p = input.p;
    let n = input.n;
    // Frobenius powers of the omegas appearing in columns.
    let powers: Vec<Vec<LaurentFrac>> = (0..j)
        .map(|row| {
            (0..j.saturating_sub(1))
                .map(|k| input.omegas[row].frobenius_pow((n - j + k) as u32))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(j);
    for i in 1..=j {
        let rows: Vec<usize> = (0..j).filter(|&r| r != i - 1).collect();
        let minor = det(p, &powers, &rows, &(0..j - 1).collect::<Vec<_>>());
        let signed = if (i - 1) % 2 == 0 { minor } else { minor.neg() };
        if signed.is_zero() {
            return Err(ScaffoldError::ZeroCofactor { i, j });
        }
        out.push(signed);
    }
    Ok(out)
}

/// Laplace expansion along the first column; the matrices here are at
/// most (n-1) x (n-1) with n <= a handful.
fn det(p: u64, entries: &[Vec<LaurentFrac>], rows: &[usize], cols: &[usize]) -> LaurentFrac {
    if rows.is_empty() {
        return LaurentFrac::one(p);
    }
    let mut acc = LaurentFrac::zero(p);
    for (pos, &r) in rows.iter().enumerate() {
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let sub = det(p, entries, &sub_rows, &cols[1..]);
        let term = entries[r][cols[0]].mul(&sub);
        acc = if pos % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// The ratios mu_ij = t_ij / t_jj for 1 <= i < j <= n.
#[derive(Clone, Debug)]
pub struct MuMatrix {
    n: usize,
    entries: BTreeMap<(usize, usize), LaurentFrac>,
}

impl MuMatrix {
    pub fn get(&self, i: usize, j: usize) -> &LaurentFrac {
        &self.entries[&(i, j)]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &LaurentFrac)> {
        self.entries.iter()
    }
}

pub fn mu_matrix(input: &ScaffoldInput) -> Result<MuMatrix, ScaffoldError> {
    let mut entries = BTreeMap::new();
    for j in 2..=input.n {
        let t = cofactors(input, j)?;
        let tjj = &t[j - 1];
        for i in 1..j {
            entries.insert((i, j), t[i - 1].div(tjj)?);
        }
    }
    Ok(MuMatrix {
        n: input.n,
        entries,
    })
}

/// Scaffold precision: finite minimum of the hypothesis gaps, or
/// infinite when no level contributes an inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Finite(i64),
    Infinite,
}

impl Precision {
    pub fn at_least(&self, threshold: i64) -> bool {
        match self {
            Precision::Infinite => true,
            Precision::Finite(c) => *c >= threshold,
        }
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Precision::Finite(c) => Some(*c),
            Precision::Infinite => None,
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Finite(c) => write!(f, "{c}"),
            Precision::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Precision {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Precision::Finite(c) => serializer.serialize_i64(*c),
            Precision::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Hypothesis gaps at one level outside Sigma (i >= 2).
#[derive(Clone, Debug, Serialize)]
pub struct LevelGaps {
    pub level: usize,
    /// b_i - (-p^(n-1) v_K(d_i) - p^(n-i) b_(i-1) + p^(n-1) u_(i-1)).
    pub gap1: i64,
    /// b_i - p^(n-1) u_(i-1).
    pub gap2: i64,
    /// True when v_K(d_i) had to fall back to a tied minimum.
    pub conservative: bool,
}

/// Per-level margins reported when the scaffold hypotheses fail.
#[derive(Clone, Debug, Error, Serialize)]
#[error("scaffold hypotheses fail at level(s) {:?}", self.failing_levels())]
pub struct HypothesesFail {
    pub gaps: Vec<LevelGaps>,
}

impl HypothesesFail {
    pub fn failing_levels(&self) -> Vec<usize> {
        self.gaps
            .iter()
            .filter(|g| g.gap1 < 1 || g.gap2 < 1)
            .map(|g| g.level)
            .collect()
    }
}

fn precision_from_gaps(gaps: Vec<LevelGaps>) -> Result<(Precision, Vec<LevelGaps>), HypothesesFail> {
    if gaps.iter().any(|g| g.gap1 < 1 || g.gap2 < 1) {
        return Err(HypothesesFail { gaps });
    }
    let min = gaps.iter().flat_map(|g| [g.gap1, g.gap2]).min();
    Ok((
        min.map(Precision::Finite).unwrap_or(Precision::Infinite),
        gaps,
    ))
}

fn gaps_at_level(tower: &GenericTower, u: &[i64], lower: &[i64], i: usize) -> LevelGaps {
    let p = tower.p();
    let n = tower.n();
    let dv = d_valuation(tower, i, u);
    // p^(n-1) v_K(d_i) is an integer: v_K(d_i) has denominator p and
    // every contributing level has i >= 2, so n >= 2.
    let scaled = dv.bound.mul_p_pow(n as i32 - 1);
    let vd = scaled
        .as_integer()
        .expect("p^(n-1) v_K(d_i) is integral for n >= 2") as i64;
    let pn1 = (p as i64).pow(n as u32 - 1);
    let pni = (p as i64).pow((n - i) as u32);
    let gap1 = lower[i - 1] - (-vd - pni * lower[i - 2] + pn1 * u[i - 2]);
    let gap2 = lower[i - 1] - pn1 * u[i - 2];
    LevelGaps {
        level: i,
        gap1,
        gap2,
        conservative: !dv.unique_min,
    }
}

/// The scaffold precision: c = min over i >= 2 outside Sigma of the
/// gaps in
///   b_i > -p^(n-1) v_K(d_i) - p^(n-i) b_(i-1) + p^(n-1) u_(i-1)
///   b_i > p^(n-1) u_(i-1),
/// provided every gap is at least 1.
pub fn precision_c(
    tower: &GenericTower,
    input: &ScaffoldInput,
) -> Result<(Precision, Vec<LevelGaps>), HypothesesFail> {
    let u = input.upper_breaks();
    let breaks = BreakData::from_upper(tower.p(), u).expect("validated by ScaffoldInput");
    let gaps: Vec<LevelGaps> = (2..=tower.n())
        .filter(|i| !tower.sigma().contains(i))
        .map(|i| gaps_at_level(tower, u, &breaks.lower, i))
        .collect();
    precision_from_gaps(gaps)
}

/// The degree-bound-only precision c' = min over i >= 2 outside Sigma
/// of p^(n-i) b_(i-1) - p^(n-2) l_i u_(i-1) + b_i - p^(n-1) u_(i-1);
/// always <= the exact-valuation precision when both are defined.
pub fn precision_cprime(
    tower: &GenericTower,
    u: &[i64],
) -> Result<(Precision, Vec<LevelGaps>), HypothesesFail> {
    let p = tower.p();
    let n = tower.n();
    let breaks = BreakData::from_upper(p, u).expect("caller validates");
    let pn1 = (p as i64).pow(n as u32 - 1);
    let pn2 = if n >= 2 { (p as i64).pow(n as u32 - 2) } else { 1 };
    let gaps: Vec<LevelGaps> = (2..=n)
        .filter(|i| !tower.sigma().contains(i))
        .map(|i| {
            let l = tower.degree(i).expect("D_i nonzero off Sigma") as i64;
            let pni = (p as i64).pow((n - i) as u32);
            let term = pni * breaks.lower[i - 2] - pn2 * l * u[i - 2] + breaks.lower[i - 1]
                - pn1 * u[i - 2];
            LevelGaps {
                level: i,
                gap1: term,
                gap2: term,
                conservative: false,
            }
        })
        .collect();
    precision_from_gaps(gaps)
}

/// Freeness and Hopf-order certificates derived from the precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificates {
    /// r(u_1): least nonnegative residue of u_1 mod p^n.
    pub r_u1: i64,
    /// The witness 1 <= m <= n with r(u_1) | p^m - 1, if any.
    pub m_witness: Option<usize>,
    /// Ring of integers free of rank 1 over its associated order.
    pub gms_free: bool,
    /// Associated order is a Hopf order in K[G].
    pub hopf: bool,
}

/// gms_free iff r(u_1) divides p^m - 1 for some 1 <= m <= n and
/// c >= r(u_1); hopf iff u_1 = -1 mod p^n and c >= p^n - 1.
pub fn certify(p: u64, n: usize, u1: i64, c: Precision) -> Certificates {
    let pn = (p as i64).pow(n as u32);
    let r = u1.rem_euclid(pn);
    let m_witness = (1..=n).find(|&m| {
        let pm1 = (p as i64).pow(m as u32) - 1;
        pm1 % r == 0
    });
    let gms_free = m_witness.is_some() && c.at_least(r);
    let hopf = r == pn - 1 && c.at_least(pn - 1);
    Certificates {
        r_u1: r,
        m_witness,
        gms_free,
        hopf,
    }
}

/// An element of the group algebra K[G] with LaurentFrac
/// coefficients, stored densely over the element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    coeffs: Vec<LaurentFrac>,
}

impl GroupAlgebraElement {
    pub fn zero(p: u64, order: usize) -> Self {
        GroupAlgebraElement {
            coeffs: vec![LaurentFrac::zero(p); order],
        }
    }

    pub fn one(group: &PFilteredGroup) -> Self {
        Self::from_element(group, group.identity())
    }

    pub fn from_element(group: &PFilteredGroup, g: usize) -> Self {
        let mut out = Self::zero(group.p(), group.order());
        out.coeffs[g] = LaurentFrac::one(group.p());
        out
    }

    pub fn coeff(&self, g: usize) -> &LaurentFrac {
        &self.coeffs[g]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&g| !self.coeffs[g].is_zero())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        GroupAlgebraElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GroupAlgebraElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &LaurentFrac) -> Self {
        GroupAlgebraElement {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Convolution product over the Cayley table.
    pub fn mul(&self, group: &PFilteredGroup, other: &Self) -> Self {
        let mut out = Self::zero(group.p(), group.order());
        for a in 0..self.coeffs.len() {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..other.coeffs.len() {
                if other.coeffs[b].is_zero() {
                    continue;
                }
                let g = group.mul(a, b);
                out.coeffs[g] = out.coeffs[g].add(&self.coeffs[a].mul(&other.coeffs[b]));
            }
        }
        out
    }

    /// Sum of all coefficients (the augmentation map).
    pub fn augmentation(&self, p: u64) -> LaurentFrac {
        self.coeffs
            .iter()
            .fold(LaurentFrac::zero(p), |acc, c| acc.add(c))
    }
}

/// The truncated exponential X^[Y] = 1 + Y (X - 1) in K[G].
pub fn truncated_exponential(
    group: &PFilteredGroup,
    x: &GroupAlgebraElement,
    y: &LaurentFrac,
) -> GroupAlgebraElement {
    let one = GroupAlgebraElement::one(group);
    one.add(&x.sub(&one).scale(y))
}

/// The generator used at level i: the least-index element of
/// G_(i-1) that lies outside G_(i), i.e. a lift of the designated
/// generator of G_(i-1)/G_(i).
pub fn level_generator(group: &PFilteredGroup, i: usize) -> usize {
    *group
        .series(i - 1)
        .iter()
        .find(|&&g| !group.in_series(i, g))
        .expect("proper inclusion of consecutive series members")
}

/// Theta_n = g_n; Theta_i = g_i * prod_{j > i} Theta_j^[-mu_ij],
/// with the product taken in ascending j.  Each Theta_i has
/// augmentation 1 and support inside g_i G_(i) (and hence in
/// G_(i-1)).
pub fn theta_ops(group: &PFilteredGroup, mu: &MuMatrix) -> Vec<GroupAlgebraElement> {
    let n = group.n();
    let mut thetas: Vec<Option<GroupAlgebraElement>> = vec![None; n + 1];
    for i in (1..=n).rev() {
        let mut acc = GroupAlgebraElement::from_element(group, level_generator(group, i));
        for j in i + 1..=n {
            let factor = truncated_exponential(
                group,
                thetas[j].as_ref().expect("computed in descending order"),
                &mu.get(i, j).neg(),
            );
            acc = acc.mul(group, &factor);
        }
        thetas[i] = Some(acc);
    }
    thetas.into_iter().skip(1).map(|t| t.unwrap()).collect()
}

/// The exponents M_i = (b_i + 1) / p^i and the generator displays
/// (Theta_i - 1) / pi^(M_i) of the associated order, available only
/// when every M_i is integral.
#[derive(Clone, Debug)]
pub struct AssociatedOrder {
    pub exponents: Vec<i64>,
    pub generators: Vec<GroupAlgebraElement>,
}

/// Signals that b_i = -1 mod p^i fails at `level`, so the truncated
/// exponential generator display does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error, Serialize)]
#[error("M_{level} = (b + 1)/p^{level} is not an integer")]
pub struct NotIntegral {
    pub level: usize,
}

pub fn associated_order(
    group: &PFilteredGroup,
    breaks: &BreakData,
    thetas: &[GroupAlgebraElement],
) -> Result<AssociatedOrder, NotIntegral> {
    let p = group.p() as i64;
    let mut exponents = Vec::with_capacity(breaks.n());
    for (idx, &b) in breaks.lower.iter().enumerate() {
        let i = idx + 1;
        let denom = p.pow(i as u32);
        if (b + 1) % denom != 0 {
            return Err(NotIntegral { level: i });
        }
        exponents.push((b + 1) / denom);
    }
    let one = GroupAlgebraElement::one(group);
    let generators = thetas
        .iter()
        .zip(&exponents)
        .map(|(theta, &m)| {
            theta
                .sub(&one)
                .scale(&LaurentFrac::pi_pow(group.p(), -m))
        })
        .collect();
    Ok(AssociatedOrder {
        exponents,
        generators,
    })
}

/// What the greedy break search optimizes for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Scaffold hypotheses with all gaps >= c_min.
    Scaffold { c_min: i64 },
    /// u_1 = -1 mod p^n and gaps >= p^n - 1, the Hopf-order regime.
    Hopf,
}

/// Greedy lexicographically minimal upper-break sequence: u_1 is the
/// smallest positive seed satisfying the mode congruence (unless
/// overridden), and each later u_i is the smallest continuation
/// congruent to u_1 mod p^(n-1) whose hypothesis gaps reach the
/// mode's precision floor.
pub fn search_breaks(
    tower: &GenericTower,
    mode: SearchMode,
    u1_override: Option<i64>,
) -> Result<Vec<i64>, ScaffoldError> {
    let p = tower.p() as i64;
    let n = tower.n();
    let pn = p.pow(n as u32);
    let (c_min, u1) = match mode {
        SearchMode::Scaffold { c_min } => {
            let u1 = u1_override.unwrap_or(1);
            if u1 <= 0 || u1 % p == 0 {
                return Err(ScaffoldError::BadSeed {
                    u1,
                    requirement: format!("positive and coprime to {p}"),
                });
            }
            (c_min.max(1), u1)
        }
        SearchMode::Hopf => {
            let u1 = u1_override.unwrap_or(pn - 1);
            if u1 <= 0 || u1.rem_euclid(pn) != pn - 1 {
                return Err(ScaffoldError::BadSeed {
                    u1,
                    requirement: format!("u_1 = -1 mod {pn}"),
                });
            }
            (pn - 1, u1)
        }
    };
    let step = p.pow(n as u32 - 1);
    let mut u = vec![u1];
    let mut lower = vec![u1];
    for i in 2..=n {
        let mut candidate = u[i - 2] + step;
        loop {
            let b_i = lower[i - 2] + p.pow(i as u32 - 1) * (candidate - u[i - 2]);
            let ok = if tower.sigma().contains(&i) {
                true
            } else {
                let mut prefix = u.clone();
                prefix.push(candidate);
                let mut probe_lower = lower.clone();
                probe_lower.push(b_i);
                let gaps = gaps_at_level(tower, &prefix, &probe_lower, i);
                gaps.gap1 >= c_min && gaps.gap2 >= c_min
            };
            if ok {
                u.push(candidate);
                lower.push(b_i);
                break;
            }
            candidate += step;
        }
    }
    Ok(u)
}

/// Everything the scaffold analysis produces for one input, in a
/// serializable form; text rendering lives in the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct ScaffoldReport {
    pub p: u64,
    pub n: usize,
    pub breaks: BreakData,
    /// Printed t_ij entries keyed "i,j", 1 <= i <= j <= n.
    pub t: BTreeMap<String, String>,
    /// Printed mu_ij entries keyed "i,j", 1 <= i < j <= n.
    pub mu: BTreeMap<String, String>,
    pub gaps: Vec<LevelGaps>,
    pub c: Option<Precision>,
    pub cprime_gaps: Vec<LevelGaps>,
    pub cprime: Option<Precision>,
    pub certificates: Option<Certificates>,
    /// Names of the level generators g_1, ..., g_n.
    pub generators: Vec<String>,
    /// Theta_i as element-name -> coefficient string maps.
    pub thetas: Vec<BTreeMap<String, String>>,
    /// M_i = (b_i + 1)/p^i when all integral.
    pub m_exponents: Option<Vec<i64>>,
    pub not_integral: Option<NotIntegral>,
    /// Associated-order generators (Theta_i - 1)/pi^(M_i).
    pub order_generators: Option<Vec<BTreeMap<String, String>>>,
    pub warnings: Vec<String>,
}

fn kg_to_map(group: &PFilteredGroup, x: &GroupAlgebraElement) -> BTreeMap<String, String> {
    x.support()
        .into_iter()
        .map(|g| (group.name(g).to_string(), x.coeff(g).to_string()))
        .collect()
}

/// Runs the full scaffold pipeline on one input.
pub fn analyze(tower: &GenericTower, input: &ScaffoldInput) -> Result<ScaffoldReport, ScaffoldError> {
    let group = tower.group();
    let p = input.p();
    let n = input.n();
    let breaks = input.breaks()?;
    let mut t = BTreeMap::new();
    for j in 1..=n {
        let tj = cofactors(input, j)?;
        for i in 1..=j {
            t.insert(format!("{i},{j}"), tj[i - 1].to_string());
        }
    }
    let mu = mu_matrix(input)?;
    let mu_strings = mu
        .iter()
        .map(|(&(i, j), v)| (format!("{i},{j}"), v.to_string()))
        .collect();
    let mut warnings = Vec::new();
    let (c, gaps) = match precision_c(tower, input) {
        Ok((c, gaps)) => (Some(c), gaps),
        Err(fail) => {
            warnings.push(format!(
                "scaffold hypotheses fail at level(s) {:?}",
                fail.failing_levels()
            ));
            (None, fail.gaps)
        }
    };
    if gaps.iter().any(|g| g.conservative) {
        warnings.push("tie: conservative d-valuation bound used".to_string());
    }
    let (cprime, cprime_gaps) = match precision_cprime(tower, input.upper_breaks()) {
        Ok((c, gaps)) => (Some(c), gaps),
        Err(fail) => {
            warnings.push(format!(
                "degree-bound hypotheses fail at level(s) {:?}",
                fail.failing_levels()
            ));
            (None, fail.gaps)
        }
    };
    let certificates = c.map(|c| certify(p, n, input.upper_breaks()[0], c));
    let thetas = theta_ops(group, &mu);
    let generators = (1..=n)
        .map(|i| group.name(level_generator(group, i)).to_string())
        .collect();
    let theta_maps = thetas.iter().map(|t| kg_to_map(group, t)).collect();
    let (m_exponents, not_integral, order_generators) =
        match associated_order(group, &breaks, &thetas) {
            Ok(order) => {
                let gens = order
                    .generators
                    .iter()
                    .map(|g| kg_to_map(group, g))
                    .collect();
                (Some(order.exponents), None, Some(gens))
            }
            Err(ni) => (None, Some(ni), None),
        };
    Ok(ScaffoldReport {
        p,
        n,
        breaks,
        t,
        mu: mu_strings,
        gaps,
        c,
        cprime_gaps,
        cprime,
        certificates,
        generators,
        thetas: theta_maps,
        m_exponents,
        not_integral,
        order_generators,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::build_generic;
    use crate::pgroup::PresetFamily;

    fn d16_tower() -> GenericTower {
        let g = PFilteredGroup::preset(PresetFamily::Dihedral2, 2, 4).unwrap();
        build_generic(&g).unwrap()
    }

    fn lf(s: &str) -> LaurentFrac {
        LaurentFrac::parse(2, s).unwrap()
    }

    fn example3_input() -> ScaffoldInput {
        ScaffoldInput::new(
            2,
            lf("pi^-15"),
            vec![lf("1"), lf("pi^-1"), lf("pi^-11"), lf("pi^-33")],
        )
        .unwrap()
    }

    fn example2_input() -> ScaffoldInput {
        ScaffoldInput::new(
            2,
            lf("pi^-1"),
            vec![lf("1"), lf("pi^-1"), lf("pi^-4"), lf("pi^-11")],
        )
        .unwrap()
    }

    #[test]
    fn input_validation() {
        // p | v_K(a)
        assert!(matches!(
            ScaffoldInput::new(2, lf("pi^-2"), vec![lf("1"), lf("pi^-1")]),
            Err(ScaffoldError::RamifiedBase(-2))
        ));
        // breaks must increase
        assert!(ScaffoldInput::new(2, lf("pi^-1"), vec![lf("pi^-1"), lf("1")]).is_err());
        let input = example3_input();
        assert_eq!(input.upper_breaks(), &[15, 23, 103, 279]);
        assert_eq!(input.scale_valuations(), &[0, 1, 11, 33]);
    }

    #[test]
    fn cofactor_examples() {
        let input = example3_input();
        // j = 1: empty determinant
        let t1 = cofactors(&input, 1).unwrap();
        assert_eq!(t1[0], lf("1"));
        // j = 2: t_12 = omega_2^4 = pi^-4, t_22 = omega_1^4 = 1
        let t2 = cofactors(&input, 2).unwrap();
        assert_eq!(t2[0], lf("pi^-4"));
        assert_eq!(t2[1], lf("1"));
    }

    #[test]
    fn example3_mu_matches_printed_fractions() {
        let input = example3_input();
        let mu = mu_matrix(&input).unwrap();
        let expect = [
            ((1, 2), "1/pi^4"),
            ((1, 3), "(1+pi^20)/(pi^42*(1+pi^2))"),
            ((2, 3), "(1+pi^22)/(pi^40*(1+pi^2))"),
            (
                (1, 4),
                "(1+pi^10+pi^44+pi^74+pi^76+pi^96)/(pi^109*(1+pi+pi^20+pi^23+pi^31+pi^33))",
            ),
            (
                (2, 4),
                "(1+pi^11+pi^44+pi^99)/(pi^108*(1+pi+pi^20+pi^23+pi^31+pi^33))",
            ),
            (
                (3, 4),
                "(1+pi+pi^64+pi^67+pi^97+pi^99)/(pi^88*(1+pi+pi^20+pi^23+pi^31+pi^33))",
            ),
        ];
        for ((i, j), s) in expect {
            assert_eq!(mu.get(i, j).to_string(), s, "mu_{i}{j}");
        }
    }

    #[test]
    fn mu_closed_form_small_case() {
        // n = 2, omega = (1, pi^-1): mu_12 = t_12/t_22 with 1x1
        // determinants omega_2^(p^(n-2)) / omega_1^(p^(n-2)).
        let input = ScaffoldInput::new(2, lf("pi^-1"), vec![lf("1"), lf("pi^-1")]).unwrap();
        let mu = mu_matrix(&input).unwrap();
        assert_eq!(mu.get(1, 2), &lf("pi^-1"));
        // odd p: the sign of t_22 = -omega_1 cancels in the ratio
        // only up to -1, so mu_12 = -omega_2/omega_1.
        let input = ScaffoldInput::new(
            3,
            LaurentFrac::pi_pow(3, -1),
            vec![LaurentFrac::one(3), LaurentFrac::pi_pow(3, -1)],
        )
        .unwrap();
        let mu = mu_matrix(&input).unwrap();
        let expected = LaurentFrac::pi_pow(3, -1).neg();
        assert_eq!(mu.get(1, 2), &expected);
    }

    #[test]
    fn example2_precision() {
        let tower = d16_tower();
        let input = example2_input();
        assert_eq!(input.upper_breaks(), &[1, 9, 33, 89]);
        let (c, gaps) = precision_c(&tower, &input).unwrap();
        assert_eq!(c, Precision::Finite(14));
        let flat: Vec<i64> = gaps.iter().flat_map(|g| [g.gap1, g.gap2]).collect();
        assert_eq!(flat, vec![31, 41, 14, 297]);
    }

    #[test]
    fn example3_precision_and_hopf() {
        let tower = d16_tower();
        let input = example3_input();
        let (c, gaps) = precision_c(&tower, &input).unwrap();
        assert_eq!(c, Precision::Finite(17));
        let flat: Vec<i64> = gaps.iter().flat_map(|g| [g.gap1, g.gap2]).collect();
        assert_eq!(flat, vec![17, 167, 50, 935]);
        let certs = certify(2, 4, 15, c);
        assert!(certs.hopf);
        assert!(certs.gms_free);
        assert_eq!(certs.r_u1, 15);
    }

    #[test]
    fn example2_certificates() {
        let tower = d16_tower();
        let input = example2_input();
        let (c, _) = precision_c(&tower, &input).unwrap();
        let certs = certify(2, 4, 1, c);
        assert!(certs.gms_free);
        assert!(!certs.hopf);
        assert_eq!(certs.r_u1, 1);
        assert_eq!(certs.m_witness, Some(1));
    }

    #[test]
    fn certify_divisor_check() {
        // u_1 = 9: r = 9 divides none of {1, 3, 7, 15}, so freeness
        // is not certified no matter how large the precision is.
        let certs = certify(2, 4, 9, Precision::Finite(1_000_000));
        assert!(!certs.gms_free);
        assert!(!certs.hopf);
        // u_1 = 5 does certify: 5 divides 2^4 - 1 = 15.
        let certs = certify(2, 4, 5, Precision::Finite(5));
        assert!(certs.gms_free);
        assert_eq!(certs.m_witness, Some(4));
        // ... but not with precision below r(u_1).
        let certs = certify(2, 4, 5, Precision::Finite(4));
        assert!(!certs.gms_free);
    }

    #[test]
    fn infinite_precision_for_elem_abelian() {
        let g = PFilteredGroup::preset(PresetFamily::ElemAbelian, 2, 3).unwrap();
        let tower = build_generic(&g).unwrap();
        let input = ScaffoldInput::new(
            2,
            lf("pi^-1"),
            vec![lf("1"), lf("pi^-1"), lf("pi^-2")],
        )
        .unwrap();
        let (c, gaps) = precision_c(&tower, &input).unwrap();
        assert_eq!(c, Precision::Infinite);
        assert!(gaps.is_empty());
        assert_eq!(c.to_string(), "inf");
        let certs = certify(2, 3, 1, c);
        assert!(certs.gms_free);
    }

    #[test]
    fn cprime_is_a_lower_bound_when_defined() {
        let tower = d16_tower();
        // Example 2 actually fails the stronger degree-bound
        // hypotheses, first at level 3: 2*17 - 4*3*9 + 113 - 72 = -33.
        let fail = precision_cprime(&tower, &[1, 9, 33, 89]).unwrap_err();
        assert_eq!(fail.failing_levels(), vec![3, 4]);
        assert_eq!(fail.gaps[0].gap1, -33);
        // A faster-growing sequence satisfies both, with c' <= c.
        let u = [1, 9, 113, 1801];
        let (cp, _) = precision_cprime(&tower, &u).unwrap();
        let input = ScaffoldInput::from_breaks(2, &u).unwrap();
        let (c, _) = precision_c(&tower, &input).unwrap();
        assert!(cp.finite().unwrap() <= c.finite().unwrap());
        // n = 1: empty minimum
        let c2 = PFilteredGroup::preset(PresetFamily::Cyclic, 2, 1).unwrap();
        let t = build_generic(&c2).unwrap();
        let (cp, _) = precision_cprime(&t, &[3]).unwrap();
        assert_eq!(cp, Precision::Infinite);
    }

    #[test]
    fn theta_examples() {
        let tower = d16_tower();
        let group = tower.group();
        let input = example3_input();
        let mu = mu_matrix(&input).unwrap();
        let thetas = theta_ops(group, &mu);
        // Theta_4 = s^4
        assert_eq!(thetas[3].support(), vec![4]);
        assert_eq!(group.name(4), "s^4");
        // Theta_3 = s^2 (1 - mu_34 (s^4 - 1)): support {s^2, s^6}
        let s2 = 2;
        let s6 = 6;
        assert_eq!(thetas[2].support(), vec![s2, s6]);
        let mu34 = mu.get(3, 4);
        assert_eq!(
            thetas[2].coeff(s6),
            &mu34.neg(),
            "coefficient of s^6 is -mu_34"
        );
        assert_eq!(thetas[2].coeff(s2), &LaurentFrac::one(2).add(mu34));
        // Theta_2 lives in t<s^2>, Theta_1 in s<s^2, t>
        for &g in &thetas[1].support() {
            assert!(group.name(g).contains('t'));
        }
        assert!(thetas[0].support().iter().all(|&g| !group.in_series(1, g)));
        // augmentation 1 and support inside G_(i-1)
        for (idx, theta) in thetas.iter().enumerate() {
            let i = idx + 1;
            assert_eq!(theta.augmentation(2), LaurentFrac::one(2), "Theta_{i}");
            assert!(theta
                .support()
                .iter()
                .all(|&g| group.in_series(i - 1, g)));
        }
        // single-level tower: Theta_1 = g_1
        let c2 = PFilteredGroup::preset(PresetFamily::Cyclic, 2, 1).unwrap();
        let t1 = build_generic(&c2).unwrap();
        let input1 = ScaffoldInput::new(2, lf("pi^-1"), vec![lf("1")]).unwrap();
        let mu1 = mu_matrix(&input1).unwrap();
        let th = theta_ops(t1.group(), &mu1);
        assert_eq!(th[0].support(), vec![1]);
    }

    #[test]
    fn associated_order_example3() {
        let tower = d16_tower();
        let input = example3_input();
        let breaks = input.breaks().unwrap();
        assert_eq!(breaks.lower, vec![15, 31, 351, 1759]);
        let mu = mu_matrix(&input).unwrap();
        let thetas = theta_ops(tower.group(), &mu);
        let order = associated_order(tower.group(), &breaks, &thetas).unwrap();
        assert_eq!(order.exponents, vec![8, 8, 44, 110]);
        // generator (Theta_4 - 1)/pi^110 has coefficient 1/pi^110 at
        // s^4 and -1/pi^110 at the identity
        let g4 = &order.generators[3];
        assert_eq!(g4.coeff(4), &lf("1/pi^110"));
        assert_eq!(g4.coeff(0), &lf("1/pi^110").neg());
    }

    #[test]
    fn associated_order_refuses_example2() {
        let tower = d16_tower();
        let input = example2_input();
        let breaks = input.breaks().unwrap();
        let mu = mu_matrix(&input).unwrap();
        let thetas = theta_ops(tower.group(), &mu);
        let err = associated_order(tower.group(), &breaks, &thetas).unwrap_err();
        // (b_1 + 1)/p = 1 is integral; (b_2 + 1)/p^2 = 18/4 is not.
        assert_eq!(err.level, 2);
    }

    #[test]
    fn m_exponents_all_one() {
        // b_i = p^i - 1 gives M_i = 1 for all i (exponent arithmetic
        // only; such breaks do not satisfy the scale congruences).
        let group = PFilteredGroup::preset(PresetFamily::ElemAbelian, 2, 3).unwrap();
        let breaks = BreakData::from_lower(2, &[1, 3, 7]).unwrap();
        let thetas: Vec<GroupAlgebraElement> = (1..=3)
            .map(|i| GroupAlgebraElement::from_element(&group, level_generator(&group, i)))
            .collect();
        let order = associated_order(&group, &breaks, &thetas).unwrap();
        assert_eq!(order.exponents, vec![1, 1, 1]);
    }

    #[test]
    fn search_reproduces_worked_choices() {
        let tower = d16_tower();
        let u = search_breaks(&tower, SearchMode::Scaffold { c_min: 1 }, None).unwrap();
        assert_eq!(u, vec![1, 9, 33, 89]);
        let u = search_breaks(&tower, SearchMode::Hopf, None).unwrap();
        assert_eq!(u, vec![15, 23, 103, 279]);
    }

    #[test]
    fn search_elem_abelian_is_congruence_ladder() {
        let g = PFilteredGroup::preset(PresetFamily::ElemAbelian, 2, 4).unwrap();
        let tower = build_generic(&g).unwrap();
        let u = search_breaks(&tower, SearchMode::Scaffold { c_min: 1 }, None).unwrap();
        assert_eq!(u, vec![1, 9, 17, 25]);
        let c1 = PFilteredGroup::preset(PresetFamily::Cyclic, 3, 1).unwrap();
        let t1 = build_generic(&c1).unwrap();
        assert_eq!(
            search_breaks(&t1, SearchMode::Scaffold { c_min: 1 }, None).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn search_output_passes_with_requested_precision() {
        let tower = d16_tower();
        for (mode, floor) in [
            (SearchMode::Scaffold { c_min: 1 }, 1),
            (SearchMode::Scaffold { c_min: 40 }, 40),
            (SearchMode::Hopf, 15),
        ] {
            let u = search_breaks(&tower, mode, None).unwrap();
            let input = ScaffoldInput::from_breaks(2, &u).unwrap();
            let (c, _) = precision_c(&tower, &input).unwrap();
            assert!(c.at_least(floor), "mode {mode:?}: c = {c}, floor {floor}");
        }
    }

    #[test]
    fn analyze_assembles_report() {
        let tower = d16_tower();
        let report = analyze(&tower, &example3_input()).unwrap();
        assert_eq!(report.c, Some(Precision::Finite(17)));
        assert_eq!(report.m_exponents, Some(vec![8, 8, 44, 110]));
        assert!(report.certificates.unwrap().hopf);
        assert_eq!(report.mu.len(), 6);
        assert_eq!(report.t.len(), 10);
        // Example 2: not integral at level 2, certificates still
        // present, no order generators.
        let report = analyze(&tower, &example2_input()).unwrap();
        assert_eq!(report.not_integral, Some(NotIntegral { level: 2 }));
        assert!(report.order_generators.is_none());
        assert!(report.certificates.unwrap().gms_free);
    }
}
