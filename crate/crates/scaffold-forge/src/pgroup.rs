//! Finite p-groups carrying a chosen composition series of normal
//! subgroups ("p-filtered groups").
//!
//! A group of order p^n is stored as an explicit Cayley table together
//! with a chain G = G_(0) > G_(1) > ... > G_(n) = 1 of normal subgroups
//! of index p^i.  All target groups are small (at most a few hundred
//! elements), so invariants are verified exhaustively rather than
//! trusted.
//!
//! The set Sigma records the levels i at which the central extension
//! G/G_(i) -> G/G_(i-1) splits; the rank of every quotient G/G_(i) can
//! be read off as |Sigma ∩ {1..i}|, which the Frattini-subgroup
//! computation double-checks independently.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::fp::is_prime;
use crate::algebra::linsys::{LinearSystemFp, SolveOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("modulus {0} is not prime")]
    NonPrime(u64),
    #[error("order {order} is not {p}^{n}")]
    BadOrder { order: usize, p: u64, n: usize },
    #[error("Cayley table is not square or has out-of-range entries")]
    MalformedCayley,
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("multiplication is not associative")]
    NotAssociative,
    #[error("Cayley table rows/columns are not permutations")]
    NotLatinSquare,
    #[error("series must have {0} members")]
    BadSeriesLength(usize),
    #[error("series member {index} has order {got}, expected {expected}")]
    BadSeriesOrder {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("series member {0} is not a subgroup")]
    SeriesNotSubgroup(usize),
    #[error("series member {0} is not normal in G")]
    SeriesNotNormal(usize),
    #[error("series member {0} is not contained in member {1}")]
    SeriesNotNested(usize, usize),
    #[error("invalid preset parameters: {0}")]
    BadPreset(String),
    #[error("brute-force budget exceeded: |G| = {0} > 4096")]
    BudgetExceeded(usize),
}

/// The built-in group families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetFamily {
    /// Cyclic group of order p^n with the unique composition series.
    Cyclic,
    /// Elementary abelian p-group of rank n.
    ElemAbelian,
    /// Dihedral group of order 2^n (p = 2) with the series
    /// <s^2, t> > <s^2> > <s^4> > ... > 1.
    Dihedral2,
    /// Generalized quaternion group of order 2^n (p = 2, n >= 3) with
    /// the series <x> > <x^2> > ... > 1.
    Quaternion,
    /// Heisenberg group of order p^3 (upper unitriangular 3x3 matrices
    /// over F_p), filtered through the center.
    Heisenberg,
}

impl PresetFamily {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "cyclic" => Some(Self::Cyclic),
            "elem_abelian" => Some(Self::ElemAbelian),
            "dihedral2" => Some(Self::Dihedral2),
            "quaternion" => Some(Self::Quaternion),
            "heisenberg" => Some(Self::Heisenberg),
            _ => None,
        }
    }
}

/// A p-group of order p^n with a composition series of normal
/// subgroups G_(0) > G_(1) > ... > G_(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFilteredGroup {
    p: u64,
    n: usize,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    /// series[i] is the sorted element list of G_(i).
    series: Vec<Vec<usize>>,
    series_mask: Vec<Vec<bool>>,
    names: Vec<String>,
}

/// A quotient G/G_(i), itself a p-filtered group of order p^i, with
/// the projection data from the parent.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    /// The filtration level i the quotient was taken at.
    pub level: usize,
    /// The quotient as a group in its own right, with the induced
    /// series (images of G_(0), ..., G_(i)).
    pub group: PFilteredGroup,
    /// parent element index -> coset index.
    pub coset_map: Vec<usize>,
    /// coset index -> least parent representative.
    pub reps: Vec<usize>,
}

impl PFilteredGroup {
    /// Builds and fully validates a filtered group from raw parts.
    pub fn from_parts(
        p: u64,
        n: usize,
        cayley: Vec<Vec<usize>>,
        series: Vec<Vec<usize>>,
        names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NonPrime(p));
        }
        let order_u128 = (p as u128).pow(n as u32);
        if order_u128 > 1 << 20 {
            return Err(GroupError::BadOrder {
                order: usize::MAX,
                p,
                n,
            });
        }
        let order = order_u128 as usize;
        if cayley.len() != order || cayley.iter().any(|row| row.len() != order) {
            return Err(GroupError::MalformedCayley);
        }
        if cayley
            .iter()
            .any(|row| row.iter().any(|&x| x >= order))
        {
            return Err(GroupError::MalformedCayley);
        }
        // Latin square.
        for i in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for j in 0..order {
                if seen_row[cayley[i][j]] || seen_col[cayley[j][i]] {
                    return Err(GroupError::NotLatinSquare);
                }
                seen_row[cayley[i][j]] = true;
                seen_col[cayley[j][i]] = true;
            }
        }
        // Identity.
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| cayley[e][x] == x && cayley[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        // Inverses.
        let mut inverse = vec![usize::MAX; order];
        for x in 0..order {
            match (0..order).find(|&y| cayley[x][y] == identity && cayley[y][x] == identity) {
                Some(y) => inverse[x] = y,
                None => return Err(GroupError::NoInverse(x)),
            }
        }
        // Associativity: exhaustive for small orders; via a generating
        // set otherwise (sufficient by induction on word length).
        if order <= 512 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                            return Err(GroupError::NotAssociative);
                        }
                    }
                }
            }
        } else {
            let gens = greedy_generators(&cayley, identity, order);
            for &g in &gens {
                for b in 0..order {
                    for c in 0..order {
                        if cayley[cayley[g][b]][c] != cayley[g][cayley[b][c]] {
                            return Err(GroupError::NotAssociative);
                        }
                    }
                }
            }
        }
        // Series shape.
        if series.len() != n + 1 {
            return Err(GroupError::BadSeriesLength(n + 1));
        }
        let mut sorted_series = Vec::with_capacity(n + 1);
        for (i, member) in series.iter().enumerate() {
            let mut m: Vec<usize> = member.clone();
            m.sort_unstable();
            m.dedup();
            let expected = (p as usize).pow((n - i) as u32);
            if m.len() != expected {
                return Err(GroupError::BadSeriesOrder {
                    index: i,
                    got: m.len(),
                    expected,
                });
            }
            sorted_series.push(m);
        }
        let names = names.unwrap_or_else(|| (0..order).map(|i| format!("e{i}")).collect());
        let mut group = PFilteredGroup {
            p,
            n,
            cayley,
            identity,
            inverse,
            series_mask: Vec::new(),
            series: sorted_series,
            names,
        };
        group.series_mask = group
            .series
            .iter()
            .map(|m| {
                let mut mask = vec![false; order];
                for &x in m {
                    mask[x] = true;
                }
                mask
            })
            .collect();
        group.validate_series()?;
        Ok(group)
    }

    fn validate_series(&self) -> Result<(), GroupError> {
        for (i, member) in self.series.iter().enumerate() {
            if !self.is_subgroup(member) {
                return Err(GroupError::SeriesNotSubgroup(i));
            }
            if !self.is_normal(member) {
                return Err(GroupError::SeriesNotNormal(i));
            }
            if i > 0 {
                let prev = &self.series_mask[i - 1];
                if member.iter().any(|&x| !prev[x]) {
                    return Err(GroupError::SeriesNotNested(i, i - 1));
                }
            }
        }
        if self.series[self.n] != [self.identity] {
            return Err(GroupError::BadSeriesOrder {
                index: self.n,
                got: self.series[self.n].len(),
                expected: 1,
            });
        }
        // Index-p quotients of consecutive members are cyclic of order
        // p automatically; centrality of G_(i-1)/G_(i) in G/G_(i) is a
        // theorem for p-groups but asserted anyway: [G, G_(i-1)] must
        // land in G_(i).
        for i in 1..=self.n {
            for g in 0..self.order() {
                for &k in &self.series[i - 1] {
                    let comm = self.mul(
                        self.mul(g, k),
                        self.mul(self.inv(g), self.inv(k)),
                    );
                    if !self.series_mask[i][comm] {
                        return Err(GroupError::SeriesNotNormal(i - 1));
                    }
                }
            }
        }
        Ok(())
    }

    /// A preset family member with its documented canonical series.
    pub fn preset(family: PresetFamily, p: u64, n: usize) -> Result<Self, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NonPrime(p));
        }
        if n == 0 {
            return Err(GroupError::BadPreset("n must be at least 1".into()));
        }
        match family {
            PresetFamily::Cyclic => Self::preset_cyclic(p, n),
            PresetFamily::ElemAbelian => Self::preset_elem_abelian(p, n),
            PresetFamily::Dihedral2 => {
                if p != 2 || n < 2 {
                    return Err(GroupError::BadPreset(
                        "dihedral2 requires p = 2 and n >= 2".into(),
                    ));
                }
                Self::preset_dihedral(n)
            }
            PresetFamily::Quaternion => {
                if p != 2 || n < 3 {
                    return Err(GroupError::BadPreset(
                        "quaternion requires p = 2 and n >= 3".into(),
                    ));
                }
                Self::preset_quaternion(n)
            }
            PresetFamily::Heisenberg => {
                if n != 3 {
                    return Err(GroupError::BadPreset("heisenberg requires n = 3".into()));
                }
                Self::preset_heisenberg(p)
            }
        }
    }

    fn preset_cyclic(p: u64, n: usize) -> Result<Self, GroupError> {
        let order = (p as usize).pow(n as u32);
        let cayley = (0..order)
            .map(|a| (0..order).map(|b| (a + b) % order).collect())
            .collect();
        let series = (0..=n)
            .map(|i| {
                let step = (p as usize).pow(i as u32);
                (0..order).filter(|x| x % step == 0).collect()
            })
            .collect();
        let names = (0..order)
            .map(|a| match a {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{a}"),
            })
            .collect();
        Self::from_parts(p, n, cayley, series, Some(names))
    }

    fn preset_elem_abelian(p: u64, n: usize) -> Result<Self, GroupError> {
        let pu = p as usize;
        let order = pu.pow(n as u32);
        let digits = |x: usize| -> Vec<usize> {
            let mut d = Vec::with_capacity(n);
            let mut x = x;
            for _ in 0..n {
                d.push(x % pu);
                x /= pu;
            }
            d
        };
        let index = |d: &[usize]| -> usize {
            d.iter().rev().fold(0, |acc, &v| acc * pu + v)
        };
        let cayley = (0..order)
            .map(|a| {
                let da = digits(a);
                (0..order)
                    .map(|b| {
                        let db = digits(b);
                        let sum: Vec<usize> =
                            da.iter().zip(&db).map(|(x, y)| (x + y) % pu).collect();
                        index(&sum)
                    })
                    .collect()
            })
            .collect();
        // G_(i) kills the first i coordinates.
        let series = (0..=n)
            .map(|i| {
                (0..order)
                    .filter(|&x| digits(x).iter().take(i).all(|&d| d == 0))
                    .collect()
            })
            .collect();
        let names = (0..order)
            .map(|x| {
                let d = digits(x);
                let parts: Vec<String> = d
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(k, &e)| {
                        if e == 1 {
                            format!("g{}", k + 1)
                        } else {
                            format!("g{}^{}", k + 1, e)
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        Self::from_parts(p, n, cayley, series, Some(names))
    }

    fn preset_dihedral(n: usize) -> Result<Self, GroupError> {
        let m = 1usize << (n - 1); // order of the rotation s
        let order = 2 * m;
        let idx = |a: usize, b: usize| a + m * b;
        let cayley = (0..order)
            .map(|x| {
                let (a, b) = (x % m, x / m);
                (0..order)
                    .map(|y| {
                        let (c, d) = (y % m, y / m);
                        // (s^a t^b)(s^c t^d) = s^(a + (-1)^b c) t^(b xor d)
                        let ac = if b == 0 { (a + c) % m } else { (a + m - c % m) % m };
                        idx(ac, b ^ d)
                    })
                    .collect()
            })
            .collect();
        // G_(1) = <s^2, t>, G_(i) = <s^(2^(i-1))> for i >= 2.
        let mut series: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
        series.push((0..order).collect());
        series.push((0..order).filter(|x| (x % m) % 2 == 0).collect());
        for i in 2..=n {
            let step = 1usize << (i - 1);
            series.push((0..m).filter(|a| a % step == 0).map(|a| idx(a, 0)).collect());
        }
        let names = (0..order)
            .map(|x| {
                let (a, b) = (x % m, x / m);
                match (a, b) {
                    (0, 0) => "1".to_string(),
                    (1, 0) => "s".to_string(),
                    (_, 0) => format!("s^{a}"),
                    (0, 1) => "t".to_string(),
                    (1, 1) => "s*t".to_string(),
                    (_, 1) => format!("s^{a}*t"),
                    _ => unreachable!(),
                }
            })
            .collect();
        Self::from_parts(2, n, cayley, series, Some(names))
    }

    fn preset_quaternion(n: usize) -> Result<Self, GroupError> {
        let m = 1usize << (n - 1); // order of x
        let h = m / 2; // y^2 = x^h
        let order = 2 * m;
        let idx = |a: usize, b: usize| a + m * b;
        let cayley = (0..order)
            .map(|v| {
                let (a, b) = (v % m, v / m);
                (0..order)
                    .map(|w| {
                        let (c, d) = (w % m, w / m);
                        if b == 0 {
                            idx((a + c) % m, d)
                        } else {
                            let ac = (a + m - c % m) % m;
                            if d == 0 {
                                idx(ac, 1)
                            } else {
                                idx((ac + h) % m, 0)
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let mut series: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
        series.push((0..order).collect());
        for i in 1..=n {
            let step = 1usize << (i - 1);
            series.push((0..m).filter(|a| a % step == 0).map(|a| idx(a, 0)).collect());
        }
        let names = (0..order)
            .map(|v| {
                let (a, b) = (v % m, v / m);
                match (a, b) {
                    (0, 0) => "1".to_string(),
                    (1, 0) => "x".to_string(),
                    (_, 0) => format!("x^{a}"),
                    (0, 1) => "y".to_string(),
                    (1, 1) => "x*y".to_string(),
                    (_, 1) => format!("x^{a}*y"),
                    _ => unreachable!(),
                }
            })
            .collect();
        Self::from_parts(2, n, cayley, series, Some(names))
    }

    fn preset_heisenberg(p: u64) -> Result<Self, GroupError> {
        let pu = p as usize;
        let order = pu.pow(3);
        let idx = |a: usize, b: usize, c: usize| a + pu * b + pu * pu * c;
        let unpack = |v: usize| (v % pu, (v / pu) % pu, v / (pu * pu));
        let cayley = (0..order)
            .map(|v| {
                let (a, b, c) = unpack(v);
                (0..order)
                    .map(|w| {
                        let (a2, b2, c2) = unpack(w);
                        idx((a + a2) % pu, (b + b2) % pu, (c + c2 + a * b2) % pu)
                    })
                    .collect()
            })
            .collect();
        let series = vec![
            (0..order).collect(),
            (0..order).filter(|&v| unpack(v).0 == 0).collect(),
            (0..order)
                .filter(|&v| {
                    let (a, b, _) = unpack(v);
                    a == 0 && b == 0
                })
                .collect(),
            vec![0],
        ];
        let names = (0..order)
            .map(|v| {
                let (a, b, c) = unpack(v);
                let mut parts = Vec::new();
                for (sym, e) in [("x", a), ("y", b), ("z", c)] {
                    match e {
                        0 => {}
                        1 => parts.push(sym.to_string()),
                        _ => parts.push(format!("{sym}^{e}")),
                    }
                }
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        Self::from_parts(p, 3, cayley, series, Some(names))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn cayley(&self) -> &Vec<Vec<usize>> {
        &self.cayley
    }

    pub fn series(&self, i: usize) -> &[usize] {
        &self.series[i]
    }

    pub fn in_series(&self, i: usize, elt: usize) -> bool {
        self.series_mask[i][elt]
    }

    pub fn name(&self, elt: usize) -> &str {
        &self.names[elt]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut acc = g;
        let mut ord = 1;
        while acc != self.identity {
            acc = self.mul(acc, g);
            ord += 1;
        }
        ord
    }

    pub fn is_abelian(&self) -> bool {
        let k = self.order();
        (0..k).all(|a| (a..k).all(|b| self.cayley[a][b] == self.cayley[b][a]))
    }

    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        let mut mask = vec![false; self.order()];
        for &x in elements {
            mask[x] = true;
        }
        if !mask[self.identity] {
            return false;
        }
        elements
            .iter()
            .all(|&a| elements.iter().all(|&b| mask[self.mul(a, b)]))
    }

    pub fn is_normal(&self, elements: &[usize]) -> bool {
        let mut mask = vec![false; self.order()];
        for &x in elements {
            mask[x] = true;
        }
        (0..self.order()).all(|g| {
            elements
                .iter()
                .all(|&s| mask[self.mul(self.mul(g, s), self.inv(g))])
        })
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut mask = vec![false; self.order()];
        mask[self.identity] = true;
        let mut members = vec![self.identity];
        let mut frontier = Vec::new();
        for &g in gens {
            if !mask[g] {
                mask[g] = true;
                members.push(g);
                frontier.push(g);
            }
        }
        while let Some(x) = frontier.pop() {
            let snapshot = members.clone();
            for &y in &snapshot {
                for z in [self.mul(x, y), self.mul(y, x)] {
                    if !mask[z] {
                        mask[z] = true;
                        members.push(z);
                        frontier.push(z);
                    }
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// The quotient G/G_(i) as a p-filtered group of order p^i, with
    /// cosets indexed in order of their least representative.
    pub fn quotient(&self, i: usize) -> QuotientGroup {
        assert!(i <= self.n);
        let order = self.order();
        let mut coset_map = vec![usize::MAX; order];
        let mut reps = Vec::new();
        for x in 0..order {
            if coset_map[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            for &k in &self.series[i] {
                coset_map[self.mul(x, k)] = id;
            }
            reps.push(x);
        }
        let q_order = reps.len();
        let cayley: Vec<Vec<usize>> = (0..q_order)
            .map(|a| {
                (0..q_order)
                    .map(|b| coset_map[self.mul(reps[a], reps[b])])
                    .collect()
            })
            .collect();
        let series: Vec<Vec<usize>> = (0..=i)
            .map(|j| {
                let mut img: Vec<usize> = self.series[j]
                    .iter()
                    .map(|&x| coset_map[x])
                    .collect();
                img.sort_unstable();
                img.dedup();
                img
            })
            .collect();
        let names = reps.iter().map(|&r| self.names[r].clone()).collect();
        let group = PFilteredGroup::from_parts(self.p, i, cayley, series, Some(names))
            .expect("quotient of a valid filtered group is valid");
        QuotientGroup {
            level: i,
            group,
            coset_map,
            reps,
        }
    }

    /// The levels 1 <= i <= n at which the central extension
    /// G/G_(i) -> G/G_(i-1) splits, decided by testing whether the
    /// extension 2-cocycle is an F_p-valued coboundary.
    pub fn sigma_set(&self) -> BTreeSet<usize> {
        (1..=self.n)
            .filter(|&i| self.level_splits(i))
            .collect()
    }

    /// Cohomological splitness test at level i: the extension cocycle
    /// is a coboundary of a constant cochain iff the extension splits.
    pub fn level_splits(&self, i: usize) -> bool {
        let data = crate::generic::central_cocycle(self, i, crate::generic::SectionRule::MinimalRep)
            .expect("canonical section rule cannot fail");
        let q = data.base.group.order();
        let p = self.p;
        // Unknowns: one constant per element of G/G_(i-1).
        let mut sys = LinearSystemFp::new(p, q).expect("p is prime");
        for g in 0..q {
            for h in 0..q {
                let mut row = vec![0u64; q];
                let gh = data.base.group.mul(g, h);
                row[g] = (row[g] + 1) % p;
                row[h] = (row[h] + 1) % p;
                row[gh] = (row[gh] + p - 1) % p;
                sys.push_row(row, data.cocycle[g][h].value());
            }
        }
        matches!(sys.solve(), SolveOutcome::Solution(_))
    }

    /// Splitness by brute-force complement search in G/G_(i): is there
    /// a subgroup of order p^(i-1) meeting G_(i-1)/G_(i) trivially?
    /// Kept as an independent oracle for the cohomological test.
    pub fn level_splits_by_complement(&self, i: usize) -> Result<bool, GroupError> {
        let quot = self.quotient(i);
        let q = &quot.group;
        if q.order() > 64 {
            return Err(GroupError::BudgetExceeded(q.order()));
        }
        let target = q.order() / self.p as usize;
        // Kernel of G/G_(i) -> G/G_(i-1): the image of G_(i-1).
        let kernel_mask: u64 = q
            .series(i - 1)
            .iter()
            .fold(0u64, |m, &x| m | 1 << x);
        let id_mask = 1u64 << q.identity();
        let closure_mask = |seed: u64| -> u64 {
            let mut mask = seed | id_mask;
            loop {
                let mut next = mask;
                let mut xs = mask;
                while xs != 0 {
                    let x = xs.trailing_zeros() as usize;
                    xs &= xs - 1;
                    let mut ys = mask;
                    while ys != 0 {
                        let y = ys.trailing_zeros() as usize;
                        ys &= ys - 1;
                        next |= 1 << q.mul(x, y);
                    }
                }
                if next == mask {
                    return mask;
                }
                mask = next;
            }
        };
        // BFS through subgroups meeting the kernel trivially.
        let mut seen = BTreeSet::new();
        let mut stack = vec![id_mask];
        seen.insert(id_mask);
        while let Some(sub) = stack.pop() {
            if sub.count_ones() as usize == target {
                return Ok(true);
            }
            for g in 0..q.order() {
                if sub & (1 << g) != 0 {
                    continue;
                }
                let bigger = closure_mask(sub | 1 << g);
                if bigger & kernel_mask & !id_mask != 0 {
                    continue;
                }
                if bigger.count_ones() as usize <= target && seen.insert(bigger) {
                    stack.push(bigger);
                }
            }
        }
        Ok(false)
    }

    /// rank(G/G_(i)) = |Sigma ∩ {1..i}|.
    pub fn rank(&self, i: usize) -> usize {
        assert!(i <= self.n);
        self.sigma_set().into_iter().filter(|&j| j <= i).count()
    }

    /// The Frattini subgroup, by enumerating the index-p subgroups
    /// (every maximal subgroup of a p-group has index p and contains
    /// all commutators and p-th powers) and intersecting them.
    pub fn frattini(&self) -> Result<Vec<usize>, GroupError> {
        let order = self.order();
        if order > 4096 {
            return Err(GroupError::BudgetExceeded(order));
        }
        // Commutators and p-th powers generate a normal subgroup with
        // elementary abelian quotient; maximal subgroups are exactly
        // the preimages of its hyperplanes.
        let mut gens = Vec::new();
        for a in 0..order {
            let mut pw = self.identity;
            for _ in 0..self.p {
                pw = self.mul(pw, a);
            }
            gens.push(pw);
            for b in 0..order {
                gens.push(self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))));
            }
        }
        let k0 = self.closure(&gens);
        // Coordinates on V = G/K0 (elementary abelian of rank r).
        let mut coset_map = vec![usize::MAX; order];
        let mut reps = Vec::new();
        for x in 0..order {
            if coset_map[x] != usize::MAX {
                continue;
            }
            for &k in &k0 {
                coset_map[self.mul(x, k)] = reps.len();
            }
            reps.push(x);
        }
        let v_order = reps.len();
        let mut r = 0;
        while (self.p as usize).pow(r) < v_order {
            r += 1;
        }
        // Basis of V by greedy closure; coordinates by enumeration.
        let mut basis: Vec<usize> = Vec::new(); // parent reps
        let mut span = vec![self.identity];
        for &cand in &reps {
            if span.iter().any(|&s| coset_map[s] == coset_map[cand]) {
                continue;
            }
            basis.push(cand);
            let mut new_span = Vec::new();
            for &s in &span {
                let mut acc = s;
                for _ in 0..self.p {
                    new_span.push(acc);
                    acc = self.mul(acc, cand);
                }
            }
            span = new_span;
            if basis.len() == r as usize {
                break;
            }
        }
        // Coordinates of each coset with respect to the basis.
        let mut coords = vec![vec![0u64; basis.len()]; v_order];
        let mut assigned = vec![false; v_order];
        let mut frontier = vec![(self.identity, vec![0u64; basis.len()])];
        assigned[coset_map[self.identity]] = true;
        while let Some((elt, coord)) = frontier.pop() {
            coords[coset_map[elt]] = coord.clone();
            for (bi, &b) in basis.iter().enumerate() {
                let next = self.mul(elt, b);
                if !assigned[coset_map[next]] {
                    assigned[coset_map[next]] = true;
                    let mut c = coord.clone();
                    c[bi] = (c[bi] + 1) % self.p;
                    frontier.push((next, c));
                }
            }
        }
        // Intersect the preimages of all hyperplanes.
        let mut in_frattini = vec![true; order];
        let rr = basis.len();
        let total = (self.p as usize).pow(rr as u32);
        for functional in 1..total {
            let mut f = Vec::with_capacity(rr);
            let mut v = functional;
            for _ in 0..rr {
                f.push((v % self.p as usize) as u64);
                v /= self.p as usize;
            }
            for x in 0..order {
                let dot: u64 = coords[coset_map[x]]
                    .iter()
                    .zip(&f)
                    .map(|(a, b)| a * b)
                    .sum::<u64>()
                    % self.p;
                if dot != 0 {
                    in_frattini[x] = false;
                }
            }
        }
        Ok((0..order).filter(|&x| in_frattini[x]).collect())
    }

    /// rank via the Frattini quotient of G/G_(i); the independent
    /// oracle for [`PFilteredGroup::rank`] (Burnside basis theorem).
    pub fn rank_via_frattini(&self, i: usize) -> Result<usize, GroupError> {
        let quot = self.quotient(i);
        let phi = quot.group.frattini()?;
        let quotient_order = quot.group.order() / phi.len();
        let mut r = 0usize;
        let mut acc = 1usize;
        while acc < quotient_order {
            acc *= self.p as usize;
            r += 1;
        }
        Ok(r)
    }
}

impl QuotientGroup {
    /// Projects a parent element to its coset.
    pub fn project(&self, parent_elt: usize) -> usize {
        self.coset_map[parent_elt]
    }
}

fn greedy_generators(cayley: &[Vec<usize>], identity: usize, order: usize) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut mask = vec![false; order];
    mask[identity] = true;
    let mut count = 1;
    for x in 0..order {
        if mask[x] {
            continue;
        }
        gens.push(x);
        // close under the current generating set
        let mut frontier: Vec<usize> = (0..order).filter(|&y| mask[y]).collect();
        mask[x] = true;
        frontier.push(x);
        count += 1;
        while let Some(a) = frontier.pop() {
            for b in 0..order {
                if mask[b] {
                    let c = cayley[a][b];
                    if !mask[c] {
                        mask[c] = true;
                        count += 1;
                        frontier.push(c);
                    }
                    let c = cayley[b][a];
                    if !mask[c] {
                        mask[c] = true;
                        count += 1;
                        frontier.push(c);
                    }
                }
            }
        }
        if count == order {
            break;
        }
    }
    gens
}
