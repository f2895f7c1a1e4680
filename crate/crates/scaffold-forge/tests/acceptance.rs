//! Acceptance suite: every criterion is exercised at exact-arithmetic
//! tolerance and prints one pass line.  Run with
//! `cargo test -p scaffold-forge --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use scaffold_forge::algebra::{LaurentFrac, MultiPoly, PRational};
use scaffold_forge::generic::{
    build_generic, equivalent_d, verify_level, Equivalence, GenericTower, SectionRule,
};
use scaffold_forge::pgroup::{PFilteredGroup, PresetFamily};
use scaffold_forge::ramification::{
    check_ramfilt, check_ramfiltcor, d_valuation, m_constant, BreakData, HerbrandMap, RamError,
};
use scaffold_forge::scaffold::{
    associated_order, certify, cofactors, mu_matrix, precision_c, precision_cprime,
    search_breaks, theta_ops, Precision, ScaffoldInput, SearchMode,
};

fn d16() -> &'static PFilteredGroup {
    static GROUP: OnceLock<PFilteredGroup> = OnceLock::new();
    GROUP.get_or_init(|| PFilteredGroup::preset(PresetFamily::Dihedral2, 2, 4).unwrap())
}

fn d16_tower() -> &'static GenericTower {
    static TOWER: OnceLock<GenericTower> = OnceLock::new();
    TOWER.get_or_init(|| build_generic(d16()).unwrap())
}

fn lf(s: &str) -> LaurentFrac {
    LaurentFrac::parse(2, s).unwrap()
}

fn y(j: usize, n: usize) -> MultiPoly {
    MultiPoly::var(j, 2, n)
}

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

#[test]
fn criterion_1_d16_structure() {
    let g = d16();
    assert_eq!(g.sigma_set(), BTreeSet::from([1, 2]));
    let phi = g.frattini().unwrap();
    // <s^2> has order 4; element index 2 is s^2.
    assert_eq!(phi, g.closure(&[2]));
    assert_eq!(phi.len(), 4);
    assert_eq!(g.rank(4), 2);
    println!("criterion 1 PASS: D_16 has sigma = {{1,2}}, Frattini = <s^2> of order 4, rank 2");
}

#[test]
fn criterion_2_generic_tower() {
    let tower = d16_tower();
    let n = 4;
    let x1 = y(0, n).artin_schreier();
    let x2 = y(1, n).artin_schreier();
    let d3_printed = x1.mul(&y(0, n).add(&y(1, n)));
    assert_eq!(
        equivalent_d(tower, 3, tower.d(3), &d3_printed, 8).unwrap(),
        Equivalence::Equivalent,
        "solved D_3 is equivalent to (Y1^2 - Y1)(Y1 + Y2)"
    );
    let x3 = y(2, n).artin_schreier().sub(&d3_printed);
    let d4_printed = x1
        .pow(3)
        .mul(&y(0, n))
        .add(&x1.pow(2).mul(&x2).mul(&y(1, n)))
        .add(&x1.pow(2).mul(&y(0, n)).mul(&y(1, n)))
        .add(&x1.mul(
            &y(0, n)
                .pow(3)
                .add(&y(0, n).mul(&y(2, n)))
                .add(&y(1, n).mul(&y(2, n)))
                .add(&y(1, n)),
        ))
        .add(&x1.mul(&x3).mul(&y(0, n).add(&y(1, n))))
        .add(&x3.mul(&y(2, n).add(&y(1, n))));
    // Independent degree oracle: expanding the printed D_4 gives
    // total degree 7 (the Y1^7 term does not cancel).
    assert_eq!(d4_printed.total_degree(), Some(7));
    assert_eq!(
        d4_printed.coeff(&scaffold_forge::algebra::Monomial(vec![7, 0, 0, 0])),
        1
    );
    assert_eq!(
        equivalent_d(tower, 4, tower.d(4), &d4_printed, 14).unwrap(),
        Equivalence::Equivalent,
        "solved D_4 is equivalent to the printed D_4"
    );
    assert_eq!(tower.degree(3), Some(3), "l_3 = 3");
    assert_eq!(tower.degree(4), Some(7), "l_4 = 7");
    // The printed level-3 data verifies: section image {1,s,t,st},
    // cochain (0, Y1, Y1, 1), d = X1(Y1+Y2).
    let ext = &tower.level(3).cocycle.ext.group;
    let image: Vec<&str> = tower
        .level(3)
        .cocycle
        .section
        .iter()
        .map(|&e| ext.name(e))
        .collect();
    assert_eq!(image, vec!["1", "s", "t", "s*t"]);
    let printed_cochain = vec![
        MultiPoly::zero(2, n),
        y(0, n),
        y(0, n),
        MultiPoly::one(2, n),
    ];
    let report =
        verify_level(tower, 3, SectionRule::MinimalRep, &printed_cochain, &d3_printed).unwrap();
    assert!(report.all_pass(), "{report:?}");
    println!("criterion 2 PASS: D_3 and D_4 equivalent to the printed polynomials, l_3 = 3, l_4 = 7, printed level-3 data verifies");
}

#[test]
fn criterion_3_example_one() {
    let tower = d16_tower();
    // Input as a-values: u_i = -v(a_i).
    let a_values = ["pi^-1", "pi^-3", "pi^-5", "pi^-11"];
    let u: Vec<i64> = a_values
        .iter()
        .map(|s| -lf(s).valuation().unwrap())
        .collect();
    assert_eq!(u, vec![1, 3, 5, 11]);
    let report = check_ramfilt(tower, &u).unwrap();
    assert!(report.pass);
    assert_eq!(report.breaks.upper, vec![1, 3, 5, 11]);
    assert_eq!(report.breaks.lower, vec![1, 5, 13, 61]);
    // The level-3 threshold is exactly 4 u_1 + 2 u_2 (the printed
    // boundary u_3 > (5/4) u_1 + u_2, cleared of denominators), so
    // u_3 = 5 passes with u = (1,3).
    let level3 = report.per_level.iter().find(|c| c.level == 3).unwrap();
    assert_eq!(level3.rhs, PRational::integer(2, 4 + 2 * 3));
    assert!(level3.pass);
    // u_3 = 3 would violate monotonicity.
    assert!(matches!(
        BreakData::from_upper(2, &[1, 3, 3, 11]),
        Err(RamError::NotIncreasing)
    ));
    // u = (1,3,5,7) fails at level 4.
    let failing = check_ramfilt(tower, &[1, 3, 5, 7]).unwrap();
    assert!(!failing.pass);
    let level4 = failing.per_level.iter().find(|c| c.level == 4).unwrap();
    assert!(!level4.pass);
    println!("criterion 3 PASS: Example 1 reproduced (u = 1,3,5,11; b = 1,5,13,61; boundary and level-4 failure verified)");
}

#[test]
fn criterion_4_example_two() {
    let tower = d16_tower();
    let input = ScaffoldInput::new(
        2,
        lf("pi^-1"),
        vec![lf("1"), lf("pi^-1"), lf("pi^-4"), lf("pi^-11")],
    )
    .unwrap();
    assert_eq!(input.upper_breaks(), &[1, 9, 33, 89]);
    assert_eq!(input.breaks().unwrap().lower, vec![1, 17, 113, 561]);
    let (c, gaps) = precision_c(tower, &input).unwrap();
    assert_eq!(c, Precision::Finite(14));
    let flat: Vec<i64> = gaps.iter().flat_map(|g| [g.gap1, g.gap2]).collect();
    assert_eq!(flat, vec![31, 41, 14, 297], "the four gaps");
    let certs = certify(2, 4, input.upper_breaks()[0], c);
    assert!(certs.gms_free);
    assert!(!certs.hopf);
    println!("criterion 4 PASS: Example 2 reproduced (c = 14 via gaps {{31,41,14,297}}, free over the associated order, not Hopf)");
}

#[test]
fn criterion_5_example_three() {
    let tower = d16_tower();
    let input = ScaffoldInput::new(
        2,
        lf("pi^-15"),
        vec![lf("1"), lf("pi^-1"), lf("pi^-11"), lf("pi^-33")],
    )
    .unwrap();
    assert_eq!(input.breaks().unwrap().lower, vec![15, 31, 351, 1759]);
    let mu = mu_matrix(&input).unwrap();
    let printed = [
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
    for ((i, j), expect) in printed {
        assert_eq!(
            mu.get(i, j).to_string(),
            expect,
            "mu_{i}{j} character-for-character"
        );
    }
    let thetas = theta_ops(tower.group(), &mu);
    let breaks = input.breaks().unwrap();
    let order = associated_order(tower.group(), &breaks, &thetas).unwrap();
    assert_eq!(order.exponents, vec![8, 8, 44, 110]);
    let (c, _) = precision_c(tower, &input).unwrap();
    assert_eq!(c, Precision::Finite(17));
    assert!(c.at_least(15));
    let certs = certify(2, 4, input.upper_breaks()[0], c);
    assert!(certs.hopf);
    println!("criterion 5 PASS: Example 3 reproduced (all six mu printed exactly, M = 8,8,44,110, c = 17 >= 15, Hopf order certified)");
}

#[test]
fn criterion_6_greedy_search() {
    let tower = d16_tower();
    let scaffold = search_breaks(tower, SearchMode::Scaffold { c_min: 1 }, None).unwrap();
    assert_eq!(scaffold, vec![1, 9, 33, 89]);
    let hopf = search_breaks(tower, SearchMode::Hopf, None).unwrap();
    assert_eq!(hopf, vec![15, 23, 103, 279]);
    println!("criterion 6 PASS: greedy search returns (1,9,33,89) and (15,23,103,279)");
}

#[test]
fn criterion_7a_break_round_trips() {
    let mut rng = Rng(0xfeed_beef_cafe_1234);
    for case in 0..10_000 {
        let p = [2u64, 3, 5][rng.below(3) as usize];
        let n = 1 + rng.below(5) as usize;
        let mut u = Vec::with_capacity(n);
        let mut prev = 0i64;
        for _ in 0..n {
            prev += 1 + rng.below(40) as i64;
            u.push(prev);
        }
        // from_upper asserts the inequalities internally.
        let b = BreakData::from_upper(p, &u).unwrap();
        let round = BreakData::from_lower(p, &b.lower).unwrap();
        assert_eq!(round.upper, u, "case {case}");
        // the Lemma inequalities, re-checked explicitly
        for j in 1..=n {
            let factor = (p as i64).pow(j as u32 - 1);
            assert!(b.lower[j - 1] <= factor * b.upper[j - 1]);
            for i in 1..=j {
                assert!(
                    b.lower[j - 1] - b.lower[i - 1] <= factor * (b.upper[j - 1] - b.upper[i - 1])
                );
            }
        }
    }
    println!("criterion 7a PASS: 10^4 upper/lower round trips with the break inequalities");
}

#[test]
fn criterion_7b_herbrand_inverse() {
    let mut rng = Rng(0x0123_4567_89ab_cdef);
    let profiles = [
        BreakData::from_upper(2, &[1, 3, 5, 11]).unwrap(),
        BreakData::from_upper(2, &[15, 23, 103, 279]).unwrap(),
        BreakData::from_upper(3, &[1, 5, 29]).unwrap(),
        BreakData::from_upper(5, &[2, 3]).unwrap(),
    ];
    for b in &profiles {
        let map = HerbrandMap::from_breaks(b);
        for _ in 0..10_000 {
            let num = rng.below(4_000_000) as i128 - 1_000_000;
            let pow = rng.below(4) as u32;
            let x = PRational::new(b.p, num, pow);
            if x < PRational::integer(b.p, -1) {
                continue;
            }
            assert_eq!(map.psi(&map.phi(&x)), x);
            assert_eq!(map.phi(&map.psi(&x)), x);
        }
    }
    println!("criterion 7b PASS: phi and psi are mutually inverse at 10^4 rational points per profile");
}

#[test]
fn criterion_7c_cofactor_valuation_laws() {
    let mut rng = Rng(0xdead_beef_0bad_f00d);
    for case in 0..200 {
        // Larger p gets a shorter tower so Frobenius exponents (and
        // hence polynomial degrees) stay moderate.
        let (p, max_n) = [(2u64, 5usize), (2, 5), (3, 4), (5, 3)][rng.below(4) as usize];
        let n = 2 + rng.below(max_n as u64 - 1) as usize;
        // strictly increasing m with m_1 >= 0, plus random units
        let mut m = Vec::with_capacity(n);
        let mut prev = rng.below(3) as i64;
        for _ in 0..n {
            m.push(prev);
            prev += 1 + rng.below(5) as i64;
        }
        let mut u0 = 1 + rng.below(20) as i64;
        while u0 % p as i64 == 0 {
            u0 += 1;
        }
        let a = LaurentFrac::pi_pow(p, -u0);
        let omegas: Vec<LaurentFrac> = m
            .iter()
            .map(|&mi| {
                let mut unit = LaurentFrac::one(p);
                for e in 1..=2 {
                    let c = rng.below(p) as i64;
                    unit = unit.add(&LaurentFrac::monomial(p, c, e));
                }
                unit.mul(&LaurentFrac::pi_pow(p, -mi))
            })
            .collect();
        let input = match ScaffoldInput::new(p, a, omegas) {
            Ok(input) => input,
            Err(e) => panic!("case {case}: {e}"),
        };
        let breaks = input.breaks().unwrap();
        for j in 1..=n {
            let t = cofactors(&input, j).unwrap();
            for i in 1..=j {
                // closed form for v_K(t_ij)
                let mut expect = 0i64;
                let mut power = 1i64;
                for h in 1..=j {
                    if h == i {
                        continue;
                    }
                    expect -= power * m[h - 1];
                    power *= p as i64;
                }
                expect *= (p as i64).pow((n - j) as u32);
                assert_eq!(
                    t[i - 1].valuation(),
                    Some(expect),
                    "case {case}: v(t_{i}{j})"
                );
            }
            // telescoping law p^j (v(t_ij) - v(t_hj)) = b_i - b_h
            let pj = (p as i64).pow(j as u32);
            for i in 1..=j {
                for h in 1..=i {
                    let lhs = pj * (t[i - 1].valuation().unwrap() - t[h - 1].valuation().unwrap());
                    let rhs = breaks.lower[i - 1] - breaks.lower[h - 1];
                    assert_eq!(lhs, rhs, "case {case}: v-t law at ({h},{i},{j})");
                }
            }
        }
    }
    println!("criterion 7c PASS: cofactor valuation closed form and telescoping law on 200 random inputs");
}

fn small_presets() -> Vec<PFilteredGroup> {
    let mut groups = Vec::new();
    for n in 1..=6 {
        groups.push(PFilteredGroup::preset(PresetFamily::Cyclic, 2, n).unwrap());
    }
    for n in 1..=3 {
        groups.push(PFilteredGroup::preset(PresetFamily::Cyclic, 3, n).unwrap());
    }
    groups.push(PFilteredGroup::preset(PresetFamily::Cyclic, 5, 2).unwrap());
    groups.push(PFilteredGroup::preset(PresetFamily::Cyclic, 7, 2).unwrap());
    for n in 1..=6 {
        groups.push(PFilteredGroup::preset(PresetFamily::ElemAbelian, 2, n).unwrap());
    }
    for n in 1..=3 {
        groups.push(PFilteredGroup::preset(PresetFamily::ElemAbelian, 3, n).unwrap());
    }
    groups.push(PFilteredGroup::preset(PresetFamily::ElemAbelian, 5, 2).unwrap());
    for n in 2..=6 {
        groups.push(PFilteredGroup::preset(PresetFamily::Dihedral2, 2, n).unwrap());
    }
    for n in 3..=6 {
        groups.push(PFilteredGroup::preset(PresetFamily::Quaternion, 2, n).unwrap());
    }
    groups.push(PFilteredGroup::preset(PresetFamily::Heisenberg, 2, 3).unwrap());
    groups.push(PFilteredGroup::preset(PresetFamily::Heisenberg, 3, 3).unwrap());
    groups
}

#[test]
fn criterion_7d_rank_matches_frattini_oracle() {
    for g in small_presets() {
        for i in 0..=g.n() {
            assert_eq!(
                g.rank(i),
                g.rank_via_frattini(i).unwrap(),
                "group of order {} at level {i}",
                g.order()
            );
        }
    }
    println!("criterion 7d PASS: rank equals the Frattini-quotient oracle for all presets of order <= 64");
}

#[test]
fn criterion_7e_splitness_equals_complement_search() {
    for g in small_presets() {
        for i in 1..=g.n() {
            assert_eq!(
                g.level_splits(i),
                g.level_splits_by_complement(i).unwrap(),
                "group of order {} at level {i}",
                g.order()
            );
        }
    }
    println!("criterion 7e PASS: cohomological splitness agrees with complement search for all presets of order <= 64");
}

#[test]
fn criterion_7f_lifted_action_homomorphism() {
    for (fam, p, n) in [
        (PresetFamily::Dihedral2, 2, 4),
        (PresetFamily::Quaternion, 2, 3),
        (PresetFamily::Quaternion, 2, 4),
        (PresetFamily::Cyclic, 2, 4),
        (PresetFamily::Cyclic, 3, 2),
        (PresetFamily::Heisenberg, 2, 3),
        (PresetFamily::Heisenberg, 3, 3),
        (PresetFamily::ElemAbelian, 2, 4),
    ] {
        let g = PFilteredGroup::preset(fam, p, n).unwrap();
        let tower = build_generic(&g).unwrap();
        for level in 1..=n {
            assert!(
                tower.action_is_homomorphism(level),
                "{fam:?} p={p} n={n} level {level}"
            );
        }
    }
    println!("criterion 7f PASS: the lifted action is a homomorphism at every tower level, exhaustively");
}

#[test]
fn criterion_7g_m_constant_certificate() {
    let tower = d16_tower();
    let m = m_constant(tower);
    assert_eq!(m, 28);
    let mut rng = Rng(0x7777_1234_aaaa_bbbb);
    for case in 0..100 {
        let mut u = vec![1 + 2 * rng.below(6) as i64];
        for _ in 1..4 {
            let prev = *u.last().unwrap();
            let mut cand = m * prev + 1 + 2 * rng.below(30) as i64;
            if cand % 2 == 0 {
                cand += 1;
            }
            u.push(cand);
        }
        let report = check_ramfiltcor(tower, &u).unwrap();
        assert!(report.pass, "case {case}: u = {u:?}");
    }
    println!("criterion 7g PASS: 100 random sequences with ratio > M all pass the degree-bound check");
}

#[test]
fn criterion_7h_theta_augmentation_and_support() {
    let tower = d16_tower();
    let group = tower.group();
    let mut inputs = vec![
        ScaffoldInput::new(
            2,
            lf("pi^-1"),
            vec![lf("1"), lf("pi^-1"), lf("pi^-4"), lf("pi^-11")],
        )
        .unwrap(),
        ScaffoldInput::new(
            2,
            lf("pi^-15"),
            vec![lf("1"), lf("pi^-1"), lf("pi^-11"), lf("pi^-33")],
        )
        .unwrap(),
    ];
    let mut rng = Rng(0x5555_aaaa_5555_aaaa);
    while inputs.len() < 52 {
        let mut m = Vec::with_capacity(4);
        let mut prev = rng.below(2) as i64;
        for _ in 0..4 {
            m.push(prev);
            prev += 1 + rng.below(6) as i64;
        }
        let u0 = 1 + 2 * rng.below(10) as i64;
        let a = LaurentFrac::pi_pow(2, -u0);
        let omegas: Vec<LaurentFrac> = m.iter().map(|&mi| LaurentFrac::pi_pow(2, -mi)).collect();
        inputs.push(ScaffoldInput::new(2, a, omegas).unwrap());
    }
    for (case, input) in inputs.iter().enumerate() {
        let mu = mu_matrix(input).unwrap();
        let thetas = theta_ops(group, &mu);
        for (idx, theta) in thetas.iter().enumerate() {
            let i = idx + 1;
            assert_eq!(
                theta.augmentation(2),
                LaurentFrac::one(2),
                "case {case}: augmentation of Theta_{i}"
            );
            // Support containment: Theta_i lies in K[G_(i-1)];
            // equivalently, enumerating the family from the other
            // end, Theta_(n+1-k) lies in K[G_(n-k)] for each k.
            assert!(
                theta.support().iter().all(|&g| group.in_series(i - 1, g)),
                "case {case}: support of Theta_{i} in G_({})",
                i - 1
            );
        }
    }
    println!("criterion 7h PASS: augmentation(Theta_i) = 1 and support containment on Examples 2-3 plus 50 random inputs");
}

#[test]
fn criterion_8_out_of_scope_honesty() {
    let tower = d16_tower();
    let input = ScaffoldInput::new(
        2,
        lf("pi^-1"),
        vec![lf("1"), lf("pi^-1"), lf("pi^-4"), lf("pi^-11")],
    )
    .unwrap();
    let breaks = input.breaks().unwrap();
    let mu = mu_matrix(&input).unwrap();
    let thetas = theta_ops(tower.group(), &mu);
    let err = associated_order(tower.group(), &breaks, &thetas).unwrap_err();
    assert_eq!(err.level, 2, "(b_2 + 1)/p^2 = 18/4 is not an integer");
    println!("criterion 8 PASS: Example 2 associated-order request refuses with not_integral at level 2");
}

#[test]
fn supplementary_cprime_below_c_and_monotone_certify() {
    // precision_cprime <= precision_c whenever both are defined.
    let tower = d16_tower();
    let mut rng = Rng(0x9999_8888_7777_6666);
    let mut checked = 0;
    while checked < 50 {
        let u1 = 1 + 2 * rng.below(8) as i64;
        let mut u = vec![u1];
        for _ in 1..4 {
            let prev = *u.last().unwrap();
            // Grow fast enough that the degree-bound hypotheses can
            // hold, keeping the congruence mod p^(n-1).
            let mut cand = 6 * prev + 8 * (1 + rng.below(10) as i64);
            cand += (u1 - cand).rem_euclid(8);
            u.push(cand);
        }
        let input = match ScaffoldInput::from_breaks(2, &u) {
            Ok(i) => i,
            Err(_) => continue,
        };
        let cp = precision_cprime(tower, &u);
        let c = precision_c(tower, &input);
        if let (Ok((cp, _)), Ok((c, _))) = (cp, c) {
            let (Some(cp), Some(c)) = (cp.finite(), c.finite()) else {
                continue;
            };
            assert!(cp <= c, "u = {u:?}: cprime = {cp} > c = {c}");
            checked += 1;
            // certify is monotone in c
            for u1probe in [u1] {
                let lo = certify(2, 4, u1probe, Precision::Finite(cp));
                let hi = certify(2, 4, u1probe, Precision::Finite(c));
                assert!(!lo.gms_free || hi.gms_free);
                assert!(!lo.hopf || hi.hopf);
            }
        }
    }
    println!("supplementary PASS: cprime <= c on 50 random inputs; certificates monotone in precision");
}

#[test]
fn supplementary_search_feeds_back_through_scaffold() {
    let tower = d16_tower();
    for (mode, floor) in [
        (SearchMode::Scaffold { c_min: 1 }, 1),
        (SearchMode::Scaffold { c_min: 25 }, 25),
        (SearchMode::Hopf, 15),
    ] {
        let u = search_breaks(tower, mode, None).unwrap();
        let input = ScaffoldInput::from_breaks(2, &u).unwrap();
        let (c, _) = precision_c(tower, &input).unwrap();
        assert!(c.at_least(floor));
    }
    println!("supplementary PASS: every search output passes precision_c at its requested floor");
}

#[test]
fn supplementary_d_valuation_bound_dominates_degree_bound() {
    // bound >= -l_i u_(i-1) / p on random prefixes, exact implies
    // unique minimum.
    let tower = d16_tower();
    let mut rng = Rng(0x2468_ace0_1357_9bdf);
    for _ in 0..500 {
        let mut u = vec![1 + rng.below(30) as i64];
        for _ in 1..3 {
            let prev = *u.last().unwrap();
            u.push(prev + 1 + rng.below(30) as i64);
        }
        for i in [3usize, 4] {
            let dv = d_valuation(tower, i, &u);
            let l = tower.degree(i).unwrap() as i128;
            let degree_bound = PRational::new(2, -l * u[i - 2] as i128, 1);
            assert!(dv.bound >= degree_bound);
            assert_eq!(dv.exact.is_some(), dv.unique_min);
        }
    }
    println!("supplementary PASS: monomial-minimum bound dominates the degree bound on 500 random prefixes");
}
