//! Typed reports with JSON and text renderings carrying the same
//! numbers.

use std::collections::BTreeMap;

use serde::Serialize;

use scaffold_forge::generic::{LevelCheckReport, TowerExport};
use scaffold_forge::ramification::RamReport;
use scaffold_forge::scaffold::ScaffoldReport;

#[derive(Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Group(GroupReport),
    Generic(GenericReport),
    Tower(TowerReport),
    Scaffold(ScaffoldOut),
    Search(SearchReport),
}

#[derive(Serialize)]
pub struct GroupReport {
    pub p: u64,
    pub n: usize,
    pub order: usize,
    pub series_orders: Vec<usize>,
    pub sigma: Vec<usize>,
    pub rank_profile: Vec<usize>,
    pub frattini_order: usize,
}

#[derive(Serialize)]
pub struct GenericReport {
    #[serde(flatten)]
    pub tower: TowerExport,
    pub verify: Vec<VerifyMark>,
}

#[derive(Serialize)]
pub struct VerifyMark {
    pub level: usize,
    #[serde(flatten)]
    pub checks: LevelCheckReport,
}

#[derive(Serialize)]
pub struct TowerReport {
    /// Which hypothesis set was checked ("ramfilt" or "ramfiltcor").
    pub check: String,
    #[serde(flatten)]
    pub ram: RamReport,
}

#[derive(Serialize)]
pub struct ScaffoldOut {
    #[serde(flatten)]
    pub report: ScaffoldReport,
    /// Truncated series expansions of the mu_ij, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_series: Option<BTreeMap<String, String>>,
}

#[derive(Serialize)]
pub struct SearchReport {
    pub mode: String,
    pub c_min: i64,
    pub u: Vec<i64>,
    pub b: Vec<i64>,
    pub a: String,
    pub omegas: Vec<String>,
    pub omega_exponents: Vec<i64>,
    /// Precision achieved when the found sequence is fed back in.
    pub achieved_c: String,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        match self {
            Report::Group(r) => r.text(),
            Report::Generic(r) => r.text(),
            Report::Tower(r) => r.text(),
            Report::Scaffold(r) => r.text(),
            Report::Search(r) => r.text(),
        }
    }
}

impl GroupReport {
    fn text(&self) -> String {
        let mut out = String::new();
        out.push_str("group report\n");
        out.push_str(&format!(
            "  p = {}, n = {}, |G| = {}\n",
            self.p, self.n, self.order
        ));
        out.push_str(&format!("  series orders: {:?}\n", self.series_orders));
        out.push_str(&format!("  sigma = {:?}\n", self.sigma));
        out.push_str(&format!("  rank profile: {:?}\n", self.rank_profile));
        out.push_str(&format!("  frattini order = {}\n", self.frattini_order));
        out
    }
}

impl GenericReport {
    fn text(&self) -> String {
        let mut out = String::new();
        out.push_str("generic tower report\n");
        out.push_str(&format!(
            "  p = {}, n = {}, sigma = {:?}\n",
            self.tower.p, self.tower.n, self.tower.sigma
        ));
        for lvl in &self.tower.levels {
            out.push_str(&format!(
                "  level {} ({}):\n",
                lvl.level,
                if lvl.in_sigma { "split" } else { "nonsplit" }
            ));
            out.push_str(&format!("    D_{} = {}\n", lvl.level, lvl.d_string));
            if let Some(l) = lvl.l {
                out.push_str(&format!("    l_{} = {}\n", lvl.level, l));
            }
            out.push_str(&format!("    section image: {:?}\n", lvl.section));
            for entry in &lvl.cochain {
                out.push_str(&format!("    s[{}] = {}\n", entry.element, entry.value));
            }
            for entry in &lvl.action_shift {
                out.push_str(&format!(
                    "    ({} - 1)Y{} = {}\n",
                    entry.element, lvl.level, entry.value
                ));
            }
        }
        for mark in &self.verify {
            out.push_str(&format!(
                "  verify level {}: cocycle {} trivialization {} wp {} action {}\n",
                mark.level,
                pass_str(mark.checks.cocycle_law),
                pass_str(mark.checks.trivialization_law),
                pass_str(mark.checks.wp_law),
                pass_str(mark.checks.action_homomorphism),
            ));
        }
        out
    }
}

fn pass_str(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

impl TowerReport {
    fn text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("tower report ({})\n", self.check));
        out.push_str(&format!("  u = {:?}\n", self.ram.breaks.upper));
        out.push_str(&format!("  b = {:?}\n", self.ram.breaks.lower));
        out.push_str(&format!("  M = {}\n", self.ram.m));
        for check in &self.ram.per_level {
            out.push_str(&format!(
                "  level {}: b = {} vs threshold {} (margin {}) {}{}\n",
                check.level,
                check.lhs,
                check.rhs,
                check.margin,
                pass_str(check.pass),
                if check.conservative {
                    " [tie: conservative bound used]"
                } else {
                    ""
                }
            ));
        }
        if self.ram.pass {
            out.push_str(
                "  conclusion: a G-extension with these breaks exists; \
                 its ramification subgroups are exactly the filtration\n",
            );
        }
        out.push_str(&format!("status: {}\n", pass_str(self.ram.pass)));
        out
    }
}

impl ScaffoldOut {
    fn text(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        out.push_str("scaffold report\n");
        out.push_str(&format!("  p = {}, n = {}\n", r.p, r.n));
        out.push_str(&format!("  u = {:?}\n", r.breaks.upper));
        out.push_str(&format!("  b = {:?}\n", r.breaks.lower));
        for (key, value) in &r.t {
            out.push_str(&format!("  t[{key}] = {value}\n"));
        }
        for (key, value) in &r.mu {
            out.push_str(&format!("  mu[{key}] = {value}\n"));
        }
        if let Some(series) = &self.mu_series {
            for (key, value) in series {
                out.push_str(&format!("  mu[{key}] ~ {value}\n"));
            }
        }
        for g in &r.gaps {
            out.push_str(&format!(
                "  level {}: weak1 gap = {}, weak2 gap = {}{}\n",
                g.level,
                g.gap1,
                g.gap2,
                if g.conservative {
                    " [tie: conservative bound used]"
                } else {
                    ""
                }
            ));
        }
        match &r.c {
            Some(c) => out.push_str(&format!("  c = {c}\n")),
            None => out.push_str("  c = (hypotheses fail)\n"),
        }
        match &r.cprime {
            Some(c) => out.push_str(&format!("  cprime = {c}\n")),
            None => out.push_str("  cprime = (degree-bound hypotheses fail)\n"),
        }
        if let Some(certs) = &r.certificates {
            out.push_str(&format!(
                "  r(u_1) = {}, gms_free = {}, hopf = {}\n",
                certs.r_u1, certs.gms_free, certs.hopf
            ));
        }
        out.push_str(&format!("  generators: {:?}\n", r.generators));
        for (idx, theta) in r.thetas.iter().enumerate() {
            out.push_str(&format!("  Theta_{} =", idx + 1));
            for (name, coeff) in theta {
                out.push_str(&format!(" [{name}] {coeff}"));
            }
            out.push('\n');
        }
        match (&r.m_exponents, &r.not_integral) {
            (Some(m), _) => {
                out.push_str(&format!("  M = {m:?}\n"));
                if let Some(gens) = &r.order_generators {
                    for (idx, gen) in gens.iter().enumerate() {
                        out.push_str(&format!(
                            "  A0 generator (Theta_{} - 1)/pi^{} =",
                            idx + 1,
                            m[idx]
                        ));
                        for (name, coeff) in gen {
                            out.push_str(&format!(" [{name}] {coeff}"));
                        }
                        out.push('\n');
                    }
                }
            }
            (None, Some(ni)) => {
                out.push_str(&format!(
                    "  associated order display not available: M_{} = (b_{} + 1)/p^{} is not an integer\n",
                    ni.level, ni.level, ni.level
                ));
            }
            _ => {}
        }
        for w in &r.warnings {
            out.push_str(&format!("  warning: {w}\n"));
        }
        out.push_str(&format!(
            "status: {}\n",
            pass_str(r.c.is_some())
        ));
        out
    }
}

impl SearchReport {
    fn text(&self) -> String {
        let mut out = String::new();
        out.push_str("search report\n");
        out.push_str(&format!("  mode = {}, c_min = {}\n", self.mode, self.c_min));
        out.push_str(&format!("  u = {:?}\n", self.u));
        out.push_str(&format!("  b = {:?}\n", self.b));
        out.push_str(&format!("  a = {}\n", self.a));
        out.push_str(&format!("  omegas = {:?}\n", self.omegas));
        out.push_str(&format!("  omega exponents = {:?}\n", self.omega_exponents));
        out.push_str(&format!("  achieved c = {}\n", self.achieved_c));
        out
    }
}
