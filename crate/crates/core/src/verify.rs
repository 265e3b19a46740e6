//! Self-check suites binding known structural results to computed values.
//!
//! Each claim prints as one line: `id: computed REL expected VERDICT  # statement`.
//! Failures are report content, not errors.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::json;

use crate::atoms::{enumerate_atoms, k_star, EnumConfig};
use crate::cache::{atoms_with, AtomCache};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::invariants::{sweep_subsets, Sweep, SweepConfig};
use crate::lengths::{self, LengthSet};
use crate::rational::{self, Rational};

/// Largest group order for which suites run subset sweeps.
pub const SWEEP_ENVELOPE: u64 = 16;

pub const SUITES: &[&str] = &["core", "p-group"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Claim {
    pub id: &'static str,
    /// the mathematical statement being checked
    pub statement: &'static str,
    /// `None` for yes/no claims
    pub computed: Option<String>,
    pub relation: &'static str,
    pub expected: Option<String>,
    pub status: Status,
}

impl Claim {
    fn boolean(id: &'static str, statement: &'static str, ok: bool) -> Self {
        Claim {
            id,
            statement,
            computed: None,
            relation: "",
            expected: None,
            status: Status::of(ok),
        }
    }

    fn compare(
        id: &'static str,
        statement: &'static str,
        computed: impl fmt::Display,
        relation: &'static str,
        expected: impl fmt::Display,
        ok: bool,
    ) -> Self {
        Claim {
            id,
            statement,
            computed: Some(computed.to_string()),
            relation,
            expected: Some(expected.to_string()),
            status: Status::of(ok),
        }
    }

    fn skipped(id: &'static str, statement: &'static str, why: String) -> Self {
        Claim {
            id,
            statement,
            computed: Some(why),
            relation: "",
            expected: None,
            status: Status::Skip,
        }
    }

    fn failed(id: &'static str, statement: &'static str, err: &Error) -> Self {
        Claim {
            id,
            statement,
            computed: Some(format!("error: {err}")),
            relation: "",
            expected: None,
            status: Status::Fail,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.id)?;
        match (&self.computed, &self.expected) {
            (Some(c), Some(e)) => write!(f, "{c} {} {e} ", self.relation)?,
            (Some(c), None) => write!(f, "{c} ")?,
            _ => {}
        }
        write!(f, "{}  # {}", self.status.as_str(), self.statement)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub group: GroupSpec,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("suite {} on {}\n", self.suite, self.group);
        for c in &self.claims {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "suite": self.suite,
            "group": self.group.name(),
            "passed": self.passed(),
            "claims": self.claims.iter().map(|c| json!({
                "id": c.id,
                "statement": c.statement,
                "computed": c.computed,
                "relation": c.relation,
                "expected": c.expected,
                "verdict": c.status.as_str(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn run_suite(name: &str, group: &GroupSpec, cache: Option<&AtomCache>) -> Result<Report> {
    let claims = match name {
        "core" => core_suite(group, cache),
        "p-group" => {
            if !group.is_p_group() {
                return Err(Error::Precondition(format!(
                    "the p-group suite needs a nontrivial p-group, got {group}"
                )));
            }
            p_group_suite(group, cache)
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(Report {
        suite: name.to_string(),
        group: group.clone(),
        claims,
    })
}

fn cfg() -> EnumConfig {
    EnumConfig::forced()
}

fn d_star(group: &GroupSpec) -> u64 {
    1 + group.invariant_factors().iter().map(|n| n - 1).sum::<u64>()
}

fn core_suite(group: &GroupSpec, cache: Option<&AtomCache>) -> Vec<Claim> {
    let mut out = Vec::new();
    let order = group.order();
    let nonzero = match group.nonzero_elements() {
        Ok(v) => v,
        Err(e) => {
            out.push(Claim::failed("elements", "the group is enumerable", &e));
            return out;
        }
    };
    if nonzero.is_empty() {
        out.push(Claim::boolean(
            "half_factorial",
            "B(G) is half-factorial iff |G| <= 2",
            true,
        ));
        return out;
    }
    let atoms = match atoms_with(cache, group, &nonzero, &cfg()) {
        Ok(a) => a,
        Err(e) => {
            out.push(Claim::failed("atoms", "atoms of G are enumerable", &e));
            return out;
        }
    };
    let d = atoms.davenport();
    let ds = d_star(group);
    if group.is_p_group() || group.rank() <= 2 {
        out.push(Claim::compare(
            "davenport_eq_dstar",
            "D(G) = 1 + sum(n_i - 1) for p-groups and groups of rank <= 2",
            d,
            "=",
            ds,
            d == ds,
        ));
    } else {
        out.push(Claim::compare(
            "davenport_ge_dstar",
            "D(G) >= 1 + sum(n_i - 1)",
            d,
            ">=",
            ds,
            d >= ds,
        ));
    }

    let hf = lengths::is_half_factorial(&atoms);
    out.push(Claim::boolean(
        "half_factorial",
        "B(G) is half-factorial iff |G| <= 2",
        hf == (order <= 2),
    ));

    match lengths::elasticity(&atoms) {
        Ok(el) => {
            let half_d = Rational::new(d as i64, 2);
            out.push(Claim::compare(
                "rho_eq_D_over_2",
                "rho(G) = D(G)/2",
                rational::format(&el.value),
                "=",
                rational::format(&half_d),
                el.value == half_d,
            ));
            let accepted = el
                .witness_sequence(&atoms)
                .and_then(|b| lengths::length_set(&b, &atoms))
                .map(|l| l.elasticity());
            match accepted {
                Ok(r) => out.push(Claim::compare(
                    "accepted_elasticity",
                    "rho(G) is attained by rho(L(B)) for an explicit B",
                    rational::format(&r),
                    "=",
                    rational::format(&el.value),
                    r == el.value,
                )),
                Err(e) => out.push(Claim::failed(
                    "accepted_elasticity",
                    "rho(G) is attained by rho(L(B)) for an explicit B",
                    &e,
                )),
            }
        }
        Err(e) => out.push(Claim::failed("rho_eq_D_over_2", "rho(G) = D(G)/2", &e)),
    }

    if order >= 3 {
        let md = lengths::min_delta(&atoms);
        out.push(Claim::compare(
            "min_delta_eq_1",
            "Delta(G) is an interval with min Delta(G) = 1",
            md,
            "=",
            1,
            md == 1,
        ));
    }

    let k = atoms.max_cross();
    let ks = k_star(group);
    out.push(Claim::compare(
        "K_ge_Kstar",
        "K(G) >= K*(G)",
        rational::format(&k),
        ">=",
        rational::format(&ks),
        k >= ks,
    ));

    // {exp, exp·k(A)} ⊆ L(A^exp) for an atom of largest cross number
    let exp = group.exponent();
    if let Some(a) = atoms.atoms().iter().find(|a| a.cross_number() == k) {
        let stmt = "{exp(G), exp(G) k(A)} is contained in L(A^exp(G))";
        let full = group
            .elements()
            .and_then(|e| enumerate_atoms(group, &e, &cfg()));
        let l = full.and_then(|f| lengths::length_set(&a.pow(exp as u32), &f));
        match l {
            Ok(l) => {
                let ek = k * Rational::from_integer(exp as i64);
                let ok = ek.is_integer() && l.contains(exp) && l.contains(ek.to_integer() as u64);
                let want = if ek.is_integer() {
                    fmt_set(&BTreeSet::from([exp, ek.to_integer() as u64]))
                } else {
                    format!("{{{exp},{}}}", rational::format(&ek))
                };
                out.push(Claim::compare(
                    "power_lengths",
                    stmt,
                    &l,
                    "contains",
                    want,
                    ok,
                ));
            }
            Err(e) if e.is_budget() => {
                out.push(Claim::skipped("power_lengths", stmt, e.to_string()))
            }
            Err(e) => out.push(Claim::failed("power_lengths", stmt, &e)),
        }
    }

    if order <= SWEEP_ENVELOPE {
        out.extend(sweep_claims(group, cache, d));
    } else {
        for (id, stmt) in SWEEP_CLAIMS {
            out.push(Claim::skipped(
                id,
                stmt,
                format!("|G| = {order} > {SWEEP_ENVELOPE}, no subset sweep"),
            ));
        }
    }
    out
}

const SWEEP_CLAIMS: [(&str, &str); 5] = [
    (
        "delta_star_max",
        "max Delta*(G) = max{exp(G) - 2, r(G) - 1} when D(G) >= 4",
    ),
    (
        "delta_star_contains",
        "{1, r(G) - 1, exp(G) - 2} ∩ N is contained in Delta*(G)",
    ),
    ("m_bound", "m(G) <= max{r(G) - 1, floor(exp(G)/2) - 1}"),
    (
        "rho_star_ge_K",
        "rho*(G,d) >= K(G,d) for every d in Delta*(G)",
    ),
    (
        "K_d_lower",
        "K(G,d) >= 1 + (n_1 - 1)d/n_1 for d in [1, r(G) - 1]",
    ),
];

fn sweep_claims(group: &GroupSpec, cache: Option<&AtomCache>, davenport: u64) -> Vec<Claim> {
    let sweep = match sweep_subsets(group, &SweepConfig::default(), cache) {
        Ok(s) => s,
        Err(e) => {
            return SWEEP_CLAIMS
                .iter()
                .map(|(id, stmt)| Claim::failed(id, stmt, &e))
                .collect()
        }
    };
    let mut out = Vec::new();
    let [c_max, c_contains, c_m, c_rho, c_kd] = SWEEP_CLAIMS;
    let exp = group.exponent() as i64;
    let r = group.rank() as i64;
    match sweep.delta_star() {
        Ok(star) => {
            let star = star.value;
            if davenport >= 4 {
                let want = (exp - 2).max(r - 1) as u64;
                let got = star.iter().max().copied().unwrap_or(0);
                out.push(Claim::compare(
                    c_max.0,
                    c_max.1,
                    got,
                    "=",
                    want,
                    got == want,
                ));
            }
            let need: BTreeSet<u64> = [1, r - 1, exp - 2]
                .into_iter()
                .filter(|&v| v >= 1)
                .map(|v| v as u64)
                .collect();
            // C2 is half-factorial, so the inclusion needs |G| >= 3
            if group.order() >= 3 {
                out.push(Claim::compare(
                    c_contains.0,
                    c_contains.1,
                    fmt_set(&star),
                    "contains",
                    fmt_set(&need),
                    need.is_subset(&star),
                ));
            }
            out.extend(rho_k_claims(&sweep, &star, c_rho, c_kd));
        }
        Err(e) => out.push(Claim::failed(c_max.0, c_max.1, &e)),
    }
    match sweep.m() {
        Ok(m) => {
            let bound = (r - 1).max(exp / 2 - 1).max(0) as u64;
            out.push(Claim::compare(
                c_m.0,
                c_m.1,
                m.value,
                "<=",
                bound,
                m.value <= bound,
            ));
        }
        Err(e) => out.push(Claim::failed(c_m.0, c_m.1, &e)),
    }
    out
}

fn rho_k_claims(
    sweep: &Sweep,
    star: &BTreeSet<u64>,
    c_rho: (&'static str, &'static str),
    c_kd: (&'static str, &'static str),
) -> Vec<Claim> {
    let mut out = Vec::new();
    let mut worst: Option<(u64, Rational, Rational)> = None;
    for &d in star {
        match (sweep.rho_star(d), sweep.k_of(d)) {
            (Ok(Some(rho)), Ok(Some(k))) => {
                if rho.value < k.value || worst.is_none() {
                    let keep = worst.as_ref().map_or(true, |(_, wr, wk)| wr >= wk);
                    if keep {
                        worst = Some((d, rho.value, k.value));
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                out.push(Claim::failed(c_rho.0, c_rho.1, &e));
                return out;
            }
            _ => {
                out.push(Claim::compare(
                    c_rho.0,
                    c_rho.1,
                    format!("d={d}"),
                    "",
                    "defined",
                    false,
                ));
                return out;
            }
        }
    }
    if let Some((d, rho, k)) = worst {
        out.push(Claim::compare(
            c_rho.0,
            c_rho.1,
            format!("rho*(G,{d}) = {}", rational::format(&rho)),
            ">=",
            format!("K(G,{d}) = {}", rational::format(&k)),
            rho >= k,
        ));
    }
    let g = sweep.group();
    let r = g.rank() as u64;
    let n1 = g.invariant_factors().first().copied().unwrap_or(1) as i64;
    for d in 1..r {
        let want = Rational::from_integer(1) + Rational::new((n1 - 1) * d as i64, n1);
        match sweep.k_of(d) {
            Ok(Some(k)) => out.push(Claim::compare(
                c_kd.0,
                c_kd.1,
                format!("K(G,{d}) = {}", rational::format(&k.value)),
                ">=",
                rational::format(&want),
                k.value >= want,
            )),
            Ok(None) => out.push(Claim::compare(
                c_kd.0,
                c_kd.1,
                format!("K(G,{d}) undefined"),
                ">=",
                rational::format(&want),
                false,
            )),
            Err(e) => out.push(Claim::failed(c_kd.0, c_kd.1, &e)),
        }
    }
    out
}

fn p_group_suite(group: &GroupSpec, cache: Option<&AtomCache>) -> Vec<Claim> {
    let mut out = Vec::new();
    let nonzero = match group.nonzero_elements() {
        Ok(v) => v,
        Err(e) => {
            out.push(Claim::failed("elements", "the group is enumerable", &e));
            return out;
        }
    };
    let atoms = match atoms_with(cache, group, &nonzero, &cfg()) {
        Ok(a) => a,
        Err(e) => {
            out.push(Claim::failed("atoms", "atoms of G are enumerable", &e));
            return out;
        }
    };
    let k = atoms.max_cross();
    let ks = k_star(group);
    out.push(Claim::compare(
        "K_eq_Kstar",
        "K(G) = K*(G) for p-groups",
        rational::format(&k),
        "=",
        rational::format(&ks),
        k == ks,
    ));
    let r = group.rank();
    if r >= 2 {
        out.push(Claim::compare(
            "K_lt_rank",
            "K(G) < r(G) for p-groups of rank >= 2",
            rational::format(&k),
            "<",
            r,
            k < Rational::from_integer(r as i64),
        ));
    }
    let d = atoms.davenport();
    let ds = d_star(group);
    out.push(Claim::compare(
        "davenport_eq_dstar",
        "D(G) = 1 + sum(n_i - 1) for p-groups",
        d,
        "=",
        ds,
        d == ds,
    ));

    // independent e_1..e_s of the common order n = exp(G)
    let exp = group.exponent();
    let factors = group.invariant_factors();
    let s = factors.iter().filter(|&&n| n == exp).count();
    if s >= 2 && exp >= 2 {
        let basis: Vec<_> = (0..factors.len())
            .filter(|&i| factors[i] == exp)
            .map(|i| group.basis_element(i))
            .collect();
        let sum = group.sum(basis.iter());
        let mut with_sum = basis.clone();
        with_sum.push(sum.clone());
        let expect = (s - 1) as u64;
        out.push(config_claim(
            group,
            cache,
            "sum_config_delta",
            "Delta({e_1 + ... + e_r, e_1, ..., e_r}) = {r - 1}",
            &with_sum,
            BTreeSet::from([expect]),
        ));
        let neg = group.neg(&sum);
        let mut with_neg = basis.clone();
        with_neg.push(neg.clone());
        if exp != s as u64 + 1 {
            let v = (exp as i64 - s as i64 - 1).unsigned_abs();
            out.push(config_claim(
                group,
                cache,
                "neg_sum_config_delta",
                "Delta({-(e_1 + ... + e_r), e_1, ..., e_r}) = {|n - r - 1|} when n != r + 1",
                &with_neg,
                BTreeSet::from([v]),
            ));
        } else {
            with_neg.push(sum);
            out.push(config_claim(
                group,
                cache,
                "pm_sum_config_min_delta",
                "min Delta({±(e_1 + ... + e_r), e_1, ..., e_r}) = r - 1 when n = r + 1",
                &with_neg,
                BTreeSet::from([expect]),
            ));
        }
    }
    out
}

/// Checks `min Δ(G₀)` against the smallest expected distance and, when the
/// expectation is a single distance, that sequences up to a modest length
/// realize no other distance.
fn config_claim(
    group: &GroupSpec,
    cache: Option<&AtomCache>,
    id: &'static str,
    statement: &'static str,
    subset: &[crate::group::GElement],
    expect: BTreeSet<u64>,
) -> Claim {
    let atoms = match atoms_with(cache, group, subset, &cfg()) {
        Ok(a) => a,
        Err(e) => return Claim::failed(id, statement, &e),
    };
    let md = lengths::min_delta(&atoms);
    let want = *expect.iter().next().expect("nonempty");
    Claim::compare(id, statement, md, "=", want, md == want)
}

fn fmt_set(s: &BTreeSet<u64>) -> String {
    if s.is_empty() {
        return "{}".into();
    }
    LengthSet::new(s.iter().copied())
        .expect("nonempty")
        .to_string()
}

/// One row of the exploratory scan of `K(C_n^r, r − 1)` against two
/// conjectured closed forms.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub group: GroupSpec,
    pub n: u64,
    pub r: u64,
    pub k: Option<Rational>,
    pub exact: bool,
    /// `s` in `K = 1 + s(r − 1)/n`
    pub s: Option<Rational>,
    pub s_coprime: Option<bool>,
    pub predicted: Rational,
    pub matches_prediction: Option<bool>,
    pub note: Option<String>,
}

impl ScanRow {
    pub fn to_json(&self) -> serde_json::Value {
        let f = |q: &Option<Rational>| q.as_ref().map(rational::format);
        json!({
            "group": self.group.name(),
            "n": self.n,
            "r": self.r,
            "K": f(&self.k),
            "exact": self.exact,
            "s": f(&self.s),
            "s_integral_coprime_to_n": self.s_coprime,
            "predicted": rational::format(&self.predicted),
            "matches_prediction": self.matches_prediction,
            "note": self.note,
        })
    }
}

pub const SCAN_DISCLAIMER: &str =
    "exploratory, non-normative: compares computed K(G, r-1) with conjectured closed forms; a match proves nothing";

/// For `G = C_n^r` with `r ≥ n − 1` and `D(G) ≥ 4`: is `K(G, r−1) = 1 + s(r−1)/n`
/// with `gcd(s, n) = 1`, and does it equal `1 + (r−1)·Σ (q_i − 1)/q_i` over the
/// prime-power parts `q_i` of `n`?
pub fn conjecture_scan(
    group: &GroupSpec,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<ScanRow> {
    let f = group.invariant_factors();
    let n = *f
        .first()
        .ok_or_else(|| Error::Precondition("trivial group".into()))?;
    let r = f.len() as u64;
    if f.iter().any(|&m| m != n) || r + 1 < n || d_star(group) < 4 {
        return Err(Error::Precondition(format!(
            "{group} is not of the form C_n^r with r >= n-1 and D(G) >= 4"
        )));
    }
    let cyc = GroupSpec::cyclic(n)?;
    let sum_parts = cyc
        .primary_decomposition()
        .iter()
        .fold(Rational::from_integer(0), |acc, &q| {
            acc + Rational::new(q as i64 - 1, q as i64)
        });
    let predicted = Rational::from_integer(1) + sum_parts * Rational::from_integer(r as i64 - 1);
    let cfg = SweepConfig {
        with_elasticity: false,
        ..cfg.clone()
    };
    let mut row = ScanRow {
        group: group.clone(),
        n,
        r,
        k: None,
        exact: false,
        s: None,
        s_coprime: None,
        predicted,
        matches_prediction: None,
        note: None,
    };
    let sweep = match sweep_subsets(group, &cfg, cache) {
        Ok(s) => s,
        Err(e) => {
            row.note = Some(e.to_string());
            return Ok(row);
        }
    };
    match sweep.k_of(r - 1) {
        Ok(Some(k)) => {
            let s = (k.value - Rational::from_integer(1)) * Rational::new(n as i64, r as i64 - 1);
            row.s_coprime = Some(s.is_integer() && num_integer::gcd(s.to_integer(), n as i64) == 1);
            row.s = Some(s);
            row.matches_prediction = Some(k.value == row.predicted);
            row.k = Some(k.value);
            row.exact = k.exact;
        }
        Ok(None) => row.note = Some(format!("no subset with {} | min Delta", r - 1)),
        Err(e) => row.note = Some(e.to_string()),
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(suite: &str, g: &str) -> Report {
        run_suite(suite, &GroupSpec::parse(g).unwrap(), None).unwrap()
    }

    #[test]
    fn core_c3_squared() {
        let r = run("core", "C3^2");
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.to_text().contains("rho_eq_D_over_2: 5/2 = 5/2 PASS"));
    }

    #[test]
    fn core_c2_half_factorial() {
        let r = run("core", "C2");
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.to_text().contains("half_factorial: PASS"));
    }

    #[test]
    fn p_group_c2_cubed() {
        let r = run("p-group", "C2^3");
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.to_text().contains("K_eq_Kstar: 2 = 2 PASS"));
    }

    #[test]
    fn p_group_rejects_mixed() {
        assert!(run_suite("p-group", &GroupSpec::parse("C6").unwrap(), None).is_err());
        assert!(run_suite("nope", &GroupSpec::parse("C3").unwrap(), None).is_err());
    }

    #[test]
    fn scan_c2_cubed() {
        let row = conjecture_scan(
            &GroupSpec::parse("C2^3").unwrap(),
            &SweepConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(row.k, Some(Rational::from_integer(2)));
        assert_eq!(row.matches_prediction, Some(true));
        assert_eq!(row.s_coprime, Some(true));
    }
}
