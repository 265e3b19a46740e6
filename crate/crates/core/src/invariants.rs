//! Group-level invariants by sweeping subsets `G₀ ⊆ G ∖ {0}` up to
//! automorphism: `Δ*(G)`, `m(G)`, `ρ*(G,d)`, `K(G,d)`, bounds on `ρ(G,d)` and
//! `Δ₁(G)`, plus the decomposition of a length set as an almost arithmetical
//! progression.
//!
//! Sweeps never include 0. Adjoining 0 to `G₀` adds the atom `0`, which
//! shifts every length of `B` by `v_0(B)`: `Δ` is unchanged and `ρ(L + k) ≤ ρ(L)`
//! for `k ≥ 0`, so no sweep maximum or minimum can change.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::json;

use crate::atoms::EnumConfig;
use crate::cache::{atoms_with, AtomCache};
use crate::error::{Error, Result};
use crate::group::{Automorphisms, GElement, GroupSpec, DEFAULT_AUT_CAP};
use crate::lengths::{self, LengthSet};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Only subsets with at most this many elements; results are then lower-bound certified.
    pub max_subset_size: Option<usize>,
    pub orbit_reduction: bool,
    pub aut_cap: u64,
    pub enum_cfg: EnumConfig,
    /// Solve the elasticity program for every non-half-factorial subset.
    pub with_elasticity: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_subset_size: None,
            orbit_reduction: true,
            aut_cap: DEFAULT_AUT_CAP,
            enum_cfg: EnumConfig {
                force: true,
                parallel: false,
                ..EnumConfig::default()
            },
            with_elasticity: true,
        }
    }
}

/// Arithmetic of one swept subset.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetStats {
    pub min_delta: u64,
    pub half_factorial: bool,
    pub lcn: bool,
    /// `None` when the sweep ran without elasticities.
    pub elasticity: Option<Rational>,
    pub max_cross: Rational,
    pub min_cross: Rational,
    pub davenport: u64,
    pub atom_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetReport {
    pub subset: Vec<GElement>,
    pub stats: Result<SubsetStats>,
}

impl SubsetReport {
    pub fn to_json(&self) -> serde_json::Value {
        let subset: Vec<String> = self.subset.iter().map(|g| g.to_string()).collect();
        match &self.stats {
            Ok(s) => json!({
                "subset": subset,
                "min_delta": s.min_delta,
                "half_factorial": s.half_factorial,
                "lcn": s.lcn,
                "elasticity": s.elasticity.as_ref().map(rational::format),
                "max_cross": rational::format(&s.max_cross),
                "min_cross": rational::format(&s.min_cross),
                "davenport": s.davenport,
                "atoms": s.atom_count,
            }),
            Err(e) => json!({ "subset": subset, "error": e.to_string() }),
        }
    }
}

/// A value together with whether it came from a complete sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certified<T> {
    pub value: T,
    /// false when the sweep was size-capped: the value is then only a lower
    /// bound (for maxima) or a subset (for sets)
    pub exact: bool,
}

/// Sandwich `lower ≤ ρ(G,d) ≤ upper = ρ*(G,d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoDBounds {
    pub d: u64,
    pub lower: Rational,
    pub upper: Rational,
    /// a subset with `min Δ(G₀) = d` attaining `lower`, if any
    pub lower_witness: Option<Vec<GElement>>,
    pub upper_witness: Vec<GElement>,
    pub exact: bool,
    pub sweep_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delta1Bounds {
    /// `Δ*(G) ⊆ Δ₁(G)`
    pub lower: BTreeSet<u64>,
    /// a superset of `Δ₁(G)`
    pub upper: BTreeSet<u64>,
    pub exact_lower: bool,
}

/// All reports of one sweep, in deterministic order (by size, then lexicographically).
#[derive(Clone, Debug)]
pub struct Sweep {
    group: GroupSpec,
    reports: Vec<SubsetReport>,
    capped: bool,
    orbit_reduced: bool,
}

/// Orbit representatives of nonempty subsets of `G ∖ {0}` with at most
/// `max_size` elements, as sorted index lists. The flag tells whether `Aut(G)`
/// reduction was applied.
pub fn subset_orbits(
    group: &GroupSpec,
    max_size: Option<usize>,
    orbit_reduction: bool,
    aut_cap: u64,
) -> Result<(Vec<Vec<usize>>, bool)> {
    let n = group.elements()?.len();
    let limit = max_size.unwrap_or(n - 1).min(n - 1);
    let aut = if orbit_reduction && n <= 128 {
        match Automorphisms::new(group, aut_cap) {
            Ok(a) => Some(a),
            Err(Error::CapExceeded(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let Some(aut) = aut else {
        if n - 1 > 40 && limit > 4 {
            return Err(Error::CapExceeded(format!(
                "sweeping subsets of {} nonzero elements without orbit reduction",
                n - 1
            )));
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        combos(1, n, limit, &mut cur, &mut out);
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        return Ok((out, false));
    };
    let mut level: BTreeSet<Vec<usize>> = (1..n)
        .map(|i| aut.canonical_mask(1u128 << i))
        .map(mask_to_indices)
        .collect();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for _ in 1..=limit {
        let reps: Vec<Vec<usize>> = level.iter().cloned().collect();
        out.extend(reps.iter().cloned());
        if reps.first().map_or(true, |r| r.len() >= limit) {
            break;
        }
        level = reps
            .par_iter()
            .flat_map_iter(|rep| {
                let mask = indices_to_mask(rep);
                let aut = &aut;
                (1..n)
                    .filter(move |&i| mask >> i & 1 == 0)
                    .map(move |i| mask_to_indices(aut.canonical_mask(mask | 1u128 << i)))
            })
            .collect::<BTreeSet<_>>();
        if level.is_empty() {
            break;
        }
    }
    Ok((out, true))
}

fn combos(start: usize, n: usize, limit: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    for i in start..n {
        cur.push(i);
        out.push(cur.clone());
        if cur.len() < limit {
            combos(i + 1, n, limit, cur, out);
        }
        cur.pop();
    }
}

fn mask_to_indices(mut m: u128) -> Vec<usize> {
    let mut v = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        v.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    v
}

fn indices_to_mask(v: &[usize]) -> u128 {
    v.iter().fold(0u128, |m, &i| m | 1u128 << i)
}

/// Atoms, `min Δ`, cross numbers and (optionally) elasticity of one subset.
pub fn subset_stats(
    group: &GroupSpec,
    subset: &[GElement],
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<SubsetStats> {
    let atoms = atoms_with(cache, group, subset, &cfg.enum_cfg)?;
    let min_delta = lengths::min_delta(&atoms);
    let half_factorial = lengths::is_half_factorial(&atoms);
    let elasticity = if half_factorial {
        Some(Rational::from_integer(1))
    } else if cfg.with_elasticity {
        Some(lengths::elasticity(&atoms)?.value)
    } else {
        None
    };
    Ok(SubsetStats {
        min_delta,
        half_factorial,
        lcn: lengths::is_lcn(&atoms),
        elasticity,
        max_cross: atoms.max_cross(),
        min_cross: atoms.min_cross(),
        davenport: atoms.davenport(),
        atom_count: atoms.len(),
    })
}

/// One report per `Aut(G)`-orbit of nonempty subsets of `G ∖ {0}`. Failures on
/// single subsets are recorded in their reports.
pub fn sweep_subsets(
    group: &GroupSpec,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Sweep> {
    let (orbits, orbit_reduced) =
        subset_orbits(group, cfg.max_subset_size, cfg.orbit_reduction, cfg.aut_cap)?;
    let nonzero = group.order() as usize - 1;
    let capped = cfg.max_subset_size.is_some_and(|k| k < nonzero);
    let reports = orbits
        .par_iter()
        .map(|idx| {
            let subset: Vec<GElement> = idx.iter().map(|&i| group.element_at(i)).collect();
            let stats = subset_stats(group, &subset, cfg, cache);
            SubsetReport { subset, stats }
        })
        .collect();
    Ok(Sweep {
        group: group.clone(),
        reports,
        capped,
        orbit_reduced,
    })
}

impl Sweep {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn reports(&self) -> &[SubsetReport] {
        &self.reports
    }

    /// True when every subset size was swept.
    pub fn is_exact(&self) -> bool {
        !self.capped
    }

    pub fn orbit_reduced(&self) -> bool {
        self.orbit_reduced
    }

    fn complete(&self) -> Result<impl Iterator<Item = (&[GElement], &SubsetStats)>> {
        if let Some(bad) = self.reports.iter().find(|r| r.stats.is_err()) {
            let err = bad.stats.as_ref().err().expect("checked");
            return Err(Error::Incomplete(format!(
                "subset {{{}}} of {} failed: {err}",
                bad.subset
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                self.group
            )));
        }
        Ok(self.reports.iter().map(|r| {
            (
                r.subset.as_slice(),
                r.stats.as_ref().expect("checked above"),
            )
        }))
    }

    fn elasticity_of(stats: &SubsetStats) -> Result<Rational> {
        stats
            .elasticity
            .ok_or_else(|| Error::Precondition("sweep ran without elasticities".into()))
    }

    /// `Δ*(G) = {min Δ(G₀) : Δ(G₀) ≠ ∅}`.
    pub fn delta_star(&self) -> Result<Certified<BTreeSet<u64>>> {
        let value = self
            .complete()?
            .filter(|(_, s)| s.min_delta > 0)
            .map(|(_, s)| s.min_delta)
            .collect();
        Ok(Certified {
            value,
            exact: self.is_exact(),
        })
    }

    /// `m(G)`: largest `min Δ(G₀)` over non-half-factorial LCN-sets, 0 if none.
    pub fn m(&self) -> Result<Certified<u64>> {
        let value = self
            .complete()?
            .filter(|(_, s)| s.lcn && s.min_delta > 0)
            .map(|(_, s)| s.min_delta)
            .max()
            .unwrap_or(0);
        Ok(Certified {
            value,
            exact: self.is_exact(),
        })
    }

    fn witnesses(&self, d: u64) -> Result<Vec<(&[GElement], &SubsetStats)>> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        Ok(self
            .complete()?
            .filter(|(_, s)| s.min_delta > 0 && s.min_delta % d == 0)
            .collect())
    }

    /// `ρ*(G,d)` with a maximizing subset; `None` when no non-half-factorial
    /// subset has `d | min Δ(G₀)`.
    pub fn rho_star_with_witness(
        &self,
        d: u64,
    ) -> Result<Option<(Certified<Rational>, Vec<GElement>)>> {
        let mut best: Option<(Rational, &[GElement])> = None;
        for (subset, s) in self.witnesses(d)? {
            let r = Self::elasticity_of(s)?;
            if best.map_or(true, |(b, _)| r > b) {
                best = Some((r, subset));
            }
        }
        Ok(best.map(|(value, subset)| {
            (
                Certified {
                    value,
                    exact: self.is_exact(),
                },
                subset.to_vec(),
            )
        }))
    }

    pub fn rho_star(&self, d: u64) -> Result<Option<Certified<Rational>>> {
        Ok(self.rho_star_with_witness(d)?.map(|(c, _)| c))
    }

    /// `K(G,d)` with a maximizing subset.
    pub fn k_of_with_witness(
        &self,
        d: u64,
    ) -> Result<Option<(Certified<Rational>, Vec<GElement>)>> {
        let best = self.witnesses(d)?.into_iter().fold(
            None::<(Rational, &[GElement])>,
            |best, (subset, s)| match best {
                Some((b, _)) if b >= s.max_cross => best,
                _ => Some((s.max_cross, subset)),
            },
        );
        Ok(best.map(|(value, subset)| {
            (
                Certified {
                    value,
                    exact: self.is_exact(),
                },
                subset.to_vec(),
            )
        }))
    }

    pub fn k_of(&self, d: u64) -> Result<Option<Certified<Rational>>> {
        Ok(self.k_of_with_witness(d)?.map(|(c, _)| c))
    }

    /// Upper bound `ρ*(G,d)`; lower bound the largest `ρ(G₀)` with
    /// `min Δ(G₀) = d` exactly (each such `G₀` gives `ρ(G,d) ≥ ρ(G₀)`), or 1.
    pub fn rho_d_bounds(&self, d: u64) -> Result<Option<RhoDBounds>> {
        let Some((upper, upper_witness)) = self.rho_star_with_witness(d)? else {
            return Ok(None);
        };
        let mut lower = Rational::from_integer(1);
        let mut lower_witness = None;
        for (subset, s) in self.witnesses(d)? {
            if s.min_delta != d {
                continue;
            }
            let r = Self::elasticity_of(s)?;
            if lower_witness.is_none() || r > lower {
                lower = r;
                lower_witness = Some(subset.to_vec());
            }
        }
        Ok(Some(RhoDBounds {
            d,
            lower,
            upper: upper.value,
            lower_witness,
            upper_witness,
            exact: lower == upper.value,
            sweep_exact: upper.exact,
        }))
    }

    /// `Δ*(G) ⊆ Δ₁(G) ⊆ {d : d | d′ for some d′ ∈ Δ*(G)} ∩ ([1, a] ∪ [b, exp − 2])`
    /// with `a = max{r − 1, ⌊exp/2⌋ − 1}`, `b = max{1, exp − k − 1}`, and `k`
    /// the multiplicity of `exp(G)` among the invariant factors.
    pub fn delta1_bounds(&self) -> Result<Delta1Bounds> {
        let star = self.delta_star()?;
        let g = &self.group;
        let exp = g.exponent() as i64;
        let r = g.rank() as i64;
        let k = g
            .invariant_factors()
            .iter()
            .filter(|&&n| n as i64 == exp)
            .count() as i64;
        let a = (r - 1).max(exp / 2 - 1);
        let b = 1.max(exp - k - 1);
        let in_window = |d: i64| (1..=a).contains(&d) || (b..=exp - 2).contains(&d);
        let mut upper = BTreeSet::new();
        for &d in &star.value {
            for t in 1..=d {
                if d % t == 0 && in_window(t as i64) {
                    upper.insert(t);
                }
            }
        }
        Ok(Delta1Bounds {
            lower: star.value,
            upper,
            exact_lower: star.exact,
        })
    }

    /// JSON lines, one per report.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&r.to_json().to_string());
            s.push('\n');
        }
        s
    }
}

pub fn delta_star(
    group: &GroupSpec,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Certified<BTreeSet<u64>>> {
    sweep_subsets(group, cfg, cache)?.delta_star()
}

pub fn m_of(
    group: &GroupSpec,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Certified<u64>> {
    sweep_subsets(group, cfg, cache)?.m()
}

pub fn rho_star(
    group: &GroupSpec,
    d: u64,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Option<Certified<Rational>>> {
    sweep_subsets(group, cfg, cache)?.rho_star(d)
}

pub fn k_of(
    group: &GroupSpec,
    d: u64,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Option<Certified<Rational>>> {
    let cfg = SweepConfig {
        with_elasticity: false,
        ..cfg.clone()
    };
    sweep_subsets(group, &cfg, cache)?.k_of(d)
}

pub fn rho_d_bounds(
    group: &GroupSpec,
    d: u64,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Option<RhoDBounds>> {
    sweep_subsets(group, cfg, cache)?.rho_d_bounds(d)
}

pub fn delta1_bounds(
    group: &GroupSpec,
    cfg: &SweepConfig,
    cache: Option<&AtomCache>,
) -> Result<Delta1Bounds> {
    let cfg = SweepConfig {
        with_elasticity: false,
        ..cfg.clone()
    };
    sweep_subsets(group, &cfg, cache)?.delta1_bounds()
}

/// `L = y + (L′ ∪ {0, d, …, ℓd} ∪ L″)` with `L′ ⊆ [−M, −1]`, `L″ ⊆ ℓd + [1, M]`.
/// Head and tail are stored relative to `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AapWitness {
    pub y: i64,
    pub d: u64,
    pub ell: u64,
    pub bound_m: u64,
    pub head: Vec<i64>,
    pub tail: Vec<i64>,
    /// whether `L ⊆ y + dZ`, i.e. the witness is an AAP in the strict sense
    pub congruent: bool,
}

impl AapWitness {
    pub fn reconstruct(&self) -> BTreeSet<i64> {
        let d = self.d as i64;
        self.head
            .iter()
            .copied()
            .chain((0..=self.ell as i64).map(|i| i * d))
            .chain(self.tail.iter().copied())
            .map(|v| v + self.y)
            .collect()
    }
}

/// The decomposition with the longest central progression, then the smallest
/// bound `M`, then the smallest shift `y`.
pub fn aap_decompose(l: &LengthSet, d: u64) -> Result<AapWitness> {
    if d == 0 {
        return Err(Error::Domain("AAP difference must be positive".into()));
    }
    let vals: Vec<i64> = l.as_slice().iter().map(|&v| v as i64).collect();
    let di = d as i64;
    let (lo, hi) = (vals[0], *vals.last().expect("nonempty"));
    let mut best: Option<(u64, u64, i64)> = None;
    for (start, &y) in vals.iter().enumerate() {
        // the progression must be a run of consecutive elements of L
        let mut ell = 0u64;
        let mut pos = start;
        while pos + 1 < vals.len() && vals[pos + 1] == vals[pos] + di {
            ell += 1;
            pos += 1;
        }
        let end = y + ell as i64 * di;
        let m = (y - lo).max(hi - end) as u64;
        let key = (ell, m, y);
        let better = match best {
            None => true,
            Some((be, bm, by)) => ell > be || (ell == be && (m < bm || (m == bm && y < by))),
        };
        if better {
            best = Some(key);
        }
    }
    let (ell, bound_m, y) = best.expect("L is nonempty");
    let end = y + ell as i64 * di;
    Ok(AapWitness {
        y,
        d,
        ell,
        bound_m,
        head: vals.iter().filter(|&&v| v < y).map(|v| v - y).collect(),
        tail: vals.iter().filter(|&&v| v > end).map(|v| v - y).collect(),
        congruent: vals.iter().all(|v| (v - y).rem_euclid(di) == 0),
    })
}
