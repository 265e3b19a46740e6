//! Enumeration of minimal zero-sum sequences `A(G₀)` and the invariants read
//! off from them: Davenport constant `D(G₀)`, cross number `K(G₀)`, and the
//! closed-form benchmark `K*(G)`.
//!
//! The search walks zero-sum-free sequences `T` over `G₀` in nondecreasing
//! canonical order while keeping `Σ(T)` as a bitset over the group. Extending
//! `T` by `g` stays zero-sum free iff `-g ∉ Σ(T)`, and then
//! `Σ(Tg) = Σ(T) ∪ (Σ(T) + g) ∪ {g}`. A zero-sum-free `T` closes to the atom
//! `T·(-σ(T))` whenever `-σ(T) ∈ G₀` is not smaller than the last element of
//! `T`; every atom arises exactly once, from itself minus one copy of its
//! largest element.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GElement, GroupSpec};
use crate::rational::Rational;
use crate::seq::Sequence;
use crate::table::{Bits, Cayley};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct EnumConfig {
    /// Maximum number of search nodes before failing with `BudgetExceeded`.
    pub node_budget: u64,
    /// Skip the up-front feasibility guard `∏ ord(g) ≤ node_budget`.
    pub force: bool,
    /// Split the search over its first element with rayon.
    pub parallel: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            force: false,
            parallel: true,
        }
    }
}

impl EnumConfig {
    pub fn forced() -> Self {
        EnumConfig {
            force: true,
            ..Self::default()
        }
    }
}

/// The complete set of atoms over a subset, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomSet {
    group: GroupSpec,
    subset: Vec<GElement>,
    exponents: Vec<Vec<u32>>,
    atoms: Vec<Sequence>,
    davenport: u64,
    max_cross: Rational,
    min_cross: Rational,
    has_zero: bool,
}

impl AtomSet {
    /// Assembles an atom set from exponent vectors over `subset`, sorting the
    /// atoms by length and then exponent vector.
    pub(crate) fn from_exponents(
        group: &GroupSpec,
        subset: Vec<GElement>,
        mut exponents: Vec<Vec<u32>>,
    ) -> Result<Self> {
        exponents.sort_by(|a, b| {
            let la: u32 = a.iter().sum();
            let lb: u32 = b.iter().sum();
            la.cmp(&lb).then_with(|| b.cmp(a))
        });
        exponents.dedup();
        let atoms = exponents
            .iter()
            .map(|e| Sequence::from_counts(group, subset.iter().cloned().zip(e.iter().copied())))
            .collect::<Result<Vec<_>>>()?;
        let davenport = atoms.iter().map(Sequence::len).max().unwrap_or(0);
        let crosses: Vec<Rational> = atoms.iter().map(Sequence::cross_number).collect();
        let zero = Rational::from_integer(0);
        let max_cross = crosses.iter().copied().max().unwrap_or(zero);
        let min_cross = crosses.iter().copied().min().unwrap_or(zero);
        let has_zero = subset.iter().any(GElement::is_zero);
        Ok(AtomSet {
            group: group.clone(),
            subset,
            exponents,
            atoms,
            davenport,
            max_cross,
            min_cross,
            has_zero,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// The subset `G₀`, sorted, without duplicates.
    pub fn subset(&self) -> &[GElement] {
        &self.subset
    }

    pub fn atoms(&self) -> &[Sequence] {
        &self.atoms
    }

    /// Exponent vector of each atom, indexed like [`subset`](Self::subset).
    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `D(G₀)`.
    pub fn davenport(&self) -> u64 {
        self.davenport
    }

    /// `K(G₀)`.
    pub fn max_cross(&self) -> Rational {
        self.max_cross
    }

    pub fn min_cross(&self) -> Rational {
        self.min_cross
    }

    /// Whether `0 ∈ G₀`, contributing the length-one atom `0`.
    pub fn has_zero_atom(&self) -> bool {
        self.has_zero
    }

    pub fn subset_index(&self, g: &GElement) -> Option<usize> {
        self.subset.binary_search(g).ok()
    }

    /// Exponent vector of a sequence over `G₀`, or `None` if its support
    /// leaves `G₀`.
    pub fn exponent_vector(&self, s: &Sequence) -> Option<Vec<u32>> {
        let mut v = vec![0u32; self.subset.len()];
        for (g, k) in s.iter() {
            v[self.subset_index(g)?] = k;
        }
        Some(v)
    }
}

/// Sorted, deduplicated copy of `subset`, validated against the group.
pub(crate) fn normalize_subset(group: &GroupSpec, subset: &[GElement]) -> Result<Vec<GElement>> {
    if subset.is_empty() {
        return Err(Error::Precondition("G₀ must be nonempty".into()));
    }
    for g in subset {
        if !group.contains(g) {
            return Err(Error::Domain(format!("{g} is not an element of {group}")));
        }
    }
    let mut v = subset.to_vec();
    v.sort();
    v.dedup();
    Ok(v)
}

/// Upper bound on the number of zero-sum-free sequences over the nonzero part of `G₀`.
fn node_bound(group: &GroupSpec, subset: &[GElement]) -> u128 {
    subset
        .iter()
        .filter(|g| !g.is_zero())
        .fold(1u128, |acc, g| {
            acc.saturating_mul(group.element_order(g) as u128)
        })
}

struct Search<'a> {
    table: &'a Cayley,
    elems: &'a [usize],
    /// position in `elems` of each group index, if present
    pos_of: &'a [Option<usize>],
    budget: u64,
    nodes: &'a AtomicU64,
}

struct Frame {
    exps: Vec<u32>,
    sums: Vec<Bits>,
    out: Vec<Vec<u32>>,
    local: u64,
}

impl Search<'_> {
    const FLUSH: u64 = 4096;

    fn tick(&self, f: &mut Frame) -> Result<()> {
        f.local += 1;
        if f.local >= Self::FLUSH {
            let total = self.nodes.fetch_add(f.local, Ordering::Relaxed) + f.local;
            f.local = 0;
            if total > self.budget {
                return Err(Error::budget("atom enumeration", self.budget));
            }
        }
        Ok(())
    }

    fn finish(&self, f: &mut Frame) -> Result<()> {
        let total = self.nodes.fetch_add(f.local, Ordering::Relaxed) + f.local;
        f.local = 0;
        if total > self.budget {
            return Err(Error::budget("atom enumeration", self.budget));
        }
        Ok(())
    }

    /// Visits the zero-sum-free sequence held in `f.exps` (at recursion depth
    /// `depth`, with sum `sum` and largest position `last`).
    fn visit(&self, f: &mut Frame, depth: usize, last: usize, sum: usize) -> Result<()> {
        self.tick(f)?;
        let need = self.table.neg(sum);
        if let Some(p) = self.pos_of[need] {
            if p >= last {
                let mut atom = f.exps.clone();
                atom[p] += 1;
                f.out.push(atom);
            }
        }
        if f.sums.len() <= depth + 1 {
            f.sums.push(Bits::new(self.table.len()));
        }
        for p in last..self.elems.len() {
            let g = self.elems[p];
            if f.sums[depth].get(self.table.neg(g)) {
                continue;
            }
            let (cur, next) = f.sums.split_at_mut(depth + 1);
            let cur = &cur[depth];
            let next = &mut next[0];
            next.copy_from(cur);
            for x in cur.ones() {
                next.set(self.table.add(x, g));
            }
            next.set(g);
            f.exps[p] += 1;
            self.visit(f, depth + 1, p, self.table.add(sum, g))?;
            f.exps[p] -= 1;
        }
        Ok(())
    }

    fn root_branch(&self, first: usize) -> Result<Vec<Vec<u32>>> {
        let n = self.table.len();
        let mut f = Frame {
            exps: vec![0; self.elems.len()],
            sums: vec![Bits::new(n), Bits::new(n)],
            out: Vec::new(),
            local: 0,
        };
        let g = self.elems[first];
        f.sums[1].set(g);
        f.exps[first] = 1;
        self.visit(&mut f, 1, first, g)?;
        self.finish(&mut f)?;
        Ok(f.out)
    }
}

/// Enumerates `A(G₀)` completely or fails; partial sets are never returned.
pub fn enumerate_atoms(
    group: &GroupSpec,
    subset: &[GElement],
    cfg: &EnumConfig,
) -> Result<AtomSet> {
    let subset = normalize_subset(group, subset)?;
    let bound = node_bound(group, &subset);
    if !cfg.force && bound > cfg.node_budget as u128 {
        return Err(Error::BudgetExceeded {
            what: format!(
                "atom enumeration over {} elements of {group} (∏ ord(g) = {bound})",
                subset.len()
            ),
            limit: cfg.node_budget,
        });
    }
    let table = Cayley::new(group)?;
    let mut pos_of = vec![None; table.len()];
    let mut elems = Vec::new();
    let mut zero_pos = None;
    for (p, g) in subset.iter().enumerate() {
        if g.is_zero() {
            zero_pos = Some(p);
        }
    }
    // positions in `elems` refer to the nonzero part; map back afterwards
    let nonzero: Vec<usize> = (0..subset.len()).filter(|&p| Some(p) != zero_pos).collect();
    for (q, &p) in nonzero.iter().enumerate() {
        let idx = table.index(&subset[p]);
        pos_of[idx] = Some(q);
        elems.push(idx);
    }
    let nodes = AtomicU64::new(0);
    let search = Search {
        table: &table,
        elems: &elems,
        pos_of: &pos_of,
        budget: cfg.node_budget,
        nodes: &nodes,
    };
    let branches: Vec<Vec<Vec<u32>>> = if cfg.parallel && elems.len() > 1 {
        (0..elems.len())
            .into_par_iter()
            .map(|first| search.root_branch(first))
            .collect::<Result<_>>()?
    } else {
        (0..elems.len())
            .map(|first| search.root_branch(first))
            .collect::<Result<_>>()?
    };
    let mut exponents: Vec<Vec<u32>> = branches
        .into_iter()
        .flatten()
        .map(|short| {
            let mut full = vec![0u32; subset.len()];
            for (q, &p) in nonzero.iter().enumerate() {
                full[p] = short[q];
            }
            full
        })
        .collect();
    if let Some(z) = zero_pos {
        let mut e = vec![0u32; subset.len()];
        e[z] = 1;
        exponents.push(e);
    }
    AtomSet::from_exponents(group, subset, exponents)
}

/// `D(G)`: the longest atom over `G ∖ {0}`.
pub fn davenport(group: &GroupSpec, cfg: &EnumConfig) -> Result<u64> {
    let subset = group.nonzero_elements()?;
    if subset.is_empty() {
        return Ok(1);
    }
    Ok(enumerate_atoms(group, &subset, cfg)?.davenport())
}

/// `K*(G) = 1/exp(G) + Σ (q_i − 1)/q_i` over the primary decomposition.
pub fn k_star(group: &GroupSpec) -> Rational {
    let base = Rational::new(1, group.exponent() as i64);
    group
        .primary_decomposition()
        .iter()
        .fold(base, |acc, &q| acc + Rational::new(q as i64 - 1, q as i64))
}

/// `K(G₀)`, the largest cross number of an atom over `G₀`.
pub fn cross_number_k(
    group: &GroupSpec,
    subset: &[GElement],
    cfg: &EnumConfig,
) -> Result<Rational> {
    Ok(enumerate_atoms(group, subset, cfg)?.max_cross())
}

/// `K(G)`. Computed over `G ∖ {0}`; the only extra atom over `G`, the
/// sequence `0`, has cross number 1, which never exceeds the maximum unless
/// `G` is trivial.
pub fn cross_number_k_group(group: &GroupSpec, cfg: &EnumConfig) -> Result<Rational> {
    let subset = group.nonzero_elements()?;
    if subset.is_empty() {
        return Ok(Rational::from_integer(1));
    }
    cross_number_k(group, &subset, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    fn show(a: &AtomSet) -> Vec<String> {
        let mut v: Vec<String> = a.atoms().iter().map(|s| s.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn c3_atoms() {
        let g = grp("C3");
        let a =
            enumerate_atoms(&g, &g.nonzero_elements().unwrap(), &EnumConfig::default()).unwrap();
        assert_eq!(show(&a), ["(1) (2)", "(1)^3", "(2)^3"]);
        assert_eq!(a.davenport(), 3);
    }

    #[test]
    fn c2_and_klein_atoms() {
        let g = grp("C2");
        let a = enumerate_atoms(&g, &[g.element(&[1]).unwrap()], &EnumConfig::default()).unwrap();
        assert_eq!(show(&a), ["(1)^2"]);
        assert_eq!(a.davenport(), 2);

        let g = grp("C2^2");
        let a =
            enumerate_atoms(&g, &g.nonzero_elements().unwrap(), &EnumConfig::default()).unwrap();
        assert_eq!(
            show(&a),
            ["(0,1) (1,0) (1,1)", "(0,1)^2", "(1,0)^2", "(1,1)^2"]
        );
        assert_eq!(a.davenport(), 3);
    }

    #[test]
    fn zero_contributes_only_its_own_atom() {
        let g = grp("C3");
        let a = enumerate_atoms(&g, &g.elements().unwrap(), &EnumConfig::default()).unwrap();
        assert!(a.has_zero_atom());
        assert_eq!(show(&a), ["(0)", "(1) (2)", "(1)^3", "(2)^3"]);
        assert_eq!(a.davenport(), 3);
    }

    #[test]
    fn davenport_small() {
        for n in 2..=7u64 {
            assert_eq!(
                davenport(&GroupSpec::cyclic(n).unwrap(), &EnumConfig::default()).unwrap(),
                n
            );
        }
        assert_eq!(davenport(&grp("C3^2"), &EnumConfig::default()).unwrap(), 5);
        let g = grp("C5");
        let a = enumerate_atoms(&g, &[g.element(&[2]).unwrap()], &EnumConfig::default()).unwrap();
        assert_eq!(a.davenport(), 5);
    }

    #[test]
    fn k_star_examples() {
        assert_eq!(k_star(&grp("C2^2")), Rational::new(3, 2));
        assert_eq!(k_star(&grp("C3")), Rational::from_integer(1));
        assert_eq!(k_star(&grp("C6")), Rational::new(4, 3));
    }

    #[test]
    fn cross_number_examples() {
        let cfg = EnumConfig::default();
        assert_eq!(
            cross_number_k_group(&grp("C3^2"), &cfg).unwrap(),
            Rational::new(5, 3)
        );
        assert_eq!(
            cross_number_k_group(&grp("C2^2"), &cfg).unwrap(),
            Rational::new(3, 2)
        );
        let g = grp("C4");
        assert_eq!(
            cross_number_k(&g, &[g.element(&[2]).unwrap()], &cfg).unwrap(),
            Rational::from_integer(1)
        );
    }

    #[test]
    fn feasibility_guard_and_budget() {
        let g = grp("C3^3");
        let cfg = EnumConfig {
            node_budget: 1000,
            ..EnumConfig::default()
        };
        let all = g.nonzero_elements().unwrap();
        assert!(matches!(
            enumerate_atoms(&g, &all, &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
        let forced = EnumConfig { force: true, ..cfg };
        assert!(matches!(
            enumerate_atoms(&g, &all, &forced),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn result_independent_of_parallelism() {
        let g = grp("C2xC4");
        let all = g.nonzero_elements().unwrap();
        let a = enumerate_atoms(&g, &all, &EnumConfig::default()).unwrap();
        let b = enumerate_atoms(
            &g,
            &all,
            &EnumConfig {
                parallel: false,
                ..EnumConfig::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_subset_rejected() {
        let g = grp("C3");
        assert!(matches!(
            enumerate_atoms(&g, &[], &EnumConfig::default()),
            Err(Error::Precondition(_))
        ));
    }
}
