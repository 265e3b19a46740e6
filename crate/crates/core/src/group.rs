//! Finite abelian groups `C_{n1} ⊕ … ⊕ C_{nr}` in invariant-factor form.
//!
//! Elements are coordinate vectors reduced modulo the invariant factors. For
//! table-driven work every element also has a dense index: the mixed-radix
//! number of its coordinates with the first coordinate most significant, so
//! index order coincides with coordinate-lexicographic order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Default bound on `|G|` for materializing `Aut(G)`.
pub const DEFAULT_AUT_CAP: u64 = 81;

/// Hard ceiling on the number of automorphisms kept in memory.
const MAX_AUTOMORPHISMS: usize = 4_000_000;

/// Largest group order for which element indices and Cayley tables are built.
pub const MAX_TABLE_ORDER: u64 = 1 << 20;

#[derive(Debug, PartialEq, Eq, Hash)]
struct GroupInner {
    factors: Vec<u64>,
    order: u64,
    primary: Vec<u64>,
    strides: Vec<u64>,
}

/// A finite abelian group given by its invariant factors `1 < n1 | n2 | … | nr`.
///
/// Cloning is cheap; the data is shared and immutable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec(Arc<GroupInner>);

/// A group element as a vector of residues, one per invariant factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GElement {
    coords: Vec<u64>,
}

impl GElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Prime factorization by trial division, as `(p, e)` pairs with `p` increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Regroup an arbitrary list of cyclic orders into invariant factors.
fn invariant_factors_of(cyclic: &[u64]) -> Vec<u64> {
    // prime -> exponents of the elementary divisors
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in cyclic {
        for (p, e) in factorize(n) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    for (p, mut exps) in by_prime {
        exps.sort_unstable();
        // largest exponents go to the last invariant factors
        let offset = rank - exps.len();
        for (i, e) in exps.into_iter().enumerate() {
            factors[offset + i] *= p.pow(e);
        }
    }
    factors
}

impl GroupSpec {
    /// Builds the group from invariant factors that already form a divisibility chain.
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = invariant_factors.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!("invariant factor {bad} is < 2")));
        }
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Domain(format!(
                    "{} does not divide {}; not an invariant-factor chain",
                    w[0], w[1]
                )));
            }
        }
        let mut order: u64 = 1;
        for &n in &invariant_factors {
            order = order
                .checked_mul(n)
                .ok_or_else(|| Error::Domain("group order overflows u64".into()))?;
        }
        let mut primary: Vec<u64> = invariant_factors
            .iter()
            .flat_map(|&n| factorize(n).into_iter().map(|(p, e)| p.pow(e)))
            .collect();
        primary.sort_unstable();
        let mut strides = vec![1u64; invariant_factors.len()];
        for i in (0..invariant_factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1].saturating_mul(invariant_factors[i + 1]);
        }
        Ok(GroupSpec(Arc::new(GroupInner {
            factors: invariant_factors,
            order,
            primary,
            strides,
        })))
    }

    /// The direct sum of cyclic groups of the given orders, normalized.
    pub fn from_cyclic_orders(orders: &[u64]) -> Result<Self> {
        if let Some(&bad) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!("cyclic factor C{bad} has order < 2")));
        }
        GroupSpec::new(invariant_factors_of(orders))
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        GroupSpec::from_cyclic_orders(&[n])
    }

    /// The trivial group (no invariant factors).
    pub fn trivial() -> Self {
        GroupSpec::new(Vec::new()).expect("empty chain is valid")
    }

    /// Parses `Cn`, `x` for direct sums, `^k` for repetition; whitespace and the
    /// case of `c` are ignored. `"C2xC3"` normalizes to `C6`.
    pub fn parse(text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty group spec".into()));
        }
        let mut orders = Vec::new();
        for term in cleaned.split(['x', 'X']) {
            let body = term
                .strip_prefix('C')
                .or_else(|| term.strip_prefix('c'))
                .ok_or_else(|| Error::Parse(format!("expected `Cn` in {term:?}")))?;
            let (base, rep) = match body.split_once('^') {
                Some((b, r)) => (b, Some(r)),
                None => (body, None),
            };
            let n: u64 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad cyclic order {base:?} in {text:?}")))?;
            let k: usize = match rep {
                Some(r) => r
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {r:?} in {text:?}")))?,
                None => 1,
            };
            if k == 0 {
                return Err(Error::Parse(format!("zero repetition in {term:?}")));
            }
            orders.extend(std::iter::repeat(n).take(k));
        }
        GroupSpec::from_cyclic_orders(&orders)
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.0.factors
    }

    pub fn rank(&self) -> usize {
        self.0.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// `exp(G) = n_r`; the trivial group has exponent 1.
    pub fn exponent(&self) -> u64 {
        self.0.factors.last().copied().unwrap_or(1)
    }

    /// Prime powers `q_1, …, q_{r*}` of the primary decomposition, sorted.
    pub fn primary_decomposition(&self) -> &[u64] {
        &self.0.primary
    }

    pub fn total_rank(&self) -> usize {
        self.0.primary.len()
    }

    pub fn is_p_group(&self) -> bool {
        factorize(self.order()).len() <= 1
    }

    pub fn is_cyclic(&self) -> bool {
        self.rank() <= 1
    }

    pub fn zero(&self) -> GElement {
        GElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Builds an element, reducing each coordinate into `[0, n_i)`.
    pub fn element(&self, coords: &[i64]) -> Result<GElement> {
        if coords.len() != self.rank() {
            return Err(Error::Domain(format!(
                "element has {} coordinates, group rank is {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GElement {
            coords: coords
                .iter()
                .zip(&self.0.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    /// The standard basis element `e_i` of order `n_i`.
    pub fn basis_element(&self, i: usize) -> GElement {
        let mut coords = vec![0; self.rank()];
        coords[i] = 1 % self.0.factors[i];
        GElement { coords }
    }

    pub fn contains(&self, g: &GElement) -> bool {
        g.coords.len() == self.rank() && g.coords.iter().zip(&self.0.factors).all(|(c, n)| c < n)
    }

    pub fn parse_element(&self, text: &str) -> Result<GElement> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(t);
        let coords: Vec<i64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad coordinate {s:?} in {text:?}")))
                })
                .collect::<Result<_>>()?
        };
        self.element(&coords)
    }

    pub fn add(&self, a: &GElement, b: &GElement) -> GElement {
        GElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.0.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GElement) -> GElement {
        GElement {
            coords: a
                .coords
                .iter()
                .zip(&self.0.factors)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        }
    }

    pub fn sub(&self, a: &GElement, b: &GElement) -> GElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: i64, a: &GElement) -> GElement {
        GElement {
            coords: a
                .coords
                .iter()
                .zip(&self.0.factors)
                .map(|(&x, &n)| {
                    let k = k.rem_euclid(n as i64) as u128;
                    ((k * x as u128) % n as u128) as u64
                })
                .collect(),
        }
    }

    pub fn sum<'a>(&self, elems: impl IntoIterator<Item = &'a GElement>) -> GElement {
        elems
            .into_iter()
            .fold(self.zero(), |acc, g| self.add(&acc, g))
    }

    /// Least `t ≥ 1` with `t·g = 0`: the lcm of the coordinatewise orders.
    pub fn element_order(&self, g: &GElement) -> u64 {
        g.coords
            .iter()
            .zip(&self.0.factors)
            .fold(1u64, |acc, (&c, &n)| acc.lcm(&(n / n.gcd(&c))))
    }

    fn check_table_size(&self) -> Result<usize> {
        if self.order() > MAX_TABLE_ORDER {
            return Err(Error::CapExceeded(format!(
                "group order {} exceeds element-table limit {MAX_TABLE_ORDER}",
                self.order()
            )));
        }
        Ok(self.order() as usize)
    }

    /// All elements in coordinate-lexicographic order.
    pub fn elements(&self) -> Result<Vec<GElement>> {
        let n = self.check_table_size()?;
        Ok((0..n).map(|i| self.element_at(i)).collect())
    }

    pub fn nonzero_elements(&self) -> Result<Vec<GElement>> {
        Ok(self.elements()?.into_iter().skip(1).collect())
    }

    pub fn index_of(&self, g: &GElement) -> usize {
        g.coords
            .iter()
            .zip(&self.0.strides)
            .map(|(&c, &s)| (c * s) as usize)
            .sum()
    }

    pub fn element_at(&self, mut idx: usize) -> GElement {
        let mut coords = vec![0; self.rank()];
        for (i, &s) in self.0.strides.iter().enumerate() {
            coords[i] = idx as u64 / s;
            idx %= s as usize;
        }
        GElement { coords }
    }

    /// The subgroup `⟨G₀⟩`. `span(∅)` is the trivial subgroup.
    pub fn span(&self, gens: &[GElement]) -> Result<Subgroup> {
        let n = self.check_table_size()?;
        let mut member = vec![false; n];
        member[0] = true;
        let mut members = vec![self.zero()];
        for g in gens {
            if member[self.index_of(g)] {
                continue;
            }
            // close the current subgroup under adding multiples of g
            let current = members.clone();
            let mut step = g.clone();
            while !member[self.index_of(&step)] {
                for h in &current {
                    let s = self.add(h, &step);
                    let i = self.index_of(&s);
                    if !member[i] {
                        member[i] = true;
                        members.push(s);
                    }
                }
                step = self.add(&step, g);
            }
        }
        members.sort();
        let structure = structure_of(self, &members)?;
        Ok(Subgroup {
            ambient: self.clone(),
            structure,
            members,
        })
    }

    /// True iff every `e_i ≠ 0` and `|⟨e_1, …, e_k⟩| = ∏ ord(e_i)`.
    pub fn is_independent(&self, elems: &[GElement]) -> Result<bool> {
        if elems.iter().any(GElement::is_zero) {
            return Ok(false);
        }
        let mut prod: u128 = 1;
        for e in elems {
            prod *= self.element_order(e) as u128;
            if prod > self.order() as u128 {
                return Ok(false);
            }
        }
        Ok(self.span(elems)?.order() as u128 == prod)
    }

    /// Short textual name: `C3^2`, `C2xC6`, `C2^2xC4`; the trivial group is `C1`.
    pub fn name(&self) -> String {
        if self.rank() == 0 {
            return "C1".into();
        }
        let mut parts = Vec::new();
        let f = &self.0.factors;
        let mut i = 0;
        while i < f.len() {
            let mut j = i;
            while j < f.len() && f[j] == f[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(format!("C{}", f[i]));
            } else {
                parts.push(format!("C{}^{}", f[i], j - i));
            }
            i = j;
        }
        parts.join("x")
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({})", self.name())
    }
}

/// Isomorphism type of a finite abelian group given by its elements.
///
/// For each prime `p` the number of cyclic `p`-factors of order at least `p^j`
/// is `log_p(|H[p^j]| / |H[p^{j-1}]|)`, where `H[t]` is the `t`-torsion.
fn structure_of(ambient: &GroupSpec, members: &[GElement]) -> Result<GroupSpec> {
    let order = members.len() as u64;
    let mut elementary = Vec::new();
    for (p, e) in factorize(order) {
        let mut torsion = vec![1u64];
        for j in 1..=e {
            let t = p.pow(j);
            let c = members
                .iter()
                .filter(|g| ambient.scale(t as i64, g).is_zero())
                .count() as u64;
            torsion.push(c);
        }
        // factors of order >= p^j
        let at_least: Vec<u32> = (1..=e as usize)
            .map(|j| ilog(torsion[j] / torsion[j - 1], p))
            .collect();
        for j in 0..at_least.len() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(at_least[j] - next) {
                elementary.push(p.pow(j as u32 + 1));
            }
        }
    }
    GroupSpec::new(invariant_factors_of(&elementary))
}

fn ilog(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

/// A subgroup of an ambient group: its isomorphism type and its elements.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: GroupSpec,
    structure: GroupSpec,
    members: Vec<GElement>,
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn structure(&self) -> &GroupSpec {
        &self.structure
    }

    pub fn ambient(&self) -> &GroupSpec {
        &self.ambient
    }

    pub fn members(&self) -> &[GElement] {
        &self.members
    }

    pub fn contains(&self, g: &GElement) -> bool {
        self.members.binary_search(g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|g| other.contains(g))
    }
}

/// `Aut(G)` materialized as permutations of element indices.
#[derive(Clone, Debug)]
pub struct Automorphisms {
    group: GroupSpec,
    perms: Vec<Vec<u16>>,
}

impl Automorphisms {
    /// Enumerates all images of the standard basis that keep the orders and
    /// stay independent. Fails with `CapExceeded` when `|G| > cap`.
    pub fn new(group: &GroupSpec, cap: u64) -> Result<Self> {
        if group.order() > cap {
            return Err(Error::CapExceeded(format!(
                "|G| = {} exceeds automorphism cap {cap}",
                group.order()
            )));
        }
        if group.order() > u16::MAX as u64 {
            return Err(Error::CapExceeded(format!(
                "|G| = {} too large for permutation tables",
                group.order()
            )));
        }
        let n = group.order() as usize;
        let elems = group.elements()?;
        let orders: Vec<u64> = elems.iter().map(|g| group.element_order(g)).collect();
        let mut images: Vec<Vec<usize>> = Vec::new();
        let mut chosen = Vec::with_capacity(group.rank());
        let mut span = vec![false; n];
        span[0] = true;
        extend_images(group, &elems, &orders, &mut chosen, &mut span, &mut images)?;

        let perms = images
            .into_iter()
            .map(|img| {
                elems
                    .iter()
                    .map(|g| {
                        let mut acc = group.zero();
                        for (i, &c) in g.coords.iter().enumerate() {
                            acc = group.add(&acc, &group.scale(c as i64, &elems[img[i]]));
                        }
                        group.index_of(&acc) as u16
                    })
                    .collect()
            })
            .collect();
        Ok(Automorphisms {
            group: group.clone(),
            perms,
        })
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Permutations of element indices, one per automorphism; the identity is first.
    pub fn permutations(&self) -> &[Vec<u16>] {
        &self.perms
    }

    pub fn apply(&self, which: usize, g: &GElement) -> GElement {
        self.group
            .element_at(self.perms[which][self.group.index_of(g)] as usize)
    }

    /// Lexicographically least image of the sorted index list of `subset`.
    pub fn canonical_indices(&self, subset: &[usize]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        let mut buf = Vec::with_capacity(subset.len());
        for p in &self.perms {
            buf.clear();
            buf.extend(subset.iter().map(|&i| p[i] as usize));
            buf.sort_unstable();
            if best.as_ref().map_or(true, |b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        best.unwrap_or_default()
    }

    /// Same as [`canonical_indices`](Self::canonical_indices) on a bitmask
    /// (`|G| ≤ 128`). With bits reversed, the lexicographically least sorted
    /// list is the numerically largest key.
    pub fn canonical_mask(&self, mask: u128) -> u128 {
        let mut best_key = 0u128;
        let mut best = mask;
        for p in &self.perms {
            let mut m = mask;
            let mut img = 0u128;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                img |= 1u128 << p[i];
            }
            let key = img.reverse_bits();
            if key > best_key {
                best_key = key;
                best = img;
            }
        }
        best
    }
}

fn extend_images(
    group: &GroupSpec,
    elems: &[GElement],
    orders: &[u64],
    chosen: &mut Vec<usize>,
    span: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let j = chosen.len();
    if j == group.rank() {
        if out.len() >= MAX_AUTOMORPHISMS {
            return Err(Error::CapExceeded(format!(
                "Aut({group}) has more than {MAX_AUTOMORPHISMS} elements"
            )));
        }
        out.push(chosen.clone());
        return Ok(());
    }
    let nj = group.invariant_factors()[j];
    let members: Vec<usize> = (0..span.len()).filter(|&i| span[i]).collect();
    for (h, g) in elems.iter().enumerate() {
        if orders[h] != nj {
            continue;
        }
        // ⟨g⟩ must meet the current span trivially
        let mut mult = g.clone();
        let mut trivial = true;
        for _ in 1..nj {
            if span[group.index_of(&mult)] {
                trivial = false;
                break;
            }
            mult = group.add(&mult, g);
        }
        if !trivial {
            continue;
        }
        let mut next = span.clone();
        let mut mult = g.clone();
        for _ in 1..nj {
            for &m in &members {
                let s = group.add(&elems[m], &mult);
                next[group.index_of(&s)] = true;
            }
            mult = group.add(&mult, g);
        }
        chosen.push(h);
        extend_images(group, elems, orders, chosen, &mut next, out)?;
        chosen.pop();
    }
    Ok(())
}

/// Canonical representative of the `Aut(G)`-orbit of `subset`, as a sorted
/// element list. Fails with `CapExceeded` when `Aut(G)` cannot be materialized;
/// callers then fall back to [`identity_canonical`].
pub fn automorphism_orbit_canonical(
    group: &GroupSpec,
    subset: &[GElement],
    cap: u64,
) -> Result<Vec<GElement>> {
    let aut = Automorphisms::new(group, cap)?;
    let idx: Vec<usize> = subset.iter().map(|g| group.index_of(g)).collect();
    Ok(aut
        .canonical_indices(&idx)
        .into_iter()
        .map(|i| group.element_at(i))
        .collect())
}

/// The subset itself, sorted and deduplicated.
pub fn identity_canonical(subset: &[GElement]) -> Vec<GElement> {
    let mut v = subset.to_vec();
    v.sort();
    v.dedup();
    v
}
