//! Sequences over a finite abelian group: elements of the free abelian
//! monoid `F(G₀)`, stored as multisets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{GElement, GroupSpec};
use crate::rational::Rational;

/// Default cap on `|S|` for subsequence-sum queries.
pub const DEFAULT_SUBSUM_CAP: u64 = 24;

/// A finite multiset of group elements. Zero multiplicities are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    group: GroupSpec,
    mult: BTreeMap<GElement, u32>,
}

impl Sequence {
    pub fn empty(group: &GroupSpec) -> Self {
        Sequence {
            group: group.clone(),
            mult: BTreeMap::new(),
        }
    }

    pub fn from_elements<'a>(
        group: &GroupSpec,
        elems: impl IntoIterator<Item = &'a GElement>,
    ) -> Result<Self> {
        Self::from_counts(group, elems.into_iter().map(|g| (g.clone(), 1)))
    }

    pub fn from_counts(
        group: &GroupSpec,
        counts: impl IntoIterator<Item = (GElement, u32)>,
    ) -> Result<Self> {
        let mut mult = BTreeMap::new();
        for (g, k) in counts {
            if !group.contains(&g) {
                return Err(Error::Domain(format!("{g} is not an element of {group}")));
            }
            if k > 0 {
                *mult.entry(g).or_insert(0) += k;
            }
        }
        Ok(Sequence {
            group: group.clone(),
            mult,
        })
    }

    /// Parses `"(1,0)^2 (0,1) (1,1)"`: element tokens with optional `^mult`.
    /// In cyclic groups bare integers work too: `"1^3 2^3"`.
    pub fn parse(group: &GroupSpec, text: &str) -> Result<Self> {
        let mut counts = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            // a parenthesized coordinate tuple, or a bare integer in a cyclic group
            let end = if rest.starts_with('(') {
                rest.find(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed element in {text:?}")))?
                    + 1
            } else {
                let n = rest
                    .char_indices()
                    .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'))
                    .count();
                if n == 0 {
                    return Err(Error::Parse(format!("expected an element at {rest:?}")));
                }
                n
            };
            let g = group.parse_element(&rest[..end])?;
            rest = rest[end..].trim_start();
            let mut k = 1u32;
            if let Some(after) = rest.strip_prefix('^') {
                let digits: String = after
                    .trim_start()
                    .chars()
                    .take_while(char::is_ascii_digit)
                    .collect();
                k = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad multiplicity in {text:?}")))?;
                rest = after.trim_start()[digits.len()..].trim_start();
            }
            rest = rest.trim_start_matches([',', '*', '·']).trim_start();
            counts.push((g, k));
        }
        Sequence::from_counts(group, counts)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// `|S|`.
    pub fn len(&self) -> u64 {
        self.mult.values().map(|&k| k as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    /// `v_g(S)`.
    pub fn multiplicity(&self, g: &GElement) -> u32 {
        self.mult.get(g).copied().unwrap_or(0)
    }

    pub fn support(&self) -> Vec<GElement> {
        self.mult.keys().cloned().collect()
    }

    /// `(element, multiplicity)` pairs in coordinate-lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&GElement, u32)> {
        self.mult.iter().map(|(g, &k)| (g, k))
    }

    /// `σ(S)`; the empty sequence sums to 0.
    pub fn sigma(&self) -> GElement {
        let g = &self.group;
        self.mult
            .iter()
            .fold(g.zero(), |acc, (h, &k)| g.add(&acc, &g.scale(k as i64, h)))
    }

    /// `k(S) = Σ v_g(S)/ord(g)`.
    pub fn cross_number(&self) -> Rational {
        self.mult
            .iter()
            .map(|(h, &k)| Rational::new(k as i64, self.group.element_order(h) as i64))
            .sum()
    }

    pub fn mul(&self, other: &Sequence) -> Sequence {
        let mut mult = self.mult.clone();
        for (g, &k) in &other.mult {
            *mult.entry(g.clone()).or_insert(0) += k;
        }
        Sequence {
            group: self.group.clone(),
            mult,
        }
    }

    pub fn pow(&self, k: u32) -> Sequence {
        Sequence {
            group: self.group.clone(),
            mult: if k == 0 {
                BTreeMap::new()
            } else {
                self.mult.iter().map(|(g, &v)| (g.clone(), v * k)).collect()
            },
        }
    }

    pub fn divides(&self, other: &Sequence) -> bool {
        self.mult.iter().all(|(g, &k)| other.multiplicity(g) >= k)
    }

    /// `S·T^{-1}`; requires `T | S`.
    pub fn divide(&self, t: &Sequence) -> Result<Sequence> {
        if !t.divides(self) {
            return Err(Error::NotDivisible(format!("{t} does not divide {self}")));
        }
        let mut mult = self.mult.clone();
        for (g, &k) in &t.mult {
            let e = mult.get_mut(g).expect("checked by divides");
            *e -= k;
            if *e == 0 {
                mult.remove(g);
            }
        }
        Ok(Sequence {
            group: self.group.clone(),
            mult,
        })
    }

    fn check_cap(&self, cap: u64) -> Result<()> {
        if self.len() > cap {
            return Err(Error::CapExceeded(format!(
                "|S| = {} exceeds subsequence-sum cap {cap}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Boolean table over the group of the nonempty subsequence sums.
    fn subsum_table(&self) -> Result<Vec<bool>> {
        let g = &self.group;
        let n = g.elements()?.len();
        let mut reach = vec![false; n];
        let mut next = reach.clone();
        for (h, k) in self.iter() {
            for _ in 0..k {
                next.copy_from_slice(&reach);
                for x in 0..n {
                    if reach[x] {
                        next[g.index_of(&g.add(&g.element_at(x), h))] = true;
                    }
                }
                next[g.index_of(h)] = true;
                std::mem::swap(&mut reach, &mut next);
            }
        }
        Ok(reach)
    }

    /// `Σ(S)`, the set of sums of nonempty subsequences, by dynamic programming
    /// over the group. Fails when `|S|` exceeds [`DEFAULT_SUBSUM_CAP`].
    pub fn subsequence_sums(&self) -> Result<BTreeSet<GElement>> {
        self.subsequence_sums_capped(DEFAULT_SUBSUM_CAP)
    }

    pub fn subsequence_sums_capped(&self, cap: u64) -> Result<BTreeSet<GElement>> {
        self.check_cap(cap)?;
        let table = self.subsum_table()?;
        Ok(table
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.group.element_at(i))
            .collect())
    }

    pub fn is_zero_sum(&self) -> bool {
        self.sigma().is_zero()
    }

    /// `0 ∉ Σ(S)`.
    pub fn is_zero_sum_free(&self) -> Result<bool> {
        self.check_cap(DEFAULT_SUBSUM_CAP)?;
        Ok(!self.subsum_table()?[0])
    }

    /// Minimal zero-sum: nonempty, `σ(S) = 0`, and `S·g^{-1}` is zero-sum free
    /// for every `g ∈ supp(S)`.
    pub fn is_minimal_zero_sum(&self) -> Result<bool> {
        self.check_cap(DEFAULT_SUBSUM_CAP)?;
        if self.is_empty() || !self.is_zero_sum() {
            return Ok(false);
        }
        for g in self.mult.keys() {
            let single = Sequence::from_counts(&self.group, [(g.clone(), 1)])?;
            if !self.divide(&single)?.is_zero_sum_free()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Minimality by counting zero-sum sub-multisets: exactly two (the empty
    /// one and `S` itself) for a minimal zero-sum sequence.
    pub fn is_minimal_zero_sum_by_count(&self) -> Result<bool> {
        self.check_cap(DEFAULT_SUBSUM_CAP)?;
        if self.is_empty() || !self.is_zero_sum() {
            return Ok(false);
        }
        let g = &self.group;
        let n = g.elements()?.len();
        let mut count = vec![0u64; n];
        count[0] = 1;
        for (h, k) in self.iter() {
            let mut next = vec![0u64; n];
            for (x, &c) in count.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut y = g.element_at(x);
                for _ in 0..=k {
                    next[g.index_of(&y)] += c;
                    y = g.add(&y, h);
                }
            }
            count = next;
        }
        Ok(count[0] == 2)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mult.is_empty() {
            return f.write_str("1");
        }
        for (i, (g, &k)) in self.mult.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if k == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{k}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence[{}]({self})", self.group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(group: &str, text: &str) -> Sequence {
        let g = GroupSpec::parse(group).unwrap();
        Sequence::parse(&g, text).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(seq("C3", "(1)^2").sigma().to_string(), "(2)");
        assert!(seq("C3^2", "(1,0) (0,1) (1,1)^2").sigma().is_zero());
        assert!(seq("C3", "").sigma().is_zero());
    }

    #[test]
    fn cross_number_examples() {
        assert_eq!(seq("C2", "(1)^2").cross_number(), Rational::from_integer(1));
        // e0 e1^2 e2^2 with e0 = e1 + e2
        assert_eq!(
            seq("C3^2", "(1,1) (1,0)^2 (0,1)^2").cross_number(),
            Rational::new(5, 3)
        );
        assert_eq!(seq("C5", "").cross_number(), Rational::from_integer(0));
        assert_eq!(seq("C4", "(0)^2 (2)").cross_number(), Rational::new(5, 2));
    }

    #[test]
    fn subsequence_sum_examples() {
        let show = |s: &Sequence| -> Vec<String> {
            s.subsequence_sums()
                .unwrap()
                .iter()
                .map(|g| g.to_string())
                .collect()
        };
        assert_eq!(show(&seq("C3", "(1)")), ["(1)"]);
        assert_eq!(show(&seq("C3", "(1)^2")), ["(1)", "(2)"]);
        assert_eq!(show(&seq("C5", "(1) (2)")), ["(1)", "(2)", "(3)"]);
        assert!(show(&seq("C5", "")).is_empty());
    }

    #[test]
    fn subsum_cap() {
        let s = seq("C2", "(1)^25");
        assert!(matches!(s.subsequence_sums(), Err(Error::CapExceeded(_))));
        assert!(s.subsequence_sums_capped(30).is_ok());
    }

    #[test]
    fn minimality_examples() {
        assert!(seq("C3", "(1)^3").is_minimal_zero_sum().unwrap());
        let s = seq("C3", "(1)^3 (2)^3");
        assert!(s.is_zero_sum());
        assert!(!s.is_minimal_zero_sum().unwrap());
        assert!(!s.is_minimal_zero_sum_by_count().unwrap());
        assert!(seq("C2^2", "(0,1) (1,0) (1,1)")
            .is_minimal_zero_sum()
            .unwrap());
        assert!(seq("C4", "(0)").is_minimal_zero_sum().unwrap());
        assert!(!seq("C4", "").is_minimal_zero_sum().unwrap());
    }

    #[test]
    fn divide_examples() {
        let s = seq("C3", "(1)^3");
        assert_eq!(s.divide(&seq("C3", "(1)")).unwrap(), seq("C3", "(1)^2"));
        assert!(s.divide(&s).unwrap().is_empty());
        assert!(matches!(
            seq("C3", "(1)^2").divide(&s),
            Err(Error::NotDivisible(_))
        ));
    }

    #[test]
    fn parse_and_display() {
        let s = seq("C3^2", "(1,0)^2 (0,1) (1,1)");
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_string(), "(0,1) (1,0)^2 (1,1)");
        assert_eq!(seq("C3^2", &s.to_string()), s);
        let g = GroupSpec::parse("C3").unwrap();
        assert!(Sequence::parse(&g, "(1").is_err());
        assert_eq!(Sequence::parse(&g, "1^3 2").unwrap().len(), 4);
        let g2 = GroupSpec::parse("C3^2").unwrap();
        assert!(Sequence::parse(&g2, "1 2").is_err());
        assert!(Sequence::parse(&g, "x").is_err());
    }
}
