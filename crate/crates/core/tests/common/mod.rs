//! Brute-force oracles shared by the integration tests. Deliberately naive:
//! no pruning, no memoization, nothing borrowed from the library's algorithms
//! beyond element arithmetic.

#![allow(dead_code)]

use std::collections::BTreeSet;

use zslab::{GElement, GroupSpec};

/// Every group of order 2..=9 up to isomorphism.
pub fn small_groups() -> Vec<GroupSpec> {
    [
        "C2", "C3", "C4", "C2^2", "C5", "C6", "C7", "C8", "C2xC4", "C2^3", "C9", "C3^2",
    ]
    .iter()
    .map(|s| GroupSpec::parse(s).unwrap())
    .collect()
}

/// All nonempty subsets of `G ∖ {0}`.
pub fn all_subsets(g: &GroupSpec) -> Vec<Vec<GElement>> {
    let nz = g.nonzero_elements().unwrap();
    (1u32..1 << nz.len())
        .map(|m| {
            (0..nz.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| nz[i].clone())
                .collect()
        })
        .collect()
}

fn sum_of(g: &GroupSpec, subset: &[GElement], counts: &[u32]) -> GElement {
    let mut s = g.zero();
    for (x, &k) in subset.iter().zip(counts) {
        for _ in 0..k {
            s = g.add(&s, x);
        }
    }
    s
}

/// Calls `f` on every vector `v ≤ bound` (componentwise), including 0.
pub fn for_each_below(bound: &[u32], mut f: impl FnMut(&[u32])) {
    let mut v = vec![0u32; bound.len()];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == v.len() {
                return;
            }
            if v[i] < bound[i] {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// Number of zero-sum sub-multisets, including the empty one and the whole.
pub fn zero_sum_divisors(g: &GroupSpec, subset: &[GElement], counts: &[u32]) -> usize {
    let mut n = 0;
    for_each_below(counts, |v| {
        if sum_of(g, subset, v).is_zero() {
            n += 1;
        }
    });
    n
}

/// Calls `f` on every vector `v ≤ bound` with `Σ v ≤ cap`, including 0.
pub fn for_each_below_len(bound: &[u32], cap: u32, f: &mut dyn FnMut(&[u32])) {
    fn rec(bound: &[u32], i: usize, left: u32, v: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if i == bound.len() {
            f(v);
            return;
        }
        for k in 0..=bound[i].min(left) {
            v[i] = k;
            rec(bound, i + 1, left - k, v, f);
        }
        v[i] = 0;
    }
    let mut v = vec![0u32; bound.len()];
    rec(bound, 0, cap, &mut v, f);
}

/// Atoms over `subset` (exponent vectors in `subset` order): zero-sum multisets
/// whose only zero-sum sub-multisets are empty and whole. Multiplicities are
/// at most the element order and lengths at most `|G|`.
pub fn brute_atoms(g: &GroupSpec, subset: &[GElement]) -> BTreeSet<Vec<u32>> {
    let bound: Vec<u32> = subset.iter().map(|x| g.element_order(x) as u32).collect();
    let mut out = BTreeSet::new();
    for_each_below_len(&bound, g.order() as u32, &mut |v| {
        if v.iter().all(|&k| k == 0) || !sum_of(g, subset, v).is_zero() {
            return;
        }
        if zero_sum_divisors(g, subset, v) == 2 {
            out.insert(v.to_vec());
        }
    });
    out
}

/// All factorization lengths of `b` into the given atoms, by trying every
/// multiplicity vector.
pub fn brute_lengths(atoms: &[Vec<u32>], b: &[u32]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut rest = b.to_vec();
    fn rec(atoms: &[Vec<u32>], j: usize, rest: &mut Vec<u32>, used: u64, out: &mut BTreeSet<u64>) {
        if j == atoms.len() {
            if rest.iter().all(|&r| r == 0) {
                out.insert(used);
            }
            return;
        }
        rec(atoms, j + 1, rest, used, out);
        let a = &atoms[j];
        let mut k = 0;
        while a.iter().zip(rest.iter()).all(|(x, r)| x <= r) {
            for (r, x) in rest.iter_mut().zip(a) {
                *r -= x;
            }
            k += 1;
            rec(atoms, j + 1, rest, used + k, out);
        }
        for (r, x) in rest.iter_mut().zip(a) {
            *r += x * k as u32;
        }
    }
    rec(atoms, 0, &mut rest, 0, &mut out);
    out
}

/// All subset sums of a multiset, by enumerating every sub-multiset.
pub fn brute_subsums(g: &GroupSpec, elems: &[GElement]) -> BTreeSet<GElement> {
    let mut out = BTreeSet::new();
    for m in 1u64..1 << elems.len() {
        let mut s = g.zero();
        for (i, x) in elems.iter().enumerate() {
            if m >> i & 1 == 1 {
                s = g.add(&s, x);
            }
        }
        out.insert(s);
    }
    out
}

/// `Aut(G)` as index permutations, by testing every bijection of `G` that
/// fixes 0 for additivity. Only for `|G| ≤ 9`.
pub fn brute_automorphisms(g: &GroupSpec) -> Vec<Vec<usize>> {
    let elems = g.elements().unwrap();
    let n = elems.len();
    assert!(n <= 9);
    let add: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| g.index_of(&g.add(a, b))).collect())
        .collect();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 1, &mut |p| {
        if (0..n).all(|a| (0..n).all(|b| p[add[a][b]] == add[p[a]][p[b]])) {
            out.push(p.to_vec());
        }
    });
    out
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Number of orbits of nonempty subsets of `G ∖ {0}` under the given permutations.
pub fn brute_orbit_count(g: &GroupSpec, perms: &[Vec<usize>]) -> usize {
    let n = g.order() as usize;
    let mut keys = BTreeSet::new();
    for m in 1u32..1 << (n - 1) {
        let set: Vec<usize> = (0..n - 1)
            .filter(|i| m >> i & 1 == 1)
            .map(|i| i + 1)
            .collect();
        let key = perms
            .iter()
            .map(|p| {
                let mut img: Vec<usize> = set.iter().map(|&i| p[i]).collect();
                img.sort();
                img
            })
            .min()
            .unwrap();
        keys.insert(key);
    }
    keys.len()
}

pub fn gcd_all(xs: impl IntoIterator<Item = u64>) -> u64 {
    xs.into_iter().fold(0, num_gcd)
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}
