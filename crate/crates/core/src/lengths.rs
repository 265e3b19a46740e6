//! Sets of lengths in `B(G₀)` and the invariants derived from them.
//!
//! * `L(B)` by memoized recursion over the remaining multiset. Every
//!   factorization of `B` contains an atom through the smallest element of
//!   `B`, so only those atoms are tried at each step and the memo key is the
//!   remaining multiset alone.
//! * `min Δ(G₀)` without any search horizon: two factorizations of one `B`
//!   differ by a vector in the integer kernel of the atom-exponent matrix `M`
//!   whose coordinate sum is the length difference, and every kernel vector
//!   `x = x⁺ − x⁻` is such a pair. Coordinate sum is linear, so the gcd over a
//!   kernel basis is the gcd over the whole kernel, which is `gcd Δ(G₀) = min Δ(G₀)`.
//! * `ρ(G₀)` as the exact optimum of `max 1·y s.t. Mx = My, 1·x = 1, x, y ≥ 0`.
//!   Rational feasible points scale to pairs of factorizations of one `B`, and
//!   the elasticity is accepted, so the optimum is attained.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};
use serde_json::json;

use crate::atoms::AtomSet;
use crate::error::{Error, Result};
use crate::group::GElement;
use crate::lattice;
use crate::rational::{self, Rational};
use crate::seq::Sequence;
use crate::simplex::{self, LpOutcome};
use crate::table::Cayley;

pub const DEFAULT_LENGTH_BUDGET: u64 = 20_000_000;

/// A finite, nonempty, sorted set of factorization lengths.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthSet(Vec<u64>);

impl LengthSet {
    pub fn new(lengths: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<u64> = lengths.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Domain("a set of lengths is never empty".into()));
        }
        Ok(LengthSet(set.into_iter().collect()))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn min(&self) -> u64 {
        self.0[0]
    }

    pub fn max(&self) -> u64 {
        *self.0.last().expect("nonempty")
    }

    pub fn contains(&self, k: u64) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Successive distances `Δ(L)`.
    pub fn deltas(&self) -> BTreeSet<u64> {
        self.0.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `ρ(L) = max L / min L`, with `ρ({0}) = 1`.
    pub fn elasticity(&self) -> Rational {
        if self.min() == 0 {
            return Rational::from_integer(1);
        }
        Rational::new(self.max() as i64, self.min() as i64)
    }

    /// `{k + l : l ∈ L}`.
    pub fn shifted(&self, k: u64) -> LengthSet {
        LengthSet(self.0.iter().map(|l| l + k).collect())
    }
}

impl fmt::Display for LengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for LengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LengthSet{self}")
    }
}

impl Serialize for LengthSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for l in &self.0 {
            seq.serialize_element(l)?;
        }
        seq.end()
    }
}

/// Memoized `L(·)` over exponent vectors relative to one atom set.
pub struct LengthEngine<'a> {
    atoms: &'a AtomSet,
    /// atoms whose support contains subset position `p`
    through: Vec<Vec<usize>>,
    memo: HashMap<Vec<u32>, Vec<u64>>,
    budget: u64,
    steps: u64,
}

impl<'a> LengthEngine<'a> {
    pub fn new(atoms: &'a AtomSet, budget: u64) -> Self {
        let n = atoms.subset().len();
        let mut through = vec![Vec::new(); n];
        for (j, e) in atoms.exponents().iter().enumerate() {
            for (p, &k) in e.iter().enumerate() {
                if k > 0 {
                    through[p].push(j);
                }
            }
        }
        LengthEngine {
            atoms,
            through,
            memo: HashMap::new(),
            budget,
            steps: 0,
        }
    }

    /// `L(B)` for an exponent vector over the subset.
    pub fn lengths_of(&mut self, b: &[u32]) -> Result<Vec<u64>> {
        let Some(p) = b.iter().position(|&k| k > 0) else {
            return Ok(vec![0]);
        };
        if let Some(hit) = self.memo.get(b) {
            return Ok(hit.clone());
        }
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::budget("length-set computation", self.budget));
        }
        let mut acc: BTreeSet<u64> = BTreeSet::new();
        let mut rest = b.to_vec();
        for idx in 0..self.through[p].len() {
            let j = self.through[p][idx];
            let a = &self.atoms.exponents()[j];
            if a.iter().zip(b).any(|(x, y)| x > y) {
                continue;
            }
            for (r, x) in rest.iter_mut().zip(a) {
                *r -= x;
            }
            let sub = self.lengths_of(&rest)?;
            acc.extend(sub.iter().map(|l| l + 1));
            rest.copy_from_slice(b);
        }
        let out: Vec<u64> = acc.into_iter().collect();
        self.memo.insert(b.to_vec(), out.clone());
        Ok(out)
    }

    pub fn length_set(&mut self, b: &[u32]) -> Result<LengthSet> {
        let v = self.lengths_of(b)?;
        if v.is_empty() {
            return Err(Error::Precondition("sequence has no factorization".into()));
        }
        Ok(LengthSet(v))
    }
}

/// `L(B)` for a zero-sum sequence `B` with `supp(B) ⊆ G₀`.
pub fn length_set(b: &Sequence, atoms: &AtomSet) -> Result<LengthSet> {
    length_set_with_budget(b, atoms, DEFAULT_LENGTH_BUDGET)
}

pub fn length_set_with_budget(b: &Sequence, atoms: &AtomSet, budget: u64) -> Result<LengthSet> {
    if !b.is_zero_sum() {
        return Err(Error::Precondition(format!("σ({b}) ≠ 0")));
    }
    let v = atoms
        .exponent_vector(b)
        .ok_or_else(|| Error::Precondition(format!("supp({b}) is not contained in G₀")))?;
    LengthEngine::new(atoms, budget).length_set(&v)
}

/// The atom-exponent matrix of `G₀` with an integer basis of its kernel.
#[derive(Clone, Debug)]
pub struct RelationMatrix {
    subset: Vec<GElement>,
    columns: Vec<Vec<u32>>,
    kernel_basis: Vec<Vec<BigInt>>,
    rank: usize,
}

impl RelationMatrix {
    pub fn new(atoms: &AtomSet) -> Self {
        let columns = atoms.exponents().to_vec();
        let rows = rows_of(atoms.subset().len(), &columns);
        let kernel_basis = lattice::integer_kernel(&rows, columns.len());
        let rank = columns.len() - kernel_basis.len();
        RelationMatrix {
            subset: atoms.subset().to_vec(),
            columns,
            kernel_basis,
            rank,
        }
    }

    /// `M` by rows: one row per element of `G₀`, one column per atom.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        rows_of(self.subset.len(), &self.columns)
    }

    pub fn kernel_basis(&self) -> &[Vec<BigInt>] {
        &self.kernel_basis
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `gcd |Σ x|` over the kernel basis; 0 iff the kernel has no vector of
    /// nonzero coordinate sum.
    pub fn min_delta(&self) -> u64 {
        lattice::gcd_of_sums(&self.kernel_basis)
            .to_u64()
            .expect("min Δ is bounded by the largest atom")
    }

    /// Every basis vector lies in the kernel and the basis has `n − rank(M)`
    /// vectors, with the rank recomputed by independent elimination.
    pub fn verify(&self) -> bool {
        let rows = self.rows();
        self.kernel_basis
            .iter()
            .all(|v| lattice::mat_vec(&rows, v).iter().all(Zero::is_zero))
            && self.kernel_basis.len() == self.columns.len() - lattice::rank(&rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let big = |x: &BigInt| match x.to_i64() {
            Some(v) => json!(v),
            None => json!(x.to_string()),
        };
        json!({
            "subset": self.subset.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "columns": self.columns,
            "rank": self.rank,
            "kernel_basis": self.kernel_basis.iter()
                .map(|v| v.iter().map(big).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "min_delta": self.min_delta(),
        })
    }
}

fn rows_of(m: usize, columns: &[Vec<u32>]) -> Vec<Vec<i64>> {
    (0..m)
        .map(|i| columns.iter().map(|c| c[i] as i64).collect())
        .collect()
}

/// `min Δ(G₀)`, with the convention `min ∅ = 0`.
pub fn min_delta(atoms: &AtomSet) -> u64 {
    let rows = rows_of(atoms.subset().len(), atoms.exponents());
    lattice::kernel_sum_gcd(&rows, atoms.len())
        .to_u64()
        .expect("min Δ is bounded by the largest atom")
}

/// Rank of the atom-exponent matrix over `Q`.
pub fn relation_rank(atoms: &AtomSet) -> usize {
    lattice::rank(&rows_of(atoms.subset().len(), atoms.exponents()))
}

/// Every atom has cross number exactly 1.
pub fn is_half_factorial(atoms: &AtomSet) -> bool {
    let one = Rational::from_integer(1);
    atoms.atoms().iter().all(|a| a.cross_number() == one)
}

/// Every atom has cross number at least 1.
pub fn is_lcn(atoms: &AtomSet) -> bool {
    atoms.min_cross() >= Rational::from_integer(1)
}

/// Exact `ρ(G₀)` together with an integral optimal pair of factorizations.
#[derive(Clone, Debug, PartialEq)]
pub struct Elasticity {
    pub value: Rational,
    /// atom multiplicities of the short factorization (`1·x = min`)
    pub short: Vec<u64>,
    /// atom multiplicities of the long factorization
    pub long: Vec<u64>,
}

impl Elasticity {
    /// `(|short|, |long|)`: two factorization lengths of the witness.
    pub fn factorization_lengths(&self) -> (u64, u64) {
        (self.short.iter().sum(), self.long.iter().sum())
    }

    /// Both factorizations multiply out to the same sequence and their
    /// lengths have ratio `value`. Since no `ρ(L(B))` exceeds `ρ(G₀)`, this
    /// shows `ρ(L(B)) = ρ(G₀)` without computing `L(B)`.
    pub fn is_accepted(&self, atoms: &AtomSet) -> bool {
        let product = |mult: &[u64]| {
            let mut e = vec![0u64; atoms.subset().len()];
            for (j, &k) in mult.iter().enumerate() {
                for (p, &v) in atoms.exponents()[j].iter().enumerate() {
                    e[p] += k * v as u64;
                }
            }
            e
        };
        let (s, l) = self.factorization_lengths();
        s > 0
            && product(&self.short) == product(&self.long)
            && Rational::new(l as i64, s as i64) == self.value
    }

    /// The zero-sum sequence `B = ∏ A_j^{x_j}` factored both ways by the witness.
    pub fn witness_sequence(&self, atoms: &AtomSet) -> Result<Sequence> {
        let n = atoms.subset().len();
        let mut e = vec![0u64; n];
        for (j, &k) in self.short.iter().enumerate() {
            for (p, &v) in atoms.exponents()[j].iter().enumerate() {
                e[p] += k * v as u64;
            }
        }
        let counts = atoms
            .subset()
            .iter()
            .cloned()
            .zip(e.into_iter().map(|v| v as u32));
        Sequence::from_counts(atoms.group(), counts)
    }
}

/// Column-generation batch: how many priced-out atoms join the working set per round.
const PRICING_BATCH: usize = 64;

/// `ρ(G₀) = max{1·y : Σ x_j A_j = Σ y_j A_j, 1·x = 1, x, y ≥ 0}`, solved exactly.
///
/// The program has two columns per atom but only `|G₀| + 1` rows. A basis
/// guessed in floating point is accepted only after its vertex and duals are
/// recomputed exactly and pass both feasibility checks. Otherwise the program
/// is solved over a working set of atoms that grows by pricing: an atom enters
/// when the current dual prices make its `x` or `y` column improving. When no
/// atom prices out, the restricted optimum is optimal for the full program.
pub fn elasticity(atoms: &AtomSet) -> Result<Elasticity> {
    let n = atoms.len();
    if n == 0 {
        return Err(Error::Precondition("empty atom set".into()));
    }
    if let Some(e) = symmetric_witness(atoms) {
        return Ok(e);
    }
    if let Some(vertex) = float_basis(atoms).and_then(|basis| certify_basis(atoms, &basis)) {
        let all: Vec<usize> = (0..n).collect();
        return finish(atoms, &all, vertex);
    }
    column_generation(atoms)
}

/// The exact program over a working set of atoms grown by pricing.
fn column_generation(atoms: &AtomSet) -> Result<Elasticity> {
    let n = atoms.len();
    let exps = atoms.exponents();
    let mut in_set = vec![false; n];
    let mut cols: Vec<usize> = Vec::new();
    // seed: short atoms and the longest ones
    let mut by_len: Vec<usize> = (0..n).collect();
    by_len.sort_by_key(|&j| std::cmp::Reverse(exps[j].iter().map(|&k| k as u64).sum::<u64>()));
    for &j in by_len.iter().take(8) {
        in_set[j] = true;
        cols.push(j);
    }
    for (j, e) in exps.iter().enumerate() {
        if !in_set[j] && e.iter().map(|&k| k as u64).sum::<u64>() <= 2 {
            in_set[j] = true;
            cols.push(j);
        }
    }
    loop {
        cols.sort_unstable();
        let vertex = solve_restricted(atoms, &cols)?;
        let (prices, norm) = vertex.duals.split_at(atoms.subset().len());
        let one = BigRational::one();
        let mut entering: Vec<(BigRational, usize)> = Vec::new();
        for (j, e) in exps.iter().enumerate() {
            if in_set[j] {
                continue;
            }
            let s = e
                .iter()
                .zip(prices)
                .filter(|(&k, _)| k > 0)
                .fold(BigRational::zero(), |acc, (&k, p)| {
                    acc + p * BigInt::from(k)
                });
            let rc_x = &s + &norm[0];
            let rc_y = -&s - &one;
            let worst = if rc_x < rc_y { rc_x } else { rc_y };
            if worst.is_negative() {
                entering.push((worst, j));
            }
        }
        if entering.is_empty() {
            return finish(atoms, &cols, vertex);
        }
        entering.sort();
        for &(_, j) in entering.iter().take(PRICING_BATCH) {
            in_set[j] = true;
            cols.push(j);
        }
    }
}

/// `ρ(G₀) ≤ D(G₀)/2` always (every atom other than `0` has length ≥ 2). If a
/// longest atom `A` has `−supp(A) ⊆ G₀`, then `A·(−A)` is also a product of
/// `|A|` atoms `g(−g)`, so the bound is attained.
fn symmetric_witness(atoms: &AtomSet) -> Option<Elasticity> {
    let group = atoms.group();
    let subset = atoms.subset();
    let d = atoms.davenport();
    if d < 2 {
        return None;
    }
    let neg_pos: Vec<Option<usize>> = subset
        .iter()
        .map(|g| atoms.subset_index(&group.neg(g)))
        .collect();
    let index: HashMap<&[u32], usize> = atoms
        .exponents()
        .iter()
        .enumerate()
        .map(|(j, e)| (e.as_slice(), j))
        .collect();
    let m = subset.len();
    for (j, a) in atoms.exponents().iter().enumerate() {
        if a.iter().map(|&k| k as u64).sum::<u64>() != d {
            continue;
        }
        if a.iter().zip(&neg_pos).any(|(&k, p)| k > 0 && p.is_none()) {
            continue;
        }
        let mut neg_a = vec![0u32; m];
        for (p, &k) in a.iter().enumerate() {
            if k > 0 {
                neg_a[neg_pos[p].expect("checked")] += k;
            }
        }
        let jn = *index.get(neg_a.as_slice())?;
        let mut short = vec![0u64; atoms.len()];
        short[j] += 1;
        short[jn] += 1;
        // pair up g with −g in A·(−A)
        let mut b: Vec<u64> = a
            .iter()
            .zip(&neg_a)
            .map(|(&x, &y)| (x + y) as u64)
            .collect();
        let mut long = vec![0u64; atoms.len()];
        for p in 0..m {
            if b[p] == 0 {
                continue;
            }
            let q = neg_pos[p].expect("every element of A·(−A) has its negative");
            let mut pair = vec![0u32; m];
            let count = if q == p {
                pair[p] = 2;
                b[p] / 2
            } else {
                pair[p] = 1;
                pair[q] = 1;
                b[p].min(b[q])
            };
            if count == 0 {
                continue;
            }
            let jp = *index.get(pair.as_slice())?;
            long[jp] += count;
            b[p] -= count * if q == p { 2 } else { 1 };
            if q != p {
                b[q] -= count;
            }
        }
        debug_assert!(b.iter().all(|&v| v == 0));
        return Some(Elasticity {
            value: Rational::new(d as i64, 2),
            short,
            long,
        });
    }
    None
}

/// Optimal basis of the full program guessed in floating point. Columns
/// `0..n` are the `x_j`, `n..2n` the `y_j`.
fn float_basis(atoms: &AtomSet) -> Option<Vec<usize>> {
    let n = atoms.len();
    let m = atoms.subset().len();
    let mut a = vec![vec![0.0; 2 * n]; m + 1];
    for (j, e) in atoms.exponents().iter().enumerate() {
        for (p, &k) in e.iter().enumerate() {
            a[p][j] = k as f64;
            a[p][n + j] = -(k as f64);
        }
        a[m][j] = 1.0;
    }
    let mut b = vec![0.0; m + 1];
    b[m] = 1.0;
    let c: Vec<f64> = (0..2 * n).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    simplex::float_basis(&a, &b, &c)
}

/// Exact vertex and duals of `basis`, provided it is primal and dual
/// feasible, i.e. an optimality certificate for the full program.
fn certify_basis(atoms: &AtomSet, basis: &[usize]) -> Option<simplex::Vertex> {
    let n = atoms.len();
    let m = atoms.subset().len();
    let exps = atoms.exponents();
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let column = |k: usize| -> Vec<BigRational> {
        let (j, sign, norm) = if k < n { (k, 1, 1) } else { (k - n, -1, 0) };
        let mut col: Vec<BigRational> = exps[j].iter().map(|&e| int(sign * e as i64)).collect();
        col.push(int(norm));
        col
    };
    let cols: Vec<Vec<BigRational>> = basis.iter().map(|&k| column(k)).collect();
    // B x_B = e_norm
    let rows: Vec<Vec<BigRational>> = (0..=m)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut rhs = vec![BigRational::zero(); m + 1];
    rhs[m] = BigRational::one();
    let xb = solve_square(rows, rhs)?;
    if xb.iter().any(|v| v.is_negative()) {
        return None;
    }
    // Bᵀ π = c_B
    let cb: Vec<BigRational> = basis.iter().map(|&k| int((k >= n) as i64)).collect();
    let pi = solve_square(cols, cb)?;
    let (prices, norm) = pi.split_at(m);
    let one = BigRational::one();
    for e in exps {
        let s = e
            .iter()
            .zip(prices)
            .filter(|(&k, _)| k > 0)
            .fold(BigRational::zero(), |acc, (&k, p)| {
                acc + p * BigInt::from(k)
            });
        if (&s + &norm[0]).is_negative() || (-&s - &one).is_negative() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); 2 * n];
    let mut value = BigRational::zero();
    for (&k, v) in basis.iter().zip(xb) {
        if k >= n {
            value += &v;
        }
        x[k] = v;
    }
    Some(simplex::Vertex {
        value,
        x,
        duals: pi,
    })
}

/// Solves a square system by Gaussian elimination; `None` if singular.
fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = a[c][c].recip();
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for k in c..n {
                let d = &f * &a[c][k];
                a[r][k] -= d;
            }
            let d = &f * &b[c];
            b[r] -= d;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn solve_restricted(atoms: &AtomSet, cols: &[usize]) -> Result<simplex::Vertex> {
    let n = cols.len();
    let m = atoms.subset().len();
    let zero = BigRational::zero;
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    // variables: x_1..x_n, y_1..y_n over the working set
    let mut a = Vec::with_capacity(m + 1);
    for p in 0..m {
        let mut row = vec![zero(); 2 * n];
        for (c, &j) in cols.iter().enumerate() {
            let e = atoms.exponents()[j][p];
            if e > 0 {
                row[c] = int(e as i64);
                row[n + c] = int(-(e as i64));
            }
        }
        a.push(row);
    }
    let mut norm = vec![zero(); 2 * n];
    for v in norm.iter_mut().take(n) {
        *v = BigRational::one();
    }
    a.push(norm);
    let mut b = vec![zero(); m];
    b.push(BigRational::one());
    let mut c = vec![zero(); 2 * n];
    for v in c.iter_mut().skip(n) {
        *v = BigRational::one();
    }
    match simplex::maximize(&a, &b, &c) {
        LpOutcome::Optimal(v) => Ok(v),
        other => Err(Error::Domain(format!(
            "elasticity program should be feasible and bounded, got {other:?}"
        ))),
    }
}

/// Maps the restricted vertex back to all atoms and scales it to integers.
fn finish(atoms: &AtomSet, cols: &[usize], restricted: simplex::Vertex) -> Result<Elasticity> {
    let n = atoms.len();
    let k = cols.len();
    let mut x = vec![BigRational::zero(); 2 * n];
    for (c, &j) in cols.iter().enumerate() {
        x[j] = restricted.x[c].clone();
        x[n + j] = restricted.x[k + c].clone();
    }
    let vertex = simplex::Vertex {
        value: restricted.value,
        x,
        duals: restricted.duals,
    };
    // scale the vertex to the smallest integral pair
    let den = vertex.x.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let scaled: Vec<BigInt> = vertex
        .x
        .iter()
        .map(|q| (q * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    let to_u64 = |v: &BigInt| {
        (v / &g)
            .abs()
            .to_u64()
            .ok_or_else(|| Error::Domain("elasticity witness too large".into()))
    };
    let short = scaled[..n].iter().map(to_u64).collect::<Result<Vec<_>>>()?;
    let long = scaled[n..].iter().map(to_u64).collect::<Result<Vec<_>>>()?;
    Ok(Elasticity {
        value: rational::from_big(&vertex.value)?,
        short,
        long,
    })
}

/// Union of `Δ(L(B))` over all zero-sum `B` over `G₀` with `|B| ≤ max_len`.
///
/// Always a subset of `Δ(G₀)`. The zero element is skipped since it shifts
/// every length of `B` by the same amount.
pub fn delta_bounded(atoms: &AtomSet, max_len: u64) -> Result<BTreeSet<u64>> {
    delta_bounded_with_budget(atoms, max_len, DEFAULT_LENGTH_BUDGET)
}

pub fn delta_bounded_with_budget(
    atoms: &AtomSet,
    max_len: u64,
    budget: u64,
) -> Result<BTreeSet<u64>> {
    let mut engine = LengthEngine::new(atoms, budget);
    let mut out = BTreeSet::new();
    for_each_zero_sum(atoms, max_len, budget, |b| {
        let l = engine.length_set(b)?;
        out.extend(l.deltas());
        Ok(())
    })?;
    Ok(out)
}

/// Calls `f` on the exponent vector of every nonempty zero-sum sequence over
/// the nonzero part of `G₀` of length at most `max_len`.
pub fn for_each_zero_sum(
    atoms: &AtomSet,
    max_len: u64,
    budget: u64,
    mut f: impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    let group = atoms.group();
    let table = Cayley::new(group)?;
    let positions: Vec<usize> = (0..atoms.subset().len())
        .filter(|&p| !atoms.subset()[p].is_zero())
        .collect();
    let idx: Vec<usize> = atoms.subset().iter().map(|g| table.index(g)).collect();
    let mut b = vec![0u32; atoms.subset().len()];
    let mut nodes = 0u64;

    struct Walk<'t> {
        table: &'t Cayley,
        positions: &'t [usize],
        idx: &'t [usize],
        max_len: u64,
        budget: u64,
    }
    fn rec(
        w: &Walk<'_>,
        k: usize,
        len: u64,
        sum: usize,
        b: &mut Vec<u32>,
        nodes: &mut u64,
        f: &mut dyn FnMut(&[u32]) -> Result<()>,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > w.budget {
            return Err(Error::budget("zero-sum sequence enumeration", w.budget));
        }
        if k == w.positions.len() {
            if sum == 0 && len > 0 {
                f(b)?;
            }
            return Ok(());
        }
        let p = w.positions[k];
        let g = w.idx[p];
        let mut s = sum;
        let mut c = 0u32;
        loop {
            b[p] = c;
            rec(w, k + 1, len + c as u64, s, b, nodes, f)?;
            if len + c as u64 >= w.max_len {
                break;
            }
            c += 1;
            s = w.table.add(s, g);
        }
        b[p] = 0;
        Ok(())
    }
    let walk = Walk {
        table: &table,
        positions: &positions,
        idx: &idx,
        max_len,
        budget,
    };
    rec(&walk, 0, 0, 0, &mut b, &mut nodes, &mut f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{enumerate_atoms, EnumConfig};
    use crate::group::GroupSpec;

    fn setup(group: &str, subset: &[&[i64]]) -> (GroupSpec, AtomSet) {
        let g = GroupSpec::parse(group).unwrap();
        let s: Vec<_> = subset.iter().map(|c| g.element(c).unwrap()).collect();
        let a = enumerate_atoms(&g, &s, &EnumConfig::default()).unwrap();
        (g, a)
    }

    #[test]
    fn certified_float_basis_agrees_with_column_generation() {
        for (name, step) in [("C8", 1), ("C3^2", 1), ("C2xC4", 1), ("C2xC6", 7)] {
            let g = GroupSpec::parse(name).unwrap();
            let nz = g.nonzero_elements().unwrap();
            for mask in (1u32..1 << nz.len()).step_by(step) {
                let s: Vec<_> = (0..nz.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| nz[i].clone())
                    .collect();
                let a = enumerate_atoms(&g, &s, &EnumConfig::default()).unwrap();
                let fast = elasticity(&a).unwrap();
                assert_eq!(
                    fast.value,
                    column_generation(&a).unwrap().value,
                    "{name} {mask:b}"
                );
                assert!(fast.is_accepted(&a), "{name} {mask:b}");
            }
        }
    }

    fn full(group: &str) -> (GroupSpec, AtomSet) {
        let g = GroupSpec::parse(group).unwrap();
        let a =
            enumerate_atoms(&g, &g.nonzero_elements().unwrap(), &EnumConfig::default()).unwrap();
        (g, a)
    }

    #[test]
    fn length_set_examples() {
        let (g, a) = full("C2^2");
        for atom in a.atoms() {
            assert_eq!(length_set(atom, &a).unwrap().as_slice(), &[1]);
        }
        let xyz = Sequence::parse(&g, "(0,1) (1,0) (1,1)").unwrap();
        assert_eq!(length_set(&xyz.pow(2), &a).unwrap().as_slice(), &[2, 3]);

        let (g, a) = full("C3^2");
        let atom = Sequence::parse(&g, "(1,1) (1,0)^2 (0,1)^2").unwrap();
        let l = length_set(&atom.pow(3), &a).unwrap();
        assert!(l.contains(3) && l.contains(5));
    }

    #[test]
    fn length_set_preconditions() {
        let (g, a) = setup("C3", &[&[1]]);
        let bad = Sequence::parse(&g, "(1)^2").unwrap();
        assert!(matches!(length_set(&bad, &a), Err(Error::Precondition(_))));
        let outside = Sequence::parse(&g, "(1) (2)").unwrap();
        assert!(matches!(
            length_set(&outside, &a),
            Err(Error::Precondition(_))
        ));
        assert_eq!(
            length_set(&Sequence::empty(&g), &a).unwrap().as_slice(),
            &[0]
        );
    }

    #[test]
    fn length_set_conventions() {
        let l = LengthSet::new([0]).unwrap();
        assert_eq!(l.elasticity(), Rational::from_integer(1));
        assert!(l.deltas().is_empty());
        let l = LengthSet::new([4, 2, 3]).unwrap();
        assert_eq!(l.elasticity(), Rational::from_integer(2));
        assert_eq!(serde_json::to_string(&l).unwrap(), "[2,3,4]");
        assert!(LengthSet::new([]).is_err());
    }

    #[test]
    fn min_delta_configurations() {
        // {e1 + e2, e1, e2} in C3^2
        let (_, a) = setup("C3^2", &[&[1, 1], &[1, 0], &[0, 1]]);
        assert_eq!(min_delta(&a), 1);
        // {-(e1 + e2), e1, e2} in C5^2
        let (_, a) = setup("C5^2", &[&[4, 4], &[1, 0], &[0, 1]]);
        assert_eq!(min_delta(&a), 2);
    }

    #[test]
    fn relation_matrix_verifies() {
        let (_, a) = full("C3^2");
        let m = RelationMatrix::new(&a);
        assert!(m.verify());
        assert_eq!(m.rank(), 8);
        assert_eq!(m.min_delta(), 1);
        let j = m.to_json();
        assert_eq!(j["min_delta"], 1);
    }

    #[test]
    fn half_factorial_and_lcn() {
        let (_, a) = full("C3");
        assert!(!is_half_factorial(&a));
        assert_eq!(min_delta(&a), 1);
        let (_, a) = setup("C7", &[&[3]]);
        assert!(is_half_factorial(&a));
        assert!(is_lcn(&a));
        assert_eq!(min_delta(&a), 0);
        let (_, a) = setup("C3^2", &[&[1, 0], &[0, 1]]);
        assert!(is_half_factorial(&a));
        let (_, a) = setup("C3^2", &[&[1, 1], &[1, 0], &[0, 1]]);
        assert!(is_lcn(&a));
        let (_, a) = setup("C5^2", &[&[4, 4], &[1, 0], &[0, 1]]);
        assert!(!is_lcn(&a));
    }

    #[test]
    fn elasticity_examples() {
        let (_, a) = full("C3");
        let e = elasticity(&a).unwrap();
        assert_eq!(e.value, Rational::new(3, 2));
        let (_, a) = full("C3^2");
        assert_eq!(elasticity(&a).unwrap().value, Rational::new(5, 2));
        let (_, a) = setup("C5", &[&[2]]);
        assert_eq!(elasticity(&a).unwrap().value, Rational::from_integer(1));
    }

    #[test]
    fn elasticity_witness_is_accepted() {
        for name in ["C3", "C4", "C2^2", "C5"] {
            let (_, a) = full(name);
            let e = elasticity(&a).unwrap();
            let b = e.witness_sequence(&a).unwrap();
            let l = length_set(&b, &a).unwrap();
            assert_eq!(l.elasticity(), e.value, "{name}");
            assert!(e.is_accepted(&a));
        }
    }

    #[test]
    fn delta_bounded_examples() {
        let (_, a) = full("C5");
        assert!(delta_bounded(&a, 15).unwrap().contains(&3));
        let (_, a) = full("C4");
        assert_eq!(delta_bounded(&a, 12).unwrap(), BTreeSet::from([1, 2]));
        let (_, a) = setup("C7", &[&[3]]);
        assert!(delta_bounded(&a, 21).unwrap().is_empty());
    }
}
