//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c·x subject to A x = b, x ≥ 0`. Bland's rule (smallest
//! improving column enters, ties in the ratio test broken by smallest basic
//! variable) guarantees termination on the heavily degenerate programs that
//! come out of factorization relations.
//!
//! The tableau first runs on `i128` fractions with checked arithmetic, which
//! covers almost every program met in practice; on overflow it restarts on
//! big rationals.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub value: BigRational,
    pub x: Vec<BigRational>,
    /// optimal dual prices `y` with `y·A_j ≥ c_j` for every column
    pub duals: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(Vertex),
    Infeasible,
    Unbounded,
}

/// Exact field operations that may refuse (overflow).
trait Field: Clone + PartialOrd + Zero + One + Signed {
    fn add_(&self, o: &Self) -> Option<Self>;
    fn sub_(&self, o: &Self) -> Option<Self>;
    fn mul_(&self, o: &Self) -> Option<Self>;
    fn div_(&self, o: &Self) -> Option<Self>;
    fn from_big(v: &BigRational) -> Option<Self>;
    fn to_big(&self) -> BigRational;
}

type Small = Ratio<i128>;

impl Field for Small {
    fn add_(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub_(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div_(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn from_big(v: &BigRational) -> Option<Self> {
        let n: i128 = v.numer().try_into().ok()?;
        let d: i128 = v.denom().try_into().ok()?;
        Some(Ratio::new(n, d))
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn add_(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub_(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul_(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn from_big(v: &BigRational) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

/// Overflow marker.
struct Overflow;

struct Tableau<T> {
    /// `rows[i]` has one entry per column plus the right-hand side last
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<T: Field> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Overflow> {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.div_(&p).ok_or(Overflow)?;
            }
        }
        let pr = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, w) in row.iter_mut().zip(pr.iter()) {
                if !w.is_zero() {
                    *v = v.sub_(&f.mul_(w).ok_or(Overflow)?).ok_or(Overflow)?;
                }
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Runs simplex iterations for objective `cost` restricted to columns
    /// with `allowed[j]`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[T], allowed: &[bool]) -> Result<bool, Overflow> {
        let mut basic = vec![false; self.ncols];
        loop {
            basic.iter_mut().for_each(|b| *b = false);
            for &j in &self.basis {
                basic[j] = true;
            }
            // reduced cost of column j: c_B B^{-1} A_j - c_j; improving if negative
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || basic[j] {
                    continue;
                }
                let mut z = -cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        z = z.add_(&cb.mul_(&row[j]).ok_or(Overflow)?).ok_or(Overflow)?;
                    }
                }
                if z.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Ok(true) };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i).div_(a).ok_or(Overflow)?;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, c)?;
        }
    }

    fn objective(&self, cost: &[T]) -> Result<T, Overflow> {
        let mut acc = T::zero();
        for (i, &j) in self.basis.iter().enumerate() {
            if !cost[j].is_zero() {
                acc = acc
                    .add_(&cost[j].mul_(self.rhs(i)).ok_or(Overflow)?)
                    .ok_or(Overflow)?;
            }
        }
        Ok(acc)
    }
}

/// `maximize c·x` s.t. `A x = b`, `x ≥ 0`, with `A` given by rows.
pub fn maximize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOutcome {
    match solve::<Small>(a, b, c) {
        Ok(out) => out,
        Err(Overflow) => match solve::<BigRational>(a, b, c) {
            Ok(out) => out,
            Err(Overflow) => unreachable!("big rationals never overflow"),
        },
    }
}

fn solve<T: Field>(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    c: &[BigRational],
) -> Result<LpOutcome, Overflow> {
    let conv = |v: &BigRational| T::from_big(v).ok_or(Overflow);
    let m = a.len();
    let n = c.len();
    let ncols = n + m;
    let flips: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let mut row = Vec::with_capacity(ncols + 1);
        for v in ai {
            let t = conv(v)?;
            row.push(if flips[i] { -t } else { t });
        }
        row.resize(ncols, T::zero());
        row[n + i] = T::one();
        let rhs = conv(bi)?;
        row.push(if flips[i] { -rhs } else { rhs });
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols,
    };

    // phase 1: maximize minus the sum of artificials
    let mut cost1 = vec![T::zero(); ncols];
    for v in cost1.iter_mut().skip(n) {
        *v = -T::one();
    }
    let all = vec![true; ncols];
    t.optimize(&cost1, &all)?;
    if !t.objective(&cost1)?.is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    // drive artificials out of the basis; rows where that is impossible are redundant
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j)?;
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut cost2 = c.iter().map(conv).collect::<Result<Vec<T>, _>>()?;
    cost2.resize(ncols, T::zero());
    let mut allowed = vec![true; ncols];
    for v in allowed.iter_mut().skip(n) {
        *v = false;
    }
    if !t.optimize(&cost2, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.rhs(i).to_big();
        }
    }
    // the artificial block of the tableau holds B⁻¹, so c_B B⁻¹ sits there too
    let mut duals = Vec::with_capacity(m);
    for k in 0..m {
        let mut p = T::zero();
        for (i, &j) in t.basis.iter().enumerate() {
            if !cost2[j].is_zero() && !t.rows[i][n + k].is_zero() {
                p = p
                    .add_(&cost2[j].mul_(&t.rows[i][n + k]).ok_or(Overflow)?)
                    .ok_or(Overflow)?;
            }
        }
        duals.push(if flips[k] { -p.to_big() } else { p.to_big() });
    }
    Ok(LpOutcome::Optimal(Vertex {
        value: t.objective(&cost2)?.to_big(),
        x,
        duals,
    }))
}

/// A candidate optimal basis for `maximize c·x, A x = b, x ≥ 0` found in
/// floating point, as one column index per row. Nothing about the result is
/// trusted: callers re-derive the vertex and its duals exactly and check both
/// feasibilities before using it. `None` when the float run is inconclusive
/// (infeasible, unbounded, redundant rows or too many pivots).
pub fn float_basis(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<Vec<usize>> {
    const EPS: f64 = 1e-9;
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, &bi))| {
            let sign = if bi < 0.0 { -1.0 } else { 1.0 };
            let mut r: Vec<f64> = row.iter().map(|v| v * sign).collect();
            r.resize(width, 0.0);
            r[n + i] = 1.0;
            r[width - 1] = bi * sign;
            r
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, r: usize, j: usize| {
        let p = t[r][j];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        let row = t[r].clone();
        for (i, ti) in t.iter_mut().enumerate() {
            let f = ti[j];
            if i != r && f != 0.0 {
                for (x, y) in ti.iter_mut().zip(&row) {
                    *x -= f * y;
                }
            }
        }
        basis[r] = j;
    };

    // largest reduced cost first, Bland's rule once pivots stop making progress
    let run = |t: &mut Vec<Vec<f64>>,
               basis: &mut Vec<usize>,
               cost: &dyn Fn(usize) -> f64,
               cols: usize|
     -> Option<()> {
        let mut stalled = 0usize;
        for _ in 0..50_000 {
            let bland = stalled > 50;
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..cols {
                let d = cost(j)
                    - basis
                        .iter()
                        .zip(t.iter())
                        .map(|(&k, r)| cost(k) * r[j])
                        .sum::<f64>();
                if d > EPS && enter.map_or(true, |(_, best)| !bland && d > best) {
                    enter = Some((j, d));
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _)) = enter else { return Some(()) };
            let mut leave: Option<(usize, f64)> = None;
            for (i, r) in t.iter().enumerate() {
                if r[j] > EPS {
                    let ratio = r[width - 1] / r[j];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (r, ratio) = leave?;
            stalled = if ratio.abs() <= EPS { stalled + 1 } else { 0 };
            pivot(t, basis, r, j);
        }
        None
    };

    let phase1 = |j: usize| if j >= n { -1.0 } else { 0.0 };
    run(&mut t, &mut basis, &phase1, n + m)?;
    if t.iter().any(|r| r[width - 1] < -EPS) {
        return None;
    }
    let infeasibility: f64 = basis
        .iter()
        .zip(&t)
        .filter(|(&k, _)| k >= n)
        .map(|(_, r)| r[width - 1])
        .sum();
    if infeasibility > EPS {
        return None;
    }
    for r in 0..m {
        if basis[r] >= n {
            let j = (0..n).find(|&j| t[r][j].abs() > EPS)?;
            pivot(&mut t, &mut basis, r, j);
        }
    }
    run(&mut t, &mut basis, &|j: usize| c[j], n)?;
    Some(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn small_program() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![ints(&[1, 2, 1, 0]), ints(&[3, 1, 0, 1])];
        let b = ints(&[4, 6]);
        let c = ints(&[1, 1, 0, 0]);
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal(v) => {
                assert_eq!(v.value, q(14, 5));
                assert_eq!(v.x[0], q(8, 5));
                assert_eq!(v.x[1], q(6, 5));
                // strong duality
                assert_eq!(&v.duals[0] * q(4, 1) + &v.duals[1] * q(6, 1), q(14, 5));
                assert_eq!(v.duals, vec![q(2, 5), q(1, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0
        assert_eq!(
            maximize(&[ints(&[1, 1])], &ints(&[-1]), &ints(&[0, 0])),
            LpOutcome::Infeasible
        );
        // x - y = 0, maximize x
        assert_eq!(
            maximize(&[ints(&[1, -1])], &ints(&[0]), &ints(&[1, 0])),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn redundant_rows() {
        // x + y = 1 twice
        let a = vec![ints(&[1, 1]), ints(&[1, 1])];
        match maximize(&a, &ints(&[1, 1]), &ints(&[2, 1])) {
            LpOutcome::Optimal(v) => assert_eq!(v.value, q(2, 1)),
            other => panic!("{other:?}"),
        }
    }
}
