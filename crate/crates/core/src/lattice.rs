//! Integer kernels by unimodular column reduction.
//!
//! `A·U = H` is brought to column echelon form with `U` unimodular; the
//! columns of `U` that sit over zero columns of `H` form a basis of the
//! integer kernel of `A`. The reduction runs in `i128` with checked
//! arithmetic and is redone over `BigInt` if anything overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Signed, Zero};

/// Basis of `{x ∈ Z^n : A x = 0}` for an `m × n` matrix given by rows.
pub fn integer_kernel(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<BigInt>> {
    let small: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(basis) = kernel_generic(&small, ncols) {
        return basis
            .into_iter()
            .map(|v| v.into_iter().map(BigInt::from).collect())
            .collect();
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    kernel_generic(&big, ncols).expect("BigInt arithmetic cannot overflow")
}

trait Exact: Clone + Integer + Signed + CheckedMul + CheckedSub {}
impl<T: Clone + Integer + Signed + CheckedMul + CheckedSub> Exact for T {}

fn kernel_generic<T: Exact>(rows: &[Vec<T>], n: usize) -> Option<Vec<Vec<T>>> {
    // columns of A and U stored column-major so column operations are contiguous
    let m = rows.len();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    let mut u: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let mut pivot = 0usize;
    for i in 0..m {
        if pivot == n {
            break;
        }
        loop {
            // smallest nonzero |a[j][i]| among the remaining columns
            let best = (pivot..n)
                .filter(|&j| !a[j][i].is_zero())
                .min_by(|&x, &y| a[x][i].abs().cmp(&a[y][i].abs()));
            let Some(best) = best else { break };
            a.swap(pivot, best);
            u.swap(pivot, best);
            let mut done = true;
            for j in pivot + 1..n {
                if a[j][i].is_zero() {
                    continue;
                }
                let q = a[j][i].div_floor(&a[pivot][i]);
                axpy(&mut a, j, pivot, &q)?;
                axpy(&mut u, j, pivot, &q)?;
                if !a[j][i].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    Some(u.split_off(pivot))
}

/// `gcd |Σ_j x_j|` over all `x` in the integer kernel of `A`, without
/// building a kernel basis: the all-ones row rides along the column
/// reduction of `A`, and its entries over the zero columns are exactly the
/// coordinate sums of a kernel basis.
pub fn kernel_sum_gcd(rows: &[Vec<i64>], ncols: usize) -> BigInt {
    let small: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(g) = sum_gcd_generic(&small, ncols) {
        return BigInt::from(g);
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    sum_gcd_generic(&big, ncols).expect("BigInt arithmetic cannot overflow")
}

fn sum_gcd_generic<T: Exact>(rows: &[Vec<T>], n: usize) -> Option<T> {
    let m = rows.len();
    // column j holds A's column followed by a trailing 1
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut c: Vec<T> = rows.iter().map(|r| r[j].clone()).collect();
            c.push(T::one());
            c
        })
        .collect();
    let mut pivot = 0usize;
    for i in 0..m {
        if pivot == n {
            break;
        }
        loop {
            let best = (pivot..n)
                .filter(|&j| !a[j][i].is_zero())
                .min_by(|&x, &y| a[x][i].abs().cmp(&a[y][i].abs()));
            let Some(best) = best else { break };
            a.swap(pivot, best);
            let mut done = true;
            for j in pivot + 1..n {
                if a[j][i].is_zero() {
                    continue;
                }
                let q = a[j][i].div_floor(&a[pivot][i]);
                axpy(&mut a, j, pivot, &q)?;
                if !a[j][i].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    Some(a[pivot..].iter().fold(T::zero(), |g, c| g.gcd(&c[m])))
}

/// `cols[dst] -= q * cols[src]`, failing on overflow.
fn axpy<T: Exact>(cols: &mut [Vec<T>], dst: usize, src: usize, q: &T) -> Option<()> {
    let (s, d) = if src < dst {
        let (lo, hi) = cols.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = cols.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if y.is_zero() {
            continue;
        }
        let prod = q.checked_mul(y)?;
        *x = x.checked_sub(&prod)?;
    }
    Some(())
}

/// Rank over `Q` by fraction-free elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let piv = a[r][c].clone();
            for k in c..n {
                let v = &a[i][k] * &piv - &a[r][k] * &f;
                a[i][k] = v;
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// `Σ_j x_j`.
pub fn coordinate_sum(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc + x)
}

/// `gcd |Σ_j x_j|` over the given vectors; 0 for an empty list.
pub fn gcd_of_sums(basis: &[Vec<BigInt>]) -> BigInt {
    basis
        .iter()
        .fold(BigInt::zero(), |g, v| g.gcd(&coordinate_sum(v)))
}

pub fn mat_vec(rows: &[Vec<i64>], x: &[BigInt]) -> Vec<BigInt> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(x)
                .fold(BigInt::zero(), |acc, (&a, b)| acc + BigInt::from(a) * b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_kernel(rows: &[Vec<i64>], n: usize) -> Vec<Vec<BigInt>> {
        let k = integer_kernel(rows, n);
        for v in &k {
            assert!(mat_vec(rows, v).iter().all(Zero::is_zero));
        }
        assert_eq!(k.len(), n - rank(rows));
        k
    }

    #[test]
    fn simple_kernels() {
        // x + 2y + 3z = 0
        let k = check_kernel(&[vec![1, 2, 3]], 3);
        assert_eq!(k.len(), 2);
        // identity has trivial kernel
        assert!(check_kernel(&[vec![1, 0], vec![0, 1]], 2).is_empty());
        // C3 atoms 1^3, 2^3, 1·2 as columns: kernel spanned by (1,1,-3)
        let k = check_kernel(&[vec![3, 0, 1], vec![0, 3, 1]], 3);
        assert_eq!(k.len(), 1);
        assert_eq!(gcd_of_sums(&k), BigInt::from(1));
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x - 2y = 0: kernel generated by (1,1), not (2,2)
        let k = check_kernel(&[vec![2, -2]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(
            k[0].iter().map(|x| x.abs()).collect::<Vec<_>>(),
            vec![BigInt::from(1); 2]
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 2], vec![3, 4]]), 2);
        assert_eq!(rank(&[]), 0);
    }
}
