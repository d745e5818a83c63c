//! Exact rational linear algebra.
//!
//! Two independent solve routes are kept on purpose: the realization path
//! uses fraction-free Bareiss elimination over big integers, the brute-force
//! oracle uses plain rational Gaussian elimination. Both handle inconsistent
//! and underdetermined systems explicitly.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::system::Rat;

/// Outcome of solving `A x = b` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rat>),
    Inconsistent,
    Underdetermined,
}

/// Fraction-free elimination: rows are scaled to integers, reduced by the
/// Bareiss one-step rule (every division is exact), and the echelon system
/// is back-substituted in rationals.
pub fn solve_fraction_free(rows: &[Vec<Rat>], rhs: &[Rat]) -> Solution {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for (row, b) in rows.iter().zip(rhs) {
        assert_eq!(row.len(), n);
        a.push(scale_row_to_integers(row, b));
    }

    // Echelon reduction with column skipping.
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            for j in 0..=n {
                if j == c {
                    continue;
                }
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num_integer::Integer::div_rem(&num, &prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }

    for row in a.iter().skip(r) {
        if !row[n].is_zero() {
            return Solution::Inconsistent;
        }
    }
    if pivot_cols.len() < n {
        return Solution::Underdetermined;
    }

    // Back substitution in rationals.
    let mut x = vec![Rat::zero(); n];
    for (k, &c) in pivot_cols.iter().enumerate().rev() {
        let mut acc = Rat::from(a[k][n].clone());
        for j in c + 1..n {
            acc -= Rat::from(a[k][j].clone()) * &x[j];
        }
        x[c] = acc / Rat::from(a[k][c].clone());
    }
    Solution::Unique(x)
}

/// Plain rational Gaussian elimination with back substitution.
pub fn solve_gauss(rows: &[Vec<Rat>], rhs: &[Rat]) -> Solution {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            assert_eq!(row.len(), n);
            let mut v = row.clone();
            v.push(b.clone());
            v
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in r + 1..m {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] / &pivot;
            for j in c..=n {
                let delta = &factor * &a[r][j];
                a[i][j] -= delta;
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }

    for row in a.iter().skip(r) {
        if !row[n].is_zero() {
            return Solution::Inconsistent;
        }
    }
    if pivot_cols.len() < n {
        return Solution::Underdetermined;
    }

    let mut x = vec![Rat::zero(); n];
    for (k, &c) in pivot_cols.iter().enumerate().rev() {
        let mut acc = a[k][n].clone();
        for j in c + 1..n {
            acc -= &a[k][j] * &x[j];
        }
        x[c] = acc / &a[k][c];
    }
    Solution::Unique(x)
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let n = rows[0].len();
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in r + 1..m {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] / &pivot;
            for j in c..n {
                let delta = &factor * &a[r][j];
                a[i][j] -= delta;
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Basis of the nullspace of `A x = 0`, one vector per free column.
pub fn nullspace(rows: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .map(|row| {
            assert_eq!(row.len(), n);
            row.clone()
        })
        .collect();
    let m = a.len();
    // Reduced row echelon form.
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for j in 0..n {
            a[r][j] = &a[r][j] / &pivot;
        }
        for i in 0..m {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in 0..n {
                    let delta = &factor * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Rat::zero(); n];
        v[free] = Rat::one();
        for (k, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[k][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Dimension of the affine span of a set of points (rank of differences).
/// A single point has dimension 0; the empty set reports `None`.
pub fn affine_span_dim(points: &[Vec<Rat>]) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(&diffs))
}

/// Clear denominators of a row (including the right-hand side) by the LCM.
fn scale_row_to_integers(row: &[Rat], rhs: &Rat) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in row.iter().chain(std::iter::once(rhs)) {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let mut out: Vec<BigInt> = Vec::with_capacity(row.len() + 1);
    for x in row.iter().chain(std::iter::once(rhs)) {
        out.push(x.numer() * (&lcm / x.denom()));
    }
    debug_assert!(lcm.is_positive());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> Rat {
        Rat::from(BigInt::from(n))
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn solves_vertex_system_of_three_chain() {
        // p2 - p1 = 81, p3 - p1 = 729, p1 + p2 + p3 = 0.
        let rows = vec![
            vec![r(-1), r(1), r(0)],
            vec![r(-1), r(0), r(1)],
            vec![r(1), r(1), r(1)],
        ];
        let rhs = vec![r(81), r(729), r(0)];
        let expect = Solution::Unique(vec![r(-270), r(-189), r(459)]);
        assert_eq!(solve_fraction_free(&rows, &rhs), expect);
        assert_eq!(solve_gauss(&rows, &rhs), expect);
    }

    #[test]
    fn detects_inconsistency_and_underdetermination() {
        let rows = vec![vec![r(1), r(1)], vec![r(2), r(2)]];
        assert_eq!(
            solve_fraction_free(&rows, &[r(1), r(3)]),
            Solution::Inconsistent
        );
        assert_eq!(
            solve_fraction_free(&rows, &[r(1), r(2)]),
            Solution::Underdetermined
        );
        assert_eq!(solve_gauss(&rows, &[r(1), r(3)]), Solution::Inconsistent);
        assert_eq!(solve_gauss(&rows, &[r(1), r(2)]), Solution::Underdetermined);
    }

    #[test]
    fn rational_coefficients() {
        let rows = vec![vec![rq(1, 2), rq(1, 3)], vec![rq(1, 5), rq(-1, 7)]];
        let rhs = vec![rq(13, 6), rq(-18, 35)];
        // x = 1, y = 5 by construction.
        let expect = Solution::Unique(vec![r(1), r(5)]);
        assert_eq!(solve_fraction_free(&rows, &rhs), expect);
        assert_eq!(solve_gauss(&rows, &rhs), expect);
    }

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![
            vec![r(1), r(2), r(3)],
            vec![r(2), r(4), r(6)],
            vec![r(1), r(0), r(1)],
        ];
        assert_eq!(rank(&rows), 2);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        // Each basis vector really is in the kernel.
        for v in &ns {
            for row in &rows {
                let dot: Rat = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn affine_span() {
        let pts = vec![vec![r(0), r(0)], vec![r(1), r(0)], vec![r(2), r(0)]];
        assert_eq!(affine_span_dim(&pts), Some(1));
        assert_eq!(affine_span_dim(&pts[..1]), Some(0));
        assert_eq!(affine_span_dim(&[]), None);
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        // The two elimination routes must agree on arbitrary small systems.
        proptest! {
            #[test]
            fn routes_agree(entries in proptest::collection::vec(-9i64..=9, 20)) {
                let rows: Vec<Vec<Rat>> = (0..4)
                    .map(|i| (0..4).map(|j| r(entries[i * 4 + j])).collect())
                    .collect();
                let rhs: Vec<Rat> = (16..20).map(|k| r(entries[k])).collect();
                prop_assert_eq!(
                    solve_fraction_free(&rows, &rhs),
                    solve_gauss(&rows, &rhs)
                );
            }
        }
    }
}
