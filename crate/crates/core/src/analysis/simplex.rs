//! Phase-one simplex over exact rationals with Bland's rule.

use num::{Signed, Zero};

use crate::rational::Rational;

/// Finds `x ≥ 0` with `A x = b`, or `None` when the system has no
/// nonnegative solution. `a` is row-major, `m × n`.
pub fn find_nonnegative(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    assert_eq!(m, b.len(), "one right-hand side per row");
    let n = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }

    // Tableau over the original columns plus the right-hand side; the
    // artificial columns are implicit since an artificial that leaves the
    // basis never has to re-enter.
    let rhs = n;
    let mut t: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r: Vec<Rational> = row.clone();
            r.push(bi.clone());
            if bi.is_negative() {
                r.iter_mut().for_each(|v| *v = -v.clone());
            }
            r
        })
        .collect();
    // basis[i] = Some(j) for a structural column, None for row i's artificial
    let mut basis: Vec<Option<usize>> = vec![None; m];
    let mut cost: Vec<Rational> = (0..=n)
        .map(|j| -t.iter().fold(Rational::zero(), |acc, row| acc + &row[j]))
        .collect();

    loop {
        let entering = (0..n).find(|&j| cost[j].is_negative());
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[col];
            let better = match &leave {
                None => true,
                Some((k, best)) => {
                    ratio < *best || (ratio == *best && basis_key(basis[i], i, n) < basis_key(basis[*k], *k, n))
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (pivot_row, _) = leave.expect("phase-one objective is bounded below");
        pivot(&mut t, &mut cost, pivot_row, col);
        basis[pivot_row] = Some(col);
    }

    if !cost[rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, bj) in basis.iter().enumerate() {
        if let Some(j) = bj {
            x[*j] = t[i][rhs].clone();
        }
    }
    Some(x)
}

/// Bland's tie-break index: structural columns first, then artificials.
fn basis_key(basic: Option<usize>, row: usize, n: usize) -> usize {
    basic.unwrap_or(n + row)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], row: usize, col: usize) {
    let p = t[row][col].clone();
    t[row].iter_mut().for_each(|v| {
        if !v.is_zero() {
            *v /= &p;
        }
    });
    let pivot_row = t[row].clone();
    let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    let eliminate = |target: &mut Vec<Rational>| {
        let factor = target[col].clone();
        if factor.is_zero() {
            return;
        }
        for &j in &nonzero {
            let delta = &factor * &pivot_row[j];
            target[j] -= delta;
        }
    };
    for (i, r) in t.iter_mut().enumerate() {
        if i != row {
            eliminate(r);
        }
    }
    let mut c = cost.to_vec();
    eliminate(&mut c);
    cost.clone_from_slice(&c);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn check(a: &[Vec<Rational>], b: &[Rational], x: &[Rational]) {
        assert!(x.iter().all(|v| !v.is_negative()));
        for (row, bi) in a.iter().zip(b) {
            let lhs: Rational = row.iter().zip(x).map(|(p, q)| p * q).sum();
            assert_eq!(&lhs, bi);
        }
    }

    #[test]
    fn feasible_system() {
        let a = mat(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![ratio(1, 2), ratio(3, 4)];
        let x = find_nonnegative(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn infeasible_system() {
        // x + y = 1, x + y = 2
        let a = mat(&[&[1, 1], &[1, 1]]);
        assert!(find_nonnegative(&a, &[int(1), int(2)]).is_none());
        // x - y = -1 with x, y ≥ 0 is feasible; -x - y = 1 is not
        assert!(find_nonnegative(&mat(&[&[1, -1]]), &[int(-1)]).is_some());
        assert!(find_nonnegative(&mat(&[&[-1, -1]]), &[int(1)]).is_none());
    }

    #[test]
    fn redundant_rows() {
        let a = mat(&[&[1, 1, 1], &[1, 1, 1], &[1, 0, 0]]);
        let b = vec![int(1), int(1), ratio(1, 3)];
        let x = find_nonnegative(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn degenerate_cycling_prone_instance() {
        // Beale-style degenerate equality system; Bland's rule must terminate.
        let a = vec![
            vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9), int(1), int(0), int(0)],
            vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3), int(0), int(1), int(0)],
            vec![int(0), int(0), int(1), int(0), int(0), int(0), int(1)],
        ];
        let b = vec![int(0), int(0), int(1)];
        let x = find_nonnegative(&a, &b).unwrap();
        check(&a, &b, &x);
    }
}
