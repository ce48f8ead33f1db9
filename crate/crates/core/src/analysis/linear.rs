//! Exact Gaussian elimination for unconstrained (signed) solutions.

use num::Zero;

use crate::rational::Rational;

/// Solves `A x = b` over the rationals. Free variables are set to zero, so
/// the result is the particular solution read off the reduced row echelon
/// form. `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = Rational::from_integer(1.into()) / &rows[rank][col];
        rows[rank].iter_mut().for_each(|v| {
            if !v.is_zero() {
                *v *= &inv;
            }
        });
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (j, pv) in pivot_row.iter().enumerate().skip(col) {
                if !pv.is_zero() {
                    row[j] -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }

    if rows[rank..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn particular_solution_with_free_variable() {
        let a = vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(1)]];
        let b = vec![int(1), int(2)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![int(-1), int(2), int(0)]);
    }

    #[test]
    fn inconsistent() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(solve(&a, &[int(1), int(3)]).is_none());
        assert_eq!(solve(&a, &[ratio(1, 2), int(1)]).unwrap(), vec![ratio(1, 2), int(0)]);
    }
}
