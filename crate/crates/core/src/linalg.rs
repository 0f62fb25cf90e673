//! Fraction-free (Bareiss) elimination for overdetermined rational systems.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::qseries::Rational;

/// Outcome of solving `A x = b` where `A` has more rows than columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solve {
    /// Full column rank; `x` solves the pivot rows. Callers verify the
    /// remaining rows themselves.
    Unique(Vec<Rational>),
    /// Column rank `rank` below the number of unknowns.
    RankDeficient { rank: usize },
}

fn integral_row(row: &[Rational]) -> Vec<BigInt> {
    let den = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    row.iter().map(|c| c.numer() * (&den / c.denom())).collect()
}

/// Rank of the column set, computed fraction-free.
pub fn rank(columns: &[Vec<Rational>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    let matrix: Vec<Vec<Rational>> = (0..rows)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect();
    let (_, rank, _) = bareiss(matrix, columns.len());
    rank
}

/// Solve `sum_j x_j columns[j] = rhs` on the pivot rows.
pub fn solve(columns: &[Vec<Rational>], rhs: &[Rational]) -> Solve {
    let unknowns = columns.len();
    let rows = rhs.len();
    let matrix: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let (m, rank, pivots) = bareiss(matrix, unknowns);
    if rank < unknowns {
        return Solve::RankDeficient { rank };
    }
    // Back substitution on the upper-triangular pivot block.
    let mut x = vec_zero(unknowns);
    for r in (0..unknowns).rev() {
        let col = pivots[r];
        let mut acc = Rational::from_integer(m[r][unknowns].clone());
        for c in col + 1..unknowns {
            if !m[r][c].is_zero() {
                acc -= Rational::from_integer(m[r][c].clone()) * &x[c];
            }
        }
        x[col] = acc / Rational::from_integer(m[r][col].clone());
    }
    Solve::Unique(x)
}

fn vec_zero(n: usize) -> Vec<Rational> {
    (0..n).map(|_| Rational::zero()).collect()
}

/// Row-echelon form by Bareiss elimination on the first `pivot_cols`
/// columns. Returns the integer matrix, its rank and the pivot column of
/// each pivot row.
fn bareiss(matrix: Vec<Vec<Rational>>, pivot_cols: usize) -> (Vec<Vec<BigInt>>, usize, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = matrix.iter().map(|r| integral_row(r)).collect();
    let rows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..width {
                let v = &pivot_row[col] * &row[j] - &factor * &pivot_row[j];
                // Exact by Sylvester's identity.
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    (m, r, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{int, rat};
    use alloc::vec;

    #[test]
    fn solves_overdetermined_consistent_system() {
        // x = 2, y = -1/3 on four equations.
        let c1 = vec![int(1), int(0), int(1), int(2)];
        let c2 = vec![int(0), int(3), int(3), int(6)];
        let rhs = vec![int(2), int(-1), int(1), int(2)];
        assert_eq!(solve(&[c1, c2], &rhs), Solve::Unique(vec![int(2), rat(-1, 3)]));
    }

    #[test]
    fn detects_rank_deficiency() {
        let c1 = vec![int(1), int(2), int(3)];
        let c2 = vec![int(2), int(4), int(6)];
        assert_eq!(rank(&[c1.clone(), c2.clone()]), 1);
        assert_eq!(
            solve(&[c1, c2], &[int(1), int(2), int(3)]),
            Solve::RankDeficient { rank: 1 }
        );
    }

    #[test]
    fn rational_entries_and_skipped_columns() {
        let c1 = vec![rat(1, 2), int(0), int(0)];
        let c2 = vec![int(0), int(0), rat(5, 7)];
        let c3 = vec![rat(1, 3), int(1), int(1)];
        assert_eq!(rank(&[c1.clone(), c2.clone(), c3.clone()]), 3);
        let rhs = vec![rat(1, 2) + rat(1, 3), int(1), rat(5, 7) + int(1)];
        assert_eq!(solve(&[c1, c2, c3], &rhs), Solve::Unique(vec![int(1), int(1), int(1)]));
    }
}
