//! Dense exact linear algebra over Q, just enough for re-expressing vectors
//! in a given basis.

use num_traits::Zero;

use crate::poly::Coeff;

/// Solves `A x = b` for `A` given column-wise. Returns `None` when `b` is
/// outside the column span; free variables are set to zero.
pub(crate) fn solve_columns(columns: &[Vec<Coeff>], rhs: &[Coeff]) -> Option<Vec<Coeff>> {
    let rows = rhs.len();
    let cols = columns.len();
    // augmented row-major matrix
    let mut m: Vec<Vec<Coeff>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Coeff> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let d = &m[r][j] * &f;
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Coeff::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}
