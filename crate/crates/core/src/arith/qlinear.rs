//! Exact linear algebra over Q.

use num_traits::{One, Zero};

use super::Rational;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..ncols {
                    let t = &f * &rows[r][k];
                    rows[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// A basis of `{x : A x = 0}` for the matrix with the given rows and `ncols` columns.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn nullspace_of_small_matrix() {
        let a = vec![vec![rat(1), rat(2), rat(3)], vec![rat(2), rat(4), rat(6)], vec![rat(1), rat(0), rat(1)]];
        assert_eq!(rank(&a), 2);
        let n = nullspace(&a, 3);
        assert_eq!(n.len(), 1);
        for row in &a {
            let dot: Rational = row.iter().zip(&n[0]).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
    }
}
