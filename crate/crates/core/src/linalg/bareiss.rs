//! Fraction-free (Bareiss) Gauss–Jordan inversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::RatMatrix;
use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BareissInverse {
    pub inverse: RatMatrix,
    pub determinant: Rat,
}

/// Exact inverse of a square rational matrix, or `None` if it is singular.
///
/// The matrix is first scaled to an integer matrix by the lcm of its
/// denominators; every intermediate entry of the elimination is then a
/// minor of the scaled augmented matrix, so all divisions are exact.
pub fn bareiss_inverse(m: &RatMatrix) -> Result<Option<BareissInverse>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("cannot invert a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Some(BareissInverse {
            inverse: RatMatrix::zeros(0, 0),
            determinant: Rat::one(),
        }));
    }
    let scale = (0..n)
        .flat_map(|i| m.row(i).iter())
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));

    let width = 2 * n;
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigInt> = m.row(i).iter().map(|q| q.numer() * (&scale / q.denom())).collect();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();

    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&p| !a[p][k].is_zero()) else {
            return Ok(None);
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let pivot_row = a[k].clone();
        let pivot = pivot_row[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..width {
                if j == k {
                    continue;
                }
                let updated = &pivot * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = updated.div_rem(&prev);
                debug_assert!(rem.is_zero(), "non-exact Bareiss division");
                row[j] = q;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot;
    }

    // Each a[i][i] now equals det(scaled) up to the row-swap sign.
    let det_scaled = if negate { -prev.clone() } else { prev.clone() };
    let mut inverse = RatMatrix::zeros(n, n);
    for i in 0..n {
        let d = &a[i][i];
        for j in 0..n {
            // (scale·A)^{-1} = adj/det, so A^{-1} = scale·adj/det.
            inverse[(i, j)] = Rat::new(&a[i][n + j] * &scale, d.clone());
        }
    }
    let scale_pow = num_traits::pow(Rat::from_integer(scale), n);
    let determinant = Rat::from_integer(det_scaled) / scale_pow;
    Ok(Some(BareissInverse { inverse, determinant }))
}

/// Rank by plain rational row reduction (small matrices only).
pub(crate) fn rank(m: &RatMatrix) -> usize {
    let mut a: Vec<Vec<Rat>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&p| !a[p][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot_row[c];
            for j in c..cols {
                let t = &f * &pivot_row[j];
                row[j] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}
