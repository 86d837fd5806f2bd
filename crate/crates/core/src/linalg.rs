//! Dense determinants for the handful of tiny matrices the crate needs.

use num_complex::Complex;

use crate::scalar::Real;

/// Determinant of a square complex matrix by Gaussian elimination with partial pivoting.
///
/// `rows[i][j]` is the entry in row `i`, column `j`.
pub fn det_complex<T: Real>(mut rows: Vec<Vec<Complex<T>>>) -> Complex<T> {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let mut det = Complex::new(T::one(), T::zero());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                rows[a][col]
                    .norm()
                    .partial_cmp(&rows[b][col].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if rows[pivot][col].norm() == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let p = rows[col][col];
        det = det * p;
        for r in col + 1..n {
            let f = rows[r][col] / p;
            if f.norm() == T::zero() {
                continue;
            }
            let (top, bottom) = rows.split_at_mut(r);
            for (x, &v) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = *x - f * v;
            }
        }
    }
    det
}

/// Real-matrix convenience wrapper around [`det_complex`].
pub fn det_real<T: Real>(rows: &[Vec<T>]) -> T {
    det_complex(
        rows.iter()
            .map(|r| r.iter().map(|&x| Complex::new(x, T::zero())).collect())
            .collect(),
    )
    .re
}
