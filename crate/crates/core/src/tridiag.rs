//! Tridiagonal solves by the Thomas algorithm.

use crate::error::{Error, Result};

/// LU factors of a tridiagonal matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl TridiagonalLu {
    /// Factors the matrix with subdiagonal `sub[i]` (row `i`, column `i-1`),
    /// diagonal `diag` and superdiagonal `sup[i]` (row `i`, column `i+1`).
    /// `sub[0]` and `sup[n-1]` are ignored.
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        if sub.len() != n || sup.len() != n || n == 0 {
            return Err(Error::InvalidArgument(
                "tridiagonal bands must have equal nonzero length".into(),
            ));
        }
        let mut inv_pivot = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i] * upper[i - 1]
            };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "zero pivot in tridiagonal solve at row {i}"
                )));
            }
            inv_pivot[i] = 1.0 / pivot;
            upper[i] = sup[i] * inv_pivot[i];
        }
        Ok(Self {
            sub: sub.to_vec(),
            inv_pivot,
            upper,
        })
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.inv_pivot.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn solves_diagonally_dominant(
            rows in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..40)
        ) {
            let n = rows.len();
            let sub: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let sup: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let diag: Vec<f64> = rows.iter().map(|r| 3.0 + r.2).collect();
            let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let mut b = vec![0.0; n];
            for i in 0..n {
                b[i] = diag[i] * x[i];
                if i > 0 { b[i] += sub[i] * x[i - 1]; }
                if i + 1 < n { b[i] += sup[i] * x[i + 1]; }
            }
            let lu = TridiagonalLu::factor(&sub, &diag, &sup).unwrap();
            lu.solve_in_place(&mut b);
            for i in 0..n {
                prop_assert!((b[i] - x[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_pivot_is_an_error() {
        assert!(TridiagonalLu::factor(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]).is_err());
    }
}
