use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[-alpha, alpha]` with `n` intervals (`n + 1` nodes).
///
/// Only `alpha` and `n` are stored; the spacing is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    alpha: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidHalfWidth { alpha });
        }
        if !n.is_multiple_of(2) {
            return Err(Error::OddN { n });
        }
        if n < 8 {
            return Err(Error::TooCoarse { n });
        }
        Ok(Self { alpha, n })
    }

    /// Grid with spacing as close as possible to `h` (rounded to an even count).
    pub fn with_spacing(alpha: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        let half = (alpha / h).round().max(4.0) as usize;
        Self::new(alpha, 2 * half)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        2.0 * self.alpha / self.n as f64
    }

    /// Index of the node at `xi = 0`.
    pub fn mid(&self) -> usize {
        self.n / 2
    }

    /// Node position. Endpoints and the midpoint are exact.
    pub fn xi(&self, i: usize) -> f64 {
        let m = self.mid() as f64;
        self.alpha * ((i as f64 - m) / m)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.xi(i)).collect()
    }
}

/// Free-function form of [`Grid1D::new`].
pub fn make_grid(alpha: f64, n: usize) -> Result<Grid1D> {
    Grid1D::new(alpha, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_midpoint() {
        let g = make_grid(10.0, 2000).unwrap();
        assert!((g.h() - 0.01).abs() < 1e-15);
        assert_eq!(g.mid(), 1000);
        assert_eq!(g.xi(1000), 0.0);
        assert_eq!(g.xi(0), -10.0);
        assert_eq!(g.xi(2000), 10.0);

        let g = make_grid(30.0, 6000).unwrap();
        assert!((g.h() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_counts() {
        assert_eq!(make_grid(5.0, 7), Err(Error::OddN { n: 7 }));
        assert_eq!(make_grid(5.0, 6), Err(Error::TooCoarse { n: 6 }));
        assert!(matches!(
            make_grid(0.0, 10),
            Err(Error::InvalidHalfWidth { .. })
        ));
    }

    #[test]
    fn uniform_increments() {
        let g = make_grid(40.0, 8000).unwrap();
        let h = g.h();
        for i in 0..g.n() {
            let d = g.xi(i + 1) - g.xi(i);
            assert!(
                (d - h).abs() <= 8.0 * f64::EPSILON * g.alpha(),
                "i={i} d={d}"
            );
        }
    }

    #[test]
    fn with_spacing_rounds_to_even() {
        let g = Grid1D::with_spacing(20.0, 0.01).unwrap();
        assert_eq!(g.n(), 4000);
        let g = Grid1D::with_spacing(1.0, 0.3).unwrap();
        assert_eq!(g.n() % 2, 0);
        assert!(g.n() >= 8);
    }
}
