//! Monotone piecewise-cubic interpolation (Fritsch-Carlson).

use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant whose slopes are limited so that
/// monotone data yield a monotone curve.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant from strictly increasing `xs`. When `slopes` is
    /// given it is used as the initial slope estimate before limiting.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::InvalidArgument(
                "interpolation needs >= 2 matching samples".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "interpolation abscissae must increase".into(),
            ));
        }
        let secant: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut ds = match slopes {
            Some(s) if s.len() == n => s,
            Some(_) => return Err(Error::InvalidArgument("slope count mismatch".into())),
            None => {
                let mut d = vec![0.0; n];
                d[0] = secant[0];
                d[n - 1] = secant[n - 2];
                for i in 1..n - 1 {
                    d[i] = if secant[i - 1] * secant[i] <= 0.0 {
                        0.0
                    } else {
                        0.5 * (secant[i - 1] + secant[i])
                    };
                }
                d
            }
        };
        for i in 0..n - 1 {
            let m = secant[i];
            if m == 0.0 {
                ds[i] = 0.0;
                ds[i + 1] = 0.0;
                continue;
            }
            // slopes must share the sign of the secant
            if ds[i] * m < 0.0 {
                ds[i] = 0.0;
            }
            if ds[i + 1] * m < 0.0 {
                ds[i + 1] = 0.0;
            }
            let (al, be) = (ds[i] / m, ds[i + 1] / m);
            let r = al * al + be * be;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                ds[i] = tau * al * m;
                ds[i + 1] = tau * be * m;
            }
        }
        Ok(Self { xs, ys, ds })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Evaluates the interpolant; outside the data range the end values are held.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.ys[i]
            + (s3 - 2.0 * s2 + s) * h * self.ds[i]
            + (-2.0 * s3 + 3.0 * s2) * self.ys[i + 1]
            + (s3 - s2) * h * self.ds[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_cubic_with_exact_slopes() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -x * x * x - x).collect();
        let ds: Vec<f64> = xs.iter().map(|x| -3.0 * x * x - 1.0).collect();
        let c = MonotoneCubic::new(xs, ys, Some(ds)).unwrap();
        for k in 0..100 {
            let x = k as f64 * 0.01;
            assert!((c.eval(x) + x * x * x + x).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unsorted() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0], None).is_err());
    }

    proptest! {
        #[test]
        fn decreasing_data_give_decreasing_curve(steps in proptest::collection::vec(0.0f64..1.0, 3..30)) {
            let xs: Vec<f64> = (0..=steps.len()).map(|i| i as f64).collect();
            let mut ys = vec![10.0];
            for s in &steps {
                let last = *ys.last().unwrap();
                ys.push(last - s);
            }
            let c = MonotoneCubic::new(xs, ys, None).unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..=(steps.len() * 20) {
                let v = c.eval(k as f64 / 20.0);
                prop_assert!(v <= prev + 1e-12);
                prev = v;
            }
        }
    }
}
