//! Natural cubic-spline interpolation on a strictly increasing abscissa.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    y2: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::Domain("spline needs >= 3 matching points".into()));
        }
        if !x.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Domain("spline abscissa must increase".into()));
        }
        let n = x.len();
        let mut y2 = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            let p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            y2[i] = y2[i] * y2[i + 1] + u[i];
        }
        Ok(CubicSpline { x, y, y2 })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    /// Interpolated value; linear extrapolation beyond the ends.
    pub fn eval(&self, xv: f64) -> f64 {
        let n = self.x.len();
        if xv <= self.x[0] {
            let slope = (self.y[1] - self.y[0]) / (self.x[1] - self.x[0]);
            return self.y[0] + slope * (xv - self.x[0]);
        }
        if xv >= self.x[n - 1] {
            let slope = (self.y[n - 1] - self.y[n - 2]) / (self.x[n - 1] - self.x[n - 2]);
            return self.y[n - 1] + slope * (xv - self.x[n - 1]);
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] > xv {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let h = self.x[hi] - self.x[lo];
        let a = (self.x[hi] - xv) / h;
        let b = (xv - self.x[lo]) / h;
        a * self.y[lo]
            + b * self.y[hi]
            + ((a * a * a - a) * self.y2[lo] + (b * b * b - b) * self.y2[hi]) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_smooth_function() {
        let x: Vec<f64> = (0..200).map(|i| -3.0 + 6.0 * i as f64 / 199.0).collect();
        let y: Vec<f64> = x.iter().map(|&v| (v as f64).sin() * (-0.3 * v).exp()).collect();
        let sp = CubicSpline::new(x, y).unwrap();
        for i in 0..50 {
            let v = -2.9 + 5.8 * (i as f64 + 0.37) / 50.0;
            let exact = v.sin() * (-0.3 * v).exp();
            assert_relative_eq!(sp.eval(v), exact, epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CubicSpline::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 0.5], vec![1.0, 2.0, 3.0]).is_err());
    }
}
