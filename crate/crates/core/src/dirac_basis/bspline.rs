//! Clamped B-spline basis on a breakpoint sequence, with values and first
//! two derivatives by the Cox-de Boor recurrence.

/// B-spline basis of order `k` (polynomial degree k-1) on clamped knots.
#[derive(Debug, Clone)]
pub struct BSplineBasis {
    pub order: usize,
    /// full knot vector, length n_splines + order
    pub knots: Vec<f64>,
    pub n_splines: usize,
}

impl BSplineBasis {
    /// Clamped knot vector over the given strictly increasing breakpoints.
    pub fn new(breakpoints: &[f64], order: usize) -> Self {
        assert!(order >= 3, "order must be at least 3 for second derivatives");
        assert!(breakpoints.len() >= 2);
        assert!(breakpoints.windows(2).all(|w| w[1] > w[0]));
        let mut knots = Vec::with_capacity(breakpoints.len() + 2 * (order - 1));
        for _ in 0..order - 1 {
            knots.push(breakpoints[0]);
        }
        knots.extend_from_slice(breakpoints);
        for _ in 0..order - 1 {
            knots.push(*breakpoints.last().unwrap());
        }
        let n_splines = knots.len() - order;
        BSplineBasis {
            order,
            knots,
            n_splines,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Largest span index i with t_i ≤ x < t_{i+1} (nonempty spans only).
    fn span(&self, x: f64) -> usize {
        let k = self.order;
        let n = self.n_splines;
        if x >= self.knots[n] {
            let mut i = n - 1;
            while self.knots[i] >= self.knots[i + 1] {
                i -= 1;
            }
            return i;
        }
        let mut lo = k - 1;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Values of the degree-q nonzero splines at x for q = 0..=deg, as a
    /// triangular table: row q holds B_{span-q+j, order q+1}(x), j = 0..=q.
    fn value_table(&self, x: f64, span: usize, deg: usize) -> Vec<Vec<f64>> {
        let t = &self.knots;
        let mut rows = Vec::with_capacity(deg + 1);
        let mut n = vec![1.0f64];
        rows.push(n.clone());
        let mut left = vec![0.0f64; deg + 1];
        let mut right = vec![0.0f64; deg + 1];
        for j in 1..=deg {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            let mut saved = 0.0;
            let mut new_n = vec![0.0f64; j + 1];
            for r in 0..j {
                let den = right[r + 1] + left[j - r];
                let temp = if den != 0.0 { n[r] / den } else { 0.0 };
                new_n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            new_n[j] = saved;
            n = new_n;
            rows.push(n.clone());
        }
        rows
    }

    /// Values and first two derivatives of the `order` splines that are
    /// nonzero at x. Returns (first_spline_index, values, d1, d2), each of
    /// length `order`, for splines first..first+order-1.
    pub fn eval_all(&self, x: f64) -> (usize, Vec<f64>, Vec<f64>, Vec<f64>) {
        let k = self.order;
        let p = k - 1;
        let span = self.span(x);
        let first = span - p;
        let rows = self.value_table(x, span, p);
        let t = &self.knots;
        let vals = rows[p].clone();

        // value of the order-(k-1) spline i (zero outside span-p+1..=span)
        let val_km1 = |i: usize| -> f64 {
            let lo = span + 1 - p;
            if i < lo || i > span {
                0.0
            } else {
                rows[p - 1][i - lo]
            }
        };
        let val_km2 = |i: usize| -> f64 {
            let lo = span + 2 - p;
            if i < lo || i > span {
                0.0
            } else {
                rows[p - 2][i - lo]
            }
        };
        let ratio = |num: f64, den: f64| if den != 0.0 { num / den } else { 0.0 };

        // order-(k-1) first derivatives, needed for the second derivative
        let d1_km1 = |i: usize| -> f64 {
            (p as f64 - 1.0)
                * (ratio(val_km2(i), t[i + k - 2] - t[i])
                    - ratio(val_km2(i + 1), t[i + k - 1] - t[i + 1]))
        };

        let mut d1 = vec![0.0f64; k];
        let mut d2 = vec![0.0f64; k];
        for j in 0..k {
            let i = first + j;
            d1[j] = p as f64
                * (ratio(val_km1(i), t[i + k - 1] - t[i])
                    - ratio(val_km1(i + 1), t[i + k] - t[i + 1]));
            d2[j] = p as f64
                * (ratio(d1_km1(i), t[i + k - 1] - t[i])
                    - ratio(d1_km1(i + 1), t[i + k] - t[i + 1]));
        }
        (first, vals, d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_basis() -> BSplineBasis {
        let bp: Vec<f64> = (0..=10).map(|i| (i as f64 / 10.0).powf(1.5) * 3.0).collect();
        BSplineBasis::new(&bp, 6)
    }

    #[test]
    fn partition_of_unity() {
        let b = test_basis();
        for i in 0..200 {
            let x = 1e-6 + (3.0 - 2e-6) * i as f64 / 199.0;
            let (_, vals, d1, d2) = b.eval_all(x);
            let s: f64 = vals.iter().sum();
            let sd: f64 = d1.iter().sum();
            let sdd: f64 = d2.iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "sum {s} at x={x}");
            assert!(sd.abs() < 1e-10, "d1 sum {sd} at x={x}");
            assert!(sdd.abs() < 1e-8, "d2 sum {sdd} at x={x}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = test_basis();
        let h = 1e-6;
        for &x in &[0.3f64, 0.77, 1.5, 2.3, 2.9] {
            let (i0, _, d1, d2) = b.eval_all(x);
            let (ip, vp, dp, _) = b.eval_all(x + h);
            let (im, vm, dm, _) = b.eval_all(x - h);
            assert_eq!(i0, ip);
            assert_eq!(i0, im);
            for j in 0..b.order {
                let fd1 = (vp[j] - vm[j]) / (2.0 * h);
                let fd2 = (dp[j] - dm[j]) / (2.0 * h);
                assert!((d1[j] - fd1).abs() < 1e-6 * (1.0 + d1[j].abs()));
                assert!((d2[j] - fd2).abs() < 1e-4 * (1.0 + d2[j].abs()));
            }
        }
    }

    #[test]
    fn clamped_endpoint_values() {
        let b = test_basis();
        let (first, vals, _, _) = b.eval_all(1e-12);
        assert_eq!(first, 0);
        assert!((vals[0] - 1.0).abs() < 1e-9);
    }
}
