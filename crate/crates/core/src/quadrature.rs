//! One-dimensional quadrature primitives: Gauss-Legendre rules, a
//! double-exponential (tanh-sinh) rule for endpoint singularities, and
//! node-doubling drivers for semi-infinite integrals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Interval a rule is defined on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// canonical [-1, 1]
    Canonical,
    /// mapped to [a, b]
    Finite(f64, f64),
}

/// Nodes and weights of a fixed quadrature rule.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Same nodes mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        QuadratureRule {
            nodes: self.nodes.iter().map(|&x| c + h * x).collect(),
            weights: self.weights.iter().map(|&w| w * h).collect(),
            domain: Domain::Finite(a, b),
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree ≤ 2n-1.
pub fn gauss_legendre(n: usize) -> Result<Arc<QuadratureRule>> {
    if !(2..=512).contains(&n) {
        return Err(Error::Domain(format!(
            "gauss_legendre order {n} outside 2..=512"
        )));
    }
    if let Some(r) = rule_cache().lock().unwrap().get(&n) {
        return Ok(r.clone());
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    rule_cache().lock().unwrap().insert(n, rule.clone());
    Ok(rule)
}

fn compute_gauss_legendre(n: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_pd(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    QuadratureRule {
        nodes,
        weights,
        domain: Domain::Canonical,
    }
}

/// Legendre P_n and its derivative by the three-term recurrence.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫₀^∞ f dx for integrands decaying on the scale `decay_scale`, by a
/// rational map and Gauss-Legendre node doubling.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    decay_scale: f64,
    tol: f64,
) -> Result<IntegralEstimate> {
    if !(decay_scale > 0.0) {
        return Err(Error::Domain("decay_scale must be > 0".into()));
    }
    let mut prev: Option<f64> = None;
    let mut evals = 0usize;
    let mut best = 0.0;
    let mut err = f64::INFINITY;
    let mut n = 16;
    while n <= 2048 {
        let rule = gauss_legendre(n.min(512))?;
        let passes = n.div_ceil(512);
        // split [0,1) into `passes` uniform panels when n exceeds one rule
        let mut total = 0.0;
        for p in 0..passes {
            let (u0, u1) = (p as f64 / passes as f64, (p + 1) as f64 / passes as f64);
            let sub = rule.mapped(u0, u1);
            total += sub.integrate(|u| {
                let om = 1.0 - u;
                let x = decay_scale * u / om;
                f(x) * decay_scale / (om * om)
            });
            evals += sub.nodes.len();
        }
        if let Some(pv) = prev {
            err = (total - pv).abs();
            best = total;
            if err <= tol * total.abs().max(1e-300) || err <= 1e-305 {
                return Ok(IntegralEstimate {
                    value: total,
                    error_estimate: err,
                    evaluations: evals,
                });
            }
        } else {
            best = total;
        }
        prev = Some(total);
        n *= 2;
    }
    Err(Error::Convergence {
        context: "integrate_semi_infinite".into(),
        best,
        err,
    })
}

/// Tanh-sinh rule over (a, b) at a given level; tolerates integrable endpoint
/// singularities (log or algebraic).
pub fn tanh_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, level: u32) -> (f64, usize) {
    let h = 1.0 / (1u64 << level) as f64;
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let n_max = (4.0 / h).ceil() as i64;
    let mut sum = 0.0;
    let mut evals = 0usize;
    for i in -n_max..=n_max {
        let t = i as f64 * h;
        let sh = half_pi * t.sinh();
        let x = sh.tanh();
        let w = half_pi * t.cosh() / sh.cosh().powi(2);
        let xv = c + half * x;
        if xv <= a || xv >= b {
            continue;
        }
        sum += w * f(xv);
        evals += 1;
    }
    (sum * h * half, evals)
}

/// ∫_a^b f dx where f may carry a logarithmic singularity at `a` (or both
/// endpoints); double-exponential levels are refined until `tol`.
pub fn integrate_log_endpoint<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralEstimate> {
    if !(b > a) {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    let mut prev: Option<f64> = None;
    let mut evals = 0;
    let mut best = 0.0;
    let mut err = f64::INFINITY;
    for level in 2..=10 {
        let (v, e) = tanh_sinh(&mut f, a, b, level);
        evals += e;
        if let Some(pv) = prev {
            err = (v - pv).abs();
            best = v;
            if err <= tol * v.abs().max(1e-300) {
                return Ok(IntegralEstimate {
                    value: v,
                    error_estimate: err,
                    evaluations: evals,
                });
            }
        } else {
            best = v;
        }
        prev = Some(v);
    }
    Err(Error::Convergence {
        context: "integrate_log_endpoint".into(),
        best,
        err,
    })
}

/// Fixed-rule integral of f over [a, b].
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    let rule = gauss_legendre(n)?;
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * h * f(c + h * x))
        .sum())
}
