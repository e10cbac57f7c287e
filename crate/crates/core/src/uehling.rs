//! Uehling potentials: the point-nucleus form, the exact extended-nucleus
//! double integral, the product approximation V(r)·(2α/3π)K(r), and the
//! two-body screening kernel χ(s) for the photon-line correction.
//!
//! Both one-body forms are built on the universal spectral integrals
//!   K₂(x) = ∫₁^∞ dt (1 + 1/2t²) √(t²-1)/t² e^{-2xt}
//!   K₃(x) = ∫₁^∞ dt (1 + 1/2t²) √(t²-1)/t³ e^{-2xt}
//! which are tabulated once (they carry no parameters).

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::nucleus::{NuclearModel, Shape, ALPHA};
use crate::quadrature::{gauss_legendre, integrate_gl};

/// (2α/3π), the vacuum-polarization spectral weight.
pub fn vp_prefactor() -> f64 {
    2.0 * ALPHA / (3.0 * std::f64::consts::PI)
}

/// ∫₁^∞ dt (1+1/2t²)√(t²-1)/tᵖ e^{-2xt} by the cosh substitution.
fn spectral_integral(p: i32, x: f64) -> f64 {
    // t = cosh u removes the square-root endpoint singularity
    let u_max = ((45.0 / (2.0 * x)).max(2.0)).acosh() + 1.0;
    let f = |u: f64| {
        let t = u.cosh();
        (1.0 + 0.5 / (t * t)) * (u.sinh() / t.powi(p)) * u.sinh() * (-2.0 * x * t).exp()
    };
    let mut prev = f64::NAN;
    for n in [64usize, 128, 256] {
        let v = integrate_gl(f, 0.0, u_max, n).expect("rule in range");
        if (v - prev).abs() <= 1e-13 * v.abs().max(1e-300) {
            return v;
        }
        prev = v;
    }
    prev
}

struct KernelTables {
    /// small x: K₂(x) + ln(x) vs ln x (smooth through the log divergence)
    k2_small: CubicSpline,
    /// large x: ln K₂(x) vs x (the e^{-2x} factor is linear there)
    k2_large: CubicSpline,
    /// small x: K₃ vs ln x, finite at 0 (value 9π/32)
    k3_small: CubicSpline,
    k3_large: CubicSpline,
}

const TABLE_X_MIN: f64 = 1e-8;
const TABLE_X_SPLIT: f64 = 0.9;
// tables overlap around the split so neither is evaluated at its endpoint
const TABLE_SMALL_TOP: f64 = 1.1;
const TABLE_LARGE_BOTTOM: f64 = 0.7;
const TABLE_X_MAX: f64 = 42.0;

fn kernel_tables() -> &'static KernelTables {
    static TABLES: OnceLock<KernelTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let n_small = 800;
        let lx: Vec<f64> = (0..n_small)
            .map(|i| {
                TABLE_X_MIN.ln()
                    + (TABLE_SMALL_TOP.ln() - TABLE_X_MIN.ln()) * i as f64 / (n_small - 1) as f64
            })
            .collect();
        let k2s: Vec<f64> = lx
            .iter()
            .map(|&l| spectral_integral(2, l.exp()) + l)
            .collect();
        let k3s: Vec<f64> = lx.iter().map(|&l| spectral_integral(3, l.exp())).collect();
        let n_large = 3600;
        let xs: Vec<f64> = (0..n_large)
            .map(|i| {
                TABLE_LARGE_BOTTOM
                    + (TABLE_X_MAX - TABLE_LARGE_BOTTOM) * i as f64 / (n_large - 1) as f64
            })
            .collect();
        let k2l: Vec<f64> = xs.iter().map(|&x| spectral_integral(2, x).ln()).collect();
        let k3l: Vec<f64> = xs.iter().map(|&x| spectral_integral(3, x).ln()).collect();
        KernelTables {
            k2_small: CubicSpline::new(lx.clone(), k2s).expect("monotone abscissa"),
            k2_large: CubicSpline::new(xs.clone(), k2l).expect("monotone abscissa"),
            k3_small: CubicSpline::new(lx, k3s).expect("monotone abscissa"),
            k3_large: CubicSpline::new(xs, k3l).expect("monotone abscissa"),
        }
    })
}

/// K₂(x), tabulated; direct quadrature outside the table range.
pub fn kernel_k2(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::INFINITY;
    }
    let t = kernel_tables();
    if x < TABLE_X_MIN || x > TABLE_X_MAX {
        spectral_integral(2, x)
    } else if x < TABLE_X_SPLIT {
        t.k2_small.eval(x.ln()) - x.ln()
    } else {
        t.k2_large.eval(x).exp()
    }
}

/// K₃(x), tabulated.
pub fn kernel_k3(x: f64) -> f64 {
    if x == 0.0 {
        return 9.0 * std::f64::consts::PI / 32.0;
    }
    let t = kernel_tables();
    if x < TABLE_X_MIN {
        t.k3_small.eval(TABLE_X_MIN.ln())
    } else if x > TABLE_X_MAX {
        spectral_integral(3, x)
    } else if x < TABLE_X_SPLIT {
        t.k3_small.eval(x.ln())
    } else {
        t.k3_large.eval(x).exp()
    }
}

/// Point-nucleus Uehling potential, -(αZ/r)(2α/3π)K₂(r).
pub fn uehling_point(r: f64, z: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(-ALPHA * z / r * vp_prefactor() * kernel_k2(r))
}

/// Two-body screening kernel χ(s) = (2α/3π)K₂(s); multiplies 1/|x-y| in
/// the photon-line vacuum-polarization correction.
pub fn twobody_kernel(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("separation {s} must be positive")));
    }
    Ok(vp_prefactor() * kernel_k2(s))
}

/// Exact extended-nucleus Uehling potential:
/// U(r) = -αZ (2α/3π) (π/r) ∫ dr' r' ρ(r') [K₃(|r-r'|) - K₃(r+r')].
pub fn uehling_extended(model: &NuclearModel, r: f64) -> Result<f64> {
    let (c_edge, cut) = match model.shape {
        Shape::Fermi { c, a, .. } => (c, c + 45.0 * a),
        Shape::Point => {
            return Err(Error::Domain(
                "extended Uehling needs an extended charge model".into(),
            ))
        }
        Shape::Shell { radius } => (radius, radius),
    };
    let zc = model.z as f64;
    let pref = -ALPHA * zc * vp_prefactor() * std::f64::consts::PI;
    if let Shape::Shell { radius } = model.shape {
        // surface distribution: ∫ r'ρ dr' → 1/(4π radius)
        let rr = radius;
        let val = (kernel_k3((r - rr).abs()) - kernel_k3(r + rr)) / (4.0 * std::f64::consts::PI);
        return Ok(pref * rr * val / (rr * r.max(1e-300)) * 1.0);
    }
    let integrand = |rp: f64| -> f64 {
        let rho = model.rho(rp).unwrap_or(0.0);
        rp * rho * (kernel_k3((r - rp).abs()) - kernel_k3(r + rp))
    };
    // split at the |r-r'| kink and at the Fermi edge
    let mut bounds = vec![0.0, cut];
    if r > 0.0 && r < cut {
        bounds.push(r);
    }
    bounds.push(c_edge.min(cut));
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bounds.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut acc = 0.0;
    for w in bounds.windows(2) {
        acc += integrate_gl(integrand, w[0], w[1], 48)?;
    }
    if r == 0.0 {
        // (1/r)[K₃(|r-r'|) - K₃(r+r')] → -2 K₃'(r') ; evaluate by the limit
        // numerically using a small radius instead
        return uehling_extended(model, 1e-9);
    }
    Ok(pref * acc / r)
}

/// Product approximation U(r) ≈ V(r)(2α/3π)K₂(r); exact for a point
/// nucleus.
pub fn uehling_approx(model: &NuclearModel, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(model.potential(r) * vp_prefactor() * kernel_k2(r))
}

// ---------------------------------------------------------------------------
// radial potential tables
// ---------------------------------------------------------------------------

/// How a table extends beyond its last radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// log-linear continuation of the last segment
    LogLinear,
    Zero,
}

/// A tabulated radial potential with cubic interpolation on the log grid.
/// Strictly signed potentials interpolate ln|U| against ln r, which keeps
/// the relative error uniform over many orders of magnitude.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    spline: CubicSpline,
    sign: f64,
    log_values: bool,
    pub tail: Tail,
}

impl PotentialTable {
    pub fn build(f: impl Fn(f64) -> f64, r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && n >= 8) {
            return Err(Error::Domain("bad table parameters".into()));
        }
        let radii: Vec<f64> = (0..n)
            .map(|i| r_min * (r_max / r_min).powf(i as f64 / (n - 1) as f64))
            .collect();
        let values: Vec<f64> = radii.iter().map(|&r| f(r)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential table hit a non-finite value".into()));
        }
        let all_neg = values.iter().all(|&v| v < 0.0);
        let all_pos = values.iter().all(|&v| v > 0.0);
        let (log_values, sign) = if all_neg {
            (true, -1.0)
        } else if all_pos {
            (true, 1.0)
        } else {
            (false, 1.0)
        };
        let ys: Vec<f64> = if log_values {
            values.iter().map(|&v| (sign * v).ln()).collect()
        } else {
            values.clone()
        };
        let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        Ok(PotentialTable {
            spline: CubicSpline::new(lx, ys)?,
            radii,
            values,
            sign,
            log_values,
            tail: Tail::LogLinear,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(self.radii[0]);
        if self.tail == Tail::Zero && r > *self.radii.last().unwrap() {
            return 0.0;
        }
        let y = self.spline.eval(r.ln());
        if self.log_values {
            self.sign * y.exp()
        } else {
            y
        }
    }

    /// Two-column dump (radius in Compton lengths, value in mₑc²).
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.radii.len() * 32);
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!("{r:.12e} {v:.12e}\n"));
        }
        out
    }
}

/// Default table of the one-body Uehling potential for a model.
pub fn uehling_table(model: &NuclearModel) -> Result<PotentialTable> {
    let zc = model.z as f64;
    match model.shape {
        Shape::Point => {
            PotentialTable::build(|r| uehling_point(r, zc).unwrap(), 1e-6, 25.0, 1200)
        }
        _ => PotentialTable::build(
            |r| uehling_extended(model, r).unwrap(),
            1e-6,
            25.0,
            1200,
        ),
    }
}
