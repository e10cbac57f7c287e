//! Special functions for the radial Coulomb-Dirac Green function and the
//! free propagator: complex log-gamma, Whittaker M and W with complex first
//! index, and modified spherical Bessel functions.
//!
//! Whittaker functions are evaluated in log-scaled form so that products
//! like M(2dx₁)·W(2dx₂) stay representable when d·x runs to hundreds of
//! electron Compton lengths.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A complex value stored as `val * exp(ln)` with `|val|` kept near 1.
///
/// `ln` absorbs the exponential growth/decay, so quantities like
/// e^{±d·x} with d·x ~ 10³ survive intermediate arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    pub ln: f64,
    pub val: C64,
}

impl LogScaled {
    pub fn from_complex(v: C64) -> Self {
        LogScaled { ln: 0.0, val: v }.normalized()
    }

    pub fn zero() -> Self {
        LogScaled {
            ln: f64::NEG_INFINITY,
            val: C64::new(0.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.val.norm_sqr() == 0.0 || self.ln == f64::NEG_INFINITY
    }

    pub fn normalized(self) -> Self {
        let m = self.val.norm();
        if m == 0.0 || !m.is_finite() {
            if m == 0.0 {
                return Self::zero();
            }
            return self;
        }
        LogScaled {
            ln: self.ln + m.ln(),
            val: self.val / m,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        LogScaled {
            ln: self.ln + other.ln,
            val: self.val * other.val,
        }
        .normalized()
    }

    pub fn div(self, other: Self) -> Self {
        LogScaled {
            ln: self.ln - other.ln,
            val: self.val / other.val,
        }
        .normalized()
    }

    pub fn scale_ln(self, dln: f64) -> Self {
        LogScaled {
            ln: self.ln + dln,
            val: self.val,
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.ln - big.ln;
        if d < -745.0 {
            return big;
        }
        LogScaled {
            ln: big.ln,
            val: big.val + small.val * d.exp(),
        }
        .normalized()
    }

    /// Materialize; overflows to ±inf / underflows to 0 silently.
    pub fn to_complex(self) -> C64 {
        self.val * self.ln.exp()
    }
}

// ---------------------------------------------------------------------------
// complex log-gamma (Lanczos, g = 607/128, 15 coefficients)
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
];

/// Principal-branch log-gamma for complex argument.
///
/// exp(log_gamma(z)) = Γ(z); poles at z = 0, -1, -2, ... are rejected.
pub fn log_gamma(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Domain(format!("log_gamma pole at z = {z}")));
    }
    if z.re < 0.5 {
        // reflection: ln Γ(z) = ln π - ln sin(πz) - ln Γ(1-z)
        let pi = std::f64::consts::PI;
        // ln sin(πz) computed overflow-safe for large |Im z|
        let s = log_sin_pi(z);
        return Ok(C64::new(pi.ln(), 0.0) - s - log_gamma(C64::new(1.0, 0.0) - z)?);
    }
    let zm1 = z - 1.0;
    let mut acc = C64::new(LANCZOS_COEF[0], 0.0);
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += *c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Ok(half_ln_2pi + (zm1 + 0.5) * t.ln() - t + acc.ln())
}

/// log(sin(πz)) without overflow for large |Im z|.
fn log_sin_pi(z: C64) -> C64 {
    let pi = std::f64::consts::PI;
    let piz = pi * z;
    if piz.im.abs() < 20.0 {
        return piz.sin().ln();
    }
    // sin w = (e^{iw} - e^{-iw}) / 2i; keep the dominant exponential
    let iw = C64::new(-piz.im, piz.re);
    if piz.im > 0.0 {
        // dominant e^{-iw}
        let ln_dom = -iw;
        let corr = C64::new(1.0, 0.0) - (2.0 * iw).exp();
        ln_dom + corr.ln() - C64::new(0.0, 1.0).ln() - (2.0f64).ln()
    } else {
        let ln_dom = iw;
        let corr = C64::new(1.0, 0.0) - (-2.0 * iw).exp();
        ln_dom + corr.ln() - C64::new(0.0, 1.0).ln() - (2.0f64).ln()
    }
}

/// Γ(a)/Γ(b) in log-scaled form.
pub fn gamma_ratio(a: C64, b: C64) -> Result<LogScaled> {
    let la = log_gamma(a)?;
    let lb = log_gamma(b)?;
    let d = la - lb;
    Ok(LogScaled {
        ln: d.re,
        val: C64::new(d.im.cos(), d.im.sin()),
    })
}

// ---------------------------------------------------------------------------
// Whittaker functions
// ---------------------------------------------------------------------------

/// Parameters of a Whittaker function M_{k,μ}(z) or W_{k,μ}(z).
///
/// `z` must be positive; `mu` must be real ≥ 0 or have positive real part
/// (principal branch).
#[derive(Debug, Clone, Copy)]
pub struct WhittakerParams {
    pub k: C64,
    pub mu: C64,
    pub z: f64,
}

impl WhittakerParams {
    pub fn new(k: C64, mu: C64, z: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("whittaker argument z = {z} not > 0")));
        }
        if mu.re < 0.0 || !mu.re.is_finite() {
            return Err(Error::Domain(format!("whittaker index mu = {mu} invalid")));
        }
        Ok(WhittakerParams { k, mu, z })
    }
}

const SERIES_ASYMPTOTIC_SWITCH: f64 = 350.0;

/// Kummer series Σ (a)_n / (b)_n z^n / n! with scaled accumulation.
fn kummer_series_scaled(a: C64, b: C64, z: f64) -> Result<LogScaled> {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(1.0, 0.0);
    let mut ln_off = 0.0f64;
    let max_n = 20_000usize;
    for n in 0..max_n {
        let nf = n as f64;
        let num = a + nf;
        let den = b + nf;
        if den.norm_sqr() == 0.0 {
            return Err(Error::Domain(format!("kummer series pole, b = {b}")));
        }
        term = term * num * z / (den * (nf + 1.0));
        sum += term;
        let ts = term.norm_sqr();
        if ts > 1e260 || sum.norm_sqr() > 1e260 {
            let m = sum.norm();
            ln_off += m.ln();
            sum /= m;
            term /= m;
        }
        // the terms rise to a hump near n ~ z before decaying
        if nf + 1.0 > z && ts <= 1e-34 * sum.norm_sqr() {
            return Ok(LogScaled { ln: ln_off, val: sum }.normalized());
        }
    }
    Err(Error::Convergence {
        context: format!("kummer series a={a} b={b} z={z}"),
        best: (LogScaled { ln: ln_off, val: sum }).to_complex().norm(),
        err: term.norm(),
    })
}

/// Asymptotic 2F0-type series Σ (p)_s (q)_s / (s! z^s); truncated at the
/// smallest term.
fn poincare_series(p: C64, q: C64, z: f64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for s in 0..60 {
        let sf = s as f64;
        term = term * (p + sf) * (q + sf) / ((sf + 1.0) * z);
        let t = term.norm();
        if t >= prev || t < 1e-18 {
            break;
        }
        prev = t;
        sum += term;
    }
    sum
}

/// Regular Whittaker function M_{k,μ}(z), log-scaled.
pub fn whittaker_m_scaled(p: WhittakerParams) -> Result<LogScaled> {
    let a = p.mu - p.k + 0.5;
    let b = 2.0 * p.mu + 1.0;
    let z = p.z;
    let pre_ln = -0.5 * z + (p.mu + 0.5).re * z.ln();
    let pre_arg = (p.mu + 0.5).im * z.ln();
    let pre = LogScaled {
        ln: pre_ln,
        val: C64::new(pre_arg.cos(), pre_arg.sin()),
    };
    let f = if z <= SERIES_ASYMPTOTIC_SWITCH {
        kummer_series_scaled(a, b, z)?
    } else {
        // 1F1(a,b,z) ~ Γ(b)/Γ(a) e^z z^{a-b} [1 + ...] for z → +∞
        let ratio = gamma_ratio(b, a)?;
        let s = poincare_series(b - a, 1.0 - a, z);
        let zp = (a - b) * z.ln();
        let power = LogScaled {
            ln: zp.re,
            val: C64::new(zp.im.cos(), zp.im.sin()),
        };
        ratio
            .mul(power)
            .mul(LogScaled::from_complex(s))
            .scale_ln(z)
    };
    Ok(pre.mul(f))
}

/// Tricomi U(a,b,z) by the regularized Laplace integral, valid for Re a > 0:
/// U(a,b,z) = z^{-a}/Γ(a) ∫₀^∞ e^{-s} s^{a-1} (1+s/z)^{b-a-1} ds.
/// Double-exponential nodes handle the s^{a-1} endpoint.
fn tricomi_u_integral(a: C64, b: C64, z: f64) -> Result<LogScaled> {
    debug_assert!(a.re > 0.25);
    let c = b - a - 1.0;
    let mut prev: Option<C64> = None;
    let mut result = C64::new(0.0, 0.0);
    // s = exp(u - e^{-u}): double-exponential for [0, ∞) with e^{-s} decay
    for level in 0..4 {
        let h = 0.5 / (1 << level) as f64;
        let n_lo = (6.5 / h).ceil() as i64;
        let n_hi = (5.5 / h).ceil() as i64;
        let mut acc = C64::new(0.0, 0.0);
        for i in -n_lo..=n_hi {
            let u = i as f64 * h;
            let emu = (-u).exp();
            let s = (u - emu).exp();
            if s < 1e-280 {
                continue;
            }
            let jac = s * (1.0 + emu);
            let ln_s = u - emu;
            // e^{-s} s^{a-1} (1+s/z)^{c}
            let expo = (a - 1.0) * ln_s + c * (1.0 + s / z).ln() - s;
            if expo.re < -740.0 {
                continue;
            }
            acc += expo.exp() * jac;
        }
        acc *= h;
        result = acc;
        if let Some(pv) = prev {
            if (result - pv).norm() <= 1e-13 * result.norm().max(1e-300) {
                break;
            }
        }
        prev = Some(result);
    }
    let lg = log_gamma(a)?;
    let za = -a * z.ln();
    let pre = LogScaled {
        ln: za.re - lg.re,
        val: C64::new(0.0, za.im - lg.im).exp(),
    };
    Ok(pre.mul(LogScaled::from_complex(result)))
}

/// Tricomi U with the a-recurrence pulling Re a into the integral's domain.
/// U(a-1,b,z) = (2a - b + z) U(a,b,z) - a (a - b + 1) U(a+1,b,z).
fn tricomi_u(a: C64, b: C64, z: f64) -> Result<LogScaled> {
    if z > SERIES_ASYMPTOTIC_SWITCH {
        // U(a,b,z) ~ z^{-a} 2F0(a, a-b+1; -1/z)
        let s = poincare_series(a, a - b + 1.0, -z);
        let za = -a * z.ln();
        return Ok(LogScaled {
            ln: za.re,
            val: C64::new(0.0, za.im).exp(),
        }
        .mul(LogScaled::from_complex(s)));
    }
    if a.re > 0.3 {
        return tricomi_u_integral(a, b, z);
    }
    let steps = (0.3 - a.re).ceil().max(1.0) as usize;
    if steps > 12 {
        return Err(Error::Domain(format!(
            "tricomi U index a = {a} too far left of the integral domain"
        )));
    }
    let a_hi = a + steps as f64;
    let mut u_next = tricomi_u_integral(a_hi + 1.0, b, z)?; // U(a_hi+1)
    let mut u_cur = tricomi_u_integral(a_hi, b, z)?; // U(a_hi)
    let mut ac = a_hi;
    for _ in 0..steps {
        // U(ac - 1) from U(ac), U(ac + 1)
        let t1 = LogScaled::from_complex(2.0 * ac - b + z).mul(u_cur);
        let t2 = LogScaled::from_complex(ac * (ac - b + 1.0)).mul(u_next);
        let u_prev = t1.add(t2.scale_ln(0.0).mul(LogScaled::from_complex(C64::new(-1.0, 0.0))));
        u_next = u_cur;
        u_cur = u_prev;
        ac -= 1.0;
    }
    Ok(u_cur)
}

/// Exponentially decaying Whittaker function W_{k,μ}(z), log-scaled.
pub fn whittaker_w_scaled(p: WhittakerParams) -> Result<LogScaled> {
    let a = p.mu - p.k + 0.5;
    let b = 2.0 * p.mu + 1.0;
    let z = p.z;
    let u = tricomi_u(a, b, z)?;
    let pre_arg = (p.mu + 0.5).im * z.ln();
    let pre = LogScaled {
        ln: -0.5 * z + (p.mu + 0.5).re * z.ln(),
        val: C64::new(pre_arg.cos(), pre_arg.sin()),
    };
    Ok(pre.mul(u))
}

/// Whittaker M materialized to a plain complex number.
pub fn whittaker_m(p: WhittakerParams) -> Result<C64> {
    let s = whittaker_m_scaled(p)?;
    if s.ln > 700.0 {
        return Err(Error::Range(format!(
            "whittaker M overflows (ln magnitude {:.1}); use the scaled form",
            s.ln
        )));
    }
    Ok(s.to_complex())
}

/// Whittaker W materialized to a plain complex number.
pub fn whittaker_w(p: WhittakerParams) -> Result<C64> {
    let s = whittaker_w_scaled(p)?;
    if s.ln > 700.0 {
        return Err(Error::Range(format!(
            "whittaker W overflows (ln magnitude {:.1}); use the scaled form",
            s.ln
        )));
    }
    Ok(s.to_complex())
}

// ---------------------------------------------------------------------------
// modified spherical Bessel functions
// ---------------------------------------------------------------------------

/// Modified spherical Bessel functions (i_l, k_l); k_l carries the π/2
/// normalization, k_0(z) = (π/2) e^{-z}/z.
pub fn bessel_ikl(l: u32, z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel argument z = {z} not > 0")));
    }
    let (i_s, k_s) = bessel_ikl_scaled(l, z);
    Ok((i_s * z.exp(), k_s * (-z).exp()))
}

/// Scaled pair (e^{-z} i_l(z), e^{z} k_l(z)); both O(1/z) at large z.
pub fn bessel_ikl_scaled(l: u32, z: f64) -> (f64, f64) {
    (bessel_i_scaled(l, z), bessel_k_scaled(l, z))
}

pub fn bessel_k_scaled(l: u32, z: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let k0 = half_pi / z;
    if l == 0 {
        return k0;
    }
    let k1 = half_pi / z * (1.0 + 1.0 / z);
    if l == 1 {
        return k1;
    }
    let mut km = k0;
    let mut kc = k1;
    for n in 1..l {
        let kn = km + (2.0 * n as f64 + 1.0) / z * kc;
        km = kc;
        kc = kn;
    }
    kc
}

pub fn bessel_i_scaled(l: u32, z: f64) -> f64 {
    if z < 2.0 * l as f64 + 4.0 {
        return bessel_i_series(l, z) * (-z).exp();
    }
    let i0 = (1.0 - (-2.0 * z).exp()) / (2.0 * z);
    if l == 0 {
        return i0;
    }
    let i1 = ((z - 1.0) + (z + 1.0) * (-2.0 * z).exp()) / (2.0 * z * z);
    if l == 1 {
        return i1;
    }
    let mut im = i0;
    let mut ic = i1;
    for n in 1..l {
        let inext = im - (2.0 * n as f64 + 1.0) / z * ic;
        im = ic;
        ic = inext;
    }
    ic
}

/// i_l by its ascending series (all terms positive, no cancellation).
fn bessel_i_series(l: u32, z: f64) -> f64 {
    // i_l(z) = z^l / (2l+1)!! Σ_n (z²/2)^n / (n! (2l+3)(2l+5)...(2l+1+2n))
    let mut dfact = 1.0f64;
    for j in 1..=l {
        dfact *= 2.0 * j as f64 + 1.0;
    }
    let pre = z.powi(l as i32) / dfact;
    let half_z2 = 0.5 * z * z;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 1..200 {
        term *= half_z2 / (n as f64 * (2.0 * (l as f64 + n as f64) + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    pre * sum
}
