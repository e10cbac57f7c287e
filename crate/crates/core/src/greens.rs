//! Radial components of the point-Coulomb Dirac Green function
//! G = (ω - H)⁻¹, built from Whittaker functions; the free-electron
//! propagator in modified-Bessel form; the decomposition of the Coulomb
//! Green function into parts odd and even in the nuclear charge; and the
//! angular-reduced loop trace sums S0, S1, S2 used by the two-body
//! vacuum-polarization loop.
//!
//! All evaluators take ω either purely imaginary (ω = iε, the rotated
//! contour) or real inside the gap |ω| < 1, so that d = √(1-ω²) stays real
//! and Whittaker arguments 2dx stay on the positive real axis.



use crate::error::{Error, Result};
use crate::nucleus::ALPHA;
use crate::specfun::{
    bessel_ikl_scaled, gamma_ratio, whittaker_m_scaled, whittaker_w_scaled, LogScaled,
    WhittakerParams, C64,
};

/// The 2×2 radial components G^{ik}_κ(ω, x₁, x₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenComponents {
    pub g11: C64,
    pub g12: C64,
    pub g21: C64,
    pub g22: C64,
}

impl GreenComponents {
    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        GreenComponents {
            g11: z,
            g12: z,
            g21: z,
            g22: z,
        }
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.g11, self.g12, self.g21, self.g22]
    }

    /// Σ_ik (G^{ik})²
    pub fn sum_squares(&self) -> C64 {
        self.g11 * self.g11 + self.g12 * self.g12 + self.g21 * self.g21 + self.g22 * self.g22
    }

    fn transposed(&self) -> Self {
        GreenComponents {
            g11: self.g11,
            g12: self.g21,
            g21: self.g12,
            g22: self.g22,
        }
    }

    fn add(&self, o: &Self) -> Self {
        GreenComponents {
            g11: self.g11 + o.g11,
            g12: self.g12 + o.g12,
            g21: self.g21 + o.g21,
            g22: self.g22 + o.g22,
        }
    }
}

/// Whittaker building blocks of the radial Green function at one
/// (|κ|, ω, x₁ ≤ x₂):
///
///   A = -Q (λ-ν) M_{ν-1/2,λ}(2dx₁) W_{ν-1/2,λ}(2dx₂)
///   B = -Q (λ-ν) M_{ν-1/2,λ}(2dx₁) W_{ν+1/2,λ}(2dx₂)
///   C = -Q        M_{ν+1/2,λ}(2dx₁) W_{ν-1/2,λ}(2dx₂)
///   D = -Q        M_{ν+1/2,λ}(2dx₁) W_{ν+1/2,λ}(2dx₂)
///
/// with λ = √(κ²-(αZ)²), ν = αZω/d, d = √(1-ω²),
/// Q = Γ(λ-ν) / [4d²(x₁x₂)^{3/2} Γ(1+2λ)]. The blocks are stored against a
/// shared log scale so bilinear combinations stay representable.
#[derive(Debug, Clone, Copy)]
pub struct GreenBlocks {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    /// blocks are (value)·exp(ln_scale)
    pub ln_scale: f64,
    pub omega: C64,
    /// d = √(1-ω²), real by the ω domain restriction
    pub dfac: f64,
    pub lambda: f64,
    pub nu: C64,
    pub kappa_abs: u32,
    pub z_alpha: f64,
    /// arguments were swapped to enforce x₁ ≤ x₂
    pub swapped: bool,
}

/// Odd/even-in-Z parts of the radial components.
#[derive(Debug, Clone, Copy)]
pub struct GreenSplit {
    pub odd: GreenComponents,
    pub even: GreenComponents,
}

/// Angular-reduced loop trace sums at ω = iε for one |κ|.
#[derive(Debug, Clone, Copy)]
pub struct TraceSums {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
}

fn check_omega(omega: C64) -> Result<f64> {
    let is_imag = omega.re == 0.0;
    let is_real_gap = omega.im == 0.0 && omega.re.abs() < 1.0;
    if !(is_imag || is_real_gap) {
        return Err(Error::Domain(format!(
            "omega {omega} must be purely imaginary or real with |omega| < 1"
        )));
    }
    let d2 = 1.0 - (omega * omega).re;
    Ok(d2.sqrt())
}

/// Dirac point-Coulomb bound energy (Sommerfeld), in m_e c² units.
/// `n` is the principal quantum number.
pub fn sommerfeld_energy(z_alpha: f64, n: u32, kappa: i32) -> f64 {
    let gamma = ((kappa * kappa) as f64 - z_alpha * z_alpha).sqrt();
    let nr = n as f64 - kappa.unsigned_abs() as f64;
    let denom = nr + gamma;
    1.0 / (1.0 + (z_alpha / denom).powi(2)).sqrt()
}

fn nearest_pole(z_alpha: f64, kappa_abs: u32, omega_re: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut pole = 0.0;
    for nr in 0..60u32 {
        for sign in [-1i32, 1] {
            let kappa = sign * kappa_abs as i32;
            if kappa > 0 && nr == 0 {
                continue; // no nodeless state for κ > 0
            }
            let n = nr + kappa_abs;
            let e = sommerfeld_energy(z_alpha, n, kappa);
            if (e - omega_re).abs() < best {
                best = (e - omega_re).abs();
                pole = e;
            }
        }
    }
    if best < 1e-6 {
        pole
    } else {
        f64::NAN
    }
}

const POLE_THRESHOLD: f64 = 1e-6;

/// Whittaker blocks for one |κ|. `zc` is the nuclear charge number Z.
pub fn green_blocks(omega: C64, kappa_abs: u32, x1: f64, x2: f64, zc: f64) -> Result<GreenBlocks> {
    if kappa_abs == 0 {
        return Err(Error::Domain("kappa must be nonzero".into()));
    }
    if !(x1 > 0.0 && x2 > 0.0) {
        return Err(Error::Domain(format!("radii must be positive: {x1}, {x2}")));
    }
    let z_alpha = ALPHA * zc;
    let k2 = (kappa_abs * kappa_abs) as f64;
    if z_alpha * z_alpha >= k2 {
        return Err(Error::Domain(format!(
            "alpha Z = {z_alpha} at or beyond the critical value for |kappa| = {kappa_abs}"
        )));
    }
    let d = check_omega(omega)?;
    if omega.im == 0.0 && zc > 0.0 {
        let p = nearest_pole(z_alpha, kappa_abs, omega.re);
        if p.is_finite() {
            return Err(Error::PoleProximity { pole: p });
        }
    }
    let (x1s, x2s, swapped) = if x1 <= x2 {
        (x1, x2, false)
    } else {
        (x2, x1, true)
    };
    let lambda = (k2 - z_alpha * z_alpha).sqrt();
    let nu = z_alpha * omega / d;
    let lam = C64::new(lambda, 0.0);
    let z1 = 2.0 * d * x1s;
    let z2 = 2.0 * d * x2s;
    let m_lo = whittaker_m_scaled(WhittakerParams::new(nu - 0.5, lam, z1)?)?;
    let m_hi = whittaker_m_scaled(WhittakerParams::new(nu + 0.5, lam, z1)?)?;
    let w_lo = whittaker_w_scaled(WhittakerParams::new(nu - 0.5, lam, z2)?)?;
    let w_hi = whittaker_w_scaled(WhittakerParams::new(nu + 0.5, lam, z2)?)?;
    // Q = Γ(λ-ν)/Γ(1+2λ) / (4d²(x₁x₂)^{3/2})
    let q_gamma = gamma_ratio(lam - nu, C64::new(1.0 + 2.0 * lambda, 0.0))?;
    let q = q_gamma.scale_ln(-(4.0 * d * d).ln() - 1.5 * (x1s * x2s).ln());
    let lmn = LogScaled::from_complex(lam - nu);
    let minus = LogScaled::from_complex(C64::new(-1.0, 0.0));
    let a = minus.mul(q).mul(lmn).mul(m_lo).mul(w_lo);
    let b = minus.mul(q).mul(lmn).mul(m_lo).mul(w_hi);
    let c = minus.mul(q).mul(m_hi).mul(w_lo);
    let dd = minus.mul(q).mul(m_hi).mul(w_hi);
    let ln_scale = a.ln.max(b.ln).max(c.ln).max(dd.ln);
    let rescale = |s: LogScaled| {
        if s.is_zero() {
            C64::new(0.0, 0.0)
        } else {
            s.val * (s.ln - ln_scale).exp()
        }
    };
    Ok(GreenBlocks {
        a: rescale(a),
        b: rescale(b),
        c: rescale(c),
        d: rescale(dd),
        ln_scale,
        omega,
        dfac: d,
        lambda,
        nu,
        kappa_abs,
        z_alpha,
        swapped,
    })
}

impl GreenBlocks {
    /// γ = κ² - (αZ/d)²
    pub fn gamma_factor(&self) -> f64 {
        (self.kappa_abs * self.kappa_abs) as f64 - (self.z_alpha / self.dfac).powi(2)
    }

    /// Radial components for the given sign of κ, resummed from the blocks:
    ///   G¹¹ = (1+ω)[κ(A-D) + B - γC + (αZ/d)(A+D)]
    ///   G¹² = d[κ(A+D) - B - γC + (αZ/d)(A-D)]
    ///   G²¹ = d[κ(A+D) + B + γC + (αZ/d)(A-D)]
    ///   G²² = (1-ω)[κ(A-D) - B + γC + (αZ/d)(A+D)]
    pub fn components(&self, kappa: i32) -> Result<GreenComponents> {
        if kappa.unsigned_abs() != self.kappa_abs {
            return Err(Error::Domain(format!(
                "kappa {kappa} does not match blocks built for |kappa| = {}",
                self.kappa_abs
            )));
        }
        let kf = kappa as f64;
        let g = self.gamma_factor();
        let zd = self.z_alpha / self.dfac;
        let scale = self.ln_scale.exp();
        let apd = self.a + self.d;
        let amd = self.a - self.d;
        let g11 = (1.0 + self.omega) * (kf * amd + self.b - g * self.c + zd * apd) * scale;
        let g12 = self.dfac * (kf * apd - self.b - g * self.c + zd * amd) * scale;
        let g21 = self.dfac * (kf * apd + self.b + g * self.c + zd * amd) * scale;
        let g22 = (1.0 - self.omega) * (kf * amd - self.b + g * self.c + zd * apd) * scale;
        let comps = GreenComponents { g11, g12, g21, g22 };
        Ok(if self.swapped {
            comps.transposed()
        } else {
            comps
        })
    }

    /// Odd/even-in-Z split of the components at ω = iε (conjugating the
    /// blocks realizes Z → -Z there).
    pub fn split(&self, kappa: i32) -> Result<GreenSplit> {
        if self.omega.re != 0.0 {
            return Err(Error::Domain(
                "odd/even split requires omega on the imaginary axis".into(),
            ));
        }
        if kappa.unsigned_abs() != self.kappa_abs {
            return Err(Error::Domain(format!(
                "kappa {kappa} does not match blocks built for |kappa| = {}",
                self.kappa_abs
            )));
        }
        let kf = kappa as f64;
        let g = self.gamma_factor();
        let zd = self.z_alpha / self.dfac;
        let scale = self.ln_scale.exp();
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let i = C64::new(0.0, 1.0);
        let im_amd = (a - d).im;
        let im_apd = (a + d).im;
        let re_amd = (a - d).re;
        let re_apd = (a + d).re;
        let op = 1.0 + self.omega;
        let om = 1.0 - self.omega;
        let odd = GreenComponents {
            g11: op * (i * (kf * im_amd + b.im - g * c.im) + zd * re_apd) * scale,
            g12: self.dfac * (i * (kf * im_apd - b.im - g * c.im) + zd * re_amd) * scale,
            g21: self.dfac * (i * (kf * im_apd + b.im + g * c.im) + zd * re_amd) * scale,
            g22: om * (i * (kf * im_amd - b.im + g * c.im) + zd * re_apd) * scale,
        };
        let even = GreenComponents {
            g11: op * (C64::new(kf * re_amd + b.re - g * c.re, 0.0) + i * zd * im_apd) * scale,
            g12: self.dfac
                * (C64::new(kf * re_apd - b.re - g * c.re, 0.0) + i * zd * im_amd)
                * scale,
            g21: self.dfac
                * (C64::new(kf * re_apd + b.re + g * c.re, 0.0) + i * zd * im_amd)
                * scale,
            g22: om * (C64::new(kf * re_amd - b.re + g * c.re, 0.0) + i * zd * im_apd) * scale,
        };
        Ok(GreenSplit {
            odd: if self.swapped { odd.transposed() } else { odd },
            even: if self.swapped { even.transposed() } else { even },
        })
    }
}

/// Point-Coulomb radial Green components G^{ik}_κ(ω, x₁, x₂).
pub fn coulomb_green(omega: C64, kappa: i32, x1: f64, x2: f64, zc: f64) -> Result<GreenComponents> {
    let blocks = green_blocks(omega, kappa.unsigned_abs(), x1, x2, zc)?;
    blocks.components(kappa)
}

/// Odd/even-in-Z parts of the Coulomb Green components at ω = iε.
pub fn green_split(eps: f64, kappa: i32, x1: f64, x2: f64, zc: f64) -> Result<GreenSplit> {
    let blocks = green_blocks(C64::new(0.0, eps), kappa.unsigned_abs(), x1, x2, zc)?;
    blocks.split(kappa)
}

fn l_of(kappa: i32) -> u32 {
    if kappa > 0 {
        kappa as u32
    } else {
        (-kappa - 1) as u32
    }
}

/// Free-electron radial propagator components in modified-Bessel form
/// (the Z → 0 limit of `coulomb_green`), for x₁ ≤ x₂:
///   F¹¹ = -(2d/π)(ω+1) i_l(dx₁) k_l(dx₂)       l  = l(κ)
///   F²² = -(2d/π)(ω-1) i_l̄(dx₁) k_l̄(dx₂)       l̄ = l(-κ)
///   F¹² = +(2d²/π)     i_l(dx₁) k_l̄(dx₂)
///   F²¹ = -(2d²/π)     i_l̄(dx₁) k_l(dx₂)
pub fn free_green(omega: C64, kappa: i32, x1: f64, x2: f64) -> Result<GreenComponents> {
    if kappa == 0 {
        return Err(Error::Domain("kappa must be nonzero".into()));
    }
    if !(x1 > 0.0 && x2 > 0.0) {
        return Err(Error::Domain(format!("radii must be positive: {x1}, {x2}")));
    }
    let d = check_omega(omega)?;
    let (xa, xb, swapped) = if x1 <= x2 {
        (x1, x2, false)
    } else {
        (x2, x1, true)
    };
    let l = l_of(kappa);
    let lb = l_of(-kappa);
    // scaled products: i(d x₁) k(d x₂) = î(d x₁) k̂(d x₂) e^{-d(x₂-x₁)}
    let damp = (-d * (xb - xa)).exp();
    let (i_l, _) = bessel_ikl_scaled(l, d * xa);
    let (i_lb, _) = bessel_ikl_scaled(lb, d * xa);
    let (_, k_l) = bessel_ikl_scaled(l, d * xb);
    let (_, k_lb) = bessel_ikl_scaled(lb, d * xb);
    let c = 2.0 * d / std::f64::consts::PI * damp;
    let comps = GreenComponents {
        g11: -c * (omega + 1.0) * i_l * k_l,
        g22: -c * (omega - 1.0) * i_lb * k_lb,
        g12: C64::new(c * d * i_l * k_lb, 0.0),
        g21: C64::new(-c * d * i_lb * k_l, 0.0),
    };
    Ok(if swapped { comps.transposed() } else { comps })
}

/// Coefficients of dF/dω for the free propagator at separation x:
/// dF/dω = -[ d·(iα·x̂) + β + ω + d/(ωx) ] (e^{-dx}/4π)(ω/d),
/// returned as the scalar multipliers of iα·x̂, β and the identity.
#[derive(Debug, Clone, Copy)]
pub struct FreeOmegaDerivative {
    pub coef_alpha_xhat: C64,
    pub coef_beta: C64,
    pub coef_unit: C64,
}

pub fn free_green_domega(omega: C64, x: f64) -> Result<FreeOmegaDerivative> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("separation x = {x} must be > 0")));
    }
    if omega.norm_sqr() == 0.0 {
        return Err(Error::Domain(
            "omega = 0 is outside the domain of the d/(ωx) term".into(),
        ));
    }
    let d = check_omega(omega)?;
    let common = (-d * x).exp() / (4.0 * std::f64::consts::PI) * omega / d;
    Ok(FreeOmegaDerivative {
        coef_alpha_xhat: -d * common,
        coef_beta: -common,
        coef_unit: -(omega + d / (omega * x)) * common,
    })
}

// ---------------------------------------------------------------------------
// loop trace sums
// ---------------------------------------------------------------------------

/// S0, S1, S2 of the even-in-Z (Furry-projected) loop trace at ω = iε,
/// assembled directly from the blocks for |κ| and |κ|+1. The closed forms
/// are the even projections of the defining component sums, written out in
/// block variables (derivation checked symbolically against those sums):
///
///   S0 = 8[ ((αZ/d)²+κ²)(ReA²+ReD²-ImA²-ImD²) + ReB²-ImB² + γ²(ReC²-ImC²) ]
///      - 16ε(αZ/d)[ Re(A+D)(ImB-γImC) + Im(A+D)(ReB-γReC) ]
///      + 16ε²γ[ ReA ReD - ImA ImD + ReB ReC - ImB ImC ]
///   S1 = 8d²[ (κ²+(αZ/d)²)(ReA²+ReD²-ImA²-ImD²) + γ²(ImC²-ReC²) + ImB²-ReB² ]
///   S2 = 16d²[ (|κ|(|κ|+1)-(αZ/d)²)(ImA ImA'+ImD ImD'-ReA ReA'-ReD ReD')
///              + ImB ImB'-ReB ReB' + γγ'(ImC ImC'-ReC ReC') ]
///
/// Primes are the |κ|+1 blocks and γ = κ² - (αZ/d)².
pub fn trace_sums(blocks: &GreenBlocks, blocks_primed: &GreenBlocks) -> Result<TraceSums> {
    if blocks.omega.re != 0.0 {
        return Err(Error::Domain(
            "trace sums are defined on the imaginary axis".into(),
        ));
    }
    if blocks_primed.kappa_abs != blocks.kappa_abs + 1 {
        return Err(Error::Domain(format!(
            "primed blocks must carry |kappa|+1 = {}, got {}",
            blocks.kappa_abs + 1,
            blocks_primed.kappa_abs
        )));
    }
    let eps = blocks.omega.im;
    let d = blocks.dfac;
    let zd = blocks.z_alpha / d;
    let k2 = (blocks.kappa_abs * blocks.kappa_abs) as f64;
    let g = blocks.gamma_factor();
    let gp = blocks_primed.gamma_factor();
    let s = blocks.ln_scale.exp();
    let sp = blocks_primed.ln_scale.exp();
    let (a, b, c, dd) = (blocks.a * s, blocks.b * s, blocks.c * s, blocks.d * s);
    let (ap, bp, cp, dp) = (
        blocks_primed.a * sp,
        blocks_primed.b * sp,
        blocks_primed.c * sp,
        blocks_primed.d * sp,
    );
    let zd2k2 = zd * zd + k2;
    let s0 = 8.0
        * (zd2k2 * (a.re * a.re + dd.re * dd.re - a.im * a.im - dd.im * dd.im) + b.re * b.re
            - b.im * b.im
            + g * g * (c.re * c.re - c.im * c.im))
        - 16.0
            * eps
            * zd
            * ((a.re + dd.re) * (b.im - g * c.im) + (a.im + dd.im) * (b.re - g * c.re))
        + 16.0
            * eps
            * eps
            * g
            * (a.re * dd.re - a.im * dd.im + b.re * c.re - b.im * c.im);
    let s1 = 8.0
        * d
        * d
        * (zd2k2 * (a.re * a.re + dd.re * dd.re - a.im * a.im - dd.im * dd.im)
            + g * g * (c.im * c.im - c.re * c.re)
            + b.im * b.im
            - b.re * b.re);
    let kk1 = (blocks.kappa_abs * (blocks.kappa_abs + 1)) as f64;
    let s2 = 16.0
        * d
        * d
        * ((kk1 - zd * zd)
            * (a.im * ap.im + dd.im * dp.im - a.re * ap.re - dd.re * dp.re)
            + b.im * bp.im
            - b.re * bp.re
            + g * gp * (c.im * cp.im - c.re * cp.re));
    Ok(TraceSums { s0, s1, s2 })
}

/// The same three sums from their definitions in terms of full components:
///   S0 = Re Σ_{κ=±|κ|} Σ_{ik} (G^{ik}_κ)²
///   S1 = Re Σ_{κ=±|κ|} (G¹¹G²² + G²²G¹¹ + G¹²G²¹ + G²¹G¹²)_κ
///   S2 = 2 Re Σ_{κ=±|κ|} (G¹¹_κG²²_κ' + G²²_κG¹¹_κ' + G¹²_κG²¹_κ' + G²¹_κG¹²_κ'),
/// κ' = -sign(κ)(|κ|+1). Not Furry-projected: carries all powers of Z.
pub fn trace_sums_direct(
    eps: f64,
    kappa_abs: u32,
    x1: f64,
    x2: f64,
    zc: f64,
) -> Result<TraceSums> {
    let omega = C64::new(0.0, eps);
    let blocks = green_blocks(omega, kappa_abs, x1, x2, zc)?;
    let blocks_p = green_blocks(omega, kappa_abs + 1, x1, x2, zc)?;
    let mut s0 = C64::new(0.0, 0.0);
    let mut s1 = C64::new(0.0, 0.0);
    let mut s2 = C64::new(0.0, 0.0);
    for sign in [-1i32, 1] {
        let kappa = sign * kappa_abs as i32;
        let g = blocks.components(kappa)?;
        s0 += g.sum_squares();
        s1 += 2.0 * (g.g11 * g.g22 + g.g12 * g.g21);
        let kp = -sign * (kappa_abs as i32 + 1);
        let gp = blocks_p.components(kp)?;
        s2 += 2.0 * (g.g11 * gp.g22 + g.g22 * gp.g11 + g.g12 * gp.g21 + g.g21 * gp.g12);
    }
    Ok(TraceSums {
        s0: s0.re,
        s1: s1.re,
        s2: s2.re,
    })
}

/// Assembly weights of the trace sums in the two-body loop:
/// the monopole (timelike) channel enters as Σ_|κ| 2|κ|·S0 and the
/// magnetic dipole channel as (u·v)·Σ_|κ| [w1·S1 + w2·S2].
pub fn monopole_weight(kappa_abs: u32) -> f64 {
    2.0 * kappa_abs as f64
}

pub fn magnetic_weight_s1(kappa_abs: u32) -> f64 {
    let a = kappa_abs as f64;
    8.0 * a * a * a / (3.0 * (4.0 * a * a - 1.0))
}

pub fn magnetic_weight_s2(kappa_abs: u32) -> f64 {
    let a = kappa_abs as f64;
    2.0 * a * (a + 1.0) / (3.0 * (2.0 * a + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn coulomb_z0_equals_free() {
        let omega = C64::new(0.0, 0.5);
        for kappa in [-3i32, -2, -1, 1, 2, 3] {
            for &(x1, x2) in &[(0.3, 0.9), (1.2, 0.4), (0.05, 0.06), (2.0, 2.0)] {
                let gc = coulomb_green(omega, kappa, x1, x2, 0.0).unwrap();
                let gf = free_green(omega, kappa, x1, x2).unwrap();
                for (c, f) in gc.as_array().iter().zip(gf.as_array()) {
                    assert!(
                        (c - f).norm() <= 1e-9 * f.norm().max(1e-30),
                        "kappa={kappa} x=({x1},{x2}): {c} vs {f}"
                    );
                }
            }
        }
    }

    #[test]
    fn symmetry_relation() {
        let omega = C64::new(0.0, 0.8);
        let g_ab = coulomb_green(omega, -2, 0.3, 0.9, 92.0).unwrap();
        let g_ba = coulomb_green(omega, -2, 0.9, 0.3, 92.0).unwrap();
        assert!(rel(g_ab.g11, g_ba.g11) < 1e-10);
        assert!(rel(g_ab.g12, g_ba.g21) < 1e-10);
        assert!(rel(g_ab.g21, g_ba.g12) < 1e-10);
        assert!(rel(g_ab.g22, g_ba.g22) < 1e-10);
    }

    #[test]
    fn blocks_match_defining_products() {
        // re-derive A..D from their definitions with direct Whittaker calls
        let omega = C64::new(0.0, 0.65);
        let (x1, x2, zc) = (0.25, 0.7, 92.0);
        let bl = green_blocks(omega, 2, x1, x2, zc).unwrap();
        let d = bl.dfac;
        let lam = C64::new(bl.lambda, 0.0);
        let nu = bl.nu;
        let q = gamma_ratio(lam - nu, C64::new(1.0 + 2.0 * bl.lambda, 0.0))
            .unwrap()
            .scale_ln(-(4.0 * d * d).ln() - 1.5 * (x1 * x2).ln());
        let m_lo = whittaker_m_scaled(WhittakerParams::new(nu - 0.5, lam, 2.0 * d * x1).unwrap())
            .unwrap();
        let m_hi = whittaker_m_scaled(WhittakerParams::new(nu + 0.5, lam, 2.0 * d * x1).unwrap())
            .unwrap();
        let w_lo = whittaker_w_scaled(WhittakerParams::new(nu - 0.5, lam, 2.0 * d * x2).unwrap())
            .unwrap();
        let w_hi = whittaker_w_scaled(WhittakerParams::new(nu + 0.5, lam, 2.0 * d * x2).unwrap())
            .unwrap();
        let minus = LogScaled::from_complex(C64::new(-1.0, 0.0));
        let lmn = LogScaled::from_complex(lam - nu);
        let a_ref = minus.mul(q).mul(lmn).mul(m_lo).mul(w_lo).to_complex();
        let d_ref = minus.mul(q).mul(m_hi).mul(w_hi).to_complex();
        let s = bl.ln_scale.exp();
        assert!(rel(bl.a * s, a_ref) < 1e-10);
        assert!(rel(bl.d * s, d_ref) < 1e-10);
    }

    #[test]
    fn pole_residue_1s_uranium() {
        // (ω-ε₁ₛ)G¹¹(ω,x,x) → g₁ₛ(x)² across the pole
        let zc = 92.0;
        let za = ALPHA * zc;
        let gamma = (1.0 - za * za).sqrt();
        let e1s = sommerfeld_energy(za, 1, -1);
        assert_relative_eq!(e1s, gamma, epsilon = 1e-14);
        let x = 0.02f64;
        let n2: f64 = (1.0 + gamma) * (2.0 * za).powf(2.0 * gamma + 1.0)
            / (2.0 * gamma_fn(2.0 * gamma + 1.0));
        let g1s = n2.sqrt() * x.powf(gamma - 1.0) * (-za * x).exp();
        let delta = 1e-3;
        let gp = coulomb_green(C64::new(e1s + delta, 0.0), -1, x, x, zc).unwrap();
        let gm = coulomb_green(C64::new(e1s - delta, 0.0), -1, x, x, zc).unwrap();
        let res_p = delta * gp.g11.re;
        let res_m = -delta * gm.g11.re;
        let avg = 0.5 * (res_p + res_m);
        assert!(
            (avg - g1s * g1s).abs() <= 1e-6 * (g1s * g1s) + (res_p - res_m).abs() * 1e-3,
            "residue {avg} vs g² {}",
            g1s * g1s
        );
    }

    fn gamma_fn(x: f64) -> f64 {
        crate::specfun::log_gamma(C64::new(x, 0.0)).unwrap().re.exp()
    }

    #[test]
    fn pole_proximity_rejected() {
        let e1s = sommerfeld_energy(ALPHA * 92.0, 1, -1);
        let err = coulomb_green(C64::new(e1s + 1e-8, 0.0), -1, 0.1, 0.2, 92.0);
        assert!(matches!(err, Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn free_decay_slope() {
        // ln|F·x₂| vs separation has slope -d once the 1/x₂ prefactor of
        // k₀ is divided out; checked across a decade of separations
        let omega = C64::new(0.0, 0.75);
        let d = (1.0 + 0.75f64 * 0.75).sqrt();
        let x1 = 0.2;
        let mut seps = vec![];
        let mut lnv = vec![];
        for s in [2.0f64, 4.0, 8.0, 20.0] {
            let v = free_green(omega, -1, x1, x1 + s).unwrap().g11.norm();
            seps.push(s);
            lnv.push((v * (x1 + s)).ln());
        }
        for w in 0..seps.len() - 1 {
            let slope = (lnv[w + 1] - lnv[w]) / (seps[w + 1] - seps[w]);
            assert_relative_eq!(slope, -d, max_relative = 0.02);
        }
    }

    #[test]
    fn free_sign_checks() {
        // at ω → 0 the 22 component is positive, 11 negative
        let omega = C64::new(1e-12, 0.0);
        let f = free_green(omega, -1, 0.4, 0.6).unwrap();
        assert!(f.g22.re > 0.0);
        assert!(f.g11.re < 0.0);
    }

    #[test]
    fn split_reconstructs_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let eps: f64 = rng.gen_range(0.05..3.0);
            let kappa = *[-3i32, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap();
            let x1: f64 = rng.gen_range(0.02..1.0);
            let x2: f64 = rng.gen_range(0.02..1.0);
            let zc: f64 = rng.gen_range(10.0..100.0);
            let sp = green_split(eps, kappa, x1, x2, zc).unwrap();
            let full = coulomb_green(C64::new(0.0, eps), kappa, x1, x2, zc).unwrap();
            let rec = sp.odd.add(&sp.even);
            for (r, f) in rec.as_array().iter().zip(full.as_array()) {
                assert!(
                    (r - f).norm() <= 1e-9 * f.norm().max(1e-30),
                    "odd+even mismatch at eps={eps} kappa={kappa}"
                );
            }
        }
    }

    #[test]
    fn split_even_is_free_at_z0_and_odd_linear() {
        let eps = 0.5;
        let (x1, x2) = (0.3, 0.8);
        let sp0 = green_split(eps, -1, x1, x2, 0.0).unwrap();
        let free = free_green(C64::new(0.0, eps), -1, x1, x2).unwrap();
        for (e, f) in sp0.even.as_array().iter().zip(free.as_array()) {
            assert!((e - f).norm() <= 1e-9 * f.norm().max(1e-30));
        }
        for o in sp0.odd.as_array() {
            assert!(o.norm() < 1e-12);
        }
        // odd part linear in Z near 0: odd(2δ) ≈ 2 odd(δ)
        let d1 = green_split(eps, -1, x1, x2, 1.0e-3).unwrap();
        let d2 = green_split(eps, -1, x1, x2, 2.0e-3).unwrap();
        let r = d2.odd.g11.norm() / d1.odd.g11.norm();
        assert_relative_eq!(r, 2.0, max_relative = 1e-4);
    }

    #[test]
    fn conjugation_flips_odd_fixes_even() {
        // rebuilding with conjugated blocks realizes Z → -Z
        let eps = 0.9;
        let (x1, x2, zc) = (0.2, 0.5, 70.0);
        let bl = green_blocks(C64::new(0.0, eps), 1, x1, x2, zc).unwrap();
        let mut conj = bl;
        conj.a = bl.a.conj();
        conj.b = bl.b.conj();
        conj.c = bl.c.conj();
        conj.d = bl.d.conj();
        conj.nu = bl.nu.conj();
        conj.z_alpha = -bl.z_alpha;
        let sp = bl.split(-1).unwrap();
        let spc = conj.split(-1).unwrap();
        for (o1, o2) in sp.odd.as_array().iter().zip(spc.odd.as_array()) {
            assert!((o1 + o2).norm() <= 1e-9 * o1.norm().max(1e-30));
        }
        for (e1, e2) in sp.even.as_array().iter().zip(spc.even.as_array()) {
            assert!((e1 - e2).norm() <= 1e-9 * e1.norm().max(1e-30));
        }
    }

    #[test]
    fn trace_sums_match_pm_z_symmetrization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let eps: f64 = rng.gen_range(0.1..2.5);
            let ka: u32 = rng.gen_range(1..5);
            let x1: f64 = rng.gen_range(0.05..0.8);
            let x2: f64 = rng.gen_range(0.05..0.8);
            let zc: f64 = rng.gen_range(20.0..100.0);
            let omega = C64::new(0.0, eps);
            let bl = green_blocks(omega, ka, x1, x2, zc).unwrap();
            let blp = green_blocks(omega, ka + 1, x1, x2, zc).unwrap();
            let s = trace_sums(&bl, &blp).unwrap();
            let sp = trace_sums_direct(eps, ka, x1, x2, zc).unwrap();
            let sm = trace_sums_direct(eps, ka, x1, x2, -zc).unwrap();
            let scale = s.s0.abs().max(s.s1.abs()).max(s.s2.abs()).max(1e-280);
            assert!(
                (s.s0 - 0.5 * (sp.s0 + sm.s0)).abs() <= 1e-8 * scale,
                "s0 mismatch eps={eps} ka={ka} z={zc}"
            );
            assert!(
                (s.s1 - 0.5 * (sp.s1 + sm.s1)).abs() <= 1e-8 * scale,
                "s1 mismatch eps={eps} ka={ka} z={zc}"
            );
            assert!(
                (s.s2 - 0.5 * (sp.s2 + sm.s2)).abs() <= 1e-8 * scale,
                "s2 mismatch eps={eps} ka={ka} z={zc}"
            );
        }
    }

    #[test]
    fn trace_sums_free_limit() {
        // Z = 0: S0 equals the direct free-component sum over both κ signs
        let eps = 0.7;
        let (x1, x2) = (0.3, 0.5);
        for ka in 1..5u32 {
            let omega = C64::new(0.0, eps);
            let bl = green_blocks(omega, ka, x1, x2, 0.0).unwrap();
            let blp = green_blocks(omega, ka + 1, x1, x2, 0.0).unwrap();
            let s = trace_sums(&bl, &blp).unwrap();
            let mut s0_free = C64::new(0.0, 0.0);
            for sign in [-1i32, 1] {
                let f = free_green(omega, sign * ka as i32, x1, x2).unwrap();
                s0_free += f.sum_squares();
            }
            assert!(
                (s.s0 - s0_free.re).abs() <= 1e-10 * s0_free.re.abs().max(1e-280),
                "ka={ka}: {} vs {}",
                s.s0,
                s0_free.re
            );
        }
    }

    #[test]
    fn trace_sums_decay_in_eps() {
        // exponential decay with asymptotic rate 2(x₂-x₁) in ε at x₁ ≪ x₂
        let (x1, x2, zc) = (0.02, 0.6, 92.0);
        let val = |eps: f64| {
            let omega = C64::new(0.0, eps);
            let bl = green_blocks(omega, 1, x1, x2, zc).unwrap();
            let blp = green_blocks(omega, 2, x1, x2, zc).unwrap();
            trace_sums(&bl, &blp).unwrap().s0.abs()
        };
        let (e1, e2) = (80.0, 150.0);
        let slope = (val(e2) / val(e1)).ln() / (e2 - e1);
        assert_relative_eq!(slope, -2.0 * (x2 - x1), max_relative = 0.05);
    }

    #[test]
    fn domega_matches_finite_difference() {
        // assemble the 4×4 dF/dω from the kernel and compare with a central
        // difference of the closed-form propagator
        let omega = C64::new(0.0, 0.4);
        let xvec = [0.6f64, -0.3, 0.7];
        let x = (xvec[0] * xvec[0] + xvec[1] * xvec[1] + xvec[2] * xvec[2]).sqrt();
        let n = [xvec[0] / x, xvec[1] / x, xvec[2] / x];
        let h = 1e-5;
        let k = free_green_domega(omega, x).unwrap();
        let want = closed_free_4x4(C64::new(0.0, 0.4 + h), &xvec);
        let wm = closed_free_4x4(C64::new(0.0, 0.4 - h), &xvec);
        // d/dω = d/d(iε) = -i d/dε
        let scale = C64::new(0.0, -1.0) / (2.0 * h);
        for r in 0..4 {
            for c in 0..4 {
                let fd = (want[r][c] - wm[r][c]) * scale;
                let an = k.coef_unit * id4(r, c)
                    + k.coef_beta * beta4(r, c)
                    + k.coef_alpha_xhat * C64::new(0.0, 1.0) * alpha_dot(&n, r, c);
                assert!(
                    (fd - an).norm() <= 1e-8 * fd.norm().max(1e-12),
                    "entry ({r},{c}): fd {fd} vs {an}"
                );
            }
        }
    }

    #[test]
    fn domega_scaling_and_parity() {
        let omega = C64::new(0.0, 0.4);
        let k1 = free_green_domega(omega, 1.0).unwrap();
        let k2 = free_green_domega(omega, 2.0).unwrap();
        let d = (1.0 + 0.16f64).sqrt();
        // e^{-dx} factor doubles its exponent under x → 2x
        assert_relative_eq!(
            (k2.coef_beta.norm() / k1.coef_beta.norm()).ln(),
            -d,
            max_relative = 1e-10
        );
        // β and iα·x̂ coefficients are odd in ω
        let km = free_green_domega(-omega, 1.0).unwrap();
        assert!((k1.coef_beta + km.coef_beta).norm() < 1e-14);
        assert!((k1.coef_alpha_xhat + km.coef_alpha_xhat).norm() < 1e-14);
        assert!(free_green_domega(C64::new(0.0, 0.0), 1.0).is_err());
    }

    fn id4(r: usize, c: usize) -> C64 {
        C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
    }

    fn beta4(r: usize, c: usize) -> C64 {
        if r != c {
            return C64::new(0.0, 0.0);
        }
        C64::new(if r < 2 { 1.0 } else { -1.0 }, 0.0)
    }

    fn sigma_mat(i: usize) -> [[C64; 2]; 2] {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let im = C64::new(0.0, 1.0);
        match i {
            0 => [[z, o], [o, z]],
            1 => [[z, -im], [im, z]],
            _ => [[o, z], [z, -o]],
        }
    }

    fn alpha_dot(n: &[f64; 3], r: usize, c: usize) -> C64 {
        // α_i has σ_i in the off-diagonal 2×2 blocks
        let mut v = C64::new(0.0, 0.0);
        for i in 0..3 {
            let s = sigma_mat(i);
            if r < 2 && c >= 2 {
                v += n[i] * s[r][c - 2];
            } else if r >= 2 && c < 2 {
                v += n[i] * s[r - 2][c];
            }
        }
        v
    }

    fn closed_free_4x4(omega: C64, xv: &[f64; 3]) -> [[C64; 4]; 4] {
        // F = -(ω + β + α·p) e^{-dr}/(4πr) = -(ω+β)G₀ - i(d + 1/r)G₀ α·n̂
        let r = (xv[0] * xv[0] + xv[1] * xv[1] + xv[2] * xv[2]).sqrt();
        let n = [xv[0] / r, xv[1] / r, xv[2] / r];
        let d = (1.0 - (omega * omega).re).sqrt();
        let g0 = (-d * r).exp() / (4.0 * std::f64::consts::PI * r);
        let mut out = [[C64::new(0.0, 0.0); 4]; 4];
        for row in 0..4 {
            for col in 0..4 {
                out[row][col] = -(omega * id4(row, col) + beta4(row, col)) * g0
                    - C64::new(0.0, 1.0) * (d + 1.0 / r) * g0 * alpha_dot(&n, row, col);
            }
        }
        out
    }

    #[test]
    fn magnetic_weights_values() {
        assert_relative_eq!(magnetic_weight_s1(1), 8.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(magnetic_weight_s1(2), 64.0 / 45.0, epsilon = 1e-15);
        assert_relative_eq!(magnetic_weight_s1(3), 72.0 / 35.0, epsilon = 1e-15);
        assert_relative_eq!(magnetic_weight_s2(1), 4.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(magnetic_weight_s2(2), 4.0 / 5.0, epsilon = 1e-15);
        assert_relative_eq!(magnetic_weight_s2(3), 8.0 / 7.0, epsilon = 1e-15);
    }
}
