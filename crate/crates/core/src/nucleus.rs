//! Nuclear charge-distribution models and their electrostatic potentials,
//! plus the physical constants and unit conversions used everywhere else.
//!
//! Internal unit system: ħ = c = m_e = 1. Lengths are measured in electron
//! Compton wavelengths (ħ/m_e c ≈ 386.159 fm), energies in m_e c².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_gl;

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035999;
/// Electron rest energy in eV.
pub const ELECTRON_MASS_EV: f64 = 510_998.95;
/// ħc in eV·fm (197.3269804 MeV·fm).
pub const HBARC_EV_FM: f64 = 1.9732698e8;
/// Electron Compton wavelength ħ/(m_e c) in fm.
pub const COMPTON_FM: f64 = HBARC_EV_FM / ELECTRON_MASS_EV;

/// Bundle of the constants above, for callers that want them as data.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    pub electron_mass_ev: f64,
    pub compton_length_fm: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            alpha: ALPHA,
            electron_mass_ev: ELECTRON_MASS_EV,
            compton_length_fm: COMPTON_FM,
        }
    }
}

/// Fermi skin thickness t = 4 ln3 · a, fixed at the conventional 2.3 fm.
pub const FERMI_SKIN_T_FM: f64 = 2.3;

/// Root-mean-square charge radii (fm) used by default, by nuclear charge.
pub const DEFAULT_RMS_FM: [(u32, f64); 15] = [
    (20, 3.478),
    (30, 3.928),
    (32, 4.072),
    (40, 4.270),
    (50, 4.655),
    (54, 4.787),
    (60, 4.914),
    (66, 5.224),
    (70, 5.317),
    (74, 5.373),
    (80, 5.467),
    (83, 5.533),
    (90, 5.645),
    (92, 5.860),
    (100, 5.886),
];

/// Look up the default rms radius for a given Z, if tabulated.
pub fn default_rms_fm(z: u32) -> Option<f64> {
    DEFAULT_RMS_FM
        .iter()
        .find(|&&(zz, _)| zz == z)
        .map(|&(_, r)| r)
}

/// Charge-distribution variants. Lengths in Compton units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Point,
    /// Two-parameter Fermi distribution ρ ∝ 1/(1 + exp((r-c)/a)),
    /// with the normalization constant solved at construction.
    Fermi { c: f64, a: f64, norm: f64 },
    /// Homogeneously charged spherical shell of radius R.
    Shell { radius: f64 },
}

/// A nuclear model: charge number plus charge-distribution shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuclearModel {
    pub z: u32,
    pub shape: Shape,
    /// Realized rms radius in fm (absent for a point nucleus).
    pub rms_fm: Option<f64>,
}

/// Radius beyond which the Fermi density is treated as zero.
fn fermi_cutoff(c: f64, a: f64) -> f64 {
    c + 45.0 * a
}

fn fermi_unnorm(r: f64, c: f64, a: f64) -> f64 {
    1.0 / (1.0 + ((r - c) / a).exp())
}

/// 4π ∫ r^p ρ_unnorm dr over the support, split at the Fermi edge.
fn fermi_moment(p: i32, c: f64, a: f64) -> f64 {
    let cut = fermi_cutoff(c, a);
    let edge = c.min(cut);
    let f = |r: f64| 4.0 * std::f64::consts::PI * r.powi(p) * fermi_unnorm(r, c, a);
    let m1 = integrate_gl(f, 0.0, edge, 64).expect("fixed-order rule");
    let m2 = integrate_gl(f, edge, cut, 64).expect("fixed-order rule");
    m1 + m2
}

impl NuclearModel {
    pub fn point(z: u32) -> Self {
        NuclearModel {
            z,
            shape: Shape::Point,
            rms_fm: None,
        }
    }

    /// Shell model with ⟨r²⟩^{1/2} = `rms_fm` (shell radius equals the rms).
    pub fn shell_from_rms(z: u32, rms_fm: f64) -> Result<Self> {
        if !(rms_fm > 0.0) {
            return Err(Error::Domain(format!("rms {rms_fm} fm not positive")));
        }
        Ok(NuclearModel {
            z,
            shape: Shape::Shell {
                radius: rms_fm / COMPTON_FM,
            },
            rms_fm: Some(rms_fm),
        })
    }

    /// Fermi model with skin t = 2.3 fm and c solved so the realized rms
    /// matches `rms_fm`.
    pub fn fermi_from_rms(z: u32, rms_fm: f64) -> Result<Self> {
        if !(rms_fm > 0.0) {
            return Err(Error::Domain(format!("rms {rms_fm} fm not positive")));
        }
        let a = FERMI_SKIN_T_FM / (4.0 * 3.0f64.ln()) / COMPTON_FM;
        let target = rms_fm / COMPTON_FM;
        let rms_of_c = |c: f64| {
            let m2 = fermi_moment(2, c, a);
            let m4 = fermi_moment(4, c, a);
            (m4 / m2).sqrt()
        };
        // realized rms grows monotonically with c; bracket then bisect
        let mut lo = 1e-6 * target;
        let mut hi = 3.0 * target;
        if rms_of_c(lo) > target {
            return Err(Error::Domain(format!(
                "rms {rms_fm} fm too small for a Fermi distribution with t = {FERMI_SKIN_T_FM} fm"
            )));
        }
        while rms_of_c(hi) < target {
            hi *= 2.0;
            if hi > 1e3 * target {
                return Err(Error::Domain("fermi c parameter bracket failed".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rms_of_c(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) < 1e-15 * target {
                break;
            }
        }
        let c = 0.5 * (lo + hi);
        let norm = 1.0 / fermi_moment(2, c, a);
        Ok(NuclearModel {
            z,
            shape: Shape::Fermi { c, a, norm },
            rms_fm: Some(rms_fm),
        })
    }

    /// Fermi model with both parameters given directly (fm), for limit studies.
    pub fn fermi_from_params(z: u32, c_fm: f64, a_fm: f64) -> Result<Self> {
        if !(c_fm > 0.0 && a_fm > 0.0) {
            return Err(Error::Domain("fermi parameters must be positive".into()));
        }
        let c = c_fm / COMPTON_FM;
        let a = a_fm / COMPTON_FM;
        let norm = 1.0 / fermi_moment(2, c, a);
        let m4 = fermi_moment(4, c, a);
        let rms = (m4 * norm).sqrt();
        Ok(NuclearModel {
            z,
            shape: Shape::Fermi { c, a, norm },
            rms_fm: Some(rms * COMPTON_FM),
        })
    }

    /// Normalized charge density (Compton⁻³). Point and Shell are
    /// distributions; both are rejected here and served by dedicated paths.
    pub fn rho(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("radius {r} negative")));
        }
        match self.shape {
            Shape::Point => Err(Error::Domain(
                "point nucleus density is a delta distribution; use point-specific formulas".into(),
            )),
            Shape::Shell { .. } => Err(Error::Domain(
                "shell density is a surface delta; use the moment operations".into(),
            )),
            Shape::Fermi { c, a, norm } => {
                if r > fermi_cutoff(c, a) {
                    Ok(0.0)
                } else {
                    Ok(norm * fermi_unnorm(r, c, a))
                }
            }
        }
    }

    /// ⟨r²⟩^{1/2} of the realized distribution, Compton units.
    pub fn rms_realized(&self) -> Option<f64> {
        match self.shape {
            Shape::Point => None,
            Shape::Shell { radius } => Some(radius),
            Shape::Fermi { c, a, norm } => Some((fermi_moment(4, c, a) * norm).sqrt()),
        }
    }

    /// Electrostatic potential V(r) in m_e c² units, r in Compton units:
    /// V(r) = -4παZ [ (1/r)∫₀^r ρ s² ds + ∫_r^∞ ρ s ds ].
    ///
    /// Finite at r = 0 for extended shapes; the point nucleus returns -∞
    /// at r = 0.
    pub fn potential(&self, r: f64) -> f64 {
        let zalpha = ALPHA * self.z as f64;
        match self.shape {
            Shape::Point => {
                if r == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -zalpha / r
                }
            }
            Shape::Shell { radius } => {
                if r <= radius {
                    -zalpha / radius
                } else {
                    -zalpha / r
                }
            }
            Shape::Fermi { c, a, norm } => {
                if r == 0.0 {
                    return self.potential_at_origin();
                }
                let cut = fermi_cutoff(c, a);
                if r >= cut {
                    return -zalpha / r;
                }
                let pref = 4.0 * std::f64::consts::PI * norm;
                let inner = {
                    // ∫₀^r ρ_unnorm s² ds split at the Fermi edge
                    let edge = c.min(r);
                    let f = |s: f64| s * s * fermi_unnorm(s, c, a);
                    integrate_gl(f, 0.0, edge, 48).unwrap()
                        + integrate_gl(f, edge, r, 48).unwrap()
                };
                let outer = {
                    let edge = c.max(r).min(cut);
                    let f = |s: f64| s * fermi_unnorm(s, c, a);
                    integrate_gl(f, r, edge, 48).unwrap()
                        + integrate_gl(f, edge, cut, 48).unwrap()
                };
                -zalpha * pref * (inner / r + outer)
            }
        }
    }

    /// Potential at the origin for extended shapes (finite).
    pub fn potential_at_origin(&self) -> f64 {
        let zalpha = ALPHA * self.z as f64;
        match self.shape {
            Shape::Point => f64::NEG_INFINITY,
            Shape::Shell { radius } => -zalpha / radius,
            Shape::Fermi { c, a, norm } => {
                let cut = fermi_cutoff(c, a);
                let pref = 4.0 * std::f64::consts::PI * norm;
                let f = |s: f64| s * fermi_unnorm(s, c, a);
                let outer = integrate_gl(f, 0.0, c, 48).unwrap()
                    + integrate_gl(f, c, cut, 48).unwrap();
                -zalpha * pref * outer
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants_consistent() {
        assert_relative_eq!(
            COMPTON_FM * ELECTRON_MASS_EV,
            HBARC_EV_FM,
            max_relative = 1e-9
        );
        // λ̄_C = 386.159 fm
        assert_relative_eq!(COMPTON_FM, 386.159, max_relative = 1e-5);
    }

    #[test]
    fn point_potential_is_coulomb() {
        let m = NuclearModel::point(92);
        assert_relative_eq!(m.potential(2.0), -92.0 * ALPHA / 2.0, epsilon = 1e-15);
        assert_eq!(m.potential(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn shell_interior_constant() {
        let m = NuclearModel::shell_from_rms(92, 5.860).unwrap();
        let r_shell = 5.860 / COMPTON_FM;
        let v_in = m.potential(0.5 * r_shell);
        assert_relative_eq!(v_in, -92.0 * ALPHA / r_shell, epsilon = 1e-14);
        assert_relative_eq!(m.potential(0.0), v_in, epsilon = 1e-14);
        assert_relative_eq!(
            m.potential(2.0 * r_shell),
            -92.0 * ALPHA / (2.0 * r_shell),
            epsilon = 1e-14
        );
    }

    #[test]
    fn fermi_realizes_target_rms() {
        for &(z, rms) in &[(92u32, 5.860f64), (20, 3.478)] {
            let m = NuclearModel::fermi_from_rms(z, rms).unwrap();
            let realized = m.rms_realized().unwrap() * COMPTON_FM;
            assert!(
                (realized - rms).abs() < 1e-6,
                "Z={z}: realized {realized} vs target {rms}"
            );
        }
    }

    #[test]
    fn fermi_rejects_tiny_rms() {
        assert!(NuclearModel::fermi_from_rms(20, 0.3).is_err());
    }

    #[test]
    fn fermi_normalization() {
        let m = NuclearModel::fermi_from_rms(92, 5.860).unwrap();
        if let Shape::Fermi { c, a, norm } = m.shape {
            let total = fermi_moment(2, c, a) * norm;
            assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        } else {
            panic!("expected fermi shape");
        }
    }

    #[test]
    fn fermi_half_density_at_c() {
        let m = NuclearModel::fermi_from_rms(92, 5.860).unwrap();
        if let Shape::Fermi { c, .. } = m.shape {
            let r0 = m.rho(0.0).unwrap();
            let rc = m.rho(c).unwrap();
            assert!((rc / r0 - 0.5).abs() < 1e-3, "ratio {}", rc / r0);
        }
    }

    #[test]
    fn fermi_potential_matches_point_far_out() {
        let m = NuclearModel::fermi_from_rms(92, 5.860).unwrap();
        if let Shape::Fermi { c, .. } = m.shape {
            let r = 20.0 * c;
            let v = m.potential(r);
            let vp = -92.0 * ALPHA / r;
            assert_relative_eq!(v, vp, max_relative = 1e-12);
            let r50 = 50.0 * c;
            assert_relative_eq!(m.potential(r50), -92.0 * ALPHA / r50, max_relative = 1e-10);
        }
    }

    #[test]
    fn fermi_origin_potential_matches_double_integral() {
        // V(0) = -4παZ ∫₀^∞ ρ(s) s ds, cross-checked against the
        // independent two-region quadrature of ρ over its support
        let m = NuclearModel::fermi_from_rms(92, 5.860).unwrap();
        let v0 = m.potential_at_origin();
        if let Shape::Fermi { c, a, .. } = m.shape {
            let cut = fermi_cutoff(c, a);
            let direct = integrate_gl(|s| m.rho(s).unwrap() * s, 0.0, c, 96).unwrap()
                + integrate_gl(|s| m.rho(s).unwrap() * s, c, cut, 96).unwrap();
            let expect = -4.0 * std::f64::consts::PI * ALPHA * 92.0 * direct;
            assert_relative_eq!(v0, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn fermi_potential_monotone_nondecreasing() {
        let m = NuclearModel::fermi_from_rms(92, 5.860).unwrap();
        let mut prev = m.potential_at_origin();
        for i in 1..200 {
            let r = 1e-4 * 1.1f64.powi(i);
            let v = m.potential(r);
            assert!(v >= prev - 1e-13, "potential dipped at r={r}");
            prev = v;
        }
    }

    #[test]
    fn fermi_small_skin_approaches_uniform_ball() {
        // a → 0 at fixed rms: potential tends to the uniform ball result
        let rms = 5.0;
        let m = NuclearModel::fermi_from_params(92, (5f64 / 3.0).sqrt() * rms, 1e-3).unwrap();
        let r_ball = (5f64 / 3.0f64).sqrt() * rms / COMPTON_FM;
        let zalpha = 92.0 * ALPHA;
        for frac in [0.2, 0.6, 0.9, 1.5] {
            let r = frac * r_ball;
            let v = m.potential(r);
            let v_ball = if r < r_ball {
                -zalpha * (3.0 * r_ball * r_ball - r * r) / (2.0 * r_ball.powi(3))
            } else {
                -zalpha / r
            };
            assert_relative_eq!(v, v_ball, max_relative = 2e-3);
        }
    }

    #[test]
    fn default_radii_lookup() {
        assert_eq!(default_rms_fm(92), Some(5.860));
        assert_eq!(default_rms_fm(21), None);
        assert_eq!(DEFAULT_RMS_FM.len(), 15);
    }
}
