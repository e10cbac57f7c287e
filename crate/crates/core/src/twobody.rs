//! Radial two-electron matrix elements for s₁/₂ orbital pairs: the
//! zero-frequency photon exchange (Coulomb + magnetic) and the two-body
//! screened (vacuum-polarization photon line) operator.
//!
//! Angular reduction used throughout, for the (1s)² J = 0 permutation-summed
//! contraction of α(1 - α₁·α₂)/r₁₂ between s₁/₂ transition pairs:
//!
//!   value = α [ R⁰(ρc₁, ρc₂) + (8/3) R¹(ρm₁, ρm₂) ]
//!
//! with charge densities ρc = P P' + Q Q' and magnetization densities
//! ρm = (P Q' + Q P')/2 of each electron's transition pair. The monopole
//! Coulomb piece has no exchange contribution (opposite-spin s₁/₂ overlap
//! densities vanish pointwise); the 8/3 collects the direct magnetic
//! dipole-dipole weight 8/9 and twice that from exchange.

use crate::dirac_basis::{BoundState, DiracSpectrum, RadialGrid};
use crate::error::{Error, Result};
use crate::nucleus::{ALPHA, ELECTRON_MASS_EV};
use crate::quadrature::{gauss_legendre, tanh_sinh};
use crate::uehling::twobody_kernel;

/// Radial transition densities of one electron's bra/ket orbital pair.
#[derive(Debug, Clone)]
pub struct TransitionPair {
    /// P₁P₂ + Q₁Q₂ at the grid nodes
    pub charge: Vec<f64>,
    /// (P₁Q₂ + Q₁P₂)/2 at the grid nodes
    pub current: Vec<f64>,
}

impl TransitionPair {
    pub fn new(bra: (&[f64], &[f64]), ket: (&[f64], &[f64])) -> Self {
        let n = bra.0.len();
        let mut charge = vec![0.0; n];
        let mut current = vec![0.0; n];
        for q in 0..n {
            charge[q] = bra.0[q] * ket.0[q] + bra.1[q] * ket.1[q];
            current[q] = 0.5 * (bra.0[q] * ket.1[q] + bra.1[q] * ket.0[q]);
        }
        TransitionPair { charge, current }
    }

    pub fn diagonal(state: &BoundState) -> Self {
        Self::new((&state.large, &state.small), (&state.large, &state.small))
    }
}

/// Generalized Slater integral R^L(f, g) = ∫∫ f(r₁) g(r₂) r_<^L / r_>^{L+1}.
pub fn slater_rl(grid: &RadialGrid, l: u32, f: &[f64], g: &[f64]) -> f64 {
    let li = l as i32;
    let fl: Vec<f64> = f
        .iter()
        .zip(&grid.nodes)
        .map(|(v, r)| v * r.powi(li))
        .collect();
    let fm: Vec<f64> = f
        .iter()
        .zip(&grid.nodes)
        .map(|(v, r)| v * r.powi(-li - 1))
        .collect();
    let inner = grid.cumulative(&fl);
    let outer = grid.cumulative_rev(&fm);
    let mut acc = 0.0;
    for q in 0..grid.n_nodes() {
        let r = grid.nodes[q];
        acc += grid.weights[q] * g[q] * (inner[q] * r.powi(-li - 1) + outer[q] * r.powi(li));
    }
    acc
}

/// L-th Legendre coefficient of a radial two-point kernel:
/// bare Coulomb gives r_<^L/r_>^{L+1} exactly; the screened kernel is the
/// same multipole of χ(|x-y|)/|x-y|.
pub fn multipole_kernel(l: u32, screened: bool, r1: f64, r2: f64) -> Result<f64> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    if !screened {
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        return Ok(lo.powi(l as i32) / hi.powi(l as i32 + 1));
    }
    Ok(screened_multipole(l, r1, r2, 6))
}

/// ((2L+1)/2)∫ χ(R)/R P_L dc with c = 1 - 2v²; the v-substitution leaves
/// only the logarithmic χ singularity at coincidence, handled by the
/// double-exponential rule.
fn screened_multipole(l: u32, r1: f64, r2: f64, level: u32) -> f64 {
    let d2 = (r1 - r2) * (r1 - r2);
    let pl = |c: f64| match l {
        0 => 1.0,
        1 => c,
        2 => 1.5 * c * c - 0.5,
        _ => unimplemented!("multipoles beyond L=2 are not needed"),
    };
    let f = |v: f64| {
        let rr = (d2 + 4.0 * r1 * r2 * v * v).sqrt();
        if rr == 0.0 {
            return 0.0;
        }
        let chi = twobody_kernel(rr).unwrap_or(0.0);
        chi / rr * pl(1.0 - 2.0 * v * v) * 4.0 * v
    };
    // the integrand is singular in v only at coincidence; away from the
    // diagonal a small Gauss rule matches the double-exponential one
    if d2 > 0.01 * (r1 + r2) * (r1 + r2) {
        let rule = gauss_legendre(24).expect("rule in range");
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| 0.5 * w * f(0.5 * (x + 1.0)))
            .sum();
        return (2.0 * l as f64 + 1.0) / 2.0 * val;
    }
    let (val, _) = tanh_sinh(f, 0.0, 1.0, level);
    (2.0 * l as f64 + 1.0) / 2.0 * val
}

/// Screened Slater integral ∫∫ f(r₁) g(r₂) K_L^χ(r₁, r₂); pairs with
/// separations beyond the kernel range are skipped.
pub fn slater_screened(grid: &RadialGrid, l: u32, f: &[f64], g: &[f64]) -> f64 {
    let nn = grid.n_nodes();
    let fmax = f.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let gmax = g.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if fmax == 0.0 || gmax == 0.0 {
        return 0.0;
    }
    // exploit the kernel symmetry: K_L(r1,r2) = K_L(r2,r1)
    let mut acc = 0.0;
    for q1 in 0..nn {
        let r1 = grid.nodes[q1];
        let w1f = grid.weights[q1] * f[q1];
        let w1g = grid.weights[q1] * g[q1];
        if r1 > 45.0 || (f[q1].abs() < 1e-14 * fmax && g[q1].abs() < 1e-14 * gmax) {
            continue;
        }
        let kd = screened_multipole(l, r1, r1, 6);
        acc += w1f * grid.weights[q1] * g[q1] * kd;
        for q2 in q1 + 1..nn {
            let r2 = grid.nodes[q2];
            if r2 - r1 > 25.0 || r2 > 45.0 {
                break;
            }
            if g[q2].abs() < 1e-14 * gmax && f[q2].abs() < 1e-14 * fmax {
                continue;
            }
            let k = screened_multipole(l, r1, r2, 6);
            acc += (w1f * grid.weights[q2] * g[q2] + w1g * grid.weights[q2] * f[q2]) * k;
        }
    }
    acc
}

/// Coulomb and magnetic parts of the ground-singlet photon-exchange
/// contraction between two transition pairs, in mₑc² units.
#[derive(Debug, Clone, Copy)]
pub struct I0Breakdown {
    pub coulomb: f64,
    pub magnetic: f64,
}

impl I0Breakdown {
    pub fn total(&self) -> f64 {
        self.coulomb + self.magnetic
    }
}

/// ⟨(1 2)|α(1-α₁·α₂)/r₁₂|(1 2)⟩ for s₁/₂ transition pairs in the
/// permutation-summed J = 0 ground-state contraction.
pub fn i0_ground_singlet(
    grid: &RadialGrid,
    pair1: &TransitionPair,
    pair2: &TransitionPair,
) -> I0Breakdown {
    let coulomb = ALPHA * slater_rl(grid, 0, &pair1.charge, &pair2.charge);
    let magnetic = ALPHA * (8.0 / 3.0) * slater_rl(grid, 1, &pair1.current, &pair2.current);
    I0Breakdown { coulomb, magnetic }
}

/// Permutation-summed matrix element of the two-body screened operator
/// α(1-α₁·α₂) χ(r₁₂)/r₁₂ on the (1s)² ground state, in eV.
pub fn uehling_b_matrix_element(spectrum: &DiracSpectrum, a: &BoundState) -> Result<f64> {
    if a.kappa != -1 {
        return Err(Error::Domain("ground-state element needs 1s orbitals".into()));
    }
    let grid = &spectrum.grid;
    let pair = TransitionPair::diagonal(a);
    let coulomb = ALPHA * slater_screened(grid, 0, &pair.charge, &pair.charge);
    let magnetic = ALPHA * (8.0 / 3.0) * slater_screened(grid, 1, &pair.current, &pair.current);
    Ok((coulomb + magnetic) * ELECTRON_MASS_EV)
}
