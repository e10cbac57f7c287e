//! Vacuum-polarization screening corrections to the ground-state energy of
//! two-electron (helium-like) ions, Z = 20–100.
//!
//! The crate provides, bottom-up:
//!
//! * [`specfun`] — complex log-gamma, Whittaker M/W, modified spherical Bessel,
//! * [`quadrature`] — Gauss-Legendre and double-exponential rules, semi-infinite
//!   and log-endpoint drivers,
//! * [`nucleus`] — nuclear charge models (point / Fermi / shell) and V(r),
//! * [`dirac_basis`] — B-spline pseudo-spectra of the radial Dirac equation,
//! * [`greens`] — analytic radial Coulomb-Dirac Green function, its odd/even
//!   split in the nuclear charge, and the loop trace sums,
//! * [`uehling`] — one-body and two-body Uehling potentials,
//! * [`wk`] — Wichmann-Kroll one-body potential and two-body loop energies,
//! * [`twobody`] — radial two-electron matrix elements for s₁/₂ pairs,
//! * [`assembly`] — the screening corrections and the dE/dZ control identity.
//!
//! Internal units are relativistic (ħ = c = m_e = 1); lengths in electron
//! Compton wavelengths, energies in m_e c², converted at the reporting
//! boundary only.

pub mod assembly;
pub mod dirac_basis;
pub mod error;
pub mod greens;
pub mod interp;
pub mod nucleus;
pub mod quadrature;
pub mod specfun;
pub mod twobody;
pub mod uehling;
pub mod wk;

pub use error::{Error, Result};
pub use specfun::{LogScaled, WhittakerParams, C64};
