//! B-spline Galerkin pseudo-spectrum of the radial Dirac equation in the
//! dual-kinetic-balance basis, for one angular quantum number κ and one
//! nuclear model. Provides bound states and reduced-Green-function
//! (sum-over-states) applications for perturbed orbitals.
//!
//! Radial convention: H acts on (P, Q) with
//!   P' = -(κ/r)P + (ε + 1 - V)Q
//!   Q' = +(κ/r)Q - (ε - 1 - V)P
//! and ∫(P² + Q²)dr = 1. Energies include the rest mass (bound 1s ≈ 0.87
//! for Z = 92).

mod bspline;

use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use bspline::BSplineBasis;
pub use crate::greens::sommerfeld_energy;

use crate::error::{Error, Result};
use crate::nucleus::NuclearModel;
use crate::quadrature::gauss_legendre;

/// Grid and basis parameters for one pseudo-spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// inner cutoff, Compton units
    pub r_min: f64,
    /// box radius, Compton units
    pub r_max: f64,
    pub n_splines: usize,
    pub order: usize,
    pub quad_per_interval: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            r_min: 1e-6,
            r_max: 60.0,
            n_splines: 60,
            order: 8,
            quad_per_interval: 15,
        }
    }
}

impl GridParams {
    /// Defaults with the box scaled to hold the 1s orbital of charge Z:
    /// r_max = max(40/(αZ), 20) Compton lengths.
    pub fn for_z(z: u32) -> Self {
        let za = crate::nucleus::ALPHA * z as f64;
        GridParams {
            r_max: (40.0 / za).max(20.0),
            ..GridParams::default()
        }
    }
}

/// Exponential breakpoints, the spline basis over them, and a global
/// Gauss-Legendre quadrature grid with per-interval cumulative-integration
/// matrices (Lagrange panels, spectrally accurate for spline products).
#[derive(Debug)]
pub struct RadialGrid {
    pub params: GridParams,
    pub basis: BSplineBasis,
    /// all quadrature nodes, interval-major
    pub nodes: Vec<f64>,
    /// matching weights (already mapped)
    pub weights: Vec<f64>,
    /// interval half-widths
    interval_half: Vec<f64>,
    /// per-node spline table (first index, B, B', B'')
    btab: Vec<(usize, Vec<f64>, Vec<f64>, Vec<f64>)>,
    /// canonical cumulative matrix C[a][p] = ∫_{-1}^{u_a} ℓ_p(u) du
    cum: Vec<Vec<f64>>,
    /// canonical GL weights
    wcanon: Vec<f64>,
}

impl RadialGrid {
    pub fn new(params: GridParams) -> Result<Self> {
        if params.order < 4 || params.n_splines < params.order + 2 {
            return Err(Error::Config(format!(
                "need order >= 4 and n_splines > order+1, got {params:?}"
            )));
        }
        if !(params.r_min > 0.0 && params.r_max > params.r_min) {
            return Err(Error::Config("bad radial bounds".into()));
        }
        let m = params.n_splines - params.order + 1; // intervals
        let ratio = params.r_max / params.r_min;
        let breakpoints: Vec<f64> = (0..=m)
            .map(|j| params.r_min * ratio.powf(j as f64 / m as f64))
            .collect();
        let basis = BSplineBasis::new(&breakpoints, params.order);
        let q = params.quad_per_interval;
        let rule = gauss_legendre(q)?;
        let mut nodes = Vec::with_capacity(m * q);
        let mut weights = Vec::with_capacity(m * q);
        let mut interval_half = Vec::with_capacity(m);
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            interval_half.push(h);
            for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(c + h * u);
                weights.push(h * wu);
            }
        }
        let btab = nodes.iter().map(|&x| basis.eval_all(x)).collect();
        let cum = cumulative_matrix(&rule.nodes);
        Ok(RadialGrid {
            params,
            basis,
            nodes,
            weights,
            interval_half,
            btab,
            cum,
            wcanon: rule.weights.clone(),
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Spline table at node q: (first nonzero spline, B, B', B'').
    pub fn spline_table(&self, q: usize) -> (usize, &[f64], &[f64], &[f64]) {
        let t = &self.btab[q];
        (t.0, &t.1, &t.2, &t.3)
    }

    /// ∫ f dr over the whole grid for node samples f.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Cumulative integral ∫_{r_min}^{r_q} f dr at every node q.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        let q = self.params.quad_per_interval;
        let mut out = vec![0.0; f.len()];
        let mut start = 0.0;
        for (iv, &h) in self.interval_half.iter().enumerate() {
            let base = iv * q;
            for a in 0..q {
                let mut acc = 0.0;
                for p in 0..q {
                    acc += self.cum[a][p] * f[base + p];
                }
                out[base + a] = start + h * acc;
            }
            let full: f64 = (0..q).map(|p| self.wcanon[p] * f[base + p]).sum();
            start += h * full;
        }
        out
    }

    /// Cumulative integral ∫_{r_q}^{r_max} f dr at every node q.
    pub fn cumulative_rev(&self, f: &[f64]) -> Vec<f64> {
        let fw = self.cumulative(f);
        let total = {
            let q = self.params.quad_per_interval;
            let mut t = 0.0;
            for (iv, &h) in self.interval_half.iter().enumerate() {
                let base = iv * q;
                let full: f64 = (0..q).map(|p| self.wcanon[p] * f[base + p]).sum();
                t += h * full;
            }
            t
        };
        fw.iter().map(|v| total - v).collect()
    }
}

/// C[a][p] = ∫_{-1}^{u_a} ℓ_p(u) du on the canonical nodes, via a fine rule
/// and barycentric Lagrange evaluation.
fn cumulative_matrix(unodes: &[f64]) -> Vec<Vec<f64>> {
    let q = unodes.len();
    // barycentric weights
    let mut bw = vec![1.0f64; q];
    for i in 0..q {
        for j in 0..q {
            if i != j {
                bw[i] /= unodes[i] - unodes[j];
            }
        }
    }
    let lagrange = |p: usize, x: f64| -> f64 {
        let mut prod = 1.0;
        for (j, &uj) in unodes.iter().enumerate() {
            if j != p {
                prod *= x - uj;
            }
        }
        prod * bw[p]
    };
    let fine = gauss_legendre(2 * q + 8).expect("rule in range");
    let mut c = vec![vec![0.0f64; q]; q];
    for (a, &ua) in unodes.iter().enumerate() {
        let half = 0.5 * (ua + 1.0);
        for p in 0..q {
            let mut acc = 0.0;
            for (&x, &w) in fine.nodes.iter().zip(&fine.weights) {
                let uu = -1.0 + half * (x + 1.0);
                acc += w * lagrange(p, uu);
            }
            c[a][p] = acc * half;
        }
    }
    c
}

/// One solved radial orbital on the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundState {
    pub kappa: i32,
    pub energy: f64,
    /// large component P at the grid nodes
    pub large: Vec<f64>,
    /// small component Q at the grid nodes
    pub small: Vec<f64>,
    /// index in the parent spectrum
    pub index: usize,
}

/// Full pseudo-spectrum for one κ.
#[derive(Debug, Clone)]
pub struct DiracSpectrum {
    pub kappa: i32,
    pub model: NuclearModel,
    pub energies: Vec<f64>,
    pub large: Vec<Vec<f64>>,
    pub small: Vec<Vec<f64>>,
    pub grid: Arc<RadialGrid>,
}

impl DiracSpectrum {
    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    /// Lowest gap state (-1 < ε < 1) with the requested number of radial
    /// nodes in P. Spurious intruders (an artifact of the unbalanced spline
    /// pair basis for κ > 0) are rejected by their anomalous small/large
    /// norm ratio.
    pub fn bound_state(&self, n_radial_nodes: usize) -> Result<BoundState> {
        let mut candidates: Vec<usize> = (0..self.n_states())
            .filter(|&i| self.energies[i] > -1.0 && self.energies[i] < 1.0)
            .collect();
        candidates.sort_by(|&a, &b| self.energies[a].partial_cmp(&self.energies[b]).unwrap());
        for &i in &candidates {
            if self.small_ratio(i) > 0.5 {
                continue; // spurious intruder
            }
            if count_nodes(&self.large[i]) == n_radial_nodes {
                return Ok(BoundState {
                    kappa: self.kappa,
                    energy: self.energies[i],
                    large: self.large[i].clone(),
                    small: self.small[i].clone(),
                    index: i,
                });
            }
        }
        Err(Error::Eigen(format!(
            "no bound state with {n_radial_nodes} nodes for kappa = {}",
            self.kappa
        )))
    }

    /// ∫Q²dr / ∫P²dr; genuine gap states have ratios of order (αZ)²,
    /// spurious intruders of order 1.
    pub fn small_ratio(&self, i: usize) -> f64 {
        let mut qs = 0.0;
        let mut ps = 0.0;
        for q in 0..self.grid.n_nodes() {
            qs += self.grid.weights[q] * self.small[i][q] * self.small[i][q];
            ps += self.grid.weights[q] * self.large[i][q] * self.large[i][q];
        }
        qs / ps
    }

    pub fn bound_1s(&self) -> Result<BoundState> {
        if self.kappa != -1 {
            return Err(Error::Domain("1s lives in the kappa = -1 spectrum".into()));
        }
        self.bound_state(0)
    }

    /// Σ_{n ∉ excluded} |n⟩⟨n|source⟩ / (ε_ref - ε_n), the reduced-Green
    /// (sum-over-states) application. The excluded set must contain every
    /// state degenerate with ε_ref; source is (large, small) node samples.
    pub fn reduced_green_apply(
        &self,
        excluded: &[usize],
        eps_ref: f64,
        src_large: &[f64],
        src_small: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let nn = self.grid.n_nodes();
        if src_large.len() != nn || src_small.len() != nn {
            return Err(Error::Domain("source not sampled on the grid".into()));
        }
        let mut out_l = vec![0.0; nn];
        let mut out_s = vec![0.0; nn];
        let mut prod = vec![0.0; nn];
        for n in 0..self.n_states() {
            if excluded.contains(&n) {
                continue;
            }
            let de = eps_ref - self.energies[n];
            if de.abs() < 1e-10 {
                return Err(Error::Eigen(format!(
                    "state {n} degenerate with the reference energy but not excluded"
                )));
            }
            for q in 0..nn {
                prod[q] = self.large[n][q] * src_large[q] + self.small[n][q] * src_small[q];
            }
            let amp = self.grid.integrate(&prod) / de;
            for q in 0..nn {
                out_l[q] += amp * self.large[n][q];
                out_s[q] += amp * self.small[n][q];
            }
        }
        Ok((out_l, out_s))
    }

    /// ⟨bra|f(r)|ket⟩ = ∫ f (P_b P_k + Q_b Q_k) dr for two states given as
    /// node samples.
    pub fn matrix_element(
        &self,
        f: &[f64],
        bra: (&[f64], &[f64]),
        ket: (&[f64], &[f64]),
    ) -> f64 {
        let mut acc = 0.0;
        for q in 0..self.grid.n_nodes() {
            acc += self.grid.weights[q]
                * f[q]
                * (bra.0[q] * ket.0[q] + bra.1[q] * ket.1[q]);
        }
        acc
    }
}

fn count_nodes(p: &[f64]) -> usize {
    // amplitude-significant sign changes only: far-tail spline noise sits
    // orders of magnitude below the orbital scale, while spurious states
    // oscillate at full amplitude and rack up a huge count
    let maxv = p.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let thresh = 1e-3 * maxv;
    let mut nodes = 0;
    let mut last = 0.0f64;
    for &v in p {
        if v.abs() < thresh {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

/// Assemble and solve the Galerkin generalized eigenproblem in the
/// two-family spline basis (B_i, 0), (0, B_j), interior splines only
/// (P = Q = 0 at both endpoints). Spurious κ > 0 intruders are screened
/// out downstream by node counting and the small/large norm ratio.
pub fn build_spectrum(
    kappa: i32,
    model: &NuclearModel,
    grid: &Arc<RadialGrid>,
) -> Result<DiracSpectrum> {
    if kappa == 0 {
        return Err(Error::Domain("kappa must be nonzero".into()));
    }
    let (h, s) = assemble_matrices(kappa, model, grid);
    solve_generalized(kappa, model, grid, h, s)
}

/// Galerkin matrices of the dual-kinetic-balance problem.
#[doc(hidden)]
pub fn assemble_matrices(
    kappa: i32,
    model: &NuclearModel,
    grid: &Arc<RadialGrid>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let k_ord = grid.params.order;
    let nb = grid.basis.n_splines;
    let dim = 2 * (nb - 2);
    let nn = grid.n_nodes();
    let kf = kappa as f64;

    let vpot: Vec<f64> = grid.nodes.iter().map(|&r| model.potential(r)).collect();

    // local component tables per node: for each nonzero spline j at node q,
    // the (P, Q, P', Q') of both basis families
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut s = DMatrix::<f64>::zeros(dim, dim);
    for q in 0..nn {
        let r = grid.nodes[q];
        let w = grid.weights[q];
        let v = vpot[q];
        let (first, bv, b1, _) = &grid.btab[q];
        let kor = kf / r;
        // families: 0 = pure large (B_i, 0), 1 = pure small (0, B_i)
        // comp[f][j] = (P, Q, P', Q')
        let mut comp = [[(0.0f64, 0.0f64, 0.0f64, 0.0f64); 16]; 2];
        for j in 0..k_ord {
            let (b, d1) = (bv[j], b1[j]);
            comp[0][j] = (b, 0.0, d1, 0.0);
            comp[1][j] = (0.0, b, 0.0, d1);
        }
        for fu in 0..2 {
            for ju in 0..k_ord {
                let iu = first + ju;
                let Some(row) = dof_index(fu, iu, nb) else {
                    continue;
                };
                let (pu, qu, _, _) = comp[fu][ju];
                for fv in 0..2 {
                    for jv in 0..k_ord {
                        let iv = first + jv;
                        let Some(col) = dof_index(fv, iv, nb) else {
                            continue;
                        };
                        let (pv, qv, dpv, dqv) = comp[fv][jv];
                        let hval = pu * (1.0 + v) * pv
                            + pu * (-dqv + kor * qv)
                            + qu * (dpv + kor * pv)
                            + qu * (v - 1.0) * qv;
                        h[(row, col)] += w * hval;
                        s[(row, col)] += w * (pu * pv + qu * qv);
                    }
                }
            }
        }
    }

    (h, s)
}

/// Retained degrees of freedom: both component families keep the interior
/// splines 1..=n-2, forcing P = Q = 0 at the endpoints. P's vanishing is
/// what makes the first-derivative terms symmetric; Q's adds the matching
/// box condition.
fn dof_index(family: usize, spline: usize, nb: usize) -> Option<usize> {
    if spline >= 1 && spline <= nb - 2 {
        Some(family * (nb - 2) + (spline - 1))
    } else {
        None
    }
}

fn solve_generalized(
    kappa: i32,
    model: &NuclearModel,
    grid: &Arc<RadialGrid>,
    mut h: DMatrix<f64>,
    mut s: DMatrix<f64>,
) -> Result<DiracSpectrum> {
    let k_ord = grid.params.order;
    let nb = grid.basis.n_splines;
    let dim = 2 * (nb - 2);
    let nn = grid.n_nodes();

    // symmetrize quadrature noise, scale, reduce, solve
    for i in 0..dim {
        for j in 0..i {
            let hv = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = hv;
            h[(j, i)] = hv;
            let sv = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = sv;
            s[(j, i)] = sv;
        }
    }
    let scale: Vec<f64> = (0..dim).map(|i| 1.0 / s[(i, i)].sqrt()).collect();
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] *= scale[i] * scale[j];
            s[(i, j)] *= scale[i] * scale[j];
        }
    }
    let chol = nalgebra::Cholesky::new(s.clone())
        .ok_or_else(|| Error::Eigen("overlap matrix not positive definite".into()))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&h)
        .ok_or_else(|| Error::Eigen("singular overlap factor".into()))?;
    let xt = x.transpose();
    let a_t = l
        .solve_lower_triangular(&xt)
        .ok_or_else(|| Error::Eigen("singular overlap factor".into()))?;
    let mut a = a_t;
    for i in 0..dim {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(a);
    let lt = l.transpose();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

    let mut energies = Vec::with_capacity(dim);
    let mut large = Vec::with_capacity(dim);
    let mut small = Vec::with_capacity(dim);
    for &idx in &order {
        energies.push(eig.eigenvalues[idx]);
        let y = eig.eigenvectors.column(idx).into_owned();
        let c = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::Eigen("back substitution failed".into()))?;
        // undo diagonal scaling
        let coef: Vec<f64> = (0..dim).map(|i| c[i] * scale[i]).collect();
        // materialize on the nodes
        let mut pl = vec![0.0f64; nn];
        let mut sm = vec![0.0f64; nn];
        for q in 0..nn {
            let (first, bv, _, _) = &grid.btab[q];
            for j in 0..k_ord {
                let i = first + j;
                let b = bv[j];
                if let Some(u) = dof_index(0, i, nb) {
                    pl[q] += coef[u] * b;
                }
                if let Some(u) = dof_index(1, i, nb) {
                    sm[q] += coef[u] * b;
                }
            }
        }
        // normalize and fix the overall sign at the large-component peak
        let norm2: f64 = (0..nn)
            .map(|q| grid.weights[q] * (pl[q] * pl[q] + sm[q] * sm[q]))
            .sum();
        let ninv = 1.0 / norm2.sqrt();
        let peak = pl
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        let sign = if pl[peak] < 0.0 { -1.0 } else { 1.0 };
        for q in 0..nn {
            pl[q] *= ninv * sign;
            sm[q] *= ninv * sign;
        }
        large.push(pl);
        small.push(sm);
    }

    Ok(DiracSpectrum {
        kappa,
        model: *model,
        energies,
        large,
        small,
        grid: grid.clone(),
    })
}

// ---------------------------------------------------------------------------
// optional on-disk cache
// ---------------------------------------------------------------------------

/// Serialized pseudo-spectrum: a self-describing JSON layout holding the
/// grid parameters, energies, and node samples of every state.
#[derive(Serialize, Deserialize)]
struct SpectrumRecord {
    kappa: i32,
    model: NuclearModel,
    grid: GridParams,
    energies: Vec<f64>,
    large: Vec<Vec<f64>>,
    small: Vec<Vec<f64>>,
}

/// Cache of spectra keyed by (Z, shape, κ, basis size, order, grid bounds).
/// Purely a performance feature: loads are bit-identical to fresh builds.
pub struct SpectrumCache {
    pub dir: PathBuf,
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SpectrumCache { dir: dir.into() }
    }

    fn key(kappa: i32, model: &NuclearModel, grid: &GridParams) -> String {
        let shape = match model.shape {
            crate::nucleus::Shape::Point => "point".to_string(),
            crate::nucleus::Shape::Fermi { c, a, .. } => format!("fermi_c{c:.12e}_a{a:.12e}"),
            crate::nucleus::Shape::Shell { radius } => format!("shell_r{radius:.12e}"),
        };
        format!(
            "spectrum_z{}_{}_k{}_n{}_o{}_q{}_rmin{:.6e}_rmax{:.6e}.json",
            model.z,
            shape,
            kappa,
            grid.n_splines,
            grid.order,
            grid.quad_per_interval,
            grid.r_min,
            grid.r_max
        )
    }

    pub fn load(
        &self,
        kappa: i32,
        model: &NuclearModel,
        grid: &Arc<RadialGrid>,
    ) -> Option<DiracSpectrum> {
        let path = self.dir.join(Self::key(kappa, model, &grid.params));
        let data = std::fs::read_to_string(path).ok()?;
        let rec: SpectrumRecord = serde_json::from_str(&data).ok()?;
        if rec.grid != grid.params || rec.kappa != kappa || rec.model != *model {
            return None;
        }
        Some(DiracSpectrum {
            kappa: rec.kappa,
            model: rec.model,
            energies: rec.energies,
            large: rec.large,
            small: rec.small,
            grid: grid.clone(),
        })
    }

    pub fn store(&self, spec: &DiracSpectrum) -> Result<()> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| Error::Cache(format!("create {}: {e}", self.dir.display())))?;
        let rec = SpectrumRecord {
            kappa: spec.kappa,
            model: spec.model,
            grid: spec.grid.params,
            energies: spec.energies.clone(),
            large: spec.large.clone(),
            small: spec.small.clone(),
        };
        let path = self.dir.join(Self::key(spec.kappa, &spec.model, &spec.grid.params));
        let body = serde_json::to_string(&rec).map_err(|e| Error::Cache(e.to_string()))?;
        std::fs::write(&path, body).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }
}

/// Convenience: spectrum with optional caching.
pub fn build_spectrum_cached(
    kappa: i32,
    model: &NuclearModel,
    grid: &Arc<RadialGrid>,
    cache: Option<&SpectrumCache>,
) -> Result<DiracSpectrum> {
    if let Some(c) = cache {
        if let Some(s) = c.load(kappa, model, grid) {
            return Ok(s);
        }
    }
    let spec = build_spectrum(kappa, model, grid)?;
    if let Some(c) = cache {
        c.store(&spec)?;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nucleus::{NuclearModel, ALPHA};
    use approx::assert_relative_eq;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::new(GridParams::for_z(92)).unwrap())
    }

    fn grid_for(z: u32) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::new(GridParams::for_z(z)).unwrap())
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let g = grid();
        let f: Vec<f64> = g.nodes.iter().map(|&r| r * r).collect();
        let cum = g.cumulative(&f);
        for (q, &r) in g.nodes.iter().enumerate().step_by(37) {
            let exact = (r.powi(3) - g.params.r_min.powi(3)) / 3.0;
            assert_relative_eq!(cum[q], exact, max_relative = 1e-12);
        }
        let rev = g.cumulative_rev(&f);
        let exact_total = (g.params.r_max.powi(3) - g.params.r_min.powi(3)) / 3.0;
        assert_relative_eq!(cum[10] + rev[10], exact_total, max_relative = 1e-12);
    }

    #[test]
    fn sommerfeld_eigenvalues_point_nucleus() {
        for &z in &[20u32, 60, 92] {
            let g = grid_for(z);
            let model = NuclearModel::point(z);
            let za = ALPHA * z as f64;
            for &(kappa, n, nodes) in
                &[(-1i32, 1u32, 0usize), (-1, 2, 1), (1, 2, 0), (-2, 2, 0)]
            {
                let spec = build_spectrum(kappa, &model, &g).unwrap();
                let st = spec.bound_state(nodes).unwrap();
                let exact = sommerfeld_energy(za, n, kappa);
                let rel = (st.energy - exact).abs() / exact;
                assert!(
                    rel < 1e-8,
                    "Z={z} kappa={kappa} n={n}: rel err {rel:.2e} ({} vs {exact})",
                    st.energy
                );
            }
        }
    }

    #[test]
    fn spectrum_orthonormal_and_complete_count() {
        let g = grid();
        let model = NuclearModel::point(92);
        let spec = build_spectrum(-1, &model, &g).unwrap();
        assert_eq!(spec.n_states(), 2 * (g.basis.n_splines - 2));
        // spot-check orthonormality
        let nn = g.n_nodes();
        for &(i, j) in &[(0usize, 0usize), (30, 30), (30, 31), (57, 80), (100, 100)] {
            let mut acc = 0.0;
            for q in 0..nn {
                acc += g.weights[q]
                    * (spec.large[i][q] * spec.large[j][q] + spec.small[i][q] * spec.small[j][q]);
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!(
                (acc - expect).abs() < 1e-10,
                "<{i}|{j}> = {acc}"
            );
        }
    }

    #[test]
    fn bound_1s_properties() {
        let g = grid();
        let model = NuclearModel::point(92);
        let spec = build_spectrum(-1, &model, &g).unwrap();
        let st = spec.bound_1s().unwrap();
        assert_eq!(count_nodes(&st.large), 0);
        let norm: f64 = (0..g.n_nodes())
            .map(|q| g.weights[q] * (st.large[q].powi(2) + st.small[q].powi(2)))
            .sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
        // ⟨r⟩ finite and of hydrogenic size ~ 3/(2Zα) · (corrections)
        let rbar: f64 = (0..g.n_nodes())
            .map(|q| {
                g.weights[q] * g.nodes[q] * (st.large[q].powi(2) + st.small[q].powi(2))
            })
            .sum();
        assert!(rbar > 0.5 && rbar < 3.0, "unexpected <r> = {rbar}");
    }

    #[test]
    fn fermi_finite_size_shift_positive_and_stable() {
        let g = grid();
        let model_p = NuclearModel::point(92);
        let model_f = NuclearModel::fermi_from_rms(92, 5.860).unwrap();
        let e_p = build_spectrum(-1, &model_p, &g)
            .unwrap()
            .bound_1s()
            .unwrap()
            .energy;
        let e_f = build_spectrum(-1, &model_f, &g)
            .unwrap()
            .bound_1s()
            .unwrap()
            .energy;
        let shift = e_f - e_p;
        assert!(shift > 0.0, "finite size must weaken binding");
        // known scale: ~198 eV for uranium
        let shift_ev = shift * crate::nucleus::ELECTRON_MASS_EV;
        assert!(
            (150.0..260.0).contains(&shift_ev),
            "1s finite-size shift {shift_ev} eV out of expected range"
        );
        // doubled basis: shift stable to 1%
        let g2 = Arc::new(
            RadialGrid::new(GridParams {
                n_splines: 120,
                ..GridParams::default()
            })
            .unwrap(),
        );
        let e_p2 = build_spectrum(-1, &model_p, &g2)
            .unwrap()
            .bound_1s()
            .unwrap()
            .energy;
        let e_f2 = build_spectrum(-1, &model_f, &g2)
            .unwrap()
            .bound_1s()
            .unwrap()
            .energy;
        let shift2 = e_f2 - e_p2;
        assert!(
            ((shift - shift2) / shift2).abs() < 0.01,
            "shift drifted: {shift} vs {shift2}"
        );
    }

    #[test]
    fn reduced_green_excludes_reference() {
        let g = grid_for(40);
        let model = NuclearModel::point(40);
        let spec = build_spectrum(-1, &model, &g).unwrap();
        let st = spec.bound_1s().unwrap();
        let (tl, ts) = spec
            .reduced_green_apply(&[st.index], st.energy, &st.large, &st.small)
            .unwrap();
        let mut overlap = 0.0;
        for q in 0..g.n_nodes() {
            overlap += g.weights[q] * (tl[q] * st.large[q] + ts[q] * st.small[q]);
        }
        assert!(overlap.abs() < 1e-10, "<a|reduced a> = {overlap}");
    }

    #[test]
    fn closure_reproduces_smooth_function() {
        // expand the Z=60 1s orbital in the Z=40 pseudo-spectrum
        let g = grid_for(40);
        let spec40 = build_spectrum(-1, &NuclearModel::point(40), &g).unwrap();
        let spec60 = build_spectrum(-1, &NuclearModel::point(60), &g).unwrap();
        let target = spec60.bound_1s().unwrap();
        let nn = g.n_nodes();
        let mut rec_l = vec![0.0; nn];
        let mut rec_s = vec![0.0; nn];
        for n in 0..spec40.n_states() {
            let mut amp = 0.0;
            for q in 0..nn {
                amp += g.weights[q]
                    * (spec40.large[n][q] * target.large[q] + spec40.small[n][q] * target.small[q]);
            }
            for q in 0..nn {
                rec_l[q] += amp * spec40.large[n][q];
                rec_s[q] += amp * spec40.small[n][q];
            }
        }
        let mut err2 = 0.0;
        for q in 0..nn {
            err2 += g.weights[q]
                * ((rec_l[q] - target.large[q]).powi(2) + (rec_s[q] - target.small[q]).powi(2));
        }
        assert!(err2.sqrt() < 1e-6, "closure L2 error {}", err2.sqrt());
    }

    #[test]
    fn cache_round_trip_bit_identical() {
        let g = grid();
        let model = NuclearModel::point(30);
        let dir = std::env::temp_dir().join("vpscreen_cache_test");
        let _ = std::fs::remove_dir_all(&dir);
        let cache = SpectrumCache::new(&dir);
        let fresh = build_spectrum_cached(-1, &model, &g, Some(&cache)).unwrap();
        let loaded = build_spectrum_cached(-1, &model, &g, Some(&cache)).unwrap();
        assert_eq!(fresh.energies, loaded.energies);
        assert_eq!(fresh.large, loaded.large);
        assert_eq!(fresh.small, loaded.small);
        let _ = std::fs::remove_dir_all(&dir);
    }
}
