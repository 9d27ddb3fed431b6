//! Truncated Fock-space engine.
//!
//! Basis states `|n_x, n_y⟩` with `0 ≤ n_x, n_y < n_cut`, flattened n_x-major
//! (`n_x · n_cut + n_y`). Raising transitions that leave the box are dropped.
//! Evolution uses a single real-symmetric eigendecomposition of `H`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::energy_flux;
use crate::model::{InitialConditions, Mode, ModelParams};
use crate::series::{Channel, ObservableSeries, TimeGrid};

/// Truncated coherent weight above which [`CoherentPreparation::warning`] is set.
pub const TRUNCATION_WARN: f64 = 1e-6;

/// Eigenvalues of `ρ` at or below this are skipped in the entropy sum.
pub const EPS_LAMBDA: f64 = 1e-14;

/// Allowed deviation of a reduced density matrix from unit trace and
/// positivity before it is rejected.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    n_cut: usize,
}

impl FockBasis {
    pub fn new(n_cut: usize) -> Result<Self> {
        if n_cut < 2 {
            return Err(Error::CutoffTooSmall(n_cut));
        }
        Ok(Self { n_cut })
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn dim(&self) -> usize {
        self.n_cut * self.n_cut
    }

    pub fn index(&self, n_x: usize, n_y: usize) -> usize {
        debug_assert!(n_x < self.n_cut && n_y < self.n_cut);
        n_x * self.n_cut + n_y
    }

    pub fn occupations_of(&self, index: usize) -> (usize, usize) {
        (index / self.n_cut, index % self.n_cut)
    }

    fn check_same(&self, other: &FockBasis) -> Result<()> {
        if self != other {
            return Err(Error::IncompatibleBasis {
                left: self.n_cut,
                right: other.n_cut,
            });
        }
        Ok(())
    }
}

/// Dense Hamiltonian matrix, split into the free (diagonal) part and the
/// coupling so that subsystem energies can be read off separately.
#[derive(Debug, Clone, PartialEq)]
pub struct FockHamiltonian {
    basis: FockBasis,
    params: ModelParams,
    h: DMatrix<f64>,
    coupling: DMatrix<f64>,
}

impl FockHamiltonian {
    pub fn build(params: &ModelParams, n_cut: usize) -> Result<Self> {
        let basis = FockBasis::new(n_cut)?;
        let dim = basis.dim();
        let (wx, wy, half_g) = (params.omega_x(), params.omega_y(), 0.5 * params.g());
        let mut coupling = DMatrix::zeros(dim, dim);
        let mut h = DMatrix::zeros(dim, dim);
        for nx in 0..n_cut {
            for ny in 0..n_cut {
                let i = basis.index(nx, ny);
                h[(i, i)] = wx * (nx as f64 + 0.5) - wy * (ny as f64 + 0.5);
                // upper neighbours only; the lower ones come from symmetry
                if nx + 1 < n_cut && ny + 1 < n_cut {
                    let j = basis.index(nx + 1, ny + 1);
                    let v = half_g * (((nx + 1) * (ny + 1)) as f64).sqrt();
                    coupling[(i, j)] = v;
                    coupling[(j, i)] = v;
                }
                if nx + 1 < n_cut && ny > 0 {
                    let j = basis.index(nx + 1, ny - 1);
                    let v = half_g * (((nx + 1) * ny) as f64).sqrt();
                    coupling[(i, j)] = v;
                    coupling[(j, i)] = v;
                }
            }
        }
        h += &coupling;
        Ok(Self {
            basis,
            params: *params,
            h,
            coupling,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// The `g x y` part alone.
    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    basis: FockBasis,
    c: DVector<Complex64>,
}

impl FockState {
    pub fn new(basis: FockBasis, c: DVector<Complex64>) -> Result<Self> {
        if c.len() != basis.dim() {
            return Err(Error::InvalidGrid(format!(
                "state has {} coefficients, basis needs {}",
                c.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, c })
    }

    pub fn basis_state(basis: FockBasis, n_x: usize, n_y: usize) -> Self {
        let mut c = DVector::zeros(basis.dim());
        c[basis.index(n_x, n_y)] = Complex64::new(1.0, 0.0);
        Self { basis, c }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &DVector<Complex64> {
        &self.c
    }

    pub fn norm(&self) -> f64 {
        self.c.norm()
    }

    fn amplitude(&self, n_x: usize, n_y: usize) -> Complex64 {
        self.c[self.basis.index(n_x, n_y)]
    }
}

/// Result of projecting a coherent state onto the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentPreparation {
    pub state: FockState,
    /// Poisson weight `Σ_{n ≥ n_cut} e^{−|α|²} |α|^{2n}/n!` that was cut off.
    pub truncated_weight: f64,
}

impl CoherentPreparation {
    pub fn warning(&self) -> Option<String> {
        (self.truncated_weight > TRUNCATION_WARN).then(|| {
            format!(
                "coherent state truncated at n_cut = {}: dropped weight {:.3e}",
                self.state.basis.n_cut, self.truncated_weight
            )
        })
    }
}

/// `|α⟩ ⊗ |0⟩` restricted to the basis and renormalized.
pub fn coherent_initial(alpha: Complex64, basis: FockBasis) -> CoherentPreparation {
    let r2 = alpha.norm_sqr();
    let mut c = DVector::zeros(basis.dim());
    let mut term = Complex64::new((-0.5 * r2).exp(), 0.0);
    for n in 0..basis.n_cut {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        c[basis.index(n, 0)] = term;
    }

    // Tail summed directly so that tiny weights are not lost to cancellation.
    let mut weight = term.norm_sqr();
    let mut tail = 0.0;
    let mut n = basis.n_cut;
    loop {
        weight *= r2 / n as f64;
        tail += weight;
        if weight <= 1e-18 * tail.max(f64::MIN_POSITIVE) || weight == 0.0 || n > basis.n_cut + 10_000 {
            break;
        }
        n += 1;
    }

    let norm = c.norm();
    c.unscale_mut(norm);
    CoherentPreparation {
        state: FockState { basis, c },
        truncated_weight: tail,
    }
}

/// `H = U E Uᵀ`, computed once and reused for every time.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    basis: FockBasis,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralPropagator {
    pub fn new(h: &FockHamiltonian) -> Result<Self> {
        let eig = SymmetricEigen::try_new(h.h.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::EigendecompositionFailure("symmetric eigensolver did not converge".into()))?;
        if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::EigendecompositionFailure("non-finite eigenvalue".into()));
        }
        Ok(Self {
            basis: h.basis,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// Expand `psi0` in the eigenbasis once; [`Evolution::at`] then costs
    /// two real matrix-vector products per time.
    pub fn prepare(&self, psi0: &FockState) -> Result<Evolution<'_>> {
        self.basis.check_same(&psi0.basis)?;
        let vt = self.vectors.transpose();
        let re = &vt * psi0.c.map(|z| z.re);
        let im = &vt * psi0.c.map(|z| z.im);
        Ok(Evolution {
            propagator: self,
            modal: re.zip_map(&im, Complex64::new),
        })
    }

    pub fn evolve(&self, psi0: &FockState, t: f64) -> Result<FockState> {
        Ok(self.prepare(psi0)?.at(t))
    }
}

#[derive(Debug, Clone)]
pub struct Evolution<'a> {
    propagator: &'a SpectralPropagator,
    modal: DVector<Complex64>,
}

impl Evolution<'_> {
    /// `c(t) = U e^{−iEt} Uᵀ c(0)`.
    pub fn at(&self, t: f64) -> FockState {
        let p = self.propagator;
        let phased = self
            .modal
            .zip_map(&p.energies, |d, e| d * Complex64::from_polar(1.0, -e * t));
        let re = &p.vectors * phased.map(|z| z.re);
        let im = &p.vectors * phased.map(|z| z.im);
        FockState {
            basis: p.basis,
            c: re.zip_map(&im, Complex64::new),
        }
    }
}

/// Marginal distributions `(P_{n_x}, P_{n_y})`.
pub fn populations(psi: &FockState) -> (Vec<f64>, Vec<f64>) {
    let n = psi.basis.n_cut;
    let mut px = vec![0.0; n];
    let mut py = vec![0.0; n];
    for (i, z) in psi.c.iter().enumerate() {
        let (nx, ny) = psi.basis.occupations_of(i);
        let w = z.norm_sqr();
        px[nx] += w;
        py[ny] += w;
    }
    (px, py)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockExpectations {
    pub n_x: f64,
    pub n_y: f64,
    pub q: f64,
    pub d: f64,
    pub energy: f64,
}

fn quadratic_form(m: &DMatrix<f64>, c: &DVector<Complex64>) -> f64 {
    let re = c.map(|z| z.re);
    let im = c.map(|z| z.im);
    re.dot(&(m * &re)) + im.dot(&(m * &im))
}

pub fn expectations(psi: &FockState, h: &FockHamiltonian) -> Result<FockExpectations> {
    psi.basis.check_same(&h.basis)?;
    let (px, py) = populations(psi);
    let mean = |p: &[f64]| p.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>();
    let (n_x, n_y) = (mean(&px), mean(&py));
    Ok(FockExpectations {
        n_x,
        n_y,
        q: n_x + n_y,
        d: n_x - n_y,
        energy: quadratic_form(&h.h, &psi.c),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub rho: DMatrix<Complex64>,
    pub mode: Mode,
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Partial trace over the other mode.
pub fn reduced_density(psi: &FockState, mode: Mode) -> ReducedDensity {
    let n = psi.basis.n_cut;
    let amp = |keep: usize, other: usize| match mode {
        Mode::X => psi.amplitude(keep, other),
        Mode::Y => psi.amplitude(other, keep),
    };
    let mut rho = DMatrix::zeros(n, n);
    for m in 0..n {
        for k in m..n {
            let v: Complex64 = (0..n).map(|j| amp(m, j) * amp(k, j).conj()).sum();
            rho[(m, k)] = v;
            rho[(k, m)] = v.conj();
        }
    }
    ReducedDensity { rho, mode }
}

/// `−Tr ρ ln ρ` in nats.
pub fn vn_entropy(rho: &ReducedDensity) -> Result<f64> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("trace {trace}")));
    }
    let eig = SymmetricEigen::try_new(rho.rho.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigendecompositionFailure("hermitian eigensolver did not converge".into()))?;
    let mut s = 0.0;
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lambda:e}")));
        }
        if lambda > EPS_LAMBDA {
            s -= lambda * lambda.ln();
        }
    }
    // eigenvalues a rounding step above 1 would give −0
    Ok(s.max(0.0))
}

/// Stack `P_{n_x}` rows (one per time) into a matrix.
pub fn heatmap(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::InvalidGrid("heatmap rows differ in length".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]))
}

/// Centred moving average over `window` time units (valid region only),
/// returned with the matching times.
pub fn moving_average(values: &[f64], grid: &TimeGrid, window: f64) -> (Vec<f64>, Vec<f64>) {
    let w = ((window / grid.dt()).round() as usize).clamp(1, values.len());
    let mut times = Vec::with_capacity(values.len() + 1 - w);
    let mut out = Vec::with_capacity(values.len() + 1 - w);
    let mut acc: f64 = values[..w].iter().sum();
    for start in 0..=values.len() - w {
        if start > 0 {
            acc += values[start + w - 1] - values[start - 1];
        }
        out.push(acc / w as f64);
        times.push(0.5 * (grid.time(start) + grid.time(start + w - 1)));
    }
    (times, out)
}

/// Recurrence period of the slow exchange in `values`: the fast oscillation
/// is averaged out over `window`, and the period is taken as twice the
/// distance between the global maximum and minimum of what remains.
pub fn recurrence_period(values: &[f64], grid: &TimeGrid, window: f64) -> Option<f64> {
    if values.len() != grid.len() || values.len() < 3 {
        return None;
    }
    let (times, smooth) = moving_average(values, grid, window);
    let argmax = (0..smooth.len()).max_by(|&a, &b| smooth[a].total_cmp(&smooth[b]))?;
    let argmin = (0..smooth.len()).min_by(|&a, &b| smooth[a].total_cmp(&smooth[b]))?;
    let half = (times[argmax] - times[argmin]).abs();
    (half > 0.0).then_some(2.0 * half)
}

/// Output of a Fock run.
#[derive(Debug, Clone)]
pub struct FockRun {
    pub series: ObservableSeries,
    pub truncated_weight: f64,
    pub warning: Option<String>,
    /// `max_t |‖c(t)‖ − 1|`.
    pub norm_drift: f64,
}

struct FockSample {
    exp: FockExpectations,
    e_int: f64,
    s_x: f64,
    s_y: f64,
    mu_x: f64,
    norm: f64,
    p_x: Vec<f64>,
}

/// Simulate a coherent x-mode start over `grid`.
///
/// Subsystem energies use the partition of the Fock Hamiltonian itself,
/// `E_x = ω_x(⟨n_x⟩ + ½)`, `E_y = −ω_y(⟨n_y⟩ + ½)`, `E_int = g⟨xy⟩`, so that
/// `E_tot = ⟨H⟩`.
pub fn simulate(params: &ModelParams, init: &InitialConditions, n_cut: usize, grid: &TimeGrid) -> Result<FockRun> {
    let h = FockHamiltonian::build(params, n_cut)?;
    let prep = coherent_initial(init.alpha()?, h.basis);
    let prop = SpectralPropagator::new(&h)?;
    let evolution = prop.prepare(&prep.state)?;
    let t0 = grid.start();
    let (wx, wy) = (params.omega_x(), params.omega_y());

    let samples: Vec<FockSample> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let psi = evolution.at(grid.time(i) - t0);
            let exp = expectations(&psi, &h)?;
            let rho_x = reduced_density(&psi, Mode::X);
            let rho_y = reduced_density(&psi, Mode::Y);
            Ok(FockSample {
                exp,
                e_int: quadratic_form(&h.coupling, &psi.c),
                s_x: vn_entropy(&rho_x)?,
                s_y: vn_entropy(&rho_y)?,
                mu_x: rho_x.purity(),
                norm: psi.norm(),
                p_x: populations(&psi).0,
            })
        })
        .collect::<Result<_>>()?;

    let pick = |f: &dyn Fn(&FockSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    let mut series = ObservableSeries::new(*grid);
    series.insert(Channel::NX, pick(&|s| s.exp.n_x))?;
    series.insert(Channel::NY, pick(&|s| s.exp.n_y))?;
    series.insert(Channel::Q, pick(&|s| s.exp.q))?;
    series.insert(Channel::D, pick(&|s| s.exp.d))?;
    series.insert(Channel::SX, pick(&|s| s.s_x))?;
    series.insert(Channel::SY, pick(&|s| s.s_y))?;
    series.insert(Channel::MuX, pick(&|s| s.mu_x))?;
    series.insert(Channel::EX, pick(&|s| wx * (s.exp.n_x + 0.5)))?;
    series.insert(Channel::EY, pick(&|s| -wy * (s.exp.n_y + 0.5)))?;
    series.insert(Channel::EInt, pick(&|s| s.e_int))?;
    series.insert(Channel::ETot, pick(&|s| s.exp.energy))?;
    if grid.len() >= 3 {
        let (phi_x, phi_y) = energy_flux(&series)?;
        series.insert(Channel::PhiX, phi_x)?;
        series.insert(Channel::PhiY, phi_y)?;
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.p_x.clone()).collect();
    series.set_heatmap(heatmap(&rows)?)?;

    let norm_drift = samples.iter().map(|s| (s.norm - 1.0).abs()).fold(0.0, f64::max);
    Ok(FockRun {
        series,
        warning: prep.warning(),
        truncated_weight: prep.truncated_weight,
        norm_drift,
    })
}
