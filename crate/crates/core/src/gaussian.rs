//! Exact Gaussian-state evolution.
//!
//! Phase-space ordering is `ξ = (x, p_x, y, p_y)`. The generator `A = J M`
//! encodes Hamilton's equations, `S(t) = exp(A t)` is symplectic, and a
//! Gaussian state evolves as `⟨ξ⟩ → S⟨ξ⟩`, `σ → S σ Sᵀ`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::model::{InitialConditions, Mode, ModelParams};
use crate::series::{Channel, ObservableSeries, TimeGrid};

/// Safeguard on `ν − ½` below which a reduced state counts as pure.
pub const EPS_NU: f64 = 1e-12;

/// Slack allowed below the physical bound `ν ≥ ½`.
pub const NU_FLOOR_TOL: f64 = 1e-10;

pub fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let j = Matrix4::new(
        0.0,  1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0,  0.0, 0.0, 1.0,
        0.0,  0.0, -1.0, 0.0,
    );
    j
}

/// `‖SᵀJS − J‖_max`.
pub fn symplectic_deviation(s: &Matrix4<f64>) -> f64 {
    let j = symplectic_form();
    (s.transpose() * j * s - j).amax()
}

/// Linear generator of `(ẋ, ṗ_x, ẏ, ṗ_y)`:
/// `ẋ = p_x`, `ṗ_x = −ω_x² x − g y`, `ẏ = −p_y`, `ṗ_y = ω_y² y − g x`.
pub fn build_generator(params: &ModelParams) -> Matrix4<f64> {
    let wx2 = params.omega_x() * params.omega_x();
    let wy2 = params.omega_y() * params.omega_y();
    let g = params.g();
    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0,  1.0, 0.0, 0.0,
        -wx2, 0.0, -g,  0.0,
        0.0,  0.0, 0.0, -1.0,
        -g,   0.0, wy2, 0.0,
    );
    a
}

/// `S(t) = exp(A t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub s: Matrix4<f64>,
    pub t: f64,
}

pub fn propagator(generator: &Matrix4<f64>, t: f64) -> Propagator {
    Propagator {
        s: expm(&(generator * t)),
        t,
    }
}

/// First moments and symmetrized covariance
/// `σ_ij = ½⟨{ξ_i − ⟨ξ_i⟩, ξ_j − ⟨ξ_j⟩}⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: Vector4<f64>,
    pub sigma: Matrix4<f64>,
}

/// Displaced vacuum: `σ(0) = ½ I`.
pub fn initial_gaussian(init: &InitialConditions) -> GaussianState {
    GaussianState {
        mean: Vector4::from(init.phase_space()),
        sigma: Matrix4::identity() * 0.5,
    }
}

pub fn evolve(state: &GaussianState, prop: &Propagator) -> GaussianState {
    let s = &prop.s;
    let sigma = s * state.sigma * s.transpose();
    GaussianState {
        mean: s * state.mean,
        sigma: (sigma + sigma.transpose()) * 0.5,
    }
}

fn offset(mode: Mode) -> usize {
    match mode {
        Mode::X => 0,
        Mode::Y => 2,
    }
}

pub fn reduced_covariance(state: &GaussianState, mode: Mode) -> Matrix2<f64> {
    let k = offset(mode);
    state.sigma.fixed_view::<2, 2>(k, k).into_owned()
}

/// `ν = √det σ_mode` (unclamped).
pub fn symplectic_eigenvalue(sigma_mode: &Matrix2<f64>) -> Result<f64> {
    let det = sigma_mode.determinant();
    if det < 0.0 {
        return Err(Error::NegativeDeterminant { det });
    }
    Ok(det.sqrt())
}

/// Single-mode von Neumann entropy in nats,
/// `S(ν) = (ν + ½) ln(ν + ½) − (ν − ½) ln(ν − ½)`.
///
/// `ν ≤ ½ + EPS_NU` is treated as a pure state.
pub fn gaussian_entropy(nu: f64) -> Result<f64> {
    if !(nu >= 0.5 - NU_FLOOR_TOL) {
        return Err(Error::Domain(format!("symplectic eigenvalue {nu} is below 1/2")));
    }
    let excess = nu - 0.5;
    if excess <= EPS_NU {
        return Ok(0.0);
    }
    let plus = nu + 0.5;
    Ok(plus * plus.ln() - excess * excess.ln())
}

/// `μ = Tr ρ² = 1/(2ν)`.
pub fn purity(nu: f64) -> Result<f64> {
    if !(nu >= 0.5 - NU_FLOOR_TOL) {
        return Err(Error::Domain(format!("symplectic eigenvalue {nu} is below 1/2")));
    }
    Ok(1.0 / (2.0 * nu))
}

/// `⟨ξ_i ξ_j⟩` symmetrized, i.e. `σ_ij + ⟨ξ_i⟩⟨ξ_j⟩`.
fn second_moment(state: &GaussianState, i: usize, j: usize) -> f64 {
    state.sigma[(i, j)] + state.mean[i] * state.mean[j]
}

/// Raw `(⟨n_x⟩, ⟨n_y⟩)` from `½(⟨x²⟩ + ⟨p²⟩ − 1)`; may dip below zero by
/// rounding for vacuum states.
pub fn occupations(state: &GaussianState) -> (f64, f64) {
    let n = |k: usize| 0.5 * (second_moment(state, k, k) + second_moment(state, k + 1, k + 1) - 1.0);
    (n(0), n(2))
}

/// Subsystem energies under the sign convention of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub e_x: f64,
    pub e_y: f64,
    pub e_int: f64,
    pub e_tot: f64,
}

impl EnergyBreakdown {
    pub fn new(e_x: f64, e_y: f64, e_int: f64) -> Self {
        Self {
            e_x,
            e_y,
            e_int,
            e_tot: e_x + e_y + e_int,
        }
    }
}

pub fn effective_energies(state: &GaussianState, params: &ModelParams) -> EnergyBreakdown {
    let wx2 = params.omega_x() * params.omega_x();
    let wy2 = params.omega_y() * params.omega_y();
    let e_x = 0.5 * (second_moment(state, 1, 1) + wx2 * second_moment(state, 0, 0));
    let e_y = -0.5 * (second_moment(state, 3, 3) + wy2 * second_moment(state, 2, 2));
    let e_int = params.g() * second_moment(state, 0, 2);
    EnergyBreakdown::new(e_x, e_y, e_int)
}

/// Derivative on a uniform grid: second-order central differences inside,
/// second-order one-sided stencils at both ends.
pub fn finite_difference(values: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::GridTooShort(n));
    }
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
    Ok(out)
}

/// `(Φ_x, Φ_y) = (dE_x/dt, dE_y/dt)` from the stored energy channels.
pub fn energy_flux(series: &ObservableSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    let dt = series.grid().dt();
    let phi_x = finite_difference(series.require(Channel::EX)?, dt)?;
    let phi_y = finite_difference(series.require(Channel::EY)?, dt)?;
    Ok((phi_x, phi_y))
}

/// Per-sample observables of a Gaussian run.
#[derive(Debug, Clone, Copy)]
struct Sample {
    n_x: f64,
    n_y: f64,
    s_x: f64,
    s_y: f64,
    nu_x: f64,
    mu_x: f64,
    energy: EnergyBreakdown,
}

fn sample(state: &GaussianState, params: &ModelParams) -> Result<Sample> {
    let nu_x = symplectic_eigenvalue(&reduced_covariance(state, Mode::X))?;
    let nu_y = symplectic_eigenvalue(&reduced_covariance(state, Mode::Y))?;
    let (n_x, n_y) = occupations(state);
    Ok(Sample {
        n_x,
        n_y,
        s_x: gaussian_entropy(nu_x)?,
        s_y: gaussian_entropy(nu_y)?,
        nu_x,
        mu_x: purity(nu_x)?,
        energy: effective_energies(state, params),
    })
}

/// Run the Gaussian engine over `grid`. Every sample is propagated directly
/// from `t_start` with its own `exp(A (t − t_start))`.
///
/// Occupation channels are clamped at zero for reporting.
pub fn simulate(params: &ModelParams, init: &InitialConditions, grid: &TimeGrid) -> Result<ObservableSeries> {
    let generator = build_generator(params);
    let start = initial_gaussian(init);
    let t0 = grid.start();
    let samples: Vec<Sample> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let state = evolve(&start, &propagator(&generator, grid.time(i) - t0));
            sample(&state, params)
        })
        .collect::<Result<_>>()?;

    let pick = |f: fn(&Sample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    let mut series = ObservableSeries::new(*grid);
    series.insert(Channel::NX, pick(|s| s.n_x.max(0.0)))?;
    series.insert(Channel::NY, pick(|s| s.n_y.max(0.0)))?;
    series.insert(Channel::Q, pick(|s| s.n_x + s.n_y))?;
    series.insert(Channel::D, pick(|s| s.n_x - s.n_y))?;
    series.insert(Channel::SX, pick(|s| s.s_x))?;
    series.insert(Channel::SY, pick(|s| s.s_y))?;
    series.insert(Channel::NuX, pick(|s| s.nu_x))?;
    series.insert(Channel::MuX, pick(|s| s.mu_x))?;
    series.insert(Channel::EX, pick(|s| s.energy.e_x))?;
    series.insert(Channel::EY, pick(|s| s.energy.e_y))?;
    series.insert(Channel::EInt, pick(|s| s.energy.e_int))?;
    series.insert(Channel::ETot, pick(|s| s.energy.e_tot))?;
    if grid.len() >= 3 {
        let (phi_x, phi_y) = energy_flux(&series)?;
        series.insert(Channel::PhiX, phi_x)?;
        series.insert(Channel::PhiY, phi_y)?;
    }
    Ok(series)
}
