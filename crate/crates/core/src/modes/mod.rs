//! Closed-form normal-mode solution of the classical (and first-moment)
//! dynamics
//!
//! ```text
//! ẍ + ω_x² x + g y = 0
//! ÿ + ω_y² y − g x = 0
//! ```
//!
//! Squared frequencies solve `(Ω² − ω_x²)(Ω² − ω_y²) + g² = 0` and are
//! ordered descending. Eigenvectors are normalized to `X_j = 1`, falling
//! back to the canonical basis when `g = 0`.

mod bogoliubov;
mod fit;

pub use bogoliubov::{bogoliubov_blocks, BogoliubovBlocks, SYMPLECTIC_TOL};
pub use fit::{default_fit_window, short_time_fit, ShortTimeFit, MIN_FIT_SAMPLES};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{complex_secular_roots, InitialConditions, ModelParams, StabilityClass, TOL_DEGENERATE};

/// Output of [`solve_secular`].
#[derive(Debug, Clone, PartialEq)]
pub enum NormalModes {
    Stable(StableModes),
    Unstable(UnstableModes),
}

impl NormalModes {
    pub fn stability(&self) -> StabilityClass {
        match self {
            NormalModes::Stable(_) => StabilityClass::Stable,
            NormalModes::Unstable(u) => StabilityClass::UnstableComplex {
                growth_rate: u.growth_rate,
            },
        }
    }

    pub fn as_stable(&self) -> Result<&StableModes> {
        match self {
            NormalModes::Stable(s) => Ok(s),
            NormalModes::Unstable(_) => Err(Error::NotStable),
        }
    }

    pub fn into_stable(self) -> Result<StableModes> {
        match self {
            NormalModes::Stable(s) => Ok(s),
            NormalModes::Unstable(_) => Err(Error::NotStable),
        }
    }
}

/// Real modal data for `Δ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableModes {
    pub params: ModelParams,
    /// `Ω_1² ≥ Ω_2²`.
    pub omega_sq: [f64; 2],
    pub omega: [f64; 2],
    /// `(X_j, Y_j)` per mode.
    pub eigvec: [[f64; 2]; 2],
    /// `det V = X_1 Y_2 − X_2 Y_1`.
    pub det_v: f64,
}

/// Complex-conjugate squared frequencies for `Δ < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnstableModes {
    pub params: ModelParams,
    pub omega_sq: [Complex64; 2],
    /// `Y_j` with `X_j = 1`.
    pub eigvec_y: [Complex64; 2],
    pub growth_rate: f64,
}

/// Cosine (`a`) and sine (`b`) amplitudes of the two modal coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalCoefficients {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

/// Classical state `(x, y, ẋ, ẏ)`. Note `p_y = −ẏ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub x: f64,
    pub y: f64,
    pub xdot: f64,
    pub ydot: f64,
}

impl Trajectory {
    /// Phase-space vector `(x, p_x, y, p_y)`.
    pub fn phase_space(&self) -> [f64; 4] {
        [self.x, self.xdot, self.y, -self.ydot]
    }
}

pub fn solve_secular(params: &ModelParams) -> Result<NormalModes> {
    match params.stability() {
        StabilityClass::DegenerateDefective => Err(Error::DefectiveModes {
            discriminant: params.discriminant(),
        }),
        StabilityClass::UnstableComplex { growth_rate } => {
            let roots = complex_secular_roots(params);
            let wx2 = params.omega_x() * params.omega_x();
            let eigvec_y = roots.map(|r| (r - wx2) / params.g());
            Ok(NormalModes::Unstable(UnstableModes {
                params: *params,
                omega_sq: roots,
                eigvec_y,
                growth_rate,
            }))
        }
        StabilityClass::Stable => Ok(NormalModes::Stable(stable_modes(params))),
    }
}

fn stable_modes(params: &ModelParams) -> StableModes {
    let wx2 = params.omega_x() * params.omega_x();
    let wy2 = params.omega_y() * params.omega_y();
    let g = params.g();
    let mean = 0.5 * (wx2 + wy2);
    let half_split = 0.5 * (wx2 - wy2);
    let half_root = 0.5 * params.discriminant().sqrt();
    let omega_sq = [mean + half_root, mean - half_root];

    let eigvec = if g == 0.0 {
        if wx2 >= wy2 {
            [[1.0, 0.0], [0.0, 1.0]]
        } else {
            [[0.0, 1.0], [1.0, 0.0]]
        }
    } else {
        [half_root, -half_root].map(|sign_root| {
            // Ω² − ω_x² and Ω² − ω_y²; their product is −g². Use the
            // larger one directly and avoid the cancelling difference.
            let dx = sign_root - half_split;
            let dy = sign_root + half_split;
            let y = if dx.abs() >= dy.abs() { dx / g } else { -g / dy };
            [1.0, y]
        })
    };
    let det_v = eigvec[0][0] * eigvec[1][1] - eigvec[1][0] * eigvec[0][1];
    StableModes {
        params: *params,
        omega_sq,
        omega: omega_sq.map(f64::sqrt),
        eigvec,
        det_v,
    }
}

impl StableModes {
    /// `V⁻¹ (u, w)ᵀ`.
    fn invert_v(&self, u: f64, w: f64) -> Result<[f64; 2]> {
        if self.det_v.abs() <= TOL_DEGENERATE {
            return Err(Error::DegenerateEigenvectors { det_v: self.det_v });
        }
        let [[x1, y1], [x2, y2]] = self.eigvec;
        Ok([(y2 * u - x2 * w) / self.det_v, (-y1 * u + x1 * w) / self.det_v])
    }

    /// Modal amplitudes for initial data `(x0, ẋ0, y0, ẏ0)`.
    pub fn project(&self, x0: f64, xdot0: f64, y0: f64, ydot0: f64) -> Result<ModalCoefficients> {
        let a = self.invert_v(x0, y0)?;
        let vb = self.invert_v(xdot0, ydot0)?;
        Ok(ModalCoefficients {
            a,
            b: [vb[0] / self.omega[0], vb[1] / self.omega[1]],
        })
    }

    /// `ΔΩ = |Ω_1 − Ω_2|`.
    pub fn beat_frequency(&self) -> f64 {
        (self.omega[0] - self.omega[1]).abs()
    }
}

pub fn project_initial(modes: &StableModes, init: &InitialConditions) -> Result<ModalCoefficients> {
    let [x0, _, y0, _] = init.phase_space();
    let [xdot0, ydot0] = init.velocities();
    modes.project(x0, xdot0, y0, ydot0)
}

pub fn classical_trajectory(modes: &StableModes, coeffs: &ModalCoefficients, t: f64) -> Trajectory {
    let mut out = Trajectory {
        x: 0.0,
        y: 0.0,
        xdot: 0.0,
        ydot: 0.0,
    };
    for j in 0..2 {
        let (s, c) = (modes.omega[j] * t).sin_cos();
        let q = coeffs.a[j] * c + coeffs.b[j] * s;
        let qdot = modes.omega[j] * (coeffs.b[j] * c - coeffs.a[j] * s);
        let [xj, yj] = modes.eigvec[j];
        out.x += q * xj;
        out.y += q * yj;
        out.xdot += qdot * xj;
        out.ydot += qdot * yj;
    }
    out
}

/// First-moment part of the x occupation, `½(x² + ẋ²)`.
pub fn occupation_closed_form(modes: &StableModes, coeffs: &ModalCoefficients, t: f64) -> f64 {
    let tr = classical_trajectory(modes, coeffs, t);
    0.5 * (tr.x * tr.x + tr.xdot * tr.xdot)
}

/// The same occupation expanded as a double sum over mode pairs.
pub fn occupation_modal_sum(modes: &StableModes, coeffs: &ModalCoefficients, t: f64) -> f64 {
    let (a, b, w) = (coeffs.a, coeffs.b, modes.omega);
    let sc = [(w[0] * t).sin_cos(), (w[1] * t).sin_cos()];
    let mut total = 0.0;
    for j in 0..2 {
        for k in 0..2 {
            let (sj, cj) = sc[j];
            let (sk, ck) = sc[k];
            let positions =
                a[j] * a[k] * cj * ck + a[j] * b[k] * cj * sk + b[j] * a[k] * sj * ck + b[j] * b[k] * sj * sk;
            let velocities =
                a[j] * a[k] * sj * sk - a[j] * b[k] * sj * ck - b[j] * a[k] * cj * sk + b[j] * b[k] * cj * ck;
            total += modes.eigvec[j][0] * modes.eigvec[k][0] * (positions + w[j] * w[k] * velocities);
        }
    }
    0.5 * total
}

/// Weak-coupling beat approximation `|α|² cos²(½ ΔΩ t)`. Diagnostic only.
pub fn beat_envelope(modes: &StableModes, alpha: Complex64, t: f64) -> f64 {
    let c = (0.5 * modes.beat_frequency() * t).cos();
    alpha.norm_sqr() * c * c
}

/// Phase-space propagator assembled from the modal solution: column `k` is
/// the trajectory started from the `k`-th unit vector of `(x, p_x, y, p_y)`.
pub fn modal_propagator(modes: &StableModes, t: f64) -> Result<Matrix4<f64>> {
    let mut s = Matrix4::zeros();
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let coeffs = modes.project(e[0], e[1], e[2], -e[3])?;
        let column = classical_trajectory(modes, &coeffs, t).phase_space();
        for (i, v) in column.into_iter().enumerate() {
            s[(i, k)] = v;
        }
    }
    Ok(s)
}
