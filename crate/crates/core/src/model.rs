//! Model parameters, stability classification and initial conditions.
//!
//! Everything is dimensionless (ħ = 1, unit mass). Ladder operators follow
//! `a = (x + i p)/√2` for both modes with no frequency rescaling, so
//! `⟨n⟩ = ½(⟨x²⟩ + ⟨p²⟩ − 1)` regardless of ω.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used to decide that the discriminant vanishes.
pub const TOL_DEGENERATE: f64 = 1e-12;

/// Frequencies and coupling of the two-mode Hamiltonian.
///
/// Construction validates the inputs and caches the discriminant
/// `Δ = (ω_x² − ω_y²)² − 4g²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega_x: f64,
    omega_y: f64,
    g: f64,
    discriminant: f64,
}

impl ModelParams {
    pub fn new(omega_x: f64, omega_y: f64, g: f64) -> Result<Self> {
        for (name, value) in [("omega_x", omega_x), ("omega_y", omega_y), ("g", g)] {
            if !value.is_finite() {
                return Err(Error::NonFiniteInput { name });
            }
        }
        for (name, value) in [("omega_x", omega_x), ("omega_y", omega_y)] {
            if value <= 0.0 {
                return Err(Error::NonPositiveFrequency { name, value });
            }
        }
        let split = omega_x * omega_x - omega_y * omega_y;
        Ok(Self {
            omega_x,
            omega_y,
            g,
            discriminant: split * split - 4.0 * g * g,
        })
    }

    pub fn omega_x(&self) -> f64 {
        self.omega_x
    }

    pub fn omega_y(&self) -> f64 {
        self.omega_y
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `Δ = (ω_x² − ω_y²)² − 4g²`.
    pub fn discriminant(&self) -> f64 {
        self.discriminant
    }

    /// Same frequencies, different coupling.
    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        Self::new(self.omega_x, self.omega_y, g)
    }

    /// Scale against which `|Δ|` is compared when testing for degeneracy.
    pub(crate) fn degeneracy_threshold(&self) -> f64 {
        let sum = self.omega_x * self.omega_x + self.omega_y * self.omega_y;
        TOL_DEGENERATE * (sum * sum).max(1.0)
    }

    pub fn stability(&self) -> StabilityClass {
        classify_stability(self)
    }
}

/// Character of the normal-mode spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityClass {
    /// `Δ > 0`: two real, positive squared frequencies.
    Stable,
    /// `Δ = 0` within tolerance: coincident roots, no modal basis.
    DegenerateDefective,
    /// `Δ < 0`: complex-conjugate squared frequencies with exponential growth.
    UnstableComplex { growth_rate: f64 },
}

impl StabilityClass {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityClass::Stable)
    }
}

pub fn classify_stability(params: &ModelParams) -> StabilityClass {
    let delta = params.discriminant();
    if delta.abs() <= params.degeneracy_threshold() {
        StabilityClass::DegenerateDefective
    } else if delta > 0.0 {
        StabilityClass::Stable
    } else {
        let [root, _] = complex_secular_roots(params);
        StabilityClass::UnstableComplex {
            growth_rate: root.sqrt().im.abs(),
        }
    }
}

/// Roots of `(Ω² − ω_x²)(Ω² − ω_y²) + g² = 0` as complex numbers, larger
/// real part (or positive imaginary part) first.
pub(crate) fn complex_secular_roots(params: &ModelParams) -> [Complex64; 2] {
    let wx2 = params.omega_x * params.omega_x;
    let wy2 = params.omega_y * params.omega_y;
    let mean = 0.5 * (wx2 + wy2);
    let half = 0.5 * Complex64::new(params.discriminant, 0.0).sqrt();
    [mean + half, mean - half]
}

/// One of the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    X,
    Y,
}

/// Initial state: a coherent x-mode on top of the y vacuum, or an explicit
/// classical phase-space point `(x0, px0, y0, py0)` with vacuum fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialConditions {
    Coherent { alpha: Complex64 },
    Classical { x0: f64, px0: f64, y0: f64, py0: f64 },
}

impl InitialConditions {
    pub fn coherent(alpha: Complex64) -> Self {
        InitialConditions::Coherent { alpha }
    }

    pub fn coherent_real(alpha: f64) -> Self {
        InitialConditions::Coherent {
            alpha: Complex64::new(alpha, 0.0),
        }
    }

    pub fn classical(x0: f64, px0: f64, y0: f64, py0: f64) -> Self {
        InitialConditions::Classical { x0, px0, y0, py0 }
    }

    /// Phase-space point `(x0, px0, y0, py0)`; a coherent amplitude maps to
    /// `x0 = √2 Re α`, `px0 = √2 Im α`.
    pub fn phase_space(&self) -> [f64; 4] {
        match *self {
            InitialConditions::Coherent { alpha } => [SQRT_2 * alpha.re, SQRT_2 * alpha.im, 0.0, 0.0],
            InitialConditions::Classical { x0, px0, y0, py0 } => [x0, px0, y0, py0],
        }
    }

    /// Coherent amplitude of the x-mode. Classical points are accepted only
    /// when the y-mode is undisplaced.
    pub fn alpha(&self) -> Result<Complex64> {
        match *self {
            InitialConditions::Coherent { alpha } => Ok(alpha),
            InitialConditions::Classical { x0, px0, y0, py0 } => {
                if y0 != 0.0 || py0 != 0.0 {
                    return Err(Error::UnsupportedInitialState(
                        "the y-mode must start in the vacuum".into(),
                    ));
                }
                Ok(Complex64::new(x0, px0) / SQRT_2)
            }
        }
    }

    /// Velocities `(ẋ0, ẏ0)` implied by Hamilton's equations (`ẏ = −p_y`).
    pub fn velocities(&self) -> [f64; 2] {
        let [_, px0, _, py0] = self.phase_space();
        [px0, -py0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn discriminant_of_table_parameters() {
        let p = ModelParams::new(1.0, 0.8, 0.15).unwrap();
        assert_abs_diff_eq!(p.discriminant(), 0.0396, epsilon = 1e-14);
        assert_eq!(p.stability(), StabilityClass::Stable);
    }

    #[test]
    fn symmetric_uncoupled_is_degenerate() {
        let p = ModelParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(p.discriminant(), 0.0);
        assert_eq!(p.stability(), StabilityClass::DegenerateDefective);
    }

    #[test]
    fn rejects_bad_frequencies() {
        assert!(matches!(
            ModelParams::new(-1.0, 0.8, 0.1),
            Err(Error::NonPositiveFrequency { name: "omega_x", .. })
        ));
        assert!(matches!(
            ModelParams::new(1.0, 0.0, 0.1),
            Err(Error::NonPositiveFrequency { name: "omega_y", .. })
        ));
        assert!(matches!(
            ModelParams::new(1.0, 0.8, f64::NAN),
            Err(Error::NonFiniteInput { name: "g" })
        ));
        assert!(matches!(
            ModelParams::new(f64::INFINITY, 0.8, 0.1),
            Err(Error::NonFiniteInput { .. })
        ));
    }

    #[test]
    fn equal_frequencies_with_coupling_are_unstable() {
        let p = ModelParams::new(1.0, 1.0, 0.1).unwrap();
        assert_abs_diff_eq!(p.discriminant(), -0.04, epsilon = 1e-15);
        match p.stability() {
            StabilityClass::UnstableComplex { growth_rate } => {
                // Im √(1 + 0.1i), high-precision reference
                assert_abs_diff_eq!(growth_rate, 0.049_937_771_837_002_44, epsilon = 1e-14);
            }
            other => panic!("expected unstable, got {other:?}"),
        }
    }

    #[test]
    fn critical_coupling_is_degenerate() {
        let p = ModelParams::new(1.0, 0.8, 0.18).unwrap();
        assert_eq!(p.stability(), StabilityClass::DegenerateDefective);
    }

    #[test]
    fn coherent_amplitude_mapping() {
        let ic = InitialConditions::coherent_real(1.0);
        assert_eq!(ic.phase_space(), [SQRT_2, 0.0, 0.0, 0.0]);
        let ic = InitialConditions::coherent(Complex64::new(0.0, 1.0));
        assert_eq!(ic.phase_space(), [0.0, SQRT_2, 0.0, 0.0]);
        let back = InitialConditions::classical(SQRT_2, 0.0, 0.0, 0.0).alpha().unwrap();
        assert_abs_diff_eq!(back.re, 1.0, epsilon = 1e-15);
        assert!(InitialConditions::classical(1.0, 0.0, 0.5, 0.0).alpha().is_err());
        assert_eq!(
            InitialConditions::classical(0.0, 0.5, 0.0, 0.25).velocities(),
            [0.5, -0.25]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn stable_roots_are_real_and_positive(
                wx in 0.2f64..3.0, wy in 0.2f64..3.0, frac in -0.99f64..0.99,
            ) {
                let g = frac * 0.5 * (wx * wx - wy * wy).abs();
                let p = ModelParams::new(wx, wy, g).unwrap();
                prop_assume!(p.stability().is_stable());
                let [r1, r2] = complex_secular_roots(&p);
                prop_assert!(r1.im == 0.0 && r2.im == 0.0);
                prop_assert!(r1.re > 0.0 && r2.re > 0.0);
                let product = r1.re * r2.re;
                let expected = wx * wx * wy * wy + g * g;
                prop_assert!((product - expected).abs() <= 1e-12 * expected);
            }

            #[test]
            fn stability_ignores_coupling_sign(
                wx in 0.2f64..3.0, wy in 0.2f64..3.0, g in -2.0f64..2.0,
            ) {
                let plus = ModelParams::new(wx, wy, g).unwrap();
                let minus = ModelParams::new(wx, wy, -g).unwrap();
                prop_assert_eq!(plus.stability(), minus.stability());
            }
        }
    }
}
