//! Smooth profile functions: the exponential metric pair, the quadratic
//! potential ansatz, and interpolants through the discrete modal amplitudes.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::modes::{ModalCoefficients, StableModes};

/// `A(x) = 1 − 2 m0 / x`, `B(x) = e^{−k x} / x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricProfile {
    pub m0: f64,
    pub k: f64,
}

impl MetricProfile {
    pub fn new(m0: f64, k: f64) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::Domain(format!("m0 must be positive, got {m0}")));
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("k must be non-negative, got {k}")));
        }
        Ok(Self { m0, k })
    }

    /// Root of `A`.
    pub fn horizon(&self) -> f64 {
        2.0 * self.m0
    }
}

pub fn metric_profiles(profile: &MetricProfile, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("metric profiles need x > 0, got {x}")));
    }
    Ok((1.0 - 2.0 * profile.m0 / x, (-profile.k * x).exp() / x))
}

/// `(ω_x² x², ω_y² y² + 2 g x y)`.
pub fn quadratic_ansatz(params: &ModelParams, x: f64, y: f64) -> (f64, f64) {
    let wx2 = params.omega_x() * params.omega_x();
    let wy2 = params.omega_y() * params.omega_y();
    (wx2 * x * x, wy2 * y * y + 2.0 * params.g() * x * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpolantKind {
    /// Shape-preserving piecewise cubic Hermite (Fritsch–Carlson slopes).
    #[default]
    MonotoneCubic,
    Linear,
}

/// One interpolated curve through strictly increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    kind: InterpolantKind,
}

impl Interpolant {
    /// Nodes may come in any order; they are sorted by abscissa.
    pub fn new(nodes: &[(f64, f64)], kind: InterpolantKind) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFiniteInput { name: "envelope node" });
        }
        let mut sorted = nodes.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidGrid("node abscissae must be distinct".into()));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = sorted.into_iter().unzip();
        let slopes = match kind {
            InterpolantKind::MonotoneCubic => monotone_slopes(&xs, &ys),
            InterpolantKind::Linear => Vec::new(),
        };
        Ok(Self { xs, ys, slopes, kind })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value at `x`. Outside the node range the end segment is continued.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 2;
        let i = self.xs[1..=last].partition_point(|&xi| xi <= x);
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        match self.kind {
            InterpolantKind::Linear => y0 + s * (y1 - y0),
            InterpolantKind::MonotoneCubic => {
                let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * h * m0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * h * m1
            }
        }
    }
}

/// Fritsch–Carlson node slopes: three-point weighted harmonic mean inside,
/// one-sided shape-preserving estimate at the ends.
fn monotone_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Interpolated envelopes `A(x)` and `B(x)` through the modal amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpec {
    a: Interpolant,
    b: Interpolant,
    extrapolate: bool,
}

impl EnvelopeSpec {
    pub fn new(a_nodes: &[(f64, f64)], b_nodes: &[(f64, f64)], kind: InterpolantKind) -> Result<Self> {
        Ok(Self {
            a: Interpolant::new(a_nodes, kind)?,
            b: Interpolant::new(b_nodes, kind)?,
            extrapolate: false,
        })
    }

    /// Nodes `(x_j, A_j)` and `(x_j, B_j)`; `abscissae` defaults to `Ω_j`.
    pub fn from_modes(
        modes: &StableModes,
        coeffs: &ModalCoefficients,
        abscissae: Option<[f64; 2]>,
        kind: InterpolantKind,
    ) -> Result<Self> {
        let xs = abscissae.unwrap_or(modes.omega);
        let a = [(xs[0], coeffs.a[0]), (xs[1], coeffs.a[1])];
        let b = [(xs[0], coeffs.b[0]), (xs[1], coeffs.b[1])];
        Self::new(&a, &b, kind)
    }

    pub fn with_extrapolation(mut self, enabled: bool) -> Self {
        self.extrapolate = enabled;
        self
    }

    pub fn a(&self) -> &Interpolant {
        &self.a
    }

    pub fn b(&self) -> &Interpolant {
        &self.b
    }
}

pub fn envelope_interpolate(spec: &EnvelopeSpec, x: f64) -> Result<(f64, f64)> {
    if !spec.extrapolate {
        for curve in [&spec.a, &spec.b] {
            let (min, max) = curve.domain();
            if !(x >= min && x <= max) {
                return Err(Error::OutOfRange { x, min, max });
            }
        }
    }
    Ok((spec.a.eval(x), spec.b.eval(x)))
}
