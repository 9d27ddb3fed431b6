use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::series::{Channel, ObservableSeries};

pub const MIN_FIT_SAMPLES: usize = 8;

/// Power law `value ≈ kappa · (g t)^exponent` fitted near `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeFit {
    pub kappa: f64,
    pub exponent: f64,
    pub samples: usize,
}

/// `0.3 / max(ω_x, ω_y)`: inside the first oscillation.
pub fn default_fit_window(params: &ModelParams) -> f64 {
    0.3 / params.omega_x().max(params.omega_y())
}

/// Least-squares line through `(ln(g t), ln value)` for samples with
/// `0 < t − t_0 ≤ window`.
pub fn short_time_fit(series: &ObservableSeries, channel: Channel, window: f64, g: f64) -> Result<ShortTimeFit> {
    let values = series.require(channel)?;
    let grid = series.grid();
    let t0 = grid.start();
    let points: Vec<(f64, f64)> = (0..grid.len())
        .map(|i| (grid.time(i) - t0, values[i]))
        .filter(|&(t, _)| t > 0.0 && t <= window * (1.0 + 1e-12))
        .collect();
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES,
            found: points.len(),
        });
    }
    if points.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(Error::NonPositiveValues {
            channel: channel.to_string(),
        });
    }
    if g == 0.0 {
        return Err(Error::Domain("short-time fit needs a nonzero coupling".into()));
    }

    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, v) in &points {
        let lx = (g.abs() * t).ln();
        let ly = v.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - exponent * sx) / n;
    Ok(ShortTimeFit {
        kappa: intercept.exp(),
        exponent,
        samples: points.len(),
    })
}
