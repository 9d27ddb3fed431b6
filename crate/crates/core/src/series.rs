//! Time grids and named observable channels.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Uniform time grid `t_i = start + i·(end − start)/(n − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    end: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, len: usize) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidGrid("non-finite endpoint".into()));
        }
        if end <= start {
            return Err(Error::InvalidGrid(format!("end {end} must exceed start {start}")));
        }
        if len < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {len}")));
        }
        Ok(Self { start, end, len })
    }

    /// Recover a grid from explicit sample times, which must be strictly
    /// increasing and uniform to 1e-12 relative.
    pub fn from_samples(times: &[f64]) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples, got {}",
                times.len()
            )));
        }
        let grid = Self::new(times[0], times[times.len() - 1], times.len())?;
        let scale = grid.start.abs().max(grid.end.abs()).max(grid.dt());
        for (i, &t) in times.iter().enumerate() {
            if (t - grid.time(i)).abs() > 1e-12 * scale {
                return Err(Error::InvalidGrid(format!(
                    "sample {i} at t = {t} is off the uniform grid"
                )));
            }
        }
        Ok(grid)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dt(&self) -> f64 {
        (self.end - self.start) / (self.len - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.end
        } else {
            self.start + i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }
}

/// Named observable channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    NX,
    NY,
    Q,
    D,
    SX,
    SY,
    NuX,
    MuX,
    EX,
    EY,
    EInt,
    ETot,
    PhiX,
    PhiY,
}

impl Channel {
    pub const ALL: [Channel; 14] = [
        Channel::NX,
        Channel::NY,
        Channel::Q,
        Channel::D,
        Channel::SX,
        Channel::SY,
        Channel::NuX,
        Channel::MuX,
        Channel::EX,
        Channel::EY,
        Channel::EInt,
        Channel::ETot,
        Channel::PhiX,
        Channel::PhiY,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::NX => "n_x",
            Channel::NY => "n_y",
            Channel::Q => "q",
            Channel::D => "d",
            Channel::SX => "s_x",
            Channel::SY => "s_y",
            Channel::NuX => "nu_x",
            Channel::MuX => "mu_x",
            Channel::EX => "e_x",
            Channel::EY => "e_y",
            Channel::EInt => "e_int",
            Channel::ETot => "e_tot",
            Channel::PhiX => "phi_x",
            Channel::PhiY => "phi_y",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))
    }
}

/// Observables sampled on a [`TimeGrid`], plus an optional population
/// heatmap (rows = time samples, columns = `n_x`).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    grid: TimeGrid,
    channels: BTreeMap<Channel, Vec<f64>>,
    heatmap: Option<DMatrix<f64>>,
}

impl ObservableSeries {
    pub fn new(grid: TimeGrid) -> Self {
        Self {
            grid,
            channels: BTreeMap::new(),
            heatmap: None,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn insert(&mut self, channel: Channel, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(Error::InvalidGrid(format!(
                "channel {channel} has {} samples, grid has {}",
                values.len(),
                self.grid.len()
            )));
        }
        self.channels.insert(channel, values);
        Ok(())
    }

    pub fn get(&self, channel: Channel) -> Option<&[f64]> {
        self.channels.get(&channel).map(Vec::as_slice)
    }

    pub fn require(&self, channel: Channel) -> Result<&[f64]> {
        self.get(channel)
            .ok_or_else(|| Error::UnknownChannel(channel.to_string()))
    }

    pub fn channels(&self) -> impl Iterator<Item = (Channel, &[f64])> {
        self.channels.iter().map(|(c, v)| (*c, v.as_slice()))
    }

    pub fn set_heatmap(&mut self, heatmap: DMatrix<f64>) -> Result<()> {
        if heatmap.nrows() != self.grid.len() {
            return Err(Error::InvalidGrid(format!(
                "heatmap has {} rows, grid has {}",
                heatmap.nrows(),
                self.grid.len()
            )));
        }
        self.heatmap = Some(heatmap);
        Ok(())
    }

    pub fn heatmap(&self) -> Option<&DMatrix<f64>> {
        self.heatmap.as_ref()
    }
}

/// Mean over samples and half-range `(max − min)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub mean: f64,
    pub amplitude: f64,
    pub min: f64,
    pub max: f64,
    /// `max |v_i − v_0|`.
    pub drift: f64,
}

impl ChannelStats {
    pub fn of(values: &[f64]) -> Option<Self> {
        let first = *values.first()?;
        let (mut min, mut max, mut sum, mut drift) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0f64);
        for &v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            drift = drift.max((v - first).abs());
        }
        Some(Self {
            mean: sum / values.len() as f64,
            amplitude: 0.5 * (max - min),
            min,
            max,
            drift,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = TimeGrid::new(0.0, 50.0, 801).unwrap();
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(800), 50.0);
        assert_eq!(g.dt(), 0.0625);
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_from_samples() {
        let g = TimeGrid::new(-1.0, 3.0, 17).unwrap();
        assert_eq!(TimeGrid::from_samples(&g.times()).unwrap(), g);
        let mut bad = g.times();
        bad[4] += 1e-6;
        assert!(TimeGrid::from_samples(&bad).is_err());
    }

    #[test]
    fn channel_names_round_trip() {
        for c in Channel::ALL {
            assert_eq!(c.as_str().parse::<Channel>().unwrap(), c);
        }
        assert!("n_z".parse::<Channel>().is_err());
    }

    #[test]
    fn insert_checks_length() {
        let mut s = ObservableSeries::new(TimeGrid::new(0.0, 1.0, 3).unwrap());
        assert!(s.insert(Channel::NX, vec![1.0, 2.0]).is_err());
        s.insert(Channel::NX, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.get(Channel::NX), Some(&[1.0, 2.0, 3.0][..]));
        assert!(s.require(Channel::NY).is_err());
    }

    #[test]
    fn stats_of_constant_and_sine() {
        let c = ChannelStats::of(&[2.5; 10]).unwrap();
        assert_eq!((c.mean, c.amplitude, c.drift), (2.5, 0.0, 0.0));

        let grid = TimeGrid::new(0.0, 2.0 * std::f64::consts::PI, 801).unwrap();
        let sine: Vec<f64> = grid.times().iter().map(|t| t.sin()).collect();
        let s = ChannelStats::of(&sine).unwrap();
        assert!((s.amplitude - 1.0).abs() < 1e-4);
        assert!(s.mean.abs() < 1e-12);
        assert!(ChannelStats::of(&[]).is_none());
    }
}
