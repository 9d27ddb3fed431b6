//! Shared benchmark fixtures.

use twomode_core::{InitialConditions, ModelParams, TimeGrid};

/// `(1.0, 0.8, 0.1)` with a unit coherent start.
pub fn default_case() -> (ModelParams, InitialConditions) {
    (
        ModelParams::new(1.0, 0.8, 0.1).expect("valid parameters"),
        InitialConditions::coherent_real(1.0),
    )
}

pub fn default_grid() -> TimeGrid {
    TimeGrid::new(0.0, 50.0, 801).expect("valid grid")
}
