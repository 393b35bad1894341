//! Planning toolkit for RIS-assisted radio links.
//!
//! - [`scene`]: 2.5D building model and geometric line of sight.
//! - [`propagation`]: free-space, urban-micro, two-ray, knife-edge and RIS path gains.
//! - [`dimensioning`]: RIS area and element count needed to match a direct path.
//! - [`comparison`]: minimum transmit power for direct, relayed and RIS-assisted links.
//! - [`placement`]: field-of-view constrained orientation and greedy multi-RIS placement.
//! - [`cli`]: the `risplan` command-line front end.

pub mod cli;
pub mod comparison;
pub mod dimensioning;
pub mod error;
pub mod placement;
pub mod propagation;
pub mod scene;
pub mod table;

pub use error::{Error, Result};
pub use scene::{load_scene, Building, GridSpec, Point3, Scene};

/// `start, start + step, ...` up to and including `stop` (with 1e-9 relative
/// slack on the last sample). Empty when `stop < start` or `step <= 0`.
pub fn step_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
        return Vec::new();
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}
