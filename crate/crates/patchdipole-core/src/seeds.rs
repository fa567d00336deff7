//! Reference initial guesses for the fixed-point iteration, plus the two
//! analytic shapes used by closed-form cross checks.

use crate::grid::Grid;
use crate::profile::{Profile, ProfileError};

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

/// `(1 - x^2) log(1 + 1/(1 - x^2))`: monotone on `[0, 1]`, vanishing like
/// the expected endpoint behavior.
pub fn quadratic_log(x: f64) -> f64 {
    let w = 1.0 - x * x;
    if w <= 0.0 {
        0.0
    } else {
        w * (1.0 + 1.0 / w).ln()
    }
}

/// `cos(pi x / 2)`: the simplest monotone seed.
pub fn cosine(x: f64) -> f64 {
    (core::f64::consts::PI * x / 2.0).cos()
}

/// A sharp even spike at the origin on top of a smooth monotone base:
/// `1/(2(1 + 100 x^2)) + (1 - x^2)/2 log(1 + 1/(1 - x^2))`. Monotone but
/// far from concave; note the residual `1/202` at the endpoints.
pub fn spiked(x: f64) -> f64 {
    let w = 1.0 - x * x;
    let log_part = if w <= 0.0 { 0.0 } else { 0.5 * w * (1.0 + 1.0 / w).ln() };
    0.5 / (1.0 + 100.0 * x * x) + log_part
}

/// A double-humped, non-monotone seed:
/// `(1 - x^2)/(1 + (2x^2 - 1)^2) log(1 + 1/(1 - x^2))`.
pub fn double_humped(x: f64) -> f64 {
    let w = 1.0 - x * x;
    if w <= 0.0 {
        0.0
    } else {
        let hump = 1.0 + (2.0 * x * x - 1.0).powi(2);
        w / hump * (1.0 + 1.0 / w).ln()
    }
}

pub fn semicircle_fn(x: f64) -> f64 {
    let w = 1.0 - x * x;
    if w <= 0.0 {
        0.0
    } else {
        w.sqrt()
    }
}

pub fn tent_fn(x: f64) -> f64 {
    (1.0 - x.abs()).max(0.0)
}

/// Looks up a seed function by its CLI name.
pub fn by_name(name: &str) -> Option<fn(f64) -> f64> {
    match name {
        "fig2a" => Some(quadratic_log),
        "fig2b" => Some(cosine),
        "fig2c" => Some(spiked),
        "fig2d" => Some(double_humped),
        "semicircle" => Some(semicircle_fn),
        "tent" => Some(tent_fn),
        _ => None,
    }
}

pub const SEED_NAMES: [&str; 6] = ["fig2a", "fig2b", "fig2c", "fig2d", "semicircle", "tent"];

/// Samples a named seed onto a grid.
pub fn profile_by_name(name: &str, grid: Grid) -> Option<Result<Profile, ProfileError>> {
    by_name(name).map(|g| Profile::from_function(grid, g))
}
