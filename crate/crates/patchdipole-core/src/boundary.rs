//! Abstraction over patch boundary descriptions.
//!
//! The potential formulas only ever ask for the boundary height `f(y1)`,
//! its crest `f(0)`, and (for the inverse-parameterized forms) the inverse
//! `f^{-1}(y2)`. Keeping them generic lets the analytic reference shapes
//! (semicircle, tent) bypass interpolation error entirely, which the
//! closed-form speed checks rely on.

use crate::profile::Profile;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

/// An even, nonnegative boundary height function on `[-1, 1]` vanishing at
/// the endpoints. `height` is total: it returns 0 outside `[-1, 1]`.
pub trait Boundary: Sync {
    /// Boundary height at `x` (even; 0 for `|x| >= 1`).
    fn height(&self, x: f64) -> f64;

    /// Crest height `f(0)`.
    fn crest(&self) -> f64;

    /// For strictly decreasing boundaries: the `x` in `[0, 1]` with
    /// `height(x) = y`. The default bisects `height`; shapes with a closed
    /// form should override it.
    fn inverse_height(&self, y: f64) -> f64 {
        let top = self.crest();
        if y >= top {
            return 0.0;
        }
        if y <= 0.0 {
            return 1.0;
        }
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.height(mid) >= y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Boundary for Profile {
    fn height(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= 1.0 {
            0.0
        } else {
            self.eval_unchecked(ax)
        }
    }

    fn crest(&self) -> f64 {
        self.max_value()
    }

    fn inverse_height(&self, y: f64) -> f64 {
        self.inverse(y.clamp(0.0, self.max_value()))
            .unwrap_or_else(|_| if y >= self.max_value() { 0.0 } else { 1.0 })
    }
}

/// Upper unit semicircle `f(x) = sqrt(1 - x^2)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Semicircle;

impl Boundary for Semicircle {
    fn height(&self, x: f64) -> f64 {
        let w = 1.0 - x * x;
        if w <= 0.0 {
            0.0
        } else {
            w.sqrt()
        }
    }

    fn crest(&self) -> f64 {
        1.0
    }

    fn inverse_height(&self, y: f64) -> f64 {
        let w = 1.0 - y * y;
        if w <= 0.0 {
            0.0
        } else {
            w.sqrt()
        }
    }
}

/// Tent `f(x) = 1 - |x|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Tent;

impl Boundary for Tent {
    fn height(&self, x: f64) -> f64 {
        (1.0 - x.abs()).max(0.0)
    }

    fn crest(&self) -> f64 {
        1.0
    }

    fn inverse_height(&self, y: f64) -> f64 {
        (1.0 - y).clamp(0.0, 1.0)
    }
}

/// Wraps an arbitrary even height function as a [`Boundary`].
pub struct FnBoundary<F: Fn(f64) -> f64 + Sync> {
    g: F,
    crest: f64,
}

impl<F: Fn(f64) -> f64 + Sync> FnBoundary<F> {
    pub fn new(g: F) -> Self {
        let crest = g(0.0);
        FnBoundary { g, crest }
    }
}

impl<F: Fn(f64) -> f64 + Sync> Boundary for FnBoundary<F> {
    fn height(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            (self.g)(x)
        }
    }

    fn crest(&self) -> f64 {
        self.crest
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_inverses() {
        assert_eq!(Semicircle.inverse_height(0.6), 0.8);
        assert_eq!(Tent.inverse_height(0.25), 0.75);
    }

    #[test]
    fn default_inverse_bisects() {
        let b = FnBoundary::new(|x: f64| (1.0 - x * x).max(0.0));
        let x = b.inverse_height(0.36);
        assert!((x - 0.8).abs() < 1e-12);
    }

    #[test]
    fn height_is_total() {
        assert_eq!(Semicircle.height(2.0), 0.0);
        assert_eq!(Tent.height(-3.0), 0.0);
    }
}
