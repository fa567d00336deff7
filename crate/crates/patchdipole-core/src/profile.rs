//! Patch boundary profiles: even, endpoint-vanishing functions on `[-1, 1]`
//! sampled on a [`Grid`] and interpolated by a monotone shape-preserving
//! piecewise cubic (PCHIP slopes).
//!
//! Evenness is structural: only the `[0, 1]` half is stored and every
//! evaluation goes through `|x|`, so `f(-x) = f(x)` holds bit-exactly and
//! cannot drift. The interpolant slope at `x = 0` is pinned to zero for the
//! same reason. Values at `+-1` are exactly zero.

use alloc::vec::Vec;

use crate::grid::Grid;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

/// Largest value a sampled function may take at the endpoints `+-1` and
/// still be accepted (the stored endpoint value is zeroed). Loose on
/// purpose: one of the reference seeds carries a residual `~5e-3` there.
pub const ENDPOINT_TOL: f64 = 1e-2;

const EVENNESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileError {
    /// `g(x) != g(-x)` beyond tolerance at the reported node.
    AsymmetricSample { node: f64, plus: f64, minus: f64 },
    /// Negative sample at the reported node.
    NegativeSample { node: f64, value: f64 },
    /// `|g(1)|` exceeds [`ENDPOINT_TOL`].
    EndpointNotVanishing { value: f64 },
    NonFiniteSample { node: f64 },
    LengthMismatch { expected: usize, got: usize },
    /// Evaluation point outside `[-1, 1]`.
    OutOfDomain { x: f64 },
    /// The interpolant derivative is unbounded at `+-1` for the profiles of
    /// interest; evaluation there is rejected.
    DerivativeAtEndpoint,
    /// Inversion requires a strictly decreasing profile on `[0, 1]`.
    NotStrictlyMonotone,
    /// Inversion target outside `[0, f(0)]`.
    ValueOutOfRange { y: f64, max: f64 },
    /// Profiles live on different grids.
    GridMismatch,
}

impl core::fmt::Display for ProfileError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProfileError::AsymmetricSample { node, plus, minus } => {
                write!(f, "asymmetric samples at x = {node}: g(x) = {plus}, g(-x) = {minus}")
            }
            ProfileError::NegativeSample { node, value } => {
                write!(f, "negative sample {value} at x = {node}")
            }
            ProfileError::EndpointNotVanishing { value } => {
                write!(f, "profile must vanish at +-1, got {value}")
            }
            ProfileError::NonFiniteSample { node } => write!(f, "non-finite sample at x = {node}"),
            ProfileError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} half-node values, got {got}")
            }
            ProfileError::OutOfDomain { x } => write!(f, "x = {x} outside [-1, 1]"),
            ProfileError::DerivativeAtEndpoint => {
                f.write_str("profile derivative is not evaluated at x = +-1")
            }
            ProfileError::NotStrictlyMonotone => {
                f.write_str("profile is not strictly decreasing on [0, 1]")
            }
            ProfileError::ValueOutOfRange { y, max } => {
                write!(f, "inverse target {y} outside [0, {max}]")
            }
            ProfileError::GridMismatch => f.write_str("profiles live on different grids"),
        }
    }
}

impl core::error::Error for ProfileError {}

/// An even, endpoint-vanishing boundary profile with class diagnostics.
///
/// `is_m0`: positive on `(-1, 1)` and non-increasing on `[0, 1]` (sample
/// criterion). `is_m1`: additionally the interpolant derivative is negative
/// on `(0, 1)` and zero at 0. The flags are diagnostics; profiles outside
/// these classes (e.g. intermediate iterates of the explicit map) are
/// representable with the flags false.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    grid: Grid,
    /// Values at the `[0, 1]` half nodes; `values[N] = 0` exactly.
    values: Vec<f64>,
    /// PCHIP slopes at the half nodes; `slopes[0] = 0` (even reflection).
    slopes: Vec<f64>,
    is_m0: bool,
    is_m1: bool,
}

impl Profile {
    /// Samples `g` on the grid and builds the interpolant. `g` must be even
    /// and nonnegative with `|g(+-1)| <= ENDPOINT_TOL`; violations are
    /// rejected with the offending node.
    pub fn from_function<G: Fn(f64) -> f64>(grid: Grid, g: G) -> Result<Profile, ProfileError> {
        let half = grid.half_nodes();
        let mut values = Vec::with_capacity(half.len());
        for &x in half {
            let plus = g(x);
            if !plus.is_finite() {
                return Err(ProfileError::NonFiniteSample { node: x });
            }
            if x > 0.0 {
                let minus = g(-x);
                if (plus - minus).abs() > EVENNESS_TOL * plus.abs().max(1.0) {
                    return Err(ProfileError::AsymmetricSample { node: x, plus, minus });
                }
            }
            values.push(plus);
        }
        Profile::from_half_values(grid, values)
    }

    /// Builds a profile from explicit values at the `[0, 1]` half nodes.
    /// The endpoint value is zeroed after the tolerance check; negatives
    /// below `-1e-12` are rejected, tiny ones are clamped to 0.
    pub fn from_half_values(grid: Grid, mut values: Vec<f64>) -> Result<Profile, ProfileError> {
        let half = grid.half_nodes();
        if values.len() != half.len() {
            return Err(ProfileError::LengthMismatch {
                expected: half.len(),
                got: values.len(),
            });
        }
        for (&x, v) in half.iter().zip(values.iter_mut()) {
            if !v.is_finite() {
                return Err(ProfileError::NonFiniteSample { node: x });
            }
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(ProfileError::NegativeSample { node: x, value: *v });
                }
                *v = 0.0;
            }
        }
        let end = *values.last().unwrap();
        if end.abs() > ENDPOINT_TOL {
            return Err(ProfileError::EndpointNotVanishing { value: end });
        }
        *values.last_mut().unwrap() = 0.0;

        let slopes = pchip_slopes(half, &values);
        let (is_m0, is_m1) = classify(&values, &slopes);
        Ok(Profile {
            grid,
            values,
            slopes,
            is_m0,
            is_m1,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Values at the `[0, 1]` half nodes.
    pub fn half_values(&self) -> &[f64] {
        &self.values
    }

    /// Value at node `k` of the full grid (mirror implied).
    pub fn value_at_node(&self, k: usize) -> f64 {
        let n = self.grid.half_count();
        if k >= n {
            self.values[k - n]
        } else {
            self.values[n - k]
        }
    }

    /// `f(0)`, the crest height.
    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    pub fn is_m0(&self) -> bool {
        self.is_m0
    }

    pub fn is_m1(&self) -> bool {
        self.is_m1
    }

    /// Interpolant evaluation; exact at nodes, even in `x`, nonnegative.
    pub fn eval(&self, x: f64) -> Result<f64, ProfileError> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(ProfileError::OutOfDomain { x });
        }
        Ok(self.eval_unchecked(x.abs()))
    }

    /// Interpolant derivative, odd in `x`; `+-1` rejected.
    pub fn derivative(&self, x: f64) -> Result<f64, ProfileError> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(ProfileError::OutOfDomain { x });
        }
        if x.abs() == 1.0 {
            return Err(ProfileError::DerivativeAtEndpoint);
        }
        let d = self.derivative_half(x.abs());
        Ok(if x < 0.0 { -d } else { d })
    }

    /// Inverse of the restriction to `[0, 1]` for strictly decreasing
    /// profiles: the `x >= 0` with `eval(x) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64, ProfileError> {
        if !self.strictly_decreasing_samples() {
            return Err(ProfileError::NotStrictlyMonotone);
        }
        let top = self.values[0];
        if !(0.0..=top).contains(&y) {
            return Err(ProfileError::ValueOutOfRange { y, max: top });
        }
        if y == top {
            return Ok(0.0);
        }
        if y == 0.0 {
            return Ok(1.0);
        }
        // Bisection on the monotone interpolant; eval is cheap enough that
        // no polish step is warranted.
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.eval_unchecked(mid) >= y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Hoelder seminorm estimate: max over all full-grid node pairs of
    /// `|f(x) - f(y)| / |x - y|^alpha`.
    pub fn holder_seminorm(&self, alpha: f64) -> f64 {
        let m = self.grid.len();
        let mut sup = 0.0f64;
        for i in 0..m {
            let xi = self.grid.node(i);
            let fi = self.value_at_node(i);
            for j in i + 1..m {
                let xj = self.grid.node(j);
                let fj = self.value_at_node(j);
                let r = (fi - fj).abs() / (xj - xi).powf(alpha);
                sup = sup.max(r);
            }
        }
        sup
    }

    /// Pointwise convex combination `(1 - theta) * self + theta * other`
    /// on a shared grid.
    pub fn blend(&self, other: &Profile, theta: f64) -> Result<Profile, ProfileError> {
        if self.grid != other.grid {
            return Err(ProfileError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        Profile::from_half_values(self.grid.clone(), values)
    }

    /// `alpha * f` for `alpha >= 0`.
    pub fn scaled(&self, alpha: f64) -> Profile {
        let values = self.values.iter().map(|v| alpha * v).collect();
        Profile::from_half_values(self.grid.clone(), values)
            .expect("scaling a valid profile by a nonnegative factor stays valid")
    }

    /// Max-node distance to another profile on the same grid.
    pub fn max_distance(&self, other: &Profile) -> Result<f64, ProfileError> {
        if self.grid != other.grid {
            return Err(ProfileError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn strictly_decreasing_samples(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }

    pub(crate) fn eval_unchecked(&self, ax: f64) -> f64 {
        let half = self.grid.half_nodes();
        let n = half.len() - 1;
        if ax >= 1.0 {
            return 0.0;
        }
        // Cell index: largest i with half[i] <= ax.
        let i = match half.binary_search_by(|p| p.partial_cmp(&ax).unwrap()) {
            Ok(i) => {
                if i == n {
                    return self.values[n];
                }
                i
            }
            Err(i) => i - 1,
        };
        let h = half[i + 1] - half[i];
        let s = (ax - half[i]) / h;
        hermite(self.values[i], self.values[i + 1], self.slopes[i], self.slopes[i + 1], s, h).0
    }

    fn derivative_half(&self, ax: f64) -> f64 {
        let half = self.grid.half_nodes();
        let n = half.len() - 1;
        let i = match half.binary_search_by(|p| p.partial_cmp(&ax).unwrap()) {
            Ok(i) if i < n => i,
            Ok(_) => n - 1,
            Err(i) => i - 1,
        };
        let h = half[i + 1] - half[i];
        let s = (ax - half[i]) / h;
        hermite(self.values[i], self.values[i + 1], self.slopes[i], self.slopes[i + 1], s, h).1
    }
}

/// Cubic Hermite value and derivative on one cell, `s` in `[0, 1]`.
fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, s: f64, h: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let value = y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + h * d0 * (s3 - 2.0 * s2 + s)
        + y1 * (-2.0 * s3 + 3.0 * s2)
        + h * d1 * (s3 - s2);
    let deriv = (y0 * (6.0 * s2 - 6.0 * s)
        + h * d0 * (3.0 * s2 - 4.0 * s + 1.0)
        + y1 * (-6.0 * s2 + 6.0 * s)
        + h * d1 * (3.0 * s2 - 2.0 * s))
        / h;
    (value, deriv)
}

/// PCHIP slopes on `[0, 1]` with the left endpoint pinned to zero (even
/// reflection at `x = 0`). Weighted harmonic means at interior nodes keep
/// the interpolant monotone wherever the data is.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut h = Vec::with_capacity(n - 1);
    let mut delta = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let hi = x[i + 1] - x[i];
        h.push(hi);
        delta.push((y[i + 1] - y[i]) / hi);
    }

    let mut d = alloc::vec![0.0; n];
    for k in 1..n - 1 {
        let s1 = delta[k - 1];
        let s2 = delta[k];
        if s1 == 0.0 || s2 == 0.0 || (s1 > 0.0) != (s2 > 0.0) {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / s1 + w2 / s2);
        }
    }

    // x = 0: zero slope by evenness.
    d[0] = 0.0;

    // x = 1: one-sided three-point formula with the usual monotonicity clamp.
    let m = n - 1;
    let mut dn = ((2.0 * h[m - 1] + h[m - 2]) * delta[m - 1] - h[m - 1] * delta[m - 2])
        / (h[m - 1] + h[m - 2]);
    if dn == 0.0 || delta[m - 1] == 0.0 || (dn > 0.0) != (delta[m - 1] > 0.0) {
        dn = 0.0;
    } else if (delta[m - 1] > 0.0) != (delta[m - 2] > 0.0) && dn.abs() > 3.0 * delta[m - 1].abs() {
        dn = 3.0 * delta[m - 1];
    }
    d[m] = dn;

    d
}

fn classify(values: &[f64], slopes: &[f64]) -> (bool, bool) {
    let n = values.len() - 1;
    let positive_inside = values[..n].iter().all(|&v| v > 0.0);
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0]);
    let is_m0 = positive_inside && nonincreasing;
    let strictly = values.windows(2).all(|w| w[1] < w[0]);
    let negative_slopes = slopes[1..].iter().all(|&d| d < 0.0);
    (is_m0, is_m0 && strictly && negative_slopes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_graded_grid;
    use core::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        make_graded_grid(n, 2.0).unwrap()
    }

    fn cos_profile(n: usize) -> Profile {
        Profile::from_function(grid(n), |x| (PI * x / 2.0).cos()).unwrap()
    }

    fn semicircle(n: usize) -> Profile {
        Profile::from_function(grid(n), |x| (1.0 - x * x).max(0.0).sqrt()).unwrap()
    }

    #[test]
    fn cos_seed_is_m0_with_unit_crest() {
        let p = cos_profile(32);
        assert!(p.is_m0());
        assert!(p.is_m1());
        assert_eq!(p.max_value(), 1.0);
        assert_eq!(p.eval(1.0).unwrap(), 0.0);
        assert_eq!(p.eval(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn log_seed_is_m0() {
        // (1 - x^2) log(1 + 1/(1 - x^2)) has endpoint limit 0.
        let p = Profile::from_function(grid(32), |x| {
            let w = 1.0 - x * x;
            if w <= 0.0 {
                0.0
            } else {
                w * (1.0 + 1.0 / w).ln()
            }
        })
        .unwrap();
        assert!(p.is_m0());
    }

    #[test]
    fn non_monotone_seed_accepted_with_flag_false() {
        let p = Profile::from_function(grid(32), |x| {
            let w = 1.0 - x * x;
            let hump = 1.0 + (2.0 * x * x - 1.0).powi(2);
            if w <= 0.0 {
                0.0
            } else {
                w / hump * (1.0 + 1.0 / w).ln()
            }
        })
        .unwrap();
        assert!(!p.is_m0());
        assert!(!p.is_m1());
    }

    #[test]
    fn rejects_asymmetric_and_negative() {
        let g = grid(16);
        let err = Profile::from_function(g.clone(), |x| if x > 0.0 { 1.0 - x } else { 1.0 + 0.5 * x }).unwrap_err();
        assert!(matches!(err, ProfileError::AsymmetricSample { .. }));
        let err = Profile::from_function(g.clone(), |x| x.abs() - 0.5).unwrap_err();
        assert!(matches!(err, ProfileError::NegativeSample { .. }));
        let err = Profile::from_function(g, |_| 1.0).unwrap_err();
        assert!(matches!(err, ProfileError::EndpointNotVanishing { .. }));
    }

    #[test]
    fn eval_is_exact_at_nodes_and_even() {
        let p = cos_profile(24);
        let g = p.grid().clone();
        for k in 0..g.len() {
            let x = g.node(k);
            assert_eq!(p.eval(x).unwrap(), p.value_at_node(k));
        }
        for &x in &[0.1, 0.33, 0.777, 0.9991] {
            assert_eq!(p.eval(x).unwrap(), p.eval(-x).unwrap());
        }
        assert!(p.eval(1.2).is_err());
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let p = cos_profile(24);
        let mut prev = p.eval(0.0).unwrap();
        let mut x = 0.0f64;
        while x < 1.0 {
            x += 1e-3;
            let v = p.eval(x.min(1.0)).unwrap();
            assert!(v <= prev + 1e-14, "not monotone at x = {x}");
            assert!(v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn derivative_matches_analytic_and_is_odd() {
        let p = cos_profile(128);
        assert_eq!(p.derivative(0.0).unwrap(), 0.0);
        let d = p.derivative(0.5).unwrap();
        let exact = -(PI / 2.0) * (PI / 4.0).sin();
        assert!((d - exact).abs() < 1e-4, "pchip derivative off: {d} vs {exact}");
        assert_eq!(p.derivative(-0.5).unwrap(), -d);
        assert!(p.derivative(1.0).is_err());
    }

    #[test]
    fn inverse_round_trip_and_endpoints() {
        let p = semicircle(64);
        assert_eq!(p.inverse(p.max_value()).unwrap(), 0.0);
        assert_eq!(p.inverse(0.0).unwrap(), 1.0);
        let x = p.inverse(0.6).unwrap();
        assert!((x - 0.8).abs() < 1e-3, "semicircle inverse: {x}");
        for i in 0..200 {
            let y = p.max_value() * (i as f64 + 0.5) / 200.0;
            let xi = p.inverse(y).unwrap();
            assert!((p.eval(xi).unwrap() - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn inverse_rejects_non_monotone() {
        let p = Profile::from_function(grid(16), |x| {
            let w = 1.0 - x * x;
            let hump = 1.0 + (2.0 * x * x - 1.0).powi(2);
            if w <= 0.0 {
                0.0
            } else {
                w / hump * (1.0 + 1.0 / w).ln()
            }
        })
        .unwrap();
        assert!(matches!(p.inverse(0.2), Err(ProfileError::NotStrictlyMonotone)));
    }

    #[test]
    fn holder_seminorm_basics() {
        let zero = Profile::from_function(grid(16), |_| 0.0).unwrap();
        assert_eq!(zero.holder_seminorm(0.5), 0.0);

        let tent = Profile::from_function(grid(16), |x| 1.0 - x.abs()).unwrap();
        let s = tent.holder_seminorm(0.5);
        let s2 = tent.scaled(2.0).holder_seminorm(0.5);
        assert!((s2 - 2.0 * s).abs() < 1e-12 * s.max(1.0));
        // Slope-1 data: the ratio |df| / dx^{1/2} = dx^{1/2} grows with the
        // pair separation, so the sup is 1, attained by (0, 1).
        let g = tent.grid().clone();
        let mut brute = 0.0f64;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let num = (tent.value_at_node(i) - tent.value_at_node(j)).abs();
                brute = brute.max(num / (g.node(j) - g.node(i)).sqrt());
            }
        }
        assert!((s - brute).abs() <= 1e-15);
        assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn blend_and_distance() {
        let a = cos_profile(16);
        let b = a.scaled(0.5);
        let mid = a.blend(&b, 0.5).unwrap();
        assert!((mid.max_value() - 0.75).abs() < 1e-15);
        assert!((a.max_distance(&b).unwrap() - 0.5).abs() < 1e-15);
        let other = cos_profile(20);
        assert!(a.blend(&other, 0.5).is_err());
    }
}
