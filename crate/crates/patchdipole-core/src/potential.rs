//! The vorticity-induced stream potential of the upper patch half and the
//! derived quantities driving the fixed-point maps.
//!
//! `phi` is the half-plane Dirichlet potential of the unit vorticity patch
//! `{y1 in [-1, 1], 0 <= y2 <= f(y1)}`; the inner `y2` integral of the
//! defining region integral is carried out in closed form, leaving smooth
//! 1D integrands with known kink locations for the adaptive quadrature.
//! The travel speed is `c(f) = phi_x2(1, 0)`, and the root function of the
//! implicit map is `F(x1, x2; f) = phi(x1, x2)/x2 - c(f)`.
//!
//! For strictly decreasing boundaries there is a second, `y2`-outer
//! parameterization of every quantity through the inverse boundary
//! function; the pairs are cross-checked against each other and against
//! the 2D region oracle in the test suite.

use crate::boundary::Boundary;
use crate::quad::{integrate_1d, QuadError, QuadResult};
use crate::Point;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use core::f64::consts::PI;

/// Quadrature tolerance used on the solver path.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Below this height the evaluation point counts as on-axis and the
/// dedicated axis formula for `F` applies (quadrature noise floor).
pub const AXIS_EPS: f64 = 1e-8;

/// Travel speed of the dipole (unit vorticity, unit half-length).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedValue {
    pub c: f64,
}

/// A value of `F(x1, x2; f)`, tagged with its evaluation point. On the
/// axis (`x2 = 0`) the stored value is the limit `phi_x2(x1, 0) - c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FValue {
    pub value: f64,
    pub at: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialError {
    /// Points below the axis are not in the domain of the potential.
    NegativeHeight { x2: f64 },
    /// Speed too small to divide by; the profile is degenerate.
    DegenerateSpeed { c: f64 },
    Quad(QuadError),
}

impl core::fmt::Display for PotentialError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PotentialError::NegativeHeight { x2 } => {
                write!(f, "potential evaluated below the axis (x2 = {x2})")
            }
            PotentialError::DegenerateSpeed { c } => write!(f, "degenerate travel speed c = {c}"),
            PotentialError::Quad(e) => write!(f, "quadrature failure: {e}"),
        }
    }
}

impl core::error::Error for PotentialError {}

impl From<QuadError> for PotentialError {
    fn from(e: QuadError) -> Self {
        PotentialError::Quad(e)
    }
}

/// `t * ln(dx^2 + t^2)`, with the removable `0 * ln 0` defined as 0.
#[inline]
fn xlog_sq(t: f64, dx: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * (dx * dx + t * t).ln()
    }
}

/// `t * ln1p(num / den)` with the removable `t = 0` case defined as 0.
#[inline]
fn xlog1p(t: f64, num: f64, den: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * (num / den).ln_1p()
    }
}

/// `atan(p / q)` on the principal branch, with `q = 0` resolved to the
/// one-sided limit `sign(p) * pi/2` (0 for `p = 0`).
#[inline]
fn atan_ratio(p: f64, q: f64) -> f64 {
    if q == 0.0 {
        if p == 0.0 {
            0.0
        } else if p > 0.0 {
            core::f64::consts::FRAC_PI_2
        } else {
            -core::f64::consts::FRAC_PI_2
        }
    } else {
        (p / q).atan()
    }
}

/// Integrand of the closed-form `phi` integral (without the `1/2pi`),
/// continuous in `y1` after the removable limits at `y1 = x1`.
fn phi_integrand<B: Boundary + ?Sized>(f: &B, x: Point, y1: f64) -> f64 {
    let x2 = x.x2;
    if x2 == 0.0 {
        // Every term vanishes on the axis.
        return 0.0;
    }
    let fy = f.height(y1);
    let dx = x.x1 - y1;
    let den = dx * dx + x2 * x2;
    // 0.5 (x2 + f) ln((dx^2 + (x2+f)^2)/den) + 0.5 (x2 - f) ln((dx^2 + (x2-f)^2)/den)
    let logs = 0.5 * xlog1p(x2 + fy, fy * (fy + 2.0 * x2), den)
        + 0.5 * xlog1p(x2 - fy, fy * (fy - 2.0 * x2), den);
    if dx == 0.0 {
        // The arctan group carries the prefactor dx -> 0.
        return logs;
    }
    let arcs = dx
        * (((x2 + fy) / dx).atan() + ((x2 - fy) / dx).atan() - 2.0 * (x2 / dx).atan());
    logs + arcs
}

/// Integrand of `phi_x1` (without the `1/2pi`); jumps across `y1 = x1`
/// where the value is set to the two-sided average 0.
fn phi_x1_integrand<B: Boundary + ?Sized>(f: &B, x: Point, y1: f64) -> f64 {
    let dx = x.x1 - y1;
    if dx == 0.0 {
        return 0.0;
    }
    let fy = f.height(y1);
    let x2 = x.x2;
    ((x2 + fy) / dx).atan() + ((x2 - fy) / dx).atan() - 2.0 * (x2 / dx).atan()
}

/// Integrand of `phi_x2` (without the `1/2pi`); log-singular on the curve
/// and, for `x2 = 0`, at `y1 = x1`.
fn phi_x2_integrand<B: Boundary + ?Sized>(f: &B, x: Point, y1: f64) -> f64 {
    let fy = f.height(y1);
    let dx = x.x1 - y1;
    let x2 = x.x2;
    let den = dx * dx + x2 * x2;
    if den == 0.0 {
        return f64::INFINITY;
    }
    0.5 * ((fy * (fy + 2.0 * x2) / den).ln_1p() + (fy * (fy - 2.0 * x2) / den).ln_1p())
}

/// Split points for the `y1` integrals: the kink at `x1` plus hints where
/// the curve comes closest to the evaluation point.
fn splits(x: Point) -> [f64; 3] {
    [x.x1, x.x1 - x.x2, x.x1 + x.x2]
}

fn check_height(x: Point) -> Result<(), PotentialError> {
    if x.x2 < 0.0 {
        Err(PotentialError::NegativeHeight { x2: x.x2 })
    } else {
        Ok(())
    }
}

/// Half-plane Dirichlet potential `phi(x; f)` by the closed-form 1D
/// integral. Vanishes identically on the axis; even in `x1` for even `f`.
pub fn phi<B: Boundary + ?Sized>(x: Point, f: &B) -> Result<f64, PotentialError> {
    phi_with_tol(x, f, DEFAULT_QUAD_TOL)
}

pub fn phi_with_tol<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    tol: f64,
) -> Result<f64, PotentialError> {
    check_height(x)?;
    let r = integrate_1d(|y1| phi_integrand(f, x, y1), -1.0, 1.0, tol * 2.0 * PI, &splits(x))?;
    Ok(r.value / (2.0 * PI))
}

/// Gradient `(phi_x1, phi_x2)` by the closed-form 1D integrals.
pub fn grad_phi<B: Boundary + ?Sized>(x: Point, f: &B) -> Result<[f64; 2], PotentialError> {
    grad_phi_with_tol(x, f, DEFAULT_QUAD_TOL)
}

pub fn grad_phi_with_tol<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    tol: f64,
) -> Result<[f64; 2], PotentialError> {
    check_height(x)?;
    let scaled = tol * 2.0 * PI;
    let gx1 = integrate_1d(|y1| phi_x1_integrand(f, x, y1), -1.0, 1.0, scaled, &splits(x))?;
    let gx2 = integrate_1d(|y1| phi_x2_integrand(f, x, y1), -1.0, 1.0, scaled, &splits(x))?;
    Ok([gx1.value / (2.0 * PI), gx2.value / (2.0 * PI)])
}

/// Travel speed `c(f) = phi_x2(1, 0)`; zero iff the patch is empty.
pub fn speed_c<B: Boundary + ?Sized>(f: &B) -> Result<SpeedValue, PotentialError> {
    speed_c_with_tol(f, DEFAULT_QUAD_TOL)
}

pub fn speed_c_with_tol<B: Boundary + ?Sized>(
    f: &B,
    tol: f64,
) -> Result<SpeedValue, PotentialError> {
    let integrand = |y1: f64| {
        let fy = f.height(y1);
        let d = 1.0 - y1;
        if fy == 0.0 {
            0.0
        } else if d == 0.0 {
            f64::INFINITY
        } else {
            (fy * fy / (d * d)).ln_1p()
        }
    };
    let r = integrate_1d(integrand, -1.0, 1.0, tol * 2.0 * PI, &[])?;
    Ok(SpeedValue { c: r.value / (2.0 * PI) })
}

/// `F(x; f) = phi(x)/x2 - c` for `x2 > 0`; on the axis (within
/// [`AXIS_EPS`]) the explicit limit `phi_x2(x1, 0) - c`.
pub fn f_value<B: Boundary + ?Sized>(x: Point, f: &B) -> Result<FValue, PotentialError> {
    let c = speed_c(f)?;
    f_value_given_speed(x, f, c, DEFAULT_QUAD_TOL)
}

/// `F` with a precomputed speed; this is the hot path of the implicit map.
pub fn f_value_given_speed<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    c: SpeedValue,
    tol: f64,
) -> Result<FValue, PotentialError> {
    check_height(x)?;
    if x.x2 < AXIS_EPS {
        let axis = Point::new(x.x1, 0.0);
        let r = integrate_1d(
            |y1| phi_x2_integrand(f, axis, y1),
            -1.0,
            1.0,
            tol * 2.0 * PI,
            &splits(axis),
        )?;
        return Ok(FValue { value: r.value / (2.0 * PI) - c.c, at: x });
    }
    let p = phi_with_tol(x, f, tol)?;
    Ok(FValue { value: p / x.x2 - c.c, at: x })
}

/// Partial derivatives `(F_x1, F_x2)` for `x2 > 0`, computed from the
/// gradient of `phi`: `F_x1 = phi_x1/x2`, `F_x2 = phi_x2/x2 - phi/x2^2`.
pub fn f_partials<B: Boundary + ?Sized>(x: Point, f: &B) -> Result<[f64; 2], PotentialError> {
    f_partials_with_tol(x, f, DEFAULT_QUAD_TOL)
}

pub fn f_partials_with_tol<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    tol: f64,
) -> Result<[f64; 2], PotentialError> {
    if x.x2 <= 0.0 {
        return Err(PotentialError::NegativeHeight { x2: x.x2 });
    }
    let g = grad_phi_with_tol(x, f, tol)?;
    let p = phi_with_tol(x, f, tol)?;
    Ok([g[0] / x.x2, g[1] / x.x2 - p / (x.x2 * x.x2)])
}

/// Antiderivative of `ln(t^2 + a^2)` in `t` (even in `a`), used by the
/// inverse-parameterized potential.
#[inline]
fn log_antideriv(t: f64, a: f64) -> f64 {
    let l = xlog_sq(t, a);
    if a == 0.0 {
        l - 2.0 * t
    } else {
        l - 2.0 * t + 2.0 * a * (t / a).atan()
    }
}

/// The `y2`-outer parameterization of `phi` for strictly decreasing
/// boundaries: the inner `y1` integral over `[-f^{-1}(y2), f^{-1}(y2)]` is
/// in closed form and the outer integral runs over `[0, f(0)]`.
pub fn phi_inverse_param<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    tol: f64,
) -> Result<f64, PotentialError> {
    check_height(x)?;
    let top = f.crest();
    if top <= 0.0 {
        return Ok(0.0);
    }
    let x2 = x.x2;
    let inner = |y2: f64| {
        let g = f.inverse_height(y2);
        let (lo, hi) = (-g - x.x1, g - x.x1);
        let ap = x2 + y2;
        let am = x2 - y2;
        0.5 * ((log_antideriv(hi, ap) - log_antideriv(lo, ap))
            - (log_antideriv(hi, am) - log_antideriv(lo, am)))
    };
    let cuts = [x2, f.height(x.x1)];
    let r = integrate_1d(inner, 0.0, top, tol * 2.0 * PI, &cuts)?;
    Ok(r.value / (2.0 * PI))
}

/// Gradient of `phi` in the `y2`-outer parameterization.
pub fn grad_phi_inverse_param<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    tol: f64,
) -> Result<[f64; 2], PotentialError> {
    check_height(x)?;
    let top = f.crest();
    if top <= 0.0 {
        return Ok([0.0, 0.0]);
    }
    let x2 = x.x2;
    let ix1 = |y2: f64| {
        let g = f.inverse_height(y2);
        let dm = x.x1 - g;
        let dp = x.x1 + g;
        let sp = x2 + y2;
        let sm = x2 - y2;
        0.25 * ((dm * dm + sm * sm).ln() + (dp * dp + sp * sp).ln()
            - (dm * dm + sp * sp).ln()
            - (dp * dp + sm * sm).ln())
    };
    let ix2 = |y2: f64| {
        let g = f.inverse_height(y2);
        let dm = x.x1 - g;
        let dp = x.x1 + g;
        atan_ratio(dm, x2 - y2) - atan_ratio(dm, x2 + y2) - atan_ratio(dp, x2 - y2)
            + atan_ratio(dp, x2 + y2)
    };
    let cuts = [x2, f.height(x.x1)];
    let scaled = tol * 2.0 * PI;
    let gx1 = integrate_1d(ix1, 0.0, top, scaled, &cuts)?;
    let gx2 = integrate_1d(ix2, 0.0, top, scaled, &cuts)?;
    Ok([gx1.value / (2.0 * PI), gx2.value / (2.0 * PI)])
}

/// Travel speed in the `y2`-outer parameterization.
pub fn speed_c_inverse_param<B: Boundary + ?Sized>(
    f: &B,
    tol: f64,
) -> Result<SpeedValue, PotentialError> {
    let top = f.crest();
    if top <= 0.0 {
        return Ok(SpeedValue { c: 0.0 });
    }
    let integrand = |y2: f64| {
        let g = f.inverse_height(y2);
        atan_ratio(g - 1.0, y2) + atan_ratio(g + 1.0, y2)
    };
    let r = integrate_1d(integrand, 0.0, top, tol * PI, &[])?;
    Ok(SpeedValue { c: r.value / PI })
}

/// Region-integral form of `phi` through the 2D oracle (slow; for
/// cross-validation only). The standoff rules of the oracle apply.
pub fn phi_region_oracle<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let kernel = move |y1: f64, y2: f64| {
        let d2 = (x.x1 - y1).powi(2) + (x.x2 - y2).powi(2);
        let d2_bar = (x.x1 - y1).powi(2) + (x.x2 + y2).powi(2);
        0.5 * (d2_bar / d2).ln() / (2.0 * PI)
    };
    crate::quad::integrate_2d_region(kernel, f, x, tol)
}

/// Region-integral form of the speed through the 2D oracle.
pub fn speed_region_oracle<B: Boundary + ?Sized>(f: &B, tol: f64) -> Result<QuadResult, QuadError> {
    let kernel = |y1: f64, y2: f64| {
        let d = 1.0 - y1;
        y2 / (d * d + y2 * y2) / PI
    };
    // The kernel is singular only at (1, 0), which sits on the region
    // boundary; pass a far point for the standoff bookkeeping and rely on
    // the integrable decay of the kernel itself.
    crate::quad::integrate_2d_region(kernel, f, Point::new(0.0, f.crest() + 10.0), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{Semicircle, Tent};
    use crate::grid::make_graded_grid;
    use crate::profile::Profile;
    use crate::seeds;

    fn sampled_cos(n: usize) -> Profile {
        Profile::from_function(make_graded_grid(n, 2.0).unwrap(), seeds::cosine).unwrap()
    }

    #[test]
    fn phi_vanishes_on_axis_exactly() {
        for &x1 in &[-2.0, -1.0, -0.3, 0.0, 0.7, 1.0, 1.5] {
            let v = phi(Point::new(x1, 0.0), &Semicircle).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn phi_is_even_in_x1() {
        let f = sampled_cos(32);
        for &(a, b) in &[(0.4, 0.3), (0.9, 0.1), (1.3, 0.5)] {
            let plus = phi(Point::new(a, b), &f).unwrap();
            let minus = phi(Point::new(-a, b), &f).unwrap();
            assert!((plus - minus).abs() <= 1e-10, "{plus} vs {minus}");
        }
    }

    #[test]
    fn speed_semicircle_closed_form() {
        // The integrand ratio collapses to 2/(1 - y), giving exactly 1/pi.
        let c = speed_c(&Semicircle).unwrap().c;
        assert!((c - 1.0 / PI).abs() < 1e-10, "c = {c}");
    }

    #[test]
    fn speed_tent_closed_form() {
        let c = speed_c(&Tent).unwrap().c;
        let exact = 0.25 - 0.5 * core::f64::consts::LN_2 / PI;
        assert!((c - exact).abs() < 1e-10, "c = {c} vs {exact}");
    }

    #[test]
    fn speed_zero_profile() {
        let f = Profile::from_function(make_graded_grid(8, 1.0).unwrap(), |_| 0.0).unwrap();
        assert_eq!(speed_c(&f).unwrap().c, 0.0);
    }

    #[test]
    fn grad_phi_axis_symmetry_and_speed_link() {
        let f = sampled_cos(32);
        // phi_x1 vanishes on the x2-axis for even profiles.
        let g = grad_phi(Point::new(0.0, 1.0), &f).unwrap();
        assert!(g[0].abs() <= 1e-10, "phi_x1(0, 1) = {}", g[0]);
        // phi_x2(1, 0) is the travel speed.
        let g = grad_phi(Point::new(1.0, 0.0), &f).unwrap();
        let c = speed_c(&f).unwrap().c;
        assert!((g[1] - c).abs() <= 1e-10, "{} vs {c}", g[1]);
    }

    #[test]
    fn grad_phi_matches_central_differences() {
        let f = sampled_cos(48);
        let h = 1e-4;
        for &(a, b) in &[(0.35, 0.55), (1.2, 0.4), (0.0, 1.4)] {
            let g = grad_phi(Point::new(a, b), &f).unwrap();
            let dx1 = (phi(Point::new(a + h, b), &f).unwrap()
                - phi(Point::new(a - h, b), &f).unwrap())
                / (2.0 * h);
            let dx2 = (phi(Point::new(a, b + h), &f).unwrap()
                - phi(Point::new(a, b - h), &f).unwrap())
                / (2.0 * h);
            assert!((g[0] - dx1).abs() < 5e-7, "x1 at ({a},{b}): {} vs {dx1}", g[0]);
            assert!((g[1] - dx2).abs() < 5e-7, "x2 at ({a},{b}): {} vs {dx2}", g[1]);
        }
    }

    #[test]
    fn f_axis_values() {
        let f = sampled_cos(48);
        let end = f_value(Point::new(1.0, 0.0), &f).unwrap().value;
        assert!(end.abs() <= 1e-8, "F(1,0) = {end}");
        let mid = f_value(Point::new(0.5, 0.0), &f).unwrap().value;
        assert!(mid > 0.0, "F(0.5,0) = {mid}");
        let outside = f_value(Point::new(1.5, 0.0), &f).unwrap().value;
        assert!(outside < 0.0, "F(1.5,0) = {outside}");
    }

    #[test]
    fn f_tends_to_minus_c_far_up() {
        let f = sampled_cos(32);
        let c = speed_c(&f).unwrap().c;
        let far = f_value(Point::new(0.0, 1e3), &f).unwrap().value;
        assert!((far + c).abs() <= 1e-2 * c, "F(0, 1e3) = {far}, -c = {}", -c);
    }

    #[test]
    fn f_continuous_across_axis_switch() {
        let f = sampled_cos(32);
        let c = speed_c(&f).unwrap();
        let just_above =
            f_value_given_speed(Point::new(0.5, 1e-5), &f, c, DEFAULT_QUAD_TOL).unwrap().value;
        let on_axis =
            f_value_given_speed(Point::new(0.5, 0.0), &f, c, DEFAULT_QUAD_TOL).unwrap().value;
        assert!((just_above - on_axis).abs() < 1e-3, "{just_above} vs {on_axis}");
    }

    #[test]
    fn f_partials_signs_and_differences() {
        let f = Profile::from_function(make_graded_grid(48, 2.0).unwrap(), seeds::semicircle_fn)
            .unwrap();
        let at = Point::new(0.0, 1.0);
        let p = f_partials(at, &f).unwrap();
        assert!(p[0].abs() <= 1e-9, "F_x1(0, 1) = {}", p[0]);

        let at = Point::new(0.5, 0.5);
        let p = f_partials(at, &f).unwrap();
        assert!(p[0] < 0.0 && p[1] < 0.0, "partials {p:?}");

        let c = speed_c(&f).unwrap();
        let h = 1e-4;
        let fv = |q: Point| f_value_given_speed(q, &f, c, DEFAULT_QUAD_TOL).unwrap().value;
        let d1 = (fv(Point::new(at.x1 + h, at.x2)) - fv(Point::new(at.x1 - h, at.x2))) / (2.0 * h);
        let d2 = (fv(Point::new(at.x1, at.x2 + h)) - fv(Point::new(at.x1, at.x2 - h))) / (2.0 * h);
        assert!((p[0] - d1).abs() < 1e-6, "{} vs {d1}", p[0]);
        assert!((p[1] - d2).abs() < 1e-6, "{} vs {d2}", p[1]);
    }

    #[test]
    fn inverse_parameterization_agrees() {
        for &(a, b) in &[(0.3, 0.4), (0.0, 0.9), (0.8, 0.2), (1.4, 0.6)] {
            let x = Point::new(a, b);
            let direct = phi(x, &Semicircle).unwrap();
            let inverse = phi_inverse_param(x, &Semicircle, 1e-10).unwrap();
            assert!((direct - inverse).abs() <= 1e-8, "phi at ({a},{b}): {direct} vs {inverse}");
        }
        assert_eq!(phi_inverse_param(Point::new(0.3, 0.0), &Semicircle, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn inverse_gradient_agrees() {
        for &(a, b) in &[(0.3, 0.4), (1.2, 0.5)] {
            let x = Point::new(a, b);
            let direct = grad_phi(x, &Semicircle).unwrap();
            let inverse = grad_phi_inverse_param(x, &Semicircle, 1e-10).unwrap();
            assert!((direct[0] - inverse[0]).abs() <= 1e-8, "{direct:?} vs {inverse:?}");
            assert!((direct[1] - inverse[1]).abs() <= 1e-8, "{direct:?} vs {inverse:?}");
        }
    }

    #[test]
    fn inverse_speed_agrees() {
        let direct = speed_c(&Semicircle).unwrap().c;
        let inverse = speed_c_inverse_param(&Semicircle, 1e-10).unwrap().c;
        assert!((direct - inverse).abs() <= 1e-8, "{direct} vs {inverse}");
        let direct = speed_c(&Tent).unwrap().c;
        let inverse = speed_c_inverse_param(&Tent, 1e-10).unwrap().c;
        assert!((direct - inverse).abs() <= 1e-8, "{direct} vs {inverse}");
    }

    #[test]
    fn two_dimensional_oracle_agrees() {
        let x = Point::new(0.0, 2.0);
        let direct = phi(x, &Semicircle).unwrap();
        let oracle = phi_region_oracle(x, &Semicircle, 1e-6).unwrap();
        assert!((direct - oracle.value).abs() <= 1e-6, "{direct} vs {}", oracle.value);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(matches!(
            phi(Point::new(0.0, -0.1), &Semicircle),
            Err(PotentialError::NegativeHeight { .. })
        ));
    }
}
