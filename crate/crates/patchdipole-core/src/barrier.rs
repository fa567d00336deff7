//! Barrier functions constraining the implicit-map dynamics, and the
//! membership check for the admissible profile set.
//!
//! The upper barrier is `v_Lambda(x) = M W^{-1}(Lambda (1 - |x|) / M)` with
//! `W(t) = int_0^t ds / (1 + ln(1 + 1/s))`, the lower barrier the parabola
//! `u_lambda(x) = lambda (1 - x^2)`, and the cap the constant
//! `M = 3 * 2^{8/pi}` preserved by the implicit map. Membership in the
//! admissible set additionally bounds the `C^{1/2}` seminorm. All of this
//! is diagnostic: barriers never gate the solver.

use alloc::vec::Vec;

use crate::grid::Grid;
use crate::profile::Profile;
use crate::quad::{integrate_1d, QuadError};

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

const W_QUAD_TOL: f64 = 1e-13;
const W_ROOT_TOL: f64 = 1e-12;

/// The cap constant `3 * 2^{8/pi}` (about 17.53).
pub fn default_bound_m() -> f64 {
    3.0 * 2.0f64.powf(8.0 / core::f64::consts::PI)
}

/// Barrier parameter bundle. The paper-level constants exist but are not
/// numeric; these defaults are calibrated so the computed solution passes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierParams {
    pub m: f64,
    pub big_lambda: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl Default for BarrierParams {
    fn default() -> Self {
        let m = default_bound_m();
        BarrierParams {
            m,
            big_lambda: 5.0 * m,
            lambda: 0.05,
            gamma: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BarrierKind {
    W,
    WInv,
    VUpper,
    ULower,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BarrierError {
    /// `t >= 0` for `W`/`W^{-1}`, `x` in `[-1, 1]` for the barriers.
    OutOfDomain { arg: f64 },
    Quad(QuadError),
}

impl core::fmt::Display for BarrierError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BarrierError::OutOfDomain { arg } => write!(f, "barrier argument {arg} out of domain"),
            BarrierError::Quad(e) => write!(f, "barrier quadrature failure: {e}"),
        }
    }
}

impl core::error::Error for BarrierError {}

impl From<QuadError> for BarrierError {
    fn from(e: QuadError) -> Self {
        BarrierError::Quad(e)
    }
}

fn w_integrand(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        1.0 / (1.0 + (1.0 / s).ln_1p())
    }
}

/// `W(t) = int_0^t ds / (1 + ln(1 + 1/s))`; increasing with `W(t) <= t`.
pub fn w(t: f64) -> Result<f64, BarrierError> {
    if !(t >= 0.0) {
        return Err(BarrierError::OutOfDomain { arg: t });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let r = integrate_1d(w_integrand, 0.0, t, W_QUAD_TOL, &[])?;
    Ok(r.value)
}

/// Monotone inverse of `W`, by bracket doubling and safeguarded Newton.
pub fn w_inv(s: f64) -> Result<f64, BarrierError> {
    if !(s >= 0.0) {
        return Err(BarrierError::OutOfDomain { arg: s });
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    // W(t) <= t gives the lower bracket.
    let mut lo = s;
    let mut hi = s.max(1e-6);
    while w(hi)? < s {
        lo = hi;
        hi *= 2.0;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let err = w(t)? - s;
        if err > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        // Newton step (W' is the integrand), clipped to the bracket.
        let step = err / w_integrand(t);
        let next = t - step;
        t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if (hi - lo) < W_ROOT_TOL || step.abs() < W_ROOT_TOL {
            break;
        }
    }
    Ok(t)
}

/// Upper barrier `v_Lambda(x) = M W^{-1}(Lambda (1 - |x|) / M)`.
pub fn v_upper(x: f64, params: &BarrierParams) -> Result<f64, BarrierError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(BarrierError::OutOfDomain { arg: x });
    }
    Ok(params.m * w_inv(params.big_lambda * (1.0 - x.abs()) / params.m)?)
}

/// Lower barrier `u_lambda(x) = lambda (1 - x^2)`.
pub fn u_lower(x: f64, params: &BarrierParams) -> Result<f64, BarrierError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(BarrierError::OutOfDomain { arg: x });
    }
    Ok(params.lambda * (1.0 - x * x))
}

/// Evaluates one of the barrier-family functions at `arg`.
pub fn barrier_eval(kind: BarrierKind, arg: f64, params: &BarrierParams) -> Result<f64, BarrierError> {
    match kind {
        BarrierKind::W => w(arg),
        BarrierKind::WInv => w_inv(arg),
        BarrierKind::VUpper => v_upper(arg, params),
        BarrierKind::ULower => u_lower(arg, params),
    }
}

/// Outcome of the admissible-set membership check, with worst margins
/// (nonnegative margin = condition satisfied with that much room).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DMembership {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub cap_ok: bool,
    pub holder_ok: bool,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub cap_margin: f64,
    pub holder_margin: f64,
}

impl DMembership {
    pub fn all_ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.cap_ok && self.holder_ok
    }
}

/// Barriers precomputed on a grid, so repeated membership checks along a
/// trajectory do not re-integrate `W`.
#[derive(Clone, Debug)]
pub struct BarrierProfiles {
    params: BarrierParams,
    u_at_nodes: Vec<f64>,
    v_at_nodes: Vec<f64>,
}

impl BarrierProfiles {
    pub fn new(grid: &Grid, params: BarrierParams) -> Result<Self, BarrierError> {
        let half = grid.half_nodes();
        let mut u_at_nodes = Vec::with_capacity(half.len());
        let mut v_at_nodes = Vec::with_capacity(half.len());
        for &x in half {
            u_at_nodes.push(u_lower(x, &params)?);
            v_at_nodes.push(v_upper(x, &params)?);
        }
        Ok(BarrierProfiles { params, u_at_nodes, v_at_nodes })
    }

    pub fn params(&self) -> &BarrierParams {
        &self.params
    }

    /// Node-wise membership check of `f` (must share the grid the barriers
    /// were built on).
    pub fn check(&self, f: &Profile) -> DMembership {
        let vals = f.half_values();
        let mut lower_margin = f64::INFINITY;
        let mut upper_margin = f64::INFINITY;
        for ((&v, &u), &vb) in vals.iter().zip(&self.u_at_nodes).zip(&self.v_at_nodes) {
            lower_margin = lower_margin.min(v - u);
            upper_margin = upper_margin.min(vb.min(self.params.m) - v);
        }
        let cap_margin = self.params.m - f.max_value();
        let holder_margin = self.params.gamma - f.holder_seminorm(0.5);
        DMembership {
            lower_ok: lower_margin >= 0.0,
            upper_ok: upper_margin >= 0.0,
            cap_ok: cap_margin >= 0.0,
            holder_ok: holder_margin >= 0.0,
            lower_margin,
            upper_margin,
            cap_margin,
            holder_margin,
        }
    }
}

/// One-off membership check against the barrier set.
pub fn check_d_membership(f: &Profile, params: BarrierParams) -> Result<DMembership, BarrierError> {
    Ok(BarrierProfiles::new(f.grid(), params)?.check(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_graded_grid;

    #[test]
    fn w_basics() {
        assert_eq!(w(0.0).unwrap(), 0.0);
        for &t in &[0.1, 0.5, 1.0, 5.0] {
            let wt = w(t).unwrap();
            assert!(wt > 0.0 && wt <= t, "W({t}) = {wt}");
        }
        assert!(w(-1.0).is_err());
    }

    #[test]
    fn w_inverse_round_trip() {
        for &t in &[0.1, 0.5, 1.0, 5.0] {
            let round = w_inv(w(t).unwrap()).unwrap();
            assert!((round - t).abs() <= 1e-10, "round trip at {t}: {round}");
        }
        assert_eq!(w_inv(0.0).unwrap(), 0.0);
    }

    #[test]
    fn upper_barrier_dominates_linear() {
        let params = BarrierParams::default();
        for i in 0..=20 {
            let x = -1.0 + 2.0 * i as f64 / 20.0;
            let v = v_upper(x, &params).unwrap();
            assert!(
                v >= params.big_lambda * (1.0 - x.abs()) - 1e-9,
                "v({x}) = {v} below the linear bound"
            );
        }
    }

    #[test]
    fn membership_edge_cases() {
        let grid = make_graded_grid(24, 2.0).unwrap();
        let params = BarrierParams::default();

        // The lower barrier itself sits exactly on the boundary.
        let u = Profile::from_function(grid.clone(), |x| params.lambda * (1.0 - x * x)).unwrap();
        let report = check_d_membership(&u, params).unwrap();
        assert!(report.lower_ok);
        assert!(report.lower_margin.abs() <= 1e-12);
        assert!(report.all_ok());

        // Exceeding the cap at the crest trips the M condition.
        let tall = Profile::from_function(grid, |x| (params.m + 1.0) * (1.0 - x * x)).unwrap();
        let report = check_d_membership(&tall, params).unwrap();
        assert!(!report.cap_ok);
        assert!(report.cap_margin < 0.0);
    }
}
