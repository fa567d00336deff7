//! The explicit map `P`, the implicit map `R`, residuals, the fixed-point
//! driver, and the Euler-polygon dynamics `f_t = R(f) - f`.
//!
//! `P(f)` evaluates `phi(x_j, f(x_j); f) / c(f)` node-wise. `R(f)` solves
//! `F(x_j, x2; f) = 0` for `x2 > 0` at every interior node; `F` is
//! strictly decreasing in `x2`, so bracketed bisection is unconditionally
//! safe and a short Newton polish sharpens the root. Node evaluations are
//! independent and run in parallel with the `parallel` feature.
//!
//! Plain `P`-iteration is the production scheme; convergence of the raw
//! iteration is an observation, not a theorem, so the driver watches for
//! sustained residual growth and aborts instead of assuming contraction.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::barrier::{BarrierError, BarrierParams, BarrierProfiles};
use crate::potential::{
    f_value_given_speed, phi_with_tol, speed_c_with_tol, PotentialError, SpeedValue,
};
use crate::profile::{Profile, ProfileError};
use crate::Point;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum speed accepted before the explicit map divides by `c(f)`.
pub const C_MIN: f64 = 1e-12;

/// Bisection stops when the bracket is this narrow; the Newton polish then
/// targets [`ROOT_POLISH_TOL`].
const BISECT_WIDTH: f64 = 1e-10;
const ROOT_POLISH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Plain explicit iteration `f <- P(f)`.
    ExplicitP,
    /// Implicit iteration `f <- R(f)` (supported; convergence not promised).
    ImplicitR,
    /// Forward-Euler trajectory of `f_t = R(f) - f`.
    Dynamics,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExplicitP => "explicit_p",
            Scheme::ImplicitR => "implicit_r",
            Scheme::Dynamics => "dynamics",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    pub scheme: Scheme,
    /// Max-node residual target.
    pub tol: f64,
    pub max_iter: usize,
    /// Damping theta in (0, 1]: `f <- (1 - theta) f + theta map(f)`.
    pub damping: f64,
    /// Euler time step (dynamics only), in (0, 1).
    pub dt: f64,
    pub barriers: BarrierParams,
    /// Quadrature tolerance on the solver path.
    pub quad_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            scheme: Scheme::ExplicitP,
            tol: 1e-8,
            max_iter: 2000,
            damping: 1.0,
            dt: 0.1,
            barriers: BarrierParams::default(),
            quad_tol: crate::potential::DEFAULT_QUAD_TOL,
        }
    }
}

/// Class diagnostics recorded per iteration step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepClass {
    pub is_m0: bool,
    pub is_m1: bool,
    pub in_d: bool,
}

/// Iteration history and terminal state of a solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub scheme: Scheme,
    /// Number of profile updates applied.
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub class_history: Vec<StepClass>,
    pub final_profile: Profile,
    pub final_speed: SpeedValue,
    pub converged: bool,
}

#[derive(Debug)]
pub enum SolveError {
    /// `c(f)` below [`C_MIN`]; the profile is (numerically) empty.
    DegenerateSpeed { c: f64 },
    /// No sign change of `F(x, .)` found; the input is inadmissible
    /// (`F(x, 0) <= 0`).
    NoBracket { x: f64, tried_up_to: f64 },
    /// Residual grew past 10x its initial value for three consecutive
    /// steps; the partial report is attached.
    Diverged(Box<SolveReport>),
    /// Euler time step outside `[0, 1)`.
    BadTimeStep { dt: f64 },
    Potential(PotentialError),
    Profile(ProfileError),
    Barrier(BarrierError),
}

impl core::fmt::Display for SolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolveError::DegenerateSpeed { c } => write!(f, "degenerate travel speed c = {c}"),
            SolveError::NoBracket { x, tried_up_to } => {
                write!(f, "no root bracket for F({x}, .) up to x2 = {tried_up_to}")
            }
            SolveError::Diverged(r) => write!(
                f,
                "iteration diverged after {} steps (last residual {:.3e})",
                r.residual_history.len(),
                r.residual_history.last().copied().unwrap_or(f64::NAN)
            ),
            SolveError::BadTimeStep { dt } => write!(f, "Euler step dt = {dt} outside [0, 1)"),
            SolveError::Potential(e) => write!(f, "{e}"),
            SolveError::Profile(e) => write!(f, "{e}"),
            SolveError::Barrier(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<PotentialError> for SolveError {
    fn from(e: PotentialError) -> Self {
        SolveError::Potential(e)
    }
}
impl From<ProfileError> for SolveError {
    fn from(e: ProfileError) -> Self {
        SolveError::Profile(e)
    }
}
impl From<BarrierError> for SolveError {
    fn from(e: BarrierError) -> Self {
        SolveError::Barrier(e)
    }
}

fn speed_guarded(f: &Profile, quad_tol: f64) -> Result<SpeedValue, SolveError> {
    let c = speed_c_with_tol(f, quad_tol)?;
    if c.c <= C_MIN {
        return Err(SolveError::DegenerateSpeed { c: c.c });
    }
    Ok(c)
}

/// Maps half-node indices through `op`, in parallel when enabled.
fn map_half_nodes<T: Send>(
    count: usize,
    op: impl Fn(usize) -> Result<T, SolveError> + Sync,
) -> Result<Vec<T>, SolveError> {
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(op).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(op).collect()
    }
}

/// The explicit map `P(f) = phi(x, f(x); f) / c(f)`, node-wise on the
/// `[0, 1]` half (mirrored structurally). The output vanishes at the
/// endpoints but need not stay monotone; its class flags are recomputed.
pub fn map_p(f: &Profile, quad_tol: f64) -> Result<Profile, SolveError> {
    let c = speed_guarded(f, quad_tol)?;
    let half = f.grid().half_nodes();
    let n = half.len();
    let values = map_half_nodes(n, |j| {
        let x = half[j];
        if x >= 1.0 {
            return Ok(0.0);
        }
        let p = phi_with_tol(Point::new(x, f.half_values()[j]), f, quad_tol)?;
        Ok(p / c.c)
    })?;
    Ok(Profile::from_half_values(f.grid().clone(), values)?)
}

/// The implicit map `R(f)`: at each interior node the unique `x2 > 0` with
/// `F(x_j, x2; f) = 0`, located by bracket doubling from `[0, f(0) + 1]`,
/// bisection, and a Newton polish through `F_x2`. Endpoints are 0.
pub fn map_r(f: &Profile, quad_tol: f64) -> Result<Profile, SolveError> {
    let c = speed_guarded(f, quad_tol)?;
    let half = f.grid().half_nodes();
    let n = half.len();
    let bracket_top = f.max_value() + 1.0;

    let values = map_half_nodes(n, |j| {
        let x = half[j];
        if x >= 1.0 {
            return Ok(0.0);
        }
        solve_f_root(f, x, c, bracket_top, quad_tol)
    })?;
    Ok(Profile::from_half_values(f.grid().clone(), values)?)
}

/// Root of `x2 -> F(x, x2; f)` on `(0, inf)`. `F(x, 0) > 0` and
/// `F(x, +inf) = -c < 0` for admissible inputs; strict monotonicity in
/// `x2` makes the bisection safe.
fn solve_f_root(
    f: &Profile,
    x: f64,
    c: SpeedValue,
    bracket_top: f64,
    quad_tol: f64,
) -> Result<f64, SolveError> {
    let fv = |x2: f64| -> Result<f64, SolveError> {
        Ok(f_value_given_speed(Point::new(x, x2), f, c, quad_tol)?.value)
    };

    if fv(0.0)? <= 0.0 {
        return Err(SolveError::NoBracket { x, tried_up_to: 0.0 });
    }
    let mut hi = bracket_top;
    let mut f_hi = fv(hi)?;
    while f_hi >= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(SolveError::NoBracket { x, tried_up_to: hi });
        }
        f_hi = fv(hi)?;
    }

    let mut lo = 0.0f64;
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        if fv(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish on the bisection midpoint.
    let mut root = 0.5 * (lo + hi);
    for _ in 0..2 {
        let val = fv(root)?;
        let slope = f_x2_partial(f, Point::new(x, root), quad_tol)?;
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = root - val / slope;
        if !(next > 0.0) || !next.is_finite() {
            break;
        }
        let step = (next - root).abs();
        root = next;
        if step < ROOT_POLISH_TOL {
            break;
        }
    }
    Ok(root)
}

/// `F_x2 = phi_x2/x2 - phi/x2^2` without the unused `x1` component.
fn f_x2_partial(f: &Profile, x: Point, quad_tol: f64) -> Result<f64, SolveError> {
    let g = crate::potential::grad_phi_with_tol(x, f, quad_tol)?;
    let p = phi_with_tol(x, f, quad_tol)?;
    Ok(g[1] / x.x2 - p / (x.x2 * x.x2))
}

/// Which map a residual refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    P,
    R,
}

/// Max-node residual `|map(f) - f|`.
pub fn residual(f: &Profile, which: MapKind, quad_tol: f64) -> Result<f64, SolveError> {
    let mapped = match which {
        MapKind::P => map_p(f, quad_tol)?,
        MapKind::R => map_r(f, quad_tol)?,
    };
    Ok(mapped.max_distance(f)?)
}

/// One Euler-polygon step `(1 - dt) f + dt R(f)`, `dt` in `[0, 1)`.
pub fn euler_step(f: &Profile, dt: f64, quad_tol: f64) -> Result<Profile, SolveError> {
    if !(0.0..1.0).contains(&dt) {
        return Err(SolveError::BadTimeStep { dt });
    }
    if dt == 0.0 {
        return Ok(f.clone());
    }
    let r = map_r(f, quad_tol)?;
    Ok(f.blend(&r, dt)?)
}

fn step_class(f: &Profile, barriers: &BarrierProfiles) -> StepClass {
    let d = barriers.check(f);
    StepClass { is_m0: f.is_m0(), is_m1: f.is_m1(), in_d: d.all_ok() }
}

/// Damped fixed-point iteration of the chosen map until the max-node
/// residual drops to `cfg.tol` or `cfg.max_iter` updates were applied.
/// Sustained residual growth (3 consecutive steps above 10x the initial
/// residual) aborts with the partial report attached.
///
/// `scheme = Dynamics` delegates to [`run_dynamics`] over the horizon
/// `cfg.max_iter * cfg.dt`.
pub fn solve_fixed_point(f0: &Profile, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    if cfg.scheme == Scheme::Dynamics {
        return run_dynamics(f0, cfg.max_iter as f64 * cfg.dt, cfg.dt, cfg);
    }
    let which = if cfg.scheme == Scheme::ExplicitP { MapKind::P } else { MapKind::R };
    let barriers = BarrierProfiles::new(f0.grid(), cfg.barriers)?;

    let mut f = f0.clone();
    let mut residual_history = Vec::new();
    let mut class_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut growth_streak = 0;
    let mut initial_residual = f64::INFINITY;

    loop {
        let mapped = match which {
            MapKind::P => map_p(&f, cfg.quad_tol)?,
            MapKind::R => map_r(&f, cfg.quad_tol)?,
        };
        let r = mapped.max_distance(&f)?;
        residual_history.push(r);
        class_history.push(step_class(&f, &barriers));
        if residual_history.len() == 1 {
            initial_residual = r;
        }

        if r <= cfg.tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }

        growth_streak = if r > 10.0 * initial_residual { growth_streak + 1 } else { 0 };
        if growth_streak >= 3 {
            let final_speed = speed_guarded(&f, cfg.quad_tol)?;
            return Err(SolveError::Diverged(Box::new(SolveReport {
                scheme: cfg.scheme,
                iterations,
                residual_history,
                class_history,
                final_profile: f,
                final_speed,
                converged: false,
            })));
        }

        f = if cfg.damping >= 1.0 { mapped } else { f.blend(&mapped, cfg.damping)? };
        iterations += 1;
    }

    let final_speed = speed_guarded(&f, cfg.quad_tol)?;
    Ok(SolveReport {
        scheme: cfg.scheme,
        iterations,
        residual_history,
        class_history,
        final_profile: f,
        final_speed,
        converged,
    })
}

/// Forward-Euler trajectory of `f_t = R(f) - f` over `[0, t_end]` with
/// step `dt`. Per-step residuals and class/barrier diagnostics are
/// recorded; barrier violations are diagnostics, never aborts. The last
/// residual entry belongs to the terminal state.
pub fn run_dynamics(
    f0: &Profile,
    t_end: f64,
    dt: f64,
    cfg: &SolveConfig,
) -> Result<SolveReport, SolveError> {
    if !(dt > 0.0 && dt < 1.0) {
        return Err(SolveError::BadTimeStep { dt });
    }
    let barriers = BarrierProfiles::new(f0.grid(), cfg.barriers)?;

    let mut f = f0.clone();
    let mut residual_history = Vec::new();
    let mut class_history = Vec::new();
    let mut iterations = 0;

    let mut t = 0.0;
    while t < t_end - 1e-12 {
        let step = dt.min(t_end - t);
        let r_of_f = map_r(&f, cfg.quad_tol)?;
        residual_history.push(r_of_f.max_distance(&f)?);
        class_history.push(step_class(&f, &barriers));
        f = f.blend(&r_of_f, step)?;
        t += step;
        iterations += 1;
    }

    // Terminal residual of the final state.
    let r_of_f = map_r(&f, cfg.quad_tol)?;
    let terminal = r_of_f.max_distance(&f)?;
    residual_history.push(terminal);
    class_history.push(step_class(&f, &barriers));

    let final_speed = speed_guarded(&f, cfg.quad_tol)?;
    Ok(SolveReport {
        scheme: Scheme::Dynamics,
        iterations,
        residual_history,
        class_history,
        final_profile: f,
        final_speed,
        converged: terminal <= cfg.tol,
    })
}
