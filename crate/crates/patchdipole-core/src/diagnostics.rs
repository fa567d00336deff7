//! Numerical checks of the structural claims about the potential, the
//! implicit map, and computed solutions: sign structure of `F`, the
//! `M`-bound preserved by `R`, derivative asymptotics, seed-independence,
//! concavity of the terminal profile, the free-boundary condition, and the
//! cross-parameterization consistency of the integral formulas.
//!
//! Every check returns a [`CheckReport`] with a signed worst margin
//! (nonnegative means pass, and the value says how much room was left).
//! Sampled profiles come from a deterministic generator so reports are
//! reproducible bit for bit.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::barrier::default_bound_m;
use crate::grid::Grid;
use crate::potential::{
    f_partials, f_value_given_speed, phi, phi_inverse_param, phi_region_oracle, speed_c,
    speed_c_inverse_param, PotentialError, DEFAULT_QUAD_TOL,
};
use crate::profile::Profile;
use crate::solver::{map_r, solve_fixed_point, SolveConfig, SolveError};
use crate::Point;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

/// Outcome of one diagnostic check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Signed distance to failure; `passed == (worst_margin >= 0)`.
    pub worst_margin: f64,
    pub samples: usize,
    pub details: String,
}

impl CheckReport {
    fn new(name: &str, worst_margin: f64, samples: usize, details: String) -> Self {
        CheckReport {
            name: String::from(name),
            passed: worst_margin >= 0.0,
            worst_margin,
            samples,
            details,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_f64(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic family of monotone test profiles
/// `a (1 - x^2)^q (1 + b cos(pi x / 2))` with `a` in `[0.1, M]`, `q` in
/// `[0.5, 2]`, `b` in `[0, 0.5]`. Both factors are nonnegative and
/// non-increasing on `[0, 1]`, so the product is monotone by construction;
/// the rejection check stays as a guard.
pub fn sample_m0_profiles(grid: &Grid, count: usize, rng_seed: u64) -> Vec<Profile> {
    let mut state = rng_seed;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = 0.1 + (default_bound_m() - 0.1) * unit_f64(&mut state);
        let q = 0.5 + 1.5 * unit_f64(&mut state);
        let b = 0.5 * unit_f64(&mut state);
        let profile = Profile::from_function(grid.clone(), |x| {
            let w = (1.0 - x * x).max(0.0);
            a * w.powf(q) * (1.0 + b * (core::f64::consts::PI * x / 2.0).cos())
        });
        match profile {
            Ok(p) if p.is_m0() => out.push(p),
            _ => {}
        }
    }
    out
}

/// Sign structure of `F` for a monotone profile: zero on the axis at
/// `+-1`, positive on the inner axis, negative outside, and both partial
/// derivatives negative on the positive quadrant.
pub fn verify_sign_structure(f: &Profile) -> Result<CheckReport, PotentialError> {
    let c = speed_c(f)?;
    let fv = |p: Point| f_value_given_speed(p, f, c, DEFAULT_QUAD_TOL).map(|v| v.value);

    let mut worst = f64::INFINITY;
    let mut samples = 0;
    let mut details = String::new();

    for &e in &[1.0f64, -1.0] {
        let v = fv(Point::new(e, 0.0))?;
        worst = worst.min(1e-8 - v.abs());
        samples += 1;
        if e > 0.0 {
            details += &format!("F(+-1,0) ~ {v:.2e}; ");
        }
    }
    for i in 0..50 {
        let x = -1.0 + 2.0 * (i as f64 + 0.5) / 50.0;
        worst = worst.min(fv(Point::new(x, 0.0))?);
        samples += 1;
    }
    for &x in &[1.1, 1.5, 2.0, -1.1, -1.5, -2.0] {
        worst = worst.min(-fv(Point::new(x, 0.0))?);
        samples += 1;
    }
    let top = 2.0 * f.max_value();
    for i in 1..=10 {
        for j in 1..=10 {
            let p = Point::new(i as f64 / 10.0, top * j as f64 / 10.0);
            let d = f_partials(p, f)?;
            worst = worst.min(-d[0]).min(-d[1]);
            samples += 1;
        }
    }
    details += &format!("worst margin {worst:.3e}");
    Ok(CheckReport::new("sign_structure", worst, samples, details))
}

/// `f(0) <= M` implies `R(f)(0) < M` across the provided samples.
pub fn verify_r_bound(samples: &[Profile], m: f64) -> Result<CheckReport, SolveError> {
    let mut worst = f64::INFINITY;
    let mut details = String::new();
    for f in samples {
        let r = map_r(f, DEFAULT_QUAD_TOL)?;
        let margin = m - r.max_value();
        if margin < worst {
            worst = margin;
            details = format!(
                "tightest: f(0) = {:.4} -> R(f)(0) = {:.4} vs M = {m:.4}",
                f.max_value(),
                r.max_value()
            );
        }
    }
    Ok(CheckReport::new("r_bound", worst, samples.len(), details))
}

/// Derivative asymptotics of a converged profile: `-f'(x)/x` has bounded
/// spread on `[0.05, 0.5]` and `-f'(x)/log(1 + 1/(1 - x))` on
/// `[0.5, 0.99]`. The pass threshold (spread <= 5) is an empirical
/// stand-in: the true constants are not numeric.
pub fn verify_asymptotics(f: &Profile) -> CheckReport {
    let window = |a: f64, b: f64, scale: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..40 {
            let x = a + (b - a) * (i as f64 + 0.5) / 40.0;
            let ratio = -f.derivative(x).unwrap_or(f64::NAN) / scale(x);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        (lo, hi)
    };

    let (lo1, hi1) = window(0.05, 0.5, &|x| x);
    let (lo2, hi2) = window(0.5, 0.99, &|x| (1.0 / (1.0 - x)).ln_1p());

    let spread = |lo: f64, hi: f64| -> f64 {
        if lo <= 0.0 || !lo.is_finite() {
            f64::INFINITY
        } else {
            hi / lo
        }
    };
    let s1 = spread(lo1, hi1);
    let s2 = spread(lo2, hi2);
    let worst = (5.0 - s1).min(5.0 - s2);

    let increasing_tail = -f.derivative(0.99).unwrap_or(0.0) > -f.derivative(0.6).unwrap_or(0.0);
    let d0 = f.derivative(0.0).unwrap_or(f64::NAN);
    let worst = if increasing_tail && d0 == 0.0 { worst } else { worst.min(-1.0) };

    let details = format!(
        "-f'/x in [{lo1:.3}, {hi1:.3}] (spread {s1:.2}); -f'/log in [{lo2:.3}, {hi2:.3}] (spread {s2:.2}); f'(0) = {d0}"
    );
    CheckReport::new("asymptotics", worst, 80, details)
}

/// Solves from every seed and compares the terminal profiles pairwise.
pub fn verify_uniqueness(seeds: &[Profile], cfg: &SolveConfig) -> Result<CheckReport, SolveError> {
    let mut terminals = Vec::with_capacity(seeds.len());
    for (i, s) in seeds.iter().enumerate() {
        let report = solve_fixed_point(s, cfg)?;
        if !report.converged {
            let last = report.residual_history.last().copied().unwrap_or(f64::NAN);
            return Ok(CheckReport::new(
                "uniqueness",
                f64::NEG_INFINITY,
                seeds.len(),
                format!(
                    "seed {i} failed to converge after {} iterations (residual {last:.3e})",
                    report.iterations
                ),
            ));
        }
        terminals.push(report.final_profile);
    }
    let mut worst_dist = 0.0f64;
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            worst_dist = worst_dist.max(terminals[i].max_distance(&terminals[j])?);
        }
    }
    let margin = 1e-6 - worst_dist;
    Ok(CheckReport::new(
        "uniqueness",
        margin,
        seeds.len(),
        format!("max pairwise terminal distance {worst_dist:.3e}"),
    ))
}

/// Concavity of the profile via second divided differences over the full
/// node set (report-only conjecture; a small positive slack absorbs
/// rounding).
pub fn verify_concavity(f: &Profile) -> CheckReport {
    let g = f.grid();
    let mut max_dd = f64::NEG_INFINITY;
    for k in 1..g.len() - 1 {
        let (x0, x1, x2) = (g.node(k - 1), g.node(k), g.node(k + 1));
        let (y0, y1, y2) = (
            f.value_at_node(k - 1),
            f.value_at_node(k),
            f.value_at_node(k + 1),
        );
        let dd = ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0);
        max_dd = max_dd.max(dd);
    }
    CheckReport::new(
        "concavity",
        1e-6 - max_dd,
        f.grid().len() - 2,
        format!("max second divided difference {max_dd:.3e}"),
    )
}

/// The free-boundary condition `phi(x, f(x)) = c f(x)` at the nodes,
/// normalized by `max(c, 1)`.
pub fn verify_boundary_condition(f: &Profile) -> Result<CheckReport, PotentialError> {
    let c = speed_c(f)?;
    let half = f.grid().half_nodes();
    let mut worst_dev = 0.0f64;
    for (j, &x) in half.iter().enumerate() {
        let fx = f.half_values()[j];
        let p = if x >= 1.0 { 0.0 } else { phi(Point::new(x, fx), f)? };
        worst_dev = worst_dev.max((p - c.c * fx).abs());
    }
    let tol = 1e-6 * c.c.max(1.0);
    Ok(CheckReport::new(
        "boundary_condition",
        tol - worst_dev,
        half.len(),
        format!("max |phi(x, f(x)) - c f(x)| = {worst_dev:.3e}, c = {:.6}", c.c),
    ))
}

/// Cross-checks the two 1D parameterizations of `phi` and `c` against each
/// other and the 1D `phi` against the 2D region oracle.
pub fn consistency_checks(f: &Profile) -> Result<CheckReport, PotentialError> {
    let mut worst = f64::INFINITY;
    let mut samples = 0;
    let mut details = String::new();

    let crest = f.max_value();

    // Inverse-parameterization legs need strict monotonicity.
    if f.is_m1() {
        let c_direct = speed_c(f)?.c;
        let c_inverse = speed_c_inverse_param(f, DEFAULT_QUAD_TOL)?.c;
        worst = worst.min(1e-8 - (c_direct - c_inverse).abs());
        details += &format!("|c - c_inv| = {:.2e}; ", (c_direct - c_inverse).abs());
        samples += 1;

        let mut max_gap = 0.0f64;
        for &(a, b) in &[
            (0.3, 0.4),
            (0.0, 0.9),
            (0.7, 0.15),
            (1.2, 0.5),
            (0.5, 1.3),
        ] {
            let p = Point::new(a, b * crest.max(0.5));
            let gap = (phi(p, f)? - phi_inverse_param(p, f, DEFAULT_QUAD_TOL)?).abs();
            max_gap = max_gap.max(gap);
            samples += 1;
        }
        worst = worst.min(1e-8 - max_gap);
        details += &format!("max |phi - phi_inv| = {max_gap:.2e}; ");
    } else {
        details += "inverse legs skipped (profile not strictly monotone); ";
    }

    // 2D-oracle leg at points safely outside the region.
    let mut max_gap = 0.0f64;
    for &(a, b) in &[(0.0, 0.2), (0.7, 0.25), (1.5, 0.5)] {
        let p = Point::new(a, if a.abs() > 1.0 { b } else { crest + b });
        let direct = phi(p, f)?;
        let oracle = phi_region_oracle(p, f, 1e-7).map_err(PotentialError::Quad)?;
        max_gap = max_gap.max((direct - oracle.value).abs());
        samples += 1;
    }
    worst = worst.min(1e-6 - max_gap);
    details += &format!("max |phi - oracle| = {max_gap:.2e}");

    Ok(CheckReport::new("consistency", worst, samples, details))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_graded_grid;
    use crate::seeds;

    fn grid(n: usize) -> Grid {
        make_graded_grid(n, 2.0).unwrap()
    }

    #[test]
    fn sampled_profiles_are_m0_and_reproducible() {
        let g = grid(24);
        let a = sample_m0_profiles(&g, 5, 42);
        let b = sample_m0_profiles(&g, 5, 42);
        assert_eq!(a.len(), 5);
        for (p, q) in a.iter().zip(&b) {
            assert!(p.is_m0());
            assert_eq!(p.half_values(), q.half_values());
        }
        let c = sample_m0_profiles(&g, 3, 43);
        assert_ne!(a[0].half_values(), c[0].half_values());
    }

    #[test]
    fn sign_structure_on_reference_shapes() {
        for s in [seeds::semicircle_fn as fn(f64) -> f64, seeds::tent_fn] {
            let f = Profile::from_function(grid(32), s).unwrap();
            let report = verify_sign_structure(&f).unwrap();
            assert!(report.passed, "{}", report.details);
        }
    }

    #[test]
    fn concavity_tent_boundary_case_and_negative_control() {
        let tent = Profile::from_function(grid(24), seeds::tent_fn).unwrap();
        let report = verify_concavity(&tent);
        assert!(report.passed, "{}", report.details);

        let humped = Profile::from_function(grid(24), seeds::double_humped).unwrap();
        let report = verify_concavity(&humped);
        assert!(!report.passed, "double-humped seed must fail concavity");
    }

    #[test]
    fn boundary_condition_fails_on_semicircle() {
        let f = Profile::from_function(grid(48), seeds::semicircle_fn).unwrap();
        let report = verify_boundary_condition(&f).unwrap();
        assert!(!report.passed);
        assert!(report.worst_margin < -1e-3, "margin {}", report.worst_margin);
    }

    #[test]
    fn consistency_on_semicircle_profile() {
        let f = Profile::from_function(grid(48), seeds::semicircle_fn).unwrap();
        let report = consistency_checks(&f).unwrap();
        assert!(report.passed, "{}", report.details);
    }
}
