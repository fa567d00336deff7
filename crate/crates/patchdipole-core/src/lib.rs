//! Numerical core for computing the steady contiguous vortex-patch dipole
//! (Sadovskii vortex patch) of the 2D incompressible Euler equation.
//!
//! The patch is the region between the graphs of an even profile function
//! `f` on `[-1, 1]` and its mirror image; the dipole carries vorticity +1
//! above the axis and -1 below and translates steadily along the axis.
//! The profile solves the free-boundary condition `phi(x, f(x)) = c f(x)`,
//! where `phi` is the half-plane Dirichlet potential induced by the patch
//! and `c` the travel speed. This crate finds `f` as the fixed point of
//! either the explicit node-wise map `P(f) = phi(x, f(x); f) / c(f)` or
//! the implicit map `R(f)` defined by the zero level set of
//! `F(x1, x2; f) = phi(x1, x2; f)/x2 - c(f)`.
//!
//! Contents:
//! - [`grid`] / [`profile`]: graded meshes on `[-1, 1]` and the monotone
//!   piecewise-cubic profile representation,
//! - [`quad`]: adaptive Gauss-Kronrod quadrature with singularity-aware
//!   splitting, plus a slow 2D region-quadrature oracle,
//! - [`potential`]: the closed-form 1D integral formulas for `phi`, its
//!   gradient, the speed `c(f)`, and the functional `F`,
//! - [`solver`]: the maps `P` and `R`, the fixed-point driver, and the
//!   Euler-polygon dynamics `f_t = R(f) - f`,
//! - [`barrier`]: the barrier functions `W`, `v_Lambda`, `u_lambda` and
//!   the admissible-set membership check,
//! - [`diagnostics`]: numerical checks of the structural claims (sign
//!   structure, M-bound, derivative asymptotics, uniqueness, ...),
//! - [`field`]: stream function, velocity, field sampling and contour
//!   extraction for post-processing.
//!
//! The crate is `no_std`-compatible (with `alloc`) when built with the
//! `libm` feature instead of `std`. The `parallel` feature enables
//! data-parallel node evaluation through rayon.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("patchdipole-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod barrier;
pub mod boundary;
pub mod diagnostics;
pub mod field;
pub mod grid;
pub(crate) mod math;
pub mod potential;
pub mod profile;
pub mod quad;
pub mod seeds;
pub mod solver;

pub use boundary::Boundary;
pub use grid::Grid;
pub use profile::Profile;
pub use quad::QuadResult;

/// A point of the closed upper half-plane (or of the full plane in the
/// post-processing routines).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub fn new(x1: f64, x2: f64) -> Self {
        Point { x1, x2 }
    }
}
