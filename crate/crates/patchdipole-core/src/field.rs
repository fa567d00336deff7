//! Post-processing: the co-moving stream function over the full plane by
//! odd reflection, the velocity field, rectangular field sampling, contour
//! extraction, and far-field decay checks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::boundary::Boundary;
use crate::diagnostics::CheckReport;
use crate::potential::{grad_phi_with_tol, phi_with_tol, PotentialError, SpeedValue};
use crate::Point;

#[allow(unused_imports)]
#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Quadrature tolerance for field sampling; the post-processing surface
/// does not need the solver-path accuracy.
pub const FIELD_QUAD_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldError {
    /// Resolution below 8x8 or a degenerate bounding box.
    BadGrid,
    /// Radii for the far-field check must increase and start at >= 10.
    BadRadii,
    Potential(PotentialError),
}

impl core::fmt::Display for FieldError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FieldError::BadGrid => f.write_str("resolution must be at least 8x8 over a proper bbox"),
            FieldError::BadRadii => f.write_str("far-field radii must be increasing with min >= 10"),
            FieldError::Potential(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FieldError {}

impl From<PotentialError> for FieldError {
    fn from(e: PotentialError) -> Self {
        FieldError::Potential(e)
    }
}

/// Stream function `psi = phi - c x2` of the co-moving frame, extended to
/// the lower half-plane by odd reflection. Exactly zero on the axis.
pub fn stream_function<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    c: SpeedValue,
) -> Result<f64, PotentialError> {
    if x.x2 == 0.0 {
        return Ok(0.0);
    }
    let upper = Point::new(x.x1, x.x2.abs());
    let value = phi_with_tol(upper, f, FIELD_QUAD_TOL)? - c.c * upper.x2;
    Ok(if x.x2 < 0.0 { -value } else { value })
}

/// Velocity `u = (-psi_x2, psi_x1)` in the co-moving frame; horizontal
/// component even and vertical odd across the axis.
pub fn velocity<B: Boundary + ?Sized>(
    x: Point,
    f: &B,
    c: SpeedValue,
) -> Result<[f64; 2], PotentialError> {
    let upper = Point::new(x.x1, x.x2.abs());
    let g = grad_phi_with_tol(upper, f, FIELD_QUAD_TOL)?;
    let u1 = c.c - g[1];
    let u2 = g[0];
    Ok(if x.x2 < 0.0 { [u1, -u2] } else { [u1, u2] })
}

/// Rectangular sample of `psi` and the velocity over a bounding box.
/// Row-major storage: index `j * n1 + i` for `x2` index `j` and `x1`
/// index `i`.
#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub bbox: [f64; 4],
    pub resolution: (usize, usize),
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub psi: Vec<f64>,
    pub velocity: Vec<[f64; 2]>,
    pub speed_c: SpeedValue,
}

impl FieldGrid {
    pub fn psi_at(&self, i: usize, j: usize) -> f64 {
        self.psi[j * self.resolution.0 + i]
    }
}

/// Samples the field on `resolution = (n1, n2)` points spanning
/// `bbox = [x1_min, x1_max, x2_min, x2_max]` inclusive. For a bbox
/// symmetric in `x2` the sample heights are mirrored exactly, so the odd
/// reflection is bit-exact; any axis row is exactly zero.
pub fn sample_field<B: Boundary + ?Sized>(
    f: &B,
    c: SpeedValue,
    bbox: [f64; 4],
    resolution: (usize, usize),
) -> Result<FieldGrid, FieldError> {
    let (n1, n2) = resolution;
    if n1 < 8 || n2 < 8 || !(bbox[0] < bbox[1]) || !(bbox[2] < bbox[3]) {
        return Err(FieldError::BadGrid);
    }
    let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    };
    let x1 = lin(bbox[0], bbox[1], n1);
    let mut x2 = lin(bbox[2], bbox[3], n2);
    if bbox[2] == -bbox[3] {
        for j in 0..n2 / 2 {
            x2[j] = -x2[n2 - 1 - j];
        }
        if n2 % 2 == 1 {
            x2[n2 / 2] = 0.0;
        }
    }

    let row = |&h: &f64| -> Result<Vec<(f64, [f64; 2])>, FieldError> {
        x1.iter()
            .map(|&a| {
                let p = Point::new(a, h);
                let psi = stream_function(p, f, c)?;
                let vel = velocity(p, f, c)?;
                Ok((psi, vel))
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let rows: Result<Vec<_>, FieldError> = x2.par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<_>, FieldError> = x2.iter().map(row).collect();

    let rows = rows?;
    let mut psi = Vec::with_capacity(n1 * n2);
    let mut vel = Vec::with_capacity(n1 * n2);
    for r in rows {
        for (p, v) in r {
            psi.push(p);
            vel.push(v);
        }
    }
    Ok(FieldGrid {
        bbox,
        resolution,
        x1,
        x2,
        psi,
        velocity: vel,
        speed_c: c,
    })
}

/// Polylines of psi-level sets.
#[derive(Clone, Debug, Default)]
pub struct ContourSet {
    pub levels: Vec<f64>,
    /// One bundle of polylines per level.
    pub polylines: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Default level selection: 12 levels spanning the sampled range, with a
/// `1e-6` band around zero removed and the exact zero level added.
pub fn auto_levels(grid: &FieldGrid) -> Vec<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &grid.psi {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let mut levels: Vec<f64> = (0..12)
        .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 12.0)
        .filter(|v| v.abs() > 1e-6)
        .collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

/// Marching squares with linear edge interpolation. Saddle cells are
/// disambiguated by the cell-center average. Segments are chained into
/// polylines; closed loops repeat their first point at the end.
pub fn trace_contours(grid: &FieldGrid, levels: &[f64]) -> ContourSet {
    let mut out = ContourSet {
        levels: levels.to_vec(),
        polylines: Vec::with_capacity(levels.len()),
    };
    for &level in levels {
        out.polylines.push(trace_level(grid, level));
    }
    out
}

/// Edge key: (i, j, horizontal?) identifies the edge from node (i, j) to
/// (i+1, j) when horizontal, or to (i, j+1) when vertical.
type EdgeKey = (usize, usize, bool);

fn trace_level(grid: &FieldGrid, level: f64) -> Vec<Vec<[f64; 2]>> {
    let (n1, n2) = grid.resolution;
    let value = |i: usize, j: usize| grid.psi_at(i, j);

    // Crossing point on an edge, computed once per edge so that adjacent
    // cells share bit-identical endpoints.
    let cross = |i: usize, j: usize, horizontal: bool| -> Option<[f64; 2]> {
        let (va, vb) = if horizontal {
            (value(i, j), value(i + 1, j))
        } else {
            (value(i, j), value(i, j + 1))
        };
        if (va > level) == (vb > level) {
            return None;
        }
        let t = (level - va) / (vb - va);
        Some(if horizontal {
            [grid.x1[i] + t * (grid.x1[i + 1] - grid.x1[i]), grid.x2[j]]
        } else {
            [grid.x1[i], grid.x2[j] + t * (grid.x2[j + 1] - grid.x2[j])]
        })
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..n2 - 1 {
        for i in 0..n1 - 1 {
            let bl = value(i, j) > level;
            let br = value(i + 1, j) > level;
            let tr = value(i + 1, j + 1) > level;
            let tl = value(i, j + 1) > level;
            let case = (bl as u8) | (br as u8) << 1 | (tr as u8) << 2 | (tl as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let bottom: EdgeKey = (i, j, true);
            let top: EdgeKey = (i, j + 1, true);
            let left: EdgeKey = (i, j, false);
            let right: EdgeKey = (i + 1, j, false);
            match case {
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((top, right)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let center = 0.25
                        * (value(i, j) + value(i + 1, j) + value(i, j + 1) + value(i + 1, j + 1));
                    let center_in = center > level;
                    // Case 5: bl and tr inside; case 10 is its complement.
                    if (case == 5) == center_in {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((top, right));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    chain_segments(&segments, |k| cross(k.0, k.1, k.2))
}

/// Joins edge-to-edge segments into polylines by walking shared edges.
fn chain_segments(
    segments: &[(EdgeKey, EdgeKey)],
    resolve: impl Fn(&EdgeKey) -> Option<[f64; 2]>,
) -> Vec<Vec<[f64; 2]>> {
    let mut adjacency: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(idx);
        adjacency.entry(*b).or_default().push(idx);
    }

    let mut used = alloc::vec![false; segments.len()];
    let mut polylines = Vec::new();

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = alloc::vec![segments[start].0, segments[start].1];

        // Extend forward from the tail, then backward from the head.
        for _pass in 0..2 {
            loop {
                let tail = *chain.last().unwrap();
                let next = adjacency
                    .get(&tail)
                    .and_then(|ids| ids.iter().find(|&&id| !used[id]).copied());
                match next {
                    Some(id) => {
                        used[id] = true;
                        let (a, b) = segments[id];
                        chain.push(if a == tail { b } else { a });
                    }
                    None => break,
                }
            }
            chain.reverse();
        }

        let points: Vec<[f64; 2]> = chain.iter().filter_map(&resolve).collect();
        if points.len() >= 2 {
            polylines.push(points);
        }
    }
    polylines
}

/// Far-field decay of the velocity defect `e(R) = |-psi_x2 - c|` sampled
/// at `(0.8 R, 0.6 R)`: the defect must decrease and drop by a factor in
/// `[3, 5]` per radius doubling (dipole-like `R^{-2}` decay).
pub fn far_field_decay<B: Boundary + ?Sized>(
    f: &B,
    c: SpeedValue,
    radii: &[f64],
) -> Result<CheckReport, FieldError> {
    if radii.len() < 2 || radii[0] < 10.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FieldError::BadRadii);
    }
    let mut defects = Vec::with_capacity(radii.len());
    for &r in radii {
        let p = Point::new(0.8 * r, 0.6 * r);
        let g = grad_phi_with_tol(p, f, 1e-12)?;
        // -psi_x2 - c = -phi_x2.
        defects.push(g[1].abs());
    }

    let mut worst = f64::INFINITY;
    for w in defects.windows(2) {
        worst = worst.min(w[0] - w[1]);
    }
    let mut ratios = Vec::new();
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            if (radii[j] - 2.0 * radii[i]).abs() < 1e-9 * radii[i] {
                let ratio = defects[i] / defects[j];
                worst = worst.min(ratio - 3.0).min(5.0 - ratio);
                ratios.push(ratio);
            }
        }
    }
    let details = format!("c = {:.6}; defects {defects:?}, doubling ratios {ratios:?}", c.c);
    Ok(CheckReport {
        name: alloc::string::String::from("far_field_decay"),
        passed: worst >= 0.0,
        worst_margin: worst,
        samples: radii.len(),
        details,
    })
}
