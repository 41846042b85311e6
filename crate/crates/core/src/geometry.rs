//! Level-surface extraction in the Bell-diagonal tetrahedron and parameter
//! sweeps over the state families, emitted as plain data (point clouds and
//! tables) for external plotting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::channels::{channel_measure_bell, channel_measure_werner, PhaseFlipParams};
use crate::correlations::{
    bell_measure, measure_numeric, werner_measure, MeasureKind, OptimizerOptions,
};
use crate::error::{Error, Result};
use crate::measurements::WeakStrength;
use crate::states::{bell_diagonal, BellDiagonalParams, WernerParams};

/// Residual target for bisection-refined surface points.
pub const SURFACE_RESIDUAL: f64 = 1e-6;
const MAX_BISECTIONS: usize = 60;
/// Every Nth emitted point is re-checked against the numeric minimizer.
const SPOT_CHECK_STRIDE: usize = 100;

/// A constant-measure surface to extract over the tetrahedron.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SurfaceRequest {
    pub kind: MeasureKind,
    /// Level value in bits; must exceed 1e-4 (the zero set is the
    /// degenerate classical-state skeleton).
    pub target: f64,
    pub x: WeakStrength,
    /// Grid cells per axis of the bounding cube [-1, 1]^3.
    pub resolution: usize,
    /// Re-check a sample of emitted points against the numeric oracle.
    pub oracle_spot_check: bool,
}

impl SurfaceRequest {
    pub fn new(kind: MeasureKind, target: f64, x: WeakStrength, resolution: usize) -> Result<Self> {
        let req = Self {
            kind,
            target,
            x,
            resolution,
            oracle_spot_check: true,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.target.is_finite() || self.target <= 1e-4 {
            return Err(Error::InvalidSurfaceRequest {
                reason: format!("target must exceed 1e-4 bits, got {}", self.target),
            });
        }
        if !(16..=512).contains(&self.resolution) {
            return Err(Error::InvalidSurfaceRequest {
                reason: format!("resolution {} outside [16, 512]", self.resolution),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub c: [f64; 3],
    /// |measure(c) - target| after refinement.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SurfaceDiagnostics {
    pub dropped_unconverged: usize,
    pub spot_checks: usize,
    pub spot_check_max_deviation: f64,
}

/// The extracted point cloud, with optional grid-cell connectivity for
/// mesh-capable plotters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfacePointCloud {
    pub points: Vec<SurfacePoint>,
    /// Index pairs of points sharing a grid cell.
    pub edges: Vec<[usize; 2]>,
    pub diagnostics: SurfaceDiagnostics,
}

/// Closed-form measure value at a tetrahedron point, or None outside.
fn measure_at(kind: MeasureKind, x: WeakStrength, c: [f64; 3]) -> Option<f64> {
    let params = BellDiagonalParams::new(c[0], c[1], c[2]).ok()?;
    Some(
        bell_measure(kind, &params, x)
            .expect("closed form is defined on the tetrahedron")
            .value,
    )
}

/// Extract the level set `measure = target` by scanning the grid edges of
/// the cube restricted to the physical tetrahedron and refining every
/// sign-change crossing by bisection.
pub fn level_surface(req: &SurfaceRequest) -> Result<SurfacePointCloud> {
    req.validate()?;
    let res = req.resolution;
    let n = res + 1;
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / res as f64;
    let eval_plane = |k: usize| -> Vec<f64> {
        // NaN marks unphysical points; comparisons against NaN are false,
        // so such edges never register a crossing.
        let c3 = coord(k);
        (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let c1 = coord(ij / n);
                let c2 = coord(ij % n);
                measure_at(req.kind, req.x, [c1, c2, c3]).unwrap_or(f64::NAN)
            })
            .collect()
    };

    let mut points = Vec::new();
    let mut dropped = 0usize;
    // Grid edge -> emitted point index, kept for two consecutive planes to
    // assemble cell connectivity. Key: (axis, i, j) within plane pairs.
    let mut edges_prev: BTreeMap<(u8, usize, usize), usize> = BTreeMap::new();
    let mut edges_cur: BTreeMap<(u8, usize, usize), usize> = BTreeMap::new();
    let mut cloud_edges: Vec<[usize; 2]> = Vec::new();

    let mut prev_plane: Option<Vec<f64>> = None;
    for k in 0..n {
        let plane = eval_plane(k);
        let c3 = coord(k);
        edges_cur.clear();

        // In-plane crossings along the c1 and c2 axes.
        for i in 0..n {
            for j in 0..n {
                let f0 = plane[i * n + j] - req.target;
                if i + 1 < n {
                    let f1 = plane[(i + 1) * n + j] - req.target;
                    if f0 * f1 < 0.0 {
                        let a = [coord(i), coord(j), c3];
                        let b = [coord(i + 1), coord(j), c3];
                        match refine_crossing(req, a, b, f0) {
                            Some(pt) => {
                                edges_cur.insert((0, i, j), points.len());
                                points.push(pt);
                            }
                            None => dropped += 1,
                        }
                    }
                }
                if j + 1 < n {
                    let f1 = plane[i * n + j + 1] - req.target;
                    if f0 * f1 < 0.0 {
                        let a = [coord(i), coord(j), c3];
                        let b = [coord(i), coord(j + 1), c3];
                        match refine_crossing(req, a, b, f0) {
                            Some(pt) => {
                                edges_cur.insert((1, i, j), points.len());
                                points.push(pt);
                            }
                            None => dropped += 1,
                        }
                    }
                }
            }
        }

        // Crossings along the c3 axis between the previous plane and this one.
        if let Some(prev) = &prev_plane {
            for i in 0..n {
                for j in 0..n {
                    let f0 = prev[i * n + j] - req.target;
                    let f1 = plane[i * n + j] - req.target;
                    if f0 * f1 < 0.0 {
                        let a = [coord(i), coord(j), coord(k - 1)];
                        let b = [coord(i), coord(j), c3];
                        match refine_crossing(req, a, b, f0) {
                            Some(pt) => {
                                edges_cur.insert((2, i, j), points.len());
                                points.push(pt);
                            }
                            None => dropped += 1,
                        }
                    }
                }
            }

            // Cells of the slab [k-1, k]: join all points on their edges.
            collect_cell_edges(res, n, &edges_prev, &edges_cur, &mut cloud_edges);
        }

        std::mem::swap(&mut edges_prev, &mut edges_cur);
        prev_plane = Some(plane);
    }

    let mut diagnostics = SurfaceDiagnostics {
        dropped_unconverged: dropped,
        ..Default::default()
    };
    if req.oracle_spot_check {
        let opts = OptimizerOptions {
            coarse_grid: (32, 16),
            ..OptimizerOptions::default()
        };
        for pt in points.iter().step_by(SPOT_CHECK_STRIDE) {
            let params = BellDiagonalParams::new(pt.c[0], pt.c[1], pt.c[2])
                .expect("surface points are physical");
            let closed = bell_measure(req.kind, &params, req.x)?.value;
            let numeric = measure_numeric(req.kind, &bell_diagonal(&params), req.x, &opts)?.value;
            diagnostics.spot_checks += 1;
            diagnostics.spot_check_max_deviation =
                diagnostics.spot_check_max_deviation.max((closed - numeric).abs());
        }
    }

    Ok(SurfacePointCloud {
        points,
        edges: cloud_edges,
        diagnostics,
    })
}

fn refine_crossing(
    req: &SurfaceRequest,
    a: [f64; 3],
    b: [f64; 3],
    fa: f64,
) -> Option<SurfacePoint> {
    // Linear-interpolation seed, then bisection on the sign change. Both
    // endpoints are physical, hence so is the whole edge (convexity).
    let f = |c: [f64; 3]| measure_at(req.kind, req.x, c).expect("edge stays physical") - req.target;
    let mut lo = a;
    let mut hi = b;
    let mut flo = fa;
    for _ in 0..MAX_BISECTIONS {
        let mid = [
            0.5 * (lo[0] + hi[0]),
            0.5 * (lo[1] + hi[1]),
            0.5 * (lo[2] + hi[2]),
        ];
        let fm = f(mid);
        if fm.abs() <= SURFACE_RESIDUAL {
            return Some(SurfacePoint {
                c: mid,
                residual: fm.abs(),
            });
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    None
}

fn collect_cell_edges(
    res: usize,
    n: usize,
    prev: &BTreeMap<(u8, usize, usize), usize>,
    cur: &BTreeMap<(u8, usize, usize), usize>,
    out: &mut Vec<[usize; 2]>,
) {
    if prev.is_empty() && cur.is_empty() {
        return;
    }
    let mut cell_points: Vec<usize> = Vec::with_capacity(12);
    for ci in 0..res {
        for cj in 0..res {
            cell_points.clear();
            // 4 c1-edges + 4 c2-edges split across the two planes, plus the
            // 4 c3-edges stored in the current plane map.
            for (map, axis_keys) in [
                (prev, [(0u8, ci, cj), (0, ci, cj + 1), (1, ci, cj), (1, ci + 1, cj)]),
                (cur, [(0, ci, cj), (0, ci, cj + 1), (1, ci, cj), (1, ci + 1, cj)]),
            ] {
                for key in axis_keys {
                    if key.1 < n && key.2 < n {
                        if let Some(&idx) = map.get(&key) {
                            cell_points.push(idx);
                        }
                    }
                }
            }
            for key in [
                (2u8, ci, cj),
                (2, ci + 1, cj),
                (2, ci, cj + 1),
                (2, ci + 1, cj + 1),
            ] {
                if let Some(&idx) = cur.get(&key) {
                    cell_points.push(idx);
                }
            }
            cell_points.sort_unstable();
            cell_points.dedup();
            for a in 0..cell_points.len() {
                for b in (a + 1)..cell_points.len() {
                    out.push([cell_points[a], cell_points[b]]);
                }
            }
        }
    }
}

/// Distance from the origin to the first `measure = target` crossing along
/// `direction`, or `None` when the ray leaves the tetrahedron first.
pub fn level_crossing_radius(
    kind: MeasureKind,
    x: WeakStrength,
    target: f64,
    direction: [f64; 3],
) -> Option<f64> {
    let norm =
        (direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2])
            .sqrt();
    if norm == 0.0 {
        return None;
    }
    let d = [direction[0] / norm, direction[1] / norm, direction[2] / norm];
    let at = |t: f64| measure_at(kind, x, [t * d[0], t * d[1], t * d[2]]);

    const STEPS: usize = 2000;
    let t_max = 3.0f64.sqrt();
    let mut t_prev = 0.0;
    let mut f_prev = at(0.0)? - target;
    if f_prev >= 0.0 {
        return Some(0.0);
    }
    for step in 1..=STEPS {
        let t = t_max * step as f64 / STEPS as f64;
        let Some(v) = at(t) else {
            return None; // left the tetrahedron before crossing
        };
        let f = v - target;
        if f >= 0.0 {
            // Bisect [t_prev, t].
            let mut lo = t_prev;
            let mut hi = t;
            for _ in 0..MAX_BISECTIONS {
                let mid = 0.5 * (lo + hi);
                let fm = at(mid).expect("inside tetrahedron") - target;
                if fm.abs() <= 1e-9 {
                    return Some(mid);
                }
                if (fm < 0.0) == (f_prev < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        t_prev = t;
        f_prev = f;
    }
    None
}

/// Inclusive linspace used by sweeps: `count` points from start to stop.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Which family a sweep runs over.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum SweepFamily {
    /// Werner states over a z grid.
    Werner { z: GridAxis },
    /// A fixed Bell-diagonal state.
    BellDiagonal { c: [f64; 3] },
}

/// Measurement strength: fixed, or swept over a grid of finite values.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum StrengthAxis {
    Fixed(WeakStrength),
    Grid(GridAxis),
}

/// Flip probability: fixed (0 means no channel), or swept.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum ProbabilityAxis {
    Fixed(f64),
    Grid(GridAxis),
}

/// Row-major sweep over (family point) x (x grid) x (p grid).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: SweepFamily,
    pub kinds: Vec<MeasureKind>,
    pub x: StrengthAxis,
    pub p: ProbabilityAxis,
}

/// A sweep result: named columns and rows in deterministic grid order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

enum AxisValues {
    FixedStrength(WeakStrength),
    FixedProb(f64),
    Values(Vec<f64>),
}

/// Evaluate all requested measures over the grid, one row per grid point.
///
/// Fixed p = 0 uses the plain closed forms; any varying or positive p goes
/// through the channel closed forms (Bell-diagonal states then require the
/// |c1| < |c2| < |c3| ordering and discord-type kinds).
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.kinds.is_empty() {
        return Err(Error::InvalidSweepSpec {
            reason: "no measure kinds requested".into(),
        });
    }

    let mut columns: Vec<String> = Vec::new();
    let z_values: Option<Vec<f64>> = match &spec.family {
        SweepFamily::Werner { z } => {
            columns.push("z".into());
            Some(z.values())
        }
        SweepFamily::BellDiagonal { .. } => None,
    };
    let x_axis = match &spec.x {
        StrengthAxis::Fixed(x) => AxisValues::FixedStrength(*x),
        StrengthAxis::Grid(g) => {
            columns.push("x".into());
            AxisValues::Values(g.values())
        }
    };
    let p_axis = match &spec.p {
        ProbabilityAxis::Fixed(p) => AxisValues::FixedProb(*p),
        ProbabilityAxis::Grid(g) => {
            columns.push("p".into());
            AxisValues::Values(g.values())
        }
    };
    for kind in &spec.kinds {
        columns.push(kind.name().into());
    }

    let z_iter: Vec<Option<f64>> = match &z_values {
        Some(vs) => vs.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let x_iter: Vec<(Option<f64>, WeakStrength)> = match &x_axis {
        AxisValues::FixedStrength(x) => vec![(None, *x)],
        AxisValues::Values(vs) => vs
            .iter()
            .map(|&v| WeakStrength::new(v).map(|s| (Some(v), s)))
            .collect::<Result<_>>()?,
        AxisValues::FixedProb(_) => unreachable!(),
    };
    let p_iter: Vec<(Option<f64>, f64, bool)> = match &p_axis {
        AxisValues::FixedProb(p) => vec![(None, *p, *p != 0.0)],
        AxisValues::Values(vs) => vs.iter().map(|&v| (Some(v), v, true)).collect(),
        AxisValues::FixedStrength(_) => unreachable!(),
    };

    let mut rows = Vec::new();
    for z in &z_iter {
        for (x_col, x) in &x_iter {
            for (p_col, p, via_channel) in &p_iter {
                let mut row = Vec::with_capacity(columns.len());
                if let Some(z) = z {
                    row.push(*z);
                }
                if let Some(xv) = x_col {
                    row.push(*xv);
                }
                if let Some(pv) = p_col {
                    row.push(*pv);
                }
                for kind in &spec.kinds {
                    let value = match (&spec.family, via_channel) {
                        (SweepFamily::Werner { .. }, false) => {
                            werner_measure(*kind, WernerParams::new(z.unwrap())?, *x)?.value
                        }
                        (SweepFamily::Werner { .. }, true) => {
                            let params = PhaseFlipParams::new(*p)?;
                            channel_measure_werner(*kind, WernerParams::new(z.unwrap())?, *x, &params)?
                                .value
                        }
                        (SweepFamily::BellDiagonal { c }, false) => {
                            let params = BellDiagonalParams::new(c[0], c[1], c[2])?;
                            bell_measure(*kind, &params, *x)?.value
                        }
                        (SweepFamily::BellDiagonal { c }, true) => {
                            let params = BellDiagonalParams::new(c[0], c[1], c[2])?;
                            let flip = PhaseFlipParams::new(*p)?;
                            channel_measure_bell(*kind, &params, *x, &flip)?.value
                        }
                    };
                    row.push(value);
                }
                rows.push(row);
            }
        }
    }

    Ok(SweepTable { columns, rows })
}
