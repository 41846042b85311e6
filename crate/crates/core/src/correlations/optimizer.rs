//! Derivative-free minimization over measurement bases: a coarse grid on
//! the hemisphere followed by Nelder-Mead refinement in the tangent plane
//! of the best grid point (no pole singularities, no constraints).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Grid + refinement controls for [`super::measure_numeric`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// (n_theta, n_phi) points over theta in [0, pi/2], phi in [0, 2 pi).
    /// Antipodal bases give identical objectives, so a hemisphere suffices.
    pub coarse_grid: (usize, usize),
    /// Refinement stops once the simplex value spread falls below this.
    pub refine_tolerance: f64,
    pub max_refine_iters: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            coarse_grid: (64, 64),
            refine_tolerance: 1e-12,
            max_refine_iters: 200,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_grid.0 < 16 || self.coarse_grid.1 < 8 {
            return Err(Error::InvalidOptimizerOptions {
                reason: format!(
                    "coarse grid {}x{} below the 16x8 minimum",
                    self.coarse_grid.0, self.coarse_grid.1
                ),
            });
        }
        if !self.refine_tolerance.is_finite() || self.refine_tolerance <= 0.0 {
            return Err(Error::InvalidOptimizerOptions {
                reason: "refine tolerance must be positive".into(),
            });
        }
        Ok(())
    }
}

/// What the minimizer did, attached to numeric results.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimizerTrace {
    /// Nelder-Mead iterations spent in refinement.
    pub iterations: usize,
    /// Simplex value spread when refinement stopped.
    pub final_tolerance: f64,
    pub converged: bool,
}

pub(super) struct Minimized {
    pub value: f64,
    pub basis: [f64; 3],
    pub trace: OptimizerTrace,
}

fn angles_to_unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let v = [st * cp, st * sp, ct];
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / norm, v[1] / norm, v[2] / norm]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / norm, v[1] / norm, v[2] / norm]
}

/// Flip to the canonical hemisphere representative; the objective is
/// antipodally symmetric so this never changes the value.
fn canonical(v: [f64; 3]) -> [f64; 3] {
    let flip = v[2] < -1e-12
        || (v[2].abs() <= 1e-12 && (v[0] < -1e-12 || (v[0].abs() <= 1e-12 && v[1] < 0.0)));
    if flip {
        [-v[0], -v[1], -v[2]]
    } else {
        v
    }
}

pub(super) fn minimize_over_bases<F>(objective: &F, opts: &OptimizerOptions) -> Minimized
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    let (n_theta, n_phi) = opts.coarse_grid;
    let grid: Vec<(f64, f64)> = (0..n_theta)
        .flat_map(|i| {
            let theta = 0.5 * PI * i as f64 / (n_theta - 1) as f64;
            (0..n_phi).map(move |j| (theta, 2.0 * PI * j as f64 / n_phi as f64))
        })
        .collect();

    // Parallel evaluation, reduced in index order so the argmin (and any
    // ties, broken toward lexicographically smallest (theta, phi)) is
    // bit-identical to a sequential scan.
    use rayon::prelude::*;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&(theta, phi)| objective(angles_to_unit(theta, phi)))
        .collect();
    let mut best_idx = 0;
    for (idx, v) in values.iter().enumerate() {
        if *v < values[best_idx] {
            best_idx = idx;
        }
    }
    let (theta0, phi0) = grid[best_idx];
    let n0 = angles_to_unit(theta0, phi0);
    let step = (0.5 * PI / (n_theta - 1) as f64).max(2.0 * PI / n_phi as f64);

    let (value, point, trace) = nelder_mead_tangent(objective, n0, step, opts);
    Minimized {
        value: value.min(values[best_idx]),
        basis: canonical(point),
        trace,
    }
}

/// Nelder-Mead on the chart n(u) = normalize(n0 + u1 e1 + u2 e2) with
/// (e1, e2) an orthonormal tangent frame at n0.
fn nelder_mead_tangent<F>(
    objective: &F,
    n0: [f64; 3],
    step: f64,
    opts: &OptimizerOptions,
) -> (f64, [f64; 3], OptimizerTrace)
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    // Tangent frame: cross n0 with the axis it is least aligned with.
    let pick = if n0[0].abs() <= n0[1].abs() && n0[0].abs() <= n0[2].abs() {
        [1.0, 0.0, 0.0]
    } else if n0[1].abs() <= n0[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize(cross(n0, pick));
    let e2 = cross(n0, e1);

    let embed = |u: [f64; 2]| -> [f64; 3] {
        normalize([
            n0[0] + u[0] * e1[0] + u[1] * e2[0],
            n0[1] + u[0] * e1[1] + u[1] * e2[1],
            n0[2] + u[0] * e1[2] + u[1] * e2[2],
        ])
    };
    let g = |u: [f64; 2]| objective(embed(u));

    let mut simplex = [[0.0, 0.0], [step, 0.0], [0.0, step]];
    let mut fvals = [g(simplex[0]), g(simplex[1]), g(simplex[2])];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_refine_iters {
        // Order best..worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).expect("finite objective"));
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        fvals = [fvals[order[0]], fvals[order[1]], fvals[order[2]]];

        if fvals[2] - fvals[0] <= opts.refine_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let reflect = |scale: f64| {
            [
                centroid[0] + scale * (centroid[0] - simplex[2][0]),
                centroid[1] + scale * (centroid[1] - simplex[2][1]),
            ]
        };

        let xr = reflect(1.0);
        let fr = g(xr);
        if fr < fvals[0] {
            let xe = reflect(2.0);
            let fe = g(xe);
            if fe < fr {
                simplex[2] = xe;
                fvals[2] = fe;
            } else {
                simplex[2] = xr;
                fvals[2] = fr;
            }
        } else if fr < fvals[1] {
            simplex[2] = xr;
            fvals[2] = fr;
        } else {
            let xc = reflect(-0.5);
            let fc = g(xc);
            if fc < fvals[2].min(fr) {
                simplex[2] = xc;
                fvals[2] = fc;
            } else {
                // Shrink toward the best vertex.
                for k in 1..3 {
                    simplex[k] = [
                        simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
                    ];
                    fvals[k] = g(simplex[k]);
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..3 {
        if fvals[k] < fvals[best] {
            best = k;
        }
    }
    let trace = OptimizerTrace {
        iterations,
        final_tolerance: fvals.iter().cloned().fold(f64::MIN, f64::max)
            - fvals.iter().cloned().fold(f64::MAX, f64::min),
        converged,
    };
    (fvals[best], embed(simplex[best]), trace)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
