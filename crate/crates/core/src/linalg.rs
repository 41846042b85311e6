//! Exact-size complex matrix arithmetic for the 2x2 and 4x4 Hermitian
//! matrices a two-qubit problem needs: tensor products, partial traces,
//! eigenvalues and von Neumann entropy.
//!
//! Everything is `Copy`, stack-allocated and deterministic; there is no
//! general N x N support.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance below which a matrix counts as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues of a density matrix may undershoot zero (or overshoot one)
/// by at most this much before the input is rejected.
pub const EIGENVALUE_CLIP: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 40;

macro_rules! cmat {
    ($name:ident, $n:expr) => {
        #[derive(Clone, Copy, Debug, PartialEq)]
        pub struct $name(pub [[C64; $n]; $n]);

        impl $name {
            pub const fn new(rows: [[C64; $n]; $n]) -> Self {
                Self(rows)
            }

            pub fn zeros() -> Self {
                Self([[C64::new(0.0, 0.0); $n]; $n])
            }

            pub fn identity() -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    m.0[i][i] = C64::new(1.0, 0.0);
                }
                m
            }

            pub fn from_real(rows: [[f64; $n]; $n]) -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] = C64::new(rows[i][j], 0.0);
                    }
                }
                m
            }

            pub fn trace(&self) -> C64 {
                let mut t = C64::new(0.0, 0.0);
                for i in 0..$n {
                    t += self.0[i][i];
                }
                t
            }

            pub fn adjoint(&self) -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] = self.0[j][i].conj();
                    }
                }
                m
            }

            pub fn scale(&self, s: f64) -> Self {
                let mut m = *self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] *= s;
                    }
                }
                m
            }

            /// Largest entrywise |a - b|.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                let mut d: f64 = 0.0;
                for i in 0..$n {
                    for j in 0..$n {
                        d = d.max((self.0[i][j] - other.0[i][j]).norm());
                    }
                }
                d
            }

            /// Largest entrywise |M - M'|.
            pub fn hermiticity_deviation(&self) -> f64 {
                self.max_abs_diff(&self.adjoint())
            }

            pub fn is_hermitian(&self, tol: f64) -> bool {
                self.hermiticity_deviation() <= tol
            }
        }

        impl Index<(usize, usize)> for $name {
            type Output = C64;
            fn index(&self, (i, j): (usize, usize)) -> &C64 {
                &self.0[i][j]
            }
        }

        impl IndexMut<(usize, usize)> for $name {
            fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
                &mut self.0[i][j]
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                let mut m = self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] += rhs.0[i][j];
                    }
                }
                m
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                let mut m = self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] -= rhs.0[i][j];
                    }
                }
                m
            }
        }

        impl Mul for $name {
            type Output = Self;
            fn mul(self, rhs: Self) -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    for k in 0..$n {
                        let a = self.0[i][k];
                        if a.norm_sqr() == 0.0 {
                            continue;
                        }
                        for j in 0..$n {
                            m.0[i][j] += a * rhs.0[k][j];
                        }
                    }
                }
                m
            }
        }
    };
}

cmat!(CMat2, 2);
cmat!(CMat4, 4);

const C0: C64 = C64::new(0.0, 0.0);
const C1: C64 = C64::new(1.0, 0.0);

/// Pauli sigma_1 (X).
pub const SIGMA_X: CMat2 = CMat2::new([[C0, C1], [C1, C0]]);
/// Pauli sigma_2 (Y).
pub const SIGMA_Y: CMat2 = CMat2::new([[C0, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), C0]]);
/// Pauli sigma_3 (Z).
pub const SIGMA_Z: CMat2 = CMat2::new([[C1, C0], [C0, C64::new(-1.0, 0.0)]]);

/// The Pauli matrices in (sigma_1, sigma_2, sigma_3) order.
pub fn paulis() -> [CMat2; 3] {
    [SIGMA_X, SIGMA_Y, SIGMA_Z]
}

/// Kronecker product: `(a (x) b)[2i+k][2j+l] = a[i][j] * b[k][l]`.
pub fn tensor(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Reduced state of subsystem A: trace out the second qubit.
pub fn partial_trace_b(rho: &CMat4) -> CMat2 {
    let mut m = CMat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                m.0[i][j] += rho.0[2 * i + k][2 * j + k];
            }
        }
    }
    m
}

/// Reduced state of subsystem B: trace out the first qubit.
pub fn partial_trace_a(rho: &CMat4) -> CMat2 {
    let mut m = CMat2::zeros();
    for k in 0..2 {
        for l in 0..2 {
            for i in 0..2 {
                m.0[k][l] += rho.0[2 * i + k][2 * i + l];
            }
        }
    }
    m
}

/// Eigenvalues of a 4x4 Hermitian matrix, descending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub values: [f64; 4],
}

/// All four eigenvalues of a Hermitian 4x4 matrix, in descending order.
///
/// Uses cyclic Jacobi sweeps on the real symmetric embedding
/// `[[Re M, -Im M], [Im M, Re M]]`, whose spectrum is that of `M` with
/// every eigenvalue doubled. Deterministic for repeated calls.
pub fn hermitian_eigenvalues(m: &CMat4) -> Result<Spectrum> {
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: HERMITICITY_TOL,
        });
    }

    let mut e = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            // Symmetrize so sub-tolerance asymmetry cannot leak in.
            let h = (m.0[i][j] + m.0[j][i].conj()) * 0.5;
            e[i][j] = h.re;
            e[i + 4][j + 4] = h.re;
            e[i][j + 4] = -h.im;
            e[i + 4][j] = h.im;
        }
    }
    let raw = jacobi_eigenvalues_desc(&mut e);

    // Each eigenvalue of M appears twice in the embedding; average the pairs.
    let values = [
        0.5 * (raw[0] + raw[1]),
        0.5 * (raw[2] + raw[3]),
        0.5 * (raw[4] + raw[5]),
        0.5 * (raw[6] + raw[7]),
    ];
    Ok(Spectrum { values })
}

/// Both eigenvalues of a Hermitian 2x2 matrix, descending (closed form).
pub fn hermitian_eigenvalues_2x2(m: &CMat2) -> Result<[f64; 2]> {
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: HERMITICITY_TOL,
        });
    }
    let a = m.0[0][0].re;
    let c = m.0[1][1].re;
    let b = (m.0[0][1] + m.0[1][0].conj()) * 0.5;
    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
    Ok([mid + rad, mid - rad])
}

fn jacobi_eigenvalues_desc(a: &mut [[f64; 8]; 8]) -> [f64; 8] {
    let n = 8;
    let mut frob_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            frob_sq += a[i][j] * a[i][j];
        }
    }
    let stop = 1e-30 * frob_sq.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += 2.0 * a[p][q] * a[p][q];
            }
        }
        if off_sq <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[p][k] = a[k][p];
                    a[k][q] = s * akp + c * akq;
                    a[q][k] = a[k][q];
                }
            }
        }
    }

    let mut vals = [0.0f64; 8];
    for i in 0..n {
        vals[i] = a[i][i];
    }
    vals.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    vals
}

/// von Neumann entropy `-sum lambda log2 lambda` in bits, with 0 log 0 = 0.
///
/// Eigenvalues within [`EIGENVALUE_CLIP`] of 0 or 1 are clipped to the
/// boundary; anything further out is rejected as not a density matrix.
pub fn von_neumann_entropy(rho: &CMat4) -> Result<f64> {
    let spec = hermitian_eigenvalues(rho)?;
    entropy_from_probs(&spec.values)
}

/// von Neumann entropy of a 2x2 density matrix, in bits.
pub fn von_neumann_entropy_2x2(rho: &CMat2) -> Result<f64> {
    let eigs = hermitian_eigenvalues_2x2(rho)?;
    entropy_from_probs(&eigs)
}

pub(crate) fn entropy_from_probs(lambdas: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in lambdas {
        if !(-EIGENVALUE_CLIP..=1.0 + EIGENVALUE_CLIP).contains(&l) {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("eigenvalue {l} outside [0, 1]"),
            });
        }
        let l = l.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}
