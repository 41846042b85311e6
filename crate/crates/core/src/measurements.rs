//! Projective and weak two-outcome measurements on subsystem B: operator
//! pairs, post-measurement ensembles and the dephasing map they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace_b, CMat2, CMat4, SIGMA_X, SIGMA_Y, SIGMA_Z};
use crate::states::TwoQubitState;

const UNIT_TOL: f64 = 1e-12;
/// Branch probabilities below this are reported as undefined conditionals.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

/// Bloch direction defining the orthogonal projector pair
/// `(I + n.sigma)/2` and `(I - n.sigma)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    n: [f64; 3],
}

impl MeasurementBasis {
    /// Requires `n` to be unit length within 1e-12.
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitBasis { norm });
        }
        Ok(Self { n })
    }

    /// Accepts a vector within `slack` of unit length and renormalizes it;
    /// the front door for user-supplied directions.
    pub fn normalized(n: [f64; 3], slack: f64) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > slack {
            return Err(Error::NonUnitBasis { norm });
        }
        Ok(Self {
            n: [n[0] / norm, n[1] / norm, n[2] / norm],
        })
    }

    pub(crate) fn from_unit_unchecked(n: [f64; 3]) -> Self {
        Self { n }
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            n: [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ],
        }
    }

    pub fn x() -> Self {
        Self { n: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Self { n: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Self { n: [0.0, 0.0, 1.0] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.n
    }

    /// The operator n.sigma.
    pub fn direction_operator(&self) -> CMat2 {
        SIGMA_X.scale(self.n[0]) + SIGMA_Y.scale(self.n[1]) + SIGMA_Z.scale(self.n[2])
    }
}

/// Measurement strength: a finite positive x, or the projective limit.
///
/// Strengths above [`WeakStrength::SATURATION`] are indistinguishable from
/// the limit in double precision (tanh saturates) and are treated as
/// projective outright, which also keeps cosh from overflowing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeakStrength {
    Finite(f64),
    Projective,
}

impl WeakStrength {
    pub const SATURATION: f64 = 350.0;

    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidStrength { x });
        }
        if x > Self::SATURATION {
            return Ok(Self::Projective);
        }
        Ok(Self::Finite(x))
    }

    pub fn is_projective(&self) -> bool {
        matches!(self, Self::Projective)
    }

    /// tanh x, or 1 in the projective limit.
    pub fn tanh(&self) -> f64 {
        match self {
            Self::Finite(x) => x.tanh(),
            Self::Projective => 1.0,
        }
    }

    /// 1/cosh x, or 0 in the projective limit.
    pub fn sech(&self) -> f64 {
        match self {
            Self::Finite(x) => 1.0 / x.cosh(),
            Self::Projective => 0.0,
        }
    }
}

impl serde::Serialize for WeakStrength {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => s.serialize_f64(*x),
            Self::Projective => s.serialize_str("projective"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for WeakStrength {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => {
                let x = n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?;
                WeakStrength::new(x).map_err(D::Error::custom)
            }
            serde_json::Value::String(s) if s == "projective" || s == "inf" => {
                Ok(WeakStrength::Projective)
            }
            other => Err(D::Error::custom(format!(
                "expected a positive number, \"inf\" or \"projective\", got {other}"
            ))),
        }
    }
}

/// The two-outcome weak operator pair (P(x), P(-x)).
#[derive(Clone, Copy, Debug)]
pub struct WeakPair {
    pub plus: CMat2,
    pub minus: CMat2,
}

impl WeakPair {
    /// max |P(x)'P(x) + P(-x)'P(-x) - I|.
    pub fn completeness_deviation(&self) -> f64 {
        let s = self.plus.adjoint() * self.plus + self.minus.adjoint() * self.minus;
        s.max_abs_diff(&CMat2::identity())
    }
}

/// Orthogonal projector pair (Pi0, Pi1) for the basis direction.
pub fn projectors(basis: &MeasurementBasis) -> (CMat2, CMat2) {
    let ns = basis.direction_operator();
    let i = CMat2::identity();
    ((i + ns).scale(0.5), (i - ns).scale(0.5))
}

/// Weak operators `P(+-x) = sqrt((1 -+ tanh x)/2) Pi0 + sqrt((1 +- tanh x)/2) Pi1`;
/// the projective limit returns the projectors themselves.
pub fn weak_pair(basis: &MeasurementBasis, strength: WeakStrength) -> WeakPair {
    let (pi0, pi1) = projectors(basis);
    match strength {
        WeakStrength::Projective => WeakPair {
            plus: pi0,
            minus: pi1,
        },
        WeakStrength::Finite(x) => {
            let t = x.tanh();
            let lo = ((1.0 - t) / 2.0).sqrt();
            let hi = ((1.0 + t) / 2.0).sqrt();
            WeakPair {
                plus: pi0.scale(lo) + pi1.scale(hi),
                minus: pi0.scale(hi) + pi1.scale(lo),
            }
        }
    }
}

/// `(I (x) op) rho (I (x) op')`, using the 2x2 block structure.
pub(crate) fn conjugate_b(rho: &CMat4, op: &CMat2) -> CMat4 {
    let mut out = CMat4::zeros();
    let op_dag = op.adjoint();
    for bi in 0..2 {
        for bj in 0..2 {
            let mut block = CMat2::zeros();
            for r in 0..2 {
                for c in 0..2 {
                    block.0[r][c] = rho.0[2 * bi + r][2 * bj + c];
                }
            }
            let conj = *op * block * op_dag;
            for r in 0..2 {
                for c in 0..2 {
                    out.0[2 * bi + r][2 * bj + c] = conj.0[r][c];
                }
            }
        }
    }
    out
}

/// One outcome branch: its probability and conditional state of A.
///
/// The conditional is `None` when the branch probability is below
/// [`PROBABILITY_FLOOR`] and the state is undefined.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleBranch {
    pub probability: f64,
    pub state: Option<CMat2>,
}

/// Post-measurement ensemble `{(p(+x), rho_A|+), (p(-x), rho_A|-)}`.
pub fn post_measurement_ensemble(
    rho: &TwoQubitState,
    basis: &MeasurementBasis,
    strength: WeakStrength,
) -> [EnsembleBranch; 2] {
    let pair = weak_pair(basis, strength);
    let mut out = [EnsembleBranch {
        probability: 0.0,
        state: None,
    }; 2];
    for (slot, op) in [pair.plus, pair.minus].iter().enumerate() {
        let m = conjugate_b(rho.matrix(), op);
        let p = m.trace().re;
        let reduced = partial_trace_b(&m);
        out[slot] = EnsembleBranch {
            probability: p,
            state: (p >= PROBABILITY_FLOOR).then(|| reduced.scale(1.0 / p)),
        };
    }
    out
}

pub(crate) fn weak_dephase_matrix(
    rho: &CMat4,
    basis: &MeasurementBasis,
    strength: WeakStrength,
) -> CMat4 {
    let pair = weak_pair(basis, strength);
    conjugate_b(rho, &pair.plus) + conjugate_b(rho, &pair.minus)
}

/// The dephasing map `sum_± (I (x) P(±x)) rho (I (x) P(±x))`; trace
/// preserving, and equal to projective dephasing in the limit.
pub fn weak_dephase(
    rho: &TwoQubitState,
    basis: &MeasurementBasis,
    strength: WeakStrength,
) -> TwoQubitState {
    TwoQubitState::new_unchecked(weak_dephase_matrix(rho.matrix(), basis, strength))
}
