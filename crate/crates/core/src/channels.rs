//! The two-sided phase-flip (dephasing) channel and the closed-form
//! correlation measures of the state families evolving under it.

use serde::{Deserialize, Serialize};

use crate::correlations::{MeasureKind, MeasureResult};
use crate::error::{Error, Result};
use crate::linalg::{tensor, CMat2, CMat4, SIGMA_Z};
use crate::measurements::WeakStrength;
use crate::states::{BellDiagonalParams, TwoQubitState, WernerParams};

const COMPLETENESS_TOL: f64 = 1e-12;

/// Flip probability p of the phase-flip channel, p = 1 - exp(-gamma t).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFlipParams {
    p: f64,
}

impl PhaseFlipParams {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::FlipProbabilityOutOfRange { p });
        }
        Ok(Self { p })
    }

    /// Damping-rate parameterization; converts to p immediately.
    pub fn from_rate_time(gamma: f64, t: f64) -> Result<Self> {
        if !gamma.is_finite() || !t.is_finite() || gamma < 0.0 || t < 0.0 {
            return Err(Error::InvalidDampingParameters { gamma, t });
        }
        Self::new(1.0 - (-gamma * t).exp())
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A list of 4x4 Kraus operators with the completeness invariant enforced.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<CMat4>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMat4>) -> Result<Self> {
        let ch = Self { operators };
        let dev = ch.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::IncompleteKrausSet { deviation: dev });
        }
        Ok(ch)
    }

    pub fn operators(&self) -> &[CMat4] {
        &self.operators
    }

    /// max |sum K'K - I|.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = CMat4::zeros();
        for k in &self.operators {
            sum = sum + k.adjoint() * *k;
        }
        sum.max_abs_diff(&CMat4::identity())
    }
}

/// Phase flip on both qubits: the four products of the one-sided operators
/// diag(sqrt(1-p/2), sqrt(1-p/2)) and diag(sqrt(p/2), -sqrt(p/2)).
///
/// Zero-weight operators are dropped, so p = 0 yields the identity channel
/// with a single Kraus operator.
pub fn phase_flip_channel(params: &PhaseFlipParams) -> KrausChannel {
    let p = params.p();
    let a0 = (1.0 - p / 2.0).sqrt();
    let a1 = (p / 2.0).sqrt();
    let id = CMat2::identity();

    let mut operators = Vec::with_capacity(4);
    for (wa, ma) in [(a0, id), (a1, SIGMA_Z)] {
        for (wb, mb) in [(a0, id), (a1, SIGMA_Z)] {
            let w = wa * wb;
            if w > 0.0 {
                operators.push(tensor(&ma, &mb).scale(w));
            }
        }
    }
    KrausChannel { operators }
}

/// `sum_k K rho K'`. Trace preserving and positivity preserving, so the
/// output of a valid state is again a valid state.
pub fn apply_channel(rho: &TwoQubitState, channel: &KrausChannel) -> TwoQubitState {
    let mut out = CMat4::zeros();
    for k in channel.operators() {
        out = out + *k * *rho.matrix() * k.adjoint();
    }
    TwoQubitState::new_unchecked(out)
}

/// Coefficient map of the two-sided phase flip on Bell-diagonal states:
/// `(c1, c2, c3) -> ((1-p)^2 c1, (1-p)^2 c2, c3)`.
pub fn evolve_bell_params(c: &BellDiagonalParams, params: &PhaseFlipParams) -> BellDiagonalParams {
    let shrink = (1.0 - params.p()) * (1.0 - params.p());
    BellDiagonalParams::new(shrink * c.c1(), shrink * c.c2(), c.c3())
        .expect("dephasing keeps parameters inside the tetrahedron")
}

fn xlog2(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        0.0
    }
}

/// Closed-form measures of the Werner state under the phase flip channel.
///
/// The deficit kind returns the discord value, matching their equality on
/// Bell-diagonal states; weak kinds at the projective limit reduce to it
/// and are flagged.
pub fn channel_measure_werner(
    kind: MeasureKind,
    z: WernerParams,
    strength: WeakStrength,
    params: &PhaseFlipParams,
) -> Result<MeasureResult> {
    let z = z.z();
    let p = params.p();
    let fallback = kind.is_weak() && strength.is_projective();

    // Shared -S(evolved) pieces.
    let a = xlog2((1.0 - z + 4.0 * p * z - 2.0 * p * p * z) / 4.0);
    let b = xlog2((1.0 + 3.0 * z - 4.0 * p * z + 2.0 * p * p * z) / 4.0);
    let c_term = 0.5 * (1.0 - z) * plog2((1.0 - z) / 4.0);

    let value = match kind {
        MeasureKind::SuperDiscord => {
            let t = strength.tanh();
            a + b + c_term + 1.0 - xlog2((1.0 + z * t) / 2.0) - xlog2((1.0 - z * t) / 2.0)
        }
        MeasureKind::Discord | MeasureKind::Deficit => {
            a + b + c_term + 1.0 - xlog2((1.0 + z) / 2.0) - xlog2((1.0 - z) / 2.0)
        }
        MeasureKind::WeakDeficit => {
            let spread = 0.5 * (1.0 - p) * (1.0 - p) * z * strength.sech();
            a + b - xlog2((1.0 + z) / 4.0 + spread) - xlog2((1.0 + z) / 4.0 - spread)
        }
    };

    MeasureResult::closed(kind, value, fallback)
}

/// Closed-form discord and super-discord of a Bell-diagonal state under
/// the phase flip channel, valid under the ordering |c1| < |c2| < |c3|
/// that keeps c3 the dominant coefficient throughout the evolution.
pub fn channel_measure_bell(
    kind: MeasureKind,
    c: &BellDiagonalParams,
    strength: WeakStrength,
    params: &PhaseFlipParams,
) -> Result<MeasureResult> {
    if kind.is_deficit() {
        return Err(Error::ChannelKindUnsupported {
            kind: kind.name().into(),
        });
    }
    let (c1, c2, c3) = (c.c1(), c.c2(), c.c3());
    if !(c1.abs() < c2.abs() && c2.abs() < c3.abs()) {
        return Err(Error::ChannelOrderingViolated { c1, c2, c3 });
    }
    let fallback = kind.is_weak() && strength.is_projective();
    let shrink = (1.0 - params.p()) * (1.0 - params.p());
    let (e1, e2) = (shrink * c1, shrink * c2);

    let entropy_part = [
        1.0 - e1 - e2 - c3,
        1.0 - e1 + e2 + c3,
        1.0 + e1 - e2 + c3,
        1.0 + e1 + e2 - c3,
    ]
    .iter()
    .map(|v| 0.25 * v * plog2(*v))
    .sum::<f64>();

    let t = match kind {
        MeasureKind::SuperDiscord => strength.tanh(),
        _ => 1.0,
    };
    let value = entropy_part
        - 0.5 * (1.0 - c3 * t) * plog2(1.0 - c3 * t)
        - 0.5 * (1.0 + c3 * t) * plog2(1.0 + c3 * t);

    MeasureResult::closed(kind, value, fallback)
}

fn plog2(v: f64) -> f64 {
    if v > 0.0 {
        v.log2()
    } else {
        0.0
    }
}
