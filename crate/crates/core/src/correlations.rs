//! The four correlation measures, each available along two independent
//! routes: closed forms for the Werner and Bell-diagonal families, and a
//! generic numeric minimizer over measurement bases that acts as the
//! oracle for everything else.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{entropy_from_probs, partial_trace_b, von_neumann_entropy, CMat4};
use crate::measurements::{
    weak_dephase_matrix, weak_pair, MeasurementBasis, WeakStrength, PROBABILITY_FLOOR,
};
use crate::states::{BellDiagonalParams, TwoQubitState, WernerParams};

mod optimizer;

pub use optimizer::{OptimizerOptions, OptimizerTrace};

/// Values in (-NEGATIVE_CLAMP, 0) are clamped to zero and flagged; anything
/// lower is a hard error.
pub const NEGATIVE_CLAMP: f64 = 1e-9;

/// Which correlation measure to evaluate.
///
/// The super-discord and weak-deficit are the weak-measurement forms; the
/// discord and one-way deficit are their projective specializations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Discord,
    SuperDiscord,
    Deficit,
    WeakDeficit,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 4] = [
        Self::Discord,
        Self::SuperDiscord,
        Self::Deficit,
        Self::WeakDeficit,
    ];

    /// True for the kinds parameterized by a finite strength.
    pub fn is_weak(&self) -> bool {
        matches!(self, Self::SuperDiscord | Self::WeakDeficit)
    }

    /// True for the entropy-production (deficit) kinds, false for the
    /// conditional-entropy (discord) kinds.
    pub fn is_deficit(&self) -> bool {
        matches!(self, Self::Deficit | Self::WeakDeficit)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Discord => "discord",
            Self::SuperDiscord => "super_discord",
            Self::Deficit => "deficit",
            Self::WeakDeficit => "weak_deficit",
        }
    }
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How a [`MeasureResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

/// A measure value in bits plus its provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureResult {
    pub kind: MeasureKind,
    /// Value in bits; non-negative up to the clamp window.
    pub value: f64,
    pub method: Method,
    /// Argmin basis of the numeric minimization; absent for closed forms.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimal_basis: Option<MeasurementBasis>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimizer: Option<OptimizerTrace>,
    /// Set when a tiny negative value was clamped to zero.
    #[serde(default)]
    pub clamped: bool,
    /// Set when a weak kind was evaluated at the projective limit.
    #[serde(default)]
    pub projective_fallback: bool,
}

impl MeasureResult {
    pub(crate) fn closed(kind: MeasureKind, value: f64, projective_fallback: bool) -> Result<Self> {
        let (value, clamped) = clamp_value(value)?;
        Ok(Self {
            kind,
            value,
            method: Method::ClosedForm,
            optimal_basis: None,
            optimizer: None,
            clamped,
            projective_fallback,
        })
    }
}

fn clamp_value(value: f64) -> Result<(f64, bool)> {
    if value >= 0.0 {
        Ok((value, false))
    } else if value > -NEGATIVE_CLAMP {
        Ok((0.0, true))
    } else {
        Err(Error::NegativeMeasure { value })
    }
}

/// v * log2(v) with the 0 log 0 = 0 convention.
fn xlog2(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        0.0
    }
}

/// Binary entropy H(q) in bits.
pub fn binary_entropy(q: f64) -> f64 {
    -xlog2(q) - xlog2(1.0 - q)
}

/// Weighted conditional entropy
/// `p(+x) S(rho_A|+x) + p(-x) S(rho_A|-x)` in bits.
pub fn conditional_entropy_weak(
    rho: &TwoQubitState,
    basis: &MeasurementBasis,
    strength: WeakStrength,
) -> Result<f64> {
    conditional_entropy_matrix(rho.matrix(), basis, strength)
}

fn conditional_entropy_matrix(
    rho: &CMat4,
    basis: &MeasurementBasis,
    strength: WeakStrength,
) -> Result<f64> {
    let pair = weak_pair(basis, strength);
    let mut total = 0.0;
    for op in [&pair.plus, &pair.minus] {
        let m = crate::measurements::conjugate_b(rho, op);
        let p = m.trace().re;
        if p < PROBABILITY_FLOOR {
            continue;
        }
        let conditional = partial_trace_b(&m).scale(1.0 / p);
        let eigs = crate::linalg::hermitian_eigenvalues_2x2(&conditional)?;
        total += p * entropy_from_probs(&eigs)?;
    }
    Ok(total)
}

/// Entropy of the Bell-diagonal state with the given coefficients, straight
/// from the eigenvalue formulas.
fn bell_entropy(c: [f64; 3]) -> f64 {
    let [c1, c2, c3] = c;
    let lambdas = [
        0.25 * (1.0 - c1 - c2 - c3),
        0.25 * (1.0 - c1 + c2 + c3),
        0.25 * (1.0 + c1 - c2 + c3),
        0.25 * (1.0 + c1 + c2 - c3),
    ];
    -lambdas.iter().map(|l| xlog2(l.max(0.0))).sum::<f64>()
}

/// Closed-form measures for the Werner family.
///
/// The deficit kind returns the discord value (the two coincide on
/// Bell-diagonal states). Weak kinds given a projective strength are
/// evaluated as the corresponding projective measure and flagged.
pub fn werner_measure(
    kind: MeasureKind,
    z: WernerParams,
    strength: WeakStrength,
) -> Result<MeasureResult> {
    let z = z.z();
    let fallback = kind.is_weak() && strength.is_projective();
    let value = match kind {
        MeasureKind::Discord | MeasureKind::Deficit => werner_discord_value(z),
        MeasureKind::SuperDiscord => {
            let t = strength.tanh();
            3.0 * 0.25 * (1.0 - z) * plog2((1.0 - z) / 4.0)
                + 0.25 * (1.0 + 3.0 * z) * plog2((1.0 + 3.0 * z) / 4.0)
                + 1.0
                - xlog2((1.0 - z * t) / 2.0)
                - xlog2((1.0 + z * t) / 2.0)
        }
        MeasureKind::WeakDeficit => {
            let spread = 0.5 * z * strength.sech();
            let l1 = 0.25 * (1.0 + z) + spread;
            let l2 = 0.25 * (1.0 + z) - spread;
            0.25 * (1.0 + 3.0 * z) * plog2((1.0 + 3.0 * z) / 4.0)
                + 0.25 * (1.0 - z) * plog2((1.0 - z) / 4.0)
                - xlog2(l1)
                - xlog2(l2)
        }
    };
    MeasureResult::closed(kind, value, fallback)
}

fn werner_discord_value(z: f64) -> f64 {
    0.25 * (1.0 - z) * plog2(1.0 - z) - 0.5 * (1.0 + z) * plog2(1.0 + z)
        + 0.25 * (1.0 + 3.0 * z) * plog2(1.0 + 3.0 * z)
}

/// log2(v), with v <= 0 mapped to 0 so that `w * plog2(v)` realizes the
/// 0 log 0 = 0 convention whenever w vanishes together with v.
fn plog2(v: f64) -> f64 {
    if v > 0.0 {
        v.log2()
    } else {
        0.0
    }
}

/// Closed-form measures for Bell-diagonal states.
///
/// Discord kinds use the binary-entropy form
/// `1 - S(rho) + H((1 + c tanh x)/2)` with `c = max |c_i|`; deficit kinds
/// use the entropy increase of the dephased state, minimized over the
/// coordinate axes (the max-|c_i| axis attains it).
pub fn bell_measure(
    kind: MeasureKind,
    params: &BellDiagonalParams,
    strength: WeakStrength,
) -> Result<MeasureResult> {
    let fallback = kind.is_weak() && strength.is_projective();
    let effective = if kind.is_weak() {
        strength
    } else {
        WeakStrength::Projective
    };
    let value = bell_measure_value(kind, params, effective);
    MeasureResult::closed(kind, value, fallback)
}

fn bell_measure_value(kind: MeasureKind, params: &BellDiagonalParams, x: WeakStrength) -> f64 {
    let c = params.as_array();
    let s_rho = bell_entropy(c);
    if kind.is_deficit() {
        let k = x.sech();
        let mut best = f64::INFINITY;
        for axis in 0..3 {
            let mut damped = [c[0] * k, c[1] * k, c[2] * k];
            damped[axis] = c[axis];
            best = best.min(bell_entropy(damped));
        }
        best - s_rho
    } else {
        let cmax = params.max_abs();
        1.0 - s_rho + binary_entropy(0.5 * (1.0 + cmax * x.tanh()))
    }
}

/// Minimize the kind's objective over all measurement bases on B.
///
/// Works on any valid two-qubit state. Grid stage over the basis
/// hemisphere followed by a local simplex refinement; deterministic for
/// fixed options regardless of thread count.
pub fn measure_numeric(
    kind: MeasureKind,
    rho: &TwoQubitState,
    strength: WeakStrength,
    opts: &OptimizerOptions,
) -> Result<MeasureResult> {
    opts.validate()?;
    let fallback = kind.is_weak() && strength.is_projective();
    let effective = if kind.is_weak() {
        strength
    } else {
        WeakStrength::Projective
    };

    let matrix = *rho.matrix();
    let s_rho = von_neumann_entropy(&matrix)?;
    let offset = if kind.is_deficit() {
        -s_rho
    } else {
        let s_b = crate::linalg::von_neumann_entropy_2x2(&crate::linalg::partial_trace_a(&matrix))?;
        s_b - s_rho
    };

    let objective = move |n: [f64; 3]| -> f64 {
        let basis = MeasurementBasis::from_unit_unchecked(n);
        if kind.is_deficit() {
            let dephased = weak_dephase_matrix(&matrix, &basis, effective);
            von_neumann_entropy(&dephased).unwrap_or(f64::INFINITY)
        } else {
            conditional_entropy_matrix(&matrix, &basis, effective).unwrap_or(f64::INFINITY)
        }
    };

    let outcome = optimizer::minimize_over_bases(&objective, opts);
    let (value, clamped) = clamp_value(offset + outcome.value)?;
    Ok(MeasureResult {
        kind,
        value,
        method: Method::Numeric,
        optimal_basis: Some(MeasurementBasis::from_unit_unchecked(outcome.basis)),
        optimizer: Some(outcome.trace),
        clamped,
        projective_fallback: fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_diagonal, sample_bell_diagonal, werner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    fn wp(z: f64) -> WernerParams {
        WernerParams::new(z).unwrap()
    }

    fn bp(c1: f64, c2: f64, c3: f64) -> BellDiagonalParams {
        BellDiagonalParams::new(c1, c2, c3).unwrap()
    }

    fn x(v: f64) -> WeakStrength {
        WeakStrength::new(v).unwrap()
    }

    // Test-side oracle: entropy of the Werner state from its eigenvalues.
    fn werner_entropy_oracle(z: f64) -> f64 {
        let probs = [
            (1.0 + 3.0 * z) / 4.0,
            (1.0 - z) / 4.0,
            (1.0 - z) / 4.0,
            (1.0 - z) / 4.0,
        ];
        -probs
            .iter()
            .map(|p| if *p > 0.0 { p * p.log2() } else { 0.0 })
            .sum::<f64>()
    }

    #[test]
    fn conditional_entropy_matches_binary_entropy_oracle() {
        // theta = |c3| on the z axis; oracle is H((1 + 0.56 tanh 2.5)/2).
        let rho = bell_diagonal(&bp(0.3, -0.4, 0.56));
        let got =
            conditional_entropy_weak(&rho, &MeasurementBasis::z(), x(2.5)).unwrap();
        let a = 0.56 * 2.5f64.tanh();
        let oracle = {
            let q = 0.5 * (1.0 + a);
            -(q * q.log2() + (1.0 - q) * (1.0 - q).log2())
        };
        assert_close(oracle, 0.7669524221345329, 1e-12);
        assert_close(got, oracle, 1e-12);
    }

    #[test]
    fn conditional_entropy_of_maximally_mixed_is_one() {
        let rho = bell_diagonal(&bp(0.0, 0.0, 0.0));
        for strength in [x(0.3), x(2.0), WeakStrength::Projective] {
            let v = conditional_entropy_weak(&rho, &MeasurementBasis::x(), strength).unwrap();
            assert_close(v, 1.0, 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_projective_route_agrees() {
        // The projective limit reproduces the strong-measurement conditional term.
        let rho = werner(&wp(0.6));
        let weak_big = conditional_entropy_weak(&rho, &MeasurementBasis::y(), x(300.0)).unwrap();
        let proj =
            conditional_entropy_weak(&rho, &MeasurementBasis::y(), WeakStrength::Projective)
                .unwrap();
        assert_close(weak_big, proj, 1e-10);
    }

    #[test]
    fn werner_measures_at_zero_are_zero() {
        for kind in MeasureKind::ALL {
            let r = werner_measure(kind, wp(0.0), x(1.0)).unwrap();
            assert_close(r.value, 0.0, 1e-12);
        }
    }

    #[test]
    fn werner_spot_values() {
        // Frozen via the eigenvalue/binary-entropy oracles.
        assert_close(
            werner_measure(MeasureKind::Discord, wp(1.0), WeakStrength::Projective)
                .unwrap()
                .value,
            1.0,
            1e-12,
        );
        assert_close(
            werner_measure(MeasureKind::Discord, wp(0.5), WeakStrength::Projective)
                .unwrap()
                .value,
            0.26248318376373436,
            1e-12,
        );

        // Super-discord at z=1, x=2: 1 - S + H((1+tanh 2)/2) with S = 0.
        let oracle = {
            let q = 0.5 * (1.0 + 2.0f64.tanh());
            1.0 - (q * q.log2() + (1.0 - q) * (1.0 - q).log2()) - werner_entropy_oracle(1.0)
        };
        assert_close(oracle, 1.1299792746663049, 1e-12);
        assert_close(
            werner_measure(MeasureKind::SuperDiscord, wp(1.0), x(2.0))
                .unwrap()
                .value,
            oracle,
            1e-12,
        );

        // Weak deficit at z=1, x=2: binary entropy of 1/2 +- 1/(2 cosh 2).
        let oracle = {
            let l1 = 0.5 + 0.5 / 2.0f64.cosh();
            let l2 = 0.5 - 0.5 / 2.0f64.cosh();
            -(l1 * l1.log2() + l2 * l2.log2()) - werner_entropy_oracle(1.0)
        };
        assert_close(oracle, 0.9484184662366614, 1e-12);
        assert_close(
            werner_measure(MeasureKind::WeakDeficit, wp(1.0), x(2.0))
                .unwrap()
                .value,
            oracle,
            1e-12,
        );
    }

    #[test]
    fn werner_deficit_equals_discord() {
        for z in [0.1, 0.4, 0.8, 1.0] {
            let d = werner_measure(MeasureKind::Discord, wp(z), WeakStrength::Projective).unwrap();
            let def = werner_measure(MeasureKind::Deficit, wp(z), WeakStrength::Projective).unwrap();
            assert_eq!(d.value, def.value);
        }
    }

    #[test]
    fn werner_projective_fallback_is_flagged() {
        let r = werner_measure(MeasureKind::SuperDiscord, wp(0.5), WeakStrength::Projective)
            .unwrap();
        assert!(r.projective_fallback);
        let d = werner_measure(MeasureKind::Discord, wp(0.5), WeakStrength::Projective).unwrap();
        assert_close(r.value, d.value, 1e-12);
        assert!(!d.projective_fallback);
    }

    #[test]
    fn bell_spot_values() {
        assert_close(
            bell_measure(MeasureKind::Discord, &bp(0.0, 0.0, 0.0), WeakStrength::Projective)
                .unwrap()
                .value,
            0.0,
            1e-12,
        );
        assert_close(
            bell_measure(MeasureKind::Discord, &bp(1.0, -1.0, 1.0), WeakStrength::Projective)
                .unwrap()
                .value,
            1.0,
            1e-9,
        );
        assert_close(
            bell_measure(MeasureKind::Discord, &bp(0.3, -0.4, 0.56), WeakStrength::Projective)
                .unwrap()
                .value,
            0.12570350351112014,
            1e-12,
        );
        assert_close(
            bell_measure(MeasureKind::SuperDiscord, &bp(0.3, -0.4, 0.56), x(2.5))
                .unwrap()
                .value,
            0.13248842268368743,
            1e-12,
        );
        // Weak deficit of the same state, x = 1 and 2.5.
        assert_close(
            bell_measure(MeasureKind::WeakDeficit, &bp(0.3, -0.4, 0.56), x(1.0))
                .unwrap()
                .value,
            0.07397576817636864,
            1e-12,
        );
        assert_close(
            bell_measure(MeasureKind::WeakDeficit, &bp(0.3, -0.4, 0.56), x(2.5))
                .unwrap()
                .value,
            0.12247018458268544,
            1e-12,
        );
    }

    #[test]
    fn bell_deficit_equals_discord_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let p = sample_bell_diagonal(&mut rng);
            let d = bell_measure(MeasureKind::Discord, &p, WeakStrength::Projective).unwrap();
            let def = bell_measure(MeasureKind::Deficit, &p, WeakStrength::Projective).unwrap();
            assert_close(d.value, def.value, 1e-12);
        }
    }

    #[test]
    fn super_discord_dominates_discord() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let p = sample_bell_diagonal(&mut rng);
            let d = bell_measure(MeasureKind::Discord, &p, WeakStrength::Projective)
                .unwrap()
                .value;
            for xv in [0.2, 1.0, 3.0] {
                let s = bell_measure(MeasureKind::SuperDiscord, &p, x(xv))
                    .unwrap()
                    .value;
                assert!(s >= d - 1e-9, "c={:?} x={xv}: {s} < {d}", p.as_array());
            }
        }
    }

    #[test]
    fn werner_ordering_and_projective_collapse() {
        for i in 1..=100 {
            let z = i as f64 * 0.01;
            let d = werner_measure(MeasureKind::Discord, wp(z), WeakStrength::Projective)
                .unwrap()
                .value;
            for xv in [0.2, 2.0] {
                let wd = werner_measure(MeasureKind::WeakDeficit, wp(z), x(xv))
                    .unwrap()
                    .value;
                let sd = werner_measure(MeasureKind::SuperDiscord, wp(z), x(xv))
                    .unwrap()
                    .value;
                assert!(wd <= d + 1e-9);
                assert!(d <= sd + 1e-9);
            }
            // All four collapse at the projective limit.
            for kind in MeasureKind::ALL {
                let v = werner_measure(kind, wp(z), WeakStrength::Projective)
                    .unwrap()
                    .value;
                assert_close(v, d, 1e-9);
            }
        }
    }

    #[test]
    fn monotone_in_strength_on_werner() {
        let z = wp(0.7);
        let mut prev_super = f64::INFINITY;
        let mut prev_weak = -f64::INFINITY;
        for i in 1..=50 {
            let xv = i as f64 * 0.1;
            let s = werner_measure(MeasureKind::SuperDiscord, z, x(xv))
                .unwrap()
                .value;
            let w = werner_measure(MeasureKind::WeakDeficit, z, x(xv))
                .unwrap()
                .value;
            assert!(s <= prev_super + 1e-10);
            assert!(w >= prev_weak - 1e-10);
            prev_super = s;
            prev_weak = w;
        }
    }

    #[test]
    fn numeric_matches_closed_forms() {
        let opts = OptimizerOptions::default();
        // Werner discord: flat objective, any basis attains it.
        let r = measure_numeric(
            MeasureKind::Discord,
            &werner(&wp(0.5)),
            WeakStrength::Projective,
            &opts,
        )
        .unwrap();
        assert_close(r.value, 0.26248318376373436, 1e-9);

        // Figure state, all four kinds at x = 2.5.
        let params = bp(0.3, -0.4, 0.56);
        let rho = bell_diagonal(&params);
        for kind in MeasureKind::ALL {
            let closed = bell_measure(kind, &params, x(2.5)).unwrap().value;
            let numeric = measure_numeric(kind, &rho, x(2.5), &opts).unwrap();
            assert_close(numeric.value, closed, 1e-6);
        }

        // The argmin for the super-discord sits on the max-|c_i| axis.
        let r = measure_numeric(MeasureKind::SuperDiscord, &rho, x(2.5), &opts).unwrap();
        let n = r.optimal_basis.unwrap().bloch();
        assert!(n[2].abs() > 1.0 - 1e-4, "argmin basis {n:?}");
    }

    #[test]
    fn numeric_oracle_agreement_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let opts = OptimizerOptions::default();
        for _ in 0..10 {
            let p = sample_bell_diagonal(&mut rng);
            let rho = bell_diagonal(&p);
            for kind in MeasureKind::ALL {
                let xv = x(rng.random_range(0.2..3.0));
                let closed = bell_measure(kind, &p, xv).unwrap().value;
                let numeric = measure_numeric(kind, &rho, xv, &opts).unwrap().value;
                assert_close(numeric, closed, 1e-6);
            }
        }
    }

    #[test]
    fn numeric_on_maximally_mixed_is_zero() {
        let rho = bell_diagonal(&bp(0.0, 0.0, 0.0));
        let opts = OptimizerOptions::default();
        for kind in MeasureKind::ALL {
            let r = measure_numeric(kind, &rho, x(1.0), &opts).unwrap();
            assert!(r.value.abs() <= 1e-9);
        }
    }

    #[test]
    fn numeric_measures_vanish_on_product_states() {
        // rho_A (x) rho_B carries no correlations of any kind; the
        // minimizer has to find the eigenbasis of rho_B to see that.
        use crate::linalg::{tensor, CMat2, C64};
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let opts = OptimizerOptions::default();
        for _ in 0..3 {
            let qubit = |rng: &mut ChaCha8Rng| {
                // Bloch vector strictly inside the ball.
                let r: [f64; 3] = [
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ];
                CMat2::new([
                    [
                        C64::new(0.5 * (1.0 + r[2]), 0.0),
                        C64::new(0.5 * r[0], -0.5 * r[1]),
                    ],
                    [
                        C64::new(0.5 * r[0], 0.5 * r[1]),
                        C64::new(0.5 * (1.0 - r[2]), 0.0),
                    ],
                ])
            };
            let rho = TwoQubitState::new(tensor(&qubit(&mut rng), &qubit(&mut rng))).unwrap();
            for kind in MeasureKind::ALL {
                let r = measure_numeric(kind, &rho, x(1.3), &opts).unwrap();
                assert!(
                    r.value <= 1e-9,
                    "{kind} on a product state gave {}",
                    r.value
                );
            }
        }
    }

    #[test]
    fn numeric_measures_vanish_on_quantum_classical_states() {
        // sum_k p_k rho_A^k (x) |k><k| is classical on B: measuring B in
        // the computational basis disturbs nothing.
        use crate::linalg::{tensor, CMat2, C64};
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let opts = OptimizerOptions::default();
        let p = rng.random_range(0.2..0.8);
        let block = |r: [f64; 3]| {
            CMat2::new([
                [
                    C64::new(0.5 * (1.0 + r[2]), 0.0),
                    C64::new(0.5 * r[0], -0.5 * r[1]),
                ],
                [
                    C64::new(0.5 * r[0], 0.5 * r[1]),
                    C64::new(0.5 * (1.0 - r[2]), 0.0),
                ],
            ])
        };
        let rho_a0 = block([0.3, -0.2, 0.4]);
        let rho_a1 = block([-0.5, 0.1, -0.3]);
        let mut ket0 = CMat2::zeros();
        ket0.0[0][0] = C64::new(1.0, 0.0);
        let mut ket1 = CMat2::zeros();
        ket1.0[1][1] = C64::new(1.0, 0.0);
        let m = tensor(&rho_a0, &ket0).scale(p) + tensor(&rho_a1, &ket1).scale(1.0 - p);
        let rho = TwoQubitState::new(m).unwrap();

        // Projective measurement along z disturbs nothing, and weak
        // dephasing along z keeps the blocks intact, so these three vanish.
        for (kind, strength) in [
            (MeasureKind::Discord, WeakStrength::Projective),
            (MeasureKind::Deficit, WeakStrength::Projective),
            (MeasureKind::WeakDeficit, x(0.8)),
        ] {
            let r = measure_numeric(kind, &rho, strength, &opts).unwrap();
            assert!(
                r.value <= 1e-9,
                "{kind} on a quantum-classical state gave {}",
                r.value
            );
            let n = r.optimal_basis.unwrap().bloch();
            assert!(n[2].abs() > 1.0 - 1e-3, "argmin basis {n:?}");
        }

        // A finite-strength weak measurement cannot fully resolve the
        // classical flag, so the super-discord stays strictly positive.
        // Check it against a dense brute-force scan of the objective.
        let strength = x(0.8);
        let r = measure_numeric(MeasureKind::SuperDiscord, &rho, strength, &opts).unwrap();
        assert!(r.value > 1e-3, "super-discord unexpectedly small: {}", r.value);
        let s_rho = rho.entropy().unwrap();
        let s_b = crate::linalg::von_neumann_entropy_2x2(&rho.reduced_b()).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..=60 {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 60.0;
            for j in 0..120 {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / 120.0;
                let basis = MeasurementBasis::from_angles(theta, phi);
                brute = brute.min(conditional_entropy_weak(&rho, &basis, strength).unwrap());
            }
        }
        let brute_value = brute + s_b - s_rho;
        assert!(
            (r.value - brute_value).abs() <= 1e-6,
            "numeric {} vs brute force {}",
            r.value,
            brute_value
        );
    }

    #[test]
    fn projective_kinds_ignore_finite_strength() {
        let rho = bell_diagonal(&bp(0.3, -0.4, 0.56));
        let opts = OptimizerOptions::default();
        for kind in [MeasureKind::Discord, MeasureKind::Deficit] {
            let with_x = measure_numeric(kind, &rho, x(1.7), &opts).unwrap().value;
            let projective = measure_numeric(kind, &rho, WeakStrength::Projective, &opts)
                .unwrap()
                .value;
            assert_eq!(with_x.to_bits(), projective.to_bits());
        }
    }

    #[test]
    fn numeric_objective_is_basis_independent_for_werner() {
        // The testable form of the rotational-invariance argument.
        let rho = werner(&wp(0.7));
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let xv = x(0.9);
        let reference =
            conditional_entropy_weak(&rho, &MeasurementBasis::z(), xv).unwrap();
        let mut spread: f64 = 0.0;
        for _ in 0..50 {
            let v: [f64; 3] = [
                rng.random_range(-1.0..=1.0f64),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ];
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm < 0.1 {
                continue;
            }
            let basis = MeasurementBasis::new([v[0] / norm, v[1] / norm, v[2] / norm]).unwrap();
            let val = conditional_entropy_weak(&rho, &basis, xv).unwrap();
            spread = spread.max((val - reference).abs());
        }
        assert!(spread <= 1e-9, "objective spread {spread}");
    }

    #[test]
    fn invalid_optimizer_options_rejected() {
        let opts = OptimizerOptions {
            coarse_grid: (8, 4),
            ..OptimizerOptions::default()
        };
        assert!(matches!(
            measure_numeric(
                MeasureKind::Discord,
                &bell_diagonal(&bp(0.0, 0.0, 0.0)),
                WeakStrength::Projective,
                &opts,
            ),
            Err(Error::InvalidOptimizerOptions { .. })
        ));
    }

    #[test]
    fn werner_and_bell_closed_forms_agree_on_the_werner_line() {
        // werner(z) is bell_diagonal(-z, -z, -z); the two closed-form
        // routes must coincide over the whole physical range.
        for i in 0..=40 {
            let z = -1.0 / 3.0 + (4.0 / 3.0) * i as f64 / 40.0;
            let zp = wp(z);
            let cp = zp.to_bell();
            for kind in MeasureKind::ALL {
                for strength in [x(0.3), x(2.0), WeakStrength::Projective] {
                    let via_werner = werner_measure(kind, zp, strength).unwrap().value;
                    let via_bell = bell_measure(kind, &cp, strength).unwrap().value;
                    assert_close(via_werner, via_bell, 1e-12);
                }
            }
        }
    }

    #[test]
    fn tiny_negative_values_clamp_and_larger_ones_error() {
        let r = MeasureResult::closed(MeasureKind::Discord, -5e-10, false).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.clamped);
        let r = MeasureResult::closed(MeasureKind::Discord, 1e-12, false).unwrap();
        assert!(!r.clamped);
        assert!(matches!(
            MeasureResult::closed(MeasureKind::Discord, -2e-9, false),
            Err(Error::NegativeMeasure { .. })
        ));
    }

    #[test]
    fn measure_result_serde_round_trip() {
        let r = werner_measure(MeasureKind::SuperDiscord, wp(0.5), x(2.0)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: MeasureResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.value, r.value);
        assert_eq!(back.kind, r.kind);
        assert_eq!(back.method, r.method);
    }
}
