//! Constructors and validators for the state families: Bell-diagonal
//! states, Werner states and arbitrary two-qubit density matrices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, partial_trace_a, partial_trace_b, paulis, tensor, von_neumann_entropy,
    CMat2, CMat4, C64, EIGENVALUE_CLIP, HERMITICITY_TOL,
};

/// Tolerance on the tetrahedron eigenvalue constraints; boundary states
/// (pure Bell states included) are accepted.
pub const PHYSICALITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

/// Correlation triple (c1, c2, c3) of a Bell-diagonal state.
///
/// Physical parameters live in the tetrahedron where all four eigenvalues
/// `(1 -+ c1 -+ c2 -+ c3)/4` are non-negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    c1: f64,
    c2: f64,
    c3: f64,
}

impl BellDiagonalParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for v in [c1, c2, c3] {
            if !v.is_finite() {
                return Err(Error::Descriptor(format!(
                    "Bell-diagonal coefficient {v} is not finite"
                )));
            }
        }
        let params = Self { c1, c2, c3 };
        let lambdas = params.eigenvalues();
        for (offset, l) in lambdas.iter().enumerate() {
            if *l < -PHYSICALITY_TOL {
                return Err(Error::UnphysicalBellDiagonal {
                    c1,
                    c2,
                    c3,
                    index: 5 + offset,
                    value: *l,
                });
            }
        }
        Ok(params)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// The eigenvalues (lambda5, lambda6, lambda7, lambda8) of the state,
    /// in that conventional order (not sorted).
    pub fn eigenvalues(&self) -> [f64; 4] {
        let Self { c1, c2, c3 } = *self;
        [
            0.25 * (1.0 - c1 - c2 - c3),
            0.25 * (1.0 - c1 + c2 + c3),
            0.25 * (1.0 + c1 - c2 + c3),
            0.25 * (1.0 + c1 + c2 - c3),
        ]
    }

    /// max(|c1|, |c2|, |c3|).
    pub fn max_abs(&self) -> f64 {
        self.c1.abs().max(self.c2.abs()).max(self.c3.abs())
    }
}

/// Mixing parameter z of the Werner family, physical on [-1/3, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    z: f64,
}

impl WernerParams {
    pub fn new(z: f64) -> Result<Self> {
        if !z.is_finite()
            || !(-1.0 / 3.0 - PHYSICALITY_TOL..=1.0 + PHYSICALITY_TOL).contains(&z)
        {
            return Err(Error::WernerOutOfRange { z });
        }
        Ok(Self { z })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// The Werner state as a Bell-diagonal triple: c = (-z, -z, -z).
    pub fn to_bell(&self) -> BellDiagonalParams {
        BellDiagonalParams {
            c1: -self.z,
            c2: -self.z,
            c3: -self.z,
        }
    }
}

/// A validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: CMat4,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity before accepting.
    pub fn new(matrix: CMat4) -> Result<Self> {
        let diag = validate(&matrix);
        if diag.hermiticity_deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: diag.hermiticity_deviation,
                tolerance: HERMITICITY_TOL,
            });
        }
        if diag.trace_deviation > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("trace deviates from 1 by {:.3e}", diag.trace_deviation),
            });
        }
        if diag.min_eigenvalue < -EIGENVALUE_CLIP {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("negative eigenvalue {:.6e}", diag.min_eigenvalue),
            });
        }
        Ok(Self { matrix })
    }

    /// For internal constructions that preserve validity (tensor algebra of
    /// valid states, CPTP maps); skips the eigenvalue check.
    pub(crate) fn new_unchecked(matrix: CMat4) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.matrix
    }

    /// Reduced state of subsystem A.
    pub fn reduced_a(&self) -> CMat2 {
        partial_trace_b(&self.matrix)
    }

    /// Reduced state of subsystem B.
    pub fn reduced_b(&self) -> CMat2 {
        partial_trace_a(&self.matrix)
    }

    /// von Neumann entropy of the full state, in bits.
    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(&self.matrix)
    }
}

/// The Bell-diagonal state `(I(x)I + sum_i c_i sigma_i(x)sigma_i) / 4`.
pub fn bell_diagonal(params: &BellDiagonalParams) -> TwoQubitState {
    let i2 = CMat2::identity();
    let mut m = tensor(&i2, &i2);
    for (ci, sigma) in params.as_array().iter().zip(paulis().iter()) {
        m = m + tensor(sigma, sigma).scale(*ci);
    }
    TwoQubitState::new_unchecked(m.scale(0.25))
}

/// The Werner state `z |Psi-><Psi-| + (1-z)/4 I`, built as the
/// Bell-diagonal state with c = (-z, -z, -z).
pub fn werner(params: &WernerParams) -> TwoQubitState {
    bell_diagonal(&params.to_bell())
}

/// Validity report for an arbitrary 4x4 matrix interpreted as a state.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// Diagnostic check of the density-matrix invariants; never errors.
pub fn validate(matrix: &CMat4) -> StateDiagnostics {
    let hermiticity_deviation = matrix.hermiticity_deviation();
    let trace_deviation = (matrix.trace() - C64::new(1.0, 0.0)).norm();

    // Eigenvalues of the Hermitian part; meaningful whenever the
    // Hermiticity deviation itself is small.
    let herm = (*matrix + matrix.adjoint()).scale(0.5);
    let min_eigenvalue = hermitian_eigenvalues(&herm)
        .map(|s| s.values[3])
        .unwrap_or(f64::NAN);

    let pass = hermiticity_deviation <= HERMITICITY_TOL
        && trace_deviation <= TRACE_TOL
        && min_eigenvalue >= -EIGENVALUE_CLIP;
    StateDiagnostics {
        hermiticity_deviation,
        trace_deviation,
        min_eigenvalue,
        pass,
    }
}

/// Uniform sample from the physical tetrahedron: rejection from the cube.
pub fn sample_bell_diagonal<R: Rng + ?Sized>(rng: &mut R) -> BellDiagonalParams {
    loop {
        let c1 = rng.random_range(-1.0..=1.0);
        let c2 = rng.random_range(-1.0..=1.0);
        let c3 = rng.random_range(-1.0..=1.0);
        if let Ok(params) = BellDiagonalParams::new(c1, c2, c3) {
            return params;
        }
    }
}

/// JSON-facing state description.
///
/// ```json
/// {"family":"bell_diagonal","c":[0.3,-0.4,0.56]}
/// {"family":"werner","z":0.5}
/// {"family":"raw","matrix":[[re,im], ... 16 entries row-major]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateDescriptor {
    BellDiagonal { c: [f64; 3] },
    Werner { z: f64 },
    Raw { matrix: Vec<[f64; 2]> },
}

impl StateDescriptor {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        match self {
            Self::BellDiagonal { c } => {
                Ok(bell_diagonal(&BellDiagonalParams::new(c[0], c[1], c[2])?))
            }
            Self::Werner { z } => Ok(werner(&WernerParams::new(*z)?)),
            Self::Raw { matrix } => {
                if matrix.len() != 16 {
                    return Err(Error::Descriptor(format!(
                        "raw matrix needs 16 [re, im] entries, got {}",
                        matrix.len()
                    )));
                }
                let mut m = CMat4::zeros();
                for (idx, [re, im]) in matrix.iter().enumerate() {
                    m.0[idx / 4][idx % 4] = C64::new(*re, *im);
                }
                TwoQubitState::new(m)
            }
        }
    }

    /// Bell-diagonal or Werner parameters when the descriptor names a family
    /// with closed forms; `None` for raw matrices.
    pub fn bell_params(&self) -> Result<Option<BellDiagonalParams>> {
        match self {
            Self::BellDiagonal { c } => Ok(Some(BellDiagonalParams::new(c[0], c[1], c[2])?)),
            Self::Werner { z } => Ok(Some(WernerParams::new(*z)?.to_bell())),
            Self::Raw { .. } => Ok(None),
        }
    }

    pub fn werner_params(&self) -> Result<Option<WernerParams>> {
        match self {
            Self::Werner { z } => Ok(Some(WernerParams::new(*z)?)),
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn bell_diagonal_matrix_pattern() {
        let p = BellDiagonalParams::new(0.3, -0.4, 0.56).unwrap();
        let rho = bell_diagonal(&p);
        let m = rho.matrix();
        // Diagonal (1 +- c3)/4, anti-diagonal (c1 -+ c2)/4.
        assert_close(m[(0, 0)].re, (1.0 + 0.56) / 4.0, 1e-15);
        assert_close(m[(1, 1)].re, (1.0 - 0.56) / 4.0, 1e-15);
        assert_close(m[(2, 2)].re, (1.0 - 0.56) / 4.0, 1e-15);
        assert_close(m[(3, 3)].re, (1.0 + 0.56) / 4.0, 1e-15);
        assert_close(m[(0, 3)].re, (0.3 + 0.4) / 4.0, 1e-15);
        assert_close(m[(1, 2)].re, (0.3 - 0.4) / 4.0, 1e-15);
        assert_close(m[(0, 1)].norm(), 0.0, 1e-15);

        let spec = hermitian_eigenvalues(m).unwrap();
        assert_close(spec.values[0], 0.565, 1e-12);
        assert_close(spec.values[3], 0.085, 1e-12);
    }

    #[test]
    fn maximally_mixed_and_pure_bell() {
        let p = BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap();
        assert!(bell_diagonal(&p)
            .matrix()
            .max_abs_diff(&CMat4::identity().scale(0.25))
            < 1e-15);

        let p = BellDiagonalParams::new(1.0, -1.0, 1.0).unwrap();
        let spec = hermitian_eigenvalues(bell_diagonal(&p).matrix()).unwrap();
        assert_close(spec.values[0], 1.0, 1e-12);
        assert_close(spec.values[1], 0.0, 1e-12);
    }

    #[test]
    fn unphysical_params_report_violated_eigenvalue() {
        match BellDiagonalParams::new(0.9, 0.9, 0.9) {
            Err(Error::UnphysicalBellDiagonal { index, value, .. }) => {
                assert_eq!(index, 5);
                assert_close(value, -0.425, 1e-15);
            }
            other => panic!("expected unphysical error, got {other:?}"),
        }
    }

    #[test]
    fn werner_matches_bell_diagonal_exactly() {
        for z in [-1.0 / 3.0, 0.0, 0.37, 1.0] {
            let w = werner(&WernerParams::new(z).unwrap());
            let b = bell_diagonal(&BellDiagonalParams::new(-z, -z, -z).unwrap());
            assert_eq!(w.matrix(), b.matrix());
        }
    }

    #[test]
    fn werner_eigenvalues() {
        let w = werner(&WernerParams::new(0.5).unwrap());
        let spec = hermitian_eigenvalues(w.matrix()).unwrap();
        assert_close(spec.values[0], 0.625, 1e-12);
        for v in &spec.values[1..] {
            assert_close(*v, 0.125, 1e-12);
        }

        // z = 0 is maximally mixed, z = 1 the singlet projector.
        let w0 = werner(&WernerParams::new(0.0).unwrap());
        assert!(w0.matrix().max_abs_diff(&CMat4::identity().scale(0.25)) < 1e-15);
        let w1 = werner(&WernerParams::new(1.0).unwrap());
        let m = w1.matrix();
        assert_close(m[(1, 1)].re, 0.5, 1e-15);
        assert_close(m[(2, 2)].re, 0.5, 1e-15);
        assert_close(m[(1, 2)].re, -0.5, 1e-15);
        assert_close(m[(0, 0)].norm(), 0.0, 1e-15);
    }

    #[test]
    fn werner_range_is_enforced() {
        assert!(WernerParams::new(-0.34).is_err());
        assert!(WernerParams::new(1.01).is_err());
        assert!(WernerParams::new(-1.0 / 3.0).is_ok());
        assert!(WernerParams::new(1.0).is_ok());
    }

    #[test]
    fn validate_diagnostics() {
        let ok = validate(&CMat4::identity().scale(0.25));
        assert!(ok.pass);
        assert_close(ok.min_eigenvalue, 0.25, 1e-12);

        let bad_trace = validate(&CMat4::identity().scale(0.275));
        assert!(!bad_trace.pass);
        assert_close(bad_trace.trace_deviation, 0.1, 1e-12);

        // (0.9, 0.9, 0.9) is outside the tetrahedron: lambda5 = -0.425.
        let m = {
            let i2 = CMat2::identity();
            let mut m = tensor(&i2, &i2);
            for sigma in paulis() {
                m = m + tensor(&sigma, &sigma).scale(0.9);
            }
            m.scale(0.25)
        };
        let diag = validate(&m);
        assert!(!diag.pass);
        assert_close(diag.min_eigenvalue, -0.425, 1e-10);
    }

    #[test]
    fn tetrahedron_acceptance_matches_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut accepted = 0;
        for _ in 0..1000 {
            let c: [f64; 3] = [
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ];
            let formula_ok = BellDiagonalParams::new(c[0], c[1], c[2]).is_ok();
            // Cross-check against the constructed matrix spectrum.
            let i2 = CMat2::identity();
            let mut m = tensor(&i2, &i2);
            for (ci, sigma) in c.iter().zip(paulis().iter()) {
                m = m + tensor(sigma, sigma).scale(*ci);
            }
            let spec = hermitian_eigenvalues(&m.scale(0.25)).unwrap();
            let spectrum_ok = spec.values[3] >= -1e-10;
            assert_eq!(formula_ok, spectrum_ok, "disagreement at {c:?}");
            if formula_ok {
                accepted += 1;
            }
        }
        // Tetrahedron volume is 1/3 of the cube w.r.t. uniform sampling.
        assert!(accepted > 150 && accepted < 500, "accepted {accepted}");
    }

    #[test]
    fn reduced_states_are_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = sample_bell_diagonal(&mut rng);
            let rho = bell_diagonal(&p);
            let half = CMat2::identity().scale(0.5);
            assert!(rho.reduced_a().max_abs_diff(&half) < 1e-14);
            assert!(rho.reduced_b().max_abs_diff(&half) < 1e-14);
        }
    }

    #[test]
    fn descriptor_round_trips() {
        let cases = [
            r#"{"family":"bell_diagonal","c":[0.3,-0.4,0.56]}"#.to_string(),
            r#"{"family":"werner","z":0.5}"#.to_string(),
            StateDescriptor::Raw {
                matrix: (0..16)
                    .map(|i| if i % 5 == 0 { [0.25, 0.0] } else { [0.0, 0.0] })
                    .collect(),
            }
            .to_json(),
        ];
        for json in cases {
            let d = StateDescriptor::parse(&json).unwrap();
            let again = StateDescriptor::parse(&d.to_json()).unwrap();
            assert_eq!(d, again);
            let s1 = d.to_state().unwrap();
            let s2 = again.to_state().unwrap();
            assert!(s1.matrix().max_abs_diff(s2.matrix()) < 1e-15);
        }
    }

    #[test]
    fn descriptor_rejects_bad_input() {
        assert!(StateDescriptor::parse(r#"{"family":"werner"}"#).is_err());
        assert!(StateDescriptor::parse(r#"{"family":"nope","z":1}"#).is_err());
        let d = StateDescriptor::parse(r#"{"family":"bell_diagonal","c":[0.9,0.9,0.9]}"#).unwrap();
        assert!(matches!(
            d.to_state(),
            Err(Error::UnphysicalBellDiagonal { .. })
        ));
        let short = StateDescriptor::Raw {
            matrix: vec![[1.0, 0.0]; 4],
        };
        assert!(short.to_state().is_err());
    }
}
