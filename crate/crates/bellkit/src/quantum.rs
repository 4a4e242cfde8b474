//! Small complex-Hilbert-space engine: unit state vectors, Hermitian
//! projectors, tensor products, the Born rule, and the spin-singlet outcome
//! tables parameterized by polarizer angles.

use crate::chsh::{Outcome, PairwiseTable};
use nalgebra::{Complex, DMatrix, DVector};
use std::f64::consts::TAU;

pub type CVector = DVector<Complex<f64>>;
pub type CMatrix = DMatrix<Complex<f64>>;

/// Absolute tolerance on the unit norm of a state vector.
pub const STATE_TOL: f64 = 1e-12;

/// Entrywise tolerance on Hermiticity and idempotence of a projector.
pub const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("state norm is {norm}, not 1 within {STATE_TOL:e}")]
    StateNotNormalized { norm: f64 },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix differs from its adjoint by {defect:e} entrywise")]
    NotHermitian { defect: f64 },
    #[error("matrix differs from its own square by {defect:e} entrywise")]
    NotIdempotent { defect: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("angle {value} is not finite")]
    NonFiniteAngle { value: f64 },
    #[error("cannot project onto the zero vector")]
    ZeroVector,
}

fn max_entry_norm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// A unit vector in a finite complex Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self, QuantumError> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(QuantumError::StateNotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(components: &[f64]) -> Result<Self, QuantumError> {
        Self::new(CVector::from_iterator(
            components.len(),
            components.iter().map(|&x| Complex::new(x, 0.0)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

/// An orthogonal projector: Hermitian and idempotent within
/// [`PROJECTOR_TOL`], validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianProjector {
    matrix: CMatrix,
}

impl HermitianProjector {
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QuantumError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let hermitian_defect = max_entry_norm(&(&matrix - matrix.adjoint()));
        if hermitian_defect > PROJECTOR_TOL {
            return Err(QuantumError::NotHermitian {
                defect: hermitian_defect,
            });
        }
        let idempotent_defect = max_entry_norm(&(&matrix * &matrix - &matrix));
        if idempotent_defect > PROJECTOR_TOL {
            return Err(QuantumError::NotIdempotent {
                defect: idempotent_defect,
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    /// Rank-1 projector v v† / ‖v‖²; the input need not be normalized.
    pub fn onto_vector(v: &CVector) -> Result<Self, QuantumError> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(QuantumError::ZeroVector);
        }
        let unit = v / Complex::new(norm, 0.0);
        Ok(Self {
            matrix: &unit * unit.adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Rank of a projector equals its trace.
    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }
}

/// Kronecker product of projectors; projects onto the tensor product of the
/// ranges, so rank multiplies.
pub fn tensor(p: &HermitianProjector, q: &HermitianProjector) -> HermitianProjector {
    HermitianProjector::new(p.matrix().kronecker(q.matrix()))
        .expect("Kronecker product preserves Hermiticity and idempotence")
}

/// ‖P·ψ‖², the probability of the outcome represented by `p` in state `psi`.
/// The result is clamped into [0, 1] against roundoff.
pub fn born_probability(psi: &StateVector, p: &HermitianProjector) -> Result<f64, QuantumError> {
    if psi.dim() != p.dim() {
        return Err(QuantumError::DimensionMismatch {
            left: psi.dim(),
            right: p.dim(),
        });
    }
    Ok((p.matrix() * psi.amplitudes()).norm_squared().min(1.0))
}

/// A polarizer orientation, stored in radians and normalized to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationSetting {
    theta: f64,
}

impl PolarizationSetting {
    pub fn from_radians(theta: f64) -> Result<Self, QuantumError> {
        if !theta.is_finite() {
            return Err(QuantumError::NonFiniteAngle { value: theta });
        }
        let mut theta = theta.rem_euclid(TAU);
        // rem_euclid of a tiny negative rounds up to the modulus itself.
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self { theta })
    }

    pub fn from_degrees(degrees: f64) -> Result<Self, QuantumError> {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.theta
    }
}

/// Singlet outcome distributions in closed form: outcomes agree with
/// probability cos²(Δ/2) and disagree with probability sin²(Δ/2), where
/// Δ = θ_i − θ'_j is the polarizer angle difference, each split evenly over
/// the two outcome pairs of its kind. Block correlations come out as cos(Δ).
pub fn epr_bohm_table(
    theta1: PolarizationSetting,
    theta2: PolarizationSetting,
    theta1p: PolarizationSetting,
    theta2p: PolarizationSetting,
) -> PairwiseTable {
    let left = [theta1, theta2];
    let right = [theta1p, theta2p];
    PairwiseTable::from_fn(|i, j, e, ep| {
        let half = (left[i.index()].radians() - right[j.index()].radians()) / 2.0;
        if e == ep {
            0.5 * half.cos().powi(2)
        } else {
            0.5 * half.sin().powi(2)
        }
    })
    .expect("cos² + sin² normalizes each block")
}

/// The angle quadruple (0, π/2, π/4, −π/4) at which the singlet correlations
/// reach the quantum maximum 2√2 of the conditional CHSH combination.
pub fn tsirelson_settings() -> [PolarizationSetting; 4] {
    [
        PolarizationSetting::from_radians(0.0).unwrap(),
        PolarizationSetting::from_radians(std::f64::consts::FRAC_PI_2).unwrap(),
        PolarizationSetting::from_radians(std::f64::consts::FRAC_PI_4).unwrap(),
        PolarizationSetting::from_radians(-std::f64::consts::FRAC_PI_4).unwrap(),
    ]
}

/// Hilbert-space model reproducing [`epr_bohm_table`] through the Born rule.
///
/// The state is the maximally entangled vector (|00⟩ + |11⟩)/√2 and both
/// factors use the same real analyzer family: outcome +1 projects onto
/// u(θ) = (cos(θ/2), sin(θ/2)), outcome −1 onto its orthogonal complement.
/// With this convention ⟨u(θ) ⊗ u(θ'), state⟩ = cos((θ − θ')/2)/√2, which
/// squares to the closed-form agreement probability.
#[derive(Debug, Clone)]
pub struct SingletPreset {
    state: StateVector,
}

impl Default for SingletPreset {
    fn default() -> Self {
        Self::new()
    }
}

impl SingletPreset {
    pub fn new() -> Self {
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            state: StateVector::from_real(&[amp, 0.0, 0.0, amp])
                .expect("two equal amplitudes of 1/√2 have unit norm"),
        }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Rank-1 projector on one factor for the given analyzer angle and
    /// outcome.
    pub fn analyzer_projector(angle: PolarizationSetting, outcome: Outcome) -> HermitianProjector {
        let half = angle.radians() / 2.0;
        let components = match outcome {
            Outcome::Plus => [half.cos(), half.sin()],
            Outcome::Minus => [-half.sin(), half.cos()],
        };
        let v = CVector::from_iterator(2, components.iter().map(|&x| Complex::new(x, 0.0)));
        HermitianProjector::onto_vector(&v).expect("analyzer vectors are unit vectors")
    }

    /// Joint two-party measurement event: left analyzer ⊗ right analyzer.
    pub fn joint_projector(
        left: PolarizationSetting,
        right: PolarizationSetting,
        e: Outcome,
        ep: Outcome,
    ) -> HermitianProjector {
        tensor(
            &Self::analyzer_projector(left, e),
            &Self::analyzer_projector(right, ep),
        )
    }

    /// Born probability of the joint outcome (e, ep) at the given angles.
    pub fn outcome_probability(
        &self,
        left: PolarizationSetting,
        right: PolarizationSetting,
        e: Outcome,
        ep: Outcome,
    ) -> f64 {
        born_probability(&self.state, &Self::joint_projector(left, right, e, ep))
            .expect("state and joint projectors are 4-dimensional")
    }

    /// The full outcome table via the Born rule; the independent closed-form
    /// route is [`epr_bohm_table`].
    pub fn table(
        &self,
        theta1: PolarizationSetting,
        theta2: PolarizationSetting,
        theta1p: PolarizationSetting,
        theta2p: PolarizationSetting,
    ) -> PairwiseTable {
        let left = [theta1, theta2];
        let right = [theta1p, theta2p];
        PairwiseTable::from_fn(|i, j, e, ep| {
            self.outcome_probability(left[i.index()], right[j.index()], e, ep)
        })
        .expect("outcome projectors are complete on each factor")
    }
}
