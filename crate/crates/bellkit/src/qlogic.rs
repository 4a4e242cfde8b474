//! The lattice of closed subspaces of a finite complex Hilbert space:
//! meet as range intersection, join as span of the union, complement as
//! orthogonal complement, together with the subspace order, commutation of
//! projectors, and a witness for failures of the distributive law.
//!
//! Every rank or equality decision in this module routes through the single
//! tolerance [`LATTICE_TOL`], so operations and the tests exercising them
//! cannot disagree about borderline cases.

use crate::quantum::{CMatrix, CVector, HermitianProjector};
use nalgebra::Complex;

/// Rank and projector-equality tolerance for all lattice decisions.
pub const LATTICE_TOL: f64 = 1e-8;

/// Tolerance on pairwise orthonormality of stored basis vectors.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Default cap on the ambient dimension; use [`Subspace::with_max_dim`] to
/// lift it. Spectral routines stay trivially robust at this size.
pub const DEFAULT_MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QlogicError {
    #[error("ambient dimension must be positive")]
    ZeroAmbient,
    #[error("ambient dimension {dim} exceeds the cap {max}")]
    AmbientTooLarge { dim: usize, max: usize },
    #[error("basis has {count} vectors but the ambient dimension is {ambient}")]
    TooManyVectors { count: usize, ambient: usize },
    #[error("basis vector has length {got}, ambient dimension is {expected}")]
    WrongVectorLength { expected: usize, got: usize },
    #[error("basis is not orthonormal: defect {defect:e}")]
    BasisNotOrthonormal { defect: f64 },
    #[error("ambient dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A subspace, stored as an orthonormal basis (possibly empty) of an ambient
/// space of fixed dimension.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Vec<CVector>,
    ambient_dim: usize,
}

impl Subspace {
    /// Wraps an already-orthonormal basis, enforcing [`DEFAULT_MAX_DIM`].
    pub fn new(basis: Vec<CVector>, ambient_dim: usize) -> Result<Self, QlogicError> {
        Self::with_max_dim(basis, ambient_dim, DEFAULT_MAX_DIM)
    }

    /// As [`Subspace::new`] with an explicit ambient-dimension cap.
    pub fn with_max_dim(
        basis: Vec<CVector>,
        ambient_dim: usize,
        max_dim: usize,
    ) -> Result<Self, QlogicError> {
        if ambient_dim == 0 {
            return Err(QlogicError::ZeroAmbient);
        }
        if ambient_dim > max_dim {
            return Err(QlogicError::AmbientTooLarge {
                dim: ambient_dim,
                max: max_dim,
            });
        }
        if basis.len() > ambient_dim {
            return Err(QlogicError::TooManyVectors {
                count: basis.len(),
                ambient: ambient_dim,
            });
        }
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(QlogicError::WrongVectorLength {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
        }
        let mut defect: f64 = 0.0;
        for (k, v) in basis.iter().enumerate() {
            for (l, w) in basis.iter().enumerate() {
                let inner = v.dotc(w);
                let expected = if k == l { 1.0 } else { 0.0 };
                defect = defect.max((inner - Complex::new(expected, 0.0)).norm());
            }
        }
        if defect > ORTHONORMALITY_TOL {
            return Err(QlogicError::BasisNotOrthonormal { defect });
        }
        Ok(Self { basis, ambient_dim })
    }

    pub fn zero(ambient_dim: usize) -> Result<Self, QlogicError> {
        Self::new(Vec::new(), ambient_dim)
    }

    pub fn whole(ambient_dim: usize) -> Result<Self, QlogicError> {
        let basis = (0..ambient_dim)
            .map(|k| {
                let mut v = CVector::zeros(ambient_dim);
                v[k] = Complex::new(1.0, 0.0);
                v
            })
            .collect();
        Self::new(basis, ambient_dim)
    }

    /// Span of arbitrary (not necessarily independent or normalized) vectors,
    /// orthonormalized with rank decisions at [`LATTICE_TOL`].
    pub fn span(vectors: &[CVector], ambient_dim: usize) -> Result<Self, QlogicError> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(QlogicError::WrongVectorLength {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
        }
        let basis = gram_schmidt(vectors.iter().cloned(), ambient_dim);
        Self::new(basis, ambient_dim)
    }

    /// The line spanned by a single nonzero vector.
    pub fn line(v: &CVector) -> Result<Self, QlogicError> {
        Self::span(std::slice::from_ref(v), v.len())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// The orthogonal projector Σ v v† onto this subspace.
    pub fn projector(&self) -> HermitianProjector {
        HermitianProjector::new(self.projector_matrix())
            .expect("sum of outer products of an orthonormal basis is a projector")
    }

    fn projector_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for v in &self.basis {
            m += v * v.adjoint();
        }
        m
    }
}

/// The orthogonal projector onto `sub`.
pub fn projector_of(sub: &Subspace) -> HermitianProjector {
    sub.projector()
}

/// Largest entrywise distance between the projectors of two subspaces; zero
/// within [`LATTICE_TOL`] exactly when they describe the same subspace.
pub fn projector_distance(p: &Subspace, q: &Subspace) -> Result<f64, QlogicError> {
    check_same_ambient(p, q)?;
    Ok(max_entry_norm(
        &(p.projector_matrix() - q.projector_matrix()),
    ))
}

/// Intersection of ranges, computed spectrally: the eigenspace of P + Q at
/// eigenvalue 2, with the eigenvalue cut at `2 - LATTICE_TOL`.
pub fn meet(p: &Subspace, q: &Subspace) -> Result<Subspace, QlogicError> {
    check_same_ambient(p, q)?;
    let sum = p.projector_matrix() + q.projector_matrix();
    let eig = sum.symmetric_eigen();
    let picked = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &value)| value >= 2.0 - LATTICE_TOL)
        .map(|(k, _)| eig.eigenvectors.column(k).into_owned());
    // Eigenvectors come out orthonormal; one more pass tightens roundoff.
    let basis = gram_schmidt(picked, p.ambient_dim());
    Subspace::with_max_dim(basis, p.ambient_dim(), p.ambient_dim())
}

/// Smallest subspace containing both ranges: orthonormalization of the
/// concatenated bases.
pub fn join(p: &Subspace, q: &Subspace) -> Result<Subspace, QlogicError> {
    check_same_ambient(p, q)?;
    let basis = gram_schmidt(
        p.basis().iter().chain(q.basis()).cloned(),
        p.ambient_dim(),
    );
    Subspace::with_max_dim(basis, p.ambient_dim(), p.ambient_dim())
}

/// Orthogonal complement: extends the basis to the whole space and keeps the
/// extension.
pub fn complement(p: &Subspace) -> Result<Subspace, QlogicError> {
    let ambient = p.ambient_dim();
    let standard = (0..ambient).map(|k| {
        let mut v = CVector::zeros(ambient);
        v[k] = Complex::new(1.0, 0.0);
        v
    });
    let extended = gram_schmidt(p.basis().iter().cloned().chain(standard), ambient);
    let basis = extended.into_iter().skip(p.dim()).collect();
    Subspace::with_max_dim(basis, ambient, ambient)
}

/// Subspace order: true iff range(P) ⊆ range(Q), decided by Q·P = P within
/// [`LATTICE_TOL`] entrywise.
pub fn leq(p: &Subspace, q: &Subspace) -> Result<bool, QlogicError> {
    check_same_ambient(p, q)?;
    let pm = p.projector_matrix();
    let qm = q.projector_matrix();
    Ok(max_entry_norm(&(qm * &pm - pm)) <= LATTICE_TOL)
}

/// True iff the projectors commute within [`LATTICE_TOL`] entrywise.
pub fn commutes(p: &Subspace, q: &Subspace) -> Result<bool, QlogicError> {
    check_same_ambient(p, q)?;
    let pm = p.projector_matrix();
    let qm = q.projector_matrix();
    Ok(max_entry_norm(&(&pm * &qm - qm * pm)) <= LATTICE_TOL)
}

/// Both sides of the distributive law for one triple.
#[derive(Debug, Clone)]
pub struct DistributivityWitness {
    /// P ∧ (P1 ∨ P2)
    pub lhs: Subspace,
    /// (P ∧ P1) ∨ (P ∧ P2)
    pub rhs: Subspace,
    pub violated: bool,
}

/// Evaluates P ∧ (P1 ∨ P2) against (P ∧ P1) ∨ (P ∧ P2); `violated` when the
/// two sides differ by more than [`LATTICE_TOL`] as projectors.
pub fn distributivity_witness(
    p: &Subspace,
    p1: &Subspace,
    p2: &Subspace,
) -> Result<DistributivityWitness, QlogicError> {
    let lhs = meet(p, &join(p1, p2)?)?;
    let rhs = join(&meet(p, p1)?, &meet(p, p2)?)?;
    let violated = projector_distance(&lhs, &rhs)? > LATTICE_TOL;
    Ok(DistributivityWitness { lhs, rhs, violated })
}

fn check_same_ambient(p: &Subspace, q: &Subspace) -> Result<(), QlogicError> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(QlogicError::DimensionMismatch {
            left: p.ambient_dim(),
            right: q.ambient_dim(),
        });
    }
    Ok(())
}

fn max_entry_norm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Modified Gram-Schmidt with a second projection pass; candidates whose
/// residual stays at or below [`LATTICE_TOL`] are dropped as dependent.
fn gram_schmidt(vectors: impl IntoIterator<Item = CVector>, ambient: usize) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for candidate in vectors {
        if basis.len() == ambient {
            break;
        }
        let norm = candidate.norm();
        if norm <= LATTICE_TOL {
            continue;
        }
        let mut v = candidate / Complex::new(norm, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&v);
                v -= b * coeff;
            }
        }
        let residual = v.norm();
        if residual > LATTICE_TOL {
            basis.push(v / Complex::new(residual, 0.0));
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_vec(components: &[f64]) -> CVector {
        CVector::from_iterator(
            components.len(),
            components.iter().map(|&x| Complex::new(x, 0.0)),
        )
    }

    fn e(k: usize, dim: usize) -> CVector {
        let mut v = CVector::zeros(dim);
        v[k] = Complex::new(1.0, 0.0);
        v
    }

    fn diagonal_line() -> Subspace {
        Subspace::line(&real_vec(&[1.0, 1.0])).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(Subspace::new(vec![e(0, 2)], 2).is_ok());
        assert!(matches!(
            Subspace::new(vec![], 0),
            Err(QlogicError::ZeroAmbient)
        ));
        assert!(matches!(
            Subspace::new(vec![], 17),
            Err(QlogicError::AmbientTooLarge { .. })
        ));
        assert!(Subspace::with_max_dim(vec![], 17, 32).is_ok());
        assert!(matches!(
            Subspace::new(vec![e(0, 2), e(1, 2), e(0, 2)], 2),
            Err(QlogicError::TooManyVectors { .. })
        ));
        assert!(matches!(
            Subspace::new(vec![e(0, 3)], 2),
            Err(QlogicError::WrongVectorLength { .. })
        ));
        assert!(matches!(
            Subspace::new(vec![real_vec(&[1.0, 1.0])], 2),
            Err(QlogicError::BasisNotOrthonormal { .. })
        ));
        assert!(matches!(
            Subspace::new(vec![e(0, 2), e(0, 2)], 2),
            Err(QlogicError::BasisNotOrthonormal { .. })
        ));
    }

    #[test]
    fn span_collapses_dependent_vectors() {
        let v = real_vec(&[1.0, 1.0]);
        let double = real_vec(&[2.0, 2.0]);
        let sub = Subspace::span(&[v, double], 2).unwrap();
        assert_eq!(sub.dim(), 1);
    }

    #[test]
    fn projector_of_examples() {
        let zero = Subspace::zero(3).unwrap();
        assert_eq!(max_entry_norm(zero.projector().matrix()), 0.0);

        let whole = Subspace::whole(3).unwrap();
        assert_eq!(
            max_entry_norm(&(whole.projector().matrix() - CMatrix::identity(3, 3))),
            0.0
        );

        let half = diagonal_line().projector();
        for entry in half.matrix().iter() {
            assert!((entry.re - 0.5).abs() < 1e-15);
            assert_eq!(entry.im, 0.0);
        }
    }

    #[test]
    fn meet_with_self_and_with_extremes() {
        let line = diagonal_line();
        let self_meet = meet(&line, &line).unwrap();
        assert!(projector_distance(&self_meet, &line).unwrap() <= LATTICE_TOL);

        let whole = Subspace::whole(2).unwrap();
        let with_whole = meet(&whole, &line).unwrap();
        assert!(projector_distance(&with_whole, &line).unwrap() <= LATTICE_TOL);

        let zero = Subspace::zero(2).unwrap();
        assert_eq!(meet(&zero, &line).unwrap().dim(), 0);
    }

    #[test]
    fn meet_of_skew_lines_is_zero() {
        let line = diagonal_line();
        let axis = Subspace::line(&e(0, 2)).unwrap();
        assert_eq!(meet(&line, &axis).unwrap().dim(), 0);
        assert_eq!(meet(&line, &Subspace::line(&e(1, 2)).unwrap()).unwrap().dim(), 0);
    }

    #[test]
    fn join_examples() {
        let e1 = Subspace::line(&e(0, 2)).unwrap();
        let e2 = Subspace::line(&e(1, 2)).unwrap();
        let joined = join(&e1, &e2).unwrap();
        assert_eq!(joined.dim(), 2);
        assert!(projector_distance(&joined, &Subspace::whole(2).unwrap()).unwrap() <= LATTICE_TOL);

        let zero = Subspace::zero(2).unwrap();
        let line = diagonal_line();
        assert!(projector_distance(&join(&line, &zero).unwrap(), &line).unwrap() <= LATTICE_TOL);
    }

    #[test]
    fn complement_examples() {
        let zero = Subspace::zero(3).unwrap();
        assert_eq!(complement(&zero).unwrap().dim(), 3);

        let e1 = Subspace::line(&e(0, 3)).unwrap();
        let comp = complement(&e1).unwrap();
        assert_eq!(comp.dim(), 2);
        let expected = Subspace::span(&[e(1, 3), e(2, 3)], 3).unwrap();
        assert!(projector_distance(&comp, &expected).unwrap() <= LATTICE_TOL);

        let line = diagonal_line();
        let twice = complement(&complement(&line).unwrap()).unwrap();
        assert!(projector_distance(&twice, &line).unwrap() <= LATTICE_TOL);
    }

    #[test]
    fn order_examples() {
        let zero = Subspace::zero(2).unwrap();
        let e1 = Subspace::line(&e(0, 2)).unwrap();
        let whole = Subspace::whole(2).unwrap();
        let line = diagonal_line();
        assert!(leq(&zero, &line).unwrap());
        assert!(leq(&e1, &whole).unwrap());
        assert!(!leq(&line, &e1).unwrap());
        assert!(!leq(&e1, &line).unwrap());
    }

    #[test]
    fn commutation_examples() {
        let e1 = Subspace::line(&e(0, 2)).unwrap();
        let e2 = Subspace::line(&e(1, 2)).unwrap();
        let line = diagonal_line();
        assert!(commutes(&e1, &e1).unwrap());
        assert!(commutes(&e1, &e2).unwrap());
        assert!(!commutes(&e1, &line).unwrap());
    }

    #[test]
    fn skew_line_witnesses_distributivity_violation() {
        let v = diagonal_line();
        let e1 = Subspace::line(&e(0, 2)).unwrap();
        let e2 = Subspace::line(&e(1, 2)).unwrap();

        assert_eq!(meet(&v, &e1).unwrap().dim(), 0);
        assert_eq!(meet(&v, &e2).unwrap().dim(), 0);

        let witness = distributivity_witness(&v, &e1, &e2).unwrap();
        assert!(witness.violated);
        assert!(projector_distance(&witness.lhs, &v).unwrap() <= LATTICE_TOL);
        assert_eq!(witness.rhs.dim(), 0);
    }

    #[test]
    fn degenerate_and_commuting_triples_distribute() {
        let v = diagonal_line();
        let e1 = Subspace::line(&e(0, 2)).unwrap();
        let same = distributivity_witness(&v, &e1, &e1).unwrap();
        assert!(!same.violated);

        // Subspaces sharing the standard eigenbasis commute pairwise.
        let p = Subspace::span(&[e(0, 3), e(1, 3)], 3).unwrap();
        let p1 = Subspace::line(&e(1, 3)).unwrap();
        let p2 = Subspace::line(&e(2, 3)).unwrap();
        assert!(commutes(&p, &p1).unwrap());
        assert!(commutes(&p, &p2).unwrap());
        assert!(commutes(&p1, &p2).unwrap());
        let witness = distributivity_witness(&p, &p1, &p2).unwrap();
        assert!(!witness.violated);
    }

    #[test]
    fn dimension_identity_on_fixed_pairs() {
        let p = Subspace::span(&[e(0, 4), e(1, 4)], 4).unwrap();
        let q = Subspace::span(&[e(1, 4), e(2, 4)], 4).unwrap();
        let m = meet(&p, &q).unwrap();
        let j = join(&p, &q).unwrap();
        assert_eq!(m.dim() + j.dim(), p.dim() + q.dim());
        assert_eq!(m.dim(), 1);
        assert_eq!(j.dim(), 3);
    }

    #[test]
    fn mismatched_ambient_dimensions_are_rejected() {
        let p = Subspace::line(&e(0, 2)).unwrap();
        let q = Subspace::line(&e(0, 3)).unwrap();
        assert!(matches!(
            meet(&p, &q),
            Err(QlogicError::DimensionMismatch { left: 2, right: 3 })
        ));
        assert!(matches!(join(&p, &q), Err(QlogicError::DimensionMismatch { .. })));
        assert!(matches!(leq(&p, &q), Err(QlogicError::DimensionMismatch { .. })));
        assert!(matches!(
            commutes(&p, &q),
            Err(QlogicError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complex_subspaces_work_throughout() {
        // Line spanned by (1, i)/√2 and its complement (1, -i)/√2.
        let i_unit = Complex::new(0.0, 1.0);
        let v = CVector::from_iterator(2, [Complex::new(1.0, 0.0), i_unit]);
        let line = Subspace::line(&v).unwrap();
        assert_eq!(line.dim(), 1);
        let comp = complement(&line).unwrap();
        assert_eq!(comp.dim(), 1);
        assert_eq!(meet(&line, &comp).unwrap().dim(), 0);
        assert_eq!(join(&line, &comp).unwrap().dim(), 2);
        assert!(commutes(&line, &comp).unwrap());
        let witness = distributivity_witness(
            &diagonal_line(),
            &line,
            &comp,
        )
        .unwrap();
        // join(line, comp) is the whole space, so the left side is the full
        // diagonal line while both meets on the right are zero.
        assert!(witness.violated);
    }
}
