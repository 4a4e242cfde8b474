//! Finite Kolmogorov probability spaces.
//!
//! A space is the triple (Ω, F, p) instantiated at finite Ω with F the full
//! power set, so the measure is a list of atom weights. Random variables are
//! real-valued assignments on atoms, events are atom subsets, and conditioning
//! follows the Bayes formula P(B|C) = P(B ∩ C)/P(C) with P(C) > 0 required
//! strictly.

use std::collections::{BTreeSet, HashMap};

/// Absolute tolerance for weight/probability-vector normalization checks.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Absolute slack allowed when checking that a variable is valued in [-1, 1].
pub const RANGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbError {
    #[error("weight {weight} at index {index} is negative")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("weights sum to {sum}, which is not 1 within {NORMALIZATION_TOL:e}")]
    NotNormalized { sum: f64 },
    #[error("duplicate atom label `{label}`")]
    DuplicateAtom { label: String },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("a probability space needs at least one atom")]
    Empty,
    #[error("random variable or event refers to no atom `{label}` of this space")]
    DomainMismatch { label: String },
    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,
    #[error("value {value} on atom `{label}` lies outside [-1, 1]")]
    RangeViolation { label: String, value: f64 },
}

/// A finite probability space: ordered atom labels with one weight per atom.
///
/// Weights are validated on construction (nonnegative, summing to 1 within
/// [`NORMALIZATION_TOL`], unique labels) and never mutated afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySpace {
    atoms: Vec<String>,
    weights: Vec<f64>,
    index: HashMap<String, usize>,
}

impl ProbabilitySpace {
    /// Builds a validated space. Weights whose sum drifts from 1 by at most
    /// [`NORMALIZATION_TOL`] are renormalized; a larger defect is rejected
    /// rather than silently fixed.
    pub fn new<S: Into<String>>(atoms: Vec<S>, weights: Vec<f64>) -> Result<Self, ProbError> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(ProbError::Empty);
        }
        if atoms.len() != weights.len() {
            return Err(ProbError::LengthMismatch {
                expected: atoms.len(),
                got: weights.len(),
            });
        }
        for (index, &weight) in weights.iter().enumerate() {
            if weight < 0.0 || weight.is_nan() {
                return Err(ProbError::NegativeWeight { index, weight });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProbError::NotNormalized { sum });
        }
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, label) in atoms.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(ProbError::DuplicateAtom {
                    label: label.clone(),
                });
            }
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self {
            atoms,
            weights,
            index,
        })
    }

    /// Uniform distribution over the given labels.
    pub fn uniform<S: Into<String>>(atoms: Vec<S>) -> Result<Self, ProbError> {
        let n = atoms.len();
        if n == 0 {
            return Err(ProbError::Empty);
        }
        Self::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atom labels in construction order.
    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// Weights aligned with [`Self::atoms`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn weight_of(&self, label: &str) -> Option<f64> {
        self.index.get(label).map(|&i| self.weights[i])
    }

    /// P(c), the summed weight of the event's members.
    pub fn probability(&self, event: &Event) -> Result<f64, ProbError> {
        let mut total = 0.0;
        for label in event.members() {
            match self.index.get(label) {
                Some(&i) => total += self.weights[i],
                None => {
                    return Err(ProbError::DomainMismatch {
                        label: label.clone(),
                    })
                }
            }
        }
        Ok(total)
    }

    /// E(x) = Σ_ω x(ω) p(ω).
    pub fn expectation(&self, x: &RandomVariable) -> Result<f64, ProbError> {
        let mut total = 0.0;
        for (label, &weight) in self.atoms.iter().zip(&self.weights) {
            let value = x.value_on(label).ok_or_else(|| ProbError::DomainMismatch {
                label: label.clone(),
            })?;
            total += value * weight;
        }
        Ok(total)
    }

    /// ⟨a, b⟩ = E(ab), the expectation of the pointwise product.
    pub fn correlation(&self, a: &RandomVariable, b: &RandomVariable) -> Result<f64, ProbError> {
        let mut total = 0.0;
        for (label, &weight) in self.atoms.iter().zip(&self.weights) {
            let va = a.value_on(label).ok_or_else(|| ProbError::DomainMismatch {
                label: label.clone(),
            })?;
            let vb = b.value_on(label).ok_or_else(|| ProbError::DomainMismatch {
                label: label.clone(),
            })?;
            total += va * vb * weight;
        }
        Ok(total)
    }

    /// Bayes conditioning: the space restricted to `c` with weights p(ω)/P(c).
    ///
    /// P(c) must be strictly positive; the comparison is exact, not toleranced,
    /// so a zero-weight event always fails rather than producing NaN weights.
    pub fn condition(&self, c: &Event) -> Result<ProbabilitySpace, ProbError> {
        let total = self.probability(c)?;
        if total == 0.0 {
            return Err(ProbError::ZeroProbabilityCondition);
        }
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (label, &weight) in self.atoms.iter().zip(&self.weights) {
            if c.contains(label) {
                atoms.push(label.clone());
                weights.push(weight / total);
            }
        }
        ProbabilitySpace::new(atoms, weights)
    }

    /// E(x | c), evaluated on the conditioned space.
    pub fn conditional_expectation(
        &self,
        x: &RandomVariable,
        c: &Event,
    ) -> Result<f64, ProbError> {
        self.condition(c)?.expectation(x)
    }

    /// The event containing every atom of this space.
    pub fn whole_event(&self) -> Event {
        Event::from_labels(self.atoms.iter().cloned())
    }

    /// Atoms selected by a predicate on the label.
    pub fn event_where(&self, mut pred: impl FnMut(&str) -> bool) -> Event {
        Event::from_labels(self.atoms.iter().filter(|l| pred(l)).cloned())
    }
}

/// A real-valued assignment on atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    values: HashMap<String, f64>,
}

impl RandomVariable {
    pub fn from_pairs<S: Into<String>, I: IntoIterator<Item = (S, f64)>>(pairs: I) -> Self {
        Self {
            values: pairs.into_iter().map(|(l, v)| (l.into(), v)).collect(),
        }
    }

    /// Defined on every atom of `space` by evaluating `f` on the label.
    pub fn on_space(space: &ProbabilitySpace, mut f: impl FnMut(&str) -> f64) -> Self {
        Self {
            values: space.atoms().iter().map(|l| (l.clone(), f(l))).collect(),
        }
    }

    pub fn constant(space: &ProbabilitySpace, value: f64) -> Self {
        Self::on_space(space, |_| value)
    }

    pub fn value_on(&self, label: &str) -> Option<f64> {
        self.values.get(label).copied()
    }

    /// Pointwise product, defined where both factors are defined.
    pub fn product(&self, other: &RandomVariable) -> RandomVariable {
        let values = self
            .values
            .iter()
            .filter_map(|(l, &v)| other.value_on(l).map(|w| (l.clone(), v * w)))
            .collect();
        RandomVariable { values }
    }

    /// The indicator of `event`, defined on the atoms of `space`.
    pub fn indicator(space: &ProbabilitySpace, event: &Event) -> RandomVariable {
        Self::on_space(space, |l| if event.contains(l) { 1.0 } else { 0.0 })
    }

    /// Checks that the variable is defined on all atoms of `space` and valued
    /// in [-1, 1] up to [`RANGE_TOL`].
    pub fn check_unit_range(&self, space: &ProbabilitySpace) -> Result<(), ProbError> {
        for label in space.atoms() {
            let value = self
                .value_on(label)
                .ok_or_else(|| ProbError::DomainMismatch {
                    label: label.clone(),
                })?;
            if value.abs() > 1.0 + RANGE_TOL {
                return Err(ProbError::RangeViolation {
                    label: label.clone(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// A subset of atom labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    members: BTreeSet<String>,
}

impl Event {
    pub fn from_labels<S: Into<String>, I: IntoIterator<Item = S>>(labels: I) -> Self {
        Self {
            members: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn members(&self) -> impl Iterator<Item = &String> {
        self.members.iter()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.members.contains(label)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Randomized mixture of context spaces: atoms of space j are tagged `"j:"` so
/// labels stay unique, and each inherits weight q_j · p_j(ω).
pub fn mixture(spaces: &[ProbabilitySpace], q: &[f64]) -> Result<ProbabilitySpace, ProbError> {
    if spaces.is_empty() {
        return Err(ProbError::Empty);
    }
    if spaces.len() != q.len() {
        return Err(ProbError::LengthMismatch {
            expected: spaces.len(),
            got: q.len(),
        });
    }
    for (index, &weight) in q.iter().enumerate() {
        if weight < 0.0 || weight.is_nan() {
            return Err(ProbError::NegativeWeight { index, weight });
        }
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(ProbError::NotNormalized { sum });
    }
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for (j, (space, &qj)) in spaces.iter().zip(q).enumerate() {
        for (label, &w) in space.atoms().iter().zip(space.weights()) {
            atoms.push(format!("{j}:{label}"));
            weights.push(qj * w);
        }
    }
    ProbabilitySpace::new(atoms, weights)
}

/// Tags an atom label with its context index, as [`mixture`] does.
pub fn tagged_label(context: usize, label: &str) -> String {
    format!("{context}:{label}")
}

/// The CHSH combination ⟨A1,B1⟩ + ⟨A1,B2⟩ + ⟨A2,B1⟩ − ⟨A2,B2⟩.
///
/// All four variables must be valued in [-1, 1] on every atom; for such
/// variables the combination is bounded by 2 in absolute value on any single
/// probability space.
pub fn chsh_s(
    space: &ProbabilitySpace,
    a1: &RandomVariable,
    a2: &RandomVariable,
    b1: &RandomVariable,
    b2: &RandomVariable,
) -> Result<f64, ProbError> {
    for v in [a1, a2, b1, b2] {
        v.check_unit_range(space)?;
    }
    Ok(space.correlation(a1, b1)? + space.correlation(a1, b2)? + space.correlation(a2, b1)?
        - space.correlation(a2, b2)?)
}
