//! Existence of a joint distribution with prescribed pairwise marginals (the
//! Boole/Vorob'ev marginal problem) for the 2x2x2 experiment: four +/-1
//! observables a1, a2, b1, b2 observed only in the pairs (a_i, b_j).
//!
//! Ground truth is a feasibility LP over the sixteen deterministic
//! assignments. The CHSH sign-variant bound (every variant within [-2, 2])
//! is computed by an entirely separate route and never feeds the LP verdict;
//! tests compare the two and treat any disagreement as a defect.

use crate::chsh::{ChshError, Outcome, PairwiseTable, Setting};
use crate::simplex::{solve_feasibility, LpOutcome, SimplexError};

/// Tolerance for marginal agreement, witness validity, and the variant bound.
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JointnessError {
    #[error("single-observable marginal of {observable} differs across blocks by {defect:e}")]
    InconsistentMarginals { observable: &'static str, defect: f64 },
    #[error("witness weight {value} at assignment {index} is negative")]
    BadWitnessWeight { index: usize, value: f64 },
    #[error("witness weights sum to {sum}, not 1 within {MARGINAL_TOL:e}")]
    WitnessNotNormalized { sum: f64 },
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Table(#[from] ChshError),
}

/// The outcomes (a1, a2, b1, b2) encoded by an assignment index in 0..16.
/// Bit 3 is a1 and bit 0 is b2; a zero bit means +1.
pub fn assignment_outcomes(index: usize) -> [Outcome; 4] {
    let bit = |k: usize| {
        if index >> (3 - k) & 1 == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    };
    [bit(0), bit(1), bit(2), bit(3)]
}

fn assignment_matches(
    index: usize,
    i: Setting,
    j: Setting,
    e: Outcome,
    ep: Outcome,
) -> bool {
    let outcomes = assignment_outcomes(index);
    outcomes[i.index()] == e && outcomes[2 + j.index()] == ep
}

/// A distribution over the sixteen deterministic assignments of
/// (a1, a2, b1, b2), indexed per [`assignment_outcomes`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointWitness {
    weights: [f64; 16],
}

impl JointWitness {
    pub fn new(weights: [f64; 16]) -> Result<Self, JointnessError> {
        for (index, &value) in weights.iter().enumerate() {
            if value < -MARGINAL_TOL || value.is_nan() {
                return Err(JointnessError::BadWitnessWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MARGINAL_TOL {
            return Err(JointnessError::WitnessNotNormalized { sum });
        }
        let weights = weights.map(|w| w.max(0.0));
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64; 16] {
        &self.weights
    }

    pub fn weight_of(&self, outcomes: [Outcome; 4]) -> f64 {
        let index = outcomes
            .iter()
            .fold(0usize, |acc, o| acc << 1 | o.index());
        self.weights[index]
    }

    /// Pairwise marginals as raw cell values in [`PairwiseTable`] entry
    /// order; sums each block to the witness total, not exactly 1.
    pub fn marginal_cells(&self) -> [f64; 16] {
        let mut cells = [0.0; 16];
        let mut cell = 0;
        for i in Setting::ALL {
            for j in Setting::ALL {
                for e in Outcome::ALL {
                    for ep in Outcome::ALL {
                        cells[cell] = (0..16)
                            .filter(|&index| assignment_matches(index, i, j, e, ep))
                            .map(|index| self.weights[index])
                            .sum();
                        cell += 1;
                    }
                }
            }
        }
        cells
    }

    /// The marginals as a validated table; fails only if roundoff pushed a
    /// block sum outside the strict table tolerance.
    pub fn marginal_table(&self) -> Result<PairwiseTable, ChshError> {
        PairwiseTable::from_probs(self.marginal_cells())
    }
}

/// One signed CHSH combination of the four block correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshVariant {
    /// Signs over cells (1,1), (1,2), (2,1), (2,2); each +1 or -1.
    pub signs: [i8; 4],
    pub value: f64,
}

impl ChshVariant {
    /// Rendering like `+C11+C12+C21-C22`.
    pub fn label(&self) -> String {
        let mut out = String::new();
        let mut cell = 0;
        for i in 1..=2 {
            for j in 1..=2 {
                out.push(if self.signs[cell] >= 0 { '+' } else { '-' });
                out.push_str(&format!("C{i}{j}"));
                cell += 1;
            }
        }
        out
    }
}

/// All eight signed CHSH combinations: the minus sign at each of the four
/// cells, each with both overall orientations. Order: minus at (1,1) then its
/// negation, minus at (1,2) then its negation, and so on.
pub fn chsh_variants(table: &PairwiseTable) -> Vec<ChshVariant> {
    let correlations: Vec<f64> = Setting::ALL
        .iter()
        .flat_map(|&i| Setting::ALL.iter().map(move |&j| (i, j)))
        .map(|(i, j)| table.block_correlation(i, j))
        .collect();
    let mut variants = Vec::with_capacity(8);
    for minus_at in 0..4 {
        let mut signs = [1i8; 4];
        signs[minus_at] = -1;
        for flip in [1i8, -1] {
            let signs = signs.map(|s| s * flip);
            let value = signs
                .iter()
                .zip(&correlations)
                .map(|(&s, &c)| f64::from(s) * c)
                .sum();
            variants.push(ChshVariant { signs, value });
        }
    }
    variants
}

/// True iff each single observable has the same marginal in both blocks that
/// contain it, within [`MARGINAL_TOL`].
pub fn marginal_consistency(table: &PairwiseTable) -> bool {
    worst_marginal_defect(table).1 <= MARGINAL_TOL
}

fn worst_marginal_defect(table: &PairwiseTable) -> (&'static str, f64) {
    let left_plus = |i: Setting, j: Setting| {
        table.prob(i, j, Outcome::Plus, Outcome::Plus)
            + table.prob(i, j, Outcome::Plus, Outcome::Minus)
    };
    let right_plus = |i: Setting, j: Setting| {
        table.prob(i, j, Outcome::Plus, Outcome::Plus)
            + table.prob(i, j, Outcome::Minus, Outcome::Plus)
    };
    let checks: [(&'static str, f64); 4] = [
        (
            "a1",
            (left_plus(Setting::One, Setting::One) - left_plus(Setting::One, Setting::Two)).abs(),
        ),
        (
            "a2",
            (left_plus(Setting::Two, Setting::One) - left_plus(Setting::Two, Setting::Two)).abs(),
        ),
        (
            "b1",
            (right_plus(Setting::One, Setting::One) - right_plus(Setting::Two, Setting::One))
                .abs(),
        ),
        (
            "b2",
            (right_plus(Setting::One, Setting::Two) - right_plus(Setting::Two, Setting::Two))
                .abs(),
        ),
    ];
    checks
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four checks")
}

/// The verdict of [`joint_exists`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// Present exactly when feasible.
    pub witness: Option<JointWitness>,
    /// Largest of the eight signed CHSH combinations.
    pub max_chsh_variant: f64,
    /// The variant attaining the maximum, reported when infeasible.
    pub violating_variant: Option<ChshVariant>,
    /// Infeasibility certificate y with yᵀA <= 0 < yᵀb over the LP rows
    /// (sixteen marginal equations then the normalization row).
    pub farkas: Option<Vec<f64>>,
}

/// Decides whether a joint distribution over (a1, a2, b1, b2) exists whose
/// pair marginals equal the table, via the feasibility LP on the sixteen
/// deterministic assignments. Tables whose single-observable marginals
/// already disagree across blocks are rejected up front: for them the
/// question is ill-posed one level below jointness.
pub fn joint_exists(table: &PairwiseTable) -> Result<FeasibilityResult, JointnessError> {
    let (observable, defect) = worst_marginal_defect(table);
    if defect > MARGINAL_TOL {
        return Err(JointnessError::InconsistentMarginals { observable, defect });
    }

    // Sixteen marginal rows in table entry order, then the normalization row.
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(17);
    let mut b: Vec<f64> = Vec::with_capacity(17);
    for i in Setting::ALL {
        for j in Setting::ALL {
            for e in Outcome::ALL {
                for ep in Outcome::ALL {
                    a.push(
                        (0..16)
                            .map(|index| {
                                if assignment_matches(index, i, j, e, ep) {
                                    1.0
                                } else {
                                    0.0
                                }
                            })
                            .collect(),
                    );
                    b.push(table.prob(i, j, e, ep));
                }
            }
        }
    }
    a.push(vec![1.0; 16]);
    b.push(1.0);

    let variants = chsh_variants(table);
    let best = variants
        .iter()
        .max_by(|u, v| u.value.total_cmp(&v.value))
        .expect("eight variants")
        .clone();

    match solve_feasibility(&a, &b)? {
        LpOutcome::Feasible { solution } => {
            let mut weights = [0.0; 16];
            weights.copy_from_slice(&solution);
            let witness = JointWitness::new(weights)?;
            Ok(FeasibilityResult {
                feasible: true,
                witness: Some(witness),
                max_chsh_variant: best.value,
                violating_variant: None,
                farkas: None,
            })
        }
        LpOutcome::Infeasible { farkas } => Ok(FeasibilityResult {
            feasible: false,
            witness: None,
            max_chsh_variant: best.value,
            violating_variant: Some(best),
            farkas: Some(farkas),
        }),
    }
}
