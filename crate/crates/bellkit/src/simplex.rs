//! Dense phase-one simplex for small equality-form feasibility problems:
//! find x >= 0 with A x = b, or produce a Farkas certificate that none
//! exists. Entering columns follow Bland's rule, so the iteration cannot
//! cycle; redundant (rank-deficient) rows are harmless because their
//! artificial variables simply stay basic at level zero.

/// Pivots smaller than this are treated as zero everywhere in the solver.
pub const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimplexError {
    #[error("constraint system has no rows or no columns")]
    EmptySystem,
    #[error("row {row} has {got} coefficients, expected {expected}")]
    RowLengthMismatch {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("right-hand side has {got} entries for {expected} rows")]
    RhsLengthMismatch { expected: usize, got: usize },
    #[error("pivot selection failed; the tableau is numerically degenerate")]
    NumericalBreakdown,
}

/// Result of a feasibility solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// A nonnegative solution of A x = b (up to pivot tolerance).
    Feasible { solution: Vec<f64> },
    /// A vector y with yᵀA <= 0 and yᵀb > 0, certifying infeasibility.
    Infeasible { farkas: Vec<f64> },
}

/// Decides feasibility of {x >= 0 : A x = b} by minimizing the sum of
/// artificial variables over [A | I] with a dense tableau.
pub fn solve_feasibility(a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome, SimplexError> {
    let rows = a.len();
    if rows == 0 || a[0].is_empty() {
        return Err(SimplexError::EmptySystem);
    }
    let cols = a[0].len();
    for (row, coefficients) in a.iter().enumerate() {
        if coefficients.len() != cols {
            return Err(SimplexError::RowLengthMismatch {
                row,
                expected: cols,
                got: coefficients.len(),
            });
        }
    }
    if b.len() != rows {
        return Err(SimplexError::RhsLengthMismatch {
            expected: rows,
            got: b.len(),
        });
    }

    // Flip rows so the right-hand side is nonnegative; remember the signs to
    // translate a Farkas certificate back to the caller's orientation.
    let mut flip = vec![1.0; rows];
    let total = cols + rows;
    // tableau[i] = [coefficients | artificial block | rhs]
    let mut tableau = vec![vec![0.0; total + 1]; rows];
    for i in 0..rows {
        if b[i] < 0.0 {
            flip[i] = -1.0;
        }
        for j in 0..cols {
            tableau[i][j] = flip[i] * a[i][j];
        }
        tableau[i][cols + i] = 1.0;
        tableau[i][total] = flip[i] * b[i];
    }
    let mut basis: Vec<usize> = (cols..total).collect();

    // Objective: minimize the artificial sum. With the artificial columns
    // basic, the reduced-cost row is c - sum of all tableau rows.
    let mut objective = vec![0.0; total + 1];
    for (j, entry) in objective.iter_mut().enumerate() {
        if (cols..total).contains(&j) {
            *entry = 1.0;
        }
        for row in &tableau {
            *entry -= row[j];
        }
    }

    loop {
        // Bland: the lowest-index column with a negative reduced cost enters.
        let entering = (0..total).find(|&j| objective[j] < -PIVOT_TOL);
        let Some(enter) = entering else { break };

        // Ratio test; ties go to the row whose basic column has the lowest
        // index, completing Bland's rule.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..rows {
            let coefficient = tableau[i][enter];
            if coefficient > PIVOT_TOL {
                let ratio = tableau[i][total] / coefficient;
                let better = match leave {
                    None => true,
                    Some(current) => {
                        ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[current])
                    }
                };
                if better {
                    leave = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        let Some(leave) = leave else {
            // Phase one is bounded below by zero, so a missing leaving row
            // can only be numerical noise.
            return Err(SimplexError::NumericalBreakdown);
        };

        // Pivot.
        let pivot = tableau[leave][enter];
        for value in tableau[leave].iter_mut() {
            *value /= pivot;
        }
        let pivot_row = tableau[leave].clone();
        for (i, row) in tableau.iter_mut().enumerate() {
            if i != leave {
                let factor = row[enter];
                if factor != 0.0 {
                    for (value, &p) in row.iter_mut().zip(&pivot_row) {
                        *value -= factor * p;
                    }
                }
            }
        }
        let factor = objective[enter];
        if factor != 0.0 {
            for (value, &p) in objective.iter_mut().zip(&pivot_row) {
                *value -= factor * p;
            }
        }
        basis[leave] = enter;
    }

    // Optimal artificial sum; the objective row stores its negation.
    let artificial_sum = -objective[total];
    if artificial_sum <= PIVOT_TOL {
        let mut solution = vec![0.0; cols];
        for (i, &column) in basis.iter().enumerate() {
            if column < cols {
                solution[column] = tableau[i][total].max(0.0);
            }
        }
        Ok(LpOutcome::Feasible { solution })
    } else {
        // Simplex multipliers off the artificial reduced costs: the reduced
        // cost of artificial i is 1 - y_i, and y certifies infeasibility of
        // the sign-flipped system, so flip back per row.
        let farkas = (0..rows)
            .map(|i| flip[i] * (1.0 - objective[cols + i]))
            .collect();
        Ok(LpOutcome::Infeasible { farkas })
    }
}
