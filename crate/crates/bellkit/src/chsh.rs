//! Embedding of a two-party, two-setting correlation experiment into a single
//! finite probability space.
//!
//! The sample space has sixteen atoms `(x1, x2, y1, y2)` in which exactly one
//! left coordinate and one right coordinate are nonzero: the position of the
//! nonzero coordinate records which setting was selected on that side, and its
//! sign records the outcome. An atom gets weight `P(i, j) * p_ij(e, e')` where
//! `P(i, j)` is the product probability of selecting settings `(i, j)` and
//! `p_ij` is the outcome distribution for that setting pair.
//!
//! The observables `A(i)` and `B(j)` read their own coordinate and are zero on
//! atoms where the other setting was selected. Conditioning on the selector
//! events recovers the per-pair correlations exactly:
//!
//! ```text
//! C_ij = E(A(i) B(j) | left = i, right = j)
//!      = <A(i), B(j)> / P(i, j)
//!      = sum over e, e' of e * e' * p_ij(e, e')
//! ```
//!
//! All three routes are computed independently and their maximum discrepancy
//! is reported as [`ChshSpace::identity_residual`].

use crate::prob::{
    chsh_s, mixture, Event, ProbError, ProbabilitySpace, RandomVariable, NORMALIZATION_TOL,
};

/// Slack for bound verdicts such as `|S| <= 1` and `|S_C| <= 4`.
pub const BOUND_TOL: f64 = 1e-9;

/// Sign pattern of the CHSH combination: `+C11 + C12 + C21 - C22`.
pub const CHSH_SIGNS: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, -1.0]];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChshError {
    #[error("outcome probability {value} for block ({i},{j}) is negative")]
    NegativeProbability { i: u8, j: u8, value: f64 },
    #[error("outcome probabilities for block ({i},{j}) sum to {sum}, not 1")]
    BlockNotNormalized { i: u8, j: u8, sum: f64 },
    #[error("setting probability {name}={value} lies outside [0, 1]")]
    BadSettingProbability { name: &'static str, value: f64 },
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Which of the two measurement settings a side uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    One,
    Two,
}

impl Setting {
    pub const ALL: [Setting; 2] = [Setting::One, Setting::Two];

    pub fn index(self) -> usize {
        match self {
            Setting::One => 0,
            Setting::Two => 1,
        }
    }

    /// 1-based numeral, as used in labels and file formats.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Setting> {
        match n {
            1 => Some(Setting::One),
            2 => Some(Setting::Two),
            _ => None,
        }
    }
}

/// A dichotomic measurement outcome, valued +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Outcome> {
        match v {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }
}

/// Left or right party of the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Outcome distributions for the four setting pairs.
///
/// Entry order is row-major over `(i, j, e, e')` with settings in `{1, 2}` and
/// outcomes in `{+1, -1}`; each `(i, j)` block of four entries is a
/// probability distribution in its own right.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseTable {
    probs: [f64; 16],
}

fn entry_index(i: Setting, j: Setting, e: Outcome, ep: Outcome) -> usize {
    ((i.index() * 2 + j.index()) * 2 + e.index()) * 2 + ep.index()
}

impl PairwiseTable {
    /// Validates nonnegativity and per-block normalization.
    pub fn from_probs(probs: [f64; 16]) -> Result<Self, ChshError> {
        for i in Setting::ALL {
            for j in Setting::ALL {
                let mut sum = 0.0;
                for e in Outcome::ALL {
                    for ep in Outcome::ALL {
                        let value = probs[entry_index(i, j, e, ep)];
                        if value < 0.0 || value.is_nan() {
                            return Err(ChshError::NegativeProbability {
                                i: i.number(),
                                j: j.number(),
                                value,
                            });
                        }
                        sum += value;
                    }
                }
                if (sum - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(ChshError::BlockNotNormalized {
                        i: i.number(),
                        j: j.number(),
                        sum,
                    });
                }
            }
        }
        Ok(Self { probs })
    }

    pub fn from_fn(
        mut f: impl FnMut(Setting, Setting, Outcome, Outcome) -> f64,
    ) -> Result<Self, ChshError> {
        let mut probs = [0.0; 16];
        for i in Setting::ALL {
            for j in Setting::ALL {
                for e in Outcome::ALL {
                    for ep in Outcome::ALL {
                        probs[entry_index(i, j, e, ep)] = f(i, j, e, ep);
                    }
                }
            }
        }
        Self::from_probs(probs)
    }

    /// Outcomes uniform and independent in every block; all correlations zero.
    pub fn uniform() -> Self {
        Self { probs: [0.25; 16] }
    }

    /// The nonlocal box that saturates the algebraic maximum: outcomes agree
    /// with certainty except for the `(2, 2)` block, where they disagree.
    pub fn pr_box() -> Self {
        Self::from_fn(|i, j, e, ep| {
            let agree = e == ep;
            let want_agree = !(i == Setting::Two && j == Setting::Two);
            if agree == want_agree {
                0.5
            } else {
                0.0
            }
        })
        .expect("pr_box table is normalized by construction")
    }

    pub fn prob(&self, i: Setting, j: Setting, e: Outcome, ep: Outcome) -> f64 {
        self.probs[entry_index(i, j, e, ep)]
    }

    pub fn probs(&self) -> &[f64; 16] {
        &self.probs
    }

    /// The correlation `sum of e * e' * p_ij(e, e')`, straight off the table.
    pub fn block_correlation(&self, i: Setting, j: Setting) -> f64 {
        let mut total = 0.0;
        for e in Outcome::ALL {
            for ep in Outcome::ALL {
                total += e.sign() * ep.sign() * self.prob(i, j, e, ep);
            }
        }
        total
    }
}

/// Product distribution over setting pairs: left and right selections are
/// independent, with `P(left = 1) = pl1` and `P(right = 1) = pr1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingDistribution {
    pl1: f64,
    pr1: f64,
}

impl SettingDistribution {
    pub fn new(pl1: f64, pr1: f64) -> Result<Self, ChshError> {
        if !(0.0..=1.0).contains(&pl1) || pl1.is_nan() {
            return Err(ChshError::BadSettingProbability {
                name: "pl1",
                value: pl1,
            });
        }
        if !(0.0..=1.0).contains(&pr1) || pr1.is_nan() {
            return Err(ChshError::BadSettingProbability {
                name: "pr1",
                value: pr1,
            });
        }
        Ok(Self { pl1, pr1 })
    }

    pub fn uniform() -> Self {
        Self { pl1: 0.5, pr1: 0.5 }
    }

    pub fn left(&self, i: Setting) -> f64 {
        match i {
            Setting::One => self.pl1,
            Setting::Two => 1.0 - self.pl1,
        }
    }

    pub fn right(&self, j: Setting) -> f64 {
        match j {
            Setting::One => self.pr1,
            Setting::Two => 1.0 - self.pr1,
        }
    }

    pub fn prob(&self, i: Setting, j: Setting) -> f64 {
        self.left(i) * self.right(j)
    }
}

fn atom_label(i: Setting, j: Setting, e: Outcome, ep: Outcome) -> String {
    let mut coords = ["0"; 4];
    let sign = |o: Outcome| if o == Outcome::Plus { "+1" } else { "-1" };
    coords[i.index()] = sign(e);
    coords[2 + j.index()] = sign(ep);
    format!("({},{},{},{})", coords[0], coords[1], coords[2], coords[3])
}

/// One experiment embedded in a single sixteen-atom probability space.
#[derive(Debug, Clone)]
pub struct ChshSpace {
    space: ProbabilitySpace,
    table: PairwiseTable,
    settings: SettingDistribution,
    a: [RandomVariable; 2],
    b: [RandomVariable; 2],
}

impl ChshSpace {
    pub fn build(
        table: PairwiseTable,
        settings: SettingDistribution,
    ) -> Result<Self, ChshError> {
        let mut atoms = Vec::with_capacity(16);
        let mut weights = Vec::with_capacity(16);
        for i in Setting::ALL {
            for j in Setting::ALL {
                for e in Outcome::ALL {
                    for ep in Outcome::ALL {
                        atoms.push(atom_label(i, j, e, ep));
                        weights.push(settings.prob(i, j) * table.prob(i, j, e, ep));
                    }
                }
            }
        }
        let space = ProbabilitySpace::new(atoms, weights)?;
        // A(i) reads left coordinate i; zero wherever the other left setting
        // was selected. Same for B(j) on the right.
        let observable = |own: Setting, side: Side| {
            RandomVariable::on_space(&space, |label| {
                let (i, j, e, ep) = parse_atom_label(label).expect("labels built by atom_label");
                match side {
                    Side::Left => {
                        if i == own {
                            e.sign()
                        } else {
                            0.0
                        }
                    }
                    Side::Right => {
                        if j == own {
                            ep.sign()
                        } else {
                            0.0
                        }
                    }
                }
            })
        };
        let a = [
            observable(Setting::One, Side::Left),
            observable(Setting::Two, Side::Left),
        ];
        let b = [
            observable(Setting::One, Side::Right),
            observable(Setting::Two, Side::Right),
        ];
        Ok(Self {
            space,
            table,
            settings,
            a,
            b,
        })
    }

    pub fn probability_space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn table(&self) -> &PairwiseTable {
        &self.table
    }

    pub fn settings(&self) -> &SettingDistribution {
        &self.settings
    }

    pub fn observable_left(&self, i: Setting) -> &RandomVariable {
        &self.a[i.index()]
    }

    pub fn observable_right(&self, j: Setting) -> &RandomVariable {
        &self.b[j.index()]
    }

    /// The event that the given side selected the given setting.
    pub fn selector_event(&self, side: Side, setting: Setting) -> Event {
        self.space.event_where(|label| {
            let (i, j, _, _) = parse_atom_label(label).expect("labels built by atom_label");
            match side {
                Side::Left => i == setting,
                Side::Right => j == setting,
            }
        })
    }

    /// Both selectors at once: left picked `i` and right picked `j`.
    pub fn setting_event(&self, i: Setting, j: Setting) -> Event {
        self.space.event_where(|label| {
            let (li, rj, _, _) = parse_atom_label(label).expect("labels built by atom_label");
            li == i && rj == j
        })
    }

    /// `<A(i), B(j)>` over the whole space, selector events included.
    pub fn unconditional_correlation(&self, i: Setting, j: Setting) -> f64 {
        self.space
            .correlation(self.observable_left(i), self.observable_right(j))
            .expect("observables are defined on every atom")
    }

    /// The CHSH combination of the unconditional correlations. Bounded by 1
    /// in absolute value because each term is at most `P(i, j)`.
    pub fn classical_s(&self) -> f64 {
        chsh_s(&self.space, &self.a[0], &self.a[1], &self.b[0], &self.b[1])
            .expect("observables are within [-1, 1] by construction")
    }

    /// `C_ij` by Bayes conditioning on the selector events. `None` when the
    /// setting pair has probability zero.
    pub fn conditional_correlation(&self, i: Setting, j: Setting) -> Option<f64> {
        let event = self.setting_event(i, j);
        let product = self.observable_left(i).product(self.observable_right(j));
        match self.space.conditional_expectation(&product, &event) {
            Ok(value) => Some(value),
            Err(ProbError::ZeroProbabilityCondition) => None,
            Err(other) => unreachable!("conditioning on selector events: {other}"),
        }
    }

    /// The CHSH combination of the conditional correlations; bounded by 4 in
    /// absolute value. `None` when any setting pair has probability zero.
    pub fn conditional_s(&self) -> Option<f64> {
        let mut total = 0.0;
        for i in Setting::ALL {
            for j in Setting::ALL {
                total += CHSH_SIGNS[i.index()][j.index()] * self.conditional_correlation(i, j)?;
            }
        }
        Some(total)
    }

    /// Largest discrepancy, over setting pairs of positive probability,
    /// between the three routes to `C_ij`: conditioning, the ratio
    /// `<A, B> / P(i, j)`, and the direct table sum.
    pub fn identity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in Setting::ALL {
            for j in Setting::ALL {
                let p = self.settings.prob(i, j);
                if p == 0.0 {
                    continue;
                }
                let by_conditioning = self
                    .conditional_correlation(i, j)
                    .expect("positive-probability setting pair");
                let by_ratio = self.unconditional_correlation(i, j) / p;
                let by_table = self.table.block_correlation(i, j);
                worst = worst
                    .max((by_conditioning - by_table).abs())
                    .max((by_ratio - by_table).abs())
                    .max((by_conditioning - by_ratio).abs());
            }
        }
        worst
    }

    /// Rebuilds the space as an explicit mixture of the four fixed-settings
    /// experiments and checks it assigns every atom the same weight. Returns
    /// the largest weight discrepancy.
    pub fn mixture_residual(&self) -> Result<f64, ChshError> {
        let mut contexts = Vec::with_capacity(4);
        let mut selection = Vec::with_capacity(4);
        for i in Setting::ALL {
            for j in Setting::ALL {
                let mut atoms = Vec::with_capacity(4);
                let mut weights = Vec::with_capacity(4);
                for e in Outcome::ALL {
                    for ep in Outcome::ALL {
                        atoms.push(atom_label(i, j, e, ep));
                        weights.push(self.table.prob(i, j, e, ep));
                    }
                }
                contexts.push(ProbabilitySpace::new(atoms, weights)?);
                selection.push(self.settings.prob(i, j));
            }
        }
        let mixed = mixture(&contexts, &selection)?;
        let mut worst: f64 = 0.0;
        for (context, label) in mixed.atoms().iter().map(|tagged| {
            let (context, label) = tagged.split_once(':').expect("mixture tags every label");
            (context, label)
        }) {
            let mixed_weight = mixed
                .weight_of(&format!("{context}:{label}"))
                .expect("atom taken from the mixed space");
            let direct_weight = self
                .space
                .weight_of(label)
                .expect("contexts enumerate the same atoms");
            worst = worst.max((mixed_weight - direct_weight).abs());
        }
        Ok(worst)
    }

    pub fn report(&self) -> ChshReport {
        let mut setting_probs = [0.0; 4];
        let mut unconditional = [0.0; 4];
        let mut conditional = [None; 4];
        for i in Setting::ALL {
            for j in Setting::ALL {
                let cell = i.index() * 2 + j.index();
                setting_probs[cell] = self.settings.prob(i, j);
                unconditional[cell] = self.unconditional_correlation(i, j);
                conditional[cell] = self.conditional_correlation(i, j);
            }
        }
        let s_classical = self.classical_s();
        let s_conditional = self.conditional_s();
        ChshReport {
            setting_probs,
            unconditional,
            s_classical,
            conditional,
            s_conditional,
            identity_residual: self.identity_residual(),
            s_classical_within_bound: s_classical.abs() <= 1.0 + BOUND_TOL,
            s_conditional_within_bound: s_conditional.map(|s| s.abs() <= 4.0 + BOUND_TOL),
        }
    }
}

fn parse_atom_label(label: &str) -> Option<(Setting, Setting, Outcome, Outcome)> {
    let inner = label.strip_prefix('(')?.strip_suffix(')')?;
    let mut coords = [0i8; 4];
    let mut parts = inner.split(',');
    for coord in &mut coords {
        *coord = match parts.next()? {
            "+1" => 1,
            "-1" => -1,
            "0" => 0,
            _ => return None,
        };
    }
    if parts.next().is_some() {
        return None;
    }
    let (i, e) = match (coords[0], coords[1]) {
        (e, 0) if e != 0 => (Setting::One, e),
        (0, e) if e != 0 => (Setting::Two, e),
        _ => return None,
    };
    let (j, ep) = match (coords[2], coords[3]) {
        (ep, 0) if ep != 0 => (Setting::One, ep),
        (0, ep) if ep != 0 => (Setting::Two, ep),
        _ => return None,
    };
    Some((i, j, Outcome::from_value(e)?, Outcome::from_value(ep)?))
}

/// Everything the embedding computes for one table and setting distribution.
///
/// Cells are row-major over setting pairs: `(1,1), (1,2), (2,1), (2,2)`.
/// Conditional entries are `None` for setting pairs of probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshReport {
    pub setting_probs: [f64; 4],
    pub unconditional: [f64; 4],
    pub s_classical: f64,
    pub conditional: [Option<f64>; 4],
    pub s_conditional: Option<f64>,
    pub identity_residual: f64,
    pub s_classical_within_bound: bool,
    pub s_conditional_within_bound: Option<bool>,
}
