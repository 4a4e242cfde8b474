//! Monte Carlo simulation of the randomized-settings experiment, the
//! statistical estimators for its correlations, and the event-log format.
//!
//! Determinism contract: the event stream is a pure function of
//! (seed, shards, trials, config). Shard k owns a contiguous range of trial
//! indices and draws from ChaCha8 seeded with `seed` on stream number k, so
//! logs are reproducible across runs and platforms. Each trial consumes
//! exactly three uniform draws: left setting, right setting, outcome pair.

use crate::chsh::{
    ChshError, ChshReport, Outcome, PairwiseTable, Setting, SettingDistribution, CHSH_SIGNS,
};
use crate::quantum::{epr_bohm_table, PolarizationSetting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, Write};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("shards must be at least 1")]
    NoShards,
    #[error(transparent)]
    Table(#[from] ChshError),
    #[error("event log I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("event log line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Where the outcome distributions come from.
#[derive(Debug, Clone)]
pub enum CorrelationSource {
    /// Singlet correlations at four polarizer angles.
    Angles {
        theta1: PolarizationSetting,
        theta2: PolarizationSetting,
        theta1p: PolarizationSetting,
        theta2p: PolarizationSetting,
    },
    /// An explicit outcome table.
    Table(PairwiseTable),
}

impl CorrelationSource {
    pub fn table(&self) -> PairwiseTable {
        match self {
            CorrelationSource::Angles {
                theta1,
                theta2,
                theta1p,
                theta2p,
            } => epr_bohm_table(*theta1, *theta2, *theta1p, *theta2p),
            CorrelationSource::Table(table) => table.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub source: CorrelationSource,
    pub settings: SettingDistribution,
    pub trials: u64,
    pub seed: u64,
    pub shards: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if self.shards == 0 {
            return Err(SimError::NoShards);
        }
        Ok(())
    }
}

/// One trial: settings chosen on each side and the observed outcome pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRecord {
    pub t: u64,
    pub i: Setting,
    pub j: Setting,
    pub a: Outcome,
    pub b: Outcome,
}

/// Lazy, deterministic event stream; see the module docs for the sharding
/// contract.
pub struct Simulation {
    table: PairwiseTable,
    settings: SettingDistribution,
    trials: u64,
    seed: u64,
    shards: u64,
    next_shard: u64,
    t: u64,
    shard_end: u64,
    rng: ChaCha8Rng,
}

impl Simulation {
    fn shard_range(&self, shard: u64) -> (u64, u64) {
        let base = self.trials / self.shards;
        let remainder = self.trials % self.shards;
        let extra = shard.min(remainder);
        let start = shard * base + extra;
        let len = base + u64::from(shard < remainder);
        (start, start + len)
    }

    fn shard_rng(&self, shard: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(shard);
        rng
    }
}

impl Iterator for Simulation {
    type Item = EventRecord;

    fn next(&mut self) -> Option<EventRecord> {
        while self.t == self.shard_end {
            if self.next_shard == self.shards {
                return None;
            }
            let shard = self.next_shard;
            self.next_shard += 1;
            let (start, end) = self.shard_range(shard);
            self.t = start;
            self.shard_end = end;
            self.rng = self.shard_rng(shard);
        }

        let i = if self.rng.gen::<f64>() < self.settings.left(Setting::One) {
            Setting::One
        } else {
            Setting::Two
        };
        let j = if self.rng.gen::<f64>() < self.settings.right(Setting::One) {
            Setting::One
        } else {
            Setting::Two
        };
        let u: f64 = self.rng.gen();
        let mut cumulative = 0.0;
        let mut picked = (Outcome::Minus, Outcome::Minus);
        'outer: for e in Outcome::ALL {
            for ep in Outcome::ALL {
                cumulative += self.table.prob(i, j, e, ep);
                if u < cumulative {
                    picked = (e, ep);
                    break 'outer;
                }
            }
        }
        let record = EventRecord {
            t: self.t,
            i,
            j,
            a: picked.0,
            b: picked.1,
        };
        self.t += 1;
        Some(record)
    }
}

/// Validates the config and returns the deterministic event stream.
pub fn simulate(config: &SimulationConfig) -> Result<Simulation, SimError> {
    config.validate()?;
    Ok(Simulation {
        table: config.source.table(),
        settings: config.settings,
        trials: config.trials,
        seed: config.seed,
        shards: config.shards,
        next_shard: 0,
        t: 0,
        shard_end: 0,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    })
}

/// Streaming accumulator for the per-cell counts and outcome-product sums.
#[derive(Debug, Clone, Default)]
pub struct Estimator {
    counts: [u64; 4],
    product_sums: [i64; 4],
}

impl Estimator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: &EventRecord) {
        let cell = record.i.index() * 2 + record.j.index();
        self.counts[cell] += 1;
        self.product_sums[cell] += i64::from(record.a.value() * record.b.value());
    }

    /// Closes the fold. `Shat` weights cells by the configured setting
    /// probabilities and is undefined if a positive-probability cell went
    /// unobserved; `SChat` needs all four cells observed. Per-cell values for
    /// unobserved cells are `None` rather than zero.
    pub fn finish(
        &self,
        settings: &SettingDistribution,
        exact: Option<ChshReport>,
    ) -> EstimateReport {
        let mut chat = [None; 4];
        let mut stderr = [None; 4];
        for cell in 0..4 {
            if self.counts[cell] > 0 {
                let n = self.counts[cell] as f64;
                let c = self.product_sums[cell] as f64 / n;
                chat[cell] = Some(c);
                stderr[cell] = Some(((1.0 - c * c).max(0.0) / n).sqrt());
            }
        }
        let mut schat = Some(0.0);
        let mut shat = Some(0.0);
        for i in Setting::ALL {
            for j in Setting::ALL {
                let cell = i.index() * 2 + j.index();
                let sign = CHSH_SIGNS[i.index()][j.index()];
                let p = settings.prob(i, j);
                match chat[cell] {
                    Some(c) => {
                        schat = schat.map(|s| s + sign * c);
                        shat = shat.map(|s| s + sign * p * c);
                    }
                    None => {
                        schat = None;
                        if p > 0.0 {
                            shat = None;
                        }
                    }
                }
            }
        }
        EstimateReport {
            trials: self.counts.iter().sum(),
            counts: self.counts,
            chat,
            stderr,
            shat,
            schat,
            exact,
        }
    }
}

/// Empirical counterparts of the embedding quantities, cells in row-major
/// setting order (1,1), (1,2), (2,1), (2,2).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub trials: u64,
    pub counts: [u64; 4],
    /// Conditional correlation estimate per cell; `None` when unobserved.
    pub chat: [Option<f64>; 4],
    /// Standard error sqrt((1 - chat^2) / N) per cell.
    pub stderr: [Option<f64>; 4],
    /// Setting-probability-weighted combination (estimate of S).
    pub shat: Option<f64>,
    /// Plain signed combination of the chat values (estimate of S_C).
    pub schat: Option<f64>,
    /// Analytic report for the same config, attached on request.
    pub exact: Option<ChshReport>,
}

/// Folds an event stream into an [`EstimateReport`].
pub fn estimate(
    events: impl IntoIterator<Item = EventRecord>,
    settings: &SettingDistribution,
) -> EstimateReport {
    let mut estimator = Estimator::new();
    for record in events {
        estimator.push(&record);
    }
    estimator.finish(settings, None)
}

pub const EVENT_LOG_HEADER: &str = "t,i,j,a,b";

/// Writes the event log: header line then one `t,i,j,a,b` row per record,
/// LF line endings, no quoting.
pub fn write_event_log<W: Write>(
    mut w: W,
    events: impl IntoIterator<Item = EventRecord>,
) -> std::io::Result<()> {
    w.write_all(EVENT_LOG_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for record in events {
        writeln!(
            w,
            "{},{},{},{},{}",
            record.t,
            record.i.number(),
            record.j.number(),
            record.a.value(),
            record.b.value()
        )?;
    }
    w.flush()
}

/// Reads an event log produced by [`write_event_log`] (bit-exact round-trip).
pub fn read_event_log<R: BufRead>(r: R) -> Result<Vec<EventRecord>, SimError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SimError::Parse {
            line: 1,
            message: "empty file, expected header".into(),
        })??;
    if header != EVENT_LOG_HEADER {
        return Err(SimError::Parse {
            line: 1,
            message: format!("bad header `{header}`, expected `{EVENT_LOG_HEADER}`"),
        });
    }
    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        let number = k + 2;
        let parse = |err: &str| SimError::Parse {
            line: number,
            message: err.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse(&format!("expected 5 fields, got {}", fields.len())));
        }
        let t: u64 = fields[0]
            .parse()
            .map_err(|_| parse("trial index is not an unsigned integer"))?;
        let setting = |text: &str| {
            text.parse::<u8>()
                .ok()
                .and_then(Setting::from_number)
                .ok_or_else(|| parse("setting must be 1 or 2"))
        };
        let outcome = |text: &str| {
            text.trim_start_matches('+')
                .parse::<i8>()
                .ok()
                .and_then(Outcome::from_value)
                .ok_or_else(|| parse("outcome must be -1 or 1"))
        };
        records.push(EventRecord {
            t,
            i: setting(fields[1])?,
            j: setting(fields[2])?,
            a: outcome(fields[3])?,
            b: outcome(fields[4])?,
        });
    }
    Ok(records)
}
