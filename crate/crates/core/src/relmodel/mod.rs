//! Monte Carlo version of the frame-relational model.
//!
//! Each run fixes the friends' internal outcomes `A_I`, `C_I` first. The
//! superobservers' choices then decide which external pair is sampled from
//! its Born table. On an `Ask` wing the frame relation is revealed as
//! `A_R = A_E × A_I`; on a `Super` wing it never comes into existence.
//!
//! Batches use one ChaCha8 stream per trial: the generator is seeded from
//! the batch seed and positioned on stream `trial index`. Trials are
//! therefore independent of how a batch is split into shards.

mod audit;
mod record;
mod rovelli;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scenarios::{lf_born_tables, BornTable, LFConfig, ScenarioError};
use crate::{Choice, PairId, Sign};

pub use audit::{
    check_choice_independence, check_no_signalling, empirical_pair_table, internal_joint, observed_fidelity,
    presence_audit, summarize, BatchSummary, Comparison, IndependenceReport, NoSignallingReport, PairFidelity,
    PairSummary, PresenceAudit, WingIndependence,
};
pub use record::{Observable, RecordViolation, RunRecord};
pub use rovelli::{rovelli_batch, rovelli_run, RovelliRecord, RovelliRunner};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelModelError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid choice policy: {0}")]
    InvalidPolicy(String),
    #[error("a batch needs at least one trial")]
    EmptyBatch,
    #[error("no run carries both {0} and {1}")]
    NoQualifyingRuns(Observable, Observable),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

/// The model at a fixed angle configuration, with its Born tables cached.
#[derive(Debug, Clone)]
pub struct RelModel {
    cfg: LFConfig,
    born: [BornTable; 4],
}

impl RelModel {
    pub fn new(cfg: LFConfig) -> Result<Self, RelModelError> {
        Ok(RelModel { cfg, born: lf_born_tables(&cfg)? })
    }

    pub fn config(&self) -> &LFConfig {
        &self.cfg
    }

    pub fn born_tables(&self) -> &[BornTable; 4] {
        &self.born
    }

    pub fn run_trial<R: Rng + ?Sized>(&self, b_choice: Choice, d_choice: Choice, rng: &mut R) -> RunRecord {
        let a_internal = Sign::from_bool(rng.random());
        let c_internal = Sign::from_bool(rng.random());
        let pair = PairId::from_choices(b_choice, d_choice);
        let (x, y) = sample_cell(&self.born[pair.index()], rng.random());

        let mut r = RunRecord {
            a_internal,
            c_internal,
            b_choice,
            d_choice,
            b_outcome: None,
            d_outcome: None,
            a_external: None,
            c_external: None,
            a_relation: None,
            c_relation: None,
        };
        match b_choice {
            Choice::Ask => {
                r.a_external = Some(x);
                r.a_relation = Some(x * a_internal);
            }
            Choice::Super => r.b_outcome = Some(x),
        }
        match d_choice {
            Choice::Ask => {
                r.c_external = Some(y);
                r.c_relation = Some(y * c_internal);
            }
            Choice::Super => r.d_outcome = Some(y),
        }
        r
    }
}

/// Picks a cell of a 2×2 table by inverse CDF; zero cells are skipped.
fn sample_cell(t: &BornTable, u: f64) -> (Sign, Sign) {
    let mut acc = 0.0;
    let mut last = (Sign::Plus, Sign::Plus);
    for x in Sign::BOTH {
        for y in Sign::BOTH {
            let p = t[x.index()][y.index()];
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = (x, y);
            if u < acc {
                return last;
            }
        }
    }
    last
}

/// Single trial from a configuration. Prefer [`RelModel`] for many trials.
pub fn run_trial<R: Rng + ?Sized>(
    cfg: &LFConfig,
    b_choice: Choice,
    d_choice: Choice,
    rng: &mut R,
) -> Result<RunRecord, RelModelError> {
    Ok(RelModel::new(*cfg)?.run_trial(b_choice, d_choice, rng))
}

/// Probabilities of the four choice pairs, indexed by [`PairId::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoicePolicy {
    probs: [f64; 4],
}

impl ChoicePolicy {
    pub fn new(probs: [f64; 4]) -> Result<Self, RelModelError> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(RelModelError::InvalidPolicy("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(RelModelError::InvalidPolicy(format!("probabilities sum to {total}")));
        }
        Ok(ChoicePolicy { probs })
    }

    pub fn uniform() -> Self {
        ChoicePolicy { probs: [0.25; 4] }
    }

    /// All weight on one choice pair.
    pub fn only(p: PairId) -> Self {
        let mut probs = [0.0; 4];
        probs[p.index()] = 1.0;
        ChoicePolicy { probs }
    }

    pub fn probs(&self) -> &[f64; 4] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PairId {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = None;
        for p in PairId::ALL {
            if self.probs[p.index()] <= 0.0 {
                continue;
            }
            acc += self.probs[p.index()];
            last = Some(p);
            if u < acc {
                return p;
            }
        }
        last.expect("policy has positive mass")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub config: LFConfig,
    pub records: Vec<RunRecord>,
    pub seed: u64,
}

impl TrialBatch {
    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn records_from_jsonl(text: &str) -> Result<Vec<RunRecord>, serde_json::Error> {
        text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
    }
}

/// Generator for trial `index` of a batch seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_range(model: &RelModel, policy: &ChoicePolicy, seed: u64, range: std::ops::Range<u64>) -> Vec<RunRecord> {
    range
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let pair = policy.sample(&mut rng);
            model.run_trial(pair.alice(), pair.chidi(), &mut rng)
        })
        .collect()
}

/// `n` trials split into `shards` contiguous ranges run in parallel. The
/// result does not depend on `shards`.
pub fn simulate_batch_sharded(
    cfg: &LFConfig,
    policy: &ChoicePolicy,
    n: u64,
    seed: u64,
    shards: usize,
) -> Result<TrialBatch, RelModelError> {
    if n == 0 {
        return Err(RelModelError::EmptyBatch);
    }
    let model = RelModel::new(*cfg)?;
    let shards = shards.clamp(1, n as usize) as u64;
    let per = n.div_ceil(shards);
    let records = (0..shards)
        .into_par_iter()
        .map(|k| run_range(&model, policy, seed, (k * per).min(n)..((k + 1) * per).min(n)))
        .collect::<Vec<_>>()
        .concat();
    Ok(TrialBatch { config: *cfg, records, seed })
}

/// `n` independent trials with choices drawn from `policy`, reproducible
/// from `seed`.
pub fn simulate_batch(cfg: &LFConfig, policy: &ChoicePolicy, n: u64, seed: u64) -> Result<TrialBatch, RelModelError> {
    simulate_batch_sharded(cfg, policy, n, seed, rayon::current_num_threads())
}
