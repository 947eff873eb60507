use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Observable, RecordViolation, RelModelError, RunRecord, TrialBatch};
use crate::scenarios::BornTable;
use crate::statlab::{
    chsh_estimate, correlation_estimate, EmpiricalDist, Estimate, PairCounts, Probabilities, ToleranceReport,
};
use crate::{Choice, PairId, Sign, Wing};

/// Frequencies of `(x, y)` over runs where both exist.
pub fn empirical_pair_table(batch: &TrialBatch, x: Observable, y: Observable) -> Result<PairCounts, RelModelError> {
    let mut t = PairCounts::default();
    for r in &batch.records {
        if let (Some(a), Some(b)) = (r.value(x), r.value(y)) {
            t.add(a, b);
        }
    }
    if t.total() == 0 {
        return Err(RelModelError::NoQualifyingRuns(x, y));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresenceAudit {
    pub runs: u64,
    pub presence_violations: u64,
    pub product_violations: u64,
    pub pass: bool,
}

pub fn presence_audit(records: &[RunRecord]) -> PresenceAudit {
    let (mut presence, mut product) = (0, 0);
    for r in records {
        match r.check() {
            Ok(()) => {}
            Err(RecordViolation::Presence(_)) => presence += 1,
            Err(RecordViolation::Product(_)) => product += 1,
        }
    }
    PresenceAudit {
        runs: records.len() as u64,
        presence_violations: presence,
        product_violations: product,
        pass: presence == 0 && product == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFidelity {
    pub pair: PairId,
    pub variables: (Observable, Observable),
    pub counts: PairCounts,
    pub report: ToleranceReport,
}

/// TV distance between each choice pair's observed table and its Born table.
pub fn observed_fidelity(
    batch: &TrialBatch,
    born: &[BornTable; 4],
    threshold: f64,
) -> Result<Vec<PairFidelity>, RelModelError> {
    PairId::ALL
        .into_iter()
        .map(|p| {
            let (x, y) = Observable::observed_pair(p);
            let counts = empirical_pair_table(batch, x, y)?;
            let dist = counts.to_dist().expect("non-empty table");
            let report = ToleranceReport::tv(
                &dist.probabilities(),
                &Probabilities::from_table(&born[p.index()]),
                threshold,
                counts.total(),
            )
            .expect("same 2x2 support");
            Ok(PairFidelity { pair: p, variables: (x, y), counts, report })
        })
        .collect()
}

fn sign_label(s: Option<Sign>) -> &'static str {
    s.map_or("null", Sign::label)
}

/// Joint frequencies of `(A_I, B or null, C_I, D or null)`; labels join the
/// four values with `/`.
pub fn internal_joint(batch: &TrialBatch) -> Result<EmpiricalDist, RelModelError> {
    let opt = [Some(Sign::Plus), Some(Sign::Minus), None];
    let mut support = Vec::new();
    for ai in Sign::BOTH {
        for b in opt {
            for ci in Sign::BOTH {
                for d in opt {
                    support.push(format!("{}/{}/{}/{}", ai.label(), sign_label(b), ci.label(), sign_label(d)));
                }
            }
        }
    }
    let labels: Vec<String> = batch
        .records
        .iter()
        .map(|r| {
            format!(
                "{}/{}/{}/{}",
                r.a_internal.label(),
                sign_label(r.b_outcome),
                r.c_internal.label(),
                sign_label(r.d_outcome)
            )
        })
        .collect();
    let refs: Vec<&str> = support.iter().map(String::as_str).collect();
    EmpiricalDist::from_samples(&refs, labels.iter().map(String::as_str))
        .map_err(|e| RelModelError::InsufficientData(e.to_string()))
}

/// Two groups' `P(+1)` compared against a 3σ pooled binomial band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    pub n: [u64; 2],
    pub p_plus: [f64; 2],
    /// Total-variation distance of the two conditional distributions.
    pub tv: f64,
    pub band: f64,
    pub flagged: bool,
}

fn compare(first: String, second: String, g1: (u64, u64), g2: (u64, u64)) -> Comparison {
    let ((n1, k1), (n2, k2)) = (g1, g2);
    let (p1, p2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    let pooled = (k1 + k2) as f64 / (n1 + n2) as f64;
    let band = 3.0 * (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let tv = (p1 - p2).abs();
    Comparison { first, second, n: [n1, n2], p_plus: [p1, p2], tv, band, flagged: tv > band }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WingIndependence {
    pub wing: Wing,
    pub variable: Observable,
    pub comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub wings: Vec<WingIndependence>,
    pub flagged: bool,
}

/// Compares the distribution of each internal outcome across every two
/// represented choice pairs.
pub fn check_choice_independence(batch: &TrialBatch) -> Result<IndependenceReport, RelModelError> {
    let mut wings = Vec::new();
    for (wing, var) in [(Wing::Alice, Observable::AI), (Wing::Chidi, Observable::CI)] {
        // (runs, runs with +1) per choice pair
        let mut groups = [(0u64, 0u64); 4];
        for r in &batch.records {
            let g = &mut groups[r.pair().index()];
            g.0 += 1;
            g.1 += u64::from(r.value(var) == Some(Sign::Plus));
        }
        let present: Vec<PairId> = PairId::ALL.into_iter().filter(|p| groups[p.index()].0 > 0).collect();
        if present.len() < 2 {
            return Err(RelModelError::InsufficientData(format!(
                "{} choice pair(s) represented, need 2",
                present.len()
            )));
        }
        let mut comparisons = Vec::new();
        for (i, p) in present.iter().enumerate() {
            for q in &present[i + 1..] {
                comparisons.push(compare(p.to_string(), q.to_string(), groups[p.index()], groups[q.index()]));
            }
        }
        wings.push(WingIndependence { wing, variable: var, comparisons });
    }
    let flagged = wings.iter().flat_map(|w| &w.comparisons).any(|c| c.flagged);
    Ok(IndependenceReport { wings, flagged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignallingReport {
    pub checks: Vec<Comparison>,
    pub flagged: bool,
}

/// Each wing's observed marginal against the other wing's choice.
pub fn check_no_signalling(batch: &TrialBatch) -> Result<NoSignallingReport, RelModelError> {
    let mut checks = Vec::new();
    for var in [Observable::AE, Observable::B, Observable::CE, Observable::D] {
        let other = |r: &RunRecord| match var {
            Observable::AE | Observable::B => r.d_choice,
            _ => r.b_choice,
        };
        let mut groups = [(0u64, 0u64); 2];
        for r in &batch.records {
            if let Some(v) = r.value(var) {
                let g = &mut groups[usize::from(other(r) == Choice::Super)];
                g.0 += 1;
                g.1 += u64::from(v == Sign::Plus);
            }
        }
        if groups.iter().any(|g| g.0 == 0) {
            return Err(RelModelError::InsufficientData(format!(
                "{var} is missing under one of the other wing's choices"
            )));
        }
        let name = |c: Choice| format!("{var} | other={c}");
        checks.push(compare(name(Choice::Ask), name(Choice::Super), groups[0], groups[1]));
    }
    let flagged = checks.iter().any(|c| c.flagged);
    Ok(NoSignallingReport { checks, flagged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub variables: (Observable, Observable),
    pub counts: PairCounts,
    pub correlation: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub trials: u64,
    pub pair_tables: BTreeMap<PairId, PairSummary>,
    pub chsh_estimate: f64,
    pub stderr: f64,
    pub flags: Vec<String>,
}

/// Observed pair tables, the CHSH estimate and every raised flag.
pub fn summarize(
    batch: &TrialBatch,
    born: &[BornTable; 4],
    fidelity_threshold: f64,
) -> Result<BatchSummary, RelModelError> {
    let fidelity = observed_fidelity(batch, born, fidelity_threshold)?;
    let mut flags = Vec::new();
    let audit = presence_audit(&batch.records);
    if !audit.pass {
        flags.push(format!(
            "record audit: {} presence and {} product violations",
            audit.presence_violations, audit.product_violations
        ));
    }
    let mut pair_tables = BTreeMap::new();
    for f in &fidelity {
        if !f.report.pass {
            flags.push(format!("fidelity {}: TV {:.4} > {}", f.pair, f.report.observed, f.report.threshold));
        }
        let correlation = correlation_estimate(&f.counts).expect("non-empty table");
        pair_tables.insert(f.pair, PairSummary { variables: f.variables, counts: f.counts, correlation });
    }
    for c in check_choice_independence(batch)?.wings.iter().flat_map(|w| &w.comparisons).filter(|c| c.flagged) {
        flags.push(format!("choice dependence: {} vs {}", c.first, c.second));
    }
    for c in check_no_signalling(batch)?.checks.iter().filter(|c| c.flagged) {
        flags.push(format!("signalling: {} vs {}", c.first, c.second));
    }
    let tables = PairId::CHSH_ORDER.map(|p| fidelity[p.index()].counts);
    let s = chsh_estimate(&tables).expect("non-empty tables");
    Ok(BatchSummary {
        trials: batch.records.len() as u64,
        pair_tables,
        chsh_estimate: s.value,
        stderr: s.stderr,
        flags,
    })
}
