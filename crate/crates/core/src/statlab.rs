//! Frequency tables, distances and correlation estimators.

use serde::{Deserialize, Serialize};

use crate::scenarios::BornTable;
use crate::Sign;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatError {
    #[error("supports differ")]
    SupportMismatch,
    #[error("empty table")]
    Empty,
    #[error("{support} labels but {counts} counts")]
    LengthMismatch { support: usize, counts: usize },
    #[error("probabilities must be finite and non-negative")]
    BadProbability,
}

/// Counts over a labelled support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalDist {
    support: Vec<String>,
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalDist {
    pub fn new(support: Vec<String>, counts: Vec<u64>) -> Result<Self, StatError> {
        if support.len() != counts.len() {
            return Err(StatError::LengthMismatch { support: support.len(), counts: counts.len() });
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(StatError::Empty);
        }
        Ok(EmpiricalDist { support, counts, total })
    }

    /// Tallies `samples` over `support`; unknown labels are an error.
    pub fn from_samples<'a>(support: &[&str], samples: impl IntoIterator<Item = &'a str>) -> Result<Self, StatError> {
        let mut counts = vec![0; support.len()];
        for s in samples {
            let k = support.iter().position(|l| *l == s).ok_or(StatError::SupportMismatch)?;
            counts[k] += 1;
        }
        EmpiricalDist::new(support.iter().map(|s| s.to_string()).collect(), counts)
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, label: &str) -> Option<u64> {
        self.support.iter().position(|l| l == label).map(|k| self.counts[k])
    }

    pub fn probabilities(&self) -> Probabilities {
        Probabilities {
            support: self.support.clone(),
            probs: self.counts.iter().map(|&c| c as f64 / self.total as f64).collect(),
        }
    }
}

/// An exact (or estimated) probability vector over labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probabilities {
    pub support: Vec<String>,
    pub probs: Vec<f64>,
}

impl Probabilities {
    pub fn new(support: Vec<String>, probs: Vec<f64>) -> Result<Self, StatError> {
        if support.len() != probs.len() {
            return Err(StatError::LengthMismatch { support: support.len(), counts: probs.len() });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(StatError::BadProbability);
        }
        Ok(Probabilities { support, probs })
    }

    /// Cells of a 2×2 outcome table, labelled `++`, `+-`, `-+`, `--`.
    pub fn from_table(t: &BornTable) -> Self {
        Probabilities { support: PairCounts::labels(), probs: t.iter().flatten().copied().collect() }
    }
}

/// Half the L1 distance between two distributions on the same support.
pub fn total_variation(p: &Probabilities, q: &Probabilities) -> Result<f64, StatError> {
    if p.support != q.support {
        return Err(StatError::SupportMismatch);
    }
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Counts of a pair of ±1 outcomes, `counts[x][y]` with index 0 = `+1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub counts: [[u64; 2]; 2],
}

impl PairCounts {
    fn labels() -> Vec<String> {
        ["++", "+-", "-+", "--"].map(String::from).to_vec()
    }

    pub fn from_counts(counts: [[u64; 2]; 2]) -> Self {
        PairCounts { counts }
    }

    pub fn add(&mut self, x: Sign, y: Sign) {
        self.counts[x.index()][y.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn frequencies(&self) -> Option<[[f64; 2]; 2]> {
        let n = self.total();
        (n > 0).then(|| self.counts.map(|row| row.map(|c| c as f64 / n as f64)))
    }

    pub fn to_dist(&self) -> Result<EmpiricalDist, StatError> {
        EmpiricalDist::new(Self::labels(), self.counts.iter().flatten().copied().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// `E = (n₊₊ + n₋₋ − n₊₋ − n₋₊)/n` with `stderr = √((1 − E²)/n)`.
pub fn correlation_estimate(t: &PairCounts) -> Result<Estimate, StatError> {
    let n = t.total();
    if n == 0 {
        return Err(StatError::Empty);
    }
    let c = &t.counts;
    let same = (c[0][0] + c[1][1]) as f64;
    let diff = (c[0][1] + c[1][0]) as f64;
    let e = (same - diff) / n as f64;
    Ok(Estimate { value: e, stderr: ((1.0 - e * e).max(0.0) / n as f64).sqrt() })
}

/// `S = E_AC + E_BC + E_BD − E_AD` from tables in that order; component
/// errors added in quadrature.
pub fn chsh_estimate(tables: &[PairCounts; 4]) -> Result<Estimate, StatError> {
    let mut s = 0.0;
    let mut var = 0.0;
    for (k, t) in tables.iter().enumerate() {
        let e = correlation_estimate(t)?;
        s += if k == 3 { -e.value } else { e.value };
        var += e.stderr * e.stderr;
    }
    Ok(Estimate { value: s, stderr: var.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "TV")]
    Tv,
    #[serde(rename = "abs-diff")]
    AbsDiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub metric: Metric,
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n: u64,
}

impl ToleranceReport {
    pub fn new(metric: Metric, observed: f64, threshold: f64, n: u64) -> Self {
        ToleranceReport { metric, observed, threshold, pass: observed <= threshold, n }
    }

    pub fn tv(p: &Probabilities, q: &Probabilities, threshold: f64, n: u64) -> Result<Self, StatError> {
        Ok(Self::new(Metric::Tv, total_variation(p, q)?, threshold, n))
    }

    pub fn abs_diff(observed: f64, expected: f64, threshold: f64, n: u64) -> Self {
        Self::new(Metric::AbsDiff, (observed - expected).abs(), threshold, n)
    }
}
