use ewf_core::hilbert::{expectation, Operator};
use ewf_core::relmodel::rovelli_batch;
use ewf_core::scenarios::{
    build_rovelli_states, check_rovelli_structure, interference_witness, names, orientation_branches,
    record_distribution, rovelli_record_labels, RovelliConfig, RovelliKind,
};
use ewf_core::Sign;
use serde::{Deserialize, Serialize};

use crate::output::{columns, pass_word, CliError, Outcome, Status};

pub const WITNESS_TOLERANCE: f64 = 1e-10;
pub const PROJECTOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RovelliState {
    pub kind: RovelliKind,
    pub record: String,
    pub interference_witness: f64,
    /// Expectation of each record projector.
    pub record_expectations: Vec<(String, f64)>,
    /// `⟨σ_z⟩` of the external spin.
    pub spin_expectation: f64,
    pub structure_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RovelliRuns {
    pub trials: u64,
    pub performed_second: u64,
    pub asked: u64,
    pub consistent: u64,
    pub consistency_rate: f64,
    /// Second measurement performed exactly on runs whose first outcome was
    /// the trigger.
    pub second_iff_trigger: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RovelliReport {
    pub trigger: Sign,
    pub seed: u64,
    pub states: Vec<RovelliState>,
    pub runs: RovelliRuns,
    pub pass: bool,
}

pub fn evaluate(cfg: RovelliConfig, trials: u64, seed: u64) -> Result<RovelliReport, CliError> {
    let labels = rovelli_record_labels(cfg.trigger);
    let states = build_rovelli_states(&cfg).map_err(CliError::internal)?;
    let z = Operator::pauli_z(names::S).map_err(CliError::internal)?;
    let mut out = Vec::new();
    for (kind, s) in RovelliKind::ALL.into_iter().zip(&states) {
        let (b0, b1) = orientation_branches(s, names::A_ORIENT).map_err(CliError::internal)?;
        let witness = interference_witness(s, &b0, &b1).map_err(CliError::internal)?;
        let record_expectations = record_distribution(s, names::A_RECORD, &labels).map_err(CliError::internal)?;
        let projectors_exact = record_expectations.iter().enumerate().all(|(k, (_, p))| {
            let want = if k == kind.record_digit() { 1.0 } else { 0.0 };
            (p - want).abs() <= PROJECTOR_TOLERANCE
        });
        let structure_ok = check_rovelli_structure(s, cfg.trigger).is_ok();
        out.push(RovelliState {
            kind,
            record: labels[kind.record_digit()].to_string(),
            interference_witness: witness,
            record_expectations,
            spin_expectation: expectation(s, &z).map_err(CliError::internal)?,
            structure_ok,
            pass: structure_ok && projectors_exact && (witness - 1.0).abs() <= WITNESS_TOLERANCE,
        });
    }

    let records = rovelli_batch(&cfg, trials, seed).map_err(CliError::internal)?;
    let consistent = records.iter().filter(|r| r.report_consistent).count() as u64;
    let runs = RovelliRuns {
        trials,
        performed_second: records.iter().filter(|r| r.performed_second).count() as u64,
        asked: records.iter().filter(|r| r.asked_record.is_some()).count() as u64,
        consistent,
        consistency_rate: consistent as f64 / trials as f64,
        second_iff_trigger: records.iter().all(|r| r.performed_second == (r.first == cfg.trigger)),
    };
    let pass = out.iter().all(|s| s.pass) && consistent == trials && runs.second_iff_trigger;
    Ok(RovelliReport { trigger: cfg.trigger, seed, states: out, runs, pass })
}

pub fn run(trigger: Option<Sign>, trials: u64, seed: u64) -> Result<Outcome, CliError> {
    let cfg = RovelliConfig { trigger: trigger.unwrap_or(Sign::Plus) };
    let report = evaluate(cfg, trials, seed)?;
    let table = render(&report);
    Ok(Outcome::new(Status::from_pass(report.pass), &report, table, None))
}

fn render(r: &RovelliReport) -> String {
    let mut rows = vec![["state", "witness", "record P", "<sigma_z(S)>", "check"].map(String::from).to_vec()];
    for s in &r.states {
        let own = s.record_expectations.iter().find(|(l, _)| *l == s.record).map_or(0.0, |(_, p)| *p);
        rows.push(vec![
            s.record.clone(),
            format!("{:.10}", s.interference_witness),
            format!("{own:.10}"),
            format!("{:+.4}", s.spin_expectation),
            pass_word(s.pass).into(),
        ]);
    }
    let mut out = format!("sequential scenario, trigger {}\n", r.trigger.label());
    out.push_str(&columns(&rows));
    out.push_str(&format!(
        "\n{} runs ({} with a second measurement, {} asked): consistency rate {}\n{}\n",
        r.runs.trials,
        r.runs.performed_second,
        r.runs.asked,
        r.runs.consistency_rate,
        pass_word(r.pass)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_triggers_pass() {
        for t in Sign::BOTH {
            let r = evaluate(RovelliConfig { trigger: t }, 1_000, 3).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.runs.consistency_rate, 1.0);
        }
    }
}
