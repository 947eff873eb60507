use std::path::Path;

use ewf_core::polytope::{feasible_joint_4, FeasibilityVerdict, PairTargets};
use ewf_core::relmodel::{
    check_choice_independence, check_no_signalling, empirical_pair_table, internal_joint, observed_fidelity,
    presence_audit, simulate_batch, summarize, BatchSummary, ChoicePolicy, IndependenceReport, NoSignallingReport,
    Observable, PairFidelity, PresenceAudit, RelModel, TrialBatch,
};
use ewf_core::scenarios::LFConfig;
use ewf_core::statlab::{PairCounts, ToleranceReport};
use ewf_core::{PairId, Sign};
use serde::{Deserialize, Serialize};

use super::lf::{FIDELITY_TV, MIN_TRIALS};
use crate::output::{columns, csv_text, pass_word, write_text, CliError, Outcome, Status};

pub const INTERNAL_CELL_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalJoint {
    /// `(A_I, C_I)` counts.
    pub counts: PairCounts,
    /// Largest `|cell − 1/4|`.
    pub check: ToleranceReport,
    /// Runs covered by the `(A_I, B|null, C_I, D|null)` table.
    pub full_table_total: u64,
    pub full_table_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelmodelReport {
    pub angles: LFConfig,
    pub trials: u64,
    pub seed: u64,
    pub presence: PresenceAudit,
    pub fidelity: Vec<PairFidelity>,
    pub choice_independence: IndependenceReport,
    pub no_signalling: NoSignallingReport,
    pub internal_joint: InternalJoint,
    /// Joint-distribution verdict on the analytic Born targets.
    pub analytic_targets: FeasibilityVerdict,
    pub summary: BatchSummary,
    pub pass: bool,
}

/// Breaks the presence discipline on one run and the product identity on
/// another.
fn plant_violation(batch: &mut TrialBatch) {
    if let Some(r) = batch.records.iter_mut().find(|r| r.pair() == PairId::BD) {
        r.a_external = r.b_outcome;
    }
    if let Some(r) = batch.records.iter_mut().find(|r| r.pair() == PairId::AC) {
        r.c_relation = r.c_relation.map(|s| -s);
    }
}

pub fn evaluate(
    angles: LFConfig,
    trials: u64,
    seed: u64,
    plant: bool,
    records: Option<&Path>,
) -> Result<RelmodelReport, CliError> {
    if trials < MIN_TRIALS {
        return Err(CliError::Input(format!("relmodel needs at least {MIN_TRIALS} trials, got {trials}")));
    }
    let model = RelModel::new(angles).map_err(CliError::internal)?;
    let born = *model.born_tables();
    let mut batch = simulate_batch(&angles, &ChoicePolicy::uniform(), trials, seed).map_err(CliError::internal)?;
    if plant {
        plant_violation(&mut batch);
    }
    if let Some(path) = records {
        write_text(path, &batch.to_jsonl())?;
    }
    let data = |e: ewf_core::relmodel::RelModelError| CliError::Input(format!("{e}; increase --trials"));

    let presence = presence_audit(&batch.records);
    let fidelity = observed_fidelity(&batch, &born, FIDELITY_TV).map_err(data)?;
    let choice_independence = check_choice_independence(&batch).map_err(data)?;
    let no_signalling = check_no_signalling(&batch).map_err(data)?;
    let counts = empirical_pair_table(&batch, Observable::AI, Observable::CI).map_err(data)?;
    let freq = counts.frequencies().expect("non-empty");
    let worst = freq.iter().flatten().map(|f| (f - 0.25).abs()).fold(0.0, f64::max);
    let full = internal_joint(&batch).map_err(data)?;
    let internal = InternalJoint {
        counts,
        check: ToleranceReport::new(ewf_core::statlab::Metric::AbsDiff, worst, INTERNAL_CELL_TOLERANCE, counts.total()),
        full_table_total: full.total(),
        full_table_cells: full.support().len(),
    };
    let analytic = PairTargets::from_born_tables(&born).map_err(CliError::internal)?;
    let summary = summarize(&batch, &born, FIDELITY_TV).map_err(data)?;

    let pass = presence.pass
        && fidelity.iter().all(|f| f.report.pass)
        && !choice_independence.flagged
        && !no_signalling.flagged
        && internal.check.pass
        && internal.full_table_total == trials;
    let report = RelmodelReport {
        angles,
        trials,
        seed,
        presence,
        fidelity,
        choice_independence,
        no_signalling,
        internal_joint: internal,
        analytic_targets: feasible_joint_4(&analytic),
        summary,
        pass,
    };
    Ok(report)
}

pub fn run(angles: LFConfig, trials: u64, seed: u64, plant: bool, records: Option<&Path>) -> Result<Outcome, CliError> {
    let report = evaluate(angles, trials, seed, plant, records)?;
    let pass = report.pass;
    let table = render(&report);
    let csv = Some(fidelity_csv(&report.fidelity));
    Ok(Outcome::new(Status::from_pass(pass), &report, table, csv))
}

fn render(r: &RelmodelReport) -> String {
    let mut out = format!("frame-relational model: {} trials, seed {}\n\n", r.trials, r.seed);
    out.push_str(&format!(
        "record audit: {} presence violations, {} product violations  {}\n\n",
        r.presence.presence_violations,
        r.presence.product_violations,
        pass_word(r.presence.pass)
    ));
    let mut rows = vec![["pair", "observed", "n", "TV", "check"].map(String::from).to_vec()];
    for f in &r.fidelity {
        rows.push(vec![
            f.pair.to_string(),
            format!("{},{}", f.variables.0, f.variables.1),
            f.counts.total().to_string(),
            format!("{:.4}", f.report.observed),
            pass_word(f.report.pass).into(),
        ]);
    }
    out.push_str(&columns(&rows));
    let flagged = |b: bool| if b { "FLAGGED" } else { "no flag" };
    out.push_str(&format!("\nchoice independence: {}\n", flagged(r.choice_independence.flagged)));
    out.push_str(&format!("no-signalling:       {}\n", flagged(r.no_signalling.flagged)));
    let f = r.internal_joint.counts.frequencies().expect("non-empty");
    out.push_str("\ninternal joint (A_I, C_I):\n");
    for x in Sign::BOTH {
        out.push_str(&format!(
            "  {}  {:.4}  {:.4}\n",
            x.label(),
            f[x.index()][Sign::Plus.index()],
            f[x.index()][Sign::Minus.index()]
        ));
    }
    out.push_str(&format!(
        "  max |cell - 1/4| = {:.4}  {}\n",
        r.internal_joint.check.observed,
        pass_word(r.internal_joint.check.pass)
    ));
    out.push_str(&format!(
        "\njoint distribution for the analytic targets: {}\n",
        if r.analytic_targets.feasible { "exists" } else { "does not exist" }
    ));
    out.push_str(&format!("CHSH estimate: {:.4} +/- {:.4}\n", r.summary.chsh_estimate, r.summary.stderr));
    out.push_str(&format!("\n{}\n", pass_word(r.pass)));
    out
}

#[derive(Serialize)]
struct CountRow {
    pair: PairId,
    first: Observable,
    second: Observable,
    x: &'static str,
    y: &'static str,
    count: u64,
}

fn fidelity_csv(f: &[PairFidelity]) -> String {
    let mut rows = Vec::new();
    for p in f {
        for x in Sign::BOTH {
            for y in Sign::BOTH {
                rows.push(CountRow {
                    pair: p.pair,
                    first: p.variables.0,
                    second: p.variables.1,
                    x: x.label(),
                    y: y.label(),
                    count: p.counts.counts[x.index()][y.index()],
                });
            }
        }
    }
    csv_text(rows)
}
