use ewf_core::relmodel::{observed_fidelity, simulate_batch, ChoicePolicy, Observable, RelModel};
use ewf_core::scenarios::LFConfig;
use ewf_core::statlab::{chsh_estimate, correlation_estimate, Estimate, PairCounts, ToleranceReport};
use ewf_core::{PairId, Sign};
use serde::{Deserialize, Serialize};

use crate::output::{columns, csv_text, pass_word, CliError, Outcome, Status};

pub const MIN_TRIALS: u64 = 100;
pub const FIDELITY_TV: f64 = 0.02;
pub const CHSH_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfPair {
    pub pair: PairId,
    pub variables: (Observable, Observable),
    pub counts: PairCounts,
    pub born: [[f64; 2]; 2],
    pub correlation: Estimate,
    pub born_correlation: f64,
    pub fidelity: ToleranceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub estimate: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub check: ToleranceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfReport {
    pub angles: LFConfig,
    pub trials: u64,
    pub seed: u64,
    pub pairs: Vec<LfPair>,
    pub chsh: ChshReport,
    pub pass: bool,
}

fn born_correlation(t: &[[f64; 2]; 2]) -> f64 {
    t[0][0] + t[1][1] - t[0][1] - t[1][0]
}

pub fn run(angles: LFConfig, trials: u64, seed: u64) -> Result<Outcome, CliError> {
    if trials < MIN_TRIALS {
        return Err(CliError::Input(format!("lf needs at least {MIN_TRIALS} trials, got {trials}")));
    }
    let model = RelModel::new(angles).map_err(CliError::internal)?;
    let born = *model.born_tables();
    let batch = simulate_batch(&angles, &ChoicePolicy::uniform(), trials, seed).map_err(CliError::internal)?;
    let fidelity = observed_fidelity(&batch, &born, FIDELITY_TV)
        .map_err(|e| CliError::Input(format!("{e}; increase --trials")))?;

    let pairs: Vec<LfPair> = fidelity
        .into_iter()
        .map(|f| LfPair {
            pair: f.pair,
            variables: f.variables,
            counts: f.counts,
            born: born[f.pair.index()],
            correlation: correlation_estimate(&f.counts).expect("non-empty"),
            born_correlation: born_correlation(&born[f.pair.index()]),
            fidelity: f.report,
        })
        .collect();
    let s = chsh_estimate(&PairId::CHSH_ORDER.map(|p| pairs[p.index()].counts)).expect("non-empty");
    let analytic = PairId::CHSH_ORDER
        .iter()
        .enumerate()
        .map(|(k, p)| if k == 3 { -1.0 } else { 1.0 } * pairs[p.index()].born_correlation)
        .sum::<f64>();
    let check = ToleranceReport::abs_diff(s.value, analytic, CHSH_TOLERANCE, trials);
    let pass = check.pass && pairs.iter().all(|p| p.fidelity.pass);
    let report = LfReport {
        angles,
        trials,
        seed,
        pairs,
        chsh: ChshReport { estimate: s.value, stderr: s.stderr, analytic, check },
        pass,
    };
    let table = render(&report);
    let csv = Some(pairs_csv(&report.pairs));
    Ok(Outcome::new(Status::from_pass(pass), &report, table, csv))
}

fn render(r: &LfReport) -> String {
    let mut rows = vec![["pair", "observed", "n", "E", "stderr", "E_born", "TV", "check"].map(String::from).to_vec()];
    for p in &r.pairs {
        rows.push(vec![
            p.pair.to_string(),
            format!("{},{}", p.variables.0, p.variables.1),
            p.counts.total().to_string(),
            format!("{:+.4}", p.correlation.value),
            format!("{:.4}", p.correlation.stderr),
            format!("{:+.4}", p.born_correlation),
            format!("{:.4}", p.fidelity.observed),
            pass_word(p.fidelity.pass).into(),
        ]);
    }
    let mut out = format!("LF simulation: {} trials, seed {}\n", r.trials, r.seed);
    out.push_str(&columns(&rows));
    out.push_str(&format!(
        "\nCHSH  S = {:.4} +/- {:.4}  analytic {:.4}  |diff| {:.4} <= {}  {}\n",
        r.chsh.estimate,
        r.chsh.stderr,
        r.chsh.analytic,
        r.chsh.check.observed,
        r.chsh.check.threshold,
        pass_word(r.chsh.check.pass)
    ));
    out
}

#[derive(Serialize)]
struct PairRow {
    pair: PairId,
    first: Observable,
    second: Observable,
    x: &'static str,
    y: &'static str,
    count: u64,
    frequency: f64,
    born: f64,
}

pub fn pairs_csv(pairs: &[LfPair]) -> String {
    let mut rows = Vec::new();
    for p in pairs {
        let n = p.counts.total() as f64;
        for x in Sign::BOTH {
            for y in Sign::BOTH {
                let count = p.counts.counts[x.index()][y.index()];
                rows.push(PairRow {
                    pair: p.pair,
                    first: p.variables.0,
                    second: p.variables.1,
                    x: x.label(),
                    y: y.label(),
                    count,
                    frequency: count as f64 / n,
                    born: p.born[x.index()][y.index()],
                });
            }
        }
    }
    csv_text(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_trials() {
        assert!(matches!(run(LFConfig::default(), 50, 1), Err(CliError::Input(_))));
    }

    #[test]
    fn json_round_trip() {
        let o = run(LFConfig::default(), 2_000, 1).unwrap();
        let r: LfReport = serde_json::from_str(&o.json).unwrap();
        assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", o.json);
        assert_eq!(o.csv.unwrap().lines().count(), 17);
    }
}
