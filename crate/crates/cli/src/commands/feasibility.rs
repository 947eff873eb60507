use std::path::Path;

use ewf_core::polytope::rational::{self, RationalText};
use ewf_core::polytope::{
    chsh_value, feasible_joint_4, feasible_joint_6, feasible_vertex_hull, fine_criterion, FeasibilityVerdict,
    PairTargets,
};
use ewf_core::scenarios::{lf_born_tables, LFConfig};
use serde::{Deserialize, Serialize};

use crate::output::{columns, CliError, Outcome, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `"angles"` or the targets file path.
    pub source: String,
    pub targets: PairTargets,
    pub chsh_value: RationalText,
    pub chsh_approx: f64,
    pub fine_criterion: bool,
    pub joint_4: FeasibilityVerdict,
    pub joint_6: FeasibilityVerdict,
    pub vertex_hull: bool,
    pub methods_agree: bool,
}

pub fn load_targets(path: &Path) -> Result<PairTargets, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    PairTargets::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn targets_from_angles(angles: &LFConfig) -> Result<PairTargets, CliError> {
    let born = lf_born_tables(angles).map_err(CliError::internal)?;
    PairTargets::from_born_tables(&born).map_err(CliError::internal)
}

pub fn evaluate(source: String, targets: PairTargets) -> FeasibilityReport {
    let s = chsh_value(&targets);
    let fine = fine_criterion(&targets);
    let joint_4 = feasible_joint_4(&targets);
    let joint_6 = feasible_joint_6(&targets);
    let vertex_hull = feasible_vertex_hull(&targets);
    let methods_agree = joint_4.feasible == fine && joint_6.feasible == fine && vertex_hull == fine;
    FeasibilityReport {
        source,
        chsh_approx: rational::to_f64(&s),
        chsh_value: RationalText(s),
        targets,
        fine_criterion: fine,
        joint_4,
        joint_6,
        vertex_hull,
        methods_agree,
    }
}

pub fn run(targets: Option<&Path>, angles: &LFConfig) -> Result<Outcome, CliError> {
    let (source, t) = match targets {
        Some(p) => (p.display().to_string(), load_targets(p)?),
        None => ("angles".to_string(), targets_from_angles(angles)?),
    };
    let report = evaluate(source, t);
    let status = if report.methods_agree { Status::Pass } else { Status::Disagreement };
    let table = render(&report);
    Ok(Outcome::new(status, &report, table, None))
}

fn verdict_word(feasible: bool) -> &'static str {
    if feasible {
        "feasible"
    } else {
        "infeasible"
    }
}

fn render(r: &FeasibilityReport) -> String {
    let mut out = format!("targets: {}\n", r.source);
    out.push_str(&format!("CHSH value S = {} ({:.6})\n\n", rational::format(&r.chsh_value.0), r.chsh_approx));
    let violation = |v: &FeasibilityVerdict| {
        v.max_violation.as_ref().map(|m| format!("excess over 2: {}", rational::format(&m.0))).unwrap_or_default()
    };
    let rows = vec![
        vec!["method".to_string(), "verdict".into(), "detail".into()],
        vec!["joint LP, 4 variables".into(), verdict_word(r.joint_4.feasible).into(), violation(&r.joint_4)],
        vec!["joint LP, 6 variables".into(), verdict_word(r.joint_6.feasible).into(), violation(&r.joint_6)],
        vec!["vertex hull LP".into(), verdict_word(r.vertex_hull).into(), String::new()],
        vec!["CHSH forms <= 2".into(), r.fine_criterion.to_string(), String::new()],
    ];
    out.push_str(&columns(&rows));
    if let Some(w) = &r.joint_4.witness {
        out.push_str("\nwitness over (A,B,C,D), nonzero atoms:\n");
        for (i, p) in w.probs().iter().enumerate().filter(|(_, p)| **p != rational::int(0)) {
            let bits: String = (0..4).map(|k| if (i >> (3 - k)) & 1 == 0 { '+' } else { '-' }).collect();
            out.push_str(&format!("  {bits}  {}\n", rational::format(p)));
        }
    }
    out.push_str(if r.methods_agree { "\nall methods agree\n" } else { "\nMETHODS DISAGREE\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_angles_infeasible() {
        let o = run(None, &LFConfig::default()).unwrap();
        assert_eq!(o.status, Status::Pass);
        let r: FeasibilityReport = serde_json::from_str(&o.json).unwrap();
        assert!(!r.joint_4.feasible && !r.joint_6.feasible && !r.fine_criterion);
        assert!((r.chsh_approx - 2.0 * 2f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn uniform_file_feasible_and_bad_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("u.json");
        std::fs::write(&good, serde_json::to_string(&PairTargets::uniform()).unwrap()).unwrap();
        let r: FeasibilityReport = serde_json::from_str(&run(Some(&good), &LFConfig::default()).unwrap().json).unwrap();
        assert!(r.joint_4.feasible && r.joint_4.witness.is_some());

        let bad = dir.path().join("bad.json");
        let q = r#"["1/4","1/4"]"#;
        let skew = r#"[["1/2","1/4"],["1/8","1/8"]]"#;
        std::fs::write(&bad, format!(r#"{{"AC":{skew},"AD":[{q},{q}],"BC":[{q},{q}],"BD":[{q},{q}]}}"#)).unwrap();
        assert!(matches!(run(Some(&bad), &LFConfig::default()), Err(CliError::Input(_))));
    }
}
