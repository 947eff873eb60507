use ewf_core::hilbert::{expectation, joint_distribution, Amplitude, MeasurementSpec, Operator};
use ewf_core::scenarios::{
    build_basic_wf_state, frame_relational_from_amplitudes, interference_witness, names, orientation_branches,
    record_distribution, ScenarioError,
};
use ewf_core::Sign;
use serde::{Deserialize, Serialize};

use crate::output::{columns, csv_text, CliError, Outcome, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub s: Sign,
    pub a: Sign,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRelational {
    pub outcome: Sign,
    pub interference_witness: f64,
    pub record_expectation: f64,
    pub record_distribution: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicReport {
    pub a: f64,
    pub b: f64,
    pub amplitudes: Vec<AmplitudeEntry>,
    /// `P(S, A)` in the up/down basis, index 0 = up (`+1`).
    pub born_table: [[f64; 2]; 2],
    pub frame_relational: Option<FrameRelational>,
    pub note: Option<String>,
}

fn input(e: ScenarioError) -> CliError {
    match e {
        ScenarioError::Unnormalized(_) => CliError::Input(e.to_string()),
        other => CliError::internal(other),
    }
}

pub fn run(a: Option<f64>, b: Option<f64>, outcome: Option<Sign>) -> Result<Outcome, CliError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b, outcome) = (a.unwrap_or(h), b.unwrap_or(h), outcome.unwrap_or(Sign::Plus));
    if !a.is_finite() || !b.is_finite() {
        return Err(CliError::Input("amplitudes must be finite".into()));
    }
    let (za, zb) = (Amplitude::new(a, 0.0), Amplitude::new(b, 0.0));
    let psi = build_basic_wf_state(za, zb).map_err(input)?;

    let mut amplitudes = Vec::new();
    for s in Sign::BOTH {
        for r in Sign::BOTH {
            let z = psi.amp(&[s.index(), r.index()]);
            amplitudes.push(AmplitudeEntry { s, a: r, re: z.re, im: z.im });
        }
    }
    let ms = MeasurementSpec::along(names::S, 0.0).and_then(|m| m.embed(psi.layout())).map_err(CliError::internal)?;
    let ma = MeasurementSpec::along(names::A, 0.0).and_then(|m| m.embed(psi.layout())).map_err(CliError::internal)?;
    let mut born_table = [[0.0; 2]; 2];
    for ((x, y), p) in joint_distribution(&psi, &ms, &ma).map_err(CliError::internal)? {
        let (x, y) = (Sign::from_label(&x).expect("±1"), Sign::from_label(&y).expect("±1"));
        born_table[x.index()][y.index()] = p;
    }

    let (frame_relational, note) = match frame_relational_from_amplitudes(za, zb, outcome) {
        Ok(state) => {
            let (b0, b1) = orientation_branches(&state, names::A_ORIENT).map_err(CliError::internal)?;
            let witness = interference_witness(&state, &b0, &b1).map_err(CliError::internal)?;
            let z = Operator::pauli_z(names::A_RECORD).map_err(CliError::internal)?;
            let record_expectation = expectation(&state, &z).map_err(CliError::internal)?;
            let record_distribution =
                record_distribution(&state, names::A_RECORD, &["P", "A"]).map_err(CliError::internal)?;
            (
                Some(FrameRelational {
                    outcome,
                    interference_witness: witness,
                    record_expectation,
                    record_distribution,
                }),
                None,
            )
        }
        Err(ScenarioError::UnequalWeights { .. }) if a == 0.0 || b == 0.0 => {
            (None, Some("product state: a single branch, so there is no interference witness".to_string()))
        }
        Err(ScenarioError::UnequalWeights { a, b }) => {
            (None, Some(format!("unequal branch weights ({a:.6}, {b:.6}): no frame-relational state is defined")))
        }
        Err(e) => return Err(input(e)),
    };

    let report = BasicReport { a, b, amplitudes, born_table, frame_relational, note };
    let table = render(&report);
    let csv = Some(born_csv(&report.born_table));
    Ok(Outcome::new(Status::Pass, &report, table, csv))
}

fn render(r: &BasicReport) -> String {
    let mut rows = vec![vec!["S".to_string(), "A".into(), "amplitude".into(), "P(S,A)".into()]];
    for e in &r.amplitudes {
        rows.push(vec![
            e.s.label().into(),
            e.a.label().into(),
            format!("{:+.6}{:+.6}i", e.re, e.im),
            format!("{:.6}", r.born_table[e.s.index()][e.a.index()]),
        ]);
    }
    let mut out = format!("basic state, a = {}, b = {}\n", r.a, r.b);
    out.push_str(&columns(&rows));
    match &r.frame_relational {
        Some(f) => {
            out.push_str(&format!("\nframe-relational state, outcome {}\n", f.outcome.label()));
            out.push_str(&format!("  interference witness  {:.10}\n", f.interference_witness));
            out.push_str(&format!("  record expectation    {:+.10}\n", f.record_expectation));
        }
        None => out.push_str(&format!("\n{}\n", r.note.as_deref().unwrap_or(""))),
    }
    out
}

#[derive(Serialize)]
struct BornRow {
    s: &'static str,
    a: &'static str,
    probability: f64,
}

fn born_csv(t: &[[f64; 2]; 2]) -> String {
    let rows = Sign::BOTH.into_iter().flat_map(|x| {
        Sign::BOTH.into_iter().map(move |y| BornRow {
            s: x.label(),
            a: y.label(),
            probability: t[x.index()][y.index()],
        })
    });
    csv_text(rows)
}
