use num_complex::Complex64;

use super::names::{self, ORIENT_SUFFIX};
use super::{InternalOutcome, ScenarioError};
use crate::hilbert::{
    apply_local, born_distribution, Amplitude, FactorLayout, MeasurementSpec, Operator, StateVector, TOL,
};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A sealed lab: orientation qubit (`|0⟩` unprimed, `|1⟩` primed) and a
/// record register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabModel {
    pub orientation: String,
    pub record: String,
    pub record_dim: usize,
}

impl LabModel {
    pub fn alice(record_dim: usize) -> Self {
        LabModel { orientation: names::A_ORIENT.into(), record: names::A_RECORD.into(), record_dim }
    }

    pub fn chidi(record_dim: usize) -> Self {
        LabModel { orientation: names::C_ORIENT.into(), record: names::C_RECORD.into(), record_dim }
    }

    pub fn layout(&self) -> FactorLayout {
        FactorLayout::new([(self.orientation.as_str(), 2), (self.record.as_str(), self.record_dim)])
            .expect("distinct lab factor names")
    }

    pub fn is_orientation_factor(name: &str) -> bool {
        name.ends_with(ORIENT_SUFFIX)
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn spin_digit(s: InternalOutcome) -> usize {
    s.index()
}

/// `a|↓⟩_S|↓⟩_A + b|↑⟩_S|↑⟩_A` over `(S, A)`; `|↑⟩` is basis digit 0.
pub fn build_basic_wf_state(a: Amplitude, b: Amplitude) -> Result<StateVector, ScenarioError> {
    let n = a.norm_sqr() + b.norm_sqr();
    if (n - 1.0).abs() > TOL {
        return Err(ScenarioError::Unnormalized(n));
    }
    let layout = FactorLayout::qubits(&[names::S, names::A])?;
    let mut amps = vec![c(0.0); 4];
    amps[layout.index_of(&[1, 1])] = a;
    amps[layout.index_of(&[0, 0])] = b;
    Ok(StateVector::new(layout, amps)?)
}

/// `(|↑⟩_S|0⟩_orient + |↓⟩_S|1⟩_orient)/√2 ⊗ |outcome⟩_record` over
/// `(S, A_orient, A_record)`. The record is identical in both branches.
pub fn build_frame_relational_state(outcome: InternalOutcome) -> Result<StateVector, ScenarioError> {
    frame_relational_from_amplitudes(c(H), c(H), outcome)
}

/// Frame-relational analogue of the basic state `a|↓..⟩ + b|↑..⟩`: the `↑`
/// branch carries the unprimed lab, the `↓` branch the primed one. Only
/// equal branch weights are accepted.
pub fn frame_relational_from_amplitudes(
    a: Amplitude,
    b: Amplitude,
    outcome: InternalOutcome,
) -> Result<StateVector, ScenarioError> {
    let n = a.norm_sqr() + b.norm_sqr();
    if (n - 1.0).abs() > TOL {
        return Err(ScenarioError::Unnormalized(n));
    }
    if (a.norm() - b.norm()).abs() > TOL {
        return Err(ScenarioError::UnequalWeights { a: a.norm(), b: b.norm() });
    }
    let layout = FactorLayout::new([(names::S, 2), (names::A_ORIENT, 2), (names::A_RECORD, 2)])?;
    let r = spin_digit(outcome);
    let mut amps = vec![c(0.0); layout.dim()];
    amps[layout.index_of(&[0, 0, r])] = b;
    amps[layout.index_of(&[1, 1, r])] = a;
    Ok(StateVector::new(layout, amps)?)
}

/// Two-lab state after both friends measured a Bell pair:
/// `(|↑↑⟩_XY |0,a⟩_A |0,c⟩_C + |↓↓⟩_XY |1,a⟩_A |1,c⟩_C)/√2`.
pub fn build_lf_frame_relational_state(
    alice: InternalOutcome,
    chidi: InternalOutcome,
) -> Result<StateVector, ScenarioError> {
    let layout = FactorLayout::new([
        (names::X, 2),
        (names::Y, 2),
        (names::A_ORIENT, 2),
        (names::A_RECORD, 2),
        (names::C_ORIENT, 2),
        (names::C_RECORD, 2),
    ])?;
    let (a, cc) = (spin_digit(alice), spin_digit(chidi));
    let mut amps = vec![c(0.0); layout.dim()];
    amps[layout.index_of(&[0, 0, 0, a, 0, cc])] = c(H);
    amps[layout.index_of(&[1, 1, 1, a, 1, cc])] = c(H);
    Ok(StateVector::new(layout, amps)?)
}

/// Probability of `+` for the measurement `{|+⟩⟨+|, |−⟩⟨−|}` with
/// `|±⟩ = (branch_a ± branch_b)/√2`: 1 for the coherent sum, 1/2 for either
/// branch alone, 0 for the difference.
pub fn interference_witness(
    s: &StateVector,
    branch_a: &StateVector,
    branch_b: &StateVector,
) -> Result<f64, ScenarioError> {
    let overlap = branch_a.inner(branch_b)?;
    if overlap.norm() > TOL || (branch_a.norm() - 1.0).abs() > TOL || (branch_b.norm() - 1.0).abs() > TOL {
        return Err(ScenarioError::BranchesNotOrthonormal);
    }
    let ca = branch_a.inner(s)?;
    let cb = branch_b.inner(s)?;
    let residual: f64 = s
        .amps()
        .iter()
        .zip(branch_a.amps().iter().zip(branch_b.amps()))
        .map(|(x, (pa, pb))| (x - ca * pa - cb * pb).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > TOL {
        return Err(ScenarioError::OutsideSpan(residual));
    }
    Ok(((ca + cb) * H).norm_sqr().min(1.0))
}

/// Normalized components of `s` with the orientation factor in `|0⟩` and
/// in `|1⟩`.
pub fn orientation_branches(s: &StateVector, orientation: &str) -> Result<(StateVector, StateVector), ScenarioError> {
    let layout = s.layout();
    let pos = layout.position(orientation).ok_or_else(|| {
        ScenarioError::Hilbert(crate::hilbert::HilbertError::Layout(format!("unknown factor `{orientation}`")))
    })?;
    let branch = |digit: usize| {
        let amps = s
            .amps()
            .iter()
            .enumerate()
            .map(|(i, z)| if layout.digits(i)[pos] == digit { *z } else { c(0.0) })
            .collect();
        StateVector::normalized(layout.clone(), amps)
    };
    Ok((branch(0)?, branch(1)?))
}

/// Born distribution of the record register in its computational basis.
pub fn record_distribution(
    s: &StateVector,
    record: &str,
    labels: &[&str],
) -> Result<Vec<(String, f64)>, ScenarioError> {
    let spec = MeasurementSpec::computational(record, labels)?.embed(s.layout())?;
    Ok(born_distribution(s, &spec)?)
}

/// Applies a unitary that acts only on orientation factors.
pub fn apply_global_rotation(s: &StateVector, u: &Operator) -> Result<StateVector, ScenarioError> {
    if let Some(bad) = u.layout().names().find(|n| !LabModel::is_orientation_factor(n)) {
        return Err(ScenarioError::NotOrientation(bad.to_string()));
    }
    Ok(apply_local(u, s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::expectation;
    use crate::Sign;

    fn record_z() -> Operator {
        Operator::pauli_z(names::A_RECORD).unwrap()
    }

    #[test]
    fn basic_state_product_case() {
        let s = build_basic_wf_state(c(1.0), c(0.0)).unwrap();
        assert_eq!(s.amp(&[1, 1]), c(1.0));
    }

    #[test]
    fn basic_state_bell_case() {
        let s = build_basic_wf_state(c(H), c(H)).unwrap();
        let zz = Operator::pauli_z(names::S).unwrap().tensor(&Operator::pauli_z(names::A).unwrap()).unwrap();
        assert!((expectation(&s, &zz).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basic_state_born_on_s() {
        let s = build_basic_wf_state(c(0.6), c(0.8)).unwrap();
        let m = MeasurementSpec::along(names::S, 0.0).unwrap().embed(s.layout()).unwrap();
        let d = born_distribution(&s, &m).unwrap();
        // +1 = ↑ carries b, -1 = ↓ carries a
        assert!((d[0].1 - 0.64).abs() < 1e-12);
        assert!((d[1].1 - 0.36).abs() < 1e-12);
    }

    #[test]
    fn basic_state_rejects_unnormalized() {
        assert!(matches!(build_basic_wf_state(c(0.9), c(0.9)), Err(ScenarioError::Unnormalized(_))));
    }

    #[test]
    fn frame_relational_record_is_definite() {
        for (o, want) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
            let s = build_frame_relational_state(o).unwrap();
            assert!((expectation(&s, &record_z()).unwrap() - want).abs() < 1e-12);
            let aligned = Operator::basis_projector(FactorLayout::single(names::A_ORIENT, 2).unwrap(), &[0]);
            assert!((expectation(&s, &aligned).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn unequal_weights_refused() {
        assert!(matches!(
            frame_relational_from_amplitudes(c(0.6), c(0.8), Sign::Plus),
            Err(ScenarioError::UnequalWeights { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        let l = FactorLayout::single("q", 2).unwrap();
        let a = StateVector::basis(l.clone(), &[0]);
        let b = StateVector::basis(l.clone(), &[1]);
        let plus = StateVector::from_real(l.clone(), &[H, H]).unwrap();
        let minus = StateVector::from_real(l.clone(), &[H, -H]).unwrap();
        assert!((interference_witness(&plus, &a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!((interference_witness(&a, &a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert!(interference_witness(&minus, &a, &b).unwrap().abs() < 1e-12);
        assert!(matches!(interference_witness(&plus, &a, &a), Err(ScenarioError::BranchesNotOrthonormal)));
    }

    #[test]
    fn witness_rejects_state_outside_span() {
        let l = FactorLayout::single("q", 3).unwrap();
        let a = StateVector::basis(l.clone(), &[0]);
        let b = StateVector::basis(l.clone(), &[1]);
        let s = StateVector::basis(l, &[2]);
        assert!(matches!(interference_witness(&s, &a, &b), Err(ScenarioError::OutsideSpan(_))));
    }

    #[test]
    fn frame_relational_matches_standard_interference() {
        let fr = build_frame_relational_state(Sign::Plus).unwrap();
        let (b0, b1) = orientation_branches(&fr, names::A_ORIENT).unwrap();
        let w_fr = interference_witness(&fr, &b0, &b1).unwrap();

        let std = build_basic_wf_state(c(H), c(H)).unwrap();
        let up = StateVector::basis(std.layout().clone(), &[0, 0]);
        let down = StateVector::basis(std.layout().clone(), &[1, 1]);
        let w_std = interference_witness(&std, &up, &down).unwrap();
        assert!((w_fr - 1.0).abs() < 1e-12);
        assert!((w_fr - w_std).abs() < 1e-12);
    }

    #[test]
    fn global_rotation_keeps_record() {
        let s = build_frame_relational_state(Sign::Plus).unwrap();
        let id = Operator::identity(FactorLayout::single(names::A_ORIENT, 2).unwrap());
        assert_eq!(apply_global_rotation(&s, &id).unwrap(), s);
        let flipped = apply_global_rotation(&s, &Operator::pauli_x(names::A_ORIENT).unwrap()).unwrap();
        assert!((expectation(&flipped, &record_z()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_rotation_rejects_record_factor() {
        let s = build_frame_relational_state(Sign::Plus).unwrap();
        let u = Operator::pauli_x(names::A_RECORD).unwrap();
        assert!(matches!(apply_global_rotation(&s, &u), Err(ScenarioError::NotOrientation(_))));
    }

    #[test]
    fn two_lab_state_records() {
        let s = build_lf_frame_relational_state(Sign::Plus, Sign::Minus).unwrap();
        let d = record_distribution(&s, names::C_RECORD, &["P", "A"]).unwrap();
        assert!((d[1].1 - 1.0).abs() < 1e-12);
        let (b0, b1) = orientation_branches(&s, names::A_ORIENT).unwrap();
        assert!((interference_witness(&s, &b0, &b1).unwrap() - 1.0).abs() < 1e-12);
    }
}
