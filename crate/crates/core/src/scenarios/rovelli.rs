use serde::{Deserialize, Serialize};

use super::names;
use super::ScenarioError;
use crate::hilbert::{FactorLayout, StateVector};
use crate::Sign;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
const NOISE: f64 = 1e-12;

/// Which first outcome makes the friend perform the second measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RovelliConfig {
    pub trigger: Sign,
}

impl Default for RovelliConfig {
    fn default() -> Self {
        RovelliConfig { trigger: Sign::Plus }
    }
}

/// The three possible final states, in the order [`build_rovelli_states`]
/// returns them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RovelliKind {
    /// Second measurement performed, `Y` parallel (record `PP` for trigger +1).
    SecondParallel,
    /// Second measurement performed, `Y` antiparallel (record `PA`).
    SecondAntiparallel,
    /// First outcome was not the trigger; no second measurement (`~M`).
    NotMeasured,
}

impl RovelliKind {
    pub const ALL: [RovelliKind; 3] =
        [RovelliKind::SecondParallel, RovelliKind::SecondAntiparallel, RovelliKind::NotMeasured];

    pub fn record_digit(self) -> usize {
        self as usize
    }
}

/// Record register labels for a trigger: `[PP, PA, ~M]` for `+1`,
/// `[AP, AA, ~M]` for `-1`.
pub fn rovelli_record_labels(trigger: Sign) -> [&'static str; 3] {
    match trigger {
        Sign::Plus => ["PP", "PA", "~M"],
        Sign::Minus => ["AP", "AA", "~M"],
    }
}

fn layout() -> FactorLayout {
    FactorLayout::new([(names::S, 2), (names::Y, 2), (names::A_ORIENT, 2), (names::A_RECORD, 3)])
        .expect("static layout")
}

/// Branch `o` of each state has `S = ↑` for `o = 0` and `S = ↓` for `o = 1`.
/// The friend's axis alignment in a branch is `S × first`, so the `Y`
/// value she registers is `Y × S × first`.
fn build(kind: RovelliKind, trigger: Sign) -> Result<StateVector, ScenarioError> {
    let layout = layout();
    let mut amps = vec![0.0; layout.dim()];
    let first = if kind == RovelliKind::NotMeasured { -trigger } else { trigger };
    for o in 0..2 {
        let s_ext = Sign::from_index(o);
        let alignment = s_ext * first;
        match kind {
            RovelliKind::NotMeasured => {
                // Y stays in |φ⟩ = (|↑⟩ + |↓⟩)/√2
                for y in 0..2 {
                    amps[layout.index_of(&[o, y, o, kind.record_digit()])] = H * H;
                }
            }
            _ => {
                let y_rel = if kind == RovelliKind::SecondParallel { Sign::Plus } else { Sign::Minus };
                let y_ext = y_rel * alignment;
                amps[layout.index_of(&[o, y_ext.index(), o, kind.record_digit()])] = H;
            }
        }
    }
    let s = StateVector::from_real(layout, &amps)?;
    check_rovelli_structure(&s, trigger)?;
    Ok(s)
}

/// The three final states over `(S, Y, A_orient, A_record)`, record basis
/// `{second parallel, second antiparallel, ~M}`. For trigger `+1` these are
///
/// 1. `(|↑↑⟩|0⟩ + |↓↓⟩|1⟩)/√2 ⊗ |PP⟩`
/// 2. `(|↑↓⟩|0⟩ + |↓↑⟩|1⟩)/√2 ⊗ |PA⟩`
/// 3. `(|↑⟩|φ⟩|0⟩ + |↓⟩|φ⟩|1⟩)/√2 ⊗ |~M⟩`
///
/// with orientation `|0⟩`/`|1⟩` the unprimed/primed lab states.
pub fn build_rovelli_states(cfg: &RovelliConfig) -> Result<[StateVector; 3], ScenarioError> {
    Ok([
        build(RovelliKind::SecondParallel, cfg.trigger)?,
        build(RovelliKind::SecondAntiparallel, cfg.trigger)?,
        build(RovelliKind::NotMeasured, cfg.trigger)?,
    ])
}

/// Checks that every branch of a Rovelli state is internally consistent:
/// the record is the same in all branches; the two orientation branches
/// correspond to opposite alignments; `~M` appears iff the first outcome
/// relative to the friend's own axis is not the trigger; and a recorded
/// second outcome matches `Y` relative to that axis.
pub fn check_rovelli_structure(s: &StateVector, trigger: Sign) -> Result<(), ScenarioError> {
    let layout = s.layout();
    if layout != &self::layout() {
        return Err(ScenarioError::Inconsistent("not a Rovelli layout".into()));
    }
    let support: Vec<Vec<usize>> =
        s.amps().iter().enumerate().filter(|(_, z)| z.norm() > NOISE).map(|(i, _)| layout.digits(i)).collect();
    let record = support[0][3];
    if support.iter().any(|d| d[3] != record) {
        return Err(ScenarioError::Inconsistent("record differs between branches".into()));
    }
    let measured = record != RovelliKind::NotMeasured.record_digit();
    let first = if measured { trigger } else { -trigger };
    if measured != (first == trigger) {
        return Err(ScenarioError::Inconsistent("second measurement does not follow the trigger".into()));
    }

    let mut alignment: [Option<Sign>; 2] = [None, None];
    for d in &support {
        let (s_ext, y, o) = (Sign::from_index(d[0]), d[1], d[2]);
        let a = s_ext * first;
        match alignment[o] {
            Some(prev) if prev != a => {
                return Err(ScenarioError::Inconsistent(format!("orientation branch {o} has two alignments")));
            }
            _ => alignment[o] = Some(a),
        }
        if measured {
            let y_rel = Sign::from_index(y) * a;
            let expected = if record == RovelliKind::SecondParallel.record_digit() { Sign::Plus } else { Sign::Minus };
            if y_rel != expected {
                return Err(ScenarioError::Inconsistent("recorded second outcome disagrees with Y".into()));
            }
        }
    }
    match alignment {
        [Some(a0), Some(a1)] if a0 != a1 => {}
        _ => return Err(ScenarioError::Inconsistent("orientation branches must have opposite alignments".into())),
    }

    if !measured {
        for o in 0..2 {
            let s_digit = support.iter().find(|d| d[2] == o).map(|d| d[0]).unwrap_or(0);
            let up = s.amp(&[s_digit, 0, o, record]);
            let down = s.amp(&[s_digit, 1, o, record]);
            if (up - down).norm() > NOISE {
                return Err(ScenarioError::Inconsistent("unmeasured Y is not in its ready state".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{born_distribution, MeasurementSpec};
    use crate::scenarios::{interference_witness, orientation_branches, record_distribution};

    #[test]
    fn states_match_displayed_forms() {
        let [pp, pa, nm] = build_rovelli_states(&RovelliConfig::default()).unwrap();
        assert!((pp.amp(&[0, 0, 0, 0]).re - H).abs() < 1e-15);
        assert!((pp.amp(&[1, 1, 1, 0]).re - H).abs() < 1e-15);
        assert!((pa.amp(&[0, 1, 0, 1]).re - H).abs() < 1e-15);
        assert!((pa.amp(&[1, 0, 1, 1]).re - H).abs() < 1e-15);
        for (s, y, o) in [(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)] {
            assert!((nm.amp(&[s, y, o, 2]).re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn record_projectors_are_exact() {
        let labels = rovelli_record_labels(Sign::Plus);
        for (k, s) in build_rovelli_states(&RovelliConfig::default()).unwrap().iter().enumerate() {
            let d = record_distribution(s, names::A_RECORD, &labels).unwrap();
            for (j, (_, p)) in d.iter().enumerate() {
                assert!((*p - if j == k { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unmeasured_y_is_ready_state() {
        let [_, _, nm] = build_rovelli_states(&RovelliConfig::default()).unwrap();
        let m = MeasurementSpec::along(names::Y, 90.0).unwrap().embed(nm.layout()).unwrap();
        let d = born_distribution(&nm, &m).unwrap();
        assert!((d[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orientation_branches_interfere() {
        for trigger in Sign::BOTH {
            for s in build_rovelli_states(&RovelliConfig { trigger }).unwrap() {
                let (b0, b1) = orientation_branches(&s, names::A_ORIENT).unwrap();
                assert!((interference_witness(&s, &b0, &b1).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn structure_check_catches_tampering() {
        // record PP but Y anti-correlated with S: the PA state relabelled
        let [_, pa, _] = build_rovelli_states(&RovelliConfig::default()).unwrap();
        assert!(check_rovelli_structure(&pa, Sign::Minus).is_err());
        let l = layout();
        let mut amps = vec![0.0; l.dim()];
        amps[l.index_of(&[0, 1, 0, 0])] = H;
        amps[l.index_of(&[1, 0, 1, 0])] = H;
        let bad = StateVector::from_real(l, &amps).unwrap();
        assert!(check_rovelli_structure(&bad, Sign::Plus).is_err());
    }

    #[test]
    fn negative_trigger_swaps_roles() {
        let [ap, aa, nm] = build_rovelli_states(&RovelliConfig { trigger: Sign::Minus }).unwrap();
        // first = -1: alignment anti to S, so Y parallel means Y opposite to S
        assert!((ap.amp(&[0, 1, 0, 0]).re - H).abs() < 1e-15);
        assert!((aa.amp(&[0, 0, 0, 1]).re - H).abs() < 1e-15);
        assert!(check_rovelli_structure(&nm, Sign::Minus).is_ok());
    }
}
