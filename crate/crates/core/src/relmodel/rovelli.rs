use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{trial_rng, RelModelError};
use crate::hilbert::{sample_outcome, MeasurementSpec, StateVector};
use crate::scenarios::{build_rovelli_states, names, rovelli_record_labels, RovelliConfig, RovelliKind};
use crate::Sign;

/// Outcome of one sequential run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RovelliRecord {
    pub first: Sign,
    pub performed_second: bool,
    pub second: Option<Sign>,
    /// Record label read out by the outside observer on asked runs.
    pub asked_record: Option<String>,
    /// External spin value read out on asked runs.
    pub s_external: Option<Sign>,
    pub report_consistent: bool,
}

/// Cached states and measurements for repeated runs.
#[derive(Debug, Clone)]
pub struct RovelliRunner {
    cfg: RovelliConfig,
    states: [StateVector; 3],
    /// `(PP + PA)/√2`: the lab after the trigger, before the second outcome.
    pre_second: StateVector,
    record: MeasurementSpec,
    spin: MeasurementSpec,
}

impl RovelliRunner {
    pub fn new(cfg: RovelliConfig) -> Result<Self, RelModelError> {
        let states = build_rovelli_states(&cfg)?;
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let amps = states[0].amps().iter().zip(states[1].amps()).map(|(x, y)| (x + y) * h).collect();
        let layout = states[0].layout().clone();
        let pre_second = StateVector::new(layout.clone(), amps).map_err(crate::scenarios::ScenarioError::from)?;
        let labels = rovelli_record_labels(cfg.trigger);
        let record = MeasurementSpec::computational(names::A_RECORD, &labels)
            .and_then(|m| m.embed(&layout))
            .map_err(crate::scenarios::ScenarioError::from)?;
        let spin = MeasurementSpec::along(names::S, 0.0)
            .and_then(|m| m.embed(&layout))
            .map_err(crate::scenarios::ScenarioError::from)?;
        Ok(RovelliRunner { cfg, states, pre_second, record, spin })
    }

    pub fn states(&self) -> &[StateVector; 3] {
        &self.states
    }

    pub fn run<R: Rng + ?Sized>(&self, ask: bool, rng: &mut R) -> RovelliRecord {
        let labels = rovelli_record_labels(self.cfg.trigger);
        let first = Sign::from_bool(rng.random());
        let performed_second = first == self.cfg.trigger;

        let (second, final_state) = if performed_second {
            let (label, post) = sample_outcome(&self.pre_second, &self.record, rng).expect("normalized state");
            let kind = if label == labels[RovelliKind::SecondParallel.record_digit()] {
                RovelliKind::SecondParallel
            } else {
                RovelliKind::SecondAntiparallel
            };
            let second = if kind == RovelliKind::SecondParallel { Sign::Plus } else { Sign::Minus };
            (Some(second), post)
        } else {
            (None, self.states[RovelliKind::NotMeasured.record_digit()].clone())
        };

        let expected_record = match second {
            Some(Sign::Plus) => labels[RovelliKind::SecondParallel.record_digit()],
            Some(Sign::Minus) => labels[RovelliKind::SecondAntiparallel.record_digit()],
            None => labels[RovelliKind::NotMeasured.record_digit()],
        };
        let (asked_record, s_external) = if ask {
            let (label, post) = sample_outcome(&final_state, &self.record, rng).expect("normalized state");
            let (s, _) = sample_outcome(&post, &self.spin, rng).expect("normalized state");
            (Some(label), Sign::from_label(&s))
        } else {
            (None, None)
        };

        let report_consistent = performed_second == (first == self.cfg.trigger)
            && second.is_some() == performed_second
            && asked_record.as_deref().is_none_or(|l| l == expected_record);
        RovelliRecord { first, performed_second, second, asked_record, s_external, report_consistent }
    }
}

/// One run; builds the states each call. Use [`RovelliRunner`] for many.
pub fn rovelli_run<R: Rng + ?Sized>(
    cfg: &RovelliConfig,
    ask: bool,
    rng: &mut R,
) -> Result<RovelliRecord, RelModelError> {
    Ok(RovelliRunner::new(*cfg)?.run(ask, rng))
}

/// `n` sequential runs, each on its own stream; every other run is asked.
pub fn rovelli_batch(cfg: &RovelliConfig, n: u64, seed: u64) -> Result<Vec<RovelliRecord>, RelModelError> {
    let runner = RovelliRunner::new(*cfg)?;
    Ok((0..n).map(|i| runner.run(i % 2 == 1, &mut trial_rng(seed, i))).collect())
}
