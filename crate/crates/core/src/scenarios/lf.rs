use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::names;
use super::ScenarioError;
use crate::hilbert::{apply, joint_distribution, FactorLayout, HilbertError, MeasurementSpec, Operator, StateVector};
use crate::pairs::{Choice, PairId, Wing};
use crate::Sign;

/// Measurement angles in degrees, each in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAngles", into = "RawAngles")]
pub struct LFConfig {
    pub ask_a: f64,
    pub super_a: f64,
    pub ask_c: f64,
    pub super_c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAngles {
    #[serde(rename = "ask_A")]
    ask_a: f64,
    #[serde(rename = "super_A")]
    super_a: f64,
    #[serde(rename = "ask_C")]
    ask_c: f64,
    #[serde(rename = "super_C")]
    super_c: f64,
}

impl TryFrom<RawAngles> for LFConfig {
    type Error = ScenarioError;

    fn try_from(r: RawAngles) -> Result<Self, Self::Error> {
        LFConfig::new(r.ask_a, r.super_a, r.ask_c, r.super_c)
    }
}

impl From<LFConfig> for RawAngles {
    fn from(c: LFConfig) -> Self {
        RawAngles { ask_a: c.ask_a, super_a: c.super_a, ask_c: c.ask_c, super_c: c.super_c }
    }
}

impl Default for LFConfig {
    /// Angles reaching the Tsirelson point, `S = 2√2`.
    fn default() -> Self {
        LFConfig { ask_a: 0.0, super_a: 90.0, ask_c: 45.0, super_c: 135.0 }
    }
}

impl LFConfig {
    pub fn new(ask_a: f64, super_a: f64, ask_c: f64, super_c: f64) -> Result<Self, ScenarioError> {
        for a in [ask_a, super_a, ask_c, super_c] {
            if !(0.0..360.0).contains(&a) {
                return Err(ScenarioError::AngleOutOfRange(a));
            }
        }
        Ok(LFConfig { ask_a, super_a, ask_c, super_c })
    }

    pub fn angle(&self, wing: Wing, which: Choice) -> f64 {
        match (wing, which) {
            (Wing::Alice, Choice::Ask) => self.ask_a,
            (Wing::Alice, Choice::Super) => self.super_a,
            (Wing::Chidi, Choice::Ask) => self.ask_c,
            (Wing::Chidi, Choice::Super) => self.super_c,
        }
    }
}

fn wing_factors(wing: Wing) -> (&'static str, &'static str) {
    match wing {
        Wing::Alice => (names::X, names::M_A),
        Wing::Chidi => (names::Y, names::M_C),
    }
}

fn lf_layout() -> FactorLayout {
    FactorLayout::qubits(&[names::X, names::Y, names::M_A, names::M_C]).expect("static layout")
}

/// Friend's measurement interaction: copy the particle's θ-basis value
/// into the memory qubit, `R(θ) · CNOT · R(θ)†` on `(particle, memory)`.
pub fn friend_unitary(particle: &str, memory: &str, theta_deg: f64) -> Result<Operator, HilbertError> {
    let layout = FactorLayout::qubits(&[particle, memory])?;
    let one = Complex64::new(1.0, 0.0);
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[r * 4 + c] = one;
    }
    let cnot = Operator::unitary(layout.clone(), m)?;
    let mem_id = Operator::identity(FactorLayout::single(memory, 2)?);
    let rot = Operator::rotation(particle, theta_deg)?.tensor(&mem_id)?;
    rot.compose(&cnot)?.compose(&rot.dagger())
}

/// Bell pair `Φ+` on `(X, Y)`, memories `M_A`, `M_C` in `|0⟩`, then each
/// friend's interaction at their ask angle.
pub fn lf_circuit(cfg: &LFConfig) -> Result<StateVector, ScenarioError> {
    let layout = lf_layout();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![0.0; 16];
    amps[layout.index_of(&[0, 0, 0, 0])] = h;
    amps[layout.index_of(&[1, 1, 0, 0])] = h;
    let mut s = StateVector::from_real(layout, &amps)?;
    for wing in [Wing::Alice, Wing::Chidi] {
        let (p, m) = wing_factors(wing);
        let f = friend_unitary(p, m, cfg.angle(wing, Choice::Ask))?;
        s = apply(&f, &s, &[p, m])?;
    }
    Ok(s)
}

/// `Ask` reads the wing's memory in Z; `Super` undoes the friend's
/// interaction, measures the particle at the super angle, i.e. projectors
/// `F P_θ F†`. Labels are `+1` / `-1`. Projectors live on the LF layout.
pub fn observable_spec(cfg: &LFConfig, wing: Wing, which: Choice) -> Result<MeasurementSpec, ScenarioError> {
    let (p, m) = wing_factors(wing);
    let local = match which {
        Choice::Ask => MeasurementSpec::along(m, 0.0)?,
        Choice::Super => {
            let f = friend_unitary(p, m, cfg.angle(wing, Choice::Ask))?;
            let mem_id = Operator::identity(FactorLayout::single(m, 2)?);
            let particle = MeasurementSpec::along(p, cfg.angle(wing, Choice::Super))?;
            let on_pair = MeasurementSpec::new(
                particle.outcomes().iter().map(|(l, proj)| Ok((l.clone(), proj.tensor(&mem_id)?))).collect::<Result<
                    Vec<_>,
                    HilbertError,
                >>(
                )?,
            )?;
            on_pair.conjugated(&f)?
        }
    };
    Ok(local.embed(&lf_layout())?)
}

/// `E = Σ x·y·p(x, y)` for two `±1`-labelled measurements.
pub fn correlation(s: &StateVector, m1: &MeasurementSpec, m2: &MeasurementSpec) -> Result<f64, ScenarioError> {
    let joint = joint_distribution(s, m1, m2)?;
    let mut e = 0.0;
    for ((la, lb), p) in joint {
        let (Some(x), Some(y)) = (Sign::from_label(&la), Sign::from_label(&lb)) else {
            return Err(ScenarioError::Inconsistent(format!("non-±1 labels `{la}`, `{lb}`")));
        };
        e += (x * y).as_f64() * p;
    }
    Ok(e)
}

/// Joint probabilities `[x][y]` with index 0 = `+1`.
pub type BornTable = [[f64; 2]; 2];

/// Born tables for the four pairs on the LF circuit, indexed by
/// [`PairId::index`].
pub fn lf_born_tables(cfg: &LFConfig) -> Result<[BornTable; 4], ScenarioError> {
    let s = lf_circuit(cfg)?;
    let mut out = [[[0.0; 2]; 2]; 4];
    for pair in PairId::ALL {
        let ma = observable_spec(cfg, Wing::Alice, pair.alice())?;
        let mc = observable_spec(cfg, Wing::Chidi, pair.chidi())?;
        for ((la, lc), p) in joint_distribution(&s, &ma, &mc)? {
            let x = Sign::from_label(&la).expect("±1 label");
            let y = Sign::from_label(&lc).expect("±1 label");
            out[pair.index()][x.index()][y.index()] = p;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::born_distribution;

    fn deg(x: f64) -> f64 {
        x.to_radians().cos()
    }

    #[test]
    fn aligned_ask_angles_give_ghz_like_state() {
        let cfg = LFConfig::new(0.0, 90.0, 0.0, 90.0).unwrap();
        let s = lf_circuit(&cfg).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amp(&[0, 0, 0, 0]).re - h).abs() < 1e-12);
        assert!((s.amp(&[1, 1, 1, 1]).re - h).abs() < 1e-12);
        let ma = observable_spec(&cfg, Wing::Alice, Choice::Ask).unwrap();
        let mc = observable_spec(&cfg, Wing::Chidi, Choice::Ask).unwrap();
        assert!((correlation(&s, &ma, &mc).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_is_normalized_for_any_angles() {
        for a in [0.0, 17.0, 123.4, 359.9] {
            let cfg = LFConfig::new(a, 0.0, 360.0 - a - 0.05, 0.0).unwrap();
            assert!((lf_circuit(&cfg).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn memory_correlation_at_45() {
        let cfg = LFConfig::new(0.0, 90.0, 45.0, 135.0).unwrap();
        let s = lf_circuit(&cfg).unwrap();
        let ma = observable_spec(&cfg, Wing::Alice, Choice::Ask).unwrap();
        let mc = observable_spec(&cfg, Wing::Chidi, Choice::Ask).unwrap();
        assert!((correlation(&s, &ma, &mc).unwrap() - deg(45.0)).abs() < 1e-12);
    }

    #[test]
    fn super_projectors_rank_two_and_complete() {
        let cfg = LFConfig::default();
        let spec = observable_spec(&cfg, Wing::Alice, Choice::Super).unwrap();
        // embedded in 16 dims: rank 2 on the wing ⇒ rank 8 overall
        for (_, p) in spec.outcomes() {
            assert_eq!(p.projector_rank(), 8);
        }
        let ask = observable_spec(&cfg, Wing::Alice, Choice::Ask).unwrap();
        assert_eq!(ask.labels().collect::<Vec<_>>(), vec!["+1", "-1"]);
        let s = lf_circuit(&cfg).unwrap();
        let total: f64 = born_distribution(&s, &spec).unwrap().iter().map(|x| x.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_angles_reach_tsirelson() {
        let cfg = LFConfig::default();
        let s = lf_circuit(&cfg).unwrap();
        let e = |a, c| {
            let ma = observable_spec(&cfg, Wing::Alice, a).unwrap();
            let mc = observable_spec(&cfg, Wing::Chidi, c).unwrap();
            correlation(&s, &ma, &mc).unwrap()
        };
        let (ac, bc, bd, ad) = (
            e(Choice::Ask, Choice::Ask),
            e(Choice::Super, Choice::Ask),
            e(Choice::Super, Choice::Super),
            e(Choice::Ask, Choice::Super),
        );
        assert!((ac - deg(45.0)).abs() < 1e-12);
        assert!((bc - deg(45.0)).abs() < 1e-12);
        assert!((bd - deg(45.0)).abs() < 1e-12);
        assert!((ad - deg(135.0)).abs() < 1e-12);
        assert!((ac + bc + bd - ad - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn born_tables_have_uniform_marginals() {
        let t = lf_born_tables(&LFConfig::default()).unwrap();
        for table in t {
            assert!((table[0][0] + table[0][1] - 0.5).abs() < 1e-12);
            assert!((table[0][0] + table[1][0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_angle_rejected() {
        assert!(LFConfig::new(360.0, 0.0, 0.0, 0.0).is_err());
        assert!(LFConfig::new(-1.0, 0.0, 0.0, 0.0).is_err());
    }
}
