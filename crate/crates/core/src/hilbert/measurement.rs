use num_complex::Complex64;
use rand::Rng;

use super::layout::FactorLayout;
use super::operator::Operator;
use super::state::StateVector;
use super::{HilbertError, TOL};
use crate::sign::Sign;

/// Complete set of orthogonal projectors, each with a label.
#[derive(Debug, Clone)]
pub struct MeasurementSpec {
    outcomes: Vec<(String, Operator)>,
}

impl MeasurementSpec {
    /// Validates idempotence, hermiticity, mutual orthogonality and
    /// completeness, all within `1e-10`.
    pub fn new(outcomes: Vec<(String, Operator)>) -> Result<Self, HilbertError> {
        let Some((_, first)) = outcomes.first() else {
            return Err(HilbertError::InvalidMeasurement("no projectors".into()));
        };
        let layout = first.layout().clone();
        for (i, (label, p)) in outcomes.iter().enumerate() {
            if p.layout() != &layout {
                return Err(HilbertError::InvalidMeasurement(format!("projector `{label}` has a different layout")));
            }
            if outcomes[..i].iter().any(|(l, _)| l == label) {
                return Err(HilbertError::InvalidMeasurement(format!("duplicate label `{label}`")));
            }
            if !p.is_hermitian(TOL) || !p.is_idempotent(TOL) {
                return Err(HilbertError::InvalidMeasurement(format!("`{label}` is not a projector")));
            }
            for (other, q) in &outcomes[..i] {
                if !p.compose(q)?.is_zero(TOL) {
                    return Err(HilbertError::InvalidMeasurement(format!(
                        "`{label}` and `{other}` are not orthogonal"
                    )));
                }
            }
        }
        let mut sum = outcomes[0].1.clone();
        for (_, p) in &outcomes[1..] {
            sum = sum.add(p)?;
        }
        if !sum.approx_eq(&Operator::identity(layout), TOL) {
            return Err(HilbertError::InvalidMeasurement("projectors do not sum to identity".into()));
        }
        Ok(MeasurementSpec { outcomes })
    }

    /// Orthonormal-basis measurement on the layout given by the columns of
    /// `u`: outcome `k` projects onto `u|k⟩`.
    pub fn from_basis(u: &Operator, labels: &[&str]) -> Result<Self, HilbertError> {
        let d = u.dim();
        if labels.len() != d {
            return Err(HilbertError::InvalidMeasurement(format!("need {d} labels, got {}", labels.len())));
        }
        let outcomes = labels
            .iter()
            .enumerate()
            .map(|(k, label)| {
                let col: Vec<Complex64> = (0..d).map(|i| u.get(i, k)).collect();
                Ok((label.to_string(), Operator::outer(u.layout().clone(), &col)?))
            })
            .collect::<Result<Vec<_>, HilbertError>>()?;
        Self::new(outcomes)
    }

    /// Two-outcome spin measurement along angle θ (degrees) in the x–z
    /// plane, labels `+1` / `-1`.
    pub fn along(name: &str, theta_deg: f64) -> Result<Self, HilbertError> {
        Self::from_basis(&Operator::rotation(name, theta_deg)?, &[Sign::Plus.label(), Sign::Minus.label()])
    }

    /// Computational-basis measurement of one factor with the given labels.
    pub fn computational(name: &str, labels: &[&str]) -> Result<Self, HilbertError> {
        let layout = FactorLayout::single(name, labels.len())?;
        Self::from_basis(&Operator::identity(layout), labels)
    }

    /// Conjugates every projector: `P ↦ U P U†`.
    pub fn conjugated(&self, u: &Operator) -> Result<Self, HilbertError> {
        let ud = u.dagger();
        let outcomes = self
            .outcomes
            .iter()
            .map(|(l, p)| Ok((l.clone(), u.compose(&p.compose(&ud)?)?)))
            .collect::<Result<Vec<_>, HilbertError>>()?;
        Self::new(outcomes)
    }

    /// Lifts every projector into a larger layout.
    pub fn embed(&self, full: &FactorLayout) -> Result<Self, HilbertError> {
        let outcomes = self
            .outcomes
            .iter()
            .map(|(l, p)| Ok((l.clone(), p.embed(full)?)))
            .collect::<Result<Vec<_>, HilbertError>>()?;
        Ok(MeasurementSpec { outcomes })
    }

    pub fn layout(&self) -> &FactorLayout {
        self.outcomes[0].1.layout()
    }

    pub fn outcomes(&self) -> &[(String, Operator)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn projector(&self, label: &str) -> Option<&Operator> {
        self.outcomes.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }

    fn check_layout(&self, s: &StateVector) -> Result<(), HilbertError> {
        if self.layout() == s.layout() {
            Ok(())
        } else {
            Err(HilbertError::Layout("measurement layout does not match state".into()))
        }
    }
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Born probabilities `⟨ψ|P|ψ⟩` in projector order.
pub fn born_distribution(s: &StateVector, m: &MeasurementSpec) -> Result<Vec<(String, f64)>, HilbertError> {
    m.check_layout(s)?;
    let out: Vec<(String, f64)> = m
        .outcomes
        .iter()
        .map(|(l, p)| {
            let pv = s.mul_vec(p);
            (l.clone(), clamp_prob(pv.iter().map(|z| z.norm_sqr()).sum()))
        })
        .collect();
    let total: f64 = out.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > TOL {
        return Err(HilbertError::InvalidMeasurement(format!("probabilities sum to {total}")));
    }
    Ok(out)
}

/// Joint probabilities `‖P₂ P₁ ψ‖²` of measuring `first` then `second`.
/// For commuting specs this is the order-independent joint distribution.
pub fn joint_distribution(
    s: &StateVector,
    first: &MeasurementSpec,
    second: &MeasurementSpec,
) -> Result<Vec<((String, String), f64)>, HilbertError> {
    first.check_layout(s)?;
    second.check_layout(s)?;
    let mut out = Vec::with_capacity(first.outcomes.len() * second.outcomes.len());
    for (la, pa) in &first.outcomes {
        let collapsed = StateVector::from_parts_unchecked(s.layout().clone(), s.mul_vec(pa));
        for (lb, pb) in &second.outcomes {
            let p: f64 = collapsed.mul_vec(pb).iter().map(|z| z.norm_sqr()).sum();
            out.push(((la.clone(), lb.clone()), clamp_prob(p)));
        }
    }
    Ok(out)
}

/// Samples a label with its Born probability and returns the collapsed,
/// renormalized state. Zero-probability labels are never selected.
pub fn sample_outcome<R: Rng + ?Sized>(
    s: &StateVector,
    m: &MeasurementSpec,
    rng: &mut R,
) -> Result<(String, StateVector), HilbertError> {
    let dist = born_distribution(s, m)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = None;
    for (k, (_, p)) in dist.iter().enumerate() {
        if *p <= 0.0 {
            continue;
        }
        acc += p;
        chosen = Some(k);
        if u < acc {
            break;
        }
    }
    let k = chosen.ok_or(HilbertError::ZeroVector)?;
    let (label, proj) = &m.outcomes[k];
    let post = StateVector::normalized(s.layout().clone(), s.mul_vec(proj))?;
    Ok((label.clone(), post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::state::tensor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z(name: &str) -> MeasurementSpec {
        MeasurementSpec::along(name, 0.0).unwrap()
    }

    fn prob(dist: &[(String, f64)], label: &str) -> f64 {
        dist.iter().find(|(l, _)| l == label).unwrap().1
    }

    #[test]
    fn born_on_basis_and_plus() {
        let zero = StateVector::basis(FactorLayout::single("a", 2).unwrap(), &[0]);
        let d = born_distribution(&zero, &z("a")).unwrap();
        assert_eq!(prob(&d, "+1"), 1.0);
        assert_eq!(prob(&d, "-1"), 0.0);

        let d = born_distribution(&StateVector::plus("a").unwrap(), &z("a")).unwrap();
        assert!((prob(&d, "+1") - 0.5).abs() < 1e-15);
        assert!((prob(&d, "-1") - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bell_correlation_at_45_degrees() {
        let layout = FactorLayout::qubits(&["a", "c"]).unwrap();
        let phi = StateVector::from_real(layout.clone(), &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        let ma = MeasurementSpec::along("a", 0.0).unwrap().embed(&layout).unwrap();
        let mc = MeasurementSpec::along("c", 45.0).unwrap().embed(&layout).unwrap();

        // Oracle: enumerate ⟨Φ+|P_a ⊗ P_c|Φ+⟩ through explicit tensor products.
        let mut oracle = 0.0;
        for (la, pa) in MeasurementSpec::along("a", 0.0).unwrap().outcomes() {
            for (lc, pc) in MeasurementSpec::along("c", 45.0).unwrap().outcomes() {
                let pp = pa.tensor(pc).unwrap();
                let v: f64 = (0..4)
                    .flat_map(|i| (0..4).map(move |j| (i, j)))
                    .map(|(i, j)| (phi.amps()[i].conj() * pp.get(i, j) * phi.amps()[j]).re)
                    .sum();
                let sign = Sign::from_label(la).unwrap().as_f64() * Sign::from_label(lc).unwrap().as_f64();
                oracle += sign * v;
            }
        }
        let joint = joint_distribution(&phi, &ma, &mc).unwrap();
        let e: f64 = joint
            .iter()
            .map(|((la, lc), p)| Sign::from_label(la).unwrap().as_f64() * Sign::from_label(lc).unwrap().as_f64() * p)
            .sum();
        assert!((e - oracle).abs() < 1e-12);
        assert!((e - 45f64.to_radians().cos()).abs() < 1e-12);
    }

    #[test]
    fn spec_rejects_incomplete_and_overlapping() {
        let layout = FactorLayout::single("a", 2).unwrap();
        let p0 = Operator::basis_projector(layout.clone(), &[0]);
        let p1 = Operator::basis_projector(layout.clone(), &[1]);
        assert!(MeasurementSpec::new(vec![("x".into(), p0.clone())]).is_err());
        assert!(MeasurementSpec::new(vec![("x".into(), p0.clone()), ("y".into(), p0.clone())]).is_err());
        assert!(MeasurementSpec::new(vec![("x".into(), p0.clone()), ("x".into(), p1.clone())]).is_err());
        assert!(MeasurementSpec::new(vec![("x".into(), p0), ("y".into(), p1)]).is_ok());
    }

    #[test]
    fn sample_basis_state_is_certain() {
        let zero = StateVector::basis(FactorLayout::single("a", 2).unwrap(), &[0]);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (label, post) = sample_outcome(&zero, &z("a"), &mut rng).unwrap();
            assert_eq!(label, "+1");
            assert_eq!(post, zero);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let plus = StateVector::plus("a").unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64).map(|_| sample_outcome(&plus, &z("a"), &mut rng).unwrap().0).collect::<Vec<_>>()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn plus_frequency_concentrates() {
        let plus = StateVector::plus("a").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_outcome(&plus, &z("a"), &mut rng).unwrap().0 == "+1").count();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn collapse_renormalizes() {
        let layout = FactorLayout::qubits(&["a", "b"]).unwrap();
        let s = tensor(&StateVector::plus("a").unwrap(), &StateVector::plus("b").unwrap()).unwrap();
        let m = z("a").embed(&layout).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, post) = sample_outcome(&s, &m, &mut rng).unwrap();
        assert!((post.norm() - 1.0).abs() < 1e-12);
        let d = born_distribution(&post, &m).unwrap();
        assert!(d.iter().any(|(_, p)| (p - 1.0).abs() < 1e-12));
    }
}
