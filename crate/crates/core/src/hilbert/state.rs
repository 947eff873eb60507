use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::layout::FactorLayout;
use super::operator::{Operator, SubsystemIndex};
use super::{HilbertError, TOL};

/// Normalized pure state over a factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: FactorLayout,
    amps: Vec<Complex64>,
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within tolerance.
    pub fn new(layout: FactorLayout, amps: Vec<Complex64>) -> Result<Self, HilbertError> {
        if amps.len() != layout.dim() {
            return Err(HilbertError::DimensionMismatch { expected: layout.dim(), found: amps.len() });
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(HilbertError::NonFinite);
        }
        let n = norm_sqr(&amps);
        if (n - 1.0).abs() > TOL {
            return Err(HilbertError::NotNormalized(n));
        }
        Ok(StateVector { layout, amps })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(layout: FactorLayout, mut amps: Vec<Complex64>) -> Result<Self, HilbertError> {
        if amps.len() != layout.dim() {
            return Err(HilbertError::DimensionMismatch { expected: layout.dim(), found: amps.len() });
        }
        let n = norm_sqr(&amps).sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(HilbertError::ZeroVector);
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Self::new(layout, amps)
    }

    pub fn from_real(layout: FactorLayout, amps: &[f64]) -> Result<Self, HilbertError> {
        Self::new(layout, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state, one digit per factor.
    pub fn basis(layout: FactorLayout, digits: &[usize]) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[layout.index_of(digits)] = Complex64::new(1.0, 0.0);
        StateVector { layout, amps }
    }

    /// Single-qubit state `a|0⟩ + b|1⟩`.
    pub fn qubit(name: &str, a: Complex64, b: Complex64) -> Result<Self, HilbertError> {
        Self::new(FactorLayout::single(name, 2)?, vec![a, b])
    }

    /// `|+⟩ = (|0⟩ + |1⟩)/√2` on a named qubit.
    pub fn plus(name: &str) -> Result<Self, HilbertError> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::qubit(name, h, h)
    }

    pub fn layout(&self) -> &FactorLayout {
        &self.layout
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, digits: &[usize]) -> Complex64 {
        self.amps[self.layout.index_of(digits)]
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// `⟨self|other⟩`; layouts must agree.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, HilbertError> {
        if self.layout != other.layout {
            return Err(HilbertError::Layout("state layouts differ".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, HilbertError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Raw `O|ψ⟩` with `O` given on the full layout.
    pub(crate) fn mul_vec(&self, op: &Operator) -> Vec<Complex64> {
        let d = self.amps.len();
        (0..d).map(|i| (0..d).map(|j| op.get(i, j) * self.amps[j]).sum()).collect()
    }

    pub(crate) fn from_parts_unchecked(layout: FactorLayout, amps: Vec<Complex64>) -> Self {
        StateVector { layout, amps }
    }
}

/// Outer product of two states over the concatenated layout.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector, HilbertError> {
    let layout = a.layout.concat(&b.layout)?;
    let amps = a.amps.iter().flat_map(|x| b.amps.iter().map(move |y| x * y)).collect();
    StateVector::normalized(layout, amps)
}

/// Applies a unitary to the named factors (in the order given), identity
/// elsewhere. Sub-indices of `u` enumerate `on` with the first name most
/// significant.
pub fn apply(u: &Operator, s: &StateVector, on: &[&str]) -> Result<StateVector, HilbertError> {
    if !u.is_unitary() {
        return Err(HilbertError::NotUnitary);
    }
    let sub_dim: usize = on
        .iter()
        .map(|n| s.layout.factor_dim(n).ok_or_else(|| HilbertError::Layout(format!("unknown factor `{n}`"))))
        .product::<Result<usize, _>>()?;
    if sub_dim != u.dim() {
        return Err(HilbertError::DimensionMismatch { expected: sub_dim, found: u.dim() });
    }
    let idx = SubsystemIndex::new(&s.layout, on)?;
    let amps: Vec<Complex64> = (0..s.amps.len())
        .map(|i| {
            let row = idx.sub_of[i];
            idx.offset.iter().enumerate().map(|(j, &off)| u.get(row, j) * s.amps[idx.base_of[i] + off]).sum()
        })
        .collect();
    let out = StateVector::from_parts_unchecked(s.layout.clone(), amps);
    let n = out.norm();
    if (n - 1.0).abs() > TOL {
        return Err(HilbertError::NotNormalized(n * n));
    }
    Ok(out)
}

/// Applies `u` to the factors its own layout names.
pub fn apply_local(u: &Operator, s: &StateVector) -> Result<StateVector, HilbertError> {
    let on: Vec<&str> = u.layout().names().collect();
    apply(u, s, &on)
}

/// `⟨ψ|O|ψ⟩` for a Hermitian observable. An observable given on a
/// sub-layout is embedded first.
pub fn expectation(s: &StateVector, observable: &Operator) -> Result<f64, HilbertError> {
    if !observable.is_hermitian(TOL) {
        return Err(HilbertError::NotHermitian);
    }
    let full = if observable.layout() == s.layout() { observable.clone() } else { observable.embed(s.layout())? };
    let o_psi = s.mul_vec(&full);
    let v: Complex64 = s.amps.iter().zip(&o_psi).map(|(a, b)| a.conj() * b).sum();
    debug_assert!(v.im.abs() <= 1e-8, "imaginary residue {}", v.im);
    Ok(v.re)
}

#[derive(Serialize, Deserialize)]
struct StateDump {
    layout: FactorLayout,
    amps: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateDump { layout: self.layout.clone(), amps: self.amps.iter().map(|z| [z.re, z.im]).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dump = StateDump::deserialize(deserializer)?;
        let amps = dump.amps.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        StateVector::new(dump.layout, amps).map_err(serde::de::Error::custom)
    }
}
