use serde::{Deserialize, Serialize};

use super::HilbertError;

/// Largest total dimension the dense engine accepts.
pub const MAX_DIM: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub dim: usize,
}

/// Ordered tensor-factor layout. The first factor is the most significant
/// digit of the flat basis index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Factor>", into = "Vec<Factor>")]
pub struct FactorLayout {
    factors: Vec<Factor>,
}

impl FactorLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self, HilbertError> {
        let factors = factors.into_iter().map(|(name, dim)| Factor { name: name.into(), dim }).collect();
        Self::from_factors(factors)
    }

    fn from_factors(factors: Vec<Factor>) -> Result<Self, HilbertError> {
        let mut total: usize = 1;
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(HilbertError::Layout(format!("factor `{}` has dimension 0", f.name)));
            }
            if factors[..i].iter().any(|g| g.name == f.name) {
                return Err(HilbertError::Layout(format!("duplicate factor name `{}`", f.name)));
            }
            total = total
                .checked_mul(f.dim)
                .filter(|&t| t <= MAX_DIM)
                .ok_or_else(|| HilbertError::Layout(format!("total dimension exceeds {MAX_DIM}")))?;
        }
        Ok(FactorLayout { factors })
    }

    /// Layout of a single factor.
    pub fn single(name: &str, dim: usize) -> Result<Self, HilbertError> {
        Self::new([(name, dim)])
    }

    /// `n` qubit factors with the given names.
    pub fn qubits(names: &[&str]) -> Result<Self, HilbertError> {
        Self::new(names.iter().map(|n| (*n, 2)))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.name.as_str())
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    pub fn factor_dim(&self, name: &str) -> Option<usize> {
        self.position(name).map(|i| self.factors[i].dim)
    }

    /// Place value of each factor in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factors[i + 1].dim;
        }
        strides
    }

    /// Mixed-radix digits of a flat index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            out[i] = index % f.dim;
            index /= f.dim;
        }
        out
    }

    /// Flat index of a digit tuple. Panics if a digit is out of range.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        assert_eq!(digits.len(), self.factors.len(), "digit count does not match layout");
        digits.iter().zip(&self.factors).fold(0, |acc, (&d, f)| {
            assert!(d < f.dim, "digit {d} out of range for factor `{}`", f.name);
            acc * f.dim + d
        })
    }

    /// Concatenation; fails when any name appears in both.
    pub fn concat(&self, other: &FactorLayout) -> Result<FactorLayout, HilbertError> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::from_factors(factors)
    }

    /// Sub-layout made of the named factors, in the order given.
    pub fn select(&self, names: &[&str]) -> Result<FactorLayout, HilbertError> {
        let factors = names
            .iter()
            .map(|n| {
                self.position(n)
                    .map(|i| self.factors[i].clone())
                    .ok_or_else(|| HilbertError::Layout(format!("unknown factor `{n}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_factors(factors)
    }
}

impl TryFrom<Vec<Factor>> for FactorLayout {
    type Error = HilbertError;

    fn try_from(factors: Vec<Factor>) -> Result<Self, Self::Error> {
        Self::from_factors(factors)
    }
}

impl From<FactorLayout> for Vec<Factor> {
    fn from(layout: FactorLayout) -> Self {
        layout.factors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let l = FactorLayout::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        assert_eq!(l.dim(), 12);
        assert_eq!(l.strides(), vec![6, 2, 1]);
        for i in 0..12 {
            assert_eq!(l.index_of(&l.digits(i)), i);
        }
        assert_eq!(l.digits(7), vec![1, 0, 1]);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(FactorLayout::new([("a", 2), ("a", 2)]).is_err());
        assert!(FactorLayout::new([("a", 0)]).is_err());
        assert!(FactorLayout::new([("a", 64), ("b", 65)]).is_err());
        assert!(FactorLayout::new([("a", 64), ("b", 64)]).is_ok());
    }

    #[test]
    fn concat_detects_collision() {
        let a = FactorLayout::single("x", 2).unwrap();
        assert!(a.concat(&a).is_err());
    }
}
