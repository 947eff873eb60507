use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::FactorLayout;
use super::{HilbertError, TOL};

/// Dense square operator over a factor layout, stored row-major.
///
/// The layout names the factors the operator acts on; [`Operator::embed`]
/// lifts it into a larger layout with identity on the remaining factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: FactorLayout,
    matrix: Vec<Complex64>,
    unitary: bool,
}

/// Index bookkeeping for acting on a subset of factors of a larger layout.
pub(crate) struct SubsystemIndex {
    /// Composite sub-index (over `on`, in the given order) of each flat index.
    pub sub_of: Vec<usize>,
    /// Flat index with every `on` digit zeroed.
    pub base_of: Vec<usize>,
    /// Flat-index contribution of each composite sub-index.
    pub offset: Vec<usize>,
}

impl SubsystemIndex {
    pub fn new(full: &FactorLayout, on: &[&str]) -> Result<Self, HilbertError> {
        let positions = on
            .iter()
            .map(|n| full.position(n).ok_or_else(|| HilbertError::Layout(format!("unknown factor `{n}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        // select() also rejects repeated names
        let sub = full.select(on)?;
        let strides = full.strides();
        let sub_dim = sub.dim();

        let offset =
            (0..sub_dim).map(|j| sub.digits(j).iter().zip(&positions).map(|(&d, &p)| d * strides[p]).sum()).collect();

        let n = full.dim();
        let mut sub_of = Vec::with_capacity(n);
        let mut base_of = Vec::with_capacity(n);
        for i in 0..n {
            let digits = full.digits(i);
            let mut s = 0;
            let mut base = i;
            for &p in &positions {
                s = s * full.factors()[p].dim + digits[p];
                base -= digits[p] * strides[p];
            }
            sub_of.push(s);
            base_of.push(base);
        }
        Ok(SubsystemIndex { sub_of, base_of, offset })
    }
}

fn check_finite(m: &[Complex64]) -> Result<(), HilbertError> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(HilbertError::NonFinite)
    }
}

impl Operator {
    pub fn new(layout: FactorLayout, matrix: Vec<Complex64>) -> Result<Self, HilbertError> {
        let d = layout.dim();
        if matrix.len() != d * d {
            return Err(HilbertError::DimensionMismatch { expected: d * d, found: matrix.len() });
        }
        check_finite(&matrix)?;
        Ok(Operator { layout, matrix, unitary: false })
    }

    /// Builds an operator and flags it unitary after checking `U†U = I`.
    pub fn unitary(layout: FactorLayout, matrix: Vec<Complex64>) -> Result<Self, HilbertError> {
        let mut op = Self::new(layout, matrix)?;
        if !op.check_unitary(TOL) {
            return Err(HilbertError::NotUnitary);
        }
        op.unitary = true;
        Ok(op)
    }

    /// Real 2x2 matrix convenience constructor for a single qubit factor.
    pub fn real_2x2(name: &str, m: [[f64; 2]; 2]) -> Result<Self, HilbertError> {
        let layout = FactorLayout::single(name, 2)?;
        let matrix = m.iter().flatten().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(layout, matrix)
    }

    pub fn identity(layout: FactorLayout) -> Self {
        let d = layout.dim();
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            matrix[i * d + i] = Complex64::new(1.0, 0.0);
        }
        Operator { layout, matrix, unitary: true }
    }

    /// Real rotation `R(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`,
    /// angle in degrees. `R(θ)|0⟩` is the `+1` eigenvector of the
    /// observable pointing at angle θ in the x–z plane.
    pub fn rotation(name: &str, theta_deg: f64) -> Result<Self, HilbertError> {
        let half = theta_deg.to_radians() / 2.0;
        let (s, c) = half.sin_cos();
        let mut op = Self::real_2x2(name, [[c, -s], [s, c]])?;
        op.unitary = true;
        Ok(op)
    }

    pub fn pauli_x(name: &str) -> Result<Self, HilbertError> {
        let mut op = Self::real_2x2(name, [[0.0, 1.0], [1.0, 0.0]])?;
        op.unitary = true;
        Ok(op)
    }

    pub fn pauli_z(name: &str) -> Result<Self, HilbertError> {
        let mut op = Self::real_2x2(name, [[1.0, 0.0], [0.0, -1.0]])?;
        op.unitary = true;
        Ok(op)
    }

    /// `|v⟩⟨v|` for a vector given in the layout's basis. Not normalized.
    pub fn outer(layout: FactorLayout, v: &[Complex64]) -> Result<Self, HilbertError> {
        let d = layout.dim();
        if v.len() != d {
            return Err(HilbertError::DimensionMismatch { expected: d, found: v.len() });
        }
        let matrix = (0..d * d).map(|k| v[k / d] * v[k % d].conj()).collect();
        Self::new(layout, matrix)
    }

    /// Projector onto a single basis state, digits per factor.
    pub fn basis_projector(layout: FactorLayout, digits: &[usize]) -> Self {
        let d = layout.dim();
        let k = layout.index_of(digits);
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        matrix[k * d + k] = Complex64::new(1.0, 0.0);
        Operator { layout, matrix, unitary: false }
    }

    /// Haar-like random unitary: Gram–Schmidt on a complex Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(layout: FactorLayout, rng: &mut R) -> Self {
        let d = layout.dim();
        loop {
            let mut cols: Vec<Vec<Complex64>> = (0..d)
                .map(|_| {
                    (0..d).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
                })
                .collect();
            let mut ok = true;
            for j in 0..d {
                for k in 0..j {
                    let (done, rest) = cols.split_at_mut(j);
                    let proj: Complex64 = done[k].iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                    for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                        *x -= proj * q;
                    }
                }
                let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    ok = false;
                    break;
                }
                cols[j].iter_mut().for_each(|z| *z /= norm);
            }
            if ok {
                let matrix = (0..d * d).map(|k| cols[k % d][k / d]).collect();
                return Operator { layout, matrix, unitary: true };
            }
        }
    }

    pub fn layout(&self) -> &FactorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn dagger(&self) -> Operator {
        let d = self.dim();
        let matrix = (0..d * d).map(|k| self.matrix[(k % d) * d + k / d].conj()).collect();
        Operator { layout: self.layout.clone(), matrix, unitary: self.unitary }
    }

    /// Matrix product `self · rhs`; both must share the layout.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        if self.layout != rhs.layout {
            return Err(HilbertError::Layout("operator layouts differ".into()));
        }
        let d = self.dim();
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.matrix[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    matrix[i * d + j] += a * rhs.matrix[k * d + j];
                }
            }
        }
        Ok(Operator { layout: self.layout.clone(), matrix, unitary: self.unitary && rhs.unitary })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        if self.layout != rhs.layout {
            return Err(HilbertError::Layout("operator layouts differ".into()));
        }
        let matrix = self.matrix.iter().zip(&rhs.matrix).map(|(a, b)| a + b).collect();
        Ok(Operator { layout: self.layout.clone(), matrix, unitary: false })
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Operator {
            layout: self.layout.clone(),
            matrix: self.matrix.iter().map(|z| z * c).collect(),
            unitary: self.unitary && (c.norm() - 1.0).abs() <= TOL,
        }
    }

    /// `self ⊗ rhs` over the concatenated layout.
    pub fn tensor(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        let layout = self.layout.concat(&rhs.layout)?;
        let (da, db) = (self.dim(), rhs.dim());
        let d = da * db;
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                matrix[i * d + j] = self.get(i / db, j / db) * rhs.get(i % db, j % db);
            }
        }
        Ok(Operator { layout, matrix, unitary: self.unitary && rhs.unitary })
    }

    /// Lifts the operator into `full`, acting as identity on factors not named
    /// in this operator's layout. Factor dimensions must match by name.
    pub fn embed(&self, full: &FactorLayout) -> Result<Operator, HilbertError> {
        let on: Vec<&str> = self.layout.names().collect();
        for f in self.layout.factors() {
            match full.factor_dim(&f.name) {
                Some(d) if d == f.dim => {}
                Some(d) => return Err(HilbertError::DimensionMismatch { expected: f.dim, found: d }),
                None => return Err(HilbertError::Layout(format!("unknown factor `{}`", f.name))),
            }
        }
        let idx = SubsystemIndex::new(full, &on)?;
        let d = full.dim();
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for (j, &off) in idx.offset.iter().enumerate() {
                let k = idx.base_of[i] + off;
                matrix[i * d + k] = self.get(idx.sub_of[i], j);
            }
        }
        Ok(Operator { layout: full.clone(), matrix, unitary: self.unitary })
    }

    /// Same matrix relabelled onto differently named factors of equal dims.
    pub fn relabel(&self, names: &[&str]) -> Result<Operator, HilbertError> {
        if names.len() != self.layout.factors().len() {
            return Err(HilbertError::Layout("relabel needs one name per factor".into()));
        }
        let layout = FactorLayout::new(names.iter().zip(self.layout.factors()).map(|(n, f)| (*n, f.dim)))?;
        Ok(Operator { layout, matrix: self.matrix.clone(), unitary: self.unitary })
    }

    fn max_deviation(&self, other: &[Complex64]) -> f64 {
        self.matrix.iter().zip(other).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn check_unitary(&self, tol: f64) -> bool {
        let prod = self.dagger().compose(self).expect("same layout");
        prod.max_deviation(Operator::identity(self.layout.clone()).matrix()) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_deviation(self.dagger().matrix()) <= tol
    }

    pub fn is_idempotent(&self, tol: f64) -> bool {
        let sq = self.compose(self).expect("same layout");
        self.max_deviation(sq.matrix()) <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.matrix.iter().all(|z| z.norm() <= tol)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.layout == other.layout && self.max_deviation(other.matrix()) <= tol
    }

    /// Rank via the trace, valid for projectors.
    pub fn projector_rank(&self) -> usize {
        let d = self.dim();
        let tr: f64 = (0..d).map(|i| self.matrix[i * d + i].re).sum();
        tr.round() as usize
    }
}
