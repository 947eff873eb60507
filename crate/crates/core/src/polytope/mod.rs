//! Does a joint distribution over the outcome variables reproduce given
//! pairwise tables?
//!
//! Two exact-rational LPs answer this: one over the 16 deterministic
//! assignments of `(A, B, C, D)`, one over the 64 assignments of
//! `(A_I, A_R, B, C_I, C_R, D)` with `A_E = A_I·A_R` and `C_E = C_I·C_R`
//! standing in for `A` and `C`. The analytic CHSH test ([`fine_criterion`])
//! and a hull-membership LP in moment coordinates
//! ([`feasible_vertex_hull`]) are kept as independent cross-checks.

pub mod rational;
pub mod simplex;
mod targets;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::pairs::PairId;
use crate::Sign;
use rational::{int, Rational, RationalText};
pub use targets::{pair_vars, PairTargets, Table, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TargetError {
    #[error("table {pair} has a negative cell at {cell:?}")]
    Negative { pair: PairId, cell: (Sign, Sign) },
    #[error("table {pair} sums to {sum}, not 1")]
    NotNormalized { pair: PairId, sum: String },
    #[error("single-variable marginal of {0} differs between tables")]
    InconsistentMarginal(&'static str),
    #[error("malformed targets: {0}")]
    Parse(String),
    #[error("joint vector must have arity 4 or 6 with a matching length")]
    BadArity,
}

/// Probability vector over deterministic assignments `{±1}^arity`.
///
/// Atom index bits run most-significant first over the variables; bit 0
/// means `+1`. Arity 4 orders `(A, B, C, D)`; arity 6 orders
/// `(A_I, A_R, B, C_I, C_R, D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointAtomVector {
    arity: usize,
    probs: Vec<Rational>,
}

impl JointAtomVector {
    pub fn new(arity: usize, probs: Vec<Rational>) -> Result<Self, TargetError> {
        if !(arity == 4 || arity == 6) || probs.len() != 1 << arity {
            return Err(TargetError::BadArity);
        }
        if probs.iter().any(Signed::is_negative) {
            return Err(TargetError::Parse("negative atom weight".into()));
        }
        if !probs.iter().sum::<Rational>().is_one() {
            return Err(TargetError::Parse("atom weights do not sum to 1".into()));
        }
        Ok(JointAtomVector { arity, probs })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// Pairwise tables the distribution induces on `(A, B, C, D)`, with the
    /// composite `A_E`, `C_E` in the six-variable case. Computed by direct
    /// summation.
    pub fn induced_tables(&self) -> [Table; 4] {
        let mut tables: [Table; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero())));
        for (atom, w) in self.probs.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let vals = effective_values(self.arity, atom);
            for p in PairId::ALL {
                let (a, c) = pair_vars(p);
                tables[p.index()][vals[a.index()].index()][vals[c.index()].index()] += w;
            }
        }
        tables
    }

    pub fn reproduces(&self, t: &PairTargets) -> bool {
        &self.induced_tables() == t.tables()
    }
}

#[derive(Serialize, Deserialize)]
struct RawAtoms {
    arity: usize,
    probs: Vec<RationalText>,
}

impl Serialize for JointAtomVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawAtoms { arity: self.arity, probs: self.probs.iter().cloned().map(RationalText).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointAtomVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawAtoms::deserialize(deserializer)?;
        JointAtomVector::new(raw.arity, raw.probs.into_iter().map(|q| q.0).collect()).map_err(serde::de::Error::custom)
    }
}

fn bit(atom: usize, arity: usize, k: usize) -> Sign {
    Sign::from_index((atom >> (arity - 1 - k)) & 1)
}

/// Values of `(A, B, C, D)` for an atom; in arity 6 `A = A_I·A_R` and
/// `C = C_I·C_R`.
fn effective_values(arity: usize, atom: usize) -> [Sign; 4] {
    let b = |k| bit(atom, arity, k);
    match arity {
        4 => [b(0), b(1), b(2), b(3)],
        6 => [b(0) * b(1), b(2), b(3) * b(4), b(5)],
        _ => unreachable!("arity checked at construction"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<JointAtomVector>,
    /// Largest CHSH-form value above 2, reported when infeasible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_violation: Option<RationalText>,
}

/// `S = E(A,C) + E(B,C) + E(B,D) − E(A,D)`.
pub fn chsh_value(t: &PairTargets) -> Rational {
    t.correlator(PairId::AC) + t.correlator(PairId::BC) + t.correlator(PairId::BD) - t.correlator(PairId::AD)
}

/// All eight CHSH forms: the minus sign on each of the four terms (in
/// [`PairId::CHSH_ORDER`]), then the negations of those four. Entry 3 is
/// [`chsh_value`].
pub fn chsh_variants(t: &PairTargets) -> [Rational; 8] {
    let e = PairId::CHSH_ORDER.map(|p| t.correlator(p));
    let total: Rational = e.iter().sum();
    std::array::from_fn(|k| {
        let v = &total - int(2) * &e[k % 4];
        if k < 4 {
            v
        } else {
            -v
        }
    })
}

/// Analytic test: every CHSH form is at most 2. With consistent marginals
/// this is necessary and sufficient for a joint distribution to exist.
pub fn fine_criterion(t: &PairTargets) -> bool {
    chsh_variants(t).iter().all(|v| *v <= int(2))
}

fn max_violation(t: &PairTargets) -> Option<Rational> {
    let m = rational::max(chsh_variants(t).iter()).expect("eight values") - int(2);
    m.is_positive().then_some(m)
}

/// Equality system: one normalization row and one row per target cell.
fn cell_system(arity: usize, t: &PairTargets) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let n = 1usize << arity;
    let values: Vec<[Sign; 4]> = (0..n).map(|atom| effective_values(arity, atom)).collect();
    let mut rows = vec![vec![int(1); n]];
    let mut rhs = vec![int(1)];
    for p in PairId::ALL {
        let (a, c) = pair_vars(p);
        for x in Sign::BOTH {
            for y in Sign::BOTH {
                rows.push(
                    values
                        .iter()
                        .map(|v| if v[a.index()] == x && v[c.index()] == y { int(1) } else { int(0) })
                        .collect(),
                );
                rhs.push(t.table(p)[x.index()][y.index()].clone());
            }
        }
    }
    (rows, rhs)
}

fn solve(arity: usize, t: &PairTargets) -> FeasibilityVerdict {
    let (rows, rhs) = cell_system(arity, t);
    match simplex::find_feasible_point(&rows, &rhs) {
        Some(x) => {
            let witness = JointAtomVector::new(arity, x).expect("LP solution is a distribution");
            debug_assert!(witness.reproduces(t));
            FeasibilityVerdict { feasible: true, witness: Some(witness), max_violation: None }
        }
        None => {
            FeasibilityVerdict { feasible: false, witness: None, max_violation: max_violation(t).map(RationalText) }
        }
    }
}

/// LP over the 16 deterministic assignments of `(A, B, C, D)`.
pub fn feasible_joint_4(t: &PairTargets) -> FeasibilityVerdict {
    solve(4, t)
}

/// LP over the 64 assignments of `(A_I, A_R, B, C_I, C_R, D)`, matching
/// the targets on `(A_E, C_E)`, `(A_E, D)`, `(B, C_E)`, `(B, D)`.
pub fn feasible_joint_6(t: &PairTargets) -> FeasibilityVerdict {
    solve(6, t)
}

/// Hull-membership LP in moment coordinates: is
/// `(⟨A⟩, ⟨B⟩, ⟨C⟩, ⟨D⟩, E_AC, E_AD, E_BC, E_BD)` a convex combination of
/// the 16 deterministic vertices? Independent of the cell formulation.
pub fn feasible_vertex_hull(t: &PairTargets) -> bool {
    let vertices: Vec<[i64; 8]> = (0..16)
        .map(|atom| {
            let v = effective_values(4, atom).map(|s| i64::from(s.value()));
            let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
            [a, b, c, d, a * c, a * d, b * c, b * d]
        })
        .collect();
    let mean = |v: Var| int(2) * t.single(v) - int(1);
    let target = [
        mean(Var::A),
        mean(Var::B),
        mean(Var::C),
        mean(Var::D),
        t.correlator(PairId::AC),
        t.correlator(PairId::AD),
        t.correlator(PairId::BC),
        t.correlator(PairId::BD),
    ];
    let mut rows = vec![vec![int(1); 16]];
    let mut rhs = vec![int(1)];
    for (k, target_k) in target.into_iter().enumerate() {
        rows.push(vertices.iter().map(|v| int(v[k])).collect());
        rhs.push(target_k);
    }
    simplex::find_feasible_point(&rows, &rhs).is_some()
}

/// Lifts a four-variable witness to six variables: `A_I`, `C_I` uniform
/// and independent, `A_R = A·A_I`, `C_R = C·C_I`.
pub fn lift_witness_4_to_6(w: &JointAtomVector) -> Result<JointAtomVector, TargetError> {
    if w.arity != 4 {
        return Err(TargetError::BadArity);
    }
    let quarter = rational::ratio(1, 4);
    let mut probs = vec![Rational::zero(); 64];
    for (atom, p) in w.probs.iter().enumerate() {
        let [a, b, c, d] = effective_values(4, atom);
        for ai in Sign::BOTH {
            for ci in Sign::BOTH {
                let bits = [ai, a * ai, b, ci, c * ci, d];
                let idx = bits.iter().fold(0, |acc, s| (acc << 1) | s.index());
                probs[idx] += p * &quarter;
            }
        }
    }
    JointAtomVector::new(6, probs)
}
