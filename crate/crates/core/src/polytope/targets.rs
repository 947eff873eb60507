use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{self, int, ratio, Rational, RationalText};
use super::TargetError;
use crate::pairs::{Choice, PairId};
use crate::scenarios::BornTable;
use crate::Sign;

/// `table[x][y]` = P(first = x, second = y), index 0 = `+1`.
pub type Table = [[Rational; 2]; 2];

/// Outcome variables of the four-variable problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A,
    B,
    C,
    D,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::A, Var::B, Var::C, Var::D];

    pub fn name(self) -> &'static str {
        match self {
            Var::A => "A",
            Var::B => "B",
            Var::C => "C",
            Var::D => "D",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Members of a pair, Alice's side first.
pub fn pair_vars(p: PairId) -> (Var, Var) {
    let a = if p.alice() == Choice::Ask { Var::A } else { Var::B };
    let c = if p.chidi() == Choice::Ask { Var::C } else { Var::D };
    (a, c)
}

/// The four pairwise outcome tables, validated: non-negative, normalized,
/// and with single-variable marginals that agree across tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTargets {
    tables: [Table; 4],
}

fn zero_table() -> Table {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()))
}

impl PairTargets {
    pub fn new(tables: [Table; 4]) -> Result<Self, TargetError> {
        for p in PairId::ALL {
            let t = &tables[p.index()];
            for (x, row) in t.iter().enumerate() {
                for (y, v) in row.iter().enumerate() {
                    if v.is_negative() {
                        return Err(TargetError::Negative {
                            pair: p,
                            cell: (Sign::from_index(x), Sign::from_index(y)),
                        });
                    }
                }
            }
            let sum: Rational = t.iter().flatten().sum();
            if !sum.is_one() {
                return Err(TargetError::NotNormalized { pair: p, sum: rational::format(&sum) });
            }
        }
        let targets = PairTargets { tables };
        for v in Var::ALL {
            let mut seen: Option<Rational> = None;
            for p in PairId::ALL {
                if let Some(m) = targets.single_from(p, v) {
                    match &seen {
                        Some(prev) if *prev != m => return Err(TargetError::InconsistentMarginal(v.name())),
                        _ => seen = Some(m),
                    }
                }
            }
        }
        Ok(targets)
    }

    /// `P(v = +1)` as implied by the table for `p`, if `v` belongs to `p`.
    fn single_from(&self, p: PairId, v: Var) -> Option<Rational> {
        let t = &self.tables[p.index()];
        let (a, c) = pair_vars(p);
        if v == a {
            Some(&t[0][0] + &t[0][1])
        } else if v == c {
            Some(&t[0][0] + &t[1][0])
        } else {
            None
        }
    }

    pub fn table(&self, p: PairId) -> &Table {
        &self.tables[p.index()]
    }

    pub fn tables(&self) -> &[Table; 4] {
        &self.tables
    }

    /// `P(v = +1)`.
    pub fn single(&self, v: Var) -> Rational {
        PairId::ALL.into_iter().find_map(|p| self.single_from(p, v)).expect("every variable is in two pairs")
    }

    /// `E = Σ x·y·p(x, y)`.
    pub fn correlator(&self, p: PairId) -> Rational {
        let t = self.table(p);
        &t[0][0] + &t[1][1] - &t[0][1] - &t[1][0]
    }

    /// Tables from moments: `⟨A⟩, ⟨B⟩, ⟨C⟩, ⟨D⟩` and the four correlators
    /// indexed by [`PairId::index`]; `p(x, y) = (1 + x⟨X⟩ + y⟨Y⟩ + xy E)/4`.
    pub fn from_moments(means: &[Rational; 4], correlators: &[Rational; 4]) -> Result<Self, TargetError> {
        let quarter = ratio(1, 4);
        let mut tables: [Table; 4] = std::array::from_fn(|_| zero_table());
        for p in PairId::ALL {
            let (a, c) = pair_vars(p);
            for x in Sign::BOTH {
                for y in Sign::BOTH {
                    let (xs, ys) = (int(x.value().into()), int(y.value().into()));
                    let v = (int(1)
                        + &xs * &means[a.index()]
                        + &ys * &means[c.index()]
                        + &xs * &ys * &correlators[p.index()])
                        * &quarter;
                    tables[p.index()][x.index()][y.index()] = v;
                }
            }
        }
        Self::new(tables)
    }

    /// Unbiased marginals with the given correlators, each rounded to the
    /// nearest multiple of 10^-6.
    pub fn from_correlators(e: [f64; 4]) -> Result<Self, TargetError> {
        let correlators = e
            .iter()
            .map(|&x| rational::from_f64_rounded(x).ok_or(TargetError::Parse("non-finite correlator".into())))
            .collect::<Result<Vec<_>, _>>()?;
        let zero: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        Self::from_moments(&zero, &correlators.try_into().expect("four values"))
    }

    /// Rationalizes floating Born tables: each variable's `P(+1)` and each
    /// table's `p(+,+)` are rounded to 10^-6; the other cells follow, so
    /// single marginals agree exactly.
    pub fn from_born_tables(tables: &[BornTable; 4]) -> Result<Self, TargetError> {
        let round = |x: f64| rational::from_f64_rounded(x).ok_or(TargetError::Parse("non-finite probability".into()));
        let mut singles: [Option<Rational>; 4] = Default::default();
        for p in PairId::ALL {
            let t = &tables[p.index()];
            let (a, c) = pair_vars(p);
            if singles[a.index()].is_none() {
                singles[a.index()] = Some(round(t[0][0] + t[0][1])?);
            }
            if singles[c.index()].is_none() {
                singles[c.index()] = Some(round(t[0][0] + t[1][0])?);
            }
        }
        let mut out: [Table; 4] = std::array::from_fn(|_| zero_table());
        for p in PairId::ALL {
            let (a, c) = pair_vars(p);
            let pa = singles[a.index()].clone().expect("set above");
            let pc = singles[c.index()].clone().expect("set above");
            let pp = round(tables[p.index()][0][0])?;
            let t = &mut out[p.index()];
            t[0][1] = &pa - &pp;
            t[1][0] = &pc - &pp;
            t[1][1] = int(1) - &pa - &pc + &pp;
            t[0][0] = pp;
        }
        Self::new(out)
    }

    /// Every cell `1/4`.
    pub fn uniform() -> Self {
        let q = ratio(1, 4);
        Self::new(std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| q.clone()))))
            .expect("uniform tables are valid")
    }

    /// Maximal-violation targets: `E = ±√2/2` (rounded), `S ≈ 2√2`.
    pub fn tsirelson() -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let mut e = [c; 4];
        e[PairId::AD.index()] = -c;
        Self::from_correlators(e).expect("valid")
    }

    /// Independent coins with the given `P(+1)` for `A, B, C, D`.
    pub fn product(p_plus: &[Rational; 4]) -> Result<Self, TargetError> {
        let mut tables: [Table; 4] = std::array::from_fn(|_| zero_table());
        for p in PairId::ALL {
            let (a, c) = pair_vars(p);
            for x in Sign::BOTH {
                for y in Sign::BOTH {
                    let pick = |v: Var, s: Sign| {
                        let q = &p_plus[v.index()];
                        if s == Sign::Plus {
                            q.clone()
                        } else {
                            int(1) - q
                        }
                    };
                    tables[p.index()][x.index()][y.index()] = pick(a, x) * pick(c, y);
                }
            }
        }
        Self::new(tables)
    }

    /// Random valid targets on a grid: means are multiples of `1/den` and
    /// each correlator is a multiple of `1/(2·den)` of its admissible range.
    /// Means are zero half the time.
    pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, den: i64) -> Self {
        let means: [Rational; 4] =
            std::array::from_fn(|_| if rng.random() { int(0) } else { ratio(rng.random_range(-den..=den), den) });
        let correlators = std::array::from_fn(|k| {
            let (a, c) = pair_vars(PairId::ALL[k]);
            let (ma, mc) = (&means[a.index()], &means[c.index()]);
            let lo = (ma + mc).abs() - int(1);
            let hi = int(1) - (ma - mc).abs();
            let j = rng.random_range(0..=2 * den);
            &lo + (&hi - &lo) * ratio(j, 2 * den)
        });
        Self::from_moments(&means, &correlators).expect("correlators within range")
    }

    /// Cell-wise `λ·t + (1-λ)·uniform`, `λ ∈ [0, 1]`.
    pub fn mix_uniform(&self, lambda: &Rational) -> Result<Self, TargetError> {
        if lambda.is_negative() || *lambda > int(1) {
            return Err(TargetError::Parse("mixing weight outside [0, 1]".into()));
        }
        let rest = (int(1) - lambda) * ratio(1, 4);
        let tables = std::array::from_fn(|k| {
            std::array::from_fn(|x| std::array::from_fn(|y| lambda * &self.tables[k][x][y] + &rest))
        });
        Self::new(tables)
    }
}

type RawTables = BTreeMap<String, [[RationalText; 2]; 2]>;

impl Serialize for PairTargets {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw: RawTables = PairId::ALL
            .into_iter()
            .map(|p| {
                let t = self.table(p);
                (p.name().to_string(), std::array::from_fn(|x| std::array::from_fn(|y| RationalText(t[x][y].clone()))))
            })
            .collect();
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PairTargets {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawTables::deserialize(deserializer)?;
        PairTargets::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

impl PairTargets {
    fn from_raw(mut raw: RawTables) -> Result<Self, TargetError> {
        let mut tables: [Table; 4] = std::array::from_fn(|_| zero_table());
        for p in PairId::ALL {
            let t = raw.remove(p.name()).ok_or_else(|| TargetError::Parse(format!("missing table `{}`", p.name())))?;
            tables[p.index()] = t.map(|row| row.map(|q| q.0));
        }
        if let Some(extra) = raw.keys().next() {
            return Err(TargetError::Parse(format!("unknown table `{extra}`")));
        }
        Self::new(tables)
    }

    /// Parses the targets JSON schema, keeping input errors typed.
    pub fn from_json(text: &str) -> Result<Self, TargetError> {
        let raw: RawTables = serde_json::from_str(text).map_err(|e| TargetError::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_grid_targets_are_valid_and_varied() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let all: Vec<PairTargets> = (0..200).map(|_| PairTargets::random_grid(&mut rng, 8)).collect();
        let violating = all.iter().filter(|t| !crate::polytope::fine_criterion(t)).count();
        assert!(violating > 10 && violating < 190, "{violating}");
    }

    #[test]
    fn uniform_and_tsirelson_moments() {
        let u = PairTargets::uniform();
        for p in PairId::ALL {
            assert!(u.correlator(p).is_zero());
        }
        let t = PairTargets::tsirelson();
        assert_eq!(t.correlator(PairId::AC), ratio(707107, 1_000_000));
        assert_eq!(t.correlator(PairId::AD), ratio(-707107, 1_000_000));
        assert_eq!(t.single(Var::B), ratio(1, 2));
    }

    #[test]
    fn rejects_inconsistent_singles() {
        let mut tables = PairTargets::uniform().tables().clone();
        // shift A's marginal in the AC table only
        tables[PairId::AC.index()] = [[ratio(1, 2), ratio(1, 4)], [ratio(1, 8), ratio(1, 8)]];
        assert_eq!(PairTargets::new(tables), Err(TargetError::InconsistentMarginal("A")));
    }

    #[test]
    fn rejects_negative_and_unnormalized() {
        let mut tables = PairTargets::uniform().tables().clone();
        tables[1][0][0] = ratio(-1, 4);
        assert!(matches!(PairTargets::new(tables), Err(TargetError::Negative { .. })));
        let mut tables = PairTargets::uniform().tables().clone();
        tables[2][1][1] = ratio(1, 2);
        assert!(matches!(PairTargets::new(tables), Err(TargetError::NotNormalized { .. })));
    }

    #[test]
    fn json_schema() {
        let text = r#"{"AC": [["1/4","1/4"],["1/4","1/4"]], "AD": [[0.25,0.25],[0.25,0.25]],
                       "BC": [["0.25","1/4"],["1/4","1/4"]], "BD": [["1/4","1/4"],["1/4","1/4"]]}"#;
        let t = PairTargets::from_json(text).unwrap();
        assert_eq!(t, PairTargets::uniform());
        let out = serde_json::to_string(&t).unwrap();
        assert!(out.starts_with(r#"{"AC":[["1/4","1/4"],["1/4","1/4"]]"#));
        assert!(PairTargets::from_json(r#"{"AC": [["1","0"],["0","0"]]}"#).is_err());
    }

    #[test]
    fn product_targets_are_consistent() {
        let p = [ratio(3, 5), ratio(1, 3), ratio(1, 2), ratio(7, 8)];
        let t = PairTargets::product(&p).unwrap();
        for v in Var::ALL {
            assert_eq!(t.single(v), p[v.index()]);
        }
    }

    #[test]
    fn born_tables_rationalize_consistently() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let cell = |e: f64| [[(1.0 + e) / 4.0, (1.0 - e) / 4.0], [(1.0 - e) / 4.0, (1.0 + e) / 4.0]];
        let born = [cell(c), cell(-c), cell(c), cell(c)];
        assert_eq!(PairTargets::from_born_tables(&born).unwrap().single(Var::A), ratio(1, 2));
    }
}
