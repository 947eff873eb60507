use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Choice, PairId, Sign, Wing};

/// One run of the frame-relational model. Absent values serialize as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub a_internal: Sign,
    pub c_internal: Sign,
    pub b_choice: Choice,
    pub d_choice: Choice,
    pub b_outcome: Option<Sign>,
    pub d_outcome: Option<Sign>,
    pub a_external: Option<Sign>,
    pub c_external: Option<Sign>,
    pub a_relation: Option<Sign>,
    pub c_relation: Option<Sign>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordViolation {
    /// Presence of outcomes does not match the wing's choice.
    Presence(Wing),
    /// `external != internal × relation`.
    Product(Wing),
}

impl fmt::Display for RecordViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordViolation::Presence(w) => write!(f, "{w:?} wing: outcome presence does not match the choice"),
            RecordViolation::Product(w) => write!(f, "{w:?} wing: external != internal x relation"),
        }
    }
}

struct WingView {
    internal: Sign,
    choice: Choice,
    super_outcome: Option<Sign>,
    external: Option<Sign>,
    relation: Option<Sign>,
}

impl RunRecord {
    pub fn pair(&self) -> PairId {
        PairId::from_choices(self.b_choice, self.d_choice)
    }

    fn wing(&self, w: Wing) -> WingView {
        match w {
            Wing::Alice => WingView {
                internal: self.a_internal,
                choice: self.b_choice,
                super_outcome: self.b_outcome,
                external: self.a_external,
                relation: self.a_relation,
            },
            Wing::Chidi => WingView {
                internal: self.c_internal,
                choice: self.d_choice,
                super_outcome: self.d_outcome,
                external: self.c_external,
                relation: self.c_relation,
            },
        }
    }

    /// Checks the presence discipline and the product identity, Alice's wing
    /// first.
    pub fn check(&self) -> Result<(), RecordViolation> {
        for w in [Wing::Alice, Wing::Chidi] {
            let v = self.wing(w);
            let presence_ok = match v.choice {
                Choice::Super => v.super_outcome.is_some() && v.external.is_none() && v.relation.is_none(),
                Choice::Ask => v.super_outcome.is_none() && v.external.is_some() && v.relation.is_some(),
            };
            if !presence_ok {
                return Err(RecordViolation::Presence(w));
            }
            if let (Some(e), Some(r)) = (v.external, v.relation) {
                if e != v.internal * r {
                    return Err(RecordViolation::Product(w));
                }
            }
        }
        Ok(())
    }

    /// Value of a variable on this run, `None` when it does not exist.
    pub fn value(&self, o: Observable) -> Option<Sign> {
        match o {
            Observable::AI => Some(self.a_internal),
            Observable::AE => self.a_external,
            Observable::AR => self.a_relation,
            Observable::B => self.b_outcome,
            Observable::CI => Some(self.c_internal),
            Observable::CE => self.c_external,
            Observable::CR => self.c_relation,
            Observable::D => self.d_outcome,
        }
    }
}

/// Variables a run may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "A_I")]
    AI,
    #[serde(rename = "A_E")]
    AE,
    #[serde(rename = "A_R")]
    AR,
    B,
    #[serde(rename = "C_I")]
    CI,
    #[serde(rename = "C_E")]
    CE,
    #[serde(rename = "C_R")]
    CR,
    D,
}

impl Observable {
    pub const ALL: [Observable; 8] = [
        Observable::AI,
        Observable::AE,
        Observable::AR,
        Observable::B,
        Observable::CI,
        Observable::CE,
        Observable::CR,
        Observable::D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::AI => "A_I",
            Observable::AE => "A_E",
            Observable::AR => "A_R",
            Observable::B => "B",
            Observable::CI => "C_I",
            Observable::CE => "C_E",
            Observable::CR => "C_R",
            Observable::D => "D",
        }
    }

    /// The externally observed pair for a choice pair.
    pub fn observed_pair(p: PairId) -> (Observable, Observable) {
        let a = match p.alice() {
            Choice::Ask => Observable::AE,
            Choice::Super => Observable::B,
        };
        let c = match p.chidi() {
            Choice::Ask => Observable::CE,
            Choice::Super => Observable::D,
        };
        (a, c)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s) || o.name().replace('_', "").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown variable `{s}`"))
    }
}
