//! The four observer pairings whose statistics are compared.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which measurement a superobserver performs on a friend's lab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    /// Read the friend's record (yields A or C).
    Ask,
    /// Undo the friend's interaction and measure the particle (yields B or D).
    Super,
}

impl Choice {
    pub const BOTH: [Choice; 2] = [Choice::Ask, Choice::Super];
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Choice::Ask => "ask",
            Choice::Super => "super",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wing {
    Alice,
    Chidi,
}

/// One of the pairs `(A,C)`, `(A,D)`, `(B,C)`, `(B,D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairId {
    AC,
    AD,
    BC,
    BD,
}

impl PairId {
    pub const ALL: [PairId; 4] = [PairId::AC, PairId::AD, PairId::BC, PairId::BD];

    /// Order used by the CHSH combination `E_AC + E_BC + E_BD - E_AD`.
    pub const CHSH_ORDER: [PairId; 4] = [PairId::AC, PairId::BC, PairId::BD, PairId::AD];

    pub fn from_choices(alice: Choice, chidi: Choice) -> PairId {
        match (alice, chidi) {
            (Choice::Ask, Choice::Ask) => PairId::AC,
            (Choice::Ask, Choice::Super) => PairId::AD,
            (Choice::Super, Choice::Ask) => PairId::BC,
            (Choice::Super, Choice::Super) => PairId::BD,
        }
    }

    pub fn alice(self) -> Choice {
        match self {
            PairId::AC | PairId::AD => Choice::Ask,
            PairId::BC | PairId::BD => Choice::Super,
        }
    }

    pub fn chidi(self) -> Choice {
        match self {
            PairId::AC | PairId::BC => Choice::Ask,
            PairId::AD | PairId::BD => Choice::Super,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairId::AC => "AC",
            PairId::AD => "AD",
            PairId::BC => "BC",
            PairId::BD => "BD",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PairId::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(s)).ok_or_else(|| format!("unknown pair `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choices_round_trip() {
        for p in PairId::ALL {
            assert_eq!(PairId::from_choices(p.alice(), p.chidi()), p);
            assert_eq!(p.name().parse::<PairId>().unwrap(), p);
        }
    }
}
