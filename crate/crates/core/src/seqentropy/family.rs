//! Finite index families `P_j`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqentropy::Budgets;

/// Whitelisted growth laws for `L(j)` in progression families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "law", content = "c")]
pub enum Growth {
    /// `L(j) = c`
    Constant(u64),
    /// `L(j) = j`
    Linear,
    /// `L(j) = j^2`
    Square,
    /// `L(j) = c * j`
    Scaled(u64),
}

impl Growth {
    pub fn eval(&self, j: u64) -> u64 {
        match *self {
            Growth::Constant(c) => c,
            Growth::Linear => j,
            Growth::Square => j.saturating_mul(j),
            Growth::Scaled(c) => c.saturating_mul(j),
        }
    }
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Growth::Constant(c) => write!(f, "{c}"),
            Growth::Linear => write!(f, "j"),
            Growth::Square => write!(f, "j^2"),
            Growth::Scaled(c) => write!(f, "{c}*j"),
        }
    }
}

/// Accepts `"j"`, `"j^2"` (or `"j2"`), `"c"` for an integer constant and
/// `"c*j"`.
impl FromStr for Growth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "j" => Ok(Growth::Linear),
            "j^2" | "j2" | "j*j" => Ok(Growth::Square),
            _ => {
                if let Some(c) = t.strip_suffix("*j") {
                    c.parse()
                        .map(Growth::Scaled)
                        .map_err(|_| Error::validation(format!("unknown growth law '{s}'")))
                } else {
                    t.parse()
                        .map(Growth::Constant)
                        .map_err(|_| Error::validation(format!("unknown growth law '{s}'")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FamilyKind {
    Progression { growth: Growth },
    Geometric { cap: u32, truncated: bool },
    Explicit,
}

/// Sorted set of distinct positive times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexFamily {
    pub kind: FamilyKind,
    pub j: u64,
    members: Vec<u64>,
}

impl IndexFamily {
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max(&self) -> u64 {
        *self.members.last().expect("families are nonempty")
    }

    /// `true` when a geometric family was cut below `2^{j^2}` by its cap.
    pub fn truncated(&self) -> bool {
        matches!(self.kind, FamilyKind::Geometric { truncated: true, .. })
    }

    pub fn explicit(members: Vec<u64>, budgets: &Budgets) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::validation("index family is empty"));
        }
        if members.contains(&0) {
            return Err(Error::validation("index family members must be positive"));
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("index family must be strictly increasing"));
        }
        check_size(members.len() as u64, budgets)?;
        check_power(*members.last().unwrap(), budgets)?;
        Ok(IndexFamily {
            kind: FamilyKind::Explicit,
            j: members.len() as u64,
            members,
        })
    }
}

fn check_size(n: u64, budgets: &Budgets) -> Result<()> {
    if n > budgets.max_family as u64 {
        return Err(Error::budget("family size", n, budgets.max_family as u64));
    }
    Ok(())
}

fn check_power(p: u64, budgets: &Budgets) -> Result<()> {
    if p > budgets.max_power {
        return Err(Error::budget("largest power", p, budgets.max_power));
    }
    Ok(())
}

/// `{j, 2j, ..., L(j) j}`.
pub fn make_progression_family(j: u64, growth: Growth, budgets: &Budgets) -> Result<IndexFamily> {
    if j == 0 {
        return Err(Error::validation("progression index j must be positive"));
    }
    let l = growth.eval(j);
    if l == 0 {
        return Err(Error::validation(format!("L({j}) = 0 gives an empty family")));
    }
    check_size(l, budgets)?;
    let top = l
        .checked_mul(j)
        .ok_or_else(|| Error::budget("largest power", u128::from(l) * u128::from(j), budgets.max_power))?;
    check_power(top, budgets)?;
    Ok(IndexFamily {
        kind: FamilyKind::Progression { growth },
        j,
        members: (1..=l).map(|k| k * j).collect(),
    })
}

/// `{2^j, 2^{j+1}, ..., 2^{min(j^2, cap)}}`.
pub fn make_geometric_family(j: u64, cap: u32, budgets: &Budgets) -> Result<IndexFamily> {
    if j < 2 {
        return Err(Error::validation("geometric families need j >= 2"));
    }
    let full_top = j.saturating_mul(j);
    let top = full_top.min(cap as u64);
    if top < j {
        return Err(Error::validation(format!(
            "cap {cap} is below the first exponent {j}; the family would be empty"
        )));
    }
    if top >= 64 {
        return Err(Error::budget("largest power", 1u128 << top.min(127), budgets.max_power));
    }
    check_power(1u64 << top, budgets)?;
    check_size(top - j + 1, budgets)?;
    Ok(IndexFamily {
        kind: FamilyKind::Geometric {
            cap,
            truncated: top < full_top,
        },
        j,
        members: (j..=top).map(|e| 1u64 << e).collect(),
    })
}

/// How to build `P_j` for each `j` of a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FamilyGenerator {
    Progression { growth: Growth },
    Geometric { cap: u32 },
    /// The same explicit family for every `j`.
    Explicit { members: Vec<u64> },
}

impl FamilyGenerator {
    pub fn family(&self, j: u64, budgets: &Budgets) -> Result<IndexFamily> {
        match self {
            FamilyGenerator::Progression { growth } => make_progression_family(j, *growth, budgets),
            FamilyGenerator::Geometric { cap } => make_geometric_family(j, *cap, budgets),
            FamilyGenerator::Explicit { members } => {
                let mut f = IndexFamily::explicit(members.clone(), budgets)?;
                f.j = j;
                Ok(f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budgets {
        Budgets::default()
    }

    #[test]
    fn progression_examples() {
        assert_eq!(make_progression_family(2, Growth::Constant(3), &b()).unwrap().members(), &[2, 4, 6]);
        assert_eq!(
            make_progression_family(1, Growth::Constant(5), &b()).unwrap().members(),
            &[1, 2, 3, 4, 5]
        );
        let f = make_progression_family(10, Growth::Linear, &b()).unwrap();
        assert_eq!(f.members(), &(1..=10).map(|k| 10 * k).collect::<Vec<_>>()[..]);
        assert_eq!(f.len(), 10);
    }

    #[test]
    fn progression_budget() {
        let e = make_progression_family(100, Growth::Square, &b()).unwrap_err();
        assert!(e.is_budget());
        assert!(make_progression_family(0, Growth::Linear, &b()).is_err());
    }

    #[test]
    fn geometric_examples() {
        let f = make_geometric_family(2, 4, &b()).unwrap();
        assert_eq!(f.members(), &[4, 8, 16]);
        assert!(!f.truncated());
        let f = make_geometric_family(3, 5, &b()).unwrap();
        assert_eq!(f.members(), &[8, 16, 32]);
        assert!(f.truncated());
        assert_eq!(make_geometric_family(2, 2, &b()).unwrap().members(), &[4]);
    }

    #[test]
    fn geometric_errors() {
        assert!(make_geometric_family(1, 10, &b()).is_err());
        assert!(make_geometric_family(5, 3, &b()).is_err());
        let e = make_geometric_family(5, 25, &b()).unwrap_err();
        assert!(e.is_budget());
    }

    #[test]
    fn growth_parsing() {
        assert_eq!("j".parse::<Growth>().unwrap(), Growth::Linear);
        assert_eq!("j^2".parse::<Growth>().unwrap(), Growth::Square);
        assert_eq!("3*j".parse::<Growth>().unwrap(), Growth::Scaled(3));
        assert_eq!("64".parse::<Growth>().unwrap(), Growth::Constant(64));
        assert!("j^3".parse::<Growth>().is_err());
        for g in [Growth::Linear, Growth::Square, Growth::Scaled(4), Growth::Constant(7)] {
            assert_eq!(g.to_string().parse::<Growth>().unwrap(), g);
        }
    }

    #[test]
    fn explicit_validation() {
        assert!(IndexFamily::explicit(vec![3, 1], &b()).is_err());
        assert!(IndexFamily::explicit(vec![0, 1], &b()).is_err());
        assert!(IndexFamily::explicit(vec![], &b()).is_err());
        assert_eq!(IndexFamily::explicit(vec![1, 5, 9], &b()).unwrap().max(), 9);
    }
}
