use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SapError;

/// Non-decreasing map `g: N -> N` that enlarges the period factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "arg")]
pub enum GrowthFunction {
    /// `x -> M`.
    Constant(u64),
    /// `x -> x + 1`.
    Successor,
    /// `x -> 2x + 1`.
    Affine,
    /// `x -> values[x]` on the table, continued with slope one past its end.
    Table(Vec<u64>),
}

/// Outcome of `g*(m)`: the least `q` with `g^q(0) >= m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum GStar {
    Finite(u64),
    Infinite,
    /// More than `cap` iterations without reaching `m` or a fixpoint.
    CapExceeded(u64),
}

impl GStar {
    pub fn finite(self) -> Option<u64> {
        match self {
            GStar::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl GrowthFunction {
    /// Validates a table: non-empty and non-decreasing.
    pub fn table(values: Vec<u64>) -> Result<Self, SapError> {
        if values.is_empty() || values.windows(2).any(|w| w[0] > w[1]) {
            return Err(SapError::BadGrowthTable);
        }
        Ok(GrowthFunction::Table(values))
    }

    pub fn apply(&self, x: u64) -> Result<u64, SapError> {
        let y = match self {
            GrowthFunction::Constant(m) => Some(*m),
            GrowthFunction::Successor => x.checked_add(1),
            GrowthFunction::Affine => x.checked_mul(2).and_then(|y| y.checked_add(1)),
            GrowthFunction::Table(values) => match values.get(x as usize) {
                Some(&v) => Some(v),
                None => {
                    let last = values.len() as u64 - 1;
                    values[last as usize].checked_add(x - last)
                }
            },
        };
        y.ok_or(SapError::Overflow("growth function"))
    }

    /// `g^q(x)`.
    pub fn iterate(&self, mut x: u64, q: u64) -> Result<u64, SapError> {
        for _ in 0..q {
            let y = self.apply(x)?;
            if y == x {
                return Ok(x);
            }
            x = y;
        }
        Ok(x)
    }

    /// Whether `x < g(x)` for every `x`.
    pub fn is_inflationary(&self) -> bool {
        match self {
            GrowthFunction::Constant(_) => false,
            GrowthFunction::Successor | GrowthFunction::Affine => true,
            // Past the end the slope-one continuation inherits the last entry's margin.
            GrowthFunction::Table(values) => {
                values.iter().enumerate().all(|(x, &v)| (x as u64) < v)
            }
        }
    }

    pub fn g_star(&self, m: u64, cap: u64) -> GStar {
        if m == 0 {
            return GStar::Finite(0);
        }
        if let GrowthFunction::Constant(c) = self {
            return if m <= *c {
                GStar::Finite(1)
            } else {
                GStar::Infinite
            };
        }
        let mut x = 0u64;
        let mut q = 0u64;
        while x < m {
            if q == cap {
                return GStar::CapExceeded(cap);
            }
            let Ok(y) = self.apply(x) else {
                return GStar::CapExceeded(cap);
            };
            // A non-decreasing map that stops increasing never increases again.
            if y <= x {
                return GStar::Infinite;
            }
            x = y;
            q += 1;
        }
        GStar::Finite(q)
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::Constant(m) => write!(f, "constant:{m}"),
            GrowthFunction::Successor => write!(f, "successor"),
            GrowthFunction::Affine => write!(f, "affine"),
            GrowthFunction::Table(values) => {
                let parts: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for GrowthFunction {
    type Err = SapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SapError::BadGrowthSpec(s.to_string());
        match s.split_once(':') {
            None if s == "successor" => Ok(GrowthFunction::Successor),
            None if s == "affine" => Ok(GrowthFunction::Affine),
            Some(("constant", m)) => Ok(GrowthFunction::Constant(m.parse().map_err(|_| bad())?)),
            Some(("table", vs)) => {
                let values = vs
                    .split(',')
                    .map(|v| v.trim().parse().map_err(|_| bad()))
                    .collect::<Result<Vec<u64>, _>>()?;
                GrowthFunction::table(values)
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_star_examples() {
        assert_eq!(GrowthFunction::Constant(5).g_star(3, 100), GStar::Finite(1));
        assert_eq!(GrowthFunction::Constant(5).g_star(6, 100), GStar::Infinite);
        for g in [
            GrowthFunction::Constant(2),
            GrowthFunction::Successor,
            GrowthFunction::Affine,
        ] {
            assert_eq!(g.g_star(0, 100), GStar::Finite(0));
        }
        assert_eq!(GrowthFunction::Successor.g_star(4, 100), GStar::Finite(4));
        // 0, 1, 3, 7, 15
        assert_eq!(GrowthFunction::Affine.g_star(8, 100), GStar::Finite(4));
        assert_eq!(
            GrowthFunction::Successor.g_star(50, 10),
            GStar::CapExceeded(10)
        );
    }

    #[test]
    fn table_semantics() {
        let t = GrowthFunction::table(vec![2, 2, 5]).unwrap();
        assert_eq!(t.apply(1).unwrap(), 2);
        assert_eq!(t.apply(4).unwrap(), 7);
        assert!(t.is_inflationary());
        assert_eq!(t.g_star(3, 100), GStar::Finite(2));
        let flat = GrowthFunction::table(vec![2, 2, 2]).unwrap();
        assert!(!flat.is_inflationary());
        assert_eq!(flat.g_star(3, 100), GStar::Infinite);
        assert!(GrowthFunction::table(vec![3, 1]).is_err());
        assert!(GrowthFunction::table(vec![1, 3, 4])
            .unwrap()
            .is_inflationary());
    }

    #[test]
    fn iterate_and_overflow() {
        assert_eq!(GrowthFunction::Successor.iterate(2, 2).unwrap(), 4);
        assert_eq!(GrowthFunction::Constant(7).iterate(0, 50).unwrap(), 7);
        assert!(matches!(
            GrowthFunction::Affine.iterate(1, 70),
            Err(SapError::Overflow(_))
        ));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["constant:4", "successor", "affine", "table:1,3,4"] {
            let g: GrowthFunction = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("constant:x".parse::<GrowthFunction>().is_err());
        assert!("quadratic".parse::<GrowthFunction>().is_err());
    }
}
