//! Enumeration caps shared by every exhaustive routine.

use crate::error::{Error, Result};

/// Environment variable read by [`Budget::from_env`].
pub const BUDGET_VAR: &str = "AMALGAM_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest structure whose subsets are enumerated exhaustively.
    pub subset_points: usize,
    /// Largest number of tuples or candidates any enumeration may visit.
    pub enumeration: u64,
    /// Largest number of points a builder may materialize.
    pub materialize: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            subset_points: 20,
            enumeration: 10_000_000,
            materialize: 2_000_000,
        }
    }
}

impl Budget {
    /// Parses `AMALGAM_BUDGET`. A bare integer sets `enumeration`; otherwise a
    /// comma list of `subset_points=`, `enumeration=`, `materialize=` pairs.
    pub fn parse(spec: &str) -> Result<Budget> {
        let mut b = Budget::default();
        let bad = |m: String| Error::InvalidParams(format!("{BUDGET_VAR}: {m}"));
        if let Ok(n) = spec.trim().parse::<u64>() {
            b.enumeration = n;
            return Ok(b);
        }
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad number in {part:?}")))?;
            match k.trim() {
                "subset_points" => {
                    if v > 63 {
                        return Err(bad("subset_points must be at most 63".into()));
                    }
                    b.subset_points = v as usize
                }
                "enumeration" => b.enumeration = v,
                "materialize" => b.materialize = v,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(b)
    }

    pub fn from_env() -> Result<Budget> {
        match std::env::var(BUDGET_VAR) {
            Ok(s) => Budget::parse(&s),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub(crate) fn check_subset_points(&self, n: usize) -> Result<()> {
        if n > self.subset_points {
            return Err(Error::CapExceeded {
                what: "exhaustive subset enumeration (points)",
                needed: n as u128,
                cap: self.subset_points as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_enumeration(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.enumeration as u128 {
            return Err(Error::CapExceeded {
                what,
                needed,
                cap: self.enumeration as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_materialize(&self, needed: u128) -> Result<()> {
        if needed > self.materialize as u128 {
            return Err(Error::CapExceeded {
                what: "materialized points",
                needed,
                cap: self.materialize as u128,
            });
        }
        Ok(())
    }
}
