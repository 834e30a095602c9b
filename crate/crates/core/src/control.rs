//! Control functions, exact K_f membership and the good-f criteria.
//!
//! Nothing here touches floating point. `δ ≥ log_b(x + 1)` is decided as
//! `b^δ ≥ x + 1` over big naturals, and table-based functions compare
//! rationals exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::amalgamation::free_amalgam;
use crate::budget::Budget;
use crate::error::{parse_err, Error, Result};
use crate::predim::{brute, is_self_sufficient};
use crate::structure::{check_embedding, FinStruct};

/// `2 < e < 3`: integer bases `b ≥ 3` are exactly those with `ln b ≥ 1`.
pub const LN_AT_LEAST_ONE_FROM: u32 = 3;
/// `7 < e² < 8`: integer bases `b ≥ 8` are exactly those with `ln b ≥ 2`.
pub const LN_AT_LEAST_TWO_FROM: u32 = 8;
/// `f(3x) ≤ f(x) + 1` for `log_b(x+1)` means `(3 − b)x ≤ b − 1` for all `x ≥ 0`.
pub const SLOW_GROWTH_FROM: u32 = 3;

/// The growth bound defining K_f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlFunction {
    /// `f(x) = log_base(x + 1)`.
    LogBase(u32),
    /// A non-decreasing step function given by `(size, bound)` breakpoints.
    /// `f(x)` is the bound of the last breakpoint at or below `x`, and the
    /// first bound below the first breakpoint.
    RationalTable(Vec<(u64, BigRational)>),
}

impl ControlFunction {
    pub fn log(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidParams(format!("log base must be at least 2, got {base}")));
        }
        Ok(ControlFunction::LogBase(base))
    }

    pub fn table(entries: Vec<(u64, BigRational)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParams("table needs at least one entry".into()));
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParams("table sizes must strictly increase".into()));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidParams("table bounds must not decrease".into()));
            }
        }
        if entries.iter().any(|(_, b)| b.is_negative()) {
            return Err(Error::InvalidParams("table bounds must be non-negative".into()));
        }
        Ok(ControlFunction::RationalTable(entries))
    }

    /// Parses table text: one `size num/den` (or `size num`) per line, `#` comments.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(parse_err(i + 1, "expected `size num/den`"));
            }
            let size: u64 = toks[0]
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad size {:?}", toks[0])))?;
            let bound = parse_rational(toks[1]).map_err(|m| parse_err(i + 1, m))?;
            entries.push((size, bound));
        }
        ControlFunction::table(entries)
    }

    /// `log:<base>` or `table:<file>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        if let Some(b) = spec.strip_prefix("log:") {
            let base = b
                .parse()
                .map_err(|_| Error::InvalidParams(format!("bad log base {b:?}")))?;
            ControlFunction::log(base)
        } else if let Some(path) = spec.strip_prefix("table:") {
            ControlFunction::parse_table(&std::fs::read_to_string(path)?)
        } else {
            Err(Error::InvalidParams(format!(
                "control function must be log:<base> or table:<file>, got {spec:?}"
            )))
        }
    }

    fn table_value(entries: &[(u64, BigRational)], size: &BigUint) -> BigRational {
        let mut value = &entries[0].1;
        for (s, b) in entries {
            if BigUint::from(*s) <= *size {
                value = b;
            } else {
                break;
            }
        }
        value.clone()
    }

    /// Exact `delta ≥ f(size)`.
    pub fn holds_at_big(&self, delta: &BigInt, size: &BigUint) -> bool {
        match self {
            ControlFunction::LogBase(base) => {
                if delta.is_negative() {
                    return false;
                }
                let Some(exp) = delta.to_u32() else {
                    // a huge exponent dwarfs any size we can hold
                    return true;
                };
                BigUint::from(*base).pow(exp) >= size + 1u32
            }
            ControlFunction::RationalTable(entries) => {
                BigRational::from_integer(delta.clone()) >= Self::table_value(entries, size)
            }
        }
    }

    pub fn holds_at(&self, delta: i64, size: u64) -> bool {
        self.holds_at_big(&BigInt::from(delta), &BigUint::from(size))
    }

    /// Least integer δ with `δ ≥ f(size)` (and `δ ≥ 1` once `size ≥ 1`, the K_0 condition).
    fn required(&self, size: usize) -> i64 {
        let mut d: i64 = if size == 0 { 0 } else { 1 };
        if size == 0 {
            // f(0) may be positive for tables
            while !self.holds_at(d, 0) {
                d += 1;
            }
            return d;
        }
        while !self.holds_at(d, size as u64) {
            d += 1;
        }
        d
    }
}

fn parse_rational(tok: &str) -> std::result::Result<BigRational, String> {
    let (n, d) = tok.split_once('/').unwrap_or((tok, "1"));
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {tok:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {tok:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {tok:?}"));
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlFunction::LogBase(b) => write!(f, "log:{b}"),
            ControlFunction::RationalTable(e) => write!(f, "table[{} entries]", e.len()),
        }
    }
}

impl FromStr for ControlFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ControlFunction::from_spec(s)
    }
}

/// Outcome of an exhaustive K_f check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KfMembership {
    pub member: bool,
    /// Lexicographically least violating subset among those of minimum size.
    pub witness: Option<Vec<usize>>,
}

/// Exhaustive `S ∈ K_f`: every subset `X` has `δ(X) ≥ f(|X|)`, and every
/// non-empty subset has positive δ.
pub fn kf_member(s: &FinStruct, f: &ControlFunction, budget: &Budget) -> Result<KfMembership> {
    budget.check_subset_points(s.size())?;
    if s.size() > 63 {
        return Err(Error::CapExceeded {
            what: "exhaustive subset enumeration (points)",
            needed: s.size() as u128,
            cap: 63,
        });
    }
    let n = s.size();
    let masks = brute::tuple_masks(s);
    for k in 0..=n {
        let need = f.required(k);
        if need <= k as i64 - masks.len() as i64 {
            continue;
        }
        // k-subsets in lexicographic order of their sorted point lists
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let set = idx.iter().fold(0u64, |m, &p| m | 1 << p);
            let inside = masks.iter().filter(|&&t| t & set == t).count() as i64;
            if (k as i64) - inside < need {
                return Ok(KfMembership {
                    member: false,
                    witness: Some(idx),
                });
            }
            // advance to the next combination
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < n - k + i {
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    Ok(KfMembership {
        member: true,
        witness: None,
    })
}

/// Which good-f criteria a control function meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoodFReport {
    /// `f' ≤ 1/(x+1)`, non-increasing: K_f has free ≤-amalgamation.
    pub free_amalgamation: bool,
    /// `f' ≤ 1/(2(x+1))`: the dimension comparison theorem applies.
    pub dim_theorem: bool,
    /// `f(3x) ≤ f(x) + 1`.
    pub slow_growth: bool,
    /// False for tables, whose flags only record sampled necessary conditions.
    pub authoritative: bool,
}

/// Good-f flags. Exact for `log:b`; for tables only necessary conditions at
/// the breakpoints are tested (slope bounds via `ln z ≤ z − 1`).
pub fn good_f_report(f: &ControlFunction) -> GoodFReport {
    match f {
        ControlFunction::LogBase(b) => GoodFReport {
            free_amalgamation: *b >= LN_AT_LEAST_ONE_FROM,
            dim_theorem: *b >= LN_AT_LEAST_TWO_FROM,
            slow_growth: *b >= SLOW_GROWTH_FROM,
            authoritative: true,
        },
        ControlFunction::RationalTable(entries) => {
            // f(y) − f(x) ≤ ∫ dt/(c(t+1)) = ln((y+1)/(x+1))/c ≤ (y − x)/(c(x+1))
            let slope_ok = |c: u32| {
                entries.windows(2).all(|w| {
                    let (x, fx) = (&w[0].0, &w[0].1);
                    let (y, fy) = (&w[1].0, &w[1].1);
                    let rhs = BigRational::new(
                        BigInt::from(y - x),
                        BigInt::from(c) * BigInt::from(x + 1),
                    );
                    fy - fx <= rhs
                })
            };
            let slow = entries.iter().all(|(x, _)| {
                let at = |v: u64| ControlFunction::table_value(entries, &BigUint::from(v));
                at(3 * x) <= at(*x) + BigRational::one()
            });
            GoodFReport {
                free_amalgamation: slope_ok(1),
                dim_theorem: slope_ok(2),
                slow_growth: slow,
                authoritative: false,
            }
        }
    }
}

/// Result of building `A1 ⊔_{A0} A2` and checking the free ≤-amalgamation conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmalgamationCheck {
    pub left_self_sufficient: bool,
    pub right_self_sufficient: bool,
    pub amalgam_in_kf: bool,
    #[serde(skip)]
    pub amalgam: FinStruct,
}

impl AmalgamationCheck {
    pub fn holds(&self) -> bool {
        self.left_self_sufficient && self.right_self_sufficient && self.amalgam_in_kf
    }
}

/// Checks one instance of free ≤-amalgamation. `into_left` and `into_right`
/// embed `a0` into `a1` and `a2`.
pub fn check_free_amalgamation_instance(
    a0: &FinStruct,
    a1: &FinStruct,
    a2: &FinStruct,
    into_left: &[usize],
    into_right: &[usize],
    f: &ControlFunction,
    budget: &Budget,
) -> Result<AmalgamationCheck> {
    let pre = |m: &str, e: Error| Error::Precondition(format!("{m}: {e}"));
    check_embedding(a0, a1, into_left).map_err(|e| pre("A0 does not embed in A1", e))?;
    check_embedding(a0, a2, into_right).map_err(|e| pre("A0 does not embed in A2", e))?;
    if !is_self_sufficient(a1, into_left)? {
        return Err(Error::Precondition("A0 is not self-sufficient in A1".into()));
    }
    if !is_self_sufficient(a2, into_right)? {
        return Err(Error::Precondition("A0 is not self-sufficient in A2".into()));
    }
    if !kf_member(a1, f, budget)?.member {
        return Err(Error::Precondition("A1 is not in K_f".into()));
    }
    if !kf_member(a2, f, budget)?.member {
        return Err(Error::Precondition("A2 is not in K_f".into()));
    }
    let glue: Vec<(usize, usize)> = into_left.iter().copied().zip(into_right.iter().copied()).collect();
    let am = free_amalgam(a1, a2, &glue)?;
    Ok(AmalgamationCheck {
        left_self_sufficient: is_self_sufficient(&am.structure, &am.left)?,
        right_self_sufficient: is_self_sufficient(&am.structure, &am.right)?,
        amalgam_in_kf: kf_member(&am.structure, f, budget)?.member,
        amalgam: am.structure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow8(e: u32) -> u64 {
        8u64.pow(e)
    }

    #[test]
    fn flower_bound_is_tight() {
        let f = ControlFunction::log(8).unwrap();
        assert!(f.holds_at(9, pow8(9) - 1));
        assert!(!f.holds_at(9, pow8(9)));
        assert!(f.holds_at(0, 0));
        assert!(!f.holds_at(10, 10 * pow8(9) - 90));
        assert!(!f.holds_at(-1, 0));
    }

    #[test]
    fn log_thresholds_match_constants() {
        let e = std::f64::consts::E;
        assert!(2.0 < e && e < LN_AT_LEAST_ONE_FROM as f64);
        assert!(7.0 < e * e && e * e < LN_AT_LEAST_TWO_FROM as f64);
    }

    #[test]
    fn good_f_flags() {
        let flags = |b| {
            let r = good_f_report(&ControlFunction::log(b).unwrap());
            (r.free_amalgamation, r.dim_theorem, r.slow_growth)
        };
        assert_eq!(flags(8), (true, true, true));
        assert_eq!(flags(3), (true, false, true));
        assert_eq!(flags(2), (false, false, false));
        assert_eq!(flags(7), (true, false, true));
    }

    #[test]
    fn slow_growth_closed_form_matches_sampling() {
        // (3 − b)x ≤ b − 1 for all x ≥ 0 iff b ≥ 3; sample the raw inequality 3x+1 ≤ b(x+1)
        for b in 2u64..12 {
            let sampled = (0u64..1000).all(|x| 3 * x + 1 <= b * (x + 1));
            assert_eq!(sampled, b >= SLOW_GROWTH_FROM as u64, "b = {b}");
        }
    }

    #[test]
    fn kf_examples() {
        let budget = Budget::default();
        let f = ControlFunction::log(8).unwrap();
        let empty = FinStruct::parse("points 0").unwrap();
        assert!(kf_member(&empty, &f, &budget).unwrap().member);

        let two = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\nR 1 0 2\n").unwrap();
        assert!(kf_member(&two, &f, &budget).unwrap().member);
        let three = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\nR 1 0 2\nR 2 1 0\n").unwrap();
        let m = kf_member(&three, &f, &budget).unwrap();
        assert!(!m.member);
        assert_eq!(m.witness, Some(vec![0, 1, 2]));
    }

    #[test]
    fn kf_witness_is_smallest_then_lexicographic() {
        // two disjoint overloaded pairs; the first in lexicographic order is reported
        let s = FinStruct::parse("points 5\nrel E 2\nE 3 4\nE 4 3\nE 1 2\nE 2 1\n").unwrap();
        let m = kf_member(&s, &ControlFunction::log(8).unwrap(), &Budget::default()).unwrap();
        assert_eq!(m.witness, Some(vec![1, 2]));
    }

    #[test]
    fn kf_respects_cap() {
        let big = FinStruct::parse("points 21").unwrap();
        assert!(matches!(
            kf_member(&big, &ControlFunction::log(8).unwrap(), &Budget::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn table_functions() {
        let t = ControlFunction::parse_table("# f\n0 0\n4 1/2\n10 2\n").unwrap();
        assert!(t.holds_at(0, 0));
        assert!(!t.holds_at(0, 4));
        assert!(t.holds_at(1, 9));
        assert!(!t.holds_at(1, 10));
        assert!(t.holds_at(2, 1000));
        assert!(ControlFunction::parse_table("3 1\n2 1\n").is_err());
        assert!(ControlFunction::parse_table("1 2\n2 1\n").is_err());
        assert!(ControlFunction::parse_table("1 1/0\n").is_err());
        let r = good_f_report(&t);
        assert!(!r.authoritative);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            "log:8".parse::<ControlFunction>().unwrap(),
            ControlFunction::LogBase(8)
        );
        assert!("log:1".parse::<ControlFunction>().is_err());
        assert!("exp:2".parse::<ControlFunction>().is_err());
    }

    #[test]
    fn amalgamating_two_triangles() {
        let s1 = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n").unwrap();
        let point = FinStruct::parse("points 1\nrel R 3\n").unwrap();
        let f = ControlFunction::log(8).unwrap();
        let c = check_free_amalgamation_instance(&point, &s1, &s1, &[0], &[0], &f, &Budget::default())
            .unwrap();
        assert!(c.holds());
        assert_eq!(c.amalgam.size(), 5);

        // A0 = A1: the amalgam is A2 again
        let c = check_free_amalgamation_instance(&s1, &s1, &s1, &[0, 1, 2], &[0, 1, 2], &f, &Budget::default())
            .unwrap();
        assert!(c.holds());
        assert_eq!(c.amalgam, s1);
    }

    #[test]
    fn amalgamation_preconditions_are_distinct() {
        let s2 = FinStruct::parse("points 4\nrel R 3\nR 0 1 2\nR 0 1 3\n").unwrap();
        let pair = FinStruct::parse("points 2\nrel R 3\n").unwrap();
        let f = ControlFunction::log(8).unwrap();
        let err = check_free_amalgamation_instance(&pair, &s2, &s2, &[0, 1], &[0, 1], &f, &Budget::default())
            .unwrap_err();
        assert_eq!(err, Error::Precondition("A0 is not self-sufficient in A1".into()));
    }
}
