//! Flower structures, the glued structure B, and the exact arithmetic that
//! shows `log_b(x + 1)` control functions break the amalgamation property a
//! dimension-measure would need. Also the three-relation gadget used to
//! realize non-orthogonality to a fixed set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::amalgamation::{free_amalgam, free_power};
use crate::budget::Budget;
use crate::control::{good_f_report, kf_member, ControlFunction};
use crate::embed::find_leq_embeddings;
use crate::error::{Error, Result};
use crate::predim::{delta, delta_all, dim, is_d_independent, is_self_sufficient};
use crate::structure::{FinStruct, Signature};

/// Shape of a flower: `n` hub points in one `S`-tuple and `petals` further
/// points, each tied to the hub by one `U`-tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowerParams {
    pub n: usize,
    pub base: u32,
    /// Normally `base^(n−1) − (n+1)`; may be overridden to probe larger flowers.
    #[serde(serialize_with = "ser_big")]
    pub petals: BigUint,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl FlowerParams {
    pub fn new(n: usize, base: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("n must be at least 3, got {n}")));
        }
        if base < 2 {
            return Err(Error::InvalidParams(format!("base must be at least 2, got {base}")));
        }
        let r = BigInt::from(hub_power(n, base)) - BigInt::from(n + 1);
        let petals = r.to_biguint().ok_or_else(|| {
            Error::InvalidParams(format!("base^(n-1) - (n+1) = {r} is negative"))
        })?;
        Ok(FlowerParams { n, base, petals })
    }

    pub fn with_petals(mut self, petals: BigUint) -> Self {
        self.petals = petals;
        self
    }

    /// `base^(n−1) − (n+1)`, the petal count the construction calls for.
    pub fn standard_petals(&self) -> BigUint {
        hub_power(self.n, self.base) - BigUint::from(self.n + 1)
    }

    pub fn signature(&self) -> Signature {
        flower_signature(self.n)
    }

    pub fn flower_points(&self) -> BigUint {
        BigUint::from(self.n) + &self.petals
    }

    pub fn flower_tuples(&self) -> BigUint {
        BigUint::one() + &self.petals
    }

    /// Points of the glued structure: the hubs, plus one fresh hub point and
    /// a full set of petals for each of the `n` flower copies.
    pub fn glued_points(&self) -> BigUint {
        BigUint::from(self.n) + BigUint::from(self.n) * (BigUint::one() + &self.petals)
    }

    pub fn glued_tuples(&self) -> BigUint {
        BigUint::from(self.n) * self.flower_tuples()
    }
}

fn hub_power(n: usize, base: u32) -> BigUint {
    BigUint::from(base).pow((n - 1) as u32)
}

pub fn flower_signature(n: usize) -> Signature {
    Signature::new([("R", 3), ("S", n), ("U", n + 1)]).expect("fixed signature is valid")
}

fn small(v: &BigUint, budget: &Budget) -> Result<usize> {
    let needed = v.to_u128().unwrap_or(u128::MAX);
    budget.check_materialize(needed)?;
    Ok(needed as usize)
}

/// The flower: points `0..n` carry `S(0, …, n−1)`; each petal `u ≥ n`
/// carries `U(0, …, n−1, u)`.
pub fn build_flower(params: &FlowerParams, budget: &Budget) -> Result<FinStruct> {
    let size = small(&params.flower_points(), budget)?;
    let n = params.n;
    let mut s = FinStruct::empty(params.signature(), size);
    let hub: Vec<usize> = (0..n).collect();
    s.insert_unchecked(1, hub.clone());
    for u in n..size {
        let mut t = hub.clone();
        t.push(u);
        s.insert_unchecked(2, t);
    }
    Ok(s)
}

/// The binding inequality of the flower: `base^(n−1) ≥ n + petals + 1`.
pub fn flower_binding(params: &FlowerParams) -> (BigUint, BigUint) {
    (
        hub_power(params.n, params.base),
        params.flower_points() + BigUint::one(),
    )
}

/// Whether the flower lies in `K_{log_base}`, decided by cases.
///
/// A subset with `j` hub points and `m` petals has `δ = j + m` when `j < n`,
/// since no tuple fits inside it, and `base^k ≥ k + 1` holds for every
/// `k ≥ 0` and base at least 2. With all `n` hub points the `S`-tuple and
/// all `m` petal tuples are inside, so `δ = n − 1` against size `n + m`; the
/// worst case is `m = petals`.
pub fn flower_kf_parametric(params: &FlowerParams) -> bool {
    let (lhs, rhs) = flower_binding(params);
    lhs >= rhs
}

/// The glued structure B: hubs `0..n`, and for each index `i` a copy of the
/// flower whose hub tuple uses the shared hubs everywhere except position
/// `i`, which gets a fresh point. All petals are fresh.
pub fn build_glued(params: &FlowerParams, budget: &Budget) -> Result<FinStruct> {
    let size = small(&params.glued_points(), budget)?;
    let n = params.n;
    let petals = params.petals.to_usize().expect("bounded by the size check");
    let mut s = FinStruct::empty(params.signature(), size);
    let mut next = n;
    for i in 0..n {
        let mut hub: Vec<usize> = (0..n).collect();
        hub[i] = next;
        next += 1;
        s.insert_unchecked(1, hub.clone());
        for _ in 0..petals {
            let mut t = hub.clone();
            t.push(next);
            next += 1;
            s.insert_unchecked(2, t);
        }
    }
    debug_assert_eq!(next, size);
    Ok(s)
}

/// One exact comparison in an hrcon report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    pub lhs: String,
    pub op: &'static str,
    pub rhs: String,
    pub pass: bool,
}

impl Check {
    fn compare<T: Ord + ToString>(
        name: &'static str,
        description: &'static str,
        lhs: T,
        op: &'static str,
        rhs: T,
    ) -> Check {
        let pass = match op {
            "=" => lhs == rhs,
            ">=" => lhs >= rhs,
            ">" => lhs > rhs,
            _ => unreachable!("unknown comparison {op}"),
        };
        Check {
            name,
            description,
            lhs: lhs.to_string(),
            op,
            rhs: rhs.to_string(),
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HrConReport {
    pub params: FlowerParams,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl fmt::Display for HrConReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            writeln!(f, "CHECK {} {} {} {} {}", c.name, c.lhs, c.op, c.rhs, verdict)?;
        }
        write!(f, "OVERALL {}", if self.overall { "PASS" } else { "FAIL" })
    }
}

/// Runs every check of the counterexample in closed form: nothing is
/// materialized, so `(10, 8)` with its 1.3·10^9-point B is instant.
pub fn verify_hrcon(n: usize, base: u32) -> Result<HrConReport> {
    let params = FlowerParams::new(n, base)?;
    let good = good_f_report(&ControlFunction::log(base)?);
    let thresholds = [
        ("goodf_free_amalgamation", "log_b admits free amalgamation (ln b >= 1)", crate::control::LN_AT_LEAST_ONE_FROM, good.free_amalgamation),
        ("goodf_dim_theorem", "log_b meets the dimension theorem bound (ln b >= 2)", crate::control::LN_AT_LEAST_TWO_FROM, good.dim_theorem),
        ("goodf_slow_growth", "log_b grows slowly: f(3x) <= f(x) + 1", crate::control::SLOW_GROWTH_FROM, good.slow_growth),
    ];
    let mut checks = Vec::new();
    for (name, description, from, flag) in thresholds {
        let c = Check::compare(name, description, base, ">=", from);
        debug_assert_eq!(c.pass, flag);
        checks.push(c);
    }

    let nb = BigInt::from(n);
    let a_points = BigInt::from(params.flower_points());
    let a_tuples = BigInt::from(params.flower_tuples());
    checks.push(Check::compare(
        "flower_delta",
        "delta(A) = points - tuples = n - 1",
        &a_points - &a_tuples,
        "=",
        &nb - 1,
    ));
    checks.push(Check::compare(
        "flower_size",
        "|A| = base^(n-1) - 1",
        a_points,
        "=",
        BigInt::from(hub_power(n, base)) - 1,
    ));
    let (lhs, rhs) = flower_binding(&params);
    checks.push(Check::compare(
        "flower_kf",
        "A in K_f: base^(n-1) >= |A| + 1",
        lhs,
        ">=",
        rhs,
    ));

    let b_points = BigInt::from(params.glued_points());
    checks.push(Check::compare(
        "glued_delta",
        "delta(B) = points - tuples = n",
        &b_points - BigInt::from(params.glued_tuples()),
        "=",
        nb.clone(),
    ));
    checks.push(Check::compare(
        "glued_size",
        "|B| = n*base^(n-1) - n(n-1)",
        b_points.clone(),
        "=",
        &nb * BigInt::from(hub_power(n, base)) - &nb * (&nb - 1),
    ));
    checks.push(Check::compare(
        "contradiction",
        "f(|B|) > delta(B): |B| + 1 > base^n",
        b_points + 1,
        ">",
        BigInt::from(base).pow(n as u32),
    ));
    let overall = checks.iter().all(|c| c.pass);
    Ok(HrConReport {
        params,
        checks,
        overall,
    })
}

/// The gadget `F`: the free amalgam of `C` and `T` over their common part
/// `A`, plus fresh points `s_i` with tuples `R(c, s_i, t_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechF {
    pub structure: FinStruct,
    /// Points of `F` carrying `C`, indexed by points of `C`.
    pub c_part: Vec<usize>,
    /// Points of `F` carrying `T`, indexed by points of `T`.
    pub t_part: Vec<usize>,
    /// The common part, sorted.
    pub a_part: Vec<usize>,
    pub s_points: Vec<usize>,
    pub c_point: usize,
    pub t_points: Vec<usize>,
}

/// Which way the extra `R`-tuples point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    /// `R(c, s_i, t_i)`
    Lemma,
    /// `R(t_i, s_i, c)`
    Reversed,
}

/// Builds `F` from `C`, `T`, the common part given as `(point of C, point of
/// T)` pairs, the point `c ∈ C∖A` and the points `t_i ∈ T∖A`.
pub fn build_tech_f(
    c: &FinStruct,
    t: &FinStruct,
    common: &[(usize, usize)],
    c_point: usize,
    t_points: &[usize],
) -> Result<TechF> {
    tech_f(c, t, common, c_point, t_points, Orientation::Lemma)
}

fn tech_f(
    c: &FinStruct,
    t: &FinStruct,
    common: &[(usize, usize)],
    c_point: usize,
    t_points: &[usize],
    orientation: Orientation,
) -> Result<TechF> {
    let pre = |m: String| Err(Error::Precondition(m));
    let r_rel = match c.signature().index_of("R") {
        Some(i) if c.signature().arity(i) == 3 => i,
        _ => return pre("signature needs a 3-ary relation R".into()),
    };
    let (a_in_c, a_in_t): (Vec<usize>, Vec<usize>) = common.iter().copied().unzip();
    c.check_points(&a_in_c)?;
    t.check_points(&a_in_t)?;
    c.check_points(&[c_point])?;
    t.check_points(t_points)?;
    if a_in_c.len() == c.size() {
        return pre("A = C".into());
    }
    if a_in_t.len() == t.size() {
        return pre("A = T".into());
    }
    if !is_self_sufficient(c, &a_in_c)? {
        return pre("A is not self-sufficient in C".into());
    }
    if !is_self_sufficient(t, &a_in_t)? {
        return pre("A is not self-sufficient in T".into());
    }
    if a_in_c.contains(&c_point) {
        return pre(format!("c = {c_point} lies in A"));
    }
    if let Some(p) = t_points.iter().find(|p| a_in_t.contains(p)) {
        return pre(format!("t = {p} lies in A"));
    }
    let parts: Vec<Vec<usize>> = t_points.iter().map(|&p| vec![p]).collect();
    if crate::structure::normalize(t_points).len() != t_points.len()
        || !is_d_independent(t, &parts, &a_in_t)?
    {
        return pre("the t points are not d-independent over A in T".into());
    }

    let am = free_amalgam(c, t, common)?;
    let mut s = am.structure.with_points(t_points.len());
    let first_s = s.size() - t_points.len();
    let s_points: Vec<usize> = (first_s..s.size()).collect();
    let f_t_points: Vec<usize> = t_points.iter().map(|&p| am.right[p]).collect();
    for (&sp, &tp) in s_points.iter().zip(&f_t_points) {
        let tuple = match orientation {
            Orientation::Lemma => vec![c_point, sp, tp],
            Orientation::Reversed => vec![tp, sp, c_point],
        };
        s.insert_unchecked(r_rel, tuple);
    }
    let mut a_part = a_in_c.clone();
    a_part.sort_unstable();
    Ok(TechF {
        structure: s,
        c_part: am.left,
        t_part: am.right,
        a_part,
        s_points,
        c_point,
        t_points: f_t_points,
    })
}

/// The gadget's conclusions, each computed directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TechFReport {
    pub a_s_self_sufficient: bool,
    pub c_self_sufficient: bool,
    pub t_self_sufficient: bool,
    pub in_kf: bool,
    /// `δ(F) = δ(C) + δ(T) − δ(A)`.
    pub delta_identity: bool,
    pub delta_f: i64,
}

impl TechFReport {
    pub fn all_hold(&self) -> bool {
        self.a_s_self_sufficient
            && self.c_self_sufficient
            && self.t_self_sufficient
            && self.in_kf
            && self.delta_identity
    }
}

pub fn verify_tech_f(g: &TechF, f: &ControlFunction, budget: &Budget) -> Result<TechFReport> {
    let s = &g.structure;
    let mut a_s = g.a_part.clone();
    a_s.extend_from_slice(&g.s_points);
    let delta_f = delta_all(s);
    let expected = delta(s, &g.c_part)? + delta(s, &g.t_part)? - delta(s, &g.a_part)?;
    Ok(TechFReport {
        a_s_self_sufficient: is_self_sufficient(s, &a_s)?,
        c_self_sufficient: is_self_sufficient(s, &g.c_part)?,
        t_self_sufficient: is_self_sufficient(s, &g.t_part)?,
        in_kf: kf_member(s, f, budget)?.member,
        delta_identity: delta_f == expected,
        delta_f,
    })
}

/// The first step of the non-orthogonality construction: `T` is the free
/// amalgam of `r` copies of `B` over `A`, `C` another copy, and the new
/// tuples are `R(b_j, s_j, b_0)` where `b_j` are the copies of `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonOrthogonalGadget {
    pub gadget: TechF,
    /// `(b_0, b_1, …, b_r)`: the copy of `b` in `C`, then its copies in `T`.
    pub witness: Vec<usize>,
}

pub fn nonorthogonal_step1(b: &FinStruct, a: &[usize], b_point: usize, r: usize) -> Result<NonOrthogonalGadget> {
    if r == 0 {
        return Err(Error::InvalidParams("r must be at least 1".into()));
    }
    b.check_points(a)?;
    b.check_points(&[b_point])?;
    if dim(b, &[a, &[b_point]].concat())? - dim(b, a)? != 1 {
        return Err(Error::Precondition("b must have dimension 1 over A".into()));
    }
    let (t, maps) = free_power(b, a, r)?;
    let common: Vec<(usize, usize)> = a.iter().map(|&p| (p, p)).collect();
    let t_points: Vec<usize> = maps.iter().map(|m| m[b_point]).collect();
    let gadget = tech_f(b, &t, &common, b_point, &t_points, Orientation::Reversed)?;
    let mut witness = vec![gadget.c_point];
    witness.extend_from_slice(&gadget.t_points);
    Ok(NonOrthogonalGadget { gadget, witness })
}

/// What a search for amalgamation solutions over flower images found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cor23Report {
    pub n: usize,
    /// Distinct images of the hub tuple under ≤-embeddings of the flower.
    pub e_size: usize,
    pub solutions: usize,
    /// Solutions that are not themselves in E.
    pub new_solutions: usize,
    /// Largest dimension of a solution's point set; compare with `n`.
    pub max_d: Option<i64>,
    /// Number of solutions per dimension.
    pub by_dimension: BTreeMap<i64, usize>,
}

/// Collects the hub tuples of all ≤-embedded copies of the flower in `tail`
/// and enumerates tuples whose every `(n−1)`-projection is a projection of
/// one of them. Purely descriptive.
pub fn cor23_search(tail: &FinStruct, params: &FlowerParams, budget: &Budget) -> Result<Cor23Report> {
    let n = params.n;
    let flower = build_flower(params, budget)?;
    if flower.signature() != tail.signature() {
        return Err(Error::SignatureMismatch);
    }
    let e: BTreeSet<Vec<usize>> = find_leq_embeddings(&flower, tail)
        .into_iter()
        .map(|emb| emb.map()[..n].to_vec())
        .collect();
    let project = |t: &[usize], skip: usize| -> Vec<usize> {
        t.iter()
            .enumerate()
            .filter_map(|(i, &p)| (i != skip).then_some(p))
            .collect()
    };
    let projections: Vec<BTreeSet<Vec<usize>>> = (0..n)
        .map(|i| e.iter().map(|t| project(t, i)).collect())
        .collect();
    let candidates = projections[n - 1].len() as u128 * tail.size() as u128;
    budget.check_enumeration("solution candidates", candidates)?;

    let mut report = Cor23Report {
        n,
        e_size: e.len(),
        solutions: 0,
        new_solutions: 0,
        max_d: None,
        by_dimension: BTreeMap::new(),
    };
    for prefix in &projections[n - 1] {
        for last in tail.points() {
            if prefix.contains(&last) {
                continue;
            }
            let mut tuple = prefix.clone();
            tuple.push(last);
            if !(0..n - 1).all(|i| projections[i].contains(&project(&tuple, i))) {
                continue;
            }
            let d = dim(tail, &tuple)?;
            report.solutions += 1;
            if !e.contains(&tuple) {
                report.new_solutions += 1;
            }
            *report.by_dimension.entry(d).or_default() += 1;
            report.max_d = Some(report.max_d.map_or(d, |m| m.max(d)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(budget_points: usize) -> Budget {
        Budget {
            subset_points: budget_points,
            ..Budget::default()
        }
    }

    #[test]
    fn flower_sizes() {
        let p = FlowerParams::new(10, 8).unwrap();
        assert_eq!(p.flower_points(), BigUint::from(134217727u64));
        assert_eq!(p.glued_points(), BigUint::from(1342177190u64));
        let f = build_flower(&FlowerParams::new(3, 3).unwrap(), &Budget::default()).unwrap();
        assert_eq!(f.size(), 8);
        assert_eq!(delta_all(&f), 2);
        let f = build_flower(&FlowerParams::new(3, 2).unwrap(), &Budget::default()).unwrap();
        assert_eq!((f.size(), f.tuple_count()), (3, 1));
        assert!(FlowerParams::new(2, 8).is_err());
        assert!(FlowerParams::new(3, 1).is_err());
    }

    #[test]
    fn large_flower_is_not_materialized() {
        let p = FlowerParams::new(10, 8).unwrap();
        assert!(matches!(
            build_flower(&p, &Budget::default()),
            Err(Error::CapExceeded { .. })
        ));
        assert!(flower_kf_parametric(&p));
    }

    #[test]
    fn extra_petal_breaks_the_flower() {
        let p = FlowerParams::new(3, 2).unwrap();
        let p1 = p.clone().with_petals(&p.petals + 1u32);
        assert!(!flower_kf_parametric(&p1));
        let s = build_flower(&p1, &Budget::default()).unwrap();
        let m = kf_member(&s, &ControlFunction::log(2).unwrap(), &Budget::default()).unwrap();
        assert!(!m.member);
        assert_eq!(m.witness, Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn glued_counts() {
        let b = build_glued(&FlowerParams::new(3, 3).unwrap(), &Budget::default()).unwrap();
        assert_eq!((b.size(), b.tuple_count()), (21, 18));
        assert_eq!(delta_all(&b), 3);
        let b = build_glued(&FlowerParams::new(3, 2).unwrap(), &Budget::default()).unwrap();
        assert_eq!((b.size(), delta_all(&b)), (6, 3));
    }

    #[test]
    fn glued_copies_are_flowers() {
        let p = FlowerParams::new(3, 3).unwrap();
        let flower = build_flower(&p, &Budget::default()).unwrap();
        let b = build_glued(&p, &Budget::default()).unwrap();
        assert_eq!(find_leq_embeddings(&flower, &b).len(), 3 * 120);
        // 3^3 >= 22, so at this size the glued structure is still in the class
        assert!(kf_member(&b, &ControlFunction::log(3).unwrap(), &big(21)).unwrap().member);
        assert!(!verify_hrcon(3, 3).unwrap().overall);
    }

    #[test]
    fn hrcon_lines() {
        let r = verify_hrcon(10, 8).unwrap();
        assert!(r.overall);
        let text = r.to_string();
        assert!(text.contains("CHECK flower_size 134217727 = 134217727 PASS"));
        assert!(text.contains("CHECK contradiction 1342177191 > 1073741824 PASS"));
        assert!(text.ends_with("OVERALL PASS"));

        let r = verify_hrcon(3, 8).unwrap();
        assert!(!r.overall);
        let last = r.checks.last().unwrap();
        assert_eq!((last.lhs.as_str(), last.rhs.as_str(), last.pass), ("187", "512", false));
        assert_eq!(r.checks.iter().filter(|c| !c.pass).count(), 1);

        let r = verify_hrcon(9, 8).unwrap();
        assert!(r.overall);
        assert_eq!(r.checks.last().unwrap().lhs, "150994873");
    }

    fn worked_example() -> TechF {
        let sig = "rel R 3\n";
        let c = FinStruct::parse(&format!("points 2\n{sig}")).unwrap();
        let t = FinStruct::parse(&format!("points 3\n{sig}")).unwrap();
        build_tech_f(&c, &t, &[(0, 0)], 1, &[1, 2]).unwrap()
    }

    #[test]
    fn worked_gadget() {
        let g = worked_example();
        assert_eq!((g.structure.size(), g.structure.tuple_count()), (6, 2));
        let rep = verify_tech_f(&g, &ControlFunction::log(8).unwrap(), &Budget::default()).unwrap();
        assert_eq!(rep.delta_f, 4);
        assert!(rep.all_hold());
    }

    #[test]
    fn gadget_with_demanding_table() {
        let g = worked_example();
        let f = ControlFunction::parse_table("0 0\n6 5\n").unwrap();
        let rep = verify_tech_f(&g, &f, &Budget::default()).unwrap();
        assert!(!rep.in_kf);
        assert!(rep.a_s_self_sufficient && rep.c_self_sufficient && rep.t_self_sufficient);
    }

    #[test]
    fn gadget_without_s_points() {
        let c = FinStruct::parse("points 2\nrel R 3\n").unwrap();
        let g = build_tech_f(&c, &c, &[(0, 0)], 1, &[]).unwrap();
        assert!(g.s_points.is_empty());
        assert_eq!(g.structure.size(), 3);
    }

    #[test]
    fn gadget_preconditions() {
        let c = FinStruct::parse("points 2\nrel R 3\n").unwrap();
        let tri = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n").unwrap();
        let err = |r: Result<TechF>| match r {
            Err(Error::Precondition(m)) => m,
            other => panic!("expected precondition error, got {other:?}"),
        };
        assert_eq!(err(build_tech_f(&c, &c, &[(0, 0), (1, 1)], 1, &[])), "A = C");
        assert_eq!(err(build_tech_f(&c, &tri, &[(0, 0)], 0, &[1])), "c = 0 lies in A");
        // in the triangle, 1 and 2 together have dimension 1 over 0
        assert_eq!(
            err(build_tech_f(&c, &tri, &[(0, 0)], 1, &[1, 2])),
            "the t points are not d-independent over A in T"
        );
        let e = FinStruct::parse("points 2\nrel E 2\n").unwrap();
        assert_eq!(
            err(build_tech_f(&e, &e, &[(0, 0)], 1, &[1])),
            "signature needs a 3-ary relation R"
        );
    }

    #[test]
    fn step_one_gadget() {
        let b = FinStruct::parse("points 2\nrel R 3\n").unwrap();
        let g = nonorthogonal_step1(&b, &[0], 1, 3).unwrap();
        assert_eq!(g.witness.len(), 4);
        let s = &g.gadget.structure;
        for (j, &sp) in g.gadget.s_points.iter().enumerate() {
            assert!(s.contains(0, &[g.witness[j + 1], sp, g.witness[0]]));
        }
        let rep = verify_tech_f(&g.gadget, &ControlFunction::log(8).unwrap(), &Budget::default()).unwrap();
        assert!(rep.all_hold());
    }

    #[test]
    fn cor23_on_a_lone_flower() {
        let p = FlowerParams::new(3, 3).unwrap();
        let flower = build_flower(&p, &Budget::default()).unwrap();
        let rep = cor23_search(&flower, &p, &Budget::default()).unwrap();
        assert_eq!(rep.e_size, 1);
        assert_eq!(rep.solutions, 1);
        assert_eq!(rep.max_d, Some(2));

        let empty = FinStruct::empty(p.signature(), 4);
        let rep = cor23_search(&empty, &p, &Budget::default()).unwrap();
        assert_eq!((rep.e_size, rep.solutions), (0, 0));
    }
}
