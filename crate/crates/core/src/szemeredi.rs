//! A finite version of the route from the amalgamation theorem to
//! arithmetic progressions, over `Z_N` with normalized counting measures.
//!
//! Tuples in `Z_N^d` are stored as codes `Σ x_i N^(d−1−i)`, so sorting codes
//! sorts tuples lexicographically.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};

/// `Z_N`, a tuple length `n ≥ 3` and a set `A ⊆ Z_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicInstance {
    modulus: u64,
    n: usize,
    set: BTreeSet<u64>,
}

impl CyclicInstance {
    pub fn new(modulus: u64, n: usize, set: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidParams(format!("modulus must be at least 2, got {modulus}")));
        }
        if n < 3 {
            return Err(Error::InvalidParams(format!("length must be at least 3, got {n}")));
        }
        let set: BTreeSet<u64> = set.into_iter().collect();
        if let Some(&a) = set.iter().find(|&&a| a >= modulus) {
            return Err(Error::InvalidParams(format!("{a} is not a residue mod {modulus}")));
        }
        if modulus.checked_pow(n as u32).is_none() {
            return Err(Error::InvalidParams("N^n does not fit in 64 bits".into()));
        }
        Ok(CyclicInstance { modulus, n, set })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn set(&self) -> &BTreeSet<u64> {
        &self.set
    }

    /// Non-prime moduli are allowed; this flags them.
    pub fn is_prime(&self) -> bool {
        let n = self.modulus;
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    pub fn contains(&self, a: u64) -> bool {
        self.set.contains(&(a % self.modulus))
    }
}

/// An explicit subset of `Z_N^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSet {
    modulus: u64,
    dim: usize,
    codes: Vec<u64>,
}

impl TupleSet {
    pub fn new(modulus: u64, dim: usize, tuples: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        let mut codes = Vec::new();
        for t in tuples {
            if t.len() != dim || t.iter().any(|&x| x >= modulus) {
                return Err(Error::InvalidParams(format!("{t:?} is not in Z_{modulus}^{dim}")));
            }
            codes.push(encode(modulus, &t));
        }
        Ok(Self::from_codes(modulus, dim, codes))
    }

    fn from_codes(modulus: u64, dim: usize, mut codes: Vec<u64>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        TupleSet { modulus, dim, codes }
    }

    /// All of `Z_N^dim`.
    pub fn full(modulus: u64, dim: usize) -> Self {
        TupleSet {
            modulus,
            dim,
            codes: (0..modulus.pow(dim as u32)).collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, t: &[u64]) -> bool {
        self.codes.binary_search(&encode(self.modulus, t)).is_ok()
    }

    /// Tuples in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        self.codes.iter().map(|&c| decode(self.modulus, self.dim, c))
    }

    /// `π_coords` of the set, coordinates listed in increasing order.
    pub fn project(&self, coords: &[usize]) -> TupleSet {
        let proj = projector(self.modulus, self.dim, coords);
        let codes = self.codes.iter().map(|&c| proj(c)).collect();
        TupleSet::from_codes(self.modulus, coords.len(), codes)
    }

    fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    fn filter_codes(&self, keep: impl FnMut(&u64) -> bool) -> TupleSet {
        TupleSet {
            modulus: self.modulus,
            dim: self.dim,
            codes: self.codes.iter().copied().filter(keep).collect(),
        }
    }

    fn difference(&self, other: &TupleSet) -> TupleSet {
        self.filter_codes(|&c| !other.contains_code(c))
    }

    fn intersection(&self, other: &TupleSet) -> TupleSet {
        self.filter_codes(|&c| other.contains_code(c))
    }
}

/// Maps the code of a `dim`-tuple to the code of its restriction to `coords`.
fn projector(modulus: u64, dim: usize, coords: &[usize]) -> impl Fn(u64) -> u64 {
    let places: Vec<u64> = coords.iter().map(|&i| modulus.pow((dim - 1 - i) as u32)).collect();
    move |code| places.iter().fold(0, |acc, &p| acc * modulus + code / p % modulus)
}

fn encode(modulus: u64, t: &[u64]) -> u64 {
    t.iter().fold(0, |acc, &x| acc * modulus + x)
}

fn decode(modulus: u64, dim: usize, mut code: u64) -> Vec<u64> {
    let mut t = vec![0; dim];
    for i in (0..dim).rev() {
        t[i] = code % modulus;
        code /= modulus;
    }
    t
}

fn pick(t: &[u64], coords: &[usize]) -> Vec<u64> {
    coords.iter().map(|&i| t[i]).collect()
}

/// All coordinates of `0..n` except `skip`.
pub fn all_but(n: usize, skip: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != skip).collect()
}

/// The normalized counting measure on `Z_N^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingMeasure {
    pub modulus: u64,
    pub dim: usize,
}

impl CountingMeasure {
    pub fn of(&self, set: &TupleSet) -> BigRational {
        debug_assert_eq!((set.modulus, set.dim), (self.modulus, self.dim));
        ratio(set.len() as u64, self.modulus, self.dim)
    }
}

fn ratio(count: u64, modulus: u64, dim: usize) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(modulus).pow(dim as u32))
}

/// `ν^d` of an explicit subset of `Z_N^d`.
pub fn nu(set: &TupleSet) -> BigRational {
    CountingMeasure {
        modulus: set.modulus,
        dim: set.dim,
    }
    .of(set)
}

/// `E = {(x_1, …, x_{n−1}, Σ x_i) : Σ i·x_i ∈ A}`.
pub fn build_e(inst: &CyclicInstance, budget: &Budget) -> Result<TupleSet> {
    let (m, n) = (inst.modulus, inst.n);
    budget.check_enumeration("points of Z_N^(n-1)", (m as u128).pow(n as u32 - 1))?;
    let mut codes = Vec::new();
    let mut x = vec![0u64; n - 1];
    loop {
        let weighted = x
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &xi)| (acc + (i as u64 + 1) * xi) % m);
        if inst.set.contains(&weighted) {
            let sum = x.iter().fold(0, |acc, &xi| (acc + xi) % m);
            codes.push(encode(m, &x) * m + sum);
        }
        // odometer over Z_N^(n-1)
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(TupleSet::from_codes(m, n, codes));
            }
            i -= 1;
            x[i] += 1;
            if x[i] < m {
                break;
            }
            x[i] = 0;
        }
    }
}

/// Conditions (a)–(c) measured on an explicit `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesesReport {
    /// `ν^J(π_J(E))`, with `J` the first `n − 1` coordinates.
    #[serde(serialize_with = "ser_rat")]
    pub a: BigRational,
    /// Largest fibre of any `(n−1)`-projection restricted to `E`.
    pub fibre_bound: usize,
    /// Largest observed `ν^J(π_J(F)) / ν^I(π_I(F))` over sampled `F ⊆ E`.
    #[serde(serialize_with = "ser_opt_rat")]
    pub k_ratio: Option<BigRational>,
    pub samples: usize,
    pub seed: u64,
}

impl HypothesesReport {
    pub fn holds(&self) -> bool {
        self.a > BigRational::zero()
    }
}

fn ser_rat<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_rat<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

fn random_subset(e: &TupleSet, rng: &mut ChaCha8Rng) -> TupleSet {
    let codes = e.codes.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    TupleSet {
        modulus: e.modulus,
        dim: e.dim,
        codes,
    }
}

/// Measures (a), checks (b) exhaustively and samples (c) on `samples`
/// random subsets of `E` drawn with `seed`.
pub fn verify_main_hypotheses(e: &TupleSet, samples: usize, seed: u64) -> HypothesesReport {
    let n = e.dim;
    let j = all_but(n, n - 1);
    let a = nu(&e.project(&j));

    let mut fibre_bound = 0;
    for skip in 0..n {
        let coords = all_but(n, skip);
        let proj = projector(e.modulus, n, &coords);
        let mut keys: Vec<u64> = e.codes.iter().map(|&c| proj(c)).collect();
        keys.sort_unstable();
        for run in keys.chunk_by(|x, y| x == y) {
            fibre_bound = fibre_bound.max(run.len());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k_ratio: Option<BigRational> = None;
    for _ in 0..samples {
        let f = random_subset(e, &mut rng);
        if f.is_empty() {
            continue;
        }
        let pj = f.project(&j).len() as u64;
        for skip in 0..n {
            let pi = f.project(&all_but(n, skip)).len() as u64;
            let r = BigRational::new(BigInt::from(pj), BigInt::from(pi));
            if k_ratio.as_ref().is_none_or(|k| r > *k) {
                k_ratio = Some(r);
            }
        }
    }
    HypothesesReport {
        a,
        fibre_bound,
        k_ratio,
        samples,
        seed,
    }
}

/// Calls `visit` on every `b̄ ∈ Z_N^n` whose `(n−1)`-projections all lie in
/// the matching projections of `E`, in lexicographic order. Nothing is
/// collected, so large instances stream in constant extra memory.
pub fn for_each_solution(
    inst: &CyclicInstance,
    e: &TupleSet,
    budget: &Budget,
    mut visit: impl FnMut(&[u64]),
) -> Result<()> {
    let (m, n) = (inst.modulus, inst.n);
    if e.modulus != m || e.dim != n {
        return Err(Error::InvalidParams("E does not live in Z_N^n".into()));
    }
    budget.check_enumeration("points of Z_N^n", (m as u128).pow(n as u32))?;
    let side = m.pow(n as u32 - 1) as usize;
    let projections: Vec<Vec<bool>> = (0..n)
        .map(|skip| {
            let mut bits = vec![false; side];
            for code in e.project(&all_but(n, skip)).codes {
                bits[code as usize] = true;
            }
            bits
        })
        .collect();
    let mut b = vec![0u64; n];
    for prefix in 0..side as u64 {
        if !projections[n - 1][prefix as usize] {
            continue;
        }
        b[..n - 1].copy_from_slice(&decode(m, n - 1, prefix));
        for last in 0..m {
            b[n - 1] = last;
            // dropping coordinate i < n−1 from b: the prefix with entry i removed, then `last`
            let ok = (0..n - 1).all(|skip| {
                let mut code = 0u64;
                for (k, &x) in b.iter().enumerate() {
                    if k != skip {
                        code = code * m + x;
                    }
                }
                projections[skip][code as usize]
            });
            if ok {
                visit(&b);
            }
        }
    }
    Ok(())
}

/// All amalgamation solutions, in lexicographic order.
pub fn solve_amalgamation(inst: &CyclicInstance, e: &TupleSet, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for_each_solution(inst, e, budget, |b| out.push(b.to_vec()))?;
    Ok(out)
}

/// The progression read off a tuple: `a = Σ_{i<n} i·b_i`, `d = b_n − Σ_{i<n} b_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub a: u64,
    pub d: u64,
    pub nondegenerate: bool,
    /// Whether `a + i·d ∈ A` for every `i < n`.
    pub valid: bool,
}

impl Progression {
    pub fn terms(&self, inst: &CyclicInstance) -> Vec<u64> {
        let m = inst.modulus;
        (0..inst.n as u64).map(|i| (self.a + i * self.d) % m).collect()
    }
}

pub fn extract_progression(inst: &CyclicInstance, b: &[u64]) -> Progression {
    let (m, n) = (inst.modulus, inst.n);
    let a = b[..n - 1]
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &x)| (acc + (i as u64 + 1) % m * (x % m)) % m);
    let sum = b[..n - 1].iter().fold(0u64, |acc, &x| (acc + x) % m);
    let d = (b[n - 1] % m + m - sum) % m;
    let valid = (0..n as u64).all(|i| inst.contains((a + i % m * d) % m));
    Progression {
        a,
        d,
        nondegenerate: d != 0,
        valid,
    }
}

/// Outcome of the inequality checks on sampled `F`, `C`, `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma26Report {
    pub samples: usize,
    pub seed: u64,
    /// Individual inequalities evaluated.
    pub checked: usize,
    /// Descriptions of failed inequalities; empty when all hold.
    pub violations: Vec<String>,
}

/// With `k = 1`, checks on each sample (`F ⊆ E`, an `I ≠ J`, and random
/// `C, B ⊆ Z_N^I`):
/// 1. `ν^J(π_J F) ≤ k ν^I(π_I F)`;
/// 2. `ν^J(π_J(F ∖ π_I^{-1} C)) ≥ ν^J(π_J F) − k ν^I(C ∩ π_I F)`;
/// 3. `ν^J(π_J(F ∩ π_I^{-1} B)) ≥ ν^J(π_J F) − k ν^I(π_I F ∖ B)`.
pub fn lemma26_checks(e: &TupleSet, samples: usize, seed: u64) -> Result<Lemma26Report> {
    let (m, n) = (e.modulus, e.dim);
    let side = (m as u128).pow(n as u32 - 1);
    if side > 1 << 20 {
        return Err(Error::CapExceeded {
            what: "random subsets of Z_N^(n-1)",
            needed: side,
            cap: 1 << 20,
        });
    }
    let k = BigRational::one();
    let j = all_but(n, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Lemma26Report {
        samples,
        seed,
        checked: 0,
        violations: Vec::new(),
    };
    let full = TupleSet::full(m, n - 1);
    for sample in 0..samples {
        let f = random_subset(e, &mut rng);
        let skip = rng.gen_range(0..n - 1);
        let i = all_but(n, skip);
        let c = random_subset(&full, &mut rng);
        let b = random_subset(&full, &mut rng);

        let pj_f = nu(&f.project(&j));
        let pi_f = f.project(&i);
        let proj_i = projector(m, n, &i);
        let in_c = f.filter_codes(|&t| c.contains_code(proj_i(t)));
        let lhs2 = nu(&f.difference(&in_c).project(&j));
        let rhs2 = &pj_f - &k * nu(&c.intersection(&pi_f));
        let in_b = f.filter_codes(|&t| b.contains_code(proj_i(t)));
        let lhs3 = nu(&in_b.project(&j));
        let rhs3 = &pj_f - &k * nu(&pi_f.difference(&b));

        let checks = [
            ("(1)", pj_f.clone(), &k * nu(&pi_f), false),
            ("(2)", lhs2, rhs2, true),
            ("(3)", lhs3, rhs3, true),
        ];
        for (name, lhs, rhs, geq) in checks {
            report.checked += 1;
            let ok = if geq { lhs >= rhs } else { lhs <= rhs };
            if !ok {
                let op = if geq { ">=" } else { "<=" };
                report
                    .violations
                    .push(format!("sample {sample} I = {i:?}: {name} {lhs} {op} {rhs} fails"));
            }
        }
    }
    Ok(report)
}

/// Both sides of counting Fubini for `B ⊆ Z_N^V` split along `coords`:
/// `ν^V(B)` and the average over `y ∈ Z_N^(V∖coords)` of the `ν^coords`
/// measure of the slice at `y`.
pub fn counting_fubini(set: &TupleSet, coords: &[usize]) -> (BigRational, BigRational) {
    let rest: Vec<usize> = (0..set.dim).filter(|i| !coords.contains(i)).collect();
    let mut slices: std::collections::BTreeMap<Vec<u64>, u64> = std::collections::BTreeMap::new();
    for t in set.iter() {
        *slices.entry(pick(&t, &rest)).or_default() += 1;
    }
    let mut iterated = BigRational::zero();
    for count in slices.values() {
        iterated += ratio(*count, set.modulus, coords.len());
    }
    iterated /= BigRational::from_integer(BigInt::from(set.modulus).pow(rest.len() as u32));
    (nu(set), iterated)
}

/// Options for [`run_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub samples: usize,
    pub seed: u64,
    /// How many distinct nondegenerate progressions to keep in the report.
    pub show: usize,
}

/// Everything the harness computes for one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub modulus: u64,
    pub n: usize,
    pub prime_modulus: bool,
    pub e_size: usize,
    pub hypotheses: HypothesesReport,
    pub solutions: u64,
    pub nondegenerate: u64,
    /// Solutions whose progression failed to validate; always zero unless there is a bug.
    pub invalid: u64,
    pub progressions: Vec<(Progression, Vec<u64>)>,
    pub lemma26: Option<Lemma26Report>,
}

pub fn run_pipeline(inst: &CyclicInstance, opts: &PipelineOptions, budget: &Budget) -> Result<PipelineReport> {
    let e = build_e(inst, budget)?;
    let hypotheses = verify_main_hypotheses(&e, opts.samples, opts.seed);
    let (mut solutions, mut nondegenerate, mut invalid) = (0u64, 0u64, 0u64);
    let mut progressions = Vec::new();
    let mut shown = BTreeSet::new();
    for_each_solution(inst, &e, budget, |b| {
        solutions += 1;
        let p = extract_progression(inst, b);
        if !p.valid {
            invalid += 1;
        }
        if p.nondegenerate {
            nondegenerate += 1;
            if progressions.len() < opts.show && shown.insert((p.a, p.d)) {
                let terms = p.terms(inst);
                progressions.push((p, terms));
            }
        }
    })?;
    let lemma26 = match lemma26_checks(&e, opts.samples, opts.seed) {
        Ok(r) => Some(r),
        Err(Error::CapExceeded { .. }) => None,
        Err(err) => return Err(err),
    };
    Ok(PipelineReport {
        modulus: inst.modulus,
        n: inst.n,
        prime_modulus: inst.is_prime(),
        e_size: e.len(),
        hypotheses,
        solutions,
        nondegenerate,
        invalid,
        progressions,
        lemma26,
    })
}
