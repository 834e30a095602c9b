//! Finite approximations to the generic structure: chains of self-sufficient
//! extensions, algebraic closure and type comparison inside them.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amalgamation::free_amalgam;
use crate::budget::Budget;
use crate::canon::canonical_form_fixing;
use crate::control::{good_f_report, kf_member, ControlFunction};
use crate::error::{parse_err, Error, Result};
use crate::predim::{closure, in_k0, is_self_sufficient};
use crate::structure::{check_embedding, induced_substructure, Embedding, FinStruct, Signature};

/// A chain `stage_0 ≤ stage_1 ≤ …` of structures in K_f. Each link embeds a
/// stage into the next; the builders here always use the identity on the
/// older points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericChain {
    f: ControlFunction,
    stages: Vec<FinStruct>,
    links: Vec<Embedding>,
}

impl GenericChain {
    /// A chain with one stage. The stage must lie in K_f.
    pub fn new(f: ControlFunction, start: FinStruct, budget: &Budget) -> Result<Self> {
        let m = kf_member(&start, &f, budget)?;
        if let Some(witness) = m.witness {
            return Err(Error::NotInClass { witness });
        }
        Ok(GenericChain {
            f,
            stages: vec![start],
            links: Vec::new(),
        })
    }

    /// The chain whose only stage is the empty structure.
    pub fn empty(f: ControlFunction, signature: Signature) -> Self {
        GenericChain {
            f,
            stages: vec![FinStruct::empty(signature, 0)],
            links: Vec::new(),
        }
    }

    pub fn f(&self) -> &ControlFunction {
        &self.f
    }

    pub fn stages(&self) -> &[FinStruct] {
        &self.stages
    }

    pub fn links(&self) -> &[Embedding] {
        &self.links
    }

    pub fn tail(&self) -> &FinStruct {
        self.stages.last().expect("a chain has at least one stage")
    }
}

/// Realizes one instance of the extension property: glues `b` onto the
/// tail, identifying `a[i]` with `ident[i]`.
///
/// Under a control function certified good for free amalgamation the new
/// tail is in K_f by theory. Otherwise it is checked exhaustively and the
/// extension is rejected with [`Error::NotInClass`] when it fails.
pub fn extend_chain(
    chain: &GenericChain,
    a: &[usize],
    b: &FinStruct,
    ident: &[usize],
    budget: &Budget,
) -> Result<GenericChain> {
    let tail = chain.tail();
    if a.len() != ident.len() {
        return Err(Error::InvalidParams("base and its image differ in length".into()));
    }
    tail.check_points(a)?;
    b.check_points(ident)?;
    if !is_self_sufficient(tail, a)? {
        return Err(Error::Precondition("A is not self-sufficient in the tail".into()));
    }
    if !is_self_sufficient(b, ident)? {
        return Err(Error::Precondition("the image of A is not self-sufficient in B".into()));
    }
    if let Some(witness) = kf_member(b, &chain.f, budget)?.witness {
        return Err(Error::NotInClass { witness });
    }
    let glue: Vec<(usize, usize)> = a.iter().copied().zip(ident.iter().copied()).collect();
    let am = free_amalgam(tail, b, &glue)?;
    if !good_f_report(&chain.f).free_amalgamation || !good_f_report(&chain.f).authoritative {
        if let Some(witness) = kf_member(&am.structure, &chain.f, budget)?.witness {
            return Err(Error::NotInClass { witness });
        }
    }
    let mut next = chain.clone();
    next.links.push(Embedding::from_map_unchecked(am.left));
    next.stages.push(am.structure);
    Ok(next)
}

/// A candidate for the extension property: a self-sufficient base in the
/// tail and a structure `b` whose first `base.len()` points are a copy of it,
/// in the same order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub base: Vec<usize>,
    pub b: FinStruct,
}

impl Extension {
    pub fn ident(&self) -> Vec<usize> {
        (0..self.base.len()).collect()
    }

    pub fn new_points(&self) -> usize {
        self.b.size() - self.base.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extensions {
    pub candidates: Vec<Extension>,
    /// Set when the enumeration budget ran out and the list is partial.
    pub truncated: bool,
}

/// All ways to extend a self-sufficient base of at most `max_base` tail
/// points by between 1 and `max_new` new points, up to isomorphism over the
/// base.
///
/// Since `A ≤ B` forces `δ(B) > δ(A)`, an extension by `m` points carries at
/// most `m − 1` new tuples; only those tuple sets are tried.
pub fn enumerate_extensions(
    chain: &GenericChain,
    max_base: usize,
    max_new: usize,
    budget: &Budget,
) -> Result<Extensions> {
    let tail = chain.tail();
    let sig = tail.signature().clone();
    let mut out = Extensions {
        candidates: Vec::new(),
        truncated: false,
    };
    let mut visited: u64 = 0;
    let mut spend = |out: &mut Extensions| {
        visited += 1;
        if visited > budget.enumeration {
            out.truncated = true;
        }
        out.truncated
    };

    for k in 0..=max_base.min(tail.size()) {
        for base in combinations(tail.size(), k) {
            if spend(&mut out) {
                return Ok(out);
            }
            if !is_self_sufficient(tail, &base)? {
                continue;
            }
            let (a_struct, _) = induced_substructure(tail, &base)?;
            for m in 1..=max_new {
                let size = k + m;
                let fresh = fresh_tuples(&sig, k, size);
                let mut seen = BTreeSet::new();
                for count in 0..m.min(fresh.len() + 1) {
                    for pick in combinations(fresh.len(), count) {
                        if spend(&mut out) {
                            return Ok(out);
                        }
                        let mut b = a_struct.clone().with_points(m);
                        for &i in &pick {
                            let (rel, ref t) = fresh[i];
                            b.insert_unchecked(rel, t.clone());
                        }
                        let ident: Vec<usize> = (0..k).collect();
                        if !is_self_sufficient(&b, &ident)? || !kf_member(&b, &chain.f, budget)?.member {
                            continue;
                        }
                        let form = canonical_form_fixing(&b, &ident)?.form;
                        if seen.insert(form.clone()) {
                            out.candidates.push(Extension {
                                base: base.clone(),
                                b: form,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Tuples on `0..size` with distinct entries that use at least one point `≥ k`.
fn fresh_tuples(sig: &Signature, k: usize, size: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (rel, (_, arity)) in sig.relations().enumerate() {
        let mut t = vec![0usize; arity];
        fn rec(
            t: &mut Vec<usize>,
            i: usize,
            size: usize,
            k: usize,
            rel: usize,
            out: &mut Vec<(usize, Vec<usize>)>,
        ) {
            if i == t.len() {
                if t.iter().any(|&p| p >= k) {
                    out.push((rel, t.clone()));
                }
                return;
            }
            for p in 0..size {
                if !t[..i].contains(&p) {
                    t[i] = p;
                    rec(t, i + 1, size, k, rel, out);
                }
            }
        }
        rec(&mut t, 0, size, k, rel, &mut out);
    }
    out
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut idx: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let cur = idx.clone()?;
        let mut next = cur.clone();
        let mut i = k;
        idx = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                break Some(next);
            }
        };
        Some(cur)
    })
}

/// `acl(X)`, computed as the closure of `X` in the tail. Because the tail is
/// self-sufficient in every later stage, later extensions do not change it.
pub fn acl(chain: &GenericChain, x: &[usize]) -> Result<Vec<usize>> {
    Ok(closure(chain.tail(), x)?.closure)
}

/// Whether `x` and `y` have the same type: some isomorphism of their
/// closures carries `x` to `y` coordinatewise.
pub fn same_type(chain: &GenericChain, x: &[usize], y: &[usize]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::InvalidParams(format!(
            "tuples of lengths {} and {} cannot have the same type",
            x.len(),
            y.len()
        )));
    }
    for i in 0..x.len() {
        for j in 0..i {
            if (x[i] == x[j]) != (y[i] == y[j]) {
                return Ok(false);
            }
        }
    }
    let key = |t: &[usize]| -> Result<FinStruct> {
        let cl = acl(chain, t)?;
        let (sub, new_to_old) = induced_substructure(chain.tail(), &cl)?;
        let fixed: Vec<usize> = t
            .iter()
            .map(|p| new_to_old.iter().position(|q| q == p).expect("tuple lies in its closure"))
            .collect();
        Ok(canonical_form_fixing(&sub, &fixed)?.form)
    };
    Ok(key(x)? == key(y)?)
}

/// Result of checking the chain invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainValidation {
    /// Per stage: membership in K_f, decided exhaustively.
    pub stages_in_kf: Vec<bool>,
    /// Per link: it is an embedding with self-sufficient image.
    pub links_self_sufficient: Vec<bool>,
}

impl ChainValidation {
    pub fn ok(&self) -> bool {
        self.stages_in_kf.iter().chain(&self.links_self_sufficient).all(|&b| b)
    }
}

pub fn validate(chain: &GenericChain, budget: &Budget) -> Result<ChainValidation> {
    let mut stages_in_kf = Vec::new();
    for s in &chain.stages {
        stages_in_kf.push(in_k0(s) && kf_member(s, &chain.f, budget)?.member);
    }
    let mut links_self_sufficient = Vec::new();
    for (k, link) in chain.links.iter().enumerate() {
        let (from, to) = (&chain.stages[k], &chain.stages[k + 1]);
        let ok = check_embedding(from, to, link.map()).is_ok() && is_self_sufficient(to, &link.image())?;
        links_self_sufficient.push(ok);
    }
    Ok(ChainValidation {
        stages_in_kf,
        links_self_sufficient,
    })
}

/// Knobs for [`build_generic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub rounds: usize,
    pub max_base: usize,
    pub max_new: usize,
    /// Stop extending once the tail has this many points.
    pub max_points: usize,
    pub seed: u64,
}

/// Round-robin builder: each round enumerates the extensions of the current
/// tail, shuffles them with the seeded generator and realizes each once,
/// until the round limit or the point limit is reached.
pub fn build_generic(
    f: ControlFunction,
    signature: Signature,
    opts: &BuildOptions,
    budget: &Budget,
) -> Result<GenericChain> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut chain = GenericChain::empty(f, signature);
    for _ in 0..opts.rounds {
        let mut todo = enumerate_extensions(&chain, opts.max_base, opts.max_new, budget)?.candidates;
        todo.shuffle(&mut rng);
        for ext in todo {
            if chain.tail().size() >= opts.max_points {
                return Ok(chain);
            }
            match extend_chain(&chain, &ext.base, &ext.b, &ext.ident(), budget) {
                Ok(next) => chain = next,
                Err(Error::NotInClass { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(chain)
}

fn stage_name(k: usize) -> String {
    format!("stage_{k:04}.struct")
}

/// Writes `stage_NNNN.struct` files and a `manifest.txt` naming the control
/// function and the links.
pub fn save_chain(chain: &GenericChain, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::from("# chain manifest\n");
    match &chain.f {
        ControlFunction::LogBase(b) => manifest.push_str(&format!("f log:{b}\n")),
        ControlFunction::RationalTable(entries) => {
            let mut text = String::new();
            for (size, bound) in entries {
                text.push_str(&format!("{size} {bound}\n"));
            }
            fs::write(dir.join("f.table"), text)?;
            manifest.push_str("f table f.table\n");
        }
    }
    for (k, s) in chain.stages.iter().enumerate() {
        fs::write(dir.join(stage_name(k)), s.serialize())?;
        manifest.push_str(&format!("stage {}\n", stage_name(k)));
    }
    for (k, link) in chain.links.iter().enumerate() {
        let map: Vec<String> = link.map().iter().map(|p| p.to_string()).collect();
        manifest.push_str(&format!("link {k} {}\n", map.join(" ")).replace(" \n", "\n"));
    }
    fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

/// Reads a chain written by [`save_chain`], checking every link is an embedding.
pub fn load_chain(dir: &Path) -> Result<GenericChain> {
    let manifest = fs::read_to_string(dir.join("manifest.txt"))?;
    let mut f = None;
    let mut stages = Vec::new();
    let mut links = Vec::new();
    for (i, raw) in manifest.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "f" if toks.len() == 2 => f = Some(ControlFunction::from_spec(toks[1])?),
            "f" if toks.len() == 3 && toks[1] == "table" => {
                f = Some(ControlFunction::parse_table(&fs::read_to_string(dir.join(toks[2]))?)?)
            }
            "stage" if toks.len() == 2 => {
                stages.push(FinStruct::parse(&fs::read_to_string(dir.join(toks[1]))?)?)
            }
            "link" if toks.len() >= 2 => {
                let k: usize = toks[1].parse().map_err(|_| parse_err(i + 1, "bad link index"))?;
                if k != links.len() {
                    return Err(parse_err(i + 1, "links must be listed in order"));
                }
                let map = toks[2..]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| parse_err(i + 1, "bad point in link"))?;
                links.push((i + 1, map));
            }
            _ => return Err(parse_err(i + 1, format!("unrecognized manifest line {line:?}"))),
        }
    }
    let f = f.ok_or_else(|| parse_err(0, "manifest names no control function"))?;
    if stages.is_empty() || links.len() + 1 != stages.len() {
        return Err(parse_err(0, "manifest needs one link between consecutive stages"));
    }
    let links = links
        .into_iter()
        .enumerate()
        .map(|(k, (line, map))| {
            Embedding::new(&stages[k], &stages[k + 1], map).map_err(|e| parse_err(line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenericChain { f, stages, links })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{build_flower, FlowerParams};

    fn r3() -> Signature {
        "R:3".parse().unwrap()
    }

    fn log(b: u32) -> ControlFunction {
        ControlFunction::log(b).unwrap()
    }

    #[test]
    fn first_extension_is_a_point() {
        let chain = GenericChain::empty(log(8), r3());
        let b = FinStruct::empty(r3(), 1);
        let next = extend_chain(&chain, &[], &b, &[], &Budget::default()).unwrap();
        assert_eq!(next.tail().size(), 1);
        assert_eq!(next.links()[0].map(), &[] as &[usize]);
    }

    fn with_flower() -> (GenericChain, FlowerParams) {
        let p = FlowerParams::new(3, 3).unwrap();
        let flower = build_flower(&p, &Budget::default()).unwrap();
        let chain = GenericChain::empty(log(3), p.signature());
        let chain = extend_chain(&chain, &[], &FinStruct::empty(p.signature(), 1), &[], &Budget::default()).unwrap();
        let chain = extend_chain(&chain, &[], &flower, &[], &Budget::default()).unwrap();
        (chain, p)
    }

    #[test]
    fn flower_embeds_self_sufficiently() {
        let (chain, _) = with_flower();
        assert_eq!(chain.tail().size(), 9);
        let image: Vec<usize> = (1..9).collect();
        assert!(is_self_sufficient(chain.tail(), &image).unwrap());
        assert!(validate(&chain, &Budget::default()).unwrap().ok());
        assert_eq!(acl(&chain, &[1, 2]).unwrap(), image);
        assert_eq!(acl(&chain, &[]).unwrap(), Vec::<usize>::new());
        assert_eq!(acl(&chain, &[0]).unwrap(), vec![0]);
    }

    #[test]
    fn trivial_extension_keeps_tail() {
        let (chain, _) = with_flower();
        let (sub, _) = induced_substructure(chain.tail(), &[1, 2, 3]).unwrap();
        // a hub pair is not self-sufficient, the whole flower is
        let all: Vec<usize> = (1..9).collect();
        let (flower, _) = induced_substructure(chain.tail(), &all).unwrap();
        let ident: Vec<usize> = (0..8).collect();
        let next = extend_chain(&chain, &all, &flower, &ident, &Budget::default()).unwrap();
        assert!(crate::canon::are_isomorphic(next.tail(), chain.tail()));
        assert!(extend_chain(&chain, &[1, 2, 3], &sub, &[0, 1, 2], &Budget::default()).is_err());
    }

    #[test]
    fn types() {
        let (chain, _) = with_flower();
        assert!(same_type(&chain, &[4], &[4]).unwrap());
        // a petal and the free point both have singleton closures
        assert!(same_type(&chain, &[4], &[0]).unwrap());
        let chain = extend_chain(&chain, &[], &FinStruct::empty(chain.tail().signature().clone(), 1), &[], &Budget::default())
            .unwrap();
        assert!(!same_type(&chain, &[1, 2], &[0, 9]).unwrap());
        assert!(same_type(&chain, &[0, 9], &[9, 0]).unwrap());
        assert!(!same_type(&chain, &[1, 1], &[1, 2]).unwrap());
        assert!(same_type(&chain, &[1], &[1, 2]).is_err());
    }

    #[test]
    fn one_point_candidates() {
        let chain = extend_chain(&GenericChain::empty(log(8), r3()), &[], &FinStruct::empty(r3(), 1), &[], &Budget::default())
            .unwrap();
        let ext = enumerate_extensions(&chain, 1, 1, &Budget::default()).unwrap();
        assert!(!ext.truncated);
        assert_eq!(ext.candidates.len(), 2);
        for c in &ext.candidates {
            assert_eq!((c.new_points(), c.b.tuple_count()), (1, 0));
        }
        assert!(enumerate_extensions(&chain, 1, 0, &Budget::default()).unwrap().candidates.is_empty());
    }

    #[test]
    fn over_a_triangle() {
        let s1 = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n").unwrap();
        let chain = GenericChain::new(log(8), s1, &Budget::default()).unwrap();
        let ext = enumerate_extensions(&chain, 3, 2, &Budget::default()).unwrap();
        let full: Vec<&Extension> = ext.candidates.iter().filter(|c| c.base == vec![0, 1, 2]).collect();
        // R(0, 1, 3) alone would leave δ unchanged, so it never appears
        assert!(full.iter().all(|c| c.b.tuple_count() <= 1 + (c.new_points() - 1)));
        assert!(full.iter().any(|c| c.new_points() == 2 && c.b.tuple_count() == 2));
        for c in &ext.candidates {
            assert!(is_self_sufficient(&c.b, &c.ident()).unwrap());
        }
    }

    #[test]
    fn truncation_is_flagged() {
        let chain = GenericChain::new(log(8), FinStruct::empty(r3(), 3), &Budget::default()).unwrap();
        let budget = Budget {
            enumeration: 5,
            ..Budget::default()
        };
        assert!(enumerate_extensions(&chain, 2, 2, &budget).unwrap().truncated);
    }

    #[test]
    fn seeded_builds_repeat() {
        let opts = BuildOptions {
            rounds: 2,
            max_base: 2,
            max_new: 2,
            max_points: 30,
            seed: 7,
        };
        let a = build_generic(log(8), r3(), &opts, &Budget::default()).unwrap();
        let b = build_generic(log(8), r3(), &opts, &Budget::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.tail().size() > 1);
    }

    #[test]
    fn save_and_load() {
        let (chain, _) = with_flower();
        let dir = tempfile::tempdir().unwrap();
        save_chain(&chain, dir.path()).unwrap();
        assert!(dir.path().join("stage_0002.struct").exists());
        assert_eq!(load_chain(dir.path()).unwrap(), chain);

        let t = GenericChain::new(ControlFunction::parse_table("0 0\n3 1/2\n").unwrap(), FinStruct::empty(r3(), 2), &Budget::default())
            .unwrap();
        save_chain(&t, dir.path()).unwrap();
        assert_eq!(load_chain(dir.path()).unwrap(), t);
    }
}
