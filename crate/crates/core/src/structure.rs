//! Finite relational structures and their text format.
//!
//! Points are the dense identifiers `0..size`. A relation instance is a set
//! of ordered tuples whose entries are pairwise distinct, so a structure is
//! fully described by its signature, its size and one tuple set per relation.
//!
//! The on-disk format is line oriented:
//!
//! ```text
//! # comment
//! points 4
//! rel R 3
//! R 0 1 2
//! R 0 1 3
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};

/// An ordered list of relation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Signature {
    relations: Vec<(String, usize)>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "points" && name != "rel"
}

impl Signature {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut sig = Signature::default();
        for (name, arity) in relations {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    fn push(&mut self, name: String, arity: usize) -> Result<()> {
        if !valid_identifier(&name) {
            return Err(Error::Signature(format!("invalid relation name {name:?}")));
        }
        if arity == 0 {
            return Err(Error::Signature(format!("relation {name} has arity 0")));
        }
        if self.index_of(&name).is_some() {
            return Err(Error::Signature(format!("relation {name} declared twice")));
        }
        self.relations.push((name, arity));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn name(&self, rel: usize) -> &str {
        &self.relations[rel].0
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].1
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .relations
            .iter()
            .map(|(n, a)| format!("{n}:{a}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses `R:3,S:2`. The empty string is the empty signature.
    fn from_str(s: &str) -> Result<Self> {
        let mut sig = Signature::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, arity) = part
                .split_once(':')
                .ok_or_else(|| Error::Signature(format!("expected NAME:ARITY, got {part:?}")))?;
            let arity = arity
                .trim()
                .parse()
                .map_err(|_| Error::Signature(format!("bad arity in {part:?}")))?;
            sig.push(name.trim().to_string(), arity)?;
        }
        Ok(sig)
    }
}

/// A finite relational structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinStruct {
    signature: Signature,
    size: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl FinStruct {
    /// The structure with `size` points and no tuples.
    pub fn empty(signature: Signature, size: usize) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        FinStruct {
            signature,
            size,
            relations,
        }
    }

    /// Builds a structure from `(relation index, tuple)` pairs, validating every tuple.
    pub fn new(
        signature: Signature,
        size: usize,
        tuples: impl IntoIterator<Item = (usize, Vec<usize>)>,
    ) -> Result<Self> {
        let mut s = FinStruct::empty(signature, size);
        for (rel, tuple) in tuples {
            s.insert_checked(rel, tuple)?;
        }
        Ok(s)
    }

    /// Adds a tuple by relation name. Fails on duplicates.
    pub fn with_tuple(mut self, relation: &str, tuple: &[usize]) -> Result<Self> {
        let rel = self.signature.index_of(relation).ok_or_else(|| Error::Tuple {
            relation: relation.to_string(),
            message: "undeclared relation".into(),
        })?;
        self.insert_checked(rel, tuple.to_vec())?;
        Ok(self)
    }

    /// Appends `extra` fresh points with no tuples.
    pub fn with_points(mut self, extra: usize) -> Self {
        self.size += extra;
        self
    }

    fn validate_tuple(&self, rel: usize, tuple: &[usize]) -> std::result::Result<(), String> {
        if rel >= self.signature.len() {
            return Err(format!("relation index {rel} out of range"));
        }
        let arity = self.signature.arity(rel);
        if tuple.len() != arity {
            return Err(format!(
                "arity mismatch: expected {arity} entries, got {}",
                tuple.len()
            ));
        }
        for (i, &p) in tuple.iter().enumerate() {
            if p >= self.size {
                return Err(format!(
                    "point {p} out of range for a structure with {} points",
                    self.size
                ));
            }
            if tuple[..i].contains(&p) {
                return Err(format!("repeated entry {p}"));
            }
        }
        Ok(())
    }

    fn insert_checked(&mut self, rel: usize, tuple: Vec<usize>) -> Result<()> {
        let name = |s: &Self| {
            if rel < s.signature.len() {
                s.signature.name(rel).to_string()
            } else {
                format!("#{rel}")
            }
        };
        if let Err(message) = self.validate_tuple(rel, &tuple) {
            return Err(Error::Tuple {
                relation: name(self),
                message,
            });
        }
        if !self.relations[rel].insert(tuple) {
            return Err(Error::Tuple {
                relation: name(self),
                message: "duplicate tuple".into(),
            });
        }
        Ok(())
    }

    /// Inserts a tuple already known to be valid; duplicates are merged.
    pub(crate) fn insert_unchecked(&mut self, rel: usize, tuple: Vec<usize>) {
        debug_assert!(self.validate_tuple(rel, &tuple).is_ok());
        self.relations[rel].insert(tuple);
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, rel: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[rel]
    }

    pub fn contains(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    /// All tuples as `(relation index, entries)`, relation by relation.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(r, set)| set.iter().map(move |t| (r, t.as_slice())))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// Checks that every identifier in `points` is in range.
    pub fn check_points(&self, points: &[usize]) -> Result<()> {
        match points.iter().find(|&&p| p >= self.size) {
            Some(&point) => Err(Error::PointOutOfRange {
                point,
                size: self.size,
            }),
            None => Ok(()),
        }
    }

    /// Membership mask for a point set.
    pub(crate) fn mask(&self, points: &[usize]) -> Result<Vec<bool>> {
        self.check_points(points)?;
        let mut m = vec![false; self.size];
        for &p in points {
            m[p] = true;
        }
        Ok(m)
    }

    /// Renames points: point `p` becomes `perm[p]`. `perm` must be a permutation.
    pub fn relabel(&self, perm: &[usize]) -> Result<FinStruct> {
        if perm.len() != self.size {
            return Err(Error::InvalidParams(format!(
                "relabeling has {} entries for {} points",
                perm.len(),
                self.size
            )));
        }
        let mut seen = vec![false; self.size];
        for &q in perm {
            if q >= self.size || std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidParams("relabeling is not a permutation".into()));
            }
        }
        let mut out = FinStruct::empty(self.signature.clone(), self.size);
        for (r, t) in self.tuples() {
            out.insert_unchecked(r, t.iter().map(|&p| perm[p]).collect());
        }
        Ok(out)
    }

    /// Renders the canonical text form: `points`, `rel` lines in declaration
    /// order, then tuples sorted by relation and lexicographically.
    pub fn serialize(&self) -> String {
        let mut out = format!("points {}\n", self.size);
        for (name, arity) in self.signature.relations() {
            out.push_str(&format!("rel {name} {arity}\n"));
        }
        for (r, t) in self.tuples() {
            out.push_str(self.signature.name(r));
            for p in t {
                out.push(' ');
                out.push_str(&p.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<FinStruct> {
        parse_structure(text)
    }
}

impl fmt::Display for FinStruct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for FinStruct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_structure(s)
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, got {tok:?}")))
}

/// Parses the structure text format. Every error carries its 1-based line number.
pub fn parse_structure(text: &str) -> Result<FinStruct> {
    let mut structure: Option<FinStruct> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut toks = content.split_whitespace();
        let head = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();

        let Some(s) = structure.as_mut() else {
            if head != "points" {
                return Err(parse_err(line, "first line must be `points <N>`"));
            }
            if rest.len() != 1 {
                return Err(parse_err(line, "expected `points <N>`"));
            }
            let n = parse_usize(rest[0], line, "a point count")?;
            structure = Some(FinStruct::empty(Signature::default(), n));
            continue;
        };

        match head {
            "points" => return Err(parse_err(line, "`points` declared more than once")),
            "rel" => {
                if rest.len() != 2 {
                    return Err(parse_err(line, "expected `rel <Name> <arity>`"));
                }
                let arity = parse_usize(rest[1], line, "an arity")?;
                s.signature
                    .push(rest[0].to_string(), arity)
                    .map_err(|e| parse_err(line, e.to_string()))?;
                s.relations.push(BTreeSet::new());
            }
            name => {
                let rel = s
                    .signature
                    .index_of(name)
                    .ok_or_else(|| parse_err(line, format!("undeclared relation {name}")))?;
                let tuple = rest
                    .iter()
                    .map(|t| parse_usize(t, line, "a point identifier"))
                    .collect::<Result<Vec<_>>>()?;
                s.insert_checked(rel, tuple).map_err(|e| match e {
                    Error::Tuple { relation, message } => {
                        parse_err(line, format!("{relation}: {message}"))
                    }
                    other => parse_err(line, other.to_string()),
                })?;
            }
        }
    }

    structure.ok_or_else(|| parse_err(0, "missing `points <N>` line"))
}

/// Sorted, deduplicated copy of a point list.
pub fn normalize(points: &[usize]) -> Vec<usize> {
    let mut v = points.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// The substructure induced on `points`, relabeled to `0..k` in increasing
/// order. The second component maps new identifiers back to the originals.
pub fn induced_substructure(b: &FinStruct, points: &[usize]) -> Result<(FinStruct, Vec<usize>)> {
    b.check_points(points)?;
    let keep = normalize(points);
    let mut new_id = vec![usize::MAX; b.size()];
    for (i, &p) in keep.iter().enumerate() {
        new_id[p] = i;
    }
    let mut out = FinStruct::empty(b.signature().clone(), keep.len());
    for (r, t) in b.tuples() {
        if t.iter().all(|&p| new_id[p] != usize::MAX) {
            out.insert_unchecked(r, t.iter().map(|&p| new_id[p]).collect());
        }
    }
    Ok((out, keep))
}

/// An injective, relation-preserving and relation-reflecting map between two
/// structures over the same signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    /// Checks `map` against both structures.
    pub fn new(source: &FinStruct, target: &FinStruct, map: Vec<usize>) -> Result<Self> {
        check_embedding(source, target, &map)?;
        Ok(Embedding { map })
    }

    pub(crate) fn from_map_unchecked(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self) -> Vec<usize> {
        normalize(&self.map)
    }

    pub fn apply(&self, p: usize) -> usize {
        self.map[p]
    }
}

/// Returns an error describing why `map` is not an induced embedding.
pub fn check_embedding(source: &FinStruct, target: &FinStruct, map: &[usize]) -> Result<()> {
    if source.signature() != target.signature() {
        return Err(Error::SignatureMismatch);
    }
    if map.len() != source.size() {
        return Err(Error::NotAnEmbedding(format!(
            "map has {} entries for {} points",
            map.len(),
            source.size()
        )));
    }
    target.check_points(map)?;
    if normalize(map).len() != map.len() {
        return Err(Error::NotAnEmbedding("map is not injective".into()));
    }
    for (r, t) in source.tuples() {
        let image: Vec<usize> = t.iter().map(|&p| map[p]).collect();
        if !target.contains(r, &image) {
            return Err(Error::NotAnEmbedding(format!(
                "tuple {} {:?} is not preserved",
                source.signature().name(r),
                t
            )));
        }
    }
    let mut preimage = vec![usize::MAX; target.size()];
    for (i, &q) in map.iter().enumerate() {
        preimage[q] = i;
    }
    for (r, t) in target.tuples() {
        if t.iter().all(|&q| preimage[q] != usize::MAX) {
            let back: Vec<usize> = t.iter().map(|&q| preimage[q]).collect();
            if !source.contains(r, &back) {
                return Err(Error::NotAnEmbedding(format!(
                    "tuple {} {:?} on the image is not reflected",
                    target.signature().name(r),
                    t
                )));
            }
        }
    }
    Ok(())
}

pub fn is_embedding(source: &FinStruct, target: &FinStruct, map: &[usize]) -> bool {
    check_embedding(source, target, map).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> FinStruct {
        FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n").unwrap()
    }

    #[test]
    fn parses_single_tuple() {
        let s = s1();
        assert_eq!(s.size(), 3);
        assert_eq!(s.tuple_count(), 1);
        assert!(s.contains(0, &[0, 1, 2]));
    }

    #[test]
    fn parses_empty_structure() {
        let s = FinStruct::parse("points 0").unwrap();
        assert_eq!(s.size(), 0);
        assert!(s.signature().is_empty());
        assert_eq!(s.tuple_count(), 0);
    }

    #[test]
    fn rejects_repeated_entry() {
        let err = FinStruct::parse("points 2\nrel R 3\nR 0 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(err.to_string().contains("repeated"));
    }

    #[test]
    fn reports_each_error_with_its_line() {
        let cases = [
            ("points 3\nrel R 3\nR 0 1\n", 3, "arity"),
            ("points 3\nrel R 3\n# c\nR 0 1 5\n", 4, "out of range"),
            ("points 3\nrel R 3\nR 0 1 2\nR 0 1 2\n", 4, "duplicate"),
            ("points 3\nR 0 1 2\n", 2, "undeclared"),
            ("rel R 3\npoints 3\n", 1, "points"),
            ("points 3\npoints 3\n", 2, "more than once"),
            ("points 3\nrel R 3\nrel R 2\n", 3, "twice"),
        ];
        for (text, line, needle) in cases {
            match FinStruct::parse(text) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text:?}");
                    assert!(message.contains(needle), "{message} / {needle}");
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let s = FinStruct::parse("# hello\n\npoints 3\n  # x\nrel R 3\n\nR 2 1 0\n").unwrap();
        assert!(s.contains(0, &[2, 1, 0]));
    }

    #[test]
    fn serialization_sorts_tuples() {
        let s = FinStruct::parse("points 4\nrel R 3\nrel E 2\nE 3 0\nR 1 0 2\nR 0 1 3\n").unwrap();
        assert_eq!(
            s.serialize(),
            "points 4\nrel R 3\nrel E 2\nR 0 1 3\nR 1 0 2\nE 3 0\n"
        );
        assert_eq!(FinStruct::parse(&s.serialize()).unwrap(), s);
    }

    #[test]
    fn induced_substructure_examples() {
        let (sub, map) = induced_substructure(&s1(), &[0, 1]).unwrap();
        assert_eq!(sub.size(), 2);
        assert_eq!(sub.tuple_count(), 0);
        assert_eq!(map, vec![0, 1]);

        let (whole, _) = induced_substructure(&s1(), &[2, 0, 1]).unwrap();
        assert_eq!(whole, s1());

        let s2 = FinStruct::parse("points 4\nrel R 3\nR 0 1 2\nR 0 1 3\n").unwrap();
        let (sub, _) = induced_substructure(&s2, &[0, 1, 2]).unwrap();
        assert_eq!(sub.size(), 3);
        assert_eq!(sub.tuple_count(), 1);

        assert_eq!(
            induced_substructure(&s1(), &[0, 3]).unwrap_err(),
            Error::PointOutOfRange { point: 3, size: 3 }
        );
    }

    #[test]
    fn relabel_requires_permutation() {
        assert!(s1().relabel(&[0, 0, 1]).is_err());
        let r = s1().relabel(&[2, 0, 1]).unwrap();
        assert!(r.contains(0, &[2, 0, 1]));
    }

    #[test]
    fn embedding_checks_reflection() {
        let one = FinStruct::parse("points 3\nrel R 3\n").unwrap();
        // three isolated points do not embed onto a tuple
        assert!(check_embedding(&one, &s1(), &[0, 1, 2]).is_err());
        assert!(check_embedding(&s1(), &s1(), &[0, 1, 2]).is_ok());
        assert!(check_embedding(&s1(), &s1(), &[1, 0, 2]).is_err());
    }

    #[test]
    fn signature_round_trip() {
        let sig: Signature = "R:3, S:10,U:11".parse().unwrap();
        assert_eq!(sig.len(), 3);
        assert_eq!(sig.to_string(), "R:3,S:10,U:11");
        assert!("R:0".parse::<Signature>().is_err());
        assert!("R:2,R:3".parse::<Signature>().is_err());
    }
}
