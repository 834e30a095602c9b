//! Enumeration of embeddings and ≤-embeddings between finite structures.

use std::collections::HashMap;

use crate::predim::is_self_sufficient;
use crate::structure::{normalize, Embedding, FinStruct};

/// Per-point incidence profile: how many tuples use the point in each
/// `(relation, position)` slot. An embedding can only send a point to one
/// whose profile dominates it.
fn profiles(s: &FinStruct) -> Vec<Vec<usize>> {
    let slots: Vec<usize> = s.signature().relations().map(|(_, a)| a).collect();
    let offsets: Vec<usize> = slots
        .iter()
        .scan(0, |acc, &a| {
            let o = *acc;
            *acc += a;
            Some(o)
        })
        .collect();
    let width = slots.iter().sum();
    let mut prof = vec![vec![0; width]; s.size()];
    for (r, t) in s.tuples() {
        for (pos, &p) in t.iter().enumerate() {
            prof[p][offsets[r] + pos] += 1;
        }
    }
    prof
}

fn incident(s: &FinStruct) -> Vec<Vec<(usize, Vec<usize>)>> {
    let mut inc = vec![Vec::new(); s.size()];
    for (r, t) in s.tuples() {
        for &p in t {
            inc[p].push((r, t.to_vec()));
        }
    }
    inc
}

struct Backtrack<'a> {
    source: &'a FinStruct,
    target: &'a FinStruct,
    order: Vec<usize>,
    src_prof: Vec<Vec<usize>>,
    tgt_prof: Vec<Vec<usize>>,
    src_inc: Vec<Vec<(usize, Vec<usize>)>>,
    tgt_inc: Vec<Vec<(usize, Vec<usize>)>>,
    map: Vec<usize>,
    preimage: Vec<usize>,
    found: Vec<Vec<usize>>,
    limit: usize,
}

impl Backtrack<'_> {
    fn consistent(&self, p: usize, q: usize) -> bool {
        // tuples of the source at p whose points are all assigned must map to tuples
        for (r, t) in &self.src_inc[p] {
            if t.iter().all(|&x| self.map[x] != usize::MAX) {
                let img: Vec<usize> = t.iter().map(|&x| self.map[x]).collect();
                if !self.target.contains(*r, &img) {
                    return false;
                }
            }
        }
        // tuples of the target at q lying inside the image must come from the source
        for (r, t) in &self.tgt_inc[q] {
            if t.iter().all(|&y| self.preimage[y] != usize::MAX) {
                let back: Vec<usize> = t.iter().map(|&y| self.preimage[y]).collect();
                if !self.source.contains(*r, &back) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            self.found.push(self.map.clone());
            return;
        }
        let p = self.order[depth];
        for q in 0..self.target.size() {
            if self.preimage[q] != usize::MAX
                || self.src_prof[p]
                    .iter()
                    .zip(&self.tgt_prof[q])
                    .any(|(a, b)| a > b)
            {
                continue;
            }
            self.map[p] = q;
            self.preimage[q] = p;
            if self.consistent(p, q) {
                self.run(depth + 1);
            }
            self.map[p] = usize::MAX;
            self.preimage[q] = usize::MAX;
        }
    }
}

fn search(source: &FinStruct, target: &FinStruct, limit: usize) -> Vec<Vec<usize>> {
    if source.signature() != target.signature() || source.size() > target.size() {
        return Vec::new();
    }
    let src_prof = profiles(source);
    let mut order: Vec<usize> = source.points().collect();
    order.sort_by_key(|&p| std::cmp::Reverse(src_prof[p].iter().sum::<usize>()));
    let mut bt = Backtrack {
        source,
        target,
        order,
        src_prof,
        tgt_prof: profiles(target),
        src_inc: incident(source),
        tgt_inc: incident(target),
        map: vec![usize::MAX; source.size()],
        preimage: vec![usize::MAX; target.size()],
        found: Vec::new(),
        limit,
    };
    bt.run(0);
    let mut found = bt.found;
    found.sort();
    found
}

/// All induced embeddings of `source` into `target`, in lexicographic order of the maps.
pub fn embeddings(source: &FinStruct, target: &FinStruct) -> Vec<Embedding> {
    search(source, target, usize::MAX)
        .into_iter()
        .map(Embedding::from_map_unchecked)
        .collect()
}

/// All ≤-embeddings: embeddings whose image is self-sufficient in `target`.
pub fn find_leq_embeddings(source: &FinStruct, target: &FinStruct) -> Vec<Embedding> {
    let mut cache: HashMap<Vec<usize>, bool> = HashMap::new();
    embeddings(source, target)
        .into_iter()
        .filter(|e| {
            let image = normalize(e.map());
            *cache
                .entry(image)
                .or_insert_with_key(|img| is_self_sufficient(target, img).unwrap_or(false))
        })
        .collect()
}

/// Some isomorphism `a → b`, found by direct search.
pub fn find_isomorphism(a: &FinStruct, b: &FinStruct) -> Option<Vec<usize>> {
    if a.size() != b.size() || a.tuple_count() != b.tuple_count() {
        return None;
    }
    search(a, b, 1).into_iter().next()
}
