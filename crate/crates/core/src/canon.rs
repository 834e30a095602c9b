//! Canonical labeling by colour refinement and individualization.
//!
//! Points start in one cell (or in singleton cells for points that must stay
//! fixed). Refinement splits every cell by the multiset of
//! `(relation, position, cells of the other entries)` incidences until the
//! partition is equitable. When it stops short of a discrete partition, the
//! search individualizes each point of the first non-singleton cell in turn
//! and keeps the lexicographically least relabeled structure over all
//! leaves. Automorphisms found along the way prune sibling branches in the
//! same orbit.

use crate::error::Result;
use crate::structure::FinStruct;

/// A canonical representative and the relabeling that produces it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// The relabeled structure; equal forms mean isomorphic inputs.
    pub form: FinStruct,
    /// `labeling[p]` is the new identifier of point `p`.
    pub labeling: Vec<usize>,
}

type Partition = Vec<Vec<usize>>;

struct Incidence {
    /// For each point, the tuples containing it as `(relation, position, tuple index)`.
    by_point: Vec<Vec<(usize, usize, usize)>>,
    tuples: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(s: &FinStruct) -> Self {
        let mut by_point = vec![Vec::new(); s.size()];
        let mut tuples = Vec::new();
        for (r, t) in s.tuples() {
            let idx = tuples.len();
            for (pos, &p) in t.iter().enumerate() {
                by_point[p].push((r, pos, idx));
            }
            tuples.push(t.to_vec());
        }
        Incidence { by_point, tuples }
    }
}

fn refine(inc: &Incidence, mut part: Partition) -> Partition {
    let n = inc.by_point.len();
    let mut cell_of = vec![0usize; n];
    loop {
        for (c, cell) in part.iter().enumerate() {
            for &p in cell {
                cell_of[p] = c;
            }
        }
        let before = part.len();
        let mut next: Partition = Vec::with_capacity(part.len());
        for cell in &part {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<(usize, usize, Vec<usize>)>, usize)> = cell
                .iter()
                .map(|&p| {
                    let mut sig: Vec<(usize, usize, Vec<usize>)> = inc.by_point[p]
                        .iter()
                        .map(|&(r, pos, t)| {
                            (r, pos, inc.tuples[t].iter().map(|&q| cell_of[q]).collect())
                        })
                        .collect();
                    sig.sort_unstable();
                    (sig, p)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, p)| *p).collect());
                    start = i;
                }
            }
        }
        part = next;
        if part.len() == before {
            return part;
        }
    }
}

struct Search<'a> {
    s: &'a FinStruct,
    inc: Incidence,
    best: Option<(FinStruct, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn leaf(&mut self, part: &Partition) {
        let mut labeling = vec![0; self.s.size()];
        for (c, cell) in part.iter().enumerate() {
            labeling[cell[0]] = c;
        }
        let form = self.s.relabel(&labeling).expect("discrete partition is a permutation");
        match &self.best {
            None => self.best = Some((form, labeling)),
            Some((best, best_labeling)) => {
                if form < *best {
                    self.best = Some((form, labeling));
                } else if form == *best {
                    let mut inverse = vec![0; labeling.len()];
                    for (p, &l) in best_labeling.iter().enumerate() {
                        inverse[l] = p;
                    }
                    let auto: Vec<usize> = labeling.iter().map(|&l| inverse[l]).collect();
                    if auto.iter().enumerate().any(|(p, &q)| p != q) {
                        self.automorphisms.push(auto);
                    }
                }
            }
        }
    }

    fn visit(&mut self, part: Partition, prefix: &mut Vec<usize>) {
        let part = refine(&self.inc, part);
        let Some(target) = part.iter().position(|c| c.len() > 1) else {
            self.leaf(&part);
            return;
        };
        let cell = part[target].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if self.same_orbit_as_explored(v, &explored, prefix) {
                continue;
            }
            let mut child = part.clone();
            let rest: Vec<usize> = cell.iter().copied().filter(|&p| p != v).collect();
            child.splice(target..=target, [vec![v], rest]);
            prefix.push(v);
            self.visit(child, prefix);
            prefix.pop();
            explored.push(v);
        }
    }

    /// Whether `v` is in the orbit of an explored sibling under the group
    /// generated by known automorphisms that fix `prefix` pointwise.
    fn same_orbit_as_explored(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        if explored.is_empty() {
            return false;
        }
        let gens: Vec<&Vec<usize>> = self
            .automorphisms
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let n = self.s.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for g in gens {
            for p in 0..n {
                let (a, b) = (find(&mut parent, p), find(&mut parent, g[p]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&w| find(&mut parent, w) == rv)
    }
}

/// Canonical form keeping `fixed` points in front, in the given order. Two
/// structures get equal forms exactly when some isomorphism sends the i-th
/// fixed point of one to the i-th fixed point of the other.
pub fn canonical_form_fixing(s: &FinStruct, fixed: &[usize]) -> Result<CanonicalForm> {
    s.check_points(fixed)?;
    let fixed = {
        let mut seen = Vec::new();
        for &p in fixed {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        seen
    };
    let mut part: Partition = fixed.iter().map(|&p| vec![p]).collect();
    let rest: Vec<usize> = s.points().filter(|p| !fixed.contains(p)).collect();
    if !rest.is_empty() {
        part.push(rest);
    }
    let mut search = Search {
        s,
        inc: Incidence::new(s),
        best: None,
        automorphisms: Vec::new(),
    };
    let mut prefix = fixed.clone();
    search.visit(part, &mut prefix);
    let (form, labeling) = search.best.unwrap_or_else(|| (s.clone(), Vec::new()));
    Ok(CanonicalForm { form, labeling })
}

pub fn canonical_form(s: &FinStruct) -> CanonicalForm {
    canonical_form_fixing(s, &[]).expect("no fixed points")
}

pub fn are_isomorphic(a: &FinStruct, b: &FinStruct) -> bool {
    a.size() == b.size()
        && a.signature() == b.signature()
        && a.tuple_count() == b.tuple_count()
        && canonical_form(a).form == canonical_form(b).form
}
