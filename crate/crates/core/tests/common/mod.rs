//! Brute-force oracles, written independently of the library's algorithms.
#![allow(dead_code)]

use amalgam::random::RandomShape;
use amalgam::{FinStruct, Signature};
use rand::Rng;

pub fn mask_of(points: &[usize]) -> u32 {
    points.iter().fold(0, |m, &p| m | 1 << p)
}

pub fn points_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

pub fn full(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

/// δ of every subset, indexed by bitmask.
pub fn delta_table(s: &FinStruct) -> Vec<i64> {
    let n = s.size();
    assert!(n <= 20, "oracle is for small structures");
    let tuples: Vec<u32> = s.tuples().map(|(_, t)| mask_of(t)).collect();
    (0..1u32 << n)
        .map(|m| m.count_ones() as i64 - tuples.iter().filter(|&&t| t & m == t).count() as i64)
        .collect()
}

/// `g[Y]` = least δ over supersets of `Y`, by a sum-over-supersets sweep.
pub fn superset_min(deltas: &[i64], n: usize) -> Vec<i64> {
    let mut g = deltas.to_vec();
    for i in 0..n {
        for m in 0..1u32 << n {
            if m >> i & 1 == 0 {
                g[m as usize] = g[m as usize].min(g[(m | 1 << i) as usize]);
            }
        }
    }
    g
}

/// Every superset of `x` inside `n` points, `x` included.
pub fn supersets(x: u32, n: usize) -> impl Iterator<Item = u32> {
    let rest = full(n) & !x;
    let mut sub = rest;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = x | sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & rest;
        }
        Some(out)
    })
}

pub struct Oracle {
    pub n: usize,
    pub deltas: Vec<i64>,
    pub min_above: Vec<i64>,
}

impl Oracle {
    pub fn new(s: &FinStruct) -> Self {
        let deltas = delta_table(s);
        let min_above = superset_min(&deltas, s.size());
        Oracle {
            n: s.size(),
            deltas,
            min_above,
        }
    }

    pub fn delta(&self, m: u32) -> i64 {
        self.deltas[m as usize]
    }

    /// Every strictly larger subset has strictly larger δ.
    pub fn self_sufficient(&self, m: u32) -> bool {
        (0..self.n)
            .filter(|&i| m >> i & 1 == 0)
            .all(|i| self.min_above[(m | 1 << i) as usize] > self.deltas[m as usize])
    }

    pub fn dim(&self, x: u32) -> i64 {
        self.min_above[x as usize]
    }

    /// Union of every δ-minimizer over supersets of `x`, asserted to be a minimizer.
    pub fn closure_by_minimizers(&self, x: u32) -> u32 {
        let best = self.dim(x);
        let u = supersets(x, self.n)
            .filter(|&y| self.delta(y) == best)
            .fold(0, |a, y| a | y);
        assert_eq!(self.delta(u), best, "minimizers not closed under union");
        u
    }

    /// Intersection of every self-sufficient superset of `x`.
    pub fn closure_by_intersection(&self, x: u32) -> u32 {
        supersets(x, self.n)
            .filter(|&y| self.self_sufficient(y))
            .fold(full(self.n), |a, y| a & y)
    }
}

/// `b^δ(X) ≥ |X| + 1` for every subset, plus positivity on non-empty ones.
pub fn kf_log_oracle(s: &FinStruct, base: u32) -> bool {
    let d = delta_table(s);
    d.iter().enumerate().all(|(m, &dx)| {
        let size = (m as u32).count_ones() as u128;
        if m == 0 {
            return true;
        }
        dx > 0 && (base as u128).checked_pow(dx as u32).is_none_or(|p| p >= size + 1)
    })
}

fn tuple_sets(s: &FinStruct) -> Vec<Vec<Vec<usize>>> {
    (0..s.signature().len())
        .map(|r| s.relation(r).iter().cloned().collect())
        .collect()
}

/// Plain backtracking isomorphism test, checking every relation at the end.
pub fn isomorphic(a: &FinStruct, b: &FinStruct) -> bool {
    if a.signature() != b.signature() || a.size() != b.size() || a.tuple_count() != b.tuple_count() {
        return false;
    }
    let n = a.size();
    let (ta, tb) = (tuple_sets(a), tuple_sets(b));
    let degree = |t: &Vec<Vec<Vec<usize>>>, p: usize| -> Vec<usize> {
        t.iter().map(|rel| rel.iter().filter(|tp| tp.contains(&p)).count()).collect()
    };
    let (da, db): (Vec<_>, Vec<_>) = ((0..n).map(|p| degree(&ta, p)).collect(), (0..n).map(|p| degree(&tb, p)).collect());
    fn go(
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        a: &FinStruct,
        b: &FinStruct,
        da: &[Vec<usize>],
        db: &[Vec<usize>],
    ) -> bool {
        let n = a.size();
        if i == n {
            return a.tuples().all(|(r, t)| {
                let img: Vec<usize> = t.iter().map(|&p| map[p]).collect();
                b.contains(r, &img)
            });
        }
        for j in 0..n {
            if used[j] || da[i] != db[j] {
                continue;
            }
            map.push(j);
            used[j] = true;
            // prune on tuples fully inside the mapped prefix
            let ok = a.tuples().all(|(r, t)| {
                if t.iter().all(|&p| p <= i) {
                    let img: Vec<usize> = t.iter().map(|&p| map[p]).collect();
                    b.contains(r, &img)
                } else {
                    true
                }
            });
            if ok && go(i + 1, map, used, a, b, da, db) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    go(0, &mut Vec::new(), &mut vec![false; n], a, b, &da, &db)
}

pub fn corpus_signature() -> Signature {
    "R:3,E:2,P:1".parse().unwrap()
}

pub fn random_structure(rng: &mut impl Rng, max_points: usize, max_tuples: usize) -> FinStruct {
    RandomShape {
        signature: corpus_signature(),
        max_points,
        max_tuples,
    }
    .sample(rng)
}

/// A uniformly random subset of the points as a mask.
pub fn random_mask(rng: &mut impl Rng, n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        rng.gen_range(0..=full(n))
    }
}
