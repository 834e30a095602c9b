//! Seeded random structures for experiments and property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::budget::Budget;
use crate::control::{kf_member, ControlFunction};
use crate::error::Result;
use crate::predim::is_self_sufficient;
use crate::structure::{FinStruct, Signature};

/// Shape limits for random structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomShape {
    pub signature: Signature,
    pub max_points: usize,
    pub max_tuples: usize,
}

impl RandomShape {
    /// A structure with `1..=max_points` points and up to `max_tuples`
    /// tuples, each drawn uniformly among tuples with distinct entries.
    pub fn sample(&self, rng: &mut impl Rng) -> FinStruct {
        let size = rng.gen_range(1..=self.max_points);
        let tuples = rng.gen_range(0..=self.max_tuples);
        let mut s = FinStruct::empty(self.signature.clone(), size);
        add_random_tuples(&mut s, 0, tuples, rng);
        s
    }

    /// Rejection-samples a structure in K_f. Gives up after `tries` draws.
    pub fn sample_in_kf(
        &self,
        f: &ControlFunction,
        tries: usize,
        rng: &mut impl Rng,
        budget: &Budget,
    ) -> Result<Option<FinStruct>> {
        for _ in 0..tries {
            let s = self.sample(rng);
            if kf_member(&s, f, budget)?.member {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }
}

/// Adds up to `count` random tuples, each using at least one point `≥ first_new`.
/// Relations whose arity exceeds the structure size are skipped.
pub fn add_random_tuples(s: &mut FinStruct, first_new: usize, count: usize, rng: &mut impl Rng) {
    let arities: Vec<(usize, usize)> = s
        .signature()
        .relations()
        .map(|(_, a)| a)
        .enumerate()
        .filter(|&(_, a)| a <= s.size())
        .collect();
    if arities.is_empty() || first_new >= s.size() {
        return;
    }
    let points: Vec<usize> = s.points().collect();
    for _ in 0..count {
        let &(rel, arity) = arities.choose(rng).expect("non-empty");
        let mut t: Vec<usize> = points.choose_multiple(rng, arity).copied().collect();
        if t.iter().all(|&p| p < first_new) {
            let slot = rng.gen_range(0..arity);
            let fresh = rng.gen_range(first_new..s.size());
            if t.contains(&fresh) {
                continue;
            }
            t[slot] = fresh;
        }
        s.insert_unchecked(rel, t);
    }
}

/// A random structure extending `base` (whose points come first) by
/// `1..=max_new` points, such that `base ≤` the result and the result lies in
/// K_f. Gives up after `tries` draws.
pub fn random_leq_extension(
    base: &FinStruct,
    max_new: usize,
    max_tuples: usize,
    f: &ControlFunction,
    tries: usize,
    rng: &mut impl Rng,
    budget: &Budget,
) -> Result<Option<FinStruct>> {
    let ident: Vec<usize> = base.points().collect();
    for _ in 0..tries {
        let new = rng.gen_range(1..=max_new);
        let mut b = base.clone().with_points(new);
        let count = rng.gen_range(0..=max_tuples);
        add_random_tuples(&mut b, base.size(), count, rng);
        if is_self_sufficient(&b, &ident)? && kf_member(&b, f, budget)?.member {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_respect_shape() {
        let shape = RandomShape {
            signature: "R:3,E:2".parse().unwrap(),
            max_points: 6,
            max_tuples: 5,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = shape.sample(&mut rng);
            assert!(s.size() <= 6 && s.tuple_count() <= 5);
        }
    }

    #[test]
    fn extensions_are_self_sufficient() {
        let base = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n").unwrap();
        let f = ControlFunction::log(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_leq_extension(&base, 3, 3, &f, 100, &mut rng, &Budget::default())
            .unwrap()
            .unwrap();
        assert!(b.size() > 3);
        assert!(is_self_sufficient(&b, &[0, 1, 2]).unwrap());
    }
}
