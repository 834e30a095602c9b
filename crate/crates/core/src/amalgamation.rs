//! Free amalgamation of two structures over a common part.

use crate::error::{Error, Result};
use crate::structure::FinStruct;

/// The free amalgam together with the two canonical injections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub structure: FinStruct,
    /// Where each point of the left factor went (always the identity).
    pub left: Vec<usize>,
    /// Where each point of the right factor went.
    pub right: Vec<usize>,
}

/// Glues `right` onto `left` along `glue`, a list of `(left point, right point)`
/// pairs. The glued parts must induce isomorphic substructures under the
/// pairing. Points of `left` keep their identifiers; the unglued points of
/// `right` follow in increasing order. The tuples are exactly those of the two
/// factors.
pub fn free_amalgam(left: &FinStruct, right: &FinStruct, glue: &[(usize, usize)]) -> Result<Amalgam> {
    if left.signature() != right.signature() {
        return Err(Error::SignatureMismatch);
    }
    let (l_pts, r_pts): (Vec<usize>, Vec<usize>) = glue.iter().copied().unzip();
    left.check_points(&l_pts)?;
    right.check_points(&r_pts)?;

    let mut right_to_left = vec![usize::MAX; right.size()];
    let mut left_to_right = vec![usize::MAX; left.size()];
    for &(l, r) in glue {
        if right_to_left[r] != usize::MAX || left_to_right[l] != usize::MAX {
            return Err(Error::NotAnEmbedding(format!(
                "gluing pair ({l}, {r}) repeats a point"
            )));
        }
        right_to_left[r] = l;
        left_to_right[l] = r;
    }

    // The identification must be an isomorphism of the induced substructures.
    for (rel, t) in left.tuples() {
        if t.iter().all(|&p| left_to_right[p] != usize::MAX) {
            let image: Vec<usize> = t.iter().map(|&p| left_to_right[p]).collect();
            if !right.contains(rel, &image) {
                return Err(Error::NotAnEmbedding(format!(
                    "left tuple {} {:?} has no counterpart on the right",
                    left.signature().name(rel),
                    t
                )));
            }
        }
    }
    for (rel, t) in right.tuples() {
        if t.iter().all(|&p| right_to_left[p] != usize::MAX) {
            let image: Vec<usize> = t.iter().map(|&p| right_to_left[p]).collect();
            if !left.contains(rel, &image) {
                return Err(Error::NotAnEmbedding(format!(
                    "right tuple {} {:?} has no counterpart on the left",
                    right.signature().name(rel),
                    t
                )));
            }
        }
    }

    let mut next = left.size();
    let right_map: Vec<usize> = right_to_left
        .iter()
        .map(|&l| {
            if l != usize::MAX {
                l
            } else {
                next += 1;
                next - 1
            }
        })
        .collect();

    let mut out = FinStruct::empty(left.signature().clone(), next);
    for (rel, t) in left.tuples() {
        out.insert_unchecked(rel, t.to_vec());
    }
    for (rel, t) in right.tuples() {
        out.insert_unchecked(rel, t.iter().map(|&p| right_map[p]).collect());
    }
    Ok(Amalgam {
        structure: out,
        left: (0..left.size()).collect(),
        right: right_map,
    })
}

/// Free amalgam of `copies` copies of `b` over the points `base`. The first
/// copy keeps its identifiers; the result also lists each copy's point map.
pub fn free_power(b: &FinStruct, base: &[usize], copies: usize) -> Result<(FinStruct, Vec<Vec<usize>>)> {
    b.check_points(base)?;
    if copies == 0 {
        return Err(Error::InvalidParams("free power needs at least one copy".into()));
    }
    let mut acc = b.clone();
    let mut maps = vec![(0..b.size()).collect::<Vec<_>>()];
    let glue: Vec<(usize, usize)> = base.iter().map(|&p| (p, p)).collect();
    for _ in 1..copies {
        let am = free_amalgam(&acc, b, &glue)?;
        acc = am.structure;
        maps.push(am.right);
    }
    Ok((acc, maps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> FinStruct {
        FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n").unwrap()
    }

    #[test]
    fn two_triangles_over_a_point() {
        let am = free_amalgam(&s1(), &s1(), &[(0, 0)]).unwrap();
        assert_eq!(am.structure.size(), 5);
        assert_eq!(am.structure.tuple_count(), 2);
        assert_eq!(am.right, vec![0, 3, 4]);
        assert!(am.structure.contains(0, &[0, 3, 4]));
    }

    #[test]
    fn gluing_along_everything_is_identity() {
        let am = free_amalgam(&s1(), &s1(), &[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(am.structure, s1());
    }

    #[test]
    fn rejects_non_isomorphic_gluing() {
        let free = FinStruct::parse("points 3\nrel R 3\n").unwrap();
        let err = free_amalgam(&s1(), &free, &[(0, 0), (1, 1), (2, 2)]).unwrap_err();
        assert!(matches!(err, Error::NotAnEmbedding(_)));
        let err = free_amalgam(&s1(), &s1(), &[(0, 1), (1, 0), (2, 2)]).unwrap_err();
        assert!(matches!(err, Error::NotAnEmbedding(_)));
        let err = free_amalgam(&s1(), &s1(), &[(0, 0), (0, 1)]).unwrap_err();
        assert!(matches!(err, Error::NotAnEmbedding(_)));
    }

    #[test]
    fn free_power_counts() {
        let (p, maps) = free_power(&s1(), &[0, 1], 3).unwrap();
        assert_eq!(p.size(), 5);
        assert_eq!(p.tuple_count(), 3);
        assert_eq!(maps.len(), 3);
        assert_eq!(maps[2], vec![0, 1, 4]);
    }
}
