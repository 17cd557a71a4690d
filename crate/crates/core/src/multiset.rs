//! Finite multisets over an ordered carrier, with the embeddability order
//! (injective occurrence map raising each element) and the projectivity order
//! (surjective occurrence map lowering each element).
//!
//! Carrier comparisons go through a caller-supplied order oracle so the same
//! code serves `(omega, <=)` and co-trees under the bi-p-morphic image
//! relation. Expensive oracles should be memoized by the caller.

use crate::error::{Error, Result};

/// A finite multiset: items with positive multiplicities, distinct under the
/// carrier's equality. Occurrences are indexed in entry order.
#[derive(Clone, Debug)]
pub struct Multiset<T> {
    entries: Vec<(T, usize)>,
}

impl<T: Eq> PartialEq for Multiset<T> {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .all(|(item, mult)| other.multiplicity(item) == *mult)
    }
}
impl<T: Eq> Eq for Multiset<T> {}

impl<T: Eq> Multiset<T> {
    pub fn empty() -> Multiset<T> {
        Multiset { entries: Vec::new() }
    }

    pub fn from_items<I: IntoIterator<Item = T>>(items: I) -> Multiset<T> {
        let mut entries: Vec<(T, usize)> = Vec::new();
        for item in items {
            match entries.iter_mut().find(|(e, _)| *e == item) {
                Some((_, mult)) => *mult += 1,
                None => entries.push((item, 1)),
            }
        }
        Multiset { entries }
    }

    pub fn entries(&self) -> &[(T, usize)] {
        &self.entries
    }

    pub fn multiplicity(&self, item: &T) -> usize {
        self.entries.iter().find(|(e, _)| e == item).map_or(0, |(_, m)| *m)
    }

    /// Total number of occurrences, `l(M)`.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The occurrence list in entry order.
    pub fn occurrences(&self) -> Vec<&T> {
        self.entries
            .iter()
            .flat_map(|(item, mult)| std::iter::repeat_n(item, *mult))
            .collect()
    }
}

/// An occurrence-level map witnessing one of the two orders. For
/// [`embeddable`] it assigns each occurrence of the smaller multiset to one of
/// the larger; for [`projects`] the other way around.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MsetMapWitness {
    pub assignment: Vec<usize>,
}

/// Decides `N embeds-into M`: an injective occurrence map `f : N -> M` with
/// `q <= f(q)`. Solved as a bipartite matching saturating `N`, by augmenting
/// paths.
pub fn embeddable<T: Eq>(
    n: &Multiset<T>,
    m: &Multiset<T>,
    leq: impl Fn(&T, &T) -> bool,
) -> Option<MsetMapWitness> {
    let left = n.occurrences();
    let right = m.occurrences();
    if left.len() > right.len() {
        return None;
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|q| (0..right.len()).filter(|&j| leq(q, right[j])).collect())
        .collect();
    let mut match_left = vec![usize::MAX; left.len()];
    let mut match_right = vec![usize::MAX; right.len()];
    for i in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(i, &adj, &mut match_left, &mut match_right, &mut seen) {
            return None;
        }
    }
    Some(MsetMapWitness { assignment: match_left })
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    seen: &mut [bool],
) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if match_right[j] == usize::MAX
            || augment(match_right[j], adj, match_left, match_right, seen)
        {
            match_left[i] = j;
            match_right[j] = i;
            return true;
        }
    }
    false
}

/// Decides the projectivity order `N << M`: a surjective occurrence map
/// `f : M -> N` with `f(p) <= p`. Uses the characterization `N << M` iff
/// `N` embeds into `M` and every occurrence of `M` dominates some occurrence
/// of `N`; the witness extends the embedding's partial inverse.
pub fn projects<T: Eq>(
    n: &Multiset<T>,
    m: &Multiset<T>,
    leq: impl Fn(&T, &T) -> bool,
) -> Option<MsetMapWitness> {
    let embedding = embeddable(n, m, &leq)?;
    let left = n.occurrences();
    let right = m.occurrences();
    let mut assignment = vec![usize::MAX; right.len()];
    for (q_idx, &p_idx) in embedding.assignment.iter().enumerate() {
        assignment[p_idx] = q_idx;
    }
    for (p_idx, slot) in assignment.iter_mut().enumerate() {
        if *slot == usize::MAX {
            let dominated = (0..left.len()).find(|&q| leq(left[q], right[p_idx]))?;
            *slot = dominated;
        }
    }
    Some(MsetMapWitness { assignment })
}

/// Bound on `l(M)` for the exhaustive projectivity scan.
pub const BRUTE_FORCE_BOUND: usize = 8;

/// Direct scan over all surjective dominated occurrence maps `M -> N`.
/// Independent oracle for [`projects`]; errors above [`BRUTE_FORCE_BOUND`].
pub fn projects_bruteforce<T: Eq>(
    n: &Multiset<T>,
    m: &Multiset<T>,
    leq: impl Fn(&T, &T) -> bool,
) -> Result<Option<MsetMapWitness>> {
    if m.len() > BRUTE_FORCE_BOUND {
        return Err(Error::Size(format!(
            "brute-force scan limited to l(M) <= {BRUTE_FORCE_BOUND}, got {}",
            m.len()
        )));
    }
    let left = n.occurrences();
    let right = m.occurrences();
    if n.is_empty() {
        return Ok(if m.is_empty() {
            Some(MsetMapWitness { assignment: Vec::new() })
        } else {
            None
        });
    }
    let candidates: Vec<Vec<usize>> = right
        .iter()
        .map(|p| (0..left.len()).filter(|&q| leq(left[q], p)).collect())
        .collect();
    let mut assignment = vec![usize::MAX; right.len()];
    let mut hits = vec![0usize; left.len()];
    fn rec(
        p: usize,
        candidates: &[Vec<usize>],
        assignment: &mut Vec<usize>,
        hits: &mut Vec<usize>,
        unhit: usize,
    ) -> bool {
        if p == candidates.len() {
            return unhit == 0;
        }
        if unhit > candidates.len() - p {
            return false;
        }
        for &q in &candidates[p] {
            assignment[p] = q;
            hits[q] += 1;
            let next = if hits[q] == 1 { unhit - 1 } else { unhit };
            if rec(p + 1, candidates, assignment, hits, next) {
                return true;
            }
            hits[q] -= 1;
            assignment[p] = usize::MAX;
        }
        false
    }
    let unhit = left.len();
    Ok(if rec(0, &candidates, &mut assignment, &mut hits, unhit) {
        Some(MsetMapWitness { assignment })
    } else {
        None
    })
}

/// Validates a projectivity witness: total, dominated, surjective.
pub fn witness_projects<T: Eq>(
    witness: &MsetMapWitness,
    n: &Multiset<T>,
    m: &Multiset<T>,
    leq: impl Fn(&T, &T) -> bool,
) -> bool {
    let left = n.occurrences();
    let right = m.occurrences();
    if witness.assignment.len() != right.len() {
        return false;
    }
    let mut hit = vec![false; left.len()];
    for (p, &q) in witness.assignment.iter().enumerate() {
        if q >= left.len() || !leq(left[q], right[p]) {
            return false;
        }
        hit[q] = true;
    }
    hit.into_iter().all(|h| h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cotree::CoTree;
    use crate::morphism::leq_p;

    fn nat(items: &[u32]) -> Multiset<u32> {
        Multiset::from_items(items.iter().copied())
    }

    fn nat_leq(a: &u32, b: &u32) -> bool {
        a <= b
    }

    #[test]
    fn embeddability_known_examples() {
        assert!(embeddable(&nat(&[2, 5, 2]), &nat(&[6, 3, 3, 1]), nat_leq).is_some());
        assert!(embeddable(&nat(&[2, 5, 2]), &nat(&[6, 3, 1]), nat_leq).is_none());
        let w = embeddable(&nat(&[]), &nat(&[4, 4]), nat_leq).unwrap();
        assert!(w.assignment.is_empty());
    }

    #[test]
    fn embedding_witness_is_injective_and_raising() {
        let n = nat(&[2, 5, 2]);
        let m = nat(&[6, 3, 3, 1]);
        let w = embeddable(&n, &m, nat_leq).unwrap();
        let left = n.occurrences();
        let right = m.occurrences();
        let mut used = vec![false; right.len()];
        for (q, &p) in w.assignment.iter().enumerate() {
            assert!(!used[p]);
            used[p] = true;
            assert!(left[q] <= right[p]);
        }
    }

    #[test]
    fn projectivity_small_cases() {
        // Verified by the exhaustive surjection scan.
        let yes = projects_bruteforce(&nat(&[1, 1]), &nat(&[2, 3]), nat_leq).unwrap();
        assert!(yes.is_some());
        assert!(projects(&nat(&[1, 1]), &nat(&[2, 3]), nat_leq).is_some());

        assert!(projects_bruteforce(&nat(&[2]), &nat(&[1, 3]), nat_leq).unwrap().is_none());
        assert!(projects(&nat(&[2]), &nat(&[1, 3]), nat_leq).is_none());

        assert!(projects(&nat(&[1]), &nat(&[2, 3]), nat_leq).is_some());
        assert!(projects(&nat(&[1, 2]), &nat(&[2]), nat_leq).is_none());

        // Embeddable but not projectable: nothing in [5] sits below 1.
        assert!(embeddable(&nat(&[5]), &nat(&[6, 1]), nat_leq).is_some());
        assert!(projects(&nat(&[5]), &nat(&[6, 1]), nat_leq).is_none());
    }

    #[test]
    fn degenerate_lengths() {
        assert!(projects(&nat(&[]), &nat(&[]), nat_leq).is_some());
        assert!(projects(&nat(&[1]), &nat(&[]), nat_leq).is_none());
        assert!(projects(&nat(&[]), &nat(&[1]), nat_leq).is_none());
        assert!(projects_bruteforce(&nat(&[]), &nat(&[1]), nat_leq).unwrap().is_none());
    }

    #[test]
    fn projection_witness_is_valid() {
        let n = nat(&[1, 1, 3]);
        let m = nat(&[2, 3, 4, 1]);
        let w = projects(&n, &m, nat_leq).unwrap();
        assert!(witness_projects(&w, &n, &m, nat_leq));
    }

    #[test]
    fn size_guard() {
        let long = nat(&[1, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert!(matches!(projects_bruteforce(&nat(&[1]), &long, nat_leq), Err(Error::Size(_))));
    }

    #[test]
    fn cotree_carrier() {
        let dot = CoTree::singleton();
        let c1 = CoTree::comb(1).unwrap();
        let n = Multiset::from_items([dot.clone()]);
        let m = Multiset::from_items([c1.clone()]);
        let oracle = |a: &CoTree, b: &CoTree| leq_p(a, b).is_some();
        assert!(projects(&n, &m, oracle).is_some());
        assert!(projects_bruteforce(&n, &m, oracle).unwrap().is_some());
        // The reverse fails: the comb cannot project onto the singleton's slot
        // while covering itself.
        assert!(projects(&m, &n, oracle).is_none());
    }

    #[test]
    fn multiset_equality_ignores_entry_order() {
        assert_eq!(nat(&[1, 2, 1]), nat(&[2, 1, 1]));
        assert_ne!(nat(&[1, 2]), nat(&[1, 1, 2]));
    }
}
