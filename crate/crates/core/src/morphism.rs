//! Bi-p-morphisms between finite posets: order preserving maps satisfying the
//! Up and Down lifting conditions, and the bi-p-morphic image relation on
//! co-trees decided by backtracking search.

use std::fmt;

use crate::cotree::CoTree;
use crate::error::{Error, Result};
use crate::poset::Poset;

/// A total map between two posets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PosetMap {
    pub src: Poset,
    pub tgt: Poset,
    /// `map[x]` is the image of source element `x`.
    pub map: Vec<usize>,
}

impl PosetMap {
    pub fn new(src: Poset, tgt: Poset, map: Vec<usize>) -> Result<PosetMap> {
        if map.len() != src.len() {
            return Err(Error::Shape(format!(
                "map has {} entries for a {}-element source",
                map.len(),
                src.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= tgt.len()) {
            return Err(Error::Index { index: bad, n: tgt.len() });
        }
        Ok(PosetMap { src, tgt, map })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.tgt.len()];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Witness text: a header naming source and target, then one line per
    /// source element.
    pub fn render(&self, src_name: &str, tgt_name: &str) -> String {
        let mut s = format!("# source={src_name} target={tgt_name}\n");
        for (i, &j) in self.map.iter().enumerate() {
            s.push_str(&format!("{i} -> {j}\n"));
        }
        s
    }
}

/// The first condition a candidate map violates, with a witnessing pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Violation {
    /// `x <= z` in the source but the images are not related.
    OrderPreservation { x: usize, z: usize },
    /// `f(x) <= y` with no `z` above `x` mapping to `y`.
    Up { x: usize, y: usize },
    /// `y <= f(x)` with no `z` below `x` mapping to `y`.
    Down { x: usize, y: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderPreservation { x, z } => {
                write!(f, "order preservation fails at ({x}, {z})")
            }
            Violation::Up { x, y } => write!(f, "Up fails at x={x}, y={y}"),
            Violation::Down { x, y } => write!(f, "Down fails at x={x}, y={y}"),
        }
    }
}

/// Outcome of [`check_bi_p_morphism`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MorphismReport {
    pub ok: bool,
    pub violation: Option<Violation>,
}

/// Checks the three bi-p-morphism conditions, reporting the first violation
/// in the fixed order: order preservation, Up, Down, each scanned
/// lexicographically.
pub fn check_bi_p_morphism(f: &PosetMap) -> Result<MorphismReport> {
    if f.map.len() != f.src.len() {
        return Err(Error::Shape("map is not total".into()));
    }
    for &v in &f.map {
        if v >= f.tgt.len() {
            return Err(Error::Shape(format!("image {v} out of range")));
        }
    }
    let n = f.src.len();
    for x in 0..n {
        for z in 0..n {
            if f.src.leq(x, z) && !f.tgt.leq(f.map[x], f.map[z]) {
                return Ok(MorphismReport {
                    ok: false,
                    violation: Some(Violation::OrderPreservation { x, z }),
                });
            }
        }
    }
    for x in 0..n {
        for y in 0..f.tgt.len() {
            if f.tgt.leq(f.map[x], y)
                && !f.src.up_set(x).iter().any(|z| f.map[z] == y)
            {
                return Ok(MorphismReport { ok: false, violation: Some(Violation::Up { x, y }) });
            }
        }
    }
    for x in 0..n {
        for y in 0..f.tgt.len() {
            if f.tgt.leq(y, f.map[x])
                && !f.src.down_set(x).iter().any(|z| f.map[z] == y)
            {
                return Ok(MorphismReport { ok: false, violation: Some(Violation::Down { x, y }) });
            }
        }
    }
    Ok(MorphismReport { ok: true, violation: None })
}

/// All bi-p-morphisms from `src` to `tgt`, in lexicographic order of the map
/// vector. Exhaustive scan; meant for small inputs and as the oracle behind
/// [`leq_p`].
pub fn enumerate_bi_p_morphisms(src: &Poset, tgt: &Poset) -> Vec<PosetMap> {
    let n = src.len();
    if n == 0 {
        let f = PosetMap { src: src.clone(), tgt: tgt.clone(), map: Vec::new() };
        return vec![f];
    }
    if tgt.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    loop {
        let f = PosetMap { src: src.clone(), tgt: tgt.clone(), map: map.clone() };
        if check_bi_p_morphism(&f).expect("total map").ok {
            out.push(f);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            map[k] += 1;
            if map[k] < tgt.len() {
                break;
            }
            map[k] = 0;
        }
    }
}

/// Decides the bi-p-morphic image relation `target <=p source`: returns the
/// lexicographically least surjective bi-p-morphism from `source` onto
/// `target`, or `None`. Only defined between co-trees.
pub fn leq_p(target: &CoTree, source: &CoTree) -> Option<PosetMap> {
    let src = source.poset();
    let tgt = target.poset();
    if tgt.len() > src.len() {
        return None;
    }
    let searcher = LeqSearch {
        src,
        tgt,
        src_root: source.coroot(),
        tgt_root: target.coroot(),
        src_cover: cover_matrix(src),
        tgt_cover: cover_matrix(tgt),
    };
    let mut map = vec![usize::MAX; src.len()];
    let mut hits = vec![0usize; tgt.len()];
    let unhit = tgt.len();
    if searcher.assign(0, &mut map, &mut hits, unhit) {
        let f = PosetMap { src: src.clone(), tgt: tgt.clone(), map };
        debug_assert!(f.is_surjective());
        debug_assert!(check_bi_p_morphism(&f).unwrap().ok);
        Some(f)
    } else {
        None
    }
}

fn cover_matrix(p: &Poset) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; p.len()]; p.len()];
    for &(i, j) in p.covers() {
        m[i][j] = true;
    }
    m
}

struct LeqSearch<'a> {
    src: &'a Poset,
    tgt: &'a Poset,
    src_root: usize,
    tgt_root: usize,
    src_cover: Vec<Vec<bool>>,
    tgt_cover: Vec<Vec<bool>>,
}

impl LeqSearch<'_> {
    fn assign(&self, x: usize, map: &mut Vec<usize>, hits: &mut Vec<usize>, unhit: usize) -> bool {
        if x == self.src.len() {
            if unhit > 0 {
                return false;
            }
            let f = PosetMap {
                src: self.src.clone(),
                tgt: self.tgt.clone(),
                map: map.clone(),
            };
            return check_bi_p_morphism(&f).expect("total map").ok;
        }
        // Even hitting a new target with every remaining element cannot
        // reach surjectivity from here.
        if unhit > self.src.len() - x {
            return false;
        }
        'candidates: for c in 0..self.tgt.len() {
            if !self.feasible(x, c, map) {
                continue 'candidates;
            }
            map[x] = c;
            hits[c] += 1;
            let next_unhit = if hits[c] == 1 { unhit - 1 } else { unhit };
            if self.assign(x + 1, map, hits, next_unhit) {
                return true;
            }
            hits[c] -= 1;
            map[x] = usize::MAX;
        }
        false
    }

    /// Necessary conditions for `f(x) = c` inside a surjective bi-p-morphism
    /// between co-trees: roots correspond, depth and downset size cannot
    /// grow, extremes map to extremes, order preservation against assigned
    /// elements, and covers collapse or stay covers.
    fn feasible(&self, x: usize, c: usize, map: &[usize]) -> bool {
        if x == self.src_root && c != self.tgt_root {
            return false;
        }
        if self.tgt.up_set(c).len() > self.src.up_set(x).len() {
            return false;
        }
        if self.tgt.down_set(c).len() > self.src.down_set(x).len() {
            return false;
        }
        if self.src.is_minimal(x) && !self.tgt.is_minimal(c) {
            return false;
        }
        for (y, &fy) in map.iter().enumerate() {
            if fy == usize::MAX {
                continue;
            }
            if self.src.leq(y, x) && !self.tgt.leq(fy, c) {
                return false;
            }
            if self.src.leq(x, y) && !self.tgt.leq(c, fy) {
                return false;
            }
            if self.src_cover[y][x] && !(fy == c || self.tgt_cover[fy][c]) {
                return false;
            }
            if self.src_cover[x][y] && !(c == fy || self.tgt_cover[c][fy]) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_poset(n: usize) -> Poset {
        CoTree::chain(n).unwrap().poset().clone()
    }

    #[test]
    fn identity_and_constant_maps() {
        let c2 = CoTree::comb(2).unwrap().poset().clone();
        let id = PosetMap::new(c2.clone(), c2.clone(), (0..4).collect()).unwrap();
        assert!(check_bi_p_morphism(&id).unwrap().ok);

        let single = chain_poset(1);
        let constant = PosetMap::new(c2.clone(), single, vec![0; 4]).unwrap();
        assert!(check_bi_p_morphism(&constant).unwrap().ok);
    }

    #[test]
    fn chain_into_antichain_breaks_order_preservation() {
        // 0 < 1 in the source, but the images are incomparable, so order
        // preservation is the first condition to fail.
        let antichain = Poset::antichain(2).unwrap();
        let f = PosetMap::new(chain_poset(2), antichain, vec![0, 1]).unwrap();
        let report = check_bi_p_morphism(&f).unwrap();
        assert!(!report.ok);
        assert_eq!(report.violation, Some(Violation::OrderPreservation { x: 0, z: 1 }));
    }

    #[test]
    fn shape_errors() {
        let p = chain_poset(2);
        assert!(PosetMap::new(p.clone(), p.clone(), vec![0]).is_err());
        assert!(PosetMap::new(p.clone(), p, vec![0, 7]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let two = chain_poset(2);
        let maps = enumerate_bi_p_morphisms(&two, &two);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].map, vec![0, 1]);

        // hcomb(1) onto chain(2): at least one (both leaves to the bottom).
        let fork = CoTree::hcomb(1).unwrap().poset().clone();
        let onto_chain = enumerate_bi_p_morphisms(&fork, &two);
        assert!(!onto_chain.is_empty());
        assert!(onto_chain.iter().all(PosetMap::is_surjective));

        // chain(2) into comb(2): no bi-p-morphism at all (they would all be
        // surjective, which size forbids).
        let c2 = CoTree::comb(2).unwrap().poset().clone();
        assert!(enumerate_bi_p_morphisms(&two, &c2).is_empty());
    }

    #[test]
    fn leq_p_basics() {
        let singleton = CoTree::singleton();
        for t in [CoTree::comb(3).unwrap(), CoTree::tau(2, 2).unwrap(), CoTree::chain(5).unwrap()]
        {
            assert!(leq_p(&singleton, &t).is_some());
        }

        let c1 = CoTree::comb(1).unwrap();
        let h1 = CoTree::hcomb(1).unwrap();
        let c2 = CoTree::comb(2).unwrap();
        assert!(leq_p(&c1, &h1).is_some());
        assert!(leq_p(&h1, &c2).is_some());
        assert!(leq_p(&h1, &c1).is_none());
        assert!(leq_p(&c2, &h1).is_none());

        assert!(leq_p(&CoTree::tau(1, 1).unwrap(), &CoTree::tau(2, 1).unwrap()).is_some());
        assert!(leq_p(&CoTree::tau(2, 1).unwrap(), &CoTree::tau(1, 1).unwrap()).is_none());
    }

    #[test]
    fn explicit_grid_collapse_is_a_bi_p_morphism() {
        // The standard collapse tau(m',k') ->> tau(m,k) for m <= m', k <= k':
        // chain points map by index capped at m, minimal points by index
        // capped at k. Indices: x_i = i, y_j = m + 1 + j.
        for (m, k, m2, k2) in [(1, 1, 2, 1), (0, 1, 3, 2), (2, 3, 4, 4), (1, 0, 4, 0)] {
            let tgt = CoTree::tau(m, k).unwrap();
            let src = CoTree::tau(m2, k2).unwrap();
            let mut map = Vec::new();
            for i in 0..=m2 {
                map.push(i.min(m));
            }
            for j in 0..=k2 {
                map.push(m + 1 + j.min(k));
            }
            let f = PosetMap::new(src.poset().clone(), tgt.poset().clone(), map).unwrap();
            assert!(check_bi_p_morphism(&f).unwrap().ok, "collapse ({m},{k}) <- ({m2},{k2})");
            assert!(f.is_surjective());
        }
    }

    #[test]
    fn leq_p_matches_enumeration_oracle() {
        let trees: Vec<CoTree> = crate::cotree::enumerate_cotrees(5).collect();
        for target in &trees {
            for source in &trees {
                let fast = leq_p(target, source);
                let all = enumerate_bi_p_morphisms(source.poset(), target.poset());
                let surjective: Vec<&PosetMap> =
                    all.iter().filter(|f| f.is_surjective()).collect();
                assert_eq!(
                    fast.is_some(),
                    !surjective.is_empty(),
                    "target {target:?} source {source:?}"
                );
                if let Some(found) = fast {
                    // The backtracker returns the lexicographically least map.
                    assert_eq!(&found.map, &surjective[0].map);
                }
            }
        }
    }

    #[test]
    fn image_never_larger_than_source() {
        let trees: Vec<CoTree> = crate::cotree::enumerate_cotrees(6).collect();
        for target in &trees {
            for source in &trees {
                if leq_p(target, source).is_some() {
                    assert!(target.len() <= source.len());
                    assert!(target.height() <= source.height());
                }
            }
        }
    }
}
