//! Co-trees: finite posets with a greatest element whose principal upsets are
//! chains. Isomorphic co-trees are identified through a canonical rooted-tree
//! code, and the standard families (combs, hcombs, chains, `tau(m, k)`) are
//! built here.
//!
//! `tau(m, k)` uses the disjoint convention: a chain `x0 > ... > xm` with
//! `k + 1` fresh minimal points below `xm`, so `tau(m, 0)` is the
//! `(m + 2)`-chain and the singleton is not in the image of `tau`.

use std::fmt;

use crate::error::{Error, Result};
use crate::poset::{ElemSet, Poset};

/// Canonical encoding of a co-tree as a rooted unordered tree: children codes
/// are sorted and wrapped in parentheses. Codes are equal iff the co-trees are
/// order isomorphic, and their lexicographic order is the global enumeration
/// order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A validated co-tree. Ordering, equality, and hashing all go through the
/// canonical code, matching the identification of isomorphic co-trees.
#[derive(Clone)]
pub struct CoTree {
    poset: Poset,
    coroot: usize,
    code: CanonicalCode,
}

impl PartialEq for CoTree {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}
impl Eq for CoTree {}

impl PartialOrd for CoTree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CoTree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code.cmp(&other.code)
    }
}

impl std::hash::Hash for CoTree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl fmt::Debug for CoTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoTree({})", self.code)
    }
}

/// The structure-lemma decomposition of a co-tree with at least two elements:
/// a chain of `m + 1` points over `k + 1` grafted sub-co-trees.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    pub m: usize,
    /// Grafted parts, sorted by canonical code. Length `k + 1`.
    pub parts: Vec<CoTree>,
}

impl Decomposition {
    pub fn k(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn part_codes(&self) -> Vec<CanonicalCode> {
        self.parts.iter().map(|p| p.code().clone()).collect()
    }
}

impl CoTree {
    /// Validates that `poset` is a co-tree and locates the co-root.
    pub fn new(poset: Poset) -> Result<CoTree> {
        if poset.is_empty() {
            return Err(Error::Usage("the empty poset is not a co-tree".into()));
        }
        let class = poset.classify();
        if !class.is_cotree() {
            return Err(Error::Usage(format!(
                "poset is not a co-tree (classified as {:?})",
                class.kind
            )));
        }
        let coroot = poset.maximal_elements()[0];
        let code = code_of(&poset, coroot);
        Ok(CoTree { poset, coroot, code })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn coroot(&self) -> usize {
        self.coroot
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_singleton(&self) -> bool {
        self.poset.len() == 1
    }

    pub fn is_chain(&self) -> bool {
        self.poset.is_chain_set(ElemSet::full(self.poset.len()))
    }

    /// The singleton co-tree.
    pub fn singleton() -> CoTree {
        CoTree::chain(1).expect("singleton is a chain")
    }

    /// The `len`-element chain, `len >= 1`.
    pub fn chain(len: usize) -> Result<CoTree> {
        if len == 0 {
            return Err(Error::Param("chain length must be at least 1".into()));
        }
        let pairs: Vec<(usize, usize)> = (0..len - 1).map(|i| (i, i + 1)).collect();
        CoTree::new(Poset::from_covers(len, &pairs)?)
    }

    /// The `n`-comb: spine `c1 < ... < cn` with one extra leaf below each
    /// spine point. `2n` elements, `n >= 1`.
    pub fn comb(n: usize) -> Result<CoTree> {
        if n == 0 {
            return Err(Error::Param("comb index must be at least 1".into()));
        }
        let mut pairs = Vec::new();
        for i in 0..n - 1 {
            pairs.push((i, i + 1));
        }
        for i in 0..n {
            pairs.push((n + i, i));
        }
        CoTree::new(Poset::from_covers(2 * n, &pairs)?)
    }

    /// The `n`-comb with handle: the `n`-comb plus one extra bottom point on
    /// the spine. `2n + 1` elements; `hcomb(0)` is the singleton.
    pub fn hcomb(n: usize) -> Result<CoTree> {
        if n == 0 {
            return Ok(CoTree::singleton());
        }
        let mut pairs = Vec::new();
        for i in 0..n - 1 {
            pairs.push((i, i + 1));
        }
        for i in 0..n {
            pairs.push((n + i, i));
        }
        pairs.push((2 * n, 0));
        CoTree::new(Poset::from_covers(2 * n + 1, &pairs)?)
    }

    /// `tau(m, k)` under the disjoint convention: `m + k + 2` elements.
    pub fn tau(m: usize, k: usize) -> Result<CoTree> {
        let mut pairs = Vec::new();
        for i in 0..m {
            pairs.push((i + 1, i));
        }
        for j in 0..=k {
            pairs.push((m + 1 + j, m));
        }
        CoTree::new(Poset::from_covers(m + k + 2, &pairs)?)
    }

    /// Depth of `x` below the co-root (the co-root has depth 0). Well defined
    /// because principal upsets are chains.
    pub fn depth(&self, x: usize) -> usize {
        self.poset.up_set(x).len() - 1
    }

    /// Height of the co-tree: the longest chain length.
    pub fn height(&self) -> usize {
        (0..self.poset.len()).map(|x| self.poset.up_set(x).len()).max().unwrap()
    }

    /// The sub-co-tree on the principal downset of `y`.
    pub fn principal_downtree(&self, y: usize) -> CoTree {
        let (sub, _) = self.poset.induced(self.poset.down_set(y));
        CoTree::new(sub).expect("principal downsets of co-trees are co-trees")
    }

    /// The structure-lemma decomposition. Chains of length `l >= 2` yield
    /// `(m = l - 2, parts = [singleton])`; otherwise `m + 1` is the length of
    /// the chain from the greatest branching point up to the co-root, and the
    /// parts are the downsets of its immediate predecessors.
    pub fn decompose(&self) -> Result<Decomposition> {
        let n = self.poset.len();
        if n == 1 {
            return Err(Error::Singleton);
        }
        if self.is_chain() {
            return Ok(Decomposition { m: n - 2, parts: vec![CoTree::singleton()] });
        }
        // Branching points are upward directed in a co-tree, so the greatest
        // one is the unique one closest to the co-root.
        let z = (0..n)
            .filter(|&x| self.poset.immediate_predecessors(x).len() >= 2)
            .min_by_key(|&x| self.poset.up_set(x).len())
            .expect("non-chain co-tree has a branching point");
        let m = self.poset.up_set(z).len() - 1;
        let mut parts: Vec<CoTree> = self
            .poset
            .immediate_predecessors(z)
            .into_iter()
            .map(|y| self.principal_downtree(y))
            .collect();
        parts.sort();
        Ok(Decomposition { m, parts })
    }

    /// Inverse of [`CoTree::decompose`]: a chain `x0 > ... > xm` with each
    /// part's co-root attached immediately below `xm`.
    pub fn reconstruct(m: usize, parts: &[CoTree]) -> Result<CoTree> {
        if parts.is_empty() {
            return Err(Error::EmptyParts);
        }
        let mut pairs = Vec::new();
        for i in 0..m {
            pairs.push((i + 1, i));
        }
        let mut offset = m + 1;
        for part in parts {
            for &(a, b) in part.poset.covers() {
                pairs.push((a + offset, b + offset));
            }
            pairs.push((part.coroot + offset, m));
            offset += part.len();
        }
        CoTree::new(Poset::from_covers(offset, &pairs)?)
    }

    /// Comb number by the structure-lemma recursion: 0 for the singleton, 1
    /// for longer chains, otherwise one more than the largest part.
    pub fn comb_number(&self) -> usize {
        if self.is_singleton() {
            0
        } else if self.is_chain() {
            1
        } else {
            let dec = self.decompose().expect("non-singleton");
            1 + dec.parts.iter().map(|p| p.comb_number()).max().unwrap()
        }
    }

    /// Comb number by exhaustive embedding search: the largest `n` with
    /// `comb(n)` order-embeddable here, or 0. Kept as a permanent independent
    /// oracle for the recursion above.
    pub fn comb_number_bruteforce(&self) -> usize {
        let mut best = 0;
        let mut n = 1;
        while 2 * n <= self.len() {
            let comb = CoTree::comb(n).expect("n >= 1");
            if comb.poset.order_embedding(&self.poset).is_some() {
                best = n;
            } else {
                break;
            }
            n += 1;
        }
        best
    }

    /// Membership in `T_n`: no `n`-comb embeds, i.e. the comb number is below
    /// `n`. Requires `n >= 1`.
    pub fn in_t(&self, n: usize) -> Result<bool> {
        if n == 0 {
            return Err(Error::Param("T_n is defined for n >= 1".into()));
        }
        Ok(self.comb_number() < n)
    }
}

fn code_of(poset: &Poset, root: usize) -> CanonicalCode {
    fn rec(poset: &Poset, x: usize) -> String {
        let mut children: Vec<String> =
            poset.immediate_predecessors(x).into_iter().map(|y| rec(poset, y)).collect();
        children.sort();
        let mut s = String::with_capacity(2 + children.iter().map(String::len).sum::<usize>());
        s.push('(');
        for c in children {
            s.push_str(&c);
        }
        s.push(')');
        s
    }
    CanonicalCode(rec(poset, root))
}

/// Every isomorphism class of co-tree with at most `max_nodes` elements,
/// exactly once, in canonical-code order. Trees are generated size by size
/// from multisets of smaller trees; the poset-filter oracle certifying the
/// counts lives in the tests.
pub fn enumerate_cotrees(max_nodes: usize) -> impl Iterator<Item = CoTree> {
    let mut by_size: Vec<Vec<CoTree>> = vec![Vec::new()];
    if max_nodes >= 1 {
        by_size.push(vec![CoTree::singleton()]);
    }
    for size in 2..=max_nodes {
        // Pool of candidate children ordered by (size, code); choosing
        // non-decreasing index sequences enumerates each multiset once.
        let pool: Vec<&CoTree> = by_size[1..size].iter().flatten().collect();
        let mut children: Vec<usize> = Vec::new();
        let mut trees: Vec<CoTree> = Vec::new();
        fill_children(&pool, size - 1, 0, &mut children, &mut trees);
        trees.sort();
        by_size.push(trees);
    }
    let mut all: Vec<CoTree> = by_size.into_iter().flatten().collect();
    all.sort();
    all.into_iter()
}

fn fill_children(
    pool: &[&CoTree],
    remaining: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<CoTree>,
) {
    if remaining == 0 {
        let parts: Vec<CoTree> = chosen.iter().map(|&i| pool[i].clone()).collect();
        out.push(CoTree::reconstruct(0, &parts).expect("non-empty children"));
        return;
    }
    for i in from..pool.len() {
        if pool[i].len() <= remaining {
            chosen.push(i);
            fill_children(pool, remaining - pool[i].len(), i, chosen, out);
            chosen.pop();
        }
    }
}
