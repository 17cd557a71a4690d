//! Finite posets on dense indices `0..n`.
//!
//! The relation is stored as a closed comparability table (one `u64` row per
//! element), so everything here assumes `n <= 64`. That bound is far above
//! what the rest of the crate ever asks for.

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on element count imposed by the bitmask representation.
pub const MAX_ELEMENTS: usize = 64;

/// A set of poset elements, backed by a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> ElemSet {
        debug_assert!(n <= MAX_ELEMENTS);
        if n == 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> ElemSet {
        ElemSet(1u64 << x)
    }

    pub fn from_bits(bits: u64) -> ElemSet {
        ElemSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 & (1u64 << x) != 0
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << x;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn inter(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn minus(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending iterator over the elements.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }

    /// Canonical order: by size, then lexicographic on ascending element lists.
    pub fn canonical_cmp(self, other: ElemSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                std::cmp::Ordering::Equal
            } else {
                // The set owning the lowest differing element comes first.
                let low = diff & diff.wrapping_neg();
                if self.0 & low != 0 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            }
        })
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Direction argument for [`Poset::cone`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dir {
    Up,
    Down,
}

/// Classification of a finite poset.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PosetKind {
    Singleton,
    Chain,
    CotreeNonchain,
    CoforestNoncotree,
    Other,
}

/// Result of [`Poset::classify`]: the kind plus the connected components in
/// order of least element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PosetClass {
    pub kind: PosetKind,
    pub components: Vec<ElemSet>,
}

impl PosetClass {
    /// True when every component is a co-tree (includes single co-trees).
    pub fn is_coforest(&self) -> bool {
        matches!(
            self.kind,
            PosetKind::Singleton
                | PosetKind::Chain
                | PosetKind::CotreeNonchain
                | PosetKind::CoforestNoncotree
        )
    }

    /// True when the whole poset is one co-tree.
    pub fn is_cotree(&self) -> bool {
        matches!(
            self.kind,
            PosetKind::Singleton | PosetKind::Chain | PosetKind::CotreeNonchain
        )
    }
}

/// An order-invariant injection of one poset into another.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EmbeddingWitness {
    /// `map[x]` is the image of source element `x`.
    pub map: Vec<usize>,
}

/// A finite poset on elements `0..n`, stored reflexively and transitively
/// closed. `up[i]` is the bitmask of `{j : i <= j}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    up: Vec<u64>,
    covers: Vec<(usize, usize)>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset(n={}, covers={:?})", self.n, self.covers)
    }
}

impl Poset {
    /// The empty poset (an empty co-forest). Rejected by co-tree operations.
    pub fn empty() -> Poset {
        Poset { n: 0, up: Vec::new(), covers: Vec::new() }
    }

    /// The `n`-element antichain (no relations). `antichain(1)` is the singleton.
    pub fn antichain(n: usize) -> Result<Poset> {
        Poset::from_covers(n, &[])
    }

    /// Builds the reflexive-transitive closure of the pairs `(i, j)` read as
    /// `i < j`, and recomputes covers as the transitive reduction.
    pub fn from_covers(n: usize, pairs: &[(usize, usize)]) -> Result<Poset> {
        if n > MAX_ELEMENTS {
            return Err(Error::Param(format!("n = {n} exceeds the {MAX_ELEMENTS}-element limit")));
        }
        for &(i, j) in pairs {
            if i >= n {
                return Err(Error::Index { index: i, n });
            }
            if j >= n {
                return Err(Error::Index { index: j, n });
            }
            if i == j {
                return Err(Error::Cycle(i));
            }
        }
        let mut up: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for &(i, j) in pairs {
            up[i] |= 1u64 << j;
        }
        // Closure to fixpoint: i <= j and j <= k give i <= k.
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                let mut acc = up[i];
                let mut rest = acc;
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    acc |= up[j];
                }
                if acc != up[i] {
                    up[i] = acc;
                    changed = true;
                }
            }
        }
        for i in 0..n {
            let mut rest = up[i] & !(1u64 << i);
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if up[j] & (1u64 << i) != 0 {
                    return Err(Error::Cycle(i));
                }
            }
        }
        let mut poset = Poset { n, up, covers: Vec::new() };
        poset.covers = poset.compute_covers();
        Ok(poset)
    }

    fn compute_covers(&self) -> Vec<(usize, usize)> {
        let mut covers = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.leq(i, j) {
                    let between = (0..self.n)
                        .any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                    if !between {
                        covers.push((i, j));
                    }
                }
            }
        }
        covers.sort_unstable();
        covers
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Hasse pairs `(i, j)` with `i` an immediate predecessor of `j`,
    /// sorted lexicographically.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// `i <= j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i] & (1u64 << j) != 0
    }

    /// `i < j`.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    /// `{j : x <= j}` as a bitmask (contains `x`).
    pub fn up_set(&self, x: usize) -> ElemSet {
        ElemSet(self.up[x])
    }

    /// `{j : j <= x}` as a bitmask (contains `x`).
    pub fn down_set(&self, x: usize) -> ElemSet {
        let mut s = 0u64;
        for i in 0..self.n {
            if self.leq(i, x) {
                s |= 1u64 << i;
            }
        }
        ElemSet(s)
    }

    /// Principal cone in the requested direction.
    pub fn cone(&self, x: usize, dir: Dir) -> Result<ElemSet> {
        if x >= self.n {
            return Err(Error::Index { index: x, n: self.n });
        }
        Ok(match dir {
            Dir::Up => self.up_set(x),
            Dir::Down => self.down_set(x),
        })
    }

    /// Immediate predecessors of `x`.
    pub fn immediate_predecessors(&self, x: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(_, j)| j == x).map(|&(i, _)| i).collect()
    }

    /// The unique immediate successor of `x`, if there is exactly one.
    pub fn unique_immediate_successor(&self, x: usize) -> Option<usize> {
        let succs: Vec<usize> =
            self.covers.iter().filter(|&&(i, _)| i == x).map(|&(_, j)| j).collect();
        if succs.len() == 1 {
            Some(succs[0])
        } else {
            None
        }
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.up[x] == 1u64 << x).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| (0..self.n).all(|y| y == x || !self.leq(y, x))).collect()
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.up[x] == 1u64 << x
    }

    pub fn is_minimal(&self, x: usize) -> bool {
        (0..self.n).all(|y| y == x || !self.leq(y, x))
    }

    /// Whether the induced subposet on `set` is linearly ordered.
    pub fn is_chain_set(&self, set: ElemSet) -> bool {
        let elems: Vec<usize> = set.iter().collect();
        for (a, &x) in elems.iter().enumerate() {
            for &y in &elems[a + 1..] {
                if !self.comparable(x, y) {
                    return false;
                }
            }
        }
        true
    }

    /// Connected components of the comparability graph, in order of least
    /// element.
    pub fn components(&self) -> Vec<ElemSet> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = ElemSet::EMPTY;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                comp.insert(x);
                for (y, visited) in seen.iter_mut().enumerate() {
                    if !*visited && self.comparable(x, y) {
                        *visited = true;
                        stack.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Whether the induced subposet on `set` is a co-tree: a unique maximum
    /// whose principal upsets (within `set`) are chains.
    pub fn is_cotree_component(&self, set: ElemSet) -> bool {
        let elems: Vec<usize> = set.iter().collect();
        if elems.is_empty() {
            return false;
        }
        let maxima: Vec<usize> = elems
            .iter()
            .copied()
            .filter(|&x| elems.iter().all(|&y| y == x || !self.lt(x, y)))
            .collect();
        if maxima.len() != 1 {
            return false;
        }
        elems.iter().all(|&x| self.is_chain_set(self.up_set(x).inter(set)))
    }

    /// Kind plus components. The empty poset classifies as an empty co-forest.
    pub fn classify(&self) -> PosetClass {
        let components = self.components();
        let kind = if self.n == 0 {
            PosetKind::CoforestNoncotree
        } else if self.n == 1 {
            PosetKind::Singleton
        } else if components.len() == 1 {
            let all = ElemSet::full(self.n);
            if self.is_chain_set(all) {
                PosetKind::Chain
            } else if self.is_cotree_component(all) {
                PosetKind::CotreeNonchain
            } else {
                PosetKind::Other
            }
        } else if components.iter().all(|&c| self.is_cotree_component(c)) {
            PosetKind::CoforestNoncotree
        } else {
            PosetKind::Other
        };
        PosetClass { kind, components }
    }

    /// All upsets, each exactly once, sorted by size then lexicographic
    /// element order. Enumerated by extending antichains of minimal elements;
    /// see the unit tests for the subset-filter oracle.
    pub fn all_upsets(&self) -> Vec<ElemSet> {
        let mut out = Vec::new();
        let mut antichain: Vec<usize> = Vec::new();
        self.collect_upsets(0, &mut antichain, &mut out);
        out.sort_unstable_by(|a, b| a.canonical_cmp(*b));
        out
    }

    fn collect_upsets(&self, from: usize, antichain: &mut Vec<usize>, out: &mut Vec<ElemSet>) {
        if from == self.n {
            let upset = antichain.iter().fold(ElemSet::EMPTY, |acc, &x| acc.union(self.up_set(x)));
            out.push(upset);
            return;
        }
        self.collect_upsets(from + 1, antichain, out);
        if antichain.iter().all(|&y| !self.comparable(from, y)) {
            antichain.push(from);
            self.collect_upsets(from + 1, antichain, out);
            antichain.pop();
        }
    }

    pub fn is_upset(&self, set: ElemSet) -> bool {
        set.iter().all(|x| self.up_set(x).is_subset(set))
    }

    /// `↑A` for an arbitrary set `A`.
    pub fn up_closure(&self, set: ElemSet) -> ElemSet {
        set.iter().fold(ElemSet::EMPTY, |acc, x| acc.union(self.up_set(x)))
    }

    /// `↓A` for an arbitrary set `A`.
    pub fn down_closure(&self, set: ElemSet) -> ElemSet {
        set.iter().fold(ElemSet::EMPTY, |acc, x| acc.union(self.down_set(x)))
    }

    /// Deterministic search for an order-invariant injection of `self` into
    /// `tgt`, trying target elements in ascending order.
    pub fn order_embedding(&self, tgt: &Poset) -> Option<EmbeddingWitness> {
        if self.n > tgt.n {
            return None;
        }
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; tgt.n];
        if self.embed_from(0, tgt, &mut map, &mut used) {
            Some(EmbeddingWitness { map })
        } else {
            None
        }
    }

    fn embed_from(&self, x: usize, tgt: &Poset, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if x == self.n {
            return true;
        }
        'candidates: for c in 0..tgt.n {
            if used[c] {
                continue;
            }
            // Order invariance against everything already placed.
            for (y, &fy) in map.iter().enumerate().take(x) {
                let fwd = self.leq(y, x) == tgt.leq(fy, c);
                let bwd = self.leq(x, y) == tgt.leq(c, fy);
                if !fwd || !bwd {
                    continue 'candidates;
                }
            }
            if tgt.up_set(c).len() < self.up_set(x).len()
                || tgt.down_set(c).len() < self.down_set(x).len()
            {
                continue;
            }
            map[x] = c;
            used[c] = true;
            if self.embed_from(x + 1, tgt, map, used) {
                return true;
            }
            used[c] = false;
            map[x] = usize::MAX;
        }
        false
    }

    /// Two posets are isomorphic iff they have equal size and either embeds
    /// into the other.
    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        self.n == other.n && self.order_embedding(other).is_some()
    }

    /// Disjoint union with component-offset relabeling.
    pub fn disjoint_union(parts: &[Poset]) -> Result<Poset> {
        let n: usize = parts.iter().map(|p| p.n).sum();
        let mut pairs = Vec::new();
        let mut offset = 0;
        for p in parts {
            for &(i, j) in p.covers() {
                pairs.push((i + offset, j + offset));
            }
            offset += p.n;
        }
        Poset::from_covers(n, &pairs)
    }

    /// The induced subposet on `set`, with elements relabeled in ascending
    /// order. Returns the relabeling alongside the poset.
    pub fn induced(&self, set: ElemSet) -> (Poset, Vec<usize>) {
        let elems: Vec<usize> = set.iter().collect();
        let rank = |x: usize| elems.iter().position(|&e| e == x).unwrap();
        let mut pairs = Vec::new();
        for &x in &elems {
            for &y in &elems {
                if self.lt(x, y) {
                    pairs.push((rank(x), rank(y)));
                }
            }
        }
        let poset = Poset::from_covers(elems.len(), &pairs).expect("induced order is a poset");
        (poset, elems)
    }

    /// Serializes in the poset text format (covers only, sorted).
    pub fn to_text(&self) -> String {
        let mut s = format!("poset {}\n", self.n);
        for &(i, j) in &self.covers {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }

    /// Parses the poset text format: optional `#` comments, a `poset <n>`
    /// header, then `<i> <j>` lines meaning `i < j`.
    pub fn from_text(text: &str) -> Result<Poset> {
        let mut n: Option<usize> = None;
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            if n.is_none() {
                let tag = fields.next().unwrap_or_default();
                if tag != "poset" {
                    return Err(Error::Format(format!(
                        "line {}: expected `poset <n>` header, got {line:?}",
                        lineno + 1
                    )));
                }
                let count = fields
                    .next()
                    .and_then(|f| f.parse::<usize>().ok())
                    .ok_or_else(|| Error::Format(format!("line {}: bad element count", lineno + 1)))?;
                if fields.next().is_some() {
                    return Err(Error::Format(format!("line {}: trailing fields", lineno + 1)));
                }
                n = Some(count);
            } else {
                let i = fields
                    .next()
                    .and_then(|f| f.parse::<usize>().ok())
                    .ok_or_else(|| Error::Format(format!("line {}: bad pair", lineno + 1)))?;
                let j = fields
                    .next()
                    .and_then(|f| f.parse::<usize>().ok())
                    .ok_or_else(|| Error::Format(format!("line {}: bad pair", lineno + 1)))?;
                if fields.next().is_some() {
                    return Err(Error::Format(format!("line {}: trailing fields", lineno + 1)));
                }
                pairs.push((i, j));
            }
        }
        let n = n.ok_or_else(|| Error::Format("missing `poset <n>` header".into()))?;
        Poset::from_covers(n, &pairs)
    }
}

/// Enumerates every poset with at most `max_nodes` elements, one
/// representative per isomorphism class, by orienting each unordered pair
/// three ways and filtering for transitivity. Deterministic order: by size,
/// then by cover list of the chosen representative.
pub fn enumerate_posets(max_nodes: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for n in 1..=max_nodes {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut reps: Vec<Poset> = Vec::new();
        let mut choice = vec![0u8; pairs.len()];
        loop {
            if let Some(p) = orient(n, &pairs, &choice) {
                if !reps.iter().any(|r| r.is_isomorphic(&p)) {
                    reps.push(p);
                }
            }
            // Odometer over {none, i<j, j<i} per pair.
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < 3 {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
        reps.sort_by(|a, b| a.covers().cmp(b.covers()));
        out.extend(reps);
    }
    out
}

fn orient(n: usize, pairs: &[(usize, usize)], choice: &[u8]) -> Option<Poset> {
    let mut up: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        match choice[idx] {
            1 => up[i] |= 1u64 << j,
            2 => up[j] |= 1u64 << i,
            _ => {}
        }
    }
    // Accept only relations that are already transitively closed, so each
    // partial order is generated exactly once.
    for i in 0..n {
        let mut rest = up[i];
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if up[j] & !up[i] != 0 {
                return None;
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| {
            let row = up[i];
            (0..n).filter(move |&j| j != i && row & (1u64 << j) != 0).map(move |j| (i, j))
        })
        .collect();
    Poset::from_covers(n, &edges).ok()
}
