//! Finite bi-Heyting duality: the algebra of upsets of a poset with its
//! residuated implication and co-implication, the prime-filter poset computed
//! through join-irreducibles, and embedding search between finite algebras.

pub mod formula;

pub use formula::{
    eval_formula, eval_kripke, is_valid, parse_formula, subframe_refuted, Formula, Refutation,
};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::poset::{ElemSet, Poset};

/// Cap on universe size; keeps the op tables small.
pub const MAX_UNIVERSE: usize = 1024;

/// A finite bi-Heyting algebra whose universe is a ring of finite sets
/// (upsets of the base poset, when one is known). Operation tables are
/// indexed by universe position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteBHA {
    universe: Vec<ElemSet>,
    base: Option<Poset>,
    index: HashMap<u64, usize>,
    meet: Vec<u16>,
    join: Vec<u16>,
    imp: Vec<u16>,
    coimp: Vec<u16>,
    bot: usize,
    top: usize,
}

/// An injective assignment of one algebra's universe into another's,
/// preserving meet, join, implication, co-implication, and the bounds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraEmbeddingWitness {
    /// `map[a]` is the image (universe index in the target) of element `a`.
    pub map: Vec<usize>,
}

/// The dual algebra of a nonempty poset: all upsets with
/// `U -> V = X \ down(U \ V)` and `U <- V = up(U \ V)`.
pub fn dual_algebra(x: &Poset) -> Result<FiniteBHA> {
    if x.is_empty() {
        return Err(Error::EmptyPoset);
    }
    let universe = x.all_upsets();
    if universe.len() > MAX_UNIVERSE {
        return Err(Error::Size(format!(
            "dual algebra would have {} elements (limit {MAX_UNIVERSE})",
            universe.len()
        )));
    }
    let full = ElemSet::full(x.len());
    let index: HashMap<u64, usize> =
        universe.iter().enumerate().map(|(i, s)| (s.bits(), i)).collect();
    let u = universe.len();
    let mut meet = vec![0u16; u * u];
    let mut join = vec![0u16; u * u];
    let mut imp = vec![0u16; u * u];
    let mut coimp = vec![0u16; u * u];
    let at = |s: ElemSet| -> u16 { index[&s.bits()] as u16 };
    for (a, &ua) in universe.iter().enumerate() {
        for (b, &ub) in universe.iter().enumerate() {
            let k = a * u + b;
            meet[k] = at(ua.inter(ub));
            join[k] = at(ua.union(ub));
            imp[k] = at(full.minus(x.down_closure(ua.minus(ub))));
            coimp[k] = at(x.up_closure(ua.minus(ub)));
        }
    }
    let bot = index[&ElemSet::EMPTY.bits()];
    let top = index[&full.bits()];
    let algebra = FiniteBHA {
        universe,
        base: Some(x.clone()),
        index,
        meet,
        join,
        imp,
        coimp,
        bot,
        top,
    };
    debug_assert_eq!(algebra.verify_laws(), Ok(()));
    Ok(algebra)
}

impl FiniteBHA {
    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn universe(&self) -> &[ElemSet] {
        &self.universe
    }

    pub fn base_poset(&self) -> Option<&Poset> {
        self.base.as_ref()
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b] as usize
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b] as usize
    }

    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp[a * self.len() + b] as usize
    }

    pub fn coimp(&self, a: usize, b: usize) -> usize {
        self.coimp[a * self.len() + b] as usize
    }

    /// Lattice order: `a <= b` iff `a /\ b = a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    pub fn element_index(&self, s: ElemSet) -> Option<usize> {
        self.index.get(&s.bits()).copied()
    }

    /// Checks both residuation laws and the eight defining equations on every
    /// instantiation.
    pub fn verify_laws(&self) -> std::result::Result<(), String> {
        let u = self.len();
        for a in 0..u {
            for b in 0..u {
                for c in 0..u {
                    let res_imp = self.leq(c, self.imp(a, b)) == self.leq(self.meet(c, a), b);
                    if !res_imp {
                        return Err(format!("implication residuation fails at ({a},{b},{c})"));
                    }
                    let res_coimp = self.leq(self.coimp(a, b), c) == self.leq(a, self.join(b, c));
                    if !res_coimp {
                        return Err(format!("co-implication residuation fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        for p in 0..u {
            for q in 0..u {
                if self.imp(p, p) != self.top {
                    return Err(format!("p -> p != 1 at {p}"));
                }
                if self.meet(p, self.imp(p, q)) != self.meet(p, q) {
                    return Err(format!("p /\\ (p -> q) != p /\\ q at ({p},{q})"));
                }
                if self.meet(q, self.imp(p, q)) != q {
                    return Err(format!("q /\\ (p -> q) != q at ({p},{q})"));
                }
                if self.coimp(p, p) != self.bot {
                    return Err(format!("p <- p != 0 at {p}"));
                }
                if self.join(p, self.coimp(q, p)) != self.join(p, q) {
                    return Err(format!("p \\/ (q <- p) != p \\/ q at ({p},{q})"));
                }
                if self.join(q, self.coimp(q, p)) != q {
                    return Err(format!("q \\/ (q <- p) != q at ({p},{q})"));
                }
                for r in 0..u {
                    if self.imp(p, self.meet(q, r))
                        != self.meet(self.imp(p, q), self.imp(p, r))
                    {
                        return Err(format!("-> does not distribute over /\\ at ({p},{q},{r})"));
                    }
                    if self.coimp(self.join(q, r), p)
                        != self.join(self.coimp(q, p), self.coimp(r, p))
                    {
                        return Err(format!("<- does not distribute over \\/ at ({p},{q},{r})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Universe indices of the join-irreducible elements: nonzero elements
    /// that are not the join of everything strictly below them.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| {
                if a == self.bot {
                    return false;
                }
                let below = (0..self.len())
                    .filter(|&b| b != a && self.leq(b, a))
                    .fold(self.bot, |acc, b| self.join(acc, b));
                below != a
            })
            .collect()
    }

    /// Serializes in the algebra dump format: `bha <size>` header, one
    /// `upset ...` line per universe element, then full `imp` and `coimp`
    /// tables.
    pub fn to_text(&self) -> String {
        let mut s = format!("bha {}\n", self.len());
        for set in &self.universe {
            if set.is_empty() {
                s.push_str("upset\n");
            } else {
                s.push_str(&format!("upset {set}\n"));
            }
        }
        let u = self.len();
        for a in 0..u {
            for b in 0..u {
                s.push_str(&format!("imp {a} {b} -> {}\n", self.imp(a, b)));
            }
        }
        for a in 0..u {
            for b in 0..u {
                s.push_str(&format!("coimp {a} {b} -> {}\n", self.coimp(a, b)));
            }
        }
        s
    }

    /// Parses the dump format. The universe must be a bounded ring of sets;
    /// implications are recomputed from the residuation laws, and any
    /// explicit table lines are validated against them.
    pub fn from_text(text: &str) -> Result<FiniteBHA> {
        let mut size: Option<usize> = None;
        let mut universe: Vec<ElemSet> = Vec::new();
        let mut declared: Vec<(bool, usize, usize, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let bad = |msg: &str| Error::Format(format!("line {}: {msg}", lineno + 1));
            match tag {
                "bha" => {
                    if size.is_some() {
                        return Err(bad("duplicate header"));
                    }
                    let n = fields
                        .next()
                        .and_then(|f| f.parse::<usize>().ok())
                        .ok_or_else(|| bad("bad size"))?;
                    size = Some(n);
                }
                "upset" => {
                    if size.is_none() {
                        return Err(bad("upset before header"));
                    }
                    let mut set = ElemSet::EMPTY;
                    for f in fields {
                        let e = f.parse::<usize>().map_err(|_| bad("bad element index"))?;
                        if e >= crate::poset::MAX_ELEMENTS {
                            return Err(bad("element index too large"));
                        }
                        set.insert(e);
                    }
                    universe.push(set);
                }
                "imp" | "coimp" => {
                    let a = fields
                        .next()
                        .and_then(|f| f.parse::<usize>().ok())
                        .ok_or_else(|| bad("bad table line"))?;
                    let b = fields
                        .next()
                        .and_then(|f| f.parse::<usize>().ok())
                        .ok_or_else(|| bad("bad table line"))?;
                    if fields.next() != Some("->") {
                        return Err(bad("expected ->"));
                    }
                    let k = fields
                        .next()
                        .and_then(|f| f.parse::<usize>().ok())
                        .ok_or_else(|| bad("bad table line"))?;
                    declared.push((tag == "imp", a, b, k));
                }
                _ => return Err(bad("unknown line tag")),
            }
        }
        let size = size.ok_or_else(|| Error::Format("missing `bha <size>` header".into()))?;
        if universe.len() != size {
            return Err(Error::Format(format!(
                "header declares {size} elements, found {}",
                universe.len()
            )));
        }
        FiniteBHA::from_universe(universe, &declared)
    }

    fn from_universe(
        universe: Vec<ElemSet>,
        declared: &[(bool, usize, usize, usize)],
    ) -> Result<FiniteBHA> {
        if universe.is_empty() {
            return Err(Error::Format("empty universe".into()));
        }
        if universe.len() > MAX_UNIVERSE {
            return Err(Error::Size(format!("universe exceeds {MAX_UNIVERSE} elements")));
        }
        let index: HashMap<u64, usize> =
            universe.iter().enumerate().map(|(i, s)| (s.bits(), i)).collect();
        if index.len() != universe.len() {
            return Err(Error::Format("duplicate universe element".into()));
        }
        let full = universe.iter().fold(ElemSet::EMPTY, |acc, &s| acc.union(s));
        let bot = *index
            .get(&ElemSet::EMPTY.bits())
            .ok_or_else(|| Error::Format("universe lacks the empty set".into()))?;
        let top = *index
            .get(&full.bits())
            .ok_or_else(|| Error::Format("universe lacks its own union".into()))?;
        let u = universe.len();
        let mut meet = vec![0u16; u * u];
        let mut join = vec![0u16; u * u];
        let mut imp = vec![0u16; u * u];
        let mut coimp = vec![0u16; u * u];
        for a in 0..u {
            for b in 0..u {
                let k = a * u + b;
                let inter = universe[a].inter(universe[b]);
                let union = universe[a].union(universe[b]);
                meet[k] = *index.get(&inter.bits()).ok_or_else(|| {
                    Error::Format("universe not closed under intersection".into())
                })? as u16;
                join[k] = *index
                    .get(&union.bits())
                    .ok_or_else(|| Error::Format("universe not closed under union".into()))?
                    as u16;
                // Residuation pins both implications: the largest c with
                // c /\ a <= b, and the least c with a <= b \/ c.
                let imp_set = universe
                    .iter()
                    .filter(|&&c| c.inter(universe[a]).is_subset(universe[b]))
                    .fold(ElemSet::EMPTY, |acc, &c| acc.union(c));
                imp[k] = *index.get(&imp_set.bits()).ok_or_else(|| {
                    Error::Format("universe admits no greatest relative pseudocomplement".into())
                })? as u16;
                let coimp_set = universe
                    .iter()
                    .filter(|&&c| universe[a].is_subset(universe[b].union(c)))
                    .fold(full, |acc, &c| acc.inter(c));
                coimp[k] = *index.get(&coimp_set.bits()).ok_or_else(|| {
                    Error::Format("universe admits no least co-implication".into())
                })? as u16;
            }
        }
        for &(is_imp, a, b, k) in declared {
            if a >= u || b >= u || k >= u {
                return Err(Error::Format("table index out of range".into()));
            }
            let computed = if is_imp { imp[a * u + b] } else { coimp[a * u + b] } as usize;
            if computed != k {
                return Err(Error::Format(format!(
                    "declared {} {a} {b} -> {k} contradicts residuation (expected {computed})",
                    if is_imp { "imp" } else { "coimp" }
                )));
            }
        }
        let algebra = FiniteBHA { universe, base: None, index, meet, join, imp, coimp, bot, top };
        algebra.verify_laws().map_err(Error::Format)?;
        Ok(algebra)
    }
}

/// The poset of prime filters of a finite bi-Heyting algebra, computed via
/// join-irreducibles: each prime filter of a finite distributive lattice is
/// the filter of a unique join-irreducible, and filter inclusion reverses the
/// lattice order between them.
pub fn prime_filter_poset(algebra: &FiniteBHA) -> Poset {
    let ji = algebra.join_irreducibles();
    let mut pairs = Vec::new();
    for (x, &a) in ji.iter().enumerate() {
        for (y, &b) in ji.iter().enumerate() {
            if x != y && algebra.leq(b, a) {
                pairs.push((x, y));
            }
        }
    }
    Poset::from_covers(ji.len(), &pairs).expect("filter inclusion is a partial order")
}

/// Searches for an embedding of `a` into `b`: an injective map preserving
/// meet, join, both implications, and the bounds. Backtracks over images of
/// the join-irreducibles (which determine the whole map by joins), trying
/// target elements in ascending universe order.
pub fn algebra_embedding(a: &FiniteBHA, b: &FiniteBHA) -> Option<AlgebraEmbeddingWitness> {
    if a.len() > b.len() {
        return None;
    }
    let ji = a.join_irreducibles();
    let mut images = vec![usize::MAX; ji.len()];
    assign_ji(a, b, &ji, 0, &mut images)
}

fn assign_ji(
    a: &FiniteBHA,
    b: &FiniteBHA,
    ji: &[usize],
    pos: usize,
    images: &mut Vec<usize>,
) -> Option<AlgebraEmbeddingWitness> {
    if pos == ji.len() {
        return extend_and_verify(a, b, ji, images);
    }
    'candidates: for c in 0..b.len() {
        for prev in 0..pos {
            let fwd = a.leq(ji[prev], ji[pos]) == b.leq(images[prev], c);
            let bwd = a.leq(ji[pos], ji[prev]) == b.leq(c, images[prev]);
            if !fwd || !bwd {
                continue 'candidates;
            }
        }
        images[pos] = c;
        if let Some(w) = assign_ji(a, b, ji, pos + 1, images) {
            return Some(w);
        }
        images[pos] = usize::MAX;
    }
    None
}

fn extend_and_verify(
    a: &FiniteBHA,
    b: &FiniteBHA,
    ji: &[usize],
    images: &[usize],
) -> Option<AlgebraEmbeddingWitness> {
    let mut map = vec![usize::MAX; a.len()];
    for (x, slot) in map.iter_mut().enumerate() {
        let mut img = b.bot();
        for (pos, &j) in ji.iter().enumerate() {
            if a.leq(j, x) {
                img = b.join(img, images[pos]);
            }
        }
        *slot = img;
    }
    if map[a.top()] != b.top() || map[a.bot()] != b.bot() {
        return None;
    }
    let mut seen = vec![false; b.len()];
    for &v in &map {
        if seen[v] {
            return None;
        }
        seen[v] = true;
    }
    for x in 0..a.len() {
        for y in 0..a.len() {
            if map[a.meet(x, y)] != b.meet(map[x], map[y])
                || map[a.join(x, y)] != b.join(map[x], map[y])
                || map[a.imp(x, y)] != b.imp(map[x], map[y])
                || map[a.coimp(x, y)] != b.coimp(map[x], map[y])
            {
                return None;
            }
        }
    }
    Some(AlgebraEmbeddingWitness { map: map.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cotree::CoTree;
    use crate::morphism::leq_p;
    use crate::poset::enumerate_posets;

    fn chain(n: usize) -> Poset {
        CoTree::chain(n).unwrap().poset().clone()
    }

    #[test]
    fn dual_algebra_shapes() {
        let a = dual_algebra(&chain(2)).unwrap();
        assert_eq!(a.len(), 3);
        // {0,1} <- {1} = up({0}) = {0,1}.
        let whole = a.element_index(ElemSet::from_iter([0, 1])).unwrap();
        let top_only = a.element_index(ElemSet::from_iter([1])).unwrap();
        assert_eq!(a.coimp(whole, top_only), whole);

        let lambda = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        let b = dual_algebra(&lambda).unwrap();
        assert_eq!(b.len(), 5);
        let one = b.element_index(ElemSet::from_iter([1])).unwrap();
        let two = b.element_index(ElemSet::from_iter([2])).unwrap();
        assert_eq!(b.imp(one, two), two);

        let s = dual_algebra(&chain(1)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.imp(s.top(), s.bot()), s.bot());
        assert_eq!(s.coimp(s.top(), s.bot()), s.top());

        assert_eq!(dual_algebra(&Poset::empty()), Err(Error::EmptyPoset));
    }

    #[test]
    fn laws_hold_on_small_posets() {
        for p in enumerate_posets(5) {
            let a = dual_algebra(&p).unwrap();
            assert_eq!(a.verify_laws(), Ok(()), "laws fail for {p:?}");
        }
    }

    #[test]
    fn round_trip_examples() {
        for p in [
            chain(2),
            CoTree::comb(2).unwrap().poset().clone(),
            Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap(),
        ] {
            let back = prime_filter_poset(&dual_algebra(&p).unwrap());
            assert!(back.is_isomorphic(&p), "round trip failed for {p:?}");
        }
    }

    #[test]
    fn round_trip_exhaustive_small() {
        for p in enumerate_posets(5) {
            let back = prime_filter_poset(&dual_algebra(&p).unwrap());
            assert!(back.is_isomorphic(&p), "round trip failed for {p:?}");
        }
    }

    #[test]
    fn embedding_examples() {
        let single = dual_algebra(&chain(1)).unwrap();
        let two = dual_algebra(&chain(2)).unwrap();
        let three = dual_algebra(&chain(3)).unwrap();
        assert!(algebra_embedding(&single, &two).is_some());
        assert!(algebra_embedding(&two, &three).is_some());

        let c1 = CoTree::comb(1).unwrap();
        let c2 = CoTree::comb(2).unwrap();
        let d1 = dual_algebra(c1.poset()).unwrap();
        let d2 = dual_algebra(c2.poset()).unwrap();
        assert!(algebra_embedding(&d2, &d1).is_none());
        assert_eq!(algebra_embedding(&d1, &d2).is_some(), leq_p(&c1, &c2).is_some());
    }

    #[test]
    fn embedding_witness_preserves_operations() {
        let a = dual_algebra(&chain(2)).unwrap();
        let b = dual_algebra(&chain(4)).unwrap();
        let w = algebra_embedding(&a, &b).unwrap();
        for x in 0..a.len() {
            for y in 0..a.len() {
                assert_eq!(w.map[a.imp(x, y)], b.imp(w.map[x], w.map[y]));
                assert_eq!(w.map[a.coimp(x, y)], b.coimp(w.map[x], w.map[y]));
            }
        }
    }

    #[test]
    fn dump_round_trip() {
        let a = dual_algebra(CoTree::tau(1, 1).unwrap().poset()).unwrap();
        let text = a.to_text();
        let parsed = FiniteBHA::from_text(&text).unwrap();
        assert_eq!(parsed.universe(), a.universe());
        for x in 0..a.len() {
            for y in 0..a.len() {
                assert_eq!(parsed.imp(x, y), a.imp(x, y));
                assert_eq!(parsed.coimp(x, y), a.coimp(x, y));
            }
        }
        // Tampering with a table line is caught against residuation.
        let bad = text.replacen(
            &format!("imp 1 0 -> {}", a.imp(1, 0)),
            &format!("imp 1 0 -> {}", (a.imp(1, 0) + 1) % a.len()),
            1,
        );
        assert!(matches!(FiniteBHA::from_text(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn dump_rejects_open_universe() {
        // {0} and {1} present without their union.
        let text = "bha 3\nupset\nupset 0\nupset 1\n";
        assert!(matches!(FiniteBHA::from_text(text), Err(Error::Format(_))));
    }
}
