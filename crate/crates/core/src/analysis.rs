//! Exhaustive finite checks: the tau grid, the structure-lemma decomposition
//! map and its order reflection, the named counterexample, morphism and
//! multiset laws, duality round trips, antichain tables, and the shift
//! relation. Every check returns a [`CheckReport`] with concrete
//! counterexamples on failure.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cotree::{enumerate_cotrees, CanonicalCode, CoTree};
use crate::duality::{algebra_embedding, dual_algebra, prime_filter_poset, Formula};
use crate::duality::formula::is_valid;
use crate::error::{Error, Result};
use crate::morphism::{enumerate_bi_p_morphisms, leq_p, PosetMap};
use crate::multiset::{embeddable, projects, projects_bruteforce, Multiset};
use crate::poset::{enumerate_posets, Poset};

/// Memoized bi-p-morphic image relation over a fixed family of co-trees.
/// Built once per batch; the underlying searches run in parallel.
pub struct LeqPTable {
    index: HashMap<String, usize>,
    matrix: Vec<bool>,
    size: usize,
}

impl LeqPTable {
    pub fn build(trees: &[CoTree]) -> LeqPTable {
        let size = trees.len();
        let index: HashMap<String, usize> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.code().as_str().to_string(), i))
            .collect();
        assert_eq!(index.len(), size, "trees must be pairwise non-isomorphic");
        let matrix: Vec<bool> = (0..size * size)
            .into_par_iter()
            .map(|k| leq_p(&trees[k / size], &trees[k % size]).is_some())
            .collect();
        LeqPTable { index, matrix, size }
    }

    /// `a <=p b`, i.e. `a` is a bi-p-morphic image of `b`.
    pub fn leq(&self, a: &CanonicalCode, b: &CanonicalCode) -> bool {
        let i = self.index[a.as_str()];
        let j = self.index[b.as_str()];
        self.matrix[i * self.size + j]
    }

    pub fn contains(&self, a: &CanonicalCode) -> bool {
        self.index.contains_key(a.as_str())
    }
}

/// The structure-lemma image of a co-tree: its upper part (a `tau(m, k)`)
/// and the multiset of grafted sub-co-trees.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PiImage {
    pub upper: CoTree,
    /// Sorted by canonical code; length `k + 1`.
    pub parts: Vec<CoTree>,
}

impl PiImage {
    pub fn part_codes(&self) -> Vec<CanonicalCode> {
        self.parts.iter().map(|p| p.code().clone()).collect()
    }
}

/// Reads the pair `(tau(m, k), [parts])` off the decomposition. Undefined on
/// the singleton.
pub fn pi_map(t: &CoTree) -> Result<PiImage> {
    let dec = t.decompose()?;
    let upper = CoTree::tau(dec.m, dec.k())?;
    debug_assert!(upper.in_t(2).unwrap());
    Ok(PiImage { upper, parts: dec.parts })
}

/// Componentwise order on pi images: bi-p-morphic image relation on the
/// upper parts, multiset projectivity (over the same relation) on the parts.
pub fn pair_leq(a: &PiImage, b: &PiImage) -> bool {
    if leq_p(&a.upper, &b.upper).is_none() {
        return false;
    }
    let n = Multiset::from_items(a.parts.clone());
    let m = Multiset::from_items(b.parts.clone());
    projects(&n, &m, |x: &CoTree, y: &CoTree| leq_p(x, y).is_some()).is_some()
}

/// [`pair_leq`] against a prebuilt relation table; the table must cover the
/// upper parts and all part codes of both images.
pub fn pair_leq_table(a: &PiImage, b: &PiImage, table: &LeqPTable) -> bool {
    if !table.leq(a.upper.code(), b.upper.code()) {
        return false;
    }
    let n = Multiset::from_items(a.part_codes());
    let m = Multiset::from_items(b.part_codes());
    projects(&n, &m, |x: &CanonicalCode, y: &CanonicalCode| table.leq(x, y)).is_some()
}

/// A finite subset of the naturals, kept as its increasing enumeration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteSubset {
    elems: Vec<usize>,
}

impl FiniteSubset {
    pub fn new<I: IntoIterator<Item = usize>>(iter: I) -> FiniteSubset {
        let mut elems: Vec<usize> = iter.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        FiniteSubset { elems }
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

/// The shift relation: `t` is a shift of `s` when some infinite ascending `B`
/// has `s` as an initial segment and `t` as an initial segment of
/// `B \ Min(B)`. Decided by the finite criterion below; the bounded prefix
/// scan [`shift_rel_oracle`] is the reference.
pub fn shift_rel(s: &FiniteSubset, t: &FiniteSubset) -> bool {
    if t.is_empty() {
        return true;
    }
    if s.is_empty() {
        // B needs one element strictly below t's minimum.
        return t.elems[0] >= 1;
    }
    if s.len() == 1 {
        return s.elems[0] < t.elems[0];
    }
    // The tail of s and t must agree where both are defined; ascending order
    // across the junction is then automatic.
    let tail = &s.elems[1..];
    let common = tail.len().min(t.len());
    tail[..common] == t.elems[..common]
}

/// Reference decision by scanning ascending prefixes of candidate witnesses
/// `B` inside `{0..bound}` where `bound = max(s, t) + |s| + |t| + 1`.
pub fn shift_rel_oracle(s: &FiniteSubset, t: &FiniteSubset) -> bool {
    let needed = s.len().max(t.len() + 1);
    if needed == 0 {
        return true;
    }
    let bound = s
        .elems
        .iter()
        .chain(t.elems.iter())
        .copied()
        .max()
        .unwrap_or(0)
        + s.len()
        + t.len()
        + 1;
    fn place(
        idx: usize,
        needed: usize,
        min_next: usize,
        bound: usize,
        s: &[usize],
        t: &[usize],
    ) -> bool {
        if idx == needed {
            return true;
        }
        for b in min_next..=bound {
            if idx < s.len() && b != s[idx] {
                continue;
            }
            if idx >= 1 && idx - 1 < t.len() && b != t[idx - 1] {
                continue;
            }
            if place(idx + 1, needed, b + 1, bound, s, t) {
                return true;
            }
        }
        false
    }
    place(0, needed, 0, bound, s.elems(), t.elems())
}

/// Whether `p_i <= p_j` fails for every `i < j`.
pub fn is_bad_fragment<T>(seq: &[T], leq: impl Fn(&T, &T) -> bool) -> bool {
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if leq(&seq[i], &seq[j]) {
                return false;
            }
        }
    }
    true
}

/// A maximum antichain of `items` under the strict order `lt`, as ascending
/// indices. Dilworth via bipartite matching: the minimum chain cover has
/// `n - |matching|` chains, and the complement of a minimum vertex cover
/// picks the antichain.
pub fn max_antichain(n: usize, lt: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let adj: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| lt(i, j)).collect()).collect();
    let mut match_left = vec![usize::MAX; n];
    let mut match_right = vec![usize::MAX; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        kuhn(i, &adj, &mut match_left, &mut match_right, &mut seen);
    }
    // Alternating reachability from unmatched left vertices.
    let mut left_z = vec![false; n];
    let mut right_z = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| match_left[i] == usize::MAX).collect();
    for &i in &stack {
        left_z[i] = true;
    }
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if match_left[i] == j || right_z[j] {
                continue;
            }
            right_z[j] = true;
            let owner = match_right[j];
            if owner != usize::MAX && !left_z[owner] {
                left_z[owner] = true;
                stack.push(owner);
            }
        }
    }
    // Vertex cover = (L \ Z) U (R /\ Z); the antichain avoids both.
    (0..n).filter(|&i| left_z[i] && !right_z[i]).collect()
}

fn kuhn(
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
        if match_right[j] == usize::MAX || kuhn(match_right[j], adj, match_left, match_right, seen)
        {
            match_left[i] = j;
            match_right[j] = i;
            return true;
        }
    }
    false
}

/// Bound on the subset-scan certificate for antichain maximality.
pub const ANTICHAIN_SCAN_BOUND: usize = 15;

/// Exhaustive certificate: the size of a maximum antichain by subset scan.
pub fn max_antichain_bruteforce(n: usize, lt: impl Fn(usize, usize) -> bool) -> Result<usize> {
    if n > ANTICHAIN_SCAN_BOUND {
        return Err(Error::Size(format!(
            "subset scan limited to {ANTICHAIN_SCAN_BOUND} items, got {n}"
        )));
    }
    let mut best = 0usize;
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if members.len() <= best {
            continue;
        }
        let ok = members.iter().enumerate().all(|(a, &i)| {
            members[a + 1..].iter().all(|&j| !lt(i, j) && !lt(j, i))
        });
        if ok {
            best = members.len();
        }
    }
    Ok(best)
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub pass: bool,
    pub instances: usize,
    pub counterexamples: Vec<String>,
    pub wall_ms: u128,
}

const MAX_COUNTEREXAMPLES: usize = 8;

struct ReportBuilder {
    name: &'static str,
    params: Vec<(String, String)>,
    instances: usize,
    failures: usize,
    counterexamples: Vec<String>,
    started: Instant,
}

impl ReportBuilder {
    fn new(name: &'static str) -> ReportBuilder {
        ReportBuilder {
            name,
            params: Vec::new(),
            instances: 0,
            failures: 0,
            counterexamples: Vec::new(),
            started: Instant::now(),
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    fn tally(&mut self, outcomes: Vec<Option<String>>) {
        for outcome in outcomes {
            self.instances += 1;
            if let Some(cx) = outcome {
                self.failures += 1;
                if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    self.counterexamples.push(cx);
                }
            }
        }
    }

    fn fail(&mut self, cx: String) {
        self.tally(vec![Some(cx)]);
    }

    fn ok(&mut self) {
        self.tally(vec![None]);
    }

    fn finish(mut self) -> CheckReport {
        if self.failures > self.counterexamples.len() {
            self.counterexamples.push(format!(
                "... and {} more failures",
                self.failures - self.counterexamples.len()
            ));
        }
        CheckReport {
            name: self.name.to_string(),
            params: self.params,
            pass: self.failures == 0,
            instances: self.instances,
            counterexamples: self.counterexamples,
            wall_ms: self.started.elapsed().as_millis(),
        }
    }
}

/// Names accepted by [`run_check`], in the canonical execution order.
pub const ALL_CHECKS: &[&str] = &[
    "t1-singleton",
    "tau-grid",
    "structure-lemma",
    "comb-oracle",
    "duality-roundtrip",
    "fin-duality",
    "prelinearity-class",
    "bilc-class",
    "mset-lemma",
    "pi-reflection",
    "counterexample",
    "comb-chain",
    "ascending-chain",
    "morphism-laws",
    "antichain-table",
    "shift-oracle",
];

/// Runs one named check with its standard parameters.
pub fn run_check(name: &str) -> Result<CheckReport> {
    match name {
        "t1-singleton" => Ok(check_t1_singleton()),
        "tau-grid" => Ok(check_tau_grid()),
        "structure-lemma" => Ok(check_structure_lemma()),
        "comb-oracle" => Ok(check_comb_oracle()),
        "duality-roundtrip" => Ok(check_duality_roundtrip()),
        "fin-duality" => Ok(check_fin_duality()),
        "prelinearity-class" => Ok(check_prelinearity_class()),
        "bilc-class" => Ok(check_bilc_class()),
        "mset-lemma" => Ok(check_mset_lemma()),
        "pi-reflection" => Ok(check_pi_reflection()),
        "counterexample" => Ok(check_counterexample()),
        "comb-chain" => Ok(check_comb_chain()),
        "ascending-chain" => Ok(check_ascending_chain()),
        "morphism-laws" => Ok(check_morphism_laws()),
        "antichain-table" => Ok(check_antichain_table()),
        "shift-oracle" => Ok(check_shift_oracle()),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

fn cx_tree(t: &CoTree) -> String {
    format!("{} ({})", t.code(), t.poset().to_text().replace('\n', "; "))
}

fn check_t1_singleton() -> CheckReport {
    let mut rb = ReportBuilder::new("t1-singleton");
    rb.param("max-nodes", 8);
    let mut saw_singleton = false;
    for t in enumerate_cotrees(8) {
        match (t.in_t(1).unwrap(), t.is_singleton()) {
            (true, true) => {
                saw_singleton = true;
                rb.ok();
            }
            (true, false) => rb.fail(format!("unexpected member of T_1: {}", cx_tree(&t))),
            (false, _) => rb.ok(),
        }
    }
    if !saw_singleton {
        rb.fail("the singleton is missing from T_1".to_string());
    }
    rb.finish()
}

fn check_tau_grid() -> CheckReport {
    let mut rb = ReportBuilder::new("tau-grid");
    rb.param("grid", "m,k,m',k' in 0..=4");
    let cases: Vec<(usize, usize, usize, usize)> = (0..5)
        .flat_map(|m| {
            (0..5).flat_map(move |k| {
                (0..5).flat_map(move |m2| (0..5).map(move |k2| (m, k, m2, k2)))
            })
        })
        .collect();
    let outcomes: Vec<Option<String>> = cases
        .par_iter()
        .map(|&(m, k, m2, k2)| {
            let a = CoTree::tau(m, k).unwrap();
            let b = CoTree::tau(m2, k2).unwrap();
            let got = leq_p(&a, &b).is_some();
            let expected = m <= m2 && k <= k2;
            if got == expected {
                None
            } else {
                Some(format!(
                    "tau({m},{k}) <=p tau({m2},{k2}): got {got}, expected {expected}"
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_structure_lemma() -> CheckReport {
    let mut rb = ReportBuilder::new("structure-lemma");
    rb.param("max-nodes", 8);
    rb.param("n", "1..=4");
    let trees: Vec<CoTree> = enumerate_cotrees(8).collect();
    let outcomes: Vec<Option<String>> = trees
        .par_iter()
        .flat_map(|t| {
            (1usize..=4)
                .map(|n| {
                    // Left side through the independent embedding oracle;
                    // right side through the decomposition.
                    let lhs = t.comb_number_bruteforce() < n + 1;
                    let rhs = if t.is_singleton() {
                        true
                    } else {
                        let dec = t.decompose().unwrap();
                        dec.parts.iter().all(|p| p.in_t(n).unwrap())
                    };
                    if lhs == rhs {
                        None
                    } else {
                        Some(format!(
                            "structure lemma fails at n={n} for {}: membership {lhs}, parts {rhs}",
                            cx_tree(t)
                        ))
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_comb_oracle() -> CheckReport {
    let mut rb = ReportBuilder::new("comb-oracle");
    rb.param("max-nodes", 9);
    let trees: Vec<CoTree> = enumerate_cotrees(9).collect();
    let outcomes: Vec<Option<String>> = trees
        .par_iter()
        .map(|t| {
            let fast = t.comb_number();
            let brute = t.comb_number_bruteforce();
            if fast == brute {
                None
            } else {
                Some(format!(
                    "comb number mismatch for {}: recursion {fast}, embedding {brute}",
                    cx_tree(t)
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_duality_roundtrip() -> CheckReport {
    let mut rb = ReportBuilder::new("duality-roundtrip");
    rb.param("max-nodes", 5);
    let posets = enumerate_posets(5);
    let outcomes: Vec<Option<String>> = posets
        .par_iter()
        .map(|p| {
            let back = prime_filter_poset(&dual_algebra(p).unwrap());
            if back.is_isomorphic(p) {
                None
            } else {
                Some(format!(
                    "round trip broke {} into {}",
                    p.to_text().replace('\n', "; "),
                    back.to_text().replace('\n', "; ")
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_fin_duality() -> CheckReport {
    let mut rb = ReportBuilder::new("fin-duality");
    rb.param("max-nodes", 5);
    let trees: Vec<CoTree> = enumerate_cotrees(5).collect();
    let duals: Vec<_> = trees.iter().map(|t| dual_algebra(t.poset()).unwrap()).collect();
    let pairs: Vec<(usize, usize)> = (0..trees.len())
        .flat_map(|i| (0..trees.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let algebraic = algebra_embedding(&duals[i], &duals[j]).is_some();
            let frame = leq_p(&trees[i], &trees[j]).is_some();
            if algebraic == frame {
                None
            } else {
                Some(format!(
                    "duality mismatch: dual({}) embeds into dual({}) = {algebraic}, \
                     but {} <=p {} = {frame}",
                    trees[i].code(),
                    trees[j].code(),
                    trees[i].code(),
                    trees[j].code()
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_prelinearity_class() -> CheckReport {
    let mut rb = ReportBuilder::new("prelinearity-class");
    rb.param("max-nodes", 5);
    let posets = enumerate_posets(5);
    let outcomes: Vec<Option<String>> = posets
        .par_iter()
        .map(|p| {
            let valid = is_valid(p, &Formula::prelinearity()).unwrap().0;
            let coforest = p.classify().is_coforest();
            if valid == coforest {
                None
            } else {
                Some(format!(
                    "prelinearity valid={valid} but co-forest={coforest} for {}",
                    p.to_text().replace('\n', "; ")
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_bilc_class() -> CheckReport {
    let mut rb = ReportBuilder::new("bilc-class");
    rb.param("max-nodes", 5);
    let coforests: Vec<Poset> = enumerate_posets(5)
        .into_iter()
        .filter(|p| p.classify().is_coforest())
        .collect();
    let outcomes: Vec<Option<String>> = coforests
        .par_iter()
        .map(|p| {
            let valid = is_valid(p, &Formula::bilc()).unwrap().0;
            let class = p.classify();
            let all_chains =
                class.components.iter().all(|&c| p.is_chain_set(c));
            if valid == all_chains {
                None
            } else {
                Some(format!(
                    "bi-LC valid={valid} but chains={all_chains} for {}",
                    p.to_text().replace('\n', "; ")
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn multisets_up_to(count: usize, max_len: usize) -> Vec<Vec<usize>> {
    // Non-decreasing index sequences of each length up to the bound.
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            let from = seq.last().copied().unwrap_or(0);
            for i in from..count {
                let mut longer = seq.clone();
                longer.push(i);
                next.push(longer);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn check_mset_lemma() -> CheckReport {
    let mut rb = ReportBuilder::new("mset-lemma");
    rb.param("omega", "entries <= 4, length <= 5");
    rb.param("cotree", "parts <= 4 nodes, length <= 3");

    // Omega sample space.
    let omega_items: Vec<usize> = (0..=4).collect();
    let omega_sets = multisets_up_to(omega_items.len(), 5);
    let omega_leq = |a: &usize, b: &usize| a <= b;
    let pairs: Vec<(usize, usize)> = (0..omega_sets.len())
        .flat_map(|i| (0..omega_sets.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let n = Multiset::from_items(omega_sets[i].iter().map(|&k| omega_items[k]));
            let m = Multiset::from_items(omega_sets[j].iter().map(|&k| omega_items[k]));
            mset_pair_violation(&n, &m, omega_leq, |ms| format!("{:?}", ms_list(ms)))
        })
        .collect();
    rb.tally(outcomes);

    // Co-tree sample space, carrier order memoized.
    let carriers: Vec<CoTree> = enumerate_cotrees(4).collect();
    let table = LeqPTable::build(&carriers);
    let tree_sets = multisets_up_to(carriers.len(), 3);
    let tree_leq =
        |a: &CanonicalCode, b: &CanonicalCode| table.leq(a, b);
    let pairs: Vec<(usize, usize)> = (0..tree_sets.len())
        .flat_map(|i| (0..tree_sets.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let n = Multiset::from_items(
                tree_sets[i].iter().map(|&k| carriers[k].code().clone()),
            );
            let m = Multiset::from_items(
                tree_sets[j].iter().map(|&k| carriers[k].code().clone()),
            );
            mset_pair_violation(&n, &m, tree_leq, |ms| {
                format!(
                    "[{}]",
                    ms.occurrences().iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",")
                )
            })
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn ms_list(ms: &Multiset<usize>) -> Vec<usize> {
    ms.occurrences().into_iter().copied().collect()
}

fn mset_pair_violation<T: Eq + Clone>(
    n: &Multiset<T>,
    m: &Multiset<T>,
    leq: impl Fn(&T, &T) -> bool + Copy,
    show: impl Fn(&Multiset<T>) -> String,
) -> Option<String> {
    let fast = projects(n, m, leq).is_some();
    let brute = projects_bruteforce(n, m, leq).unwrap().is_some();
    if fast != brute {
        return Some(format!(
            "projectivity mismatch for {} vs {}: fast {fast}, scan {brute}",
            show(n),
            show(m)
        ));
    }
    // The characterization through embeddability plus domination, checked
    // against the direct scan.
    let emb = embeddable(n, m, leq).is_some();
    let dominated = m
        .occurrences()
        .iter()
        .all(|p| n.occurrences().iter().any(|q| leq(q, p)));
    if brute != (emb && dominated) {
        return Some(format!(
            "characterization fails for {} vs {}: scan {brute}, embed {emb}, dominated {dominated}",
            show(n),
            show(m)
        ));
    }
    if emb && n.len() > m.len() {
        return Some(format!("embedding grew length: {} vs {}", show(n), show(m)));
    }
    if fast {
        if n.len() > m.len() {
            return Some(format!("projection grew length: {} vs {}", show(n), show(m)));
        }
        // Antisymmetry.
        if projects(m, n, leq).is_some() && n != m {
            return Some(format!(
                "antisymmetry fails: {} << {} << {} with distinct sides",
                show(n),
                show(m),
                show(n)
            ));
        }
    }
    None
}

fn check_pi_reflection() -> CheckReport {
    let mut rb = ReportBuilder::new("pi-reflection");
    rb.param("max-nodes", 7);
    rb.param("classes", "T_3 and T_4");
    let trees: Vec<CoTree> = enumerate_cotrees(7).collect();
    let table = LeqPTable::build(&trees);
    let images: Vec<Option<PiImage>> = trees
        .iter()
        .map(|t| if t.is_singleton() { None } else { Some(pi_map(t).unwrap()) })
        .collect();
    for n in [3usize, 4] {
        let members: Vec<usize> = (0..trees.len())
            .filter(|&i| !trees[i].is_singleton() && trees[i].in_t(n).unwrap())
            .collect();
        // Codomain sanity: parts of a member of T_n live in T_{n-1}.
        for &i in &members {
            let img = images[i].as_ref().unwrap();
            if !img.upper.in_t(2).unwrap()
                || !img.parts.iter().all(|p| p.in_t(n - 1).unwrap())
            {
                rb.fail(format!("pi image leaves its codomain for {}", cx_tree(&trees[i])));
            }
        }
        let pairs: Vec<(usize, usize)> = members
            .iter()
            .flat_map(|&i| members.iter().map(move |&j| (i, j)))
            .collect();
        let outcomes: Vec<Option<String>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let a = images[i].as_ref().unwrap();
                let b = images[j].as_ref().unwrap();
                if pair_leq_table(a, b, &table) && !table.leq(trees[i].code(), trees[j].code()) {
                    Some(format!(
                        "pi fails to reflect: pi({}) <= pi({}) but {} !<=p {}",
                        trees[i].code(),
                        trees[j].code(),
                        trees[i].code(),
                        trees[j].code()
                    ))
                } else {
                    None
                }
            })
            .collect();
        rb.tally(outcomes);
    }
    rb.finish()
}

fn check_counterexample() -> CheckReport {
    let mut rb = ReportBuilder::new("counterexample");
    let dot = CoTree::singleton();
    let fork = CoTree::tau(0, 1).unwrap();
    let x = CoTree::reconstruct(1, &[dot.clone(), dot]).unwrap();
    let x_prime = CoTree::reconstruct(0, &[fork.clone(), fork.clone()]).unwrap();
    rb.param("x", x.code().as_str());
    rb.param("x'", x_prime.code().as_str());

    if leq_p(&x, &x_prime).is_none() {
        rb.fail(format!(
            "expected {} <=p {} to hold",
            cx_tree(&x),
            cx_tree(&x_prime)
        ));
    } else {
        rb.ok();
    }
    let pi_x = pi_map(&x).unwrap();
    let pi_x_prime = pi_map(&x_prime).unwrap();
    if pair_leq(&pi_x, &pi_x_prime) {
        rb.fail("expected the pi images to be unrelated".to_string());
    } else {
        rb.ok();
    }
    // The reason the pair order fails: tau(1,1) is not an image of tau(0,1).
    if leq_p(&pi_x.upper, &pi_x_prime.upper).is_some() {
        rb.fail("expected tau(1,1) !<=p tau(0,1)".to_string());
    } else {
        rb.ok();
    }
    rb.finish()
}

fn check_comb_chain() -> CheckReport {
    let mut rb = ReportBuilder::new("comb-chain");
    rb.param("n", "<= 5");
    let mut chain: Vec<(String, CoTree)> = vec![("hcomb(0)".into(), CoTree::hcomb(0).unwrap())];
    for n in 1..=5 {
        chain.push((format!("comb({n})"), CoTree::comb(n).unwrap()));
        chain.push((format!("hcomb({n})"), CoTree::hcomb(n).unwrap()));
    }
    let outcomes: Vec<Option<String>> = chain
        .par_windows(2)
        .map(|w| {
            let (lo_name, lo) = &w[0];
            let (hi_name, hi) = &w[1];
            if leq_p(lo, hi).is_none() {
                Some(format!("expected {lo_name} <=p {hi_name}"))
            } else if leq_p(hi, lo).is_some() {
                Some(format!("expected {hi_name} !<=p {lo_name}"))
            } else {
                None
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_ascending_chain() -> CheckReport {
    let mut rb = ReportBuilder::new("ascending-chain");
    rb.param("n", 3);
    rb.param("t", "<= 3");
    let y = CoTree::chain(2).unwrap();
    let members: Vec<CoTree> = (0..=3)
        .map(|t| CoTree::reconstruct(2 + t, &[y.clone(), y.clone()]).unwrap())
        .collect();
    for x in &members {
        // Each member sits in T_3 \ T_2.
        if !(x.in_t(3).unwrap() && !x.in_t(2).unwrap()) {
            rb.fail(format!("{} is not in T_3 \\ T_2", cx_tree(x)));
        } else {
            rb.ok();
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..4).flat_map(|t| (0..4).map(move |r| (t, r))).collect();
    let outcomes: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(t, r)| {
            let got = leq_p(&members[t], &members[r]).is_some();
            let expected = t <= r;
            if got == expected {
                None
            } else {
                Some(format!("X_{t} <=p X_{r}: got {got}, expected {expected}"))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}

fn check_morphism_laws() -> CheckReport {
    let mut rb = ReportBuilder::new("morphism-laws");
    rb.param("max-nodes", 5);
    let trees: Vec<CoTree> = enumerate_cotrees(5).collect();
    let pairs: Vec<(usize, usize)> = (0..trees.len())
        .flat_map(|i| (0..trees.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Vec<Option<String>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let src = &trees[i];
            let tgt = &trees[j];
            let morphisms = enumerate_bi_p_morphisms(src.poset(), tgt.poset());
            let mut local = Vec::new();
            // Existence of any morphism agrees with the image relation.
            let exists = !morphisms.is_empty();
            let related = leq_p(tgt, src).is_some();
            local.push(if exists == related {
                None
            } else {
                Some(format!(
                    "existence mismatch: maps {} -> {} found={exists}, leq_p={related}",
                    src.code(),
                    tgt.code()
                ))
            });
            for f in &morphisms {
                local.push(morphism_law_violation(src, tgt, f));
            }
            local
        })
        .collect();
    for chunk in outcomes {
        rb.tally(chunk);
    }
    rb.finish()
}

fn morphism_law_violation(src: &CoTree, tgt: &CoTree, f: &PosetMap) -> Option<String> {
    let sp = src.poset();
    let tp = tgt.poset();
    let describe = || format!("{:?} from {} to {}", f.map, src.code(), tgt.code());
    if f.map[src.coroot()] != tgt.coroot() {
        return Some(format!("co-root not preserved by {}", describe()));
    }
    if !f.is_surjective() {
        return Some(format!("not surjective: {}", describe()));
    }
    for x in 0..sp.len() {
        let image_up: Vec<usize> = {
            let mut v: Vec<usize> = sp.up_set(x).iter().map(|z| f.map[z]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let expected_up: Vec<usize> = tp.up_set(f.map[x]).iter().collect();
        if image_up != expected_up {
            return Some(format!("f[up x] != up f(x) at {x} for {}", describe()));
        }
        let image_down: Vec<usize> = {
            let mut v: Vec<usize> = sp.down_set(x).iter().map(|z| f.map[z]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let expected_down: Vec<usize> = tp.down_set(f.map[x]).iter().collect();
        if image_down != expected_down {
            return Some(format!("f[down x] != down f(x) at {x} for {}", describe()));
        }
        if sp.is_maximal(x) && !tp.is_maximal(f.map[x]) {
            return Some(format!("maximal point lost at {x} for {}", describe()));
        }
        if sp.is_minimal(x) && !tp.is_minimal(f.map[x]) {
            return Some(format!("minimal point lost at {x} for {}", describe()));
        }
    }
    for &(a, b) in sp.covers() {
        let (fa, fb) = (f.map[a], f.map[b]);
        let still_cover = tp.covers().contains(&(fa, fb));
        if !(fa == fb || still_cover) {
            return Some(format!("cover ({a},{b}) neither collapses nor covers for {}", describe()));
        }
    }
    None
}

fn check_antichain_table() -> CheckReport {
    let mut rb = ReportBuilder::new("antichain-table");
    rb.param("nodes", "3..=7");
    for nodes in 3..=7usize {
        let items: Vec<CoTree> = enumerate_cotrees(nodes)
            .filter(|t| t.len() == nodes && t.in_t(2).unwrap())
            .collect();
        let table = LeqPTable::build(&items);
        let lt = |i: usize, j: usize| {
            i != j && table.leq(items[i].code(), items[j].code())
        };
        let antichain = max_antichain(items.len(), lt);
        let certified = max_antichain_bruteforce(items.len(), lt).unwrap();
        let pairwise_ok = antichain.iter().enumerate().all(|(a, &i)| {
            antichain[a + 1..].iter().all(|&j| !lt(i, j) && !lt(j, i))
        });
        let expected = nodes - 1;
        if antichain.len() == expected && certified == expected && pairwise_ok {
            rb.ok();
        } else {
            rb.fail(format!(
                "antichain among {nodes}-node members of T_2: matching {}, scan {certified}, \
                 expected {expected}, pairwise {pairwise_ok}",
                antichain.len()
            ));
        }
    }
    rb.finish()
}

fn check_shift_oracle() -> CheckReport {
    let mut rb = ReportBuilder::new("shift-oracle");
    rb.param("universe", "subsets of 0..=6");
    let subsets: Vec<FiniteSubset> = (0u32..128)
        .map(|mask| FiniteSubset::new((0..7).filter(|&i| mask & (1 << i) != 0)))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..subsets.len())
        .flat_map(|i| (0..subsets.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let fast = shift_rel(&subsets[i], &subsets[j]);
            let slow = shift_rel_oracle(&subsets[i], &subsets[j]);
            if fast == slow {
                None
            } else {
                Some(format!(
                    "shift criterion mismatch for {:?} and {:?}: fast {fast}, oracle {slow}",
                    subsets[i].elems(),
                    subsets[j].elems()
                ))
            }
        })
        .collect();
    rb.tally(outcomes);
    rb.finish()
}
