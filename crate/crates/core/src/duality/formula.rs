//! Bi-intuitionistic formulas: parsing, Kripke semantics over a finite poset,
//! algebraic evaluation in the dual algebra of upsets, and validity by
//! exhaustive valuation search.
//!
//! Grammar: variables `[a-z][a-z0-9_]*`, constants `0` and `1`, prefix `~`
//! (sugar for `phi -> 0`), infix `&`, `|`, `->`, `<-`. Precedence
//! `~ > & > | > {->, <-}`; `->` associates right, `<-` left, and mixing the
//! two at one level without parentheses is rejected.

use std::collections::BTreeMap;
use std::fmt;

use crate::cotree::CoTree;
use crate::error::{Error, Result};
use crate::poset::{ElemSet, Poset};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Var(String),
    Bot,
    Top,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Coimp(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn coimp(a: Formula, b: Formula) -> Formula {
        Formula::Coimp(Box::new(a), Box::new(b))
    }

    /// `~phi` is sugar for `phi -> 0`.
    pub fn negate(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    /// The prelinearity axiom `(p -> q) | (q -> p)`.
    pub fn prelinearity() -> Formula {
        Formula::or(
            Formula::imp(Formula::var("p"), Formula::var("q")),
            Formula::imp(Formula::var("q"), Formula::var("p")),
        )
    }

    /// The axiom `~((q <- p) & (p <- q))` separating chains among co-forests.
    pub fn bilc() -> Formula {
        Formula::negate(Formula::and(
            Formula::coimp(Formula::var("q"), Formula::var("p")),
            Formula::coimp(Formula::var("p"), Formula::var("q")),
        ))
    }

    /// Variables occurring in the formula, sorted and deduplicated.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(v) => out.push(v.clone()),
            Formula::Bot | Formula::Top => {}
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::Coimp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => 4,
            Formula::And(..) => 3,
            Formula::Or(..) => 2,
            Formula::Imp(..) | Formula::Coimp(..) => 1,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, inner: &Formula, outer_prec: u8) -> fmt::Result {
            if inner.precedence() <= outer_prec {
                write!(f, "({inner})")
            } else {
                write!(f, "{inner}")
            }
        }
        match self {
            Formula::Var(v) => f.write_str(v),
            Formula::Bot => f.write_str("0"),
            Formula::Top => f.write_str("1"),
            Formula::And(a, b) => {
                wrap(f, a, 2)?;
                f.write_str(" & ")?;
                wrap(f, b, 2)
            }
            Formula::Or(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" | ")?;
                wrap(f, b, 1)
            }
            Formula::Imp(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" -> ")?;
                wrap(f, b, 1)
            }
            Formula::Coimp(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" <- ")?;
                wrap(f, b, 1)
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Token {
    Ident(String),
    Zero,
    One,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Coarrow,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '0' => {
                out.push((i, Token::Zero));
                i += 1;
            }
            '1' => {
                out.push((i, Token::One));
                i += 1;
            }
            '~' => {
                out.push((i, Token::Tilde));
                i += 1;
            }
            '&' => {
                out.push((i, Token::Amp));
                i += 1;
            }
            '|' => {
                out.push((i, Token::Pipe));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return Err(Error::Parse { pos: i, msg: "expected `->`".into() });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') {
                    out.push((i, Token::Coarrow));
                    i += 2;
                } else {
                    return Err(Error::Parse { pos: i, msg: "expected `<-`".into() });
                }
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(Error::Parse { pos: i, msg: format!("unexpected character {c:?}") })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn formula(&mut self) -> Result<Formula> {
        let first = self.or_expr()?;
        match self.peek() {
            Some(Token::Arrow) => {
                let mut operands = vec![first];
                while let Some(tok) = self.peek() {
                    match tok {
                        Token::Arrow => {
                            self.bump();
                            operands.push(self.or_expr()?);
                        }
                        Token::Coarrow => {
                            return Err(Error::Parse {
                                pos: self.here(),
                                msg: "mixing `->` and `<-` needs parentheses".into(),
                            })
                        }
                        _ => break,
                    }
                }
                // Right associative.
                let mut acc = operands.pop().unwrap();
                while let Some(lhs) = operands.pop() {
                    acc = Formula::imp(lhs, acc);
                }
                Ok(acc)
            }
            Some(Token::Coarrow) => {
                let mut acc = first;
                while let Some(tok) = self.peek() {
                    match tok {
                        Token::Coarrow => {
                            self.bump();
                            let rhs = self.or_expr()?;
                            acc = Formula::coimp(acc, rhs);
                        }
                        Token::Arrow => {
                            return Err(Error::Parse {
                                pos: self.here(),
                                msg: "mixing `->` and `<-` needs parentheses".into(),
                            })
                        }
                        _ => break,
                    }
                }
                Ok(acc)
            }
            _ => Ok(first),
        }
    }

    fn or_expr(&mut self) -> Result<Formula> {
        let mut acc = self.and_expr()?;
        while self.peek() == Some(&Token::Pipe) {
            self.bump();
            acc = Formula::or(acc, self.and_expr()?);
        }
        Ok(acc)
    }

    fn and_expr(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.peek() == Some(&Token::Tilde) {
            self.bump();
            return Ok(Formula::negate(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let pos = self.here();
        match self.bump() {
            Some(Token::Ident(name)) => Ok(Formula::Var(name)),
            Some(Token::Zero) => Ok(Formula::Bot),
            Some(Token::One) => Ok(Formula::Top),
            Some(Token::LParen) => {
                let inner = self.formula()?;
                if self.bump() != Some(Token::RParen) {
                    return Err(Error::Parse { pos, msg: "unclosed parenthesis".into() });
                }
                Ok(inner)
            }
            other => Err(Error::Parse {
                pos,
                msg: format!("expected a formula atom, got {other:?}"),
            }),
        }
    }
}

/// Parses a formula from text.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let formula = parser.formula()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse { pos: parser.here(), msg: "trailing input".into() });
    }
    Ok(formula)
}

/// A valuation: each variable gets an upset of the frame.
pub type Valuation = BTreeMap<String, ElemSet>;

fn check_valuation(x: &Poset, val: &Valuation, phi: &Formula) -> Result<()> {
    for v in phi.vars() {
        match val.get(&v) {
            None => return Err(Error::Valuation(format!("variable `{v}` unassigned"))),
            Some(&set) => {
                if !set.is_subset(ElemSet::full(x.len())) || !x.is_upset(set) {
                    return Err(Error::Valuation(format!("value of `{v}` is not an upset")));
                }
            }
        }
    }
    Ok(())
}

/// Algebraic evaluation: computes the upset of points forcing `phi` by the
/// set formulas of the dual algebra.
pub fn eval_formula(x: &Poset, val: &Valuation, phi: &Formula) -> Result<ElemSet> {
    check_valuation(x, val, phi)?;
    Ok(eval_set(x, val, phi))
}

fn eval_set(x: &Poset, val: &Valuation, phi: &Formula) -> ElemSet {
    let full = ElemSet::full(x.len());
    match phi {
        Formula::Var(v) => val[v],
        Formula::Bot => ElemSet::EMPTY,
        Formula::Top => full,
        Formula::And(a, b) => eval_set(x, val, a).inter(eval_set(x, val, b)),
        Formula::Or(a, b) => eval_set(x, val, a).union(eval_set(x, val, b)),
        Formula::Imp(a, b) => {
            let ua = eval_set(x, val, a);
            let ub = eval_set(x, val, b);
            full.minus(x.down_closure(ua.minus(ub)))
        }
        Formula::Coimp(a, b) => {
            let ua = eval_set(x, val, a);
            let ub = eval_set(x, val, b);
            x.up_closure(ua.minus(ub))
        }
    }
}

/// Kripke evaluation: the set of points forcing `phi` under the pointwise
/// clauses. Must agree with [`eval_formula`] everywhere; both are kept as
/// independent routes.
pub fn eval_kripke(x: &Poset, val: &Valuation, phi: &Formula) -> Result<ElemSet> {
    check_valuation(x, val, phi)?;
    Ok((0..x.len()).filter(|&p| forces(x, val, phi, p)).collect())
}

fn forces(x: &Poset, val: &Valuation, phi: &Formula, point: usize) -> bool {
    match phi {
        Formula::Var(v) => val[v].contains(point),
        Formula::Bot => false,
        Formula::Top => true,
        Formula::And(a, b) => forces(x, val, a, point) && forces(x, val, b, point),
        Formula::Or(a, b) => forces(x, val, a, point) || forces(x, val, b, point),
        Formula::Imp(a, b) => x
            .up_set(point)
            .iter()
            .all(|y| !forces(x, val, a, y) || forces(x, val, b, y)),
        Formula::Coimp(a, b) => x
            .down_set(point)
            .iter()
            .any(|y| forces(x, val, a, y) && !forces(x, val, b, y)),
    }
}

/// A refuting valuation together with the least point where the formula
/// fails.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Refutation {
    pub valuation: Vec<(String, ElemSet)>,
    pub point: usize,
}

/// Guard on the number of valuations `is_valid` will scan.
pub const MAX_VALUATIONS: u64 = 1 << 20;

/// Validity on a frame: `phi` evaluates to the whole poset under every upset
/// valuation. On failure returns the lexicographically first refuting
/// valuation (variables sorted, upsets in canonical enumeration order).
pub fn is_valid(x: &Poset, phi: &Formula) -> Result<(bool, Option<Refutation>)> {
    if x.is_empty() {
        return Ok((true, None));
    }
    let vars = phi.vars();
    let upsets = x.all_upsets();
    let combos = (upsets.len() as u64).checked_pow(vars.len() as u32);
    match combos {
        Some(c) if c <= MAX_VALUATIONS => {}
        _ => {
            return Err(Error::Size(format!(
                "{} valuations exceed the {MAX_VALUATIONS} guard",
                combos.map_or("overflowing".to_string(), |c| c.to_string())
            )))
        }
    }
    let full = ElemSet::full(x.len());
    let mut choice = vec![0usize; vars.len()];
    loop {
        let val: Valuation =
            vars.iter().cloned().zip(choice.iter().map(|&i| upsets[i])).collect();
        let forced = eval_set(x, &val, phi);
        if forced != full {
            let point = full.minus(forced).iter().next().unwrap();
            let valuation = vars.iter().cloned().zip(choice.iter().map(|&i| upsets[i])).collect();
            return Ok((false, Some(Refutation { valuation, point })));
        }
        // Advance with the first variable most significant.
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok((true, None));
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < upsets.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Semantic subframe criterion: the dual of `x` refutes the subframe formula
/// of `y` exactly when `y` order-embeds into `x`. `x` must be a co-forest.
pub fn subframe_refuted(x: &Poset, y: &CoTree) -> Result<bool> {
    if !x.classify().is_coforest() {
        return Err(Error::Usage("subframe criterion requires a co-forest".into()));
    }
    Ok(y.poset().order_embedding(x).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::PosetKind;

    fn chain(n: usize) -> Poset {
        CoTree::chain(n).unwrap().poset().clone()
    }

    #[test]
    fn parse_axioms() {
        assert_eq!(parse_formula("(p -> q) | (q -> p)").unwrap(), Formula::prelinearity());
        assert_eq!(parse_formula("~((q <- p) & (p <- q))").unwrap(), Formula::bilc());
    }

    #[test]
    fn parse_precedence_and_associativity() {
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::imp(Formula::var("p"), Formula::imp(Formula::var("q"), Formula::var("r")))
        );
        assert_eq!(
            parse_formula("p <- q <- r").unwrap(),
            Formula::coimp(Formula::coimp(Formula::var("p"), Formula::var("q")), Formula::var("r"))
        );
        assert_eq!(
            parse_formula("~p & q | r").unwrap(),
            Formula::or(
                Formula::and(Formula::negate(Formula::var("p")), Formula::var("q")),
                Formula::var("r")
            )
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_formula("p -> q <- r"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("p <- q -> r"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("(p -> q"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("p @ q"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("p q"), Err(Error::Parse { pos: 2, .. })));
    }

    #[test]
    fn eval_coimp_on_two_chain() {
        let x = chain(2);
        let mut val = Valuation::new();
        val.insert("p".into(), ElemSet::from_iter([0, 1]));
        val.insert("q".into(), ElemSet::from_iter([1]));
        let phi = Formula::coimp(Formula::var("p"), Formula::var("q"));
        assert_eq!(eval_formula(&x, &val, &phi).unwrap(), ElemSet::from_iter([0, 1]));
        assert_eq!(eval_kripke(&x, &val, &phi).unwrap(), ElemSet::from_iter([0, 1]));
    }

    #[test]
    fn self_implication_constants() {
        let frames =
            [chain(3), Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap(), chain(1)];
        for x in frames {
            let full = ElemSet::full(x.len());
            for upset in x.all_upsets() {
                let mut val = Valuation::new();
                val.insert("p".into(), upset);
                let pp = Formula::imp(Formula::var("p"), Formula::var("p"));
                assert_eq!(eval_formula(&x, &val, &pp).unwrap(), full);
                let pm = Formula::coimp(Formula::var("p"), Formula::var("p"));
                assert_eq!(eval_formula(&x, &val, &pm).unwrap(), ElemSet::EMPTY);
            }
        }
    }

    #[test]
    fn valuation_errors() {
        let x = chain(2);
        let phi = Formula::var("p");
        let mut val = Valuation::new();
        assert!(matches!(eval_formula(&x, &val, &phi), Err(Error::Valuation(_))));
        val.insert("p".into(), ElemSet::from_iter([0]));
        assert!(matches!(eval_formula(&x, &val, &phi), Err(Error::Valuation(_))));
    }

    #[test]
    fn prelinearity_classifies_small_frames() {
        let (valid, _) = is_valid(&chain(2), &Formula::prelinearity()).unwrap();
        assert!(valid);

        let lambda = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        let (valid, refutation) = is_valid(&lambda, &Formula::prelinearity()).unwrap();
        assert!(!valid);
        let r = refutation.unwrap();
        assert_eq!(
            r.valuation,
            vec![
                ("p".to_string(), ElemSet::from_iter([1])),
                ("q".to_string(), ElemSet::from_iter([2])),
            ]
        );
        assert_eq!(r.point, 0);
    }

    #[test]
    fn bilc_separates_chains_from_branching() {
        let (valid, _) = is_valid(&chain(3), &Formula::bilc()).unwrap();
        assert!(valid);
        let fork = CoTree::hcomb(1).unwrap();
        let (valid, _) = is_valid(fork.poset(), &Formula::bilc()).unwrap();
        assert!(!valid);
        let forest =
            Poset::disjoint_union(&[chain(2), chain(3)]).unwrap();
        assert_eq!(forest.classify().kind, PosetKind::CoforestNoncotree);
        let (valid, _) = is_valid(&forest, &Formula::bilc()).unwrap();
        assert!(valid);
    }

    #[test]
    fn kripke_agrees_with_algebraic() {
        let frames = [
            chain(3),
            CoTree::comb(2).unwrap().poset().clone(),
            Poset::from_covers(4, &[(0, 2), (1, 2), (1, 3)]).unwrap(),
        ];
        let formulas = [
            Formula::prelinearity(),
            Formula::bilc(),
            parse_formula("(p <- q) -> (p & ~q | r)").unwrap(),
        ];
        for x in &frames {
            let upsets = x.all_upsets();
            for phi in &formulas {
                let vars = phi.vars();
                // Sample a handful of valuations rather than the full grid.
                for seed in 0..upsets.len() {
                    let val: Valuation = vars
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v.clone(), upsets[(seed + 3 * i) % upsets.len()]))
                        .collect();
                    assert_eq!(
                        eval_formula(x, &val, phi).unwrap(),
                        eval_kripke(x, &val, phi).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn size_guard_on_validity() {
        // 10 incomparable points give 2^10 upsets; three variables overflow
        // the valuation budget.
        let big = Poset::antichain(10).unwrap();
        let phi = parse_formula("p & q & r | s").unwrap();
        assert!(matches!(is_valid(&big, &phi), Err(Error::Size(_))));
    }

    #[test]
    fn subframe_refutation_tracks_component_comb_numbers() {
        use crate::poset::enumerate_posets;
        for x in enumerate_posets(5) {
            let class = x.classify();
            if !class.is_coforest() || x.is_empty() {
                continue;
            }
            for n in 1..=2usize {
                let comb = CoTree::comb(n).unwrap();
                let refuted = subframe_refuted(&x, &comb).unwrap();
                let some_component = class.components.iter().any(|&c| {
                    let (sub, _) = x.induced(c);
                    CoTree::new(sub).unwrap().comb_number() >= n
                });
                assert_eq!(refuted, some_component, "n={n}, poset {}", x.to_text());
            }
        }
    }

    #[test]
    fn subframe_criterion() {
        let c2 = CoTree::comb(2).unwrap();
        let c1 = CoTree::comb(1).unwrap();
        assert!(subframe_refuted(c2.poset(), &c1).unwrap());
        assert!(!subframe_refuted(&chain(5), &c2).unwrap());
        for n in 1..=4 {
            let cn = CoTree::comb(n).unwrap();
            assert!(subframe_refuted(cn.poset(), &cn).unwrap());
        }
        let lambda = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(matches!(subframe_refuted(&lambda, &c1), Err(Error::Usage(_))));
    }
}
