//! The naive product of a context-free grammar and an automaton, plus
//! grammar reduction and bounded string enumeration.
//!
//! For every rule `X0 -> X1 ... Xn` and every tuple of states `q0 ... qn`
//! the product contains `<X0,q0,qn> -> <X1,q0,q1> ... <Xn,q(n-1),qn>`; every
//! transition `q -a-> q'` contributes `<a,q,q'> -> a`. Most of these rules
//! are useless, which is what [`reduce`] removes.

use std::collections::BTreeSet;
use std::fmt;

use crate::cfg::{Cfg, CfgBuilder, Sym};
use crate::forest::{ForestGrammar, ForestRhs, ForestRule};
use crate::fsa::{Fsa, StateId};
use crate::grammar::{Grammar, GrammarError, RhsItem};
use crate::terms::{write_atom, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolBase {
    Category(Term),
    Terminal(String),
}

/// A category or terminal spanning the automaton from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedSymbol {
    pub base: SymbolBase,
    pub from: StateId,
    pub to: StateId,
}

impl DecoratedSymbol {
    pub fn category(cat: Term, from: StateId, to: StateId) -> Self {
        DecoratedSymbol {
            base: SymbolBase::Category(cat),
            from,
            to,
        }
    }

    pub fn terminal(label: impl Into<String>, from: StateId, to: StateId) -> Self {
        DecoratedSymbol {
            base: SymbolBase::Terminal(label.into()),
            from,
            to,
        }
    }

    /// The category, unless this is a terminal symbol.
    pub fn category_term(&self) -> Option<&Term> {
        match &self.base {
            SymbolBase::Category(c) => Some(c),
            SymbolBase::Terminal(_) => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.base, SymbolBase::Terminal(_))
    }

    /// Printed form when the symbol occurs on a right-hand side, with the
    /// `+`/`-` marker: `p(+s,q1,q2)`, `p(-a,q0,q1)`.
    pub fn reference(&self) -> Reference<'_> {
        Reference(self)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, marked: bool) -> fmt::Result {
        f.write_str("p(")?;
        match &self.base {
            SymbolBase::Category(c) => {
                if marked {
                    f.write_str("+")?;
                }
                write!(f, "{c}")?;
            }
            SymbolBase::Terminal(t) => {
                if marked {
                    f.write_str("-")?;
                }
                write_atom(f, t)?;
            }
        }
        write!(f, ",{},{})", self.from, self.to)
    }

    /// Label used in tree renderings: `s,q0,q2`.
    pub fn label(&self) -> String {
        let base = match &self.base {
            SymbolBase::Category(c) => c.to_string(),
            SymbolBase::Terminal(t) => t.clone(),
        };
        format!("{base},{},{}", self.from.as_str(), self.to.as_str())
    }
}

/// Left-hand-side form: `p(s,q0,q2)`.
impl fmt::Display for DecoratedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

pub struct Reference<'a>(&'a DecoratedSymbol);

impl fmt::Display for Reference<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, true)
    }
}

/// Bar-Hillel product of a context-free grammar and an automaton.
///
/// Rules are emitted grammar rule by grammar rule, state tuples in
/// lexicographic order of state index, followed by one terminal rule per
/// transition. A rule with `n` right-hand-side items contributes exactly
/// `|Q|^(n+1)` rules; empty rules decorate as `<X,q,q>`.
pub fn intersect_naive(g: &Grammar, m: &Fsa) -> Result<ForestGrammar, GrammarError> {
    g.require_context_free()?;
    let states = m.states();
    let mut forest = ForestGrammar::new(None);
    for rule in &g.rules {
        let n = rule.rhs.len();
        let mut tuple = vec![0usize; n + 1];
        if n == 0 {
            for q in states {
                forest.push_unchecked(ForestRule::new_unchecked(
                    DecoratedSymbol::category(rule.lhs.clone(), q.clone(), q.clone()),
                    ForestRhs::Symbols(Vec::new()),
                    None,
                ));
            }
            continue;
        }
        loop {
            let rhs = rule
                .rhs
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let (from, to) = (states[tuple[i]].clone(), states[tuple[i + 1]].clone());
                    match item {
                        RhsItem::Terminal(t) => DecoratedSymbol::terminal(t.clone(), from, to),
                        RhsItem::Nonterminal(c) => DecoratedSymbol::category(c.clone(), from, to),
                    }
                })
                .collect();
            forest.push_unchecked(ForestRule::new_unchecked(
                DecoratedSymbol::category(
                    rule.lhs.clone(),
                    states[tuple[0]].clone(),
                    states[tuple[n]].clone(),
                ),
                ForestRhs::Symbols(rhs),
                None,
            ));
            // odometer increment, last position fastest
            let mut pos = n + 1;
            let exhausted = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < states.len() {
                    break false;
                }
                tuple[pos] = 0;
            };
            if exhausted {
                break;
            }
        }
    }
    for t in m.transitions() {
        forest.push_unchecked(ForestRule::new_unchecked(
            DecoratedSymbol::terminal(t.label.clone(), t.from.clone(), t.to.clone()),
            ForestRhs::Terminal(t.label.clone()),
            None,
        ));
    }
    for qs in m.starts() {
        for qf in m.finals() {
            forest.add_start(DecoratedSymbol::category(
                g.top.clone(),
                m.state(qs).clone(),
                m.state(qf).clone(),
            ));
        }
    }
    Ok(forest)
}

/// Anything that can be read as a context-free grammar with designated
/// start symbols, rule by rule.
pub trait ContextFree: Sized {
    fn to_cfg(&self) -> Result<Cfg, GrammarError>;

    /// Copy keeping exactly the rules `i` with `keep[i]`.
    fn retain_rules(&self, keep: &[bool]) -> Self;
}

impl ContextFree for Grammar {
    fn to_cfg(&self) -> Result<Cfg, GrammarError> {
        self.require_context_free()?;
        let mut b = CfgBuilder::<Term>::new();
        let top = b.nonterminal(self.top.clone());
        b.start(top);
        for r in &self.rules {
            let lhs = b.nonterminal(r.lhs.clone());
            let rhs = r
                .rhs
                .iter()
                .map(|item| match item {
                    RhsItem::Terminal(t) => Sym::T(b.terminal(t)),
                    RhsItem::Nonterminal(c) => Sym::N(b.nonterminal(c.clone())),
                })
                .collect();
            b.rule(lhs, rhs);
        }
        Ok(b.finish())
    }

    fn retain_rules(&self, keep: &[bool]) -> Self {
        Grammar {
            rules: self
                .rules
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(r, _)| r.clone())
                .collect(),
            top: self.top.clone(),
        }
    }
}

impl ContextFree for ForestGrammar {
    fn to_cfg(&self) -> Result<Cfg, GrammarError> {
        Ok(self.build_cfg())
    }

    fn retain_rules(&self, keep: &[bool]) -> Self {
        self.filtered(keep)
    }
}

/// The productive and reachable part of `g`. Generates the same language.
pub fn reduce<G: ContextFree>(g: &G) -> Result<G, GrammarError> {
    let cfg = g.to_cfg()?;
    Ok(g.retain_rules(&cfg.useful_rules()))
}

/// All terminal strings of length at most `k` derivable from a start
/// symbol of `g`. Constraints attached to forest rules are ignored.
pub fn language_upto<G: ContextFree>(g: &G, k: usize) -> Result<BTreeSet<Vec<String>>, GrammarError> {
    Ok(g.to_cfg()?.language_upto(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anbn() -> Grammar {
        "top s\nrule s -> -a +s -b\nrule s ->\n".parse().unwrap()
    }

    fn even_as_then_bs() -> Fsa {
        "start q0\nfinal q2\ntrans q0 a q1\ntrans q1 a q0\ntrans q0 b q2\ntrans q2 b q2\n"
            .parse()
            .unwrap()
    }

    fn words(ws: &[&str]) -> BTreeSet<Vec<String>> {
        ws.iter()
            .map(|w| w.chars().map(|c| c.to_string()).collect())
            .collect()
    }

    #[test]
    fn product_rule_counts() {
        let g = anbn();
        assert_eq!(intersect_naive(&g, &even_as_then_bs()).unwrap().rules().len(), 88);
        let chain = Fsa::from_string(&["a", "a", "b", "b"]);
        assert_eq!(intersect_naive(&g, &chain).unwrap().rules().len(), 634);
        let none: Grammar = "top s\n".parse().unwrap();
        let f = intersect_naive(&none, &even_as_then_bs()).unwrap();
        assert_eq!(f.rules().len(), 4);
        assert!(f.rules().iter().all(|r| matches!(r.rhs(), ForestRhs::Terminal(_))));
    }

    #[test]
    fn product_rejects_dcg() {
        let g: Grammar = "top s(X)\nrule s(a) -> -a\n".parse().unwrap();
        assert!(matches!(
            intersect_naive(&g, &Fsa::from_string(&["a"])),
            Err(GrammarError::NotContextFree(_))
        ));
    }

    #[test]
    fn product_emission_order() {
        let f = intersect_naive(&anbn(), &even_as_then_bs()).unwrap();
        assert_eq!(
            f.rules()[0].to_string(),
            "p(s,q0,q0) -> p(-a,q0,q0) p(+s,q0,q0) p(-b,q0,q0)"
        );
        // states are indexed in order of first mention: q0, q2, q1
        assert_eq!(
            f.rules()[1].to_string(),
            "p(s,q0,q2) -> p(-a,q0,q0) p(+s,q0,q0) p(-b,q0,q2)"
        );
        assert_eq!(f.rules()[81].to_string(), "p(s,q0,q0) ->");
        assert_eq!(f.rules()[84].to_string(), "p(a,q0,q1) -> a");
        assert_eq!(f.starts().len(), 1);
    }

    #[test]
    fn reduced_product_language() {
        let f = intersect_naive(&anbn(), &even_as_then_bs()).unwrap();
        let r = reduce(&f).unwrap();
        assert_eq!(language_upto(&r, 8).unwrap(), words(&["aabb", "aaaabbbb"]));
        assert_eq!(language_upto(&f, 8).unwrap(), language_upto(&r, 8).unwrap());
        assert_eq!(reduce(&r).unwrap(), r);
    }

    #[test]
    fn anbn_language() {
        assert_eq!(language_upto(&anbn(), 4).unwrap(), words(&["", "ab", "aabb"]));
        let empty: Grammar = "top s\n".parse().unwrap();
        assert!(language_upto(&empty, 3).unwrap().is_empty());
    }

    #[test]
    fn reduce_unproductive_start() {
        let g: Grammar = "top s\nrule s -> +t\nrule t -> +t -a\nrule u -> -b\n".parse().unwrap();
        assert!(reduce(&g).unwrap().rules.is_empty());
    }
}
