//! Parse-forest grammars: the result of intersecting a grammar with an
//! automaton.
//!
//! Text format:
//!
//! ```text
//! top s                      # only when rules carry constraints
//! start p(s,q0,q2)
//! p(s,q0,q2) -> p(-a,q0,q1) p(+s,q1,q2) p(-b,q2,q2)
//! p(s,q0,q0) ->
//! p(a,q0,q1) -> a
//! p('r/4',q,q) -> p(-x,q,q) {2: r([1|A],A,[1,1,1|B],B) -> -x}
//! ```
//!
//! A constraint `{i: rule}` records the grammar rule (and its index) a forest
//! rule was derived from. Trees over constrained rules are only valid if the
//! rule instances along the tree unify with each other and with `top`.

use std::cell::Cell;
use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::ops::ControlFlow;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::barhillel::{DecoratedSymbol, SymbolBase};
use crate::cfg::{Cfg, CfgBuilder, Sym};
use crate::fsa::StateId;
use crate::grammar::{read_rule, GrammarError, RhsItem, Rule};
use crate::terms::{unify, write_atom, Reader, Substitution, SyntaxError, Term};

/// Size cap for tree enumeration over cyclic forests when the caller gives
/// no bound.
pub const DEFAULT_MAX_TREE_SIZE: usize = 48;
/// Node visits allowed to [`ForestGrammar::find_valid_tree`] before it gives
/// up with [`Witness::Unknown`].
pub const WITNESS_STEP_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub rule_index: usize,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ForestRhs {
    /// `<a,q,q'> -> a`
    Terminal(String),
    Symbols(Vec<DecoratedSymbol>),
}

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("rule `{0}` breaks state chaining")]
    Chaining(String),
    #[error("terminal rule `{0}` must have a terminal on both sides")]
    TerminalShape(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForestRule {
    lhs: DecoratedSymbol,
    rhs: ForestRhs,
    constraint: Option<Constraint>,
}

impl ForestRule {
    /// Checks state chaining: the right-hand side spans `lhs.from` to
    /// `lhs.to` without gaps.
    pub fn new(
        lhs: DecoratedSymbol,
        rhs: ForestRhs,
        constraint: Option<Constraint>,
    ) -> Result<Self, ForestError> {
        let rule = ForestRule {
            lhs,
            rhs,
            constraint,
        };
        rule.check()?;
        Ok(rule)
    }

    pub(crate) fn new_unchecked(
        lhs: DecoratedSymbol,
        rhs: ForestRhs,
        constraint: Option<Constraint>,
    ) -> Self {
        let rule = ForestRule {
            lhs,
            rhs,
            constraint,
        };
        debug_assert!(rule.check().is_ok(), "{rule}");
        rule
    }

    fn check(&self) -> Result<(), ForestError> {
        match &self.rhs {
            ForestRhs::Terminal(t) => match &self.lhs.base {
                SymbolBase::Terminal(l) if l == t => Ok(()),
                _ => Err(ForestError::TerminalShape(self.to_string())),
            },
            ForestRhs::Symbols(syms) => {
                if self.lhs.is_terminal() {
                    return Err(ForestError::TerminalShape(self.to_string()));
                }
                let mut at = &self.lhs.from;
                for s in syms {
                    if &s.from != at {
                        return Err(ForestError::Chaining(self.to_string()));
                    }
                    at = &s.to;
                }
                if at != &self.lhs.to {
                    return Err(ForestError::Chaining(self.to_string()));
                }
                Ok(())
            }
        }
    }

    pub fn lhs(&self) -> &DecoratedSymbol {
        &self.lhs
    }

    pub fn rhs(&self) -> &ForestRhs {
        &self.rhs
    }

    pub fn constraint(&self) -> Option<&Constraint> {
        self.constraint.as_ref()
    }

    /// Right-hand-side symbols; empty for terminal rules.
    pub fn children(&self) -> &[DecoratedSymbol] {
        match &self.rhs {
            ForestRhs::Symbols(s) => s,
            ForestRhs::Terminal(_) => &[],
        }
    }
}

impl fmt::Display for ForestRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        match &self.rhs {
            ForestRhs::Terminal(t) => {
                f.write_str(" ")?;
                write_atom(f, t)?;
            }
            ForestRhs::Symbols(syms) => {
                for s in syms {
                    write!(f, " {}", s.reference())?;
                }
            }
        }
        if let Some(c) = &self.constraint {
            write!(f, " {{{}: {}}}", c.rule_index, c.rule)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForestGrammar {
    rules: Vec<ForestRule>,
    starts: Vec<DecoratedSymbol>,
    top: Option<Term>,
}

/// A derivation tree of a forest grammar. Nodes over terminal symbols are
/// leaves; their terminal is implied by the symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTree {
    pub symbol: DecoratedSymbol,
    /// Index of the forest rule used at this node.
    pub rule: usize,
    pub children: Vec<ParseTree>,
}

/// A tree with state decorations and markers erased.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainTree {
    pub label: String,
    pub children: Vec<PlainTree>,
}

impl PlainTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        PlainTree {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<PlainTree>) -> Self {
        PlainTree {
            label: label.into(),
            children,
        }
    }
}

impl fmt::Display for PlainTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return f.write_str(&self.label);
        }
        write!(f, "({}", self.label)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

impl ParseTree {
    pub fn frontier(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_frontier(&mut out);
        out
    }

    fn collect_frontier(&self, out: &mut Vec<String>) {
        if let SymbolBase::Terminal(t) = &self.symbol.base {
            out.push(t.clone());
        }
        self.children.iter().for_each(|c| c.collect_frontier(out));
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ParseTree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ParseTree::depth).max().unwrap_or(0)
    }

    /// Pre-order traversal.
    pub fn nodes(&self) -> Vec<&ParseTree> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    /// Drops state decorations and markers. A terminal node `<a,q,q'>`
    /// becomes `a` over the leaf `a`.
    pub fn erased(&self) -> PlainTree {
        match &self.symbol.base {
            SymbolBase::Terminal(t) => PlainTree::node(t.clone(), vec![PlainTree::leaf(t.clone())]),
            SymbolBase::Category(c) => PlainTree {
                label: c.to_string(),
                children: self.children.iter().map(ParseTree::erased).collect(),
            },
        }
    }

    /// Indented rendering, one `cat,from,to` label per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let _ = writeln!(out, "{:indent$}{}", "", self.symbol.label());
        if let SymbolBase::Terminal(t) = &self.symbol.base {
            let _ = writeln!(out, "{:width$}{t}", "", width = indent + 2);
        }
        for c in &self.children {
            c.render_into(out, indent + 2);
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  node [shape=plaintext];\n");
        let mut next = 0usize;
        self.dot_into(&mut out, &mut next);
        out.push_str("}\n");
        out
    }

    fn dot_into(&self, out: &mut String, next: &mut usize) -> usize {
        let me = *next;
        *next += 1;
        let _ = writeln!(out, "  n{me} [label=\"{}\"];", self.symbol.label().replace('"', "\\\""));
        if let SymbolBase::Terminal(t) = &self.symbol.base {
            let leaf = *next;
            *next += 1;
            let _ = writeln!(out, "  n{leaf} [label=\"{}\"];\n  n{me} -> n{leaf};", t.replace('"', "\\\""));
        }
        for c in &self.children {
            let child = c.dot_into(out, next);
            let _ = writeln!(out, "  n{me} -> n{child};");
        }
        me
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.symbol.label())?;
        if let SymbolBase::Terminal(t) = &self.symbol.base {
            write!(f, " {t}")?;
        }
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

/// Bounds for [`ForestGrammar::extract`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeQuery {
    pub limit: usize,
    pub max_depth: Option<usize>,
    pub max_size: Option<usize>,
    pub max_frontier: Option<usize>,
}

impl TreeQuery {
    pub fn new(limit: usize) -> Self {
        TreeQuery {
            limit,
            max_depth: None,
            max_size: None,
            max_frontier: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub trees: Vec<ParseTree>,
    /// True when every tree within the query bounds was visited, so a short
    /// result is the complete answer.
    pub exhaustive: bool,
}

/// Outcome of searching a forest for one constraint-valid tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Found(ParseTree),
    /// The tree inventory is finite and holds no valid tree.
    NoneExists,
    /// Search stopped at a size cap or step budget without an answer.
    Unknown,
}

impl ForestGrammar {
    pub fn new(top: Option<Term>) -> Self {
        ForestGrammar {
            rules: Vec::new(),
            starts: Vec::new(),
            top,
        }
    }

    pub fn rules(&self) -> &[ForestRule] {
        &self.rules
    }

    pub fn starts(&self) -> &[DecoratedSymbol] {
        &self.starts
    }

    /// Grammar top category, used to validate constrained trees.
    pub fn top(&self) -> Option<&Term> {
        self.top.as_ref()
    }

    pub fn has_constraints(&self) -> bool {
        self.rules.iter().any(|r| r.constraint.is_some())
    }

    pub fn push(&mut self, rule: ForestRule) -> Result<(), ForestError> {
        rule.check()?;
        self.rules.push(rule);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, rule: ForestRule) {
        self.rules.push(rule);
    }

    pub fn add_start(&mut self, s: DecoratedSymbol) {
        if !self.starts.contains(&s) {
            self.starts.push(s);
        }
    }

    /// Caller guarantees `s` is not a start yet.
    pub(crate) fn add_start_unchecked(&mut self, s: DecoratedSymbol) {
        self.starts.push(s);
    }

    /// Rules as a set, for order-insensitive comparison.
    pub fn rule_set(&self) -> BTreeSet<String> {
        self.rules.iter().map(ToString::to_string).collect()
    }

    pub(crate) fn build_cfg(&self) -> Cfg {
        let mut b = CfgBuilder::<&DecoratedSymbol>::new();
        for s in &self.starts {
            let id = b.nonterminal(s);
            b.start(id);
        }
        for r in &self.rules {
            let lhs = b.nonterminal(&r.lhs);
            let rhs = match &r.rhs {
                ForestRhs::Terminal(t) => vec![Sym::T(b.terminal(t))],
                ForestRhs::Symbols(syms) => syms.iter().map(|s| Sym::N(b.nonterminal(s))).collect(),
            };
            b.rule(lhs, rhs);
        }
        b.finish()
    }

    pub(crate) fn filtered(&self, keep: &[bool]) -> ForestGrammar {
        let rules: Vec<ForestRule> = self
            .rules
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(r, _)| r.clone())
            .collect();
        let starts = self
            .starts
            .iter()
            .filter(|s| rules.iter().any(|r| &r.lhs == *s))
            .cloned()
            .collect();
        ForestGrammar {
            rules,
            starts,
            top: self.top.clone(),
        }
    }

    /// True iff no start symbol is productive. Constraints are ignored.
    pub fn is_empty(&self) -> bool {
        let cfg = self.build_cfg();
        let productive = cfg.productive();
        !cfg.starts.iter().any(|&s| productive[s])
    }

    /// Up to `limit` trees by increasing node count, ties by rule order.
    /// Trees over constrained rules that fail validation are skipped.
    pub fn extract_trees(&self, limit: usize, depth_bound: Option<usize>) -> Vec<ParseTree> {
        let mut q = TreeQuery::new(limit);
        q.max_depth = depth_bound;
        self.extract(&q).trees
    }

    pub fn extract(&self, query: &TreeQuery) -> Extraction {
        self.extract_with(&Enumerator::new(self), query)
    }

    fn extract_with(&self, en: &Enumerator<'_>, query: &TreeQuery) -> Extraction {
        let mut trees = Vec::new();
        if query.limit == 0 || en.starts.is_empty() {
            return Extraction {
                trees,
                exhaustive: en.starts.is_empty(),
            };
        }
        let (cap, structural) = en.size_cap(query);
        let bounds = Bounds {
            depth: query.max_depth,
            frontier: query.max_frontier.unwrap_or(usize::MAX),
        };
        for n in 1..=cap {
            let flow = en.each_tree(Some(n), bounds, &mut |t| {
                trees.push(t);
                if trees.len() >= query.limit {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if flow.is_break() {
                return Extraction {
                    trees,
                    exhaustive: false,
                };
            }
        }
        Extraction {
            trees,
            exhaustive: structural && !en.ran_out.get(),
        }
    }

    /// Looks for one valid tree. Decides the question whenever the tree
    /// inventory is finite (the useful part of the forest is acyclic) or the
    /// forest carries no constraints.
    pub fn find_valid_tree(&self) -> Witness {
        let en = Enumerator::new(self);
        if en.starts.is_empty() {
            return Witness::NoneExists;
        }
        if !self.has_constraints() {
            // productive starts always carry a tree
            let ex = self.extract_with(&en, &TreeQuery::new(1));
            return match ex.trees.into_iter().next() {
                Some(t) => Witness::Found(t),
                None => Witness::NoneExists,
            };
        }
        en.steps_left.set(WITNESS_STEP_BUDGET);
        let ex = self.extract_with(&en, &TreeQuery::new(1));
        match ex.trees.into_iter().next() {
            Some(t) => Witness::Found(t),
            None if ex.exhaustive => Witness::NoneExists,
            None => Witness::Unknown,
        }
    }

    /// Frontiers of length at most `k` of valid trees.
    pub fn enumerate_strings(&self, k: usize) -> BTreeSet<Vec<String>> {
        if !self.has_constraints() {
            return self.build_cfg().language_upto(k);
        }
        let en = Enumerator::new(self);
        let mut out = BTreeSet::new();
        if en.starts.is_empty() {
            return out;
        }
        let depth = en.frontier_depth_bound(k);
        let bounds = Bounds {
            depth: Some(depth),
            frontier: k,
        };
        let _ = en.each_tree(None, bounds, &mut |t| {
            out.insert(t.frontier());
            ControlFlow::Continue(())
        });
        out
    }
}

impl fmt::Display for ForestGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(top) = &self.top {
            if self.has_constraints() {
                writeln!(f, "top {top}")?;
            }
        }
        for s in &self.starts {
            writeln!(f, "start {s}")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn read_symbol(r: &mut Reader<'_>, marked: bool) -> Result<DecoratedSymbol, SyntaxError> {
    r.expect("p(")?;
    let base = if marked {
        if r.eat("+") {
            SymbolBase::Category(r.term()?)
        } else if r.eat("-") {
            SymbolBase::Terminal(r.atom_name()?)
        } else {
            return Err(r.error("expected `+` or `-` marker"));
        }
    } else {
        SymbolBase::Category(r.term()?)
    };
    r.expect(",")?;
    let from = StateId::new(r.atom_name()?);
    r.expect(",")?;
    let to = StateId::new(r.atom_name()?);
    r.expect(")")?;
    Ok(DecoratedSymbol { base, from, to })
}

fn read_forest_rule(r: &mut Reader<'_>) -> Result<ForestRule, ForestError> {
    let mut lhs = read_symbol(r, false)?;
    r.expect("->")?;
    let rhs = if r.at_end() || r.peek() == Some('{') || r.eat_lookahead_symbol() {
        let mut syms = Vec::new();
        while !r.at_end() && r.peek() != Some('{') {
            syms.push(read_symbol(r, true)?);
        }
        ForestRhs::Symbols(syms)
    } else {
        let t = r.atom_name()?;
        match &lhs.base {
            SymbolBase::Category(c) if c.atom_name() == Some(t.as_str()) => {
                lhs.base = SymbolBase::Terminal(t.clone());
            }
            _ => return Err(r.error("terminal rule must repeat its terminal").into()),
        }
        ForestRhs::Terminal(t)
    };
    let constraint = if r.eat("{") {
        let index = r.word_until(':')?;
        let rule_index = index
            .parse::<usize>()
            .map_err(|_| r.error(format!("bad rule index `{index}`")))?;
        r.expect(":")?;
        let rule = read_rule(r)?;
        r.expect("}")?;
        Some(Constraint { rule_index, rule })
    } else {
        None
    };
    r.end()?;
    ForestRule::new(lhs, rhs, constraint)
}

impl FromStr for ForestGrammar {
    type Err = ForestError;

    fn from_str(text: &str) -> Result<ForestGrammar, ForestError> {
        let mut forest = ForestGrammar::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut r = Reader::new(line, n + 1);
            if r.at_end() {
                continue;
            }
            if r.eat("top ") {
                forest.top = Some(r.term()?);
                r.end()?;
            } else if r.eat("start ") {
                let s = read_symbol(&mut r, false)?;
                r.end()?;
                forest.add_start(s);
            } else {
                let rule = read_forest_rule(&mut r)?;
                forest.rules.push(rule);
            }
        }
        Ok(forest)
    }
}

impl<'a> Reader<'a> {
    /// True if a marked symbol `p(+` / `p(-` follows.
    fn eat_lookahead_symbol(&mut self) -> bool {
        self.skip_ws();
        let rest = self.rest();
        let rest = rest.strip_prefix("p(").map(str::trim_start);
        matches!(rest, Some(r) if r.starts_with('+') || r.starts_with('-'))
    }

    fn word_until(&mut self, stop: char) -> Result<&'a str, SyntaxError> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest.find(stop).ok_or_else(|| self.error(format!("expected `{stop}`")))?;
        let word = rest[..end].trim();
        self.advance(end);
        Ok(word)
    }
}

#[derive(Clone, Copy, Debug)]
struct Bounds {
    depth: Option<usize>,
    frontier: usize,
}

type Found<'a> = dyn FnMut(ParseTree) -> ControlFlow<()> + 'a;
type Cont<'a> = dyn FnMut(ParseTree, usize, &Substitution) -> ControlFlow<()> + 'a;
type SeqCont<'a> = dyn FnMut(&[ParseTree], usize, &Substitution) -> ControlFlow<()> + 'a;

/// Tree generator over the useful (productive, reachable) part of a forest.
struct Enumerator<'f> {
    forest: &'f ForestGrammar,
    symbols: Vec<&'f DecoratedSymbol>,
    by_lhs: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    min_size: Vec<usize>,
    min_frontier: Vec<usize>,
    starts: Vec<usize>,
    constrained: bool,
    fresh: Cell<u64>,
    steps_left: Cell<usize>,
    ran_out: Cell<bool>,
}

impl<'f> Enumerator<'f> {
    fn new(forest: &'f ForestGrammar) -> Self {
        let mut ids: FxHashMap<&DecoratedSymbol, usize> = FxHashMap::default();
        let mut symbols: Vec<&DecoratedSymbol> = Vec::new();
        let mut id = |s: &'f DecoratedSymbol, symbols: &mut Vec<&'f DecoratedSymbol>| {
            *ids.entry(s).or_insert_with(|| {
                symbols.push(s);
                symbols.len() - 1
            })
        };
        let starts_all: Vec<usize> = forest.starts.iter().map(|s| id(s, &mut symbols)).collect();
        let mut rule_lhs = Vec::new();
        let mut children = Vec::new();
        for r in &forest.rules {
            rule_lhs.push(id(&r.lhs, &mut symbols));
            children.push(r.children().iter().map(|s| id(s, &mut symbols)).collect::<Vec<_>>());
        }
        let n = symbols.len();

        // min sizes and frontiers by fixpoint; usize::MAX marks unproductive
        let mut min_size = vec![usize::MAX; n];
        let mut min_frontier = vec![usize::MAX; n];
        let mut changed = true;
        while changed {
            changed = false;
            for (ri, r) in forest.rules.iter().enumerate() {
                let (size, front) = match r.rhs {
                    ForestRhs::Terminal(_) => (1, 1),
                    ForestRhs::Symbols(_) => {
                        let mut size = 1usize;
                        let mut front = 0usize;
                        let mut ok = true;
                        for &c in &children[ri] {
                            if min_size[c] == usize::MAX {
                                ok = false;
                                break;
                            }
                            size = size.saturating_add(min_size[c]);
                            front = front.saturating_add(min_frontier[c]);
                        }
                        if !ok {
                            continue;
                        }
                        (size, front)
                    }
                };
                let l = rule_lhs[ri];
                if size < min_size[l] {
                    min_size[l] = size;
                    changed = true;
                }
                if front < min_frontier[l] {
                    min_frontier[l] = front;
                    changed = true;
                }
            }
        }

        // reachable through productive rules
        let productive_rule = |ri: usize| children[ri].iter().all(|&c| min_size[c] != usize::MAX);
        let mut by_lhs_all: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ri, &l) in rule_lhs.iter().enumerate() {
            if min_size[l] != usize::MAX && productive_rule(ri) {
                by_lhs_all[l].push(ri);
            }
        }
        let starts: Vec<usize> = starts_all
            .into_iter()
            .filter(|&s| min_size[s] != usize::MAX)
            .collect();
        let mut reachable = vec![false; n];
        let mut stack = starts.clone();
        for &s in &starts {
            reachable[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &ri in &by_lhs_all[s] {
                for &c in &children[ri] {
                    if !reachable[c] {
                        reachable[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        let by_lhs = by_lhs_all
            .into_iter()
            .enumerate()
            .map(|(s, rules)| if reachable[s] { rules } else { Vec::new() })
            .collect();

        Enumerator {
            forest,
            symbols,
            by_lhs,
            children,
            min_size,
            min_frontier,
            starts,
            constrained: forest.has_constraints(),
            fresh: Cell::new(0),
            steps_left: Cell::new(usize::MAX),
            ran_out: Cell::new(false),
        }
    }

    fn successors(&self, s: usize, non_consuming_only: bool) -> Vec<usize> {
        let mut out = Vec::new();
        for &ri in &self.by_lhs[s] {
            let ch = &self.children[ri];
            for (i, &c) in ch.iter().enumerate() {
                if non_consuming_only
                    && ch
                        .iter()
                        .enumerate()
                        .any(|(j, &o)| j != i && self.min_frontier[o] > 0)
                {
                    continue;
                }
                out.push(c);
            }
        }
        out
    }

    /// Longest path (in nodes) from a start over the chosen edges, or
    /// `None` when a cycle is reachable.
    fn longest_path(&self, non_consuming_only: bool) -> Option<usize> {
        let n = self.symbols.len();
        // 0 = unvisited, 1 = active, 2 = done
        let mut state = vec![0u8; n];
        let mut longest = vec![0usize; n];
        fn visit(
            en: &Enumerator<'_>,
            s: usize,
            nc: bool,
            state: &mut [u8],
            longest: &mut [usize],
        ) -> bool {
            state[s] = 1;
            let mut best = 0;
            for c in en.successors(s, nc) {
                let seen = state[c];
                if seen == 1 || (seen == 0 && !visit(en, c, nc, state, longest)) {
                    return false;
                }
                best = best.max(longest[c]);
            }
            longest[s] = best + 1;
            state[s] = 2;
            true
        }
        let mut overall = 0;
        for &s in &self.starts {
            if state[s] == 0 && !visit(self, s, non_consuming_only, &mut state, &mut longest) {
                return None;
            }
            overall = overall.max(longest[s]);
        }
        Some(overall)
    }

    /// Depth bound that covers every tree with frontier at most `k`, when
    /// every cycle of the forest consumes input.
    fn frontier_depth_bound(&self, k: usize) -> usize {
        match self.longest_path(true) {
            Some(l) => (k + 2) * l.max(1),
            None => 8 * (k + 2),
        }
    }

    /// Largest tree size to enumerate, and whether that bound covers every
    /// tree within the query.
    fn size_cap(&self, q: &TreeQuery) -> (usize, bool) {
        if let Some(s) = q.max_size {
            return (s, true);
        }
        let structural = match q.max_depth {
            Some(d) => Some(self.max_size_by_depth(d)),
            None => self.max_size_acyclic(),
        };
        match structural {
            Some(s) => (s, true),
            None => {
                let min_start = self.starts.iter().map(|&s| self.min_size[s]).min().unwrap_or(0);
                (DEFAULT_MAX_TREE_SIZE.max(min_start), false)
            }
        }
    }

    fn max_size_acyclic(&self) -> Option<usize> {
        self.longest_path(false)?;
        // DAG: recursion terminates
        let mut memo: HashMap<usize, usize> = HashMap::new();
        fn go(en: &Enumerator<'_>, s: usize, memo: &mut HashMap<usize, usize>) -> usize {
            if let Some(&v) = memo.get(&s) {
                return v;
            }
            let v = en.by_lhs[s]
                .iter()
                .map(|&ri| {
                    en.children[ri]
                        .iter()
                        .fold(1usize, |acc, &c| acc.saturating_add(go(en, c, memo)))
                })
                .max()
                .unwrap_or(0);
            memo.insert(s, v);
            v
        }
        Some(self.starts.iter().map(|&s| go(self, s, &mut memo)).max().unwrap_or(0))
    }

    fn max_size_by_depth(&self, depth: usize) -> usize {
        let n = self.symbols.len();
        // best[s] = largest tree of depth <= d rooted at s (0 = none)
        let mut best = vec![0usize; n];
        for _ in 0..depth {
            let mut next = vec![0usize; n];
            for (s, rules) in self.by_lhs.iter().enumerate() {
                for &ri in rules {
                    let ch = &self.children[ri];
                    if ch.iter().any(|&c| best[c] == 0) {
                        continue;
                    }
                    let size = ch.iter().fold(1usize, |acc, &c| acc.saturating_add(best[c]));
                    next[s] = next[s].max(size);
                }
            }
            if next == best {
                break;
            }
            best = next;
        }
        self.starts.iter().map(|&s| best[s]).max().unwrap_or(0)
    }

    fn fresh_suffix(&self) -> u64 {
        let v = self.fresh.get();
        self.fresh.set(v + 1);
        v
    }

    /// Renames a grammar rule apart from everything seen so far.
    fn rename_rule(&self, rule: &Rule) -> Rule {
        let tag = self.fresh_suffix();
        let rename = |t: &Term| t.map_vars(&mut |v| Term::var(format!("{v}_T{tag}")));
        Rule {
            lhs: rename(&rule.lhs),
            rhs: rule
                .rhs
                .iter()
                .map(|item| match item {
                    RhsItem::Terminal(t) => RhsItem::Terminal(t.clone()),
                    RhsItem::Nonterminal(c) => RhsItem::Nonterminal(rename(c)),
                })
                .collect(),
        }
    }

    /// Every valid tree rooted at a start symbol; exactly `size` nodes when
    /// given.
    fn each_tree(&self, size: Option<usize>, bounds: Bounds, found: &mut Found<'_>) -> ControlFlow<()> {
        for &s in &self.starts {
            let root_value = if self.constrained {
                self.forest.top.as_ref().map(|t| {
                    let tag = self.fresh_suffix();
                    t.map_vars(&mut |v| Term::var(format!("{v}_T{tag}")))
                })
            } else {
                None
            };
            self.node(s, size, bounds.depth, bounds.frontier, root_value.as_ref(), &Substitution::new(), &mut |t, _, _| {
                found(t)
            })?;
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn node(
        &self,
        sym: usize,
        size: Option<usize>,
        depth: Option<usize>,
        frontier: usize,
        value: Option<&Term>,
        s: &Substitution,
        k: &mut Cont<'_>,
    ) -> ControlFlow<()> {
        if depth == Some(0) || self.min_frontier[sym] > frontier {
            return ControlFlow::Continue(());
        }
        match self.steps_left.get() {
            0 => {
                self.ran_out.set(true);
                return ControlFlow::Break(());
            }
            n => self.steps_left.set(n - 1),
        }
        if size.is_some_and(|n| n < self.min_size[sym]) {
            return ControlFlow::Continue(());
        }
        for &ri in &self.by_lhs[sym] {
            let rule = &self.forest.rules[ri];
            let symbol = self.symbols[sym];
            if let ForestRhs::Terminal(_) = rule.rhs {
                if size.is_none_or(|n| n == 1) {
                    let tree = ParseTree {
                        symbol: symbol.clone(),
                        rule: ri,
                        children: Vec::new(),
                    };
                    k(tree, 1, s)?;
                }
                continue;
            }
            let child_ids = &self.children[ri];
            let mut s1 = s.clone();
            let mut values: Vec<Option<Term>> = vec![None; child_ids.len()];
            if let Some(c) = &rule.constraint {
                if c.rule.rhs.len() != child_ids.len() {
                    continue;
                }
                let inst = self.rename_rule(&c.rule);
                if let Some(v) = value {
                    match unify(v, &inst.lhs, &s1) {
                        Some(next) => s1 = next,
                        None => continue,
                    }
                }
                let mut consistent = true;
                for (i, item) in inst.rhs.into_iter().enumerate() {
                    let child = &self.symbols[child_ids[i]].base;
                    match (item, child) {
                        (RhsItem::Terminal(t), SymbolBase::Terminal(u)) if &t == u => {}
                        (RhsItem::Nonterminal(c), SymbolBase::Category(_)) => values[i] = Some(c),
                        _ => {
                            consistent = false;
                            break;
                        }
                    }
                }
                if !consistent {
                    continue;
                }
            }
            let remaining = size.map(|n| n - 1);
            let child_depth = depth.map(|d| d - 1);
            self.seq(
                child_ids,
                &values,
                0,
                remaining,
                child_depth,
                frontier,
                &mut Vec::new(),
                0,
                &s1,
                &mut |kids, used, s2| {
                    let tree = ParseTree {
                        symbol: symbol.clone(),
                        rule: ri,
                        children: kids.to_vec(),
                    };
                    k(tree, used, s2)
                },
            )?;
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn seq(
        &self,
        ids: &[usize],
        values: &[Option<Term>],
        i: usize,
        remaining: Option<usize>,
        depth: Option<usize>,
        frontier: usize,
        acc: &mut Vec<ParseTree>,
        used: usize,
        s: &Substitution,
        k: &mut SeqCont<'_>,
    ) -> ControlFlow<()> {
        if i == ids.len() {
            if remaining.is_none_or(|r| r == 0) {
                return k(acc, used, s);
            }
            return ControlFlow::Continue(());
        }
        let child = ids[i];
        let rest_size: usize = ids[i + 1..]
            .iter()
            .fold(0usize, |a, &c| a.saturating_add(self.min_size[c]));
        let rest_front: usize = ids[i + 1..]
            .iter()
            .fold(0usize, |a, &c| a.saturating_add(self.min_frontier[c]));
        let budget = frontier.saturating_sub(used).saturating_sub(rest_front);
        if frontier != usize::MAX && used.saturating_add(rest_front) > frontier {
            return ControlFlow::Continue(());
        }
        let budget = if frontier == usize::MAX { usize::MAX } else { budget };
        let sizes: Vec<Option<usize>> = match remaining {
            None => vec![None],
            Some(r) => {
                if r < rest_size.saturating_add(self.min_size[child]) {
                    return ControlFlow::Continue(());
                }
                if i + 1 == ids.len() {
                    vec![Some(r)]
                } else {
                    (self.min_size[child]..=r - rest_size).map(Some).collect()
                }
            }
        };
        for cs in sizes {
            self.node(child, cs, depth, budget, values[i].as_ref(), s, &mut |tree, f, s2| {
                acc.push(tree);
                let flow = self.seq(
                    ids,
                    values,
                    i + 1,
                    remaining.map(|r| r - cs.unwrap_or(0)),
                    depth,
                    frontier,
                    acc,
                    used + f,
                    s2,
                    k,
                );
                acc.pop();
                flow
            })?;
        }
        ControlFlow::Continue(())
    }
}
