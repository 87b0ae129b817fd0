//! Tabled top-down parsing over automaton states.
//!
//! The engine is Earley deduction: a goal is a category together with the
//! state where it starts, goals that are variants of each other share one
//! table entry, and every completed rule instance is recorded as a forest
//! rule. For context-free grammars the table is finite and the result is the
//! exact intersection. For definite clause grammars emptiness of the
//! intersection is undecidable, so a [`Strategy`] chooses what to give up.

use std::cell::{Cell, RefCell};
use std::collections::VecDeque;
use std::rc::Rc;
use std::fmt;
use std::ops::ControlFlow;

use indexmap::{IndexMap, IndexSet};
use rustc_hash::FxBuildHasher;

type FxIndexMap<K, V> = IndexMap<K, V, FxBuildHasher>;
type FxIndexSet<T> = IndexSet<T, FxBuildHasher>;
use thiserror::Error;

use crate::barhillel::DecoratedSymbol;
use crate::forest::{Constraint, ForestGrammar, ForestRhs, ForestRule, ParseTree, Witness};
use crate::fsa::{Fsa, StateId};
use crate::grammar::{Grammar, RhsItem, Rule};
use crate::terms::{unify, FreshVars, Substitution, Term};

/// Goals are generalized below this depth before they are tabled, so that
/// left-recursive rules with growing arguments still yield finitely many
/// goals. Answers are unified with the actual call, so this costs no
/// soundness.
pub const RESTRICTION_DEPTH: usize = 8;

/// Items processed or queued before a run is abandoned as inconclusive.
pub const STEP_BUDGET: usize = 1_000_000;

/// Total size (in term nodes) of tabled answers before a run is abandoned
/// as inconclusive. Bounds memory when answers keep growing.
pub const ANSWER_SIZE_BUDGET: usize = 4_000_000;

/// Trees collected by the unrestricted strategy once a proof is found.
const PROOF_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    /// Exact intersection for context-free grammars.
    CfgExact,
    /// Depth-first search with iterative deepening up to `depth` rule
    /// applications along a branch.
    Unrestricted { depth: usize },
    /// Tabled parse; the automaton must be acyclic.
    AcyclicOnly,
    /// Tabled parse abandoning every partial result whose transition weight
    /// product drops below `tau`.
    Threshold { tau: f64 },
    /// Exact intersection of the context-free skeleton, with the grammar's
    /// rules attached as constraints.
    Skeleton,
}

impl Strategy {
    pub fn validate(&self) -> Result<(), ParseError> {
        match *self {
            Strategy::Threshold { tau } if !(tau > 0.0 && tau < 1.0) => {
                Err(ParseError::BadThreshold(tau))
            }
            Strategy::Unrestricted { depth: 0 } => Err(ParseError::BadDepth),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::CfgExact => "cfg",
            Strategy::Unrestricted { .. } => "unrestricted",
            Strategy::AcyclicOnly => "acyclic",
            Strategy::Threshold { .. } => "threshold",
            Strategy::Skeleton => "skeleton",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Unrestricted { depth } => write!(f, "unrestricted(depth {depth})"),
            Strategy::Threshold { tau } => write!(f, "threshold({tau})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("grammar is not context-free (category `{0}`); use a definite clause grammar strategy")]
    NotContextFree(String),
    #[error("the cfg strategy applies to context-free grammars only; choose a definite clause grammar strategy")]
    CfgStrategy,
    #[error("input automaton is cyclic: {}", format_cycle(.0))]
    CyclicAutomaton(Vec<StateId>),
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    BadThreshold(f64),
    #[error("depth bound must be at least 1")]
    BadDepth,
    #[error("the threshold strategy needs every cycle to weigh less than 1; this one does not: {}", format_cycle(.0))]
    UnweightedCycle(Vec<StateId>),
}

fn format_cycle(cycle: &[StateId]) -> String {
    cycle
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Clone, Debug, PartialEq)]
pub enum DcgOutcome {
    Forest(ForestGrammar),
    /// The strategy ran out of budget before it could finish. `partial`
    /// holds the rules emitted so far; each of them is sound.
    Unknown { partial: ForestGrammar },
}

impl DcgOutcome {
    pub fn forest(&self) -> &ForestGrammar {
        match self {
            DcgOutcome::Forest(f) | DcgOutcome::Unknown { partial: f } => f,
        }
    }

    pub fn into_forest(self) -> ForestGrammar {
        match self {
            DcgOutcome::Forest(f) | DcgOutcome::Unknown { partial: f } => f,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Carries a constraint-valid witness tree.
    NonEmpty(ParseTree),
    Empty,
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::NonEmpty(_) => "non-empty",
            Verdict::Empty => "empty",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Table entries (distinct goal variants per state).
    pub goals: usize,
    pub answers: usize,
    /// Items processed.
    pub items: usize,
    /// Some branch was abandoned by the threshold or depth bound.
    pub pruned: bool,
    /// The step budget ran out.
    pub exhausted: bool,
}

impl Stats {
    fn complete(&self) -> bool {
        !self.pruned && !self.exhausted
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub outcome: DcgOutcome,
    pub verdict: Verdict,
    pub stats: Stats,
}

/// Exact intersection of a context-free grammar with an automaton.
pub fn intersect_cfg(g: &Grammar, m: &Fsa) -> Result<ForestGrammar, ParseError> {
    Ok(intersect_cfg_stats(g, m)?.0)
}

/// [`intersect_cfg`] plus table statistics.
pub fn intersect_cfg_stats(g: &Grammar, m: &Fsa) -> Result<(ForestGrammar, Stats), ParseError> {
    if let Some(c) = g.categories().find(|c| !c.is_atom()) {
        return Err(ParseError::NotContextFree(c.to_string()));
    }
    let mut engine = Engine::new(g, m, None, false, usize::MAX);
    engine.run();
    Ok((engine.forest(None), engine.stats))
}

pub fn intersect_dcg(g: &Grammar, m: &Fsa, strat: Strategy) -> Result<DcgOutcome, ParseError> {
    Ok(run_dcg(g, m, strat)?.0)
}

fn run_dcg(g: &Grammar, m: &Fsa, strat: Strategy) -> Result<(DcgOutcome, Stats), ParseError> {
    strat.validate()?;
    let wrap = |forest: ForestGrammar, stats: Stats| {
        if stats.exhausted {
            (DcgOutcome::Unknown { partial: forest }, stats)
        } else {
            (DcgOutcome::Forest(forest), stats)
        }
    };
    match strat {
        Strategy::CfgExact => Err(ParseError::CfgStrategy),
        Strategy::AcyclicOnly => {
            if let Some(cycle) = m.find_cycle() {
                return Err(ParseError::CyclicAutomaton(cycle));
            }
            let mut engine = Engine::new(g, m, None, false, STEP_BUDGET);
            engine.run();
            Ok(wrap(engine.forest(None), engine.stats))
        }
        Strategy::Threshold { tau } => {
            if let Some(cycle) = m.find_unweighted_cycle() {
                return Err(ParseError::UnweightedCycle(cycle));
            }
            let mut engine = Engine::new(g, m, Some(tau), false, STEP_BUDGET);
            engine.run();
            Ok(wrap(engine.forest(None), engine.stats))
        }
        Strategy::Skeleton => {
            let sk = g.cf_skeleton();
            let mut engine = Engine::new(&sk.grammar, m, None, true, usize::MAX);
            engine.run();
            let constraints: Vec<Constraint> = sk
                .origin
                .iter()
                .map(|&i| Constraint {
                    rule_index: i,
                    rule: g.rules[i].clone(),
                })
                .collect();
            Ok(wrap(engine.forest(Some((&g.top, &constraints))), engine.stats))
        }
        Strategy::Unrestricted { depth } => {
            let (forest, stats, found) = prove_deepening(g, m, depth);
            if !found && stats.pruned {
                Ok((DcgOutcome::Unknown { partial: forest }, stats))
            } else {
                Ok(wrap(forest, stats))
            }
        }
    }
}

/// Intersects and decides emptiness as far as the strategy allows.
///
/// `Empty` is only claimed when the search was exhaustive for the instance.
/// For a definite clause grammar on a cyclic automaton that additionally
/// requires the skeleton forest to have a finite tree inventory without a
/// valid tree.
pub fn analyze(g: &Grammar, m: &Fsa, strat: Strategy) -> Result<Analysis, ParseError> {
    if strat == Strategy::CfgExact {
        let (forest, stats) = intersect_cfg_stats(g, m)?;
        let verdict = match forest.find_valid_tree() {
            Witness::Found(t) => Verdict::NonEmpty(t),
            _ => Verdict::Empty,
        };
        return Ok(Analysis {
            outcome: DcgOutcome::Forest(forest),
            verdict,
            stats,
        });
    }
    let (outcome, stats) = run_dcg(g, m, strat)?;
    let witness = outcome.forest().find_valid_tree();
    let verdict = match witness {
        Witness::Found(t) => Verdict::NonEmpty(t),
        Witness::NoneExists | Witness::Unknown => {
            let complete = matches!(outcome, DcgOutcome::Forest(_));
            let mut empty = match strat {
                Strategy::Skeleton => witness == Witness::NoneExists,
                Strategy::AcyclicOnly => complete && g.offline_parsable(),
                Strategy::Threshold { .. } | Strategy::Unrestricted { .. } => {
                    complete && stats.complete()
                }
                Strategy::CfgExact => unreachable!("handled above"),
            };
            if empty && !g.is_context_free() && !m.is_acyclic() && strat != Strategy::Skeleton {
                empty = skeleton_rules_out(g, m);
            }
            if empty {
                Verdict::Empty
            } else {
                Verdict::Unknown
            }
        }
    };
    Ok(Analysis {
        outcome,
        verdict,
        stats,
    })
}

pub fn emptiness_verdict(g: &Grammar, m: &Fsa, strat: Strategy) -> Result<Verdict, ParseError> {
    Ok(analyze(g, m, strat)?.verdict)
}

fn skeleton_rules_out(g: &Grammar, m: &Fsa) -> bool {
    match run_dcg(g, m, Strategy::Skeleton) {
        Ok((outcome, _)) => outcome.forest().find_valid_tree() == Witness::NoneExists,
        Err(_) => false,
    }
}

/// Consistent renaming of a rule's variables.
fn rename_rule(rule: &Rule, fresh: &mut FreshVars) -> (Term, Vec<RhsItem>) {
    let cats: Vec<&Term> = rule.categories().collect();
    let mut renamed = fresh.rename_all(cats).into_iter();
    let lhs = renamed.next().expect("lhs is a category");
    let rhs = rule
        .rhs
        .iter()
        .map(|item| match item {
            RhsItem::Terminal(t) => RhsItem::Terminal(t.clone()),
            RhsItem::Nonterminal(_) => RhsItem::Nonterminal(renamed.next().expect("one per item")),
        })
        .collect();
    (lhs, rhs)
}

fn apply_items(s: &Substitution, items: &[RhsItem]) -> Vec<RhsItem> {
    items
        .iter()
        .map(|item| match item {
            RhsItem::Terminal(t) => RhsItem::Terminal(t.clone()),
            RhsItem::Nonterminal(c) => RhsItem::Nonterminal(s.apply(c)),
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Item {
    goal: usize,
    rule: usize,
    lhs: Term,
    rest: Vec<RhsItem>,
    children: Vec<DecoratedSymbol>,
    state: usize,
    weight: f64,
}

#[derive(Debug)]
struct Goal {
    state: usize,
    answers: FxIndexMap<(Term, usize), f64>,
    consumers: Vec<Rc<Item>>,
}

struct Engine<'a> {
    grammar: &'a Grammar,
    fsa: &'a Fsa,
    tau: Option<f64>,
    keep_rule_index: bool,
    budget: usize,
    fresh: FreshVars,
    answer_size: usize,
    goals: FxIndexMap<(Term, usize), Goal>,
    agenda: VecDeque<Item>,
    rules: FxIndexSet<(DecoratedSymbol, ForestRhs, Option<usize>)>,
    stats: Stats,
}

impl<'a> Engine<'a> {
    fn new(
        grammar: &'a Grammar,
        fsa: &'a Fsa,
        tau: Option<f64>,
        keep_rule_index: bool,
        budget: usize,
    ) -> Self {
        Engine {
            grammar,
            fsa,
            tau,
            keep_rule_index,
            budget,
            fresh: FreshVars::new(),
            answer_size: 0,
            goals: FxIndexMap::default(),
            agenda: VecDeque::new(),
            rules: FxIndexSet::default(),
            stats: Stats::default(),
        }
    }

    fn run(&mut self) {
        let top = self.grammar.top.clone();
        for qs in self.fsa.starts().collect::<Vec<_>>() {
            self.call(&top, qs);
        }
        while let Some(item) = self.agenda.pop_front() {
            // queued items count too: they hold most of the memory
            if self.stats.items + self.agenda.len() >= self.budget
                || self.answer_size >= ANSWER_SIZE_BUDGET
            {
                self.stats.exhausted = true;
                break;
            }
            self.stats.items += 1;
            self.process(item);
        }
        self.stats.goals = self.goals.len();
        self.stats.answers = self.goals.values().map(|g| g.answers.len()).sum();
    }

    fn below_threshold(&mut self, w: f64) -> bool {
        match self.tau {
            Some(tau) if w < tau => {
                self.stats.pruned = true;
                true
            }
            _ => false,
        }
    }

    /// Table key for calling `cat` at `state`; creates the entry on first
    /// call.
    fn call(&mut self, cat: &Term, state: usize) -> usize {
        let key = (cat.restrict(RESTRICTION_DEPTH, &mut self.fresh).canonical(), state);
        if let Some(i) = self.goals.get_index_of(&key) {
            return i;
        }
        let call = key.0.clone();
        let (index, _) = self.goals.insert_full(
            key,
            Goal {
                state,
                answers: FxIndexMap::default(),
                consumers: Vec::new(),
            },
        );
        for (ri, rule) in self.grammar.rules.iter().enumerate() {
            let (lhs, rhs) = rename_rule(rule, &mut self.fresh);
            if let Some(s) = unify(&call, &lhs, &Substitution::new()) {
                self.agenda.push_back(Item {
                    goal: index,
                    rule: ri,
                    lhs: s.apply(&lhs),
                    rest: apply_items(&s, &rhs),
                    children: Vec::new(),
                    state,
                    weight: 1.0,
                });
            }
        }
        index
    }

    fn process(&mut self, item: Item) {
        if item.rest.is_empty() {
            self.complete(item);
            return;
        }
        match item.rest[0].clone() {
            RhsItem::Terminal(t) => {
                let moves: Vec<(usize, f64)> = self.fsa.step(item.state, &t).collect();
                for (to, w) in moves {
                    let weight = item.weight * w;
                    if self.below_threshold(weight) {
                        continue;
                    }
                    let from = self.fsa.state(item.state).clone();
                    let to_id = self.fsa.state(to).clone();
                    let sym = DecoratedSymbol::terminal(t.clone(), from, to_id);
                    self.rules
                        .insert((sym.clone(), ForestRhs::Terminal(t.clone()), None));
                    let mut next = item.clone();
                    next.rest.remove(0);
                    next.children.push(sym);
                    next.state = to;
                    next.weight = weight;
                    self.agenda.push_back(next);
                }
            }
            RhsItem::Nonterminal(c) => {
                let g = self.call(&c, item.state);
                let item = Rc::new(item);
                self.goals[g].consumers.push(Rc::clone(&item));
                for i in 0..self.goals[g].answers.len() {
                    let ((answer, to), &w) = self.goals[g].answers.get_index(i).expect("in range");
                    let (answer, to) = (answer.clone(), *to);
                    self.resume(&item, &answer, to, w);
                }
            }
        }
    }

    fn complete(&mut self, item: Item) {
        let answer = item.lhs.canonical();
        let goal = &self.goals[item.goal];
        let from = self.fsa.state(goal.state).clone();
        let lhs = DecoratedSymbol::category(answer.clone(), from, self.fsa.state(item.state).clone());
        let index = self.keep_rule_index.then_some(item.rule);
        self.rules
            .insert((lhs, ForestRhs::Symbols(item.children), index));
        let key = (answer, item.state);
        let goal = &mut self.goals[item.goal];
        let new = match goal.answers.get(&key) {
            Some(&w) if w >= item.weight => return,
            known => known.is_none(),
        };
        goal.answers.insert(key.clone(), item.weight);
        if new {
            self.answer_size += key.0.size();
        }
        for i in 0..self.goals[item.goal].consumers.len() {
            let c = Rc::clone(&self.goals[item.goal].consumers[i]);
            self.resume(&c, &key.0, key.1, item.weight);
        }
    }

    fn resume(&mut self, item: &Item, answer: &Term, to: usize, w: f64) {
        let RhsItem::Nonterminal(call) = &item.rest[0] else {
            unreachable!("consumers wait on a nonterminal")
        };
        let weight = item.weight * w;
        if !call.could_unify(answer) || self.below_threshold(weight) {
            return;
        }
        let renamed = self.fresh.rename(answer);
        let Some(s) = unify(call, &renamed, &Substitution::new()) else {
            return;
        };
        let mut children = item.children.clone();
        children.push(DecoratedSymbol::category(
            answer.clone(),
            self.fsa.state(item.state).clone(),
            self.fsa.state(to).clone(),
        ));
        self.agenda.push_back(Item {
            goal: item.goal,
            rule: item.rule,
            lhs: s.apply(&item.lhs),
            rest: apply_items(&s, &item.rest[1..]),
            children,
            state: to,
            weight,
        });
    }

    /// Emitted rules in first-emission order. With `constraints`, each rule
    /// gets the constraint of the grammar rule it came from.
    fn forest(&self, constraints: Option<(&Term, &[Constraint])>) -> ForestGrammar {
        let mut forest = ForestGrammar::new(constraints.map(|(top, _)| top.clone()));
        for (lhs, rhs, index) in &self.rules {
            let constraint = match (constraints, index) {
                (Some((_, cs)), Some(i)) => Some(cs[*i].clone()),
                _ => None,
            };
            forest.push_unchecked(ForestRule::new_unchecked(lhs.clone(), rhs.clone(), constraint));
        }
        let top = self.grammar.top.restrict(RESTRICTION_DEPTH, &mut FreshVars::new()).canonical();
        for qs in self.fsa.starts() {
            if let Some(goal) = self.goals.get(&(top.clone(), qs)) {
                for (answer, to) in goal.answers.keys() {
                    if self.fsa.is_final(*to) {
                        // answers are distinct per goal and goals per start state
                        forest.add_start_unchecked(DecoratedSymbol::category(
                            answer.clone(),
                            self.fsa.state(qs).clone(),
                            self.fsa.state(*to).clone(),
                        ));
                    }
                }
            }
        }
        forest
    }
}

/// A derivation found by the unrestricted search, before its categories are
/// fully instantiated.
#[derive(Clone, Debug)]
struct Proof {
    cat: Term,
    from: usize,
    to: usize,
    children: Vec<ProofChild>,
}

#[derive(Clone, Debug)]
enum ProofChild {
    Terminal(String, usize, usize),
    Node(Proof),
}

type ProofCont<'a> = dyn FnMut(Proof, usize, &Substitution) -> ControlFlow<()> + 'a;
type ProofSeqCont<'a> = dyn FnMut(&[ProofChild], usize, &Substitution) -> ControlFlow<()> + 'a;

struct Prover<'a> {
    grammar: &'a Grammar,
    fsa: &'a Fsa,
    fresh: RefCell<FreshVars>,
    stats: Cell<Stats>,
}

impl Prover<'_> {
    fn update(&self, f: impl FnOnce(&mut Stats)) {
        let mut stats = self.stats.get();
        f(&mut stats);
        self.stats.set(stats);
    }

    fn prove(
        &self,
        goal: &Term,
        q: usize,
        budget: usize,
        s: &Substitution,
        k: &mut ProofCont<'_>,
    ) -> ControlFlow<()> {
        if budget == 0 {
            self.update(|st| st.pruned = true);
            return ControlFlow::Continue(());
        }
        for rule in &self.grammar.rules {
            self.update(|st| st.items += 1);
            if self.stats.get().items >= STEP_BUDGET {
                self.update(|st| st.exhausted = true);
                return ControlFlow::Break(());
            }
            let (lhs, rhs) = rename_rule(rule, &mut self.fresh.borrow_mut());
            let Some(s1) = unify(goal, &lhs, s) else { continue };
            self.prove_seq(&rhs, q, budget - 1, &s1, &mut Vec::new(), &mut |children, to, s2| {
                let proof = Proof {
                    cat: lhs.clone(),
                    from: q,
                    to,
                    children: children.to_vec(),
                };
                k(proof, to, s2)
            })?;
        }
        ControlFlow::Continue(())
    }

    fn prove_seq(
        &self,
        items: &[RhsItem],
        q: usize,
        budget: usize,
        s: &Substitution,
        acc: &mut Vec<ProofChild>,
        k: &mut ProofSeqCont<'_>,
    ) -> ControlFlow<()> {
        let Some((first, rest)) = items.split_first() else {
            return k(acc, q, s);
        };
        match first {
            RhsItem::Terminal(t) => {
                for (to, _) in self.fsa.step(q, t) {
                    acc.push(ProofChild::Terminal(t.clone(), q, to));
                    let flow = self.prove_seq(rest, to, budget, s, acc, k);
                    acc.pop();
                    flow?;
                }
                ControlFlow::Continue(())
            }
            RhsItem::Nonterminal(c) => self.prove(c, q, budget, s, &mut |node, to, s2| {
                acc.push(ProofChild::Node(node));
                let flow = self.prove_seq(rest, to, budget, s2, acc, k);
                acc.pop();
                flow
            }),
        }
    }
}

/// Iterative deepening up to `depth`; returns the forest of the proofs at
/// the first bound that has any, and whether one was found.
fn prove_deepening(g: &Grammar, m: &Fsa, depth: usize) -> (ForestGrammar, Stats, bool) {
    let prover = Prover {
        grammar: g,
        fsa: m,
        fresh: RefCell::new(FreshVars::new()),
        stats: Cell::new(Stats::default()),
    };
    let starts: Vec<usize> = m.starts().collect();
    for bound in 1..=depth {
        prover.update(|st| st.pruned = false);
        let mut proofs: Vec<(usize, Proof, Substitution)> = Vec::new();
        for &qs in &starts {
            let flow = prover.prove(&g.top, qs, bound, &Substitution::new(), &mut |p, to, s| {
                if m.is_final(to) {
                    proofs.push((qs, p, s.clone()));
                }
                if proofs.len() >= PROOF_LIMIT {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if flow.is_break() {
                break;
            }
        }
        if !proofs.is_empty() {
            return (proof_forest(m, &proofs), prover.stats.get(), true);
        }
        let stats = prover.stats.get();
        if stats.exhausted || !stats.pruned {
            break;
        }
    }
    (ForestGrammar::new(None), prover.stats.get(), false)
}

fn proof_forest(m: &Fsa, proofs: &[(usize, Proof, Substitution)]) -> ForestGrammar {
    let mut rules: IndexSet<ForestRule> = IndexSet::new();
    let mut forest = ForestGrammar::new(None);
    fn emit(m: &Fsa, p: &Proof, s: &Substitution, rules: &mut IndexSet<ForestRule>) -> DecoratedSymbol {
        let sym = DecoratedSymbol::category(
            s.apply(&p.cat).canonical(),
            m.state(p.from).clone(),
            m.state(p.to).clone(),
        );
        let children = p
            .children
            .iter()
            .map(|c| match c {
                ProofChild::Terminal(t, a, b) => {
                    let t_sym = DecoratedSymbol::terminal(t.clone(), m.state(*a).clone(), m.state(*b).clone());
                    rules.insert(ForestRule::new_unchecked(
                        t_sym.clone(),
                        ForestRhs::Terminal(t.clone()),
                        None,
                    ));
                    t_sym
                }
                ProofChild::Node(n) => emit(m, n, s, rules),
            })
            .collect();
        rules.insert(ForestRule::new_unchecked(sym.clone(), ForestRhs::Symbols(children), None));
        sym
    }
    let mut starts = Vec::new();
    for (_, p, s) in proofs {
        starts.push(emit(m, p, s, &mut rules));
    }
    for r in rules {
        forest.push_unchecked(r);
    }
    for s in starts {
        forest.add_start(s);
    }
    forest
}
