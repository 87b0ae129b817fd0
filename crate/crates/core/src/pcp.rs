//! Post correspondence instances, their encoding as a grammar/automaton
//! pair whose intersection is non-empty iff the instance has a solution,
//! and a bounded brute-force solver.
//!
//! Each pair `(v_i, w_i)` becomes the rule `r(v_i ++ A, A, w_i ++ B, B) -> -x`
//! over difference lists, `r(A0,A,B0,B) -> +r(A0,A1,B0,B1) +r(A1,A,B1,B)`
//! concatenates, and `s -> +r(X,[],X,[])` demands equal strings. The
//! automaton accepts `x*`, so any number of pairs may be used.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::forest::{ForestGrammar, ForestRhs, ParseTree};
use crate::fsa::{Fsa, FsaBuilder};
use crate::grammar::{Grammar, RhsItem, Rule};
use crate::terms::{unify, Substitution, Term};

/// The single terminal of an encoding.
pub const TOKEN: &str = "x";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcpInstance {
    a: Vec<String>,
    b: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcpSolution {
    /// 1-based pair indices.
    pub indices: Vec<usize>,
    pub witness: String,
}

impl fmt::Display for PcpSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        write!(f, "{} -> {}", idx.join(" "), self.witness)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PcpError {
    #[error("instance has no pairs")]
    NoPairs,
    #[error("pair {0} has an empty string")]
    EmptyString(usize),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// An encoded instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    pub grammar: Grammar,
    pub fsa: Fsa,
}

/// Index of the first lexical rule in an encoding grammar.
const FIRST_LEXICAL: usize = 2;

impl PcpInstance {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, S)>) -> Result<Self, PcpError> {
        let (a, b): (Vec<String>, Vec<String>) =
            pairs.into_iter().map(|(v, w)| (v.into(), w.into())).unzip();
        if a.is_empty() {
            return Err(PcpError::NoPairs);
        }
        if let Some(i) = a.iter().zip(&b).position(|(v, w)| v.is_empty() || w.is_empty()) {
            return Err(PcpError::EmptyString(i + 1));
        }
        Ok(PcpInstance { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn list_a(&self) -> &[String] {
        &self.a
    }

    pub fn list_b(&self) -> &[String] {
        &self.b
    }

    pub fn alphabet(&self) -> std::collections::BTreeSet<char> {
        self.a.iter().chain(&self.b).flat_map(|s| s.chars()).collect()
    }

    fn symbols(s: &str, tail: &str) -> Term {
        let items = s.chars().map(|c| Term::atom(c.to_string())).collect();
        Term::list(items, Some(Term::var(tail)))
    }

    /// The encoding grammar: top rule, combination rule, then one lexical
    /// rule per pair in order.
    pub fn grammar(&self) -> Grammar {
        let v = Term::var;
        let r = |args: Vec<Term>| Term::compound("r", args);
        let nil = || Term::atom("[]");
        let mut rules = vec![
            Rule::new(
                Term::atom("s"),
                vec![RhsItem::Nonterminal(r(vec![v("X"), nil(), v("X"), nil()]))],
            ),
            Rule::new(
                r(vec![v("A0"), v("A"), v("B0"), v("B")]),
                vec![
                    RhsItem::Nonterminal(r(vec![v("A0"), v("A1"), v("B0"), v("B1")])),
                    RhsItem::Nonterminal(r(vec![v("A1"), v("A"), v("B1"), v("B")])),
                ],
            ),
        ];
        for (va, wb) in self.a.iter().zip(&self.b) {
            rules.push(Rule::new(
                r(vec![Self::symbols(va, "A"), v("A"), Self::symbols(wb, "B"), v("B")]),
                vec![RhsItem::Terminal(TOKEN.to_string())],
            ));
        }
        Grammar::new(Term::atom("s"), rules)
    }

    pub fn encode(&self) -> Encoding {
        Encoding {
            grammar: self.grammar(),
            fsa: x_star(1.0),
        }
    }

    fn concat(list: &[String], indices: &[usize]) -> Option<String> {
        indices
            .iter()
            .map(|&i| i.checked_sub(1).and_then(|i| list.get(i)).map(String::as_str))
            .collect()
    }

    /// True iff `sol` uses at least one pair and both concatenations equal
    /// its witness.
    pub fn verify_solution(&self, sol: &PcpSolution) -> bool {
        if sol.indices.is_empty() {
            return false;
        }
        match (Self::concat(&self.a, &sol.indices), Self::concat(&self.b, &sol.indices)) {
            (Some(x), Some(y)) => x == y && x == sol.witness,
            _ => false,
        }
    }

    /// Shortest solution using at most `max_m` pairs, lexicographically
    /// least among the shortest.
    pub fn solve_bounded(&self, max_m: usize) -> Option<PcpSolution> {
        let mut indices = Vec::new();
        (1..=max_m).find_map(|m| self.search(m, &mut indices, String::new(), String::new()))
    }

    fn search(&self, m: usize, indices: &mut Vec<usize>, x: String, y: String) -> Option<PcpSolution> {
        if indices.len() == m {
            return (x == y).then(|| PcpSolution {
                indices: indices.clone(),
                witness: x,
            });
        }
        for i in 0..self.a.len() {
            let nx = format!("{x}{}", self.a[i]);
            let ny = format!("{y}{}", self.b[i]);
            if !(nx.starts_with(&ny) || ny.starts_with(&nx)) {
                continue;
            }
            indices.push(i + 1);
            let found = self.search(m, indices, nx, ny);
            indices.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Pair indices used by a tree of an encoding forest, left to right.
    /// Lexical nodes are identified by their constraint when the forest has
    /// one, otherwise by matching the node category against the lexical
    /// rules.
    pub fn recover_indices(&self, forest: &ForestGrammar, tree: &ParseTree) -> Option<Vec<usize>> {
        let grammar = self.grammar();
        let mut out = Vec::new();
        for node in tree.nodes() {
            let rule = forest.rules().get(node.rule)?;
            let lexical = match rule.rhs() {
                ForestRhs::Symbols(s) => s.len() == 1 && s[0].is_terminal(),
                ForestRhs::Terminal(_) => false,
            };
            if !lexical {
                continue;
            }
            let index = match rule.constraint() {
                Some(c) => c.rule_index.checked_sub(FIRST_LEXICAL)?,
                None => {
                    let cat = node.symbol.category_term()?;
                    grammar.rules[FIRST_LEXICAL..]
                        .iter()
                        .position(|r| is_instance(cat, &r.lhs))?
                }
            };
            out.push(index + 1);
        }
        Some(out)
    }

    /// The solution a tree encodes, if it is one.
    pub fn solution_from_tree(&self, forest: &ForestGrammar, tree: &ParseTree) -> Option<PcpSolution> {
        let indices = self.recover_indices(forest, tree)?;
        let witness = Self::concat(&self.a, &indices)?;
        let sol = PcpSolution { indices, witness };
        self.verify_solution(&sol).then_some(sol)
    }
}

/// `t` is an instance of `pattern`.
fn is_instance(t: &Term, pattern: &Term) -> bool {
    let renamed = pattern.map_vars(&mut |v| Term::var(format!("{v}'")));
    match unify(&renamed, t, &Substitution::new()) {
        Some(s) => s.apply(t).is_variant_of(t),
        None => false,
    }
}

/// One state `q`, start and final, with the loop `q -x-> q`.
pub fn x_star(weight: f64) -> Fsa {
    FsaBuilder::new()
        .start("q")
        .final_state("q")
        .weighted("q", TOKEN, "q", weight)
        .build()
        .expect("weight chosen by caller lies in (0,1]")
}

/// The chain automaton for `x^m`.
pub fn x_chain(m: usize) -> Fsa {
    Fsa::from_string(&vec![TOKEN; m])
}

impl fmt::Display for PcpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, w) in self.a.iter().zip(&self.b) {
            writeln!(f, "pair {v} {w}")?;
        }
        Ok(())
    }
}

impl FromStr for PcpInstance {
    type Err = PcpError;

    fn from_str(text: &str) -> Result<Self, PcpError> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["pair", v, w] => pairs.push((v.to_string(), w.to_string())),
                _ => {
                    return Err(PcpError::Syntax {
                        line: n + 1,
                        message: format!("expected `pair <string> <string>`, got `{line}`"),
                    })
                }
            }
        }
        PcpInstance::new(pairs)
    }
}
