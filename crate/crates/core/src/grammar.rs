//! Context-free and definite clause grammars in one representation.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! top s
//! rule s -> -a +s -b
//! rule s ->
//! rule r([1|A],A,[1,1,1|B],B) -> -x
//! ```
//!
//! `-` marks a terminal, `+` a nonterminal category. Variables are scoped
//! to their rule.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::terms::{write_atom, Reader, SyntaxError, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RhsItem {
    Terminal(String),
    Nonterminal(Term),
}

impl fmt::Display for RhsItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsItem::Terminal(t) => {
                f.write_str("-")?;
                write_atom(f, t)
            }
            RhsItem::Nonterminal(c) => write!(f, "+{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Vec<RhsItem>,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Vec<RhsItem>) -> Self {
        Rule { lhs, rhs }
    }

    /// Every category term of the rule, lhs first.
    pub fn categories(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.lhs).chain(self.rhs.iter().filter_map(|item| match item {
            RhsItem::Nonterminal(c) => Some(c),
            RhsItem::Terminal(_) => None,
        }))
    }

    pub fn is_context_free(&self) -> bool {
        self.categories().all(Term::is_atom)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for item in &self.rhs {
            write!(f, " {item}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GrammarError {
    #[error("grammar has no `top` declaration")]
    MissingTop,
    #[error("category `{0}` is a variable")]
    VariableCategory(String),
    #[error("grammar is not context-free: category `{0}` has arguments")]
    NotContextFree(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Ordered rule list plus a top category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub top: Term,
}

/// Context-free skeleton of a grammar: `origin[i]` is the index of the
/// original rule that skeleton rule `i` was erased from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub grammar: Grammar,
    pub origin: Vec<usize>,
}

/// Skeleton name of a category: the name itself for atoms, `name/arity`
/// otherwise.
pub fn skeleton_name(t: &Term) -> String {
    match t {
        Term::Var(v) => v.to_string(),
        Term::Compound(name, args) if args.is_empty() => name.to_string(),
        Term::Compound(name, args) => format!("{name}/{}", args.len()),
    }
}

impl Grammar {
    pub fn new(top: Term, rules: Vec<Rule>) -> Self {
        Grammar { rules, top }
    }

    /// All category terms, including the top.
    pub fn categories(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.top).chain(self.rules.iter().flat_map(Rule::categories))
    }

    pub fn is_context_free(&self) -> bool {
        self.categories().all(Term::is_atom)
    }

    pub(crate) fn require_context_free(&self) -> Result<(), GrammarError> {
        match self.categories().find(|c| !c.is_atom()) {
            None => Ok(()),
            Some(c) => Err(GrammarError::NotContextFree(c.to_string())),
        }
    }

    pub fn terminals(&self) -> BTreeSet<&str> {
        self.rules
            .iter()
            .flat_map(|r| &r.rhs)
            .filter_map(|item| match item {
                RhsItem::Terminal(t) => Some(t.as_str()),
                RhsItem::Nonterminal(_) => None,
            })
            .collect()
    }

    /// Distinct `(functor, arity)` pairs over all categories.
    pub fn category_functors(&self) -> BTreeSet<(String, usize)> {
        self.categories()
            .filter_map(|c| c.functor().map(|(n, a)| (n.to_string(), a)))
            .collect()
    }

    /// Erases category arguments, keeping one skeleton rule per rule.
    pub fn cf_skeleton(&self) -> Skeleton {
        let erase = |t: &Term| Term::atom(skeleton_name(t));
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                lhs: erase(&r.lhs),
                rhs: r
                    .rhs
                    .iter()
                    .map(|item| match item {
                        RhsItem::Terminal(t) => RhsItem::Terminal(t.clone()),
                        RhsItem::Nonterminal(c) => RhsItem::Nonterminal(erase(c)),
                    })
                    .collect(),
            })
            .collect();
        Skeleton {
            grammar: Grammar {
                rules,
                top: erase(&self.top),
            },
            origin: (0..self.rules.len()).collect(),
        }
    }

    /// Skeleton nonterminals that can derive the empty string.
    pub fn nullable(&self) -> HashSet<String> {
        let sk = self.cf_skeleton().grammar;
        let mut nullable: HashSet<String> = HashSet::new();
        let mut changed = true;
        while changed {
            changed = false;
            for r in &sk.rules {
                let lhs = skeleton_name(&r.lhs);
                if nullable.contains(&lhs) {
                    continue;
                }
                let all_nullable = r.rhs.iter().all(|item| match item {
                    RhsItem::Terminal(_) => false,
                    RhsItem::Nonterminal(c) => nullable.contains(&skeleton_name(c)),
                });
                if all_nullable {
                    nullable.insert(lhs);
                    changed = true;
                }
            }
        }
        nullable
    }

    /// True iff no skeleton nonterminal derives itself through rules whose
    /// other right-hand-side items are all nullable.
    pub fn offline_parsable(&self) -> bool {
        self.unit_cycle().is_none()
    }

    /// A skeleton nonterminal `A` with `A =>+ A` without consuming input.
    pub fn unit_cycle(&self) -> Option<String> {
        let sk = self.cf_skeleton().grammar;
        let nullable = self.nullable();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut names: Vec<String> = Vec::new();
        let mut id = |name: String, names: &mut Vec<String>| {
            *ids.entry(name.clone()).or_insert_with(|| {
                names.push(name);
                names.len() - 1
            })
        };
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for r in &sk.rules {
            let lhs = id(skeleton_name(&r.lhs), &mut names);
            let is_nullable = |item: &RhsItem| match item {
                RhsItem::Terminal(_) => false,
                RhsItem::Nonterminal(c) => nullable.contains(&skeleton_name(c)),
            };
            for (i, item) in r.rhs.iter().enumerate() {
                let RhsItem::Nonterminal(c) = item else { continue };
                let others_nullable = r
                    .rhs
                    .iter()
                    .enumerate()
                    .all(|(j, other)| j == i || is_nullable(other));
                if others_nullable {
                    let target = id(skeleton_name(c), &mut names);
                    edges.push((lhs, target));
                }
            }
        }
        // transitive closure over the unit graph
        let n = names.len();
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in &edges {
            reach[a][b] = true;
        }
        for k in 0..n {
            let via = reach[k].clone();
            for row in reach.iter_mut().filter(|row| row[k]) {
                for (cell, &v) in row.iter_mut().zip(&via) {
                    *cell |= v;
                }
            }
        }
        (0..n).find(|&i| reach[i][i]).map(|i| names[i].clone())
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "top {}", self.top)?;
        for r in &self.rules {
            writeln!(f, "rule {r}")?;
        }
        Ok(())
    }
}

fn read_category(r: &mut Reader<'_>) -> Result<Term, GrammarError> {
    let t = r.term()?;
    if t.is_var() {
        return Err(GrammarError::VariableCategory(t.to_string()));
    }
    Ok(t)
}

pub(crate) fn read_rule(r: &mut Reader<'_>) -> Result<Rule, GrammarError> {
    let lhs = read_category(r)?;
    r.expect("->")?;
    let mut rhs = Vec::new();
    loop {
        r.skip_ws();
        match r.peek() {
            Some('+') => {
                r.expect("+")?;
                rhs.push(RhsItem::Nonterminal(read_category(r)?));
            }
            Some('-') => {
                r.expect("-")?;
                rhs.push(RhsItem::Terminal(r.atom_name()?));
            }
            _ => break,
        }
    }
    Ok(Rule { lhs, rhs })
}

impl FromStr for Grammar {
    type Err = GrammarError;

    fn from_str(text: &str) -> Result<Grammar, GrammarError> {
        let mut top = None;
        let mut rules = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut r = Reader::new(line, n + 1);
            if r.at_end() {
                continue;
            }
            match r.word()? {
                "top" => top = Some(read_category(&mut r)?),
                "rule" => rules.push(read_rule(&mut r)?),
                other => {
                    return Err(r.error(format!("unknown declaration `{other}`")).into())
                }
            }
            r.end()?;
        }
        Ok(Grammar {
            rules,
            top: top.ok_or(GrammarError::MissingTop)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> Grammar {
        text.parse().unwrap()
    }

    const ANBN: &str = "top s\nrule s -> -a +s -b\nrule s ->\n";
    const PCP: &str = "top s
rule s -> +r(X,[],X,[])
rule r(A0,A,B0,B) -> +r(A0,A1,B0,B1) +r(A1,A,B1,B)
rule r([1|A],A,[1,1,1|B],B) -> -x
rule r([1,0,1,1,1|A],A,[1,0|B],B) -> -x
rule r([1,0|A],A,[0|B],B) -> -x
";

    #[test]
    fn context_freeness() {
        assert!(g(ANBN).is_context_free());
        assert!(!g(PCP).is_context_free());
        assert!(g("top s\n").is_context_free());
    }

    #[test]
    fn skeleton_of_pcp_encoding() {
        let sk = g(PCP).cf_skeleton();
        let expected = g("top s
rule s -> +'r/4'
rule 'r/4' -> +'r/4' +'r/4'
rule 'r/4' -> -x
rule 'r/4' -> -x
rule 'r/4' -> -x
");
        assert_eq!(sk.grammar, expected);
        assert_eq!(sk.origin, vec![0, 1, 2, 3, 4]);
        assert!(sk.grammar.is_context_free());
    }

    #[test]
    fn skeleton_is_identity_on_cfgs_and_idempotent() {
        let anbn = g(ANBN);
        assert_eq!(anbn.cf_skeleton().grammar, anbn);
        let once = g(PCP).cf_skeleton().grammar;
        assert_eq!(once.cf_skeleton().grammar, once);
        let single = g("top s(a)\nrule s(X) -> +s(f(X))\n").cf_skeleton().grammar;
        assert_eq!(single, g("top 's/1'\nrule 's/1' -> +'s/1'\n"));
    }

    #[test]
    fn offline_parsability() {
        assert!(g(PCP).offline_parsable());
        assert!(g(ANBN).offline_parsable());
        assert!(!g("top s\nrule s -> +s\n").offline_parsable());
        // t nullable: s -> t s -> s
        let padded = g("top s\nrule s -> +t +s\nrule t ->\n");
        assert!(!padded.offline_parsable());
        assert_eq!(padded.unit_cycle().as_deref(), Some("s"));
        // a cycle through another nonterminal
        assert!(!g("top s\nrule s -> +u\nrule u -> +s -a\nrule u -> +s\n").offline_parsable());
        assert!(g("top s\nrule s -> +u -a\nrule u -> +s\nrule u -> -b\n").offline_parsable());
    }

    #[test]
    fn reader_errors() {
        assert_eq!("rule s -> -a\n".parse::<Grammar>(), Err(GrammarError::MissingTop));
        assert!(matches!(
            "top s\nrule X -> -a\n".parse::<Grammar>(),
            Err(GrammarError::VariableCategory(_))
        ));
        match "top s\nrule s -> -a b\n".parse::<Grammar>() {
            Err(GrammarError::Syntax(e)) => assert_eq!(e.line, 2),
            other => panic!("{other:?}"),
        }
        assert!("top s\nrule s -> -f(a)\n".parse::<Grammar>().is_err());
    }

    #[test]
    fn text_round_trip() {
        for text in [ANBN, PCP] {
            let parsed = g(text);
            assert_eq!(g(&parsed.to_string()), parsed);
        }
    }
}
