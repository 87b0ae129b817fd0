//! Intersection of finite state automata with context-free grammars and
//! definite clause grammars.
//!
//! The input "sentence" of a parser is an [`Fsa`](fsa::Fsa): a plain
//! string, a word lattice or an automaton with cycles. Intersecting it with
//! a grammar yields a [`ForestGrammar`](forest::ForestGrammar) whose
//! symbols are categories decorated with automaton states and whose
//! derivations are exactly the parse trees of the intersection.
//!
//! * [`barhillel`] builds the naive product grammar and reduces grammars.
//! * [`parser`] is a tabled top-down parser over automaton states. For
//!   definite clause grammars emptiness of the intersection is undecidable,
//!   so it offers several termination strategies and a three-valued verdict.
//! * [`pcp`] encodes Post correspondence instances as grammar/automaton
//!   pairs and solves small instances by brute force.

pub mod barhillel;
pub mod cfg;
pub mod cli;
pub mod forest;
pub mod fsa;
pub mod grammar;
pub mod parser;
pub mod pcp;
pub mod terms;

pub use barhillel::{intersect_naive, language_upto, reduce, ContextFree, DecoratedSymbol, SymbolBase};
pub use forest::{Constraint, Extraction, ForestGrammar, ForestRhs, ForestRule, ParseTree, PlainTree, TreeQuery, Witness};
pub use fsa::{Fsa, FsaBuilder, StateId, Transition};
pub use grammar::{Grammar, RhsItem, Rule, Skeleton};
pub use parser::{analyze, emptiness_verdict, intersect_cfg, intersect_dcg, Analysis, DcgOutcome, Stats, Strategy, Verdict};
pub use pcp::{PcpInstance, PcpSolution};
pub use terms::{unify, Substitution, Term};
