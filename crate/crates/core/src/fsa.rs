//! Finite state automata with optional transition probabilities.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! state q0 q1 q2      # optional, fixes state order
//! start q0
//! final q2
//! trans q0 a q1
//! trans q2 b q2 0.5   # optional weight in (0,1]
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::terms::{write_atom, Reader, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(String);

impl StateId {
    pub fn new(name: impl Into<String>) -> Self {
        StateId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, &self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId::new(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from: StateId,
    pub label: String,
    pub to: StateId,
    pub weight: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum FsaError {
    #[error("automaton has no start state")]
    NoStart,
    #[error("weight {weight} of transition {from} -{label}-> {to} is outside (0,1]")]
    BadWeight {
        from: String,
        label: String,
        to: String,
        weight: f64,
    },
    #[error("transition {index} starts at {found} but the path is at {expected}")]
    DisconnectedPath {
        index: usize,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// A nondeterministic automaton without epsilon transitions. States keep
/// their insertion order, which fixes the order of everything derived from
/// the automaton.
#[derive(Clone, Debug, PartialEq)]
pub struct Fsa {
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    transitions: Vec<Transition>,
    starts: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

#[derive(Default, Debug, Clone)]
pub struct FsaBuilder {
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    transitions: Vec<Transition>,
    starts: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

impl FsaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> usize {
        let id = StateId::new(name);
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        self.states.push(id.clone());
        self.index.insert(id, self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn start(&mut self, name: impl Into<String>) -> &mut Self {
        let i = self.state(name);
        self.starts.insert(i);
        self
    }

    pub fn final_state(&mut self, name: impl Into<String>) -> &mut Self {
        let i = self.state(name);
        self.finals.insert(i);
        self
    }

    pub fn transition(
        &mut self,
        from: impl Into<String>,
        label: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.weighted(from, label, to, 1.0)
    }

    pub fn weighted(
        &mut self,
        from: impl Into<String>,
        label: impl Into<String>,
        to: impl Into<String>,
        weight: f64,
    ) -> &mut Self {
        let (from, to) = (self.state(from), self.state(to));
        let (from, to) = (self.states[from].clone(), self.states[to].clone());
        self.transitions.push(Transition {
            from,
            label: label.into(),
            to,
            weight,
        });
        self
    }

    pub fn build(&self) -> Result<Fsa, FsaError> {
        if self.starts.is_empty() {
            return Err(FsaError::NoStart);
        }
        if let Some(t) = self
            .transitions
            .iter()
            .find(|t| !(t.weight > 0.0 && t.weight <= 1.0))
        {
            return Err(FsaError::BadWeight {
                from: t.from.to_string(),
                label: t.label.clone(),
                to: t.to.to_string(),
                weight: t.weight,
            });
        }
        Ok(Fsa {
            states: self.states.clone(),
            index: self.index.clone(),
            transitions: self.transitions.clone(),
            starts: self.starts.clone(),
            finals: self.finals.clone(),
        })
    }
}

impl Fsa {
    /// Linear chain `0 -t0-> 1 -t1-> ... -> n`, start `0`, final `n`.
    pub fn from_string<S: AsRef<str>>(tokens: &[S]) -> Fsa {
        let mut b = FsaBuilder::new();
        b.start("0");
        for (i, tok) in tokens.iter().enumerate() {
            b.transition(i.to_string(), tok.as_ref(), (i + 1).to_string());
        }
        b.final_state(tokens.len().to_string());
        b.build().expect("chain automaton has a start state")
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn state_index(&self, id: &StateId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn state(&self, index: usize) -> &StateId {
        &self.states[index]
    }

    /// Start state indices in state order.
    pub fn starts(&self) -> impl Iterator<Item = usize> + '_ {
        self.starts.iter().copied()
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals.iter().copied()
    }

    pub fn is_start(&self, i: usize) -> bool {
        self.starts.contains(&i)
    }

    pub fn is_final(&self, i: usize) -> bool {
        self.finals.contains(&i)
    }

    /// Outgoing transitions of state `i` carrying `label`, as
    /// `(target index, weight)`.
    pub fn step<'a>(&'a self, i: usize, label: &'a str) -> impl Iterator<Item = (usize, f64)> + 'a {
        let from = &self.states[i];
        self.transitions
            .iter()
            .filter(move |t| &t.from == from && t.label == label)
            .map(|t| (self.index[&t.to], t.weight))
    }

    fn successors(&self, keep: impl Fn(&Transition) -> bool) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.states.len()];
        for t in self.transitions.iter().filter(|t| keep(t)) {
            succ[self.index[&t.from]].push(self.index[&t.to]);
        }
        succ
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Some cycle of the transition graph as a closed state sequence
    /// (first state repeated at the end); self-loops count.
    pub fn find_cycle(&self) -> Option<Vec<StateId>> {
        self.cycle_through(|_| true)
    }

    /// A cycle whose weight product is 1, i.e. one made of weight-1
    /// transitions only.
    pub fn find_unweighted_cycle(&self) -> Option<Vec<StateId>> {
        self.cycle_through(|t| t.weight >= 1.0)
    }

    fn cycle_through(&self, keep: impl Fn(&Transition) -> bool) -> Option<Vec<StateId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let succ = self.successors(keep);
        let mut mark = vec![Mark::New; self.states.len()];
        for root in 0..self.states.len() {
            if mark[root] != Mark::New {
                continue;
            }
            // iterative DFS; `path` mirrors the active stack
            let mut stack = vec![(root, 0usize)];
            let mut path = vec![root];
            mark[root] = Mark::Active;
            while let Some((node, next)) = stack.last_mut() {
                let node = *node;
                if let Some(&child) = succ[node].get(*next) {
                    *next += 1;
                    match mark[child] {
                        Mark::Active => {
                            let pos = path.iter().position(|&p| p == child).expect("active on path");
                            let mut cycle: Vec<StateId> =
                                path[pos..].iter().map(|&i| self.states[i].clone()).collect();
                            cycle.push(self.states[child].clone());
                            return Some(cycle);
                        }
                        Mark::New => {
                            mark[child] = Mark::Active;
                            stack.push((child, 0));
                            path.push(child);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                    path.pop();
                }
            }
        }
        None
    }

    pub fn accepts<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        let mut current: BTreeSet<usize> = self.starts.clone();
        for tok in tokens {
            current = current
                .iter()
                .flat_map(|&q| self.step(q, tok.as_ref()).map(|(to, _)| to))
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|q| self.finals.contains(q))
    }

    /// Product of the weights along `path`, which must be connected.
    pub fn path_weight(&self, path: &[Transition]) -> Result<f64, FsaError> {
        for (i, pair) in path.windows(2).enumerate() {
            if pair[0].to != pair[1].from {
                return Err(FsaError::DisconnectedPath {
                    index: i + 1,
                    expected: pair[0].to.to_string(),
                    found: pair[1].from.to_string(),
                });
            }
        }
        Ok(path.iter().map(|t| t.weight).product())
    }

    /// Same automaton with every transition weight replaced by `weight`.
    pub fn with_uniform_weight(&self, weight: f64) -> Result<Fsa, FsaError> {
        let mut b = FsaBuilder {
            states: self.states.clone(),
            index: self.index.clone(),
            transitions: self.transitions.clone(),
            starts: self.starts.clone(),
            finals: self.finals.clone(),
        };
        for t in &mut b.transitions {
            t.weight = weight;
        }
        b.build()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fsa {\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if self.finals.contains(&i) {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  s{i} [label=\"{}\", shape={shape}];", s.as_str());
            if self.starts.contains(&i) {
                let _ = writeln!(out, "  init{i} [shape=point];\n  init{i} -> s{i};");
            }
        }
        for t in &self.transitions {
            let label = if t.weight == 1.0 {
                t.label.clone()
            } else {
                format!("{}/{}", t.label, t.weight)
            };
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                self.index[&t.from], self.index[&t.to], label
            );
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Fsa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("state")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f)?;
        for &i in &self.starts {
            writeln!(f, "start {}", self.states[i])?;
        }
        for &i in &self.finals {
            writeln!(f, "final {}", self.states[i])?;
        }
        for t in &self.transitions {
            write!(f, "trans {} ", t.from)?;
            write_atom(f, &t.label)?;
            write!(f, " {}", t.to)?;
            if t.weight != 1.0 {
                write!(f, " {}", t.weight)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Fsa {
    type Err = FsaError;

    fn from_str(text: &str) -> Result<Fsa, FsaError> {
        let mut b = FsaBuilder::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut r = Reader::new(line, n + 1);
            if r.at_end() {
                continue;
            }
            match r.word()? {
                "state" => {
                    while !r.at_end() {
                        let name = r.atom_name()?;
                        b.state(name);
                    }
                }
                "start" => {
                    b.start(r.atom_name()?);
                }
                "final" => {
                    b.final_state(r.atom_name()?);
                }
                "trans" => {
                    let from = r.atom_name()?;
                    let label = r.atom_name()?;
                    let to = r.atom_name()?;
                    let weight = if r.at_end() {
                        1.0
                    } else {
                        let w = r.word()?;
                        w.parse::<f64>()
                            .map_err(|_| r.error(format!("bad weight `{w}`")))?
                    };
                    b.weighted(from, label, to, weight);
                }
                other => return Err(r.error(format!("unknown declaration `{other}`")).into()),
            }
            r.end()?;
        }
        b.build()
    }
}
