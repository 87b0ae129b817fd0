//! Index-based context-free grammar used by the reduction and string
//! enumeration routines. Rule `i` here always corresponds to rule `i` of
//! the grammar or forest it was built from.

use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sym {
    T(usize),
    N(usize),
}

#[derive(Debug, Default)]
pub struct Cfg {
    pub terminals: Vec<String>,
    pub num_nonterminals: usize,
    pub rules: Vec<(usize, Vec<Sym>)>,
    pub starts: Vec<usize>,
}

/// Interns nonterminal keys and terminal names while building a [`Cfg`].
pub(crate) struct CfgBuilder<K> {
    nonterminals: HashMap<K, usize>,
    terminals: HashMap<String, usize>,
    cfg: Cfg,
}

impl<K: std::hash::Hash + Eq> CfgBuilder<K> {
    pub fn new() -> Self {
        CfgBuilder {
            nonterminals: HashMap::new(),
            terminals: HashMap::new(),
            cfg: Cfg::default(),
        }
    }

    pub fn nonterminal(&mut self, key: K) -> usize {
        let next = self.nonterminals.len();
        *self.nonterminals.entry(key).or_insert(next)
    }

    pub fn terminal(&mut self, name: &str) -> usize {
        if let Some(&i) = self.terminals.get(name) {
            return i;
        }
        self.cfg.terminals.push(name.to_string());
        self.terminals.insert(name.to_string(), self.cfg.terminals.len() - 1);
        self.cfg.terminals.len() - 1
    }

    pub fn rule(&mut self, lhs: usize, rhs: Vec<Sym>) {
        self.cfg.rules.push((lhs, rhs));
    }

    pub fn start(&mut self, s: usize) {
        if !self.cfg.starts.contains(&s) {
            self.cfg.starts.push(s);
        }
    }

    pub fn finish(mut self) -> Cfg {
        self.cfg.num_nonterminals = self.nonterminals.len();
        self.cfg
    }
}

impl Cfg {
    pub fn productive(&self) -> Vec<bool> {
        let mut productive = vec![false; self.num_nonterminals];
        let mut changed = true;
        while changed {
            changed = false;
            for (lhs, rhs) in &self.rules {
                if productive[*lhs] {
                    continue;
                }
                if rhs.iter().all(|s| match s {
                    Sym::T(_) => true,
                    Sym::N(n) => productive[*n],
                }) {
                    productive[*lhs] = true;
                    changed = true;
                }
            }
        }
        productive
    }

    /// Rules that are productive and reachable from a start symbol through
    /// productive rules only.
    pub fn useful_rules(&self) -> Vec<bool> {
        let productive = self.productive();
        let rule_productive: Vec<bool> = self
            .rules
            .iter()
            .map(|(lhs, rhs)| {
                productive[*lhs]
                    && rhs.iter().all(|s| match s {
                        Sym::T(_) => true,
                        Sym::N(n) => productive[*n],
                    })
            })
            .collect();
        let mut by_lhs: Vec<Vec<usize>> = vec![Vec::new(); self.num_nonterminals];
        for (i, (lhs, _)) in self.rules.iter().enumerate() {
            by_lhs[*lhs].push(i);
        }
        let mut reachable = vec![false; self.num_nonterminals];
        let mut stack: Vec<usize> = self
            .starts
            .iter()
            .copied()
            .filter(|&s| productive[s])
            .collect();
        for &s in &stack {
            reachable[s] = true;
        }
        while let Some(n) = stack.pop() {
            for &ri in &by_lhs[n] {
                if !rule_productive[ri] {
                    continue;
                }
                for s in &self.rules[ri].1 {
                    if let Sym::N(m) = s {
                        if !reachable[*m] {
                            reachable[*m] = true;
                            stack.push(*m);
                        }
                    }
                }
            }
        }
        self.rules
            .iter()
            .enumerate()
            .map(|(i, (lhs, _))| rule_productive[i] && reachable[*lhs])
            .collect()
    }

    /// Strings of length at most `k` derivable from some start symbol.
    /// Fixpoint over per-nonterminal string sets truncated at `k`.
    pub fn language_upto(&self, k: usize) -> BTreeSet<Vec<String>> {
        let mut lang: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); self.num_nonterminals];
        let mut changed = true;
        while changed {
            changed = false;
            for (lhs, rhs) in &self.rules {
                let mut partial: BTreeSet<Vec<usize>> = BTreeSet::from([Vec::new()]);
                for s in rhs {
                    let mut next = BTreeSet::new();
                    match s {
                        Sym::T(t) => {
                            for w in &partial {
                                if w.len() < k {
                                    let mut w = w.clone();
                                    w.push(*t);
                                    next.insert(w);
                                }
                            }
                        }
                        Sym::N(n) => {
                            for w in &partial {
                                for v in &lang[*n] {
                                    if w.len() + v.len() <= k {
                                        let mut w = w.clone();
                                        w.extend_from_slice(v);
                                        next.insert(w);
                                    }
                                }
                            }
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for w in partial {
                    if lang[*lhs].insert(w) {
                        changed = true;
                    }
                }
            }
        }
        self.starts
            .iter()
            .flat_map(|&s| lang[s].iter())
            .map(|w| w.iter().map(|&t| self.terminals[t].clone()).collect())
            .collect()
    }
}
