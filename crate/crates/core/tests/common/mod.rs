//! Test battery and brute-force oracles that share no code with the crate.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use fsa_dcg::{Fsa, Grammar};

/// A context-free grammar as plain data: `(lhs, rhs)` where rhs symbols
/// starting with `-` are terminals.
pub struct TestCfg {
    pub name: &'static str,
    pub top: &'static str,
    pub rules: &'static [(&'static str, &'static [&'static str])],
}

impl TestCfg {
    pub fn grammar(&self) -> Grammar {
        let mut text = format!("top {}\n", self.top);
        for (lhs, rhs) in self.rules {
            text.push_str(&format!("rule {lhs} ->"));
            for sym in *rhs {
                if sym.starts_with('-') {
                    text.push_str(&format!(" {sym}"));
                } else {
                    text.push_str(&format!(" +{sym}"));
                }
            }
            text.push('\n');
        }
        text.parse().expect("battery grammar parses")
    }

    /// CYK-style fixpoint: `table[A][i][j]` iff `A =>* w[i..j]`.
    pub fn derives(&self, w: &[&str]) -> bool {
        let n = w.len();
        let mut nts: Vec<&str> = self.rules.iter().map(|(l, _)| *l).collect();
        nts.sort();
        nts.dedup();
        let idx: HashMap<&str, usize> = nts.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut table = vec![vec![vec![false; n + 1]; n + 1]; nts.len()];
        loop {
            let mut changed = false;
            for (lhs, rhs) in self.rules {
                let a = idx[lhs];
                for i in 0..=n {
                    // reach[j]: rhs prefix derives w[i..j]
                    let mut reach = vec![false; n + 1];
                    reach[i] = true;
                    for sym in *rhs {
                        let mut next = vec![false; n + 1];
                        for j in i..=n {
                            if !reach[j] {
                                continue;
                            }
                            if let Some(t) = sym.strip_prefix('-') {
                                if j < n && w[j] == t {
                                    next[j + 1] = true;
                                }
                            } else if let Some(&b) = idx.get(sym) {
                                for k in j..=n {
                                    if table[b][j][k] {
                                        next[k] = true;
                                    }
                                }
                            }
                        }
                        reach = next;
                    }
                    for j in i..=n {
                        if reach[j] && !table[a][i][j] {
                            table[a][i][j] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        idx.get(self.top).is_some_and(|&s| table[s][0][n])
    }
}

/// An automaton as plain data.
pub struct TestFsa {
    pub name: &'static str,
    pub starts: &'static [&'static str],
    pub finals: &'static [&'static str],
    pub trans: &'static [(&'static str, &'static str, &'static str)],
    pub cyclic: bool,
}

impl TestFsa {
    pub fn fsa(&self) -> Fsa {
        let mut text = String::new();
        for s in self.starts {
            text.push_str(&format!("start {s}\n"));
        }
        for s in self.finals {
            text.push_str(&format!("final {s}\n"));
        }
        for (p, a, q) in self.trans {
            text.push_str(&format!("trans {p} {a} {q}\n"));
        }
        text.parse().expect("battery automaton parses")
    }

    pub fn accepts(&self, w: &[&str]) -> bool {
        let mut cur: BTreeSet<&str> = self.starts.iter().copied().collect();
        for tok in w {
            cur = self
                .trans
                .iter()
                .filter(|(p, a, _)| cur.contains(p) && a == tok)
                .map(|(_, _, q)| *q)
                .collect();
        }
        cur.iter().any(|q| self.finals.contains(q))
    }
}

pub const ANBN: TestCfg = TestCfg {
    name: "anbn",
    top: "s",
    rules: &[("s", &["-a", "s", "-b"]), ("s", &[])],
};

pub const CFGS: &[TestCfg] = &[
    ANBN,
    TestCfg {
        name: "dyck",
        top: "s",
        rules: &[("s", &["-a", "s", "-b", "s"]), ("s", &[])],
    },
    TestCfg {
        name: "palindromes",
        top: "s",
        rules: &[
            ("s", &["-a", "s", "-a"]),
            ("s", &["-b", "s", "-b"]),
            ("s", &["-a"]),
            ("s", &["-b"]),
            ("s", &[]),
        ],
    },
    TestCfg {
        name: "left-recursive",
        top: "s",
        rules: &[("s", &["s", "-a"]), ("s", &["-b"])],
    },
    TestCfg {
        name: "nullable-cycle",
        top: "s",
        rules: &[("s", &["s", "s"]), ("s", &["-a"]), ("s", &[])],
    },
    TestCfg {
        name: "two-blocks",
        top: "s",
        rules: &[
            ("s", &["t", "t"]),
            ("t", &["-a", "t"]),
            ("t", &["-b"]),
            ("u", &["u", "-a"]),
        ],
    },
];

pub const EVEN_AS: TestFsa = TestFsa {
    name: "(aa)*b+",
    starts: &["q0"],
    finals: &["q2"],
    trans: &[("q0", "a", "q1"), ("q1", "a", "q0"), ("q0", "b", "q2"), ("q2", "b", "q2")],
    cyclic: true,
};

pub const FSAS: &[TestFsa] = &[
    TestFsa {
        name: "aabb",
        starts: &["0"],
        finals: &["4"],
        trans: &[("0", "a", "1"), ("1", "a", "2"), ("2", "b", "3"), ("3", "b", "4")],
        cyclic: false,
    },
    EVEN_AS,
    TestFsa {
        name: "a*b*",
        starts: &["p"],
        finals: &["p", "r"],
        trans: &[("p", "a", "p"), ("p", "b", "r"), ("r", "b", "r")],
        cyclic: true,
    },
    TestFsa {
        name: "sigma*",
        starts: &["u"],
        finals: &["u"],
        trans: &[("u", "a", "u"), ("u", "b", "u")],
        cyclic: true,
    },
    TestFsa {
        name: "lattice",
        starts: &["0"],
        finals: &["2", "3"],
        trans: &[
            ("0", "a", "1"),
            ("0", "b", "1"),
            ("1", "a", "2"),
            ("1", "b", "2"),
            ("2", "b", "3"),
        ],
        cyclic: false,
    },
    TestFsa {
        name: "two-starts",
        starts: &["x", "y"],
        finals: &["z"],
        trans: &[("x", "a", "z"), ("y", "b", "y"), ("y", "a", "z"), ("z", "b", "z")],
        cyclic: true,
    },
];

/// Every word over `{a, b}` of length at most `k`.
pub fn all_words(k: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<&'static str>> = vec![Vec::new()];
    for _ in 0..k {
        layer = layer
            .iter()
            .flat_map(|w| {
                ["a", "b"].into_iter().map(move |t| {
                    let mut v = w.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// `{ w : |w| <= k, g derives w, m accepts w }` by enumeration.
pub fn brute_force(g: &TestCfg, m: &TestFsa, k: usize) -> BTreeSet<Vec<String>> {
    all_words(k)
        .into_iter()
        .filter(|w| m.accepts(w) && g.derives(w))
        .map(|w| w.into_iter().map(String::from).collect())
        .collect()
}

pub fn words(ws: &[&str]) -> BTreeSet<Vec<String>> {
    ws.iter()
        .map(|w| w.split_whitespace().map(String::from).collect())
        .collect()
}

/// The three Post correspondence instances used throughout the tests.
pub const PCP_EXAMPLE: [(&str, &str); 3] = [("1", "111"), ("10111", "10"), ("10", "0")];
pub const PCP_NONE: [(&str, &str); 1] = [("1", "0")];

pub mod gen {
    use fsa_dcg::Term;
    use proptest::prelude::*;

    /// Terms of depth at most `depth` over `f/2`, `g/1`, `a`, `b` and the
    /// variables `X`, `Y`, `Z`.
    pub fn term(depth: u32) -> BoxedStrategy<Term> {
        let leaf = prop_oneof![
            Just(Term::atom("a")),
            Just(Term::atom("b")),
            Just(Term::var("X")),
            Just(Term::var("Y")),
            Just(Term::var("Z")),
        ];
        leaf.prop_recursive(depth.saturating_sub(1), 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::compound("f", vec![x, y])),
                inner.prop_map(|x| Term::compound("g", vec![x])),
            ]
        })
        .boxed()
    }

    /// Pairs of terms of depth at most 3. Half are independent, half are a
    /// term and an instance of it, which unify far more often.
    pub fn pair() -> BoxedStrategy<(Term, Term)> {
        let instance = (term(3), term(2), term(2), term(2))
            .prop_map(|(s, x, y, z)| {
                let t = s.map_vars(&mut |v| match &**v {
                    "X" => x.clone(),
                    "Y" => y.clone(),
                    _ => z.clone(),
                });
                (s, t)
            })
            .prop_filter("depth at most 3", |(_, t)| t.depth() <= 3);
        prop_oneof![(term(3), term(3)), instance].boxed()
    }

    /// Ground terms of depth at most 2.
    pub fn ground() -> BoxedStrategy<Term> {
        let leaf = prop_oneof![Just(Term::atom("a")), Just(Term::atom("b"))];
        leaf.prop_recursive(1, 4, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::compound("f", vec![x, y])),
                inner.prop_map(|x| Term::compound("g", vec![x])),
            ]
        })
        .boxed()
    }
}
