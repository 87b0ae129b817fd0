//! First-order terms, idempotent substitutions and syntactic unification.
//!
//! Terms use a Prolog-like surface syntax: identifiers starting with an
//! uppercase letter or `_` are variables, everything else is an atom or a
//! compound `f(t1, ..., tn)`. Lists are sugar over `'.'/2` and `[]`, so
//! `[1,0|B]` reads as `'.'(1, '.'(0, B))`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Functor name used for list cells.
pub const CONS: &str = ".";
/// Atom used for the empty list.
pub const NIL: &str = "[]";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Rc<str>),
    /// Atoms are compounds with no arguments.
    Compound(Rc<str>, Rc<[Term]>),
}

impl Term {
    pub fn var(name: impl Into<Rc<str>>) -> Term {
        Term::Var(name.into())
    }

    pub fn atom(name: impl Into<Rc<str>>) -> Term {
        Term::Compound(name.into(), Rc::new([]))
    }

    pub fn compound(name: impl Into<Rc<str>>, args: Vec<Term>) -> Term {
        Term::Compound(name.into(), args.into())
    }

    /// Builds `[items | tail]`; `tail` defaults to `[]`.
    pub fn list(items: Vec<Term>, tail: Option<Term>) -> Term {
        let cons: Rc<str> = CONS.into();
        items
            .into_iter()
            .rev()
            .fold(tail.unwrap_or_else(|| Term::atom(NIL)), |acc, item| {
                Term::Compound(cons.clone(), Rc::new([item, acc]))
            })
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Term::Compound(_, args) if args.is_empty())
    }

    /// Name of an atom, `None` for variables and proper compounds.
    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Term::Compound(name, args) if args.is_empty() => Some(name),
            _ => None,
        }
    }

    /// `(name, arity)` of a compound; `None` for variables.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Var(_) => None,
            Term::Compound(name, args) => Some((name, args.len())),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => &**v == var,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Variables in order of first occurrence, without duplicates.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => {
                if !out.contains(&&**v) {
                    out.push(v);
                }
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Nesting depth; variables and atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Replaces every variable through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Rc<str>) -> Term) -> Term {
        self.try_map_vars(&mut |v| Some(f(v)))
            .unwrap_or_else(|| self.clone())
    }

    /// Like [`Term::map_vars`], but `f` may leave a variable alone by
    /// returning `None`. Returns `None` when nothing changed; unchanged
    /// subterms are shared with `self`.
    pub fn try_map_vars<F>(&self, f: &mut F) -> Option<Term>
    where
        F: FnMut(&Rc<str>) -> Option<Term>,
    {
        match self {
            Term::Var(v) => f(v),
            Term::Compound(name, args) => {
                let mut out: Option<Vec<Term>> = None;
                for (i, a) in args.iter().enumerate() {
                    match (a.try_map_vars(f), &mut out) {
                        (Some(t), Some(o)) => o.push(t),
                        (Some(t), None) => {
                            let mut o = Vec::with_capacity(args.len());
                            o.extend_from_slice(&args[..i]);
                            o.push(t);
                            out = Some(o);
                        }
                        (None, Some(o)) => o.push(a.clone()),
                        (None, None) => {}
                    }
                }
                out.map(|args| Term::Compound(name.clone(), args.into()))
            }
        }
    }

    fn replace_var(&self, var: &str, value: &Term) -> Term {
        self.try_map_vars(&mut |v| (&**v == var).then(|| value.clone()))
            .unwrap_or_else(|| self.clone())
    }

    /// Variant representative: variables renamed `_0`, `_1`, ... in order of
    /// first occurrence. Two terms are variants iff their canonical forms
    /// are equal.
    pub fn canonical(&self) -> Term {
        let mut names: FxHashMap<Rc<str>, Term> = FxHashMap::default();
        self.map_vars(&mut |v| {
            let next = names.len();
            names
                .entry(v.clone())
                .or_insert_with(|| Term::Var(format!("_{next}").into()))
                .clone()
        })
    }

    /// Necessary condition for unifiability that ignores variable sharing.
    /// Cheap and allocation-free.
    pub fn could_unify(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(_), _) | (_, Term::Var(_)) => true,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| x.could_unify(y))
            }
        }
    }

    pub fn is_variant_of(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }

    /// Replaces every subterm below `max_depth` by a distinct fresh variable.
    /// The result subsumes `self`.
    pub fn restrict(&self, max_depth: usize, fresh: &mut FreshVars) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            _ if max_depth == 0 => fresh.next_var(),
            _ if self.depth() <= max_depth => self.clone(),
            Term::Compound(name, args) => Term::Compound(
                name.clone(),
                args.iter()
                    .map(|a| a.restrict(max_depth - 1, fresh))
                    .collect(),
            ),
        }
    }

    /// Splits a (possibly partial) list into its items and final tail.
    pub fn as_list(&self) -> (Vec<&Term>, &Term) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Term::Compound(name, args) = cur {
            if &**name != CONS || args.len() != 2 {
                break;
            }
            items.push(&args[0]);
            cur = &args[1];
        }
        (items, cur)
    }
}

fn is_cons(t: &Term) -> bool {
    matches!(t, Term::Compound(name, args) if &**name == CONS && args.len() == 2)
}

fn needs_quotes(name: &str) -> bool {
    if name == NIL {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_lowercase() => {
            !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        Some(c) if c.is_ascii_digit() => !chars.all(|c| c.is_ascii_digit()),
        Some(_) => true,
    }
}

pub(crate) fn write_atom(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if needs_quotes(name) {
        f.write_char('\'')?;
        for c in name.chars() {
            if c == '\'' || c == '\\' {
                f.write_char('\\')?;
            }
            f.write_char(c)?;
        }
        f.write_char('\'')
    } else {
        f.write_str(name)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            t if is_cons(t) => {
                let (items, tail) = t.as_list();
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{item}")?;
                }
                if tail.atom_name() != Some(NIL) {
                    write!(f, "|{tail}")?;
                }
                f.write_str("]")
            }
            Term::Compound(name, args) => {
                write_atom(f, name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Error produced by the line-oriented text readers in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Term, SyntaxError> {
        let mut r = Reader::new(s, 1);
        let t = r.term()?;
        r.end()?;
        Ok(t)
    }
}

/// Cursor over one line of text, shared by the term, grammar, automaton and
/// forest readers.
pub(crate) struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    anon: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(src: &'a str, line: usize) -> Self {
        Reader {
            src,
            pos: 0,
            line,
            anon: 0,
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn advance(&mut self, bytes: usize) {
        self.pos = (self.pos + bytes).min(self.src.len());
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub(crate) fn end(&mut self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing input `{}`", self.rest())))
        }
    }

    /// Consumes `s` (after whitespace) if it is next.
    pub(crate) fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    /// A bare whitespace-delimited word.
    pub(crate) fn word(&mut self) -> Result<&'a str, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| !c.is_whitespace()) {
            self.bump();
        }
        if start == self.pos {
            Err(self.error("expected a word"))
        } else {
            Ok(&self.src[start..self.pos])
        }
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn quoted(&mut self) -> Result<String, SyntaxError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated quoted atom")),
                Some('\'') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => return Err(self.error("unterminated escape")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    /// An atom name: bare identifier, digit string or quoted.
    pub(crate) fn atom_name(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            Some('\'') => self.quoted(),
            Some('[') if self.rest().starts_with("[]") => {
                self.pos += 2;
                Ok(NIL.to_string())
            }
            Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                Ok(self.ident().to_string())
            }
            _ => Err(self.error("expected an atom")),
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("expected a term")),
            Some('[') => self.list(),
            Some(c) if c.is_ascii_uppercase() || c == '_' => {
                let name = self.ident();
                if name == "_" {
                    self.anon += 1;
                    Ok(Term::Var(format!("_Anon{}", self.anon).into()))
                } else {
                    Ok(Term::Var(name.into()))
                }
            }
            Some(c) if c == '\'' || c.is_ascii_lowercase() || c.is_ascii_digit() => {
                let name = self.atom_name()?;
                if self.peek() == Some('(') {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while self.eat(",") {
                        args.push(self.term()?);
                    }
                    self.expect(")")?;
                    Ok(Term::Compound(name.into(), args.into()))
                } else {
                    Ok(Term::atom(name))
                }
            }
            Some(c) => Err(self.error(format!("unexpected character `{c}`"))),
        }
    }

    fn list(&mut self) -> Result<Term, SyntaxError> {
        self.expect("[")?;
        if self.eat("]") {
            return Ok(Term::atom(NIL));
        }
        let mut items = vec![self.term()?];
        while self.eat(",") {
            items.push(self.term()?);
        }
        let tail = if self.eat("|") {
            Some(self.term()?)
        } else {
            None
        };
        self.expect("]")?;
        Ok(Term::list(items, tail))
    }
}

/// Source of fresh variable names (`_G0`, `_G1`, ...). Fresh names never
/// collide with names produced by the reader or by [`Term::canonical`].
#[derive(Debug, Default, Clone)]
pub struct FreshVars {
    next: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_var(&mut self) -> Term {
        let v = Term::Var(format!("_G{}", self.next).into());
        self.next += 1;
        v
    }

    /// Renames the variables of several terms consistently.
    pub fn rename_all<'a>(&mut self, terms: impl IntoIterator<Item = &'a Term>) -> Vec<Term> {
        let mut map: FxHashMap<Rc<str>, Term> = FxHashMap::default();
        terms
            .into_iter()
            .map(|t| {
                t.map_vars(&mut |v| {
                    map.entry(v.clone())
                        .or_insert_with(|| self.next_var())
                        .clone()
                })
            })
            .collect()
    }

    pub fn rename(&mut self, t: &Term) -> Term {
        self.rename_all([t]).pop().expect("one term in, one term out")
    }
}

/// Finite map from variables to terms, kept idempotent: no bound variable
/// occurs in any binding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Rc<str>, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(k, v)| (&**k, v))
    }

    /// Builds a substitution from raw bindings, resolving them against each
    /// other. Returns `None` when the bindings are cyclic.
    pub fn from_bindings(
        pairs: impl IntoIterator<Item = (String, Term)>,
    ) -> Option<Substitution> {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            s = unify(&Term::Var(v.into()), &t, &s)?;
        }
        Some(s)
    }

    /// Simultaneous replacement of bound variables. One pass reaches the
    /// fixpoint because the substitution is idempotent.
    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        t.try_map_vars(&mut |v| self.bindings.get(v).cloned())
            .unwrap_or_else(|| t.clone())
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings.iter().all(|(v, t)| {
            t != &Term::Var(v.clone()) && self.bindings.keys().all(|k| !t.occurs(k))
        })
    }

    // `value` must already be resolved against `self` and must not bind `var`
    // to itself.
    fn bind(&mut self, var: Rc<str>, value: Term) {
        for t in self.bindings.values_mut() {
            if t.occurs(&var) {
                *t = t.replace_var(&var, &value);
            }
        }
        self.bindings.insert(var, value);
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnifyOptions {
    pub occurs_check: bool,
}

impl Default for UnifyOptions {
    fn default() -> Self {
        UnifyOptions { occurs_check: true }
    }
}

/// Most general unifier of `a` and `b` extending `s`, with occurs-check.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    unify_with(a, b, s, UnifyOptions::default())
}

/// Robinson unification over an explicit work stack. With the occurs-check
/// disabled, a binding `X -> f(X)` may be recorded and the result is no
/// longer idempotent.
pub fn unify_with(
    a: &Term,
    b: &Term,
    s: &Substitution,
    opts: UnifyOptions,
) -> Option<Substitution> {
    let mut s = s.clone();
    let mut stack = vec![(a.clone(), b.clone())];
    // bindings are fully resolved, so only variables need dereferencing;
    // compound terms are resolved piecewise as their arguments are popped
    let deref = |t: Term, s: &Substitution| match t {
        Term::Var(v) => s.get(&v).cloned().unwrap_or(Term::Var(v)),
        t => t,
    };
    while let Some((x, y)) = stack.pop() {
        let x = deref(x, &s);
        let y = deref(y, &s);
        match (x, y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                let t = s.apply(&t);
                if t == Term::Var(v.clone()) {
                    continue;
                }
                if opts.occurs_check && t.occurs(&v) {
                    return None;
                }
                s.bind(v, t);
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
            }
        }
    }
    Some(s)
}

/// A variant of `t` whose variables avoid every name in `used`. Renamed
/// variables get a numeric suffix (`X` becomes `X1`, `X2`, ...).
pub fn rename_apart(t: &Term, used: &BTreeSet<String>) -> Term {
    let own: BTreeSet<String> = t.vars().into_iter().map(str::to_string).collect();
    let mut taken: BTreeSet<String> = used.union(&own).cloned().collect();
    let mut map: HashMap<String, String> = HashMap::new();
    for v in &own {
        if !used.contains(v) {
            continue;
        }
        let base = v.trim_end_matches(|c: char| c.is_ascii_digit());
        let base = if base.is_empty() { "V" } else { base };
        let fresh = (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| !taken.contains(n))
            .expect("unbounded range");
        taken.insert(fresh.clone());
        map.insert(v.clone(), fresh);
    }
    t.try_map_vars(&mut |v| map.get(&**v).map(|n| Term::Var(n.as_str().into())))
        .unwrap_or_else(|| t.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn subst(pairs: &[(&str, &str)]) -> Substitution {
        Substitution::from_bindings(pairs.iter().map(|(v, x)| (v.to_string(), t(x)))).unwrap()
    }

    #[test]
    fn reads_and_prints_list_sugar() {
        for src in ["f(a,[1,0|B],X)", "[]", "[a]", "[a,b|T]", "r([1|A],A,[1,1,1|B],B)", "'r/4'", r"'it\'s'"] {
            let parsed = t(src);
            assert_eq!(t(&parsed.to_string()), parsed, "{src}");
        }
        assert_eq!(t("[a,b]"), Term::list(vec![t("a"), t("b")], None));
        assert_eq!(t("f(a, [1,0|B], X)").to_string(), "f(a,[1,0|B],X)");
        assert_eq!(Term::atom("r/4").to_string(), "'r/4'");
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let x = t("f(_, _)");
        assert_eq!(x.vars().len(), 2);
    }

    #[test]
    fn rejects_malformed_terms() {
        assert!("f(a".parse::<Term>().is_err());
        assert!("f(a))".parse::<Term>().is_err());
        assert!("[a|]".parse::<Term>().is_err());
        assert!("+a".parse::<Term>().is_err());
    }

    #[test]
    fn unify_binds_variable() {
        let s = unify(&t("X"), &t("f(a)"), &Substitution::new()).unwrap();
        assert_eq!(s, subst(&[("X", "f(a)")]));
    }

    #[test]
    fn unify_both_sides() {
        let s = unify(&t("f(X,b)"), &t("f(a,Y)"), &Substitution::new()).unwrap();
        assert_eq!(s, subst(&[("X", "a"), ("Y", "b")]));
    }

    #[test]
    fn occurs_check_fails() {
        assert!(unify(&t("X"), &t("f(X)"), &Substitution::new()).is_none());
        let off = UnifyOptions { occurs_check: false };
        assert!(unify_with(&t("X"), &t("f(X)"), &Substitution::new(), off).is_some());
    }

    #[test]
    fn unify_difference_lists() {
        // Hand-run: r([1|A],A2,B,B2) = r([1|Z],Z,W,W2) gives A=Z, A2=Z, B=W, B2=W2
        // up to orientation of variable-variable bindings.
        let a = t("r([1|A],A2,B,B2)");
        let b = t("r([1|Z],Z,W,W2)");
        let s = unify(&a, &b, &Substitution::new()).unwrap();
        assert!(s.is_idempotent());
        assert_eq!(s.apply(&a), s.apply(&b));
        let same = |x: &str, y: &str| s.apply(&t(x)) == s.apply(&t(y));
        assert!(same("A2", "Z"));
        assert!(same("A", "Z"));
        assert!(same("B", "W"));
        assert!(same("B2", "W2"));
        assert!(!same("A", "B"));
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn apply_examples() {
        assert_eq!(subst(&[("X", "a")]).apply(&t("f(X,Y)")), t("f(a,Y)"));
        assert_eq!(Substitution::new().apply(&t("g(X,[a])")), t("g(X,[a])"));
        let s = subst(&[("X", "g(Y)"), ("Y", "b")]);
        assert!(s.is_idempotent());
        assert_eq!(s.apply(&t("X")), t("g(b)"));
    }

    #[test]
    fn rename_apart_examples() {
        let used: BTreeSet<String> = ["X".to_string()].into();
        assert_eq!(rename_apart(&t("f(X)"), &used), t("f(X1)"));
        assert_eq!(rename_apart(&t("a"), &used), t("a"));
        assert_eq!(rename_apart(&t("f(X,X)"), &used), t("f(X1,X1)"));
        // X1 already in the term, so X must not become X1
        let r = rename_apart(&t("f(X,X1)"), &used);
        assert!(r.is_variant_of(&t("f(X,X1)")));
        assert!(!r.occurs("X"));
    }

    #[test]
    fn canonical_identifies_variants() {
        assert_eq!(t("f(X,Y,X)").canonical(), t("f(A,B,A)").canonical());
        assert_ne!(t("f(X,Y,X)").canonical(), t("f(A,B,B)").canonical());
    }

    #[test]
    fn restrict_generalizes() {
        let mut fresh = FreshVars::new();
        let deep = t("f(g(h(a)),b)");
        let r = deep.restrict(2, &mut fresh);
        assert_eq!(r.depth(), 3);
        assert!(unify(&r, &deep, &Substitution::new()).is_some());
    }
}
