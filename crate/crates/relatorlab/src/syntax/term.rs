use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// An interned identifier: variable, operation symbol, exception, state or
/// output character.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Self {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// Values in locally nameless form.
///
/// Bound variables are de Bruijn indices counted from the innermost binder;
/// free variables carry their name. Derived equality is α-equivalence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bound(u32),
    Free(Name),
    /// `λ. body`, binding index 0 in `body`.
    Lam(Arc<Term>),
}

/// Fine-grain computations.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Return(Value),
    App(Value, Value),
    /// `m to x. n`, binding index 0 in `n`.
    Seq(Arc<Term>, Arc<Term>),
    Op(Name, Arc<[Term]>),
}

/// A parsed phrase is either a computation or a value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Phrase {
    Term(Term),
    Value(Value),
}

impl Value {
    pub fn var(name: impl AsRef<str>) -> Value {
        Value::Free(Name::new(name))
    }

    /// `λx. body` where `x` occurs free in `body`.
    pub fn lam(x: &str, body: Term) -> Value {
        Value::Lam(Arc::new(close_term(&body, x, 0)))
    }

    pub fn depth(&self) -> usize {
        match self {
            Value::Bound(_) | Value::Free(_) => 0,
            Value::Lam(b) => 1 + b.depth(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty() && self.locally_closed(0)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Value::Bound(_) => {}
            Value::Free(x) => {
                out.insert(x.clone());
            }
            Value::Lam(b) => b.collect_free(out),
        }
    }

    pub(crate) fn locally_closed(&self, depth: u32) -> bool {
        match self {
            Value::Bound(i) => *i < depth,
            Value::Free(_) => true,
            Value::Lam(b) => b.locally_closed(depth + 1),
        }
    }

    /// Replaces the free variable `x` by `v`.
    pub fn substitute(&self, x: &str, v: &Value) -> Value {
        subst_value(self, x, v).unwrap_or_else(|| self.clone())
    }

    pub fn size(&self) -> usize {
        match self {
            Value::Bound(_) | Value::Free(_) => 1,
            Value::Lam(b) => 1 + b.size(),
        }
    }
}

impl Term {
    pub fn ret(v: Value) -> Term {
        Term::Return(v)
    }

    pub fn app(v: Value, w: Value) -> Term {
        Term::App(v, w)
    }

    /// `m to x. n` where `x` occurs free in `n`.
    pub fn seq(m: Term, x: &str, n: Term) -> Term {
        Term::Seq(Arc::new(m), Arc::new(close_term(&n, x, 0)))
    }

    pub fn op(name: impl AsRef<str>, args: Vec<Term>) -> Term {
        Term::Op(Name::new(name), args.into())
    }

    /// AST depth: variables have depth 0, every constructor adds one.
    pub fn depth(&self) -> usize {
        match self {
            Term::Return(v) => 1 + v.depth(),
            Term::App(v, w) => 1 + v.depth().max(w.depth()),
            Term::Seq(m, n) => 1 + m.depth().max(n.depth()),
            Term::Op(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Return(v) => 1 + v.size(),
            Term::App(v, w) => 1 + v.size() + w.size(),
            Term::Seq(m, n) => 1 + m.size() + n.size(),
            Term::Op(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Return(v) => v.collect_free(out),
            Term::App(v, w) => {
                v.collect_free(out);
                w.collect_free(out);
            }
            Term::Seq(m, n) => {
                m.collect_free(out);
                n.collect_free(out);
            }
            Term::Op(_, args) => args.iter().for_each(|a| a.collect_free(out)),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty() && self.locally_closed(0)
    }

    pub(crate) fn locally_closed(&self, depth: u32) -> bool {
        match self {
            Term::Return(v) => v.locally_closed(depth),
            Term::App(v, w) => v.locally_closed(depth) && w.locally_closed(depth),
            Term::Seq(m, n) => m.locally_closed(depth) && n.locally_closed(depth + 1),
            Term::Op(_, args) => args.iter().all(|a| a.locally_closed(depth)),
        }
    }

    /// Replaces the free variable `x` by `v`. `v` must be locally closed,
    /// which every value built through this module is, so capture cannot
    /// occur.
    pub fn substitute(&self, x: &str, v: &Value) -> Term {
        subst_term(self, x, v).unwrap_or_else(|| self.clone())
    }

    /// Operation symbols occurring in the term, with their arities.
    pub fn operations(&self) -> BTreeSet<(Name, usize)> {
        let mut out = BTreeSet::new();
        self.collect_ops(&mut out);
        out
    }

    fn collect_ops(&self, out: &mut BTreeSet<(Name, usize)>) {
        match self {
            Term::Return(v) => v.collect_ops(out),
            Term::App(v, w) => {
                v.collect_ops(out);
                w.collect_ops(out);
            }
            Term::Seq(m, n) => {
                m.collect_ops(out);
                n.collect_ops(out);
            }
            Term::Op(name, args) => {
                out.insert((name.clone(), args.len()));
                args.iter().for_each(|a| a.collect_ops(out));
            }
        }
    }
}

impl Value {
    fn collect_ops(&self, out: &mut BTreeSet<(Name, usize)>) {
        if let Value::Lam(b) = self {
            b.collect_ops(out);
        }
    }
}

impl Phrase {
    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            Phrase::Term(t) => t.free_vars(),
            Phrase::Value(v) => v.free_vars(),
        }
    }

    pub fn into_term(self) -> Option<Term> {
        match self {
            Phrase::Term(t) => Some(t),
            Phrase::Value(_) => None,
        }
    }

    pub fn into_value(self) -> Option<Value> {
        match self {
            Phrase::Value(v) => Some(v),
            Phrase::Term(_) => None,
        }
    }
}

/// α-equivalence. Binders are nameless, so this is structural equality.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

/// Free variables of a term.
pub fn free_vars(m: &Term) -> BTreeSet<Name> {
    m.free_vars()
}

/// Capture-avoiding substitution `m[v/x]`.
pub fn substitute(m: &Term, x: &str, v: &Value) -> Term {
    m.substitute(x, v)
}

// Each helper returns `None` when nothing changed, so untouched subtrees
// keep their shared allocation.

fn subst_value(val: &Value, x: &str, v: &Value) -> Option<Value> {
    match val {
        Value::Free(y) if y.as_str() == x => Some(v.clone()),
        Value::Free(_) | Value::Bound(_) => None,
        Value::Lam(b) => subst_term(b, x, v).map(|b| Value::Lam(Arc::new(b))),
    }
}

fn subst_term(t: &Term, x: &str, v: &Value) -> Option<Term> {
    match t {
        Term::Return(a) => subst_value(a, x, v).map(Term::Return),
        Term::App(a, b) => {
            let (na, nb) = (subst_value(a, x, v), subst_value(b, x, v));
            if na.is_none() && nb.is_none() {
                return None;
            }
            Some(Term::App(
                na.unwrap_or_else(|| a.clone()),
                nb.unwrap_or_else(|| b.clone()),
            ))
        }
        Term::Seq(m, n) => {
            let (nm, nn) = (subst_term(m, x, v), subst_term(n, x, v));
            if nm.is_none() && nn.is_none() {
                return None;
            }
            Some(Term::Seq(
                nm.map(Arc::new).unwrap_or_else(|| m.clone()),
                nn.map(Arc::new).unwrap_or_else(|| n.clone()),
            ))
        }
        Term::Op(name, args) => map_args(args, |a| subst_term(a, x, v))
            .map(|args| Term::Op(name.clone(), args)),
    }
}

fn map_args(args: &Arc<[Term]>, f: impl Fn(&Term) -> Option<Term>) -> Option<Arc<[Term]>> {
    let mapped: Vec<Option<Term>> = args.iter().map(&f).collect();
    if mapped.iter().all(Option::is_none) {
        return None;
    }
    Some(
        mapped
            .into_iter()
            .zip(args.iter())
            .map(|(m, a)| m.unwrap_or_else(|| a.clone()))
            .collect(),
    )
}

/// Instantiates the outermost bound variable of a binder body with `v`.
pub fn open_term(body: &Term, v: &Value) -> Term {
    open_t(body, 0, v).unwrap_or_else(|| body.clone())
}

/// Instantiates a binder body with a fresh free variable.
pub fn open_with_name(body: &Term, x: &Name) -> Term {
    open_term(body, &Value::Free(x.clone()))
}

fn open_v(val: &Value, depth: u32, v: &Value) -> Option<Value> {
    match val {
        Value::Bound(i) if *i == depth => Some(v.clone()),
        Value::Bound(_) | Value::Free(_) => None,
        Value::Lam(b) => open_t(b, depth + 1, v).map(|b| Value::Lam(Arc::new(b))),
    }
}

fn open_t(t: &Term, depth: u32, v: &Value) -> Option<Term> {
    match t {
        Term::Return(a) => open_v(a, depth, v).map(Term::Return),
        Term::App(a, b) => {
            let (na, nb) = (open_v(a, depth, v), open_v(b, depth, v));
            if na.is_none() && nb.is_none() {
                return None;
            }
            Some(Term::App(
                na.unwrap_or_else(|| a.clone()),
                nb.unwrap_or_else(|| b.clone()),
            ))
        }
        Term::Seq(m, n) => {
            let (nm, nn) = (open_t(m, depth, v), open_t(n, depth + 1, v));
            if nm.is_none() && nn.is_none() {
                return None;
            }
            Some(Term::Seq(
                nm.map(Arc::new).unwrap_or_else(|| m.clone()),
                nn.map(Arc::new).unwrap_or_else(|| n.clone()),
            ))
        }
        Term::Op(name, args) => {
            map_args(args, |a| open_t(a, depth, v)).map(|args| Term::Op(name.clone(), args))
        }
    }
}

/// Abstracts the free variable `x` into the bound index `depth`.
pub(crate) fn close_term(t: &Term, x: &str, depth: u32) -> Term {
    close_t(t, x, depth).unwrap_or_else(|| t.clone())
}

fn close_v(val: &Value, x: &str, depth: u32) -> Option<Value> {
    match val {
        Value::Free(y) if y.as_str() == x => Some(Value::Bound(depth)),
        Value::Free(_) | Value::Bound(_) => None,
        Value::Lam(b) => close_t(b, x, depth + 1).map(|b| Value::Lam(Arc::new(b))),
    }
}

fn close_t(t: &Term, x: &str, depth: u32) -> Option<Term> {
    match t {
        Term::Return(a) => close_v(a, x, depth).map(Term::Return),
        Term::App(a, b) => {
            let (na, nb) = (close_v(a, x, depth), close_v(b, x, depth));
            if na.is_none() && nb.is_none() {
                return None;
            }
            Some(Term::App(
                na.unwrap_or_else(|| a.clone()),
                nb.unwrap_or_else(|| b.clone()),
            ))
        }
        Term::Seq(m, n) => {
            let (nm, nn) = (close_t(m, x, depth), close_t(n, x, depth + 1));
            if nm.is_none() && nn.is_none() {
                return None;
            }
            Some(Term::Seq(
                nm.map(Arc::new).unwrap_or_else(|| m.clone()),
                nn.map(Arc::new).unwrap_or_else(|| n.clone()),
            ))
        }
        Term::Op(name, args) => {
            map_args(args, |a| close_t(a, x, depth)).map(|args| Term::Op(name.clone(), args))
        }
    }
}
