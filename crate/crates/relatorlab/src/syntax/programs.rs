//! Reference programs: the divergent term Ω and the two families of
//! recursive programs that build iterated compositions of a value `V`
//! probabilistically.
//!
//! `W` returns `V` with probability ½ and otherwise recurses and composes
//! `V` onto the result. `Z` threads an accumulator `r` (initially
//! `COMP(id, V)`) and either returns it or recurses on `COMP(r, V)`. The
//! `raise` variants replace the returning branch by a fair choice between
//! returning and raising an exception.
//!
//! Recursion goes through [`macros::fix`]; both programs re-enter their
//! recursive call through a sequencing step, so their unfoldings complete at
//! the same evaluation indices.

use super::macros::{comp, fix};
use super::term::{Name, Term, Value};

/// `λx. return x`.
pub fn identity() -> Value {
    Value::lam("x", Term::ret(Value::var("x")))
}

/// `λx. x x`.
pub fn self_apply() -> Value {
    Value::lam("x", Term::app(Value::var("x"), Value::var("x")))
}

/// `(λx. x x)(λx. x x)`.
pub fn omega() -> Term {
    Term::app(self_apply(), self_apply())
}

fn or(a: Term, b: Term) -> Term {
    Term::op("or", vec![a, b])
}

fn raise(e: &Name) -> Term {
    Term::op(format!("raise_{e}"), vec![])
}

/// `FIX functional to h. h arg`.
fn run_fix(functional: Value, arg: Value) -> Term {
    Term::seq(
        Term::app(fix(), functional),
        "h",
        Term::app(Value::var("h"), arg),
    )
}

fn w_family(v: &Value, stop: Term) -> Term {
    // λw. return (λd. or(stop, w d to g. return COMP(V, g)))
    let recurse = Term::seq(
        Term::app(Value::var("w"), Value::var("d")),
        "g",
        Term::ret(comp(v, &Value::var("g"))),
    );
    let step = Value::lam("d", or(stop, recurse));
    let functional = Value::lam("w", Term::ret(step));
    run_fix(functional, identity())
}

fn z_family(v: &Value, stop: impl Fn(Term) -> Term) -> Term {
    // λt. return (λr. or(stop(return r), return COMP(r, V) to q. t q))
    let recurse = Term::seq(
        Term::ret(comp(&Value::var("r"), v)),
        "q",
        Term::app(Value::var("t"), Value::var("q")),
    );
    let step = Value::lam("r", or(stop(Term::ret(Value::var("r"))), recurse));
    let functional = Value::lam("t", Term::ret(step));
    run_fix(functional, comp(&identity(), v))
}

/// `W → V ⊕ COMP(V, W)`.
pub fn w_program(v: &Value) -> Term {
    w_family(v, Term::ret(v.clone()))
}

/// `Z → T 1` with `T n → (R n) ⊕ T(n+1)`, `R 0 = id`, `R(n+1) = COMP(R n, V)`.
pub fn z_program(v: &Value) -> Term {
    z_family(v, |ret| ret)
}

/// `W^raise → (V ⊕ raise_e) ⊕ COMP(V, W^raise)`.
pub fn w_raise_program(v: &Value, e: &Name) -> Term {
    w_family(v, or(Term::ret(v.clone()), raise(e)))
}

/// `T n → ((R n) ⊕ raise_e) ⊕ T(n+1)`.
pub fn z_raise_program(v: &Value, e: &Name) -> Term {
    z_family(v, |ret| or(ret, raise(e)))
}

/// The value returned by `W` on its `k`-th unfolding (`k ≥ 1`).
pub fn w_unfolding(v: &Value, k: usize) -> Value {
    let mut acc = v.clone();
    for _ in 1..k {
        acc = comp(v, &acc);
    }
    acc
}

/// The value returned by `Z` on its `k`-th unfolding (`k ≥ 1`).
pub fn z_unfolding(v: &Value, k: usize) -> Value {
    let mut acc = comp(&identity(), v);
    for _ in 1..k {
        acc = comp(&acc, v);
    }
    acc
}
