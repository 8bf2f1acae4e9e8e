//! Surface macros: composition, a call-by-value fixed-point combinator and
//! Scott numerals.

use super::term::{Term, Value};

// Macro-introduced binders use names outside the surface identifier syntax,
// so they can never capture a user variable.
const Y: &str = "#y";
const Z: &str = "#z";

/// `COMP(v, w)` is `λy. (w y) to z. v z`: apply `w` first, then `v`.
pub fn comp(v: &Value, w: &Value) -> Value {
    let body = Term::seq(
        Term::app(w.clone(), Value::var(Y)),
        Z,
        Term::app(v.clone(), Value::var(Z)),
    );
    Value::lam(Y, body)
}

/// `λf. A A` with `A = λx. f (λv. x x to g. g v)`.
///
/// `(FIX F) to h. h a` evaluates `F rec` where `rec a` re-enters the
/// recursion, so each unfolding costs one call of `F`.
pub fn fix() -> Value {
    let delayed = Value::lam(
        "#v",
        Term::seq(
            Term::app(Value::var("#x"), Value::var("#x")),
            "#g",
            Term::app(Value::var("#g"), Value::var("#v")),
        ),
    );
    let a = Value::lam("#x", Term::app(Value::var("#f"), delayed));
    Value::lam("#f", Term::app(a.clone(), a))
}

/// Scott numerals: `0 = λz. return (λs. return z)` and
/// `n+1 = λz. return (λs. s n)`, so `NUM(k) zb to h. h sb` returns `zb`
/// for zero and runs `sb` on the predecessor otherwise.
pub fn numeral(n: u64) -> Value {
    let mut v = Value::lam(
        "#z",
        Term::ret(Value::lam("#s", Term::ret(Value::var("#z")))),
    );
    for _ in 0..n {
        v = succ(&v);
    }
    v
}

pub fn succ(pred: &Value) -> Value {
    Value::lam(
        "#z",
        Term::ret(Value::lam(
            "#s",
            Term::app(Value::var("#s"), pred.clone()),
        )),
    )
}
