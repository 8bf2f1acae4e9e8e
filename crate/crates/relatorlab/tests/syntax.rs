use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relatorlab::syntax::{
    alpha_eq, context, enumerate_terms, enumerate_values, free_vars, parse_term, print_term,
    substitute, Name, Signature, Term, Value,
};

/// Terms with explicit binder names, compared only up to renaming.
#[derive(Clone, Debug)]
enum N {
    Ret(V),
    App(V, V),
    Seq(Box<N>, String, Box<N>),
    Op(String, Vec<N>),
}

#[derive(Clone, Debug)]
enum V {
    Var(String),
    Lam(String, Box<N>),
}

const NAMES: [&str; 3] = ["x", "y", "z"];

fn gen_v(rng: &mut ChaCha8Rng, depth: usize) -> V {
    if depth == 0 || rng.gen_bool(0.4) {
        V::Var(NAMES[rng.gen_range(0..3)].into())
    } else {
        V::Lam(NAMES[rng.gen_range(0..3)].into(), Box::new(gen_n(rng, depth - 1)))
    }
}

fn gen_n(rng: &mut ChaCha8Rng, depth: usize) -> N {
    let d = depth.saturating_sub(1);
    match rng.gen_range(0..if depth == 0 { 1 } else { 4 }) {
        0 => N::Ret(gen_v(rng, d)),
        1 => N::App(gen_v(rng, d), gen_v(rng, d)),
        2 => N::Seq(
            Box::new(gen_n(rng, d)),
            NAMES[rng.gen_range(0..3)].into(),
            Box::new(gen_n(rng, d)),
        ),
        _ => N::Op("or".into(), vec![gen_n(rng, d), gen_n(rng, d)]),
    }
}

fn to_value(v: &V) -> Value {
    match v {
        V::Var(x) => Value::var(x),
        V::Lam(x, b) => Value::lam(x, to_term(b)),
    }
}

fn to_term(m: &N) -> Term {
    match m {
        N::Ret(v) => Term::ret(to_value(v)),
        N::App(v, w) => Term::app(to_value(v), to_value(w)),
        N::Seq(m, x, n) => Term::seq(to_term(m), x, to_term(n)),
        N::Op(f, args) => Term::op(f, args.iter().map(to_term).collect()),
    }
}

fn fv_n(m: &N) -> BTreeSet<String> {
    match m {
        N::Ret(v) => fv_v(v),
        N::App(v, w) => &fv_v(v) | &fv_v(w),
        N::Seq(m, x, n) => {
            let mut body = fv_n(n);
            body.remove(x);
            &fv_n(m) | &body
        }
        N::Op(_, args) => args.iter().flat_map(fv_n).collect(),
    }
}

fn fv_v(v: &V) -> BTreeSet<String> {
    match v {
        V::Var(x) => [x.clone()].into(),
        V::Lam(x, b) => {
            let mut s = fv_n(b);
            s.remove(x);
            s
        }
    }
}

/// Textual substitution that renames every binder it passes to a globally
/// fresh name first.
struct Naive {
    prefix: char,
    fresh: usize,
}

impl Naive {
    fn rename(&mut self, x: &str, body: &N) -> (String, N) {
        self.fresh += 1;
        let y = format!("{}{}", self.prefix, self.fresh);
        let renamed = self.subst_n(body, x, &V::Var(y.clone()));
        (y, renamed)
    }

    fn subst_v(&mut self, v: &V, x: &str, w: &V) -> V {
        match v {
            V::Var(y) if y == x => w.clone(),
            V::Var(_) => v.clone(),
            V::Lam(y, _) if y == x => v.clone(),
            V::Lam(y, b) => {
                let (y, b) = self.rename(y, b);
                V::Lam(y, Box::new(self.subst_n(&b, x, w)))
            }
        }
    }

    fn subst_n(&mut self, m: &N, x: &str, w: &V) -> N {
        match m {
            N::Ret(v) => N::Ret(self.subst_v(v, x, w)),
            N::App(a, b) => N::App(self.subst_v(a, x, w), self.subst_v(b, x, w)),
            N::Seq(a, y, b) => {
                let a = Box::new(self.subst_n(a, x, w));
                if y == x {
                    N::Seq(a, y.clone(), b.clone())
                } else {
                    let (y, b) = self.rename(y, b);
                    N::Seq(a, y, Box::new(self.subst_n(&b, x, w)))
                }
            }
            N::Op(f, args) => N::Op(f.clone(), args.iter().map(|a| self.subst_n(a, x, w)).collect()),
        }
    }
}

/// Renames every binder, leaving free names alone.
fn rename_binders(m: &N, prefix: char) -> N {
    let mut naive = Naive { prefix, fresh: 0 };
    fn go(m: &N, naive: &mut Naive) -> N {
        match m {
            N::Ret(v) => N::Ret(go_v(v, naive)),
            N::App(a, b) => N::App(go_v(a, naive), go_v(b, naive)),
            N::Seq(a, y, b) => {
                let a = go(a, naive);
                let (y, b) = naive.rename(y, b);
                N::Seq(Box::new(a), y, Box::new(go(&b, naive)))
            }
            N::Op(f, args) => N::Op(f.clone(), args.iter().map(|a| go(a, naive)).collect()),
        }
    }
    fn go_v(v: &V, naive: &mut Naive) -> V {
        match v {
            V::Var(_) => v.clone(),
            V::Lam(y, b) => {
                let (y, b) = naive.rename(y, b);
                V::Lam(y, Box::new(go(&b, naive)))
            }
        }
    }
    go(m, &mut naive)
}

fn or_sig() -> Signature {
    Signature::new([("or", 2)]).unwrap()
}

#[test]
fn substitution_agrees_with_naive_renaming() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let m = gen_n(&mut rng, 5);
        let w = gen_v(&mut rng, 3);
        let x = NAMES[rng.gen_range(0..3)];
        let expected = to_term(&Naive { prefix: 'f', fresh: 0 }.subst_n(&m, x, &w));
        let got = substitute(&to_term(&m), x, &to_value(&w));
        assert_eq!(got, expected, "{m:?}[{w:?}/{x}]");
    }
}

#[test]
fn free_variables_agree_with_named_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5_000 {
        let m = gen_n(&mut rng, 5);
        let got: BTreeSet<String> = free_vars(&to_term(&m)).iter().map(|x| x.to_string()).collect();
        assert_eq!(got, fv_n(&m));
    }
}

#[test]
fn binder_renaming_preserves_alpha_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5_000 {
        let m = gen_n(&mut rng, 5);
        let r = rename_binders(&m, 'r');
        assert!(alpha_eq(&to_term(&m), &to_term(&r)));
    }
}

#[test]
fn print_then_parse_on_enumerated_terms() {
    let sig = or_sig();
    for k in 0..2 {
        for t in enumerate_terms(&sig, &context(k), 3).unwrap() {
            let back = parse_term(&print_term(&t), &sig).unwrap();
            assert!(alpha_eq(&back, &t), "{}", print_term(&t));
        }
    }
}

/// Number of terms (values) of depth ≤ d over `c` free and `b` bound names,
/// counted by constructor.
fn count_terms(d: usize, names: u64, ops: &[usize]) -> u64 {
    if d == 0 {
        return 0;
    }
    let v = count_values(d - 1, names, ops);
    let t = count_terms(d - 1, names, ops);
    v + v * v + t * count_terms(d - 1, names + 1, ops) + ops.iter().map(|&a| t.pow(a as u32)).sum::<u64>()
}

/// Closed terms of depth ≤ 4 over `or/2`.
const GOLDEN_OR_DEPTH_4: u64 = 14_970;

fn count_values(d: usize, names: u64, ops: &[usize]) -> u64 {
    names + if d == 0 { 0 } else { count_terms(d - 1, names + 1, ops) }
}

#[test]
fn enumeration_counts() {
    let sig = or_sig();
    assert_eq!(count_terms(3, 0, &[2]), 6);
    assert_eq!(count_terms(4, 0, &[2]), GOLDEN_OR_DEPTH_4);
    for (k, d) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 2)] {
        let terms = enumerate_terms(&sig, &context(k), d).unwrap();
        let values = enumerate_values(&sig, &context(k), d).unwrap();
        assert_eq!(terms.len() as u64, count_terms(d, k as u64, &[2]), "k={k} d={d}");
        assert_eq!(values.len() as u64, count_values(d, k as u64, &[2]), "k={k} d={d}");
        let ctx: BTreeSet<Name> = context(k).into_iter().collect();
        assert!(terms.iter().all(|t| t.free_vars().is_subset(&ctx)));
        let distinct: BTreeSet<&Term> = terms.iter().collect();
        assert_eq!(distinct.len(), terms.len());
    }
    let pure = Signature::empty();
    assert!(enumerate_terms(&pure, &context(0), 1).unwrap().is_empty());
    assert_eq!(enumerate_values(&pure, &context(1), 1).unwrap(), vec![Value::var("x0")]);
    assert_eq!(enumerate_terms(&pure, &context(0), 3).unwrap().len(), 6);
}

fn arb_named() -> impl Strategy<Value = (N, V, V)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (gen_n(&mut rng, 4), gen_v(&mut rng, 3), gen_v(&mut rng, 3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn substitutions_commute((m, v, w) in arb_named()) {
        let (x, y) = ("x", "y");
        // Keep y out of v and x out of w.
        let z = V::Var("z".into());
        let v = to_value(&Naive { prefix: 'f', fresh: 0 }.subst_v(&v, y, &z));
        let w = to_value(&Naive { prefix: 'f', fresh: 0 }.subst_v(&w, x, &z));
        let m = to_term(&m);
        prop_assert_eq!(
            substitute(&substitute(&m, x, &v), y, &w),
            substitute(&substitute(&m, y, &w), x, &v)
        );
    }

    #[test]
    fn alpha_equivalence_is_an_equivalence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gen_n(&mut rng, 4);
        let b = rename_binders(&a, 'b');
        let c = rename_binders(&b, 'c');
        let (a, b, c) = (to_term(&a), to_term(&b), to_term(&c));
        prop_assert!(alpha_eq(&a, &a));
        prop_assert_eq!(alpha_eq(&a, &b), alpha_eq(&b, &a));
        prop_assert!(alpha_eq(&a, &b) && alpha_eq(&b, &c) && alpha_eq(&a, &c));
        let other = to_term(&gen_n(&mut rng, 4));
        prop_assert_eq!(alpha_eq(&a, &other), alpha_eq(&c, &other));
    }
}

#[test]
fn named_examples() {
    let sig = or_sig();
    let t = parse_term("return (\\x. return x)", &sig).unwrap();
    assert_eq!(t, Term::ret(Value::lam("x", Term::ret(Value::var("x")))));
    assert!(parse_term("or(return x, return x, return x)", &sig).is_err());
    let a = parse_term("return (\\x. return (\\y. x y))", &sig).unwrap();
    let b = parse_term("return (\\y. return (\\x. x y))", &sig).unwrap();
    assert!(!alpha_eq(&a, &b));
    let fv = free_vars(&parse_term("return x to x. return x", &sig).unwrap());
    assert_eq!(fv, [Name::new("x")].into());
}
