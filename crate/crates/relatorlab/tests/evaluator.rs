mod common;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relatorlab::evaluator::{approximate, derivation, derive, evaluate, Evaluator, Rule};
use relatorlab::monads::MonadSpec;
use relatorlab::rational::{q, Q};
use relatorlab::syntax::programs::{identity, omega, w_program};
use relatorlab::syntax::{Name, Term, TermSampler, Value};

use common::{monad, sample_triples};

#[test]
fn derivations_agree_with_approximants() {
    for (spec, t, n) in sample_triples(1_000, 11) {
        let a = derive(&t, n, &spec).unwrap();
        assert_eq!(a, derive(&t, n, &spec).unwrap());
        assert_eq!(a, approximate(&t, n, &spec).unwrap());
    }
}

#[test]
fn approximants_form_chains() {
    for (spec, t, n) in sample_triples(1_000, 12) {
        let mut ev = Evaluator::new(spec).unwrap();
        let a = ev.approximate(&t, n).unwrap();
        let b = ev.approximate(&t, n + 1).unwrap();
        assert!(a.leq(&b).unwrap());
    }
}

#[test]
fn memo_is_transparent() {
    let triples = sample_triples(300, 13);
    let mut shared: Vec<Evaluator> = MonadSpec::evaluable()
        .into_iter()
        .map(|m| Evaluator::new(m).unwrap())
        .collect();
    for (i, (spec, t, n)) in triples.iter().enumerate() {
        let k = i % shared.len();
        let warm = shared[k].approximate(t, *n).unwrap();
        assert_eq!(warm, Evaluator::new(spec.clone()).unwrap().approximate(t, *n).unwrap());
    }
}

#[test]
fn rule_zero_is_bottom() {
    for (spec, t, _) in sample_triples(70, 14) {
        assert_eq!(derive(&t, 0, &spec).unwrap(), spec.bottom().unwrap());
        assert_eq!(derivation(&t, 0, &spec).unwrap().rule, Rule::Bot);
    }
}

#[test]
fn op_rule_applies_the_algebra() {
    let spec = monad("dist");
    let sampler_sig = spec.signature();
    let sampler = TermSampler::new(&sampler_sig);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let (a, b) = (sampler.term(&mut rng, &[], 4), sampler.term(&mut rng, &[], 4));
        let n = rng.gen_range(0..6);
        let whole = derive(&Term::op("or", vec![a.clone(), b.clone()]), n + 1, &spec).unwrap();
        let parts = vec![derive(&a, n, &spec).unwrap(), derive(&b, n, &spec).unwrap()];
        assert_eq!(whole, spec.interpret_op("or", parts).unwrap());
    }
}

/// Stabilized semantics, if both sides of an equation stabilize.
fn sem(ev: &mut Evaluator, t: &Term) -> Option<relatorlab::evaluator::Sem> {
    let r = ev.evaluate(t, 24).ok()?;
    r.stable.then_some(r.value)
}

#[test]
fn semantic_equations_at_stabilization() {
    let x = Name::new("x");
    let mut checked = 0;
    for (k, spec) in MonadSpec::evaluable().into_iter().enumerate() {
        let sig = spec.signature();
        let sampler = TermSampler::new(&sig);
        let mut rng = ChaCha8Rng::seed_from_u64(16 + k as u64);
        let mut ev = Evaluator::new(spec.clone()).unwrap();
        for _ in 0..150 {
            let m = sampler.term(&mut rng, &[], 3);
            let body = sampler.term(&mut rng, std::slice::from_ref(&x), 3);
            let v = sampler.value(&mut rng, &[], 3);
            // (λx.N) V = N[V/x]
            let beta = Term::app(Value::lam("x", body.clone()), v.clone());
            if let (Some(a), Some(b)) = (sem(&mut ev, &beta), sem(&mut ev, &body.substitute("x", &v))) {
                assert_eq!(a, b);
                checked += 1;
            }
            // M to x. N = ⟦M⟧ >>= v ↦ ⟦N[v/x]⟧
            let seq = Term::seq(m.clone(), "x", body.clone());
            if let (Some(a), Some(mm)) = (sem(&mut ev, &seq), sem(&mut ev, &m)) {
                let parts: Option<Vec<_>> = mm
                    .support()
                    .into_iter()
                    .map(|w| sem(&mut ev, &body.substitute("x", w)).map(|s| (w.clone(), s)))
                    .collect();
                if let Some(parts) = parts {
                    let b = mm
                        .bind(|w| Ok(parts.iter().find(|(u, _)| u == w).unwrap().1.clone()))
                        .unwrap();
                    assert_eq!(a, b);
                    checked += 1;
                }
            }
            // return V = η V
            assert_eq!(sem(&mut ev, &Term::ret(v.clone())), Some(spec.unit(v.clone())));
        }
        for (name, arity) in sig.ops() {
            let args: Vec<Term> = (0..arity).map(|_| sampler.term(&mut rng, &[], 3)).collect();
            let parts: Option<Vec<_>> = args.iter().map(|a| sem(&mut ev, a)).collect();
            if let (Some(a), Some(parts)) = (sem(&mut ev, &Term::op(name.as_str(), args)), parts) {
                assert_eq!(a, spec.interpret_op(name.as_str(), parts).unwrap());
                checked += 1;
            }
        }
    }
    assert!(checked > 200, "only {checked} equations stabilized");
}

#[test]
fn evaluation_examples() {
    let d = monad("dist");
    for spec in MonadSpec::evaluable() {
        let r = evaluate(&Term::ret(identity()), 5, &spec).unwrap();
        assert!(r.stable);
        assert_eq!(r.value, spec.unit(identity()));
        let r = evaluate(&omega(), 50, &spec).unwrap();
        assert!(!r.stable);
        assert_eq!(r.value, spec.bottom().unwrap());
    }
    // W's mass has the form 1 - 2^-k and never decreases. Under this FIX
    // encoding the k-th unfolding completes at index 5k - 1 (5 for k = 1),
    // so index 30 gives k = 6 and k = 8 needs index 39.
    let w = w_program(&identity());
    let mut ev = Evaluator::new(d).unwrap();
    let mut prev = Q::from_integer(0.into());
    for n in 0..=40 {
        let m = ev.approximate(&w, n).unwrap().mass().unwrap();
        assert!(m >= prev);
        prev = m.clone();
        let k = (0..64).find(|&k| m == Q::one() - q(1, 1i64 << k)).expect("dyadic mass");
        let expected = if n < 5 { 0 } else { ((n + 1) / 5) as usize };
        assert_eq!(k, expected, "index {n}");
    }
    assert!(ev.approximate(&w, 39).unwrap().mass().unwrap() >= Q::one() - q(1, 1 << 8));
}
