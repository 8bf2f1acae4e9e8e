//! Random closed terms for property tests and oracle cross-checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::programs::{identity, omega, self_apply};
use super::signature::Signature;
use super::term::{Name, Term, Value};

/// Draws terms of depth at most `depth` whose free variables lie in `ctx`.
///
/// Applications are biased towards redexes, and the small closed programs
/// `Ω`, `λx. x x` and the identity appear as leaves so that samples mix
/// divergence, effects and convergence.
pub struct TermSampler<'a> {
    sig: &'a Signature,
    ops: Vec<(Name, usize)>,
}

impl<'a> TermSampler<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        TermSampler {
            sig,
            ops: sig.ops().map(|(n, a)| (n.clone(), a)).collect(),
        }
    }

    pub fn signature(&self) -> &Signature {
        self.sig
    }

    pub fn term<R: Rng>(&self, rng: &mut R, ctx: &[Name], depth: usize) -> Term {
        let mut scope: Vec<Name> = ctx.to_vec();
        self.term_in(rng, &mut scope, depth.max(1))
    }

    pub fn value<R: Rng>(&self, rng: &mut R, ctx: &[Name], depth: usize) -> Value {
        let mut scope: Vec<Name> = ctx.to_vec();
        self.value_in(rng, &mut scope, depth)
    }

    fn fresh(scope: &[Name]) -> Name {
        Name::new(format!("r{}", scope.len()))
    }

    fn value_in<R: Rng>(&self, rng: &mut R, scope: &mut Vec<Name>, depth: usize) -> Value {
        let leaf = depth <= 1 || rng.gen_bool(0.3);
        if leaf {
            if !scope.is_empty() && (depth == 0 || rng.gen_bool(0.6)) {
                return Value::Free(scope.choose(rng).expect("nonempty").clone());
            }
            if depth == 0 {
                // No variable in scope and no room for a binder: fall back
                // to the smallest closed values, ignoring the depth bound.
                return identity();
            }
        }
        if depth < 2 {
            return match scope.choose(rng) {
                Some(x) => Value::Free(x.clone()),
                None => identity(),
            };
        }
        if rng.gen_bool(0.15) {
            return if rng.gen_bool(0.5) { identity() } else { self_apply() };
        }
        let x = Self::fresh(scope);
        scope.push(x.clone());
        let body = self.term_in(rng, scope, depth - 1);
        scope.pop();
        Value::lam(x.as_str(), body)
    }

    fn term_in<R: Rng>(&self, rng: &mut R, scope: &mut Vec<Name>, depth: usize) -> Term {
        if depth <= 1 {
            let nullary: Vec<&(Name, usize)> = self.ops.iter().filter(|(_, a)| *a == 0).collect();
            if let (Some((name, _)), true) = (nullary.choose(rng), rng.gen_bool(0.2)) {
                return Term::Op(name.clone(), Vec::new().into());
            }
            return Term::ret(self.value_in(rng, scope, 0));
        }
        let choice = rng.gen_range(0..100);
        match choice {
            0..=4 => omega(),
            5..=24 => Term::ret(self.value_in(rng, scope, depth - 1)),
            25..=49 => {
                // Redex or variable application.
                let f = if !scope.is_empty() && rng.gen_bool(0.3) {
                    Value::Free(scope.choose(rng).expect("nonempty").clone())
                } else {
                    self.value_in(rng, scope, (depth - 1).max(2))
                };
                let a = self.value_in(rng, scope, depth - 1);
                Term::app(f, a)
            }
            50..=72 => {
                let m = self.term_in(rng, scope, depth - 1);
                let x = Self::fresh(scope);
                scope.push(x.clone());
                let n = self.term_in(rng, scope, depth - 1);
                scope.pop();
                Term::seq(m, x.as_str(), n)
            }
            _ => {
                if self.ops.is_empty() {
                    return Term::ret(self.value_in(rng, scope, depth - 1));
                }
                let (name, arity) = self.ops.choose(rng).expect("nonempty").clone();
                let args: Vec<Term> = (0..arity)
                    .map(|_| self.term_in(rng, scope, depth - 1))
                    .collect();
                Term::Op(name, args.into())
            }
        }
    }
}
