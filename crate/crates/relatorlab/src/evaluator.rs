//! Indexed big-step semantics.
//!
//! [`Evaluator::approximate`] computes the `n`-th approximant of a closed
//! term by structural recursion on the index, memoised on the nameless term
//! and the index. [`derive`] builds the judgment tree rule by rule without
//! sharing and serves as an independent oracle.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monads::{MonValue, MonadSpec, Observation, OpInterp};
use crate::syntax::{open_term, Name, Term, Value};

pub type Sem = MonValue<Value>;

/// An approximant at a given index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxResult {
    pub term: Term,
    pub index: u32,
    pub value: Sem,
    /// The approximant at `index + 1` equals this one and is not ⊥.
    /// A ⊥ chain is never reported as stable, since divergence cannot be
    /// distinguished from slow convergence by looking one step ahead.
    pub stable: bool,
    /// Evaluation stopped early because the step budget ran out; `index`
    /// is then the last index that was fully computed.
    pub exhausted: bool,
}

impl ApproxResult {
    pub fn observation(&self, spec: &MonadSpec) -> Observation {
        spec.observe(&self.value)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub steps: u64,
    pub memo_hits: u64,
    pub memo_entries: usize,
}

/// A memoising evaluator for one monad.
pub struct Evaluator {
    spec: MonadSpec,
    bottom: Sem,
    ops: HashMap<(Name, usize), OpInterp>,
    memo: HashMap<(Term, u32), Sem>,
    stats: EvalStats,
    budget: Option<u64>,
}

impl Evaluator {
    pub fn new(spec: MonadSpec) -> Result<Evaluator> {
        let bottom = spec.bottom()?;
        Ok(Evaluator {
            spec,
            bottom,
            ops: HashMap::new(),
            memo: HashMap::new(),
            stats: EvalStats::default(),
            budget: None,
        })
    }

    /// Caps the number of rule applications across all calls.
    pub fn with_budget(mut self, steps: u64) -> Evaluator {
        self.budget = Some(steps);
        self
    }

    pub fn spec(&self) -> &MonadSpec {
        &self.spec
    }

    pub fn stats(&self) -> EvalStats {
        EvalStats {
            memo_entries: self.memo.len(),
            ..self.stats
        }
    }

    pub fn clear_memo(&mut self) {
        self.memo.clear();
    }

    /// `M⁽ⁿ⁾`.
    pub fn approximate(&mut self, m: &Term, n: u32) -> Result<Sem> {
        ensure_closed(m)?;
        self.approx(m, n)
    }

    /// The approximant at `max_n`, with one look-ahead step for stability.
    pub fn evaluate(&mut self, m: &Term, max_n: u32) -> Result<ApproxResult> {
        ensure_closed(m)?;
        let mut last = self.bottom.clone();
        let mut done = 0;
        // Ascending indices share the memo, so the sweep costs little more
        // than the final index alone, and a budget failure still leaves the
        // last complete approximant to report.
        for i in 1..=max_n + 1 {
            match self.approx(m, i) {
                Ok(v) => {
                    if i == max_n + 1 {
                        let stable = v == last && last != self.bottom;
                        return Ok(ApproxResult {
                            term: m.clone(),
                            index: max_n,
                            value: last,
                            stable,
                            exhausted: false,
                        });
                    }
                    last = v;
                    done = i;
                }
                Err(Error::Budget(_)) => {
                    return Ok(ApproxResult {
                        term: m.clone(),
                        index: done,
                        value: last,
                        stable: false,
                        exhausted: true,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        unreachable!("the loop returns at index max_n + 1")
    }

    fn op(&mut self, name: &Name, arity: usize) -> Result<OpInterp> {
        if let Some(i) = self.ops.get(&(name.clone(), arity)) {
            return Ok(i.clone());
        }
        let i = self.spec.interpretation(name.as_str(), arity)?;
        self.ops.insert((name.clone(), arity), i.clone());
        Ok(i)
    }

    fn tick(&mut self) -> Result<()> {
        self.stats.steps += 1;
        if self.budget.is_some_and(|b| self.stats.steps > b) {
            return Err(Error::Budget(format!(
                "evaluation exceeded {} rule applications",
                self.budget.unwrap_or_default()
            )));
        }
        Ok(())
    }

    fn approx(&mut self, m: &Term, n: u32) -> Result<Sem> {
        if n == 0 {
            return Ok(self.bottom.clone());
        }
        if let Term::Return(v) = m {
            return Ok(self.spec.unit(v.clone()));
        }
        let key = (m.clone(), n);
        if let Some(r) = self.memo.get(&key) {
            self.stats.memo_hits += 1;
            return Ok(r.clone());
        }
        self.tick()?;
        let r = match m {
            Term::Return(_) => unreachable!("handled above"),
            Term::App(v, w) => {
                let body = lambda_body(v)?;
                self.approx(&open_term(body, w), n - 1)?
            }
            Term::Seq(first, rest) => {
                let x = self.approx(first, n - 1)?;
                x.bind(|v| self.approx(&open_term(rest, v), n - 1))?
            }
            Term::Op(name, args) => {
                let interp = self.op(name, args.len())?;
                let mut xs = Vec::with_capacity(args.len());
                for a in args.iter() {
                    xs.push(self.approx(a, n - 1)?);
                }
                self.spec.apply(&interp, xs)?
            }
        };
        self.memo.insert(key, r.clone());
        Ok(r)
    }
}

fn lambda_body(v: &Value) -> Result<&Term> {
    match v {
        Value::Lam(b) => Ok(b),
        other => Err(Error::OpenTerm(format!("`{other}` in function position"))),
    }
}

fn ensure_closed(m: &Term) -> Result<()> {
    if m.is_closed() {
        return Ok(());
    }
    let fv: Vec<String> = m.free_vars().iter().map(|x| x.to_string()).collect();
    Err(Error::OpenTerm(if fv.is_empty() {
        "dangling bound variable".into()
    } else {
        fv.join(", ")
    }))
}

/// `M⁽ⁿ⁾` with a fresh evaluator.
pub fn approximate(m: &Term, n: u32, spec: &MonadSpec) -> Result<Sem> {
    Evaluator::new(spec.clone())?.approximate(m, n)
}

pub fn evaluate(m: &Term, max_n: u32, spec: &MonadSpec) -> Result<ApproxResult> {
    Evaluator::new(spec.clone())?.evaluate(m, max_n)
}

/// The rule concluding a judgment `M ⇓ₙ X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Bot,
    Ret,
    App,
    Seq,
    Op,
}

/// A derivation of `term ⇓_index result`.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub rule: Rule,
    pub term: Term,
    pub index: u32,
    pub result: Sem,
    pub premises: Vec<Judgment>,
}

impl Judgment {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Judgment::size).sum::<usize>()
    }
}

/// Builds the unique derivation of `M ⇓ₙ X` by explicit rule application.
pub fn derivation(m: &Term, n: u32, spec: &MonadSpec) -> Result<Judgment> {
    ensure_closed(m)?;
    let bottom = spec.bottom()?;
    derive_rec(m, n, spec, &bottom)
}

/// The conclusion of [`derivation`].
pub fn derive(m: &Term, n: u32, spec: &MonadSpec) -> Result<Sem> {
    Ok(derivation(m, n, spec)?.result)
}

fn derive_rec(m: &Term, n: u32, spec: &MonadSpec, bottom: &Sem) -> Result<Judgment> {
    let judge = |rule, result, premises| Judgment {
        rule,
        term: m.clone(),
        index: n,
        result,
        premises,
    };
    if n == 0 {
        return Ok(judge(Rule::Bot, bottom.clone(), vec![]));
    }
    let k = n - 1;
    Ok(match m {
        Term::Return(v) => judge(Rule::Ret, spec.unit(v.clone()), vec![]),
        Term::App(v, w) => {
            let p = derive_rec(&open_term(lambda_body(v)?, w), k, spec, bottom)?;
            let r = p.result.clone();
            judge(Rule::App, r, vec![p])
        }
        Term::Seq(first, rest) => {
            let head = derive_rec(first, k, spec, bottom)?;
            let mut premises = Vec::new();
            // One premise per carrier value of the head, solved once each.
            let mut solved: Vec<(Value, Sem)> = Vec::new();
            for v in head.result.support() {
                let p = derive_rec(&open_term(rest, v), k, spec, bottom)?;
                solved.push((v.clone(), p.result.clone()));
                premises.push(p);
            }
            let r = head.result.bind(|v| {
                solved
                    .iter()
                    .find(|(w, _)| w == v)
                    .map(|(_, y)| y.clone())
                    .ok_or_else(|| Error::Monad("missing premise".into()))
            })?;
            premises.insert(0, head);
            judge(Rule::Seq, r, premises)
        }
        Term::Op(name, args) => {
            let mut premises = Vec::with_capacity(args.len());
            for a in args.iter() {
                premises.push(derive_rec(a, k, spec, bottom)?);
            }
            let xs = premises.iter().map(|p| p.result.clone()).collect();
            let r = spec.interpret_op(name.as_str(), xs)?;
            judge(Rule::Op, r, premises)
        }
    })
}
