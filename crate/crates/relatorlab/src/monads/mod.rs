//! Concrete monads with their ωCPPO order and Σ-algebra structure.
//!
//! Operation symbols are interpreted by naming convention:
//!
//! | symbol | arity | monads |
//! |---|---|---|
//! | `or` | 2 | union in `nondet`, fair choice in `dist` and `probexc` |
//! | `or_P_Q` | 2 | choice taking the first branch with probability `P/Q` |
//! | `raise_e` | 0 | `exc`, `partexc`, `probexc`, for `e` in the exception set |
//! | `read` | number of states | `state`: continue with the branch of the current state |
//! | `write_s` | 1 | `state`: store `s` and continue |
//! | `print_c` | 1 | `output`, for `c` in the alphabet |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::syntax::{Name, Signature};

mod value;

pub use value::{MonValue, Observation, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonadKind {
    Partiality,
    Exceptions,
    PartialityExceptions,
    FiniteNondet,
    Subdistribution,
    GlobalState,
    Output,
    ProbExceptions,
}

impl MonadKind {
    /// Short names used on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            MonadKind::Partiality => "partial",
            MonadKind::Exceptions => "exc",
            MonadKind::PartialityExceptions => "partexc",
            MonadKind::FiniteNondet => "nondet",
            MonadKind::Subdistribution => "dist",
            MonadKind::GlobalState => "state",
            MonadKind::Output => "output",
            MonadKind::ProbExceptions => "probexc",
        }
    }
}

impl fmt::Display for MonadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// A monad together with its finite parameter sets.
///
/// `Exceptions` is the plain `X + E` monad. It has no least element, so it
/// cannot host the evaluator; it serves as an inner layer of composed
/// relators and as a target for the relator suites.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonadSpec {
    Partiality,
    Exceptions { exceptions: Vec<Name> },
    PartialityExceptions { exceptions: Vec<Name> },
    FiniteNondet,
    Subdistribution,
    GlobalState { states: Vec<Name> },
    Output { alphabet: Vec<Name> },
    ProbExceptions { exceptions: Vec<Name> },
}

/// The resolved meaning of an operation symbol in a given monad.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpInterp {
    Union,
    /// Probabilistic choice; the weight of the first argument.
    Choice(Q),
    Raise(Name),
    Read,
    /// Store the state with this index.
    Write(usize),
    Print(Name),
}

fn names(xs: &[&str]) -> Vec<Name> {
    xs.iter().map(Name::new).collect()
}

impl MonadSpec {
    pub fn kind(&self) -> MonadKind {
        match self {
            MonadSpec::Partiality => MonadKind::Partiality,
            MonadSpec::Exceptions { .. } => MonadKind::Exceptions,
            MonadSpec::PartialityExceptions { .. } => MonadKind::PartialityExceptions,
            MonadSpec::FiniteNondet => MonadKind::FiniteNondet,
            MonadSpec::Subdistribution => MonadKind::Subdistribution,
            MonadSpec::GlobalState { .. } => MonadKind::GlobalState,
            MonadSpec::Output { .. } => MonadKind::Output,
            MonadSpec::ProbExceptions { .. } => MonadKind::ProbExceptions,
        }
    }

    /// The instance for a command-line name with its default parameters:
    /// exceptions `{e}`, states `{true, false}`, alphabet `{a, b}`.
    pub fn from_name(name: &str) -> Result<MonadSpec> {
        Ok(match name {
            "partial" => MonadSpec::Partiality,
            "exc" => MonadSpec::Exceptions {
                exceptions: names(&["e"]),
            },
            "partexc" => MonadSpec::PartialityExceptions {
                exceptions: names(&["e"]),
            },
            "nondet" => MonadSpec::FiniteNondet,
            "dist" => MonadSpec::Subdistribution,
            "state" => MonadSpec::GlobalState {
                states: names(&["true", "false"]),
            },
            "output" => MonadSpec::Output {
                alphabet: names(&["a", "b"]),
            },
            "probexc" => MonadSpec::ProbExceptions {
                exceptions: names(&["e"]),
            },
            other => return Err(Error::Monad(format!("unknown monad `{other}`"))),
        })
    }

    /// Replaces the parameter set of the instance (exceptions, states or
    /// alphabet, whichever it has).
    pub fn with_parameters(self, params: Vec<Name>) -> Result<MonadSpec> {
        let distinct: BTreeSet<&Name> = params.iter().collect();
        if params.is_empty() || distinct.len() != params.len() {
            return Err(Error::Monad(
                "parameter sets must be nonempty and duplicate-free".into(),
            ));
        }
        let suffix = |p: &Name| {
            !p.as_str().is_empty()
                && p.as_str().chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        if !params.iter().all(suffix) {
            return Err(Error::Monad("parameters must be identifier suffixes".into()));
        }
        Ok(match self {
            MonadSpec::Exceptions { .. } => MonadSpec::Exceptions { exceptions: params },
            MonadSpec::PartialityExceptions { .. } => {
                MonadSpec::PartialityExceptions { exceptions: params }
            }
            MonadSpec::ProbExceptions { .. } => MonadSpec::ProbExceptions { exceptions: params },
            MonadSpec::GlobalState { .. } => MonadSpec::GlobalState { states: params },
            MonadSpec::Output { .. } => MonadSpec::Output { alphabet: params },
            other => {
                return Err(Error::Monad(format!(
                    "the {} monad takes no parameters",
                    other.kind()
                )))
            }
        })
    }

    /// The seven monads with a least element, at default parameters.
    pub fn evaluable() -> Vec<MonadSpec> {
        ["partial", "partexc", "nondet", "dist", "state", "output", "probexc"]
            .iter()
            .map(|n| MonadSpec::from_name(n).expect("known name"))
            .collect()
    }

    pub fn exceptions(&self) -> &[Name] {
        match self {
            MonadSpec::Exceptions { exceptions }
            | MonadSpec::PartialityExceptions { exceptions }
            | MonadSpec::ProbExceptions { exceptions } => exceptions,
            _ => &[],
        }
    }

    pub fn states(&self) -> &[Name] {
        match self {
            MonadSpec::GlobalState { states } => states,
            _ => &[],
        }
    }

    pub fn alphabet(&self) -> &[Name] {
        match self {
            MonadSpec::Output { alphabet } => alphabet,
            _ => &[],
        }
    }

    /// The operation symbols interpreted by default. Further `or_P_Q`
    /// symbols may be declared in a user signature.
    pub fn signature(&self) -> Signature {
        let mut ops: Vec<(String, usize)> = Vec::new();
        match self {
            MonadSpec::FiniteNondet | MonadSpec::Subdistribution => ops.push(("or".into(), 2)),
            MonadSpec::ProbExceptions { exceptions } => {
                ops.push(("or".into(), 2));
                ops.extend(exceptions.iter().map(|e| (format!("raise_{e}"), 0)));
            }
            MonadSpec::Exceptions { exceptions }
            | MonadSpec::PartialityExceptions { exceptions } => {
                ops.extend(exceptions.iter().map(|e| (format!("raise_{e}"), 0)));
            }
            MonadSpec::GlobalState { states } => {
                ops.push(("read".into(), states.len()));
                ops.extend(states.iter().map(|s| (format!("write_{s}"), 1)));
            }
            MonadSpec::Output { alphabet } => {
                ops.extend(alphabet.iter().map(|c| (format!("print_{c}"), 1)));
            }
            MonadSpec::Partiality => {}
        }
        Signature::new(ops).expect("default signatures are well formed")
    }

    fn uninterpretable(&self, op: &str) -> Error {
        Error::Uninterpretable {
            op: op.to_string(),
            monad: self.kind().to_string(),
        }
    }

    /// Resolves an operation symbol of the given arity.
    pub fn interpretation(&self, op: &str, arity: usize) -> Result<OpInterp> {
        let interp = self.resolve(op).ok_or_else(|| self.uninterpretable(op))?;
        let expected = match interp {
            OpInterp::Union | OpInterp::Choice(_) => 2,
            OpInterp::Raise(_) => 0,
            OpInterp::Read => self.states().len(),
            OpInterp::Write(_) | OpInterp::Print(_) => 1,
        };
        if arity != expected {
            return Err(Error::ArityMismatch {
                name: op.to_string(),
                expected,
                found: arity,
            });
        }
        Ok(interp)
    }

    fn resolve(&self, op: &str) -> Option<OpInterp> {
        let probabilistic = matches!(
            self,
            MonadSpec::Subdistribution | MonadSpec::ProbExceptions { .. }
        );
        if op == "or" {
            return match self {
                MonadSpec::FiniteNondet => Some(OpInterp::Union),
                _ if probabilistic => Some(OpInterp::Choice(q(1, 2))),
                _ => None,
            };
        }
        if let Some(rest) = op.strip_prefix("or_") {
            let (p, d) = rest.split_once('_')?;
            let (p, d): (i64, i64) = (p.parse().ok()?, d.parse().ok()?);
            return (probabilistic && d > 0 && p <= d).then(|| OpInterp::Choice(q(p, d)));
        }
        if let Some(e) = op.strip_prefix("raise_") {
            return self
                .exceptions()
                .iter()
                .find(|x| x.as_str() == e)
                .filter(|_| self.kind() != MonadKind::Partiality)
                .map(|x| OpInterp::Raise(x.clone()));
        }
        if op == "read" && !self.states().is_empty() {
            return Some(OpInterp::Read);
        }
        if let Some(s) = op.strip_prefix("write_") {
            return self
                .states()
                .iter()
                .position(|x| x.as_str() == s)
                .map(OpInterp::Write);
        }
        if let Some(c) = op.strip_prefix("print_") {
            return self
                .alphabet()
                .iter()
                .find(|x| x.as_str() == c)
                .map(|x| OpInterp::Print(x.clone()));
        }
        None
    }

    /// Checks that every symbol of `sig` is interpretable.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        for (name, arity) in sig.ops() {
            self.interpretation(name.as_str(), arity)?;
        }
        Ok(())
    }

    /// η.
    pub fn unit<A: Ord + Clone>(&self, a: A) -> MonValue<A> {
        match self {
            MonadSpec::Partiality => MonValue::Partial(Some(a)),
            MonadSpec::Exceptions { .. } => MonValue::Exc(Outcome::Just(a)),
            MonadSpec::PartialityExceptions { .. } => MonValue::PartExc(Some(Outcome::Just(a))),
            MonadSpec::FiniteNondet => MonValue::Nondet(BTreeSet::from([a])),
            MonadSpec::Subdistribution => MonValue::Dist(BTreeMap::from([(a, Q::one())])),
            MonadSpec::GlobalState { states } => {
                MonValue::State((0..states.len()).map(|s| Some((a.clone(), s))).collect())
            }
            MonadSpec::Output { .. } => MonValue::Output(Vec::new(), Some(a)),
            MonadSpec::ProbExceptions { .. } => {
                MonValue::ProbExc(BTreeMap::from([(Outcome::Just(a), Q::one())]))
            }
        }
    }

    /// The least element.
    pub fn bottom<A: Ord + Clone>(&self) -> Result<MonValue<A>> {
        Ok(match self {
            MonadSpec::Partiality => MonValue::Partial(None),
            MonadSpec::Exceptions { .. } => return Err(Error::NoBottom(self.kind().to_string())),
            MonadSpec::PartialityExceptions { .. } => MonValue::PartExc(None),
            MonadSpec::FiniteNondet => MonValue::Nondet(BTreeSet::new()),
            MonadSpec::Subdistribution => MonValue::Dist(BTreeMap::new()),
            MonadSpec::GlobalState { states } => MonValue::State(vec![None; states.len()]),
            MonadSpec::Output { .. } => MonValue::Output(Vec::new(), None),
            MonadSpec::ProbExceptions { .. } => MonValue::ProbExc(BTreeMap::new()),
        })
    }

    /// `σ^T(args)` for a resolved interpretation.
    pub fn apply<A: Ord + Clone>(
        &self,
        op: &OpInterp,
        args: Vec<MonValue<A>>,
    ) -> Result<MonValue<A>> {
        for a in &args {
            if a.kind() != self.kind() {
                return Err(Error::KindMismatch {
                    expected: self.kind().to_string(),
                    found: a.kind().to_string(),
                });
            }
        }
        if let (OpInterp::Read, MonadSpec::GlobalState { states }) = (op, self) {
            let mut table = Vec::with_capacity(states.len());
            for (s, arg) in args.iter().enumerate() {
                match arg {
                    MonValue::State(t) => table.push(t[s].clone()),
                    _ => unreachable!("kinds checked above"),
                }
            }
            return Ok(MonValue::State(table));
        }
        let mut args = args.into_iter();
        let mut take = |_: usize| args.next().expect("arity checked by interpretation");
        Ok(match (op, self) {
            (OpInterp::Union, MonadSpec::FiniteNondet) => match (take(0), take(1)) {
                (MonValue::Nondet(mut x), MonValue::Nondet(y)) => {
                    x.extend(y);
                    MonValue::Nondet(x)
                }
                _ => unreachable!("kinds checked above"),
            },
            (OpInterp::Choice(p), MonadSpec::Subdistribution) => match (take(0), take(1)) {
                (MonValue::Dist(x), MonValue::Dist(y)) => MonValue::Dist(mix(p, x, y)),
                _ => unreachable!("kinds checked above"),
            },
            (OpInterp::Choice(p), MonadSpec::ProbExceptions { .. }) => match (take(0), take(1)) {
                (MonValue::ProbExc(x), MonValue::ProbExc(y)) => MonValue::ProbExc(mix(p, x, y)),
                _ => unreachable!("kinds checked above"),
            },
            (OpInterp::Raise(e), MonadSpec::Exceptions { .. }) => {
                MonValue::Exc(Outcome::Raised(e.clone()))
            }
            (OpInterp::Raise(e), MonadSpec::PartialityExceptions { .. }) => {
                MonValue::PartExc(Some(Outcome::Raised(e.clone())))
            }
            (OpInterp::Raise(e), MonadSpec::ProbExceptions { .. }) => {
                MonValue::ProbExc(BTreeMap::from([(Outcome::Raised(e.clone()), Q::one())]))
            }
            (OpInterp::Write(s), MonadSpec::GlobalState { states }) => match take(0) {
                MonValue::State(t) => MonValue::State(vec![t[*s].clone(); states.len()]),
                _ => unreachable!("kinds checked above"),
            },
            (OpInterp::Print(c), MonadSpec::Output { .. }) => match take(0) {
                MonValue::Output(mut u, x) => {
                    u.insert(0, c.clone());
                    MonValue::Output(u, x)
                }
                _ => unreachable!("kinds checked above"),
            },
            _ => return Err(Error::Monad(format!("{op:?} is not an operation of {}", self.kind()))),
        })
    }

    /// Resolves and applies an operation symbol.
    pub fn interpret_op<A: Ord + Clone>(
        &self,
        op: &str,
        args: Vec<MonValue<A>>,
    ) -> Result<MonValue<A>> {
        let interp = self.interpretation(op, args.len())?;
        self.apply(&interp, args)
    }

    pub fn observe<A: Ord + Clone>(&self, u: &MonValue<A>) -> Observation {
        u.observe(self.states())
    }

    pub fn validate<A: Ord + Clone>(&self, u: &MonValue<A>) -> Result<()> {
        if u.kind() != self.kind() {
            return Err(Error::KindMismatch {
                expected: self.kind().to_string(),
                found: u.kind().to_string(),
            });
        }
        u.validate(self.states().len())
    }
}

impl fmt::Display for MonadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = match self {
            MonadSpec::Exceptions { exceptions }
            | MonadSpec::PartialityExceptions { exceptions }
            | MonadSpec::ProbExceptions { exceptions } => exceptions.as_slice(),
            MonadSpec::GlobalState { states } => states,
            MonadSpec::Output { alphabet } => alphabet,
            _ => &[],
        };
        write!(f, "{}", self.kind())?;
        if !params.is_empty() {
            let list: Vec<&str> = params.iter().map(Name::as_str).collect();
            write!(f, "[{}]", list.join(","))?;
        }
        Ok(())
    }
}

fn mix<K: Ord>(p: &Q, x: BTreeMap<K, Q>, y: BTreeMap<K, Q>) -> BTreeMap<K, Q> {
    let p_right = Q::one() - p;
    let mut out = BTreeMap::new();
    for (k, w) in x {
        let w = w * p;
        if !w.is_zero() {
            *out.entry(k).or_insert_with(Q::zero) += w;
        }
    }
    for (k, w) in y {
        let w = w * &p_right;
        if !w.is_zero() {
            *out.entry(k).or_insert_with(Q::zero) += w;
        }
    }
    out
}
