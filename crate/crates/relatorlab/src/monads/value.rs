use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_q, sum, Q};
use crate::syntax::Name;

use super::MonadKind;

/// A normal result or a raised exception: the `X + E` layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome<A> {
    Raised(Name),
    Just(A),
}

impl<A> Outcome<A> {
    pub fn map<B>(&self, f: impl FnOnce(&A) -> B) -> Outcome<B> {
        match self {
            Outcome::Raised(e) => Outcome::Raised(e.clone()),
            Outcome::Just(a) => Outcome::Just(f(a)),
        }
    }

    pub fn just(&self) -> Option<&A> {
        match self {
            Outcome::Just(a) => Some(a),
            Outcome::Raised(_) => None,
        }
    }
}

/// A finitely representable element of `T A` for one of the concrete monads.
///
/// `None` stands for ⊥ wherever a flat lifting is involved. Distributions
/// never store zero weights.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonValue<A: Ord> {
    Partial(Option<A>),
    Exc(Outcome<A>),
    PartExc(Option<Outcome<A>>),
    Nondet(BTreeSet<A>),
    Dist(BTreeMap<A, Q>),
    /// Indexed by the position of the initial state; `Some((a, t))` ends in
    /// state `t`.
    State(Vec<Option<(A, usize)>>),
    /// Emitted prefix and, if the computation terminated, its result.
    Output(Vec<Name>, Option<A>),
    ProbExc(BTreeMap<Outcome<A>, Q>),
}

fn add_weight<K: Ord>(map: &mut BTreeMap<K, Q>, k: K, w: Q) {
    if w.is_zero() {
        return;
    }
    *map.entry(k).or_insert_with(Q::zero) += w;
}

fn check_mass<K>(map: &BTreeMap<K, Q>) -> Result<()> {
    let m = sum(map.values());
    if m > Q::one() {
        return Err(Error::MassOverflow(format_q(&m)));
    }
    Ok(())
}

impl<A: Ord + Clone> MonValue<A> {
    pub fn kind(&self) -> MonadKind {
        match self {
            MonValue::Partial(_) => MonadKind::Partiality,
            MonValue::Exc(_) => MonadKind::Exceptions,
            MonValue::PartExc(_) => MonadKind::PartialityExceptions,
            MonValue::Nondet(_) => MonadKind::FiniteNondet,
            MonValue::Dist(_) => MonadKind::Subdistribution,
            MonValue::State(_) => MonadKind::GlobalState,
            MonValue::Output(..) => MonadKind::Output,
            MonValue::ProbExc(_) => MonadKind::ProbExceptions,
        }
    }

    /// Total weight of a (sub)distribution; `None` for other kinds.
    pub fn mass(&self) -> Option<Q> {
        match self {
            MonValue::Dist(m) => Some(sum(m.values())),
            MonValue::ProbExc(m) => Some(sum(m.values())),
            _ => None,
        }
    }

    /// Carrier elements occurring in the payload, without repetition.
    pub fn support(&self) -> Vec<&A> {
        let mut out: Vec<&A> = match self {
            MonValue::Partial(x) => x.iter().collect(),
            MonValue::Exc(o) => o.just().into_iter().collect(),
            MonValue::PartExc(x) => x.iter().filter_map(Outcome::just).collect(),
            MonValue::Nondet(s) => s.iter().collect(),
            MonValue::Dist(m) => m.keys().collect(),
            MonValue::State(t) => t.iter().flatten().map(|(a, _)| a).collect(),
            MonValue::Output(_, x) => x.iter().collect(),
            MonValue::ProbExc(m) => m.keys().filter_map(Outcome::just).collect(),
        };
        out.sort();
        out.dedup();
        out
    }

    /// The functor action `T f`.
    pub fn map<B: Ord + Clone>(&self, mut f: impl FnMut(&A) -> B) -> MonValue<B> {
        match self {
            MonValue::Partial(x) => MonValue::Partial(x.as_ref().map(f)),
            MonValue::Exc(o) => MonValue::Exc(o.map(f)),
            MonValue::PartExc(x) => MonValue::PartExc(x.as_ref().map(|o| o.map(f))),
            MonValue::Nondet(s) => MonValue::Nondet(s.iter().map(f).collect()),
            MonValue::Dist(m) => {
                let mut out = BTreeMap::new();
                for (a, w) in m {
                    add_weight(&mut out, f(a), w.clone());
                }
                MonValue::Dist(out)
            }
            MonValue::State(t) => MonValue::State(
                t.iter()
                    .map(|e| e.as_ref().map(|(a, s)| (f(a), *s)))
                    .collect(),
            ),
            MonValue::Output(u, x) => MonValue::Output(u.clone(), x.as_ref().map(f)),
            MonValue::ProbExc(m) => {
                let mut out = BTreeMap::new();
                for (o, w) in m {
                    add_weight(&mut out, o.map(&mut f), w.clone());
                }
                MonValue::ProbExc(out)
            }
        }
    }

    /// `self >>= f`. Every result of `f` must have the same kind as `self`.
    pub fn bind<B: Ord + Clone>(
        &self,
        mut f: impl FnMut(&A) -> Result<MonValue<B>>,
    ) -> Result<MonValue<B>> {
        let kind = self.kind();
        let mut call = |a: &A| -> Result<MonValue<B>> {
            let r = f(a)?;
            if r.kind() != kind {
                return Err(Error::KindMismatch {
                    expected: kind.to_string(),
                    found: r.kind().to_string(),
                });
            }
            Ok(r)
        };
        Ok(match self {
            MonValue::Partial(None) => MonValue::Partial(None),
            MonValue::Partial(Some(a)) => call(a)?,
            MonValue::Exc(Outcome::Raised(e)) => MonValue::Exc(Outcome::Raised(e.clone())),
            MonValue::Exc(Outcome::Just(a)) => call(a)?,
            MonValue::PartExc(None) => MonValue::PartExc(None),
            MonValue::PartExc(Some(Outcome::Raised(e))) => {
                MonValue::PartExc(Some(Outcome::Raised(e.clone())))
            }
            MonValue::PartExc(Some(Outcome::Just(a))) => call(a)?,
            MonValue::Nondet(s) => {
                let mut out = BTreeSet::new();
                for a in s {
                    if let MonValue::Nondet(r) = call(a)? {
                        out.extend(r);
                    }
                }
                MonValue::Nondet(out)
            }
            MonValue::Dist(m) => {
                let mut out = BTreeMap::new();
                for (a, w) in m {
                    if let MonValue::Dist(r) = call(a)? {
                        for (b, v) in r {
                            add_weight(&mut out, b, w * v);
                        }
                    }
                }
                check_mass(&out)?;
                MonValue::Dist(out)
            }
            MonValue::State(t) => {
                let mut out = Vec::with_capacity(t.len());
                for entry in t {
                    out.push(match entry {
                        None => None,
                        Some((a, s)) => match call(a)? {
                            MonValue::State(r) => r.get(*s).cloned().ok_or_else(|| {
                                Error::Monad(format!("state index {s} out of range"))
                            })?,
                            _ => unreachable!("kind checked above"),
                        },
                    });
                }
                MonValue::State(out)
            }
            MonValue::Output(u, None) => MonValue::Output(u.clone(), None),
            MonValue::Output(u, Some(a)) => match call(a)? {
                MonValue::Output(w, y) => {
                    let mut prefix = u.clone();
                    prefix.extend(w);
                    MonValue::Output(prefix, y)
                }
                _ => unreachable!("kind checked above"),
            },
            MonValue::ProbExc(m) => {
                let mut out = BTreeMap::new();
                for (o, w) in m {
                    match o {
                        Outcome::Raised(e) => {
                            add_weight(&mut out, Outcome::Raised(e.clone()), w.clone())
                        }
                        Outcome::Just(a) => {
                            if let MonValue::ProbExc(r) = call(a)? {
                                for (b, v) in r {
                                    add_weight(&mut out, b, w * v);
                                }
                            }
                        }
                    }
                }
                check_mass(&out)?;
                MonValue::ProbExc(out)
            }
        })
    }

    /// The order of the monad's ωCPPO structure.
    pub fn leq(&self, other: &MonValue<A>) -> Result<bool> {
        Ok(match (self, other) {
            (MonValue::Partial(x), MonValue::Partial(y)) => x.is_none() || x == y,
            (MonValue::Exc(x), MonValue::Exc(y)) => x == y,
            (MonValue::PartExc(x), MonValue::PartExc(y)) => x.is_none() || x == y,
            (MonValue::Nondet(x), MonValue::Nondet(y)) => x.is_subset(y),
            (MonValue::Dist(x), MonValue::Dist(y)) => pointwise_leq(x, y),
            (MonValue::ProbExc(x), MonValue::ProbExc(y)) => pointwise_leq(x, y),
            (MonValue::State(x), MonValue::State(y)) => {
                x.len() == y.len() && x.iter().zip(y).all(|(a, b)| a.is_none() || a == b)
            }
            (MonValue::Output(u, x), MonValue::Output(w, y)) => match x {
                None => w.starts_with(u),
                Some(_) => x == y && u == w,
            },
            _ => {
                return Err(Error::KindMismatch {
                    expected: self.kind().to_string(),
                    found: other.kind().to_string(),
                })
            }
        })
    }

    /// Checks the representation invariants: positive weights, mass at most
    /// one and state tables of the right width.
    pub fn validate(&self, states: usize) -> Result<()> {
        match self {
            MonValue::Dist(m) => {
                if m.values().any(|w| *w <= Q::zero()) {
                    return Err(Error::Monad("non-positive weight in a distribution".into()));
                }
                check_mass(m)
            }
            MonValue::ProbExc(m) => {
                if m.values().any(|w| *w <= Q::zero()) {
                    return Err(Error::Monad("non-positive weight in a distribution".into()));
                }
                check_mass(m)
            }
            MonValue::State(t) => {
                if t.len() != states || t.iter().flatten().any(|(_, s)| *s >= states) {
                    return Err(Error::Monad(format!(
                        "state table must cover exactly {states} states"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn pointwise_leq<K: Ord>(x: &BTreeMap<K, Q>, y: &BTreeMap<K, Q>) -> bool {
    x.iter()
        .all(|(k, w)| y.get(k).is_some_and(|v| w <= v))
}

/// The image of a monadic value under the relation relating all values:
/// what an external observer can see of a computation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observation {
    Convergence {
        converges: bool,
    },
    Exception {
        /// `"diverges"`, `"value"` or `"raise <e>"`.
        outcome: String,
    },
    MayConverge {
        converges: bool,
    },
    Mass {
        #[serde(serialize_with = "ser_q")]
        mass: Q,
    },
    States {
        /// Final state per initial state; `None` where the run diverges.
        finals: Vec<Option<Name>>,
    },
    Output {
        prefix: Vec<Name>,
        converges: bool,
    },
    ProbExc {
        #[serde(serialize_with = "ser_q_map")]
        exceptions: BTreeMap<Name, Q>,
        #[serde(serialize_with = "ser_q")]
        mass: Q,
    },
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(x))
}

fn ser_q_map<S: serde::Serializer>(
    m: &BTreeMap<Name, Q>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k.as_str(), &format_q(v))?;
    }
    map.end()
}

impl<A: Ord + Clone> MonValue<A> {
    /// States are named by `states` in the observation of a state table.
    pub fn observe(&self, states: &[Name]) -> Observation {
        match self {
            MonValue::Partial(x) => Observation::Convergence {
                converges: x.is_some(),
            },
            MonValue::Exc(o) => Observation::Exception {
                outcome: outcome_tag(Some(o)),
            },
            MonValue::PartExc(x) => Observation::Exception {
                outcome: outcome_tag(x.as_ref()),
            },
            MonValue::Nondet(s) => Observation::MayConverge {
                converges: !s.is_empty(),
            },
            MonValue::Dist(m) => Observation::Mass {
                mass: sum(m.values()),
            },
            MonValue::State(t) => Observation::States {
                finals: t
                    .iter()
                    .map(|e| {
                        e.as_ref().map(|(_, s)| {
                            states
                                .get(*s)
                                .cloned()
                                .unwrap_or_else(|| Name::new(s.to_string()))
                        })
                    })
                    .collect(),
            },
            MonValue::Output(u, x) => Observation::Output {
                prefix: u.clone(),
                converges: x.is_some(),
            },
            MonValue::ProbExc(m) => {
                let mut exceptions = BTreeMap::new();
                let mut mass = Q::zero();
                for (o, w) in m {
                    match o {
                        Outcome::Raised(e) => add_weight(&mut exceptions, e.clone(), w.clone()),
                        Outcome::Just(_) => mass += w,
                    }
                }
                Observation::ProbExc { exceptions, mass }
            }
        }
    }
}

fn outcome_tag<A>(o: Option<&Outcome<A>>) -> String {
    match o {
        None => "diverges".into(),
        Some(Outcome::Just(_)) => "value".into(),
        Some(Outcome::Raised(e)) => format!("raise {e}"),
    }
}

impl<A: fmt::Display> fmt::Display for Outcome<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Raised(e) => write!(f, "raise({e})"),
            Outcome::Just(a) => write!(f, "just({a})"),
        }
    }
}

fn write_opt<A: fmt::Display>(f: &mut fmt::Formatter<'_>, x: Option<&A>) -> fmt::Result {
    match x {
        None => f.write_str("bottom"),
        Some(a) => write!(f, "just({a})"),
    }
}

/// Canonical text form. Carriers are printed in their `Ord` order, weights
/// as `p/q`.
impl<A: Ord + fmt::Display> fmt::Display for MonValue<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonValue::Partial(x) => write_opt(f, x.as_ref()),
            MonValue::Exc(o) => write!(f, "{o}"),
            MonValue::PartExc(None) => f.write_str("bottom"),
            MonValue::PartExc(Some(o)) => write!(f, "{o}"),
            MonValue::Nondet(s) => {
                f.write_str("{")?;
                for (i, a) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("}")
            }
            MonValue::Dist(m) => {
                f.write_str("{")?;
                for (i, (a, w)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{a} : {}", format_q(w))?;
                }
                f.write_str("}")
            }
            MonValue::ProbExc(m) => {
                f.write_str("{")?;
                for (i, (o, w)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{o} : {}", format_q(w))?;
                }
                f.write_str("}")
            }
            MonValue::State(t) => {
                f.write_str("[")?;
                for (s, e) in t.iter().enumerate() {
                    if s > 0 {
                        f.write_str("; ")?;
                    }
                    match e {
                        None => write!(f, "#{s} -> bottom")?,
                        Some((a, t)) => write!(f, "#{s} -> ({a}, #{t})")?,
                    }
                }
                f.write_str("]")
            }
            MonValue::Output(u, x) => {
                f.write_str("out[")?;
                for (i, c) in u.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("] ")?;
                write_opt(f, x.as_ref())
            }
        }
    }
}

impl<A: Ord + fmt::Display> MonValue<A> {
    /// JSON rendering with carriers printed through `Display`.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let opt = |x: Option<&A>| match x {
            None => serde_json::Value::Null,
            Some(a) => json!(a.to_string()),
        };
        let outcome = |o: &Outcome<A>| match o {
            Outcome::Raised(e) => json!({ "raise": e.as_str() }),
            Outcome::Just(a) => json!({ "value": a.to_string() }),
        };
        match self {
            MonValue::Partial(x) => json!({ "kind": "partial", "value": opt(x.as_ref()) }),
            MonValue::Exc(o) => json!({ "kind": "exc", "outcome": outcome(o) }),
            MonValue::PartExc(x) => json!({
                "kind": "partexc",
                "outcome": x.as_ref().map(outcome).unwrap_or(serde_json::Value::Null),
            }),
            MonValue::Nondet(s) => json!({
                "kind": "nondet",
                "values": s.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            }),
            MonValue::Dist(m) => json!({
                "kind": "dist",
                "mass": format_q(&sum(m.values())),
                "support": m.iter().map(|(a, w)| json!({
                    "value": a.to_string(),
                    "weight": format_q(w),
                })).collect::<Vec<_>>(),
            }),
            MonValue::ProbExc(m) => json!({
                "kind": "probexc",
                "mass": format_q(&sum(m.values())),
                "support": m.iter().map(|(o, w)| json!({
                    "outcome": outcome(o),
                    "weight": format_q(w),
                })).collect::<Vec<_>>(),
            }),
            MonValue::State(t) => json!({
                "kind": "state",
                "table": t.iter().map(|e| match e {
                    None => serde_json::Value::Null,
                    Some((a, s)) => json!({ "value": a.to_string(), "state": s }),
                }).collect::<Vec<_>>(),
            }),
            MonValue::Output(u, x) => json!({
                "kind": "output",
                "prefix": u.iter().map(Name::as_str).collect::<Vec<_>>(),
                "value": opt(x.as_ref()),
            }),
        }
    }
}
