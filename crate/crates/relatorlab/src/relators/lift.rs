use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::monads::{MonValue, Outcome};
use crate::rational::Q;

use super::flow::flow_check;
use super::spec::{monad_layers, Effect, Mode, RelatorSpec};

/// A relation `R ⊆ X × Y` over explicit finite carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation<A: Ord> {
    left: BTreeSet<A>,
    right: BTreeSet<A>,
    pairs: BTreeSet<(A, A)>,
}

impl<A: Ord + Clone + fmt::Debug> Relation<A> {
    pub fn new(
        left: impl IntoIterator<Item = A>,
        right: impl IntoIterator<Item = A>,
        pairs: impl IntoIterator<Item = (A, A)>,
    ) -> Result<Self> {
        let left: BTreeSet<A> = left.into_iter().collect();
        let right: BTreeSet<A> = right.into_iter().collect();
        let pairs: BTreeSet<(A, A)> = pairs.into_iter().collect();
        if let Some((a, b)) = pairs
            .iter()
            .find(|(a, b)| !left.contains(a) || !right.contains(b))
        {
            return Err(Error::Precondition(format!(
                "pair ({a:?}, {b:?}) lies outside the carriers"
            )));
        }
        Ok(Relation { left, right, pairs })
    }

    /// The relation on exactly the listed pairs, with carriers inferred.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (A, A)>) -> Self {
        let pairs: BTreeSet<(A, A)> = pairs.into_iter().collect();
        Relation {
            left: pairs.iter().map(|p| p.0.clone()).collect(),
            right: pairs.iter().map(|p| p.1.clone()).collect(),
            pairs,
        }
    }

    pub fn identity(carrier: impl IntoIterator<Item = A>) -> Self {
        let c: BTreeSet<A> = carrier.into_iter().collect();
        Relation {
            pairs: c.iter().map(|a| (a.clone(), a.clone())).collect(),
            left: c.clone(),
            right: c,
        }
    }

    pub fn full(left: impl IntoIterator<Item = A>, right: impl IntoIterator<Item = A>) -> Self {
        let left: BTreeSet<A> = left.into_iter().collect();
        let right: BTreeSet<A> = right.into_iter().collect();
        let pairs = left
            .iter()
            .flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        Relation { left, right, pairs }
    }

    pub fn contains(&self, a: &A, b: &A) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> &BTreeSet<(A, A)> {
        &self.pairs
    }

    pub fn left(&self) -> &BTreeSet<A> {
        &self.left
    }

    pub fn right(&self) -> &BTreeSet<A> {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `Rᶜ ⊆ Y × X`.
    pub fn converse(&self) -> Self {
        Relation {
            left: self.right.clone(),
            right: self.left.clone(),
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// `S ∘ R`: first `self`, then `s`.
    pub fn then(&self, s: &Relation<A>) -> Self {
        let mut by_left: BTreeMap<&A, Vec<&A>> = BTreeMap::new();
        for (b, c) in &s.pairs {
            by_left.entry(b).or_default().push(c);
        }
        let pairs = self
            .pairs
            .iter()
            .flat_map(|(a, b)| {
                by_left
                    .get(b)
                    .into_iter()
                    .flatten()
                    .map(move |c| (a.clone(), (*c).clone()))
            })
            .collect();
        Relation {
            left: self.left.clone(),
            right: s.right.clone(),
            pairs,
        }
    }

    pub fn is_subset(&self, other: &Relation<A>) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

fn check_layers<A: Ord + Clone>(
    spec: &RelatorSpec,
    u: &MonValue<A>,
    v: &MonValue<A>,
) -> Result<()> {
    let layers = spec.layers()?;
    for w in [u, v] {
        if monad_layers(w.kind()) != layers {
            return Err(Error::KindMismatch {
                expected: format!("a value lifted by {spec}"),
                found: w.kind().to_string(),
            });
        }
    }
    Ok(())
}

/// Decides `u (Γ R) v` for the relation `R` given as a predicate.
pub fn lift_holds_by<A: Ord + Clone>(
    spec: &RelatorSpec,
    related: impl Fn(&A, &A) -> bool,
    u: &MonValue<A>,
    v: &MonValue<A>,
) -> Result<bool> {
    check_layers(spec, u, v)?;
    let ls: Vec<A> = u.support().into_iter().cloned().collect();
    let rs: Vec<A> = v.support().into_iter().cloned().collect();
    let index = |s: &[A], a: &A| s.binary_search(a).expect("support element");
    let ui = u.map(|a| index(&ls, a));
    let vi = v.map(|a| index(&rs, a));
    let matrix: Vec<Vec<bool>> = ls
        .iter()
        .map(|a| rs.iter().map(|b| related(a, b)).collect())
        .collect();
    Ok(holds_indexed(spec, &|i, j| matrix[i][j], &ui, &vi))
}

/// Decides `u (Γ R) v`. Fails if the supports leave the carriers of `r`.
pub fn lift_holds<A: Ord + Clone + fmt::Debug>(
    spec: &RelatorSpec,
    r: &Relation<A>,
    u: &MonValue<A>,
    v: &MonValue<A>,
) -> Result<bool> {
    check_layers(spec, u, v)?;
    for (w, carrier, side) in [(u, &r.left, "left"), (v, &r.right, "right")] {
        if let Some(a) = w.support().into_iter().find(|a| !carrier.contains(*a)) {
            return Err(Error::Precondition(format!(
                "{a:?} escapes the {side} carrier of the relation"
            )));
        }
    }
    lift_holds_by(spec, |a, b| r.contains(a, b), u, v)
}

/// The decision procedure on index-erased values. Layers are assumed to
/// have been checked; mismatched shapes are simply unrelated.
pub(crate) fn holds_indexed(
    spec: &RelatorSpec,
    r: &dyn Fn(usize, usize) -> bool,
    u: &MonValue<usize>,
    v: &MonValue<usize>,
) -> bool {
    match spec {
        RelatorSpec::Base(e, Mode::Sim) => sim(*e, r, u, v),
        RelatorSpec::Base(Effect::State, Mode::Bisim) => state_bisim(r, u, v),
        RelatorSpec::Base(e, Mode::Bisim) => sim(*e, r, u, v) && sim(*e, &|i, j| r(j, i), v, u),
        RelatorSpec::Converse(s) => holds_indexed(s, &|i, j| r(j, i), v, u),
        RelatorSpec::Intersect(a, b) => holds_indexed(a, r, u, v) && holds_indexed(b, r, u, v),
        RelatorSpec::Compose(outer, inner) => {
            let (Some((lt, uo)), Some((rt, vo))) = (outer_view(u), outer_view(v)) else {
                return false;
            };
            let inner_rel: Vec<Vec<bool>> = lt
                .iter()
                .map(|x| rt.iter().map(|y| holds_indexed(inner, r, x, y)).collect())
                .collect();
            holds_indexed(outer, &|i, j| inner_rel[i][j], &uo, &vo)
        }
    }
}

/// Splits a two-layer value into its outer layer over a table of
/// single-layer inner values.
fn outer_view(u: &MonValue<usize>) -> Option<(Vec<MonValue<usize>>, MonValue<usize>)> {
    match u {
        MonValue::PartExc(None) => Some((Vec::new(), MonValue::Partial(None))),
        MonValue::PartExc(Some(o)) => {
            Some((vec![MonValue::Exc(o.clone())], MonValue::Partial(Some(0))))
        }
        MonValue::ProbExc(m) => {
            let table: Vec<MonValue<usize>> =
                m.keys().map(|o| MonValue::Exc(o.clone())).collect();
            let outer = m.values().cloned().enumerate().collect();
            Some((table, MonValue::Dist(outer)))
        }
        _ => None,
    }
}

fn sim(e: Effect, r: &dyn Fn(usize, usize) -> bool, u: &MonValue<usize>, v: &MonValue<usize>) -> bool {
    match (e, u, v) {
        (Effect::Partiality, MonValue::Partial(x), MonValue::Partial(y)) => match (x, y) {
            (None, _) => true,
            (Some(a), Some(b)) => r(*a, *b),
            (Some(_), None) => false,
        },
        (Effect::Nondet, MonValue::Nondet(x), MonValue::Nondet(y)) => {
            x.iter().all(|a| y.iter().any(|b| r(*a, *b)))
        }
        (Effect::Dist, MonValue::Dist(x), MonValue::Dist(y)) => {
            let (ka, wa): (Vec<usize>, Vec<Q>) = x.iter().map(|(k, w)| (*k, w.clone())).unzip();
            let (kb, wb): (Vec<usize>, Vec<Q>) = y.iter().map(|(k, w)| (*k, w.clone())).unzip();
            flow_check(&wa, &wb, |i, j| r(ka[i], kb[j]))
        }
        (Effect::Exc, MonValue::Exc(x), MonValue::Exc(y)) => match (x, y) {
            (Outcome::Raised(e1), Outcome::Raised(e2)) => e1 == e2,
            (Outcome::Just(a), Outcome::Just(b)) => r(*a, *b),
            _ => false,
        },
        (Effect::Output, MonValue::Output(p, x), MonValue::Output(q, y)) => match (x, y) {
            (None, _) => q.starts_with(p),
            (Some(a), Some(b)) => p == q && r(*a, *b),
            (Some(_), None) => false,
        },
        _ => false,
    }
}

fn state_bisim(r: &dyn Fn(usize, usize) -> bool, u: &MonValue<usize>, v: &MonValue<usize>) -> bool {
    let (MonValue::State(x), MonValue::State(y)) = (u, v) else {
        return false;
    };
    x.len() == y.len()
        && x.iter().zip(y).all(|(a, b)| match (a, b) {
            (None, None) => true,
            (Some((p, s)), Some((q, t))) => s == t && r(*p, *q),
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn rs(s: &str) -> RelatorSpec {
        RelatorSpec::parse(s).unwrap()
    }

    fn set(xs: &[char]) -> MonValue<char> {
        MonValue::Nondet(xs.iter().copied().collect())
    }

    #[test]
    fn powerset_clauses() {
        let r = Relation::new(['a', 'b'], ['a', 'b'], [('a', 'b')]).unwrap();
        assert!(lift_holds(&rs("gpow"), &r, &set(&['a']), &set(&['b'])).unwrap());
        assert!(!lift_holds(&rs("gpow"), &r, &set(&['a']), &set(&[])).unwrap());
        assert!(lift_holds(&rs("gpow"), &r, &set(&[]), &set(&['a'])).unwrap());
        assert!(!lift_holds(&rs("dpow"), &r, &set(&[]), &set(&['a'])).unwrap());
    }

    #[test]
    fn bottom_is_below_everything() {
        let r: Relation<char> = Relation::new(['a'], ['a'], []).unwrap();
        let bot = MonValue::Partial(None);
        assert!(lift_holds(&rs("gbot"), &r, &bot, &MonValue::Partial(Some('a'))).unwrap());
        assert!(!lift_holds(&rs("dbot"), &r, &bot, &MonValue::Partial(Some('a'))).unwrap());
        assert!(lift_holds(&rs("dbot"), &r, &bot, &bot).unwrap());
    }

    #[test]
    fn distribution_deficit() {
        let r = Relation::new(['a'], ['c'], [('a', 'c')]).unwrap();
        let mu = MonValue::Dist([('a', q(1, 1))].into());
        let nu = MonValue::Dist([('c', q(1, 2))].into());
        assert!(!lift_holds(&rs("gdist"), &r, &mu, &nu).unwrap());
        assert!(lift_holds(&rs("gdist"), &r, &nu.map(|_| 'a'), &mu.map(|_| 'c')).unwrap());
    }

    #[test]
    fn errors() {
        let r = Relation::new(['a'], ['a'], [('a', 'a')]).unwrap();
        let p = MonValue::Partial(Some('a'));
        assert!(matches!(
            lift_holds(&rs("gpow"), &r, &p, &p),
            Err(Error::KindMismatch { .. })
        ));
        let escape = MonValue::Partial(Some('z'));
        assert!(matches!(
            lift_holds(&rs("gbot"), &r, &escape, &p),
            Err(Error::Precondition(_))
        ));
        assert!(Relation::new(['a'], ['a'], [('a', 'b')]).is_err());
    }

    #[test]
    fn composite_on_dirac_reduces_to_payload() {
        let r = Relation::new([1, 2], [1, 2], [(1, 2)]).unwrap();
        let d = |o: Outcome<i32>| MonValue::ProbExc([(o, q(1, 1))].into());
        let g = rs("comp(gdist, gexc)");
        assert!(lift_holds(&g, &r, &d(Outcome::Just(1)), &d(Outcome::Just(2))).unwrap());
        assert!(!lift_holds(&g, &r, &d(Outcome::Just(2)), &d(Outcome::Just(1))).unwrap());
        let e = || Outcome::Raised("e".into());
        assert!(lift_holds(&g, &r, &d(e()), &d(e())).unwrap());
        assert!(!lift_holds(&g, &r, &d(e()), &d(Outcome::Just(1))).unwrap());
    }

    #[test]
    fn output_prefix_clause() {
        let a = || crate::syntax::Name::new("a");
        let r = Relation::identity([0]);
        let lo = MonValue::Output(vec![a()], None);
        let hi = MonValue::Output(vec![a(), a()], Some(0));
        assert!(lift_holds(&rs("gout"), &r, &lo, &hi).unwrap());
        assert!(!lift_holds(&rs("gout"), &r, &hi, &lo).unwrap());
        assert!(!lift_holds(&rs("dout"), &r, &lo, &hi).unwrap());
        let conv = MonValue::Output(vec![a()], Some(0));
        assert!(!lift_holds(&rs("gout"), &r, &conv, &hi).unwrap());
    }

    #[test]
    fn relation_algebra() {
        let r = Relation::from_pairs([(1, 2), (2, 3)]);
        let s = Relation::from_pairs([(2, 5), (3, 6)]);
        assert_eq!(r.then(&s).pairs(), &[(1, 5), (2, 6)].into());
        assert_eq!(r.converse().converse(), r);
        assert!(Relation::identity([1, 2]).is_subset(&Relation::full([1, 2], [1, 2])));
    }
}
