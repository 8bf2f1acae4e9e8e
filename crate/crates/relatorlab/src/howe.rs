//! Open relations and Howe's construction on a finite open universe.
//!
//! A judgment `x̄ ⊢ M R N` is stored at the level `k = |x̄|`, with the
//! context fixed to the canonical variables `x0 … x(k-1)`. A binder opened
//! at level `k` introduces `xk`, so every term of the universe has a unique
//! decomposition into components of the same or the next level.
//!
//! The open extension quantifies over a finite closing set, and the Howe
//! closure is computed as the least fixed point of `S ↦ R° ∘ Ŝ` restricted
//! to the universe. Binder bodies beyond the maximal level are compared
//! syntactically, which keeps the closure reflexive.

use std::collections::HashMap;

use crate::bitrel::BitRel;
use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::monads::MonadSpec;
use crate::relators::{lift_holds_by, RelatorSpec};
use crate::report::{CheckReport, Witness};
use crate::similarity::{ClosedRelationPair, Similarity};
use crate::syntax::{context, context_var, open_with_name, print_term, print_value, Name, Term, Value};

/// A binder body: its id one level up, or the opened body itself when the
/// next level is beyond the universe. Bodies beyond the universe are only
/// related to themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    Id(usize),
    Beyond(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum TShape {
    Ret(usize),
    App(usize, usize),
    Seq(usize, Body),
    Op(Name, Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum VShape {
    Var(Name),
    Lam(Body),
}

#[derive(Clone, Debug, Default)]
struct Level {
    terms: Vec<Term>,
    values: Vec<Value>,
    term_ids: HashMap<Term, usize>,
    value_ids: HashMap<Value, usize>,
    tshapes: Vec<TShape>,
    vshapes: Vec<VShape>,
}

/// Terms and values per context level `0..=max_level`, closed under
/// components.
#[derive(Clone, Debug)]
pub struct OpenUniverse {
    levels: Vec<Level>,
    closing: Vec<Value>,
    cap: usize,
    truncated: bool,
}

impl OpenUniverse {
    pub fn new(max_level: usize, closing: Vec<Value>, cap: usize) -> Result<OpenUniverse> {
        if let Some(v) = closing.iter().find(|v| !v.is_closed()) {
            return Err(Error::OpenTerm(print_value(v)));
        }
        Ok(OpenUniverse {
            levels: vec![Level::default(); max_level + 1],
            closing,
            cap,
            truncated: false,
        })
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn closing(&self) -> &[Value] {
        &self.closing
    }

    pub fn size(&self) -> usize {
        self.levels.iter().map(|l| l.terms.len() + l.values.len()).sum()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn terms(&self, level: usize) -> &[Term] {
        &self.levels[level].terms
    }

    pub fn values(&self, level: usize) -> &[Value] {
        &self.levels[level].values
    }

    pub fn term_id(&self, level: usize, t: &Term) -> Option<usize> {
        self.levels.get(level)?.term_ids.get(t).copied()
    }

    pub fn value_id(&self, level: usize, v: &Value) -> Option<usize> {
        self.levels.get(level)?.value_ids.get(v).copied()
    }

    fn admissible(level: usize, fv: impl IntoIterator<Item = Name>) -> Result<()> {
        let ctx = context(level);
        for x in fv {
            if !ctx.contains(&x) {
                return Err(Error::OpenTerm(format!("{x} is not in the level-{level} context")));
            }
        }
        Ok(())
    }

    /// Adds `t` and its components; returns its id at `level`.
    pub fn add_term(&mut self, level: usize, t: Term) -> Result<usize> {
        if level > self.max_level() {
            return Err(Error::Precondition(format!("level {level} exceeds the maximum")));
        }
        Self::admissible(level, t.free_vars())?;
        Ok(self.insert_term(level, t))
    }

    pub fn add_value(&mut self, level: usize, v: Value) -> Result<usize> {
        if level > self.max_level() {
            return Err(Error::Precondition(format!("level {level} exceeds the maximum")));
        }
        Self::admissible(level, v.free_vars())?;
        Ok(self.insert_value(level, v))
    }

    fn body(&mut self, level: usize, body: &Term) -> Body {
        let opened = open_with_name(body, &context_var(level));
        if level < self.max_level() {
            Body::Id(self.insert_term(level + 1, opened))
        } else {
            Body::Beyond(opened)
        }
    }

    fn insert_term(&mut self, level: usize, t: Term) -> usize {
        if let Some(&i) = self.levels[level].term_ids.get(&t) {
            return i;
        }
        let shape = match &t {
            Term::Return(v) => TShape::Ret(self.insert_value(level, v.clone())),
            Term::App(v, w) => {
                let a = self.insert_value(level, v.clone());
                TShape::App(a, self.insert_value(level, w.clone()))
            }
            Term::Seq(m, body) => {
                let a = self.insert_term(level, (**m).clone());
                TShape::Seq(a, self.body(level, body))
            }
            Term::Op(name, args) => TShape::Op(
                name.clone(),
                args.iter().map(|a| self.insert_term(level, a.clone())).collect(),
            ),
        };
        let l = &mut self.levels[level];
        l.term_ids.insert(t.clone(), l.terms.len());
        l.terms.push(t);
        l.tshapes.push(shape);
        l.terms.len() - 1
    }

    fn insert_value(&mut self, level: usize, v: Value) -> usize {
        if let Some(&i) = self.levels[level].value_ids.get(&v) {
            return i;
        }
        let shape = match &v {
            Value::Free(x) => VShape::Var(x.clone()),
            Value::Lam(body) => VShape::Lam(self.body(level, body)),
            Value::Bound(_) => unreachable!("universe members are locally closed"),
        };
        let l = &mut self.levels[level];
        l.value_ids.insert(v.clone(), l.values.len());
        l.values.push(v);
        l.vshapes.push(shape);
        l.values.len() - 1
    }

    /// All substitutions of closing values for `x0 … x(k-1)`.
    fn substitutions(&self, k: usize) -> Vec<Vec<Value>> {
        let mut out: Vec<Vec<Value>> = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|s| {
                    self.closing.iter().map(move |v| {
                        let mut s = s.clone();
                        s.push(v.clone());
                        s
                    })
                })
                .collect();
        }
        out
    }

    fn close_term(t: &Term, sub: &[Value]) -> Term {
        sub.iter()
            .enumerate()
            .fold(t.clone(), |t, (i, v)| t.substitute(context_var(i).as_str(), v))
    }

    fn close_value(v: &Value, sub: &[Value]) -> Value {
        sub.iter()
            .enumerate()
            .fold(v.clone(), |v, (i, w)| v.substitute(context_var(i).as_str(), w))
    }

    /// Adds the closing values and every closing instance of an open member
    /// at level 0, and optionally the support values of the approximants of
    /// level-0 terms, until nothing changes or the cap is reached.
    pub fn saturate(&mut self, semantics: Option<(&MonadSpec, u32)>) -> Result<()> {
        for v in self.closing.clone() {
            self.insert_value(0, v);
        }
        let mut ev = match semantics {
            Some((m, _)) => Some(Evaluator::new(m.clone())?),
            None => None,
        };
        let mut evaluated = 0;
        loop {
            let before = self.size();
            if before >= self.cap {
                self.truncated = true;
                return Ok(());
            }
            for k in 1..=self.max_level() {
                let subs = self.substitutions(k);
                let (terms, values) = (self.levels[k].terms.clone(), self.levels[k].values.clone());
                for t in &terms {
                    for s in &subs {
                        self.insert_term(0, Self::close_term(t, s));
                    }
                }
                for v in &values {
                    for s in &subs {
                        self.insert_value(0, Self::close_value(v, s));
                    }
                }
            }
            if let (Some(ev), Some((_, n))) = (ev.as_mut(), semantics) {
                while evaluated < self.levels[0].terms.len() {
                    let t = self.levels[0].terms[evaluated].clone();
                    evaluated += 1;
                    for v in ev.approximate(&t, n)?.support() {
                        self.insert_value(0, v.clone());
                    }
                }
            }
            if self.size() == before {
                return Ok(());
            }
        }
    }

    fn closings_of_terms(&self, k: usize) -> Vec<Vec<Term>> {
        let subs = self.substitutions(k);
        self.levels[k]
            .terms
            .iter()
            .map(|t| subs.iter().map(|s| Self::close_term(t, s)).collect())
            .collect()
    }

    fn closings_of_values(&self, k: usize) -> Vec<Vec<Value>> {
        let subs = self.substitutions(k);
        self.levels[k]
            .values
            .iter()
            .map(|v| subs.iter().map(|s| Self::close_value(v, s)).collect())
            .collect()
    }
}

/// An open relation over an [`OpenUniverse`]: one term and one value
/// relation per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenRelation {
    pub terms: Vec<BitRel>,
    pub values: Vec<BitRel>,
}

impl OpenRelation {
    pub fn empty(u: &OpenUniverse) -> OpenRelation {
        OpenRelation {
            terms: u.levels.iter().map(|l| BitRel::empty(l.terms.len())).collect(),
            values: u.levels.iter().map(|l| BitRel::empty(l.values.len())).collect(),
        }
    }

    pub fn full(u: &OpenUniverse) -> OpenRelation {
        OpenRelation {
            terms: u.levels.iter().map(|l| BitRel::full(l.terms.len())).collect(),
            values: u.levels.iter().map(|l| BitRel::full(l.values.len())).collect(),
        }
    }

    pub fn identity(u: &OpenUniverse) -> OpenRelation {
        OpenRelation {
            terms: u.levels.iter().map(|l| BitRel::identity(l.terms.len())).collect(),
            values: u.levels.iter().map(|l| BitRel::identity(l.values.len())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.iter().chain(&self.values).map(BitRel::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &OpenRelation) -> bool {
        self.terms.iter().zip(&other.terms).all(|(a, b)| a.is_subset(b))
            && self.values.iter().zip(&other.values).all(|(a, b)| a.is_subset(b))
    }

    /// `other ∘ self`, levelwise.
    pub fn then(&self, other: &OpenRelation) -> OpenRelation {
        OpenRelation {
            terms: self.terms.iter().zip(&other.terms).map(|(a, b)| a.then(b)).collect(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.then(b)).collect(),
        }
    }

    pub fn relates_terms(&self, u: &OpenUniverse, level: usize, m: &Term, n: &Term) -> bool {
        match (u.term_id(level, m), u.term_id(level, n)) {
            (Some(i), Some(j)) => self.terms[level].contains(i, j),
            _ => false,
        }
    }

    pub fn relates_values(&self, u: &OpenUniverse, level: usize, v: &Value, w: &Value) -> bool {
        match (u.value_id(level, v), u.value_id(level, w)) {
            (Some(i), Some(j)) => self.values[level].contains(i, j),
            _ => false,
        }
    }

    /// The closed part, as explicit pairs.
    pub fn closed_pairs(&self, u: &OpenUniverse) -> ClosedRelationPair {
        let l = &u.levels[0];
        ClosedRelationPair {
            terms: self.terms[0]
                .pairs()
                .map(|(i, j)| (l.terms[i].clone(), l.terms[j].clone()))
                .collect(),
            values: self.values[0]
                .pairs()
                .map(|(i, j)| (l.values[i].clone(), l.values[j].clone()))
                .collect(),
        }
    }
}

/// `x̄ ⊢ M R° N` iff `M[v̄/x̄] R N[v̄/x̄]` for every closing `v̄` drawn from the
/// universe's closing set.
pub fn open_extension(
    u: &OpenUniverse,
    related_terms: impl Fn(&Term, &Term) -> bool,
    related_values: impl Fn(&Value, &Value) -> bool,
) -> OpenRelation {
    let mut out = OpenRelation::empty(u);
    for k in 0..=u.max_level() {
        let ct = u.closings_of_terms(k);
        for (i, a) in ct.iter().enumerate() {
            for (j, b) in ct.iter().enumerate() {
                if a.iter().zip(b).all(|(x, y)| related_terms(x, y)) {
                    out.terms[k].insert(i, j);
                }
            }
        }
        let cv = u.closings_of_values(k);
        for (i, a) in cv.iter().enumerate() {
            for (j, b) in cv.iter().enumerate() {
                if a.iter().zip(b).all(|(x, y)| related_values(x, y)) {
                    out.values[k].insert(i, j);
                }
            }
        }
    }
    out
}

pub fn open_extension_of_similarity(u: &OpenUniverse, s: &Similarity) -> OpenRelation {
    open_extension(u, |a, b| s.relates_terms(a, b), |a, b| s.relates_values(a, b))
}

pub fn open_extension_of_pairs(u: &OpenUniverse, r: &ClosedRelationPair) -> OpenRelation {
    open_extension(
        u,
        |a, b| r.terms.contains(&(a.clone(), b.clone())),
        |a, b| r.values.contains(&(a.clone(), b.clone())),
    )
}

/// One layer of constructor closure, over the universe.
pub fn compatible_refinement(u: &OpenUniverse, s: &OpenRelation) -> OpenRelation {
    let mut out = OpenRelation::empty(u);
    for k in 0..=u.max_level() {
        let l = &u.levels[k];
        let up = |i: &Body, j: &Body| match (i, j) {
            (Body::Id(i), Body::Id(j)) => s.terms[k + 1].contains(*i, *j),
            (Body::Beyond(a), Body::Beyond(b)) => a == b,
            _ => false,
        };
        for (i, a) in l.vshapes.iter().enumerate() {
            for (j, b) in l.vshapes.iter().enumerate() {
                let hit = match (a, b) {
                    (VShape::Var(x), VShape::Var(y)) => x == y,
                    (VShape::Lam(p), VShape::Lam(q)) => up(p, q),
                    _ => false,
                };
                if hit {
                    out.values[k].insert(i, j);
                }
            }
        }
        let sv = &s.values[k];
        let st = &s.terms[k];
        for (i, a) in l.tshapes.iter().enumerate() {
            for (j, b) in l.tshapes.iter().enumerate() {
                let hit = match (a, b) {
                    (TShape::Ret(v), TShape::Ret(w)) => sv.contains(*v, *w),
                    (TShape::App(v, w), TShape::App(v2, w2)) => {
                        sv.contains(*v, *v2) && sv.contains(*w, *w2)
                    }
                    (TShape::Seq(m, p), TShape::Seq(m2, q)) => st.contains(*m, *m2) && up(p, q),
                    (TShape::Op(f, xs), TShape::Op(g, ys)) => {
                        f == g
                            && xs.len() == ys.len()
                            && xs.iter().zip(ys).all(|(x, y)| st.contains(*x, *y))
                    }
                    _ => false,
                };
                if hit {
                    out.terms[k].insert(i, j);
                }
            }
        }
    }
    out
}

/// The result of a Howe closure computation.
#[derive(Clone, Debug)]
pub struct HoweClosure {
    pub open_base: OpenRelation,
    pub closure: OpenRelation,
    pub iterations: usize,
}

/// The least `S` with `S = R° ∘ Ŝ` on the universe, by iteration from ∅.
pub fn howe_closure(u: &OpenUniverse, open_base: &OpenRelation, max_iterations: usize) -> Result<HoweClosure> {
    let mut s = OpenRelation::empty(u);
    for iterations in 1..=max_iterations {
        let next = compatible_refinement(u, &s).then(open_base);
        if next == s {
            return Ok(HoweClosure {
                open_base: open_base.clone(),
                closure: s,
                iterations,
            });
        }
        s = next;
    }
    Err(Error::Budget(format!(
        "Howe closure did not stabilise within {max_iterations} iterations"
    )))
}

fn clause_for_term(shape: &TShape) -> &'static str {
    match shape {
        TShape::Ret(_) => "Comp3",
        TShape::App(..) => "Comp4",
        TShape::Seq(..) => "Comp5",
        TShape::Op(..) => "Comp6",
    }
}

fn describe(u: &OpenUniverse, report: &mut CheckReport) {
    report
        .bound("max_level", u.max_level())
        .bound(
            "closing_set",
            u.closing.iter().map(print_value).collect::<Vec<_>>(),
        )
        .bound(
            "universe",
            (0..=u.max_level())
                .map(|k| (u.terms(k).len(), u.values(k).len()))
                .collect::<Vec<_>>(),
        )
        .bound("universe_truncated", u.truncated);
}

/// Checks `Ŝ ⊆ S` clause by clause. For preorders the unidirectional
/// variants, `S ∘ Ŝ ⊆ S` restricted to one premise at a time, coincide on
/// the universe with the full clauses and are not reported separately.
pub fn check_compatibility(u: &OpenUniverse, s: &OpenRelation) -> CheckReport {
    let mut report = CheckReport::new("compatibility");
    describe(u, &mut report);
    let refined = compatible_refinement(u, s);
    for k in 0..=u.max_level() {
        let l = &u.levels[k];
        for (i, j) in refined.values[k].pairs() {
            if !s.values[k].contains(i, j) {
                let clause = match l.vshapes[i] {
                    VShape::Var(_) => "Comp1",
                    VShape::Lam(_) => "Comp2",
                };
                report.fail(
                    Witness::new(clause)
                        .with("level", k)
                        .with("left", print_value(&l.values[i]))
                        .with("right", print_value(&l.values[j])),
                );
            }
        }
        for (i, j) in refined.terms[k].pairs() {
            if !s.terms[k].contains(i, j) {
                report.fail(
                    Witness::new(clause_for_term(&l.tshapes[i]))
                        .with("level", k)
                        .with("left", print_term(&l.terms[i]))
                        .with("right", print_term(&l.terms[j])),
                );
            }
        }
    }
    report.stat("refined_pairs", refined.len() as u64);
    report.stat("relation_pairs", s.len() as u64);
    report
}

/// Checks `x0 ⊢ M S N` and `∅ ⊢ V S W` imply `∅ ⊢ M[V/x0] S N[W/x0]`, for
/// terms and values at level 1. Results outside the universe are
/// inconclusive.
pub fn check_value_substitutive(u: &OpenUniverse, s: &OpenRelation) -> CheckReport {
    let mut report = CheckReport::new("value-substitutivity");
    describe(u, &mut report);
    if u.max_level() == 0 {
        report.note("the universe has no open level");
        return report;
    }
    let x0 = context_var(0);
    let (l0, l1) = (&u.levels[0], &u.levels[1]);
    let closed: Vec<(usize, usize)> = s.values[0].pairs().collect();
    let mut samples = 0u64;
    for (i, j) in s.terms[1].pairs() {
        for &(a, b) in &closed {
            samples += 1;
            let m = l1.terms[i].substitute(x0.as_str(), &l0.values[a]);
            let n = l1.terms[j].substitute(x0.as_str(), &l0.values[b]);
            let w = || {
                Witness::new("substitution")
                    .with("left", print_term(&l1.terms[i]))
                    .with("right", print_term(&l1.terms[j]))
                    .with("left_value", print_value(&l0.values[a]))
                    .with("right_value", print_value(&l0.values[b]))
            };
            match (u.term_id(0, &m), u.term_id(0, &n)) {
                (Some(p), Some(q)) => {
                    if !s.terms[0].contains(p, q) {
                        report.fail(w());
                    }
                }
                _ => report.undecided(w().with("reason", "outside the universe")),
            }
        }
    }
    for (i, j) in s.values[1].pairs() {
        for &(a, b) in &closed {
            samples += 1;
            let m = l1.values[i].substitute(x0.as_str(), &l0.values[a]);
            let n = l1.values[j].substitute(x0.as_str(), &l0.values[b]);
            match (u.value_id(0, &m), u.value_id(0, &n)) {
                (Some(p), Some(q)) => {
                    if !s.values[0].contains(p, q) {
                        report.fail(
                            Witness::new("substitution")
                                .with("left", print_value(&l1.values[i]))
                                .with("right", print_value(&l1.values[j]))
                                .with("left_value", print_value(&l0.values[a]))
                                .with("right_value", print_value(&l0.values[b])),
                        );
                    }
                }
                _ => report.undecided(
                    Witness::new("substitution")
                        .with("left", print_value(&l1.values[i]))
                        .with("right", print_value(&l1.values[j]))
                        .with("reason", "outside the universe"),
                ),
            }
        }
    }
    report.stat("samples", samples);
    report
}

/// Checks `closure = R° ∘ (closure)^` extensionally.
pub fn check_fixed_point(u: &OpenUniverse, h: &HoweClosure) -> CheckReport {
    let mut report = CheckReport::new("howe-fixed-point");
    describe(u, &mut report);
    let again = compatible_refinement(u, &h.closure).then(&h.open_base);
    if again != h.closure {
        for k in 0..=u.max_level() {
            let l = &u.levels[k];
            for (i, j) in again.terms[k].pairs().filter(|p| !h.closure.terms[k].contains(p.0, p.1)) {
                report.fail(
                    Witness::new("missing")
                        .with("level", k)
                        .with("left", print_term(&l.terms[i]))
                        .with("right", print_term(&l.terms[j])),
                );
            }
            for (i, j) in h.closure.terms[k].pairs().filter(|p| !again.terms[k].contains(p.0, p.1)) {
                report.fail(
                    Witness::new("extra")
                        .with("level", k)
                        .with("left", print_term(&l.terms[i]))
                        .with("right", print_term(&l.terms[j])),
                );
            }
        }
        if report.passed() {
            report.fail(Witness::new("values"));
        }
    }
    report
}

/// Bounded Key Lemma instance: PASS if the approximant of `m` at `n` is
/// Γ-related, through the closed values of `s`, to some approximant of
/// `target` at an index `≤ m_bound`, and INCONCLUSIVE otherwise.
#[allow(clippy::too_many_arguments)]
pub fn check_key_lemma(
    u: &OpenUniverse,
    s: &OpenRelation,
    relator: &RelatorSpec,
    monad: &MonadSpec,
    m: &Term,
    target: &Term,
    n: u32,
    m_bound: u32,
) -> Result<CheckReport> {
    relator.check_monad(monad.kind())?;
    if !s.relates_terms(u, 0, m, target) {
        return Err(Error::Precondition(format!(
            "({}, {}) is not in the relation",
            print_term(m),
            print_term(target)
        )));
    }
    let mut report = CheckReport::new("key-lemma");
    describe(u, &mut report);
    report
        .bound("relator", relator.to_string())
        .bound("n", n)
        .bound("m_bound", m_bound);
    let mut ev = Evaluator::new(monad.clone())?;
    let x = ev.approximate(m, n)?;
    let related = |a: &Value, b: &Value| s.relates_values(u, 0, a, b);
    for m2 in 0..=m_bound {
        let y = ev.approximate(target, m2)?;
        if lift_holds_by(relator, related, &x, &y)? {
            report.stat("witness_index", m2 as u64);
            return Ok(report);
        }
    }
    report.undecided(
        Witness::new("no witness")
            .with("left", print_term(m))
            .with("right", print_term(target))
            .with("left_value", &x),
    );
    Ok(report)
}
