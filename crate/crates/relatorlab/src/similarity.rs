//! Applicative Γ-simulations on the transition system of closed terms.
//!
//! A closed relation pair relates terms and values. Sim-1 asks that related
//! terms have Γ-related approximants at a fixed index; Sim-2 asks that
//! related values stay related after application to every test argument.
//! Bounded similarity is the greatest fixed point of the induced operator on
//! a finite universe, computed from the full relation downwards.
//!
//! Whenever a check needs a term or value outside the universe, the pair in
//! question is kept and flagged inconclusive instead of being dropped.

use std::collections::{BTreeSet, HashMap};

use crate::bitrel::BitRel;
use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, Sem};
use crate::monads::{MonValue, MonadSpec};
use crate::relators::{holds_indexed, lift_holds_by, RelatorSpec};
use crate::report::{CheckReport, Witness};
use crate::syntax::{print_term, print_value, Term, Value};

/// Finite sets of closed terms and values, each indexed by position.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    terms: Vec<Term>,
    values: Vec<Value>,
    term_ids: HashMap<Term, usize>,
    value_ids: HashMap<Value, usize>,
    /// Set when closing the universe stopped at its size cap.
    truncated: bool,
}

impl Universe {
    pub fn new(
        terms: impl IntoIterator<Item = Term>,
        values: impl IntoIterator<Item = Value>,
    ) -> Result<Universe> {
        let mut u = Universe::default();
        for t in terms {
            u.add_term(t)?;
        }
        for v in values {
            u.add_value(v)?;
        }
        Ok(u)
    }

    /// Extends `terms` and `values` until every support value of a term's
    /// approximant at `precision` and every application `v w` of a value to
    /// a test argument is present, or until `cap` elements in total.
    pub fn closed_under(
        terms: impl IntoIterator<Item = Term>,
        values: impl IntoIterator<Item = Value>,
        test_args: &[Value],
        monad: &MonadSpec,
        precision: u32,
        cap: usize,
    ) -> Result<Universe> {
        let mut u = Universe::new(terms, values)?;
        for w in test_args {
            u.add_value(w.clone())?;
        }
        let mut ev = Evaluator::new(monad.clone())?;
        let (mut next_term, mut next_value) = (0, 0);
        while next_term < u.terms.len() || next_value < u.values.len() {
            if u.terms.len() + u.values.len() >= cap {
                u.truncated = true;
                break;
            }
            if next_term < u.terms.len() {
                let t = u.terms[next_term].clone();
                next_term += 1;
                let sem = ev.approximate(&t, precision)?;
                for v in sem.support() {
                    u.add_value(v.clone())?;
                }
            } else {
                let v = u.values[next_value].clone();
                next_value += 1;
                for w in test_args {
                    u.add_term(Term::app(v.clone(), w.clone()))?;
                }
            }
        }
        Ok(u)
    }

    pub fn add_term(&mut self, t: Term) -> Result<usize> {
        if let Some(&i) = self.term_ids.get(&t) {
            return Ok(i);
        }
        ensure_closed_term(&t)?;
        self.term_ids.insert(t.clone(), self.terms.len());
        self.terms.push(t);
        Ok(self.terms.len() - 1)
    }

    pub fn add_value(&mut self, v: Value) -> Result<usize> {
        if let Some(&i) = self.value_ids.get(&v) {
            return Ok(i);
        }
        if !v.is_closed() {
            return Err(Error::OpenTerm(print_value(&v)));
        }
        self.value_ids.insert(v.clone(), self.values.len());
        self.values.push(v);
        Ok(self.values.len() - 1)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn term_id(&self, t: &Term) -> Option<usize> {
        self.term_ids.get(t).copied()
    }

    pub fn value_id(&self, v: &Value) -> Option<usize> {
        self.value_ids.get(v).copied()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }
}

fn ensure_closed_term(t: &Term) -> Result<()> {
    if !t.is_closed() {
        let fv: Vec<String> = t.free_vars().iter().map(|x| x.to_string()).collect();
        return Err(Error::OpenTerm(fv.join(", ")));
    }
    Ok(())
}

/// A relation on closed terms together with one on closed values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedRelationPair {
    pub terms: BTreeSet<(Term, Term)>,
    pub values: BTreeSet<(Value, Value)>,
}

impl ClosedRelationPair {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(u: &Universe) -> Self {
        ClosedRelationPair {
            terms: u.terms.iter().map(|t| (t.clone(), t.clone())).collect(),
            values: u.values.iter().map(|v| (v.clone(), v.clone())).collect(),
        }
    }

    pub fn converse(&self) -> Self {
        ClosedRelationPair {
            terms: self.terms.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            values: self.values.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        ClosedRelationPair {
            terms: self.terms.intersection(&other.terms).cloned().collect(),
            values: self.values.intersection(&other.values).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.terms.is_subset(&other.terms) && self.values.is_subset(&other.values)
    }

    pub fn len(&self) -> usize {
        self.terms.len() + self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.values.is_empty()
    }

    /// The coarsest candidate simulation reachable from `seeds`: support
    /// values of related terms are related pairwise, and related values are
    /// applied to every test argument. Stops after `cap` pairs.
    pub fn saturate(seeds: &[(Term, Term)], cfg: &SimConfig, cap: usize) -> Result<Self> {
        cfg.validate()?;
        let mut ev = cfg.evaluator()?;
        let mut r = ClosedRelationPair::new();
        let mut todo: Vec<(Term, Term)> = seeds.to_vec();
        while let Some((m, n)) = todo.pop() {
            if r.len() >= cap {
                break;
            }
            if !r.terms.insert((m.clone(), n.clone())) {
                continue;
            }
            let (a, b) = (ev.approximate(&m, cfg.precision)?, ev.approximate(&n, cfg.precision)?);
            for x in a.support() {
                for y in b.support() {
                    if r.values.insert((x.clone(), y.clone())) {
                        for w in &cfg.test_args {
                            todo.push((Term::app(x.clone(), w.clone()), Term::app(y.clone(), w.clone())));
                        }
                    }
                }
            }
        }
        Ok(r)
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub relator: RelatorSpec,
    pub monad: MonadSpec,
    /// The evaluation index at which approximants are compared.
    pub precision: u32,
    /// Arguments standing in for all closed values in Sim-2.
    pub test_args: Vec<Value>,
    /// When present, application pairs leaving it are inconclusive rather
    /// than failures.
    pub universe: Option<Universe>,
    pub step_budget: Option<u64>,
}

impl SimConfig {
    pub fn new(relator: RelatorSpec, monad: MonadSpec, precision: u32) -> Self {
        SimConfig {
            relator,
            monad,
            precision,
            test_args: Vec::new(),
            universe: None,
            step_budget: None,
        }
    }

    pub fn with_test_args(mut self, args: Vec<Value>) -> Self {
        self.test_args = args;
        self
    }

    pub fn with_universe(mut self, u: Universe) -> Self {
        self.universe = Some(u);
        self
    }

    fn validate(&self) -> Result<()> {
        self.relator.check_monad(self.monad.kind())?;
        if self.precision == 0 {
            return Err(Error::Precondition("precision must be at least 1".into()));
        }
        if let Some(w) = self.test_args.iter().find(|w| !w.is_closed()) {
            return Err(Error::OpenTerm(print_value(w)));
        }
        Ok(())
    }

    fn evaluator(&self) -> Result<Evaluator> {
        let ev = Evaluator::new(self.monad.clone())?;
        Ok(match self.step_budget {
            Some(b) => ev.with_budget(b),
            None => ev,
        })
    }

    fn describe(&self, report: &mut CheckReport) {
        report
            .bound("relator", self.relator.to_string())
            .bound("monad", self.monad.to_string())
            .bound("precision", self.precision)
            .bound(
                "test_args",
                self.test_args.iter().map(print_value).collect::<Vec<_>>(),
            );
    }
}

/// Checks Sim-1 and Sim-2 for `r`.
pub fn check_simulation(r: &ClosedRelationPair, cfg: &SimConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let mut report = CheckReport::new("simulation");
    cfg.describe(&mut report);
    report
        .stat("term_pairs", r.terms.len() as u64)
        .stat("value_pairs", r.values.len() as u64);
    let mut ev = cfg.evaluator()?;
    for (m, n) in &r.terms {
        ensure_closed_term(m)?;
        ensure_closed_term(n)?;
        let (a, b) = (ev.approximate(m, cfg.precision)?, ev.approximate(n, cfg.precision)?);
        let ok = lift_holds_by(
            &cfg.relator,
            |x: &Value, y: &Value| r.values.contains(&(x.clone(), y.clone())),
            &a,
            &b,
        )?;
        if !ok {
            report.fail(
                Witness::new("Sim-1")
                    .with("left", print_term(m))
                    .with("right", print_term(n))
                    .with("left_value", &a)
                    .with("right_value", &b),
            );
        }
    }
    for (v, w) in &r.values {
        for arg in &cfg.test_args {
            let (vx, wx) = (Term::app(v.clone(), arg.clone()), Term::app(w.clone(), arg.clone()));
            if r.terms.contains(&(vx.clone(), wx.clone())) {
                continue;
            }
            let escapes = cfg
                .universe
                .as_ref()
                .is_some_and(|u| u.term_id(&vx).is_none() || u.term_id(&wx).is_none());
            let witness = Witness::new("Sim-2")
                .with("left", print_value(v))
                .with("right", print_value(w))
                .with("argument", print_value(arg));
            if escapes {
                report.undecided(witness.with("reason", "application leaves the universe"));
            } else {
                report.fail(witness);
            }
        }
    }
    report.stat("evaluation_steps", ev.stats().steps);
    Ok(report)
}

/// Approximants of the universe's terms with support values replaced by
/// indices. Values outside the universe get indices from `values.len()` up.
struct SemTable {
    sems: Vec<MonValue<usize>>,
    raw: Vec<Sem>,
    n_values: usize,
}

impl SemTable {
    fn build(u: &Universe, cfg: &SimConfig) -> Result<SemTable> {
        let mut ev = cfg.evaluator()?;
        let mut extra: HashMap<Value, usize> = HashMap::new();
        let n_values = u.values.len();
        let mut sems = Vec::with_capacity(u.terms.len());
        let mut raw = Vec::with_capacity(u.terms.len());
        for t in &u.terms {
            let s = ev.approximate(t, cfg.precision)?;
            sems.push(s.map(|v| match u.value_id(v) {
                Some(i) => i,
                None => {
                    let next = n_values + extra.len();
                    *extra.entry(v.clone()).or_insert(next)
                }
            }));
            raw.push(s);
        }
        Ok(SemTable { sems, raw, n_values })
    }
}

/// The outcome of a bounded similarity run, indexed by the universe.
#[derive(Clone, Debug)]
pub struct Similarity {
    pub universe: Universe,
    pub relator: RelatorSpec,
    pub terms: BitRel,
    pub values: BitRel,
    /// Surviving pairs whose survival depended on elements outside the
    /// universe.
    pub inconclusive_terms: BitRel,
    pub inconclusive_values: BitRel,
    pub iterations: usize,
    pub report: CheckReport,
}

impl Similarity {
    pub fn term_pairs(&self) -> impl Iterator<Item = (&Term, &Term)> + '_ {
        self.terms
            .pairs()
            .map(|(i, j)| (&self.universe.terms[i], &self.universe.terms[j]))
    }

    pub fn value_pairs(&self) -> impl Iterator<Item = (&Value, &Value)> + '_ {
        self.values
            .pairs()
            .map(|(i, j)| (&self.universe.values[i], &self.universe.values[j]))
    }

    pub fn relates_terms(&self, m: &Term, n: &Term) -> bool {
        match (self.universe.term_id(m), self.universe.term_id(n)) {
            (Some(i), Some(j)) => self.terms.contains(i, j),
            _ => false,
        }
    }

    pub fn relates_values(&self, v: &Value, w: &Value) -> bool {
        match (self.universe.value_id(v), self.universe.value_id(w)) {
            (Some(i), Some(j)) => self.values.contains(i, j),
            _ => false,
        }
    }

    pub fn to_pairs(&self) -> ClosedRelationPair {
        ClosedRelationPair {
            terms: self.term_pairs().map(|(a, b)| (a.clone(), b.clone())).collect(),
            values: self.value_pairs().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }

    /// Pairs related in both directions.
    pub fn two_way(&self) -> (BitRel, BitRel) {
        (
            self.terms.intersect(&self.terms.converse()),
            self.values.intersect(&self.values.converse()),
        )
    }
}

/// Greatest fixed point of the simulation operator on `universe`.
pub fn bounded_similarity(cfg: &SimConfig, universe: &Universe) -> Result<Similarity> {
    similarity_with(cfg, universe, "similarity")
}

/// Bounded similarity for `Γ ∩ Γᶜ`.
pub fn bisimilarity(cfg: &SimConfig, universe: &Universe) -> Result<Similarity> {
    let mut sym = cfg.clone();
    sym.relator = cfg.relator.clone().symmetrize();
    similarity_with(&sym, universe, "bisimilarity")
}

fn similarity_with(cfg: &SimConfig, universe: &Universe, check: &str) -> Result<Similarity> {
    cfg.validate()?;
    let table = SemTable::build(universe, cfg)?;
    let (nt, nv) = (universe.terms.len(), universe.values.len());
    // apps[v][k]: index of the term `v w_k`, if it is in the universe.
    let apps: Vec<Vec<Option<usize>>> = universe
        .values
        .iter()
        .map(|v| {
            cfg.test_args
                .iter()
                .map(|w| universe.term_id(&Term::app(v.clone(), w.clone())))
                .collect()
        })
        .collect();

    let mut terms = BitRel::full(nt);
    let mut values = BitRel::full(nv);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        let current_values = values.clone();
        let pairs: Vec<(usize, usize)> = terms.pairs().collect();
        for (i, j) in pairs {
            let (_, keep) = sim1(cfg, &table, &current_values, i, j);
            if !keep {
                terms.remove(i, j);
                changed = true;
            }
        }
        let pairs: Vec<(usize, usize)> = values.pairs().collect();
        for (a, b) in pairs {
            let keep = apps[a].iter().zip(&apps[b]).all(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => terms.contains(*x, *y),
                _ => true,
            });
            if !keep {
                values.remove(a, b);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut inconclusive_terms = BitRel::empty(nt);
    let mut inconclusive_values = BitRel::empty(nv);
    for (i, j) in terms.pairs() {
        if sim1(cfg, &table, &values, i, j).0 {
            inconclusive_terms.insert(i, j);
        }
    }
    for (a, b) in values.pairs() {
        if apps[a].iter().zip(&apps[b]).any(|(x, y)| x.is_none() || y.is_none()) {
            inconclusive_values.insert(a, b);
        }
    }

    let mut report = CheckReport::new(check);
    cfg.describe(&mut report);
    report
        .bound("universe_terms", nt)
        .bound("universe_values", nv)
        .bound("universe_truncated", universe.is_truncated())
        .stat("iterations", iterations as u64)
        .stat("related_terms", terms.len() as u64)
        .stat("related_values", values.len() as u64);
    for (i, j) in inconclusive_terms.pairs().chain(inconclusive_values.pairs().map(|p| (p.0 + nt, p.1 + nt))) {
        let w = if i < nt {
            Witness::new("Sim-1")
                .with("left", print_term(&universe.terms[i]))
                .with("right", print_term(&universe.terms[j]))
                .with("left_value", &table.raw[i])
                .with("right_value", &table.raw[j])
        } else {
            Witness::new("Sim-2")
                .with("left", print_value(&universe.values[i - nt]))
                .with("right", print_value(&universe.values[j - nt]))
        };
        report.undecided(w.with("reason", "kept because it reaches outside the universe"));
    }
    Ok(Similarity {
        universe: universe.clone(),
        relator: cfg.relator.clone(),
        terms,
        values,
        inconclusive_terms,
        inconclusive_values,
        iterations,
        report,
    })
}

/// Sim-1 for terms `i` and `j`. Values outside the universe are treated as
/// related; the first component says whether the verdict depended on that.
fn sim1(cfg: &SimConfig, table: &SemTable, values: &BitRel, i: usize, j: usize) -> (bool, bool) {
    let nv = table.n_values;
    let known = |x: usize, y: usize| x < nv && y < nv;
    let optimistic = |x: usize, y: usize| !known(x, y) || values.contains(x, y);
    let (a, b) = (&table.sems[i], &table.sems[j]);
    if !holds_indexed(&cfg.relator, &optimistic, a, b) {
        return (false, false);
    }
    let touches_unknown = a.support().iter().any(|x| **x >= nv) || b.support().iter().any(|y| **y >= nv);
    if !touches_unknown {
        return (false, true);
    }
    let strict = |x: usize, y: usize| known(x, y) && values.contains(x, y);
    (!holds_indexed(&cfg.relator, &strict, a, b), true)
}

/// Checks `⟦M⟧ Γ𝒰 ⟦N⟧` at the configured index, with `𝒰` relating all
/// values.
pub fn check_preadequate(pairs: &[(Term, Term)], cfg: &SimConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let mut report = CheckReport::new("preadequacy");
    cfg.describe(&mut report);
    report.stat("pairs", pairs.len() as u64);
    let mut ev = cfg.evaluator()?;
    for (m, n) in pairs {
        ensure_closed_term(m)?;
        ensure_closed_term(n)?;
        let (a, b) = (ev.approximate(m, cfg.precision)?, ev.approximate(n, cfg.precision)?);
        if !lift_holds_by(&cfg.relator, |_: &Value, _: &Value| true, &a, &b)? {
            report.fail(
                Witness::new("preadequacy")
                    .with("left", print_term(m))
                    .with("right", print_term(n))
                    .with("left_observation", format!("{:?}", cfg.monad.observe(&a)))
                    .with("right_observation", format!("{:?}", cfg.monad.observe(&b))),
            );
        }
    }
    Ok(report)
}
