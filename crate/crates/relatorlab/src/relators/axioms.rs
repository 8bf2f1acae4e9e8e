//! Property suites for the relator, lax-extension, inductivity and Σ axioms
//! over small carriers `{0, …, k-1}`.
//!
//! Relations are bitmasks over `k × k` (bit `i·k + j` for the pair `(i, j)`),
//! and the monadic side ranges over a finite universe of values of `T k`.
//! Every universe holds at most 64 values so that a lifted relation fits one
//! machine word per row.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::monads::{MonValue, MonadKind, MonadSpec, Outcome};
use crate::rational::{q, Q};
use crate::report::{CheckReport, Witness};
use crate::syntax::{Name, Signature};

use super::lift::holds_indexed;
use super::spec::RelatorSpec;

/// A relation lifting on index carriers. Implemented by [`RelatorSpec`] and
/// by the mutants used to test the suites themselves.
pub trait Lifting {
    fn name(&self) -> String;
    fn holds(
        &self,
        r: &dyn Fn(usize, usize) -> bool,
        u: &MonValue<usize>,
        v: &MonValue<usize>,
    ) -> bool;
}

impl Lifting for RelatorSpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn holds(
        &self,
        r: &dyn Fn(usize, usize) -> bool,
        u: &MonValue<usize>,
        v: &MonValue<usize>,
    ) -> bool {
        holds_indexed(self, r, u, v)
    }
}

/// The powerset lifting with `∃x ∈ u. ∃y ∈ v. x R y`, which is not a
/// relator.
pub struct BrokenPowerLifting;

impl Lifting for BrokenPowerLifting {
    fn name(&self) -> String {
        "broken-gpow".into()
    }

    fn holds(
        &self,
        r: &dyn Fn(usize, usize) -> bool,
        u: &MonValue<usize>,
        v: &MonValue<usize>,
    ) -> bool {
        match (u, v) {
            (MonValue::Nondet(x), MonValue::Nondet(y)) => {
                x.iter().any(|a| y.iter().any(|b| r(*a, *b)))
            }
            _ => false,
        }
    }
}

/// Unit and bind on index carriers.
pub trait Kleisli {
    fn name(&self) -> String;
    fn unit(&self, a: usize) -> MonValue<usize>;
    fn bind(
        &self,
        u: &MonValue<usize>,
        f: &dyn Fn(usize) -> MonValue<usize>,
    ) -> Result<MonValue<usize>>;
}

impl Kleisli for MonadSpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn unit(&self, a: usize) -> MonValue<usize> {
        MonadSpec::unit(self, a)
    }

    fn bind(
        &self,
        u: &MonValue<usize>,
        f: &dyn Fn(usize) -> MonValue<usize>,
    ) -> Result<MonValue<usize>> {
        u.bind(|a| Ok(f(*a)))
    }
}

/// Partiality whose bind runs the continuation on `0` when the argument
/// diverges, breaking strictness.
pub struct NonStrictPartialBind;

impl Kleisli for NonStrictPartialBind {
    fn name(&self) -> String {
        "non-strict-partiality".into()
    }

    fn unit(&self, a: usize) -> MonValue<usize> {
        MonValue::Partial(Some(a))
    }

    fn bind(
        &self,
        u: &MonValue<usize>,
        f: &dyn Fn(usize) -> MonValue<usize>,
    ) -> Result<MonValue<usize>> {
        Ok(match u {
            MonValue::Partial(None) => f(0),
            MonValue::Partial(Some(a)) => f(*a),
            other => other.clone(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct AxiomConfig {
    pub carrier_size: usize,
    /// Samples per sampled axiom.
    pub samples: usize,
    /// Relations on the carrier are enumerated exhaustively up to this
    /// count and sampled beyond it.
    pub max_relations: usize,
    pub seed: u64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig {
            carrier_size: 3,
            samples: 1000,
            max_relations: 512,
            seed: 0x5eed,
        }
    }
}

pub const MAX_CARRIER: usize = 5;
const UNIVERSE_CAP: usize = 64;

type Rel = u32;

struct Carrier {
    k: usize,
    relations: Vec<Rel>,
    exhaustive: bool,
}

impl Carrier {
    fn new(cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> Carrier {
        let k = cfg.carrier_size.clamp(1, MAX_CARRIER);
        let bits = k * k;
        let total = 1u64 << bits;
        if total <= cfg.max_relations as u64 {
            return Carrier {
                k,
                relations: (0..total as Rel).collect(),
                exhaustive: true,
            };
        }
        let mut set: BTreeSet<Rel> = [0, full_rel(k), id_rel(k)].into();
        while set.len() < cfg.max_relations {
            set.insert(rng.gen::<Rel>() & full_rel(k));
        }
        Carrier {
            k,
            relations: set.into_iter().collect(),
            exhaustive: false,
        }
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Rel {
        rng.gen::<Rel>() & full_rel(self.k)
    }
}

fn full_rel(k: usize) -> Rel {
    ((1u64 << (k * k)) - 1) as Rel
}

fn id_rel(k: usize) -> Rel {
    (0..k).fold(0, |r, i| r | bit(k, i, i))
}

fn bit(k: usize, i: usize, j: usize) -> Rel {
    1 << (i * k + j)
}

fn has(k: usize, r: Rel, i: usize, j: usize) -> bool {
    i < k && j < k && r & bit(k, i, j) != 0
}

fn then(k: usize, r: Rel, s: Rel) -> Rel {
    let mut out = 0;
    for i in 0..k {
        for j in 0..k {
            if has(k, r, i, j) {
                for l in 0..k {
                    if has(k, s, j, l) {
                        out |= bit(k, i, l);
                    }
                }
            }
        }
    }
    out
}

fn show_rel(k: usize, r: Rel) -> String {
    let pairs: Vec<String> = (0..k * k)
        .filter(|b| r & (1 << b) != 0)
        .map(|b| format!("({},{})", b / k, b % k))
        .collect();
    format!("{{{}}}", pairs.join(" "))
}

fn show_fn(f: &[usize]) -> String {
    let parts: Vec<String> = f.iter().enumerate().map(|(i, y)| format!("{i}->{y}")).collect();
    format!("[{}]", parts.join(" "))
}

fn grid_weights(n: usize, parts: u32, max_support: usize) -> Vec<Vec<u32>> {
    fn go(n: usize, left: u32, max_support: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let used = cur.iter().filter(|w| **w > 0).count();
        for w in 0..=left {
            if w > 0 && used >= max_support {
                break;
            }
            cur.push(w);
            go(n, left - w, max_support, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, parts, max_support, &mut Vec::new(), &mut out);
    out
}

/// Subdistributions over `n` points: a grid of halves, plus a few quarters
/// and thirds so that flows with unequal splits are exercised.
fn weight_vectors(n: usize) -> Vec<BTreeMap<usize, Q>> {
    let mut out: Vec<BTreeMap<usize, Q>> = grid_weights(n, 2, 2)
        .into_iter()
        .map(|w| {
            w.iter()
                .enumerate()
                .filter(|(_, x)| **x > 0)
                .map(|(i, x)| (i, q(*x as i64, 2)))
                .collect()
        })
        .collect();
    for i in 0..n {
        out.push([(i, q(1, 4))].into());
        out.push([(i, q(3, 4))].into());
        if i + 1 < n {
            out.push([(i, q(1, 4)), (i + 1, q(3, 4))].into());
            out.push([(i, q(2, 3)), (i + 1, q(1, 3))].into());
        }
    }
    if n >= 3 {
        out.push((0..3).map(|i| (i, q(1, 3))).collect());
    }
    out
}

/// A finite universe of values of `T {0..k-1}`, with ⊥ first when the
/// monad has one.
pub fn carrier_values(monad: &MonadSpec, k: usize, seed: u64) -> Vec<MonValue<usize>> {
    let elems = || 0..k;
    let mut out: Vec<MonValue<usize>> = match monad.kind() {
        MonadKind::Partiality => std::iter::once(None)
            .chain(elems().map(Some))
            .map(MonValue::Partial)
            .collect(),
        MonadKind::Exceptions | MonadKind::PartialityExceptions => {
            let mut os: Vec<Outcome<usize>> =
                monad.exceptions().iter().cloned().map(Outcome::Raised).collect();
            os.extend(elems().map(Outcome::Just));
            if monad.kind() == MonadKind::Exceptions {
                os.into_iter().map(MonValue::Exc).collect()
            } else {
                std::iter::once(None)
                    .chain(os.into_iter().map(Some))
                    .map(MonValue::PartExc)
                    .collect()
            }
        }
        MonadKind::FiniteNondet => {
            let max = if k <= 4 { k } else { 2 };
            (0u32..1 << k)
                .filter(|m| m.count_ones() as usize <= max)
                .map(|m| MonValue::Nondet(elems().filter(|i| m & (1 << i) != 0).collect()))
                .collect()
        }
        MonadKind::Subdistribution => weight_vectors(k).into_iter().map(MonValue::Dist).collect(),
        MonadKind::ProbExceptions => {
            let mut os: Vec<Outcome<usize>> = elems().map(Outcome::Just).collect();
            os.extend(monad.exceptions().iter().cloned().map(Outcome::Raised));
            weight_vectors(os.len())
                .into_iter()
                .map(|m| MonValue::ProbExc(m.into_iter().map(|(i, w)| (os[i].clone(), w)).collect()))
                .collect()
        }
        MonadKind::GlobalState => {
            let ns = monad.states().len();
            let mut entries: Vec<Option<(usize, usize)>> = vec![None];
            entries.extend(elems().flat_map(|a| (0..ns).map(move |s| Some((a, s)))));
            let mut tables: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new()];
            for _ in 0..ns {
                tables = tables
                    .into_iter()
                    .flat_map(|t| {
                        entries.iter().map(move |e| {
                            let mut t = t.clone();
                            t.push(*e);
                            t
                        })
                    })
                    .collect();
            }
            tables.into_iter().map(MonValue::State).collect()
        }
        MonadKind::Output => {
            let alphabet = monad.alphabet().to_vec();
            let mut prefixes: Vec<Vec<Name>> = vec![Vec::new()];
            let mut layer = vec![Vec::new()];
            for _ in 0..2 {
                layer = layer
                    .iter()
                    .flat_map(|p: &Vec<Name>| {
                        alphabet.iter().map(move |c| {
                            let mut p = p.clone();
                            p.push(c.clone());
                            p
                        })
                    })
                    .collect();
                prefixes.extend(layer.iter().cloned());
            }
            prefixes
                .into_iter()
                .flat_map(|p| {
                    std::iter::once(None)
                        .chain(elems().map(Some))
                        .map(move |x| MonValue::Output(p.clone(), x))
                })
                .collect()
        }
    };
    out.sort();
    out.dedup();
    if let Ok(bot) = monad.bottom::<usize>() {
        out.retain(|u| *u != bot);
        out.insert(0, bot);
    }
    if out.len() > UNIVERSE_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rest = out.split_off(1);
        rest.shuffle(&mut rng);
        rest.truncate(UNIVERSE_CAP - 1);
        rest.sort();
        out.extend(rest);
    }
    out
}

/// Rows of the lifted relation over the universe, one bit per column.
fn lift_rows(l: &dyn Lifting, k: usize, r: Rel, univ: &[MonValue<usize>]) -> Vec<u64> {
    let pred = |i: usize, j: usize| has(k, r, i, j);
    univ.iter()
        .map(|u| {
            univ.iter()
                .enumerate()
                .filter(|(_, v)| l.holds(&pred, u, v))
                .fold(0u64, |row, (j, _)| row | (1 << j))
        })
        .collect()
}

fn random_fn(rng: &mut ChaCha8Rng, k: usize, i: usize) -> Vec<usize> {
    match i % 4 {
        0 => (0..k).collect(),
        1 => vec![rng.gen_range(0..k); k],
        _ => (0..k).map(|_| rng.gen_range(0..k)).collect(),
    }
}

fn universe_for(monad: &MonadSpec, cfg: &AxiomConfig, report: &mut CheckReport) -> Vec<MonValue<usize>> {
    let k = cfg.carrier_size.clamp(1, MAX_CARRIER);
    let univ = carrier_values(monad, k, cfg.seed);
    report
        .bound("carrier_size", k)
        .bound("universe_size", univ.len())
        .bound("seed", cfg.seed);
    univ
}

/// Rel-1 to Rel-4 for a relator spec, after checking it lifts `monad`.
pub fn check_relator_axioms(
    spec: &RelatorSpec,
    monad: &MonadSpec,
    cfg: &AxiomConfig,
) -> Result<CheckReport> {
    spec.check_monad(monad.kind())?;
    Ok(check_relator_axioms_with(spec, monad, cfg))
}

pub fn check_relator_axioms_with(
    l: &dyn Lifting,
    monad: &MonadSpec,
    cfg: &AxiomConfig,
) -> CheckReport {
    let mut report = CheckReport::new(format!("relator-axioms {} on {monad}", l.name()));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let carrier = Carrier::new(cfg, &mut rng);
    let k = carrier.k;
    let univ = universe_for(monad, cfg, &mut report);
    report
        .bound("relations", carrier.relations.len())
        .bound("relations_exhaustive", carrier.exhaustive)
        .bound("samples", cfg.samples);
    let show = |i: usize| univ[i].to_string();

    // Rel-1.
    let eq = |i: usize, j: usize| i == j;
    for u in &univ {
        if !l.holds(&eq, u, u) {
            report.fail(Witness::new("Rel-1").with("u", u));
        }
    }
    report.stat("rel1_instances", univ.len() as u64);

    let rows: BTreeMap<Rel, Vec<u64>> = carrier
        .relations
        .iter()
        .map(|&r| (r, lift_rows(l, k, r, &univ)))
        .collect();
    let row_of = |r: Rel| -> Cow<'_, [u64]> {
        match rows.get(&r) {
            Some(row) => Cow::Borrowed(row.as_slice()),
            None => Cow::Owned(lift_rows(l, k, r, &univ)),
        }
    };

    // Rel-4, via single-pair extensions: inclusion is their transitive
    // closure.
    let mut rel4 = 0u64;
    for &r in &carrier.relations {
        for b in 0..k * k {
            let s = r | (1 << b);
            if s == r || !rows.contains_key(&s) {
                continue;
            }
            rel4 += 1;
            let (gr, gs) = (&rows[&r], &rows[&s]);
            if let Some(i) = (0..univ.len()).find(|&i| gr[i] & !gs[i] != 0) {
                let j = (gr[i] & !gs[i]).trailing_zeros() as usize;
                report.fail(
                    Witness::new("Rel-4")
                        .with("R", show_rel(k, r))
                        .with("S", show_rel(k, s))
                        .with("u", show(i))
                        .with("v", show(j)),
                );
            }
        }
    }
    report.stat("rel4_instances", rel4);

    // Rel-2: ΓS ∘ ΓR ⊆ Γ(S ∘ R).
    let pairs: Vec<(Rel, Rel)> = if carrier.exhaustive {
        carrier
            .relations
            .iter()
            .flat_map(|&r| carrier.relations.iter().map(move |&s| (r, s)))
            .collect()
    } else {
        (0..cfg.samples.max(carrier.relations.len()))
            .map(|_| (carrier.random(&mut rng), carrier.random(&mut rng)))
            .collect()
    };
    report.stat("rel2_instances", pairs.len() as u64);
    for (r, s) in pairs {
        let (gr, gs) = (row_of(r), row_of(s));
        let gsr = row_of(then(k, r, s));
        for i in 0..univ.len() {
            let mut reach = 0u64;
            let mut mid = gr[i];
            while mid != 0 {
                let j = mid.trailing_zeros() as usize;
                mid &= mid - 1;
                reach |= gs[j];
            }
            let bad = reach & !gsr[i];
            if bad != 0 {
                let w = bad.trailing_zeros() as usize;
                let v = (0..univ.len())
                    .find(|&j| gr[i] & (1 << j) != 0 && gs[j] & (1 << w) != 0)
                    .expect("a middle value exists");
                report.fail(
                    Witness::new("Rel-2")
                        .with("R", show_rel(k, r))
                        .with("S", show_rel(k, s))
                        .with("u", show(i))
                        .with("v", show(v))
                        .with("w", show(w)),
                );
                break;
            }
        }
    }

    // Rel-3: Γ((f × g)⁻¹ R) = (Tf × Tg)⁻¹ ΓR on sampled f, g, R.
    for n in 0..cfg.samples {
        let f = random_fn(&mut rng, k, n);
        let g = random_fn(&mut rng, k, n / 4 + 1);
        let r = carrier.random(&mut rng);
        let inv = |i: usize, j: usize| has(k, r, f[i], g[j]);
        let direct = |i: usize, j: usize| has(k, r, i, j);
        for _ in 0..4 {
            let u = univ.choose(&mut rng).expect("nonempty universe");
            let v = univ.choose(&mut rng).expect("nonempty universe");
            let (fu, gv) = (u.map(|a| f[*a]), v.map(|a| g[*a]));
            let lhs = l.holds(&inv, u, v);
            let rhs = l.holds(&direct, &fu, &gv);
            if lhs != rhs {
                report.fail(
                    Witness::new("Rel-3")
                        .with("R", show_rel(k, r))
                        .with("f", show_fn(&f))
                        .with("g", show_fn(&g))
                        .with("u", u)
                        .with("v", v)
                        .with("inverse_image", lhs)
                        .with("lifted", rhs),
                );
            }
        }
    }
    report.stat("rel3_instances", cfg.samples as u64);
    report
}

/// Lax-Unit and Lax-Bind for a relator spec over `monad`.
pub fn check_lax_axioms(
    spec: &RelatorSpec,
    monad: &MonadSpec,
    cfg: &AxiomConfig,
) -> Result<CheckReport> {
    spec.check_monad(monad.kind())?;
    Ok(check_lax_axioms_with(spec, monad, monad, cfg))
}

pub fn check_lax_axioms_with(
    l: &dyn Lifting,
    t: &dyn Kleisli,
    monad: &MonadSpec,
    cfg: &AxiomConfig,
) -> CheckReport {
    let mut report = CheckReport::new(format!("lax-axioms {} on {}", l.name(), t.name()));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1a7);
    let carrier = Carrier::new(cfg, &mut rng);
    let k = carrier.k;
    let univ = universe_for(monad, cfg, &mut report);
    report
        .bound("relations", carrier.relations.len())
        .bound("samples", cfg.samples);

    // Lax-Unit: R ⊆ (η × η)⁻¹(ΓR).
    let mut unit_instances = 0u64;
    for &r in &carrier.relations {
        let pred = |i: usize, j: usize| has(k, r, i, j);
        for i in 0..k {
            for j in 0..k {
                if has(k, r, i, j) {
                    unit_instances += 1;
                    if !l.holds(&pred, &t.unit(i), &t.unit(j)) {
                        report.fail(
                            Witness::new("Lax-Unit")
                                .with("R", show_rel(k, r))
                                .with("x", i)
                                .with("y", j),
                        );
                    }
                }
            }
        }
    }
    report.stat("lax_unit_instances", unit_instances);

    // Lax-Bind on sampled quadruples satisfying the premise.
    let mut bind_instances = 0u64;
    let mut attempts = 0usize;
    while bind_instances < cfg.samples as u64 && attempts < cfg.samples * 20 {
        attempts += 1;
        let r = if attempts == 1 { 0 } else { carrier.random(&mut rng) };
        let s = carrier.random(&mut rng);
        let rp = |i: usize, j: usize| has(k, r, i, j);
        let sp = |i: usize, j: usize| has(k, s, i, j);
        let f: Vec<MonValue<usize>> = (0..k)
            .map(|_| univ.choose(&mut rng).expect("nonempty").clone())
            .collect();
        let mut g = Vec::with_capacity(k);
        for y in 0..k {
            let ok: Vec<&MonValue<usize>> = univ
                .iter()
                .filter(|w| (0..k).all(|x| !has(k, r, x, y) || l.holds(&sp, &f[x], w)))
                .collect();
            match ok.choose(&mut rng) {
                Some(w) => g.push((*w).clone()),
                None => break,
            }
        }
        if g.len() < k {
            continue;
        }
        bind_instances += 1;
        for _ in 0..4 {
            let u = univ.choose(&mut rng).expect("nonempty");
            let related: Vec<&MonValue<usize>> =
                univ.iter().filter(|v| l.holds(&rp, u, v)).collect();
            let Some(v) = related.choose(&mut rng) else {
                continue;
            };
            let lhs = t.bind(u, &|a| f[a].clone());
            let rhs = t.bind(v, &|a| g[a].clone());
            let ok = match (&lhs, &rhs) {
                (Ok(a), Ok(b)) => l.holds(&sp, a, b),
                _ => false,
            };
            if !ok {
                let show_table = |h: &[MonValue<usize>]| -> String {
                    let parts: Vec<String> =
                        h.iter().enumerate().map(|(i, w)| format!("{i}->{w}")).collect();
                    parts.join("; ")
                };
                let render = |x: &Result<MonValue<usize>>| match x {
                    Ok(w) => w.to_string(),
                    Err(e) => format!("error: {e}"),
                };
                report.fail(
                    Witness::new("Lax-Bind")
                        .with("R", show_rel(k, r))
                        .with("S", show_rel(k, s))
                        .with("f", show_table(&f))
                        .with("g", show_table(&g))
                        .with("u", u)
                        .with("v", v)
                        .with("u_bind_f", render(&lhs))
                        .with("v_bind_g", render(&rhs)),
                );
            }
        }
    }
    report.stat("lax_bind_instances", bind_instances);
    if bind_instances < cfg.samples as u64 {
        report.note(format!(
            "only {bind_instances} premise-satisfying quadruples found in {attempts} attempts"
        ));
        report.undecided(Witness::new("Lax-Bind").with("instances", bind_instances));
    }
    report
}

/// ω-comp 1, ω-comp 2 on stationary chains, and Σ-comp for the operations
/// of `sig`.
pub fn check_inductive_sigma(
    spec: &RelatorSpec,
    monad: &MonadSpec,
    sig: &Signature,
    cfg: &AxiomConfig,
) -> Result<CheckReport> {
    spec.check_monad(monad.kind())?;
    let interps = sig
        .ops()
        .map(|(name, arity)| Ok((name.clone(), arity, monad.interpretation(name.as_str(), arity)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new(format!("inductive-sigma {spec} on {monad}"));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51);
    let carrier = Carrier::new(cfg, &mut rng);
    let k = carrier.k;
    let univ = universe_for(monad, cfg, &mut report);
    report.bound("signature", sig.to_string());

    match monad.bottom::<usize>() {
        Ok(bot) => {
            for &r in &carrier.relations {
                let pred = |i: usize, j: usize| has(k, r, i, j);
                if let Some(u) = univ.iter().find(|u| !holds_indexed(spec, &pred, &bot, u)) {
                    report.fail(
                        Witness::new("omega-comp-1")
                            .with("R", show_rel(k, r))
                            .with("u", u),
                    );
                }
            }
        }
        Err(_) => {
            report.note("the monad has no least element; omega-comp 1 does not apply");
        }
    }

    // Chains u₀ ⊑ u₁ ⊑ u₂ with a stationary tail: the lub is the last link.
    let mut chains = 0u64;
    for _ in 0..cfg.samples {
        let mut chain = vec![univ.choose(&mut rng).expect("nonempty").clone()];
        for _ in 0..2 {
            let last = chain.last().expect("nonempty").clone();
            let above: Vec<&MonValue<usize>> = univ
                .iter()
                .filter(|w| last.leq(w).unwrap_or(false))
                .collect();
            chain.push((*above.choose(&mut rng).expect("reflexive")).clone());
        }
        let lub = chain.last().expect("nonempty");
        let r = carrier.random(&mut rng);
        let pred = |i: usize, j: usize| has(k, r, i, j);
        let v = univ.choose(&mut rng).expect("nonempty");
        chains += 1;
        if chain.iter().all(|u| holds_indexed(spec, &pred, u, v))
            && !holds_indexed(spec, &pred, lub, v)
        {
            report.fail(
                Witness::new("omega-comp-2")
                    .with("R", show_rel(k, r))
                    .with("lub", lub)
                    .with("v", v),
            );
        }
    }
    report.stat("chains", chains);

    let mut sigma = 0u64;
    for (name, arity, interp) in &interps {
        for _ in 0..cfg.samples {
            let r = carrier.random(&mut rng);
            let pred = |i: usize, j: usize| has(k, r, i, j);
            let mut us = Vec::with_capacity(*arity);
            let mut vs = Vec::with_capacity(*arity);
            for _ in 0..*arity {
                let u = univ.choose(&mut rng).expect("nonempty");
                let related: Vec<&MonValue<usize>> =
                    univ.iter().filter(|v| holds_indexed(spec, &pred, u, v)).collect();
                match related.choose(&mut rng) {
                    Some(v) => {
                        us.push(u.clone());
                        vs.push((*v).clone());
                    }
                    None => break,
                }
            }
            if us.len() < *arity {
                continue;
            }
            sigma += 1;
            let (a, b) = match (monad.apply(interp, us.clone()), monad.apply(interp, vs.clone())) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if !holds_indexed(spec, &pred, &a, &b) {
                let join = |xs: &[MonValue<usize>]| -> String {
                    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                };
                report.fail(
                    Witness::new("Sigma-comp")
                        .with("op", name)
                        .with("R", show_rel(k, r))
                        .with("args_left", join(&us))
                        .with("args_right", join(&vs)),
                );
            }
        }
    }
    report.stat("sigma_instances", sigma);
    Ok(report)
}
