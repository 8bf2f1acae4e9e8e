//! One function per subcommand, each filling in the run's report.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde_json::json;

use relatorlab::evaluator::Evaluator;
use relatorlab::howe::{
    check_compatibility, check_fixed_point, check_key_lemma, check_value_substitutive,
    howe_closure, open_extension_of_pairs, open_extension_of_similarity, OpenUniverse,
};
use relatorlab::monads::MonadSpec;
use relatorlab::relators::{
    check_inductive_sigma, check_lax_axioms, check_relator_axioms, AxiomConfig, RelatorSpec,
};
use relatorlab::report::Verdict;
use relatorlab::similarity::{
    bisimilarity, bounded_similarity, check_preadequate, check_simulation, ClosedRelationPair,
    SimConfig, Universe,
};
use relatorlab::syntax::{
    context, enumerate_terms, enumerate_values, print_term, print_value, Signature, Term, Value,
};

use crate::envelope::{hash_lines, Cache, Envelope};
use crate::inputs;
use crate::MonadArgs;

const DEFAULT_CAP: usize = 20_000;

fn setup(a: &MonadArgs, env: &mut Envelope) -> Result<(MonadSpec, Signature)> {
    let m = inputs::monad(&a.monad, &a.params)?;
    let sig = inputs::signature(&m, a.signature.as_deref())?;
    env.config("monad", m.to_string())
        .config("signature", sig.to_string());
    Ok((m, sig))
}

fn closed_only(members: inputs::Members, path: &Path) -> Result<(Vec<Term>, Vec<Value>)> {
    if members.terms.iter().any(|(l, _)| *l > 0) || members.values.iter().any(|(l, _)| *l > 0) {
        bail!("{}: universe members must be closed", path.display());
    }
    Ok((
        members.terms.into_iter().map(|(_, t)| t).collect(),
        members.values.into_iter().map(|(_, v)| v).collect(),
    ))
}

fn value_strings(vs: &[Value]) -> Vec<String> {
    vs.iter().map(print_value).collect()
}

fn pair_strings(r: &ClosedRelationPair) -> serde_json::Value {
    json!({
        "terms": r.terms.iter().map(|(a, b)| [print_term(a), print_term(b)]).collect::<Vec<_>>(),
        "values": r.values.iter().map(|(a, b)| [print_value(a), print_value(b)]).collect::<Vec<_>>(),
    })
}

// ---- eval ----

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    monad: MonadArgs,
    /// Largest evaluation index to try.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Evaluation step budget.
    #[arg(long)]
    budget: Option<u64>,
    /// File holding one closed term.
    file: PathBuf,
}

pub fn eval(a: &EvalArgs, env: &mut Envelope) -> Result<()> {
    let (m, sig) = setup(&a.monad, env)?;
    let term = inputs::term_file(&a.file, &sig)?;
    env.config("term", print_term(&term));
    env.bound("n", a.n).bound("budget", a.budget);
    let cache = Cache::from_env();
    let key = format!("{m}|{}|{:?}|{}", a.n, a.budget, print_term(&term));
    let result = match cache.get(&key) {
        Some(hit) => hit,
        None => {
            let mut ev = Evaluator::new(m.clone())?;
            if let Some(b) = a.budget {
                ev = ev.with_budget(b);
            }
            let r = ev.evaluate(&term, a.n)?;
            let result = json!({
                "index": r.index,
                "value": r.value.to_json(),
                "value_text": r.value.to_string(),
                "observation": serde_json::to_value(r.observation(&m))?,
                "stable": r.stable,
                "exhausted": r.exhausted,
            });
            cache.put(&key, &result);
            result
        }
    };
    if result["exhausted"] == json!(true) {
        env.verdict = Verdict::Inconclusive;
    }
    env.result = result;
    Ok(())
}

// ---- axioms ----

#[derive(Args)]
pub struct AxiomsArgs {
    /// Relator expression, e.g. `gdist` or `comp(gdist, gexc)`.
    #[arg(long)]
    relator: String,
    #[command(flatten)]
    monad: MonadArgs,
    #[arg(long, default_value_t = 3)]
    carrier_size: usize,
    /// Samples per sampled axiom.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Relations are enumerated up to this count and sampled beyond it.
    #[arg(long, default_value_t = 512)]
    max_relations: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Also check the ω-continuity and Σ-compatibility conditions.
    #[arg(long)]
    inductive: bool,
}

pub fn axioms(a: &AxiomsArgs, env: &mut Envelope) -> Result<()> {
    let (m, sig) = setup(&a.monad, env)?;
    let spec = RelatorSpec::parse(&a.relator)?;
    env.config("relator", spec.to_string());
    let cfg = AxiomConfig {
        carrier_size: a.carrier_size,
        samples: a.samples,
        max_relations: a.max_relations,
        seed: a.seed,
    };
    env.bound("carrier_size", a.carrier_size)
        .bound("samples", a.samples)
        .bound("max_relations", a.max_relations)
        .bound("seed", a.seed);
    env.check(check_relator_axioms(&spec, &m, &cfg)?);
    env.check(check_lax_axioms(&spec, &m, &cfg)?);
    if a.inductive {
        env.check(check_inductive_sigma(&spec, &m, &sig, &cfg)?);
    }
    Ok(())
}

// ---- shared similarity options ----

#[derive(Args)]
pub struct SimArgs {
    #[arg(long)]
    relator: String,
    #[command(flatten)]
    monad: MonadArgs,
    /// Evaluation index at which approximants are compared.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Test arguments, one closed value per line.
    #[arg(long)]
    args: Option<PathBuf>,
    /// Add every closed value up to this depth to the test arguments
    /// (2 when no argument file is given).
    #[arg(long)]
    args_depth: Option<usize>,
    /// Evaluation step budget per approximant.
    #[arg(long)]
    budget: Option<u64>,
    /// Size cap for universes and candidate relations.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

struct SimSetup {
    cfg: SimConfig,
    sig: Signature,
}

fn sim_setup(a: &SimArgs, env: &mut Envelope) -> Result<SimSetup> {
    let (m, sig) = setup(&a.monad, env)?;
    let relator = RelatorSpec::parse(&a.relator)?;
    relator.check_monad(m.kind())?;
    env.config("relator", relator.to_string());
    let mut test_args = match &a.args {
        Some(p) => inputs::value_file(p, &sig)?,
        None => Vec::new(),
    };
    let depth = a.args_depth.or(if a.args.is_none() { Some(2) } else { None });
    if let Some(d) = depth {
        for v in enumerate_values(&sig, &context(0), d)? {
            if !test_args.contains(&v) {
                test_args.push(v);
            }
        }
    }
    let strings = value_strings(&test_args);
    env.bound("n", a.n)
        .bound("budget", a.budget)
        .bound("cap", a.cap)
        .bound("test_args_count", test_args.len())
        .bound("test_args_sha256", hash_lines(strings.clone()))
        .config("test_args", strings);
    let mut cfg = SimConfig::new(relator, m, a.n).with_test_args(test_args);
    cfg.step_budget = a.budget;
    Ok(SimSetup { cfg, sig })
}

fn closed_universe(
    s: &SimSetup,
    terms: Vec<Term>,
    values: Vec<Value>,
    cap: usize,
    env: &mut Envelope,
) -> Result<Universe> {
    let u = Universe::closed_under(terms, values, &s.cfg.test_args, &s.cfg.monad, s.cfg.precision, cap)?;
    env.bound("universe_terms", u.terms().len())
        .bound("universe_values", u.values().len())
        .bound("universe_truncated", u.is_truncated());
    Ok(u)
}

// ---- simcheck ----

#[derive(Args)]
pub struct SimcheckArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Pairs `LEFT<TAB>RIGHT` of closed terms or of closed values.
    #[arg(long)]
    relation: PathBuf,
    /// Closed terms and values; application pairs leaving it are
    /// inconclusive instead of failures.
    #[arg(long)]
    universe: Option<PathBuf>,
    /// Extend the relation to the coarsest candidate reachable from it
    /// before checking.
    #[arg(long)]
    saturate: bool,
}

pub fn simcheck(a: &SimcheckArgs, env: &mut Envelope) -> Result<()> {
    let mut s = sim_setup(&a.sim, env)?;
    let pairs = inputs::relation_file(&a.relation, &s.sig)?;
    if let Some(p) = &a.universe {
        let (terms, values) = closed_only(inputs::universe_file(p, &s.sig)?, p)?;
        let u = closed_universe(&s, terms, values, a.sim.cap, env)?;
        s.cfg = s.cfg.with_universe(u);
    }
    let mut r = if a.saturate {
        ClosedRelationPair::saturate(&pairs.terms, &s.cfg, a.sim.cap)?
    } else {
        ClosedRelationPair {
            terms: pairs.terms.into_iter().collect(),
            ..ClosedRelationPair::new()
        }
    };
    r.values.extend(pairs.values);
    env.config("saturate", a.saturate);
    env.check(check_simulation(&r, &s.cfg)?);
    env.result = json!({
        "term_pairs": r.terms.len(),
        "value_pairs": r.values.len(),
        "relation": pair_strings(&r),
    });
    Ok(())
}

// ---- similarity / bisimilarity ----

#[derive(Args)]
pub struct SimilarityArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Closed terms and values to start the universe from.
    #[arg(long)]
    universe: Option<PathBuf>,
    /// Also start from every closed term up to this depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Write the related term pairs as `LEFT<TAB>RIGHT` lines.
    #[arg(long)]
    relation_out: Option<PathBuf>,
}

pub fn similarity(a: &SimilarityArgs, bisim: bool, env: &mut Envelope) -> Result<()> {
    let s = sim_setup(&a.sim, env)?;
    let (mut terms, values) = match &a.universe {
        Some(p) => closed_only(inputs::universe_file(p, &s.sig)?, p)?,
        None => (Vec::new(), Vec::new()),
    };
    if let Some(d) = a.depth {
        terms.extend(enumerate_terms(&s.sig, &context(0), d)?);
        env.bound("depth", d);
    }
    if terms.is_empty() && values.is_empty() {
        bail!("the universe is empty: give --universe or --depth");
    }
    let u = closed_universe(&s, terms, values, a.sim.cap, env)?;
    let sim = if bisim {
        bisimilarity(&s.cfg, &u)?
    } else {
        bounded_similarity(&s.cfg, &u)?
    };
    if let Some(path) = &a.relation_out {
        let text: String = sim
            .term_pairs()
            .map(|(m, n)| format!("{}\t{}\n", print_term(m), print_term(n)))
            .collect();
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    env.result = json!({
        "term_pairs": sim.terms.len(),
        "value_pairs": sim.values.len(),
        "inconclusive_term_pairs": sim.inconclusive_terms.len(),
        "inconclusive_value_pairs": sim.inconclusive_values.len(),
        "iterations": sim.iterations,
        "symmetric": sim.terms.is_symmetric() && sim.values.is_symmetric(),
    });
    env.check(sim.report);
    Ok(())
}

// ---- howe ----

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HoweCheck {
    Compat,
    Subst,
    Fixed,
    Key,
    All,
}

#[derive(Args)]
pub struct HoweArgs {
    /// Terms and values; free variables `x0 … x(k-1)` put a line at level k.
    #[arg(long)]
    universe: PathBuf,
    /// Closed values substituted for free variables.
    #[arg(long)]
    closing: PathBuf,
    /// Base relation on closed terms or values, opened by closing
    /// substitutions. Without it the base is bounded similarity.
    #[arg(long)]
    relation: Option<PathBuf>,
    #[arg(long)]
    relator: Option<String>,
    #[arg(long)]
    monad: Option<String>,
    #[arg(long, value_delimiter = ',', visible_aliases = ["exceptions", "states", "alphabet"])]
    params: Vec<String>,
    #[arg(long)]
    signature: Option<PathBuf>,
    /// Evaluation index for saturation and the similarity base.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Highest context size; defaults to the largest level in the universe
    /// file, and at least 1.
    #[arg(long)]
    max_level: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    check: Vec<HoweCheck>,
    /// Closed pairs sampled for the key lemma.
    #[arg(long, default_value_t = 50)]
    key_pairs: usize,
    /// Largest index tried on the right of a key lemma instance
    /// (defaults to twice `--n`).
    #[arg(long)]
    m_bound: Option<u32>,
}

pub fn howe(a: &HoweArgs, env: &mut Envelope) -> Result<()> {
    let monad = match &a.monad {
        Some(k) => Some(inputs::monad(k, &a.params)?),
        None => None,
    };
    let relator = match &a.relator {
        Some(r) => Some(RelatorSpec::parse(r)?),
        None => None,
    };
    let sig = match &monad {
        Some(m) => {
            env.config("monad", m.to_string());
            inputs::signature(m, a.signature.as_deref())?
        }
        None => match &a.signature {
            Some(p) => Signature::parse(&inputs::read(p)?)?,
            None => Signature::empty(),
        },
    };
    let semantics = match (&relator, &monad) {
        (Some(r), Some(m)) => {
            r.check_monad(m.kind())?;
            env.config("relator", r.to_string());
            Some((r, m))
        }
        (None, None) => None,
        _ => bail!("--relator and --monad must be given together"),
    };
    let wanted = |c: HoweCheck| a.check.contains(&c) || a.check.contains(&HoweCheck::All);
    if a.check.contains(&HoweCheck::Key) && semantics.is_none() {
        bail!("the key lemma check needs --relator and --monad");
    }
    if a.relation.is_none() && semantics.is_none() {
        bail!("give --relation, or --relator and --monad for a similarity base");
    }
    env.config("signature", sig.to_string());

    let closing = inputs::value_file(&a.closing, &sig)?;
    let members = inputs::universe_file(&a.universe, &sig)?;
    let deepest = members
        .terms
        .iter()
        .map(|(l, _)| *l)
        .chain(members.values.iter().map(|(l, _)| *l))
        .max()
        .unwrap_or(0);
    let max_level = a.max_level.unwrap_or(deepest.max(1));
    let mut u = OpenUniverse::new(max_level, closing.clone(), a.cap)?;
    for (l, t) in members.terms {
        u.add_term(l, t)?;
    }
    for (l, v) in members.values {
        u.add_value(l, v)?;
    }
    u.saturate(monad.as_ref().map(|m| (m, a.n)))?;
    env.bound("n", a.n)
        .bound("cap", a.cap)
        .bound("max_level", max_level)
        .bound("closing_set_sha256", hash_lines(value_strings(&closing)))
        .bound("universe_size", u.size())
        .bound("universe_truncated", u.is_truncated())
        .config("closing_set", value_strings(&closing));

    let base = match &a.relation {
        Some(p) => {
            let pairs = inputs::relation_file(p, &sig)?;
            let r = ClosedRelationPair {
                terms: pairs.terms.into_iter().collect(),
                values: pairs.values.into_iter().collect(),
            };
            open_extension_of_pairs(&u, &r)
        }
        None => {
            let (r, m) = semantics.expect("checked above");
            let closed = Universe::closed_under(
                u.terms(0).to_vec(),
                u.values(0).to_vec(),
                &closing,
                m,
                a.n,
                a.cap,
            )?;
            let cfg = SimConfig::new(r.clone(), m.clone(), a.n).with_test_args(closing.clone());
            let sim = bounded_similarity(&cfg, &closed)?;
            let base = open_extension_of_similarity(&u, &sim);
            env.check(sim.report);
            base
        }
    };
    let h = howe_closure(&u, &base, 10_000)?;
    if wanted(HoweCheck::Compat) {
        env.check(check_compatibility(&u, &h.closure));
    }
    if wanted(HoweCheck::Subst) {
        env.check(check_value_substitutive(&u, &h.closure));
    }
    if wanted(HoweCheck::Fixed) {
        env.check(check_fixed_point(&u, &h));
    }
    if let (true, Some((r, m))) = (wanted(HoweCheck::Key), semantics) {
        let terms = u.terms(0);
        // A diverging left side makes the instance trivial; skip those.
        let mut ev = Evaluator::new(m.clone())?;
        let mut converges = Vec::with_capacity(terms.len());
        for t in terms {
            converges.push(!ev.approximate(t, a.n)?.support().is_empty());
        }
        let pairs: Vec<(usize, usize)> = h.closure.terms[0]
            .pairs()
            .filter(|&(i, j)| i != j && converges[i])
            .collect();
        let stride = pairs.len().div_ceil(a.key_pairs.max(1)).max(1);
        let m_bound = a.m_bound.unwrap_or(2 * a.n);
        env.bound("key_pairs", a.key_pairs).bound("m_bound", m_bound);
        for (i, j) in pairs.into_iter().step_by(stride) {
            env.check(check_key_lemma(&u, &h.closure, r, m, &terms[i], &terms[j], a.n, m_bound)?);
        }
    }
    let per_level: Vec<_> = (0..=max_level)
        .map(|k| {
            json!({
                "level": k,
                "terms": u.terms(k).len(),
                "values": u.values(k).len(),
                "base_term_pairs": base.terms[k].len(),
                "closure_term_pairs": h.closure.terms[k].len(),
                "closure_value_pairs": h.closure.values[k].len(),
            })
        })
        .collect();
    env.result = json!({
        "levels": per_level,
        "base_pairs": base.len(),
        "closure_pairs": h.closure.len(),
        "iterations": h.iterations,
        "base_contained": base.is_subset(&h.closure),
    });
    Ok(())
}

// ---- preadequate ----

#[derive(Args)]
pub struct PreadequateArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Pairs `LEFT<TAB>RIGHT` of closed terms.
    #[arg(long)]
    relation: PathBuf,
}

pub fn preadequate(a: &PreadequateArgs, env: &mut Envelope) -> Result<()> {
    let s = sim_setup(&a.sim, env)?;
    let pairs = inputs::relation_file(&a.relation, &s.sig)?;
    if !pairs.values.is_empty() {
        bail!("{}: preadequacy relates terms only", a.relation.display());
    }
    env.check(check_preadequate(&pairs.terms, &s.cfg)?);
    env.result = json!({ "term_pairs": pairs.terms.len() });
    Ok(())
}
