//! Fixtures shared by the integration test targets.
#![allow(dead_code)]

pub mod trees;

use relatorlab::howe::{howe_closure, open_extension_of_similarity, HoweClosure, OpenUniverse};
use relatorlab::monads::MonadSpec;
use relatorlab::relators::RelatorSpec;
use relatorlab::similarity::{bounded_similarity, SimConfig, Similarity, Universe};
use relatorlab::syntax::{context, enumerate_terms, enumerate_values, Signature};

pub fn monad(name: &str) -> MonadSpec {
    MonadSpec::from_name(name).unwrap()
}

pub const HOWE_PRECISION: u32 = 8;

pub struct HoweSetup {
    pub open: OpenUniverse,
    pub closed: Universe,
    pub config: SimConfig,
    pub similarity: Similarity,
    pub closure: HoweClosure,
}

/// Pure terms of depth ≤ 3 at level 0 and ≤ 2 at level 1, closed by all
/// closed values of depth ≤ 3, with bounded partiality similarity as base.
pub fn howe_setup() -> HoweSetup {
    let sig = Signature::empty();
    let closing = enumerate_values(&sig, &context(0), 3).unwrap();
    let mut open = OpenUniverse::new(2, closing.clone(), 5_000).unwrap();
    for t in enumerate_terms(&sig, &context(0), 3).unwrap() {
        open.add_term(0, t).unwrap();
    }
    for t in enumerate_terms(&sig, &context(1), 2).unwrap() {
        open.add_term(1, t).unwrap();
    }
    let partial = monad("partial");
    open.saturate(Some((&partial, HOWE_PRECISION))).unwrap();
    assert!(!open.is_truncated());
    let closed = Universe::closed_under(
        open.terms(0).to_vec(),
        open.values(0).to_vec(),
        &closing,
        &partial,
        HOWE_PRECISION,
        5_000,
    )
    .unwrap();
    assert!(!closed.is_truncated());
    let config = SimConfig::new(RelatorSpec::parse("gbot").unwrap(), partial, HOWE_PRECISION)
        .with_test_args(closing);
    let similarity = bounded_similarity(&config, &closed).unwrap();
    let base = open_extension_of_similarity(&open, &similarity);
    let closure = howe_closure(&open, &base, 1_000).unwrap();
    HoweSetup {
        open,
        closed,
        config,
        similarity,
        closure,
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relatorlab::syntax::{Term, TermSampler};

/// `(monad, closed term, index)` triples, cycling through the evaluable
/// monads.
pub fn sample_triples(count: usize, seed: u64) -> Vec<(MonadSpec, Term, u32)> {
    let monads = MonadSpec::evaluable();
    let sigs: Vec<Signature> = monads.iter().map(MonadSpec::signature).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let k = i % monads.len();
            let sampler = TermSampler::new(&sigs[k]);
            let depth = rng.gen_range(1..=5);
            let t = sampler.term(&mut rng, &[], depth);
            (monads[k].clone(), t, rng.gen_range(0..=6))
        })
        .collect()
}

use num_traits::Zero;
use relatorlab::monads::MonadKind;
use relatorlab::rational::Q;

/// The shipped monad instance of each kind.
pub fn monad_for(kind: MonadKind) -> MonadSpec {
    MonadSpec::evaluable()
        .into_iter()
        .chain([monad("exc")])
        .find(|m| m.kind() == kind)
        .unwrap()
}

/// `∀U ⊆ supp μ. μ(U) ≤ ν(R(U))` by enumerating every subset.
pub fn subset_oracle(mu: &[Q], nu: &[Q], rel: &[Vec<bool>]) -> bool {
    let n = mu.len();
    (0u32..1 << n).all(|set| {
        let mut lhs = Q::zero();
        let mut image = vec![false; nu.len()];
        for i in (0..n).filter(|i| set & (1 << i) != 0) {
            lhs += &mu[i];
            for (j, hit) in image.iter_mut().enumerate() {
                *hit |= rel[i][j];
            }
        }
        let rhs: Q = nu
            .iter()
            .zip(&image)
            .filter(|(_, hit)| **hit)
            .fold(Q::zero(), |a, (w, _)| a + w);
        lhs <= rhs
    })
}

