mod common;

use relatorlab::relators::RelatorSpec;
use relatorlab::report::Verdict;
use relatorlab::similarity::{bisimilarity, bounded_similarity, check_preadequate, SimConfig, Universe};
use relatorlab::syntax::programs::{identity, omega};
use relatorlab::syntax::{Term, Value};

use common::trees::{check_case, ii, Obs};
use common::{howe_setup, monad};

#[test]
fn partiality_sanity() {
    check_case("gbot", "partial", 1, Obs::Converges, "similarity_gbot.tsv");
}

#[test]
fn powerset_sanity() {
    check_case("gpow", "nondet", 3, Obs::MayConverge, "similarity_gpow.tsv");
}

#[test]
fn distribution_sanity() {
    check_case("gdist", "dist", 3, Obs::Mass, "similarity_gdist.tsv");
}

#[test]
fn two_term_universe() {
    let ret = Term::ret(identity());
    let u = Universe::closed_under([ret.clone(), omega()], [], &[identity()], &monad("partial"), 6, 100).unwrap();
    let cfg = SimConfig::new(RelatorSpec::parse("gbot").unwrap(), monad("partial"), 6).with_test_args(vec![identity()]);
    let s = bounded_similarity(&cfg, &u).unwrap();
    assert!(s.relates_terms(&omega(), &ret));
    assert!(s.relates_terms(&omega(), &omega()));
    assert!(!s.relates_terms(&ret, &omega()));
    let mut d = cfg.clone();
    d.relator = RelatorSpec::parse("dbot").unwrap();
    let s = bounded_similarity(&d, &u).unwrap();
    assert!(s.terms.is_symmetric());
    assert!(!s.relates_terms(&omega(), &ret));
    assert!(s.relates_terms(&ret, &ret));
}

#[test]
fn similarity_is_strictly_coarser_than_bisimilarity() {
    // `or(return Vb, return V0)` and `return U` with `U = λx.or(return I, Ω)`
    // may-simulate each other, but no bisimulation relates `U` to `Vb`.
    let vb = Value::lam("x", Term::ret(identity()));
    let v0 = Value::lam("x", omega());
    let uv = Value::lam("x", Term::op("or", vec![Term::ret(identity()), omega()]));
    let m = Term::op("or", vec![Term::ret(vb), Term::ret(v0)]);
    let n = Term::ret(uv);
    let nondet = monad("nondet");
    let u = Universe::closed_under([m.clone(), n.clone()], [], &[identity()], &nondet, 8, 200).unwrap();
    assert!(!u.is_truncated());
    let cfg = SimConfig::new(RelatorSpec::parse("gpow").unwrap(), nondet, 8).with_test_args(vec![identity()]);
    let s = bounded_similarity(&cfg, &u).unwrap();
    assert!(s.relates_terms(&m, &n) && s.relates_terms(&n, &m));
    let b = bisimilarity(&cfg, &u).unwrap();
    assert!(!b.relates_terms(&m, &n));
}

#[test]
fn fewer_test_arguments_keep_more_pairs() {
    let setup = howe_setup();
    let base = &setup.config;
    let full = bounded_similarity(base, &setup.closed).unwrap();
    for k in 0..base.test_args.len() {
        let cfg = base.clone().with_test_args(base.test_args[..k].to_vec());
        let coarse = bounded_similarity(&cfg, &setup.closed).unwrap();
        assert!(full.terms.is_subset(&coarse.terms), "{k} test arguments");
        assert!(full.values.is_subset(&coarse.values), "{k} test arguments");
    }
}

#[test]
fn lower_precision_can_remove_pairs() {
    // Both sides are approximated at the same index, so a lower index can
    // cut the right-hand side: `I I` needs one more step than `return I`.
    let ret = Term::ret(identity());
    let u = Universe::closed_under([ret.clone(), ii()], [], &[identity()], &monad("partial"), 8, 100).unwrap();
    let at = |n| {
        let cfg = SimConfig::new(RelatorSpec::parse("gbot").unwrap(), monad("partial"), n)
            .with_test_args(vec![identity()]);
        bounded_similarity(&cfg, &u).unwrap().relates_terms(&ret, &ii())
    };
    assert!(at(8));
    assert!(!at(1));
}

#[test]
fn preadequacy_examples() {
    let ret = Term::ret(identity());
    let half = Term::op("or", vec![ret.clone(), omega()]);
    let flip = Term::op("or", vec![omega(), ret.clone()]);
    let dist = SimConfig::new(RelatorSpec::parse("gdist").unwrap(), monad("dist"), 6);
    assert!(check_preadequate(&[(half.clone(), flip.clone()), (flip, half.clone())], &dist).unwrap().passed());
    assert!(!check_preadequate(&[(ret.clone(), half)], &dist).unwrap().passed());
    let bot = SimConfig::new(RelatorSpec::parse("gbot").unwrap(), monad("partial"), 6);
    assert!(check_preadequate(&[(omega(), ret.clone())], &bot).unwrap().passed());
    let r = check_preadequate(&[(ret, omega())], &bot).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
}
