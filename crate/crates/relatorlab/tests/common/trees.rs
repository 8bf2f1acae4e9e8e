//! Or-trees over `Ω` and `return I`, with a structural oracle for the
//! similarity relations on them and golden files of the eliminated pairs.

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_traits::{One, Zero};

use relatorlab::rational::{q, Q};
use relatorlab::relators::RelatorSpec;
use relatorlab::report::Verdict;
use relatorlab::similarity::{bisimilarity, bounded_similarity, check_simulation, SimConfig, Similarity, Universe};
use relatorlab::syntax::programs::{identity, omega};
use relatorlab::syntax::{print_term, Term};

use super::monad;

/// Or-trees over the leaves `Ω` and `return I`.
#[derive(Clone, Debug)]
pub enum Tree {
    Bot,
    Ret,
    Or(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn term(&self) -> Term {
        match self {
            Tree::Bot => omega(),
            Tree::Ret => Term::ret(identity()),
            Tree::Or(a, b) => Term::op("or", vec![a.term(), b.term()]),
        }
    }

    fn mass(&self) -> Q {
        match self {
            Tree::Bot => Q::zero(),
            Tree::Ret => Q::one(),
            Tree::Or(a, b) => (a.mass() + b.mass()) * q(1, 2),
        }
    }

    fn may_converge(&self) -> bool {
        match self {
            Tree::Bot => false,
            Tree::Ret => true,
            Tree::Or(a, b) => a.may_converge() || b.may_converge(),
        }
    }
}

pub fn trees(max_leaves: usize) -> Vec<Tree> {
    let mut by_leaves: Vec<Vec<Tree>> = vec![vec![], vec![Tree::Bot, Tree::Ret]];
    for n in 2..=max_leaves {
        let mut level = Vec::new();
        for k in 1..n {
            for a in &by_leaves[k] {
                for b in &by_leaves[n - k] {
                    level.push(Tree::Or(Box::new(a.clone()), Box::new(b.clone())));
                }
            }
        }
        by_leaves.push(level);
    }
    by_leaves.concat()
}

#[derive(Clone, Copy)]
pub enum Obs {
    Converges,
    MayConverge,
    Mass,
}

/// Term `I I` stands for the only application in the universe; it
/// converges to `I` with mass one.
pub fn ii() -> Term {
    Term::app(identity(), identity())
}

/// Hand iteration of the simulation operator from the full relation. The
/// only value is `I`, related to itself iff `(I I, I I)` is.
pub fn oracle(items: &[(Term, Tree)], obs: Obs) -> BTreeSet<(String, String)> {
    let n = items.len();
    let mut rel = vec![vec![true; n]; n];
    let ii_index = items.iter().position(|(t, _)| *t == ii()).unwrap();
    for _step in 0..3 {
        let values_related = rel[ii_index][ii_index];
        let next: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (a, b) = (&items[i].1, &items[j].1);
                        match obs {
                            Obs::Converges | Obs::MayConverge => {
                                !a.may_converge() || (b.may_converge() && values_related)
                            }
                            Obs::Mass => {
                                if values_related {
                                    a.mass() <= b.mass()
                                } else {
                                    a.mass().is_zero()
                                }
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        rel = next;
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if !rel[i][j] {
                out.insert((print_term(&items[i].0), print_term(&items[j].0)));
            }
        }
    }
    out
}

pub fn eliminated(s: &Similarity) -> BTreeSet<(String, String)> {
    let ts = s.universe.terms();
    let mut out = BTreeSet::new();
    for (i, a) in ts.iter().enumerate() {
        for (j, b) in ts.iter().enumerate() {
            if !s.terms.contains(i, j) {
                out.insert((print_term(a), print_term(b)));
            }
        }
    }
    out
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn read_golden(name: &str, expected: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let body: String = expected.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect();
        std::fs::write(&path, body).unwrap();
    }
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(|l| {
            let (a, b) = l.split_once('\t').expect("TERM<TAB>TERM");
            (a.to_string(), b.to_string())
        })
        .collect()
}

pub fn universe(trees: &[Tree], monad_name: &str) -> (Universe, Vec<(Term, Tree)>) {
    let mut items: Vec<(Term, Tree)> = trees.iter().map(|t| (t.term(), t.clone())).collect();
    items.push((ii(), Tree::Ret));
    let u = Universe::closed_under(
        items.iter().map(|(t, _)| t.clone()),
        [],
        &[identity()],
        &monad(monad_name),
        8,
        100,
    )
    .unwrap();
    assert!(!u.is_truncated());
    assert_eq!(u.terms().len(), items.len(), "closure adds nothing beyond I I");
    assert!(u.terms().len() <= 40);
    (u, items)
}

pub fn check_case(relator: &str, monad_name: &str, max_leaves: usize, obs: Obs, golden: &str) {
    let (u, items) = universe(&trees(max_leaves), monad_name);
    let cfg = SimConfig::new(RelatorSpec::parse(relator).unwrap(), monad(monad_name), 8)
        .with_test_args(vec![identity()]);
    let s = bounded_similarity(&cfg, &u).unwrap();
    assert!(s.terms.is_reflexive() && s.values.is_reflexive());
    assert!(s.terms.is_transitive() && s.values.is_transitive());
    let expected = oracle(&items, obs);
    assert_eq!(read_golden(golden, &expected), expected, "golden file is stale");
    assert_eq!(eliminated(&s), expected);
    // The result is a post-fixed point at the same bounds.
    let again = check_simulation(&s.to_pairs(), &cfg.clone().with_universe(u.clone())).unwrap();
    assert_eq!(again.verdict, Verdict::Pass, "{again}");
    let b = bisimilarity(&cfg, &u).unwrap();
    assert!(b.terms.is_symmetric() && b.values.is_symmetric());
    let (tt, tv) = s.two_way();
    assert!(b.terms.is_subset(&tt) && b.values.is_subset(&tv));
}

