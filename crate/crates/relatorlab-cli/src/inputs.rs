//! Loading monads, signatures and the line-based input files.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use relatorlab::monads::MonadSpec;
use relatorlab::syntax::{context_var, parse_phrase, Name, Phrase, Signature, Term, Value};

pub fn monad(kind: &str, params: &[String]) -> Result<MonadSpec> {
    let m = MonadSpec::from_name(kind)?;
    if params.is_empty() {
        return Ok(m);
    }
    Ok(m.with_parameters(params.iter().map(Name::new).collect())?)
}

/// The monad's default operations plus those declared in `file`.
pub fn signature(m: &MonadSpec, file: Option<&Path>) -> Result<Signature> {
    let base = m.signature();
    let Some(path) = file else { return Ok(base) };
    let extra = Signature::parse(&read(path)?).with_context(|| path.display().to_string())?;
    m.check_signature(&extra)?;
    Ok(base.union(&extra)?)
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Non-blank lines that are not `#` comments, with their line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn phrase(path: &Path, line: usize, text: &str, sig: &Signature) -> Result<Phrase> {
    parse_phrase(text.trim(), sig).map_err(|e| anyhow!("{}:{line}: {e}", path.display()))
}

pub fn term_file(path: &Path, sig: &Signature) -> Result<Term> {
    let text = read(path)?;
    match phrase(path, 1, &text, sig)? {
        Phrase::Term(t) => Ok(t),
        Phrase::Value(v) => bail!("{}: expected a term, found the value {v}", path.display()),
    }
}

pub fn value_file(path: &Path, sig: &Signature) -> Result<Vec<Value>> {
    let text = read(path)?;
    lines(&text)
        .map(|(n, l)| match phrase(path, n, l, sig)? {
            Phrase::Value(v) => Ok(v),
            Phrase::Term(t) => bail!("{}:{n}: expected a value, found the term {t}", path.display()),
        })
        .collect()
}

#[derive(Default)]
pub struct Pairs {
    pub terms: Vec<(Term, Term)>,
    pub values: Vec<(Value, Value)>,
}

/// Lines `LEFT<TAB>RIGHT`, both terms or both values.
pub fn relation_file(path: &Path, sig: &Signature) -> Result<Pairs> {
    let text = read(path)?;
    let mut out = Pairs::default();
    for (n, l) in lines(&text) {
        let (a, b) = l
            .split_once('\t')
            .ok_or_else(|| anyhow!("{}:{n}: expected LEFT<TAB>RIGHT", path.display()))?;
        match (phrase(path, n, a, sig)?, phrase(path, n, b, sig)?) {
            (Phrase::Term(a), Phrase::Term(b)) => out.terms.push((a, b)),
            (Phrase::Value(a), Phrase::Value(b)) => out.values.push((a, b)),
            _ => bail!("{}:{n}: a term cannot be paired with a value", path.display()),
        }
    }
    Ok(out)
}

/// Universe lines, each placed at the smallest level whose canonical
/// context `x0 … x(k-1)` contains its free variables.
pub struct Members {
    pub terms: Vec<(usize, Term)>,
    pub values: Vec<(usize, Value)>,
}

pub fn universe_file(path: &Path, sig: &Signature) -> Result<Members> {
    let text = read(path)?;
    let mut out = Members {
        terms: Vec::new(),
        values: Vec::new(),
    };
    for (n, l) in lines(&text) {
        let p = phrase(path, n, l, sig)?;
        let level = level_of(&p.free_vars())
            .ok_or_else(|| anyhow!("{}:{n}: free variables must be named x0, x1, …", path.display()))?;
        match p {
            Phrase::Term(t) => out.terms.push((level, t)),
            Phrase::Value(v) => out.values.push((level, v)),
        }
    }
    Ok(out)
}

fn level_of(fv: &std::collections::BTreeSet<Name>) -> Option<usize> {
    let mut level = 0;
    for x in fv {
        let i: usize = x.as_str().strip_prefix('x')?.parse().ok()?;
        if context_var(i) != *x {
            return None;
        }
        level = level.max(i + 1);
    }
    Some(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_follow_canonical_names() {
        let fv = |names: &[&str]| names.iter().map(Name::new).collect();
        assert_eq!(level_of(&fv(&[])), Some(0));
        assert_eq!(level_of(&fv(&["x1"])), Some(2));
        assert_eq!(level_of(&fv(&["y"])), None);
        assert_eq!(level_of(&fv(&["x01"])), None);
    }
}
