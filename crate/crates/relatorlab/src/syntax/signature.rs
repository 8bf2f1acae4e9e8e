use std::collections::BTreeMap;
use std::fmt;

use super::term::Name;
use crate::error::{Error, Result};

/// A finite set of operation symbols with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    ops: BTreeMap<Name, usize>,
}

impl Signature {
    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn new<I, S>(ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: AsRef<str>,
    {
        let mut sig = Signature::empty();
        for (name, arity) in ops {
            sig.insert(name.as_ref(), arity)?;
        }
        Ok(sig)
    }

    pub fn insert(&mut self, name: &str, arity: usize) -> Result<()> {
        if !is_identifier(name) || super::parse::is_keyword(name) {
            return Err(Error::Signature(format!("`{name}` is not a valid operation name")));
        }
        if self.ops.insert(Name::new(name), arity).is_some() {
            return Err(Error::Signature(format!("operation `{name}` declared twice")));
        }
        Ok(())
    }

    /// Parses lines of the form `name/arity`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sig = Signature::empty();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, arity) = line.split_once('/').ok_or_else(|| {
                Error::Signature(format!("line {}: expected `name/arity`", lineno + 1))
            })?;
            let arity: usize = arity.trim().parse().map_err(|_| {
                Error::Signature(format!("line {}: arity must be a natural number", lineno + 1))
            })?;
            sig.insert(name.trim(), arity)?;
        }
        Ok(sig)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.ops.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.ops.contains_key(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.ops.iter().map(|(n, a)| (n, *a))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Union of two signatures; shared names must agree on arity.
    pub fn union(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for (name, arity) in other.ops() {
            match out.arity(name.as_str()) {
                Some(a) if a == arity => {}
                Some(a) => {
                    return Err(Error::Signature(format!(
                        "operation `{name}` has arities {a} and {arity}"
                    )))
                }
                None => out.insert(name.as_str(), arity)?,
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in self.ops() {
            writeln!(f, "{name}/{arity}")?;
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signature_files() {
        let sig = Signature::parse("or/2\n# comment\nraise_e/0\n\n").unwrap();
        assert_eq!(sig.arity("or"), Some(2));
        assert_eq!(sig.arity("raise_e"), Some(0));
        assert_eq!(sig.to_string(), "or/2\nraise_e/0\n");
    }

    #[test]
    fn rejects_duplicates_and_bad_lines() {
        assert!(Signature::parse("or/2\nor/3").is_err());
        assert!(Signature::parse("or").is_err());
        assert!(Signature::parse("Or/2").is_err());
        assert!(Signature::parse("to/1").is_err());
    }
}
