use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::monads::MonadKind;

/// The effect layer a base relator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Effect {
    Partiality,
    Nondet,
    Dist,
    Exc,
    State,
    Output,
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Effect::Partiality => "partiality",
            Effect::Nondet => "nondeterminism",
            Effect::Dist => "probability",
            Effect::Exc => "exceptions",
            Effect::State => "state",
            Effect::Output => "output",
        })
    }
}

/// `Sim` is the simulation lifting Γ, `Bisim` its conversive variant Δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Sim,
    Bisim,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelatorSpec {
    Base(Effect, Mode),
    /// `Γᶜ(R) = (Γ Rᶜ)ᶜ`.
    Converse(Box<RelatorSpec>),
    Intersect(Box<RelatorSpec>, Box<RelatorSpec>),
    /// `outer ∘ inner`: `outer` lifts the outermost functor layer, applied
    /// to the relation `inner` lifts on the layer below.
    Compose(Box<RelatorSpec>, Box<RelatorSpec>),
}

const BASES: [(&str, Effect, Mode); 11] = [
    ("gbot", Effect::Partiality, Mode::Sim),
    ("dbot", Effect::Partiality, Mode::Bisim),
    ("gpow", Effect::Nondet, Mode::Sim),
    ("dpow", Effect::Nondet, Mode::Bisim),
    ("gdist", Effect::Dist, Mode::Sim),
    ("ddist", Effect::Dist, Mode::Bisim),
    ("gexc", Effect::Exc, Mode::Sim),
    ("dexc", Effect::Exc, Mode::Bisim),
    ("dstate", Effect::State, Mode::Bisim),
    ("gout", Effect::Output, Mode::Sim),
    ("dout", Effect::Output, Mode::Bisim),
];

/// Effect layers of a monad, outermost first.
pub fn monad_layers(kind: MonadKind) -> Vec<Effect> {
    match kind {
        MonadKind::Partiality => vec![Effect::Partiality],
        MonadKind::Exceptions => vec![Effect::Exc],
        MonadKind::PartialityExceptions => vec![Effect::Partiality, Effect::Exc],
        MonadKind::FiniteNondet => vec![Effect::Nondet],
        MonadKind::Subdistribution => vec![Effect::Dist],
        MonadKind::GlobalState => vec![Effect::State],
        MonadKind::Output => vec![Effect::Output],
        MonadKind::ProbExceptions => vec![Effect::Dist, Effect::Exc],
    }
}

impl RelatorSpec {
    pub fn base(effect: Effect, mode: Mode) -> Result<RelatorSpec> {
        if (effect, mode) == (Effect::State, Mode::Sim) {
            return Err(Error::Relator(
                "the state relator only has the bisimulation variant dstate".into(),
            ));
        }
        Ok(RelatorSpec::Base(effect, mode))
    }

    pub fn converse(self) -> RelatorSpec {
        RelatorSpec::Converse(Box::new(self))
    }

    pub fn intersect(self, other: RelatorSpec) -> Result<RelatorSpec> {
        let r = RelatorSpec::Intersect(Box::new(self), Box::new(other));
        r.layers()?;
        Ok(r)
    }

    pub fn compose(outer: RelatorSpec, inner: RelatorSpec) -> Result<RelatorSpec> {
        let r = RelatorSpec::Compose(Box::new(outer), Box::new(inner));
        r.layers()?;
        Ok(r)
    }

    /// `Γ ∩ Γᶜ`, the relator of Γ-bisimulations.
    pub fn symmetrize(self) -> RelatorSpec {
        let c = self.clone().converse();
        RelatorSpec::Intersect(Box::new(self), Box::new(c))
    }

    /// The functor layers this relator lifts along, outermost first.
    pub fn layers(&self) -> Result<Vec<Effect>> {
        match self {
            RelatorSpec::Base(Effect::State, Mode::Sim) => Err(Error::Relator(
                "the state relator only has the bisimulation variant dstate".into(),
            )),
            RelatorSpec::Base(e, _) => Ok(vec![*e]),
            RelatorSpec::Converse(s) => s.layers(),
            RelatorSpec::Intersect(a, b) => {
                let (la, lb) = (a.layers()?, b.layers()?);
                if la != lb {
                    return Err(Error::Relator(format!(
                        "cannot intersect {a} and {b}: they lift different functors"
                    )));
                }
                Ok(la)
            }
            RelatorSpec::Compose(o, i) => {
                let mut l = o.layers()?;
                if l.len() != 1 {
                    return Err(Error::Relator(format!(
                        "the outer relator {o} of a composition must lift a single layer"
                    )));
                }
                l.extend(i.layers()?);
                Ok(l)
            }
        }
    }

    /// Checks that the relator lifts exactly the layers of `kind`.
    pub fn check_monad(&self, kind: MonadKind) -> Result<()> {
        let have = self.layers()?;
        if have != monad_layers(kind) {
            return Err(Error::Relator(format!(
                "{self} does not apply to the {kind} monad"
            )));
        }
        Ok(())
    }

    /// Whether the relator commutes with converse by construction.
    pub fn is_conversive(&self) -> bool {
        match self {
            RelatorSpec::Base(_, m) => *m == Mode::Bisim,
            RelatorSpec::Converse(s) => s.is_conversive(),
            RelatorSpec::Intersect(a, b) => {
                (a.is_conversive() && b.is_conversive())
                    || matches!(&**b, RelatorSpec::Converse(c) if c == a)
                    || matches!(&**a, RelatorSpec::Converse(c) if c == b)
            }
            RelatorSpec::Compose(o, i) => o.is_conversive() && i.is_conversive(),
        }
    }

    /// Parses the prefix grammar `name | conv(e) | and(e, e) | comp(e, e)`.
    pub fn parse(text: &str) -> Result<RelatorSpec> {
        let mut p = Parser { src: text, pos: 0 };
        let r = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        r.layers()?;
        Ok(r)
    }
}

/// The relators shipped with the crate, each with the monad it lifts.
pub fn shipped() -> Vec<(RelatorSpec, MonadKind)> {
    [
        ("gbot", MonadKind::Partiality),
        ("dbot", MonadKind::Partiality),
        ("and(gbot, conv(gbot))", MonadKind::Partiality),
        ("gpow", MonadKind::FiniteNondet),
        ("dpow", MonadKind::FiniteNondet),
        ("and(gpow, conv(gpow))", MonadKind::FiniteNondet),
        ("gdist", MonadKind::Subdistribution),
        ("ddist", MonadKind::Subdistribution),
        ("and(gdist, conv(gdist))", MonadKind::Subdistribution),
        ("gexc", MonadKind::Exceptions),
        ("dexc", MonadKind::Exceptions),
        ("comp(gbot, gexc)", MonadKind::PartialityExceptions),
        ("comp(dbot, dexc)", MonadKind::PartialityExceptions),
        ("dstate", MonadKind::GlobalState),
        ("gout", MonadKind::Output),
        ("dout", MonadKind::Output),
        ("comp(gdist, gexc)", MonadKind::ProbExceptions),
        ("comp(ddist, dexc)", MonadKind::ProbExceptions),
        (
            "and(comp(gdist, gexc), conv(comp(gdist, gexc)))",
            MonadKind::ProbExceptions,
        ),
    ]
    .into_iter()
    .map(|(e, k)| (RelatorSpec::parse(e).expect("shipped relators parse"), k))
    .collect()
}

impl fmt::Display for RelatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelatorSpec::Base(e, m) => {
                match BASES.iter().find(|(_, be, bm)| be == e && bm == m) {
                    Some((name, ..)) => f.write_str(name),
                    None => write!(f, "<{e} simulation>"),
                }
            }
            RelatorSpec::Converse(s) => write!(f, "conv({s})"),
            RelatorSpec::Intersect(a, b) => write!(f, "and({a}, {b})"),
            RelatorSpec::Compose(a, b) => write!(f, "comp({a}, {b})"),
        }
    }
}

impl Serialize for RelatorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Relator(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return Err(self.error("expected a relator name"));
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn expr(&mut self) -> Result<RelatorSpec> {
        let name = self.ident()?.to_string();
        match name.as_str() {
            "conv" => {
                self.eat('(')?;
                let s = self.expr()?;
                self.eat(')')?;
                Ok(s.converse())
            }
            "and" | "comp" => {
                self.eat('(')?;
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                self.eat(')')?;
                Ok(if name == "and" {
                    RelatorSpec::Intersect(Box::new(a), Box::new(b))
                } else {
                    RelatorSpec::Compose(Box::new(a), Box::new(b))
                })
            }
            _ => BASES
                .iter()
                .find(|(n, ..)| *n == name)
                .map(|(_, e, m)| RelatorSpec::Base(*e, *m))
                .ok_or_else(|| Error::Relator(format!("unknown relator `{name}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for (r, _) in shipped() {
            assert_eq!(RelatorSpec::parse(&r.to_string()).unwrap(), r);
        }
        let r = RelatorSpec::parse(" comp( gdist ,gexc ) ").unwrap();
        assert_eq!(r.to_string(), "comp(gdist, gexc)");
    }

    #[test]
    fn layer_checks() {
        assert!(RelatorSpec::parse("comp(gexc, gdist)").is_ok());
        assert!(RelatorSpec::parse("and(gdist, gexc)").is_err());
        assert!(RelatorSpec::parse("comp(comp(gbot, gexc), gexc)").is_err());
        assert!(RelatorSpec::parse("gfoo").is_err());
        assert!(RelatorSpec::parse("gbot gbot").is_err());
        assert!(RelatorSpec::base(Effect::State, Mode::Sim).is_err());
        let pe = RelatorSpec::parse("comp(gbot, gexc)").unwrap();
        assert!(pe.check_monad(MonadKind::PartialityExceptions).is_ok());
        assert!(pe.check_monad(MonadKind::Partiality).is_err());
        for (r, k) in shipped() {
            r.check_monad(k).unwrap();
        }
    }

    #[test]
    fn conversive_flags() {
        let p = |s: &str| RelatorSpec::parse(s).unwrap();
        assert!(!p("gpow").is_conversive());
        assert!(p("dpow").is_conversive());
        assert!(p("and(gpow, conv(gpow))").is_conversive());
        assert!(p("gdist").symmetrize().is_conversive());
        assert!(p("comp(ddist, dexc)").is_conversive());
        assert!(!p("comp(gdist, gexc)").is_conversive());
    }
}
