//! Canonical printing. Binders are named by nesting level (`x0`, `x1`, ...),
//! switching to another letter when the level names clash with free
//! variables, so the output re-parses to an α-equivalent phrase.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use super::term::{Name, Phrase, Term, Value};

struct Printer {
    base: String,
    depth: usize,
}

fn pick_base(free: &BTreeSet<Name>) -> String {
    let clashes = |base: &str| {
        free.iter().any(|n| {
            n.as_str()
                .strip_prefix(base)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        })
    };
    for base in ["x", "y", "z", "u", "w", "a", "b", "c"] {
        if !clashes(base) {
            return base.to_string();
        }
    }
    let mut base = String::from("x_");
    while clashes(&base) {
        base.push('_');
    }
    base
}

impl Printer {
    fn bound_name(&self, index: u32) -> String {
        // Index 0 refers to the innermost binder, at level depth - 1.
        let level = self.depth as i64 - 1 - index as i64;
        if level < 0 {
            return format!("#{index}");
        }
        format!("{}{}", self.base, level)
    }

    fn binder<F: FnOnce(&mut Printer, &mut String) -> fmt::Result>(
        &mut self,
        out: &mut String,
        f: F,
    ) -> fmt::Result {
        let name = format!("{}{}", self.base, self.depth);
        out.push_str(&name);
        out.push_str(". ");
        self.depth += 1;
        let r = f(self, out);
        self.depth -= 1;
        r
    }

    fn value(&mut self, v: &Value, out: &mut String) -> fmt::Result {
        match v {
            Value::Lam(body) => {
                out.push('\\');
                let body = body.clone();
                self.binder(out, |p, out| p.term(&body, out))
            }
            _ => self.atom(v, out),
        }
    }

    fn atom(&mut self, v: &Value, out: &mut String) -> fmt::Result {
        match v {
            Value::Bound(i) => {
                let name = self.bound_name(*i);
                out.push_str(&name);
                Ok(())
            }
            Value::Free(x) => {
                out.push_str(x.as_str());
                Ok(())
            }
            Value::Lam(_) => {
                out.push('(');
                self.value(v, out)?;
                out.push(')');
                Ok(())
            }
        }
    }

    fn term(&mut self, t: &Term, out: &mut String) -> fmt::Result {
        match t {
            Term::Seq(m, n) => {
                if matches!(**m, Term::Seq(..)) {
                    out.push('(');
                    self.term(m, out)?;
                    out.push(')');
                } else {
                    self.term(m, out)?;
                }
                out.push_str(" to ");
                let n = n.clone();
                self.binder(out, |p, out| p.term(&n, out))
            }
            Term::Return(v) => {
                out.push_str("return ");
                self.atom(v, out)
            }
            Term::App(v, w) => {
                self.atom(v, out)?;
                out.push(' ');
                self.atom(w, out)
            }
            Term::Op(name, args) => {
                write!(out, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.term(a, out)?;
                }
                out.push(')');
                Ok(())
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut p = Printer {
        base: pick_base(&t.free_vars()),
        depth: 0,
    };
    let mut out = String::new();
    p.term(t, &mut out).expect("writing to a String cannot fail");
    out
}

pub fn print_value(v: &Value) -> String {
    let mut p = Printer {
        base: pick_base(&v.free_vars()),
        depth: 0,
    };
    let mut out = String::new();
    p.value(v, &mut out).expect("writing to a String cannot fail");
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_value(self))
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phrase::Term(t) => t.fmt(f),
            Phrase::Value(v) => v.fmt(f),
        }
    }
}
