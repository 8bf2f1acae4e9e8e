//! Recursive-descent parser for the surface syntax.
//!
//! ```text
//! phrase ::= simple ("to" ident "." phrase)?
//! simple ::= "return" atom | atom atom | atom
//! atom   ::= ident | op "(" phrase,* ")" | "\" ident "." phrase
//!          | "(" phrase ")" | COMP(atom, atom) | FIX | NUM(n)
//! ```
//!
//! An identifier declared in the signature is an operation symbol; it may be
//! written without parentheses when its arity is 0.

use super::macros;
use super::signature::Signature;
use super::term::{Phrase, Term, Value};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Upper(String),
    Num(u64),
    Lambda,
    Dot,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// Whitespace separates this token from the previous one.
    spaced: bool,
}

pub(crate) fn is_keyword(s: &str) -> bool {
    matches!(s, "return" | "to")
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut spaced = true;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            spaced = true;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            if s.starts_with(|c: char| c.is_ascii_lowercase()) {
                Tok::Ident(s)
            } else if s.starts_with(|c: char| c.is_ascii_uppercase()) {
                Tok::Upper(s)
            } else {
                return Err(Error::syntax(l, col, format!("invalid identifier `{s}`")));
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Num(
                s.parse()
                    .map_err(|_| Error::syntax(l, col, "numeral out of range"))?,
            )
        } else {
            bump(&mut chars);
            match c {
                '\\' | 'λ' => Tok::Lambda,
                '.' => Tok::Dot,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => return Err(Error::syntax(l, col, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Token {
            tok,
            line: l,
            column: col,
            spaced,
        });
        spaced = false;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
        spaced: true,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::syntax(t.line, t.column, message))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn variable(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_keyword(s) && !self.sig.contains(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => self.err("expected a variable name"),
        }
    }

    fn term_of(&self, p: Phrase, at: &Token) -> Result<Term> {
        match p {
            Phrase::Term(t) => Ok(t),
            Phrase::Value(_) => Err(Error::syntax(
                at.line,
                at.column,
                "expected a computation, found a value",
            )),
        }
    }

    fn value_of(&self, p: Phrase, at: &Token) -> Result<Value> {
        match p {
            Phrase::Value(v) => Ok(v),
            Phrase::Term(_) => Err(Error::syntax(
                at.line,
                at.column,
                "expected a value, found a computation",
            )),
        }
    }

    fn phrase(&mut self) -> Result<Phrase> {
        let start = self.peek().clone();
        let left = self.simple()?;
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "to") {
            self.next();
            let m = self.term_of(left, &start)?;
            let x = self.variable()?;
            self.expect(Tok::Dot, "`.` after the bound variable")?;
            let at = self.peek().clone();
            let body = self.phrase()?;
            let n = self.term_of(body, &at)?;
            return Ok(Phrase::Term(Term::seq(m, &x, n)));
        }
        Ok(left)
    }

    fn starts_atom(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident(s) => !is_keyword(s),
            Tok::Upper(_) | Tok::Lambda | Tok::LParen => true,
            _ => false,
        }
    }

    fn simple(&mut self) -> Result<Phrase> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "return") {
            self.next();
            let at = self.peek().clone();
            let v = self.atom()?;
            return Ok(Phrase::Term(Term::ret(self.value_of(v, &at)?)));
        }
        let first = self.peek().clone();
        let a = self.atom()?;
        if self.starts_atom() {
            let second = self.peek().clone();
            let b = self.atom()?;
            let v = self.value_of(a, &first)?;
            let w = self.value_of(b, &second)?;
            return Ok(Phrase::Term(Term::app(v, w)));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Phrase> {
        let t = self.peek().clone();
        match t.tok.clone() {
            Tok::Ident(name) => {
                if is_keyword(&name) {
                    return self.err(format!("unexpected keyword `{name}`"));
                }
                let call = self.peek_at(1).tok == Tok::LParen && !self.peek_at(1).spaced;
                if let Some(arity) = self.sig.arity(&name) {
                    self.next();
                    let args = if call { self.arguments()? } else { Vec::new() };
                    if args.len() != arity {
                        return Err(Error::ArityMismatch {
                            name,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    return Ok(Phrase::Term(Term::op(&name, args)));
                }
                if call {
                    return Err(Error::UnknownOperation(name));
                }
                self.next();
                Ok(Phrase::Value(Value::var(&name)))
            }
            Tok::Upper(name) => {
                self.next();
                self.macro_call(&name, &t)
            }
            Tok::Lambda => {
                self.next();
                let x = self.variable()?;
                self.expect(Tok::Dot, "`.` after the λ-bound variable")?;
                let at = self.peek().clone();
                let body = self.phrase()?;
                let body = self.term_of(body, &at)?;
                Ok(Phrase::Value(Value::lam(&x, body)))
            }
            Tok::LParen => {
                self.next();
                let p = self.phrase()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            _ => self.err("expected a term or value"),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.next();
            return Ok(args);
        }
        loop {
            let at = self.peek().clone();
            let p = self.phrase()?;
            args.push(self.term_of(p, &at)?);
            match self.peek().tok {
                Tok::Comma => {
                    self.next();
                }
                Tok::RParen => {
                    self.next();
                    return Ok(args);
                }
                _ => return self.err("expected `,` or `)`"),
            }
        }
    }

    fn value_arg(&mut self) -> Result<Value> {
        let at = self.peek().clone();
        let p = self.phrase()?;
        self.value_of(p, &at)
    }

    fn macro_call(&mut self, name: &str, at: &Token) -> Result<Phrase> {
        match name {
            "COMP" => {
                self.expect(Tok::LParen, "`(` after COMP")?;
                let v = self.value_arg()?;
                self.expect(Tok::Comma, "`,` in COMP")?;
                let w = self.value_arg()?;
                self.expect(Tok::RParen, "`)` closing COMP")?;
                Ok(Phrase::Value(macros::comp(&v, &w)))
            }
            "FIX" => Ok(Phrase::Value(macros::fix())),
            "NUM" => {
                self.expect(Tok::LParen, "`(` after NUM")?;
                let n = match self.next().tok {
                    Tok::Num(n) => n,
                    _ => return Err(Error::syntax(at.line, at.column, "NUM expects a numeral")),
                };
                self.expect(Tok::RParen, "`)` closing NUM")?;
                Ok(Phrase::Value(macros::numeral(n)))
            }
            _ => Err(Error::UnknownMacro(name.to_string())),
        }
    }
}

/// Parses a term or a value.
pub fn parse_phrase(text: &str, sig: &Signature) -> Result<Phrase> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let phrase = p.phrase()?;
    if p.peek().tok != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(phrase)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    match parse_phrase(text, sig)? {
        Phrase::Term(t) => Ok(t),
        Phrase::Value(_) => Err(Error::syntax(1, 1, "expected a computation, found a value")),
    }
}

pub fn parse_value(text: &str, sig: &Signature) -> Result<Value> {
    match parse_phrase(text, sig)? {
        Phrase::Value(v) => Ok(v),
        Phrase::Term(_) => Err(Error::syntax(1, 1, "expected a value, found a computation")),
    }
}

/// Expands the macros of a closed or open text into a macro-free term.
pub fn expand_macros(text: &str, sig: &Signature) -> Result<Term> {
    parse_term(text, sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new([("or", 2), ("raise_e", 0)]).unwrap()
    }

    #[test]
    fn grammar_constructors() {
        let t = parse_term("return (\\x. return x)", &sig()).unwrap();
        assert_eq!(t, Term::ret(Value::lam("x", Term::ret(Value::var("x")))));
        let t = parse_term("return (\\y. return y) to x. x x", &sig()).unwrap();
        let expect = Term::seq(
            Term::ret(Value::lam("y", Term::ret(Value::var("y")))),
            "x",
            Term::app(Value::var("x"), Value::var("x")),
        );
        assert_eq!(t, expect);
        let t = parse_term("or(raise_e, raise_e())", &sig()).unwrap();
        assert_eq!(
            t,
            Term::op("or", vec![Term::op("raise_e", vec![]), Term::op("raise_e", vec![])])
        );
        assert!(parse_term("λx. return x", &sig()).is_err());
        assert!(parse_value("λx. return x", &sig()).is_ok());
    }

    #[test]
    fn reports_errors() {
        let e = parse_term("or(return v, return w, return u)", &sig()).unwrap_err();
        assert!(matches!(e, Error::ArityMismatch { expected: 2, found: 3, .. }));
        assert!(matches!(
            parse_term("choose(return v)", &sig()),
            Err(Error::UnknownOperation(_))
        ));
        assert!(matches!(parse_term("FOO", &sig()), Err(Error::UnknownMacro(_))));
        let e = parse_term("return", &sig()).unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 1, .. }));
        assert!(parse_term("x y z", &sig()).is_err());
        assert!(parse_term("return x to", &sig()).is_err());
    }

    #[test]
    fn application_to_parenthesised_argument_needs_space() {
        let t = parse_term("f (x)", &sig()).unwrap();
        assert_eq!(t, Term::app(Value::var("f"), Value::var("x")));
        assert!(matches!(parse_term("f(x)", &sig()), Err(Error::UnknownOperation(_))));
    }

    #[test]
    fn bodies_extend_to_the_right() {
        let a = parse_term("return x to y. return y to z. z y", &sig()).unwrap();
        let b = parse_term("return x to y. (return y to z. z y)", &sig()).unwrap();
        assert_eq!(a, b);
    }
}
