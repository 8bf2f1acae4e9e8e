//! Bounded enumeration of terms and values.

use std::collections::HashMap;
use std::sync::Arc;

use super::signature::Signature;
use super::term::{Name, Term, Value};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 4;
pub const DEFAULT_CAP: usize = 50_000;

#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    pub max_depth: usize,
    pub cap: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_depth: DEFAULT_MAX_DEPTH,
            cap: DEFAULT_CAP,
        }
    }
}

struct Enumerator<'a> {
    sig: &'a Signature,
    ctx: &'a [Name],
    cap: usize,
    produced: usize,
    // Keyed by (number of binders in scope, exact depth).
    values: HashMap<(u32, usize), Arc<Vec<Value>>>,
    terms: HashMap<(u32, usize), Arc<Vec<Term>>>,
}

impl Enumerator<'_> {
    fn charge(&mut self, n: usize) -> Result<()> {
        // Intermediate lists (bodies under binders, shallower layers) count
        // towards a work guard; the cap itself applies to the final list.
        self.produced += n;
        if self.produced > self.cap.saturating_mul(8) {
            return Err(Error::Budget(format!(
                "enumeration exceeds the cap of {} phrases",
                self.cap
            )));
        }
        Ok(())
    }

    fn values_exact(&mut self, k: u32, d: usize) -> Result<Arc<Vec<Value>>> {
        if let Some(v) = self.values.get(&(k, d)) {
            return Ok(v.clone());
        }
        let out: Vec<Value> = if d == 0 {
            let mut out: Vec<Value> = self.ctx.iter().cloned().map(Value::Free).collect();
            out.extend((0..k).rev().map(Value::Bound));
            out
        } else {
            self.terms_exact(k + 1, d - 1)?
                .iter()
                .map(|b| Value::Lam(Arc::new(b.clone())))
                .collect()
        };
        self.charge(out.len())?;
        let out = Arc::new(out);
        self.values.insert((k, d), out.clone());
        Ok(out)
    }

    fn values_upto(&mut self, k: u32, d: usize) -> Result<Vec<(Value, usize)>> {
        let mut out = Vec::new();
        for e in 0..=d {
            out.extend(self.values_exact(k, e)?.iter().map(|v| (v.clone(), e)));
        }
        Ok(out)
    }

    fn terms_upto(&mut self, k: u32, d: usize) -> Result<Vec<(Term, usize)>> {
        let mut out = Vec::new();
        for e in 1..=d {
            out.extend(self.terms_exact(k, e)?.iter().map(|t| (t.clone(), e)));
        }
        Ok(out)
    }

    fn terms_exact(&mut self, k: u32, d: usize) -> Result<Arc<Vec<Term>>> {
        if let Some(t) = self.terms.get(&(k, d)) {
            return Ok(t.clone());
        }
        let mut out = Vec::new();
        if d >= 1 {
            let e = d - 1;
            for v in self.values_exact(k, e)?.iter() {
                out.push(Term::Return(v.clone()));
            }
            let vals = self.values_upto(k, e)?;
            for (v, dv) in &vals {
                for (w, dw) in &vals {
                    if (*dv).max(*dw) == e {
                        out.push(Term::App(v.clone(), w.clone()));
                    }
                }
            }
            if e >= 1 {
                let heads = self.terms_upto(k, e)?;
                let bodies = self.terms_upto(k + 1, e)?;
                for (m, dm) in &heads {
                    for (n, dn) in &bodies {
                        if (*dm).max(*dn) == e {
                            out.push(Term::Seq(Arc::new(m.clone()), Arc::new(n.clone())));
                        }
                    }
                    self.charge(0)?;
                }
            }
            let ops: Vec<(Name, usize)> = self.sig.ops().map(|(n, a)| (n.clone(), a)).collect();
            for (name, arity) in ops {
                if arity == 0 {
                    if d == 1 {
                        out.push(Term::Op(name.clone(), Arc::from(Vec::new())));
                    }
                    continue;
                }
                if e == 0 {
                    continue;
                }
                let args = self.terms_upto(k, e)?;
                if args.is_empty() {
                    continue;
                }
                let mut idx = vec![0usize; arity];
                'tuples: loop {
                    if idx.iter().any(|&i| args[i].1 == e) {
                        let tuple: Vec<Term> = idx.iter().map(|&i| args[i].0.clone()).collect();
                        out.push(Term::Op(name.clone(), tuple.into()));
                        if out.len() > self.cap.saturating_mul(8) {
                            self.charge(out.len())?;
                        }
                    }
                    for slot in (0..arity).rev() {
                        idx[slot] += 1;
                        if idx[slot] < args.len() {
                            continue 'tuples;
                        }
                        idx[slot] = 0;
                    }
                    break;
                }
            }
        }
        self.charge(out.len())?;
        let out = Arc::new(out);
        self.terms.insert((k, d), out.clone());
        Ok(out)
    }
}

fn check_depth(depth: usize, limits: EnumLimits) -> Result<()> {
    if depth > limits.max_depth {
        return Err(Error::Budget(format!(
            "enumeration depth {depth} exceeds the configured maximum {}",
            limits.max_depth
        )));
    }
    Ok(())
}

/// All terms of depth ≤ `depth` with free variables in `ctx`, without
/// α-duplicates, ordered by depth and then by constructor.
pub fn enumerate_terms_with(
    sig: &Signature,
    ctx: &[Name],
    depth: usize,
    limits: EnumLimits,
) -> Result<Vec<Term>> {
    check_depth(depth, limits)?;
    let mut e = Enumerator {
        sig,
        ctx,
        cap: limits.cap,
        produced: 0,
        values: HashMap::new(),
        terms: HashMap::new(),
    };
    let all = e.terms_upto(0, depth)?;
    if all.len() > limits.cap {
        return Err(Error::Budget(format!("{} terms exceed the cap", all.len())));
    }
    Ok(all.into_iter().map(|(t, _)| t).collect())
}

pub fn enumerate_values_with(
    sig: &Signature,
    ctx: &[Name],
    depth: usize,
    limits: EnumLimits,
) -> Result<Vec<Value>> {
    check_depth(depth, limits)?;
    let mut e = Enumerator {
        sig,
        ctx,
        cap: limits.cap,
        produced: 0,
        values: HashMap::new(),
        terms: HashMap::new(),
    };
    let all = e.values_upto(0, depth)?;
    if all.len() > limits.cap {
        return Err(Error::Budget(format!("{} values exceed the cap", all.len())));
    }
    Ok(all.into_iter().map(|(v, _)| v).collect())
}

pub fn enumerate_terms(sig: &Signature, ctx: &[Name], depth: usize) -> Result<Vec<Term>> {
    enumerate_terms_with(sig, ctx, depth, EnumLimits::default())
}

pub fn enumerate_values(sig: &Signature, ctx: &[Name], depth: usize) -> Result<Vec<Value>> {
    enumerate_values_with(sig, ctx, depth, EnumLimits::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let pure = Signature::empty();
        assert!(enumerate_terms(&pure, &[], 1).unwrap().is_empty());
        let x = [Name::new("x")];
        assert_eq!(enumerate_values(&pure, &x, 1).unwrap(), vec![Value::var("x")]);
        assert_eq!(enumerate_values(&pure, &x, 0).unwrap(), vec![Value::var("x")]);
    }

    #[test]
    fn respects_limits() {
        let sig = Signature::new([("or", 2)]).unwrap();
        assert!(matches!(
            enumerate_terms(&sig, &[], 5),
            Err(Error::Budget(_))
        ));
        let tight = EnumLimits { max_depth: 4, cap: 2 };
        assert!(matches!(
            enumerate_terms_with(&sig, &[Name::new("x")], 3, tight),
            Err(Error::Budget(_))
        ));
    }
}
