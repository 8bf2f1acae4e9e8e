//! Dense relations on `{0, …, n-1}` stored as bit rows.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRel {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRel {
    pub fn empty(n: usize) -> BitRel {
        let words = n.div_ceil(64).max(1);
        BitRel {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn full(n: usize) -> BitRel {
        let mut r = BitRel::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn identity(n: usize) -> BitRel {
        let mut r = BitRel::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.bits[i * self.words + j / 64] & (1 << (j % 64)) != 0
    }

    /// Returns whether the pair was new.
    pub fn insert(&mut self, i: usize, j: usize) -> bool {
        let w = &mut self.bits[i * self.words + j / 64];
        let fresh = *w & (1 << (j % 64)) == 0;
        *w |= 1 << (j % 64);
        fresh
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |j| (i, j)))
    }

    /// The `j` with `(i, j)` in the relation, ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.bits[i * self.words..(i + 1) * self.words];
        row.iter().enumerate().flat_map(|(w, bits)| {
            let mut b = *bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let j = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + j)
            })
        })
    }

    pub fn is_subset(&self, other: &BitRel) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersect(&self, other: &BitRel) -> BitRel {
        assert_eq!(self.n, other.n, "relations over different carriers");
        BitRel {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
            ..self.clone()
        }
    }

    pub fn union(&self, other: &BitRel) -> BitRel {
        assert_eq!(self.n, other.n, "relations over different carriers");
        BitRel {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
            ..self.clone()
        }
    }

    pub fn converse(&self) -> BitRel {
        let mut r = BitRel::empty(self.n);
        for (i, j) in self.pairs() {
            r.insert(j, i);
        }
        r
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &BitRel) -> BitRel {
        let mut r = BitRel::empty(self.n);
        for i in 0..self.n {
            for j in self.row(i) {
                let (dst, src) = (i * self.words, j * self.words);
                for w in 0..self.words {
                    r.bits[dst + w] |= other.bits[src + w];
                }
            }
        }
        r
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(i, j)| self.contains(j, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.then(self).is_subset(self)
    }
}

impl fmt::Debug for BitRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let mut r = BitRel::empty(70);
        assert!(r.insert(0, 69));
        assert!(!r.insert(0, 69));
        r.insert(69, 3);
        assert_eq!(r.len(), 2);
        assert_eq!(r.then(&r).pairs().collect::<Vec<_>>(), vec![(0, 3)]);
        assert!(!r.is_transitive());
        assert!(BitRel::identity(70).is_transitive());
        assert!(r.converse().contains(69, 0));
        assert!(r.is_subset(&BitRel::full(70)));
        let both = r.union(&r.converse());
        assert!(both.is_symmetric());
        assert_eq!(both.intersect(&r), r);
        r.remove(0, 69);
        assert_eq!(r.row(69).collect::<Vec<_>>(), vec![3]);
    }
}
