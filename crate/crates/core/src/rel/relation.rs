use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Relation between `{0..dom_size}` and `{0..cod_size}`, stored as a
/// row-major bitset (`x * cod_size + y`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteRelation {
    dom_size: usize,
    cod_size: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl FiniteRelation {
    pub fn empty(dom_size: usize, cod_size: usize) -> Result<Self> {
        if dom_size == 0 || cod_size == 0 {
            return Err(Error::Dimension("relation sizes must be positive".into()));
        }
        let words_per_row = cod_size.div_ceil(WORD);
        Ok(Self { dom_size, cod_size, words_per_row, bits: vec![0; dom_size * words_per_row] })
    }

    pub fn from_pairs<I>(dom_size: usize, cod_size: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Self::empty(dom_size, cod_size)?;
        for (x, y) in pairs {
            if x >= dom_size || y >= cod_size {
                return Err(Error::Dimension(format!(
                    "pair ({x}, {y}) out of range for {dom_size} x {cod_size}"
                )));
            }
            r.insert(x, y);
        }
        Ok(r)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_pairs(n, n, (0..n).map(|i| (i, i)))
    }

    /// `(a, b) -> (b, a)` on `{0..n} x {0..n}`.
    pub fn swap(n: usize) -> Result<Self> {
        Self::from_pairs(n * n, n * n, (0..n).flat_map(|a| (0..n).map(move |b| (a * n + b, b * n + a))))
    }

    pub fn dom_size(&self) -> usize {
        self.dom_size
    }

    pub fn cod_size(&self) -> usize {
        self.cod_size
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        debug_assert!(x < self.dom_size && y < self.cod_size);
        self.bits[x * self.words_per_row + y / WORD] |= 1 << (y % WORD);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.dom_size
            && y < self.cod_size
            && self.bits[x * self.words_per_row + y / WORD] >> (y % WORD) & 1 == 1
    }

    fn row(&self, x: usize) -> &[u64] {
        &self.bits[x * self.words_per_row..(x + 1) * self.words_per_row]
    }

    /// Image of `x`, in increasing order.
    pub fn image(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(x).iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD + t)
            })
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dom_size).flat_map(move |x| self.image(x).map(move |y| (x, y)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// `self` first, then `next`: `x (self;next) z` iff `x self y` and `y next z` for some `y`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.cod_size != next.dom_size {
            return Err(Error::Dimension(format!(
                "cannot compose {}->{} with {}->{}",
                self.dom_size, self.cod_size, next.dom_size, next.cod_size
            )));
        }
        let mut out = Self::empty(self.dom_size, next.cod_size)?;
        for x in 0..self.dom_size {
            let base = x * out.words_per_row;
            for y in self.image(x) {
                for (dst, src) in out.bits[base..base + out.words_per_row].iter_mut().zip(next.row(y)) {
                    *dst |= src;
                }
            }
        }
        Ok(out)
    }

    /// Converse relation.
    pub fn dagger(&self) -> Self {
        let mut out = Self::empty(self.cod_size, self.dom_size).expect("sizes positive");
        for (x, y) in self.pairs() {
            out.insert(y, x);
        }
        out
    }

    /// Cartesian product: `(x1, x2) (r (x) s) (y1, y2)` with index `x1 * |dom s| + x2`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::empty(self.dom_size * other.dom_size, self.cod_size * other.cod_size)
            .expect("sizes positive");
        for (x1, y1) in self.pairs() {
            for (x2, y2) in other.pairs() {
                out.insert(x1 * other.dom_size + x2, y1 * other.cod_size + y2);
            }
        }
        out
    }
}

/// Relational composition, `r` first.
pub fn rel_compose(r: &FiniteRelation, s: &FiniteRelation) -> Result<FiniteRelation> {
    r.then(s)
}

pub fn rel_dagger(r: &FiniteRelation) -> FiniteRelation {
    r.dagger()
}

pub fn rel_tensor(r: &FiniteRelation, s: &FiniteRelation) -> FiniteRelation {
    r.tensor(s)
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRelation({}x{}, ", self.dom_size, self.cod_size)?;
        f.debug_set().entries(self.pairs()).finish()?;
        write!(f, ")")
    }
}
