use serde::{Deserialize, Serialize};

use super::groupoid::{groupoid_to_delta, AbelianGroupoid};
use super::relation::FiniteRelation;
use crate::error::{Error, Result};

/// How the doubled halves of a tensor product `(X1 x X1) x (X2 x X2)` are
/// read as a single pair `(primed, unprimed)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DoublingConvention {
    /// `((a1, b1), (a2, b2))` has primed half `(a1, a2)` and unprimed half
    /// `(b1, b2)`: the middle wires are swapped.
    Interleaved,
    /// `((a1, b1), (a2, b2))` has primed half `(a1, b1)` and unprimed half
    /// `(a2, b2)`. Only defined for two equal factors.
    Direct,
}

impl DoublingConvention {
    /// The convention under which canonical structures are completely
    /// positive. `select_convention` recomputes it.
    pub const SELECTED: Self = Self::Interleaved;
}

/// Factorization of a relation's domain or codomain as a doubled object.
///
/// Indices are mixed radix over the factors, most significant first, with
/// digit `t_i = a_i * n_i + b_i` for each factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Doubling {
    factors: Vec<usize>,
    convention: DoublingConvention,
}

impl Doubling {
    pub fn new(factors: Vec<usize>, convention: DoublingConvention) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::Dimension("doubling factors must be positive".into()));
        }
        let direct = convention == DoublingConvention::Direct && factors.len() > 1;
        if direct && (factors.len() != 2 || factors[0] != factors[1]) {
            return Err(Error::Dimension("direct doubling needs two equal factors".into()));
        }
        Ok(Self { factors, convention })
    }

    /// `X x X` with index `x' * n + x`.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![n], DoublingConvention::SELECTED)
    }

    /// `(X x X) x (X x X)` read through `convention`.
    pub fn pair(n: usize, convention: DoublingConvention) -> Result<Self> {
        Self::new(vec![n, n], convention)
    }

    pub fn size(&self) -> usize {
        self.factors.iter().map(|n| n * n).product()
    }

    fn is_direct(&self) -> bool {
        self.convention == DoublingConvention::Direct && self.factors.len() == 2
    }

    /// Index to `(primed, unprimed)`.
    pub fn split(&self, mut idx: usize) -> (usize, usize) {
        if self.is_direct() {
            let half = self.factors[0] * self.factors[0];
            return (idx / half, idx % half);
        }
        let (mut p, mut u, mut scale) = (0, 0, 1);
        for &n in self.factors.iter().rev() {
            let t = idx % (n * n);
            idx /= n * n;
            p += (t / n) * scale;
            u += (t % n) * scale;
            scale *= n;
        }
        (p, u)
    }

    /// Inverse of [`Doubling::split`].
    pub fn join(&self, mut p: usize, mut u: usize) -> usize {
        if self.is_direct() {
            return p * self.factors[0] * self.factors[0] + u;
        }
        let (mut idx, mut scale) = (0, 1);
        for &n in self.factors.iter().rev() {
            idx += ((p % n) * n + u % n) * scale;
            p /= n;
            u /= n;
            scale *= n * n;
        }
        idx
    }
}

/// Complete positivity of `r: dom -> cod`:
/// `(x', x) R (y', y)` iff `(x, x') R (y, y')`, and
/// `(x', x) R (y', y)` implies `(x, x) R (y, y)`.
pub fn is_cp_relation(r: &FiniteRelation, dom: &Doubling, cod: &Doubling) -> Result<bool> {
    if r.dom_size() != dom.size() || r.cod_size() != cod.size() {
        return Err(Error::Dimension(format!(
            "relation is {}->{}, doublings expect {}->{}",
            r.dom_size(),
            r.cod_size(),
            dom.size(),
            cod.size()
        )));
    }
    for (i, j) in r.pairs() {
        let (xp, x) = dom.split(i);
        let (yp, y) = cod.split(j);
        if !r.contains(dom.join(x, xp), cod.join(y, yp)) || !r.contains(dom.join(x, x), cod.join(y, y)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Complete positivity of a comultiplication `delta: S -> S x S` on the
/// doubled carrier `S = X x X`.
pub fn is_cp_comultiplication(delta: &FiniteRelation, x_size: usize, convention: DoublingConvention) -> Result<bool> {
    is_cp_relation(delta, &Doubling::single(x_size)?, &Doubling::pair(x_size, convention)?)
}

/// `F(delta) = delta_* (x) delta` for the groupoid `g` on `X`, with the four
/// output wires regrouped into `S x S` by `convention`.
///
/// In Rel conjugation is the identity on pair sets, so `delta_* = delta`.
pub fn canonical_cpm_structure_with(g: &AbelianGroupoid, convention: DoublingConvention) -> FiniteRelation {
    let n = g.carrier_size();
    let delta = groupoid_to_delta(g);
    let doubled = delta.tensor(&delta);
    let wires = Doubling::pair(n, convention).expect("n positive");
    let half = n * n;
    FiniteRelation::from_pairs(
        half,
        half * half,
        doubled.pairs().map(|(s, j)| (s, wires.join(j / half, j % half))),
    )
    .expect("indices in range")
}

pub fn canonical_cpm_structure(g: &AbelianGroupoid) -> FiniteRelation {
    canonical_cpm_structure_with(g, DoublingConvention::SELECTED)
}

/// The convention under which every canonical structure built from the
/// fixtures is a classical structure and completely positive.
pub fn select_convention(fixtures: &[AbelianGroupoid]) -> Option<DoublingConvention> {
    use super::groupoid::verify_classical_structure;
    [DoublingConvention::Interleaved, DoublingConvention::Direct].into_iter().find(|&c| {
        fixtures.iter().all(|g| {
            let delta = canonical_cpm_structure_with(g, c);
            verify_classical_structure(&delta).unwrap_or(false)
                && is_cp_comultiplication(&delta, g.carrier_size(), c).unwrap_or(false)
        })
    })
}
