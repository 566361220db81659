use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::relation::FiniteRelation;
use crate::error::{Error, Result};

/// Disjoint union of abelian groups covering `{0..carrier_size}`.
///
/// `tables[b][i][j]` is the carrier element `blocks[b][i] + blocks[b][j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupoidParts", into = "GroupoidParts")]
pub struct AbelianGroupoid {
    carrier_size: usize,
    blocks: Vec<Vec<usize>>,
    tables: Vec<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
struct GroupoidParts {
    carrier_size: usize,
    blocks: Vec<Vec<usize>>,
    tables: Vec<Vec<Vec<usize>>>,
}

impl TryFrom<GroupoidParts> for AbelianGroupoid {
    type Error = Error;

    fn try_from(p: GroupoidParts) -> Result<Self> {
        Self::new(p.carrier_size, p.blocks, p.tables)
    }
}

impl From<AbelianGroupoid> for GroupoidParts {
    fn from(g: AbelianGroupoid) -> Self {
        Self { carrier_size: g.carrier_size, blocks: g.blocks, tables: g.tables }
    }
}

impl AbelianGroupoid {
    /// Validates the partition and every table exhaustively.
    pub fn new(carrier_size: usize, blocks: Vec<Vec<usize>>, tables: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if carrier_size == 0 {
            return Err(Error::Validation("empty carrier".into()));
        }
        if blocks.len() != tables.len() {
            return Err(Error::Validation(format!("{} blocks but {} tables", blocks.len(), tables.len())));
        }
        let mut seen = vec![false; carrier_size];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Validation("empty block".into()));
            }
            for &x in block {
                if x >= carrier_size || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Validation(format!("element {x} out of range or repeated")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!("element {x} is in no block")));
        }
        for (b, (block, table)) in blocks.iter().zip(&tables).enumerate() {
            let local = localize(block, table).map_err(|e| Error::Validation(format!("block {b}: {e}")))?;
            check_abelian_group(&local).map_err(|e| Error::Validation(format!("block {b}: {e}")))?;
        }
        Ok(Self { carrier_size, blocks, tables })
    }

    /// Every element its own trivial group.
    pub fn discrete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|x| vec![x]).collect(), (0..n).map(|x| vec![vec![x]]).collect())
    }

    /// Cyclic group `Z_n` on `{0..n}` with the usual addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::new(n, vec![(0..n).collect()], vec![table])
    }

    /// Block elements with a local Cayley table (entries index into `block`).
    pub(crate) fn from_local(carrier_size: usize, parts: &[(&[usize], &[u8])]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(parts.len());
        let mut tables = Vec::with_capacity(parts.len());
        for (block, flat) in parts {
            let k = block.len();
            blocks.push(block.to_vec());
            tables.push((0..k).map(|i| (0..k).map(|j| block[flat[i * k + j] as usize]).collect()).collect());
        }
        Self::new(carrier_size, blocks, tables)
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn tables(&self) -> &[Vec<Vec<usize>>] {
        &self.tables
    }

    fn locate(&self, x: usize) -> Option<(usize, usize)> {
        self.blocks
            .iter()
            .enumerate()
            .find_map(|(b, block)| block.iter().position(|&e| e == x).map(|i| (b, i)))
    }

    /// `x + y`, defined when both lie in the same block.
    pub fn add(&self, x: usize, y: usize) -> Option<usize> {
        let (bx, i) = self.locate(x)?;
        let (by, j) = self.locate(y)?;
        (bx == by).then(|| self.tables[bx][i][j])
    }

    /// Product groupoid on `{0..n} x {0..n}` (element `(a, b)` is `a * n + b`),
    /// with componentwise addition.
    pub fn square(&self) -> Self {
        let n = self.carrier_size;
        let mut blocks = Vec::new();
        let mut tables = Vec::new();
        for (b1, t1) in self.blocks.iter().zip(&self.tables) {
            for (b2, t2) in self.blocks.iter().zip(&self.tables) {
                let elems: Vec<(usize, usize)> =
                    (0..b1.len()).flat_map(|i| (0..b2.len()).map(move |j| (i, j))).collect();
                blocks.push(elems.iter().map(|&(i, j)| b1[i] * n + b2[j]).collect());
                tables.push(
                    elems
                        .iter()
                        .map(|&(i1, j1)| {
                            elems.iter().map(|&(i2, j2)| t1[i1][i2] * n + t2[j1][j2]).collect()
                        })
                        .collect(),
                );
            }
        }
        Self::new(n * n, blocks, tables).expect("product of abelian groups is abelian")
    }
}

fn localize(block: &[usize], table: &[Vec<usize>]) -> std::result::Result<Vec<Vec<usize>>, String> {
    let k = block.len();
    if table.len() != k || table.iter().any(|r| r.len() != k) {
        return Err(format!("table is not {k}x{k}"));
    }
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| block.iter().position(|e| e == x).ok_or_else(|| format!("{x} is outside the block")))
                .collect()
        })
        .collect()
}

/// Exhaustive associativity, commutativity, identity and inverse checks on a
/// table over `{0..k}`.
pub fn check_abelian_group(t: &[Vec<usize>]) -> std::result::Result<(), String> {
    let k = t.len();
    if t.iter().any(|r| r.len() != k || r.iter().any(|&x| x >= k)) {
        return Err("table is not closed".into());
    }
    for i in 0..k {
        for j in 0..k {
            if t[i][j] != t[j][i] {
                return Err(format!("not commutative at ({i}, {j})"));
            }
            for l in 0..k {
                if t[t[i][j]][l] != t[i][t[j][l]] {
                    return Err(format!("not associative at ({i}, {j}, {l})"));
                }
            }
        }
    }
    let e = (0..k).find(|&e| (0..k).all(|i| t[e][i] == i)).ok_or("no identity")?;
    if let Some(i) = (0..k).find(|&i| !(0..k).any(|j| t[i][j] == e)) {
        return Err(format!("element {i} has no inverse"));
    }
    Ok(())
}

/// `x delta (y, z)` iff `y + z = x`; codomain index `y * k + z`.
pub fn groupoid_to_delta(g: &AbelianGroupoid) -> FiniteRelation {
    let k = g.carrier_size;
    let pairs = g.blocks.iter().zip(&g.tables).flat_map(|(block, table)| {
        block.iter().enumerate().flat_map(move |(i, &y)| {
            block.iter().enumerate().map(move |(j, &z)| (table[i][j], y * k + z))
        })
    });
    FiniteRelation::from_pairs(k, k * k, pairs).expect("indices in range")
}

/// The special commutative Frobenius axioms for `delta: k -> k x k`,
/// checked by relational composition.
pub fn verify_classical_structure(delta: &FiniteRelation) -> Result<bool> {
    let k = delta.dom_size();
    if delta.cod_size() != k * k {
        return Err(Error::Dimension(format!(
            "comultiplication must be {k} -> {}, got {k} -> {}",
            k * k,
            delta.cod_size()
        )));
    }
    let id = FiniteRelation::identity(k)?;
    let dagger = delta.dagger();
    if delta.then(&dagger)? != id {
        return Ok(false);
    }
    if delta.then(&FiniteRelation::swap(k)?)? != *delta {
        return Ok(false);
    }
    let middle = dagger.then(delta)?;
    let left = delta.tensor(&id).then(&id.tensor(&dagger))?;
    let right = id.tensor(delta).then(&dagger.tensor(&id))?;
    Ok(left == middle && right == middle)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Invariant-factor sequences `m_1 | m_2 | ...` (all `>= 2`) with product `k`.
fn invariant_factors(k: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, last: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 1 {
            out.push(acc.clone());
            return;
        }
        for m in 2..=rest {
            if rest.is_multiple_of(m) && m.is_multiple_of(last) {
                acc.push(m);
                go(rest / m, m, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(k, 1, &mut Vec::new(), &mut out);
    out
}

fn direct_product_table(factors: &[usize]) -> Vec<u8> {
    let k: usize = factors.iter().product();
    let digits = |mut x: usize| -> Vec<usize> {
        let mut d = vec![0; factors.len()];
        for (slot, &m) in d.iter_mut().zip(factors).rev() {
            *slot = x % m;
            x /= m;
        }
        d
    };
    let mut t = vec![0u8; k * k];
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (digits(i), digits(j));
            let s = factors.iter().enumerate().fold(0, |acc, (f, &m)| acc * m + (a[f] + b[f]) % m);
            t[i * k + j] = s as u8;
        }
    }
    t
}

/// Largest block size with precomputed labeled groups.
pub const MAX_BLOCK: usize = 9;

/// All abelian group tables on `{0..k}` (flat, row-major), sorted by identity
/// element and then lexicographically.
pub fn labeled_groups(k: usize) -> &'static [Vec<u8>] {
    static CACHE: [OnceLock<Vec<Vec<u8>>>; MAX_BLOCK + 1] = [const { OnceLock::new() }; MAX_BLOCK + 1];
    assert!((1..=MAX_BLOCK).contains(&k), "block size {k} unsupported");
    CACHE[k].get_or_init(|| {
        let mut found: HashSet<Vec<u8>> = HashSet::new();
        for factors in invariant_factors(k) {
            let base = direct_product_table(&factors);
            let mut p: Vec<usize> = (0..k).collect();
            loop {
                let mut t = vec![0u8; k * k];
                for i in 0..k {
                    for j in 0..k {
                        t[p[i] * k + p[j]] = p[base[i * k + j] as usize] as u8;
                    }
                }
                found.insert(t);
                if !next_permutation(&mut p) {
                    break;
                }
            }
        }
        let identity = |t: &Vec<u8>| (0..k).find(|&e| (0..k).all(|i| t[e * k + i] as usize == i));
        let mut all: Vec<Vec<u8>> = found.into_iter().collect();
        all.sort_by(|a, b| (identity(a), a).cmp(&(identity(b), b)));
        all
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_group_counts() {
        let expected = [1, 2, 3, 16, 30, 360, 840, 15360];
        for (k, &count) in (1..=8).zip(&expected) {
            assert_eq!(labeled_groups(k).len(), count, "k = {k}");
        }
    }

    #[test]
    fn labeled_groups_are_valid_and_ordered() {
        for k in 1..=5 {
            for flat in labeled_groups(k) {
                let t: Vec<Vec<usize>> =
                    (0..k).map(|i| (0..k).map(|j| flat[i * k + j] as usize).collect()).collect();
                check_abelian_group(&t).unwrap();
            }
        }
        let z2 = labeled_groups(2);
        assert_eq!(z2[0], vec![0, 1, 1, 0]);
        assert_eq!(z2[1], vec![1, 0, 0, 1]);
    }

    #[test]
    fn delta_examples() {
        let d = groupoid_to_delta(&AbelianGroupoid::discrete(3).unwrap());
        assert_eq!(d.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 4), (2, 8)]);
        let z2 = groupoid_to_delta(&AbelianGroupoid::cyclic(2).unwrap());
        assert_eq!(z2.pairs().collect::<Vec<_>>(), vec![(0, 0), (0, 3), (1, 1), (1, 2)]);
        let z3 = groupoid_to_delta(&AbelianGroupoid::cyclic(3).unwrap());
        assert_eq!(z3.len(), 9);
        assert!((0..3).all(|x| z3.image(x).count() == 3));
    }

    #[test]
    fn classical_structure_examples() {
        for g in [AbelianGroupoid::discrete(4).unwrap(), AbelianGroupoid::cyclic(2).unwrap(), AbelianGroupoid::cyclic(3).unwrap()] {
            assert!(verify_classical_structure(&groupoid_to_delta(&g)).unwrap());
        }
        let bad = FiniteRelation::from_pairs(2, 4, [(0, 1)]).unwrap();
        assert!(!verify_classical_structure(&bad).unwrap());
        let wrong_shape = FiniteRelation::from_pairs(2, 3, [(0, 1)]).unwrap();
        assert!(matches!(verify_classical_structure(&wrong_shape), Err(Error::Dimension(_))));
    }

    #[test]
    fn invalid_groupoids_rejected() {
        // Not a partition.
        assert!(AbelianGroupoid::new(2, vec![vec![0]], vec![vec![vec![0]]]).is_err());
        // No inverses: {0,1} with max.
        assert!(AbelianGroupoid::new(2, vec![vec![0, 1]], vec![vec![vec![0, 1], vec![1, 1]]]).is_err());
        // Non-commutative: left projection.
        assert!(AbelianGroupoid::new(2, vec![vec![0, 1]], vec![vec![vec![0, 0], vec![1, 1]]]).is_err());
    }

    #[test]
    fn square_is_componentwise() {
        let g = AbelianGroupoid::cyclic(3).unwrap().square();
        assert_eq!(g.carrier_size(), 9);
        // (1, 2) + (2, 2) = (0, 1)
        assert_eq!(g.add(5, 8), Some(1));
        let d = AbelianGroupoid::discrete(2).unwrap().square();
        assert_eq!(d.blocks().len(), 4);
        assert_eq!(d.add(1, 2), None);
    }

    #[test]
    fn serde_validates() {
        let g = AbelianGroupoid::cyclic(3).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<AbelianGroupoid>(&json).unwrap(), g);
        let broken = json.replace("[[0,1,2]", "[[0,1,1]");
        assert!(serde_json::from_str::<AbelianGroupoid>(&broken).is_err());
    }
}
