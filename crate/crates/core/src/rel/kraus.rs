//! Kraus morphisms for relations between doubled sets.
//!
//! A relation `f: X -> Z x Y` induces `R: X x X -> Y x Y` with
//! `(x', x) R (y', y)` iff `x' f (z, y')` and `x f (z, y)` for some `z`.
//! Writing `P_z = {(x, y) : x f (z, y)}`, `R` is the union of the squares
//! `P_z x P_z`, so a witness exists exactly when `R` is covered by squares
//! it contains.

use serde::{Deserialize, Serialize};

use super::relation::FiniteRelation;
use crate::error::{Error, Result};

/// Largest `|X| * |Y|` the subset enumeration accepts.
pub const MAX_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrausWitness {
    pub z_size: usize,
    /// `f: X -> Z x Y`, codomain index `z * |Y| + y`.
    pub f: FiniteRelation,
}

/// `R` built from `f: X -> Z x Y`.
pub fn cp_from_kraus(f: &FiniteRelation, x_size: usize, z_size: usize, y_size: usize) -> Result<FiniteRelation> {
    if f.dom_size() != x_size || f.cod_size() != z_size * y_size {
        return Err(Error::Dimension(format!(
            "Kraus relation is {}->{}, expected {x_size}->{}",
            f.dom_size(),
            f.cod_size(),
            z_size * y_size
        )));
    }
    let mut r = FiniteRelation::empty(x_size * x_size, y_size * y_size)?;
    for xp in 0..x_size {
        for x in 0..x_size {
            for j1 in f.image(xp) {
                for j2 in f.image(x) {
                    if j1 / y_size == j2 / y_size {
                        r.insert(xp * x_size + x, (j1 % y_size) * y_size + j2 % y_size);
                    }
                }
            }
        }
    }
    Ok(r)
}

pub fn default_max_z(x_size: usize, y_size: usize) -> usize {
    x_size * y_size
}

type EdgeSet = [u64; 4];

fn edge_bit(set: &mut EdgeSet, e: usize) {
    set[e / 64] |= 1 << (e % 64);
}

/// Brute-force search for a Kraus relation with at most `max_z` slices.
pub fn kraus_relation_search(
    r: &FiniteRelation,
    x_size: usize,
    y_size: usize,
    max_z: usize,
) -> Result<Option<KrausWitness>> {
    if r.dom_size() != x_size * x_size || r.cod_size() != y_size * y_size {
        return Err(Error::Dimension(format!(
            "relation is {}->{}, not a doubled {x_size}->{y_size}",
            r.dom_size(),
            r.cod_size()
        )));
    }
    let v = x_size * y_size;
    if v > MAX_VERTICES {
        return Err(Error::Capability(format!(
            "Kraus search over {v} points exceeds the limit of {MAX_VERTICES}"
        )));
    }
    // Vertex p = x * |Y| + y; p ~ q when (x_p, x_q) R (y_p, y_q).
    let related = |p: usize, q: usize| {
        r.contains((p / y_size) * x_size + q / y_size, (p % y_size) * y_size + q % y_size)
    };
    let adj: Vec<u32> = (0..v).map(|p| (0..v).filter(|&q| related(p, q)).fold(0, |m, q| m | 1 << q)).collect();
    let admissible = |set: u32| (0..v).all(|p| set >> p & 1 == 0 || set & !adj[p] == 0);

    let mut maximal: Vec<u32> = Vec::new();
    for set in 1..(1u32 << v) {
        if admissible(set) && (0..v).all(|q| set >> q & 1 == 1 || !admissible(set | 1 << q)) {
            maximal.push(set);
        }
    }
    let square = |set: u32| {
        let mut e = [0u64; 4];
        for p in (0..v).filter(|p| set >> p & 1 == 1) {
            for q in (0..v).filter(|q| set >> q & 1 == 1) {
                edge_bit(&mut e, p * v + q);
            }
        }
        e
    };
    let squares: Vec<EdgeSet> = maximal.iter().map(|&s| square(s)).collect();
    let mut target = [0u64; 4];
    for p in 0..v {
        for q in 0..v {
            if related(p, q) {
                edge_bit(&mut target, p * v + q);
            }
        }
    }

    let witness = |slices: &[u32]| -> Result<KrausWitness> {
        let z_size = slices.len().max(1);
        let pairs = slices.iter().enumerate().flat_map(|(z, &set)| {
            (0..v).filter(move |p| set >> p & 1 == 1).map(move |p| (p / y_size, z * y_size + p % y_size))
        });
        Ok(KrausWitness { z_size, f: FiniteRelation::from_pairs(x_size, z_size * y_size, pairs)? })
    };
    if target == [0; 4] {
        return witness(&[]).map(Some);
    }
    let union = squares.iter().fold([0u64; 4], |acc, s| std::array::from_fn(|i| acc[i] | s[i]));
    if union != target {
        return Ok(None);
    }
    for depth in 1..=max_z {
        let mut chosen = Vec::new();
        if cover(&squares, &target, [0; 4], depth, &mut chosen) {
            let slices: Vec<u32> = chosen.iter().map(|&i| maximal[i]).collect();
            return witness(&slices).map(Some);
        }
    }
    Ok(None)
}

/// Depth-limited exact cover search, branching on the squares containing the
/// first uncovered edge.
fn cover(squares: &[EdgeSet], target: &EdgeSet, covered: EdgeSet, depth: usize, chosen: &mut Vec<usize>) -> bool {
    let missing: EdgeSet = std::array::from_fn(|i| target[i] & !covered[i]);
    let Some(w) = missing.iter().position(|&m| m != 0) else {
        return true;
    };
    if depth == 0 {
        return false;
    }
    let bit = missing[w] & missing[w].wrapping_neg();
    for (i, s) in squares.iter().enumerate() {
        if s[w] & bit == 0 {
            continue;
        }
        chosen.push(i);
        if cover(squares, target, std::array::from_fn(|k| covered[k] | s[k]), depth - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rel::cpm::{is_cp_relation, Doubling};
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn identity_has_single_slice_witness() {
        let id = FiniteRelation::identity(4).unwrap();
        let w = kraus_relation_search(&id, 2, 2, 4).unwrap().unwrap();
        assert_eq!(w.z_size, 1);
        assert_eq!(cp_from_kraus(&w.f, 2, 1, 2).unwrap(), id);
    }

    #[test]
    fn off_diagonal_alone_has_no_witness() {
        let r = FiniteRelation::from_pairs(4, 4, [(1, 1)]).unwrap();
        assert!(kraus_relation_search(&r, 2, 2, 4).unwrap().is_none());
    }

    #[test]
    fn relations_from_random_kraus_are_recovered() {
        let mut rng = rng_from_seed(17);
        for _ in 0..50 {
            let (nx, nz, ny) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
            let pairs: Vec<(usize, usize)> = (0..nx)
                .flat_map(|x| (0..nz * ny).map(move |j| (x, j)))
                .filter(|_| rng.random_bool(0.4))
                .collect();
            let f = FiniteRelation::from_pairs(nx, nz * ny, pairs).unwrap();
            let r = cp_from_kraus(&f, nx, nz, ny).unwrap();
            assert!(is_cp_relation(&r, &Doubling::single(nx).unwrap(), &Doubling::single(ny).unwrap()).unwrap());
            let w = kraus_relation_search(&r, nx, ny, default_max_z(nx, ny)).unwrap().expect("witness");
            assert_eq!(cp_from_kraus(&w.f, nx, w.z_size, ny).unwrap(), r);
        }
    }

    #[test]
    fn slice_bound_is_respected() {
        // Two disjoint diagonal squares need two slices.
        let r = FiniteRelation::from_pairs(4, 4, [(0, 0), (3, 3)]).unwrap();
        assert!(kraus_relation_search(&r, 2, 2, 1).unwrap().is_none());
        assert_eq!(kraus_relation_search(&r, 2, 2, 2).unwrap().unwrap().z_size, 2);
    }

    #[test]
    fn oversized_search_refused() {
        let r = FiniteRelation::empty(25, 16).unwrap();
        assert!(matches!(kraus_relation_search(&r, 5, 4, 20), Err(Error::Capability(_))));
    }
}
