//! Exhaustive search for classical structures on doubled sets that are
//! completely positive, compared against the canonical ones.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cpm::{canonical_cpm_structure, is_cp_comultiplication, DoublingConvention};
use super::groupoid::{groupoid_to_delta, labeled_groups, verify_classical_structure, AbelianGroupoid};
use super::relation::FiniteRelation;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: u64 = 10_000_000;
pub const MAX_X_SIZE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// Candidate budget; `u64::MAX` lifts it.
    pub cap: u64,
    pub workers: usize,
    /// Resume marker: partitions before this index are skipped.
    pub start_partition: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, workers: 1, start_partition: 0 }
    }
}

/// Set partitions of `{0..n}` as restricted growth strings, ordered by the
/// sorted multiset of block sizes and then by the string.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, rgs: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(rgs.clone());
            return;
        }
        for b in 0..=max + 1 {
            rgs.push(b);
            go(i + 1, n, rgs, max.max(b), out);
            rgs.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut strings = Vec::new();
    let mut rgs = vec![0];
    go(1, n, &mut rgs, 0, &mut strings);
    // (sorted block sizes, growth string, blocks)
    type Keyed = (Vec<usize>, Vec<usize>, Vec<Vec<usize>>);
    let mut keyed: Vec<Keyed> = strings
        .into_iter()
        .map(|rgs| {
            let count = rgs.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Vec::new(); count];
            for (x, &b) in rgs.iter().enumerate() {
                blocks[b].push(x);
            }
            let mut sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
            sizes.sort_unstable();
            (sizes, rgs, blocks)
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, _, blocks)| blocks).collect()
}

fn candidate_count(blocks: &[Vec<usize>]) -> u64 {
    blocks.iter().map(|b| labeled_groups(b.len()).len() as u64).product()
}

fn delta_from_parts(carrier: usize, blocks: &[Vec<usize>], choice: &[usize]) -> FiniteRelation {
    let mut r = FiniteRelation::empty(carrier, carrier * carrier).expect("carrier positive");
    for (block, &c) in blocks.iter().zip(choice) {
        let k = block.len();
        let table = &labeled_groups(k)[c];
        for (i, &y) in block.iter().enumerate() {
            for (j, &z) in block.iter().enumerate() {
                r.insert(block[table[i * k + j] as usize], y * carrier + z);
            }
        }
    }
    r
}

/// Reading of the group conditions element by element, recorded alongside
/// each survivor: `(a,b)+(c,d)=(e,f)` iff `(c,d)+(a,b)=(f,e)`, and
/// `(a,b)+(c,d)=(e,f)` implies `(c,d)+(c,d)=(f,f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementReading {
    pub swap_rule: bool,
    pub diagonal_rule: bool,
}

pub fn element_reading(g: &AbelianGroupoid, x_size: usize) -> ElementReading {
    let n = x_size;
    let swap = |s: usize| (s % n) * n + s / n;
    let mut swap_rule = true;
    let mut diagonal_rule = true;
    for (block, table) in g.blocks().iter().zip(g.tables()) {
        for (i, _) in block.iter().enumerate() {
            for (j, &t2) in block.iter().enumerate() {
                let s = table[i][j];
                let t1 = block[i];
                // The swapped sum must exist and equal (f, e).
                swap_rule &= g.add(t2, t1) == Some(swap(s)) && g.add(t1, t2) == Some(s);
                let f = s % n;
                diagonal_rule &= g.add(t2, t2) == Some(f * n + f);
            }
        }
    }
    ElementReading { swap_rule, diagonal_rule }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Survivor {
    pub groupoid: AbelianGroupoid,
    pub is_cp: bool,
    pub is_canonical: bool,
    pub element_reading: ElementReading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub processed: u64,
    pub next_partition: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub x_size: usize,
    pub convention: DoublingConvention,
    pub partitions: usize,
    pub candidates: u64,
    pub survivors: Vec<Survivor>,
    /// Product groupoids `g x g` for every abelian groupoid `g` on `X`.
    pub canonical: Vec<AbelianGroupoid>,
    /// Set when the budget stopped the run early.
    pub incomplete: Option<Progress>,
    pub survivors_match_canonical: bool,
}

/// All abelian groupoids on `{0..n}`, in enumeration order.
pub fn all_groupoids(n: usize) -> Vec<AbelianGroupoid> {
    let mut out = Vec::new();
    for blocks in set_partitions(n) {
        for_each_choice(&blocks, |choice| {
            out.push(groupoid_from_choice(n, &blocks, choice));
        });
    }
    out
}

fn groupoid_from_choice(carrier: usize, blocks: &[Vec<usize>], choice: &[usize]) -> AbelianGroupoid {
    let parts: Vec<(&[usize], &[u8])> = blocks
        .iter()
        .zip(choice)
        .map(|(b, &c)| (b.as_slice(), labeled_groups(b.len())[c].as_slice()))
        .collect();
    AbelianGroupoid::from_local(carrier, &parts).expect("labeled groups are valid")
}

fn for_each_choice(blocks: &[Vec<usize>], mut visit: impl FnMut(&[usize])) {
    let counts: Vec<usize> = blocks.iter().map(|b| labeled_groups(b.len()).len()).collect();
    let mut choice = vec![0; blocks.len()];
    loop {
        visit(&choice);
        let mut pos = choice.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < counts[pos] {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Runs the enumeration for `|X| = x_size` within the candidate budget.
/// An exhausted budget yields a report with `incomplete` set.
pub fn enumerate_partial(x_size: usize, opts: &EnumerationOptions) -> Result<EnumerationReport> {
    if !(1..=MAX_X_SIZE).contains(&x_size) {
        return Err(Error::Validation(format!("x_size must be in 1..={MAX_X_SIZE}, got {x_size}")));
    }
    if opts.workers == 0 {
        return Err(Error::Validation("workers must be positive".into()));
    }
    let carrier = x_size * x_size;
    let partitions = set_partitions(carrier);
    let start = opts.start_partition.min(partitions.len());

    let mut end = start;
    let mut budgeted = 0u64;
    while end < partitions.len() {
        let c = candidate_count(&partitions[end]);
        if budgeted.saturating_add(c) > opts.cap {
            break;
        }
        budgeted += c;
        end += 1;
    }

    let convention = DoublingConvention::SELECTED;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let per_partition: Vec<Vec<Vec<usize>>> = pool.install(|| {
        partitions[start..end]
            .par_iter()
            .map(|blocks| {
                let mut kept = Vec::new();
                for_each_choice(blocks, |choice| {
                    let delta = delta_from_parts(carrier, blocks, choice);
                    if is_cp_comultiplication(&delta, x_size, convention).unwrap_or(false)
                        && verify_classical_structure(&delta).unwrap_or(false)
                    {
                        kept.push(choice.to_vec());
                    }
                });
                kept
            })
            .collect()
    });

    let canonical: Vec<AbelianGroupoid> = all_groupoids(x_size).iter().map(AbelianGroupoid::square).collect();
    let canonical_set: BTreeSet<FiniteRelation> = all_groupoids(x_size).iter().map(canonical_cpm_structure).collect();

    let mut seen = BTreeSet::new();
    let mut survivors = Vec::new();
    for (blocks, kept) in partitions[start..end].iter().zip(per_partition) {
        for choice in kept {
            let groupoid = groupoid_from_choice(carrier, blocks, &choice);
            let delta = groupoid_to_delta(&groupoid);
            if !seen.insert(delta.clone()) {
                continue;
            }
            let element_reading = element_reading(&groupoid, x_size);
            survivors.push(Survivor {
                is_cp: true,
                is_canonical: canonical_set.contains(&delta),
                element_reading,
                groupoid,
            });
        }
    }

    let incomplete = (end < partitions.len()).then_some(Progress { processed: budgeted, next_partition: end });
    let survivors_match_canonical = incomplete.is_none() && start == 0 && seen == canonical_set;
    Ok(EnumerationReport {
        x_size,
        convention,
        partitions: partitions.len(),
        candidates: budgeted,
        survivors,
        canonical,
        incomplete,
        survivors_match_canonical,
    })
}

/// Like [`enumerate_partial`], but an exhausted budget is an error carrying
/// the progress marker.
pub fn enumerate_cpm_classical_structures(x_size: usize, opts: &EnumerationOptions) -> Result<EnumerationReport> {
    let report = enumerate_partial(x_size, opts)?;
    match report.incomplete {
        Some(p) => Err(Error::Budget { processed: p.processed, next_partition: p.next_partition }),
        None => Ok(report),
    }
}
