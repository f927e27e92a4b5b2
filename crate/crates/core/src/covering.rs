//! Translate covers: greedy covers of a target by translates of a tile, maximal
//! disjoint translate families, the Ruzsa cover built from them, and the
//! approximate-group constant bounds.
//!
//! All greedy choices break ties by canonical element order, so the output is
//! a function of the input sets alone.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_rational::Ratio;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, GroupCtx};
use crate::setalg::{self, FinSet};

/// Which side the translating element multiplies on. `Right` means `tile·t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    #[default]
    Right,
}

impl Side {
    fn apply(self, ctx: &GroupCtx, s: &Elem, t: &Elem) -> Result<Elem> {
        match self {
            Side::Right => ctx.mul(s, t),
            Side::Left => ctx.mul(t, s),
        }
    }

    /// All `t` for which the translate of `tile` by `t` meets `target`.
    fn candidates(self, tile: &FinSet, target: &FinSet) -> Result<FinSet> {
        let ti = setalg::inverse_set(tile)?;
        match self {
            Side::Right => setalg::product(&ti, target),
            Side::Left => setalg::product(target, &ti),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    pub translates: Vec<Elem>,
    pub tile: FinSet,
    pub target: FinSet,
    pub side: Side,
    /// `|ZW|/|Z|` for a Ruzsa cover; absent for plain greedy covers.
    pub certified_bound: Option<Ratio<u64>>,
}

impl CoverResult {
    pub fn count(&self) -> usize {
        self.translates.len()
    }

    pub fn translate_literals(&self) -> Vec<String> {
        let ctx = self.tile.ctx();
        self.translates.iter().map(|t| ctx.format(t)).collect()
    }

    /// Re-checks that the translates cover the target; returns the first uncovered element.
    pub fn uncovered(&self) -> Result<Option<Elem>> {
        first_uncovered(&self.target, &self.tile, &self.translates, self.side)
    }
}

fn first_uncovered(target: &FinSet, tile: &FinSet, translates: &[Elem], side: Side) -> Result<Option<Elem>> {
    let ctx = tile.ctx();
    let mut covered = FxHashSet::default();
    for t in translates {
        for s in tile {
            covered.insert(side.apply(ctx, s, t)?);
        }
    }
    Ok(target.iter().find(|e| !covered.contains(e)).cloned())
}

fn nonempty_pair(a: &FinSet, b: &FinSet) -> Result<()> {
    if a.ctx() != b.ctx() {
        return Err(Error::CtxMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("cover operand"));
    }
    Ok(())
}

/// Greedy max-coverage cover of `target` by translates of `tile`.
///
/// At each step the translate covering the most still-uncovered target
/// elements wins, ties going to the smallest translate in canonical order.
/// Returns `Ok(None)` once more than `budget` translates would be needed.
pub fn greedy_cover(target: &FinSet, tile: &FinSet, side: Side, budget: Option<usize>) -> Result<Option<CoverResult>> {
    nonempty_pair(target, tile)?;
    let ctx = tile.ctx();
    let tinv = setalg::inverse_set(tile)?;
    // The translates through `u` are `s^-1 u` (right) or `u s^-1` (left).
    let through = |s: &Elem, u: &Elem| match side {
        Side::Right => ctx.mul(s, u),
        Side::Left => ctx.mul(u, s),
    };

    // gain(t) = |tile·t ∩ target|, counted from the target side.
    let counts = target
        .as_slice()
        .par_chunks(256)
        .try_fold(FxHashMap::<Elem, u32>::default, |mut acc, chunk| {
            for u in chunk {
                for s in &tinv {
                    *acc.entry(through(s, u)?).or_default() += 1;
                }
            }
            Ok(acc)
        })
        .try_reduce(FxHashMap::default, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, v) in small {
                *big.entry(k).or_default() += v;
            }
            Ok(big)
        })?;
    let mut cands: Vec<(Elem, u32)> = counts.into_iter().collect();
    cands.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut gains: Vec<u32> = cands.iter().map(|c| c.1).collect();
    let cands: Vec<Elem> = cands.into_iter().map(|c| c.0).collect();
    let cand_index: FxHashMap<&Elem, u32> = cands.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
    let target_index: FxHashMap<&Elem, u32> = target.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();

    let mut heap: BinaryHeap<(u32, Reverse<usize>)> = gains.iter().enumerate().map(|(i, &g)| (g, Reverse(i))).collect();
    let mut covered = vec![false; target.len()];
    let mut remaining = target.len();
    let mut translates = Vec::new();
    // Gains only shrink, so an entry whose key is still current beats every
    // other entry in the heap, ties included.
    while remaining > 0 {
        let (g, Reverse(i)) = heap
            .pop()
            .ok_or_else(|| Error::Invariant("greedy cover ran out of candidates".into()))?;
        if gains[i] != g {
            if gains[i] > 0 {
                heap.push((gains[i], Reverse(i)));
            }
            continue;
        }
        if budget.is_some_and(|b| translates.len() >= b) {
            return Ok(None);
        }
        let t = &cands[i];
        for s in tile {
            let u = side.apply(ctx, s, t)?;
            let Some(&j) = target_index.get(&u) else { continue };
            if std::mem::replace(&mut covered[j as usize], true) {
                continue;
            }
            remaining -= 1;
            for s2 in &tinv {
                let k = cand_index[&through(s2, &u)?];
                gains[k as usize] -= 1;
            }
        }
        translates.push(t.clone());
    }
    Ok(Some(CoverResult {
        translates,
        tile: tile.clone(),
        target: target.clone(),
        side,
        certified_bound: None,
    }))
}

/// A maximal family `a_1, …, a_r` in `w` with the translates `z·a_i` pairwise
/// disjoint, chosen greedily in canonical order of `w`.
pub fn disjoint_translates(z: &FinSet, w: &FinSet) -> Result<Vec<Elem>> {
    disjoint_translates_on(z, w, Side::Right)
}

pub fn disjoint_translates_on(z: &FinSet, w: &FinSet, side: Side) -> Result<Vec<Elem>> {
    nonempty_pair(z, w)?;
    let ctx = z.ctx();
    let mut used: FxHashSet<Elem> = FxHashSet::default();
    let mut chosen = Vec::new();
    let mut block = Vec::with_capacity(z.len());
    for a in w {
        block.clear();
        for s in z {
            block.push(side.apply(ctx, s, a)?);
        }
        if block.iter().all(|e| !used.contains(e)) {
            used.extend(block.drain(..));
            chosen.push(a.clone());
        }
    }
    Ok(chosen)
}

/// Covers `w` by translates of `Z^-1 Z` at the points of a maximal disjoint
/// family; the translate count is certified by `|ZW|/|Z|`.
pub fn ruzsa_cover(w: &FinSet, z: &FinSet) -> Result<CoverResult> {
    ruzsa_cover_on(w, z, Side::Right)
}

pub fn ruzsa_cover_on(w: &FinSet, z: &FinSet, side: Side) -> Result<CoverResult> {
    nonempty_pair(w, z)?;
    let translates = disjoint_translates_on(z, w, side)?;
    let zi = setalg::inverse_set(z)?;
    let (tile, zw) = match side {
        Side::Right => (setalg::product(&zi, z)?, setalg::product(z, w)?),
        Side::Left => (setalg::product(z, &zi)?, setalg::product(w, z)?),
    };
    let bound = Ratio::new(zw.len() as u64, z.len() as u64);
    let cover = CoverResult {
        translates,
        tile,
        target: w.clone(),
        side,
        certified_bound: Some(bound),
    };
    if let Some(e) = cover.uncovered()? {
        return Err(Error::Invariant(format!("Ruzsa cover misses {}", w.ctx().format(&e))));
    }
    if Ratio::from_integer(cover.count() as u64) > bound {
        return Err(Error::Invariant(format!(
            "Ruzsa cover uses {} translates, above the bound {bound}",
            cover.count()
        )));
    }
    Ok(cover)
}

/// Greedy translate counts `(A by B, B by A)`, `None` standing for a count past `budget`.
pub fn commensurability(a: &FinSet, b: &FinSet, budget: usize) -> Result<(Option<usize>, Option<usize>)> {
    let ab = greedy_cover(a, b, Side::Right, Some(budget))?.map(|c| c.count());
    let ba = greedy_cover(b, a, Side::Right, Some(budget))?.map(|c| c.count());
    Ok((ab, ba))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxConstant {
    /// Greedy number of right translates of X covering XX.
    pub k_upper: usize,
    /// `|XX|/|X|`.
    pub k_lower: Ratio<u64>,
}

pub fn approx_constant(x: &FinSet) -> Result<ApproxConstant> {
    x.require_symmetric()?;
    let xx = setalg::product(x, x)?;
    let cover = greedy_cover(&xx, x, Side::Right, None)?.expect("uncapped");
    Ok(ApproxConstant {
        k_upper: cover.count(),
        k_lower: Ratio::new(xx.len() as u64, x.len() as u64),
    })
}

pub const EXACT_COVER_MAX_TILE: usize = 64;

/// Minimum number of translates of `tile` covering `target`, by exhaustive
/// search. Limited to tiles of at most 64 elements.
pub fn exact_min_cover(target: &FinSet, tile: &FinSet, side: Side) -> Result<CoverResult> {
    nonempty_pair(target, tile)?;
    if tile.len() > EXACT_COVER_MAX_TILE || target.len() > EXACT_COVER_MAX_TILE * EXACT_COVER_MAX_TILE {
        return Err(Error::BudgetExceeded {
            what: "exact cover size limit",
            limit: EXACT_COVER_MAX_TILE as u64,
        });
    }
    let ctx = tile.ctx();
    let cands = side.candidates(tile, target)?;
    let index: FxHashMap<&Elem, usize> = target.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let words = target.len().div_ceil(64);
    let masks: Vec<Vec<u64>> = cands
        .iter()
        .map(|t| {
            let mut m = vec![0u64; words];
            for s in tile {
                if let Some(&i) = index.get(&side.apply(ctx, s, t)?) {
                    m[i / 64] |= 1 << (i % 64);
                }
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    // For each target element, the candidates covering it.
    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); target.len()];
    for (c, m) in masks.iter().enumerate() {
        for (i, list) in covering.iter_mut().enumerate() {
            if m[i / 64] >> (i % 64) & 1 == 1 {
                list.push(c);
            }
        }
    }

    let upper = greedy_cover(target, tile, side, None)?.expect("uncapped");
    let lower = target.len().div_ceil(tile.len());
    for k in lower..upper.count() {
        let mut chosen = Vec::new();
        if search(&masks, &covering, vec![0; words], target.len(), k, &mut chosen) {
            return Ok(CoverResult {
                translates: chosen.iter().map(|&c| cands.as_slice()[c].clone()).collect(),
                tile: tile.clone(),
                target: target.clone(),
                side,
                certified_bound: None,
            });
        }
    }
    Ok(upper)
}

fn search(
    masks: &[Vec<u64>],
    covering: &[Vec<usize>],
    cov: Vec<u64>,
    n: usize,
    left: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    let first = (0..n).find(|&i| cov[i / 64] >> (i % 64) & 1 == 0);
    let Some(u) = first else { return true };
    if left == 0 {
        return false;
    }
    for &c in &covering[u] {
        let next: Vec<u64> = cov.iter().zip(&masks[c]).map(|(a, b)| a | b).collect();
        chosen.push(c);
        if search(masks, covering, next, n, left - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}
