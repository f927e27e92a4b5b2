//! Finite probes of the stabilizer-side statements: subgroup closure, the
//! `(X^-1 X)^2` near-subgroup test, statistical perfectness of conjugacy-set
//! products, conjugate word depth, and the bounded-exponent closure probe.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::covering::{self, Side};
use crate::dimcmp::DichotomyReport;
use crate::error::{Error, Result};
use crate::group::Elem;
use crate::setalg::{self, Bounded, ConjVariant, FinSet};

/// Any probe outcome, tagged by probe kind for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "probe", rename_all = "kebab-case")]
pub enum ProbeReport {
    Closure(ClosureReport),
    NearSubgroup(NearSubgroupReport),
    Perfectness(PerfectnessReport),
    WordDepth(WordDepthReport),
    Freiman(FreimanReport),
    Dichotomy(DichotomyReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub input_size: usize,
    /// `None` when the iteration passed `max_size`.
    #[serde(skip)]
    pub closure: Option<FinSet>,
    pub size: usize,
    pub exceeded: bool,
    /// Iterations that changed the set.
    pub steps: usize,
}

/// Iterates `Y ↦ sym(Y) ∪ YY` from `X` to its fixed point, the subgroup `X` generates.
pub fn group_closure(x: &FinSet, max_size: usize) -> Result<ClosureReport> {
    if x.is_empty() {
        return Err(Error::Empty("closure input"));
    }
    let ctx = x.ctx();
    let mut y = x.clone();
    // Only products touching the last increment can be new.
    let mut delta = x.clone();
    let mut steps = 0;
    loop {
        let mut parts = vec![y.clone(), setalg::inverse_set(&delta)?, FinSet::identity(ctx)];
        for (a, b) in [(&y, &delta), (&delta, &y)] {
            match setalg::product_bounded(a, b, max_size)? {
                Bounded::Done(p) => parts.push(p),
                Bounded::Exceeded(n) => return Ok(exceeded(x, n, steps + 1)),
            }
        }
        let mut next = parts[0].clone();
        for p in &parts[1..] {
            next = next.union(p)?;
        }
        if next.len() == y.len() {
            return Ok(ClosureReport {
                input_size: x.len(),
                size: y.len(),
                closure: Some(y),
                exceeded: false,
                steps,
            });
        }
        steps += 1;
        if next.len() > max_size {
            return Ok(exceeded(x, next.len(), steps));
        }
        delta = next.difference(&y)?;
        y = next;
    }
}

fn exceeded(x: &FinSet, size: usize, steps: usize) -> ClosureReport {
    ClosureReport {
        input_size: x.len(),
        closure: None,
        size,
        exceeded: true,
        steps,
    }
}

/// The subgroup generated by `gens`, by breadth-first search over right
/// multiplication with `gens ∪ gens^-1`. Suited to large groups where the
/// squaring iteration of [`group_closure`] is too costly.
pub fn generated_subgroup(gens: &FinSet, max_size: usize) -> Result<FinSet> {
    let ctx = gens.ctx();
    let step = setalg::symmetrize(gens)?;
    let mut seen: FxHashSet<Elem> = FxHashSet::default();
    seen.insert(ctx.identity());
    let mut frontier = vec![ctx.identity()];
    while !frontier.is_empty() {
        let found: Vec<Elem> = frontier
            .par_iter()
            .map(|g| step.iter().map(|s| ctx.mul(g, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        frontier.clear();
        for e in found {
            if seen.insert(e.clone()) {
                frontier.push(e);
            }
        }
        if seen.len() > max_size {
            return Err(Error::BudgetExceeded {
                what: "generated subgroup size",
                limit: max_size as u64,
            });
        }
    }
    FinSet::new(ctx, seen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NearSubgroupVerdict {
    Subgroup,
    NotClosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearSubgroupReport {
    pub input_size: usize,
    pub verdict: NearSubgroupVerdict,
    /// `|S|` for `S = (X^-1 X)^2`.
    pub s_size: usize,
    #[serde(skip)]
    pub s: FinSet,
    /// Right cosets `Sx` meeting X (subgroup verdict only).
    pub cosets: Option<usize>,
    /// `|SS \ S|` (not-closed verdict only).
    pub defect: Option<usize>,
    /// A pair of S whose product leaves S, then the product.
    pub witness: Option<Vec<String>>,
    /// Whether `x^-1 S x ⊆ S` for every x in X.
    pub normalized_by_x: bool,
}

pub fn near_subgroup_probe(x: &FinSet) -> Result<NearSubgroupReport> {
    if x.is_empty() {
        return Err(Error::Empty("near-subgroup input"));
    }
    let ctx = x.ctx();
    let d = setalg::product(&setalg::inverse_set(x)?, x)?;
    let s = setalg::product(&d, &d)?;
    let idx = s.index();
    let ss = setalg::product(&s, &s)?;
    let defect = ss.len() - s.len();

    let normalized_by_x = x
        .as_slice()
        .par_iter()
        .map(|g| -> Result<bool> {
            for e in &s {
                if !idx.contains(&ctx.conjugate(e, g)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);

    if defect == 0 {
        // Coset Sx is named by its smallest element.
        let mut reps = FxHashSet::default();
        for g in x {
            let mut best: Option<Elem> = None;
            for e in &s {
                let p = ctx.mul(e, g)?;
                if best.as_ref().is_none_or(|b| p < *b) {
                    best = Some(p);
                }
            }
            reps.insert(best.expect("S nonempty"));
        }
        return Ok(NearSubgroupReport {
            input_size: x.len(),
            verdict: NearSubgroupVerdict::Subgroup,
            s_size: s.len(),
            s,
            cosets: Some(reps.len()),
            defect: None,
            witness: None,
            normalized_by_x,
        });
    }

    let witness = s
        .as_slice()
        .par_iter()
        .find_map_first(|a| {
            s.iter().find_map(|b| match ctx.mul(a, b) {
                Ok(p) if !idx.contains(&p) => Some(Ok(vec![ctx.format(a), ctx.format(b), ctx.format(&p)])),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
        })
        .transpose()?;
    Ok(NearSubgroupReport {
        input_size: x.len(),
        verdict: NearSubgroupVerdict::NotClosed,
        s_size: s.len(),
        s,
        cosets: None,
        defect: Some(defect),
        witness,
        normalized_by_x,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerfectnessReport {
    pub input_size: usize,
    pub l: usize,
    pub m: usize,
    pub seed: u64,
    pub exhaustive: bool,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    /// Distance from `p_hat` to the far end of the 95% Wilson interval; 0 when exhaustive.
    pub radius: f64,
    pub variant: ConjVariant,
}

impl PerfectnessReport {
    pub fn exact_fraction(&self) -> Ratio<u64> {
        Ratio::new(self.successes, self.trials.max(1))
    }
}

pub const EXHAUSTIVE_TUPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectnessOptions {
    pub variant: ConjVariant,
    /// Largest `|X|^l` visited exhaustively instead of sampled.
    pub exhaustive_limit: u64,
}

impl Default for PerfectnessOptions {
    fn default() -> Self {
        PerfectnessOptions {
            variant: ConjVariant::Plain,
            exhaustive_limit: EXHAUSTIVE_TUPLES,
        }
    }
}

/// Fraction of `l`-tuples `(a_1, …, a_l) ∈ X^l` with `|a_1^X ⋯ a_l^X| ≥ |X|/m`.
/// Every tuple is visited when `|X|^l ≤ 10^6`; otherwise `samples` tuples are
/// drawn, tuple `i` from its own stream of the seeded generator.
pub fn perfectness_stat(x: &FinSet, l: usize, m: usize, samples: u64, seed: u64) -> Result<PerfectnessReport> {
    perfectness_stat_with(x, l, m, samples, seed, &PerfectnessOptions::default())
}

pub fn perfectness_stat_with(
    x: &FinSet,
    l: usize,
    m: usize,
    samples: u64,
    seed: u64,
    opts: &PerfectnessOptions,
) -> Result<PerfectnessReport> {
    let variant = opts.variant;
    if l == 0 || m == 0 || samples == 0 {
        return Err(Error::invalid("l, m and samples must be >= 1"));
    }
    if x.is_empty() {
        return Err(Error::Empty("perfectness input"));
    }
    let n = x.len();
    let classes: Vec<FinSet> = x
        .as_slice()
        .par_iter()
        .map(|a| setalg::conj_set_variant(a, x, variant))
        .collect::<Result<_>>()?;
    let total = (n as u64).checked_pow(l as u32).filter(|&t| t <= opts.exhaustive_limit);
    let exhaustive = total.is_some();
    let trials = total.unwrap_or(samples);

    let success = |t: u64| -> Result<bool> {
        let idx: Vec<usize> = match total {
            Some(_) => {
                let mut rest = t;
                (0..l)
                    .map(|_| {
                        let i = (rest % n as u64) as usize;
                        rest /= n as u64;
                        i
                    })
                    .collect()
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                (0..l).map(|_| rng.gen_range(0..n)).collect()
            }
        };
        let picked: Vec<FinSet> = idx.iter().map(|&i| classes[i].clone()).collect();
        let r = setalg::conj_prod_of_classes(&picked, n)?;
        Ok(r.capped || (r.size as u128) * (m as u128) >= n as u128)
    };
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| success(t).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let p_hat = successes as f64 / trials as f64;
    let radius = if exhaustive {
        0.0
    } else {
        wilson_radius(successes, trials)
    };
    Ok(PerfectnessReport {
        input_size: n,
        l,
        m,
        seed,
        exhaustive,
        trials,
        successes,
        p_hat,
        radius,
        variant,
    })
}

/// Largest distance from `k/n` to an endpoint of the 95% Wilson score interval.
pub fn wilson_radius(k: u64, n: u64) -> f64 {
    const Z: f64 = 1.959963984540054;
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center + half - p).abs().max((p - (center - half)).abs())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordDepthReport {
    pub input_size: usize,
    pub a_count: usize,
    /// `None` stands for infinity: no `n ≤ n_max` works.
    pub depth: Option<usize>,
    pub b_elements: Vec<String>,
    /// Whether the `b_i` were searched exhaustively or chosen greedily.
    pub exact_b_search: bool,
}

/// Largest number of b-subsets searched exhaustively.
pub const EXACT_B_SUBSETS: u128 = 10_000;
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

/// Smallest `n ≤ n_max` with `X ⊆ W_n`, where `W_n` holds the products of at
/// most `n` letters from `a_1^X ∪ … ∪ a_l^X ∪ {b_1, …, b_l}` (so `1 ∈ W_1`)
/// and the `b_i` range over X. The b-set has `min(l, |X|)` elements; it is
/// searched exhaustively when there are at most 10^4 candidates, otherwise
/// built greedily from the first elements of X the words do not reach.
pub fn word_depth(x: &FinSet, a_list: &[Elem], n_max: usize, cap: usize) -> Result<WordDepthReport> {
    if a_list.is_empty() {
        return Err(Error::Empty("conjugate list"));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max must be >= 1"));
    }
    if x.is_empty() {
        return Err(Error::Empty("word-depth input"));
    }
    let ctx = x.ctx();
    let mut conj = FinSet::new(ctx, [])?;
    for a in a_list {
        conj = conj.union(&setalg::conj_set(a, x)?)?;
    }
    let l = a_list.len().min(x.len());
    let subsets = binomial(x.len() as u128, l as u128);
    let xs = x.as_slice();

    if subsets <= EXACT_B_SUBSETS {
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut pick: Vec<usize> = (0..l).collect();
        loop {
            let limit = best.as_ref().map_or(n_max, |b| b.0 - 1);
            if limit >= 1 {
                let letters = with_bs(&conj, xs, &pick)?;
                if let Some(d) = depth_for(x, &letters, limit, cap)? {
                    best = Some((d, pick.clone()));
                    if d == 1 {
                        break;
                    }
                }
            }
            if !next_combination(&mut pick, xs.len()) {
                break;
            }
        }
        return Ok(WordDepthReport {
            input_size: x.len(),
            a_count: a_list.len(),
            depth: best.as_ref().map(|b| b.0),
            b_elements: best
                .map(|b| b.1.iter().map(|&i| ctx.format(&xs[i])).collect())
                .unwrap_or_default(),
            exact_b_search: true,
        });
    }

    // Greedy: each b is the first element of X outside the current words.
    let mut pick = Vec::new();
    for _ in 0..l {
        let letters = with_bs(&conj, xs, &pick)?;
        let words = words_upto(&letters, n_max, cap, None)?;
        match xs.iter().position(|e| !words.contains(e)) {
            Some(i) => pick.push(i),
            None => break,
        }
    }
    let letters = with_bs(&conj, xs, &pick)?;
    Ok(WordDepthReport {
        input_size: x.len(),
        a_count: a_list.len(),
        depth: depth_for(x, &letters, n_max, cap)?,
        b_elements: pick.iter().map(|&i| ctx.format(&xs[i])).collect(),
        exact_b_search: false,
    })
}

fn with_bs(conj: &FinSet, xs: &[Elem], pick: &[usize]) -> Result<FinSet> {
    let bs = FinSet::new(conj.ctx(), pick.iter().map(|&i| xs[i].clone()))?;
    conj.union(&bs)?.union(&FinSet::identity(conj.ctx()))
}

/// `W_n` for `n = n_max`, or stopping early once `target ⊆ W_n`; returns the words.
fn words_upto(
    letters: &FinSet,
    n_max: usize,
    cap: usize,
    target: Option<(&FinSet, &mut Option<usize>)>,
) -> Result<FinSet> {
    let mut words = letters.clone();
    let mut frontier = letters.clone();
    let mut target = target;
    for n in 1..=n_max {
        if let Some((t, hit)) = target.as_mut() {
            if t.is_subset(&words) {
                **hit = Some(n);
                return Ok(words);
            }
        }
        if n == n_max || frontier.is_empty() {
            break;
        }
        let grown = match setalg::product_bounded(&frontier, letters, cap)? {
            Bounded::Done(p) => p,
            Bounded::Exceeded(_) => {
                return Err(Error::BudgetExceeded {
                    what: "word set size",
                    limit: cap as u64,
                })
            }
        };
        frontier = grown.difference(&words)?;
        words = words.union(&frontier)?;
        if words.len() > cap {
            return Err(Error::BudgetExceeded {
                what: "word set size",
                limit: cap as u64,
            });
        }
    }
    Ok(words)
}

fn depth_for(x: &FinSet, letters: &FinSet, n_max: usize, cap: usize) -> Result<Option<usize>> {
    let mut hit = None;
    words_upto(letters, n_max, cap, Some((x, &mut hit)))?;
    Ok(hit)
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreimanVerdict {
    Stabilized,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreimanReport {
    pub input_size: usize,
    pub exponent: u64,
    pub verdict: FreimanVerdict,
    #[serde(skip)]
    pub subgroup: Option<FinSet>,
    pub subgroup_size: Option<usize>,
    /// Translates of S covering X, and of X covering S.
    pub x_by_s: Option<usize>,
    pub s_by_x: Option<usize>,
    pub e: Option<usize>,
}

/// Closes `(X^-1 X)^2` under products (at most `e_budget·|X|` elements) and
/// measures how commensurable the resulting subgroup is with X.
pub fn freiman_exponent_probe(x: &FinSet, e_budget: usize) -> Result<FreimanReport> {
    let ctx = x.ctx();
    let exponent = ctx
        .exponent()
        .ok_or_else(|| Error::Unsupported("the group context declares no exponent".into()))?;
    let d = setalg::product(&setalg::inverse_set(x)?, x)?;
    let s = setalg::product(&d, &d)?;
    let closure = group_closure(&s, e_budget.saturating_mul(x.len()))?;
    let Some(sub) = closure.closure else {
        return Ok(FreimanReport {
            input_size: x.len(),
            exponent,
            verdict: FreimanVerdict::BudgetExceeded,
            subgroup: None,
            subgroup_size: None,
            x_by_s: None,
            s_by_x: None,
            e: None,
        });
    };
    let x_by_s = covering::greedy_cover(x, &sub, Side::Right, None)?.map(|c| c.count());
    let s_by_x = covering::greedy_cover(&sub, x, Side::Right, None)?.map(|c| c.count());
    let e = match (x_by_s, s_by_x) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    Ok(FreimanReport {
        input_size: x.len(),
        exponent,
        verdict: FreimanVerdict::Stabilized,
        subgroup_size: Some(sub.len()),
        subgroup: Some(sub),
        x_by_s,
        s_by_x,
        e,
    })
}

#[cfg(test)]
mod tests;
