//! Exact finite-set algebra over a [`GroupCtx`]: product sets, inverses,
//! powers, commutator and conjugacy sets, and the growth ratios built on them.
//!
//! Product sets split the left operand into blocks, enumerate each block's
//! pairwise products into a hash set, and merge the deduplicated blocks. The
//! result is a set, so it does not depend on the block size or on the thread
//! schedule.

mod finset;

use num_rational::Ratio;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Elem;

pub use finset::FinSet;

const DEFAULT_BLOCK: usize = 64;

/// Outcome of a size-capped set computation.
#[derive(Debug, Clone)]
pub enum Bounded {
    Done(FinSet),
    /// The cap was exceeded; carries a lower bound on the true size (> cap).
    Exceeded(usize),
}

fn merge(mut a: FxHashSet<Elem>, mut b: FxHashSet<Elem>) -> FxHashSet<Elem> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    a.extend(b);
    a
}

/// Folds `f(x, y)` over all pairs, with a left-operand block length and an optional cap.
fn pairwise(
    a: &FinSet,
    b: &FinSet,
    block: usize,
    cap: Option<usize>,
    f: impl Fn(&Elem, &Elem) -> Result<Elem> + Sync,
) -> Result<Bounded> {
    a.same_ctx(b)?;
    let cap = cap.unwrap_or(usize::MAX);
    let folded = a
        .as_slice()
        .par_chunks(block.max(1))
        .try_fold(FxHashSet::default, |mut acc, chunk| {
            for x in chunk {
                for y in b {
                    acc.insert(f(x, y)?);
                }
                if acc.len() > cap {
                    return Err(Error::BudgetExceeded {
                        what: "product set size",
                        limit: acc.len() as u64,
                    });
                }
            }
            Ok(acc)
        })
        .try_reduce(FxHashSet::default, |x, y| {
            let m = merge(x, y);
            if m.len() > cap {
                return Err(Error::BudgetExceeded {
                    what: "product set size",
                    limit: m.len() as u64,
                });
            }
            Ok(m)
        });
    match folded {
        Ok(set) => Ok(Bounded::Done(FinSet::from_trusted(a.ctx(), set.into_iter().collect()))),
        Err(Error::BudgetExceeded { limit, .. }) if limit as usize > cap => Ok(Bounded::Exceeded(limit as usize)),
        Err(e) => Err(e),
    }
}

fn nonempty(x: &FinSet, what: &'static str) -> Result<()> {
    if x.is_empty() {
        Err(Error::Empty(what))
    } else {
        Ok(())
    }
}

/// `AB = {ab : a in A, b in B}`.
pub fn product(a: &FinSet, b: &FinSet) -> Result<FinSet> {
    product_blocked(a, b, DEFAULT_BLOCK)
}

pub(crate) fn product_blocked(a: &FinSet, b: &FinSet, block: usize) -> Result<FinSet> {
    nonempty(a, "product operand")?;
    nonempty(b, "product operand")?;
    let ctx = a.ctx().clone();
    match pairwise(a, b, block, None, |x, y| ctx.mul(x, y))? {
        Bounded::Done(s) => Ok(s),
        Bounded::Exceeded(_) => unreachable!("uncapped"),
    }
}

/// Like [`product`] but stops once the result would exceed `cap` elements.
pub fn product_bounded(a: &FinSet, b: &FinSet, cap: usize) -> Result<Bounded> {
    nonempty(a, "product operand")?;
    nonempty(b, "product operand")?;
    let ctx = a.ctx().clone();
    pairwise(a, b, DEFAULT_BLOCK, Some(cap), |x, y| ctx.mul(x, y))
}

/// [`product`] guarded by a pair budget: errors when `|A||B|` exceeds `max_pairs`.
pub fn product_within(a: &FinSet, b: &FinSet, max_pairs: u64) -> Result<FinSet> {
    let pairs = (a.len() as u64).saturating_mul(b.len() as u64);
    if pairs > max_pairs {
        return Err(Error::BudgetExceeded {
            what: "product pair budget",
            limit: max_pairs,
        });
    }
    product(a, b)
}

pub fn inverse_set(a: &FinSet) -> Result<FinSet> {
    let ctx = a.ctx();
    let v = a.iter().map(|x| ctx.inv(x)).collect::<Result<Vec<_>>>()?;
    Ok(FinSet::from_trusted(ctx, v))
}

/// `X ∪ X^-1 ∪ {1}`.
pub fn symmetrize(x: &FinSet) -> Result<FinSet> {
    nonempty(x, "symmetrize input")?;
    let ctx = x.ctx();
    let mut v = x.as_slice().to_vec();
    for e in x {
        v.push(ctx.inv(e)?);
    }
    v.push(ctx.identity());
    Ok(FinSet::from_trusted(ctx, v))
}

/// The n-fold product `X·X·…·X`.
pub fn power(x: &FinSet, n: usize) -> Result<FinSet> {
    if n == 0 {
        return Err(Error::invalid("set power needs n >= 1"));
    }
    Ok(powers(x, n)?.pop().expect("n >= 1"))
}

/// `[X, X^2, …, X^n]`. When `1 ∈ X` each step multiplies only the newest
/// shell, as `X^(k+1) = X^k ∪ (X^k \ X^(k-1)) X`.
pub fn powers(x: &FinSet, n: usize) -> Result<Vec<FinSet>> {
    if n == 0 {
        return Err(Error::invalid("set power needs n >= 1"));
    }
    nonempty(x, "power base")?;
    let mut out = vec![x.clone()];
    let with_one = x.contains_identity();
    // Shell of X^1 over X^0 = {1}.
    let mut shell = x.clone();
    for _ in 1..n {
        let last = out.last().expect("nonempty");
        let next = if with_one {
            if shell.is_empty() {
                last.clone()
            } else {
                last.union(&product(&shell, x)?)?
            }
        } else {
            product(last, x)?
        };
        if with_one {
            shell = next.difference(last)?;
        }
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthStatistic {
    /// `|X X^-1 X| / |X|`.
    Tripling,
    /// `|XX| / |X|`.
    Doubling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRatio {
    pub statistic: GrowthStatistic,
    pub size: usize,
    /// Size of `X X^-1 X` (tripling) or `XX` (doubling).
    pub numerator: usize,
    pub ratio: Ratio<u64>,
    /// `|X^3|` when X is symmetric, where it coincides with `|X X^-1 X|`.
    pub cube: Option<usize>,
}

impl GrowthRatio {
    pub fn as_f64(&self) -> f64 {
        *self.ratio.numer() as f64 / *self.ratio.denom() as f64
    }
}

pub fn tripling(x: &FinSet) -> Result<GrowthRatio> {
    growth_ratio(x, GrowthStatistic::Tripling)
}

pub fn growth_ratio(x: &FinSet, statistic: GrowthStatistic) -> Result<GrowthRatio> {
    nonempty(x, "growth ratio input")?;
    let (numerator, cube) = match statistic {
        GrowthStatistic::Tripling => {
            let xi = inverse_set(x)?;
            let n = product(&product(x, &xi)?, x)?.len();
            let cube = if xi == *x { Some(n) } else { None };
            (n, cube)
        }
        GrowthStatistic::Doubling => (product(x, x)?.len(), None),
    };
    Ok(GrowthRatio {
        statistic,
        size: x.len(),
        numerator,
        ratio: Ratio::new(numerator as u64, x.len() as u64),
        cube,
    })
}

/// `[A, B] = {a b a^-1 b^-1}`.
pub fn commutator_set(a: &FinSet, b: &FinSet) -> Result<FinSet> {
    nonempty(a, "commutator operand")?;
    nonempty(b, "commutator operand")?;
    let ctx = a.ctx().clone();
    match pairwise(a, b, DEFAULT_BLOCK, None, |x, y| ctx.commutator(x, y))? {
        Bounded::Done(s) => Ok(s),
        Bounded::Exceeded(_) => unreachable!("uncapped"),
    }
}

/// `a^X = {x^-1 a x : x in X}`.
pub fn conj_set(a: &Elem, x: &FinSet) -> Result<FinSet> {
    let ctx = x.ctx();
    ctx.validate(a)?;
    let v = x.iter().map(|g| ctx.conjugate(a, g)).collect::<Result<Vec<_>>>()?;
    Ok(FinSet::from_trusted(ctx, v))
}

/// Which conjugacy set stands in for `a^X` in product-of-classes statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjVariant {
    #[default]
    Plain,
    /// `a^X ∪ (a^-1)^X`.
    WithInverse,
}

pub fn conj_set_variant(a: &Elem, x: &FinSet, variant: ConjVariant) -> Result<FinSet> {
    let plain = conj_set(a, x)?;
    match variant {
        ConjVariant::Plain => Ok(plain),
        ConjVariant::WithInverse => plain.union(&conj_set(&x.ctx().inv(a)?, x)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjProductSize {
    pub size: usize,
    /// The running product passed the cap; `size` is then only a lower bound (> cap).
    pub capped: bool,
}

pub const DEFAULT_CONJ_CAP: usize = 10_000_000;

/// `|a_1^X a_2^X ⋯ a_l^X|`, built left to right and abandoned once an
/// intermediate product exceeds `cap`.
pub fn conj_prod_size(a_list: &[Elem], x: &FinSet, cap: usize) -> Result<ConjProductSize> {
    conj_prod_size_variant(a_list, x, cap, ConjVariant::Plain)
}

pub fn conj_prod_size_variant(
    a_list: &[Elem],
    x: &FinSet,
    cap: usize,
    variant: ConjVariant,
) -> Result<ConjProductSize> {
    let classes = a_list
        .iter()
        .map(|a| conj_set_variant(a, x, variant))
        .collect::<Result<Vec<_>>>()?;
    conj_prod_of_classes(&classes, cap)
}

/// Same as [`conj_prod_size`] on precomputed conjugacy sets.
pub fn conj_prod_of_classes(classes: &[FinSet], cap: usize) -> Result<ConjProductSize> {
    if cap == 0 {
        return Err(Error::invalid("cap must be >= 1"));
    }
    let (first, rest) = classes.split_first().ok_or(Error::Empty("conjugate list"))?;
    if first.len() > cap {
        return Ok(ConjProductSize {
            size: first.len(),
            capped: true,
        });
    }
    let mut acc = first.clone();
    for c in rest {
        match product_bounded(&acc, c, cap)? {
            Bounded::Done(s) => acc = s,
            Bounded::Exceeded(n) => return Ok(ConjProductSize { size: n, capped: true }),
        }
    }
    Ok(ConjProductSize {
        size: acc.len(),
        capped: false,
    })
}

#[cfg(test)]
mod tests;
