//! Towers `X_N ⊆ … ⊆ X_1` built by the fourth-power recursion
//! `X_{n+1} = {x ∈ X_1 : x^4 ∈ X_n}`, their verification against the seven
//! tower properties, and a heuristic search for good seeds `X_1`.
//!
//! Property numbering:
//! 1. `1 ∈ X_n = X_n^-1`
//! 2. `X_{n+1} X_{n+1} ⊆ X_n`
//! 3. `X_n` is covered by `c` right translates of `X_{n+1}`
//! 4. `a X_{n+1} a^-1 ⊆ X_n` for `a ∈ X_1`
//! 5. `[X_n, X_m] ⊆ X_k` for `k ≤ N`, `k < n + m`
//! 6. the recursion itself
//! 7. `x, y ∈ X_2`, `x^2 = y^2` implies `x y^-1 ∈ X_N`
//!
//! Properties 2, 4 and 5 range over `1 ≤ n, m < N`.
//!
//! Commutator results are stored as depths: the largest `k` with
//! `[X_n, X_m] ⊆ X_k`. A depth entry passes for a tower truncated at `M`
//! levels iff it reaches `min(M, n + m - 1)`; this is how `verified_depth`
//! is read off a single report.

use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::covering::{self, Side};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupCtx};
use crate::setalg::{self, FinSet};

/// Builds up to `n` levels from the seed. Stops before the first level equal
/// to `{1}` (unless the seed itself is `{1}`); once a level repeats, the
/// remaining levels are copies.
pub fn build_tower(x1: &FinSet, n: usize) -> Result<Vec<FinSet>> {
    if n == 0 {
        return Err(Error::invalid("tower depth must be >= 1"));
    }
    x1.require_symmetric()?;
    let ctx = x1.ctx();
    let fourth: Vec<Elem> = x1.as_slice().par_iter().map(|x| ctx.pow(x, 4)).collect::<Result<_>>()?;
    let mut levels = vec![x1.clone()];
    while levels.len() < n {
        let prev = levels.last().expect("nonempty");
        let idx = prev.index();
        let next: Vec<Elem> = x1
            .iter()
            .zip(&fourth)
            .filter(|(_, f)| idx.contains(f))
            .map(|(x, _)| x.clone())
            .collect();
        let next = FinSet::new(ctx, next)?;
        if next == *prev {
            while levels.len() < n {
                levels.push(next.clone());
            }
            break;
        }
        if next.len() == 1 && next.contains_identity() {
            break;
        }
        levels.push(next);
    }
    Ok(levels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub property: u8,
    /// Level indices (1-based) the failing check referred to.
    pub levels: Vec<usize>,
    /// Element literals: the inputs, then the offending result.
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub property: u8,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Verdict for the full tower.
    pub pass: bool,
    /// For property 5: the commutator depth, floored at `max(n, m) - 1`. For
    /// property 7: the smallest level index holding every `x y^-1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commensurability {
    /// Greedy right translates of `X_1` covering `X^-1 X`.
    pub derived_by_x1: Option<usize>,
    /// Greedy right translates of `X^-1 X` covering `X_1`.
    pub x1_by_derived: Option<usize>,
}

impl Commensurability {
    pub fn e(&self) -> Option<usize> {
        Some(self.derived_by_x1?.max(self.x1_by_derived?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    #[serde(skip)]
    pub levels: Vec<FinSet>,
    pub backend: String,
    pub n: usize,
    pub level_sizes: Vec<usize>,
    /// Largest `M ≤ N` such that the first `M` levels pass every property.
    pub verified_depth: usize,
    /// Max over `n` of the greedy count of translates of `X_{n+1}` covering `X_n`.
    pub c: usize,
    pub cover_counts: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commensurability: Option<Commensurability>,
    /// Whether `X_1 ⊆ (X^-1 X)^2`, when a source set was given and the product fit the budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1_in_derived_square: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nesting_violation: Option<Witness>,
    pub properties: Vec<PropertyEntry>,
}

impl TowerReport {
    pub fn e(&self) -> Option<usize> {
        self.commensurability.as_ref().and_then(Commensurability::e)
    }

    pub fn entries(&self, property: u8) -> impl Iterator<Item = &PropertyEntry> {
        self.properties.iter().filter(move |p| p.property == property)
    }

    /// Whether every entry of `property` passes for the full tower.
    pub fn passes(&self, property: u8) -> bool {
        self.entries(property).all(|p| p.pass)
    }

    pub fn pass_counts(&self) -> [(usize, usize); 7] {
        let mut out = [(0, 0); 7];
        for p in &self.properties {
            let slot = &mut out[(p.property - 1) as usize];
            slot.1 += 1;
            slot.0 += usize::from(p.pass);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Pairs probed at random before an exhaustive scan.
    pub sample: usize,
    pub seed: u64,
    /// The set `X` the seed came from; enables `e` and the `(X^-1 X)^2` flag.
    pub source: Option<FinSet>,
    /// Skip products whose pair count exceeds this.
    pub pair_budget: u64,
    /// Translate budget for the commensurability covers.
    pub cover_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            sample: 4096,
            seed: 0,
            source: None,
            pair_budget: 20_000_000,
            cover_budget: 10_000,
        }
    }
}

pub fn verify_tower(levels: &[FinSet]) -> Result<TowerReport> {
    verify_tower_with(levels, &VerifyOptions::default())
}

struct Tower<'a> {
    ctx: &'a GroupCtx,
    sets: &'a [FinSet],
    index: Vec<FxHashSet<&'a Elem>>,
    sample: usize,
}

struct Scan {
    depth: usize,
    witness: Option<[Elem; 3]>,
}

impl<'a> Tower<'a> {
    fn new(sets: &'a [FinSet], sample: usize) -> Self {
        Tower {
            ctx: sets[0].ctx(),
            sets,
            index: sets.iter().map(FinSet::index).collect(),
            sample,
        }
    }

    fn n(&self) -> usize {
        self.sets.len()
    }

    fn level(&self, k: usize) -> &'a FinSet {
        &self.sets[k - 1]
    }

    /// Largest `k` with `e ∈ X_k`, 0 if none; relies on nesting.
    fn depth(&self, e: &Elem) -> usize {
        let (mut lo, mut hi) = (0, self.n());
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.index[mid - 1].contains(e) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// Min of `depth(op(x, y))` over `outer × inner`, capped at `target` and
    /// floored at `floor`. Values at or below the floor all mean the same
    /// failure, so the scan may stop as soon as one shows up; flooring keeps
    /// the reported number independent of where it stopped.
    fn scan(
        &self,
        outer: &FinSet,
        inner: &FinSet,
        op: impl Fn(&Elem, &Elem) -> Result<Elem> + Sync,
        target: usize,
        floor: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Scan> {
        let (xs, ys) = (outer.as_slice(), inner.as_slice());
        let mut t = target;
        let mut witness = None;
        for _ in 0..self.sample_size(xs.len(), ys.len()) {
            if t <= floor {
                break;
            }
            let x = &xs[rng.gen_range(0..xs.len())];
            let y = &ys[rng.gen_range(0..ys.len())];
            let p = op(x, y)?;
            let d = self.depth(&p).min(target);
            if d < target && witness.is_none() {
                witness = Some([x.clone(), y.clone(), p]);
            }
            t = t.min(d);
        }
        if t > floor {
            let stop = AtomicBool::new(false);
            let full = xs
                .par_iter()
                .map(|x| {
                    let mut local = target;
                    for y in ys {
                        if local <= floor || stop.load(Ordering::Relaxed) {
                            break;
                        }
                        local = local.min(self.depth(&op(x, y)?));
                    }
                    if local <= floor {
                        stop.store(true, Ordering::Relaxed);
                    }
                    Ok(local)
                })
                .try_reduce(|| target, |a, b| Ok(a.min(b)))?;
            t = t.min(full);
        }
        let depth = t.max(floor);
        if depth < target && witness.is_none() {
            witness = xs
                .par_iter()
                .find_map_first(|x| {
                    ys.iter().find_map(|y| match op(x, y) {
                        Ok(p) if self.depth(&p) < target => Some(Ok([x.clone(), y.clone(), p])),
                        Ok(_) => None,
                        Err(e) => Some(Err(e)),
                    })
                })
                .transpose()?;
        }
        Ok(Scan { depth, witness })
    }

    fn sample_size(&self, a: usize, b: usize) -> usize {
        // No point sampling what a full scan covers almost as fast.
        if (a as u64) * (b as u64) <= 4096 {
            0
        } else {
            self.sample
        }
    }

    fn witness(&self, property: u8, levels: Vec<usize>, elems: &[Elem]) -> Witness {
        Witness {
            property,
            levels,
            elements: elems.iter().map(|e| self.ctx.format(e)).collect(),
        }
    }
}

fn stream_rng(seed: u64, property: u64, n: usize, m: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((property << 40) | ((n as u64) << 20) | m as u64);
    rng
}

pub fn verify_tower_with(levels: &[FinSet], opts: &VerifyOptions) -> Result<TowerReport> {
    let first = levels.first().ok_or(Error::Empty("tower levels"))?;
    let ctx = first.ctx();
    for l in levels {
        if l.ctx() != ctx {
            return Err(Error::CtxMismatch);
        }
        if l.is_empty() {
            return Err(Error::Empty("tower level"));
        }
    }

    let mut nesting_violation = None;
    let mut keep = levels.len();
    for n in 1..levels.len() {
        if let Some(w) = levels[n].first_outside(&levels[n - 1]) {
            nesting_violation = Some(Witness {
                property: 0,
                levels: vec![n + 1, n],
                elements: vec![ctx.format(w)],
            });
            keep = n;
            break;
        }
    }
    let sets = &levels[..keep];
    let tower = Tower::new(sets, opts.sample);
    let big_n = tower.n();
    let mut props = Vec::new();

    // (1)
    let mut all_symmetric = true;
    for n in 1..=big_n {
        let x = tower.level(n);
        let mut bad = None;
        if !x.contains_identity() {
            bad = Some(vec![ctx.identity()]);
        } else {
            for e in x {
                let inv = ctx.inv(e)?;
                if !x.contains(&inv) {
                    bad = Some(vec![e.clone(), inv]);
                    break;
                }
            }
        }
        all_symmetric &= bad.is_none();
        props.push(PropertyEntry {
            property: 1,
            n,
            m: None,
            pass: bad.is_none(),
            depth: None,
            witness: bad.map(|b| tower.witness(1, vec![n], &b)),
        });
    }

    // (2)
    for n in 1..big_n {
        let x = tower.level(n + 1);
        let mut rng = stream_rng(opts.seed, 2, n, 0);
        let s = tower.scan(x, x, |a, b| ctx.mul(a, b), n, n - 1, &mut rng)?;
        props.push(PropertyEntry {
            property: 2,
            n,
            m: None,
            pass: s.depth >= n,
            depth: None,
            witness: s.witness.map(|w| tower.witness(2, vec![n + 1, n], &w)),
        });
    }

    // (3)
    let mut cover_counts = Vec::new();
    for n in 1..big_n {
        let cover =
            covering::greedy_cover(tower.level(n), tower.level(n + 1), Side::Right, None)?.expect("uncapped cover");
        cover_counts.push(cover.count());
        props.push(PropertyEntry {
            property: 3,
            n,
            m: None,
            pass: true,
            depth: Some(cover.count()),
            witness: None,
        });
    }
    let c = cover_counts.iter().copied().max().unwrap_or(1);

    // (4)
    let x1 = tower.level(1);
    for n in 1..big_n {
        let mut rng = stream_rng(opts.seed, 4, n, 0);
        // Conjugation is trivial in abelian groups, and nesting settles the rest.
        let s = if ctx.is_abelian() {
            Scan {
                depth: n,
                witness: None,
            }
        } else {
            tower.scan(
                x1,
                tower.level(n + 1),
                |a, x| ctx.mul(&ctx.mul(a, x)?, &ctx.inv(a)?),
                n,
                n - 1,
                &mut rng,
            )?
        };
        props.push(PropertyEntry {
            property: 4,
            n,
            m: None,
            pass: s.depth >= n,
            depth: None,
            witness: s.witness.map(|w| tower.witness(4, vec![1, n + 1, n], &w)),
        });
    }

    // (5)
    for n in 1..big_n {
        for m in 1..big_n {
            if all_symmetric && m < n {
                // [X_m, X_n] is the inverse of [X_n, X_m]; symmetric levels agree.
                let mirror = props
                    .iter()
                    .find(|p| p.property == 5 && p.n == m && p.m == Some(n))
                    .cloned()
                    .expect("computed earlier");
                props.push(PropertyEntry {
                    n,
                    m: Some(m),
                    ..mirror
                });
                continue;
            }
            let target = big_n.min(n + m - 1);
            let floor = n.max(m) - 1;
            let s = if ctx.is_abelian() {
                let d = tower.depth(&ctx.identity()).min(target);
                Scan {
                    depth: d.max(floor),
                    witness: (d < target).then(|| {
                        let (a, b) = (
                            tower.level(n).as_slice()[0].clone(),
                            tower.level(m).as_slice()[0].clone(),
                        );
                        [a, b, ctx.identity()]
                    }),
                }
            } else {
                let mut rng = stream_rng(opts.seed, 5, n, m);
                tower.scan(
                    tower.level(n),
                    tower.level(m),
                    |a, b| ctx.commutator(a, b),
                    target,
                    floor,
                    &mut rng,
                )?
            };
            props.push(PropertyEntry {
                property: 5,
                n,
                m: Some(m),
                pass: s.depth >= target,
                depth: Some(s.depth),
                witness: s.witness.map(|w| tower.witness(5, vec![n, m, target], &w)),
            });
        }
    }

    // (6)
    for n in 1..big_n {
        let idx = &tower.index[n - 1];
        let mut bad = None;
        let next = &tower.index[n];
        for x in x1 {
            let f = ctx.pow(x, 4)?;
            if idx.contains(&f) != next.contains(x) {
                bad = Some([x.clone(), f]);
                break;
            }
        }
        props.push(PropertyEntry {
            property: 6,
            n,
            m: None,
            pass: bad.is_none(),
            depth: None,
            witness: bad.map(|b| tower.witness(6, vec![n + 1, n], &b)),
        });
    }

    // (7)
    if big_n >= 2 {
        let x2 = tower.level(2);
        let mut classes: FxHashMap<Elem, Vec<&Elem>> = FxHashMap::default();
        for x in x2 {
            classes.entry(ctx.mul(x, x)?).or_default().push(x);
        }
        let mut keys: Vec<&Elem> = classes.keys().collect();
        keys.sort();
        let mut d7 = big_n;
        let mut witness = None;
        for k in keys {
            let class = &classes[k];
            for x in class {
                for y in class {
                    let q = ctx.mul(x, &ctx.inv(y)?)?;
                    let d = tower.depth(&q);
                    if d < big_n && witness.is_none() {
                        witness = Some(tower.witness(7, vec![2, big_n], &[(*x).clone(), (*y).clone(), q]));
                    }
                    d7 = d7.min(d);
                }
            }
        }
        props.push(PropertyEntry {
            property: 7,
            n: 2,
            m: None,
            pass: d7 >= big_n,
            depth: Some(d7),
            witness,
        });
    }

    let verified_depth = (1..=big_n).rev().find(|&m| truncation_passes(&props, m)).unwrap_or(0);

    let (commensurability, x1_in_derived_square) = match &opts.source {
        Some(src) => source_checks(src, x1, opts)?,
        None => (None, None),
    };

    Ok(TowerReport {
        backend: ctx.descriptor(),
        n: big_n,
        level_sizes: sets.iter().map(FinSet::len).collect(),
        levels: sets.to_vec(),
        verified_depth,
        c,
        cover_counts,
        commensurability,
        x1_in_derived_square,
        nesting_violation,
        properties: props,
    })
}

/// Whether the first `m` levels pass every property.
fn truncation_passes(props: &[PropertyEntry], m: usize) -> bool {
    props.iter().all(|p| match p.property {
        1 => p.n > m || p.pass,
        2 | 4 | 6 => p.n >= m || p.pass,
        3 => true,
        5 => {
            let pm = p.m.expect("pair entry");
            p.n >= m || pm >= m || p.depth.expect("depth") >= m.min(p.n + pm - 1)
        }
        7 => m < 2 || p.depth.expect("depth") >= m,
        _ => true,
    })
}

fn source_checks(src: &FinSet, x1: &FinSet, opts: &VerifyOptions) -> Result<(Option<Commensurability>, Option<bool>)> {
    let pairs = (src.len() as u64).pow(2);
    if pairs > opts.pair_budget {
        return Ok((None, None));
    }
    let derived = setalg::product(&setalg::inverse_set(src)?, src)?;
    let (a, b) = covering::commensurability(&derived, x1, opts.cover_budget)?;
    let comm = Commensurability {
        derived_by_x1: a,
        x1_by_derived: b,
    };
    let flag = if (derived.len() as u64).pow(2) <= opts.pair_budget {
        Some(x1.is_subset(&setalg::product(&derived, &derived)?))
    } else {
        None
    };
    Ok((Some(comm), flag))
}

/// Where [`seed_search`] draws its candidate seeds from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedFamily {
    /// Derived square, dilates and Cayley balls together.
    Default,
    /// `X^-1 X`, `(X^-1 X)^2`, and the squaring shrinks of the latter.
    DerivedSquare,
    /// `{x ∈ X : x^(2^j) ∈ X}` for `j = 0..=3`.
    Dilates,
    /// Balls of radius 1, 2, 4, … in the symmetrized standard generators, up to `|X|` elements.
    CayleyBalls,
    UserList(Vec<FinSet>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateSummary {
    pub label: String,
    pub size: usize,
    pub n: usize,
    pub verified_depth: usize,
    pub c: usize,
    pub e: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedResult {
    #[serde(skip)]
    pub x1: FinSet,
    pub label: String,
    pub report: TowerReport,
    pub candidates: Vec<CandidateSummary>,
    /// Candidates dropped because building them would exceed the pair budget.
    pub skipped: Vec<String>,
}

/// `{x ∈ S : x^(2^j) ∈ S}`.
fn squaring_shrink(s: &FinSet, j: u32) -> Result<FinSet> {
    let ctx = s.ctx();
    let idx = s.index();
    s.try_filter(|x| Ok(idx.contains(&ctx.pow(x, 1 << j)?)))
}

/// Labelled candidate seeds, and the labels skipped for budget.
type Candidates = (Vec<(String, FinSet)>, Vec<String>);

fn candidates(x: &FinSet, family: &SeedFamily, pair_budget: u64) -> Result<Candidates> {
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    let fits = |a: usize, b: usize| (a as u64).saturating_mul(b as u64) <= pair_budget;
    let derived = |out: &mut Vec<(String, FinSet)>, skipped: &mut Vec<String>| -> Result<()> {
        if !fits(x.len(), x.len()) {
            skipped.push("derived".into());
            skipped.push("derived-square".into());
            return Ok(());
        }
        let d = setalg::product(&setalg::inverse_set(x)?, x)?;
        out.push(("derived".into(), d.clone()));
        if !fits(d.len(), d.len()) {
            skipped.push("derived-square".into());
            return Ok(());
        }
        let sq = setalg::product(&d, &d)?;
        for j in 1..=2 {
            out.push((format!("derived-square-shrink-{j}"), squaring_shrink(&sq, j)?));
        }
        out.push(("derived-square".into(), sq));
        Ok(())
    };
    let dilates = |out: &mut Vec<(String, FinSet)>| -> Result<()> {
        out.push(("dilate-0".into(), x.clone()));
        for j in 1..=3 {
            out.push((format!("dilate-{j}"), squaring_shrink(x, j)?));
        }
        Ok(())
    };
    let balls = |out: &mut Vec<(String, FinSet)>| -> Result<()> {
        let ctx = x.ctx();
        let gens = FinSet::new(ctx, ctx.standard_generators())?;
        let mut ball = setalg::symmetrize(&gens)?;
        let mut r = 1;
        loop {
            out.push((format!("ball-{r}"), ball.clone()));
            if ball.len() >= x.len() || !fits(ball.len(), ball.len()) {
                break;
            }
            let next = setalg::product(&ball, &ball)?;
            if next == ball || next.len() > x.len() {
                break;
            }
            ball = next;
            r *= 2;
        }
        Ok(())
    };
    match family {
        SeedFamily::Default => {
            derived(&mut out, &mut skipped)?;
            dilates(&mut out)?;
            balls(&mut out)?;
        }
        SeedFamily::DerivedSquare => derived(&mut out, &mut skipped)?,
        SeedFamily::Dilates => dilates(&mut out)?,
        SeedFamily::CayleyBalls => balls(&mut out)?,
        SeedFamily::UserList(list) => {
            for (i, s) in list.iter().enumerate() {
                out.push((format!("user-{i}"), s.clone()));
            }
        }
    }
    Ok((out, skipped))
}

/// Builds and verifies a tower of depth up to `budget` for each candidate
/// seed, keeping the one with the largest verified depth, then smaller `c`,
/// then smaller `e` (unknown `e` counts as infinite), then earlier position.
pub fn seed_search(x: &FinSet, family: &SeedFamily, budget: usize, opts: &VerifyOptions) -> Result<SeedResult> {
    x.require_symmetric()?;
    let (cands, skipped) = candidates(x, family, opts.pair_budget)?;
    let mut seen: Vec<&FinSet> = Vec::new();
    let mut best: Option<(String, FinSet, TowerReport)> = None;
    let mut summaries = Vec::new();
    let verify_opts = VerifyOptions {
        source: Some(x.clone()),
        ..opts.clone()
    };
    for (label, seed) in &cands {
        if seed.is_empty() || seen.contains(&seed) || seed.ctx() != x.ctx() {
            continue;
        }
        seen.push(seed);
        if seed.require_symmetric().is_err() {
            continue;
        }
        let levels = build_tower(seed, budget)?;
        let report = verify_tower_with(&levels, &verify_opts)?;
        summaries.push(CandidateSummary {
            label: label.clone(),
            size: seed.len(),
            n: report.n,
            verified_depth: report.verified_depth,
            c: report.c,
            e: report.e(),
        });
        let key = |r: &TowerReport| (std::cmp::Reverse(r.verified_depth), r.c, r.e().unwrap_or(usize::MAX));
        if best.as_ref().is_none_or(|(_, _, b)| key(&report) < key(b)) {
            best = Some((label.clone(), seed.clone(), report));
        }
    }
    let (label, x1, report) = best.ok_or(Error::Empty("seed candidate family"))?;
    Ok(SeedResult {
        x1,
        label,
        report,
        candidates: summaries,
        skipped,
    })
}
