//! Generators of the named example sets and the regression corpora.

mod alpha;
mod corpus;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, GroupCtx};
use crate::probes;
use crate::setalg::{self, FinSet};

pub use alpha::Alpha;
pub use corpus::{corpus, BEATTY_ALPHAS, CORPORA, SL2_BALL_RADII, SL2_PRIMES};

/// Largest set any family will build.
pub const MAX_FAMILY_SIZE: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `[-n, n]^d ⊂ Z^d`.
    IntervalBox { d: usize, n: i64 },
    /// `{⌊mα⌋ : -n ≤ m ≤ n} ⊂ Z` for irrational `α > 10`.
    Beatty { n: i64, alpha: String },
    /// `{(x,y,z) : |x|,|y| ≤ r, |z| ≤ r^2}`, optionally symmetrized.
    HeisenbergBox {
        r: i64,
        #[serde(default)]
        symmetric: bool,
    },
    /// Products of at most `radius` symmetrized generators.
    CayleyBall {
        group: String,
        #[serde(default)]
        generators: Option<Vec<String>>,
        radius: usize,
    },
    /// `size` distinct random elements, then symmetrized.
    RandomSymmetric {
        group: String,
        size: usize,
        #[serde(default = "default_radius")]
        radius: u64,
        seed: u64,
    },
    /// The subgroup generated by `generators` with `noise` random elements added, symmetrized.
    SubgroupPlusNoise {
        group: String,
        generators: Vec<String>,
        noise: usize,
        #[serde(default = "default_radius")]
        radius: u64,
        seed: u64,
    },
    /// In `(Z/modulus)^d`: the span of the first `subspace_dim` unit vectors plus
    /// `extra` random points, symmetrized.
    ExponentGrid {
        modulus: u64,
        d: usize,
        subspace_dim: usize,
        extra: usize,
        seed: u64,
    },
}

fn default_radius() -> u64 {
    8
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::IntervalBox { d, n } => write!(f, "interval-box d={d} n={n}"),
            FamilySpec::Beatty { n, alpha } => write!(f, "beatty n={n} alpha={alpha}"),
            FamilySpec::HeisenbergBox { r, symmetric } => {
                write!(f, "heisenberg-box r={r}{}", if *symmetric { " symmetric" } else { "" })
            }
            FamilySpec::CayleyBall {
                group,
                generators,
                radius,
            } => {
                write!(f, "cayley-ball [{group}] radius={radius}")?;
                if let Some(g) = generators {
                    write!(f, " generators={}", g.join(","))?;
                }
                Ok(())
            }
            FamilySpec::RandomSymmetric {
                group,
                size,
                radius,
                seed,
            } => {
                write!(f, "random-symmetric [{group}] size={size} radius={radius} seed={seed}")
            }
            FamilySpec::SubgroupPlusNoise {
                group,
                generators,
                noise,
                seed,
                ..
            } => write!(
                f,
                "subgroup-plus-noise [{group}] generators={} noise={noise} seed={seed}",
                generators.join(",")
            ),
            FamilySpec::ExponentGrid {
                modulus,
                d,
                subspace_dim,
                extra,
                seed,
            } => write!(
                f,
                "exponent-grid modulus={modulus} d={d} k={subspace_dim} extra={extra} seed={seed}"
            ),
        }
    }
}

fn too_big(size: u64) -> Result<()> {
    if size > MAX_FAMILY_SIZE {
        return Err(Error::BudgetExceeded {
            what: "family size",
            limit: MAX_FAMILY_SIZE,
        });
    }
    Ok(())
}

/// Builds the set a spec describes.
pub fn generate(spec: &FamilySpec) -> Result<FinSet> {
    match spec {
        FamilySpec::IntervalBox { d, n } => interval_box(*d, *n),
        FamilySpec::Beatty { n, alpha } => beatty(*n, alpha),
        FamilySpec::HeisenbergBox { r, symmetric } => {
            let x = heisenberg_box(*r)?;
            if *symmetric {
                setalg::symmetrize(&x)
            } else {
                Ok(x)
            }
        }
        FamilySpec::CayleyBall {
            group,
            generators,
            radius,
        } => {
            let ctx = GroupCtx::from_descriptor(group)?;
            let gens = match generators {
                Some(g) => FinSet::parse(&ctx, g.iter().map(String::as_str))?,
                None => FinSet::new(&ctx, ctx.standard_generators())?,
            };
            cayley_ball(&gens, *radius)
        }
        FamilySpec::RandomSymmetric {
            group,
            size,
            radius,
            seed,
        } => {
            let ctx = GroupCtx::from_descriptor(group)?;
            let v = sample_distinct(&ctx, *size, *radius, *seed, &FxHashSet::default())?;
            setalg::symmetrize(&FinSet::new(&ctx, v)?)
        }
        FamilySpec::SubgroupPlusNoise {
            group,
            generators,
            noise,
            radius,
            seed,
        } => {
            let ctx = GroupCtx::from_descriptor(group)?;
            let gens = FinSet::parse(&ctx, generators.iter().map(String::as_str))?;
            let h = probes::generated_subgroup(&gens, MAX_FAMILY_SIZE as usize)?;
            let skip: FxHashSet<Elem> = h.iter().cloned().collect();
            let extra = sample_distinct(&ctx, *noise, *radius, *seed, &skip)?;
            setalg::symmetrize(&h.union(&FinSet::new(&ctx, extra)?)?)
        }
        FamilySpec::ExponentGrid {
            modulus,
            d,
            subspace_dim,
            extra,
            seed,
        } => exponent_grid(*modulus, *d, *subspace_dim, *extra, *seed),
    }
}

pub fn interval_box(d: usize, n: i64) -> Result<FinSet> {
    if n < 0 {
        return Err(Error::invalid("box radius must be >= 0"));
    }
    let side = 2 * n as u64 + 1;
    too_big(side.checked_pow(d as u32).unwrap_or(u64::MAX))?;
    let ctx = GroupCtx::lattice(d)?;
    let mut out = Vec::new();
    let mut v = vec![-n; d];
    loop {
        out.push(ctx.from_coordinates(&v)?);
        let Some(i) = v.iter().position(|&c| c < n) else {
            break;
        };
        v[i] += 1;
        v[..i].iter_mut().for_each(|c| *c = -n);
    }
    FinSet::new(&ctx, out)
}

pub fn beatty(n: i64, alpha: &str) -> Result<FinSet> {
    if n < 0 {
        return Err(Error::invalid("beatty n must be >= 0"));
    }
    too_big(2 * n as u64 + 1)?;
    let a = Alpha::parse(alpha)?;
    if a.to_f64() <= 10.0 {
        return Err(Error::invalid(format!("alpha = {alpha} must exceed 10")));
    }
    if let Some((p, q)) = a.rational_approximation() {
        return Err(Error::invalid(format!(
            "alpha = {alpha} is rational ({p}/{q}) at the working precision"
        )));
    }
    let ctx = GroupCtx::lattice(1)?;
    let v = (-n..=n)
        .map(|m| ctx.from_coordinates(&[a.floor_mul(m)?]))
        .collect::<Result<Vec<_>>>()?;
    FinSet::new(&ctx, v)
}

pub fn heisenberg_box(r: i64) -> Result<FinSet> {
    if r < 0 {
        return Err(Error::invalid("box radius must be >= 0"));
    }
    let r2 = r.checked_mul(r).ok_or(Error::Overflow)?;
    let side = 2 * r as u64 + 1;
    too_big(side.saturating_mul(side).saturating_mul(2 * r2 as u64 + 1))?;
    let ctx = GroupCtx::heisenberg();
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r2..=r2 {
                out.push(ctx.from_coordinates(&[x, y, z])?);
            }
        }
    }
    FinSet::new(&ctx, out)
}

/// Ball of the given radius in the word metric of `gens ∪ gens^-1`.
pub fn cayley_ball(gens: &FinSet, radius: usize) -> Result<FinSet> {
    let ctx = gens.ctx();
    let step = setalg::symmetrize(gens)?;
    let mut ball: FxHashSet<Elem> = FxHashSet::default();
    ball.insert(ctx.identity());
    let mut frontier = vec![ctx.identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &step {
                let e = ctx.mul(g, s)?;
                if !ball.contains(&e) {
                    ball.insert(e.clone());
                    next.push(e);
                }
            }
        }
        too_big(ball.len() as u64)?;
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    FinSet::new(ctx, ball)
}

fn sample_distinct(ctx: &GroupCtx, size: usize, radius: u64, seed: u64, skip: &FxHashSet<Elem>) -> Result<Vec<Elem>> {
    too_big(size as u64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = FxHashSet::default();
    let mut out = Vec::with_capacity(size);
    let mut misses = 0usize;
    while out.len() < size {
        let e = ctx.random_element(&mut rng, radius)?;
        if !skip.contains(&e) && seen.insert(e.clone()) {
            out.push(e);
            misses = 0;
        } else {
            misses += 1;
            if misses > 10_000 + 100 * size {
                return Err(Error::invalid(format!("could not draw {size} distinct new elements")));
            }
        }
    }
    Ok(out)
}

pub fn exponent_grid(modulus: u64, d: usize, k: usize, extra: usize, seed: u64) -> Result<FinSet> {
    if k > d {
        return Err(Error::invalid("subspace dimension exceeds d"));
    }
    let ctx = GroupCtx::modular(modulus, d)?;
    too_big(modulus.checked_pow(k as u32).unwrap_or(u64::MAX))?;
    let mut base = vec![ctx.identity()];
    for i in 0..k {
        let mut unit = vec![0i64; d];
        unit[i] = 1;
        let u = ctx.from_coordinates(&unit)?;
        let mut next = Vec::with_capacity(base.len() * modulus as usize);
        for b in &base {
            let mut acc = b.clone();
            for _ in 0..modulus {
                next.push(acc.clone());
                acc = ctx.mul(&acc, &u)?;
            }
        }
        base = next;
    }
    let skip: FxHashSet<Elem> = base.iter().cloned().collect();
    let noise = sample_distinct(&ctx, extra, 0, seed, &skip)?;
    setalg::symmetrize(&FinSet::new(&ctx, base.into_iter().chain(noise))?)
}
