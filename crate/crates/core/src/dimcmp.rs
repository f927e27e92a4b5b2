//! Point counts on subvarieties of SL2(F_p) against the `|Γ|^{dim Z / dim G}`
//! law, and the linear dichotomy classification of small generating sets.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Backend, GroupCtx};
use crate::probes;
use crate::setalg::{self, FinSet};

/// `dim SL2`.
pub const DIM_SL2: u32 = 3;

/// A built-in subvariety of SL2, with membership decided on matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum VarietySpec {
    /// Diagonal matrices.
    Torus,
    /// `[[1,b],[0,1]]`.
    Unipotent,
    /// Upper triangular matrices.
    Borel,
    /// Diagonal or antidiagonal matrices.
    TorusNormalizer,
    /// `{tr = c}`.
    Trace(u64),
    /// `{±I}`.
    Center,
    /// Everything, as a dimension-3 variety.
    Whole,
}

impl VarietySpec {
    pub fn built_ins() -> Vec<VarietySpec> {
        use VarietySpec::*;
        vec![Torus, Unipotent, Borel, TorusNormalizer, Trace(0), Center]
    }

    pub fn dim(&self) -> u32 {
        match self {
            VarietySpec::Center => 0,
            VarietySpec::Torus | VarietySpec::Unipotent | VarietySpec::TorusNormalizer => 1,
            VarietySpec::Borel | VarietySpec::Trace(_) => 2,
            VarietySpec::Whole => 3,
        }
    }

    /// Membership of `[[a,b],[c,d]]` over F_p.
    pub fn holds(&self, m: [u64; 4], p: u64) -> bool {
        let [a, b, c, d] = m;
        match *self {
            VarietySpec::Torus => b == 0 && c == 0,
            VarietySpec::Unipotent => a == 1 && d == 1 && c == 0,
            VarietySpec::Borel => c == 0,
            VarietySpec::TorusNormalizer => (b == 0 && c == 0) || (a == 0 && d == 0),
            VarietySpec::Trace(t) => (a + d) % p == t % p,
            VarietySpec::Center => b == 0 && c == 0 && a == d && (a == 1 || a == p - 1),
            VarietySpec::Whole => true,
        }
    }
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarietySpec::Torus => f.write_str("torus"),
            VarietySpec::Unipotent => f.write_str("unipotent"),
            VarietySpec::Borel => f.write_str("borel"),
            VarietySpec::TorusNormalizer => f.write_str("torus-normalizer"),
            VarietySpec::Trace(c) => write!(f, "trace={c}"),
            VarietySpec::Center => f.write_str("center"),
            VarietySpec::Whole => f.write_str("whole"),
        }
    }
}

impl FromStr for VarietySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "torus" => VarietySpec::Torus,
            "unipotent" => VarietySpec::Unipotent,
            "borel" => VarietySpec::Borel,
            "torus-normalizer" => VarietySpec::TorusNormalizer,
            "center" => VarietySpec::Center,
            "whole" => VarietySpec::Whole,
            other => {
                let c = other
                    .strip_prefix("trace=")
                    .ok_or_else(|| Error::parse(s, "unknown variety"))?;
                VarietySpec::Trace(
                    c.parse()
                        .map_err(|_| Error::parse(s, "trace level must be a non-negative integer"))?,
                )
            }
        })
    }
}

impl TryFrom<String> for VarietySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<VarietySpec> for String {
    fn from(v: VarietySpec) -> String {
        v.to_string()
    }
}

fn matrix_prime(ctx: &GroupCtx) -> Result<u64> {
    ctx.field_prime()
        .ok_or_else(|| Error::Unsupported("variety counts need an SL2/GL2 backend".into()))
}

fn sl2_prime(ctx: &GroupCtx) -> Result<u64> {
    match ctx.backend() {
        Backend::Sl2 { p } => Ok(*p),
        _ => Err(Error::Unsupported(
            "dimension comparison is implemented for SL2 only".into(),
        )),
    }
}

/// `|{g ∈ Γ : Z(g)}|`.
pub fn variety_count(gamma: &FinSet, z: VarietySpec) -> Result<u64> {
    let ctx = gamma.ctx();
    let p = matrix_prime(ctx)?;
    gamma
        .as_slice()
        .par_iter()
        .map(|e| ctx.matrix_entries(e).map(|m| u64::from(z.holds(m, p))))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Counts of every variety over all of SL2(F_p), streamed without
/// materializing the group. The first entry is `|SL2(F_p)|`.
pub fn full_group_counts(p: u64, varieties: &[VarietySpec]) -> Vec<u64> {
    let inv: Vec<u64> = (0..p).map(|x| if x == 0 { 0 } else { pow_mod(x, p - 2, p) }).collect();
    (0..p)
        .into_par_iter()
        .map(|a| {
            let mut acc = vec![0u64; varieties.len() + 1];
            let mut visit = |m: [u64; 4]| {
                acc[0] += 1;
                for (i, v) in varieties.iter().enumerate() {
                    acc[i + 1] += u64::from(v.holds(m, p));
                }
            };
            for b in 0..p {
                if a == 0 {
                    // ad - bc = 1 forces c = -1/b.
                    if b == 0 {
                        continue;
                    }
                    let c = (p - inv[b as usize]) % p;
                    for d in 0..p {
                        visit([a, b, c, d]);
                    }
                } else {
                    for c in 0..p {
                        let d = (1 + b * c) % p * inv[a as usize] % p;
                        visit([a, b, c, d]);
                    }
                }
            }
            acc
        })
        .reduce(
            || vec![0; varieties.len() + 1],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(s, t)| *s += t);
                x
            },
        )
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimRow {
    pub variety: VarietySpec,
    pub dim: u32,
    pub count: u64,
    /// `log|Z ∩ Γ| / log|Γ|`; `None` when the intersection is empty.
    pub ratio: Option<f64>,
    /// `dim Z / dim G`.
    pub bound: f64,
    /// `bound + ε - ratio`.
    pub slack: Option<f64>,
    pub pass: bool,
    /// The ratio exceeds `dim Z / dim G` itself.
    pub unbalanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimReport {
    pub p: u64,
    pub group_size: u64,
    pub dim_g: u32,
    /// `log|Γ| / dim G`.
    pub gamma0: f64,
    pub epsilon: f64,
    pub rows: Vec<DimRow>,
}

impl DimReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, v: VarietySpec) -> Option<&DimRow> {
        self.rows.iter().find(|r| r.variety == v)
    }
}

/// Exponent ratios of each variety in Γ, tested against `dim Z / 3 + ε`.
pub fn lp_report(gamma: &FinSet, varieties: &[VarietySpec], epsilon: f64) -> Result<DimReport> {
    let p = sl2_prime(gamma.ctx())?;
    let counts = varieties
        .iter()
        .map(|&v| variety_count(gamma, v))
        .collect::<Result<Vec<_>>>()?;
    assemble(p, gamma.len() as u64, varieties, &counts, epsilon)
}

/// [`lp_report`] for Γ the whole of SL2(F_p).
pub fn lp_report_full(ctx: &GroupCtx, varieties: &[VarietySpec], epsilon: f64) -> Result<DimReport> {
    let p = sl2_prime(ctx)?;
    let counts = full_group_counts(p, varieties);
    assemble(p, counts[0], varieties, &counts[1..], epsilon)
}

fn assemble(p: u64, size: u64, varieties: &[VarietySpec], counts: &[u64], epsilon: f64) -> Result<DimReport> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::invalid("epsilon must be >= 0"));
    }
    if size <= 1 {
        return Err(Error::invalid("log ratios need |Γ| >= 2"));
    }
    let log_g = (size as f64).ln();
    let rows = varieties
        .iter()
        .zip(counts)
        .map(|(&v, &count)| {
            let bound = f64::from(v.dim()) / f64::from(DIM_SL2);
            let ratio = (count > 0).then(|| (count as f64).ln() / log_g);
            let slack = ratio.map(|r| bound + epsilon - r);
            DimRow {
                variety: v,
                dim: v.dim(),
                count,
                ratio,
                bound,
                slack,
                pass: slack.is_none_or(|s| s >= 0.0),
                unbalanced: ratio.is_some_and(|r| r > bound),
            }
        })
        .collect();
    Ok(DimReport {
        p,
        group_size: size,
        dim_g: DIM_SL2,
        gamma0: log_g / f64::from(DIM_SL2),
        epsilon,
        rows,
    })
}

pub const DEFAULT_DICHOTOMY_PRIME: u64 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DichotomyVerdict {
    Center,
    Torus,
    Borel,
    TorusNormalizer,
    Saturates,
    Intermediate,
}

impl DichotomyVerdict {
    /// The closure sits in a proper algebraic subgroup.
    pub fn is_proper(&self) -> bool {
        !matches!(self, DichotomyVerdict::Saturates | DichotomyVerdict::Intermediate)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub p: u64,
    pub input_size: usize,
    pub closure_size: usize,
    pub verdict: DichotomyVerdict,
    /// Fixed points (or the preserved pair) on the projective line over F_{p^2}.
    pub points: Vec<String>,
    /// Whether those points are F_p-rational.
    pub split: Option<bool>,
    /// Cosets of the identity component of the stabilizer that X meets.
    pub cosets: Option<usize>,
    /// `|(XX^-1)^2|` and `|⟨X⟩|`.
    pub saturation: Option<(usize, usize)>,
}

/// F_{p^2} as `u + v s` with `s^2 = alpha + beta s`.
struct Fp2 {
    p: u64,
    alpha: u64,
    beta: u64,
    inv: Vec<u32>,
}

type F2 = (u64, u64);

impl Fp2 {
    fn new(p: u64) -> Self {
        let (alpha, beta) = if p == 2 {
            (1, 1)
        } else {
            let n = (2..p)
                .find(|&n| pow_mod(n, (p - 1) / 2, p) == p - 1)
                .expect("odd prime has a non-residue");
            (n, 0)
        };
        let mut f = Fp2 {
            p,
            alpha,
            beta,
            inv: vec![0; (p * p) as usize],
        };
        for x in 1..p * p {
            let a = f.elem_at(x);
            if let Some(y) = (1..p * p).find(|&y| f.mul(a, f.elem_at(y)) == (1, 0)) {
                f.inv[x as usize] = y as u32;
            }
        }
        f
    }

    fn elem_at(&self, k: u64) -> F2 {
        (k % self.p, k / self.p)
    }

    fn index(&self, x: F2) -> u64 {
        x.0 + x.1 * self.p
    }

    fn add(&self, x: F2, y: F2) -> F2 {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn mul(&self, x: F2, y: F2) -> F2 {
        let p = self.p;
        let vv = x.1 * y.1 % p;
        (
            (x.0 * y.0 + vv * self.alpha) % p,
            (x.0 * y.1 + x.1 * y.0 + vv * self.beta) % p,
        )
    }

    fn inv(&self, x: F2) -> F2 {
        self.elem_at(u64::from(self.inv[self.index(x) as usize]))
    }

    fn infinity(&self) -> u64 {
        self.p * self.p
    }

    /// Image of a point of P^1(F_{p^2}) under `[[a,b],[c,d]]`, acting on `(1, t)`.
    fn act(&self, m: [u64; 4], pt: u64) -> u64 {
        let [a, b, c, d] = m.map(|v| (v, 0));
        let (num, den) = if pt == self.infinity() {
            (d, b)
        } else {
            let t = self.elem_at(pt);
            (self.add(c, self.mul(d, t)), self.add(a, self.mul(b, t)))
        };
        if den == (0, 0) {
            self.infinity()
        } else {
            self.index(self.mul(num, self.inv(den)))
        }
    }

    fn rational(&self, pt: u64) -> bool {
        pt == self.infinity() || pt < self.p
    }

    fn name(&self, pt: u64) -> String {
        if pt == self.infinity() {
            return "inf".into();
        }
        let (u, v) = self.elem_at(pt);
        if v == 0 {
            u.to_string()
        } else {
            format!("{u}+{v}s")
        }
    }
}

/// Classifies `⟨X⟩ ≤ SL2(F_p)`: a proper algebraic subgroup (found through
/// fixed points or a preserved pair on the projective line over F_{p^2}),
/// else saturation `(XX^-1)^2 = ⟨X⟩`, else intermediate.
pub fn linear_dichotomy_probe(x: &FinSet, max_p: u64) -> Result<DichotomyReport> {
    let ctx = x.ctx();
    let p = sl2_prime(ctx)?;
    if p > max_p {
        return Err(Error::BudgetExceeded {
            what: "dichotomy prime",
            limit: max_p,
        });
    }
    if x.is_empty() {
        return Err(Error::Empty("dichotomy input"));
    }
    let order = (p * (p * p - 1)) as usize;
    let g0 = probes::group_closure(x, order)?
        .closure
        .ok_or_else(|| Error::Invariant("closure exceeded |SL2(F_p)|".into()))?;
    let mats = x.iter().map(|e| ctx.matrix_entries(e)).collect::<Result<Vec<_>>>()?;
    let f = Fp2::new(p);
    let npts = f.infinity() + 1;
    let fixed: Vec<u64> = (0..npts)
        .into_par_iter()
        .filter(|&pt| mats.iter().all(|&m| f.act(m, pt) == pt))
        .collect();

    let report = |verdict, points: &[u64], cosets, saturation| DichotomyReport {
        p,
        input_size: x.len(),
        closure_size: g0.len(),
        verdict,
        points: points.iter().map(|&q| f.name(q)).collect(),
        split: (!points.is_empty() && points.len() <= 2).then(|| points.iter().all(|&q| f.rational(q))),
        cosets,
        saturation,
    };

    match fixed.len() {
        0 => {}
        1 => return Ok(report(DichotomyVerdict::Borel, &fixed, Some(1), None)),
        2 => return Ok(report(DichotomyVerdict::Torus, &fixed, Some(1), None)),
        _ => return Ok(report(DichotomyVerdict::Center, &[], Some(x.len()), None)),
    }

    let pair = (0..npts).into_par_iter().find_map_first(|q| {
        (q + 1..npts)
            .find(|&r| {
                mats.iter().all(|&m| {
                    let (a, b) = (f.act(m, q), f.act(m, r));
                    (a == q && b == r) || (a == r && b == q)
                })
            })
            .map(|r| [q, r])
    });
    if let Some(pr) = pair {
        let swaps = mats.iter().filter(|&&m| f.act(m, pr[0]) == pr[1]).count();
        let cosets = usize::from(swaps > 0) + usize::from(swaps < mats.len());
        return Ok(report(DichotomyVerdict::TorusNormalizer, &pr, Some(cosets), None));
    }

    let d = setalg::product(x, &setalg::inverse_set(x)?)?;
    let s = setalg::product(&d, &d)?;
    let verdict = if s.len() == g0.len() {
        DichotomyVerdict::Saturates
    } else {
        DichotomyVerdict::Intermediate
    };
    Ok(report(verdict, &[], None, Some((s.len(), g0.len()))))
}
