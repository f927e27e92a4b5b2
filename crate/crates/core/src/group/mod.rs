//! Group backends with a uniform, canonical byte encoding of elements.
//!
//! Every higher module works with [`GroupCtx`] and [`Elem`] only, so set algebra,
//! coverings and towers are written once for all backends. Equal group elements
//! always have byte-identical encodings, which lets sets be deduplicated and
//! ordered by their raw bytes.
//!
//! Permutations compose right-to-left: `(s * t)(i) = s(t(i))`.

mod heisenberg;
mod lattice;
mod matrix;
mod perm;
mod rewriting;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use rewriting::RewritingSystem;

/// Canonical element encoding. Elements of one context always share a layout
/// (fixed length for every backend except Cayley words).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(SmallVec<[u8; 24]>);

impl Elem {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Elem(SmallVec::from_slice(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub(crate) fn from_vec(bytes: SmallVec<[u8; 24]>) -> Self {
        Elem(bytes)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem(")?;
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// The ambient group and its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Backend {
    /// The integer lattice Z^d.
    Lattice {
        d: usize,
    },
    /// (Z/n)^d.
    Modular {
        n: u64,
        d: usize,
    },
    /// The symmetric group on {1..n}.
    Symmetric {
        n: usize,
    },
    Sl2 {
        p: u64,
    },
    Gl2 {
        p: u64,
    },
    /// Discrete Heisenberg group, (x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy').
    Heisenberg,
    /// Words over `generators` (lowercase letters; uppercase are inverses), reduced by a
    /// confluent length-reducing rewriting system `rules` written as `lhs=rhs`.
    Cayley {
        generators: String,
        #[serde(default)]
        rules: Vec<String>,
    },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Lattice { .. } => "lattice",
            Backend::Modular { .. } => "modular",
            Backend::Symmetric { .. } => "symmetric",
            Backend::Sl2 { .. } => "sl2",
            Backend::Gl2 { .. } => "gl2",
            Backend::Heisenberg => "heisenberg",
            Backend::Cayley { .. } => "cayley",
        }
    }
}

#[derive(Debug)]
struct CtxInner {
    backend: Backend,
    exponent: Option<u64>,
    rewriting: Option<RewritingSystem>,
}

/// Immutable, cheaply clonable handle on a validated group backend.
///
/// Two contexts interoperate only when structurally identical.
#[derive(Clone, Debug)]
pub struct GroupCtx(Arc<CtxInner>);

impl PartialEq for GroupCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.backend == other.0.backend && self.0.exponent == other.0.exponent)
    }
}

impl Eq for GroupCtx {}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i.saturating_mul(i) <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

impl GroupCtx {
    /// Validates the backend parameters and builds the context.
    ///
    /// For `(Z/n)^d` the exponent defaults to `n`; for other backends it stays
    /// undeclared unless given.
    pub fn new(backend: Backend, exponent: Option<u64>) -> Result<Self> {
        let mut rewriting = None;
        match &backend {
            Backend::Lattice { d } => {
                if *d == 0 {
                    return Err(Error::invalid("lattice dimension d must be >= 1"));
                }
            }
            Backend::Modular { n, d } => {
                if *d == 0 || *n == 0 {
                    return Err(Error::invalid("modular lattice needs n, d >= 1"));
                }
                if *n > u32::MAX as u64 {
                    return Err(Error::invalid("modulus must fit in 32 bits"));
                }
            }
            Backend::Symmetric { n } => {
                if *n == 0 || *n > 255 {
                    return Err(Error::invalid("symmetric group degree must be in 1..=255"));
                }
            }
            Backend::Sl2 { p } | Backend::Gl2 { p } => {
                if !is_prime(*p) {
                    return Err(Error::invalid(format!("{p} is not prime")));
                }
                if *p > u32::MAX as u64 {
                    return Err(Error::invalid("prime must fit in 32 bits"));
                }
            }
            Backend::Heisenberg => {}
            Backend::Cayley { generators, rules } => {
                rewriting = Some(RewritingSystem::new(generators, rules)?);
            }
        }
        if exponent == Some(0) {
            return Err(Error::invalid("group exponent must be positive"));
        }
        let exponent = match (&backend, exponent) {
            (Backend::Modular { n, .. }, None) => Some(*n),
            (_, e) => e,
        };
        Ok(GroupCtx(Arc::new(CtxInner {
            backend,
            exponent,
            rewriting,
        })))
    }

    pub fn lattice(d: usize) -> Result<Self> {
        Self::new(Backend::Lattice { d }, None)
    }

    pub fn modular(n: u64, d: usize) -> Result<Self> {
        Self::new(Backend::Modular { n, d }, None)
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        Self::new(Backend::Symmetric { n }, None)
    }

    pub fn sl2(p: u64) -> Result<Self> {
        Self::new(Backend::Sl2 { p }, None)
    }

    pub fn gl2(p: u64) -> Result<Self> {
        Self::new(Backend::Gl2 { p }, None)
    }

    pub fn heisenberg() -> Self {
        Self::new(Backend::Heisenberg, None).expect("heisenberg has no parameters")
    }

    pub fn cayley(generators: &str, rules: &[&str]) -> Result<Self> {
        Self::new(
            Backend::Cayley {
                generators: generators.to_string(),
                rules: rules.iter().map(|r| r.to_string()).collect(),
            },
            None,
        )
    }

    /// Same backend with a declared group exponent.
    pub fn with_exponent(&self, m: u64) -> Result<Self> {
        Self::new(self.0.backend.clone(), Some(m))
    }

    pub fn backend(&self) -> &Backend {
        &self.0.backend
    }

    /// Declared bound on element orders (the group exponent), if known.
    pub fn exponent(&self) -> Option<u64> {
        self.0.exponent
    }

    pub fn is_abelian(&self) -> bool {
        match &self.0.backend {
            Backend::Lattice { .. } | Backend::Modular { .. } => true,
            Backend::Symmetric { n } => *n <= 2,
            Backend::Sl2 { .. } => false,
            Backend::Gl2 { .. } => false,
            Backend::Heisenberg => false,
            Backend::Cayley { generators, .. } => generators.len() <= 1,
        }
    }

    /// Number of elements for finite backends.
    pub fn order(&self) -> Option<u128> {
        match &self.0.backend {
            Backend::Modular { n, d } => (*n as u128).checked_pow(*d as u32),
            Backend::Symmetric { n } => (1..=*n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)),
            Backend::Sl2 { p } => {
                let p = *p as u128;
                Some(p * (p * p - 1))
            }
            Backend::Gl2 { p } => {
                let p = *p as u128;
                Some((p * p - 1) * (p * p - p))
            }
            _ => None,
        }
    }

    pub fn identity(&self) -> Elem {
        match &self.0.backend {
            Backend::Lattice { d } => lattice::encode_signed(&vec![0; *d]),
            Backend::Modular { d, .. } => lattice::encode_residues(&vec![0; *d]),
            Backend::Symmetric { n } => perm::identity(*n),
            Backend::Sl2 { .. } | Backend::Gl2 { .. } => matrix::encode([1, 0, 0, 1]),
            Backend::Heisenberg => heisenberg::encode([0, 0, 0]),
            Backend::Cayley { .. } => Elem::from_bytes(&[]),
        }
    }

    pub fn is_identity(&self, a: &Elem) -> bool {
        *a == self.identity()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        match &self.0.backend {
            Backend::Lattice { d } => lattice::add_signed(*d, a, b),
            Backend::Modular { n, d } => lattice::add_residues(*n, *d, a, b),
            Backend::Symmetric { n } => perm::compose(*n, a, b),
            Backend::Sl2 { p } | Backend::Gl2 { p } => matrix::mul(*p, a, b),
            Backend::Heisenberg => heisenberg::mul(a, b),
            Backend::Cayley { .. } => Ok(self.rewriting().concat(a, b)),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        match &self.0.backend {
            Backend::Lattice { d } => lattice::neg_signed(*d, a),
            Backend::Modular { n, d } => lattice::neg_residues(*n, *d, a),
            Backend::Symmetric { n } => perm::inverse(*n, a),
            Backend::Sl2 { p } | Backend::Gl2 { p } => matrix::inverse(*p, a),
            Backend::Heisenberg => heisenberg::inv(a),
            Backend::Cayley { .. } => Ok(self.rewriting().inverse(a)),
        }
    }

    /// `a^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, a: &Elem, mut k: u64) -> Result<Elem> {
        let mut acc = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// The commutator `a b a^-1 b^-1`.
    pub fn commutator(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let ab = self.mul(a, b)?;
        let ba = self.mul(b, a)?;
        self.mul(&ab, &self.inv(&ba)?)
    }

    /// `x^-1 a x`.
    pub fn conjugate(&self, a: &Elem, x: &Elem) -> Result<Elem> {
        self.mul(&self.inv(x)?, &self.mul(a, x)?)
    }

    /// Checks that `a` is a well-formed canonical encoding for this context.
    pub fn validate(&self, a: &Elem) -> Result<()> {
        match &self.0.backend {
            Backend::Lattice { d } => lattice::decode_signed(*d, a).map(|_| ()),
            Backend::Modular { n, d } => lattice::validate_residues(*n, *d, a),
            Backend::Symmetric { n } => perm::validate(*n, a),
            Backend::Sl2 { p } => matrix::validate(*p, true, a),
            Backend::Gl2 { p } => matrix::validate(*p, false, a),
            Backend::Heisenberg => heisenberg::decode(a).map(|_| ()),
            Backend::Cayley { .. } => self.rewriting().validate(a),
        }
    }

    /// Parses an element literal in the backend's text grammar.
    pub fn parse(&self, literal: &str) -> Result<Elem> {
        let s = literal.trim();
        match &self.0.backend {
            Backend::Lattice { d } => lattice::parse_signed(*d, s),
            Backend::Modular { n, d } => lattice::parse_residues(*n, *d, s),
            Backend::Symmetric { n } => perm::parse(*n, s),
            Backend::Sl2 { p } => matrix::parse(*p, true, s),
            Backend::Gl2 { p } => matrix::parse(*p, false, s),
            Backend::Heisenberg => heisenberg::parse(s),
            Backend::Cayley { .. } => self.rewriting().parse(s),
        }
    }

    /// Renders an element in the backend's literal grammar. Panics on foreign encodings.
    pub fn format(&self, a: &Elem) -> String {
        self.try_format(a).expect("element does not belong to this context")
    }

    pub fn try_format(&self, a: &Elem) -> Result<String> {
        match &self.0.backend {
            Backend::Lattice { d } => lattice::format_signed(*d, a),
            Backend::Modular { d, .. } => lattice::format_residues(*d, a),
            Backend::Symmetric { n } => perm::format(*n, a),
            Backend::Sl2 { p } | Backend::Gl2 { p } => matrix::format(*p, a),
            Backend::Heisenberg => heisenberg::format(a),
            Backend::Cayley { .. } => self.rewriting().format(a),
        }
    }

    /// A small fixed generating set (for infinite backends: of the whole group).
    pub fn standard_generators(&self) -> Vec<Elem> {
        match &self.0.backend {
            Backend::Lattice { d } => (0..*d)
                .map(|i| {
                    let mut v = vec![0i64; *d];
                    v[i] = 1;
                    lattice::encode_signed(&v)
                })
                .collect(),
            Backend::Modular { n, d } => (0..*d)
                .map(|i| {
                    let mut v = vec![0u32; *d];
                    v[i] = (1 % n) as u32;
                    lattice::encode_residues(&v)
                })
                .collect(),
            Backend::Symmetric { n } => perm::standard_generators(*n),
            Backend::Sl2 { .. } => vec![matrix::encode([1, 1, 0, 1]), matrix::encode([1, 0, 1, 1])],
            Backend::Gl2 { p } => {
                let g = matrix::primitive_root(*p);
                vec![
                    matrix::encode([1, 1, 0, 1]),
                    matrix::encode([1, 0, 1, 1]),
                    matrix::encode([g as u32, 0, 0, 1]),
                ]
            }
            Backend::Heisenberg => vec![heisenberg::encode([1, 0, 0]), heisenberg::encode([0, 1, 0])],
            Backend::Cayley { .. } => self.rewriting().letters(),
        }
    }

    /// All elements of a finite backend, in canonical order, if there are at most `limit`.
    pub fn enumerate(&self, limit: u64) -> Result<Vec<Elem>> {
        let order = self
            .order()
            .ok_or_else(|| Error::Unsupported(format!("{} is infinite", self.0.backend.name())))?;
        if order > limit as u128 {
            return Err(Error::BudgetExceeded {
                what: "group enumeration",
                limit,
            });
        }
        let mut out = match &self.0.backend {
            Backend::Modular { n, d } => lattice::enumerate_residues(*n, *d),
            Backend::Symmetric { n } => perm::enumerate(*n),
            Backend::Sl2 { p } => matrix::enumerate(*p, true),
            Backend::Gl2 { p } => matrix::enumerate(*p, false),
            _ => unreachable!("finite backends only"),
        };
        out.sort_unstable();
        Ok(out)
    }

    /// A uniformly random element. Infinite backends sample coordinates in `[-radius, radius]`
    /// (Heisenberg: `|z| <= radius^2`; Cayley: random reduced word of length <= radius).
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: u64) -> Result<Elem> {
        let r = radius.min(i64::MAX as u64 / 4) as i64;
        match &self.0.backend {
            Backend::Lattice { d } => {
                let v: Vec<i64> = (0..*d).map(|_| rng.gen_range(-r..=r)).collect();
                Ok(lattice::encode_signed(&v))
            }
            Backend::Modular { n, d } => {
                let v: Vec<u32> = (0..*d).map(|_| rng.gen_range(0..*n) as u32).collect();
                Ok(lattice::encode_residues(&v))
            }
            Backend::Symmetric { n } => Ok(perm::random(*n, rng)),
            Backend::Sl2 { p } => Ok(matrix::random(*p, true, rng)),
            Backend::Gl2 { p } => Ok(matrix::random(*p, false, rng)),
            Backend::Heisenberg => {
                let r2 = r.checked_mul(r).ok_or(Error::Overflow)?;
                Ok(heisenberg::encode([
                    rng.gen_range(-r..=r),
                    rng.gen_range(-r..=r),
                    rng.gen_range(-r2..=r2),
                ]))
            }
            Backend::Cayley { .. } => {
                let rw = self.rewriting();
                let letters = rw.letters();
                let len = rng.gen_range(0..=r as usize);
                let mut acc = self.identity();
                for _ in 0..len {
                    let mut l = letters[rng.gen_range(0..letters.len())].clone();
                    if rng.gen_bool(0.5) {
                        l = rw.inverse(&l);
                    }
                    acc = rw.concat(&acc, &l);
                }
                Ok(acc)
            }
        }
    }

    /// One-line description used in serialized set headers.
    pub fn descriptor(&self) -> String {
        let mut s = match &self.0.backend {
            Backend::Lattice { d } => format!("lattice d={d}"),
            Backend::Modular { n, d } => format!("modular n={n} d={d}"),
            Backend::Symmetric { n } => format!("symmetric n={n}"),
            Backend::Sl2 { p } => format!("sl2 p={p}"),
            Backend::Gl2 { p } => format!("gl2 p={p}"),
            Backend::Heisenberg => "heisenberg".to_string(),
            Backend::Cayley { generators, rules } => {
                format!("cayley generators={generators} rules={}", rules.join(";"))
            }
        };
        if let Some(m) = self.0.exponent {
            s.push_str(&format!(" exponent={m}"));
        }
        s
    }

    /// Inverse of [`GroupCtx::descriptor`].
    pub fn from_descriptor(desc: &str) -> Result<Self> {
        let mut words = desc.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::invalid("empty backend descriptor"))?;
        let mut fields = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("bad descriptor field `{w}`")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let num = |k: &str| -> Result<u64> {
            fields
                .get(k)
                .ok_or_else(|| Error::invalid(format!("descriptor lacks `{k}`")))?
                .parse()
                .map_err(|_| Error::invalid(format!("descriptor field `{k}` is not a number")))
        };
        let backend = match kind {
            "lattice" => Backend::Lattice { d: num("d")? as usize },
            "modular" => Backend::Modular {
                n: num("n")?,
                d: num("d")? as usize,
            },
            "symmetric" => Backend::Symmetric { n: num("n")? as usize },
            "sl2" => Backend::Sl2 { p: num("p")? },
            "gl2" => Backend::Gl2 { p: num("p")? },
            "heisenberg" => Backend::Heisenberg,
            "cayley" => Backend::Cayley {
                generators: fields.get("generators").cloned().unwrap_or_default(),
                rules: fields
                    .get("rules")
                    .map(|r| r.split(';').filter(|s| !s.is_empty()).map(String::from).collect())
                    .unwrap_or_default(),
            },
            other => return Err(Error::invalid(format!("unknown backend `{other}`"))),
        };
        let exponent = if fields.contains_key("exponent") {
            Some(num("exponent")?)
        } else {
            None
        };
        Self::new(backend, exponent)
    }

    pub(crate) fn rewriting(&self) -> &RewritingSystem {
        self.0
            .rewriting
            .as_ref()
            .expect("rewriting system present for cayley backends")
    }

    /// Decoded SL2/GL2 entries `[a, b, c, d]` of `[[a,b],[c,d]]`.
    pub fn matrix_entries(&self, a: &Elem) -> Result<[u64; 4]> {
        match &self.0.backend {
            Backend::Sl2 { .. } | Backend::Gl2 { .. } => matrix::decode(a).map(|m| m.map(u64::from)),
            _ => Err(Error::Unsupported("matrix entries need an SL2/GL2 backend".into())),
        }
    }

    /// Characteristic of the matrix backends.
    pub fn field_prime(&self) -> Option<u64> {
        match &self.0.backend {
            Backend::Sl2 { p } | Backend::Gl2 { p } => Some(*p),
            _ => None,
        }
    }

    /// Builds a matrix element from entries (reduced mod p, checked against the backend sort).
    pub fn matrix(&self, entries: [i64; 4]) -> Result<Elem> {
        let p = self
            .field_prime()
            .ok_or_else(|| Error::Unsupported("not a matrix backend".into()))?;
        let e = matrix::encode(entries.map(|v| v.rem_euclid(p as i64) as u32));
        self.validate(&e)?;
        Ok(e)
    }

    /// Signed coordinates of a lattice or Heisenberg element.
    pub fn coordinates(&self, a: &Elem) -> Result<Vec<i64>> {
        match &self.0.backend {
            Backend::Lattice { d } => Ok(lattice::decode_signed(*d, a)?.to_vec()),
            Backend::Modular { n, d } => {
                lattice::validate_residues(*n, *d, a)?;
                Ok(lattice::decode_residues(a).into_iter().map(i64::from).collect())
            }
            Backend::Heisenberg => Ok(heisenberg::decode(a)?.to_vec()),
            _ => Err(Error::Unsupported(
                "coordinates need a lattice or Heisenberg backend".into(),
            )),
        }
    }

    /// Builds a lattice / modular / Heisenberg element from coordinates.
    pub fn from_coordinates(&self, coords: &[i64]) -> Result<Elem> {
        match &self.0.backend {
            Backend::Lattice { d } if coords.len() == *d => Ok(lattice::encode_signed(coords)),
            Backend::Modular { n, d } if coords.len() == *d => Ok(lattice::encode_residues(
                &coords
                    .iter()
                    .map(|c| c.rem_euclid(*n as i64) as u32)
                    .collect::<Vec<_>>(),
            )),
            Backend::Heisenberg if coords.len() == 3 => Ok(heisenberg::encode([coords[0], coords[1], coords[2]])),
            _ => Err(Error::EncodingMismatch(format!(
                "{} coordinates for {}",
                coords.len(),
                self.descriptor()
            ))),
        }
    }

    /// Image word (0-based) of a permutation element.
    pub fn permutation_images(&self, a: &Elem) -> Result<Vec<usize>> {
        match &self.0.backend {
            Backend::Symmetric { n } => {
                perm::validate(*n, a)?;
                Ok(a.as_bytes().iter().map(|&b| b as usize).collect())
            }
            _ => Err(Error::Unsupported("not a permutation backend".into())),
        }
    }
}

#[cfg(test)]
mod tests;
