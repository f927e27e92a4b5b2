use std::fmt;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupCtx};

/// A deduplicated finite subset of a group, stored in canonical (byte) order.
#[derive(Clone, PartialEq, Eq)]
pub struct FinSet {
    ctx: GroupCtx,
    elems: Vec<Elem>,
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.elems.iter().take(16).map(|e| self.ctx.format(e)).collect();
        write!(
            f,
            "FinSet[{}; {}]{{{}{}}}",
            self.ctx.descriptor(),
            self.elems.len(),
            shown.join(", "),
            if self.elems.len() > 16 { ", ..." } else { "" }
        )
    }
}

impl FinSet {
    /// Validates every element against `ctx`, then sorts and deduplicates.
    pub fn new(ctx: &GroupCtx, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let elems: Vec<Elem> = elems.into_iter().collect();
        for e in &elems {
            ctx.validate(e)?;
        }
        Ok(Self::from_trusted(ctx, elems))
    }

    /// Parses element literals.
    pub fn parse<'a>(ctx: &GroupCtx, literals: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let elems = literals.into_iter().map(|s| ctx.parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(ctx, elems)
    }

    /// Elements produced by the context's own operations; skips validation.
    pub(crate) fn from_trusted(ctx: &GroupCtx, mut elems: Vec<Elem>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        FinSet {
            ctx: ctx.clone(),
            elems,
        }
    }

    pub(crate) fn from_sorted(ctx: &GroupCtx, elems: Vec<Elem>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        FinSet {
            ctx: ctx.clone(),
            elems,
        }
    }

    pub fn singleton(ctx: &GroupCtx, e: Elem) -> Result<Self> {
        Self::new(ctx, [e])
    }

    pub fn identity(ctx: &GroupCtx) -> Self {
        Self::from_trusted(ctx, vec![ctx.identity()])
    }

    /// Every element of a finite backend (bounded by `limit`).
    pub fn whole_group(ctx: &GroupCtx, limit: u64) -> Result<Self> {
        Ok(Self::from_sorted(ctx, ctx.enumerate(limit)?))
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Elem> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<Elem> {
        self.elems
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&self.ctx.identity())
    }

    /// Hash index for membership-heavy loops.
    pub fn index(&self) -> FxHashSet<&Elem> {
        self.elems.iter().collect()
    }

    pub(crate) fn same_ctx(&self, other: &FinSet) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut j = 0;
        for e in &self.elems {
            while j < other.elems.len() && other.elems[j] < *e {
                j += 1;
            }
            if j == other.elems.len() || other.elems[j] != *e {
                return false;
            }
        }
        true
    }

    /// First element of `self` missing from `other`.
    pub fn first_outside(&self, other: &FinSet) -> Option<&Elem> {
        self.elems.iter().find(|e| !other.contains(e))
    }

    pub fn union(&self, other: &FinSet) -> Result<FinSet> {
        self.same_ctx(other)?;
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elems, &other.elems);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    v.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    v.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    v.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&a[i..]);
        v.extend_from_slice(&b[j..]);
        Ok(Self::from_sorted(&self.ctx, v))
    }

    pub fn intersection(&self, other: &FinSet) -> Result<FinSet> {
        self.same_ctx(other)?;
        Ok(self.filter(|e| other.contains(e)))
    }

    pub fn difference(&self, other: &FinSet) -> Result<FinSet> {
        self.same_ctx(other)?;
        Ok(self.filter(|e| !other.contains(e)))
    }

    pub fn filter(&self, mut keep: impl FnMut(&Elem) -> bool) -> FinSet {
        Self::from_sorted(&self.ctx, self.elems.iter().filter(|e| keep(e)).cloned().collect())
    }

    /// Keeps the elements for which `keep` returns `Ok(true)`; errors propagate.
    pub fn try_filter(&self, mut keep: impl FnMut(&Elem) -> Result<bool>) -> Result<FinSet> {
        let mut v = Vec::new();
        for e in &self.elems {
            if keep(e)? {
                v.push(e.clone());
            }
        }
        Ok(Self::from_sorted(&self.ctx, v))
    }

    pub fn is_symmetric(&self) -> Result<bool> {
        for e in &self.elems {
            if !self.contains(&self.ctx.inv(e)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Symmetric and containing the identity: the shape the approximate-group
    /// statistics and the tower construction require.
    pub fn require_symmetric(&self) -> Result<()> {
        if self.contains_identity() && self.is_symmetric()? {
            Ok(())
        } else {
            Err(Error::NotSymmetric)
        }
    }

    /// Element literals in canonical order.
    pub fn literals(&self) -> Vec<String> {
        self.elems.iter().map(|e| self.ctx.format(e)).collect()
    }

    /// Text serialization: a `# finset <backend>` header, then one literal per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# finset {}\n", self.ctx.descriptor());
        for e in &self.elems {
            s.push_str(&self.ctx.format(e));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<FinSet> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Empty("finset text"))?;
        let desc = header
            .strip_prefix("# finset ")
            .ok_or_else(|| Error::parse(header, "missing `# finset` header"))?;
        let ctx = GroupCtx::from_descriptor(desc)?;
        let elems = lines
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| ctx.parse(l))
            .collect::<Result<Vec<_>>>()?;
        FinSet::new(&ctx, elems)
    }
}

impl<'a> IntoIterator for &'a FinSet {
    type Item = &'a Elem;
    type IntoIter = std::slice::Iter<'a, Elem>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}
