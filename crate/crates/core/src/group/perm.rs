//! Permutations of {1..n} stored as 0-based image words, one byte per point.

use rand::seq::SliceRandom;
use rand::Rng;
use smallvec::SmallVec;

use super::Elem;
use crate::error::{Error, Result};

pub(super) fn identity(n: usize) -> Elem {
    Elem::from_vec((0..n as u8).collect())
}

pub(super) fn validate(n: usize, a: &Elem) -> Result<()> {
    let img = a.as_bytes();
    if img.len() != n {
        return Err(Error::EncodingMismatch(format!(
            "expected image word of length {n}, got {}",
            img.len()
        )));
    }
    let mut seen = [false; 256];
    for &i in img {
        if i as usize >= n || seen[i as usize] {
            return Err(Error::EncodingMismatch("image word is not a permutation".into()));
        }
        seen[i as usize] = true;
    }
    Ok(())
}

fn check_len(n: usize, a: &Elem) -> Result<&[u8]> {
    let img = a.as_bytes();
    if img.len() != n {
        return Err(Error::EncodingMismatch(format!("expected permutation of degree {n}")));
    }
    Ok(img)
}

/// `(s * t)(i) = s(t(i))`.
pub(super) fn compose(n: usize, s: &Elem, t: &Elem) -> Result<Elem> {
    let s = check_len(n, s)?;
    let t = check_len(n, t)?;
    Ok(Elem::from_vec(t.iter().map(|&i| s[i as usize]).collect()))
}

pub(super) fn inverse(n: usize, a: &Elem) -> Result<Elem> {
    let img = check_len(n, a)?;
    let mut out: SmallVec<[u8; 24]> = SmallVec::from_elem(0, n);
    for (i, &j) in img.iter().enumerate() {
        out[j as usize] = i as u8;
    }
    Ok(Elem::from_vec(out))
}

/// A transposition and an n-cycle.
pub(super) fn standard_generators(n: usize) -> Vec<Elem> {
    if n < 2 {
        return vec![identity(n)];
    }
    let mut t: SmallVec<[u8; 24]> = (0..n as u8).collect();
    t.swap(0, 1);
    let c: SmallVec<[u8; 24]> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
    vec![Elem::from_vec(t), Elem::from_vec(c)]
}

pub(super) fn enumerate(n: usize) -> Vec<Elem> {
    // Heap's algorithm over the image word.
    let mut a: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![Elem::from_bytes(&a)];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(Elem::from_bytes(&a));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub(super) fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Elem {
    let mut a: Vec<u8> = (0..n as u8).collect();
    a.shuffle(rng);
    Elem::from_bytes(&a)
}

/// Cycle notation with 1-based points, e.g. `(1 2 3)(4 5)`; `()` is the identity.
pub(super) fn parse(n: usize, s: &str) -> Result<Elem> {
    let mut acc: Vec<u8> = (0..n as u8).collect();
    let mut rest = s.trim();
    if rest.is_empty() {
        return Err(Error::parse(s, "empty permutation literal"));
    }
    // Cycles are applied right-to-left, matching the composition convention.
    let mut cycles = Vec::new();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| Error::parse(s, "expected `(`"))?;
        let end = body.find(')').ok_or_else(|| Error::parse(s, "missing `)`"))?;
        let points: Vec<usize> = body[..end]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(s, format!("bad point `{t}`")))
            })
            .collect::<Result<_>>()?;
        let mut seen = vec![false; n];
        for &p in &points {
            if p == 0 || p > n {
                return Err(Error::parse(s, format!("point {p} outside 1..={n}")));
            }
            if seen[p - 1] {
                return Err(Error::parse(s, format!("point {p} repeated in a cycle")));
            }
            seen[p - 1] = true;
        }
        cycles.push(points);
        rest = body[end + 1..].trim_start();
    }
    for cycle in cycles.iter().rev() {
        if cycle.len() < 2 {
            continue;
        }
        let mut c: Vec<u8> = (0..n as u8).collect();
        for w in 0..cycle.len() {
            c[cycle[w] - 1] = (cycle[(w + 1) % cycle.len()] - 1) as u8;
        }
        // acc := c * acc
        acc = acc.iter().map(|&i| c[i as usize]).collect();
    }
    Ok(Elem::from_bytes(&acc))
}

pub(super) fn format(n: usize, a: &Elem) -> Result<String> {
    validate(n, a)?;
    let img = a.as_bytes();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || img[start] as usize == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut j = img[start] as usize;
        while j != start {
            seen[j] = true;
            cycle.push(j + 1);
            j = img[j] as usize;
        }
        let parts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
        out.push('(');
        out.push_str(&parts.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    Ok(out)
}
