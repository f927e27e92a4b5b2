//! Discrete Heisenberg group in coordinates (x, y, z) with
//! `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`, i.e. the unitriangular matrix
//! `[[1,x,z],[0,1,y],[0,0,1]]`.

use smallvec::SmallVec;

use super::Elem;
use crate::error::{Error, Result};

pub(super) fn encode(v: [i64; 3]) -> Elem {
    let mut out = SmallVec::new();
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Elem::from_vec(out)
}

pub(super) fn decode(a: &Elem) -> Result<[i64; 3]> {
    let b = a.as_bytes();
    if b.len() != 24 {
        return Err(Error::EncodingMismatch(format!(
            "expected 24-byte Heisenberg encoding, got {}",
            b.len()
        )));
    }
    let c = |i: usize| i64::from_le_bytes(b[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    Ok([c(0), c(1), c(2)])
}

pub(super) fn mul(a: &Elem, b: &Elem) -> Result<Elem> {
    let [x, y, z] = decode(a)?;
    let [x2, y2, z2] = decode(b)?;
    let cross = x.checked_mul(y2).ok_or(Error::Overflow)?;
    let z = z
        .checked_add(z2)
        .and_then(|s| s.checked_add(cross))
        .ok_or(Error::Overflow)?;
    Ok(encode([
        x.checked_add(x2).ok_or(Error::Overflow)?,
        y.checked_add(y2).ok_or(Error::Overflow)?,
        z,
    ]))
}

/// `(x,y,z)^-1 = (-x, -y, -z + xy)`.
pub(super) fn inv(a: &Elem) -> Result<Elem> {
    let [x, y, z] = decode(a)?;
    let xy = x.checked_mul(y).ok_or(Error::Overflow)?;
    Ok(encode([
        x.checked_neg().ok_or(Error::Overflow)?,
        y.checked_neg().ok_or(Error::Overflow)?,
        xy.checked_sub(z).ok_or(Error::Overflow)?,
    ]))
}

pub(super) fn parse(s: &str) -> Result<Elem> {
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::parse(s, "expected (x,y,z)"))?;
    let v: Vec<i64> = inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::parse(s, format!("bad coordinate `{}`", t.trim())))
        })
        .collect::<Result<_>>()?;
    if v.len() != 3 {
        return Err(Error::parse(s, "expected three coordinates"));
    }
    Ok(encode([v[0], v[1], v[2]]))
}

pub(super) fn format(a: &Elem) -> Result<String> {
    let [x, y, z] = decode(a)?;
    Ok(format!("({x},{y},{z})"))
}
