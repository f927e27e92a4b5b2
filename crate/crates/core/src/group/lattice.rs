//! Z^d (little-endian i64 coordinates) and (Z/n)^d (little-endian u32 residues).

use smallvec::SmallVec;

use super::Elem;
use crate::error::{Error, Result};

type Coords = SmallVec<[i64; 4]>;

pub(super) fn encode_signed(v: &[i64]) -> Elem {
    let mut out = SmallVec::with_capacity(v.len() * 8);
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Elem::from_vec(out)
}

pub(super) fn decode_signed(d: usize, a: &Elem) -> Result<Coords> {
    let bytes = a.as_bytes();
    if bytes.len() != 8 * d {
        return Err(Error::EncodingMismatch(format!(
            "expected {} bytes for Z^{d}, got {}",
            8 * d,
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub(super) fn add_signed(d: usize, a: &Elem, b: &Elem) -> Result<Elem> {
    let x = decode_signed(d, a)?;
    let y = decode_signed(d, b)?;
    let mut out: Coords = SmallVec::with_capacity(d);
    for (p, q) in x.iter().zip(y.iter()) {
        out.push(p.checked_add(*q).ok_or(Error::Overflow)?);
    }
    Ok(encode_signed(&out))
}

pub(super) fn neg_signed(d: usize, a: &Elem) -> Result<Elem> {
    let x = decode_signed(d, a)?;
    let out: Option<Coords> = x.iter().map(|v| v.checked_neg()).collect();
    Ok(encode_signed(&out.ok_or(Error::Overflow)?))
}

pub(super) fn encode_residues(v: &[u32]) -> Elem {
    let mut out = SmallVec::with_capacity(v.len() * 4);
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Elem::from_vec(out)
}

pub(super) fn decode_residues(a: &Elem) -> SmallVec<[u32; 8]> {
    a.as_bytes()
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4-byte chunk")))
        .collect()
}

pub(super) fn validate_residues(n: u64, d: usize, a: &Elem) -> Result<()> {
    if a.as_bytes().len() != 4 * d {
        return Err(Error::EncodingMismatch(format!(
            "expected {} bytes for (Z/{n})^{d}, got {}",
            4 * d,
            a.as_bytes().len()
        )));
    }
    if decode_residues(a).iter().any(|&r| r as u64 >= n) {
        return Err(Error::EncodingMismatch(format!("residue not reduced mod {n}")));
    }
    Ok(())
}

pub(super) fn add_residues(n: u64, d: usize, a: &Elem, b: &Elem) -> Result<Elem> {
    if a.as_bytes().len() != 4 * d || b.as_bytes().len() != 4 * d {
        return Err(Error::EncodingMismatch(format!("expected (Z/{n})^{d} encodings")));
    }
    let x = decode_residues(a);
    let y = decode_residues(b);
    let out: SmallVec<[u32; 8]> = x
        .iter()
        .zip(y.iter())
        .map(|(&p, &q)| ((p as u64 + q as u64) % n) as u32)
        .collect();
    Ok(encode_residues(&out))
}

pub(super) fn neg_residues(n: u64, d: usize, a: &Elem) -> Result<Elem> {
    validate_residues(n, d, a)?;
    let out: SmallVec<[u32; 8]> = decode_residues(a)
        .iter()
        .map(|&p| ((n - p as u64) % n) as u32)
        .collect();
    Ok(encode_residues(&out))
}

pub(super) fn enumerate_residues(n: u64, d: usize) -> Vec<Elem> {
    let total = (n as usize).pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut v = vec![0u32; d];
    for _ in 0..total {
        out.push(encode_residues(&v));
        for c in v.iter_mut() {
            *c += 1;
            if (*c as u64) < n {
                break;
            }
            *c = 0;
        }
    }
    out
}

fn parse_tuple(s: &str) -> Result<Vec<i64>> {
    let inner = if let Some(rest) = s.strip_prefix('(') {
        rest.strip_suffix(')')
            .ok_or_else(|| Error::parse(s, "unbalanced parenthesis"))?
    } else {
        s
    };
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::parse(s, format!("bad coordinate `{}`: {e}", t.trim())))
        })
        .collect()
}

pub(super) fn parse_signed(d: usize, s: &str) -> Result<Elem> {
    let v = parse_tuple(s)?;
    if v.len() != d {
        return Err(Error::parse(s, format!("expected {d} coordinates")));
    }
    Ok(encode_signed(&v))
}

pub(super) fn parse_residues(n: u64, d: usize, s: &str) -> Result<Elem> {
    let v = parse_tuple(s)?;
    if v.len() != d {
        return Err(Error::parse(s, format!("expected {d} coordinates")));
    }
    let r: Vec<u32> = v.iter().map(|x| x.rem_euclid(n as i64) as u32).collect();
    Ok(encode_residues(&r))
}

fn join<T: ToString>(v: impl Iterator<Item = T>) -> String {
    let parts: Vec<String> = v.map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub(super) fn format_signed(d: usize, a: &Elem) -> Result<String> {
    Ok(join(decode_signed(d, a)?.into_iter()))
}

pub(super) fn format_residues(d: usize, a: &Elem) -> Result<String> {
    if a.as_bytes().len() != 4 * d {
        return Err(Error::EncodingMismatch("modular element length".into()));
    }
    Ok(join(decode_residues(a).into_iter()))
}
