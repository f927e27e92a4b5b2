//! 2x2 matrices over F_p, row-major residues in `[0, p)` as little-endian u32.

use rand::Rng;
use smallvec::SmallVec;

use super::Elem;
use crate::error::{Error, Result};

pub(super) fn encode(m: [u32; 4]) -> Elem {
    let mut out = SmallVec::with_capacity(16);
    for x in m {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Elem::from_vec(out)
}

pub(super) fn decode(a: &Elem) -> Result<[u32; 4]> {
    let b = a.as_bytes();
    if b.len() != 16 {
        return Err(Error::EncodingMismatch(format!(
            "expected 16-byte matrix encoding, got {}",
            b.len()
        )));
    }
    let mut m = [0u32; 4];
    for (i, c) in b.chunks_exact(4).enumerate() {
        m[i] = u32::from_le_bytes(c.try_into().expect("4-byte chunk"));
    }
    Ok(m)
}

fn det(p: u64, m: [u32; 4]) -> u64 {
    let ad = m[0] as u64 * m[3] as u64 % p;
    let bc = m[1] as u64 * m[2] as u64 % p;
    (ad + p - bc) % p
}

pub(super) fn validate(p: u64, special: bool, a: &Elem) -> Result<()> {
    let m = decode(a)?;
    if m.iter().any(|&x| x as u64 >= p) {
        return Err(Error::EncodingMismatch(format!("entry not reduced mod {p}")));
    }
    let d = det(p, m);
    if special && d != 1 {
        return Err(Error::EncodingMismatch("determinant is not 1".into()));
    }
    if d == 0 {
        return Err(Error::EncodingMismatch("singular matrix".into()));
    }
    Ok(())
}

pub(super) fn mul(p: u64, a: &Elem, b: &Elem) -> Result<Elem> {
    let x = decode(a)?;
    let y = decode(b)?;
    let dot = |i: usize, j: usize| -> u32 {
        let s = (x[2 * i] as u64 * y[j] as u64) % p + (x[2 * i + 1] as u64 * y[2 + j] as u64) % p;
        (s % p) as u32
    };
    Ok(encode([dot(0, 0), dot(0, 1), dot(1, 0), dot(1, 1)]))
}

pub(super) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub(super) fn inv_mod(x: u64, p: u64) -> u64 {
    pow_mod(x, p - 2, p)
}

/// Adjugate divided by the determinant.
pub(super) fn inverse(p: u64, a: &Elem) -> Result<Elem> {
    let m = decode(a)?;
    let d = det(p, m);
    if d == 0 {
        return Err(Error::EncodingMismatch("singular matrix".into()));
    }
    let di = inv_mod(d, p);
    let neg = |x: u32| ((p - x as u64) % p) as u32;
    let sc = |x: u32| (x as u64 * di % p) as u32;
    Ok(encode([sc(m[3]), sc(neg(m[1])), sc(neg(m[2])), sc(m[0])]))
}

pub(super) fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut n = p - 1;
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            factors.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime field has a primitive root")
}

pub(super) fn enumerate(p: u64, special: bool) -> Vec<Elem> {
    let mut out = Vec::new();
    let p32 = p as u32;
    if special {
        // a != 0: d = (1 + bc) / a; a == 0: bc = -1, d free.
        for a in 1..p32 {
            let ai = inv_mod(a as u64, p);
            for b in 0..p32 {
                for c in 0..p32 {
                    let d = ((1 + b as u64 * c as u64 % p) % p) * ai % p;
                    out.push(encode([a, b, c, d as u32]));
                }
            }
        }
        for b in 1..p32 {
            let c = (p - inv_mod(b as u64, p)) % p;
            for d in 0..p32 {
                out.push(encode([0, b, c as u32, d]));
            }
        }
    } else {
        for a in 0..p32 {
            for b in 0..p32 {
                for c in 0..p32 {
                    for d in 0..p32 {
                        let m = [a, b, c, d];
                        if det(p, m) != 0 {
                            out.push(encode(m));
                        }
                    }
                }
            }
        }
    }
    out
}

pub(super) fn random<R: Rng + ?Sized>(p: u64, special: bool, rng: &mut R) -> Elem {
    loop {
        let m = [
            rng.gen_range(0..p) as u32,
            rng.gen_range(0..p) as u32,
            rng.gen_range(0..p) as u32,
            rng.gen_range(0..p) as u32,
        ];
        let d = det(p, m);
        if d == 0 {
            continue;
        }
        if !special {
            return encode(m);
        }
        // Scaling the first row by d^-1 is a bijection from {det = d} onto {det = 1},
        // so the result is uniform on SL2.
        let di = inv_mod(d, p);
        return encode([(m[0] as u64 * di % p) as u32, (m[1] as u64 * di % p) as u32, m[2], m[3]]);
    }
}

/// `[[a,b],[c,d]]`; entries may be negative and are reduced mod p.
pub(super) fn parse(p: u64, special: bool, s: &str) -> Result<Elem> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = cleaned
        .strip_prefix("[[")
        .and_then(|r| r.strip_suffix("]]"))
        .ok_or_else(|| Error::parse(s, "expected [[a,b],[c,d]]"))?;
    let (r0, r1) = inner
        .split_once("],[")
        .ok_or_else(|| Error::parse(s, "expected two rows"))?;
    let mut vals = Vec::with_capacity(4);
    for row in [r0, r1] {
        let parts: Vec<&str> = row.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::parse(s, "each row needs two entries"));
        }
        for t in parts {
            let v: i64 = t.parse().map_err(|_| Error::parse(s, format!("bad entry `{t}`")))?;
            vals.push(v.rem_euclid(p as i64) as u32);
        }
    }
    let e = encode([vals[0], vals[1], vals[2], vals[3]]);
    validate(p, special, &e).map_err(|err| Error::parse(s, err.to_string()))?;
    Ok(e)
}

pub(super) fn format(_p: u64, a: &Elem) -> Result<String> {
    let m = decode(a)?;
    Ok(format!("[[{},{}],[{},{}]]", m[0], m[1], m[2], m[3]))
}
