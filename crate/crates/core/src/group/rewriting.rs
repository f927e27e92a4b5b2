//! Shortlex-reduced words for the Cayley backend.
//!
//! Letters are bytes: generator `i` is `2i`, its inverse `2i + 1`, so the byte
//! order is `a < A < b < B < ...`. Free cancellation is built in; extra rules
//! must strictly decrease words in shortlex order, and the whole system must be
//! locally confluent (checked on construction through critical pairs). Together
//! this makes normal forms unique, so the normal form is the canonical encoding.

use smallvec::SmallVec;

use super::Elem;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RewritingSystem {
    generators: Vec<char>,
    /// User rules only; free cancellation is handled inline.
    rules: Vec<(Vec<u8>, Vec<u8>)>,
}

fn inverse_letter(l: u8) -> u8 {
    l ^ 1
}

fn shortlex_less(a: &[u8], b: &[u8]) -> bool {
    (a.len(), a) < (b.len(), b)
}

impl RewritingSystem {
    pub fn new(generators: &str, rules: &[String]) -> Result<Self> {
        let gens: Vec<char> = generators.chars().collect();
        if gens.is_empty() || gens.len() > 26 {
            return Err(Error::invalid("cayley backend needs 1..=26 generators"));
        }
        for (i, g) in gens.iter().enumerate() {
            if !g.is_ascii_lowercase() {
                return Err(Error::invalid(format!("generator `{g}` must be a lowercase letter")));
            }
            if gens[..i].contains(g) {
                return Err(Error::invalid(format!("generator `{g}` repeated")));
            }
        }
        let mut sys = RewritingSystem {
            generators: gens,
            rules: Vec::new(),
        };
        for r in rules {
            let (lhs, rhs) = r
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("rule `{r}` must read lhs=rhs")))?;
            let l = sys.parse_word(lhs.trim())?;
            let rr = sys.parse_word(rhs.trim())?;
            if !shortlex_less(&rr, &l) {
                return Err(Error::invalid(format!(
                    "rule `{r}` does not decrease words in shortlex order"
                )));
            }
            sys.rules.push((l, rr));
        }
        sys.check_confluence()?;
        Ok(sys)
    }

    fn parse_word(&self, s: &str) -> Result<Vec<u8>> {
        if s == "1" || s.is_empty() {
            return Ok(Vec::new());
        }
        s.chars()
            .map(|c| {
                let lower = c.to_ascii_lowercase();
                let i = self
                    .generators
                    .iter()
                    .position(|&g| g == lower)
                    .ok_or_else(|| Error::parse(s, format!("unknown letter `{c}`")))?;
                Ok((2 * i) as u8 + u8::from(c.is_ascii_uppercase()))
            })
            .collect()
    }

    /// Reduces `input` to its normal form. The output stack is kept irreducible, so
    /// redexes can only appear as a suffix after each push.
    fn normalize_into(&self, input: &[u8], out: &mut SmallVec<[u8; 24]>) {
        let mut pending: Vec<u8> = input.iter().rev().copied().collect();
        while let Some(l) = pending.pop() {
            if out.last().copied() == Some(inverse_letter(l)) {
                out.pop();
                continue;
            }
            out.push(l);
            if let Some((lhs, rhs)) = self.rules.iter().find(|(lhs, _)| out.ends_with(lhs)) {
                out.truncate(out.len() - lhs.len());
                pending.extend(rhs.iter().rev());
            }
        }
    }

    fn normalize(&self, word: &[u8]) -> Vec<u8> {
        let mut out = SmallVec::new();
        self.normalize_into(word, &mut out);
        out.to_vec()
    }

    fn check_confluence(&self) -> Result<()> {
        let mut all: Vec<(Vec<u8>, Vec<u8>)> = self.rules.clone();
        for g in 0..self.generators.len() as u8 {
            all.push((vec![2 * g, 2 * g + 1], vec![]));
            all.push((vec![2 * g + 1, 2 * g], vec![]));
        }
        for (i, (l1, r1)) in all.iter().enumerate() {
            for (j, (l2, r2)) in all.iter().enumerate() {
                // Overlaps: a proper suffix of l1 equals a proper prefix of l2.
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] == l2[..k] {
                        let a: Vec<u8> = r1.iter().chain(&l2[k..]).copied().collect();
                        let b: Vec<u8> = l1[..l1.len() - k].iter().chain(r2).copied().collect();
                        self.joinable(&a, &b, l1, l2)?;
                    }
                }
                // Inclusions: l2 occurs inside l1.
                if i != j && l2.len() <= l1.len() {
                    for s in 0..=l1.len() - l2.len() {
                        if l1[s..s + l2.len()] == l2[..] {
                            let b: Vec<u8> = l1[..s].iter().chain(r2).chain(&l1[s + l2.len()..]).copied().collect();
                            self.joinable(r1, &b, l1, l2)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn joinable(&self, a: &[u8], b: &[u8], l1: &[u8], l2: &[u8]) -> Result<()> {
        if self.normalize(a) != self.normalize(b) {
            return Err(Error::invalid(format!(
                "rewriting system is not confluent (critical pair from `{}` and `{}`)",
                self.render(l1),
                self.render(l2)
            )));
        }
        Ok(())
    }

    fn render(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&l| {
                let c = self.generators[(l / 2) as usize];
                if l & 1 == 1 {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }

    pub(super) fn concat(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = SmallVec::from_slice(a.as_bytes());
        self.normalize_into(b.as_bytes(), &mut out);
        Elem::from_vec(out)
    }

    pub(super) fn inverse(&self, a: &Elem) -> Elem {
        let w: Vec<u8> = a.as_bytes().iter().rev().map(|&l| inverse_letter(l)).collect();
        let mut out = SmallVec::new();
        self.normalize_into(&w, &mut out);
        Elem::from_vec(out)
    }

    pub(super) fn letters(&self) -> Vec<Elem> {
        (0..self.generators.len())
            .map(|i| {
                let mut out = SmallVec::new();
                self.normalize_into(&[(2 * i) as u8], &mut out);
                Elem::from_vec(out)
            })
            .collect()
    }

    pub(super) fn validate(&self, a: &Elem) -> Result<()> {
        let w = a.as_bytes();
        if w.iter().any(|&l| (l / 2) as usize >= self.generators.len()) {
            return Err(Error::EncodingMismatch("letter outside the generator alphabet".into()));
        }
        if self.normalize(w) != w {
            return Err(Error::EncodingMismatch("word is not in normal form".into()));
        }
        Ok(())
    }

    pub(super) fn parse(&self, s: &str) -> Result<Elem> {
        let w = self.parse_word(s)?;
        let mut out = SmallVec::new();
        self.normalize_into(&w, &mut out);
        Ok(Elem::from_vec(out))
    }

    pub(super) fn format(&self, a: &Elem) -> Result<String> {
        self.validate(a)?;
        Ok(self.render(a.as_bytes()))
    }
}
