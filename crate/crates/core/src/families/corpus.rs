use super::FamilySpec;
use crate::error::{Error, Result};

pub const CORPORA: [&str; 4] = ["paper-examples", "growth-grid", "tower-grid", "sl2-grid"];

pub const BEATTY_ALPHAS: [&str; 3] = ["4*pi", "10+sqrt(2)", "e^4"];

pub const SL2_PRIMES: [u64; 4] = [5, 7, 11, 13];

/// A registered list of family specs, in a fixed order.
pub fn corpus(name: &str) -> Result<Vec<FamilySpec>> {
    match name {
        "paper-examples" => Ok(paper_examples()),
        "growth-grid" => Ok(growth_grid()),
        "tower-grid" => Ok(tower_grid()),
        "sl2-grid" => Ok(sl2_grid()),
        other => Err(Error::invalid(format!(
            "unknown corpus `{other}` (known: {})",
            CORPORA.join(", ")
        ))),
    }
}

fn beatty(n: i64, alpha: &str) -> FamilySpec {
    FamilySpec::Beatty {
        n,
        alpha: alpha.to_string(),
    }
}

fn paper_examples() -> Vec<FamilySpec> {
    let mut v: Vec<FamilySpec> = BEATTY_ALPHAS.iter().map(|a| beatty(10, a)).collect();
    v.extend([(1, 10), (2, 5), (3, 2)].map(|(d, n)| FamilySpec::IntervalBox { d, n }));
    v.extend([2, 4].map(|r| FamilySpec::HeisenbergBox { r, symmetric: false }));
    v.push(FamilySpec::CayleyBall {
        group: "sl2 p=5".into(),
        generators: None,
        radius: 1,
    });
    v.push(FamilySpec::SubgroupPlusNoise {
        group: "sl2 p=5".into(),
        generators: vec!["[[1,1],[0,1]]".into(), "[[4,0],[0,4]]".into()],
        noise: 0,
        radius: 0,
        seed: 0,
    });
    v.extend([0, 1].map(|extra| FamilySpec::ExponentGrid {
        modulus: 2,
        d: 8,
        subspace_dim: 4,
        extra,
        seed: 1,
    }));
    v.push(FamilySpec::CayleyBall {
        group: "cayley generators=ab rules=".into(),
        generators: None,
        radius: 4,
    });
    v
}

fn growth_grid() -> Vec<FamilySpec> {
    let mut v = Vec::new();
    v.extend([4, 16, 64, 256].map(|n| FamilySpec::IntervalBox { d: 1, n }));
    v.extend([2, 4, 8, 16].map(|n| FamilySpec::IntervalBox { d: 2, n }));
    for a in BEATTY_ALPHAS {
        v.extend([10, 100, 1000].map(|n| beatty(n, a)));
    }
    v.extend([1, 2, 4].map(|r| FamilySpec::HeisenbergBox { r, symmetric: false }));
    v.extend([2, 4, 8].map(|radius| FamilySpec::CayleyBall {
        group: "heisenberg".into(),
        generators: None,
        radius,
    }));
    v
}

fn tower_grid() -> Vec<FamilySpec> {
    let mut v = Vec::new();
    v.extend([64, 256, 1024].map(|n| FamilySpec::IntervalBox { d: 1, n }));
    v.push(FamilySpec::IntervalBox { d: 2, n: 16 });
    v.extend([2, 3, 4].map(|r| FamilySpec::HeisenbergBox { r, symmetric: true }));
    v.push(FamilySpec::SubgroupPlusNoise {
        group: "modular n=35 d=1".into(),
        generators: vec!["(5)".into()],
        noise: 0,
        radius: 0,
        seed: 0,
    });
    v
}

/// Generating sets of SL2(F_p): word balls of the standard generators and the
/// proper algebraic subgroups (Borel, unipotent, split torus, its normalizer, center).
fn sl2_grid() -> Vec<FamilySpec> {
    let mut v = Vec::new();
    for p in SL2_PRIMES {
        let group = format!("sl2 p={p}");
        let g = primitive_root(p);
        let gi = pow_mod(g, p - 2, p);
        let diag = format!("[[{g},0],[0,{gi}]]");
        let sub = |gens: Vec<String>| FamilySpec::SubgroupPlusNoise {
            group: group.clone(),
            generators: gens,
            noise: 0,
            radius: 0,
            seed: 0,
        };
        for radius in SL2_BALL_RADII {
            v.push(FamilySpec::CayleyBall {
                group: group.clone(),
                generators: None,
                radius,
            });
        }
        v.push(sub(vec!["[[1,1],[0,1]]".into(), diag.clone()]));
        v.push(sub(vec!["[[1,1],[0,1]]".into()]));
        v.push(sub(vec![diag.clone()]));
        v.push(sub(vec![diag, format!("[[0,1],[{},0]]", p - 1)]));
        v.push(sub(vec![format!("[[{},0],[0,{}]]", p - 1, p - 1)]));
    }
    v
}

pub const SL2_BALL_RADII: [usize; 2] = [3, 4];

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn primitive_root(p: u64) -> u64 {
    (2..p).find(|&g| (1..p - 1).all(|k| pow_mod(g, k, p) != 1)).unwrap_or(1)
}
