//! Heisenberg box r = 8: tower levels, commutator depths and conjugation
//! checks recomputed on integer triples, then the frozen regression values.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use apxgrp_core::tower::{self, SeedFamily, VerifyOptions};
use apxgrp_core::{setalg, FinSet, GroupCtx};

type H = (i64, i64, i64);

fn hmul(a: H, b: H) -> H {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2 + a.0 * b.1)
}

fn hinv(a: H) -> H {
    (-a.0, -a.1, a.0 * a.1 - a.2)
}

fn oracle_levels(r: i64) -> Vec<HashSet<H>> {
    let mut x1 = HashSet::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r * r..=r * r {
                x1.insert((x, y, z));
                x1.insert(hinv((x, y, z)));
            }
        }
    }
    let fourth = |a: H| {
        let sq = hmul(a, a);
        hmul(sq, sq)
    };
    let mut levels = vec![x1.clone()];
    loop {
        let prev = levels.last().unwrap();
        let next: HashSet<H> = x1.iter().copied().filter(|&a| prev.contains(&fourth(a))).collect();
        if next.len() == 1 || next == *prev {
            break;
        }
        levels.push(next);
    }
    levels
}

fn to_set(g: &GroupCtx, s: &HashSet<H>) -> FinSet {
    FinSet::new(g, s.iter().map(|&(x, y, z)| g.from_coordinates(&[x, y, z]).unwrap())).unwrap()
}

fn box_seed(g: &GroupCtx, r: i64) -> FinSet {
    let mut v = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r * r..=r * r {
                v.push(g.from_coordinates(&[x, y, z]).unwrap());
            }
        }
    }
    setalg::symmetrize(&FinSet::new(g, v).unwrap()).unwrap()
}

#[test]
fn box_r8_tower_matches_oracle_and_regression() {
    let g = GroupCtx::heisenberg();
    let oracle = oracle_levels(8);
    let x1 = box_seed(&g, 8);
    assert_eq!(x1, to_set(&g, &oracle[0]));

    let levels = tower::build_tower(&x1, 10).unwrap();
    assert_eq!(levels.len(), oracle.len());
    for (l, o) in levels.iter().zip(&oracle) {
        assert_eq!(*l, to_set(&g, o));
    }
    let rep = tower::verify_tower(&levels).unwrap();
    let big_n = oracle.len();
    let depth = |h: H| (0..big_n).take_while(|&k| oracle[k].contains(&h)).count();

    // [a, b] = (0, 0, a.x b.y - b.x a.y): only the (x, y) shadows matter.
    let shadow = |s: &HashSet<H>| s.iter().map(|a| (a.0, a.1)).collect::<BTreeSet<_>>();
    let shadows: Vec<_> = oracle.iter().map(shadow).collect();
    for n in 1..big_n {
        for m in 1..big_n {
            let mut d = big_n;
            for a in &shadows[n - 1] {
                for b in &shadows[m - 1] {
                    d = d.min(depth((0, 0, a.0 * b.1 - b.0 * a.1)));
                }
            }
            let target = big_n.min(n + m - 1);
            let expect = d.min(target).max(n.max(m) - 1);
            let got = rep.entries(5).find(|p| p.n == n && p.m == Some(m)).unwrap();
            assert_eq!(got.depth, Some(expect), "commutator depth ({n},{m})");
        }
    }

    // a x a^-1 = (x, y, z + a.x y - x a.y).
    for n in 1..big_n {
        let ok = shadows[0].iter().all(|a| {
            oracle[n]
                .iter()
                .all(|&(x, y, z)| oracle[n - 1].contains(&(x, y, z + a.0 * y - x * a.1)))
        });
        assert_eq!(
            rep.entries(4).find(|p| p.n == n).unwrap().pass,
            ok,
            "conjugation n = {n}"
        );
    }

    for n in 1..big_n {
        let next = &oracle[n];
        let ok = next
            .iter()
            .all(|&a| next.iter().all(|&b| oracle[n - 1].contains(&hmul(a, b))));
        assert_eq!(
            rep.entries(2).find(|p| p.n == n).unwrap().pass,
            ok,
            "product nesting n = {n}"
        );
    }

    // Squaring is injective here, so property 7 reduces to 1 ∈ X_N.
    let mut squares: BTreeMap<H, usize> = BTreeMap::new();
    for &a in &oracle[1] {
        *squares.entry(hmul(a, a)).or_default() += 1;
    }
    assert!(squares.values().all(|&c| c == 1));
    assert_eq!(rep.entries(7).next().unwrap().depth, Some(big_n));

    // Each cover is a genuine cover and at least the counting bound.
    for n in 1..big_n {
        let need = oracle[n - 1].len().div_ceil(oracle[n].len());
        assert!(rep.cover_counts[n - 1] >= need);
    }

    // Frozen regression.
    assert_eq!(rep.level_sizes, vec![42465, 965, 9, 3]);
    assert_eq!(rep.n, 4);
    assert_eq!(rep.cover_counts, vec![122, 129, 3]);
    assert_eq!(rep.c, 129);
    assert_eq!(rep.verified_depth, 1);
    let pass: Vec<(u8, usize, Option<usize>, bool)> =
        rep.properties.iter().map(|p| (p.property, p.n, p.m, p.pass)).collect();
    let failing: Vec<_> = pass.iter().filter(|p| !p.3).map(|p| (p.0, p.1, p.2)).collect();
    assert_eq!(
        failing,
        vec![(5, 1, Some(1)), (5, 1, Some(2)), (5, 2, Some(1)), (5, 2, Some(2))]
    );
}

#[test]
fn box_r8_seed_search_regression() {
    let g = GroupCtx::heisenberg();
    let x = box_seed(&g, 8);
    let res = tower::seed_search(&x, &SeedFamily::Default, 10, &VerifyOptions::default()).unwrap();
    assert_eq!(res.label, "dilate-1");
    // Box-like: the seed is {x ∈ X : x^2 ∈ X}, a symmetric box in (x, y) with a sheared z-range.
    let coords: Vec<Vec<i64>> = res.x1.iter().map(|e| g.coordinates(e).unwrap()).collect();
    assert!(coords.iter().all(|c| c[0].abs() <= 4 && c[1].abs() <= 4));
    assert_eq!(res.report.level_sizes, vec![6049, 181, 5]);
    assert_eq!((res.report.verified_depth, res.report.c), (3, 74));
    assert_eq!(res.skipped, vec!["derived".to_string(), "derived-square".to_string()]);
}
