use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::*;
use crate::group::GroupCtx;

fn ints(g: &GroupCtx, r: impl IntoIterator<Item = i64>) -> FinSet {
    FinSet::new(g, r.into_iter().map(|i| g.from_coordinates(&[i]).unwrap())).unwrap()
}

fn sign(p: &[usize]) -> i32 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn a5() -> FinSet {
    let g = GroupCtx::symmetric(5).unwrap();
    FinSet::whole_group(&g, 200)
        .unwrap()
        .filter(|e| sign(&g.permutation_images(e).unwrap()) == 1)
}

#[test]
fn closure_examples() {
    let z10 = GroupCtx::modular(10, 1).unwrap();
    let r = group_closure(&ints(&z10, [2]), 100).unwrap();
    assert_eq!(r.closure.unwrap(), ints(&z10, [0, 2, 4, 6, 8]));
    assert_eq!(r.steps, 2);

    let h = GroupCtx::heisenberg();
    let r = group_closure(&FinSet::identity(&h), 10).unwrap();
    assert_eq!((r.size, r.steps, r.exceeded), (1, 0, false));

    let s3 = GroupCtx::symmetric(3).unwrap();
    let x = FinSet::parse(&s3, ["(1 2)", "(1 2 3)"]).unwrap();
    let r = group_closure(&x, 100).unwrap();
    assert_eq!(r.closure.unwrap(), FinSet::whole_group(&s3, 10).unwrap());
    assert_eq!(generated_subgroup(&x, 100).unwrap().len(), 6);

    let z = GroupCtx::lattice(1).unwrap();
    let r = group_closure(&ints(&z, [1]), 50).unwrap();
    assert!(r.exceeded && r.closure.is_none() && r.size > 50);
    assert!(generated_subgroup(&ints(&z, [1]), 50).unwrap_err().is_budget());
}

#[test]
fn closure_agrees_with_bfs() {
    let g = GroupCtx::sl2(7).unwrap();
    let x = FinSet::parse(&g, ["[[1,1],[0,1]]", "[[1,0],[1,1]]"]).unwrap();
    let bfs = generated_subgroup(&x, 1000).unwrap();
    assert_eq!(bfs.len(), 336);
    assert_eq!(group_closure(&x, 1000).unwrap().closure.unwrap(), bfs);
}

#[test]
fn near_subgroup_on_cosets() {
    let g = GroupCtx::modular(35, 1).unwrap();
    let h = ints(&g, (0..7).map(|i| 5 * i));
    let rep = near_subgroup_probe(&h).unwrap();
    assert_eq!(
        (rep.verdict, rep.cosets, rep.s.clone()),
        (NearSubgroupVerdict::Subgroup, Some(1), h.clone())
    );
    let coset = ints(&g, (0..7).map(|i| 5 * i + 1));
    let rep = near_subgroup_probe(&coset).unwrap();
    assert_eq!((rep.verdict, rep.cosets), (NearSubgroupVerdict::Subgroup, Some(1)));
    assert_eq!(rep.s, h);
    assert!(rep.normalized_by_x);
}

#[test]
fn near_subgroup_cosets_counted_on_the_right() {
    let g = GroupCtx::symmetric(3).unwrap();
    // S = {(), (1 2)}; X meets the right cosets S and S(1 3).
    let x = FinSet::parse(&g, ["()", "(1 2)", "(1 3)"]).unwrap();
    let rep = near_subgroup_probe(&x).unwrap();
    assert_eq!(rep.verdict, NearSubgroupVerdict::Subgroup);
    // (X^-1 X)^2 already generates S3 here.
    assert_eq!(rep.s_size, 6);
    assert_eq!(rep.cosets, Some(1));

    let x = FinSet::parse(&g, ["(1 2)", "(1 2 3)"]).unwrap();
    let rep = near_subgroup_probe(&x).unwrap();
    let s = rep.s.clone();
    let oracle: HashSet<_> = x
        .iter()
        .map(|a| s.iter().map(|e| g.mul(e, a).unwrap()).collect::<BTreeSet<_>>())
        .collect();
    if rep.verdict == NearSubgroupVerdict::Subgroup {
        assert_eq!(rep.cosets, Some(oracle.len()));
    }
}

#[test]
fn near_subgroup_on_interval() {
    let z = GroupCtx::lattice(1).unwrap();
    let rep = near_subgroup_probe(&ints(&z, 0..10)).unwrap();
    assert_eq!(rep.verdict, NearSubgroupVerdict::NotClosed);
    assert_eq!(rep.s, ints(&z, -18..=18));
    // Interval arithmetic: SS = [-36, 36].
    assert_eq!(rep.defect, Some(73 - 37));
    let w = rep.witness.unwrap();
    let v: Vec<i64> = w
        .iter()
        .map(|s| s.trim_matches(|c| c == '(' || c == ')').parse().unwrap())
        .collect();
    assert_eq!(v[0] + v[1], v[2]);
    assert!(v[2].abs() > 18 && v[0].abs() <= 18 && v[1].abs() <= 18);
    assert!(rep.normalized_by_x);
}

#[test]
fn perfectness_a5_pairs_match_oracle() {
    let x = a5();
    let g = x.ctx().clone();
    let imgs: Vec<Vec<usize>> = x.iter().map(|e| g.permutation_images(e).unwrap()).collect();
    let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { (0..5).map(|i| s[t[i]]).collect() };
    let invert = |s: &[usize]| -> Vec<usize> {
        let mut v = vec![0; 5];
        for (i, &k) in s.iter().enumerate() {
            v[k] = i;
        }
        v
    };
    let classes: Vec<BTreeSet<Vec<usize>>> = imgs
        .iter()
        .map(|a| imgs.iter().map(|y| compose(&compose(&invert(y), a), y)).collect())
        .collect();
    let mut hits = 0u64;
    for c1 in &classes {
        for c2 in &classes {
            let prod: BTreeSet<Vec<usize>> = c1.iter().flat_map(|s| c2.iter().map(move |t| compose(s, t))).collect();
            hits += u64::from(prod.len() * 2 >= 60);
        }
    }
    let rep = perfectness_stat(&x, 2, 2, 1, 0).unwrap();
    assert!(rep.exhaustive);
    assert_eq!(rep.trials, 3600);
    assert_eq!(rep.successes, hits);
    assert_eq!(rep.radius, 0.0);
    // Frozen: every pair of non-identity elements succeeds.
    assert_eq!(hits, 59 * 59);
}

#[test]
fn perfectness_small_cases() {
    let s3 = GroupCtx::symmetric(3).unwrap();
    let all = FinSet::whole_group(&s3, 10).unwrap();
    let rep = perfectness_stat(&all, 1, 1, 10, 0).unwrap();
    assert_eq!((rep.successes, rep.p_hat), (0, 0.0));

    let z = GroupCtx::lattice(1).unwrap();
    let rep = perfectness_stat(&ints(&z, -5..=5), 3, 4, 10, 0).unwrap();
    assert_eq!(rep.successes, 0);

    assert!(perfectness_stat(&all, 0, 1, 1, 0).is_err());
}

#[test]
fn perfectness_sampling_is_reproducible() {
    let x = a5();
    let a = perfectness_stat(&x, 4, 3, 600, 7).unwrap();
    let b = perfectness_stat(&x, 4, 3, 600, 7).unwrap();
    assert!(!a.exhaustive);
    assert_eq!(a, b);
    assert!(a.radius > 0.0 && a.radius < 0.1);
    let c = perfectness_stat(&x, 4, 3, 600, 8).unwrap();
    assert_eq!(c.trials, 600);
}

#[test]
fn sampled_and_exhaustive_agree() {
    let x = a5();
    let exact = perfectness_stat(&x, 3, 2, 1, 0).unwrap();
    assert!(exact.exhaustive);
    let opts = PerfectnessOptions {
        exhaustive_limit: 0,
        ..Default::default()
    };
    let sampled = perfectness_stat_with(&x, 3, 2, 2000, 3, &opts).unwrap();
    assert!(!sampled.exhaustive);
    assert!(
        (sampled.p_hat - exact.p_hat).abs() <= sampled.radius,
        "{sampled:?} vs {}",
        exact.p_hat
    );
}

#[test]
fn wilson_radius_values() {
    assert!((wilson_radius(50, 100) - 0.0962).abs() < 1e-3);
    assert!(wilson_radius(0, 100) > 0.03 && wilson_radius(0, 100) < 0.04);
    assert!(wilson_radius(500, 10_000) < wilson_radius(50, 1000));
}

#[test]
fn word_depth_examples() {
    let h = GroupCtx::heisenberg();
    let id = FinSet::identity(&h);
    let a = h.from_coordinates(&[1, 0, 0]).unwrap();
    assert_eq!(word_depth(&id, &[a], 5, DEFAULT_WORD_CAP).unwrap().depth, Some(1));

    // Even first coordinates only: (1,0) is out of reach of (2,0) and one b.
    let z2 = GroupCtx::lattice(2).unwrap();
    let mut pts = Vec::new();
    for x in -1..=1 {
        for y in -1..=1 {
            pts.push(z2.from_coordinates(&[x, y]).unwrap());
        }
    }
    let x = FinSet::new(&z2, pts).unwrap();
    let rep = word_depth(&x, &[z2.from_coordinates(&[2, 0]).unwrap()], 8, DEFAULT_WORD_CAP).unwrap();
    assert_eq!(rep.depth, None);
    assert!(rep.exact_b_search);
}

/// Oracle: plain breadth-first search over word lengths for each b.
fn s3_oracle(a: &[usize]) -> usize {
    let all: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { (0..3).map(|i| s[t[i]]).collect() };
    let invert = |s: &[usize]| -> Vec<usize> {
        let mut v = vec![0; 3];
        for (i, &k) in s.iter().enumerate() {
            v[k] = i;
        }
        v
    };
    let class: BTreeSet<Vec<usize>> = all.iter().map(|y| compose(&compose(&invert(y), a), y)).collect();
    let mut best = usize::MAX;
    for b in &all {
        let mut letters = class.clone();
        letters.insert(b.clone());
        letters.insert(vec![0, 1, 2]);
        let mut words = letters.clone();
        let mut n = 1;
        while words.len() < 6 && n < 10 {
            words = words
                .iter()
                .flat_map(|w| letters.iter().map(move |l| compose(w, l)))
                .collect();
            n += 1;
        }
        if words.len() == 6 {
            best = best.min(n);
        }
    }
    best
}

#[test]
fn word_depth_s3_matches_bfs() {
    let g = GroupCtx::symmetric(3).unwrap();
    let x = FinSet::whole_group(&g, 10).unwrap();
    let a = g.parse("(1 2 3)").unwrap();
    let rep = word_depth(&x, std::slice::from_ref(&a), 10, DEFAULT_WORD_CAP).unwrap();
    let expect = s3_oracle(&g.permutation_images(&a).unwrap());
    assert_eq!(rep.depth, Some(expect));
    assert_eq!(expect, 2);
    assert_eq!(rep.b_elements.len(), 1);
}

#[test]
fn word_depth_greedy_branch() {
    let z = GroupCtx::lattice(1).unwrap();
    let x = ints(&z, -200..=200);
    let a: Vec<Elem> = (1..=3).map(|i| z.from_coordinates(&[i]).unwrap()).collect();
    // C(401, 3) candidate b-sets is far past the exhaustive limit.
    let rep = word_depth(&x, &a, 400, DEFAULT_WORD_CAP).unwrap();
    assert!(!rep.exact_b_search);
    // One negative b already reaches the rest of X.
    assert_eq!(rep.b_elements.len(), 1);
    assert!(rep.depth.is_some());
}

fn f_set(g: &GroupCtx, vs: &[[i64; 8]]) -> FinSet {
    FinSet::new(g, vs.iter().map(|v| g.from_coordinates(v).unwrap())).unwrap()
}

fn span_f2(basis: &[[i64; 8]]) -> Vec<[i64; 8]> {
    let mut out = vec![[0i64; 8]];
    for b in basis {
        let more: Vec<[i64; 8]> = out.iter().map(|v| std::array::from_fn(|i| (v[i] + b[i]) % 2)).collect();
        out.extend(more);
        out.sort();
        out.dedup();
    }
    out
}

fn unit(i: usize) -> [i64; 8] {
    let mut v = [0; 8];
    v[i] = 1;
    v
}

#[test]
fn freiman_on_affine_subspace() {
    let g = GroupCtx::modular(2, 8).unwrap();
    let v = span_f2(&[unit(0), unit(1), unit(2)]);
    let shift = unit(5);
    let affine: Vec<[i64; 8]> = v
        .iter()
        .map(|x| std::array::from_fn(|i| (x[i] + shift[i]) % 2))
        .collect();
    let rep = freiman_exponent_probe(&f_set(&g, &affine), 4).unwrap();
    assert_eq!(rep.verdict, FreimanVerdict::Stabilized);
    assert_eq!(rep.subgroup.unwrap(), f_set(&g, &v));
    assert_eq!(rep.e, Some(1));
}

#[test]
fn freiman_subspace_plus_point() {
    let g = GroupCtx::modular(2, 8).unwrap();
    let v = span_f2(&[unit(0), unit(1), unit(2), unit(3)]);
    let p = [0, 0, 0, 0, 1, 1, 0, 1];
    let mut x = v.clone();
    x.push(p);
    let rep = freiman_exponent_probe(&f_set(&g, &x), 8).unwrap();
    // Oracle: span of V and p.
    let oracle = span_f2(&[unit(0), unit(1), unit(2), unit(3), p]);
    assert_eq!(rep.subgroup.clone().unwrap(), f_set(&g, &oracle));
    assert_eq!((rep.x_by_s, rep.s_by_x), (Some(1), Some(2)));
    assert_eq!(rep.e, Some(2));

    assert_eq!(
        freiman_exponent_probe(&f_set(&g, &x), 1).unwrap().verdict,
        FreimanVerdict::BudgetExceeded
    );
    let z = GroupCtx::lattice(1).unwrap();
    assert!(freiman_exponent_probe(&ints(&z, 0..3), 4).is_err());
}

/// Span over F_3 by repeated addition of generators.
fn span_f3(gens: &[[i64; 6]]) -> BTreeSet<[i64; 6]> {
    let mut out = BTreeSet::from([[0i64; 6]]);
    loop {
        let more: Vec<[i64; 6]> = out
            .iter()
            .flat_map(|v| gens.iter().map(move |g| std::array::from_fn(|i| (v[i] + g[i]) % 3)))
            .collect();
        let before = out.len();
        out.extend(more);
        if out.len() == before {
            return out;
        }
    }
}

#[test]
fn freiman_ternary_subspace_with_shifts() {
    let g = GroupCtx::modular(3, 6).unwrap();
    let e = |i: usize| -> [i64; 6] { std::array::from_fn(|j| i64::from(i == j)) };
    let v = span_f3(&[e(0), e(1), e(2)]);
    let s = e(3);
    let mut pool: Vec<[i64; 6]> = Vec::new();
    for x in &v {
        for k in 0..3 {
            let y: [i64; 6] = std::array::from_fn(|i| (x[i] + k * s[i]) % 3);
            let neg: [i64; 6] = std::array::from_fn(|i| (3 - y[i]) % 3);
            if y != [0; 6] && y < neg {
                pool.push(y);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    pool.shuffle(&mut rng);
    let mut x: Vec<[i64; 6]> = Vec::new();
    for y in pool.into_iter().take(20) {
        x.push(y);
        x.push(std::array::from_fn(|i| (3 - y[i]) % 3));
    }
    let xs = FinSet::new(&g, x.iter().map(|v| g.from_coordinates(v).unwrap())).unwrap();
    assert_eq!(xs.len(), 40);
    let rep = freiman_exponent_probe(&xs, 8).unwrap();

    // Oracle: the closure of (X - X) + (X - X) is the span of the differences.
    let diffs: Vec<[i64; 6]> = x
        .iter()
        .flat_map(|a| x.iter().map(move |b| std::array::from_fn(|i| (a[i] + 3 - b[i]) % 3)))
        .collect();
    let span = span_f3(&diffs);
    let sub = rep.subgroup.clone().unwrap();
    assert_eq!(sub.len(), span.len());
    assert!(span.iter().all(|v| sub.contains(&g.from_coordinates(v).unwrap())));
    // Cosets of the span met by X; greedy covering by a subgroup is exact.
    let cosets: BTreeSet<[i64; 6]> = x
        .iter()
        .map(|a| {
            span.iter()
                .map(|v| std::array::from_fn(|i| (a[i] + v[i]) % 3))
                .min()
                .unwrap()
        })
        .collect();
    assert_eq!(rep.x_by_s, Some(cosets.len()));
    let s_by_x = rep.s_by_x.unwrap();
    assert!(s_by_x >= span.len().div_ceil(40));
    assert_eq!((span.len(), cosets.len(), s_by_x, rep.e), (81, 1, 4, Some(4)));
}

fn small_s4_set() -> impl Strategy<Value = FinSet> {
    let g = GroupCtx::symmetric(4).unwrap();
    let all = g.enumerate(100).unwrap();
    proptest::sample::subsequence(all, 1..6).prop_map(move |v| FinSet::new(&g, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn subgroup_verdict_is_exact(x in small_s4_set()) {
        let rep = near_subgroup_probe(&x).unwrap();
        if rep.verdict == NearSubgroupVerdict::Subgroup {
            prop_assert_eq!(setalg::product(&rep.s, &rep.s).unwrap(), rep.s.clone());
            prop_assert_eq!(setalg::inverse_set(&rep.s).unwrap(), rep.s.clone());
        } else {
            prop_assert!(rep.defect.unwrap() > 0);
        }
    }

    #[test]
    fn word_depth_monotone(x in small_s4_set(), i in 0usize..24, j in 0usize..24) {
        let g = x.ctx().clone();
        let all = g.enumerate(100).unwrap();
        let one = word_depth(&x, &all[i..=i], 12, DEFAULT_WORD_CAP).unwrap().depth;
        let two = word_depth(&x, &[all[i].clone(), all[j].clone()], 12, DEFAULT_WORD_CAP).unwrap().depth;
        let key = |d: Option<usize>| d.unwrap_or(usize::MAX);
        prop_assert!(key(two) <= key(one));
    }

    #[test]
    fn freiman_subgroup_closed(bits in proptest::collection::vec(0u8..=255, 1..12)) {
        let g = GroupCtx::modular(2, 8).unwrap();
        let x = FinSet::new(&g, bits.iter().map(|b| g.from_coordinates(&std::array::from_fn::<i64, 8, _>(|i| i64::from((b >> i) & 1))).unwrap())).unwrap();
        let rep = freiman_exponent_probe(&x, 256).unwrap();
        let s = rep.subgroup.unwrap();
        prop_assert_eq!(setalg::product(&s, &s).unwrap(), s.clone());
        let e = rep.e.unwrap();
        prop_assert!(rep.x_by_s.unwrap() <= e && rep.s_by_x.unwrap() <= e);
    }
}
