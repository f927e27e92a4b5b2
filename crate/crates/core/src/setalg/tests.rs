use proptest::prelude::*;

use super::*;
use crate::group::GroupCtx;

fn z() -> GroupCtx {
    GroupCtx::lattice(1).unwrap()
}

fn ints(g: &GroupCtx, r: impl IntoIterator<Item = i64>) -> FinSet {
    FinSet::new(g, r.into_iter().map(|i| g.from_coordinates(&[i]).unwrap())).unwrap()
}

fn perms(g: &GroupCtx, lits: &[&str]) -> FinSet {
    FinSet::parse(g, lits.iter().copied()).unwrap()
}

#[test]
fn interval_product_and_power() {
    let g = z();
    let x = ints(&g, 0..10);
    let xx = product(&x, &x).unwrap();
    assert_eq!(xx, ints(&g, 0..19));
    assert_eq!(power(&x, 3).unwrap(), ints(&g, 0..28));
    assert_eq!(power(&x, 1).unwrap(), x);
    assert_eq!(inverse_set(&x).unwrap(), ints(&g, -9..=0));
    assert_eq!(symmetrize(&ints(&g, 1..10)).unwrap(), ints(&g, -9..=9));
}

#[test]
fn nested_loop_oracle_for_products() {
    let g = GroupCtx::symmetric(4).unwrap();
    let all = FinSet::whole_group(&g, 100).unwrap();
    let a = all.filter(|e| e.as_bytes()[0] != 1);
    let b = all.filter(|e| e.as_bytes()[3] == 3);
    let mut expect = Vec::new();
    for x in &a {
        for y in &b {
            let xi = g.permutation_images(x).unwrap();
            let yi = g.permutation_images(y).unwrap();
            let img: Vec<u8> = (0..4).map(|i| xi[yi[i]] as u8).collect();
            expect.push(Elem::from_bytes(&img));
        }
    }
    assert_eq!(product(&a, &b).unwrap(), FinSet::new(&g, expect).unwrap());
}

#[test]
fn trivial_products() {
    let g = GroupCtx::symmetric(3).unwrap();
    let h = perms(&g, &["()", "(1 2)"]);
    assert_eq!(product(&h, &h).unwrap(), h);
    let b = perms(&g, &["(1 2 3)", "(2 3)"]);
    assert_eq!(product(&FinSet::identity(&g), &b).unwrap(), b);
    assert_eq!(symmetrize(&perms(&g, &["(1 2)"])).unwrap(), h);
}

#[test]
fn tripling_of_interval() {
    let g = z();
    let t = tripling(&ints(&g, 0..10)).unwrap();
    assert_eq!(t.numerator, 28);
    assert_eq!(t.ratio, Ratio::new(28, 10));
    assert_eq!(t.cube, None);

    let sym = ints(&g, -4..=4);
    let t = tripling(&sym).unwrap();
    assert_eq!(t.cube, Some(25));
    assert_eq!(power(&sym, 3).unwrap().len(), 25);

    let d = growth_ratio(&ints(&g, 0..10), GrowthStatistic::Doubling).unwrap();
    assert_eq!(d.ratio, Ratio::new(19, 10));
}

#[test]
fn subgroup_tripling_is_one() {
    let g = GroupCtx::symmetric(3).unwrap();
    let a3 = perms(&g, &["()", "(1 2 3)", "(1 3 2)"]);
    assert_eq!(tripling(&a3).unwrap().ratio, Ratio::from_integer(1));
    assert_eq!(power(&a3, 4).unwrap(), a3);
}

#[test]
fn commutators() {
    let h = GroupCtx::heisenberg();
    let mut flat = Vec::new();
    for x in -1..=1 {
        for y in -1..=1 {
            flat.push(h.from_coordinates(&[x, y, 0]).unwrap());
        }
    }
    let a = FinSet::new(&h, flat).unwrap();
    // [(x1,y1,0),(x2,y2,0)] = (0,0,x1 y2 - x2 y1)
    let expect = FinSet::new(&h, (-2..=2).map(|z| h.from_coordinates(&[0, 0, z]).unwrap())).unwrap();
    assert_eq!(commutator_set(&a, &a).unwrap(), expect);

    let s3 = GroupCtx::symmetric(3).unwrap();
    let all = FinSet::whole_group(&s3, 10).unwrap();
    assert_eq!(
        commutator_set(&all, &all).unwrap(),
        perms(&s3, &["()", "(1 2 3)", "(1 3 2)"])
    );

    let g = GroupCtx::lattice(2).unwrap();
    let b = FinSet::new(
        &g,
        [
            g.from_coordinates(&[1, 2]).unwrap(),
            g.from_coordinates(&[-3, 0]).unwrap(),
        ],
    )
    .unwrap();
    assert_eq!(commutator_set(&b, &b).unwrap(), FinSet::identity(&g));
}

#[test]
fn conjugacy_sets() {
    let g = GroupCtx::symmetric(3).unwrap();
    let all = FinSet::whole_group(&g, 10).unwrap();
    let a = g.parse("(1 2)").unwrap();
    assert_eq!(conj_set(&a, &all).unwrap(), perms(&g, &["(1 2)", "(1 3)", "(2 3)"]));
    assert_eq!(conj_set(&g.identity(), &all).unwrap(), FinSet::identity(&g));

    let zz = z();
    let x = ints(&zz, -3..=3);
    let five = zz.from_coordinates(&[5]).unwrap();
    assert_eq!(conj_set(&five, &x).unwrap().len(), 1);
    let r = conj_prod_size(&[five.clone(), five], &x, DEFAULT_CONJ_CAP).unwrap();
    assert_eq!(r, ConjProductSize { size: 1, capped: false });
}

#[test]
fn a5_class_product_matches_oracle() {
    let g = GroupCtx::symmetric(5).unwrap();
    let all = FinSet::whole_group(&g, 200).unwrap();
    let a5 = all.filter(|e| sign(&g.permutation_images(e).unwrap()) == 1);
    assert_eq!(a5.len(), 60);
    let c = g.parse("(1 2 3 4 5)").unwrap();

    // Oracle: brute-force class and product via raw image composition.
    let imgs: Vec<Vec<usize>> = a5.iter().map(|e| g.permutation_images(e).unwrap()).collect();
    let ci = g.permutation_images(&c).unwrap();
    let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { (0..5).map(|i| s[t[i]]).collect() };
    let invert = |s: &[usize]| -> Vec<usize> {
        let mut v = vec![0; 5];
        for (i, &x) in s.iter().enumerate() {
            v[x] = i;
        }
        v
    };
    let mut class: Vec<Vec<usize>> = imgs.iter().map(|x| compose(&compose(&invert(x), &ci), x)).collect();
    class.sort();
    class.dedup();
    assert_eq!(class.len(), 12);
    let mut prod: Vec<Vec<usize>> = Vec::new();
    for s in &class {
        for t in &class {
            prod.push(compose(s, t));
        }
    }
    prod.sort();
    prod.dedup();

    let r = conj_prod_size(&[c.clone(), c.clone()], &a5, DEFAULT_CONJ_CAP).unwrap();
    assert_eq!(
        r,
        ConjProductSize {
            size: prod.len(),
            capped: false
        }
    );
    // identity, both 5-cycle classes and the 3-cycles; the double transpositions are missed.
    assert_eq!(prod.len(), 45);

    let capped = conj_prod_size(&[c.clone(), c], &a5, 20).unwrap();
    assert!(capped.capped && capped.size > 20);
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

#[test]
fn conj_with_inverse_variant() {
    let g = GroupCtx::symmetric(4).unwrap();
    let x = perms(&g, &["()", "(1 4)"]);
    let a = g.parse("(1 2 3)").unwrap();
    let plain = conj_set_variant(&a, &x, ConjVariant::Plain).unwrap();
    let both = conj_set_variant(&a, &x, ConjVariant::WithInverse).unwrap();
    assert_eq!(plain.len(), 2);
    assert_eq!(both.len(), 4);
    assert!(plain.is_subset(&both));
}

#[test]
fn ctx_mismatch_and_empty_inputs() {
    let a = ints(&z(), 0..3);
    let b = FinSet::identity(&GroupCtx::lattice(2).unwrap());
    assert_eq!(product(&a, &b).unwrap_err(), Error::CtxMismatch);
    let empty = FinSet::new(&z(), []).unwrap();
    assert!(matches!(product(&a, &empty), Err(Error::Empty(_))));
    assert!(power(&a, 0).is_err());
    assert!(conj_prod_size(&[], &a, 10).is_err());
}

#[test]
fn gelander_box_doubling() {
    for d in 1..=3usize {
        let g = GroupCtx::lattice(d).unwrap();
        for n in [1i64, 2, 3] {
            let mut pts = vec![vec![]];
            for _ in 0..d {
                pts = pts
                    .into_iter()
                    .flat_map(|p: Vec<i64>| {
                        (-n..=n).map(move |c| {
                            let mut q = p.clone();
                            q.push(c);
                            q
                        })
                    })
                    .collect();
            }
            let x = FinSet::new(&g, pts.iter().map(|p| g.from_coordinates(p).unwrap())).unwrap();
            assert_eq!(x.len(), (2 * n as usize + 1).pow(d as u32));
            assert_eq!(product(&x, &x).unwrap().len(), (4 * n as usize + 1).pow(d as u32));
        }
    }
}

#[test]
fn text_round_trip() {
    let g = GroupCtx::sl2(5).unwrap();
    let x = FinSet::whole_group(&g, 1000).unwrap().filter(|e| e.as_bytes()[4] == 0);
    let back = FinSet::from_text(&x.to_text()).unwrap();
    assert_eq!(back, x);
    assert!(FinSet::from_text("(1,2)\n").is_err());
}

fn small_perm_set() -> impl Strategy<Value = FinSet> {
    let g = GroupCtx::symmetric(4).unwrap();
    let all = FinSet::whole_group(&g, 100).unwrap().into_vec();
    proptest::sample::subsequence(all, 1..10).prop_map(move |v| FinSet::new(&g, v).unwrap())
}

fn small_heis_set() -> impl Strategy<Value = FinSet> {
    proptest::collection::vec((-3i64..=3, -3i64..=3, -5i64..=5), 1..12).prop_map(|v| {
        let h = GroupCtx::heisenberg();
        FinSet::new(
            &h,
            v.into_iter().map(|(a, b, c)| h.from_coordinates(&[a, b, c]).unwrap()),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_reverses_products(a in small_heis_set(), b in small_heis_set()) {
        let lhs = inverse_set(&product(&a, &b).unwrap()).unwrap();
        let rhs = product(&inverse_set(&b).unwrap(), &inverse_set(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(inverse_set(&inverse_set(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn identity_in_b_keeps_a(a in small_perm_set(), b in small_perm_set()) {
        let b1 = b.union(&FinSet::identity(a.ctx())).unwrap();
        let ab = product(&a, &b1).unwrap();
        prop_assert!(a.is_subset(&ab));
        prop_assert!(ab.len() <= a.len() * b1.len());
    }

    #[test]
    fn symmetrized_powers_are_monotone(x in small_heis_set()) {
        let s = symmetrize(&x).unwrap();
        prop_assert!(s.is_symmetric().unwrap() && s.contains_identity());
        let mut prev = s.clone();
        for n in 2..=3 {
            let next = power(&s, n).unwrap();
            prop_assert!(prev.is_subset(&next));
            prev = next;
        }
    }

    #[test]
    fn shell_powers_match_repeated_products(x in small_heis_set(), with_one in any::<bool>()) {
        let x = if with_one { x.union(&FinSet::identity(x.ctx())).unwrap() } else { x };
        let ps = powers(&x, 4).unwrap();
        let mut acc = x.clone();
        prop_assert_eq!(&ps[0], &x);
        for p in &ps[1..] {
            acc = product(&acc, &x).unwrap();
            prop_assert_eq!(p, &acc);
        }
    }

    #[test]
    fn product_independent_of_partition(a in small_heis_set(), b in small_heis_set(), block in 1usize..6) {
        prop_assert_eq!(product_blocked(&a, &b, block).unwrap(), product(&a, &b).unwrap());
    }

    #[test]
    fn ruzsa_triple_product_growth(x in small_perm_set()) {
        let s = symmetrize(&x).unwrap();
        let cube = power(&s, 3).unwrap().len() as u128;
        let size = s.len() as u128;
        let mut p = power(&s, 3).unwrap();
        for n in 4..=6u32 {
            p = product(&p, &s).unwrap();
            // |X^n| <= t^(n-2) |X| with t = |X^3|/|X|, cleared of denominators.
            prop_assert!(p.len() as u128 * size.pow(n - 3) <= cube.pow(n - 2));
        }
    }
}
