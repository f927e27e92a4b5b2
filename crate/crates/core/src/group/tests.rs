use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn all_backends() -> Vec<GroupCtx> {
    vec![
        GroupCtx::lattice(2).unwrap(),
        GroupCtx::modular(12, 3).unwrap(),
        GroupCtx::symmetric(6).unwrap(),
        GroupCtx::sl2(13).unwrap(),
        GroupCtx::gl2(7).unwrap(),
        GroupCtx::heisenberg(),
        GroupCtx::cayley("ab", &[]).unwrap(),
        GroupCtx::cayley("ab", &["ba=ab", "bA=Ab", "Ba=aB", "BA=AB"]).unwrap(),
    ]
}

#[test]
fn s3_multiplication_matches_image_table() {
    let g = GroupCtx::symmetric(3).unwrap();
    // (12)(123) = (23) under (s t)(i) = s(t(i))
    let prod = g.mul(&g.parse("(1 2)").unwrap(), &g.parse("(1 2 3)").unwrap()).unwrap();
    assert_eq!(g.format(&prod), "(2 3)");

    // Full 6x6 table against composition of raw image vectors.
    let elems = g.enumerate(10).unwrap();
    assert_eq!(elems.len(), 6);
    for s in &elems {
        for t in &elems {
            let si = g.permutation_images(s).unwrap();
            let ti = g.permutation_images(t).unwrap();
            let expect: Vec<usize> = (0..3).map(|i| si[ti[i]]).collect();
            assert_eq!(g.permutation_images(&g.mul(s, t).unwrap()).unwrap(), expect);
        }
    }
}

fn unitriangular(v: [i64; 3]) -> [[i64; 3]; 3] {
    [[1, v[0], v[2]], [0, 1, v[1]], [0, 0, 1]]
}

fn matmul3(a: [[i64; 3]; 3], b: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

#[test]
fn heisenberg_matches_unitriangular_matrices() {
    let h = GroupCtx::heisenberg();
    let prod = h
        .mul(&h.parse("(1,0,0)").unwrap(), &h.parse("(0,1,0)").unwrap())
        .unwrap();
    assert_eq!(h.format(&prod), "(1,1,1)");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let a = h.random_element(&mut rng, 20).unwrap();
        let b = h.random_element(&mut rng, 20).unwrap();
        let ca: [i64; 3] = h.coordinates(&a).unwrap().try_into().unwrap();
        let cb: [i64; 3] = h.coordinates(&b).unwrap().try_into().unwrap();
        let m = matmul3(unitriangular(ca), unitriangular(cb));
        let got = h.coordinates(&h.mul(&a, &b).unwrap()).unwrap();
        assert_eq!(got, vec![m[0][1], m[1][2], m[0][2]]);

        let inv = h.coordinates(&h.inv(&a).unwrap()).unwrap();
        assert_eq!(inv, vec![-ca[0], -ca[1], -ca[2] + ca[0] * ca[1]]);
        let id = matmul3(unitriangular(ca), unitriangular(inv.try_into().unwrap()));
        assert_eq!(id, unitriangular([0, 0, 0]));
    }
}

#[test]
fn sl2_inverse_by_adjugate() {
    let g = GroupCtx::sl2(5).unwrap();
    let u = g.parse("[[1,1],[0,1]]").unwrap();
    let ui = g.inv(&u).unwrap();
    assert_eq!(g.format(&ui), "[[1,4],[0,1]]");
    assert!(g.is_identity(&g.mul(&u, &ui).unwrap()));
}

#[test]
fn identities() {
    assert_eq!(
        GroupCtx::lattice(3)
            .unwrap()
            .format(&GroupCtx::lattice(3).unwrap().identity()),
        "(0,0,0)"
    );
    let s = GroupCtx::symmetric(4).unwrap();
    assert_eq!(s.format(&s.identity()), "()");
    let m = GroupCtx::sl2(7).unwrap();
    assert_eq!(m.format(&m.identity()), "[[1,0],[0,1]]");
    for g in all_backends() {
        let e = g.identity();
        assert_eq!(g.inv(&e).unwrap(), e);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = g.random_element(&mut rng, 5).unwrap();
        assert_eq!(g.mul(&e, &a).unwrap(), a);
        assert_eq!(g.mul(&a, &e).unwrap(), a);
    }
}

#[test]
fn sampled_group_laws() {
    for g in all_backends() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10_000 {
            let a = g.random_element(&mut rng, 50).unwrap();
            let b = g.random_element(&mut rng, 50).unwrap();
            let c = g.random_element(&mut rng, 50).unwrap();
            g.validate(&a).unwrap();
            let left = g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap();
            let right = g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right, "associativity in {}", g.descriptor());
            let ai = g.inv(&a).unwrap();
            assert!(g.is_identity(&g.mul(&a, &ai).unwrap()));
            assert_eq!(g.inv(&ai).unwrap(), a);
            // Canonical: (ab)^-1 computed two ways is byte-identical.
            assert_eq!(
                g.inv(&g.mul(&a, &b).unwrap()).unwrap(),
                g.mul(&g.inv(&b).unwrap(), &ai).unwrap()
            );
        }
    }
}

#[test]
fn literals_round_trip() {
    for g in all_backends() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = g.random_element(&mut rng, 9).unwrap();
            let s = g.format(&a);
            assert_eq!(g.parse(&s).unwrap(), a, "{s} in {}", g.descriptor());
        }
    }
}

#[test]
fn lattice_overflow_is_an_error() {
    let z = GroupCtx::lattice(1).unwrap();
    let big = z.parse(&format!("({})", i64::MAX)).unwrap();
    assert_eq!(z.mul(&big, &big), Err(Error::Overflow));
    let h = GroupCtx::heisenberg();
    let a = h.parse(&format!("({},0,0)", i64::MAX / 2)).unwrap();
    let b = h.parse("(0,3,0)").unwrap();
    assert_eq!(h.mul(&a, &b), Err(Error::Overflow));
}

#[test]
fn encoding_mismatch_detected() {
    let z2 = GroupCtx::lattice(2).unwrap();
    let z3 = GroupCtx::lattice(3).unwrap();
    assert!(matches!(
        z2.mul(&z2.identity(), &z3.identity()),
        Err(Error::EncodingMismatch(_))
    ));
    let s = GroupCtx::symmetric(3).unwrap();
    assert!(s.validate(&Elem::from_bytes(&[0, 0, 1])).is_err());
    assert!(GroupCtx::sl2(5).unwrap().parse("[[2,0],[0,2]]").is_err());
    assert!(GroupCtx::gl2(5).unwrap().parse("[[2,0],[0,2]]").is_ok());
    assert_ne!(z2, z3);
    assert_eq!(z2, GroupCtx::lattice(2).unwrap());
}

#[test]
fn parameter_validation() {
    assert!(GroupCtx::sl2(6).is_err());
    assert!(GroupCtx::gl2(1).is_err());
    assert!(GroupCtx::lattice(0).is_err());
    assert!(GroupCtx::modular(0, 2).is_err());
    assert!(GroupCtx::symmetric(0).is_err());
    assert!(GroupCtx::cayley("aa", &[]).is_err());
    assert!(GroupCtx::cayley("ab", &["ab=ba"]).is_err(), "rule must decrease");
}

#[test]
fn non_confluent_rewriting_rejected() {
    let err = GroupCtx::cayley("ab", &["ba=ab"]).unwrap_err();
    assert!(err.to_string().contains("confluent"), "{err}");
}

#[test]
fn free_abelian_rewriting_normal_forms() {
    let g = GroupCtx::cayley("ab", &["ba=ab", "bA=Ab", "Ba=aB", "BA=AB"]).unwrap();
    let w = g.parse("baBAab").unwrap();
    assert_eq!(g.format(&w), "ab");
    let x = g.parse("bbaa").unwrap();
    let y = g.parse("abab").unwrap();
    assert_eq!(x, y);
    assert_eq!(
        g.commutator(&g.parse("a").unwrap(), &g.parse("b").unwrap()).unwrap(),
        g.identity()
    );
}

#[test]
fn free_group_reduction() {
    let g = GroupCtx::cayley("ab", &[]).unwrap();
    let w = g.parse("abBA").unwrap();
    assert!(g.is_identity(&w));
    assert_eq!(g.format(&g.parse("abAba").unwrap()), "abAba");
    assert!(g.validate(&Elem::from_bytes(&[0, 1])).is_err());
}

#[test]
fn cycle_notation() {
    let g = GroupCtx::symmetric(5).unwrap();
    let a = g.parse("(1 2)(3 4 5)").unwrap();
    assert_eq!(g.format(&a), "(1 2)(3 4 5)");
    // (1 2)(2 3) = (1 2 3): apply (2 3) first.
    assert_eq!(g.format(&g.parse("(1 2)(2 3)").unwrap()), "(1 2 3)");
    assert_eq!(g.pow(&a, 6).unwrap(), g.identity());
    assert!(g.parse("(1 6)").is_err());
    assert!(g.parse("(1 1)").is_err());
}

#[test]
fn enumeration_sizes() {
    assert_eq!(GroupCtx::symmetric(5).unwrap().enumerate(1000).unwrap().len(), 120);
    assert_eq!(GroupCtx::modular(3, 4).unwrap().enumerate(1000).unwrap().len(), 81);
    for p in [2u64, 3, 5, 7] {
        let sl = GroupCtx::sl2(p).unwrap().enumerate(1 << 20).unwrap();
        assert_eq!(sl.len() as u64, p * (p * p - 1));
        let gl = GroupCtx::gl2(p).unwrap().enumerate(1 << 20).unwrap();
        assert_eq!(gl.len() as u64, (p * p - 1) * (p * p - p));
    }
    assert!(GroupCtx::heisenberg().enumerate(10).is_err());
    assert!(GroupCtx::symmetric(8).unwrap().enumerate(100).unwrap_err().is_budget());
}

#[test]
fn descriptor_round_trip() {
    for g in all_backends() {
        assert_eq!(GroupCtx::from_descriptor(&g.descriptor()).unwrap(), g);
    }
    let e = GroupCtx::symmetric(4).unwrap().with_exponent(12).unwrap();
    assert_eq!(GroupCtx::from_descriptor(&e.descriptor()).unwrap().exponent(), Some(12));
}
