use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::{BigRational, Ratio};
use proptest::prelude::*;
use qhv_core::actions::{sl2_v2_triple, sl2_v4_triple, Derivation, TorusAction};
use qhv_core::degenerations::{f4_ring, gluing_map, quadric_ring, Family};
use qhv_core::groebner::{groebner_basis, is_groebner_basis, reduce};
use qhv_core::ruled::{
    construct_twisted, elm_surface, figure1_normalize, intersect, reverse_transcript,
    DivisorClass, ElmStep,
};
use qhv_core::singular::{age, is_terminal, CyclicQuotient};
use qhv_core::{Budget, Ideal, Monomial, Polynomial, SubstitutionMap, VarContext};

fn laurent_ring() -> Arc<VarContext> {
    VarContext::grevlex(&["x", "y", "z", "l"], &["l"])
}

fn poly_in(ctx: Arc<VarContext>, laurent: bool) -> impl Strategy<Value = Polynomial> {
    let n = ctx.nvars();
    let inv: Vec<bool> = (0..n).map(|i| ctx.is_invertible(i)).collect();
    let exps = proptest::collection::vec(0i32..3, n);
    let term = (exps, proptest::collection::vec(-2i32..=0, n), -5i64..=5);
    proptest::collection::vec(term, 0..5).prop_map(move |ts| {
        let terms: Vec<(Monomial, BigRational)> = ts
            .into_iter()
            .map(|(mut e, shift, c)| {
                if laurent {
                    for i in 0..e.len() {
                        if inv[i] {
                            e[i] += shift[i];
                        }
                    }
                }
                (Monomial(e), BigRational::from_integer(c.into()))
            })
            .collect();
        Polynomial::from_terms(&ctx, terms).unwrap()
    })
}

fn laurent() -> impl Strategy<Value = Polynomial> {
    poly_in(laurent_ring(), true)
}

fn plain_xyz() -> impl Strategy<Value = Polynomial> {
    poly_in(VarContext::grevlex(&["x", "y", "z"], &[]), false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(a.ctx()), a.clone());
    }

    #[test]
    fn display_parses_back(a in laurent()) {
        let again = Polynomial::parse(a.ctx(), &a.to_string()).unwrap();
        prop_assert_eq!(again, a);
    }

    #[test]
    fn gluing_is_invertible(p in poly_in(quadric_ring(), true), k in 0i64..5, l in 0i64..5) {
        let (k, l) = (2 * k + 1, 2 * l + 1);
        let r = quadric_ring();
        let g = gluing_map(Family::Quadric, k, l).unwrap();
        // l ↦ l^-1 makes the map its own inverse
        let back = SubstitutionMap::identity(&r, &r).unwrap()
            .with_parsed("l", "l^-1").unwrap()
            .with_parsed("w", &format!("w*l^{}", (k + l) / 2)).unwrap();
        prop_assert_eq!(&back, &gluing_map(Family::Quadric, l, k).unwrap());
        let round = g.compose(&back).unwrap();
        prop_assert_eq!(round.apply(&p).unwrap(), p.clone());
        prop_assert_eq!(back.compose(&g).unwrap().apply(&p).unwrap(), p);
    }

    #[test]
    fn substitution_is_a_ring_map(a in laurent(), b in laurent(), k in 0i32..4) {
        let r = laurent_ring();
        let s = SubstitutionMap::identity(&r, &r).unwrap()
            .with_parsed("l", "l^-1").unwrap()
            .with_parsed("x", &format!("x*l^{k} + y")).unwrap();
        let sa = s.apply(&a).unwrap();
        let sb = s.apply(&b).unwrap();
        prop_assert_eq!(s.apply(&(&a * &b)).unwrap(), &sa * &sb);
        prop_assert_eq!(s.apply(&(&a + &b)).unwrap(), &sa + &sb);
    }

    #[test]
    fn weights_add(e1 in proptest::collection::vec(0i32..4, 4),
                   e2 in proptest::collection::vec(0i32..4, 4),
                   w in proptest::collection::vec(-3i64..=3, 4)) {
        let r = laurent_ring();
        let m1 = Polynomial::monomial(&r, Monomial(e1), BigRational::from_integer(2.into())).unwrap();
        let m2 = Polynomial::monomial(&r, Monomial(e2), BigRational::from_integer((-1).into())).unwrap();
        let weights: BTreeMap<String, i64> =
            r.names().iter().cloned().zip(w).collect();
        let a = m1.weight_of(&weights).unwrap();
        let b = m2.weight_of(&weights).unwrap();
        prop_assert_eq!((&m1 * &m2).weight_of(&weights).unwrap(), a + b);
        // a sum of two terms of different weight is not homogeneous
        if a != b {
            prop_assert!((&m1 + &m2).weight_of(&weights).is_err());
        }
    }

    #[test]
    fn reduced_basis_is_canonical(g1 in plain_xyz(), g2 in plain_xyz(), h in plain_xyz(), p in plain_xyz()) {
        prop_assume!(!g1.is_zero() && !g2.is_zero());
        let ctx = g1.ctx().clone();
        let budget = Budget { max_basis: 400, max_steps: 200_000 };
        let Ok(a) = groebner_basis(&ctx, &[g1.clone(), g2.clone()], budget) else {
            return Ok(());
        };
        let mixed = &g2 + &(&h * &g1);
        let b = groebner_basis(&ctx, &[mixed, g1.clone(), &g1 * &g2], budget).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(is_groebner_basis(&a));
        prop_assert!(reduce(&g1, &a).is_zero() && reduce(&g2, &a).is_zero());
        let shifted = &p + &(&h * &g2);
        prop_assert_eq!(reduce(&p, &a), reduce(&shifted, &a));
        let hg1 = &h * &g1;
        let i = Ideal::new(vec![g1, g2]).unwrap().with_budget(budget);
        prop_assert!(i.contains(&hg1).unwrap());
    }

    #[test]
    fn leibniz_for_random_derivations(a in plain_xyz(), b in plain_xyz(),
                                      imgs in proptest::collection::vec(plain_xyz(), 3)) {
        let ctx = a.ctx().clone();
        let mut d = Derivation::new(&ctx);
        for (v, img) in ["x", "y", "z"].iter().zip(imgs) {
            d.set(v, img).unwrap();
        }
        let lhs = d.apply(&(&a * &b)).unwrap();
        let rhs = &(&d.apply(&a).unwrap() * &b) + &(&a * &d.apply(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_for_sl2(a in poly_in(quadric_ring(), true), b in poly_in(quadric_ring(), true)) {
        let t = sl2_v2_triple(&quadric_ring()).unwrap();
        for (_, d) in t.operators() {
            let lhs = d.apply(&(&a * &b)).unwrap();
            let rhs = &(&d.apply(&a).unwrap() * &b) + &(&a * &d.apply(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn torus_scaling_matches_weight(p in poly_in(f4_ring(), true), k in 0i64..4) {
        let a = TorusAction::new([("g", -2 * k), ("l", 2)]);
        let r = f4_ring();
        let ext = r.extend(&["xi"], &["xi"]).unwrap();
        let s = a.as_substitution(&r, &ext, "xi").unwrap();
        let img = s.apply(&p).unwrap();
        if let Ok(d) = p.weight_of(&a.weights) {
            let expect = &p.to_context(&ext).unwrap() * &Polynomial::var_pow(&ext, "xi", d as i32).unwrap();
            prop_assert_eq!(img, expect);
        }
    }
}

/// The first unit mod `n` at or after `w`.
fn unit(w: i64, n: i64) -> i64 {
    (w..).find(|k| num_integer::gcd(*k, n) == 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ages_pair_up(n in 2i64..=20, w in proptest::collection::vec(1i64..20, 3)) {
        let q = CyclicQuotient::new(n, [unit(w[0], n), unit(w[1], n), unit(w[2], n)]).unwrap();
        for j in 1..n {
            let sum = age(&q, j).unwrap() + age(&q, n - j).unwrap();
            prop_assert_eq!(sum, Ratio::from_integer(3));
        }
    }

    #[test]
    fn terminality_is_invariant(n in 2i64..=30, w in proptest::collection::vec(1i64..30, 3), u in 1i64..30, perm in 0usize..6) {
        let q = CyclicQuotient::new(n, [unit(w[0], n), unit(w[1], n), unit(w[2], n)]).unwrap();
        let u = unit(u, n);
        let p = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        let moved = CyclicQuotient::new(n, p.map(|i| u * q.weights[i])).unwrap();
        prop_assert_eq!(is_terminal(&q).unwrap(), is_terminal(&moved).unwrap());
    }

    #[test]
    fn intersection_form_symmetric(n in 0u32..6, a in proptest::collection::vec(-3i64..=3, 4), b in proptest::collection::vec(-3i64..=3, 4)) {
        let h1 = DivisorClass::hirzebruch(n, a[0], a[1]);
        let h2 = DivisorClass::hirzebruch(n, b[0], b[1]);
        prop_assert_eq!(intersect(&h1, &h2).unwrap(), intersect(&h2, &h1).unwrap());
        let q1 = DivisorClass::quadric(a[0], a[1], &a[2..]);
        let q2 = DivisorClass::quadric(b[0], b[1], &b[2..]);
        prop_assert_eq!(intersect(&q1, &q2).unwrap(), intersect(&q2, &q1).unwrap());
    }

    #[test]
    fn elementary_round_trip(n in 0u32..20) {
        prop_assert_eq!(elm_surface(elm_surface(n, true), false), n);
        if n >= 1 {
            prop_assert_eq!(elm_surface(elm_surface(n, false), true), n);
        }
    }

    #[test]
    fn normalization_undoes_construction(n in 1u32..=5, k0 in 0u32..=6, ki in 0u32..=6) {
        let s = construct_twisted(n, k0, ki).unwrap();
        prop_assert_eq!(s.fiber_m, k0 + ki);
        let r = figure1_normalize(&s).unwrap();
        prop_assert_eq!(r.transcript.len() as u32, k0 + ki);
        prop_assert_eq!(r.end.fiber_m, 0);
        prop_assert_eq!(reverse_transcript(&r.transcript), s.transcript.clone());
        for w in r.negative_section_squares.windows(2) {
            prop_assert_eq!(w[1], w[0] + 1);
        }
        let mut rebuilt = qhv_core::ruled::BundleState { transcript: Vec::new(), ..r.end.clone() };
        for step in reverse_transcript(&r.transcript) {
            prop_assert!(matches!(step, ElmStep::E0 | ElmStep::Einf));
            rebuilt = rebuilt.apply(step);
        }
        prop_assert_eq!(rebuilt, s);
    }
}

#[test]
fn v4_leibniz_on_low_degree() {
    let r = f4_ring();
    let t = sl2_v4_triple(&r, 2).unwrap();
    let a = Polynomial::parse(&r, "a*c - 3*b^2 + l^2*g*e").unwrap();
    let b = Polynomial::parse(&r, "f^2 - e*b + 7").unwrap();
    for (_, d) in t.operators() {
        let lhs = d.apply(&(&a * &b)).unwrap();
        let rhs = &(&d.apply(&a).unwrap() * &b) + &(&a * &d.apply(&b).unwrap());
        assert_eq!(lhs, rhs);
    }
}
