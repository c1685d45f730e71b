use kite_core::pea::{self, PeaUniverse};
use kite_core::rdp::{self, RefinementAmbient};
use kite_core::structure::{self, canonical_form};
use kite_core::*;
use proptest::prelude::*;

fn permutation(m: usize) -> impl Strategy<Value = Permutation> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

fn vec2(lo: i64, hi: i64) -> impl Strategy<Value = GroupElement> {
    (lo..=hi, lo..=hi).prop_map(|(a, b)| GroupElement::vector(&[a, b]))
}

fn tuple(m: usize, lo: i64, hi: i64) -> impl Strategy<Value = Tuple> {
    prop::collection::vec(vec2(lo, hi), m).prop_map(|v| v.into_iter().collect())
}

fn lex_element(m: usize) -> impl Strategy<Value = LexElement> {
    (-3i64..=3, tuple(m, -4, 4)).prop_map(|(k, t)| LexElement::new(k, t))
}

/// Members of the n-perfect interval: level 0 is non-negative, level n is
/// non-positive, levels in between are unconstrained.
fn member(m: usize, n: u32) -> impl Strategy<Value = LexElement> {
    (0..=n as i64).prop_flat_map(move |k| {
        let (lo, hi) = if k == 0 { (0, 3) } else if k == n as i64 { (-3, 0) } else { (-3, 3) };
        tuple(m, lo, hi).prop_map(move |t| LexElement::new(k, t))
    })
}

fn affine() -> impl Strategy<Value = GroupElement> {
    (1i64..6, 1i64..6, -6i64..6, 1i64..6).prop_map(|(an, ad, bn, bd)| GroupElement::affine_frac(an, ad, bn, bd))
}

/// `t_{φ^k(i)}` by stepping `φ` one index at a time.
fn reindex(phi: &Permutation, k: i64, t: &Tuple) -> Tuple {
    let step = if k >= 0 { phi.clone() } else { phi.inverse() };
    (0..t.len())
        .map(|mut i| {
            for _ in 0..k.unsigned_abs() {
                i = step.apply(i);
            }
            t[i].clone()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn permutation_group_laws(p in permutation(5), q in permutation(5), a in -7i64..7, b in -7i64..7) {
        prop_assert!(p.after(&p.inverse()).is_identity());
        prop_assert_eq!(p.pow(a + b), p.pow(a).after(&p.pow(b)));
        prop_assert_eq!(p.after(&q).inverse(), q.inverse().after(&p.inverse()));
        prop_assert!(p.pow(p.order() as i64).is_identity());
    }

    #[test]
    fn single_cycles_have_the_descending_canonical_form(p in permutation(6)) {
        match canonical_form(&p) {
            Some(sigma) => prop_assert_eq!(p.conjugate_by(&sigma), Permutation::down_cycle(6)),
            None => prop_assert!(p.cycles().len() > 1),
        }
    }

    #[test]
    fn affine_group_is_a_partially_ordered_group(g in affine(), h in affine(), k in affine()) {
        let a = PoGroup::affine_rational();
        prop_assert_eq!(a.mul(&a.mul(&g, &h), &k), a.mul(&g, &a.mul(&h, &k)));
        prop_assert_eq!(a.mul(&g, &a.inv(&g)), a.identity());
        if a.leq(&g, &h) {
            prop_assert!(a.leq(&a.mul(&k, &g), &a.mul(&k, &h)));
            prop_assert!(a.leq(&a.mul(&g, &k), &a.mul(&h, &k)));
        }
    }

    #[test]
    fn psi_is_the_reindexing_action(phi in permutation(4), t in tuple(4, -3, 3), j in -6i64..6, k in -6i64..6) {
        let lex = LexGroup::new(PoGroup::int_vectors(2), phi.clone());
        prop_assert_eq!(lex.psi(k, &t), reindex(&phi, k, &t));
        prop_assert_eq!(lex.psi(j, &lex.psi(k, &t)), lex.psi(j + k, &t));
    }

    #[test]
    fn lex_group_laws(phi in permutation(3), x in lex_element(3), y in lex_element(3), z in lex_element(3)) {
        let lex = LexGroup::new(PoGroup::int_vectors(2), phi);
        prop_assert_eq!(lex.mul(&lex.mul(&x, &y), &z), lex.mul(&x, &lex.mul(&y, &z)));
        prop_assert_eq!(lex.mul(&x, &lex.inv(&x)), lex.zero());
        prop_assert_eq!(lex.mul(&lex.inv(&x), &x), lex.zero());
        if lex.leq(&x, &y) {
            prop_assert!(lex.leq(&lex.mul(&z, &x), &lex.mul(&z, &y)));
            prop_assert!(lex.leq(&lex.mul(&x, &z), &lex.mul(&y, &z)));
        }
        let (m, j) = (lex.meet(&x, &y), lex.join(&x, &y));
        prop_assert!(lex.leq(&m, &x) && lex.leq(&m, &y) && lex.leq(&x, &j) && lex.leq(&y, &j));
    }

    #[test]
    fn kite_negations_and_iso(
        lambda in permutation(3),
        rho in permutation(3),
        f in tuple(3, 0, 3),
        g in tuple(3, -3, 0),
    ) {
        let k = KiteAlgebra::new(PoGroup::int_vectors(2), lambda, rho).unwrap();
        let one = k.one();
        for x in [KiteElement::lower(f.iter().cloned()), KiteElement::upper(g.iter().cloned())] {
            let (minus, tilde) = k.negations(&x);
            prop_assert_eq!(k.add(&minus, &x), Some(one.clone()));
            prop_assert_eq!(k.add(&x, &tilde), Some(one.clone()));
            prop_assert_eq!(k.negations(&minus).1, x.clone());
            prop_assert!(k.leq(&k.zero(), &x) && k.leq(&x, &one));
        }
        let (x, y) = (KiteElement::lower(f.iter().cloned()), KiteElement::upper(g.iter().cloned()));
        let target = LexGroup::new(PoGroup::int_vectors(2), structure::build_phi(k.lambda(), k.rho()).unwrap());
        for (a, b) in [(&x, &y), (&y, &x), (&x, &x)] {
            if let Some(s) = k.add(a, b) {
                let image = target.mul(&structure::iso_phi(&k, a), &structure::iso_phi(&k, b));
                prop_assert_eq!(structure::iso_phi(&k, &s), image);
                prop_assert!(k.leq(a, &s));
            }
        }
    }

    #[test]
    fn canonical_state_is_additive(phi in permutation(2), x in member(2, 3), y in member(2, 3)) {
        let a = NPerfectAlgebra::new(LexGroup::new(PoGroup::int_vectors(2), phi), 3).unwrap();
        prop_assert!(a.is_member(&x) && a.is_member(&y));
        if let Some(s) = a.add(&x, &y) {
            prop_assert_eq!(a.canonical_state(&s), a.canonical_state(&x) + a.canonical_state(&y));
        }
    }

}

proptest! {
    // Most generated quadruples do not have equal sums, hence the count.
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    /// Any quadruple with `a1 a2 = b1 b2` in the interval gets a table that
    /// verifies as RDP1.
    #[test]
    fn constructive_tables_verify(
        phi in permutation(2),
        (n, a1, a2, b1) in (1u32..4).prop_flat_map(|n| (Just(n), member(2, n), member(2, n), member(2, n))),
    ) {
        let a = NPerfectAlgebra::new(LexGroup::new(PoGroup::int_vectors(2), phi), n).unwrap();
        let lex = a.lex();
        let Some(s) = a.add(&a1, &a2) else { return Ok(()) };
        let b2 = lex.mul(&lex.inv(&b1), &s);
        prop_assume!(a.is_member(&b2) && lex.compose(&b1, &b2).is_some());
        let r = rdp::lex_refine_rdp1(lex, &a1, &a2, &b1, &b2).unwrap();
        let v = rdp::verify_table(lex, &r.table, &a1, &a2, &b1, &b2, RdpClass::Rdp1);
        prop_assert!(v.is_valid(), "case {:?}: {} gives {:?}", r.case, r.table, v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]


    #[test]
    fn mv_operations_on_the_kite(f in tuple(2, 0, 2), g in tuple(2, -2, 0), lower_first in any::<bool>()) {
        let k = KiteAlgebra::new(PoGroup::int_vectors(2), Permutation::identity(2), Permutation::new(vec![1, 0]).unwrap()).unwrap();
        let (x, y) = (KiteElement::lower(f.iter().cloned()), KiteElement::upper(g.iter().cloned()));
        let (x, y) = if lower_first { (x, y) } else { (y, x) };
        if let Some((plus, times)) = pea::mv_ops(&k, &x, &y) {
            prop_assert!(k.leq(&x, &plus) && k.leq(&y, &plus));
            prop_assert!(k.leq(&times, &x) && k.leq(&times, &y));
        }
        prop_assert_eq!(PeaUniverse::zero(&k), k.zero());
    }
}
