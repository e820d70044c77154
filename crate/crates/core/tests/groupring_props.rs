use lee_core::groupring::*;
use proptest::prelude::*;

fn groups() -> impl Strategy<Value = AbelianGroup> {
    prop::sample::select(vec![vec![13u64], vec![25], vec![5, 5], vec![3, 21], vec![2, 4], vec![7]])
        .prop_map(|orders| AbelianGroup::new(orders).unwrap())
}

fn element(group: AbelianGroup) -> impl Strategy<Value = (AbelianGroup, GroupRingElement)> {
    prop::collection::vec(-6i64..=6, group.order() as usize)
        .prop_map(move |c| (group.clone(), GroupRingElement::from_coeffs(&group, c).unwrap()))
}

fn pair() -> impl Strategy<Value = (GroupRingElement, GroupRingElement, GroupRingElement)> {
    groups().prop_flat_map(|g| {
        let n = g.order() as usize;
        let coeffs = prop::collection::vec(-6i64..=6, n);
        (Just(g), coeffs.clone(), coeffs.clone(), coeffs).prop_map(|(g, a, b, c)| {
            let make = |c| GroupRingElement::from_coeffs(&g, c).unwrap();
            (make(a), make(b), make(c))
        })
    })
}

/// Convolution straight from the definition, with group addition.
fn naive_product(a: &GroupRingElement, b: &GroupRingElement) -> Vec<i64> {
    let g = a.group();
    let mut out = vec![0i64; g.order() as usize];
    for x in g.elements() {
        for y in g.elements() {
            out[g.index_of(&g.add(&x, &y))] += a.coeff(&x) * b.coeff(&y);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_matches_convolution((a, b, c) in pair()) {
        let ab = a.ring_mul(&b).unwrap();
        prop_assert_eq!(ab.coeffs(), &naive_product(&a, &b)[..]);
        prop_assert_eq!(&ab, &b.ring_mul(&a).unwrap());
        prop_assert_eq!(ab.ring_mul(&c).unwrap(), a.ring_mul(&b.ring_mul(&c).unwrap()).unwrap());
        let distributed = a.ring_mul(&b).unwrap().ring_add(&a.ring_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(a.ring_mul(&b.ring_add(&c).unwrap()).unwrap(), distributed);
        prop_assert_eq!(ab.coefficient_sum(), a.coefficient_sum() * b.coefficient_sum());
    }

    #[test]
    fn power_map_is_a_homomorphism_for_units((a, b, _) in pair(), t in -30i64..30) {
        let exp = a.group().exponent();
        prop_assume!(lee_core::integer::gcd_u64(t.unsigned_abs(), exp) == 1);
        let lhs = a.ring_mul(&b).unwrap().power_map(t);
        prop_assert_eq!(lhs, a.power_map(t).ring_mul(&b.power_map(t)).unwrap());
    }

    #[test]
    fn all_ones_absorbs((g, a) in groups().prop_flat_map(element)) {
        let ones = GroupRingElement::all_ones(&g);
        prop_assert_eq!(a.ring_mul(&ones).unwrap(), ones.scaled(a.coefficient_sum()));
    }

    #[test]
    fn group_law((g, _) in groups().prop_flat_map(element), i in 0usize..1000, j in 0usize..1000, t in -50i64..50) {
        let (x, y) = (g.element_at(i % g.order() as usize), g.element_at(j % g.order() as usize));
        prop_assert_eq!(g.add(&x, &y), g.add(&y, &x));
        prop_assert_eq!(g.add(&x, &g.neg(&x)), g.identity());
        prop_assert_eq!(g.element_at(g.index_of(&x)), x.clone());
        prop_assert_eq!(g.scale(&g.add(&x, &y), t), g.add(&g.scale(&x, t), &g.scale(&y, t)));
    }

    #[test]
    fn characters_invert_on_cyclic_groups(w in prop::sample::select(vec![13u64, 25, 7, 41]), coeffs in prop::collection::vec(-50i64..50, 41)) {
        let g = AbelianGroup::cyclic(w);
        let a = GroupRingElement::from_coeffs(&g, coeffs[..w as usize].to_vec()).unwrap();
        let field = CharacterField::for_order(w, 1000).unwrap();
        prop_assert!(inversion_roundtrip(&a, &field).unwrap());
        let ones = GroupRingElement::all_ones(&g);
        for c in 1..w {
            prop_assert_eq!(char_eval(&ones, c, &field).unwrap(), 0);
        }
    }

    #[test]
    fn built_elements_sum_to_two_n_plus_one((g, _) in groups().prop_flat_map(element), picks in prop::collection::vec(0usize..1000, 0..6)) {
        let gens: Vec<GroupElem> = picks.iter().map(|&i| g.element_at(i % g.order() as usize)).collect();
        let t = build_t(&g, &gens);
        prop_assert_eq!(t.coefficient_sum(), 2 * gens.len() as i64 + 1);
        prop_assert_eq!(t.power_map(-1), t);
    }
}

#[test]
fn identities_on_known_elements() {
    let c13 = AbelianGroup::cyclic(13);
    assert!(verify_r2_identity(&build_t(&c13, &[vec![1], vec![5]]), 2).unwrap().holds);
    assert!(!verify_r2_identity(&build_t(&c13, &[vec![1], vec![2]]), 2).unwrap().holds);
    assert!(!verify_r2_identity(&GroupRingElement::one(&c13), 2).unwrap().holds);
    let c25 = AbelianGroup::cyclic(25);
    assert!(verify_r3_identity(&build_t(&c25, &[vec![1], vec![7]]), 2).unwrap().holds);
    assert!(!verify_r3_identity(&GroupRingElement::one(&c25), 2).unwrap().holds);
    assert!(verify_r2_identity(&build_t(&c25, &[vec![1], vec![7]]), 2).is_err());
}

/// The constant-coefficient reduction of the radius-3 identity:
/// S = a + b*G in a quotient C_v satisfies it iff a^3 + 3a^2 + 2a - 6an = 0
/// once a + vb = 2n + 1. Needs v prime to 6 so that G^(2) = G^(3) = G.
#[test]
fn constant_solutions_reduce_to_a_cubic() {
    let mut cases = 0;
    for v in [5u64, 7, 11] {
        let g = AbelianGroup::cyclic(v);
        for n in 0..200i64 {
            let full = lee_core::lee::group_order_r3(n as u64);
            if !full.is_multiple_of(v) {
                continue;
            }
            for a in -4..=2 * n + 1 + 4 {
                let rest = 2 * n + 1 - a;
                if rest % v as i64 != 0 {
                    continue;
                }
                let b = rest / v as i64;
                let s = GroupRingElement::all_ones(&g).scaled(b).add_identity(a);
                let holds = verify_r3_projected(&s, n, full).holds;
                cases += 1;
                let cubic = a * a * a + 3 * a * a + 2 * a - 6 * a * n;
                assert_eq!(holds, cubic == 0, "v={v} n={n} a={a} b={b}");
            }
        }
    }
    assert!(cases > 100);
}
