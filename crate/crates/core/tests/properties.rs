use mgw::formula::{
    evaluate, parse, Assignment, EvalMode, Formula, MetricStructure, SymmetricGroup, Term, Value,
};
use mgw::matrix::{
    hs_distance, nearest_unitary, perm_matrix, rank_distance, ComplexSquareMatrix, RationalMatrix,
    UnitaryElement, C64,
};
use mgw::order::{base_pairs, unitary_chain};
use mgw::perm::Permutation;
use mgw::rational::{int, rational, Rational};
use mgw::rounding::{
    block_average_unitary, chop_cycles, chop_cycles_padded, default_beta, padding_shrinkage,
    round_to_subgroup,
};
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn perm_triple(max: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1..=max).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hamming_is_a_bi_invariant_metric((a, b, c) in perm_triple(8)) {
        let d = |x: &Permutation, y: &Permutation| x.hamming_distance(y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &b).is_zero(), a == b);
        prop_assert_eq!(d(&c.compose(&a).unwrap(), &c.compose(&b).unwrap()), d(&a, &b));
        prop_assert_eq!(d(&a.compose(&c).unwrap(), &b.compose(&c).unwrap()), d(&a, &b));
    }

    #[test]
    fn group_laws((a, b, c) in perm_triple(8)) {
        let e = Permutation::identity(a.degree());
        prop_assert_eq!(
            a.compose(&b).unwrap().compose(&c).unwrap(),
            a.compose(&b.compose(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.compose(&a.inverse()).unwrap(), e.clone());
        prop_assert_eq!(a.inverse().compose(&a).unwrap(), e.clone());
        prop_assert_eq!(a.compose(&e).unwrap(), a.clone());
        prop_assert_eq!(e.compose(&a).unwrap(), a);
    }

    #[test]
    fn conjugation_preserves_cycle_type((a, b, _) in perm_triple(12)) {
        prop_assert_eq!(a.conjugate_by(&b).unwrap().cycle_profile(), a.cycle_profile());
    }

    #[test]
    fn stacking_copies_is_isometric(
        (k, a, b) in (1usize..5, 1usize..8).prop_flat_map(|(k, m)| (Just(k), perm(m), perm(m)))
    ) {
        let m = a.degree();
        let big = |p: &Permutation| p.diagonal_embed(k, k * m).unwrap();
        prop_assert_eq!(
            big(&a).hamming_distance(&big(&b)).unwrap(),
            a.hamming_distance(&b).unwrap()
        );
    }

    #[test]
    fn unitary_metric_is_bi_invariant(n in 1usize..=64, seed in any::<u64>()) {
        let mut r = rng(seed);
        let [a, b, c] = [0; 3].map(|_| UnitaryElement::haar(n, &mut r));
        let d = hs_distance(&a, &b).unwrap();
        prop_assert!((hs_distance(&c.mul(&a).unwrap(), &c.mul(&b).unwrap()).unwrap() - d).abs() <= 1e-9);
        prop_assert!((hs_distance(&a.mul(&c).unwrap(), &b.mul(&c).unwrap()).unwrap() - d).abs() <= 1e-9);
    }

    #[test]
    fn permutation_matrices_match_hamming(
        (a, b) in (1usize..=64).prop_flat_map(|n| (perm(n), perm(n)))
    ) {
        let d = hs_distance(&perm_matrix(&a), &perm_matrix(&b)).unwrap();
        let h = a.hamming_distance(&b).unwrap().to_f64().unwrap();
        prop_assert!((d - (h / 2.0).sqrt()).abs() <= 1e-9);
    }

    #[test]
    fn permutation_matrices_form_a_homomorphism((a, b, _) in perm_triple(16)) {
        let ab = perm_matrix(&a.compose(&b).unwrap());
        let prod = perm_matrix(&a).mul(&perm_matrix(&b)).unwrap();
        prop_assert!(hs_distance(&ab, &prod).unwrap() <= 1e-12);
        let c = perm_matrix(&Permutation::commutator(&a, &b).unwrap());
        let cm = UnitaryElement::commutator(&perm_matrix(&a), &perm_matrix(&b)).unwrap();
        prop_assert!(hs_distance(&c, &cm).unwrap() <= 1e-12);
    }

    #[test]
    fn rank_is_subadditive(
        (n, entries) in (1usize..=12).prop_flat_map(|n| (Just(n), prop::collection::vec(-3i64..=3, 3 * n * n)))
    ) {
        let m = |k: usize| {
            let rows: Vec<Vec<i64>> = entries[k * n * n..(k + 1) * n * n]
                .chunks(n)
                .map(<[i64]>::to_vec)
                .collect();
            RationalMatrix::from_integers(&rows).unwrap()
        };
        let (a, b, c) = (m(0), m(1), m(2));
        let d = |x: &RationalMatrix, y: &RationalMatrix| rank_distance(x, y).unwrap();
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn rank_of_identity_minus_permutation_counts_cycles(a in (1usize..=50).prop_flat_map(perm)) {
        let n = a.degree();
        let d = rank_distance(&RationalMatrix::identity(n), &RationalMatrix::from_permutation(&a)).unwrap();
        let expected = int(1) - Rational::new((a.cycle_count() as i64).into(), (n as i64).into());
        prop_assert_eq!(d, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nearest_unitary_is_nearest(n in 1usize..=12, seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = UnitaryElement::haar(n, &mut r);
        let noise = ComplexSquareMatrix::from_fn(n, |i, j| {
            C64::new(((i * 7 + j * 3) as f64 * 0.37).sin(), ((i + 2 * j) as f64 * 0.91).cos()) * 0.3
        }).unwrap();
        let a = ComplexSquareMatrix::new(base.matrix().as_dmatrix() + noise.as_dmatrix()).unwrap();
        let b = nearest_unitary(&a).unwrap();
        let best = a.sub(b.matrix()).unwrap().frobenius();
        for _ in 0..20 {
            let w = UnitaryElement::haar(n, &mut r);
            prop_assert!(best <= a.sub(w.matrix()).unwrap().frobenius() + 1e-9);
        }
    }

    #[test]
    fn repair_distance_is_controlled_by_unitarity_defect(n in 2usize..=24, seed in any::<u64>(), size in 0.001f64..0.2) {
        let mut r = rng(seed);
        let base = UnitaryElement::haar(n, &mut r);
        let push = UnitaryElement::haar(n, &mut r);
        let a = ComplexSquareMatrix::new(
            base.matrix().as_dmatrix() + push.matrix().as_dmatrix() * C64::new(size, 0.0),
        ).unwrap();
        let b = nearest_unitary(&a).unwrap();
        let sqrt_n = (n as f64).sqrt();
        let dist = a.sub(b.matrix()).unwrap().frobenius() / sqrt_n;
        let defect = a.unitarity_defect() / sqrt_n;
        prop_assert!(dist * dist <= 36.0 * defect + 1e-12);
    }

    #[test]
    fn block_average_core_is_unitary(k in 1usize..=4, m in 1usize..=8, seed in any::<u64>()) {
        let a = UnitaryElement::haar(k * m, &mut rng(seed));
        let res = block_average_unitary(&a, k).unwrap();
        prop_assert!(res.core.matrix().unitarity_defect() <= 1e-9);
        prop_assert!(res.approximant.matrix().unitarity_defect() <= 1e-9);
        prop_assert!(hs_distance(&res.reconstruct(), &res.approximant).unwrap() <= 1e-12);
        let err = a.matrix().sub(res.approximant.matrix()).unwrap().normalized_hs();
        prop_assert!(err <= 2.0 * std::f64::consts::PI / (m as f64).sqrt() + 1e-9);
    }

    #[test]
    fn padding_shrinks_distances_by_at_most_one_over_k(
        (k, m, r) in (1usize..=8, 1usize..=6).prop_flat_map(|(k, m)| (Just(k), Just(m), 0..m)),
        seed in any::<u64>(),
    ) {
        let mut g = rng(seed);
        let a = UnitaryElement::haar(k * m, &mut g);
        let b = UnitaryElement::haar(k * m, &mut g);
        let before = hs_distance(&a, &b).unwrap();
        let after = hs_distance(&a.pad_identity(r), &b.pad_identity(r)).unwrap();
        let gap = before - after;
        prop_assert!(gap >= -1e-12);
        prop_assert!(gap <= padding_shrinkage(k, m, r) * before + 1e-12);
        prop_assert!(padding_shrinkage(k, m, r) * before <= 1.0 / k as f64 + 1e-12);
    }
}

fn random_cases() -> impl Strategy<Value = Permutation> {
    (1usize..=120).prop_flat_map(perm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn chopping_stays_inside_cycles(sigma in random_cases(), m in 1usize..=12) {
        let n = sigma.degree();
        let padded = sigma.pad_embed(n.div_ceil(m) * m).unwrap();
        let tau = chop_cycles(&padded, m).unwrap();
        prop_assert!(tau.width() <= m);
        let owner: Vec<usize> = {
            let mut o = vec![0; padded.degree()];
            for (c, cycle) in padded.cycles().iter().enumerate() {
                for &p in cycle {
                    o[p] = c;
                }
            }
            o
        };
        for p in 0..padded.degree() {
            prop_assert_eq!(owner[tau.apply(p)], owner[p]);
        }
        for p in padded.fixed_points() {
            prop_assert_eq!(tau.apply(p), p);
        }
        prop_assert!(padded.hamming_distance(&tau).unwrap() <= rational(2, m as i64));
    }

    #[test]
    fn padded_chopping_restricts_cleanly(sigma in (1usize..=6, 1usize..=40).prop_flat_map(|(k, m)| perm(k * m)), k in 1usize..=6) {
        let n = sigma.degree();
        if n % k == 0 {
            let m = n / k;
            let tau = chop_cycles_padded(&sigma, m, k, &default_beta()).unwrap();
            prop_assert_eq!(tau.degree(), n);
            prop_assert!(tau.width() as u64 <= mgw::rational::ceil_power(m as u64, &default_beta()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rounding_splits_its_distance(seed in any::<u64>(), m in 46usize..=130, k in 2usize..=3) {
        let sigma = Permutation::random(k * m, &mut rng(seed));
        let r = round_to_subgroup(&sigma, m, k).unwrap();
        prop_assert!(r.achieved <= &r.chop_distance + &r.align_distance);
        let cube = mgw::rational::PowerBound::new(int(8), m as u64, rational(-1, 3));
        prop_assert!(cube.admits(&r.chop_distance));
        let one = mgw::rational::PowerBound::new(int(1), m as u64, rational(-1, 3));
        prop_assert!(one.admits(&r.align_distance));
        prop_assert_eq!(r.reconstruct(), r.rounded);
    }
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::Identity),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::inv),
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

fn constant() -> impl Strategy<Value = Rational> {
    (0i64..=4, 1i64..=4)
        .prop_filter("in [0, 1]", |(p, q)| p <= q)
        .prop_map(|(p, q)| rational(p, q))
}

fn is_one(f: &Formula) -> bool {
    matches!(f, Formula::Const(c) if *c == int(1))
}

fn quantifier_free() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (term(), term()).prop_map(|(s, t)| Formula::dist(s, t)),
        constant().prop_map(Formula::Const),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::one_minus),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::trunc_sub(a, b)),
            (inner.clone(), inner.clone())
                .prop_filter("min with 1 is folded", |(a, b)| !is_one(a) && !is_one(b))
                .prop_map(|(a, b)| Formula::min(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::max(a, b)),
            ((0i64..=6, 1i64..=3), inner).prop_map(|((p, q), a)| Formula::scale(rational(p, q), a)),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    (quantifier_free(), 0usize..4).prop_map(|(f, shape)| match shape {
        0 => f,
        1 => Formula::inf("x", f),
        2 => Formula::sup("y", Formula::one_minus(f)),
        _ => Formula::min(Formula::inf("x", f.clone()), Formula::sup("y", f)),
    })
}

fn s4() -> SymmetricGroup {
    SymmetricGroup::new(4, EvalMode::Exhaustive).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_identity(f in formula()) {
        let text = f.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn values_stay_in_the_unit_interval(f in formula(), x in perm(4), y in perm(4)) {
        let mut env = Assignment::new();
        env.insert("x".to_string(), x);
        env.insert("y".to_string(), y);
        let v = evaluate(&s4(), &f, &env).unwrap();
        prop_assert!(v >= int(0) && v <= int(1));
    }

    #[test]
    fn perturbing_a_variable_respects_the_lipschitz_constant(
        f in quantifier_free(), a in perm(6), a2 in perm(6), b in perm(6)
    ) {
        let s = SymmetricGroup::new(6, EvalMode::Exhaustive).unwrap();
        let value = |x: &Permutation| {
            let mut env = Assignment::new();
            env.insert("x".to_string(), x.clone());
            env.insert("y".to_string(), b.clone());
            evaluate(&s, &f, &env).unwrap()
        };
        let delta = s.dist(&a, &a2);
        let change = (value(&a) - value(&a2)).abs();
        prop_assert!(change <= f.lipschitz("x") * delta);
    }
}

#[test]
fn scaling_truncates_on_a_grid() {
    let s = SymmetricGroup::new(1, EvalMode::Exhaustive).unwrap();
    for i in 0..=16 {
        for q in [
            rational(0, 1),
            rational(1, 2),
            int(1),
            rational(5, 2),
            int(7),
        ] {
            let x = rational(i, 16);
            let f = Formula::scale(q.clone(), Formula::Const(x.clone()));
            let v = evaluate(&s, &f, &Assignment::new()).unwrap();
            let expected = if &q * &x > int(1) { int(1) } else { &q * &x };
            assert_eq!(v, expected);
        }
    }
}

#[test]
fn product_action_is_an_injective_homomorphism() {
    let s3 = Permutation::all(3);
    let mut images = std::collections::BTreeSet::new();
    for a1 in &s3 {
        for a2 in &s3 {
            let a = Permutation::product_action(&[a1.clone(), a2.clone()]).unwrap();
            images.insert(a.clone());
            for b1 in &s3 {
                for b2 in &s3 {
                    let b = Permutation::product_action(&[b1.clone(), b2.clone()]).unwrap();
                    let ab = Permutation::product_action(&[
                        a1.compose(b1).unwrap(),
                        a2.compose(b2).unwrap(),
                    ])
                    .unwrap();
                    assert_eq!(a.compose(&b).unwrap(), ab);
                }
            }
        }
    }
    assert_eq!(images.len(), 36);
}

#[test]
fn stacking_is_an_injective_homomorphism() {
    let s3 = Permutation::all(3);
    let up = |p: &Permutation| p.diagonal_embed(2, 6).unwrap();
    let images: std::collections::BTreeSet<_> = s3.iter().map(up).collect();
    assert_eq!(images.len(), 6);
    for a in &s3 {
        for b in &s3 {
            assert_eq!(up(&a.compose(b).unwrap()), up(a).compose(&up(b)).unwrap());
        }
    }
}

#[test]
fn base_pair_commutators_have_the_stated_shape() {
    for l in 1..=4 {
        let pairs = base_pairs(l).unwrap();
        let n = 3usize.pow(l as u32);
        for i in 0..l {
            for j in 0..l {
                let c = Permutation::commutator(&pairs[i].0, &pairs[j].1).unwrap();
                if i < j {
                    assert!(c.is_identity());
                } else {
                    let p = c.cycle_profile();
                    assert_eq!(p.count(3), n / 3);
                    assert_eq!(p.total_cycles(), n / 3);
                }
            }
        }
    }
}

#[test]
fn unitary_chains_commute_below_the_diagonal() {
    for n in [3, 10, 27, 40] {
        let l = if n >= 27 {
            3
        } else if n >= 9 {
            2
        } else {
            1
        };
        let chain = unitary_chain(n, l).unwrap();
        let e = UnitaryElement::identity(n);
        for (i, (b, _)) in chain.iter().enumerate() {
            for (j, (_, c)) in chain.iter().enumerate() {
                let d = hs_distance(&UnitaryElement::commutator(b, c).unwrap(), &e).unwrap();
                if i < j {
                    assert!(d <= 1e-12);
                } else {
                    assert!(d >= 0.5);
                }
            }
        }
    }
}

#[test]
fn exact_values_print_as_fractions() {
    let f = parse("1/2").unwrap();
    let v = evaluate(&s4(), &f, &Assignment::new()).unwrap();
    assert_eq!(Value::Exact(v).to_string(), "1/2");
}
