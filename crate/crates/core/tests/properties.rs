mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ulie::identities::{ChainStatus, CheckConfig, EnvAmbient, Truth};
use ulie::{catalog, Algebra, Subspace};

fn algebra(idx: usize) -> Algebra {
    catalog::builtin(common::SMALL_IDS[idx % common::SMALL_IDS.len()]).unwrap().algebra
}

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(128)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn multiplication_is_associative(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let env = alg.enveloping();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_element(&mut rng, env, 4);
        let b = common::random_element(&mut rng, env, 4);
        let c = common::random_element(&mut rng, env, 4);
        let left = env.multiply(&env.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = env.multiply(&a, &env.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn involution_reverses_products(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let env = alg.enveloping();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_element(&mut rng, env, 4);
        let b = common::random_element(&mut rng, env, 4);
        let lhs = env.involution(&env.multiply(&a, &b).unwrap()).unwrap();
        let rhs = env.multiply(&env.involution(&b).unwrap(), &env.involution(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn involution_is_an_involution(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let env = alg.enveloping();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_element(&mut rng, env, 6);
        prop_assert_eq!(env.involution(&env.involution(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn symmetric_brackets_are_skew(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let env = alg.enveloping();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = |rng: &mut ChaCha8Rng| {
            let a = common::random_element(rng, env, 4);
            a.add(&env.involution(&a).unwrap())
        };
        let s = sym(&mut rng);
        let t = sym(&mut rng);
        let c = env.lie_bracket(&s, &t).unwrap();
        prop_assert_eq!(env.involution(&c).unwrap(), c.neg());
    }

    #[test]
    fn commutator_satisfies_jacobi(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let env = alg.enveloping();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_element(&mut rng, env, 3);
        let b = common::random_element(&mut rng, env, 3);
        let c = common::random_element(&mut rng, env, 3);
        let br = |u: &_, v: &_| env.lie_bracket(u, v).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        prop_assert!(sum.is_zero());
        prop_assert!(br(&a, &a).is_zero());
    }

    #[test]
    fn lie_bracket_satisfies_jacobi(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, n) = (alg.field().p(), alg.dim());
        let u = common::random_vector(&mut rng, p, n);
        let v = common::random_vector(&mut rng, p, n);
        let w = common::random_vector(&mut rng, p, n);
        let f = alg.field();
        let terms = [
            alg.bracket(&u, &alg.bracket(&v, &w)),
            alg.bracket(&v, &alg.bracket(&w, &u)),
            alg.bracket(&w, &alg.bracket(&u, &v)),
        ];
        let sum: Vec<u8> = (0..n).map(|k| f.add(f.add(terms[0][k], terms[1][k]), terms[2][k])).collect();
        prop_assert!(sum.iter().all(|&c| c == 0));
        prop_assert!(alg.bracket(&u, &u).iter().all(|&c| c == 0));
    }

    #[test]
    fn p_th_powers_in_u_match_the_p_map(idx in 0usize..9, seed in any::<u64>()) {
        let alg = algebra(idx);
        let env = alg.enveloping();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::random_vector(&mut rng, alg.field().p(), alg.dim());
        let px = alg.element_pmap(&x).unwrap();
        let lhs = env.power(&env.embed(&x).unwrap(), alg.field().p() as u64).unwrap();
        prop_assert_eq!(lhs, env.embed(&px).unwrap());
        prop_assert_eq!(alg.ad_matrix(&px), alg.ad_matrix(&x).pow(alg.field().p() as u64));
    }

    #[test]
    fn p_map_is_p_semilinear(idx in 0usize..9, seed in any::<u64>(), lambda in 1u8..=250) {
        let alg = algebra(idx);
        let f = alg.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::random_vector(&mut rng, f.p(), alg.dim());
        let l = f.reduce(lambda as i64);
        let scaled: Vec<u8> = x.iter().map(|&c| f.mul(l, c)).collect();
        let lp = f.pow(l, f.p() as u64);
        let expected: Vec<u8> = alg.element_pmap(&x).unwrap().iter().map(|&c| f.mul(lp, c)).collect();
        prop_assert_eq!(alg.element_pmap(&scaled).unwrap(), expected);
    }

    #[test]
    fn restricted_closure_is_a_fixpoint(idx in 0usize..9, seed in any::<u64>(), k in 0usize..3) {
        let alg = algebra(idx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Vec<u8>> = (0..k).map(|_| common::random_vector(&mut rng, alg.field().p(), alg.dim())).collect();
        let closure = alg.restricted_closure(&gens).unwrap();
        for g in &gens {
            prop_assert!(closure.contains(g).unwrap());
        }
        for a in closure.basis() {
            prop_assert!(closure.contains(&alg.element_pmap(a).unwrap()).unwrap());
            for b in closure.basis() {
                prop_assert!(closure.contains(&alg.bracket(a, b)).unwrap());
            }
        }
        prop_assert_eq!(alg.restricted_closure(closure.basis()).unwrap(), closure);
    }
}

#[test]
fn pbw_consistency_on_basis_elements() {
    for id in common::SMALL_IDS {
        let alg = catalog::builtin(id).unwrap().algebra;
        let env = alg.enveloping();
        for i in 0..alg.dim() {
            let x = env.generator(i);
            let lhs = env.power(&x, alg.field().p() as u64).unwrap();
            assert_eq!(lhs, env.embed(alg.pmap_basis(i)).unwrap(), "{id} basis {i}");
        }
    }
}

#[test]
fn series_interleave() {
    for id in common::SMALL_IDS {
        let alg = catalog::builtin(id).unwrap().algebra;
        let lcs = alg.lower_central_series();
        let ds = alg.derived_series();
        for (k, d) in ds.terms.iter().enumerate() {
            let g = 1usize.checked_shl(k as u32).unwrap_or(usize::MAX);
            let gamma = &lcs.terms[(g - 1).min(lcs.terms.len() - 1)];
            assert!(d.is_subspace_of(gamma).unwrap(), "{id}: delta_{k}");
        }
        if lcs.terminated_zero {
            assert!(ds.terminated_zero, "{id}");
        }
    }
}

#[test]
fn element_p_nilpotence_agrees_with_iteration() {
    for id in ["abelian(3,2)", "heisenberg_nil(3)", "heisenberg_toral(3)", "twodim(3)", "sl2(3)"] {
        let alg = catalog::builtin(id).unwrap().algebra;
        let full = Subspace::full(alg.field(), alg.dim());
        let total = (alg.field().p() as usize).pow(alg.dim() as u32);
        for k in 0..total {
            let mut coeffs = Vec::new();
            let mut r = k;
            for _ in 0..alg.dim() {
                coeffs.push((r % alg.field().p() as usize) as u8);
                r /= alg.field().p() as usize;
            }
            let x = full.combine(&coeffs);
            // iterate the p-map until zero or a repeat
            let mut seen = vec![x.clone()];
            let mut cur = x.clone();
            let nilpotent_at = loop {
                cur = alg.element_pmap(&cur).unwrap();
                if cur.iter().all(|&c| c == 0) {
                    break Some(seen.len());
                }
                if seen.contains(&cur) {
                    break None;
                }
                seen.push(cur.clone());
            };
            let verdict = alg.is_p_nilpotent_element(&x).unwrap();
            match nilpotent_at {
                Some(m) => assert_eq!(verdict, ulie::liealg::ElementPNilpotence::Nilpotent { index: m }, "{id} {x:?}"),
                None => assert!(!verdict.is_nilpotent(), "{id} {x:?}"),
            }
        }
    }
}

#[test]
fn envelope_splits_into_symmetric_and_skew_parts() {
    for id in common::SMALL_IDS {
        let alg = catalog::builtin(id).unwrap().algebra;
        let env = alg.enveloping();
        let d = env.ambient_dim(2187).unwrap();
        let dec = env.symmetric_decomposition(2187).unwrap();
        assert_eq!(d as u128, (alg.field().p() as u128).pow(alg.dim() as u32));
        assert_eq!(dec.plus.dim() + dec.minus.dim(), d, "{id}");
        assert_eq!(dec.plus.intersection_dim(&dec.minus).unwrap(), 0, "{id}");
    }
}

#[test]
fn chains_are_deterministic_and_certificates_reverify() {
    let config = CheckConfig::default();
    for id in ["heisenberg_nil(3)", "heisenberg_toral(3)", "twodim(3)", "sl2(3)", "abelian(3,2)"] {
        let alg = catalog::builtin(id).unwrap().algebra;
        let amb = EnvAmbient::new(alg.enveloping(), 2187).unwrap();
        let plus = amb.symmetric_subspace().unwrap();
        let full = Subspace::full(alg.field(), amb.dim());
        for v in [&plus, &full] {
            let (n1, nv) = amb.nilpotency_chain(v).unwrap();
            let (n2, _) = amb.nilpotency_chain(v).unwrap();
            assert_eq!(n1.history, n2.history, "{id}");
            let (s1, sv) = amb.solvability_chain(v).unwrap();
            let (s2, _) = amb.solvability_chain(v).unwrap();
            assert_eq!(s1.history, s2.history, "{id}");
            for state in [&n1, &s1] {
                if let ChainStatus::Cycle { .. } = state.status {
                    assert!(amb.verify_cycle(state, v), "{id}: {:?}", state.kind);
                }
            }
            if let ChainStatus::ReachedZero { step } = n1.status {
                let engel = amb.engel_check(v, &config, Some(step)).unwrap();
                assert_eq!(engel.holds, Truth::Holds, "{id}");
                assert!(engel.bound.unwrap() < step, "{id}");
                let bound = (usize::BITS - (step - 1).leading_zeros()) as usize + 1;
                assert!(sv.bound.unwrap() <= bound, "{id}");
                assert_eq!(nv.bound, Some(step));
            }
            let engel = amb.engel_check(v, &config, None).unwrap();
            if let Some((s, y)) = engel.engel_witness() {
                assert!(amb.verify_engel_witness(s, y).unwrap(), "{id}");
            }
        }
    }
}

#[test]
fn full_envelope_verdicts_bound_symmetric_verdicts() {
    let config = CheckConfig::default();
    for id in catalog::DEFAULT_IDS {
        let alg = catalog::builtin(id).unwrap().algebra;
        let report = ulie::cross_check(id, &alg, &config).unwrap();
        for identity in ulie::identities::IDENTITIES {
            let plus = report.computed_plus.get(identity);
            let full = report.computed_full.get(identity);
            if matches!(identity, ulie::identities::Identity::LieNilpotent | ulie::identities::Identity::LieSolvable) {
                assert_eq!(plus.holds, full.holds, "{id} {identity:?}");
            }
            if full.holds == Truth::Holds {
                assert_eq!(plus.holds, Truth::Holds, "{id} {identity:?}");
                assert!(plus.bound <= full.bound, "{id} {identity:?}");
            }
        }
    }
}
