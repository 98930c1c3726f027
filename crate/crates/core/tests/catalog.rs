//! Cross-module behavior of the catalog constructions.

use perfhopf::maps::AlgebraMap;
use perfhopf::modules::{
    build_module, ga_witt_kernel_twisted, is_nilpotent_quasi_ideal, is_quasi_ideal, pullback_u,
    scaling_family, specialize, ModuleSpec, Params,
};
use perfhopf::rat::Rat;
use perfhopf::scalars::Fp;

fn params(p: u32, n: u32, depth: u32, bound: i64) -> Params {
    Params::new(p, n, depth, Rat::from_int(bound)).unwrap()
}

#[test]
fn whole_catalog_elaborates_at_both_primes() {
    for p in [2u32, 3] {
        let pr = params(p, 2, 2, (p * p) as i64);
        for spec in [
            ModuleSpec::AlphaFlat,
            ModuleSpec::AlphaPPullback,
            ModuleSpec::UWF,
            ModuleSpec::UWFOverP,
            ModuleSpec::Twisted,
            ModuleSpec::Identity,
        ] {
            let m = build_module(&spec, &pr).unwrap();
            assert!(is_quasi_ideal(&m).unwrap().holds, "{} at p={}", m.label, p);
        }
    }
}

#[test]
fn pushforward_divides_the_degree_table_by_p() {
    let pr = params(2, 2, 2, 4);
    let plain = build_module(&ModuleSpec::UWF, &pr).unwrap();
    let pushed = build_module(&ModuleSpec::UWFOverP, &pr).unwrap();
    // piece at degree d upstairs equals piece at degree d/p downstairs
    for k in 0..=16 {
        let d = Rat::new(k, 4);
        let up = plain.hopf.alg.graded_piece(d).unwrap().len();
        let down = pushed.hopf.alg.graded_piece(d.div_int(2)).unwrap().len();
        assert_eq!(up, down, "degree {}", d);
    }
}

#[test]
fn pullback_dimensions_are_a_product() {
    // adjoining the killed tower multiplies per-degree dimensions
    let pr = params(2, 2, 2, 4);
    let ga = ga_witt_kernel_twisted(&pr).unwrap();
    let pulled = pullback_u("t", &ga, &pr).unwrap();
    let tower = perfhopf::algebra::Algebra::new(
        2,
        2,
        Rat::from_int(4),
        vec![perfhopf::algebra::Variable::tower("x", Rat::ONE)],
        [(0usize, perfhopf::algebra::Rewrite::Bottom(perfhopf::algebra::Poly::zero()))]
            .into_iter()
            .collect(),
    )
    .unwrap();
    for k in 0..=16 {
        let d = Rat::new(k, 4);
        let mut expect = 0usize;
        for j in 0..=k {
            let d1 = Rat::new(j, 4);
            let d2 = d.sub(&d1);
            expect += ga.hopf.alg.graded_piece(d1).unwrap().len()
                * tower.graded_piece(d2).unwrap().len();
        }
        assert_eq!(pulled.hopf.alg.graded_piece(d).unwrap().len(), expect, "degree {}", d);
    }
}

#[test]
fn scaling_actions_compose_by_multiplying_exponents() {
    let pr = params(2, 2, 2, 4);
    let m = build_module(&ModuleSpec::Twisted, &pr).unwrap();
    let sigma = scaling_family(&m).unwrap();
    let twice = sigma.compose(&sigma).unwrap();
    // substituting b -> b^2 in the family gives the same endomorphism
    let squared_images = (0..m.hopf.alg.vars().len())
        .map(|v| sigma.image(v).map_coeffs(|c| c.substitute_power(2)))
        .collect();
    let squared = AlgebraMap::with_scale(
        m.hopf.alg.clone(),
        m.hopf.alg.clone(),
        squared_images,
        Rat::ONE,
    )
    .unwrap();
    assert!(twice.equal_on_generators(&squared).unwrap());
    // and multiplying specializations multiplies scalars
    for a in 0..2 {
        for b in 0..2 {
            let sa = specialize(&sigma, Fp::new(a, 2)).unwrap();
            let sb = specialize(&sigma, Fp::new(b, 2)).unwrap();
            let sab = specialize(&sigma, Fp::new(a * b, 2)).unwrap();
            assert!(sa.compose(&sb).unwrap().equal_on_generators(&sab).unwrap());
        }
    }
}

#[test]
fn nilpotency_exponents_across_the_catalog_at_p3() {
    let pr = params(3, 2, 2, 9);
    for (spec, expect) in [
        (ModuleSpec::Twisted, Some(1)),
        (ModuleSpec::UWF, Some(3)),
        (ModuleSpec::AlphaPPullback, Some(3)),
        (ModuleSpec::AlphaFlat, Some(1)),
    ] {
        let m = build_module(&spec, &pr).unwrap();
        let nil = is_nilpotent_quasi_ideal(&m).unwrap();
        assert!(nil.nilpotent);
        assert_eq!(nil.exponent, expect, "{:?}", spec);
    }
}

#[test]
fn additive_kernel_pullback_piece() {
    // relation x -> x0 with x0^p = 0; the degree-one piece is {x0}
    let pr = params(2, 1, 2, 4);
    let m = build_module(&ModuleSpec::AlphaPPullback, &pr).unwrap();
    let piece = m.hopf.alg.graded_piece(Rat::ONE).unwrap();
    assert_eq!(piece.len(), 1);
    assert_eq!(m.hopf.alg.monomial_string(&piece[0]), "x0");
}

#[test]
fn pushforward_of_the_initial_object_shifts_the_augmentation() {
    let pr = params(2, 2, 2, 4);
    let m = build_module(&ModuleSpec::FrobPush(Box::new(ModuleSpec::Identity)), &pr).unwrap();
    let alg = &m.hopf.alg;
    // underlying free tower, augmentation one level down
    assert!(alg.rewrites().is_empty());
    assert_eq!(alg.poly_string(m.aug.image(0)), "x^(1/2)");
}

#[test]
fn pushforward_of_the_perfection_kernel_is_the_level_shift() {
    let pr = params(2, 2, 2, 4);
    let m = build_module(&ModuleSpec::FrobPush(Box::new(ModuleSpec::AlphaFlat)), &pr).unwrap();
    let alg = &m.hopf.alg;
    // x^(1/p^(i+1)) -> x^(1/p^i) read off the deepest generator
    assert_eq!(alg.poly_string(m.aug.image(0)), "x^(1/2)");
    let x = alg.var_index("x").unwrap();
    assert_eq!(alg.vars()[x].degree, Rat::new(1, 2));
}

#[test]
fn non_orientable_fiber_identification_is_rejected() {
    // a module whose bottom coordinate rewrites to a two-term sum: the leg
    // equation cannot be oriented into a single generator
    use perfhopf::algebra::{Algebra, Monomial, Poly, Variable};
    use perfhopf::hopf::additive_hopf;
    use perfhopf::modules::{fiber_product, factor_through_kernel, GaAugmented, pullback_u};
    use std::collections::BTreeMap;

    let pr = params(2, 1, 2, 4);
    let two_gen = || -> perfhopf::modules::AugmentedModule {
        let alg = Algebra::new(
            2,
            2,
            Rat::from_int(4),
            vec![
                Variable::nilpotent("x0", Rat::ONE, 0),
                Variable::nilpotent("u", Rat::ONE, 0),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let hopf = additive_hopf(alg.clone()).unwrap();
        let base = Algebra::new(
            2,
            2,
            Rat::from_int(4),
            vec![Variable::plain("t", Rat::ONE, 0)],
            BTreeMap::new(),
        )
        .unwrap();
        let img = Poly::monomial(2, Monomial::var(0, Rat::ONE))
            .add(&Poly::monomial(2, Monomial::var(1, Rat::ONE)));
        let aug = AlgebraMap::new(base.clone(), alg, vec![img]).unwrap();
        pullback_u("two_gen", &GaAugmented { hopf, base, aug }, &pr).unwrap()
    };
    let a = two_gen();
    let b = two_gen();
    let c = build_module(&ModuleSpec::Identity, &pr).unwrap();
    let fa = factor_through_kernel(&c, &a).unwrap();
    let fb = factor_through_kernel(&c, &b).unwrap();
    let err = fiber_product("bad", &a, &b, &c, &fa, &fb);
    assert!(matches!(
        err,
        Err(perfhopf::error::Error::UnsupportedPresentation(_))
    ));
}

#[test]
fn projection_off_a_product_is_not_a_quasi_ideal() {
    // two free towers with the first-coordinate augmentation: the two
    // point-level products d(y)x and d(x)y genuinely differ
    use perfhopf::algebra::{Algebra, Monomial, Poly, Variable};
    use perfhopf::hopf::additive_hopf;
    use perfhopf::modules::{base_line, AugmentedModule};
    use std::collections::BTreeMap;

    let pr = params(2, 2, 2, 4);
    let alg = Algebra::new(
        2,
        2,
        Rat::from_int(4),
        vec![Variable::tower("t", Rat::ONE), Variable::tower("u", Rat::ONE)],
        BTreeMap::new(),
    )
    .unwrap();
    let hopf = additive_hopf(alg.clone()).unwrap();
    let base = base_line(&pr).unwrap();
    let img = Poly::monomial(2, alg.deepest(0));
    let aug = AlgebraMap::new(base.clone(), alg, vec![img]).unwrap();
    let m = AugmentedModule {
        label: "product_projection".into(),
        params: pr,
        hopf,
        base,
        aug,
        twist: 0,
    };
    let qi = perfhopf::modules::is_quasi_ideal(&m).unwrap();
    assert!(!qi.holds);
    assert_eq!(qi.certificate.as_deref(), Some("u"));
}

#[test]
fn restriction_reports_the_mismatch() {
    // feeding one module's value to another module's restriction fails loudly
    let pr = params(2, 2, 2, 3);
    let twisted = build_module(&ModuleSpec::Twisted, &pr).unwrap();
    let uwf = build_module(&ModuleSpec::UWF, &pr).unwrap();
    let value = perfhopf::sections::evaluate(&twisted, &perfhopf::sections::Pair::generator("y")).unwrap();
    let err = perfhopf::sections::restrict_check(&uwf, &value);
    assert!(err.is_err());
}

#[test]
fn twisted_presentation_matches_the_documented_one() {
    // relation x -> 0, coordinates of order p with degrees p^i, tower at
    // 1/p^(m+1), augmentation the tower shift
    let pr = params(2, 2, 2, 4);
    let m = build_module(&ModuleSpec::Twisted, &pr).unwrap();
    let alg = &m.hopf.alg;
    let x = alg.var_index("x").unwrap();
    assert_eq!(alg.vars()[x].degree, Rat::new(1, 2));
    let nf = alg
        .nf(&perfhopf::algebra::Poly::<Fp>::monomial(
            2,
            perfhopf::algebra::Monomial::var(x, Rat::ONE),
        ))
        .unwrap();
    assert!(nf.poly.is_zero());
    // comultiplication of x1 carries the level-one cross term
    let x1 = alg.var_index("x1").unwrap();
    assert_eq!(
        m.hopf.square.alg.poly_string(m.hopf.comult.image(x1)),
        "x0*x0' + x1 + x1'"
    );
    // augmentation sends the deepest root to the next level down
    assert_eq!(alg.poly_string(m.aug.image(0)), "x^(1/2)");
}
