use num_traits::Zero;
use proptest::prelude::*;

use pdmq_core::helium::{derived_params, PhysicalParams};
use pdmq_core::ordering::{match_orderings, weyl_kinetic};
use pdmq_core::parser::{parse_hamiltonian, unit_bindings, ClassicalSymbol};
use pdmq_core::pointmass::{measure_of_map, pm_map, transform_diffop, unit_measure_restore};
use pdmq_core::spectral::{assemble, effective_matrix, Grid};
use pdmq_core::susy::{
    commutator_check, effective_hamiltonian_z, ladder_product, LadderSign, PartnerSource,
};
use pdmq_core::symbolic::{
    expand_sandwich, q, qi, Coeff, DiffOp, OrderingParam, PolyX, PowerLawMass, QSqrt2, Q,
};
use pdmq_core::weyl::{hermiticity_check, symmetrization_oracle, weyl_order, Weight};

fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn coeff() -> impl Strategy<Value = Coeff> {
    (rational(), rational(), rational(), rational()).prop_map(|(a, b, c, d)| {
        Coeff::new(QSqrt2::new(a, b), QSqrt2::new(c, d))
    })
}

fn real_coeff() -> impl Strategy<Value = Coeff> {
    (rational(), rational()).prop_map(|(a, b)| Coeff::real(QSqrt2::new(a, b)))
}

fn exponent() -> impl Strategy<Value = Q> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn poly_with(c: impl Strategy<Value = Coeff>) -> impl Strategy<Value = PolyX> {
    proptest::collection::vec((c, exponent()), 0..4).prop_map(PolyX::from_terms)
}

fn poly() -> impl Strategy<Value = PolyX> {
    poly_with(coeff())
}

fn diffop() -> impl Strategy<Value = DiffOp> {
    proptest::collection::vec((poly(), 0u32..=2), 0..3).prop_map(DiffOp::from_terms)
}

fn real_symbol() -> impl Strategy<Value = ClassicalSymbol> {
    proptest::collection::vec((poly_with(real_coeff()), 0u32..=2), 0..4).prop_map(ClassicalSymbol::from_terms)
}

fn cubic_with(a: &Q) -> (PowerLawMass, OrderingParam) {
    (PowerLawMass::cubic(), OrderingParam::new(a.clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compose_is_associative(a in diffop(), b in diffop(), c in diffop()) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn compose_distributes(a in diffop(), b in diffop(), c in diffop()) {
        prop_assert_eq!(a.compose(&(&b + &c)), &a.compose(&b) + &a.compose(&c));
        prop_assert_eq!((&a + &b).compose(&c), &a.compose(&c) + &b.compose(&c));
    }

    #[test]
    fn canonical_form_is_idempotent(terms in proptest::collection::vec((coeff(), exponent()), 0..6)) {
        let p = PolyX::from_terms(terms);
        let again = PolyX::from_terms(p.terms().map(|(e, c)| (c.clone(), e.clone())));
        prop_assert_eq!(&again, &p);
        prop_assert!(p.terms().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn weyl_matches_oracle(f in poly(), k in 0u32..=2) {
        let sym = ClassicalSymbol::term(f.clone(), k);
        prop_assert_eq!(weyl_order(&sym), symmetrization_oracle(&f, k).unwrap());
    }

    #[test]
    fn weyl_of_real_symbol_is_hermitian(s in real_symbol()) {
        let report = hermiticity_check(&weyl_order(&s), &Weight::Unit);
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn weyl_is_linear(s in real_symbol(), t in real_symbol(), c in rational()) {
        let k = Coeff::rational(c.clone());
        let scaled = ClassicalSymbol::from_terms(t.terms().map(|(p, f)| (f.scale(&k), p)));
        let lhs = weyl_order(&s.add(&scaled));
        let rhs = &weyl_order(&s) + &weyl_order(&t).scale(&k);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_is_one(a in rational()) {
        let (m, o) = cubic_with(&a);
        prop_assert!(commutator_check(&m, &o).unwrap().is_zero());
    }

    #[test]
    fn ladder_product_is_ordering_free(a in rational(), b in rational()) {
        let m = PowerLawMass::cubic();
        let p = |x: &Q| ladder_product(&m, &OrderingParam::new(x.clone()), LadderSign::Raising).unwrap();
        prop_assert_eq!(p(&a), p(&b));
        let lower = ladder_product(&m, &OrderingParam::new(a.clone()), LadderSign::Lowering).unwrap();
        prop_assert_eq!(lower, &p(&a) + &DiffOp::identity());
    }

    #[test]
    fn restore_removes_first_derivative(n in (1i64..=12, 1i64..=3).prop_map(|(a, b)| q(a, b)), a in rational()) {
        let map = match pm_map(&n) { Ok(m) => m, Err(_) => return Ok(()) };
        let mass = PowerLawMass::new(n.clone()).unwrap();
        let sandwich = expand_sandwich(&mass, &OrderingParam::new(a));
        let z = match transform_diffop(&sandwich, &map) { Ok(z) => z, Err(_) => return Ok(()) };
        let mu = measure_of_map(&map).unwrap();
        let r = unit_measure_restore(&z, &mu).unwrap();
        prop_assert!(r.coeff(1).is_zero());
        prop_assert_eq!(r.coeff(2), z.coeff(2));
        prop_assert!(hermiticity_check(&z, &Weight::Measure(mu)).passed());
    }

    #[test]
    fn roots_are_scale_covariant(c in rational().prop_filter("nonzero", |c| !c.is_zero())) {
        let target = weyl_kinetic(&qi(3));
        let base = match_orderings(&qi(3), &target, PartnerSource::Expanded).unwrap();
        let scaled = match_orderings(&qi(3), &target.scale(&Coeff::rational(c)), PartnerSource::Expanded).unwrap();
        prop_assert_eq!(base.rational_roots(), scaled.rational_roots());
    }

    #[test]
    fn parser_never_panics(s in "[xpM0U0k0-9+*/^() .e-]{0,30}") {
        let b = unit_bindings();
        if let Ok(sym) = parse_hamiltonian(&s, &b) {
            prop_assert_eq!(parse_hamiltonian(&sym.to_dsl(), &b).unwrap(), sym);
        }
    }

    #[test]
    fn symbol_round_trips(s in real_symbol()) {
        let b = unit_bindings();
        prop_assert_eq!(parse_hamiltonian(&s.to_dsl(), &b).unwrap(), s);
    }

    #[test]
    fn sandwich_matches_finite_differences(a in (-12i64..=12, 1i64..=6).prop_map(|(n, d)| q(n, d)), x0 in 0.5f64..3.0) {
        // ψ = exp(−x) so every derivative is ±ψ
        let mass = PowerLawMass::cubic();
        let op = expand_sandwich(&mass, &OrderingParam::new(a.clone()));
        let psi = (-x0).exp();
        let exact = op.apply_at(x0, &[psi, -psi, psi]).unwrap().re;
        let m = |x: f64| x.powi(3);
        let af = pdmq_core::symbolic::field::q_to_f64(&a);
        let h = 1e-4;
        let inner = |x: f64| {
            let g = |y: f64| m(y).powf(af) * (-y).exp();
            m(x).powf(-2.0 * af - 1.0) * (g(x + h) - g(x - h)) / (2.0 * h)
        };
        let outer = m(x0).powf(af) * (inner(x0 + h) - inner(x0 - h)) / (2.0 * h);
        let numeric = -0.5 * outer;
        prop_assert!((exact - numeric).abs() <= 1e-5 * (1.0 + exact.abs()), "{} vs {}", exact, numeric);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn routes_agree_for_any_ordering(a in rational()) {
        let d = derived_params(&PhysicalParams::helium4()).unwrap();
        let susy = effective_hamiltonian_z(&OrderingParam::new(a.clone()), &d, PartnerSource::Expanded, 0.0).unwrap();
        let (m, o) = cubic_with(&a);
        let map = pm_map(m.n()).unwrap();
        let restored = unit_measure_restore(
            &transform_diffop(&expand_sandwich(&m, &o), &map).unwrap(),
            &measure_of_map(&map).unwrap(),
        ).unwrap();
        prop_assert_eq!(susy.kinetic_op(), restored.clone());
        let grid = Grid::new(0.05, 3.0, 300).unwrap();
        let mut direct = assemble(&restored, &grid).unwrap().scaled(2.0 * d.k);
        let vsys: Vec<f64> = grid.nodes().into_iter().map(|z| susy.v_sys(z)).collect();
        direct.add_diagonal(&vsys);
        prop_assert_eq!(effective_matrix(&susy, &grid).unwrap().max_abs_diff(&direct), 0.0);
    }

    #[test]
    fn helium_scalings(r1 in 0.0f64..0.9, r2 in 0.0f64..0.9) {
        let base = PhysicalParams::helium4();
        let d1 = derived_params(&base.at_pressure_ratio(r1)).unwrap();
        let d2 = derived_params(&base.at_pressure_ratio(r2)).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        prop_assert!(rel(d1.u0 / d1.r_c.powi(2), d2.u0 / d2.r_c.powi(2)) < 1e-12);
        prop_assert!(rel(d1.m0 / d1.r_c.powi(3), d2.m0 / d2.r_c.powi(3)) < 1e-12);
        prop_assert!(rel(d1.p_th * d1.lambda, 6.626_070_15e-34) < 1e-12);
        prop_assert_eq!(r1 < r2, d1.r_c < d2.r_c);
    }
}
