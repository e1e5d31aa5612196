use holcert::geometry::{determinant, exterior_derivative, FormTuple, VectorField};
use holcert::groebner::Ideal;
use holcert::numeric::{evaluate_forms, to_f64};
use holcert::ring::{rat, ratio, Poly, Rational, Ring};
use proptest::prelude::*;

fn ring() -> Ring {
    Ring::affine(3)
}

fn poly_in(ring: Ring, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Poly> {
    let n = ring.nvars();
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), -5i64..=5, 1i64..=4), 0..=max_terms)
        .prop_map(move |terms| ring.from_terms(terms.into_iter().map(|(e, a, b)| (e, ratio(a, b)))))
}

fn poly() -> impl Strategy<Value = Poly> {
    poly_in(ring(), 5, 3)
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=3).prop_map(|(a, b)| ratio(a, b)), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back(p in poly()) {
        let back = ring().parse(&p.to_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &ring().one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), x in point()) {
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
    }

    #[test]
    fn leibniz_rule(a in poly(), b in poly(), i in 0usize..3) {
        let lhs = (&a * &b).derivative(i);
        let rhs = &(&a.derivative(i) * &b) + &(&a * &b.derivative(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_is_contraction_with_differential(a in poly(), c0 in poly(), c1 in poly(), c2 in poly()) {
        let r = ring();
        let l = VectorField::new(&r, vec![c0.clone(), c1.clone(), c2.clone()]).unwrap();
        let df = exterior_derivative(&a);
        let contracted = &(&(&df[0] * &c0) + &(&df[1] * &c1)) + &(&df[2] * &c2);
        prop_assert_eq!(l.lie(&a), contracted);
    }

    #[test]
    fn specialization_matches_evaluation(a in poly(), v in -4i64..=4, x in point()) {
        let s = a.specialize("x3", &rat(v)).unwrap();
        let mut full = x.clone();
        full[2] = rat(v);
        prop_assert_eq!(s.eval(&x[..2]), a.eval(&full));
    }

    #[test]
    fn membership_certificates_expand(g1 in poly_in(ring(), 3, 2), g2 in poly_in(ring(), 3, 2), c1 in poly_in(ring(), 3, 2), c2 in poly_in(ring(), 3, 2)) {
        let target = &(&c1 * &g1) + &(&c2 * &g2);
        let ideal = Ideal::new(&ring(), vec![g1.clone(), g2.clone()]).unwrap();
        let cert = ideal.membership(&target).unwrap();
        prop_assert!(cert.is_some());
        let cert = cert.unwrap();
        prop_assert!(cert.verify(ideal.generators()));
        prop_assert_eq!(cert.target, target);
    }

    #[test]
    fn reduced_basis_generates_the_same_ideal(g1 in poly_in(ring(), 3, 2), g2 in poly_in(ring(), 3, 2)) {
        let ideal = Ideal::new(&ring(), vec![g1, g2]).unwrap();
        let basis = ideal.reduced_basis().unwrap();
        prop_assert!(basis.certify_equivalence(ideal.generators()));
        for e in &basis.elements {
            prop_assert!(ideal.reduce(e).unwrap().is_zero());
        }
    }

    #[test]
    fn symbolic_minor_matches_numeric_determinant(entries in prop::collection::vec(poly_in(Ring::affine(2), 3, 2), 4), x in prop::collection::vec(-4i64..=4, 2)) {
        let r = Ring::affine(2);
        let m = vec![entries[..2].to_vec(), entries[2..].to_vec()];
        let det = determinant(&m, &r);
        let pt: Vec<Rational> = x.iter().map(|&v| rat(v)).collect();
        let forms = FormTuple::new(&r, m).unwrap();
        let s = &evaluate_forms(&forms, std::slice::from_ref(&pt)).unwrap()[0];
        let numeric = s.singular_values[0] * s.singular_values[1];
        let exact = to_f64(&det.eval(&pt)).abs();
        prop_assert!((numeric - exact).abs() <= 1e-9 * (1.0 + exact));
    }
}
