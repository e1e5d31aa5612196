mod common;

use holcert::geometry::{exterior_derivative, FormTuple};
use holcert::grid::GridSpec;
use holcert::homotopy::{replace_all_forms, DriverOptions, PipelineError, StepPath};
use holcert::numeric::{min_singular_over_grid, RANK_TOL};
use holcert::ring::{ratio, Ring};
use proptest::prelude::*;

use common::{random_poly, rng};

fn flagship() -> FormTuple {
    FormTuple::parse(&Ring::affine(2), &[&["1", "0"], &["0", "x2"], &["0", "1 + x2"]]).unwrap()
}

fn grid() -> GridSpec {
    GridSpec::unit(2, 9).unwrap()
}

#[test]
fn flagship_segments_are_numerically_full_rank() {
    let out = replace_all_forms(&flagship(), &[], &grid(), &DriverOptions::default()).unwrap();
    let h = out.homotopy.as_ref().unwrap();
    for seg in h.segments() {
        let min = min_singular_over_grid(&seg.forms, &grid(), Some(9)).unwrap();
        assert!(min > RANK_TOL, "{}: {min}", seg.label);
    }
    assert!(h.endpoints_chain().unwrap());
    assert_eq!(h.evaluate(&ratio(0, 1)).unwrap(), flagship());
    assert_eq!(h.evaluate(&ratio(1, 1)).unwrap(), out.final_forms);
    for (k, f) in out.functions.iter().enumerate() {
        assert_eq!(out.final_forms.rows()[k], exterior_derivative(f.as_ref().unwrap()));
    }
}

#[test]
fn flagship_steps_take_expected_paths() {
    let out = replace_all_forms(&flagship(), &[], &grid(), &DriverOptions::default()).unwrap();
    assert!(matches!(out.steps[0].path, StepPath::Direct { .. }));
    assert!(matches!(out.steps[1].path, StepPath::Solved { .. }));
    assert!(matches!(out.steps[2].path, StepPath::Exact));
    for s in &out.steps {
        assert!(s.solution.residual.verify(s.sigma.ideal.generators()));
    }
}

#[test]
fn rank_deficient_input_is_rejected() {
    let r = Ring::affine(2);
    let forms = FormTuple::parse(&r, &[&["1", "0"], &["x1", "0"], &["x2", "0"]]).unwrap();
    let err = replace_all_forms(&forms, &[], &grid(), &DriverOptions::default()).unwrap_err();
    assert!(matches!(err.error, PipelineError::NotFullRank));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_tuples_with_primitives_stay_put(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ring = Ring::affine(2);
        let p = random_poly(&mut r, &ring, &[0, 1], 2, 0.5);
        let forms = FormTuple::new(&ring, vec![
            exterior_derivative(&ring.var(0)),
            exterior_derivative(&ring.var(1)),
            exterior_derivative(&p),
        ]).unwrap();
        let prims = [Some(ring.var(0)), Some(ring.var(1)), Some(p.clone())];
        let out = replace_all_forms(&forms, &prims, &grid(), &DriverOptions::default()).unwrap();
        prop_assert_eq!(&out.final_forms, &forms);
        prop_assert!(out.steps.iter().all(|s| matches!(s.path, StepPath::Exact)));
        prop_assert!(out.all_rank_certified());
    }
}
