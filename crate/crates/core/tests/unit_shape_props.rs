use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use shapefit::unit_shape::{ideal_polygon_distance, unit_shape_fidelity};
use shapefit::{Family, Spec};

fn any_family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn any_polygon() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::POLYGONS.to_vec())
}

proptest! {
    #[test]
    fn mirror_symmetry(family in any_family(), phi in -10.0..10.0f64) {
        let spec = Spec::new(family);
        let a = spec.point(phi);
        let b = spec.point(-phi);
        prop_assert_eq!(a.x, b.x);
        prop_assert_eq!(a.y, -b.y);
    }

    #[test]
    fn e_fold_symmetry(family in any_polygon(), phi in -PI..PI) {
        let spec = Spec::new(family);
        let turn = TAU / spec.sides as f64;
        let rotated = spec.point(phi).rotate(turn);
        let shifted = spec.point(phi + turn);
        prop_assert!(rotated.distance(shifted) < 1e-12, "{:?} vs {:?}", rotated, shifted);
    }

    #[test]
    fn periodicity(family in any_family(), phi in -PI..PI) {
        let spec = Spec::new(family);
        prop_assert!(spec.point(phi + TAU).distance(spec.point(phi)) < 1e-12);
    }

    #[test]
    fn circle_radius_is_exactly_half(phi in -100.0..100.0f64) {
        let p = Spec::new(Family::Ellipse).point(phi);
        prop_assert!((p.norm() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn derivative_matches_central_differences() {
    let h = 1e-6;
    for family in Family::ALL {
        let spec = Spec::new(family);
        for j in 0..1000 {
            let phi = -PI + TAU * j as f64 / 1000.0;
            let d = spec.dphi(phi);
            let fd = (spec.point(phi + h) - spec.point(phi - h)) * (1.0 / (2.0 * h));
            assert!(
                (d.x - fd.x).abs() < 1e-6 && (d.y - fd.y).abs() < 1e-6,
                "{family} at {phi}: {d:?} vs {fd:?}"
            );
        }
    }
}

#[test]
fn polygon_curves_stay_near_ideal_polygons() {
    for family in Family::POLYGONS {
        let spec = Spec::new(family);
        let f = unit_shape_fidelity(&spec, 3600);
        assert!(f.rmse < 0.01, "{family}: {}", f.rmse);
        assert!(f.max_deviation < 0.02, "{family}: {}", f.max_deviation);
        // edge midpoints lie close to the ideal edge
        let mid = spec.point(0.0);
        assert!(ideal_polygon_distance(spec.sides, mid) < 0.005);
    }
    let circle = unit_shape_fidelity(&Spec::new(Family::Ellipse), 3600);
    assert!(circle.rmse < 1e-15 && circle.max_deviation < 1e-15);
}

#[test]
fn f32_curve_agrees_with_f64() {
    for family in Family::ALL {
        let s64 = Spec::new(family);
        let s32 = shapefit::UnitShapeSpec::<f32>::new(family);
        for j in 0..64 {
            let phi = TAU * j as f64 / 64.0;
            let a = s64.point(phi);
            let b = s32.point(phi as f32).cast::<f64>();
            assert!(a.distance(b) < 1e-5);
        }
    }
}
