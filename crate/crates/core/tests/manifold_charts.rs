use edgeflow::manifold::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Sign of `det[∂x/∂u₁, …, ∂x/∂u_d, x]`: the chart frame followed by the
/// outward normal. With this convention the graph chart over the last axis
/// at the north pole is positively oriented.
fn frame_orientation(base: &Base, chart: Chart, u: &[f64]) -> f64 {
    let x = base.to_point(chart, u);
    let dx = base.chart_derivative(chart, u);
    let n = x.len();
    let m = DMatrix::from_fn(n, n, |r, col| if col == n - 1 { x[r] } else { dx[r][col] });
    m.determinant().signum()
}

proptest! {
    #[test]
    fn sphere_chart_orientation_matches_outward_normal_frame(
        d in 1usize..4,
        axis_seed in 0usize..8,
        positive in any::<bool>(),
        raw in prop::collection::vec(-0.5f64..0.5, 3),
    ) {
        let base = Base::Sphere(d);
        let chart = Chart::Graph { axis: axis_seed % (d + 1), positive };
        let u = &raw[..d];
        prop_assert_eq!(base.chart_orientation(chart), frame_orientation(&base, chart, u));
    }

    #[test]
    fn chart_round_trip(
        d in 1usize..4,
        axis_seed in 0usize..8,
        positive in any::<bool>(),
        raw in prop::collection::vec(-0.5f64..0.5, 3),
    ) {
        let base = Base::Sphere(d);
        let chart = Chart::Graph { axis: axis_seed % (d + 1), positive };
        let u = raw[..d].to_vec();
        let x = base.to_point(chart, &u);
        let r: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((r - 1.0).abs() < 1e-14);
        prop_assert_eq!(base.to_chart(chart, &x), u);
        prop_assert_eq!(base.best_chart(&x), base.best_chart(&base.normalize(&x)));
    }

    #[test]
    fn angle_helpers_wrap(t in -50.0f64..50.0, s in -50.0f64..50.0) {
        let w = wrap_angle(t);
        prop_assert!((0.0..2.0 * std::f64::consts::PI).contains(&w));
        let d = angle_diff(t, s);
        prop_assert!(d > -std::f64::consts::PI - 1e-12 && d <= std::f64::consts::PI + 1e-12);
        let turns = (t - s - d) / (2.0 * std::f64::consts::PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }
}

#[test]
fn reflection_reverses_and_is_an_involution() {
    let torus = Base::Torus(3);
    let x = [1.0, 2.0, 3.0];
    let y = torus.reflect(&torus.reflect(&x));
    assert!(torus.distance(&x, &y) < 1e-14);
    let sphere = Base::Sphere(2);
    let p = [0.6, 0.0, 0.8];
    assert_eq!(sphere.reflect(&p), vec![-0.6, 0.0, 0.8]);
    assert_eq!(sphere.charts().len(), 6);
    assert_eq!(torus.charts(), vec![Chart::Torus]);
}
