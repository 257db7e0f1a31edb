use std::f64::consts::PI;

use proptest::prelude::*;
use toponogov::comparison::{build_comparison_triangle, is_forward_critical};
use toponogov::finsler::{fundamental_tensor, ChartFamily, ChartSpec, Domain, FinslerChart, TensorMethod, Vector};
use toponogov::model::clairaut::{arc_nu_for_theta, arc_theta};
use toponogov::model::ModelSurface;
use toponogov::numeric::directions::unit_directions;
use toponogov::numeric::wrap_angle;
use toponogov::parallel;

fn randers(b: [f64; 2]) -> FinslerChart {
    FinslerChart::build(&ChartSpec {
        family: ChartFamily::Randers { alpha: vec![vec![1.5, 0.2], vec![0.2, 1.0]], b: b.to_vec(), db: None },
        domain: Domain::cube(2, 5.0),
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flat_comparison_angles_sum_to_pi(tx in 0.3f64..4.0, ty in 0.3f64..4.0, u in 0.05f64..0.95) {
        let side = (tx - ty).abs() + u * (tx + ty - (tx - ty).abs());
        let tri = build_comparison_triangle(&ModelSurface::flat(), tx, ty, side).unwrap();
        prop_assert!((tri.angle_x + tri.angle_y + tri.angle_p - PI).abs() <= 1e-7);
        prop_assert!((tri.realized_side - side).abs() <= 1e-6);
    }

    #[test]
    fn gauss_comparison_triangle_has_the_requested_side(tx in 0.8f64..2.0, ty in 0.8f64..2.0, u in 0.1f64..0.9) {
        let model = ModelSurface::gauss_tanh();
        let far = toponogov::model::model_distance(&model, toponogov::model::ModelPoint::new(tx, 0.0), toponogov::model::ModelPoint::new(ty, PI)).unwrap().0;
        let side = (tx - ty).abs() + u * (far - (tx - ty).abs());
        let tri = build_comparison_triangle(&model, tx, ty, side).unwrap();
        prop_assert!((tri.realized_side - side).abs() <= 1e-6);
        prop_assert!(tri.delta_theta > 0.0 && tri.delta_theta <= PI);
    }

    #[test]
    fn singleton_connector_is_never_critical(x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
        prop_assume!(x0.hypot(x1) > 0.1);
        let e = FinslerChart::euclidean(2, 10.0);
        let x = Vector::from_vec(vec![x0, x1]);
        let ws: Vec<Vector> = unit_directions(2, 64).into_iter().map(Vector::from_vec).collect();
        let u = x.normalize();
        let single = [u.clone()];
        prop_assert!(!is_forward_critical(&e, &Vector::zeros(2), &x, &ws, Some(&single)).unwrap().critical);
        let pair = [u.clone(), -u];
        prop_assert!(is_forward_critical(&e, &Vector::zeros(2), &x, &ws, Some(&pair)).unwrap().critical);
    }

    #[test]
    fn fundamental_tensor_is_zero_homogeneous(b0 in -0.3f64..0.3, b1 in -0.3f64..0.3, a in 0.0f64..6.28, lam in 0.1f64..10.0) {
        let c = randers([b0, b1]);
        let x = Vector::from_vec(vec![0.4, -0.2]);
        let v = Vector::from_vec(vec![a.cos(), a.sin()]);
        let g1 = fundamental_tensor(&c, &x, &v, TensorMethod::Analytic).unwrap().matrix();
        let g2 = fundamental_tensor(&c, &x, &(&v * lam), TensorMethod::Analytic).unwrap().matrix();
        prop_assert!((g1 - g2).abs().max() <= 1e-12);
        // Euler: g_v(v, v) = F(v)^2
        let f = c.norm(&x, &v);
        let gv = (v.transpose() * fundamental_tensor(&c, &x, &v, TensorMethod::Analytic).unwrap().matrix() * &v)[(0, 0)];
        prop_assert!((gv - f * f).abs() <= 1e-12);
    }

    #[test]
    fn clairaut_angle_inverts(t0 in 0.8f64..1.6, len in 0.1f64..1.0, frac in 0.05f64..0.9) {
        let s = ModelSurface::gauss_tanh();
        let t1 = t0 + len;
        let nu = frac * s.f(t1).min(s.f(t0));
        let dth = arc_theta(&s, nu, t0, t1);
        let back = arc_nu_for_theta(&s, t0, t1, dth).unwrap();
        prop_assert!(((back - nu) / nu).abs() <= 1e-8);
    }

    #[test]
    fn wrapped_angles_are_principal(theta in -100.0f64..100.0) {
        let w = wrap_angle(theta);
        prop_assert!(w > -PI - 1e-15 && w <= PI);
        let k = (theta - w) / (2.0 * PI);
        prop_assert!((k - k.round()).abs() <= 1e-9);
    }

    #[test]
    fn parallel_map_matches_sequential(xs in proptest::collection::vec(-1e3f64..1e3, 0..200)) {
        let f = |x: &f64| x.sin() * x.cos() + x;
        prop_assert_eq!(parallel::map(&xs, f), parallel::map_sequential(&xs, f));
    }
}
