mod common;

use bistable::metric::{
    balls_intersect, distance_matrix, kuratowski_embed, min_enclosing_ball_radius, FiniteMetricSpace, Metric, PointCloud,
};
use bistable::Error;
use proptest::prelude::*;

proptest! {
    #[test]
    fn kuratowski_is_exact(points in common::real_points(9, 3)) {
        let space = distance_matrix(&PointCloud::new(points, Metric::L2).unwrap());
        let back = distance_matrix(&kuratowski_embed(&space));
        for i in 0..space.len() {
            for j in 0..space.len() {
                prop_assert_eq!(back.get(i, j), space.get(i, j));
            }
        }
    }

    #[test]
    fn enclosing_ball_grows_with_points(points in common::real_points(8, 2), extra in prop::collection::vec(-1.0f64..1.0, 2)) {
        for metric in [Metric::L2, Metric::LInf] {
            let before = min_enclosing_ball_radius(&points, metric).unwrap();
            let mut more = points.clone();
            more.push(extra.clone());
            let after = min_enclosing_ball_radius(&more, metric).unwrap();
            prop_assert!(after >= before - 1e-12, "{metric:?}: {before} -> {after}");
            // contains every point, and no smaller than half the diameter
            let diam = more.iter().flat_map(|a| more.iter().map(move |b| metric.dist(a, b))).fold(0.0, f64::max);
            prop_assert!(after >= diam / 2.0 - 1e-12);
        }
    }

    #[test]
    fn enclosing_ball_of_two(a in prop::collection::vec(-1.0f64..1.0, 3), b in prop::collection::vec(-1.0f64..1.0, 3)) {
        for metric in [Metric::L2, Metric::LInf] {
            prop_assert_eq!(min_enclosing_ball_radius(&[a.clone(), b.clone()], metric).unwrap(), metric.dist(&a, &b) / 2.0);
        }
    }

    #[test]
    fn ball_intersection_is_monotone(points in common::real_points(6, 2), r in 0.0f64..2.0, dr in 0.0f64..1.0) {
        for metric in [Metric::L2, Metric::LInf] {
            if balls_intersect(&points, r, metric).unwrap() {
                prop_assert!(balls_intersect(&points, r + dr, metric).unwrap());
            }
        }
        let half = points.iter().flat_map(|a| points.iter().map(move |b| Metric::LInf.dist(a, b))).fold(0.0, f64::max) / 2.0;
        prop_assert!(!balls_intersect(&points, half * (1.0 - dr / 2.0), Metric::LInf).unwrap());
        prop_assert!(!balls_intersect(&points, half, Metric::LInf).unwrap());
    }

    #[test]
    fn enclosing_ball_obeys_jung(points in common::real_points(7, 3)) {
        let r = min_enclosing_ball_radius(&points, Metric::L2).unwrap();
        let diam = points.iter().flat_map(|a| points.iter().map(move |b| Metric::L2.dist(a, b))).fold(0.0, f64::max);
        // Jung's bound in R^3
        prop_assert!(r <= diam * (3.0f64 / 8.0).sqrt() + 1e-9);
    }
}

#[test]
fn triangle_violations_are_rejected() {
    let bad = |eps: f64| vec![vec![0.0, 1.0, 2.0 + eps], vec![1.0, 0.0, 1.0], vec![2.0 + eps, 1.0, 0.0]];
    assert!(FiniteMetricSpace::from_matrix(bad(0.0)).is_ok());
    assert!(FiniteMetricSpace::from_matrix(bad(5e-10)).is_ok());
    assert!(matches!(FiniteMetricSpace::from_matrix(bad(2e-9)), Err(Error::InvalidInput(_))));
    assert!(matches!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]), Err(Error::InvalidInput(_))));
    assert_eq!(FiniteMetricSpace::from_matrix(vec![]), Err(Error::EmptyInput));
}

#[test]
fn l1_balls_of_many_points_are_unsupported() {
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    assert!(matches!(min_enclosing_ball_radius(&pts, Metric::L1), Err(Error::UnsupportedMetric(_))));
    assert_eq!(min_enclosing_ball_radius(&pts[..2], Metric::L1).unwrap(), 0.5);
}

#[test]
fn multiplicities_expand() {
    let cloud = PointCloud::with_multiplicities(vec![vec![0.0], vec![2.0]], vec![3, 1], Metric::L2).unwrap();
    let flat = cloud.expanded();
    assert_eq!(flat.len(), 4);
    assert_eq!(cloud.expansion_owner(), vec![0, 0, 0, 1]);
    assert_eq!(common::space(1, 5).len(), 5);
}
