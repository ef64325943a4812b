use std::collections::BTreeSet;

use pramsey_core::combinatorics::shift_adjacent;
use pramsey_core::constructions::{
    all_pairs, choose_gamma, difference_set, predicted_sq_distance, segment_config_points, separation, spread_points,
    SegmentSpec, SpreadSpec,
};
use pramsey_core::geometry::find_copies;
use pramsey_core::rational::{self, Rational};
use pramsey_core::PointConfig;
use proptest::prelude::*;

fn q(p: i64, d: i64) -> Rational {
    rational::ratio(p, d)
}

fn spec_strategy() -> impl Strategy<Value = SegmentSpec> {
    (1i64..20, 1i64..6, 1i64..20, 1i64..6).prop_map(|(a, ad, g, gd)| SegmentSpec::new(q(a, ad), q(g, gd)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realized_distances_follow_the_law(spec in spec_strategy(), n in 2usize..=6) {
        let pairs = all_pairs(n);
        let c = segment_config_points(&spec, &pairs).unwrap();
        let allowed: BTreeSet<Rational> = spec.distance_set().into_iter().collect();
        for (i, &e) in pairs.iter().enumerate() {
            for (j, &f) in pairs.iter().enumerate() {
                let want = predicted_sq_distance(e, f, &spec).unwrap();
                prop_assert_eq!(c.exact_sq_dist(i, j).unwrap(), want.clone());
                prop_assert!((c.sq_dist(i, j) - rational::to_f64(&want)).abs() <= 1e-12 * rational::to_f64(&spec.a_sq).max(1.0));
                if i != j {
                    prop_assert!(allowed.contains(&want));
                    let is_a = want == spec.a_sq;
                    // Distance a exactly on shift-adjacent pairs, unless a gamma value collides with a^2.
                    if spec.gamma_values().iter().all(|v| *v != spec.a_sq) {
                        prop_assert_eq!(is_a, shift_adjacent(e, f).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn no_equilateral_triangle_of_side_a(spec in spec_strategy(), n in 3usize..=7) {
        prop_assume!(spec.gamma_values().iter().all(|v| *v != spec.a_sq));
        let host = segment_config_points(&spec, &all_pairs(n)).unwrap();
        let zero = rational::zero();
        // Regular simplex on e1, e2, e3 has squared side 2; scale to a^2.
        let half = spec.a_sq.clone() / rational::int(2);
        let eq = PointConfig::from_rational_points(vec![
            vec![rational::one(), zero.clone(), zero.clone()],
            vec![zero.clone(), rational::one(), zero.clone()],
            vec![zero.clone(), zero.clone(), rational::one()],
        ]).unwrap();
        let eq = scale_exact(&eq, &half);
        prop_assert_eq!(find_copies(&eq, &eq, 0.0, 1).len(), 1);
        prop_assert!(find_copies(&host, &eq, 0.0, 1).is_empty());
    }

    #[test]
    fn spread_points_lie_on_the_sphere(c in prop::collection::vec(-3.0..3.0f64, 1..4), n in 3usize..8) {
        prop_assume!(c.len() <= n);
        let spec = SpreadSpec::new(c).unwrap();
        let ground: Vec<usize> = (1..=n).collect();
        let pts = spread_points(&spec, &ground).unwrap();
        for i in 0..pts.len() {
            prop_assert!((pts.norm(i) - spec.norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn chosen_gamma_is_separated(a in 1i64..10, host in prop::collection::vec(1i64..40, 0..6), pat in prop::collection::vec(1i64..40, 1..4)) {
        let a_sq = rational::int(a);
        let host: Vec<Rational> = host.iter().map(|&x| q(x, 4)).collect();
        let pat: Vec<Rational> = pat.iter().map(|&x| q(x, 4)).collect();
        let margin = q(1, 1000);
        let choice = choose_gamma(&a_sq, &host, &pat, &margin, 2000).unwrap();
        let spec = SegmentSpec::new(a_sq, choice.gamma.clone()).unwrap();
        // Direct re-check against every difference.
        for v in spec.gamma_values() {
            for s in pat.iter().chain([rational::zero()].iter()) {
                for t in host.iter().chain([rational::zero()].iter()) {
                    prop_assert!(rational::abs(&(v.clone() - (s - t))) >= margin);
                }
            }
        }
        prop_assert_eq!(separation(&spec, &difference_set(&host, &pat)), choice.separation);
    }
}

/// Scales exact squared distances by `s` (coordinates by sqrt(s)) through the block scale.
fn scale_exact(c: &PointConfig, s: &Rational) -> PointConfig {
    let mut out = c.clone();
    let k = rational::to_f64(s).sqrt();
    for p in &mut out.points {
        p.iter_mut().for_each(|x| *x *= k);
    }
    if let Some(e) = &mut out.exact {
        for b in &mut e.blocks {
            b.scale_sq = &b.scale_sq * s;
        }
    }
    out
}
