mod common;

use common::*;
use proptest::prelude::*;
use unitri::grid::{
    classify, classify_triangles, count_equal_abscissa_triangles, count_unit_triangles,
    count_unit_triangles_bruteforce, count_unit_triangles_incidence, Grid,
};
use unitri::sets::GroundSet;

fn equal_abscissa_brute(g: &Grid<Q>) -> u64 {
    let pts = g.points();
    let two_s = g.target_area() * Q::from_integer(2.into());
    let mut n = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let (p, q, r) = (&pts[i], &pts[j], &pts[k]);
                let det = (q.0.clone() - p.0.clone()) * (r.1.clone() - p.1.clone())
                    - (r.0.clone() - p.0.clone()) * (q.1.clone() - p.1.clone());
                let shared = p.0 == q.0 || q.0 == r.0 || p.0 == r.0;
                if shared && (det == two_s || -det == two_s) {
                    n += 1;
                }
            }
        }
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn incidence_counter_matches_brute_force(a in rational_set(6), b in rational_set(6), s in area()) {
        let g = Grid::new(a, b, &s).unwrap();
        let brute = count_unit_triangles_bruteforce(&g, None).unwrap();
        let inc = count_unit_triangles_incidence(&g).unwrap();
        prop_assert_eq!(inc.triangles, brute);
        prop_assert_eq!(inc.ordered, 3 * brute);
        prop_assert_eq!(count_unit_triangles(&g, None).unwrap().triangles, brute);
    }

    #[test]
    fn integer_sets_match_brute_force(a in int_set(7, 9), b in int_set(7, 9), s in area()) {
        let g = Grid::new(a, b, &s).unwrap();
        let brute = count_unit_triangles_bruteforce(&g, None).unwrap();
        prop_assert_eq!(count_unit_triangles_incidence(&g).unwrap().triangles, brute);
    }

    #[test]
    fn classes_partition_the_count(a in rational_set(6), b in rational_set(6), s in area(), k in 1u64..8) {
        let g = Grid::new(a, b, &s).unwrap();
        let total = count_unit_triangles_incidence(&g).unwrap().triangles;
        let d = classify_triangles(&g, k).unwrap();
        prop_assert_eq!(d.rr + d.rp + d.pr + d.pp, d.total);
        prop_assert_eq!(d.total, total);
        prop_assert_eq!(classify(&g, k, None).unwrap(), d);
    }

    #[test]
    fn equal_abscissa_filter(a in rational_set(5), b in rational_set(5), s in area()) {
        let g = Grid::new(a, b, &s).unwrap();
        prop_assert_eq!(count_equal_abscissa_triangles(&g).unwrap(), equal_abscissa_brute(&g));
    }

    #[test]
    fn translation_and_swap_invariance(a in int_set(6, 8), b in int_set(6, 8), t in -5i64..5) {
        let s = q(1, 2);
        let base = count_unit_triangles_incidence(&Grid::new(a.clone(), b.clone(), &s).unwrap()).unwrap();
        let moved = Grid::new(a.translate(&t), b.translate(&-t), &s).unwrap();
        prop_assert_eq!(count_unit_triangles_incidence(&moved).unwrap(), base);
        let swapped = Grid::new(b, a, &s).unwrap();
        prop_assert_eq!(count_unit_triangles_incidence(&swapped).unwrap().triangles, base.triangles);
    }
}

#[test]
fn extreme_thresholds() {
    let a = GroundSet::<i64>::from_ints(&[0, 1, 2, 4, 7]).unwrap();
    let b = GroundSet::<i64>::from_ints(&[0, 1, 3, 4]).unwrap();
    let g = Grid::new(a, b, &q(1, 2)).unwrap();
    let total = count_unit_triangles_incidence(&g).unwrap().triangles;
    assert!(total > 0);
    let d = classify_triangles(&g, 1).unwrap();
    assert_eq!((d.rr, d.total), (total, total));
    let d = classify_triangles(&g, 9).unwrap();
    assert_eq!((d.pp, d.total), (total, total));
}
