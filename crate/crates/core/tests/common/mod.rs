#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use unitri::sets::GroundSet;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Sets of distinct integers in `[-range, range]`.
pub fn int_set(max_len: usize, range: i64) -> impl Strategy<Value = GroundSet<i64>> {
    prop::collection::btree_set(-range..=range, 1..=max_len)
        .prop_map(|s| GroundSet::new(s.into_iter().collect()).unwrap())
}

/// Sets of distinct rationals with denominators in `{1, 2, 3}`.
pub fn rational_set(max_len: usize) -> impl Strategy<Value = GroundSet<Q>> {
    prop::collection::btree_set((-12i64..=12, 1i64..=3), 1..=max_len).prop_map(|s| {
        GroundSet::from_unsorted(s.into_iter().map(|(n, d)| q(n, d)).collect()).unwrap()
    })
}

pub fn area() -> impl Strategy<Value = Q> {
    prop::sample::select(vec![q(1, 1), q(1, 2), q(2, 1), q(3, 2)])
}
