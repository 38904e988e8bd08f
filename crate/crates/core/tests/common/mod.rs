//! Shared proptest strategies.

#![allow(dead_code)]

use proptest::prelude::*;
use stochorder::dists::{BaselineFamily, ComponentSpec};
use stochorder::parallel::ParallelSystem;

pub fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Any admissible PGW or GG shape pair.
pub fn family() -> impl Strategy<Value = BaselineFamily> {
    prop_oneof![
        (0.5..2.5f64, 0.2..2.0f64).prop_map(|(p, q)| BaselineFamily::pgw(p, q).unwrap()),
        (0.5..3.0f64, 0.5..3.0f64).prop_map(|(a, b)| BaselineFamily::gg(a, b).unwrap()),
    ]
}

/// Families inside the regime where the order theorems apply.
pub fn validated_family() -> impl Strategy<Value = BaselineFamily> {
    prop_oneof![
        (0.5..2.5f64, 0.2..1.0f64).prop_map(|(p, q)| BaselineFamily::pgw(p, q).unwrap()),
        (0.5..3.0f64, 0.0..2.0f64).prop_map(|(b, d)| BaselineFamily::gg(b + d, b).unwrap()),
    ]
}

pub fn component() -> impl Strategy<Value = ComponentSpec> {
    (family(), log_uniform(0.1, 10.0), 0.5..3.0f64)
        .prop_map(|(f, l, a)| ComponentSpec::new(f, l, a).unwrap())
}

/// A system of `1..=max_n` components from one family.
pub fn system(fam: BaselineFamily, max_n: usize) -> impl Strategy<Value = ParallelSystem> {
    prop::collection::vec((log_uniform(0.1, 10.0), 0.5..3.0f64), 1..=max_n).prop_map(move |v| {
        let (l, a): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        ParallelSystem::from_scales(fam, &l, &a).unwrap()
    })
}

pub fn positive_vec(min_n: usize, max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(log_uniform(0.1, 10.0), min_n..=max_n)
}
