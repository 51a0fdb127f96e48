//! Brute-force oracles and random fields shared by the integration tests.
#![allow(dead_code)]

use pexp::{children_in_3lambda, CoefficientField, DyadicIndex, LeaderField};
use proptest::prelude::*;

/// Sup-leader (`p = None`) or p-leader of `λ_{j,k}` by enumerating every
/// `λ' ⊂ 3λ` at every finer scale.
pub fn brute_leader(field: &CoefficientField, j: u32, k: u64, p: Option<f64>) -> Option<f64> {
    let parent = DyadicIndex::new(j, k).unwrap();
    let mut sup = 0.0f64;
    let mut sum = 0.0f64;
    for jc in j..field.depth {
        let w = (-((jc - j) as f64)).exp2();
        for kc in children_in_3lambda(parent, jc).unwrap().iter() {
            let c = field.scale(jc)[kc as usize].abs();
            sup = sup.max(c);
            if let Some(p) = p {
                if c > 0.0 {
                    sum += w * c.powf(p);
                }
            }
        }
    }
    if sup == 0.0 {
        return None;
    }
    match p {
        None => Some(sup),
        Some(p) => Some(sum.powf(1.0 / p)),
    }
}

pub fn brute_leaders(field: &CoefficientField, p: Option<f64>) -> Vec<Vec<Option<f64>>> {
    (0..field.depth)
        .map(|j| {
            (0..1u64 << j)
                .map(|k| brute_leader(field, j, k, p))
                .collect()
        })
        .collect()
}

/// `S(r, j) = 2^-j Σ_k d_{j,k}^r` over defined, nonzero leaders, in plain arithmetic.
pub fn brute_structure(lead: &LeaderField, r: f64, j: u32) -> Option<f64> {
    let vals: Vec<f64> = lead.values[j as usize]
        .iter()
        .flatten()
        .copied()
        .filter(|d| *d > 0.0)
        .collect();
    if vals.is_empty() {
        return None;
    }
    Some(vals.iter().map(|d| d.powf(r)).sum::<f64>() * (-(j as f64)).exp2())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        4 => (any::<bool>(), -12.0f64..4.0).prop_map(|(neg, e)| {
            let c = e.exp2();
            if neg { -c } else { c }
        }),
    ]
}

/// Fields of depth `1..=max_depth` with a fifth of the coefficients zero.
pub fn random_field(max_depth: u32) -> impl Strategy<Value = CoefficientField> {
    (1..=max_depth)
        .prop_flat_map(|depth| {
            (0..depth)
                .map(|j| proptest::collection::vec(coefficient(), 1usize << j))
                .collect::<Vec<_>>()
        })
        .prop_map(|detail| CoefficientField::from_detail(0.0, detail).unwrap())
}
