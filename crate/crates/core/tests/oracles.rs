mod common;

use pexp::leaders::{l_leaders, p_leaders, wavelet_leaders};
use pexp::mfa::structure_functions;
use pexp::ZeroPolicy;
use proptest::prelude::*;

use common::{brute_leaders, brute_structure, random_field, rel_err};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sup_leaders_match_enumeration(field in random_field(6)) {
        prop_assert_eq!(wavelet_leaders(&field).values, brute_leaders(&field, None));
    }

    #[test]
    fn p_leaders_match_enumeration(field in random_field(6), p in 0.1f64..20.0) {
        let fast = p_leaders(&field, p).unwrap();
        for (rf, rb) in fast.values.iter().zip(brute_leaders(&field, Some(p))) {
            for (a, b) in rf.iter().zip(rb) {
                match (a, b) {
                    (Some(a), Some(b)) => prop_assert!(rel_err(*a, b) <= 1e-12, "{a} vs {b}"),
                    (a, b) => prop_assert_eq!(*a, b),
                }
            }
        }
    }

    #[test]
    fn sup_leader_dominates_own_coefficient(field in random_field(6)) {
        let lead = wavelet_leaders(&field);
        for j in 0..field.depth {
            for (k, c) in field.scale(j).iter().enumerate() {
                let d = lead.get(j, k as u64).unwrap_or(0.0);
                prop_assert!(d >= c.abs());
            }
        }
    }

    #[test]
    fn l_leaders_are_ratios_of_p_leaders(field in random_field(6), q in 0.0f64..2.0, dq in 0.01f64..0.5) {
        let l = l_leaders(&field, q, dq).unwrap();
        let b = brute_leaders(&field, if q == 0.0 { None } else { Some(1.0 / q) });
        let s = brute_leaders(&field, Some(1.0 / (q + dq)));
        for j in 0..field.depth as usize {
            for k in 0..1usize << j {
                match (l.values[j][k], b[j][k], s[j][k]) {
                    (Some(v), Some(x), Some(y)) => {
                        let want = ((y.log2() - x.log2()) / dq).exp2();
                        prop_assert!(rel_err(v, want) <= 1e-9, "{v} vs {want}");
                    }
                    (v, _, _) => prop_assert!(v.is_none()),
                }
            }
        }
    }

    #[test]
    fn structure_functions_match_summation(field in random_field(5), p in 0.5f64..6.0, r in -3.0f64..3.0) {
        let lead = p_leaders(&field, p).unwrap();
        if let Ok(sf) = structure_functions(&lead, &[r, 0.0], ZeroPolicy::default()) {
            for j in 0..field.depth {
                let got = sf.log_s[0][j as usize];
                match brute_structure(&lead, r, j) {
                    Some(s) => prop_assert!(rel_err(got.exp2(), s) <= 1e-12),
                    None => prop_assert!(got.is_nan()),
                }
                if sf.counts[j as usize] > 0 {
                    let zero = (sf.counts[j as usize] as f64).log2() - j as f64;
                    prop_assert!((sf.log_s[1][j as usize] - zero).abs() <= 1e-12);
                }
            }
        }
    }
}
