//! Dyadic intervals of the periodic unit interval.
//!
//! `λ(j, k) = [k 2^-j, (k+1) 2^-j)` with `0 <= k < 2^j`. The unit interval is
//! treated as a circle, so the tripled interval `3λ` of a boundary interval
//! wraps around modulo 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub j: u32,
    pub k: u64,
}

impl DyadicIndex {
    pub fn new(j: u32, k: u64) -> Result<Self> {
        if j >= 63 {
            return Err(Error::domain(format!("scale {j} too fine")));
        }
        if k >= 1u64 << j {
            return Err(Error::domain(format!(
                "position {k} out of range at scale {j}"
            )));
        }
        Ok(DyadicIndex { j, k })
    }

    pub fn width(&self) -> f64 {
        (-(self.j as f64)).exp2()
    }

    /// Left and right endpoints of the half-open interval.
    pub fn bounds(&self) -> (f64, f64) {
        let w = self.width();
        (self.k as f64 * w, (self.k + 1) as f64 * w)
    }

    pub fn contains(&self, x: f64) -> bool {
        let (a, b) = self.bounds();
        a <= x && x < b
    }
}

/// The dyadic interval of width `2^-j` containing `x0`.
pub fn locate(x0: f64, j: u32) -> Result<DyadicIndex> {
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::domain(format!("x0 = {x0} not in [0, 1)")));
    }
    if j >= 63 {
        return Err(Error::domain(format!("scale {j} too fine")));
    }
    let n = 1u64 << j;
    let k = ((x0 * n as f64).floor() as u64).min(n - 1);
    Ok(DyadicIndex { j, k })
}

/// Positions at one scale forming a contiguous arc of the circle `Z / 2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChildRange {
    pub j: u32,
    pub start: u64,
    pub len: u64,
}

impl ChildRange {
    pub fn modulus(&self) -> u64 {
        1u64 << self.j
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let m = self.modulus();
        (0..self.len).map(move |i| (self.start + i) % m)
    }

    pub fn contains(&self, k: u64) -> bool {
        let m = self.modulus();
        k < m && (k + m - self.start) % m < self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn len(&self) -> u64 {
        self.len
    }
}

/// Intervals `λ'` at scale `j_child` with `λ' ⊂ 3λ`.
///
/// When `3λ` covers the circle more than once the positions collapse to the
/// whole scale, each listed once.
pub fn children_in_3lambda(parent: DyadicIndex, j_child: u32) -> Result<ChildRange> {
    if j_child < parent.j {
        return Err(Error::domain(format!(
            "child scale {j_child} coarser than parent scale {}",
            parent.j
        )));
    }
    if j_child >= 63 {
        return Err(Error::domain(format!("scale {j_child} too fine")));
    }
    let shift = j_child - parent.j;
    let m = 1u64 << j_child;
    let block = 1u64 << shift;
    let len = (3 * block).min(m);
    let start = if len == m {
        0
    } else {
        (parent.k * block + m - block) % m
    };
    Ok(ChildRange {
        j: j_child,
        start,
        len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn set(r: ChildRange) -> BTreeSet<u64> {
        r.iter().collect()
    }

    #[test]
    fn locate_examples() {
        assert_eq!(locate(0.0, 3).unwrap(), DyadicIndex { j: 3, k: 0 });
        assert_eq!(locate(0.999, 1).unwrap(), DyadicIndex { j: 1, k: 1 });
        assert_eq!(locate(1.0 / 3.0, 4).unwrap(), DyadicIndex { j: 4, k: 5 });
    }

    #[test]
    fn locate_rejects_out_of_range() {
        assert!(matches!(locate(1.0, 2), Err(Error::Domain(_))));
        assert!(matches!(locate(-0.1, 2), Err(Error::Domain(_))));
        assert!(locate(f64::NAN, 2).is_err());
    }

    #[test]
    fn three_lambda_examples() {
        let p = DyadicIndex { j: 2, k: 1 };
        assert_eq!(
            set(children_in_3lambda(p, 2).unwrap()),
            BTreeSet::from([0, 1, 2])
        );
        assert_eq!(
            set(children_in_3lambda(p, 3).unwrap()),
            (0..6).collect::<BTreeSet<_>>()
        );
        let r = children_in_3lambda(DyadicIndex { j: 1, k: 0 }, 1).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(set(r), BTreeSet::from([0, 1]));
    }

    #[test]
    fn coarser_child_is_an_error() {
        assert!(children_in_3lambda(DyadicIndex { j: 3, k: 0 }, 2).is_err());
    }

    /// Brute force: λ' ⊂ 3λ on the circle iff every point of λ' lies within the
    /// arc [a - w, b + w). Checked on the exact rational grid of the finer scale.
    fn brute_force(parent: DyadicIndex, j_child: u32) -> BTreeSet<u64> {
        let m = 1i64 << j_child;
        let scale = 1i64 << (j_child - parent.j);
        let a = parent.k as i64 * scale - scale;
        let b = (parent.k as i64 + 1) * scale + scale;
        let mut out = BTreeSet::new();
        for k in 0..m {
            // any lift of [k, k+1) lying inside [a, b)
            for lift in -2..=2 {
                let lo = k + lift * m;
                if lo >= a && lo < b {
                    out.insert(k as u64);
                }
            }
        }
        out
    }

    #[test]
    fn exhaustive_against_brute_force() {
        for jp in 0..=6u32 {
            for k in 0..(1u64 << jp) {
                let parent = DyadicIndex { j: jp, k };
                for jc in jp..=8 {
                    let r = children_in_3lambda(parent, jc).unwrap();
                    let expected = brute_force(parent, jc);
                    assert_eq!(set(r), expected, "parent {parent:?} child scale {jc}");
                    assert_eq!(r.len() as usize, expected.len());
                    if 3 << (jc - jp) <= 1u64 << jc {
                        assert_eq!(r.len(), 3 << (jc - jp));
                    }
                    for kk in 0..(1u64 << jc) {
                        assert_eq!(r.contains(kk), expected.contains(&kk));
                    }
                }
            }
        }
    }
}
