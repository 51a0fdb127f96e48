//! Wavelet leaders, p-leaders and L-leaders.
//!
//! All three are computed bottom-up: each dyadic interval keeps the maximum
//! modulus found in its subtree together with the subtree's weighted `l^p` mass
//! expressed relative to that maximum. The quantity at `λ` then merges the
//! three subtrees making up `3λ`. Keeping the mass relative to the local
//! maximum lets `p` range from small values up to very large ones without
//! overflow.

use serde::{Deserialize, Serialize};

use crate::dyadic::{locate, DyadicIndex};
use crate::error::{Error, Result};
use crate::wavelet::CoefficientField;

/// Default increment in `q = 1/p` used by L-leaders.
pub const DEFAULT_DQ: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeaderKind {
    /// `d_λ = sup_{λ' ⊂ 3λ} |c_λ'|`.
    Sup,
    /// `d^p_λ = (Σ_{λ' ⊂ 3λ} |c_λ'|^p 2^{-(j'-j)})^{1/p}`.
    P { p: f64 },
    /// `(d^{1/(q+dq)}_λ / d^{1/q}_λ)^{1/dq}`, with the sup-leader standing in for `q = 0`.
    L { q: f64, dq: f64 },
}

impl LeaderKind {
    /// Leader kind for `q = 1/p`; `q = 0` selects sup-leaders.
    pub fn from_q(q: f64) -> Result<Self> {
        if !q.is_finite() || q < 0.0 {
            return Err(Error::domain(format!("q = {q} must be finite and >= 0")));
        }
        Ok(if q == 0.0 {
            LeaderKind::Sup
        } else {
            LeaderKind::P { p: 1.0 / q }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderField {
    pub kind: LeaderKind,
    /// `values[j][k]`; `None` marks a leader that is zero or undefined.
    pub values: Vec<Vec<Option<f64>>>,
}

impl LeaderField {
    pub fn depth(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, j: u32, k: u64) -> Option<f64> {
        self.values
            .get(j as usize)?
            .get(k as usize)
            .copied()
            .flatten()
    }

    /// Scales carrying at least one defined value.
    pub fn j_range(&self) -> Option<(u32, u32)> {
        let defined: Vec<u32> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().any(Option::is_some))
            .map(|(j, _)| j as u32)
            .collect();
        Some((*defined.first()?, *defined.last()?))
    }

    /// Leader values along `λ_j(x0)` for every scale, `None` where undefined.
    pub fn along(&self, x0: f64) -> Result<Vec<(u32, Option<f64>)>> {
        (0..self.depth())
            .map(|j| {
                let DyadicIndex { k, .. } = locate(x0, j)?;
                Ok((j, self.get(j, k)))
            })
            .collect()
    }

    pub fn defined_count(&self, j: u32) -> usize {
        self.values[j as usize]
            .iter()
            .filter(|v| v.is_some())
            .count()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Node {
    // largest |c| in the subtree
    max: f64,
    // Σ 2^{-(j'-j)} (|c|/max)^p over the subtree
    mass: f64,
}

fn rel_pow(x: f64, max: f64, p: f64) -> f64 {
    if max == 0.0 || x == 0.0 {
        0.0
    } else {
        (x / max).powf(p)
    }
}

fn merge(parts: &[(Node, f64)], own: f64, p: Option<f64>) -> Node {
    let max = parts.iter().fold(own, |m, (n, _)| m.max(n.max));
    if max == 0.0 {
        return Node::default();
    }
    let mass = match p {
        None => 0.0,
        Some(p) => {
            rel_pow(own, max, p)
                + parts
                    .iter()
                    .map(|(n, w)| w * n.mass * rel_pow(n.max, max, p))
                    .sum::<f64>()
        }
    };
    Node { max, mass }
}

// p = None computes plain subtree maxima.
fn subtree_nodes(field: &CoefficientField, p: Option<f64>) -> Vec<Vec<Node>> {
    let depth = field.depth as usize;
    let mut nodes: Vec<Vec<Node>> = vec![Vec::new(); depth];
    for j in (0..depth).rev() {
        let row = &field.detail[j];
        nodes[j] = (0..row.len())
            .map(|k| {
                let own = row[k].abs();
                if j + 1 == depth {
                    merge(&[], own, p)
                } else {
                    let fine = &nodes[j + 1];
                    merge(&[(fine[2 * k], 0.5), (fine[2 * k + 1], 0.5)], own, p)
                }
            })
            .collect();
    }
    nodes
}

// Neighbourhood 3λ at scale j as distinct positions (collapses for j <= 1).
fn three_lambda(j: usize, k: usize) -> Vec<usize> {
    let m = 1usize << j;
    let mut ks = vec![(k + m - 1) % m, k, (k + 1) % m];
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn leaders_from_nodes(nodes: &[Vec<Node>], p: Option<f64>) -> Vec<Vec<Option<f64>>> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, row)| {
            (0..row.len())
                .map(|k| {
                    let parts: Vec<(Node, f64)> = three_lambda(j, k)
                        .into_iter()
                        .map(|kk| (row[kk], 1.0))
                        .collect();
                    let n = merge(&parts, 0.0, p);
                    if n.max == 0.0 {
                        return None;
                    }
                    let value = match p {
                        None => n.max,
                        Some(p) => n.max * n.mass.powf(1.0 / p),
                    };
                    (value > 0.0 && value.is_finite()).then_some(value)
                })
                .collect()
        })
        .collect()
}

/// Sup-leaders `d_λ`, truncated at the finest scale of the field.
pub fn wavelet_leaders(field: &CoefficientField) -> LeaderField {
    let nodes = subtree_nodes(field, None);
    LeaderField {
        kind: LeaderKind::Sup,
        values: leaders_from_nodes(&nodes, None),
    }
}

/// p-leaders `d^p_λ`; `p = +∞` gives the sup-leaders.
pub fn p_leaders(field: &CoefficientField, p: f64) -> Result<LeaderField> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::domain(format!("p = {p} must be > 0")));
    }
    if p.is_infinite() {
        return Ok(wavelet_leaders(field));
    }
    let nodes = subtree_nodes(field, Some(p));
    Ok(LeaderField {
        kind: LeaderKind::P { p },
        values: leaders_from_nodes(&nodes, Some(p)),
    })
}

/// Leaders for `q = 1/p`, sup-leaders at `q = 0`.
pub fn q_leaders(field: &CoefficientField, q: f64) -> Result<LeaderField> {
    match LeaderKind::from_q(q)? {
        LeaderKind::P { p } => p_leaders(field, p),
        _ => Ok(wavelet_leaders(field)),
    }
}

/// L-leaders `(d^{1/(q+dq)} / d^{1/q})^{1/dq}`.
pub fn l_leaders(field: &CoefficientField, q: f64, dq: f64) -> Result<LeaderField> {
    if dq.is_nan() || dq <= 0.0 || dq.is_infinite() {
        return Err(Error::domain(format!("dq = {dq} must be finite and > 0")));
    }
    let base = q_leaders(field, q)?;
    let shifted = q_leaders(field, q + dq)?;
    let values = base
        .values
        .iter()
        .zip(&shifted.values)
        .map(|(row_b, row_s)| {
            row_b
                .iter()
                .zip(row_s)
                .map(|(b, s)| match (b, s) {
                    (Some(b), Some(s)) => {
                        let v = ((s.log2() - b.log2()) / dq).exp2();
                        (v > 0.0 && v.is_finite()).then_some(v)
                    }
                    _ => None,
                })
                .collect()
        })
        .collect();
    Ok(LeaderField {
        kind: LeaderKind::L { q, dq },
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::children_in_3lambda;

    fn single(depth: u32, j0: usize, k0: usize, v: f64) -> CoefficientField {
        let mut f = CoefficientField::zeros(depth).unwrap();
        f.detail[j0][k0] = v;
        f
    }

    fn brute_p(field: &CoefficientField, j: u32, k: u64, p: f64) -> f64 {
        let parent = DyadicIndex { j, k };
        let mut sum = 0.0;
        for jc in j..field.depth {
            for kc in children_in_3lambda(parent, jc).unwrap().iter() {
                sum += field.detail[jc as usize][kc as usize].abs().powf(p)
                    * (-((jc - j) as f64)).exp2();
            }
        }
        sum.powf(1.0 / p)
    }

    #[test]
    fn zero_field_has_no_leaders() {
        let f = CoefficientField::zeros(6).unwrap();
        let l = wavelet_leaders(&f);
        assert!(l.values.iter().flatten().all(Option::is_none));
        assert_eq!(l.j_range(), None);
        let lp = p_leaders(&f, 2.0).unwrap();
        assert!(lp.values.iter().flatten().all(Option::is_none));
    }

    #[test]
    fn single_coefficient_closed_forms() {
        let (j0, k0, v) = (5usize, 13usize, 0.7);
        let f = single(8, j0, k0, v);
        let sup = wavelet_leaders(&f);
        for p in [0.5, 1.0, 2.0, 3.7] {
            let lp = p_leaders(&f, p).unwrap();
            for j in 0..8u32 {
                for k in 0..(1u64 << j) {
                    let covers = j as usize <= j0
                        && children_in_3lambda(DyadicIndex { j, k }, j0 as u32)
                            .unwrap()
                            .contains(k0 as u64);
                    match lp.get(j, k) {
                        Some(d) => {
                            assert!(covers);
                            let want = v * (-((j0 as f64 - j as f64) / p)).exp2();
                            assert!((d - want).abs() < 1e-14 * want.max(1.0));
                            assert_eq!(sup.get(j, k), Some(v));
                        }
                        None => {
                            assert!(!covers);
                            assert_eq!(sup.get(j, k), None);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_exponents() {
        let f = single(5, 2, 1, 1.0);
        assert!(matches!(p_leaders(&f, 0.0), Err(Error::Domain(_))));
        assert!(matches!(p_leaders(&f, -1.0), Err(Error::Domain(_))));
        assert!(matches!(l_leaders(&f, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(l_leaders(&f, 0.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(q_leaders(&f, -0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn sup_leader_dominates_own_coefficient() {
        let mut f = CoefficientField::zeros(7).unwrap();
        let mut s = 1u64;
        for row in f.detail.iter_mut() {
            for c in row.iter_mut() {
                s = s
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                *c = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            }
        }
        let sup = wavelet_leaders(&f);
        for (j, row) in f.detail.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                assert!(sup.get(j as u32, k as u64).unwrap() >= c.abs());
            }
        }
        // p-leaders against brute force; large p is squeezed onto the sup-leader.
        let l2 = p_leaders(&f, 2.0).unwrap();
        let l64 = p_leaders(&f, 64.0).unwrap();
        for j in 0..7u32 {
            for k in 0..(1u64 << j) {
                let b = brute_p(&f, j, k, 2.0);
                let d = l2.get(j, k).unwrap();
                assert!((d - b).abs() <= 1e-12 * b);
                let sup_v = sup.get(j, k).unwrap();
                let terms = 3.0 * (1u64 << (7 - j)) as f64;
                let ratio = l64.get(j, k).unwrap() / sup_v;
                assert!(ratio >= (-((6 - j) as f64) / 64.0).exp2() - 1e-12);
                assert!(ratio <= terms.powf(1.0 / 64.0) + 1e-12);
            }
        }
    }

    #[test]
    fn large_p_approaches_sup_on_decaying_field() {
        let mut f = CoefficientField::zeros(7).unwrap();
        let mut s = 7u64;
        for (j, row) in f.detail.iter_mut().enumerate() {
            for c in row.iter_mut() {
                s = s
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let u = (s >> 11) as f64 / (1u64 << 53) as f64;
                *c = (0.5 + u) * (-(j as f64)).exp2();
            }
        }
        let sup = wavelet_leaders(&f);
        let big = p_leaders(&f, 256.0).unwrap();
        for j in 0..7u32 {
            for k in 0..(1u64 << j) {
                let ratio = big.get(j, k).unwrap() / sup.get(j, k).unwrap();
                assert!((ratio - 1.0).abs() < 0.01, "scale {j}: {ratio}");
            }
        }
    }

    #[test]
    fn l_leader_of_isolated_coefficient_is_one() {
        let f = single(6, 6 - 1, 20, 0.3);
        let l = l_leaders(&f, 0.0, 0.05).unwrap();
        let j = 5u32;
        // λ containing the coefficient itself: d^{20} = d^∞ = 0.3
        let v = l.get(j, 20).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(l.kind, LeaderKind::L { q: 0.0, dq: 0.05 });
    }

    #[test]
    fn along_follows_located_intervals() {
        let f = single(6, 5, 16, 1.0);
        let path = wavelet_leaders(&f).along(0.5).unwrap();
        assert_eq!(path.len(), 6);
        assert!(path.iter().all(|(_, v)| *v == Some(1.0)));
        assert!(wavelet_leaders(&f).along(1.5).is_err());
    }
}
