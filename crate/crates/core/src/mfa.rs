//! Structure functions, scaling functions `ζ(r)` and the discrete Legendre
//! transform `d(H) = min_r (1 - ζ(r) + H r)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{
    estimate_hmin, fit_log_scale, lacunarity_q, log2_sum_pow, wavelet_scaling_function, ScaleRange,
    ScalingFunction,
};
use crate::leaders::{l_leaders, p_leaders, LeaderField};
use crate::wavelet::CoefficientField;

/// Ambient dimension of the unit interval.
const AMBIENT_DIM: f64 = 1.0;

/// Relative gap under which two Legendre candidates count as tied.
const TIE_TOL: f64 = 1e-12;

/// `-5, -4.75, ..., 5`.
pub fn default_r_grid() -> Vec<f64> {
    (-20..=20).map(|i| i as f64 * 0.25).collect()
}

/// `-1, -0.99, ..., 2`.
pub fn default_h_grid() -> Vec<f64> {
    (-100..=200).map(|i| i as f64 * 0.01).collect()
}

/// How undefined or vanishing leaders enter the structure functions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPolicy {
    /// Sum over defined, nonzero leaders only.
    #[default]
    ExcludeUndefined,
    /// Mask every scale holding an undefined or zero leader.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFunctions {
    pub r_grid: Vec<f64>,
    /// `log2 S(r, j)` indexed `[r][j]`; NaN on masked scales.
    #[serde(with = "crate::sentinel::matrix")]
    pub log_s: Vec<Vec<f64>>,
    /// Usable leaders per scale.
    pub counts: Vec<usize>,
    pub zero_policy: ZeroPolicy,
}

impl StructureFunctions {
    pub fn depth(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn is_masked(&self, j: u32) -> bool {
        self.log_s
            .first()
            .is_none_or(|row| !row[j as usize].is_finite())
    }
}

/// `S(r, j) = 2^-j Σ e^r` over the usable leaders of each scale.
pub fn structure_functions(
    lead: &LeaderField,
    r_grid: &[f64],
    zero_policy: ZeroPolicy,
) -> Result<StructureFunctions> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !r.is_finite()) {
        return Err(Error::domain("r grid must be nonempty and finite"));
    }
    let depth = lead.depth() as usize;
    let mut log_s = vec![vec![f64::NAN; depth]; r_grid.len()];
    let mut counts = vec![0usize; depth];
    for (j, row) in lead.values.iter().enumerate() {
        let usable: Vec<f64> = row.iter().flatten().copied().filter(|e| *e > 0.0).collect();
        if zero_policy == ZeroPolicy::Strict && usable.len() < row.len() {
            continue;
        }
        counts[j] = usable.len();
        if usable.is_empty() {
            continue;
        }
        for (i, &r) in r_grid.iter().enumerate() {
            if let Some(s) = log2_sum_pow(usable.iter().copied(), r) {
                log_s[i][j] = s - j as f64;
            }
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::estimation("no usable leaders at any scale"));
    }
    Ok(StructureFunctions {
        r_grid: r_grid.to_vec(),
        log_s,
        counts,
        zero_policy,
    })
}

/// `ζ(r)` as the per-moment regression slope of `log2 S(r, j)` against `-j`.
pub fn scaling_function(sf: &StructureFunctions, range: ScaleRange) -> Result<ScalingFunction> {
    range.check(sf.depth())?;
    let mut values = Vec::with_capacity(sf.r_grid.len());
    let mut fits = Vec::with_capacity(sf.r_grid.len());
    for row in &sf.log_s {
        let pts: Vec<(u32, f64)> = range.scales().map(|j| (j, row[j as usize])).collect();
        let fit = fit_log_scale(&pts)?;
        values.push(fit.slope);
        fits.push(fit);
    }
    Ok(ScalingFunction {
        grid: sf.r_grid.clone(),
        values,
        fits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub h_grid: Vec<f64>,
    /// `-∞` where the minimum sits on the boundary of the moment grid.
    #[serde(with = "crate::sentinel::vec")]
    pub d_values: Vec<f64>,
    /// Minimum over the moment grid, boundary or not.
    #[serde(with = "crate::sentinel::vec")]
    pub raw: Vec<f64>,
    pub r_of_h: Vec<f64>,
    /// `[H_lo, H_hi]` of the finite part, if any.
    pub support: Option<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl Spectrum {
    /// Grid point of largest `d` and its value; ties resolve to the smallest `H`.
    pub fn mode(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (&h, &d) in self.h_grid.iter().zip(&self.d_values) {
            if d.is_finite() && best.is_none_or(|(_, bd)| d > bd) {
                best = Some((h, d));
            }
        }
        best
    }

    /// `d` at the grid point nearest to `h`.
    pub fn value_near(&self, h: f64) -> f64 {
        let i = self
            .h_grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - h).abs().total_cmp(&(b.1 - h).abs()))
            .map_or(0, |(i, _)| i);
        self.d_values[i]
    }

    pub fn max_d(&self) -> f64 {
        self.d_values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest generalized second difference over consecutive finite values.
    pub fn concavity_violation(&self) -> f64 {
        let (g, v): (Vec<f64>, Vec<f64>) = self
            .h_grid
            .iter()
            .zip(&self.d_values)
            .filter(|(_, d)| d.is_finite())
            .map(|(h, d)| (*h, *d))
            .unzip();
        crate::exponents::max_concavity_violation(&g, &v)
    }
}

/// Discrete Legendre transform of `ζ` over its own moment grid.
///
/// Ties in the minimum, up to a relative `1e-12`, go to the moment of smallest
/// magnitude. A minimum
/// attained at an end of the moment grid while still decreasing towards it is
/// reported as `-∞`.
pub fn legendre_spectrum(zeta: &ScalingFunction, h_grid: &[f64]) -> Spectrum {
    let r = &zeta.grid;
    let n = r.len();
    let mut d_values = Vec::with_capacity(h_grid.len());
    let mut raw = Vec::with_capacity(h_grid.len());
    let mut r_of_h = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let vals: Vec<f64> = r
            .iter()
            .zip(&zeta.values)
            .map(|(ri, zi)| AMBIENT_DIM - zi + h * ri)
            .collect();
        let mut best = 0;
        for i in 1..n {
            let tol = TIE_TOL * vals[best].abs().max(1.0);
            let tie = (vals[i] - vals[best]).abs() <= tol;
            if (!tie && vals[i] < vals[best]) || (tie && r[i].abs() < r[best].abs()) {
                best = i;
            }
        }
        let boundary = n > 1
            && ((best == 0 && vals[0] < vals[1]) || (best == n - 1 && vals[n - 1] < vals[n - 2]));
        raw.push(vals[best]);
        r_of_h.push(r[best]);
        d_values.push(if boundary {
            f64::NEG_INFINITY
        } else {
            vals[best]
        });
    }
    let finite: Vec<f64> = h_grid
        .iter()
        .zip(&d_values)
        .filter(|(_, d)| d.is_finite())
        .map(|(h, _)| *h)
        .collect();
    let support = finite.first().map(|lo| (*lo, *finite.last().unwrap()));
    Spectrum {
        h_grid: h_grid.to_vec(),
        d_values,
        raw,
        r_of_h,
        support,
        warnings: Vec::new(),
    }
}

/// Multifractal spectrum from p-leaders (sup-leaders for `p = ∞`).
pub fn p_spectrum(
    field: &CoefficientField,
    p: f64,
    r_grid: &[f64],
    h_grid: &[f64],
    range: ScaleRange,
) -> Result<Spectrum> {
    let mut warnings = Vec::new();
    if p.is_infinite() {
        let (hmin, _) = estimate_hmin(field, range)?;
        if hmin <= 0.0 {
            warnings.push(format!("estimated H_min = {hmin:.4} is not positive"));
        }
    } else {
        let eta = wavelet_scaling_function(field, &[p], range)?.values[0];
        if eta <= 0.0 {
            warnings.push(format!("estimated η({p}) = {eta:.4} is not positive"));
        }
    }
    let lead = p_leaders(field, p)?;
    let mut spec = leader_spectrum(&lead, r_grid, h_grid, range)?;
    spec.warnings = warnings;
    Ok(spec)
}

/// Lacunarity spectrum from L-leaders built at `lacunarity_q(q0)`.
pub fn lacunarity_spectrum(
    field: &CoefficientField,
    q0: f64,
    dq: f64,
    r_grid: &[f64],
    h_grid: &[f64],
    range: ScaleRange,
) -> Result<Spectrum> {
    let lead = l_leaders(field, lacunarity_q(q0), dq)?;
    leader_spectrum(&lead, r_grid, h_grid, range)
}

/// Structure functions, scaling function and Legendre transform in one pass.
pub fn leader_spectrum(
    lead: &LeaderField,
    r_grid: &[f64],
    h_grid: &[f64],
    range: ScaleRange,
) -> Result<Spectrum> {
    let sf = structure_functions(lead, r_grid, ZeroPolicy::default())?;
    let zeta = scaling_function(&sf, range)?;
    Ok(legendre_spectrum(&zeta, h_grid))
}
