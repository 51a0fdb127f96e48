//! Regularity estimators: uniform Hölder exponent, wavelet scaling function,
//! critical Lebesgue index, pointwise p-exponents and lacunarity exponents.
//!
//! Every `liminf` over scales is realized as an ordinary least-squares slope of
//! `log2` quantities against `-j` on a fixed range of scales. Scales where the
//! quantity vanishes are skipped; fewer than three usable scales is an error.

use serde::{Deserialize, Serialize};

use crate::dyadic::locate;
use crate::error::{Error, Result};
use crate::leaders::{l_leaders, q_leaders, LeaderField};
use crate::wavelet::CoefficientField;

/// Offset added to `q0 = 1/p0` when the critical index is finite, so that the
/// lacunarity derivative is taken strictly inside the domain.
pub const LACUNARITY_Q_MARGIN: f64 = 0.05;

/// Minimum number of scales entering any regression.
pub const MIN_SCALES: usize = 3;

/// Inclusive range of scales `[j1, j2]` used by regressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub j1: u32,
    pub j2: u32,
}

impl ScaleRange {
    pub fn new(j1: u32, j2: u32) -> Result<Self> {
        if j2 < j1 + (MIN_SCALES as u32 - 1) {
            return Err(Error::domain(format!(
                "scale range [{j1}, {j2}] holds fewer than {MIN_SCALES} scales"
            )));
        }
        Ok(ScaleRange { j1, j2 })
    }

    /// `[3, J - 2]` where `J` is the finest scale of a field of this depth.
    pub fn default_for(depth: u32) -> Result<Self> {
        let finest = depth.saturating_sub(1);
        Self::new(3, finest.saturating_sub(2))
    }

    /// `[3, J - 4]`: leaves four finer scales under the last regressed
    /// leader, since p-leader sums are cut at the finest scale.
    pub fn leader_default(depth: u32) -> Result<Self> {
        let finest = depth.saturating_sub(1);
        Self::new(3, finest.saturating_sub(4))
    }

    /// Checks the range against the scales available in a field of this depth.
    pub fn check(&self, depth: u32) -> Result<()> {
        if self.j2 >= depth {
            return Err(Error::domain(format!(
                "scale {} beyond finest scale {}",
                self.j2,
                depth.saturating_sub(1)
            )));
        }
        Ok(())
    }

    pub fn scales(&self) -> impl Iterator<Item = u32> {
        self.j1..=self.j2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    /// Estimated exponent: minus the slope of `log2 y` against `j`.
    pub slope: f64,
    /// Fitted `log2 y` at `j = 0`.
    pub intercept: f64,
    /// First and last scale actually used.
    pub j_range: (u32, u32),
    pub residual_rms: f64,
    pub points_used: usize,
}

/// OLS fit of `log2 y_j ≈ intercept - slope * j`.
pub fn fit_log_scale(points: &[(u32, f64)]) -> Result<RegressionFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| y.is_finite())
        .map(|&(j, y)| (j as f64, y))
        .collect();
    if pts.len() < MIN_SCALES {
        return Err(Error::estimation(format!(
            "only {} usable scales, need {MIN_SCALES}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    let used: Vec<u32> = points
        .iter()
        .filter(|(_, y)| y.is_finite())
        .map(|p| p.0)
        .collect();
    Ok(RegressionFit {
        slope: -b,
        intercept: a,
        j_range: (used[0], used[used.len() - 1]),
        residual_rms: (rss / n).sqrt(),
        points_used: pts.len(),
    })
}

/// `log2 Σ x^p` over nonzero `|x|`, computed relative to the largest term.
pub fn log2_sum_pow<I: IntoIterator<Item = f64>>(values: I, p: f64) -> Option<f64> {
    let v: Vec<f64> = values
        .into_iter()
        .map(f64::abs)
        .filter(|x| *x > 0.0)
        .collect();
    if v.is_empty() {
        return None;
    }
    let anchor = if p >= 0.0 {
        v.iter().copied().fold(0.0, f64::max)
    } else {
        v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let s: f64 = v.iter().map(|x| (x / anchor).powf(p)).sum();
    Some(p * anchor.log2() + s.log2())
}

/// Samples of a scaling function (`η(p)` or `ζ(r)`) with one fit per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub fits: Vec<RegressionFit>,
}

impl ScalingFunction {
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.grid
            .iter()
            .position(|g| (g - x).abs() < 1e-12)
            .map(|i| self.values[i])
    }

    /// Largest generalized second difference `2 (interp - value)` over interior
    /// grid points; concave samples give values `<= 0`.
    pub fn max_concavity_violation(&self) -> f64 {
        max_concavity_violation(&self.grid, &self.values)
    }

    /// Largest increase of `η(p)/p` along an increasing grid of positive `p`.
    pub fn max_ratio_increase(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .filter(|(g, _)| g[0] > 0.0)
            .map(|(g, v)| v[1] / g[1] - v[0] / g[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn max_concavity_violation(grid: &[f64], values: &[f64]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 1..grid.len().saturating_sub(1) {
        let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
        let t = (x1 - x0) / (x2 - x0);
        let interp = values[i - 1] + t * (values[i + 1] - values[i - 1]);
        worst = worst.max(2.0 * (interp - values[i]));
    }
    worst
}

/// Uniform Hölder exponent from `sup_k |c_{j,k}|`.
pub fn estimate_hmin(field: &CoefficientField, range: ScaleRange) -> Result<(f64, RegressionFit)> {
    range.check(field.depth)?;
    let pts: Vec<(u32, f64)> = range
        .scales()
        .map(|j| {
            let sup = field.scale(j).iter().fold(0.0f64, |m, c| m.max(c.abs()));
            (j, if sup > 0.0 { sup.log2() } else { f64::NAN })
        })
        .collect();
    let fit = fit_log_scale(&pts)?;
    Ok((fit.slope, fit))
}

/// `η(p)` from `log2(2^-j Σ_k |c_{j,k}|^p)` for each `p` of the grid.
pub fn wavelet_scaling_function(
    field: &CoefficientField,
    p_grid: &[f64],
    range: ScaleRange,
) -> Result<ScalingFunction> {
    range.check(field.depth)?;
    if p_grid.is_empty() {
        return Err(Error::domain("empty p grid"));
    }
    let mut values = Vec::with_capacity(p_grid.len());
    let mut fits = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::domain(format!("p = {p} must be finite and > 0")));
        }
        let pts: Vec<(u32, f64)> = range
            .scales()
            .map(|j| {
                let y = log2_sum_pow(field.scale(j).iter().copied(), p)
                    .map_or(f64::NAN, |s| s - j as f64);
                (j, y)
            })
            .collect();
        let fit = fit_log_scale(&pts)?;
        values.push(fit.slope);
        fits.push(fit);
    }
    Ok(ScalingFunction {
        grid: p_grid.to_vec(),
        values,
        fits,
    })
}

/// Bracket `sup{p : η(p) > 0} <= p0 <= inf{p : η(p) < 0}` read off the grid.
///
/// A transversal zero crossing between adjacent grid points is located by
/// linear interpolation and returned as a degenerate bracket. A grid on which
/// `η` stays positive yields `(grid_max, +∞)`.
pub fn critical_lebesgue_index(sf: &ScalingFunction) -> (f64, f64) {
    let g = &sf.grid;
    let v = &sf.values;
    let Some(first_neg) = v.iter().position(|x| *x < 0.0) else {
        let top = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return (top, f64::INFINITY);
    };
    let last_pos = v[..first_neg].iter().rposition(|x| *x > 0.0);
    match last_pos {
        None => (0.0, g[first_neg]),
        Some(i) if i + 1 == first_neg => {
            let root = g[i] + (g[i + 1] - g[i]) * v[i] / (v[i] - v[i + 1]);
            (root, root)
        }
        Some(i) => (g[i], g[first_neg]),
    }
}

/// Pointwise exponent from the leaders along `λ_j(x0)`.
pub fn pointwise_p_exponent(
    lead: &LeaderField,
    x0: f64,
    range: ScaleRange,
) -> Result<(f64, RegressionFit)> {
    range.check(lead.depth())?;
    let pts: Vec<(u32, f64)> = range
        .scales()
        .map(|j| {
            let k = locate(x0, j)?.k;
            Ok((j, lead.get(j, k).map_or(f64::NAN, f64::log2)))
        })
        .collect::<Result<_>>()?;
    let fit = fit_log_scale(&pts)?;
    Ok((fit.slope, fit))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub q: f64,
    pub h: f64,
    pub fit: RegressionFit,
}

/// Pointwise exponent as a function of `q = 1/p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PExponentCurve {
    pub x0: f64,
    pub points: Vec<CurvePoint>,
}

impl PExponentCurve {
    pub fn qs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.q).collect()
    }

    pub fn hs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.h).collect()
    }

    /// Largest generalized second difference of `q ↦ h`; `<= 0` when concave.
    pub fn concavity_violation(&self) -> f64 {
        max_concavity_violation(&self.qs(), &self.hs())
    }

    /// Least-squares line `h ≈ intercept + slope q`; returns `(slope, intercept, rms)`.
    pub fn affine_fit(&self) -> (f64, f64, f64) {
        let n = self.points.len() as f64;
        let mq = self.points.iter().map(|p| p.q).sum::<f64>() / n;
        let mh = self.points.iter().map(|p| p.h).sum::<f64>() / n;
        let sqq: f64 = self.points.iter().map(|p| (p.q - mq).powi(2)).sum();
        let sqh: f64 = self.points.iter().map(|p| (p.q - mq) * (p.h - mh)).sum();
        let slope = if sqq > 0.0 { sqh / sqq } else { 0.0 };
        let intercept = mh - slope * mq;
        let rms = (self
            .points
            .iter()
            .map(|p| (p.h - intercept - slope * p.q).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        (slope, intercept, rms)
    }
}

/// `q ↦ h^{1/q}(x0)` over a grid of `q >= 0` (`q = 0` uses sup-leaders).
pub fn p_exponent_curve(
    field: &CoefficientField,
    x0: f64,
    q_grid: &[f64],
    range: ScaleRange,
) -> Result<PExponentCurve> {
    if q_grid.is_empty() {
        return Err(Error::domain("empty q grid"));
    }
    let mut points = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let lead = q_leaders(field, q)?;
        let (h, fit) = pointwise_p_exponent(&lead, x0, range)?;
        points.push(CurvePoint { q, h, fit });
    }
    Ok(PExponentCurve { x0, points })
}

/// `q0 = 1/p0` from a bracket of the critical Lebesgue index, taking the
/// lower end of the bracket; zero when the bracket is unbounded.
pub fn q0_from_bracket(bracket: (f64, f64)) -> f64 {
    let (lo, hi) = bracket;
    if hi.is_infinite() {
        0.0
    } else if lo > 0.0 {
        1.0 / lo
    } else {
        1.0 / hi
    }
}

/// `q` at which the lacunarity derivative is evaluated for a given `q0 = 1/p0`.
pub fn lacunarity_q(q0: f64) -> f64 {
    if q0 > 0.0 {
        q0 + LACUNARITY_Q_MARGIN
    } else {
        0.0
    }
}

/// Lacunarity exponent at `x0`: regression of L-leaders along `λ_j(x0)`,
/// with L-leaders built at `lacunarity_q(q0)` and increment `dq`.
pub fn pointwise_lacunarity(
    field: &CoefficientField,
    x0: f64,
    q0: f64,
    dq: f64,
    range: ScaleRange,
) -> Result<(f64, RegressionFit)> {
    if !q0.is_finite() || q0 < 0.0 {
        return Err(Error::domain(format!("q0 = {q0} must be finite and >= 0")));
    }
    let lead = l_leaders(field, lacunarity_q(q0), dq)?;
    pointwise_p_exponent(&lead, x0, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaders::{p_leaders, wavelet_leaders};

    fn geometric_field(depth: u32, h: f64) -> CoefficientField {
        let detail = (0..depth)
            .map(|j| vec![(-(h * j as f64)).exp2(); 1usize << j])
            .collect();
        CoefficientField::from_detail(0.0, detail).unwrap()
    }

    #[test]
    fn fit_recovers_exact_line() {
        let pts: Vec<(u32, f64)> = (2..9).map(|j| (j, 1.5 - 0.7 * j as f64)).collect();
        let fit = fit_log_scale(&pts).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-12);
        assert!((fit.intercept - 1.5).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.points_used, 7);
        assert_eq!(fit.j_range, (2, 8));
    }

    #[test]
    fn fit_skips_undefined_scales_and_needs_three() {
        let pts = vec![(3, 1.0), (4, f64::NAN), (5, 0.0), (6, f64::NAN)];
        assert!(matches!(fit_log_scale(&pts), Err(Error::Estimation(_))));
        let pts = vec![(3, 1.0), (4, f64::NAN), (5, 0.0), (6, -0.5)];
        let fit = fit_log_scale(&pts).unwrap();
        assert_eq!(fit.points_used, 3);
        assert_eq!(fit.j_range, (3, 6));
    }

    #[test]
    fn scale_range_validation() {
        assert!(ScaleRange::new(3, 4).is_err());
        assert_eq!(
            ScaleRange::default_for(14).unwrap(),
            ScaleRange { j1: 3, j2: 11 }
        );
        assert_eq!(
            ScaleRange::leader_default(14).unwrap(),
            ScaleRange { j1: 3, j2: 9 }
        );
        assert!(ScaleRange::leader_default(8).is_err());
        assert!(ScaleRange::new(3, 14).unwrap().check(14).is_err());
        assert!(ScaleRange::new(3, 13).unwrap().check(14).is_ok());
    }

    #[test]
    fn hmin_of_geometric_field() {
        let f = geometric_field(12, 0.4);
        let (h, fit) = estimate_hmin(&f, ScaleRange::new(2, 10).unwrap()).unwrap();
        assert!((h - 0.4).abs() < 1e-12);
        assert_eq!(fit.points_used, 9);
    }

    #[test]
    fn hmin_of_zero_field_is_an_error() {
        let f = CoefficientField::zeros(10).unwrap();
        assert!(matches!(
            estimate_hmin(&f, ScaleRange::new(2, 8).unwrap()),
            Err(Error::Estimation(_))
        ));
    }

    #[test]
    fn scaling_function_of_geometric_field() {
        // 2^-j · 2^j · 2^{-hpj} ⇒ η(p) = hp
        let f = geometric_field(12, 0.4);
        let sf = wavelet_scaling_function(&f, &[0.5, 1.0, 2.0], ScaleRange::new(2, 10).unwrap())
            .unwrap();
        for (p, v) in sf.grid.iter().zip(&sf.values) {
            assert!((v - 0.4 * p).abs() < 1e-10);
        }
        assert!(sf.max_concavity_violation() < 1e-10);
        assert!(wavelet_scaling_function(&f, &[0.0], ScaleRange::new(2, 10).unwrap()).is_err());
    }

    fn sf_from(grid: &[f64], values: &[f64]) -> ScalingFunction {
        ScalingFunction {
            grid: grid.to_vec(),
            values: values.to_vec(),
            fits: Vec::new(),
        }
    }

    #[test]
    fn critical_index_brackets() {
        let sf = sf_from(&[1.0, 2.0, 3.0, 4.0], &[0.6, 0.2, -0.2, -0.6]);
        assert_eq!(critical_lebesgue_index(&sf), (2.5, 2.5));
        let sf = sf_from(&[1.0, 2.0, 3.0], &[0.5, 0.4, 0.3]);
        assert_eq!(critical_lebesgue_index(&sf), (3.0, f64::INFINITY));
        let sf = sf_from(&[1.0, 2.0, 3.0, 4.0], &[0.5, 0.0, 0.0, -0.1]);
        assert_eq!(critical_lebesgue_index(&sf), (1.0, 4.0));
        let sf = sf_from(&[1.0, 2.0], &[-0.5, -1.0]);
        assert_eq!(critical_lebesgue_index(&sf), (0.0, 1.0));
    }

    #[test]
    fn q0_from_brackets() {
        assert_eq!(q0_from_bracket((10.0, f64::INFINITY)), 0.0);
        assert_eq!(q0_from_bracket((4.0, 5.0)), 0.25);
        assert_eq!(q0_from_bracket((0.0, 0.5)), 2.0);
    }

    #[test]
    fn pointwise_exponent_of_geometric_field() {
        // deep enough that truncation of the p-leader sums stays small on the range
        let f = geometric_field(17, 0.35);
        let r = ScaleRange::new(3, 9).unwrap();
        let (h, _) = pointwise_p_exponent(&wavelet_leaders(&f), 0.3, r).unwrap();
        assert!((h - 0.35).abs() < 1e-10);
        let (h2, _) = pointwise_p_exponent(&p_leaders(&f, 2.0).unwrap(), 0.3, r).unwrap();
        assert!((h2 - 0.35).abs() < 0.02, "{h2}");
    }

    #[test]
    fn lacunarity_matches_finite_difference() {
        let mut f = geometric_field(12, 0.5);
        // break homogeneity so the exponent actually depends on q
        for (j, row) in f.detail.iter_mut().enumerate() {
            for (k, c) in row.iter_mut().enumerate() {
                if k % 3 != 0 {
                    *c *= (-(0.2 * j as f64)).exp2();
                }
            }
        }
        let r = ScaleRange::new(3, 9).unwrap();
        let (q0, dq) = (0.3, 0.1);
        let q = lacunarity_q(q0);
        let (l, _) = pointwise_lacunarity(&f, 0.41, q0, dq, r).unwrap();
        let h = |q: f64| {
            pointwise_p_exponent(&q_leaders(&f, q).unwrap(), 0.41, r)
                .unwrap()
                .0
        };
        let fd = (h(q + dq) - h(q)) / dq;
        assert!((l - fd).abs() < 1e-9, "{l} vs {fd}");
    }

    #[test]
    fn concavity_violation_on_nonuniform_grid() {
        let g = [0.0, 0.25, 0.5, 1.0];
        let concave: Vec<f64> = g.iter().map(|x: &f64| -x * x).collect();
        assert!(max_concavity_violation(&g, &concave) < 0.0);
        let convex: Vec<f64> = g.iter().map(|x: &f64| x * x).collect();
        assert!(max_concavity_violation(&g, &convex) > 0.0);
    }
}
