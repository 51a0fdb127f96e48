//! Archetypal signals and coefficient fields with their theoretical exponents.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{fit_log_scale, ScaleRange};
use crate::wavelet::{analyze, CoefficientField, FilterBank};

/// Largest depth accepted by the generators.
pub const MAX_DEPTH: u32 = 24;

/// Decay order of `c_{0,k}` for the coefficient-domain cusp.
pub const CUSP_DECAY: i32 = 6;

/// Deepest level of the Cantor construction.
pub const CANTOR_MAX_LEVEL: u32 = 20;

/// `h(q) = intercept + slope q` with `q = 1/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineInQ {
    pub intercept: f64,
    pub slope: f64,
}

impl AffineInQ {
    pub fn at_q(&self, q: f64) -> f64 {
        self.intercept + self.slope * q
    }

    pub fn at_p(&self, p: f64) -> f64 {
        self.at_q(1.0 / p)
    }
}

/// Theoretical pointwise behaviour at the singular point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pointwise {
    pub x0: f64,
    pub p_exponent: AffineInQ,
    pub lacunarity: f64,
}

/// Theoretical wavelet scaling function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum EtaDescriptor {
    /// `η(p) = slope p + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// `η(1) = 0`, `η(p) >= (1-δ)(1-p)` for `p < 1` and `<=` for `p > 1`.
    MeasureBounds { delta: f64 },
}

impl EtaDescriptor {
    /// Exact value, or the bound for measures.
    pub fn at(&self, p: f64) -> f64 {
        match *self {
            EtaDescriptor::Affine { slope, intercept } => slope * p + intercept,
            EtaDescriptor::MeasureBounds { delta } => (1.0 - delta) * (1.0 - p),
        }
    }
}

/// Closed-form spectra of a lacunary wavelet series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LacunarySpectra {
    pub alpha: f64,
    pub eta: f64,
}

impl LacunarySpectra {
    /// `[α, α/η + (1/η - 1) q]` for `q = 1/p`.
    pub fn p_support(&self, q: f64) -> (f64, f64) {
        (
            self.alpha,
            self.alpha / self.eta + (1.0 / self.eta - 1.0) * q,
        )
    }

    /// `d^p(H) = η (H + q)/(α + q)` on the support, `-∞` elsewhere.
    pub fn d_p(&self, h: f64, q: f64) -> f64 {
        let (lo, hi) = self.p_support(q);
        if h < lo - 1e-12 || h > hi + 1e-12 {
            f64::NEG_INFINITY
        } else {
            self.eta * (h + q) / (self.alpha + q)
        }
    }

    pub fn l_support(&self) -> (f64, f64) {
        (0.0, 1.0 / self.eta - 1.0)
    }

    /// `d^L(L) = η (L + 1)` on the support, `-∞` elsewhere.
    pub fn d_l(&self, l: f64) -> f64 {
        let (lo, hi) = self.l_support();
        if l < lo - 1e-12 || l > hi + 1e-12 {
            f64::NEG_INFINITY
        } else {
            self.eta * (l + 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub generator: String,
    pub pointwise: Option<Pointwise>,
    /// Critical Lebesgue index; `None` where it is not meaningful.
    #[serde(with = "crate::sentinel::option")]
    pub p0: Option<f64>,
    pub eta: Option<EtaDescriptor>,
    pub spectra: Option<LacunarySpectra>,
    pub hmin: Option<f64>,
}

impl GroundTruth {
    fn new(generator: &str) -> Self {
        GroundTruth {
            generator: generator.to_string(),
            pointwise: None,
            p0: None,
            eta: None,
            spectra: None,
            hmin: None,
        }
    }

    /// `q0 = 1/p0`, zero when `p0 = +∞`.
    pub fn q0(&self) -> Option<f64> {
        self.p0.map(|p| if p.is_infinite() { 0.0 } else { 1.0 / p })
    }

    /// Checks the structural constraints on the stored descriptors.
    pub fn check_invariants(&self) -> Result<()> {
        let Some(pw) = self.pointwise else {
            return Ok(());
        };
        let h = pw.p_exponent;
        if h.slope < 0.0 {
            return Err(Error::parameter(format!("negative slope {}", h.slope)));
        }
        if (pw.lacunarity - h.slope).abs() > 1e-12 && self.p0 == Some(f64::INFINITY) {
            return Err(Error::parameter("lacunarity differs from the slope in q"));
        }
        // h(q) >= -q on q > q0 reduces to slope >= -1 and the value at q0
        let q0 = self.q0().unwrap_or(0.0);
        if h.slope < -1.0 || h.at_q(q0) + q0 < -1e-12 {
            return Err(Error::parameter("p-exponent below -1/p"));
        }
        Ok(())
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if !(4..=MAX_DEPTH).contains(&depth) {
        return Err(Error::parameter(format!(
            "depth {depth} not in 4..={MAX_DEPTH}"
        )));
    }
    Ok(())
}

fn finite(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::parameter(format!("{name} = {x} is not finite")));
    }
    Ok(())
}

fn p0_from_negative(alpha: f64, numerator: f64) -> f64 {
    if alpha >= 0.0 {
        f64::INFINITY
    } else {
        numerator / -alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CuspMode {
    TimeDomain,
    CoefficientDomain,
}

/// `|x - 1/2|^α` at cell midpoints, `(x - 1/2)|x - 1/2|^{α-1}` for
/// nonnegative even integers `α`.
pub fn cusp_samples(alpha: f64, depth: u32) -> Result<Vec<f64>> {
    finite("alpha", alpha)?;
    check_depth(depth)?;
    if alpha <= -1.0 {
        return Err(Error::parameter(format!(
            "time-domain cusp needs alpha > -1, got {alpha}"
        )));
    }
    let odd = alpha >= 0.0 && alpha.fract() == 0.0 && (alpha as i64) % 2 == 0;
    let n = 1usize << depth;
    Ok((0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64 - 0.5;
            let v = t.abs().powf(alpha);
            if odd {
                v * t.signum()
            } else {
                v
            }
        })
        .collect())
}

/// Cusp of order `α` at `x0 = 1/2`.
///
/// The time-domain variant samples `|x - 1/2|^α` at cell midpoints, switching
/// to `(x - 1/2)|x - 1/2|^{α-1}` for nonnegative even integers. The coefficient
/// variant sets `c_{j,k} = 2^{-αj} (1 + |k - k0|)^{-6}` around the interval
/// `k0` containing `1/2`.
pub fn cusp(
    alpha: f64,
    depth: u32,
    mode: CuspMode,
    bank: &FilterBank,
) -> Result<(CoefficientField, GroundTruth)> {
    finite("alpha", alpha)?;
    check_depth(depth)?;
    let x0 = 0.5;
    let field = match mode {
        CuspMode::TimeDomain => analyze(&cusp_samples(alpha, depth)?, bank)?,
        CuspMode::CoefficientDomain => {
            let detail = (0..depth)
                .map(|j| {
                    let m = 1i64 << j;
                    let k0 = ((x0 * m as f64) as i64).min(m - 1);
                    let amp = (-alpha * j as f64).exp2();
                    (0..m)
                        .map(|k| {
                            let d = (k - k0).abs();
                            let d = d.min(m - d) as f64;
                            amp * (1.0 + d).powi(-CUSP_DECAY)
                        })
                        .collect()
                })
                .collect();
            CoefficientField::from_detail(0.0, detail)?
        }
    };
    Ok((field, cusp_truth(alpha)))
}

/// Ground truth of the cusp, identical for both variants.
pub fn cusp_truth(alpha: f64) -> GroundTruth {
    let mut truth = GroundTruth::new("cusp");
    truth.pointwise = Some(Pointwise {
        x0: 0.5,
        p_exponent: AffineInQ {
            intercept: alpha,
            slope: 0.0,
        },
        lacunarity: 0.0,
    });
    truth.p0 = Some(p0_from_negative(alpha, 1.0));
    truth
}

/// `θ = ψ(2x) - ψ(2x - 1)` for the Haar `ψ`, as four constant quarters.
const THETA: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Checks the comb geometry and returns the index of the last tooth that can
/// change a cell average at this depth.
fn comb_teeth(omega: f64, gamma: f64, depth: u32) -> Result<usize> {
    let n = (depth as f64).exp2();
    let start = |j: f64| (-omega * j).exp2();
    let width = |j: f64| (-gamma * j).exp2();
    let mut last = 0usize;
    for j in 1..=4096usize {
        let jf = j as f64;
        if start(jf) + width(jf) <= 1.0 / n {
            break;
        }
        last = j;
    }
    let resolved = (1..=last).filter(|&j| width(j as f64) * n >= 1.0).count();
    if resolved < 4 {
        return Err(Error::parameter(format!(
            "only {resolved} teeth resolved at depth {depth}, need 4"
        )));
    }
    if start(1.0) + width(1.0) > 1.0 {
        return Err(Error::parameter("first tooth leaves the unit interval"));
    }
    for j in 1..last {
        let next = (j + 1) as f64;
        if start(next) + width(next) > start(j as f64) {
            return Err(Error::parameter(format!(
                "teeth {j} and {} overlap at depth {depth}",
                j + 1
            )));
        }
    }
    Ok(last)
}

/// Adds `value` on `[a, b)` to cell averages over `n` unit-interval cells.
fn add_cell_averages(cells: &mut [f64], a: f64, b: f64, value: f64) {
    let n = cells.len();
    let nf = n as f64;
    let lo = ((a * nf).floor() as usize).min(n - 1);
    let hi = ((b * nf).ceil() as usize).min(n);
    for (c, cell) in cells.iter_mut().enumerate().take(hi).skip(lo) {
        let left = (c as f64 / nf).max(a);
        let right = ((c + 1) as f64 / nf).min(b);
        if right > left {
            *cell += value * (right - left) * nf;
        }
    }
}

fn comb_signal(alpha: f64, omega: f64, gamma: f64, depth: u32, last: usize) -> Vec<f64> {
    let mut cells = vec![0.0; 1usize << depth];
    for j in 1..=last {
        let jf = j as f64;
        let amp = (-alpha * jf).exp2();
        let a = (-omega * jf).exp2();
        let w = (-gamma * jf).exp2();
        for (i, s) in THETA.iter().enumerate() {
            let lo = a + w * i as f64 / 4.0;
            add_cell_averages(&mut cells, lo, lo + w / 4.0, amp * s);
        }
    }
    cells
}

/// Lacunary comb `Σ_j 2^{-αj} θ(2^{γj}(x - 2^{-ωj}))` with singularity at 0.
///
/// Samples are exact cell averages. Requires `γ > 1`, `γ >= ω > 0`, at least
/// four teeth wider than a sample and no overlap between teeth.
pub fn lacunary_comb(
    alpha: f64,
    omega: f64,
    gamma: f64,
    depth: u32,
    bank: &FilterBank,
) -> Result<(CoefficientField, GroundTruth)> {
    let (signal, truth) = lacunary_comb_samples(alpha, omega, gamma, depth)?;
    Ok((analyze(&signal, bank)?, truth))
}

/// Cell averages of the lacunary comb, with the same validation as [`lacunary_comb`].
pub fn lacunary_comb_samples(
    alpha: f64,
    omega: f64,
    gamma: f64,
    depth: u32,
) -> Result<(Vec<f64>, GroundTruth)> {
    finite("alpha", alpha)?;
    finite("omega", omega)?;
    finite("gamma", gamma)?;
    check_depth(depth)?;
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::parameter(format!("gamma = {gamma} must exceed 1")));
    }
    if !(omega > 0.0 && omega <= gamma) {
        return Err(Error::parameter(format!(
            "need 0 < omega <= gamma, got omega = {omega}, gamma = {gamma}"
        )));
    }
    let last = comb_teeth(omega, gamma, depth)?;
    let signal = comb_signal(alpha, omega, gamma, depth, last);
    let lac = gamma / omega - 1.0;
    let mut truth = GroundTruth::new("lacunary_comb");
    truth.pointwise = Some(Pointwise {
        x0: 0.0,
        p_exponent: AffineInQ {
            intercept: alpha / omega,
            slope: lac,
        },
        lacunarity: lac,
    });
    truth.p0 = Some(p0_from_negative(alpha, gamma));
    truth.hmin = Some((alpha / gamma).min(0.0));
    Ok((signal, truth))
}

/// Comb signal without any geometric validation; teeth may overlap.
pub fn lacunary_comb_unchecked(alpha: f64, omega: f64, gamma: f64, depth: u32) -> Result<Vec<f64>> {
    check_depth(depth)?;
    if !(omega > 0.0 && gamma > 0.0) {
        return Err(Error::parameter("omega and gamma must be positive"));
    }
    let n = (depth as f64).exp2();
    let last = (1..=4096usize)
        .take_while(|&j| (-omega * j as f64).exp2() + (-gamma * j as f64).exp2() > 1.0 / n)
        .last()
        .unwrap_or(0);
    Ok(comb_signal(alpha, omega, gamma, depth, last))
}

/// Thin chirp: `c_{j,k} = 2^{-αj}` on `2^{(1-a)j} <= k <= 2^{(1-a)j} + 2^{bj}`.
pub fn thin_chirp(
    alpha: f64,
    a: f64,
    b: f64,
    depth: u32,
) -> Result<(CoefficientField, GroundTruth)> {
    finite("alpha", alpha)?;
    check_depth(depth)?;
    if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
        return Err(Error::parameter(format!(
            "a = {a}, b = {b} must lie in (0, 1)"
        )));
    }
    if b >= 1.0 - a {
        return Err(Error::parameter(format!(
            "need b < 1 - a, got a = {a}, b = {b}"
        )));
    }
    let detail = (0..depth)
        .map(|j| {
            let m = 1u64 << j;
            let jf = j as f64;
            let first = ((1.0 - a) * jf).exp2();
            let last = first + (b * jf).exp2();
            let amp = (-alpha * jf).exp2();
            (0..m)
                .map(|k| {
                    let kf = k as f64;
                    if kf >= first && kf <= last {
                        amp
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let field = CoefficientField::from_detail(0.0, detail)?;
    let lac = (1.0 - a - b) / a;
    let mut truth = GroundTruth::new("thin_chirp");
    truth.pointwise = Some(Pointwise {
        x0: 0.0,
        p_exponent: AffineInQ {
            intercept: alpha / a,
            slope: lac,
        },
        lacunarity: lac,
    });
    truth.p0 = Some(p0_from_negative(alpha, 1.0 - b));
    truth.hmin = Some(alpha);
    Ok((field, truth))
}

/// Lacunary wavelet series together with the drawn positions per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LacunarySeries {
    pub field: CoefficientField,
    pub truth: GroundTruth,
    pub positions: Vec<Vec<u64>>,
}

/// `⌊2^{ηj}⌋` coefficients of value `2^{-αj}` per scale at distinct uniform positions.
pub fn lacunary_wavelet_series(
    alpha: f64,
    eta: f64,
    depth: u32,
    seed: u64,
) -> Result<LacunarySeries> {
    finite("alpha", alpha)?;
    check_depth(depth)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::parameter(format!("eta = {eta} not in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut detail = Vec::with_capacity(depth as usize);
    let mut positions = Vec::with_capacity(depth as usize);
    for j in 0..depth {
        let m = 1usize << j;
        let count = ((eta * j as f64).exp2().floor() as usize).min(m);
        let amp = (-alpha * j as f64).exp2();
        let mut row = vec![0.0; m];
        let mut picked: Vec<u64> = sample(&mut rng, m, count)
            .into_iter()
            .map(|k| k as u64)
            .collect();
        picked.sort_unstable();
        for &k in &picked {
            row[k as usize] = amp;
        }
        detail.push(row);
        positions.push(picked);
    }
    let field = CoefficientField::from_detail(0.0, detail)?;
    let mut truth = GroundTruth::new("lacunary_wavelet_series");
    truth.p0 = Some(p0_from_negative(alpha, 1.0 - eta));
    truth.eta = Some(EtaDescriptor::Affine {
        slope: alpha,
        intercept: 1.0 - eta,
    });
    truth.spectra = Some(LacunarySpectra { alpha, eta });
    truth.hmin = Some(alpha);
    Ok(LacunarySeries {
        field,
        truth,
        positions,
    })
}

/// Number of Weierstrass terms until `a^n` falls below `2^-52`.
pub fn weierstrass_terms(a: f64) -> usize {
    let mut n = 0;
    let mut an = 1.0;
    while an >= f64::EPSILON {
        an *= a;
        n += 1;
    }
    n
}

/// `W(x) = Σ_{n < n_terms} a^n cos(2π b^n x)` sampled at `x = i / len`.
///
/// Integer `b` keeps the signal 1-periodic and uses exact modular phases.
pub fn weierstrass(
    a: f64,
    b: f64,
    n_terms: Option<usize>,
    len: usize,
) -> Result<(Vec<f64>, GroundTruth)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::parameter(format!("a = {a} not in (0, 1)")));
    }
    if !b.is_finite() || b <= 1.0 || a * b < 1.0 {
        return Err(Error::parameter(format!(
            "need b > 1 and ab >= 1, got a = {a}, b = {b}"
        )));
    }
    if len == 0 {
        return Err(Error::parameter("empty sample grid"));
    }
    let terms = n_terms.unwrap_or_else(|| weierstrass_terms(a));
    let tau = std::f64::consts::TAU;
    let mut out = vec![0.0; len];
    let integer_b = b.fract() == 0.0 && b < 2f64.powi(32);
    let mut an = 1.0;
    let mut bn_mod = 1u128 % len as u128;
    let mut bn = 1.0f64;
    for _ in 0..terms {
        for (i, x) in out.iter_mut().enumerate() {
            let phase = if integer_b {
                ((bn_mod * i as u128) % len as u128) as f64 / len as f64
            } else {
                (bn * i as f64 / len as f64).fract()
            };
            *x += an * (tau * phase).cos();
        }
        an *= a;
        bn *= b;
        if integer_b {
            bn_mod = (bn_mod * b as u128) % len as u128;
        }
    }
    let mut truth = GroundTruth::new("weierstrass");
    let h = -a.ln() / b.ln();
    truth.hmin = Some(h);
    truth.p0 = Some(f64::INFINITY);
    truth.pointwise = Some(Pointwise {
        x0: 0.5,
        p_exponent: AffineInQ {
            intercept: h,
            slope: 0.0,
        },
        lacunarity: 0.0,
    });
    Ok((out, truth))
}

/// I.i.d. standard normal samples.
pub fn white_noise(len: usize, seed: u64) -> (Vec<f64>, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signal = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let mut truth = GroundTruth::new("white_noise");
    truth.hmin = Some(-0.5);
    (signal, truth)
}

/// Cell masses of the middle-third Cantor measure on `2^depth` cells, built
/// from `min(depth, 20)` levels of ternary intervals.
pub fn cantor_masses(depth: u32) -> Result<Vec<f64>> {
    check_depth(depth)?;
    let level = depth.min(CANTOR_MAX_LEVEL);
    let n = 1u128 << depth;
    let scale = 3u128.pow(level);
    let piece = 0.5f64.powi(level as i32);
    let mut cells = vec![0.0; n as usize];
    // interval [A, A+1) in units of 3^-level, cell c is [c 3^level, (c+1) 3^level) / n
    for code in 0..(1u64 << level) {
        let mut a: u128 = 0;
        for bit in (0..level).rev() {
            a = 3 * a + if code >> bit & 1 == 1 { 2 } else { 0 };
        }
        let lo = a * n;
        let hi = lo + n;
        let mut c = lo / scale;
        while c * scale < hi {
            let overlap = hi.min((c + 1) * scale) - lo.max(c * scale);
            cells[c as usize] += piece * overlap as f64 / n as f64;
            c += 1;
        }
    }
    Ok(cells)
}

/// Middle-third Cantor measure analyzed through its cell-average density.
pub fn cantor_measure(depth: u32, bank: &FilterBank) -> Result<(CoefficientField, GroundTruth)> {
    let (density, truth) = cantor_density(depth)?;
    Ok((analyze(&density, bank)?, truth))
}

/// Cell-average density `2^J μ(cell)` of the middle-third Cantor measure.
pub fn cantor_density(depth: u32) -> Result<(Vec<f64>, GroundTruth)> {
    let n = (depth as f64).exp2();
    let density: Vec<f64> = cantor_masses(depth)?.into_iter().map(|m| m * n).collect();
    let mut truth = GroundTruth::new("cantor_measure");
    truth.p0 = Some(1.0);
    truth.eta = Some(EtaDescriptor::MeasureBounds {
        delta: 2f64.ln() / 3f64.ln(),
    });
    Ok((density, truth))
}

/// Field with every detail coefficient at scale `j >= 1` equal to `1/j²`.
pub fn eta_zero_counterexample(depth: u32) -> Result<(CoefficientField, GroundTruth)> {
    check_depth(depth)?;
    let detail = (0..depth)
        .map(|j| {
            let v = if j == 0 {
                0.0
            } else {
                1.0 / (j as f64 * j as f64)
            };
            vec![v; 1usize << j]
        })
        .collect();
    let field = CoefficientField::from_detail(0.0, detail)?;
    let mut truth = GroundTruth::new("eta_zero_counterexample");
    truth.eta = Some(EtaDescriptor::Affine {
        slope: 0.0,
        intercept: 0.0,
    });
    truth.p0 = Some(f64::INFINITY);
    truth.hmin = Some(0.0);
    Ok((field, truth))
}

/// `Card{k : c_{j,k} != 0} <= constant 2^{exponent j}` on a range of scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityCertificate {
    pub exponent: f64,
    pub constant: f64,
}

/// Fits the growth of nonzero counts per scale and returns a certificate when
/// the fitted exponent is below one.
pub fn sparsity_certificate(
    field: &CoefficientField,
    range: ScaleRange,
) -> Option<SparsityCertificate> {
    range.check(field.depth).ok()?;
    let counts = field.nonzero_counts();
    let pts: Vec<(u32, f64)> = range
        .scales()
        .map(|j| {
            let c = counts[j as usize];
            (j, if c > 0 { (c as f64).log2() } else { f64::NAN })
        })
        .collect();
    let exponent = -fit_log_scale(&pts).ok()?.slope;
    if exponent >= 1.0 - 1e-9 {
        return None;
    }
    let constant = range
        .scales()
        .map(|j| counts[j as usize] as f64 / (exponent * j as f64).exp2())
        .fold(0.0, f64::max);
    Some(SparsityCertificate { exponent, constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db8() -> FilterBank {
        FilterBank::default()
    }

    #[test]
    fn cusp_ground_truth() {
        let (_, t) = cusp(0.3, 8, CuspMode::CoefficientDomain, &db8()).unwrap();
        assert_eq!(t.p0, Some(f64::INFINITY));
        assert_eq!(t.pointwise.unwrap().p_exponent.at_p(7.0), 0.3);
        let (_, t) = cusp(-0.2, 8, CuspMode::CoefficientDomain, &db8()).unwrap();
        assert!((t.p0.unwrap() - 5.0).abs() < 1e-12);
        let (_, t) = cusp(-2.0, 8, CuspMode::CoefficientDomain, &db8()).unwrap();
        assert!((t.p0.unwrap() - 0.5).abs() < 1e-12);
        t.check_invariants().unwrap();
    }

    #[test]
    fn cusp_coefficients_peak_at_half() {
        let (f, _) = cusp(0.5, 8, CuspMode::CoefficientDomain, &db8()).unwrap();
        for j in 1..8u32 {
            let row = f.scale(j);
            let k0 = 1usize << (j - 1);
            assert_eq!(row[k0], (-0.5 * j as f64).exp2());
            assert!(row.iter().all(|c| *c <= row[k0]));
        }
        assert_eq!(f.scale(3)[5], (-1.5f64).exp2() * 2f64.powi(-6));
    }

    #[test]
    fn time_domain_cusp_limits() {
        assert!(cusp(-1.0, 8, CuspMode::TimeDomain, &db8()).is_err());
        assert!(cusp(-0.5, 8, CuspMode::TimeDomain, &db8()).is_ok());
        let (f, _) = cusp(2.0, 8, CuspMode::TimeDomain, &db8()).unwrap();
        assert!(f.detail.iter().flatten().any(|c| c.abs() > 1e-8));
    }

    #[test]
    fn comb_ground_truth_and_validation() {
        let (_, t) = lacunary_comb(-0.3, 1.5, 2.0, 14, &db8()).unwrap();
        let pw = t.pointwise.unwrap();
        assert!((pw.lacunarity - 1.0 / 3.0).abs() < 1e-12);
        assert!((pw.p_exponent.intercept + 0.2).abs() < 1e-12);
        assert!((t.p0.unwrap() - 2.0 / 0.3).abs() < 1e-12);
        t.check_invariants().unwrap();
        // α = -γ/2 ⇒ p0 = 2
        let (_, t) = lacunary_comb(-1.0, 1.5, 2.0, 14, &db8()).unwrap();
        assert!((t.p0.unwrap() - 2.0).abs() < 1e-12);
        assert!(lacunary_comb(0.2, 1.5, 1.2, 14, &db8()).is_err());
        assert!(lacunary_comb(0.2, 1.0, 0.9, 14, &db8()).is_err());
        assert!(lacunary_comb(0.2, 1.5, 2.0, 6, &db8()).is_err());
    }

    #[test]
    fn comb_cell_averages_integrate_teeth() {
        // a single coarse tooth has zero mean and exact quarter values
        let s = lacunary_comb_unchecked(0.0, 1.0, 1.5, 10).unwrap();
        let mean: f64 = s.iter().sum::<f64>() / s.len() as f64;
        assert!(mean.abs() < 1e-12);
        let n = s.len() as f64;
        let x = 0.5 + 0.01;
        assert_eq!(s[(x * n) as usize], 1.0);
    }

    #[test]
    fn bounded_comb_is_bounded() {
        let s = lacunary_comb_unchecked(0.5, 1.5, 2.0, 14).unwrap();
        assert!(s.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn thin_chirp_support() {
        let (f, t) = thin_chirp(0.2, 0.5, 0.3, 12).unwrap();
        for j in 0..12u32 {
            let first = (0.5 * j as f64).exp2();
            let last = first + (0.3 * j as f64).exp2();
            for (k, c) in f.scale(j).iter().enumerate() {
                let inside = (k as f64) >= first && (k as f64) <= last;
                assert_eq!(*c != 0.0, inside);
            }
        }
        let pw = t.pointwise.unwrap();
        assert!((pw.lacunarity - 0.4).abs() < 1e-12);
        assert!((pw.p_exponent.at_q(0.0) - 0.4).abs() < 1e-12);
        assert_eq!(t.p0, Some(f64::INFINITY));
        let alpha = -(1.0 - 0.3) / 3.2;
        let (_, t) = thin_chirp(alpha, 0.5, 0.3, 12).unwrap();
        assert!((t.p0.unwrap() - 3.2).abs() < 1e-12);
        t.check_invariants().unwrap();
        assert!(thin_chirp(0.2, 0.5, 0.5, 12).is_err());
    }

    #[test]
    fn lacunary_series_counts() {
        let s = lacunary_wavelet_series(0.3, 0.8, 14, 3).unwrap();
        let counts = s.field.nonzero_counts();
        for j in 0..14u32 {
            let expect = (0.8 * j as f64).exp2().floor() as usize;
            assert_eq!(counts[j as usize], expect);
            assert_eq!(s.positions[j as usize].len(), expect);
        }
        match s.truth.eta.unwrap() {
            EtaDescriptor::Affine { slope, intercept } => {
                assert_eq!(slope, 0.3);
                assert!((intercept - 0.2).abs() < 1e-12);
            }
            _ => panic!("wrong descriptor"),
        }
        let sp = s.truth.spectra.unwrap();
        let (_, hi) = sp.l_support();
        assert!((hi - 0.25).abs() < 1e-12);
        assert!((sp.d_l(0.25) - 1.0).abs() < 1e-12);
        assert!((sp.p_support(0.5).1 - 0.5).abs() < 1e-12);
        let t = lacunary_wavelet_series(-0.25, 0.5, 8, 1).unwrap().truth;
        assert!((t.p0.unwrap() - 2.0).abs() < 1e-12);
        assert!(lacunary_wavelet_series(0.3, 1.0, 8, 1).is_err());
    }

    #[test]
    fn lacunary_series_is_seeded() {
        let a = lacunary_wavelet_series(0.3, 0.8, 12, 9).unwrap();
        let b = lacunary_wavelet_series(0.3, 0.8, 12, 9).unwrap();
        let c = lacunary_wavelet_series(0.3, 0.8, 12, 10).unwrap();
        assert_eq!(a.field, b.field);
        assert_ne!(a.positions, c.positions);
    }

    #[test]
    fn weierstrass_exponents() {
        let (_, t) = weierstrass(0.5, 3.0, None, 64).unwrap();
        assert!((t.hmin.unwrap() - 0.6309297535714574).abs() < 1e-12);
        let (_, t) = weierstrass(0.5, 2.0, None, 64).unwrap();
        assert!((t.hmin.unwrap() - 1.0).abs() < 1e-12);
        let (_, t) = weierstrass(0.7, 4.0, None, 64).unwrap();
        assert!((t.hmin.unwrap() - 0.2572865864148791).abs() < 1e-12);
        assert!(weierstrass(0.2, 3.0, None, 64).is_err());
    }

    #[test]
    fn weierstrass_exact_phase_matches_direct_sum() {
        let (w, _) = weierstrass(0.5, 3.0, Some(6), 256).unwrap();
        for (i, v) in w.iter().enumerate() {
            let x = i as f64 / 256.0;
            let direct: f64 = (0..6)
                .map(|n| 0.5f64.powi(n) * (std::f64::consts::TAU * 3f64.powi(n) * x).cos())
                .sum();
            assert!((v - direct).abs() < 1e-9);
        }
        assert_eq!(weierstrass_terms(0.5), 53);
    }

    #[test]
    fn white_noise_is_reproducible() {
        let (a, t) = white_noise(1024, 5);
        let (b, _) = white_noise(1024, 5);
        assert_eq!(a, b);
        assert_eq!(t.hmin, Some(-0.5));
        let mean = a.iter().sum::<f64>() / 1024.0;
        let var = a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 1024.0;
        assert!(mean.abs() < 0.15 && (var - 1.0).abs() < 0.15);
    }

    #[test]
    fn cantor_masses_are_exact() {
        let m = cantor_masses(8).unwrap();
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // the middle third carries no mass
        let n = m.len();
        for (c, v) in m.iter().enumerate() {
            let (lo, hi) = (c as f64 / n as f64, (c + 1) as f64 / n as f64);
            if lo >= 1.0 / 3.0 && hi <= 2.0 / 3.0 {
                assert_eq!(*v, 0.0);
            }
        }
        // symmetric about 1/2
        for c in 0..n {
            assert!((m[c] - m[n - 1 - c]).abs() < 1e-12);
        }
        let left: f64 = m[..n / 2].iter().sum();
        assert!((left - 0.5).abs() < 1e-12);
    }

    #[test]
    fn counterexample_coefficients() {
        let (f, t) = eta_zero_counterexample(10).unwrap();
        assert!(f.scale(2).iter().all(|c| *c == 0.25));
        assert!(f.scale(5).iter().all(|c| *c == 1.0 / 25.0));
        assert_eq!(t.p0, Some(f64::INFINITY));
    }

    #[test]
    fn sparsity_certificates() {
        let r = ScaleRange::new(3, 11).unwrap();
        let s = lacunary_wavelet_series(0.3, 0.8, 12, 1).unwrap();
        let cert = sparsity_certificate(&s.field, r).unwrap();
        assert!((cert.exponent - 0.8).abs() < 0.05);
        let counts = s.field.nonzero_counts();
        for j in r.scales() {
            assert!(
                counts[j as usize] as f64
                    <= cert.constant * (cert.exponent * j as f64).exp2() + 1e-9
            );
        }
        let (full, _) = eta_zero_counterexample(12).unwrap();
        assert!(sparsity_certificate(&full, r).is_none());
    }
}
