//! Versioned JSON report and the tolerance checks against ground truth.

use pexp::generators::{EtaDescriptor, GroundTruth};
use pexp::RegressionFit;
use serde::{Deserialize, Serialize};

use crate::config::{AnalysisConfig, CheckKind, Tolerances};

pub const SCHEMA: &str = "pexp-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub pexp_version: String,
    pub cli_version: String,
    /// Filter used for the transform; `None` when the input was a coefficient field.
    pub filter: Option<String>,
    pub input: String,
    pub truth: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataInfo {
    pub kind: String,
    #[serde(rename = "J")]
    pub depth: u32,
    pub signal_length: usize,
    pub j_range: (u32, u32),
    pub leader_j_range: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    #[serde(with = "pexp::sentinel")]
    pub value: f64,
    pub fit: RegressionFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaPoint {
    pub p: f64,
    #[serde(with = "pexp::sentinel")]
    pub value: f64,
    pub fit: RegressionFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub q: f64,
    #[serde(with = "pexp::sentinel")]
    pub h: f64,
    pub fit: RegressionFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseEstimate {
    pub x0: f64,
    pub curve: Vec<CurvePoint>,
    /// `q` at which the L-leaders were built.
    pub lacunarity_q: f64,
    pub lacunarity: Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    /// `p` of the p-leaders (`inf` for sup-leaders); absent for the lacunarity spectrum.
    #[serde(with = "pexp::sentinel::option")]
    pub p: Option<f64>,
    pub support: Option<(f64, f64)>,
    /// `(H, d)` at the largest finite value.
    pub mode: Option<(f64, f64)>,
    #[serde(with = "pexp::sentinel")]
    pub max_d: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub hmin: Fitted,
    pub eta: Vec<EtaPoint>,
    #[serde(with = "pexp::sentinel::vec")]
    pub p0_bracket: Vec<f64>,
    pub q0: f64,
    /// `config` or `bracket`.
    pub q0_source: String,
    pub pointwise: Option<PointwiseEstimate>,
    pub spectra: Vec<SpectrumEstimate>,
    pub lacunarity_spectrum: SpectrumEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    #[serde(with = "pexp::sentinel")]
    pub estimate: f64,
    /// Upper end when the estimate is an interval.
    #[serde(with = "pexp::sentinel::option")]
    pub estimate_upper: Option<f64>,
    #[serde(with = "pexp::sentinel")]
    pub truth: f64,
    #[serde(with = "pexp::sentinel")]
    pub lower: f64,
    #[serde(with = "pexp::sentinel")]
    pub upper: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(
        name: String,
        kind: CheckKind,
        estimate: f64,
        truth: f64,
        lower: f64,
        upper: f64,
        tolerance: f64,
    ) -> Self {
        let pass = estimate >= lower && estimate <= upper;
        Check {
            name,
            kind,
            estimate,
            estimate_upper: None,
            truth,
            lower,
            upper,
            tolerance,
            pass,
        }
    }

    fn around(name: String, kind: CheckKind, estimate: f64, truth: f64, tol: f64) -> Self {
        Check::new(name, kind, estimate, truth, truth - tol, truth + tol, tol)
    }

    pub fn line(&self) -> String {
        let est = match self.estimate_upper {
            Some(u) => format!("[{}, {}]", fmt(self.estimate), fmt(u)),
            None => fmt(self.estimate),
        };
        format!(
            "{} {}: {} in [{}, {}] (truth {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            est,
            fmt(self.lower),
            fmt(self.upper),
            fmt(self.truth)
        )
    }
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.4}")
    } else {
        crate::files::num(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub schema_version: u32,
    pub status: Status,
    pub provenance: Provenance,
    pub data: DataInfo,
    pub config: AnalysisConfig,
    pub estimates: Estimates,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

impl Report {
    pub fn recheck(&mut self, truth: &GroundTruth) {
        self.checks = evaluate(&self.estimates, truth, &self.config);
        self.status = status(&self.checks);
    }
}

pub fn status(checks: &[Check]) -> Status {
    if checks.iter().all(|c| c.pass) {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

fn label(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

/// Tolerance checks of the estimates against `truth`, restricted to the
/// families selected in `config`.
pub fn evaluate(est: &Estimates, truth: &GroundTruth, config: &AnalysisConfig) -> Vec<Check> {
    let tol: &Tolerances = &config.tolerances;
    let mut out = Vec::new();
    if let (true, Some(h)) = (config.wants(CheckKind::Hmin), truth.hmin) {
        out.push(Check::around(
            "hmin".into(),
            CheckKind::Hmin,
            est.hmin.value,
            h,
            tol.hmin,
        ));
    }
    if let (true, Some(eta)) = (config.wants(CheckKind::Eta), truth.eta) {
        for &p in &config.check_p {
            let Some(e) = est.eta.iter().find(|e| same(e.p, p)) else {
                continue;
            };
            let name = format!("eta(p={})", label(p));
            let t = eta.at(p);
            out.push(match eta {
                EtaDescriptor::Affine { .. } => {
                    Check::around(name, CheckKind::Eta, e.value, t, tol.eta)
                }
                EtaDescriptor::MeasureBounds { .. } => {
                    let (lo, hi) = if same(p, 1.0) {
                        (-tol.eta, tol.eta)
                    } else if p < 1.0 {
                        (t - tol.eta, f64::INFINITY)
                    } else {
                        (f64::NEG_INFINITY, t + tol.eta)
                    };
                    Check::new(name, CheckKind::Eta, e.value, t, lo, hi, tol.eta)
                }
            });
        }
    }
    if let (true, Some(p0)) = (config.wants(CheckKind::P0), truth.p0) {
        let (b_lo, b_hi) = (est.p0_bracket[0], est.p0_bracket[1]);
        let check = if p0.is_infinite() {
            Check::new("p0".into(), CheckKind::P0, b_hi, p0, p0, p0, tol.p0)
        } else {
            let mut c = Check::around("p0".into(), CheckKind::P0, b_lo, p0, tol.p0);
            c.estimate_upper = Some(b_hi);
            c.pass = b_lo >= c.lower && b_hi <= c.upper;
            c
        };
        out.push(check);
    }
    if let (Some(pw), Some(t)) = (&est.pointwise, truth.pointwise) {
        if config.wants(CheckKind::Pointwise) {
            for pt in &pw.curve {
                out.push(Check::around(
                    format!("h(q={})", label(pt.q)),
                    CheckKind::Pointwise,
                    pt.h,
                    t.p_exponent.at_q(pt.q),
                    tol.pointwise,
                ));
            }
        }
        if config.wants(CheckKind::Lacunarity) {
            out.push(Check::around(
                "lacunarity".into(),
                CheckKind::Lacunarity,
                pw.lacunarity.value,
                t.lacunarity,
                tol.lacunarity,
            ));
        }
    }
    if let Some(th) = truth.spectra {
        if config.wants(CheckKind::Spectrum) {
            for s in &est.spectra {
                let Some(p) = s.p else { continue };
                let q = 1.0 / p;
                let h_max = th.p_support(q).1;
                let hi = s.support.map_or(f64::NAN, |(_, hi)| hi);
                out.push(Check::around(
                    format!("support_max(p={})", label(p)),
                    CheckKind::Spectrum,
                    hi,
                    h_max,
                    tol.support,
                ));
                out.push(Check::around(
                    format!("peak(p={})", label(p)),
                    CheckKind::Spectrum,
                    s.max_d,
                    th.d_p(h_max, q),
                    tol.peak,
                ));
            }
        }
        if config.wants(CheckKind::LacunaritySpectrum) {
            let l_mode = th.l_support().1;
            let (mode, peak) = est.lacunarity_spectrum.mode.unwrap_or((f64::NAN, f64::NAN));
            out.push(Check::around(
                "lacunarity_mode".into(),
                CheckKind::LacunaritySpectrum,
                mode,
                l_mode,
                tol.mode,
            ));
            out.push(Check::around(
                "lacunarity_peak".into(),
                CheckKind::LacunaritySpectrum,
                peak,
                th.d_l(l_mode),
                tol.peak,
            ));
        }
    }
    out
}
