//! Analysis configuration: one JSON document, every key mirrored by a flag.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pexp::mfa::{default_h_grid, default_r_grid};
use pexp::ZeroPolicy;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::files::read_json;
use crate::spec::GeneratorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Hmin,
    Eta,
    P0,
    Pointwise,
    Lacunarity,
    Spectrum,
    LacunaritySpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub hmin: f64,
    pub eta: f64,
    /// Half-width of the interval the p0 bracket must fall in.
    pub p0: f64,
    pub pointwise: f64,
    pub lacunarity: f64,
    pub support: f64,
    pub peak: f64,
    pub mode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hmin: 0.1,
            eta: 0.1,
            p0: 0.5,
            pointwise: 0.1,
            lacunarity: 0.05,
            support: 0.1,
            peak: 0.15,
            mode: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Signal or field file; exclusive with `generator`.
    pub input: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
    /// Ground truth file; defaults to `truth.json` beside the input.
    pub truth: Option<PathBuf>,
    pub filter: String,
    /// Grid for `η(p)` and the p0 bracket.
    pub p_grid: Vec<f64>,
    /// Values of `p` checked against the true `η`.
    pub check_p: Vec<f64>,
    /// `1/p0`; estimated from the bracket when absent.
    pub q0: Option<f64>,
    pub dq: f64,
    pub q_grid: Vec<f64>,
    /// Point for pointwise exponents; defaults to the truth's singular point.
    pub x0: Option<f64>,
    #[serde(with = "pexp::sentinel::vec")]
    pub spectrum_p: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub j_range: Option<(u32, u32)>,
    pub leader_j_range: Option<(u32, u32)>,
    pub zero_policy: ZeroPolicy,
    pub output: PathBuf,
    /// Replaces the generator's seed.
    pub seed: Option<u64>,
    /// Check families to run; all applicable ones when absent.
    pub checks: Option<Vec<CheckKind>>,
    pub tolerances: Tolerances,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            input: None,
            generator: None,
            truth: None,
            filter: "db8".to_string(),
            p_grid: (1..=100).map(|i| i as f64 / 10.0).collect(),
            check_p: vec![0.5, 1.0, 2.0, 4.0],
            q0: None,
            dq: pexp::leaders::DEFAULT_DQ,
            q_grid: vec![0.0, 0.25, 0.5, 1.0],
            x0: None,
            spectrum_p: vec![2.0, f64::INFINITY],
            r_grid: default_r_grid(),
            h_grid: default_h_grid(),
            j_range: None,
            leader_j_range: None,
            zero_policy: ZeroPolicy::default(),
            output: PathBuf::from("out"),
            seed: None,
            checks: None,
            tolerances: Tolerances::default(),
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(',')
        .or_else(|| s.split_once(':'))
        .ok_or_else(|| format!("`{s}` is not of the form j1,j2"))?;
    let a = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((a, b))
}

fn parse_generator(s: &str) -> Result<GeneratorSpec, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

/// Flags for `analyze`; each one overrides the config key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generator spec as JSON, e.g. '{"name":"lws","alpha":0.3,"eta":0.8}'.
    #[arg(long, value_parser = parse_generator)]
    pub generator: Option<GeneratorSpec>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub check_p: Option<Vec<f64>>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub dq: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub spectrum_p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h_grid: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_range)]
    pub j_range: Option<(u32, u32)>,
    #[arg(long, value_parser = parse_range)]
    pub leader_j_range: Option<(u32, u32)>,
    #[arg(long, value_enum)]
    pub zero_policy: Option<ZeroPolicyArg>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Option<Vec<CheckKind>>,
    #[arg(long)]
    pub tol_hmin: Option<f64>,
    #[arg(long)]
    pub tol_eta: Option<f64>,
    #[arg(long)]
    pub tol_p0: Option<f64>,
    #[arg(long)]
    pub tol_pointwise: Option<f64>,
    #[arg(long)]
    pub tol_lacunarity: Option<f64>,
    #[arg(long)]
    pub tol_support: Option<f64>,
    #[arg(long)]
    pub tol_peak: Option<f64>,
    #[arg(long)]
    pub tol_mode: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroPolicyArg {
    ExcludeUndefined,
    Strict,
}

impl From<ZeroPolicyArg> for ZeroPolicy {
    fn from(z: ZeroPolicyArg) -> Self {
        match z {
            ZeroPolicyArg::ExcludeUndefined => ZeroPolicy::ExcludeUndefined,
            ZeroPolicyArg::Strict => ZeroPolicy::Strict,
        }
    }
}

type GridRule<'a> = (&'a str, &'a [f64], fn(f64) -> bool);

macro_rules! set {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
    ($dst:expr, some $src:expr) => {
        if let Some(v) = $src {
            $dst = Some(v);
        }
    };
}

impl AnalysisConfig {
    /// Reads the config file if given, then applies the overrides.
    pub fn load(path: Option<&Path>, o: Overrides) -> CliResult<Self> {
        let mut c: AnalysisConfig = match path {
            Some(p) => read_json(p)?,
            None => AnalysisConfig::default(),
        };
        if o.input.is_some() && o.generator.is_none() {
            c.generator = None;
        }
        if o.generator.is_some() && o.input.is_none() {
            c.input = None;
        }
        set!(c.input, some o.input);
        set!(c.generator, some o.generator);
        set!(c.truth, some o.truth);
        set!(c.filter, o.filter);
        set!(c.p_grid, o.p_grid);
        set!(c.check_p, o.check_p);
        set!(c.q0, some o.q0);
        set!(c.dq, o.dq);
        set!(c.q_grid, o.q_grid);
        set!(c.x0, some o.x0);
        set!(c.spectrum_p, o.spectrum_p);
        set!(c.r_grid, o.r_grid);
        set!(c.h_grid, o.h_grid);
        set!(c.j_range, some o.j_range);
        set!(c.leader_j_range, some o.leader_j_range);
        set!(c.zero_policy, o.zero_policy.map(Into::into));
        set!(c.output, o.output);
        set!(c.seed, some o.seed);
        set!(c.checks, some o.checks);
        let t = &mut c.tolerances;
        set!(t.hmin, o.tol_hmin);
        set!(t.eta, o.tol_eta);
        set!(t.p0, o.tol_p0);
        set!(t.pointwise, o.tol_pointwise);
        set!(t.lacunarity, o.tol_lacunarity);
        set!(t.support, o.tol_support);
        set!(t.peak, o.tol_peak);
        set!(t.mode, o.tol_mode);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        match (&self.input, &self.generator) {
            (None, None) => return bad("config needs an input file or a generator".into()),
            (Some(_), Some(_)) => return bad("input and generator are exclusive".into()),
            _ => {}
        }
        let grids: [GridRule; 6] = [
            ("p_grid", &self.p_grid, |p| p.is_finite() && p > 0.0),
            ("check_p", &self.check_p, |p| p.is_finite() && p > 0.0),
            ("q_grid", &self.q_grid, |q| q.is_finite() && q >= 0.0),
            ("spectrum_p", &self.spectrum_p, |p| p > 0.0),
            ("r_grid", &self.r_grid, f64::is_finite),
            ("h_grid", &self.h_grid, f64::is_finite),
        ];
        for (name, grid, ok) in grids {
            if grid.is_empty() {
                return bad(format!("{name} is empty"));
            }
            if let Some(x) = grid.iter().find(|x| !ok(**x)) {
                return bad(format!("{name} holds invalid value {x}"));
            }
        }
        if !(self.dq > 0.0 && self.dq.is_finite()) {
            return bad(format!("dq = {} must be positive", self.dq));
        }
        if let Some(q0) = self.q0 {
            if !(q0 >= 0.0 && q0.is_finite()) {
                return bad(format!("q0 = {q0} must be finite and >= 0"));
            }
        }
        if let Some(x0) = self.x0 {
            if !(0.0..1.0).contains(&x0) {
                return bad(format!("x0 = {x0} must lie in [0, 1)"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("hmin", t.hmin),
            ("eta", t.eta),
            ("p0", t.p0),
            ("pointwise", t.pointwise),
            ("lacunarity", t.lacunarity),
            ("support", t.support),
            ("peak", t.peak),
            ("mode", t.mode),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} = {v} must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn wants(&self, kind: CheckKind) -> bool {
        self.checks.as_ref().is_none_or(|c| c.contains(&kind))
    }

    /// SHA-256 of the config's compact JSON form.
    pub fn hash(&self) -> CliResult<String> {
        let bytes = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }
}
