//! Generator specifications shared by `synth` and analysis configs.

use clap::{Subcommand, ValueEnum};
use pexp::generators::{
    cantor_density, cusp, cusp_samples, cusp_truth, eta_zero_counterexample, lacunary_comb_samples,
    lacunary_wavelet_series, thin_chirp, weierstrass, white_noise, CuspMode, GroundTruth,
};
use pexp::{CoefficientField, FilterBank};
use serde::{Deserialize, Serialize};

fn default_depth() -> u32 {
    14
}

fn default_len() -> usize {
    1 << 14
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CuspDomain {
    #[default]
    Coefficient,
    Time,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Cusp of order alpha at x0 = 1/2.
    Cusp {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long = "J", default_value_t = 14)]
        #[serde(rename = "J", default = "default_depth")]
        depth: u32,
        #[arg(long, value_enum, default_value_t)]
        #[serde(default)]
        domain: CuspDomain,
    },
    /// Lacunary comb accumulating at 0.
    Comb {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long = "J", default_value_t = 14)]
        #[serde(rename = "J", default = "default_depth")]
        depth: u32,
    },
    /// Thin chirp at 0.
    Chirp {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long = "J", default_value_t = 14)]
        #[serde(rename = "J", default = "default_depth")]
        depth: u32,
    },
    /// Lacunary wavelet series.
    Lws {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long = "J", default_value_t = 14)]
        #[serde(rename = "J", default = "default_depth")]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
    },
    /// Weierstrass function sampled on n points.
    Weierstrass {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1 << 14)]
        #[serde(default = "default_len")]
        n: usize,
        /// Number of terms; by default until a^n drops below machine epsilon.
        #[arg(long)]
        #[serde(default)]
        terms: Option<usize>,
    },
    /// Gaussian white noise.
    Noise {
        #[arg(long, default_value_t = 1 << 14)]
        #[serde(default = "default_len")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
    },
    /// Middle-third Cantor measure density.
    Cantor {
        #[arg(long = "J", default_value_t = 14)]
        #[serde(rename = "J", default = "default_depth")]
        depth: u32,
    },
    /// Field with coefficients 1/j^2 at every position.
    Counterexample {
        #[arg(long = "J", default_value_t = 14)]
        #[serde(rename = "J", default = "default_depth")]
        depth: u32,
    },
}

pub enum Data {
    Signal(Vec<f64>),
    Field(CoefficientField),
}

pub struct Generated {
    pub data: Data,
    pub truth: GroundTruth,
}

impl GeneratorSpec {
    pub fn seed(&self) -> Option<u64> {
        match self {
            GeneratorSpec::Lws { seed, .. } | GeneratorSpec::Noise { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn with_seed(mut self, new: u64) -> Self {
        if let GeneratorSpec::Lws { seed, .. } | GeneratorSpec::Noise { seed, .. } = &mut self {
            *seed = new;
        }
        self
    }

    pub fn generate(&self) -> pexp::Result<Generated> {
        let (data, truth) = match *self {
            GeneratorSpec::Cusp {
                alpha,
                depth,
                domain,
            } => match domain {
                CuspDomain::Time => (Data::Signal(cusp_samples(alpha, depth)?), cusp_truth(alpha)),
                CuspDomain::Coefficient => {
                    let (f, t) = cusp(
                        alpha,
                        depth,
                        CuspMode::CoefficientDomain,
                        &FilterBank::default(),
                    )?;
                    (Data::Field(f), t)
                }
            },
            GeneratorSpec::Comb {
                alpha,
                omega,
                gamma,
                depth,
            } => {
                let (s, t) = lacunary_comb_samples(alpha, omega, gamma, depth)?;
                (Data::Signal(s), t)
            }
            GeneratorSpec::Chirp { alpha, a, b, depth } => {
                let (f, t) = thin_chirp(alpha, a, b, depth)?;
                (Data::Field(f), t)
            }
            GeneratorSpec::Lws {
                alpha,
                eta,
                depth,
                seed,
            } => {
                let s = lacunary_wavelet_series(alpha, eta, depth, seed)?;
                (Data::Field(s.field), s.truth)
            }
            GeneratorSpec::Weierstrass { a, b, n, terms } => {
                let (s, t) = weierstrass(a, b, terms, n)?;
                (Data::Signal(s), t)
            }
            GeneratorSpec::Noise { n, seed } => {
                let (s, t) = white_noise(n, seed);
                (Data::Signal(s), t)
            }
            GeneratorSpec::Cantor { depth } => {
                let (s, t) = cantor_density(depth)?;
                (Data::Signal(s), t)
            }
            GeneratorSpec::Counterexample { depth } => {
                let (f, t) = eta_zero_counterexample(depth)?;
                (Data::Field(f), t)
            }
        };
        Ok(Generated { data, truth })
    }
}
