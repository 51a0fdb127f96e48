//! The `analyze` pipeline: estimates, plot-ready tables and the report.

use std::path::Path;

use pexp::exponents::{
    critical_lebesgue_index, estimate_hmin, lacunarity_q, log2_sum_pow, p_exponent_curve,
    pointwise_p_exponent, q0_from_bracket, wavelet_scaling_function,
};
use pexp::generators::GroundTruth;
use pexp::leaders::{l_leaders, p_leaders, q_leaders};
use pexp::mfa::{legendre_spectrum, scaling_function, structure_functions};
use pexp::{CoefficientField, FilterBank, LeaderField, ScaleRange, Spectrum};

use crate::config::AnalysisConfig;
use crate::error::{CliError, CliResult};
use crate::files::{num, read_input, read_json, Input, Table};
use crate::report::{
    evaluate, status, CurvePoint, DataInfo, Estimates, EtaPoint, Fitted, PointwiseEstimate,
    Provenance, Report, SpectrumEstimate, SCHEMA, SCHEMA_VERSION,
};
use crate::spec::Data;

pub struct Outcome {
    pub report: Report,
    pub tables: Vec<(String, Table)>,
}

struct Loaded {
    field: CoefficientField,
    kind: &'static str,
    filter: Option<String>,
    truth: Option<GroundTruth>,
    truth_source: Option<String>,
    seed: Option<u64>,
    input: String,
}

fn load(config: &AnalysisConfig, bank: &FilterBank) -> CliResult<Loaded> {
    let (data, mut truth, mut truth_source, seed, input) = match (&config.generator, &config.input)
    {
        (Some(spec), _) => {
            let spec = match config.seed {
                Some(s) => spec.clone().with_seed(s),
                None => spec.clone(),
            };
            let g = spec.generate()?;
            let data = match g.data {
                Data::Signal(s) => Input::Signal(s),
                Data::Field(f) => Input::Field(f),
            };
            let input = serde_json::to_string(&spec)?;
            (
                data,
                Some(g.truth),
                Some("generator".to_string()),
                spec.seed(),
                input,
            )
        }
        (None, Some(path)) => {
            let data = read_input(path)?;
            let sibling = path.parent().unwrap_or(Path::new(".")).join("truth.json");
            let (truth, source) = if sibling.exists() && config.truth.is_none() {
                (
                    Some(read_json(&sibling)?),
                    Some(sibling.display().to_string()),
                )
            } else {
                (None, None)
            };
            (data, truth, source, config.seed, path.display().to_string())
        }
        (None, None) => return Err(CliError::usage("config needs an input file or a generator")),
    };
    if let Some(path) = &config.truth {
        truth = Some(read_json(path)?);
        truth_source = Some(path.display().to_string());
    }
    let (field, kind, filter) = match data {
        Input::Signal(s) => {
            if s.iter().any(|x| !x.is_finite()) {
                return Err(CliError::usage("input signal holds non-finite samples"));
            }
            let field = pexp::wavelet::analyze(&s, bank)?;
            (field, "signal", Some(bank.name.clone()))
        }
        Input::Field(f) => (f, "field", None),
    };
    Ok(Loaded {
        field,
        kind,
        filter,
        truth,
        truth_source,
        seed,
        input,
    })
}

fn range(
    given: Option<(u32, u32)>,
    fallback: impl FnOnce() -> pexp::Result<ScaleRange>,
) -> CliResult<ScaleRange> {
    Ok(match given {
        Some((a, b)) => ScaleRange::new(a, b)?,
        None => fallback()?,
    })
}

fn union_grid(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = a.iter().chain(b).copied().collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn tag(p: f64) -> String {
    if p.is_infinite() {
        "pinf".to_string()
    } else {
        format!("p{p}")
    }
}

/// Spectrum of a leader field with its structure-function, `ζ` and `d` tables.
fn leader_spectrum(
    name: &str,
    lead: &LeaderField,
    config: &AnalysisConfig,
    range: ScaleRange,
) -> CliResult<(Spectrum, Vec<(String, Table)>)> {
    let sf = structure_functions(lead, &config.r_grid, config.zero_policy)?;
    let mut structure = Table::new(
        ["j".to_string(), "count".to_string()]
            .into_iter()
            .chain(sf.r_grid.iter().map(|r| format!("r={r}"))),
    );
    for j in 0..sf.depth() as usize {
        let mut row = vec![j.to_string(), sf.counts[j].to_string()];
        row.extend(sf.log_s.iter().map(|col| num(col[j])));
        structure.push(row);
    }
    let zeta = scaling_function(&sf, range)?;
    let spec = legendre_spectrum(&zeta, &config.h_grid);
    let mut zt = Table::new(["r", "zeta", "intercept", "residual_rms", "points_used"]);
    for (r, fit) in zeta.grid.iter().zip(&zeta.fits) {
        zt.push(vec![
            num(*r),
            num(fit.slope),
            num(fit.intercept),
            num(fit.residual_rms),
            fit.points_used.to_string(),
        ]);
    }
    let mut st = Table::new(["h", "d", "raw", "r_of_h"]);
    for i in 0..spec.h_grid.len() {
        st.push(vec![
            num(spec.h_grid[i]),
            num(spec.d_values[i]),
            num(spec.raw[i]),
            num(spec.r_of_h[i]),
        ]);
    }
    let tables = vec![
        (format!("structure_{name}.csv"), structure),
        (format!("zeta_{name}.csv"), zt),
        (format!("spectrum_{name}.csv"), st),
    ];
    Ok((spec, tables))
}

fn summarize(p: Option<f64>, spec: &Spectrum, warnings: Vec<String>) -> SpectrumEstimate {
    SpectrumEstimate {
        p,
        support: spec.support,
        mode: spec.mode(),
        max_d: spec.max_d(),
        warnings,
    }
}

pub fn run(config: &AnalysisConfig) -> CliResult<Outcome> {
    config.validate()?;
    let bank = FilterBank::from_name(&config.filter)?;
    let loaded = load(config, &bank)?;
    let field = &loaded.field;
    let depth = field.depth;
    let coef_range = range(config.j_range, || ScaleRange::default_for(depth))?;
    let lead_range = range(config.leader_j_range, || ScaleRange::leader_default(depth))?;
    coef_range.check(depth)?;
    lead_range.check(depth)?;
    let mut tables = Vec::new();
    let mut warnings = Vec::new();

    let (hmin, hfit) = estimate_hmin(field, coef_range)?;
    let mut ht = Table::new(["j", "log2_sup_abs_coefficient"]);
    for j in 0..depth {
        let sup = field.scale(j).iter().fold(0.0f64, |m, c| m.max(c.abs()));
        ht.push(vec![j.to_string(), num(sup.log2())]);
    }
    tables.push(("hmin.csv".to_string(), ht));

    let eta_grid = union_grid(&config.p_grid, &config.check_p);
    let eta = wavelet_scaling_function(field, &eta_grid, coef_range)?;
    let mut et = Table::new(["p", "eta", "intercept", "residual_rms", "points_used"]);
    for (p, fit) in eta.grid.iter().zip(&eta.fits) {
        et.push(vec![
            num(*p),
            num(fit.slope),
            num(fit.intercept),
            num(fit.residual_rms),
            fit.points_used.to_string(),
        ]);
    }
    tables.push(("eta.csv".to_string(), et));
    let mut ws = Table::new(
        std::iter::once("j".to_string()).chain(eta_grid.iter().map(|p| format!("p={p}"))),
    );
    for j in 0..depth {
        let mut row = vec![j.to_string()];
        row.extend(eta_grid.iter().map(|&p| {
            num(log2_sum_pow(field.scale(j).iter().copied(), p)
                .map_or(f64::NEG_INFINITY, |s| s - j as f64))
        }));
        ws.push(row);
    }
    tables.push(("wavelet_structure.csv".to_string(), ws));

    let bracket_sf = wavelet_scaling_function(field, &config.p_grid, coef_range)?;
    let bracket = critical_lebesgue_index(&bracket_sf);
    let (q0, q0_source) = match config.q0 {
        Some(q) => (q, "config"),
        None => (q0_from_bracket(bracket), "bracket"),
    };

    let x0 = config.x0.or(loaded
        .truth
        .as_ref()
        .and_then(|t| t.pointwise.map(|p| p.x0)));
    let pointwise = match x0 {
        None => None,
        Some(x0) => {
            let grid: Vec<f64> = config
                .q_grid
                .iter()
                .copied()
                .filter(|q| q0 == 0.0 || *q > q0)
                .collect();
            if grid.is_empty() {
                warnings.push(format!(
                    "every q in q_grid is <= q0 = {q0}; no pointwise curve"
                ));
            }
            let curve = if grid.is_empty() {
                Vec::new()
            } else {
                p_exponent_curve(field, x0, &grid, lead_range)?.points
            };
            let lq = lacunarity_q(q0);
            let l_lead = l_leaders(field, lq, config.dq)?;
            let (l, lfit) = pointwise_p_exponent(&l_lead, x0, lead_range)?;

            let mut ct = Table::new(["q", "h", "intercept", "residual_rms", "points_used"]);
            for pt in &curve {
                ct.push(vec![
                    num(pt.q),
                    num(pt.h),
                    num(pt.fit.intercept),
                    num(pt.fit.residual_rms),
                    pt.fit.points_used.to_string(),
                ]);
            }
            tables.push(("pointwise.csv".to_string(), ct));
            let mut lt = Table::new(
                std::iter::once("j".to_string())
                    .chain(grid.iter().map(|q| format!("q={q}")))
                    .chain(std::iter::once(format!("L(q={lq},dq={})", config.dq))),
            );
            let mut columns = Vec::new();
            for &q in &grid {
                columns.push(q_leaders(field, q)?.along(x0)?);
            }
            columns.push(l_lead.along(x0)?);
            for j in 0..depth as usize {
                let mut row = vec![j.to_string()];
                row.extend(
                    columns
                        .iter()
                        .map(|c| num(c[j].1.map_or(f64::NAN, f64::log2))),
                );
                lt.push(row);
            }
            tables.push(("pointwise_leaders.csv".to_string(), lt));

            Some(PointwiseEstimate {
                x0,
                curve: curve
                    .into_iter()
                    .map(|p| CurvePoint {
                        q: p.q,
                        h: p.h,
                        fit: p.fit,
                    })
                    .collect(),
                lacunarity_q: lq,
                lacunarity: Fitted {
                    value: l,
                    fit: lfit,
                },
            })
        }
    };

    let mut spectra = Vec::new();
    let mut h_top = hmin;
    for &p in &config.spectrum_p {
        let lead = p_leaders(field, p)?;
        let (spec, t) = leader_spectrum(&tag(p), &lead, config, lead_range)?;
        let mut w = Vec::new();
        if p.is_infinite() {
            if hmin <= 0.0 {
                w.push(format!("estimated H_min = {hmin:.4} is not positive"));
            }
        } else {
            let e = wavelet_scaling_function(field, &[p], coef_range)?.values[0];
            if e <= 0.0 {
                w.push(format!("estimated eta({p}) = {e:.4} is not positive"));
            }
        }
        if let Some((_, hi)) = spec.support {
            h_top = h_top.max(hi);
        }
        warnings.extend(w.iter().map(|m| format!("spectrum p={}: {m}", num(p))));
        tables.extend(t);
        spectra.push(summarize(Some(p), &spec, w));
    }
    let l_lead = l_leaders(field, lacunarity_q(q0), config.dq)?;
    let (l_spec, t) = leader_spectrum("l", &l_lead, config, lead_range)?;
    tables.extend(t);
    let lacunarity_spectrum = summarize(None, &l_spec, Vec::new());

    if loaded.filter.is_some() && !bank.is_regular_enough(hmin, h_top) {
        warnings.push(format!(
            "{} regularity {:.2} may be too low for exponents up to {:.2}",
            bank.name,
            bank.regularity_estimate,
            hmin.abs().max(h_top.abs())
        ));
    }

    let estimates = Estimates {
        hmin: Fitted {
            value: hmin,
            fit: hfit,
        },
        eta: eta
            .grid
            .iter()
            .zip(eta.fits)
            .map(|(p, fit)| EtaPoint {
                p: *p,
                value: fit.slope,
                fit,
            })
            .collect(),
        p0_bracket: vec![bracket.0, bracket.1],
        q0,
        q0_source: q0_source.to_string(),
        pointwise,
        spectra,
        lacunarity_spectrum,
    };
    let checks = match &loaded.truth {
        Some(t) => evaluate(&estimates, t, config),
        None => Vec::new(),
    };
    let mut files: Vec<String> = tables.iter().map(|(n, _)| n.clone()).collect();
    files.push("report.json".to_string());
    let report = Report {
        schema: SCHEMA.to_string(),
        schema_version: SCHEMA_VERSION,
        status: status(&checks),
        provenance: Provenance {
            config_sha256: config.hash()?,
            seed: loaded.seed,
            pexp_version: pexp::VERSION.to_string(),
            cli_version: env!("CARGO_PKG_VERSION").to_string(),
            filter: loaded.filter,
            input: loaded.input,
            truth: loaded.truth_source,
        },
        data: DataInfo {
            kind: loaded.kind.to_string(),
            depth,
            signal_length: field.signal_len(),
            j_range: (coef_range.j1, coef_range.j2),
            leader_j_range: (lead_range.j1, lead_range.j2),
        },
        config: config.clone(),
        estimates,
        checks,
        warnings,
        files,
    };
    Ok(Outcome { report, tables })
}
