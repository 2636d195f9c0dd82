use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use clonemacro::distinguish::{
    distinguishability, extrapolate_limit, noisy_probabilities, povm_probabilities, sharp_probabilities,
    LimitFit, OutcomeDistribution,
};
use clonemacro::macromeasures::{
    asymptotic_drop_probability, asymptotic_keep_probability, effective_sizes, korsbakken_effective_size,
    marquardt_check, subgroup_curve, SubgroupMode, DEFAULT_KORSBAKKEN_THRESHOLD,
};
use clonemacro::metrology::{relative_improvement_curve, Measurement, NoiseKind};
use clonemacro::{Error, Result};

use crate::output::Table;
use crate::ranges::{parse_list, parse_odd_list};
use crate::validation;
use crate::{Cli, Command};

pub fn run(cli: &Cli) -> Result<Table> {
    match &cli.command {
        Command::Subgroup(a) => subgroup(a),
        Command::Measures(a) => measures(a),
        Command::Distinguish(a) => distinguish(a),
        Command::PovmProfile(a) => povm_profile(a),
        Command::Metrology(a) => metrology(a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupPreset {
    /// Large-N curves for measured and for dropped groups of size 1..=200.
    FigSubgroup,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SubgroupArgs {
    #[arg(long, value_enum)]
    pub preset: Option<SubgroupPreset>,
    /// Register size (exact mode).
    #[arg(long)]
    pub n: Option<usize>,
    /// Several register sizes, e.g. `3:51` (exact mode).
    #[arg(long)]
    pub n_range: Option<String>,
    /// Group sizes, e.g. `1:100`.
    #[arg(long)]
    pub k_range: Option<String>,
    /// `exact` needs N; `asymptotic` tabulates the N -> infinity curves for
    /// keeping `k` and for dropping `k` qubits.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

fn n_values(n: Option<usize>, range: &Option<String>, default: Option<&str>) -> Result<Vec<usize>> {
    match (n, range) {
        (Some(_), Some(_)) => Err(Error::Domain("give either --n or --n-range, not both".into())),
        (Some(n), None) => parse_odd_list(&n.to_string()),
        (None, Some(r)) => parse_odd_list(r),
        (None, None) => match default {
            Some(d) => parse_odd_list(d),
            None => Err(Error::Domain("--n or --n-range is required".into())),
        },
    }
}

fn subgroup(a: &SubgroupArgs) -> Result<Table> {
    let preset = a.preset.is_some();
    let mode = a.mode.unwrap_or(if preset { ModeArg::Asymptotic } else { ModeArg::Exact });
    match mode {
        ModeArg::Asymptotic => {
            let ks = parse_list(a.k_range.as_deref().unwrap_or("1:200"), 1)?;
            if ks.contains(&0) {
                return Err(Error::Domain("group sizes start at 1".into()));
            }
            let rows: Vec<(usize, f64, f64)> = ks
                .par_iter()
                .map(|&k| Ok((k, asymptotic_keep_probability(k)?, asymptotic_drop_probability(k)?)))
                .collect::<Result<_>>()?;
            let mut t = Table::new(vec!["k", "p_measure_k", "p_measure_n_minus_k"]);
            for (k, keep, drop) in rows {
                t.push(vec![k.into(), keep.into(), drop.into()]);
            }
            Ok(t)
        }
        ModeArg::Exact => {
            let ns = n_values(a.n, &a.n_range, None)?;
            let mut t = Table::new(vec!["n", "k", "p"]);
            for n in ns {
                let ks = match &a.k_range {
                    Some(r) => parse_list(r, 1)?,
                    None => (1..=n).collect(),
                };
                for r in subgroup_curve(n, &ks, SubgroupMode::Exact)? {
                    t.push(vec![r.n_qubits.into(), r.k.into(), r.probability.into()]);
                }
            }
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MeasuresPreset {
    /// Odd N from 3 to 101.
    TableSizes,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeasuresArgs {
    #[arg(long, value_enum)]
    pub preset: Option<MeasuresPreset>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_range: Option<String>,
    /// Success probability a single group must reach for the partition count.
    #[arg(long, default_value_t = DEFAULT_KORSBAKKEN_THRESHOLD)]
    pub threshold: f64,
}

fn measures(a: &MeasuresArgs) -> Result<Table> {
    let default = a.preset.map(|_| "3:101");
    let ns = n_values(a.n, &a.n_range, default.or(Some("3:21")))?;
    let rows: Vec<_> = ns
        .par_iter()
        .map(|&n| {
            let k = korsbakken_effective_size(n, a.threshold)?;
            let m = marquardt_check(n)?;
            let r = effective_sizes(n, a.threshold)?;
            Ok((r, k.k_star, m))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(vec![
        "n",
        "korsbakken",
        "korsbakken_k_star",
        "marquardt",
        "marquardt_two_site_overlap",
        "marquardt_best_single_site_overlap",
        "relative_fisher",
        "index_p_size",
        "fisher_size",
    ]);
    for (r, k_star, m) in rows {
        t.push(vec![
            r.n_qubits.into(),
            r.korsbakken.into(),
            k_star.into(),
            r.marquardt.into(),
            m.two_site_overlap.into(),
            m.micro_site_overlap.max(m.macro_site_overlap).into(),
            r.relative_fisher.into(),
            r.index_p_size.into(),
            r.fisher_size.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DistinguishPreset {
    /// Odd N from 5 to 199, sigma = sqrt(N), u = 0.9.
    FigDistinguish,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistinguishArgs {
    #[arg(long, value_enum)]
    pub preset: Option<DistinguishPreset>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_range: Option<String>,
    /// Fixed POVM width; defaults to sqrt(N) per row.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Probability that a qubit's x outcome survives the phase noise.
    #[arg(long, default_value_t = 0.9)]
    pub u: f64,
}

/// Largest register for which rows are cross-checked against the simulator.
const ORACLE_ROW_MAX_N: usize = 7;

fn distinguish(a: &DistinguishArgs) -> Result<Table> {
    let default = if a.preset.is_some() { "5:199" } else { "5:49" };
    let ns = n_values(a.n, &a.n_range, Some(default))?;
    let rows: Vec<_> = ns
        .par_iter()
        .map(|&n| {
            let sigma = a.sigma.unwrap_or((n as f64).sqrt());
            let sharp = sharp_probabilities::<f64>(n)?;
            let pair = sharp.pair_coarsened();
            let povm = povm_probabilities(n, sigma)?;
            let noisy = noisy_probabilities(n, a.u)?;
            for d in [&sharp, &povm, &noisy] {
                d.validate(1e-10)?;
            }
            let oracle = if n <= ORACLE_ROW_MAX_N {
                let (p, m) = validation::oracle_x_statistics(n, None)?;
                let (pn, mn) = validation::oracle_x_statistics(n, Some(clonemacro::oracle::LocalChannel::PhaseZ(a.u)))?;
                let dev = |d: &OutcomeDistribution<f64>, p: &[f64], m: &[f64]| {
                    d.probs_plus
                        .iter()
                        .zip(p)
                        .chain(d.probs_minus.iter().zip(m))
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max)
                };
                Some(dev(&sharp, &p, &m).max(dev(&noisy, &pn, &mn)))
            } else {
                None
            };
            Ok((
                n,
                sigma,
                [
                    distinguishability(&sharp),
                    distinguishability(&pair),
                    distinguishability(&povm),
                    distinguishability(&noisy),
                ],
                oracle,
            ))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(vec!["n", "sigma", "d_sharp", "d_pair", "d_povm", "d_noisy", "oracle_max_deviation"]);
    for (n, sigma, d, oracle) in &rows {
        t.push(vec![
            (*n).into(),
            (*sigma).into(),
            d[0].into(),
            d[1].into(),
            d[2].into(),
            d[3].into(),
            (*oracle).into(),
        ]);
    }
    if rows.len() >= 5 {
        for (idx, name) in [(1usize, "pair"), (2, "povm"), (3, "noisy")] {
            let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.0, r.2[idx])).collect();
            t.notes.push(fit_note(name, &extrapolate_limit(&pts)?));
        }
    }
    Ok(t)
}

fn fit_note(name: &str, f: &LimitFit) -> String {
    format!(
        "fit {name}: D_inf={} a={} b={} rms_residual={} condition={} ill_conditioned={}",
        f.limit, f.a, f.b, f.rms_residual, f.condition_number, f.ill_conditioned
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PovmPreset {
    /// N = 31 with sigma in {0, 1, sqrt(N)}.
    FigPovm,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PovmArgs {
    #[arg(long, value_enum)]
    pub preset: Option<PovmPreset>,
    #[arg(long, default_value_t = 31)]
    pub n: usize,
    /// Comma-separated widths; `0` is the sharp measurement and `sqrt` means sqrt(N).
    #[arg(long, default_value = "0,1,sqrt")]
    pub sigma: String,
}

fn povm_profile(a: &PovmArgs) -> Result<Table> {
    let n = parse_odd_list(&a.n.to_string())?[0];
    let sigmas: Vec<f64> = a
        .sigma
        .split(',')
        .map(|s| match s.trim() {
            "sqrt" => Ok((n as f64).sqrt()),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| *x >= 0.0 && x.is_finite())
                .ok_or_else(|| Error::Domain(format!("invalid sigma '{v}'"))),
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(vec!["sigma", "i", "p_plus", "p_minus"]);
    for sigma in sigmas {
        let d = if sigma == 0.0 {
            sharp_probabilities::<f64>(n)?
        } else {
            povm_probabilities(n, sigma)?
        };
        d.validate(1e-10)?;
        for i in 0..=n {
            t.push(vec![sigma.into(), i.into(), d.probs_plus[i].into(), d.probs_minus[i].into()]);
        }
        t.notes.push(format!("sigma={sigma}: D={}", distinguishability(&d)));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MetrologyPreset {
    /// Bit-flip noise, omega = 1, gamma = 0.5.
    FigMetrologyBitflip,
    /// White noise, omega = 1, gamma = 0.2.
    FigMetrologyWhite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseArg {
    BitFlip,
    White,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetrologyArgs {
    #[arg(long, value_enum)]
    pub preset: Option<MetrologyPreset>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Register sizes for the optimal global measurement (at most 9).
    #[arg(long)]
    pub n_range: Option<String>,
    /// Register sizes for the local readouts; defaults to `--n-range`.
    #[arg(long)]
    pub local_n_range: Option<String>,
    /// Comma-separated: `global`, `z`, `local` (angle optimised) or `rotated:<alpha>`.
    #[arg(long, default_value = "global,z,local")]
    pub measurement: String,
}

fn parse_measurement(s: &str) -> Result<Measurement> {
    match s.trim() {
        "global" => Ok(Measurement::OptimalGlobal),
        "z" => Ok(Measurement::CollectiveZ),
        "local" => Ok(Measurement::OptimizedLocal),
        other => other
            .strip_prefix("rotated:")
            .and_then(|a| a.parse::<f64>().ok())
            .map(Measurement::RotatedCollective)
            .ok_or_else(|| Error::Domain(format!("unknown measurement '{other}'"))),
    }
}

fn measurement_name(m: Measurement) -> String {
    match m {
        Measurement::OptimalGlobal => "global".into(),
        Measurement::CollectiveZ => "z".into(),
        Measurement::OptimizedLocal => "local".into(),
        Measurement::RotatedCollective(a) => format!("rotated:{a}"),
    }
}

fn metrology(a: &MetrologyArgs) -> Result<Table> {
    let (noise, omega, gamma) = match a.preset {
        Some(MetrologyPreset::FigMetrologyBitflip) => (NoiseArg::BitFlip, 1.0, 0.5),
        Some(MetrologyPreset::FigMetrologyWhite) => (NoiseArg::White, 1.0, 0.2),
        None => (NoiseArg::BitFlip, 1.0, 0.5),
    };
    let noise = match a.noise.unwrap_or(noise) {
        NoiseArg::BitFlip => NoiseKind::BitFlip,
        NoiseArg::White => NoiseKind::White,
    };
    let omega = a.omega.unwrap_or(omega);
    let gamma = a.gamma.unwrap_or(gamma);
    let global_ns = parse_odd_list(a.n_range.as_deref().unwrap_or("3:9"))?;
    let local_ns = match (&a.local_n_range, &a.n_range, a.preset) {
        (Some(r), _, _) => parse_odd_list(r)?,
        (None, None, Some(_)) => parse_odd_list("3:15")?,
        (None, _, _) => global_ns.clone(),
    };
    let measurements: Vec<Measurement> = a.measurement.split(',').map(parse_measurement).collect::<Result<_>>()?;
    let mut t = Table::new(vec![
        "n",
        "measurement",
        "noise",
        "omega",
        "gamma",
        "optimal_t",
        "alpha",
        "fisher",
        "delta_omega",
        "delta_omega_product",
        "relative_improvement",
        "non_unimodal",
    ]);
    for m in measurements {
        let ns = if m == Measurement::OptimalGlobal { &global_ns } else { &local_ns };
        for r in relative_improvement_curve(noise, omega, gamma, m, ns)? {
            t.push(vec![
                r.n_qubits.into(),
                measurement_name(m).into(),
                match noise {
                    NoiseKind::BitFlip => "bit-flip",
                    NoiseKind::White => "white",
                }
                .into(),
                omega.into(),
                gamma.into(),
                r.optimal_t.into(),
                r.alpha.into(),
                r.fisher.into(),
                r.delta_omega.into(),
                r.product_baseline.into(),
                r.relative_improvement.into(),
                r.non_unimodal.into(),
            ]);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    /// Register sizes to check (at most 7).
    #[arg(long, default_value = "3,5,7")]
    pub n: String,
    /// Random parameter points per randomised check.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

fn oracle_check(a: &OracleArgs) -> Result<Table> {
    let ns = parse_odd_list(&a.n)?;
    if let Some(&n) = ns.iter().find(|&&n| n > ORACLE_ROW_MAX_N) {
        return Err(Error::Capacity {
            requested: n,
            limit: ORACLE_ROW_MAX_N,
            hint: "oracle-check runs dense simulations; use N <= 7",
        });
    }
    let reports: Vec<Vec<validation::CheckReport>> =
        ns.par_iter().map(|&n| validation::run_all(n, a.points)).collect::<Result<_>>()?;
    let mut t = Table::new(vec!["check", "n", "points", "max_deviation", "tolerance", "status"]);
    let mut failures = 0;
    for r in reports.iter().flatten() {
        if !r.passed() {
            failures += 1;
        }
        t.push(vec![
            r.check.into(),
            r.n_qubits.into(),
            r.points.into(),
            r.max_deviation.into(),
            r.tolerance.into(),
            if r.passed() { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    let canary_n = ns[0];
    for c in validation::canaries(canary_n)? {
        if !c.detected() {
            failures += 1;
        }
        t.push(vec![
            format!("canary:{}", c.name).into(),
            canary_n.into(),
            1usize.into(),
            c.deviation.into(),
            c.tolerance.into(),
            if c.detected() { "DETECTED" } else { "MISSED" }.into(),
        ]);
    }
    t.notes.push(format!("failures={failures}"));
    t.failed = failures > 0;
    Ok(t)
}
