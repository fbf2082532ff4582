//! Subcommand implementations. Each returns the document it produces; the
//! binary prints it and writes it under the output directory.

use std::path::Path;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::{overlap_polynomials, overlap_table, overlap_table_by_pairs, OverlapTable};
use crate::config::{EnsembleChoice, ExperimentConfig};
use crate::counting::MotifCounter;
use crate::ensemble::{EnsembleFamily, EnsembleSpec};
use crate::error::{Error, Result};
use crate::moments::{
    asymptotic_report, dependent_report, independent_report, variance_dependent_exact,
    variance_independent_exact, AsymptoticExpansion, EdgeBudget, EnsembleKind, MomentReport,
    ScaledCoefficient, SizeParameter,
};
use crate::motif::Motif;
use crate::scalar::ratio_string;
use crate::simulate::run_replicas;
use crate::stats::{
    bootstrap_variance_interval, convergence_row, cross_moments, empirical_residual_variance,
    growth_exponent_fit, z_score, ReplicaRecord,
};
use crate::{Rational, Scalar};

/// How `census` tabulates overlaps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CensusMethod {
    #[default]
    Anchored,
    /// Literal enumeration of copy pairs; refused beyond the feasibility limit.
    Pairs,
}

fn exact(value: &Rational) -> Value {
    Value::String(ratio_string(value))
}

fn count_json(value: &BigUint) -> Value {
    match value.to_u64() {
        Some(v) => json!(v),
        None => Value::String(value.to_string()),
    }
}

fn uncoloured(choice: EnsembleChoice) -> Option<EnsembleKind> {
    match choice {
        EnsembleChoice::Dependent => Some(EnsembleKind::Dependent),
        EnsembleChoice::Independent => Some(EnsembleKind::Independent),
        _ => None,
    }
}

fn budget_for(config: &ExperimentConfig, n: u32) -> Result<EdgeBudget> {
    match config.edges {
        Some(edges) => EdgeBudget::new(n.into(), edges),
        None => {
            let p = config.density()?.ok_or_else(|| Error::Config("dependent ensemble needs p".into()))?;
            EdgeBudget::from_density(n.into(), &p)
        }
    }
}

fn report_json(report: &MomentReport<Rational>) -> Value {
    let approx = |x: &Rational| json!(Scalar::to_f64(x));
    json!({
        "motif": report.motif,
        "ensemble": report.ensemble,
        "n": report.n,
        "E": report.edges,
        "p": report.p.as_ref().map(exact),
        "mean": exact(&report.mean),
        "variance": exact(&report.variance),
        "covariance_with_edges": report.covariance_with_edges.as_ref().map(exact),
        "residual_variance": report.residual_variance.as_ref().map(exact),
        "approx": {
            "mean": approx(&report.mean),
            "variance": approx(&report.variance),
            "covariance_with_edges": report.covariance_with_edges.as_ref().map(approx),
            "residual_variance": report.residual_variance.as_ref().map(approx),
        },
    })
}

fn coefficient_json(c: &ScaledCoefficient<Rational>) -> Value {
    json!({
        "rational": exact(&c.rational),
        "log2": format!("{}", c.log2),
        "approx": c.to_f64(),
    })
}

fn expansion_json(e: &AsymptoticExpansion<Rational>) -> Value {
    json!({
        "motif": e.motif,
        "ensemble": e.ensemble,
        "size_parameter": e.size_parameter,
        "volume_exponent": e.volume_exponent.to_string(),
        "volume_coefficient": coefficient_json(&e.volume_coefficient),
        "surface_exponent": e.surface_exponent.to_string(),
        "surface_coefficient": coefficient_json(&e.surface_coefficient),
        "variance_growth_exponent": e.variance_growth_exponent.to_string(),
        "std_growth_exponent": e.std_growth_exponent().to_string(),
        "surface_significant": e.surface_significant,
    })
}

fn expansions(config: &ExperimentConfig, motifs: &[Motif]) -> Result<Vec<Value>> {
    let Some(p) = config.density()? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for motif in motifs {
        for kind in config.ensembles.iter().filter_map(|&c| uncoloured(c)) {
            for size in [SizeParameter::Vertices, SizeParameter::Pairs] {
                out.push(expansion_json(&asymptotic_report(motif, &p, kind, size)?));
            }
        }
    }
    Ok(out)
}

/// Exact moments for every motif, uncoloured ensemble and grid point, plus
/// the asymptotic expansions.
pub fn exact_report(config: &ExperimentConfig) -> Result<Value> {
    let motifs = config.resolve_motifs()?;
    let p = config.density()?;
    let mut reports = Vec::new();
    for motif in &motifs {
        for &n in &config.n_grid {
            let table = overlap_table(motif, n.into())?;
            for kind in config.ensembles.iter().filter_map(|&c| uncoloured(c)) {
                let report = match kind {
                    EnsembleKind::Dependent => dependent_report(&table, &budget_for(config, n)?)?,
                    EnsembleKind::Independent => {
                        let p = p.as_ref().ok_or_else(|| Error::Config("independent ensemble needs p".into()))?;
                        independent_report(&table, p)?
                    }
                };
                reports.push(report_json(&report));
            }
        }
    }
    Ok(json!({ "reports": reports, "asymptotics": expansions(config, &motifs)? }))
}

pub fn asymptotic(config: &ExperimentConfig) -> Result<Value> {
    if config.density()?.is_none() {
        return Err(Error::Config("asymptotic expansions need p".into()));
    }
    let motifs = config.resolve_motifs()?;
    Ok(json!({ "asymptotics": expansions(config, &motifs)? }))
}

fn table_json(table: &OverlapTable) -> Value {
    json!({
        "n": table.n(),
        "copies": count_json(table.copies()),
        "counts": table.counts().iter().map(count_json).collect::<Vec<_>>(),
        "sumk_ok": table.sum_identity_holds() && table.weighted_identity_holds(),
    })
}

/// Overlap tables over the grid and the exact overlap polynomials.
pub fn census(config: &ExperimentConfig, method: CensusMethod) -> Result<Value> {
    let motifs = config.resolve_motifs()?;
    let mut out = Vec::new();
    for motif in &motifs {
        let tables = config
            .n_grid
            .iter()
            .map(|&n| match method {
                CensusMethod::Anchored => overlap_table(motif, n.into()),
                CensusMethod::Pairs => overlap_table_by_pairs(motif, n.into()),
            })
            .map(|t| t.map(|t| table_json(&t)))
            .collect::<Result<Vec<_>>>()?;
        let polynomials: Vec<Value> = overlap_polynomials(motif)?
            .iter()
            .map(|p| json!({ "k": p.k, "coefficients": p.poly.coeffs().iter().map(exact).collect::<Vec<_>>() }))
            .collect();
        out.push(json!({
            "motif": motif.label(),
            "vertices": motif.vertex_count(),
            "edges": motif.edge_count(),
            "automorphisms": motif.automorphism_order().get(),
            "tables": tables,
            "polynomials": polynomials,
        }));
    }
    Ok(json!({ "census": out }))
}

/// One CSV row of `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationRow {
    pub motif: String,
    pub ensemble: String,
    pub n: u32,
    pub p: Option<f64>,
    #[serde(rename = "E")]
    pub edges: Option<u64>,
    pub replicas: u64,
    pub mean: f64,
    pub var: f64,
    #[serde(rename = "cov_TE")]
    pub cov_te: Option<f64>,
    pub resvar: Option<f64>,
    pub scaled_mean: f64,
    pub surface_stat: Option<f64>,
    pub scaled_std: f64,
    pub stderr_mean: f64,
}

/// Replicas of one ensemble at one grid point, shared by all motifs.
pub struct GridRun {
    pub choice: EnsembleChoice,
    pub family: EnsembleFamily,
    pub spec: EnsembleSpec,
    pub n: u32,
    pub records: Vec<ReplicaRecord>,
}

/// Simulate every ensemble at every grid point, in config order.
pub fn simulate_grid(config: &ExperimentConfig, motifs: &[Motif], choices: &[EnsembleChoice]) -> Result<Vec<GridRun>> {
    let counters: Vec<MotifCounter> = motifs.iter().map(MotifCounter::new).collect();
    let mut runs = Vec::new();
    for &choice in choices {
        let family = config.family(choice)?;
        for &n in &config.n_grid {
            let spec = family.at(n)?;
            let records = run_replicas(&spec, &counters, config.replicas, config.master_seed)?;
            runs.push(GridRun { choice, family: family.clone(), spec, n, records });
        }
    }
    Ok(runs)
}

fn simulation_rows(motifs: &[Motif], run: &GridRun) -> Result<Vec<SimulationRow>> {
    let vertices = run.spec.vertex_count();
    let fixed = run.spec.fixed_edge_count();
    let p = match (&run.family, fixed) {
        (EnsembleFamily::FixedEdges { edges }, _) => {
            let pairs = u64::from(vertices) * u64::from(vertices.saturating_sub(1)) / 2;
            (pairs > 0).then(|| *edges as f64 / pairs as f64)
        }
        (family, _) => family.density().map(Scalar::to_f64),
    };
    motifs
        .iter()
        .enumerate()
        .map(|(i, motif)| {
            let moments = cross_moments(&run.records, i)?;
            let row = convergence_row(motif, p.unwrap_or(f64::NAN), vertices.into(), fixed, &moments);
            let residual = if fixed.is_none() && run.records.len() >= 3 {
                let est = empirical_residual_variance(&run.records, i)?;
                (!est.degenerate).then_some(est.value)
            } else {
                None
            };
            Ok(SimulationRow {
                motif: motif.label(),
                ensemble: run.family.name().to_string(),
                n: vertices,
                p,
                edges: fixed,
                replicas: run.records.len() as u64,
                mean: moments.mean_x,
                var: moments.var_x,
                cov_te: fixed.is_none().then_some(moments.cov_xy),
                resvar: residual,
                scaled_mean: row.scaled_mean,
                surface_stat: p.map(|_| row.surface_statistic),
                scaled_std: row.scaled_std,
                stderr_mean: row.stderr_mean,
            })
        })
        .collect()
}

/// Monte Carlo statistics for every (ensemble, n, motif), as CSV.
pub fn simulate(config: &ExperimentConfig) -> Result<String> {
    if config.replicas < 2 {
        return Err(Error::Config("simulate needs at least 2 replicas".into()));
    }
    let motifs = config.resolve_motifs()?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    for run in simulate_grid(config, &motifs, &config.ensembles)? {
        for row in simulation_rows(&motifs, &run)? {
            writer.serialize(row)?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::io("csv buffer", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Largest acceptable `|z|` for simulated means.
pub const Z_LIMIT: f64 = 4.0;

/// Simulated against exact statistics, with growth-exponent fits and the
/// surface verdicts. The second value is `false` when a check fails.
pub fn compare(config: &ExperimentConfig) -> Result<(Value, bool)> {
    if config.replicas < 3 {
        return Err(Error::Config("compare needs at least 3 replicas".into()));
    }
    let motifs = config.resolve_motifs()?;
    let choices: Vec<EnsembleChoice> = config.ensembles.iter().copied().filter(|c| !c.is_block()).collect();
    if choices.is_empty() {
        return Err(Error::Config("compare needs the dependent or independent ensemble".into()));
    }
    let runs = simulate_grid(config, &motifs, &choices)?;
    let p = config.density()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut exact_variances = vec![Vec::new(); motifs.len() * choices.len()];
    let mut sample_variances = vec![Vec::new(); motifs.len() * choices.len()];
    for run in &runs {
        let kind = uncoloured(run.choice).expect("filtered above");
        let slot = choices.iter().position(|&c| c == run.choice).expect("run from choices");
        for (i, motif) in motifs.iter().enumerate() {
            let table = overlap_table(motif, run.n.into())?;
            let report = match kind {
                EnsembleKind::Dependent => dependent_report::<Rational>(&table, &budget_for(config, run.n)?)?,
                EnsembleKind::Independent => {
                    independent_report(&table, p.as_ref().expect("validated: independent has p"))?
                }
            };
            let moments = cross_moments(&run.records, i)?;
            let stderr = (moments.var_x / moments.count as f64).sqrt();
            let exact_mean = Scalar::to_f64(&report.mean);
            let exact_var = Scalar::to_f64(&report.variance);
            let z = z_score(moments.mean_x, exact_mean, stderr);
            if z.abs() > Z_LIMIT {
                failures.push(format!("{} {} n={}: |z| = {:.2} > {Z_LIMIT}", motif.label(), kind, run.n, z.abs()));
            }
            let values: Vec<f64> = run.records.iter().map(|r| r.counts[i] as f64).collect();
            let interval = bootstrap_variance_interval(&values, config.bootstrap_resamples, 0.99, config.master_seed)?;
            let residual = match kind {
                EnsembleKind::Independent => Some(empirical_residual_variance(&run.records, i)?.value),
                EnsembleKind::Dependent => None,
            };
            let ratio = |a: f64, b: f64| (b != 0.0).then(|| a / b);
            let exact_residual = report.residual_variance.as_ref().map(Scalar::to_f64);
            rows.push(json!({
                "motif": motif.label(),
                "ensemble": kind,
                "n": run.n,
                "E": report.edges,
                "replicas": moments.count,
                "mean": moments.mean_x,
                "exact_mean": exact_mean,
                "stderr_mean": stderr,
                "z": z,
                "var": moments.var_x,
                "exact_var": exact_var,
                "var_ratio": ratio(moments.var_x, exact_var),
                "var_interval_99": [interval.0, interval.1],
                "exact_var_in_interval": interval.0 <= exact_var && exact_var <= interval.1,
                "resvar": residual,
                "exact_resvar": exact_residual,
                "resvar_ratio": residual.zip(exact_residual).and_then(|(a, b)| ratio(a, b)),
            }));
            exact_variances[slot * motifs.len() + i].push((f64::from(run.n), exact_var));
            sample_variances[slot * motifs.len() + i].push((f64::from(run.n), moments.var_x));
        }
    }

    let mut fits = Vec::new();
    if let Some(p) = &p {
        for (slot, &choice) in choices.iter().enumerate() {
            let kind = uncoloured(choice).expect("filtered above");
            if kind == EnsembleKind::Dependent && config.edges.is_some() {
                continue;
            }
            for (i, motif) in motifs.iter().enumerate() {
                let theory = asymptotic_report(motif, p, kind, SizeParameter::Vertices)?;
                let theory_exponent = theory.variance_growth_exponent.to_integer() as f64;
                let exact_fit = growth_exponent_fit(&exact_variances[slot * motifs.len() + i]).ok();
                let sample_fit = growth_exponent_fit(&sample_variances[slot * motifs.len() + i]).ok();
                // Surface term of order n^(v-1) against a standard deviation of
                // order n^(exponent/2).
                let surface_exponent = (motif.vertex_count() - 1) as f64;
                let fitted_verdict = exact_fit.map(|f| surface_exponent - f.exponent / 2.0 > 0.25);
                if let Some(verdict) = fitted_verdict {
                    if verdict != theory.surface_significant {
                        failures.push(format!(
                            "{} {kind}: fitted surface verdict {verdict} disagrees with theory",
                            motif.label()
                        ));
                    }
                }
                fits.push(json!({
                    "motif": motif.label(),
                    "ensemble": kind,
                    "theory_variance_exponent": theory_exponent,
                    "exact_variance_exponent": exact_fit.map(|f| f.exponent),
                    "exact_variance_half_width": exact_fit.map(|f| f.half_width),
                    "sample_variance_exponent": sample_fit.map(|f| f.exponent),
                    "sample_variance_half_width": sample_fit.map(|f| f.half_width),
                    "surface_significant": theory.surface_significant,
                    "surface_significant_fitted": fitted_verdict,
                }));
            }
        }
    }
    let passed = failures.is_empty();
    Ok((json!({ "rows": rows, "fits": fits, "failures": failures, "passed": passed }), passed))
}

/// Exact variance of one motif under one uncoloured ensemble at `n`.
pub fn exact_variance(motif: &Motif, family: &EnsembleFamily, n: u32) -> Result<Rational> {
    let table = overlap_table(motif, n.into())?;
    match family {
        EnsembleFamily::Dependent { p } => variance_dependent_exact(&table, &EdgeBudget::from_density(n.into(), p)?),
        EnsembleFamily::FixedEdges { edges } => variance_dependent_exact(&table, &EdgeBudget::new(n.into(), *edges)?),
        EnsembleFamily::Independent { p } => variance_independent_exact(&table, p),
        _ => Err(Error::domain("exact variances are available for uncoloured ensembles only")),
    }
}

/// Write `contents` to `dir/name`, creating `dir`.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"{{"motifs": ["triangle", "square"], "ensembles": ["dependent", "independent"],
                "n_grid": [3, 4], "replicas": 400, "master_seed": 11 {extra}}}"#
        );
        let c = ExperimentConfig::from_json(&text).unwrap();
        c.validate().unwrap();
        c
    }

    #[test]
    fn exact_micro_values() {
        let doc = exact_report(&config(r#", "edges": 3, "p": "1/2""#)).unwrap();
        let reports = doc["reports"].as_array().unwrap();
        let find = |motif: &str, ens: &str, n: u64| {
            reports
                .iter()
                .find(|r| r["motif"] == motif && r["ensemble"] == ens && r["n"] == n)
                .unwrap()
                .clone()
        };
        let tri = find("triangle", "dependent", 4);
        assert_eq!((tri["mean"].as_str(), tri["variance"].as_str()), (Some("1/5"), Some("4/25")));
        let ind = find("triangle", "independent", 4);
        assert_eq!(ind["mean"], "1/2");
        assert_eq!(ind["variance"], "5/8");
        assert_eq!(ind["covariance_with_edges"], "3/4");
        assert_eq!(ind["residual_variance"], "1/4");
        let sq = find("square", "dependent", 3);
        assert_eq!((sq["mean"].as_str(), sq["variance"].as_str()), (Some("0/1"), Some("0/1")));
    }

    #[test]
    fn complete_graph_mean_is_copy_count() {
        let doc = exact_report(&config(r#", "p": "1""#)).unwrap();
        let r = &doc["reports"][2];
        assert_eq!(r["n"], 4);
        assert_eq!(r["mean"], "4/1");
        assert_eq!(r["variance"], "0/1");
    }

    #[test]
    fn census_document() {
        let doc = census(&config(r#", "p": "1/2""#), CensusMethod::Anchored).unwrap();
        let tri = &doc["census"][0];
        assert_eq!(tri["tables"][1]["counts"], json!([0, 12, 0, 4]));
        assert_eq!(tri["tables"][1]["sumk_ok"], true);
        assert_eq!(doc["census"][1]["tables"][0]["counts"], json!([0, 0, 0, 0, 0]));
        let pairs = census(&config(r#", "p": "1/2""#), CensusMethod::Pairs).unwrap();
        assert_eq!(doc, pairs);
    }

    #[test]
    fn pair_census_is_guarded() {
        let mut c = config(r#", "p": "1/2""#);
        c.n_grid = vec![40];
        let err = census(&c, CensusMethod::Pairs).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn simulate_is_deterministic_and_complete() {
        let c = config(r#", "p": "1/2""#);
        let a = simulate(&c).unwrap();
        assert_eq!(a, simulate(&c).unwrap());
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(
            lines[0],
            "motif,ensemble,n,p,E,replicas,mean,var,cov_TE,resvar,scaled_mean,surface_stat,scaled_std,stderr_mean"
        );
        assert_eq!(lines.len(), 1 + 2 * 2 * 2);
        let dep = lines.iter().find(|l| l.starts_with("triangle,dependent,4,")).unwrap();
        assert!(dep.contains(",3,400,"), "{dep}");
        let fields: Vec<&str> = dep.split(',').collect();
        assert_eq!((fields[8], fields[9]), ("", ""));
    }

    #[test]
    fn compare_passes_on_small_grid() {
        let c = config(r#", "p": "1/2""#);
        let (doc, passed) = compare(&c).unwrap();
        assert!(passed, "{}", doc["failures"]);
        assert_eq!(doc["rows"].as_array().unwrap().len(), 8);
        assert!(doc["fits"].as_array().unwrap().is_empty() || doc["fits"][0]["exact_variance_exponent"].is_null());
    }
}
