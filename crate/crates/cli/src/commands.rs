use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hypercolor::calibration::CALIBRATION;
use hypercolor::decomposition::{cluster_log_estimate, decompose, Thresholds, VertexClass};
use hypercolor::enumeration::{
    cluster_log, partition_log, spectrum, EnumerationConfig, Restriction, SpectrumMode,
};
use hypercolor::experiments::{self, ExperimentReport};
use hypercolor::hypergraph::{
    generate, read_coloring, read_hypergraph, write_coloring, write_hypergraph,
};
use hypercolor::moments::{balanced_second_moment_log, first_moment_log, second_moment_alpha_log};
use hypercolor::phase::{
    beta_crit_expansion, beta_crit_root, classify_regime, condensation_gap, default_band,
    lambda_value, phase_point, second_moment_verdict, Density,
};
use hypercolor::planted::gen_planted;
use hypercolor::{Error, ModelKind, ModelParams, Result};
use serde_json::{json, Value};

use crate::args::*;

/// Schema tag of every non-report JSON result.
pub const RESULT_SCHEMA: &str = "hypercolor.result/1";

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a),
        Command::Exact(a) => exact(cli, a),
        Command::Cluster(a) => cluster(cli, a),
        Command::Moments(a) => moments(cli, a),
        Command::Phase(a) => phase(cli, a),
        Command::ScanAlpha(a) => scan_alpha(cli, a),
        Command::BetaCrit(a) => beta_crit(cli, a),
        Command::Decompose(a) => decompose_cmd(cli, a),
        Command::Census(a) => census(cli, a),
        Command::GapScan(a) => gap_scan(cli, a),
        Command::PlantedNull(a) => planted_null(cli, a),
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_text(command: &str, body: Value) -> String {
    let mut obj = match body {
        Value::Object(map) => map,
        other => {
            let mut m = serde_json::Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    obj.insert("schema".into(), Value::from(RESULT_SCHEMA));
    obj.insert("command".into(), Value::from(command));
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes");
    s.push('\n');
    s
}

/// Writes a JSON body, or a CSV rendering when `--format csv` and one exists.
fn emit(cli: &Cli, command: &str, body: Value, csv: Option<String>) -> Result<()> {
    match (cli.format, csv) {
        (Format::Csv, Some(csv)) => write_output(cli, &csv),
        (Format::Csv, None) => Err(Error::Parameter(format!("{command} has no CSV output"))),
        (Format::Json, _) => write_output(cli, &json_text(command, body)),
    }
}

fn emit_report(cli: &Cli, report: &ExperimentReport, long: bool) -> Result<()> {
    match cli.format {
        Format::Json => write_output(cli, &report.to_json()),
        Format::Csv if long => write_output(cli, &report.to_long_csv()),
        Format::Csv => write_output(cli, &report.to_csv()),
    }
}

fn report_summary(report: &ExperimentReport) -> String {
    let mut s = format!("{}: {} trials", report.name, report.trials.len());
    for c in &report.checks {
        write!(s, "; {} {:?}", c.name, c.status).unwrap();
    }
    s
}

fn density(a: &DensityArgs, k: u32) -> Result<Density> {
    match (a.d, a.ratio, a.c, a.c_over_ln2) {
        (Some(d), ..) => Density::from_d(d, k),
        (_, Some(r), ..) => Density::from_ratio(r, k),
        (_, _, Some(c), _) => Density::from_c(c, k),
        (.., Some(c)) => Density::from_c(c * std::f64::consts::LN_2, k),
        _ => Err(Error::Parameter(
            "one of --d, --ratio, --c, --c-over-ln2 is required".into(),
        )),
    }
}

fn model_params(n: usize, k: usize, size: &SizeArgs, beta: f64) -> Result<ModelParams> {
    match (size.d, size.m) {
        (Some(d), _) => ModelParams::from_density(n, k, d, beta),
        (_, Some(m)) => ModelParams::from_edge_count(n, k, m, beta),
        _ => Err(Error::Parameter("one of --d, --m is required".into())),
    }
}

fn thresholds(a: &ThresholdArgs, k: usize) -> Result<Thresholds> {
    let th = match a.thresholds.as_str() {
        "standard" => Thresholds::standard(k),
        "calibrated" => CALIBRATION.census_thresholds(k),
        other => {
            let parsed = other
                .split_once(',')
                .and_then(|(s, e)| Some((s.trim().parse().ok()?, e.trim().parse().ok()?)));
            match parsed {
                Some((s, e)) => Thresholds::scaled(s, e, k),
                None => {
                    return Err(Error::Parameter(format!(
                        "thresholds {other:?}: expected standard, calibrated or SUPPORT,ENDANGERED"
                    )))
                }
            }
        }
    };
    th.validate()?;
    Ok(th)
}

fn restriction(text: &str) -> Result<Restriction> {
    let (name, param) = match text.split_once(':') {
        Some((n, p)) => {
            let v: f64 = p
                .parse()
                .map_err(|_| Error::Parameter(format!("restriction {text:?}: bad parameter")))?;
            (n, Some(v))
        }
        None => (text, None),
    };
    match (name, param) {
        ("all", None) => Ok(Restriction::All),
        ("balanced", None) => Ok(Restriction::Balanced),
        ("imbalanced", Some(e)) => Ok(Restriction::Imbalanced(e)),
        ("energy-window" | "energy_window", Some(e)) => Ok(Restriction::EnergyWindow(e)),
        _ => Err(Error::Parameter(format!(
            "restriction {text:?}: expected all, balanced, imbalanced:ε or energy-window:ε"
        ))),
    }
}

fn enumeration_config(cap: usize) -> EnumerationConfig {
    EnumerationConfig {
        cap,
        ..EnumerationConfig::default()
    }
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<String> {
    if a.planted {
        let d = a
            .size
            .d
            .ok_or_else(|| Error::Parameter("--planted needs --d".into()))?;
        let inst = gen_planted(d, a.k, a.n, a.beta, a.seed, a.balanced)?;
        write_output(cli, &write_hypergraph(&inst.hypergraph))?;
        let path = a.coloring_out.as_ref().expect("required by clap");
        write_file(path, &write_coloring(&inst.sigma))?;
        return Ok(format!(
            "gen: planted n = {}, k = {}, m = {}, p1 = {:e}, p2 = {:e}",
            a.n,
            a.k,
            inst.hypergraph.num_edges(),
            inst.p1,
            inst.p2
        ));
    }
    let kind: ModelKind = a.model.parse()?;
    let params = model_params(a.n, a.k, &a.size, a.beta)?;
    let h = generate(kind, &params, a.seed)?;
    write_output(cli, &write_hypergraph(&h))?;
    Ok(format!(
        "gen: {kind} n = {}, k = {}, m = {}",
        a.n,
        a.k,
        h.num_edges()
    ))
}

fn exact(cli: &Cli, a: &ExactArgs) -> Result<String> {
    let h = read_hypergraph(&a.input)?;
    let r = restriction(&a.restriction)?;
    let table = spectrum(
        &h,
        SpectrumMode::Magnetization,
        None,
        &enumeration_config(a.cap),
    )?;
    let log_z = partition_log(&table, a.beta, r)?;
    let body = json!({
        "n": h.n(), "k": h.k(), "m": h.num_edges(), "beta": a.beta,
        "restriction": r, "log_z": log_z, "free_entropy": log_z / h.n() as f64,
    });
    emit(cli, "exact", body, Some(table.to_csv()))?;
    Ok(format!("exact: ln Z = {log_z}"))
}

fn cluster(cli: &Cli, a: &ClusterArgs) -> Result<String> {
    let h = read_hypergraph(&a.input)?;
    let sigma = read_coloring(&a.coloring)?;
    let table = spectrum(
        &h,
        SpectrumMode::Overlap,
        Some(&sigma),
        &enumeration_config(a.cap),
    )?;
    let log_c = cluster_log(&table, a.beta, a.theta)?;
    let body = json!({
        "n": h.n(), "k": h.k(), "m": h.num_edges(), "beta": a.beta, "theta": a.theta,
        "coloring": sigma.to_string(), "energy": h.monochromatic_count(&sigma)?,
        "cluster_log": log_c,
    });
    emit(cli, "cluster", body, Some(table.to_csv()))?;
    Ok(format!("cluster: ln C = {log_c}"))
}

fn moments(cli: &Cli, a: &MomentsArgs) -> Result<String> {
    let params = model_params(a.n, a.k, &a.size, a.beta)?;
    if let Some(check) = a.check {
        let trials = a.trials.expect("required by clap");
        let report = match check {
            MomentCheck::FirstMoment => {
                experiments::mc_first_moment_check(&params, trials, a.seed)?
            }
            MomentCheck::FreeEntropy => {
                experiments::free_entropy_vs_bound(&params, trials, a.seed)?
            }
        };
        emit_report(cli, &report, false)?;
        return Ok(report_summary(&report));
    }
    let first = first_moment_log(&params);
    let second = balanced_second_moment_log(&params);
    let mut body = json!({
        "n": params.n, "k": params.k, "d": params.d, "m": params.m, "beta": params.beta,
        "first_moment_log": first,
        "balanced_second_moment_log": second,
        "second_over_first_squared_log": second - 2.0 * first,
    });
    if let Some(alpha) = a.alpha {
        body["alpha"] = json!(alpha);
        body["second_moment_alpha_log"] = json!(second_moment_alpha_log(&params, alpha)?);
    }
    emit(cli, "moments", body, None)?;
    Ok(format!(
        "moments: ln E[Z] = {first}, ln E[Z²]_bal = {second}"
    ))
}

fn phase(cli: &Cli, a: &PhaseArgs) -> Result<String> {
    let dens = density(&a.density, a.k)?;
    let band = a.band.unwrap_or_else(|| default_band(a.k));
    let point = phase_point(&dens, a.beta, band)?;
    let gap = condensation_gap(&dens, a.beta)?;
    let mut body = json!({
        "band": band, "ratio": dens.ratio(),
        "point": point, "gap": gap,
    });
    if let Some(grid) = a.verdict_grid {
        body["verdict"] = json!(second_moment_verdict(&dens, a.beta, grid)?);
    }
    emit(cli, "phase", body, None)?;
    Ok(format!(
        "phase: Σ = {}, gap = {}, regime {:?}",
        point.sigma_value, point.gap, point.regime
    ))
}

fn scan_alpha(cli: &Cli, a: &ScanAlphaArgs) -> Result<String> {
    let dens = density(&a.density, a.k)?;
    if a.grid == 0 {
        return Err(Error::Parameter("--grid must be at least 1".into()));
    }
    let mut csv = String::from("alpha,lambda\n");
    let mut points = Vec::with_capacity(a.grid + 1);
    for i in 0..=a.grid {
        let alpha = i as f64 / a.grid as f64;
        let value = lambda_value(&dens, a.beta, alpha)?;
        writeln!(csv, "{alpha},{value}").unwrap();
        points.push(json!({"alpha": alpha, "lambda": value}));
    }
    let verdict = if a.grid >= hypercolor::phase::MIN_VERDICT_GRID {
        Some(second_moment_verdict(&dens, a.beta, a.grid)?)
    } else {
        None
    };
    let body = json!({
        "k": a.k, "ratio": dens.ratio(), "c": dens.c(), "beta": a.beta,
        "points": points, "verdict": verdict,
    });
    emit(cli, "scan-alpha", body, Some(csv))?;
    Ok(format!(
        "scan-alpha: {} points, verdict {:?}",
        a.grid + 1,
        verdict
    ))
}

fn beta_crit(cli: &Cli, a: &BetaCritArgs) -> Result<String> {
    let dens = density(&a.density, a.k)?;
    let band = a.band.unwrap_or_else(|| default_band(a.k));
    let root = beta_crit_root(&dens, a.tol);
    let expansion = beta_crit_expansion(&dens).ok();
    let body = json!({
        "k": a.k, "ratio": dens.ratio(), "c": dens.c(),
        "root": root.map(|r| r.beta),
        "bracket": root.map(|r| r.bracket),
        "sigma_at_root": root.map(|r| r.sigma),
        "expansion": expansion,
        "difference": root.zip(expansion).map(|(r, e)| r.beta - e),
        "band": band,
        "regime": classify_regime(&dens, band),
    });
    emit(cli, "beta-crit", body, None)?;
    Ok(match root {
        Some(r) => format!("beta-crit: root = {}, expansion = {:?}", r.beta, expansion),
        None => "beta-crit: Σ has no zero at this density".to_string(),
    })
}

fn decompose_cmd(cli: &Cli, a: &DecomposeArgs) -> Result<String> {
    let h = read_hypergraph(&a.input)?;
    let sigma = read_coloring(&a.coloring)?;
    let th = thresholds(&a.thresholds, h.k())?;
    let dec = decompose(&h, &sigma, &th)?;
    let est = cluster_log_estimate(&h, &sigma, a.beta, &dec, &th)?;
    let sizes = dec.sizes();
    let mut csv = String::from("vertex,class,support,endangered,mono_degree\n");
    for v in 0..h.n() {
        let class = match dec.class(v) {
            VertexClass::Core => "core",
            VertexClass::Backbone => "backbone",
            VertexClass::Rest => "rest",
            VertexClass::Free => "free",
        };
        writeln!(
            csv,
            "{v},{class},{},{},{}",
            dec.support_count[v], dec.endangered_count[v], dec.mono_degree[v]
        )
        .unwrap();
    }
    let body = json!({
        "n": h.n(), "k": h.k(), "m": h.num_edges(), "beta": a.beta,
        "thresholds": th, "sizes": sizes,
        "energy": h.monochromatic_count(&sigma)?,
        "whitened": dec.whitened, "containment": dec.containment,
        "peel_steps": dec.peel_trace.len(),
        "estimate": est,
    });
    emit(cli, "decompose", body, Some(csv))?;
    Ok(format!(
        "decompose: core {}, backbone {}, rest {}, free {}",
        sizes.core, sizes.backbone, sizes.rest, sizes.free
    ))
}

fn census(cli: &Cli, a: &CensusArgs) -> Result<String> {
    let dens = density(&a.density, a.k as u32)?;
    let th = thresholds(&a.thresholds, a.k)?;
    let report =
        experiments::decomposition_census(a.n, a.k, dens.d(), a.beta, a.trials, a.seed, &th)?;
    emit_report(cli, &report, false)?;
    Ok(report_summary(&report))
}

fn gap_scan(cli: &Cli, a: &GapScanArgs) -> Result<String> {
    let dens = density(&a.density, a.k as u32)?;
    let th = thresholds(&a.thresholds, a.k)?;
    let report =
        experiments::condensation_scan(dens.d(), a.k, &a.betas, a.n, a.trials, a.seed, &th)?;
    emit_report(cli, &report, true)?;
    Ok(report_summary(&report))
}

fn planted_null(cli: &Cli, a: &PlantedNullArgs) -> Result<String> {
    let params = ModelParams::from_density(a.n, a.k, a.d, a.beta)?;
    let report = experiments::planted_vs_null(&params, a.trials, a.seed)?;
    emit_report(cli, &report, false)?;
    Ok(report_summary(&report))
}
