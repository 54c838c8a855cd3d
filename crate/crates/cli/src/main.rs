//! Command-line frontend: canonical states, correlation tensors, the
//! characteristic operators with spectra and classical bounds, class-maximum
//! tables, histogram simulation, and operator evaluation from data files.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

use belldisc::classopt::tables::reproduce_table;
use belldisc::expdata::{
    covering_settings, estimate_correlation, evaluate_operator, fidelity_from_data, read_manifest,
    simulate_counts_with_mode, write_histogram, write_manifest, Sampling,
};
use belldisc::lhv::{lhv_bound, violation_ratio};
use belldisc::pauli::{axes_to_string, parse_axes, Axis};
use belldisc::{
    canonical_state, correlation_tensor, mix_with_white_noise, relevant_correlations,
    spectral_report, Error, Estimate, Observable, State, TableId,
};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "belldisc",
    version,
    about = "Characteristic Bell operators for discriminating four-qubit entangled states"
)]
struct Cli {
    /// Emit machine-readable JSON (one object per line) instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the nonzero amplitudes of a canonical four-qubit state.
    State {
        /// One of: psi4, d42, ghz, w, cluster, ghz_y_plus, ghz_y_minus,
        /// bs_plus, bs_minus.
        name: String,
    },
    /// Print the relevant correlation-tensor entries of a canonical state.
    Tensor {
        name: String,
        /// Relevance cutoff on |T|.
        #[arg(long, default_value_t = 1e-9)]
        threshold: f64,
    },
    /// Print a characteristic operator; optionally its spectrum and LHV bound.
    Op {
        /// One of: bell-psi4, bell-d42, discrim-d42, discrim-prime-d42.
        name: String,
        /// Also print the maximal eigenvalue, spectral gap, and degeneracy.
        #[arg(long)]
        eig: bool,
        /// Also print the exhaustively enumerated local-hidden-variable bound.
        #[arg(long)]
        lhv: bool,
    },
    /// Recompute a class-maximum table and compare with the stored references.
    Table {
        /// One of: I, II, III-D, III-Dprime.
        which: String,
        /// Restarts per optimization (default: 200 for LU/separable, 500 for
        /// SLOCC/biseparable).
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Simulate per-setting count histograms and write them with a manifest.
    Simulate {
        /// Canonical state to prepare.
        state: String,
        /// Weight of the state in the white-noise mixture.
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
        /// Comma-separated settings (e.g. "zzzz,xyyx"), an operator name for
        /// its covering settings, or "fidelity-<state>" for the state's
        /// full-weight relevant settings.
        #[arg(long)]
        settings: String,
        /// Events per setting.
        #[arg(long, default_value_t = 2000)]
        events: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Poisson-fluctuating totals instead of a fixed event count.
        #[arg(long)]
        poisson: bool,
        /// Output directory for histogram files and manifest.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate an operator or a state fidelity from measured histograms.
    Eval {
        /// Operator to evaluate.
        #[arg(long, conflicts_with = "fidelity")]
        op: Option<String>,
        /// Canonical state whose fidelity to estimate.
        #[arg(long)]
        fidelity: Option<String>,
        /// Manifest file listing histogram paths.
        #[arg(long)]
        data: PathBuf,
    },
}

fn op_by_name(name: &str) -> Result<Observable, Error> {
    match name {
        "bell-psi4" => Ok(belldisc::bell_psi4()),
        "bell-d42" => Ok(belldisc::bell_d42()),
        "discrim-d42" => Ok(belldisc::discrim_d42()),
        "discrim-prime-d42" => belldisc::discrim_prime_d42(4),
        _ => Err(Error::Parse(format!(
            "unknown operator {name:?} (expected bell-psi4, bell-d42, discrim-d42, discrim-prime-d42)"
        ))),
    }
}

fn resolve_settings(spec: &str, threshold: f64) -> Result<Vec<Vec<Axis>>, Error> {
    if let Ok(op) = op_by_name(spec) {
        return Ok(covering_settings(&op));
    }
    if let Some(name) = spec.strip_prefix("fidelity-") {
        let state = canonical_state::<f64>(name, 4)?;
        let tensor = correlation_tensor(&state);
        return Ok(tensor
            .iter_all()
            .filter(|(a, t)| t.abs() > threshold && a.iter().all(|&x| x != Axis::I))
            .map(|(a, _)| a)
            .collect());
    }
    let mut settings = Vec::new();
    for part in spec.split(',') {
        let axes = parse_axes(part.trim())?;
        if axes.contains(&Axis::I) {
            return Err(Error::IdentityInSetting(part.trim().to_string()));
        }
        if !settings.contains(&axes) {
            settings.push(axes);
        }
    }
    Ok(settings)
}

// -- JSON records (field order fixed so emitted lines re-serialize byte-identically)

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct AmplitudeRecord {
    basis: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct StateRecord {
    name: String,
    n: usize,
    amplitudes: Vec<AmplitudeRecord>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct TensorEntry {
    axes: String,
    value: f64,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct TensorSummary {
    total: usize,
    full_weight: usize,
    threshold: f64,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct OpRecord {
    name: String,
    terms: Vec<TensorEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degenerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhv_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhv_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation_ratio: Option<f64>,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct SettingRecord {
    setting: String,
    events: u64,
    correlation: f64,
    stderr: f64,
}

fn emit<T: Serialize>(record: &T) {
    println!("{}", serde_json::to_string(record).expect("record serialization"));
}

fn cmd_state(name: &str, json: bool) -> Result<(), Error> {
    let state: State = canonical_state(name, 4)?;
    let amplitudes: Vec<AmplitudeRecord> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(i, a)| AmplitudeRecord {
            basis: format!("{i:04b}"),
            re: a.re,
            im: a.im,
        })
        .collect();
    if json {
        emit(&StateRecord { name: name.to_string(), n: 4, amplitudes });
    } else {
        println!("state {name} (4 qubits, {} nonzero amplitudes)", amplitudes.len());
        for a in &amplitudes {
            println!("  |{}>  {:+.15}  {:+.15}i", a.basis, a.re, a.im);
        }
    }
    Ok(())
}

fn cmd_tensor(name: &str, threshold: f64, json: bool) -> Result<(), Error> {
    let state: State = canonical_state(name, 4)?;
    let tensor = correlation_tensor(&state);
    let (total, full_weight) = relevant_correlations(&tensor, threshold);
    let entries: Vec<TensorEntry> = tensor
        .iter_all()
        .filter(|(_, t)| t.abs() > threshold)
        .map(|(a, t)| TensorEntry { axes: axes_to_string(&a), value: t })
        .collect();
    if json {
        for e in &entries {
            emit(e);
        }
        emit(&TensorSummary { total, full_weight, threshold });
    } else {
        println!("correlation tensor of {name} (threshold {threshold:e})");
        for e in &entries {
            println!("  {}  {:+.15}", e.axes, e.value);
        }
        println!("relevant: {total} entries ({full_weight} full weight)");
    }
    Ok(())
}

fn cmd_op(name: &str, eig: bool, lhv: bool, json: bool) -> Result<(), Error> {
    let op = op_by_name(name)?;
    let mut record = OpRecord {
        name: name.to_string(),
        terms: op
            .terms()
            .iter()
            .map(|t| TensorEntry { axes: t.axes_string(), value: t.weight() })
            .collect(),
        lambda_max: None,
        gap: None,
        degenerate: None,
        lhv_bound: None,
        lhv_exact: None,
        violation_ratio: None,
    };
    let mut eig_state = None;
    if eig || lhv {
        let rep = spectral_report(&op)?;
        if eig {
            record.lambda_max = Some(rep.lambda_max);
            record.gap = Some(rep.gap);
            record.degenerate = Some(rep.degenerate);
        }
        eig_state = Some(rep.eigenvector);
    }
    if lhv {
        let bound = lhv_bound(&op)?;
        record.lhv_bound = Some(bound.bound);
        record.lhv_exact = bound.exact.map(|r| r.to_string());
        let max_state = eig_state.as_ref().expect("computed above");
        record.violation_ratio = Some(violation_ratio(&op, max_state)?);
    }
    if json {
        emit(&record);
        return Ok(());
    }
    println!("operator {name} ({} terms, {} qubits)", op.len(), op.n());
    print!("{}", op.to_text());
    if let (Some(l), Some(g), Some(d)) = (record.lambda_max, record.gap, record.degenerate) {
        println!("lambda_max {l:.15}  gap {g:.15}  degenerate {d}");
    }
    if let Some(b) = record.lhv_bound {
        let exact = record.lhv_exact.as_deref().unwrap_or("-");
        println!("lhv bound {exact} = {b:.15}");
        if let Some(v) = record.violation_ratio {
            println!("violation ratio at the maximal eigenstate {v:.15}");
        }
    }
    Ok(())
}

fn cmd_table(which: &str, restarts: Option<usize>, seed: u64, json: bool) -> Result<(), Error> {
    let id = TableId::parse(which)?;
    let rows = reproduce_table::<f64>(id, restarts, seed)?;
    if json {
        for row in &rows {
            emit(row);
        }
        return Ok(());
    }
    println!("table {} (seed {seed})", id.label());
    println!(
        "  {:<12} {:<6} {:>10} {:>10} {:>9} {:>9}",
        "class", "xform", "computed", "reference", "delta", "restarts"
    );
    for r in &rows {
        println!(
            "  {:<12} {:<6} {:>10.6} {:>10.3} {:>+9.4} {:>9}",
            r.class, r.transform, r.value, r.reference, r.delta, r.restarts
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    state: &str,
    visibility: f64,
    settings: &str,
    events: u64,
    seed: u64,
    poisson: bool,
    out: &Path,
    json: bool,
) -> Result<(), Error> {
    let psi: State = canonical_state(state, 4)?;
    let rho = mix_with_white_noise(&psi, visibility)?;
    let settings = resolve_settings(settings, 1e-9)?;
    let mode = if poisson { Sampling::Poisson } else { Sampling::Multinomial };
    std::fs::create_dir_all(out)?;
    let mut names = Vec::new();
    for (i, s) in settings.iter().enumerate() {
        let h = simulate_counts_with_mode(&rho, s, events, seed + i as u64, mode)?;
        let file = format!("{}.json", axes_to_string(s));
        write_histogram(&out.join(&file), &h)?;
        names.push(file);
    }
    let manifest = out.join("manifest.txt");
    write_manifest(&manifest, &names)?;
    if json {
        #[derive(Serialize)]
        struct SimulateRecord<'a> {
            state: &'a str,
            visibility: f64,
            events: u64,
            seed: u64,
            manifest: String,
            files: Vec<String>,
        }
        emit(&SimulateRecord {
            state,
            visibility,
            events,
            seed,
            manifest: manifest.display().to_string(),
            files: names,
        });
    } else {
        println!(
            "wrote {} histograms ({events} events each) and {} for {state} at visibility {visibility}",
            names.len(),
            manifest.display()
        );
    }
    Ok(())
}

fn cmd_eval(
    op: Option<&str>,
    fidelity: Option<&str>,
    data: &Path,
    json: bool,
) -> Result<(), Error> {
    let histograms = read_manifest(data)?;
    let estimate: Estimate = match (op, fidelity) {
        (Some(name), None) => evaluate_operator(&op_by_name(name)?, &histograms)?,
        (None, Some(name)) => {
            let target: State = canonical_state(name, 4)?;
            fidelity_from_data(&target, &histograms)?
        }
        _ => {
            return Err(Error::Parse(
                "exactly one of --op or --fidelity is required".to_string(),
            ))
        }
    };
    let breakdown: Vec<SettingRecord> = histograms
        .iter()
        .map(|h| {
            let e: Estimate = estimate_correlation(h)?;
            Ok(SettingRecord {
                setting: h.setting_string(),
                events: h.total(),
                correlation: e.value,
                stderr: e.stderr,
            })
        })
        .collect::<Result<_, Error>>()?;
    if json {
        for row in &breakdown {
            emit(row);
        }
        emit(&estimate);
        return Ok(());
    }
    println!("  {:<8} {:>8} {:>13} {:>9}", "setting", "events", "correlation", "stderr");
    for r in &breakdown {
        println!(
            "  {:<8} {:>8} {:>+13.6} {:>9.6}",
            r.setting, r.events, r.correlation, r.stderr
        );
    }
    println!(
        "value {:+.6} +/- {:.6} ({} settings used)",
        estimate.value,
        estimate.stderr,
        estimate.settings_used.len()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.cmd {
        Cmd::State { name } => cmd_state(name, cli.json),
        Cmd::Tensor { name, threshold } => cmd_tensor(name, *threshold, cli.json),
        Cmd::Op { name, eig, lhv } => cmd_op(name, *eig, *lhv, cli.json),
        Cmd::Table { which, restarts, seed } => cmd_table(which, *restarts, *seed, cli.json),
        Cmd::Simulate { state, visibility, settings, events, seed, poisson, out } => cmd_simulate(
            state,
            *visibility,
            settings,
            *events,
            *seed,
            *poisson,
            out,
            cli.json,
        ),
        Cmd::Eval { op, fidelity, data } => {
            cmd_eval(op.as_deref(), fidelity.as_deref(), data, cli.json)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
