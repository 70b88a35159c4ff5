use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::ExperimentConfig;
use super::{CatalogArgs, ControlsArgs, EstimateArgs, FisherArgs, SimulateArgs};
use crate::controls::{commutator_table, default_terms, hamiltonian_terms, reachability};
use crate::dynamics::{read_records, record_seed, simulate_batch, write_records, write_records_csv, MeasurementRecord};
use crate::estimation::{
    bme, build_grid, linear_inversion, mle, mpbe, posterior, strong_measurement, synthesize_tallies, CandidateGrid,
    EstimationReport, GridKind, Method,
};
use crate::fisher::{crb_floor, fisher_matrix_with_grid};
use crate::qcore::{DensityMatrix, PauliCoefficients, StateJson};
use crate::sampling::{self, CATALOG_NAMES};
use crate::{Error, Result};

/// Seed of the candidate grid derived from an experiment seed.
pub fn grid_seed(seed: u64) -> u64 {
    record_seed(seed, 0x6772_6964)
}

fn de_seed(seed: u64) -> u64 {
    record_seed(seed, 0x6465)
}

fn li_seed(seed: u64) -> u64 {
    record_seed(seed, 0x6c69)
}

fn parse_method(name: &str) -> Result<Method> {
    match name.to_ascii_lowercase().as_str() {
        "bme" => Ok(Method::Bme),
        "mpbe" => Ok(Method::Mpbe),
        "mle" => Ok(Method::Mle),
        "li" => Ok(Method::Li),
        other => Err(Error::InvalidArgument(format!("unknown method {other:?}; expected bme, mpbe, mle or li"))),
    }
}

/// Candidate grid for the configured grid kind, drawn from `seed`.
pub fn build_candidate_grid(cfg: &ExperimentConfig, seed: u64) -> Result<CandidateGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = match cfg.estimation.grid_kind.as_str() {
        "hs-uniform-ball" | "hs" => GridKind::HsUniformBall,
        "product-with-fixed-ancilla" | "product" => GridKind::ProductWithFixedAncilla,
        other => return Err(Error::InvalidArgument(format!("unknown grid kind {other:?}"))),
    };
    let ancilla = cfg.ancilla_state()?;
    build_grid(kind, cfg.estimation.grid_size, &mut rng, ancilla.as_ref())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Runs the configured estimator on `records`. `grid` is used by the
/// Bayesian methods when given, otherwise one is drawn from the seed.
/// Linear inversion ignores the records and synthesizes tallies from
/// `truth`, which it therefore requires.
pub fn estimate_records(
    cfg: &ExperimentConfig,
    records: &[MeasurementRecord],
    truth: Option<&DensityMatrix>,
    grid: Option<&CandidateGrid>,
) -> Result<EstimationReport> {
    let method = parse_method(&cfg.estimation.method)?;
    let dim = match records.first() {
        Some(r) => r.dim(),
        None => cfg.control()?.dim(),
    };
    let start = Instant::now();
    let mut report = match method {
        Method::Bme | Method::Mpbe => {
            let owned;
            let grid = match grid {
                Some(g) => g,
                None => {
                    owned = build_candidate_grid(cfg, grid_seed(cfg.seed))?;
                    &owned
                }
            };
            let post = posterior(grid, records)?;
            if method == Method::Bme {
                bme(&post)?
            } else {
                mpbe(&post)?
            }
        }
        Method::Mle => mle(records, &cfg.de_config(de_seed(cfg.seed)), dim)?,
        Method::Li => {
            let truth = truth.ok_or_else(|| {
                Error::InvalidArgument("linear inversion synthesizes tallies from the truth; pass --truth".into())
            })?;
            let tallies = synthesize_tallies(truth, cfg.estimation.li_shots, &strong_measurement(), li_seed(cfg.seed))?;
            let li = linear_inversion(truth.dim(), &tallies)?;
            EstimationReport {
                method: Method::Li,
                estimate: PauliCoefficients::new(li.dim, li.coeffs)?,
                valid: li.valid,
                bayes_cov: None,
                log_likelihood: None,
                fidelity_vs_truth: None,
                trace_distance_vs_truth: None,
                records_used: tallies.iter().map(|t| t.total() as usize).sum(),
                no_data: false,
                known_zero: Vec::new(),
                wall_time_s: 0.0,
            }
        }
    };
    if let Some(t) = truth {
        report = report.with_truth(t)?;
    }
    if matches!(method, Method::Bme | Method::Mpbe) && cfg.estimation.grid_kind.starts_with("product") {
        if let Some(a) = cfg.ancilla_state()? {
            report = report.with_fixed_ancilla(&a)?;
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = args.experiment.resolve()?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.records.clone())
        .ok_or_else(|| Error::InvalidArgument("no output path: pass --out or set output.records".into()))?;
    if cfg.n_records == 0 {
        return Err(Error::InvalidArgument("simulate needs at least one record".into()));
    }
    let start = Instant::now();
    let truth = cfg.truth_state()?;
    let records = simulate_batch(&truth, &cfg.control()?, &cfg.measurement()?, cfg.n_records, cfg.seed)?;
    write_records(&out, &records)?;
    if let Some(csv_path) = &args.csv {
        write_records_csv(BufWriter::new(File::create(csv_path)?), &records)?;
    }
    let steps: usize = records.iter().map(|r| r.len()).sum();
    let mean = if steps == 0 {
        0.0
    } else {
        records.iter().flat_map(|r| &r.readouts).sum::<f64>() / steps as f64
    };
    let summary = json!({
        "records": records.len(),
        "n_steps": cfg.measurement()?.n_steps,
        "setting": cfg.control()?.label(),
        "mean_readout": mean,
        "wall_time_s": start.elapsed().as_secs_f64(),
        "output": out,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

pub fn estimate(args: &EstimateArgs) -> Result<()> {
    let mut cfg = args.experiment.resolve()?;
    if let Some(m) = &args.method {
        cfg.estimation.method = m.clone();
    }
    if let Some(n) = args.grid_size {
        cfg.estimation.grid_size = n;
    }
    if let Some(k) = &args.grid_kind {
        cfg.estimation.grid_kind = k.clone();
    }
    if let Some(r) = args.de_restarts {
        cfg.estimation.de_restarts = r;
    }
    let records = read_records(&args.records)?;
    // Records must match the configuration when one was given explicitly.
    if args.experiment.config.is_some() {
        let (control, config) = (cfg.control()?, cfg.measurement()?);
        if records.iter().any(|r| r.control != control || r.config != config) {
            return Err(Error::ConfigMismatch);
        }
    }
    let dim = match records.first() {
        Some(r) => r.dim(),
        None => cfg.control()?.dim(),
    };
    let truth = match cfg.truth {
        Some(_) => Some(cfg.truth_state_for(dim)?),
        None => None,
    };
    let report = estimate_records(&cfg, &records, truth.as_ref(), None)?;

    let report_path = args.report.clone().or_else(|| cfg.output.report.clone());
    let mut w = open_output(report_path.as_deref())?;
    writeln!(w, "{}", report.to_json()?)?;
    w.flush()?;
    if let Some(csv_path) = args.csv.clone().or_else(|| cfg.output.csv.clone()) {
        report.write_csv(BufWriter::new(File::create(csv_path)?), truth.as_ref())?;
    }
    Ok(())
}

pub fn fisher(args: &FisherArgs) -> Result<()> {
    let cfg = args.experiment.resolve()?;
    let f = fisher_matrix_with_grid(&cfg.control()?, &cfg.measurement()?, args.intervals)?;
    let floor = match crb_floor(&f, cfg.n_records.max(1)) {
        Ok(fl) => Some(fl),
        Err(Error::DegenerateInformation) => None,
        Err(e) => return Err(e),
    };
    let doc = json!({
        "setting": cfg.control()?.label(),
        "n_records": cfg.n_records.max(1),
        "labels": f.labels,
        "diagonal": f.diagonal(),
        "fisher": f.entries,
        "crb_floor": floor,
    });
    let mut w = open_output(args.json.as_deref())?;
    writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
    w.flush()?;
    if let Some(path) = &args.csv {
        let mut out = csv::Writer::from_path(path)?;
        out.write_record(["label", "fisher_diagonal", "crb_variance", "informed"])?;
        for (i, label) in f.labels.iter().enumerate() {
            let (var, informed) = match &floor {
                Some(fl) if fl.informed[i] => (fl.covariance[i][i].to_string(), "true"),
                _ => (String::new(), "false"),
            };
            out.write_record([label.clone(), f.entries[i][i].to_string(), var, informed.to_string()])?;
        }
        out.flush()?;
    }
    Ok(())
}

pub fn controls(args: &ControlsArgs) -> Result<()> {
    let cfg = args.experiment.resolve()?;
    let control = cfg.control()?;
    let terms = if args.all_terms {
        default_terms(control.dim())?
    } else {
        hamiltonian_terms(&control)
    };
    let table = commutator_table(control.dim(), &terms)?;
    let reach = reachability(&control, args.max_depth)?;
    if args.json {
        let doc = json!({
            "setting": control.label(),
            "table": table,
            "reachability": reach,
            "inaccessible": reach.inaccessible(),
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("setting {}", control.label());
        print!("{table}");
        let listed: Vec<String> = reach.accessible.iter().map(|l| format!("{l}({})", reach.depth[l])).collect();
        println!("accessible (depth): {}", listed.join(" "));
        println!("inaccessible: {}", reach.inaccessible().join(" "));
    }
    Ok(())
}

pub fn catalog(args: &CatalogArgs) -> Result<()> {
    let text = match (&args.name, args.index) {
        (None, _) => serde_json::to_string_pretty(&CATALOG_NAMES)?,
        (Some(name), None) => sampling::catalog(name)?.to_json()?,
        (Some(name), Some(i)) => {
            let cat = sampling::catalog(name)?;
            serde_json::to_string_pretty(&StateJson::from_state(cat.get(i)?)?)?
        }
    };
    let mut w = open_output(args.out.as_deref())?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}
