use std::fs::File;
use std::io::{self, BufWriter, Write};

use log::info;

use super::commands::{build_candidate_grid, estimate_records, grid_seed};
use super::config::ExperimentConfig;
use super::BenchArgs;
use crate::dynamics::{record_seed, simulate_batch};
use crate::qcore::{basis_label, fidelity, partial_trace_first, to_pauli};
use crate::{Error, Result};

const PARAMS: [&str; 8] = ["omega", "coupling", "tau", "total-time", "dt", "n-records", "setting", "truth"];

/// Root-mean-square of a list of errors; 0 for an empty list.
pub fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

/// Sweep points (Cartesian product of the `--sweep` lists) and repetitions.
#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub names: Vec<String>,
    pub points: Vec<Vec<String>>,
    pub repetitions: usize,
    pub methods: Vec<String>,
}

impl BenchPlan {
    pub fn parse(sweeps: &[String], repetitions: usize, methods: &str) -> Result<Self> {
        let mut names = Vec::new();
        let mut points: Vec<Vec<String>> = vec![Vec::new()];
        for s in sweeps {
            let (name, values) = s
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("sweep {s:?} is not NAME=v1,v2,…")))?;
            let name = name.trim().to_string();
            if !PARAMS.contains(&name.as_str()) {
                return Err(Error::InvalidArgument(format!("unknown sweep parameter {name:?}")));
            }
            let values: Vec<String> = split_values(values);
            if values.is_empty() {
                return Err(Error::InvalidArgument(format!("sweep {name} has no values")));
            }
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
            names.push(name);
        }
        if repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        let methods: Vec<String> = methods.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect();
        if methods.is_empty() {
            return Err(Error::InvalidArgument("no estimation method given".into()));
        }
        Ok(Self {
            names,
            points,
            repetitions,
            methods,
        })
    }

    /// The experiment for one sweep point.
    pub fn configure(&self, base: &ExperimentConfig, point: &[String]) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        for (name, value) in self.names.iter().zip(point) {
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("{name}: {value:?} is not a number")))
            };
            match name.as_str() {
                "omega" => cfg.omega_2pi_per_t = num()?,
                "coupling" => cfg.coupling_2pi_per_t = num()?,
                "tau" => cfg.tau = num()?,
                "total-time" => cfg.total_time = num()?,
                "dt" => cfg.dt = num()?,
                "n-records" => {
                    cfg.n_records = value
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("n-records: {value:?} is not an integer")))?
                }
                "setting" => cfg.setting = value.clone(),
                "truth" => cfg.truth = Some(value.clone()),
                _ => unreachable!("validated in parse"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rough operation count of the whole sweep, used for the budget check.
    pub fn estimated_work(&self, base: &ExperimentConfig) -> Result<f64> {
        let mut total = 0.0;
        for point in &self.points {
            let cfg = self.configure(base, point)?;
            let d = cfg.control()?.dim() as f64;
            let n = cfg.n_records as f64;
            let steps = cfg.measurement()?.n_steps as f64;
            let simulate = n * steps * 8.0 * d.powi(3);
            let mut per_rep = 2.0 * simulate;
            for m in &self.methods {
                per_rep += match m.as_str() {
                    "bme" | "mpbe" => 2.0 * cfg.estimation.grid_size as f64 * n * d * d,
                    "mle" => {
                        let de = cfg.de_config(0);
                        2.0 * n * d * d * (de.population * de.generations * de.restarts) as f64
                    }
                    _ => (d * d - 1.0) * cfg.estimation.li_shots as f64 * 100.0 * 8.0 * d.powi(3),
                };
            }
            total += per_rep * self.repetitions as f64;
        }
        Ok(total)
    }
}

/// Splits a value list. Lists containing `;` split only there (for values
/// with commas, such as `bloch:x,y,z`); otherwise commas outside
/// parentheses separate values, so `(0.3,1.2),XYZ` gives two settings.
fn split_values(s: &str) -> Vec<String> {
    if s.contains(';') {
        return s.split(';').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    }
    let mut out = Vec::new();
    let mut level = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => level += 1,
            ')' => level -= 1,
            _ => {}
        }
        if ch == ',' && level == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out.into_iter().map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect()
}

#[derive(Default)]
struct PointStats {
    fidelity: Vec<f64>,
    trace_distance: Vec<f64>,
    bayes_error: Vec<f64>,
    errors: Vec<Vec<f64>>,
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let mut base = args.experiment.resolve()?;
    if let Some(n) = args.grid_size {
        base.estimation.grid_size = n;
    }
    if let Some(k) = &args.grid_kind {
        base.estimation.grid_kind = k.clone();
    }
    if let Some(r) = args.de_restarts {
        base.estimation.de_restarts = r;
    }
    base.estimation.resample_grid |= args.resample_grid;
    let repetitions = if args.full_scale {
        args.repetitions.max(100)
    } else {
        args.repetitions
    };
    let plan = BenchPlan::parse(&args.sweeps, repetitions, &args.methods)?;
    let work = plan.estimated_work(&base)?;
    if work > args.budget {
        return Err(Error::InvalidArgument(format!(
            "sweep needs about {work:.2e} operations ({} points × {} repetitions × {} methods), over the budget of {:.2e}; \
             raise --budget or shrink the sweep",
            plan.points.len(),
            plan.repetitions,
            plan.methods.len(),
            args.budget
        )));
    }

    let dims: Vec<usize> = plan
        .points
        .iter()
        .map(|p| plan.configure(&base, p).and_then(|c| Ok(c.control()?.dim())))
        .collect::<Result<_>>()?;
    let dim = dims[0];
    if dims.iter().any(|&d| d != dim) {
        return Err(Error::InvalidArgument("a sweep cannot mix one- and two-qubit settings".into()));
    }
    let labels: Vec<String> = (1..dim * dim).map(|k| basis_label(dim, k)).collect();

    let out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut rows = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["point".into()];
    header.extend(plan.names.iter().cloned());
    for h in ["repetition", "seed", "method", "records", "fidelity", "trace_distance", "reduced_fidelity", "sqrt_tr_cov", "wall_time_s"] {
        header.push(h.into());
    }
    header.extend(labels.iter().map(|l| format!("err_{l}")));
    rows.write_record(&header)?;

    let mut summary: Vec<(usize, String, PointStats)> = Vec::new();
    for (pi, point) in plan.points.iter().enumerate() {
        let cfg = plan.configure(&base, point)?;
        let control = cfg.control()?;
        let meas = cfg.measurement()?;
        let point_seed = record_seed(cfg.seed, pi as u64);
        let needs_grid = plan.methods.iter().any(|m| m == "bme" || m == "mpbe");
        let fixed_grid = if needs_grid && !cfg.estimation.resample_grid {
            Some(build_candidate_grid(&cfg, grid_seed(point_seed))?)
        } else {
            None
        };
        let mut stats: Vec<PointStats> = plan.methods.iter().map(|_| PointStats::default()).collect();
        for rep in 0..plan.repetitions {
            let rep_seed = record_seed(point_seed, rep as u64);
            let rep_cfg = ExperimentConfig {
                seed: rep_seed,
                ..cfg.clone()
            };
            let truth = rep_cfg.truth_state()?;
            let truth_c = to_pauli(&truth)?;
            let records = simulate_batch(&truth, &control, &meas, cfg.n_records, rep_seed)?;
            for (mi, method) in plan.methods.iter().enumerate() {
                let mut mcfg = rep_cfg.clone();
                mcfg.estimation.method = method.clone();
                let report = estimate_records(&mcfg, &records, Some(&truth), fixed_grid.as_ref())?;
                let reduced = match (dim, report.state()) {
                    (4, Some(est)) => Some(fidelity(&partial_trace_first(&est)?, &partial_trace_first(&truth)?)?),
                    _ => None,
                };
                let errs: Vec<f64> = (1..dim * dim).map(|k| report.estimate.coeffs[k] - truth_c.coeffs[k]).collect();
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                let mut row: Vec<String> = vec![pi.to_string()];
                row.extend(point.iter().cloned());
                row.extend([
                    rep.to_string(),
                    rep_seed.to_string(),
                    method.clone(),
                    report.records_used.to_string(),
                    opt(report.fidelity_vs_truth),
                    opt(report.trace_distance_vs_truth),
                    opt(reduced),
                    opt(report.bayes_error()),
                    report.wall_time_s.to_string(),
                ]);
                row.extend(errs.iter().map(|e| e.to_string()));
                rows.write_record(&row)?;

                let s = &mut stats[mi];
                s.fidelity.extend(report.fidelity_vs_truth);
                s.trace_distance.extend(report.trace_distance_vs_truth);
                s.bayes_error.extend(report.bayes_error());
                s.errors.push(errs);
            }
            info!("point {pi} repetition {rep} done");
        }
        rows.flush()?;
        for (m, s) in plan.methods.iter().zip(stats) {
            summary.push((pi, m.clone(), s));
        }
    }
    rows.flush()?;

    if let Some(path) = &args.summary {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = vec!["point".into()];
        header.extend(plan.names.iter().cloned());
        for h in ["method", "repetitions", "mean_fidelity", "std_fidelity", "mean_trace_distance", "mean_sqrt_tr_cov"] {
            header.push(h.into());
        }
        header.extend(labels.iter().map(|l| format!("rmse_{l}")));
        w.write_record(&header)?;
        for (pi, method, s) in &summary {
            let (mf, sf) = mean_std(&s.fidelity);
            let mut row: Vec<String> = vec![pi.to_string()];
            row.extend(plan.points[*pi].iter().cloned());
            row.extend([
                method.clone(),
                s.errors.len().to_string(),
                mf.map(|x| x.to_string()).unwrap_or_default(),
                sf.map(|x| x.to_string()).unwrap_or_default(),
                mean_std(&s.trace_distance).0.map(|x| x.to_string()).unwrap_or_default(),
                mean_std(&s.bayes_error).0.map(|x| x.to_string()).unwrap_or_default(),
            ]);
            for k in 0..labels.len() {
                let col: Vec<f64> = s.errors.iter().map(|e| e[k]).collect();
                row.push(rmse(&col).to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn mean_std(v: &[f64]) -> (Option<f64>, Option<f64>) {
    if v.is_empty() {
        return (None, None);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (Some(mean), Some(var.sqrt()))
}
