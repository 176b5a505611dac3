//! Command orchestration: discharge ingestion, the `identify`, `solve`,
//! `verify`, `simulate` and `moments` commands, and artifact export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::discretization::{Grid, PotentialField};
use crate::error::{Error, Result};
use crate::gcbi::{empirical_acf, empirical_stats, identify_decay, identify_from_moments, Calibration, DecayFit, StationaryStats};
use crate::simulate::{estimate_hamiltonian, write_replications_csv, HamiltonianEstimate};
use crate::solver::{extract_policy, solve, Policy, Solution, SweepRecord};
use crate::verify::{convergence_study, write_convergence_csv, ConvergenceRow, ManufacturedCase};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const DATA: i32 = 4;
    pub const CONVERGENCE: i32 = 5;
    pub const NUMERIC: i32 = 6;
    pub const IO: i32 = 7;
}

/// Exit code for a library error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_) => exit::CONFIG,
        Error::Data(_) => exit::DATA,
        Error::NonConvergence { .. } | Error::Divergence { .. } | Error::Calibration { .. } => exit::CONVERGENCE,
        Error::Domain(_) | Error::InfeasibleModel { .. } | Error::Numeric(_) | Error::Physical(_) => exit::NUMERIC,
        Error::Usage(_) => exit::USAGE,
        Error::Io(_) => exit::IO,
    }
}

/// Hourly discharge observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DischargeSeries {
    /// Observation times in hours from the first row.
    pub hours: Vec<f64>,
    /// Discharge (m³/s).
    pub values: Vec<f64>,
    /// `(line, gap in hours)` wherever consecutive rows are more than one step apart.
    pub gaps: Vec<(usize, f64)>,
}

fn parse_time(field: &str) -> Option<f64> {
    if let Ok(h) = field.parse::<f64>() {
        return h.is_finite().then_some(h);
    }
    const FORMATS: [&str; 4] = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"];
    let t = FORMATS.iter().find_map(|f| NaiveDateTime::parse_from_str(field, f).ok())?;
    Some(t.and_utc().timestamp() as f64 / 3600.0)
}

/// Reads `timestamp, discharge` rows. Timestamps are hours or
/// `YYYY-MM-DD HH:MM[:SS]`; a non-numeric first line is taken as a header.
/// All offending lines are reported together.
pub fn parse_discharge<R: Read>(input: R) -> Result<DischargeSeries> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut lines_of = Vec::new();
    let mut problems = Vec::new();
    let mut last_time: Option<f64> = None;
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [t, q] => parse_time(t).zip(q.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            None if times.is_empty() && problems.is_empty() && line_no == 1 => continue,
            None => problems.push(format!("line {line_no}: expected `timestamp, discharge`, got `{trimmed}`")),
            Some((t, q)) => {
                let ordered = last_time.is_none_or(|prev| t > prev);
                last_time = Some(t);
                if !ordered {
                    problems.push(format!("line {line_no}: timestamp not increasing"));
                    continue;
                }
                if !(q >= 0.0 && q.is_finite()) {
                    problems.push(format!("line {line_no}: negative or non-finite discharge {q}"));
                    continue;
                }
                times.push(t);
                values.push(q);
                lines_of.push(line_no);
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Data(problems.join("; ")));
    }
    if values.is_empty() {
        return Err(Error::Data("no discharge rows found".into()));
    }
    let t0 = times[0];
    let hours: Vec<f64> = times.iter().map(|t| t - t0).collect();
    let step = modal_step(&hours);
    let gaps = hours
        .windows(2)
        .zip(&lines_of[1..])
        .filter(|(w, _)| w[1] - w[0] > 1.5 * step)
        .map(|(w, &line)| (line, w[1] - w[0]))
        .collect();
    Ok(DischargeSeries { hours, values, gaps })
}

fn modal_step(hours: &[f64]) -> f64 {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for w in hours.windows(2) {
        *counts.entry((w[1] - w[0]).to_bits()).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by_key(|&(bits, c)| (c, std::cmp::Reverse(bits)))
        .map(|(bits, _)| f64::from_bits(bits))
        .unwrap_or(1.0)
}

pub fn ingest_discharge(path: &Path) -> Result<DischargeSeries> {
    let file = fs::File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    parse_discharge(file).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Writes through a temporary sibling file and renames it into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| Error::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance sidecar written next to a command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub version: String,
    pub status: String,
    pub config: RunConfig,
    pub config_sha256: String,
    pub wall_time_seconds: f64,
    pub iterations: Option<usize>,
    /// File name to content hash.
    pub outputs: BTreeMap<String, String>,
}

/// Collects the files of one command run.
struct OutputDir {
    dir: PathBuf,
    outputs: BTreeMap<String, String>,
}

impl OutputDir {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), outputs: BTreeMap::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        atomic_write(&self.dir.join(name), bytes)?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn finish(self, command: &str, status: &str, config: &RunConfig, start: Instant, iterations: Option<usize>) -> Result<()> {
        let config_json = config.to_json()?;
        let meta = Metadata {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            status: status.into(),
            config: config.clone(),
            config_sha256: sha256_hex(config_json.as_bytes()),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            iterations,
            outputs: self.outputs,
        };
        let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Numeric(e.to_string()))?;
        atomic_write(&self.dir.join("metadata.json"), text.as_bytes())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Data(e.to_string())
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

/// Parses a CSV with a header into string rows, checking the header.
pub fn read_table(bytes: &[u8], header: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut r = csv::Reader::from_reader(bytes);
    let found: Vec<String> = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
    if found != header {
        return Err(Error::Data(format!("unexpected header {found:?}, expected {header:?}")));
    }
    r.records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(csv_error))
        .collect()
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Data(format!("cannot parse {what} from `{s}`")))
}

pub const FIELD_HEADER: [&str; 5] = ["i", "j", "q_norm", "s_norm", "phi"];
pub const POLICY_HEADER: [&str; 7] = ["i", "j", "q_norm", "s_norm", "l_star", "steps", "eta_m3"];
pub const HISTORY_HEADER: [&str; 3] = ["sweep", "h", "update"];
pub const SUMMARY_HEADER: [&str; 2] = ["key", "value"];

/// Phase-`l` slice of the potential in long format (j outer, i inner).
pub fn field_csv(field: &PotentialField, l: usize) -> Result<Vec<u8>> {
    let g = field.grid;
    let rows = (0..=g.n_s).flat_map(|j| (0..=g.n_q).map(move |i| (i, j))).map(|(i, j)| {
        vec![
            i.to_string(),
            j.to_string(),
            (i as f64 / g.n_q as f64).to_string(),
            (j as f64 / g.n_s as f64).to_string(),
            field.get(i, j, l).to_string(),
        ]
    });
    csv_bytes(&FIELD_HEADER, rows)
}

/// Reads a field slice back into `(i, j, value)` triples.
pub fn read_field_csv(bytes: &[u8]) -> Result<Vec<(usize, usize, f64)>> {
    read_table(bytes, &FIELD_HEADER)?
        .iter()
        .map(|r| Ok((parse_num(&r[0], "i")?, parse_num(&r[1], "j")?, parse_num(&r[4], "phi")?)))
        .collect()
}

pub fn policy_csv(policy: &Policy) -> Result<Vec<u8>> {
    let g = policy.grid;
    let rows = (0..=g.n_s).flat_map(|j| (0..=g.n_q).map(move |i| (i, j))).map(|(i, j)| {
        vec![
            i.to_string(),
            j.to_string(),
            (i as f64 / g.n_q as f64).to_string(),
            (j as f64 / g.n_s as f64).to_string(),
            policy.l_star(i, j).to_string(),
            policy.replenish_steps(i, j).to_string(),
            policy.eta_star(i, j).to_string(),
        ]
    });
    csv_bytes(&POLICY_HEADER, rows)
}

/// Rebuilds a policy on `grid` from its CSV, rejecting size mismatches.
pub fn read_policy_csv(bytes: &[u8], grid: Grid) -> Result<Policy> {
    let rows = read_table(bytes, &POLICY_HEADER)?;
    if rows.len() != grid.layer_len() {
        return Err(Error::Usage(format!(
            "policy has {} vertices but the configured grid has {}",
            rows.len(),
            grid.layer_len()
        )));
    }
    let mut l_star = vec![0; grid.layer_len()];
    let mut steps = vec![0; grid.layer_len()];
    for r in &rows {
        let (i, j): (usize, usize) = (parse_num(&r[0], "i")?, parse_num(&r[1], "j")?);
        if i > grid.n_q || j > grid.n_s {
            return Err(Error::Usage(format!("policy vertex ({i}, {j}) lies outside the configured grid")));
        }
        let k = j * (grid.n_q + 1) + i;
        l_star[k] = parse_num(&r[4], "l_star")?;
        steps[k] = parse_num(&r[5], "steps")?;
    }
    Policy::from_parts(grid, l_star, steps)
}

pub fn history_csv(history: &[SweepRecord]) -> Result<Vec<u8>> {
    let rows = history
        .iter()
        .enumerate()
        .map(|(k, r)| vec![(k + 1).to_string(), r.h.to_string(), r.update.to_string()]);
    csv_bytes(&HISTORY_HEADER, rows)
}

fn summary_csv(pairs: &[(&str, String)]) -> Result<Vec<u8>> {
    csv_bytes(&SUMMARY_HEADER, pairs.iter().map(|(k, v)| vec![k.to_string(), v.clone()]))
}

/// Reads a `key,value` summary.
pub fn read_summary(bytes: &[u8]) -> Result<BTreeMap<String, String>> {
    Ok(read_table(bytes, &SUMMARY_HEADER)?.into_iter().map(|r| (r[0].clone(), r[1].clone())).collect())
}

/// gnuplot script drawing the potential and policy maps from the CSVs.
pub fn gnuplot_script(l_bar: usize) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset terminal pngcairo size 800,640\n");
    s.push_str("set xlabel 'Q / Qbar'\nset ylabel 'S / Sbar'\nset view map\n");
    for l in 1..=l_bar {
        let _ = writeln!(s, "set output 'phi_l{l}.png'\nset title 'Potential, phase {l}'");
        let _ = writeln!(s, "plot 'phi_l{l}.csv' using 3:4:5 with image notitle");
    }
    s.push_str("set output 'l_star.png'\nset title 'Observation level L*'\n");
    s.push_str("plot 'policy.csv' using 3:4:5 with image notitle\n");
    s.push_str("set output 'eta_star.png'\nset title 'Replenishment eta* (m3)'\n");
    s.push_str("plot 'policy.csv' using 3:4:7 with image notitle\n");
    s
}

/// Result of `identify`.
#[derive(Debug, Clone)]
pub struct IdentifyReport {
    pub observed: StationaryStats,
    pub calibration: Calibration,
    pub decay: Option<DecayFit>,
    pub acf: Vec<(f64, f64)>,
    /// Set when the calibration missed its tolerance.
    pub failure: Option<String>,
}

impl IdentifyReport {
    pub fn parameters_csv(&self) -> Result<Vec<u8>> {
        let c = &self.calibration;
        let mut pairs = vec![
            ("alpha", c.alpha.to_string()),
            ("a_prime", c.a_prime.to_string()),
            ("b_per_m3s", c.b.to_string()),
            ("a_shift_m3s", c.a_shift.to_string()),
            ("m1_over_rho", c.m1_over_rho().to_string()),
            ("error", c.error.to_string()),
            ("evaluations", c.evaluations.to_string()),
        ];
        if let Some(d) = self.decay {
            pairs.push(("decay_rate_per_hour", d.decay_rate.to_string()));
            pairs.push(("rho_per_hour", d.rho.to_string()));
        }
        summary_csv(&pairs)
    }

    /// Observed, modeled and relative error per statistic.
    pub fn table_csv(&self) -> Result<Vec<u8>> {
        let names = ["mean", "standard_deviation", "skewness", "kurtosis"];
        let (o, m) = (self.observed.as_array(), self.calibration.stats.as_array());
        let rows = (0..4).map(|k| {
            vec![names[k].to_string(), o[k].to_string(), m[k].to_string(), ((o[k] - m[k]) / o[k]).abs().to_string()]
        });
        csv_bytes(&["statistic", "observed", "modeled", "relative_error"], rows)
    }

    pub fn acf_csv(&self) -> Result<Vec<u8>> {
        let rows = self.acf.iter().map(|(lag, w)| vec![lag.to_string(), w.to_string()]);
        csv_bytes(&["lag_hours", "autocorrelation"], rows)
    }
}

/// Moment matching on the observed statistics plus the autocorrelation decay fit.
pub fn identify(config: &RunConfig, series: &DischargeSeries) -> Result<IdentifyReport> {
    let ic = &config.identify;
    if !series.gaps.is_empty() {
        log::warn!("{} gaps in the discharge record; lags are counted in rows", series.gaps.len());
    }
    let observed = empirical_stats(&series.values)?;
    let (calibration, failure) = match identify_from_moments(&observed, ic.q_min_m3s, &ic.options()) {
        Ok(c) => (c, None),
        Err(Error::Calibration { best }) => {
            let msg = Error::Calibration { best: best.clone() }.to_string();
            (*best, Some(msg))
        }
        Err(e) => return Err(e),
    };
    let acf_values = empirical_acf(&series.values, &ic.acf_lags_hours)?;
    let acf: Vec<(f64, f64)> = ic.acf_lags_hours.iter().map(|&l| l as f64).zip(acf_values).collect();
    let decay = identify_decay(&acf, calibration.m1_over_rho()).ok();
    Ok(IdentifyReport { observed, calibration, decay, acf, failure })
}

/// `identify` command: writes the parameter, table and autocorrelation CSVs.
pub fn run_identify(config: &RunConfig, data: &Path, out: &Path) -> Result<IdentifyReport> {
    let start = Instant::now();
    let series = ingest_discharge(data)?;
    let report = identify(config, &series)?;
    let mut dir = OutputDir::create(out)?;
    dir.write("parameters.csv", &report.parameters_csv()?)?;
    dir.write("moments.csv", &report.table_csv()?)?;
    dir.write("acf.csv", &report.acf_csv()?)?;
    let status = if report.failure.is_some() { "calibration_failed" } else { "ok" };
    dir.finish("identify", status, config, start, Some(report.calibration.evaluations))?;
    if report.failure.is_some() {
        return Err(Error::Calibration { best: Box::new(report.calibration) });
    }
    Ok(report)
}

/// `solve` command: solution, policy maps, convergence log and plot script.
pub fn run_solve(config: &RunConfig, out: &Path) -> Result<(Solution, Policy)> {
    let start = Instant::now();
    let problem = config.problem()?;
    let grid = config.grid.grid()?;
    let scheme = problem.scheme(grid)?;
    let mut dir = OutputDir::create(out)?;
    let solution = match solve(&scheme, &config.solver.options()) {
        Ok(s) => s,
        Err(e) => {
            let (iterations, h) = match &e {
                Error::NonConvergence { iterations, h, .. } => (*iterations, h.to_string()),
                Error::Divergence { iterations, .. } => (*iterations, "nan".into()),
                _ => (0, "nan".into()),
            };
            dir.write(
                "summary.csv",
                &summary_csv(&[("status", "failed".into()), ("h", h), ("iterations", iterations.to_string())])?,
            )?;
            dir.finish("solve", "failed", config, start, Some(iterations))?;
            return Err(e);
        }
    };
    let policy = extract_policy(&solution, &scheme)?;
    dir.write(
        "summary.csv",
        &summary_csv(&[
            ("status", "converged".into()),
            ("h", solution.h.to_string()),
            ("iterations", solution.iterations.to_string()),
            ("final_update", solution.final_error.to_string()),
            ("max_residual", solution.max_residual.to_string()),
            ("clamp_count", solution.clamp_count.to_string()),
            ("n_q", grid.n_q.to_string()),
            ("n_s", grid.n_s.to_string()),
            ("q_bar_m3s", grid.q_bar.to_string()),
            ("s_bar_m3", grid.s_bar.to_string()),
            ("l_bar", grid.l_bar.to_string()),
        ])?,
    )?;
    dir.write("convergence.csv", &history_csv(&solution.history)?)?;
    for l in 1..=grid.l_bar {
        dir.write(&format!("phi_l{l}.csv"), &field_csv(&solution.field, l)?)?;
    }
    dir.write("policy.csv", &policy_csv(&policy)?)?;
    dir.write("plots.gp", gnuplot_script(grid.l_bar).as_bytes())?;
    dir.finish("solve", "converged", config, start, Some(solution.iterations))?;
    Ok((solution, policy))
}

/// `verify` command: one convergence table per `(β, Q̄)` pair.
pub fn run_verify(config: &RunConfig, out: &Path) -> Result<Vec<(f64, f64, Vec<ConvergenceRow>)>> {
    let start = Instant::now();
    let v = &config.verify;
    let model = config.streamflow.model()?;
    let physics = config.sediment.physics()?;
    let options = crate::solver::SolverOptions { relaxation: v.relaxation, ..config.solver.options() };
    let mut dir = OutputDir::create(out)?;
    let mut tables = Vec::new();
    let mut failed = false;
    for &beta in &v.betas {
        for &q_bar in &v.q_bars_m3s {
            let case = ManufacturedCase::new(beta, v.amplitude, q_bar, v.s_bar_m3)?;
            let rows = convergence_study(&case, &model, &physics, &v.grid_sizes, &options, v.upwind_top)?;
            failed |= rows.iter().any(|r| r.failure.is_some());
            let mut bytes = Vec::new();
            write_convergence_csv(&rows, &mut bytes)?;
            dir.write(&format!("convergence_beta{beta}_qbar{q_bar}.csv"), &bytes)?;
            tables.push((beta, q_bar, rows));
        }
    }
    let iterations = tables.iter().flat_map(|t| t.2.iter().map(|r| r.iterations)).sum();
    dir.finish("verify", if failed { "partial" } else { "ok" }, config, start, Some(iterations))?;
    if failed {
        return Err(Error::NonConvergence { iterations, last_error: f64::NAN, h: f64::NAN });
    }
    Ok(tables)
}

/// Monte Carlo report with the comparison against the solver.
#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub estimate: HamiltonianEstimate,
    pub solver_h: Option<f64>,
}

impl SimulateReport {
    pub fn relative_difference(&self) -> Option<f64> {
        self.solver_h.map(|h| (self.estimate.mean - h).abs() / h.abs())
    }

    pub fn comparison_line(&self) -> String {
        let e = &self.estimate;
        match (self.solver_h, self.relative_difference()) {
            (Some(h), Some(r)) => format!(
                "MC average cost {:.6} ± {:.6} (SE, {} replications) vs solver h {h:.6}: relative difference {:.2}%",
                e.mean,
                e.std_error,
                e.replications.len(),
                100.0 * r
            ),
            _ => format!("MC average cost {:.6} ± {:.6} (SE, {} replications)", e.mean, e.std_error, e.replications.len()),
        }
    }
}

/// `simulate` command: estimates the average cost of the policy in `policy_dir`.
pub fn run_simulate(config: &RunConfig, policy_dir: &Path, out: &Path) -> Result<SimulateReport> {
    let start = Instant::now();
    let problem = config.problem()?;
    let grid = config.grid.grid()?;
    let read = |name: &str| {
        fs::read(policy_dir.join(name)).map_err(|e| Error::Data(format!("cannot read {name}: {e}")))
    };
    let summary = read_summary(&read("summary.csv")?)?;
    for (key, expected) in [
        ("n_q", grid.n_q.to_string()),
        ("n_s", grid.n_s.to_string()),
        ("q_bar_m3s", grid.q_bar.to_string()),
        ("s_bar_m3", grid.s_bar.to_string()),
        ("l_bar", grid.l_bar.to_string()),
    ] {
        match summary.get(key) {
            Some(v) if *v == expected => {}
            other => {
                return Err(Error::Usage(format!(
                    "policy grid {key} = {} does not match the configured {expected}",
                    other.map_or("missing", String::as_str)
                )))
            }
        }
    }
    let solver_h = summary.get("h").and_then(|v| v.parse().ok());
    let policy = read_policy_csv(&read("policy.csv")?, grid)?;
    let path = config.simulation.path()?;
    let estimate = estimate_hamiltonian(&problem, &policy, &path, config.simulation.replications)?;
    let report = SimulateReport { estimate, solver_h };

    let mut dir = OutputDir::create(out)?;
    let mut bytes = Vec::new();
    write_replications_csv(&report.estimate.replications, &mut bytes)?;
    dir.write("replications.csv", &bytes)?;
    let mut pairs = vec![
        ("mean_average_cost", report.estimate.mean.to_string()),
        ("standard_error", report.estimate.std_error.to_string()),
        ("replications", report.estimate.replications.len().to_string()),
    ];
    if let (Some(h), Some(r)) = (report.solver_h, report.relative_difference()) {
        pairs.push(("solver_h", h.to_string()));
        pairs.push(("relative_difference", r.to_string()));
    }
    dir.write("report.csv", &summary_csv(&pairs)?)?;
    dir.finish("simulate", "ok", config, start, None)?;
    Ok(report)
}

/// `moments` command: stationary statistics of the configured model as text.
pub fn run_moments(config: &RunConfig) -> Result<String> {
    let model = config.streamflow.model()?;
    let s = model.stationary_stats()?;
    let mut out = String::new();
    let _ = writeln!(out, "mean,{}", s.mean);
    let _ = writeln!(out, "standard_deviation,{}", s.std_dev);
    let _ = writeln!(out, "skewness,{}", s.skewness);
    let _ = writeln!(out, "kurtosis,{}", s.kurtosis);
    let _ = writeln!(out, "m1_over_rho,{}", model.m1() / model.rho);
    let _ = writeln!(out, "decay_rate_per_hour,{}", model.decay_rate());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numeric_and_dated_rows() {
        let s = parse_discharge("time,q\n0,1.5\n1,2\n2,3\n3,4\n".as_bytes()).unwrap();
        assert_eq!(s.values, vec![1.5, 2.0, 3.0, 4.0]);
        let d = parse_discharge("2016-04-01 00:00,1\n2016-04-01 01:00,2\n2016-04-01 03:00,2\n".as_bytes()).unwrap();
        assert_eq!(d.hours, vec![0.0, 1.0, 3.0]);
        assert_eq!(d.gaps, vec![(3, 2.0)]);
    }

    #[test]
    fn reports_offending_lines() {
        let err = parse_discharge("0,1\n1,-1\n2,x\n1,3\n".as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("line 3") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::Config(String::new())),
            exit_code(&Error::Data(String::new())),
            exit_code(&Error::Divergence { iterations: 1, reason: String::new() }),
            exit_code(&Error::Numeric(String::new())),
        ];
        for (a, x) in codes.iter().enumerate() {
            assert_ne!(*x, exit::SUCCESS);
            for y in &codes[a + 1..] {
                assert_ne!(x, y);
            }
        }
    }
}
