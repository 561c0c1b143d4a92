//! Grid evaluation, CSV emission and run summaries.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use tiltdiode::ansatz::{solve_ansatz_big, AnsatzOptions, AnsatzParams};
use tiltdiode::lindblad::{ness, observables, Rectification};
use tiltdiode::mesoleads::{reference_current, solve_extended, ExtendedModel};
use tiltdiode::model::sectors::{cp_sectors, number_sectors};
use tiltdiode::model::spectrum::{find_avoided_crossings, sector_eigenvalues, sweep_spectrum, AvoidedCrossing};
use tiltdiode::model::SectorBasis;
use tiltdiode::noninteracting::{solve_chain, solve_with_digits, QuadraticChain};
use tiltdiode::{ModelParams, Scalar};

use crate::analysis::{find_resonances, fit_exponential, normalize_current, ExpFit, Resonance};
use crate::config::{FitAxis, Point, Solver, SweepConfig};
use crate::error::{CliError, Result};

/// Largest oracle deviation accepted by `--check-oracle`.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
const DEFAULT_ANSATZ_DIGITS: usize = 50;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub digits: Option<usize>,
    pub threads: Option<usize>,
    pub check_oracle: bool,
}

/// Floats at 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A fully resolved sweep: solver, configuration and column layout.
pub struct Sweep {
    pub solver: Solver,
    pub config: SweepConfig,
    pub options: RunOptions,
    pub columns: Vec<String>,
    max_sites: usize,
    sectors: HashMap<usize, SectorBasis>,
    reference: Mutex<HashMap<usize, f64>>,
}

impl Sweep {
    pub fn new(config: SweepConfig, forced: Option<Solver>, options: RunOptions) -> Result<Self> {
        let solver = config.resolve_solver(forced)?;
        config.validate(solver)?;
        let max_sites = *config.n_sites.iter().max().expect("validated");
        let mut sectors = HashMap::new();
        if solver == Solver::Spectrum {
            let label = config.sector.clone().unwrap_or_else(|| "halfe".into());
            for &n in &config.n_sites {
                let p = base_params(&config, n, 0.0, 0.0);
                let mut all = number_sectors(n).map_err(|e| CliError::Config(e.to_string()))?;
                // CP sectors need the CP chemical potential; number sectors do not.
                match cp_sectors(&p) {
                    Ok(cp) => all.extend(cp),
                    Err(e) if !label.starts_with('n') => return Err(CliError::Config(e.to_string())),
                    Err(_) => {}
                }
                let found = all
                    .into_iter()
                    .find(|s| s.label.to_string() == label)
                    .ok_or_else(|| CliError::Config(format!("N={n} has no sector '{label}'")))?;
                sectors.insert(n, found);
            }
        }
        let mut sweep = Self {
            solver,
            config,
            options,
            columns: Vec::new(),
            max_sites,
            sectors,
            reference: Mutex::new(HashMap::new()),
        };
        sweep.columns = sweep.layout();
        Ok(sweep)
    }

    fn digits(&self) -> Option<usize> {
        self.options.digits.or(self.config.digits)
    }

    fn layout(&self) -> Vec<String> {
        let mut c: Vec<String> = ["n_sites", "interaction", "tilt", "rescaled_tilt"].map(String::from).to_vec();
        let mut push = |names: &[&str]| c.extend(names.iter().map(|s| s.to_string()));
        let rect = self.config.rectification;
        match self.solver {
            Solver::Lindblad | Solver::Noninteracting | Solver::Mesoleads => {
                if rect {
                    push(&["current_forward", "current_reverse", "rectification", "overflow"]);
                } else {
                    push(&["current"]);
                }
                push(&["current_normalized"]);
                if self.solver != Solver::Noninteracting {
                    push(&["impurity"]);
                }
                if self.solver == Solver::Lindblad {
                    push(&["osee"]);
                    if self.options.check_oracle {
                        push(&["oracle_deviation"]);
                    }
                }
            }
            Solver::Ansatz => push(&["current_reverse", "current_reverse_decimal"]),
            Solver::Spectrum => {
                push(&["sector"]);
                let dim = self.sectors.values().map(SectorBasis::dim).max().unwrap_or(0);
                c.extend((0..dim).map(|k| format!("energy_{k}")));
            }
        }
        if self.config.populations && self.solver != Solver::Spectrum {
            c.extend((1..=self.max_sites).map(|j| format!("n_{j}")));
        }
        c.push("error".into());
        c
    }

    fn key(p: &Point) -> [String; 3] {
        [p.n_sites.to_string(), fmt_f64(p.interaction), fmt_f64(p.tilt)]
    }

    /// One CSV row; solver failures go to the `error` column.
    pub fn evaluate(&self, point: &Point) -> Vec<String> {
        let [n, d, e] = Self::key(point);
        let mut row = vec![n, d, e, fmt_f64(point.rescaled_tilt())];
        let width = self.columns.len();
        match self.values(point) {
            Ok(values) => {
                row.extend(values);
                row.resize(width - 1, String::new());
                row.push(String::new());
            }
            Err(err) => {
                row.resize(width - 1, String::new());
                row.push(err.to_string().replace(['\n', '\r'], " "));
            }
        }
        row
    }

    fn values(&self, point: &Point) -> Result<Vec<String>> {
        let p = base_params(&self.config, point.n_sites, point.interaction, point.tilt);
        let mut out = Vec::new();
        let mut pops: Option<Vec<f64>> = None;
        let (gamma, f) = (self.config.coupling, self.config.driving);
        match self.solver {
            Solver::Lindblad => {
                let method = self.config.method;
                let rho = ness(&p, method)?;
                let obs = observables(&rho, &p)?;
                let main = self.current_columns(&mut out, obs.current, || {
                    let rev = p.with_driving(-f);
                    Ok(observables(&ness(&rev, method)?, &rev)?.current)
                })?;
                out.push(normalize_current(main, gamma, f).map(fmt_f64).unwrap_or_default());
                out.push(fmt_f64(obs.impurity));
                out.push(fmt_f64(obs.osee));
                if self.options.check_oracle {
                    out.push(if p.interaction == 0.0 { fmt_f64(oracle_deviation(&p, &obs.populations, obs.current)?) } else { String::new() });
                }
                pops = Some(obs.populations);
            }
            Solver::Noninteracting => {
                let digits = self.digits().unwrap_or(16);
                let chain = QuadraticChain::from_params(&p)?;
                let c = solve_with_digits(&chain, digits)?;
                let main = self.current_columns(&mut out, c.current(), || {
                    Ok(solve_with_digits(&chain.with_driving(-f), digits)?.current())
                })?;
                out.push(normalize_current(main, gamma, f).map(fmt_f64).unwrap_or_default());
                pops = Some(c.populations());
            }
            Solver::Mesoleads => {
                let leads = self.config.leads.as_ref().expect("validated").spec();
                let model = ExtendedModel::new(p, leads)?;
                let method = self.config.method;
                let obs = solve_extended(&model, method)?;
                let main = self.current_columns(&mut out, obs.current, || {
                    Ok(solve_extended(&model.with_leads(model.leads.reversed_bias()), method)?.current)
                })?;
                out.push(fmt_f64(main / self.reference_current(&model)?));
                out.push(fmt_f64(obs.impurity));
                pops = Some(obs.populations);
            }
            Solver::Ansatz => {
                let digits = self.digits().unwrap_or(DEFAULT_ANSATZ_DIGITS);
                let options = AnsatzOptions { digits, ..AnsatzOptions::default() };
                let sol = solve_ansatz_big(&AnsatzParams::from_model(&p), &options)?;
                out.push(fmt_f64(Scalar::to_f64(&sol.current)));
                out.push(sol.current.to_string());
                pops = Some(sol.populations.iter().map(Scalar::to_f64).collect());
            }
            Solver::Spectrum => {
                let sector = &self.sectors[&point.n_sites];
                out.push(sector.label.to_string());
                let template = base_params(&self.config, point.n_sites, point.interaction, 0.0);
                out.extend(sector_eigenvalues(&template, sector, point.tilt)?.into_iter().map(fmt_f64));
            }
        }
        if self.config.populations {
            if let Some(pops) = pops {
                let skip = self.columns.iter().position(|c| c == "n_1").expect("population columns") - 4;
                out.resize(skip, String::new());
                out.extend(pops.into_iter().map(fmt_f64));
            }
        }
        Ok(out)
    }

    /// Pushes the current columns and returns the current used for normalisation.
    fn current_columns(&self, out: &mut Vec<String>, current: f64, reverse: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if self.config.rectification {
            let f = self.config.driving;
            // The configured driving sign decides which run is forward.
            let (jf, jr) = if f > 0.0 { (current, reverse()?) } else { (reverse()?, current) };
            let r = Rectification::from_currents(jf, jr);
            out.extend([fmt_f64(jf), fmt_f64(jr), fmt_f64(r.ratio), r.overflow.to_string()]);
            Ok(jf)
        } else {
            out.push(fmt_f64(current));
            Ok(current)
        }
    }

    fn reference_current(&self, model: &ExtendedModel) -> Result<f64> {
        let n = model.system.n_sites;
        if let Some(&j) = self.reference.lock().expect("poisoned").get(&n) {
            return Ok(j);
        }
        let j = reference_current(model, self.config.method)?.abs();
        self.reference.lock().expect("poisoned").insert(n, j);
        Ok(j)
    }

    /// Evaluates every missing grid point and appends it to `out`, in grid order.
    pub fn run(&self, out: &Path) -> Result<RunReport> {
        let start = Instant::now();
        let points = self.config.points()?;
        let done = existing_keys(out, &self.columns)?;
        let todo: Vec<Point> = points.iter().copied().filter(|p| !done.contains(&Self::key(p))).collect();
        info!("{} of {} points to evaluate", todo.len(), points.len());

        let file = OpenOptions::new().create(true).append(true).open(out)?;
        let fresh = file.metadata()?.len() == 0;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            writer.write_record(&self.columns)?;
            writer.flush()?;
        }

        let threads = self.options.threads.unwrap_or_else(rayon::current_num_threads).max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        let chunk = 4 * threads;
        let mut slowest = 0.0f64;
        for batch in todo.chunks(chunk) {
            let rows: Vec<(Vec<String>, f64)> = pool.install(|| {
                batch
                    .par_iter()
                    .map(|p| {
                        let t = Instant::now();
                        let row = self.evaluate(p);
                        (row, t.elapsed().as_secs_f64())
                    })
                    .collect()
            });
            for (row, secs) in rows {
                slowest = slowest.max(secs);
                if !row.last().map_or(true, String::is_empty) {
                    warn!("point {}: {}", row[..3].join(" "), row.last().unwrap());
                }
                writer.write_record(&row)?;
            }
            writer.flush()?;
        }
        Ok(RunReport { evaluated: todo.len(), total: points.len(), wall_seconds: start.elapsed().as_secs_f64(), slowest_point_seconds: slowest })
    }

    /// Reads `out` back and derives resonances, the largest `R` and fits.
    pub fn summarize(&self, out: &Path, report: &RunReport) -> Result<Summary> {
        let table = Table::read(out)?;
        let failed = table.rows.iter().filter(|r| !r.last().map_or(true, String::is_empty)).count();
        let current_col = if table.has("current_forward") { "current_forward" } else if table.has("current") { "current" } else { "current_reverse" };

        let mut groups: BTreeMap<(usize, String), Vec<usize>> = BTreeMap::new();
        for (i, row) in table.rows.iter().enumerate() {
            groups.entry((row[0].parse().unwrap_or(0), row[1].clone())).or_default().push(i);
        }
        let mut series = Vec::new();
        for ((n, d), idx) in &groups {
            let mut pts: Vec<(f64, f64, usize)> = idx
                .iter()
                .filter_map(|&i| Some((table.num(i, "tilt")?, table.num(i, current_col).unwrap_or(f64::NAN), i)))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let resonances = if self.solver == Solver::Spectrum || y.iter().any(|v| v.is_nan()) {
                Vec::new()
            } else {
                find_resonances(&x, &y, self.config.resonances.prominence)
            };
            let max_r = if table.has("rectification") {
                pts.iter()
                    .filter_map(|p| Some((p.0, table.num(p.2, "rectification")?, table.get(p.2, "overflow") == Some("true"))))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(tilt, ratio, overflow)| MaxRectification { tilt, ratio, overflow })
            } else {
                None
            };
            let crossings = if self.solver == Solver::Spectrum && x.len() >= 3 {
                let template = base_params(&self.config, *n, d.parse().unwrap_or(0.0), 0.0);
                find_avoided_crossings(&sweep_spectrum(&template, &self.sectors[n], &x)?)?
            } else {
                Vec::new()
            };
            series.push(SeriesSummary { n_sites: *n, interaction: d.parse().unwrap_or(f64::NAN), points: x.len(), resonances, max_rectification: max_r, avoided_crossings: crossings.into_iter().map(Crossing::from).collect() });
        }

        let fits = match self.config.fit {
            Some(fit) => self.fits(&table, fit.x, current_col),
            None => Vec::new(),
        };
        let oracle_failures = if table.has("oracle_deviation") {
            (0..table.rows.len()).filter(|&i| table.num(i, "oracle_deviation").is_some_and(|v| v > ORACLE_TOLERANCE)).count()
        } else {
            0
        };
        Ok(Summary {
            solver: self.solver.name().into(),
            output: out.to_path_buf(),
            rows: table.rows.len(),
            evaluated: report.evaluated,
            failed,
            oracle_failures,
            wall_seconds: report.wall_seconds,
            slowest_point_seconds: report.slowest_point_seconds,
            series,
            fits,
        })
    }

    fn fits(&self, table: &Table, axis: FitAxis, current_col: &str) -> Vec<FitSummary> {
        let (xcol, group_cols): (&str, [&str; 2]) = match axis {
            FitAxis::NSites => ("n_sites", ["interaction", "rescaled_tilt"]),
            FitAxis::Tilt => ("tilt", ["n_sites", "interaction"]),
            FitAxis::RescaledTilt => ("rescaled_tilt", ["n_sites", "interaction"]),
        };
        let mut groups: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
        for i in 0..table.rows.len() {
            let (Some(x), Some(j)) = (table.num(i, xcol), table.num(i, current_col)) else { continue };
            let key = (table.get(i, group_cols[0]).unwrap_or("").to_string(), table.get(i, group_cols[1]).unwrap_or("").to_string());
            groups.entry(key).or_default().push((x, j.abs()));
        }
        groups
            .into_iter()
            .map(|((a, b), pts)| {
                let fit = fit_exponential(&pts);
                FitSummary {
                    x: xcol.into(),
                    group: BTreeMap::from([(group_cols[0].to_string(), a), (group_cols[1].to_string(), b)]),
                    fit: fit.as_ref().ok().copied(),
                    error: fit.err().map(|e| e.to_string()),
                }
            })
            .collect()
    }
}

pub fn base_params(config: &SweepConfig, n: usize, interaction: f64, tilt: f64) -> ModelParams {
    let p = ModelParams::new(n)
        .with_hopping(config.hopping)
        .with_interaction(interaction)
        .with_tilt(tilt)
        .with_coupling(config.coupling)
        .with_driving(config.driving);
    match config.chem_potential {
        Some(mu) => p.with_chem_potential(mu),
        None => p,
    }
}

/// Largest deviation of Lindblad populations and current from the noninteracting solver.
pub fn oracle_deviation(p: &ModelParams, populations: &[f64], current: f64) -> Result<f64> {
    let c = solve_chain(&QuadraticChain::from_params(p)?)?;
    let pops = c.populations();
    let worst = populations.iter().zip(&pops).map(|(a, b)| (a - b).abs()).fold((current - c.current()).abs(), f64::max);
    Ok(worst)
}

fn existing_keys(out: &Path, columns: &[String]) -> Result<HashSet<[String; 3]>> {
    if !out.exists() || std::fs::metadata(out)?.len() == 0 {
        return Ok(HashSet::new());
    }
    let table = Table::read(out)?;
    if table.header != columns {
        return Err(CliError::Config(format!("{} exists with a different column layout", out.display())));
    }
    Ok(table.rows.iter().map(|r| [r[0].clone(), r[1].clone(), r[2].clone()]).collect())
}

/// A CSV file held as strings.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let header = reader.headers()?.iter().map(String::from).collect();
        let rows = reader.records().map(|r| Ok(r?.iter().map(String::from).collect())).collect::<Result<_>>()?;
        Ok(Self { header, rows })
    }

    pub fn has(&self, col: &str) -> bool {
        self.header.iter().any(|h| h == col)
    }

    pub fn get(&self, row: usize, col: &str) -> Option<&str> {
        let c = self.header.iter().position(|h| h == col)?;
        self.rows[row].get(c).map(String::as_str)
    }

    pub fn num(&self, row: usize, col: &str) -> Option<f64> {
        self.get(row, col)?.parse().ok()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunReport {
    pub evaluated: usize,
    pub total: usize,
    pub wall_seconds: f64,
    pub slowest_point_seconds: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MaxRectification {
    pub tilt: f64,
    pub ratio: f64,
    /// `ratio` is a lower bound.
    pub overflow: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Crossing {
    pub band: usize,
    pub tilt: f64,
    pub gap: f64,
}

impl From<AvoidedCrossing> for Crossing {
    fn from(c: AvoidedCrossing) -> Self {
        Self { band: c.band, tilt: c.tilt, gap: c.gap }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesSummary {
    pub n_sites: usize,
    pub interaction: f64,
    pub points: usize,
    pub resonances: Vec<Resonance>,
    pub max_rectification: Option<MaxRectification>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub avoided_crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub x: String,
    pub group: BTreeMap<String, String>,
    pub fit: Option<ExpFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub solver: String,
    pub output: PathBuf,
    pub rows: usize,
    pub evaluated: usize,
    pub failed: usize,
    pub oracle_failures: usize,
    pub wall_seconds: f64,
    pub slowest_point_seconds: f64,
    pub series: Vec<SeriesSummary>,
    pub fits: Vec<FitSummary>,
}

/// `results.csv` -> `results.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

/// Runs the sweep, writes the summary next to the CSV and reports failed points as an error.
pub fn run_and_summarize(sweep: &Sweep, out: &Path) -> Result<Summary> {
    let report = sweep.run(out)?;
    let summary = sweep.summarize(out, &report)?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(e.into()))?;
    std::fs::write(summary_path(out), json + "\n")?;
    Ok(summary)
}
