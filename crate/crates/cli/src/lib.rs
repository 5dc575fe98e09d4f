//! Sweeps, exhibit grids and CSV output for the `pushpull` binary.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use pushpull_core::{evaluate, BaseConfig, ConfigError, Engine, RunSummary, Scenario, Scheme};
use rayon::prelude::*;

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_TRIALS: u64 = 10_000;
/// Points whose simulated mean is further than this many standard errors from the
/// analytic value fail validation.
pub const Z_LIMIT: f64 = 3.0;

pub const CSV_HEADER: [&str; 24] = [
    "scenario_id",
    "engine",
    "N",
    "F",
    "tau_s",
    "k_w",
    "k_c",
    "Q",
    "P",
    "k_s",
    "lambda_q",
    "lambda_a",
    "T_O",
    "n_trials",
    "seed",
    "p_bar_a",
    "p_bar_q",
    "p_bar_s",
    "E_bar_mJ",
    "S_bar",
    "E_per_success_mJ",
    "se_p_a",
    "se_p_q",
    "se_E",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sweep has no points: {0}")]
    EmptySweep(&'static str),
    #[error("unknown exhibit `{0}` (expected fig5..fig10 or table3)")]
    UnknownExhibit(String),
    #[error("--trials must be at least 1")]
    NoTrials,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Every error is a configuration or environment problem; validation failures are
    /// reported through [`ValidationReport::passed`] instead.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Analytic,
    Sim,
    Both,
}

impl FromStr for EngineChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "sim" | "mc" => Ok(Self::Sim),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown engine `{other}` (analytic, sim, both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhibit {
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Table3,
}

impl Exhibit {
    pub const ALL: [Exhibit; 7] = [
        Exhibit::Fig5,
        Exhibit::Fig6,
        Exhibit::Fig7,
        Exhibit::Fig8,
        Exhibit::Fig9,
        Exhibit::Fig10,
        Exhibit::Table3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Exhibit::Fig5 => "fig5",
            Exhibit::Fig6 => "fig6",
            Exhibit::Fig7 => "fig7",
            Exhibit::Fig8 => "fig8",
            Exhibit::Fig9 => "fig9",
            Exhibit::Fig10 => "fig10",
            Exhibit::Table3 => "table3",
        }
    }

    /// Sweep producing the exhibit's grid.
    pub fn sweep(self) -> SweepSpec {
        match self {
            Exhibit::Fig5 | Exhibit::Fig6 => SweepSpec {
                traffic: LOAD_GRID.iter().map(|&l| (l, l)).collect(),
                pull: vec![1, 4, 7],
                ..SweepSpec::default()
            },
            Exhibit::Fig7 | Exhibit::Fig8 | Exhibit::Fig9 => SweepSpec {
                traffic: MIX_CASES.to_vec(),
                pull: (0..=8).collect(),
                ..SweepSpec::default()
            },
            Exhibit::Fig10 | Exhibit::Table3 => SweepSpec {
                traffic: vec![(15.0, 15.0)],
                push: PUSH_GRID.to_vec(),
                schedule: vec![1, 4],
                include_wur_push: true,
                ..SweepSpec::default()
            },
        }
    }
}

impl FromStr for Exhibit {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        Exhibit::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::UnknownExhibit(s.to_string()))
    }
}

impl fmt::Display for Exhibit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `lambda_a = lambda_q` values of the load sweeps, packets/s.
pub const LOAD_GRID: [f64; 9] = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0];
/// `(lambda_a, lambda_q)` of the three traffic mixes.
pub const MIX_CASES: [(f64, f64); 3] = [(10.0, 20.0), (15.0, 15.0), (20.0, 10.0)];
pub const PUSH_GRID: [u32; 7] = [5, 10, 15, 20, 25, 30, 35];

/// Cartesian sweep over traffic and frame partitions.
///
/// Each traffic pair is combined with every `pull` value (wake-up scheme) and every
/// `push` value: with the main-radio baseline for each `schedule` entry, and with the
/// wake-up scheme when `schedule` is empty or `include_wur_push` is set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSpec {
    /// `(lambda_a, lambda_q)` pairs.
    pub traffic: Vec<(f64, f64)>,
    pub pull: Vec<u32>,
    pub push: Vec<u32>,
    pub schedule: Vec<u32>,
    pub include_wur_push: bool,
}

impl SweepSpec {
    /// Fills empty axes from the values fixed in a config file.
    pub fn with_defaults(mut self, base: &BaseConfig) -> Self {
        if self.traffic.is_empty() {
            if let (Some(a), Some(q)) = (base.lambda_a, base.lambda_q) {
                self.traffic.push((a, q));
            }
        }
        if self.pull.is_empty() && self.push.is_empty() {
            match (base.schedule_slots, base.pull_slots, base.push_slots) {
                (Some(_), _, Some(p)) | (None, None, Some(p)) => self.push.push(p),
                (None, Some(q), _) => self.pull.push(q),
                _ => {}
            }
        }
        if self.schedule.is_empty() {
            self.schedule.extend(base.schedule_slots);
        }
        self
    }

    pub fn points(&self, base: &BaseConfig, prefix: &str) -> Result<Vec<Point>> {
        if self.traffic.is_empty() {
            return Err(CliError::EmptySweep("no traffic values"));
        }
        if self.pull.is_empty() && self.push.is_empty() {
            return Err(CliError::EmptySweep("no Q or P values"));
        }
        let mut out = Vec::new();
        for &(la, lq) in &self.traffic {
            for &q in &self.pull {
                out.push(Point::new(prefix, base.scenario(la, lq, Some(q), None, None)?));
            }
            for &p in &self.push {
                if self.schedule.is_empty() || self.include_wur_push {
                    out.push(Point::new(prefix, base.scenario(la, lq, None, Some(p), None)?));
                }
                for &ks in &self.schedule {
                    out.push(Point::new(prefix, base.scenario(la, lq, None, Some(p), Some(ks))?));
                }
            }
        }
        Ok(out)
    }
}

/// A resolved operating point with a sortable id.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub id: String,
    pub scenario: Scenario,
}

impl Point {
    pub fn new(prefix: &str, scenario: Scenario) -> Self {
        let t = scenario.traffic();
        let scheme = match scenario.scheme() {
            Scheme::WakeUp => "wur".to_string(),
            Scheme::MainRadio(mr) => format!("mr{}", mr.schedule_slots),
        };
        let id = format!(
            "{prefix}{}{scheme}-la{:08.3}-lq{:08.3}-Q{:02}-P{:02}",
            if prefix.is_empty() { "" } else { "-" },
            t.lambda_a(),
            t.lambda_q(),
            scenario.pull_capacity(),
            scenario.push_slots(),
        );
        Self { id, scenario }
    }

    pub fn schedule_slots(&self) -> Option<u32> {
        match self.scenario.scheme() {
            Scheme::WakeUp => None,
            Scheme::MainRadio(mr) => Some(mr.schedule_slots),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: Point,
    pub summary: RunSummary,
}

fn engines(choice: EngineChoice, trials: u64, seed: u64) -> Vec<Engine> {
    let mc = Engine::MonteCarlo { trials, seed };
    match choice {
        EngineChoice::Analytic => vec![Engine::Analytic],
        EngineChoice::Sim => vec![mc],
        EngineChoice::Both => vec![Engine::Analytic, mc],
    }
}

/// Evaluates every point on the rayon pool. Rows come back sorted by id, analytic first.
pub fn run_points(points: &[Point], choice: EngineChoice, trials: u64, seed: u64) -> Result<Vec<Row>> {
    if trials == 0 && choice != EngineChoice::Analytic {
        return Err(CliError::NoTrials);
    }
    let engines = engines(choice, trials, seed);
    let mut rows: Vec<Row> = points
        .par_iter()
        .flat_map_iter(|p| {
            engines.iter().map(move |&e| Row {
                point: p.clone(),
                summary: evaluate(&p.scenario, e),
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.point
            .id
            .cmp(&b.point.id)
            .then_with(|| a.summary.engine.name().cmp(b.summary.engine.name()))
    });
    Ok(rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record(row: &Row) -> Vec<String> {
    let s = &row.point.scenario;
    let f = s.frame();
    let t = s.traffic();
    let r = &row.summary;
    let (trials, seed) = match r.engine {
        Engine::Analytic => (None, None),
        Engine::MonteCarlo { trials, seed } => (Some(trials), Some(seed)),
    };
    vec![
        row.point.id.clone(),
        r.engine.name().to_string(),
        s.nodes().to_string(),
        f.frame_slots().to_string(),
        f.tau().to_string(),
        f.wus_slots().to_string(),
        f.control_slots().to_string(),
        s.pull_capacity().to_string(),
        s.push_slots().to_string(),
        opt(row.point.schedule_slots()),
        t.lambda_q().to_string(),
        t.lambda_a().to_string(),
        s.horizon().observed_frames().to_string(),
        opt(trials),
        opt(seed),
        r.p_bar_a.to_string(),
        r.p_bar_q.to_string(),
        opt(r.p_bar_s),
        r.e_bar_mj().to_string(),
        r.s_bar.to_string(),
        opt(r.e_per_success_mj()),
        opt(r.std_errors.map(|e| e.p_a)),
        opt(r.std_errors.map(|e| e.p_q)),
        opt(r.std_errors.map(|e| e.e * 1e3)),
    ]
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_figure(exhibit: Exhibit, base: &BaseConfig, choice: EngineChoice, trials: u64, seed: u64) -> Result<Vec<Row>> {
    let points = exhibit.sweep().points(base, exhibit.name())?;
    run_points(&points, choice, trials, seed)
}

pub fn cmd_sweep(spec: SweepSpec, base: &BaseConfig, choice: EngineChoice, trials: u64, seed: u64) -> Result<Vec<Row>> {
    let points = spec.with_defaults(base).points(base, "sweep")?;
    run_points(&points, choice, trials, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationLine {
    pub scenario_id: String,
    pub metric: &'static str,
    pub analytic: f64,
    pub sim_mean: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub lines: Vec<ValidationLine>,
}

impl ValidationReport {
    pub fn worst(&self) -> Option<&ValidationLine> {
        self.lines.iter().max_by(|a, b| a.z.abs().total_cmp(&b.z.abs()))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationLine> {
        self.lines.iter().filter(|l| !(l.z.abs() <= Z_LIMIT))
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scenario_id", "metric", "analytic", "sim_mean", "se", "z"])?;
        for l in &self.lines {
            w.write_record([
                l.scenario_id.clone(),
                l.metric.to_string(),
                l.analytic.to_string(),
                l.sim_mean.to_string(),
                l.se.to_string(),
                l.z.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn z_score(analytic: f64, mean: f64, se: f64) -> f64 {
    let diff = mean - analytic;
    if se > 0.0 {
        diff / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Runs both engines on every point and compares `p_bar_a`, `p_bar_q` and `E_bar`.
pub fn cmd_validate(points: &[Point], trials: u64, seed: u64) -> Result<ValidationReport> {
    if points.is_empty() {
        return Err(CliError::EmptySweep("nothing to validate"));
    }
    let rows = run_points(points, EngineChoice::Both, trials, seed)?;
    let mut lines = Vec::new();
    for pair in rows.chunks(2) {
        let (a, m) = (&pair[0].summary, &pair[1].summary);
        let se = m.std_errors.expect("simulated row");
        for (metric, x, y, e) in [
            ("p_bar_a", a.p_bar_a, m.p_bar_a, se.p_a),
            ("p_bar_q", a.p_bar_q, m.p_bar_q, se.p_q),
            ("E_bar_mJ", a.e_bar_mj(), m.e_bar_mj(), se.e * 1e3),
        ] {
            lines.push(ValidationLine {
                scenario_id: pair[0].point.id.clone(),
                metric,
                analytic: x,
                sim_mean: y,
                se: e,
                z: z_score(x, y, e),
            });
        }
    }
    Ok(ValidationReport { lines })
}
