//! Bound reports: entropy of a state against the baseline and improved
//! upper bounds, and sweeps over the state catalog.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{entropy_loss, QuantumNumberChain};
use crate::error::{Error, Result};
use crate::maxent::{baseline_renyi_bound, bd_lambda, bd_lambda_printed, RenyiOrder};
use crate::quadrature::{renyi_total, EntropyValue, Method, QuadratureSpec};
use crate::states::{hydrogen_state, oscillator_state, r2_expectation_with, RadialState};

/// Slack below which a report counts as a violation.
pub const HOLDS_TOLERANCE: f64 = 1e-9;

/// Floats are written with 15 significant digits.
pub mod sig15 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn round(x: f64) -> f64 {
        if x.is_finite() && x != 0.0 {
            format!("{x:.14e}").parse().unwrap_or(x)
        } else {
            x
        }
    }

    /// Shortest decimal form of the 15-digit rounding.
    pub fn render(x: f64) -> String {
        if x.is_finite() {
            serde_json::to_string(&round(x)).unwrap_or_default()
        } else {
            x.to_string()
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(round(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

/// The λ > 1 bound evaluated with the printed exponent `1/(1-λ)`, shown
/// beside the corrected values when requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintedExponent {
    #[serde(with = "sig15")]
    pub bd: f64,
    #[serde(with = "sig15")]
    pub bound_baseline: f64,
    #[serde(with = "sig15")]
    pub bound_improved: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub system: String,
    pub d: usize,
    pub mu: Vec<i64>,
    #[serde(with = "sig15")]
    pub lambda: f64,
    #[serde(with = "sig15")]
    pub r2: f64,
    #[serde(rename = "H", with = "sig15")]
    pub h: f64,
    #[serde(rename = "H_method")]
    pub h_method: Method,
    #[serde(rename = "H_est_error", with = "sig15")]
    pub h_est_error: f64,
    #[serde(with = "sig15")]
    pub bound_baseline: f64,
    #[serde(with = "sig15")]
    pub bound_improved: f64,
    #[serde(with = "sig15")]
    pub loss: f64,
    #[serde(with = "sig15")]
    pub slack_baseline: f64,
    #[serde(with = "sig15")]
    pub slack_improved: f64,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper_exact: Option<PrintedExponent>,
}

impl BoundReport {
    pub fn entropy(&self) -> EntropyValue {
        EntropyValue { lambda: self.lambda, value: self.h, method: self.h_method, est_error: self.h_est_error }
    }

    /// Column names shared by the JSON object and the CSV header.
    pub const COLUMNS: [&'static str; 14] = [
        "system",
        "d",
        "mu",
        "lambda",
        "r2",
        "H",
        "H_method",
        "H_est_error",
        "bound_baseline",
        "bound_improved",
        "loss",
        "slack_baseline",
        "slack_improved",
        "holds",
    ];

    /// Extra CSV columns written after [`Self::COLUMNS`] under the printed
    /// exponent option.
    pub const PRINTED_COLUMNS: [&'static str; 3] = ["bd_printed", "bound_baseline_printed", "bound_improved_printed"];

    fn csv_row(&self) -> Vec<String> {
        use sig15::render;
        let mut row = vec![
            self.system.clone(),
            self.d.to_string(),
            mu_string(&self.mu),
            render(self.lambda),
            render(self.r2),
            render(self.h),
            self.h_method.to_string(),
            render(self.h_est_error),
            render(self.bound_baseline),
            render(self.bound_improved),
            render(self.loss),
            render(self.slack_baseline),
            render(self.slack_improved),
            self.holds.to_string(),
        ];
        if let Some(p) = &self.paper_exact {
            row.extend([render(p.bd), render(p.bound_baseline), render(p.bound_improved)]);
        }
        row
    }
}

fn mu_string(mu: &[i64]) -> String {
    mu.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
}

/// Computes the entropy of `state ⊗ chain` and compares it with both bounds.
pub fn verify(state: &RadialState, chain: &QuantumNumberChain, lambda: f64, spec: &QuadratureSpec) -> Result<BoundReport> {
    verify_with(state, chain, lambda, spec, false)
}

pub fn verify_with(
    state: &RadialState,
    chain: &QuantumNumberChain,
    lambda: f64,
    spec: &QuadratureSpec,
    paper_exact: bool,
) -> Result<BoundReport> {
    let order = RenyiOrder::new(lambda, state.d())?;
    order.check_window()?;
    let r2 = r2_expectation_with(state, spec)?;
    let h = renyi_total(state, chain, lambda, spec)?;
    let bound_baseline = baseline_renyi_bound(order, r2)?;
    let loss = entropy_loss(chain)?;
    let bound_improved = bound_baseline + loss;
    let slack_improved = bound_improved - h.value;
    let paper_exact = if paper_exact {
        let bd = bd_lambda_printed(order)?;
        let shift = bd - bd_lambda(order)?;
        Some(PrintedExponent {
            bd,
            bound_baseline: bound_baseline + shift,
            bound_improved: bound_improved + shift,
        })
    } else {
        None
    };
    Ok(BoundReport {
        system: state.label().to_string(),
        d: state.d(),
        mu: chain.mu().to_vec(),
        lambda,
        r2,
        h: h.value,
        h_method: h.method,
        h_est_error: h.est_error,
        bound_baseline,
        bound_improved,
        loss,
        slack_baseline: bound_baseline - h.value,
        slack_improved,
        holds: slack_improved >= -HOLDS_TOLERANCE,
        paper_exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Oscillator,
    Hydrogen,
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "oscillator" => Ok(SystemKind::Oscillator),
            "hydrogen" => Ok(SystemKind::Hydrogen),
            other => Err(Error::Usage(format!("unknown catalog system '{other}'"))),
        }
    }
}

impl SystemKind {
    pub fn build(self, a: u32, b: u32, d: usize) -> Result<RadialState> {
        match self {
            SystemKind::Oscillator => oscillator_state(a, b, d),
            SystemKind::Hydrogen => hydrogen_state(a, b, d),
        }
    }

    fn label(self, a: u32, b: u32) -> String {
        match self {
            SystemKind::Oscillator => format!("oscillator(n_r={a},l={b})"),
            SystemKind::Hydrogen => format!("hydrogen(n={a},l={b})"),
        }
    }
}

/// Grid for [`sweep`]. `states` and `chains` default to the built-in
/// catalog (oscillator `n_r, l <= 2`, hydrogen `n <= 3`) and to every chain
/// with `m >= 0` whose leading entry matches the state's `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub systems: Vec<SystemKind>,
    pub dims: Vec<usize>,
    pub states: Option<Vec<(u32, u32)>>,
    pub chains: Option<Vec<Vec<i64>>>,
    pub lambdas: Vec<f64>,
    pub paper_exact: bool,
}

impl SweepConfig {
    /// Oscillator and hydrogen in d ∈ {2, 3, 5}, λ ∈ {0.8, 1, 1.5, 2, 3}.
    pub fn catalog() -> Self {
        Self {
            systems: vec![SystemKind::Oscillator, SystemKind::Hydrogen],
            dims: vec![2, 3, 5],
            states: None,
            chains: None,
            lambdas: vec![0.8, 1.0, 1.5, 2.0, 3.0],
            paper_exact: false,
        }
    }

    fn catalog_states(&self, system: SystemKind) -> Vec<(u32, u32)> {
        if let Some(s) = &self.states {
            return s.clone();
        }
        match system {
            SystemKind::Oscillator => (0..=2).flat_map(|n| (0..=2).map(move |l| (n, l))).collect(),
            SystemKind::Hydrogen => (1..=3).flat_map(|n| (0..n).map(move |l| (n, l))).collect(),
        }
    }
}

/// One sweep cell: a report, or the error that prevented it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub system: String,
    pub d: usize,
    pub mu: Vec<i64>,
    pub lambda: f64,
    pub outcome: std::result::Result<BoundReport, Error>,
}

#[derive(Serialize)]
struct FailureRecord<'a> {
    system: &'a str,
    d: usize,
    mu: &'a [i64],
    #[serde(with = "sig15")]
    lambda: f64,
    error: String,
}

impl Serialize for SweepCell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.outcome {
            Ok(report) => report.serialize(s),
            Err(e) => FailureRecord {
                system: &self.system,
                d: self.d,
                mu: &self.mu,
                lambda: self.lambda,
                error: e.to_string(),
            }
            .serialize(s),
        }
    }
}

/// Runs [`verify_with`] over the grid. Cells are ordered by system, d,
/// state, chain and λ in input order; failures are kept in place.
pub fn sweep(config: &SweepConfig, spec: &QuadratureSpec) -> Result<Vec<SweepCell>> {
    if config.lambdas.is_empty() {
        return Err(Error::Usage("empty lambda grid".into()));
    }
    if config.dims.is_empty() || config.systems.is_empty() {
        return Err(Error::Usage("empty system or dimension list".into()));
    }
    spec.validate()?;

    struct Job {
        system: String,
        d: usize,
        state: Option<usize>,
        chain: std::result::Result<QuantumNumberChain, Error>,
    }

    let mut states: Vec<RadialState> = Vec::new();
    let mut jobs: Vec<Job> = Vec::new();
    for &system in &config.systems {
        for &d in &config.dims {
            let built: Vec<((u32, u32), Result<RadialState>)> = config
                .catalog_states(system)
                .into_par_iter()
                .map(|(a, b)| ((a, b), system.build(a, b, d)))
                .collect();
            for ((a, b), state) in built {
                let label = system.label(a, b);
                let state = match state {
                    Ok(s) => s,
                    Err(e) => {
                        jobs.push(Job { system: label, d, state: None, chain: Err(e) });
                        continue;
                    }
                };
                let chains: Vec<std::result::Result<QuantumNumberChain, Error>> = match &config.chains {
                    Some(list) => list
                        .iter()
                        .filter(|mu| mu.len() + 1 == d && mu.first().map(|m| m.abs()) == Some(b as i64))
                        .map(|mu| QuantumNumberChain::new(d, mu.clone()))
                        .collect(),
                    None => match QuantumNumberChain::enumerate(d, b as i64) {
                        Ok(list) => list.into_iter().map(Ok).collect(),
                        Err(e) => vec![Err(e)],
                    },
                };
                states.push(state);
                let idx = states.len() - 1;
                for chain in chains {
                    jobs.push(Job { system: label.clone(), d, state: Some(idx), chain });
                }
            }
        }
    }

    let cells: Vec<(usize, f64)> = (0..jobs.len())
        .flat_map(|j| config.lambdas.iter().map(move |&l| (j, l)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(j, lambda)| {
            let job = &jobs[j];
            let mu = job.chain.as_ref().map(|c| c.mu().to_vec()).unwrap_or_default();
            let outcome = match (&job.chain, job.state) {
                (Ok(chain), Some(idx)) => verify_with(&states[idx], chain, lambda, spec, config.paper_exact),
                (Err(e), _) => Err(e.clone()),
                (Ok(_), None) => Err(Error::Domain("state unavailable".into())),
            };
            SweepCell { system: job.system.clone(), d: job.d, mu, lambda, outcome }
        })
        .collect())
}

/// Pretty JSON for a single report.
pub fn report_to_json(report: &BoundReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn report_from_json(text: &str) -> Result<BoundReport> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// Pretty JSON array for sweep cells.
pub fn cells_to_json(cells: &[SweepCell]) -> String {
    serde_json::to_string_pretty(cells).expect("cells serialize")
}

/// CSV with the report columns. Failed cells keep their identifying columns
/// and leave the numeric ones empty.
pub fn reports_to_csv<'a, I>(rows: I) -> Result<String>
where
    I: IntoIterator<Item = (&'a str, usize, &'a [i64], f64, Option<&'a BoundReport>)>,
{
    let rows: Vec<_> = rows.into_iter().collect();
    let printed = rows.iter().any(|r| r.4.is_some_and(|r| r.paper_exact.is_some()));
    let width = BoundReport::COLUMNS.len() + if printed { BoundReport::PRINTED_COLUMNS.len() } else { 0 };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut header = BoundReport::COLUMNS.to_vec();
    if printed {
        header.extend(BoundReport::PRINTED_COLUMNS);
    }
    w.write_record(&header).map_err(csv_err)?;
    for (system, d, mu, lambda, report) in rows {
        let mut row = match report {
            Some(r) => r.csv_row(),
            None => {
                let mut row = vec![String::new(); BoundReport::COLUMNS.len()];
                row[0] = system.to_string();
                row[1] = d.to_string();
                row[2] = mu_string(mu);
                row[3] = sig15::render(lambda);
                row
            }
        };
        row.resize(width, String::new());
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn cells_to_csv(cells: &[SweepCell]) -> Result<String> {
    reports_to_csv(
        cells
            .iter()
            .map(|c| (c.system.as_str(), c.d, c.mu.as_slice(), c.lambda, c.outcome.as_ref().ok())),
    )
}
