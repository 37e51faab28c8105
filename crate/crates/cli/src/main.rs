use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use renyi_bounds::report::{cells_to_csv, cells_to_json, report_to_json, reports_to_csv, sig15};
use renyi_bounds::{
    baseline_renyi_bound, bd_lambda, correlation_diagonal, cos2_moment, empirical_covariance, entropy_loss,
    maxent::bd_lambda_printed, renyi_total, sample_state, sweep, tabulated_state_from_file, verify_with, Error,
    QuadratureSpec, QuantumNumberChain, RadialState, RenyiOrder, SweepConfig, SystemKind,
};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "renyi-bounds", version, about = "Maximum-entropy Rényi bounds for separable quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound constant, baseline and improved bounds for given d, λ, <r²> and μ.
    Bound(BoundArgs),
    /// Rényi entropy of a state.
    Entropy(StateCommand),
    /// Entropy of a state against both bounds.
    Verify(VerifyArgs),
    /// Verify over a grid of catalog states, dimensions, chains and λ.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the normalized covariance.
    SampleCov(SampleArgs),
    /// Angular entropy loss of a quantum-number chain.
    Loss(LossArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Oscillator,
    Hydrogen,
    File,
}

#[derive(Args)]
struct NumericArgs {
    /// Base Gauss–Legendre order.
    #[arg(long)]
    order: Option<usize>,
    /// Relative tolerance for refinement.
    #[arg(long)]
    tol: Option<f64>,
}

impl NumericArgs {
    fn spec(&self) -> Result<QuadratureSpec, Error> {
        let mut spec = QuadratureSpec::default();
        if let Some(o) = self.order {
            spec.base_order = o;
        }
        if let Some(t) = self.tol {
            spec.rel_tol = t;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct StateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum)]
    system: SystemArg,
    /// `n_r,l` for the oscillator, `n,l` for hydrogen.
    #[arg(long)]
    state: Option<String>,
    /// Two-column `r, R(r)` table for `--system file`.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Angular chain `μ_1,…,μ_{d-1}`; defaults to `l,0,…,0`.
    #[arg(long)]
    mu: Option<String>,
}

impl StateArgs {
    fn build(&self) -> Result<(RadialState, QuantumNumberChain), Error> {
        let chain = self.mu.as_deref().map(|m| parse_chain(self.d, m)).transpose()?;
        let state = match self.system {
            SystemArg::File => {
                let path = self.file.as_ref().ok_or_else(|| Error::Usage("--system file needs --file".into()))?;
                if self.state.is_some() {
                    return Err(Error::Usage("--state does not apply to --system file".into()));
                }
                let l = chain.as_ref().map_or(0, |c| c.l());
                tabulated_state_from_file(path, self.d, l)?
            }
            system => {
                if self.file.is_some() {
                    return Err(Error::Usage("--file needs --system file".into()));
                }
                let text = self.state.as_deref().ok_or_else(|| Error::Usage("--state n,l is required".into()))?;
                let (a, b) = parse_pair(text)?;
                let kind = if system == SystemArg::Oscillator { SystemKind::Oscillator } else { SystemKind::Hydrogen };
                kind.build(a, b, self.d)?
            }
        };
        let chain = match chain {
            Some(c) => c,
            None => QuantumNumberChain::with_leading(self.d, state.l())?,
        };
        Ok((state, chain))
    }
}

#[derive(Args)]
struct StateCommand {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inner: StateCommand,
    /// Also report the bound with the printed λ > 1 exponent.
    #[arg(long)]
    paper_exact: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    r2: f64,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    paper_exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Catalog systems; both when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    system: Vec<SystemArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5])]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 1.0, 1.5, 2.0, 3.0])]
    lambda: Vec<f64>,
    /// Restrict to these states (repeatable, `n,l`).
    #[arg(long)]
    state: Vec<String>,
    /// Restrict to these chains (repeatable); each is matched to states by d and l.
    #[arg(long)]
    mu: Vec<String>,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long)]
    paper_exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct LossArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    mu: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn parse_ints(text: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Usage(format!("'{t}' is not an integer in '{text}'"))))
        .collect()
}

fn parse_chain(d: usize, text: &str) -> Result<QuantumNumberChain, Error> {
    QuantumNumberChain::new(d, parse_ints(text)?)
}

fn parse_pair(text: &str) -> Result<(u32, u32), Error> {
    match parse_ints(text)?.as_slice() {
        &[a, b] if a >= 0 && b >= 0 => Ok((a as u32, b as u32)),
        _ => Err(Error::Usage(format!("expected two non-negative integers 'a,b', got '{text}'"))),
    }
}

fn num(x: f64) -> Value {
    json!(sig15::round(x))
}

fn render_table(format: Format, fields: &[(&str, Value)]) -> Result<String, Error> {
    match format {
        Format::Json => {
            let map: Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            Ok(serde_json::to_string_pretty(&Value::Object(map)).expect("json value"))
        }
        Format::Csv => csv_rows(&fields.iter().map(|(k, _)| *k).collect::<Vec<_>>(), &[fields.iter().map(|(_, v)| v.clone()).collect()]),
    }
}

fn csv_rows(header: &[&str], rows: &[Vec<Value>]) -> Result<String, Error> {
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(cell)).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn run_bound(args: &BoundArgs) -> Result<(String, u8), Error> {
    let order = RenyiOrder::new(args.lambda, args.d)?;
    order.check_window()?;
    let chain = args.mu.as_deref().map(|m| parse_chain(args.d, m)).transpose()?;
    let bd = bd_lambda(order)?;
    let baseline = baseline_renyi_bound(order, args.r2)?;
    let loss = chain.as_ref().map(entropy_loss).transpose()?.unwrap_or(0.0);
    let mut fields = vec![
        ("d", json!(args.d)),
        ("mu", json!(chain.as_ref().map(|c| c.mu().to_vec()))),
        ("lambda", num(args.lambda)),
        ("r2", num(args.r2)),
        ("bd", num(bd)),
        ("bound_baseline", num(baseline)),
        ("loss", num(loss)),
        ("bound_improved", num(baseline + loss)),
    ];
    if args.paper_exact {
        let printed = bd_lambda_printed(order)?;
        fields.push(("bd_printed", num(printed)));
        fields.push(("bound_baseline_printed", num(baseline + printed - bd)));
        fields.push(("bound_improved_printed", num(baseline + loss + printed - bd)));
    }
    Ok((render_table(args.format, &fields)?, 0))
}

fn run_entropy(args: &StateCommand) -> Result<(String, u8), Error> {
    let spec = args.numeric.spec()?;
    let (state, chain) = args.state.build()?;
    let h = renyi_total(&state, &chain, args.lambda, &spec)?;
    let fields = [
        ("system", json!(state.label().to_string())),
        ("d", json!(state.d())),
        ("mu", json!(chain.mu())),
        ("lambda", num(args.lambda)),
        ("H", num(h.value)),
        ("H_method", json!(h.method)),
        ("H_est_error", num(h.est_error)),
    ];
    Ok((render_table(args.format, &fields)?, 0))
}

fn run_verify(args: &VerifyArgs) -> Result<(String, u8), Error> {
    let inner = &args.inner;
    let spec = inner.numeric.spec()?;
    let (state, chain) = inner.state.build()?;
    let report = verify_with(&state, &chain, inner.lambda, &spec, args.paper_exact)?;
    let text = match inner.format {
        Format::Json => report_to_json(&report),
        Format::Csv => reports_to_csv([(
            report.system.as_str(),
            report.d,
            report.mu.as_slice(),
            report.lambda,
            Some(&report),
        )])?,
    };
    let code = if report.holds { 0 } else { EXIT_VIOLATION };
    Ok((text, code))
}

fn run_sweep(args: &SweepArgs) -> Result<(String, u8), Error> {
    let spec = args.numeric.spec()?;
    let mut systems = Vec::new();
    for s in &args.system {
        match s {
            SystemArg::Oscillator => systems.push(SystemKind::Oscillator),
            SystemArg::Hydrogen => systems.push(SystemKind::Hydrogen),
            SystemArg::File => return Err(Error::Usage("sweep runs over catalog systems only".into())),
        }
    }
    if systems.is_empty() {
        systems = vec![SystemKind::Oscillator, SystemKind::Hydrogen];
    }
    let states = if args.state.is_empty() {
        None
    } else {
        Some(args.state.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?)
    };
    let chains = if args.mu.is_empty() {
        None
    } else {
        Some(args.mu.iter().map(|m| parse_ints(m)).collect::<Result<Vec<_>, _>>()?)
    };
    let config = SweepConfig {
        systems,
        dims: args.d.clone(),
        states,
        chains,
        lambdas: args.lambda.clone(),
        paper_exact: args.paper_exact,
    };
    let cells = sweep(&config, &spec)?;
    let mut code = 0;
    for cell in &cells {
        match &cell.outcome {
            Ok(r) if !r.holds => code = EXIT_VIOLATION,
            Ok(_) => {}
            Err(e) => {
                eprintln!("{} d={} mu={:?} lambda={}: {e}", cell.system, cell.d, cell.mu, cell.lambda);
                if e.is_numeric() && code == 0 {
                    code = EXIT_NUMERIC;
                }
            }
        }
    }
    let text = match args.format {
        Format::Json => cells_to_json(&cells),
        Format::Csv => cells_to_csv(&cells)?,
    };
    Ok((text, code))
}

fn run_sample(args: &SampleArgs) -> Result<(String, u8), Error> {
    let (state, chain) = args.state.build()?;
    let cloud = sample_state(&state, &chain, args.samples, args.seed)?;
    let cov = empirical_covariance(&cloud)?;
    let expected = correlation_diagonal(&chain)?;
    let d = state.d();
    let text = match args.format {
        Format::Json => {
            let matrix = |m: &Vec<Vec<f64>>| json!(m.iter().map(|row| row.iter().map(|v| num(*v)).collect::<Vec<_>>()).collect::<Vec<_>>());
            let value = json!({
                "system": state.label().to_string(),
                "d": d,
                "mu": chain.mu(),
                "samples": args.samples,
                "seed": args.seed,
                "second_moment": matrix(&cov.second_moment),
                "normalized": matrix(&cov.normalized),
                "diagonal": cov.diagonal().iter().map(|v| num(*v)).collect::<Vec<_>>(),
                "expected_diagonal": expected.entries().iter().map(|v| num(*v)).collect::<Vec<_>>(),
                "max_off_diagonal": num(cov.max_off_diagonal()),
                "tolerance": num(4.0 / (args.samples as f64).sqrt()),
            });
            serde_json::to_string_pretty(&value).expect("json value")
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    let exp = if i == j { num(expected.entries()[i]) } else { num(0.0) };
                    rows.push(vec![json!(i + 1), json!(j + 1), num(cov.second_moment[i][j]), num(cov.normalized[i][j]), exp]);
                }
            }
            csv_rows(&["i", "j", "second_moment", "normalized", "expected"], &rows)?
        }
    };
    Ok((text, 0))
}

fn run_loss(args: &LossArgs) -> Result<(String, u8), Error> {
    let chain = parse_chain(args.d, &args.mu)?;
    let diag = correlation_diagonal(&chain)?;
    let cos2 = (1..args.d).map(|k| cos2_moment(&chain, k)).collect::<Result<Vec<_>, _>>()?;
    let loss = entropy_loss(&chain)?;
    let text = match args.format {
        Format::Json => {
            let value = json!({
                "d": args.d,
                "mu": chain.mu(),
                "cos2": cos2.iter().map(|v| num(*v)).collect::<Vec<_>>(),
                "diagonal": diag.entries().iter().map(|v| num(*v)).collect::<Vec<_>>(),
                "loss": num(loss),
            });
            serde_json::to_string_pretty(&value).expect("json value")
        }
        Format::Csv => {
            let rows: Vec<Vec<Value>> = (0..args.d)
                .map(|i| {
                    let c = cos2.get(i).map_or(Value::Null, |v| num(*v));
                    vec![json!(args.d), json!(chain.mu()), json!(i + 1), c, num(diag.entries()[i]), num(loss)]
                })
                .collect();
            csv_rows(&["d", "mu", "i", "cos2", "diagonal", "loss"], &rows)?
        }
    };
    Ok((text, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(a) => run_bound(a),
        Command::Entropy(a) => run_entropy(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::SampleCov(a) => run_sample(a),
        Command::Loss(a) => run_loss(a),
    };
    match result {
        Ok((text, code)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { EXIT_NUMERIC } else { EXIT_INPUT })
        }
    }
}
