//! Command-line front end. `run` is the whole program minus process exit, so
//! tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::autopilot::{
    create_model, describe_model, forecast, ForecastModel, ForecastResult, Method, ModelOptions,
    Regressor, TrendPolicy, DEFAULT_SEED,
};
use crate::cart::TreeParams;
use crate::error::Error;
use crate::eval::{run_benchmark, BenchmarkConfig, BenchmarkItem};
use crate::io::{
    emit_plot, model_from_json, model_to_json, parse_series_bytes, write_forecast, ForecastFormat,
    SeriesFileRecord,
};
use crate::series::LagSet;

/// Directory that relative output paths are resolved against, when set.
pub const OUTPUT_DIR_ENV: &str = "TREECAST_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MODEL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "treecast", version, about = "Autoregressive forecasting with regression trees and ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model to one series and forecast it.
    #[command(disable_help_flag = true)]
    Forecast(ForecastArgs),
    /// Hold out the last `horizon` values of every series and report MASE.
    #[command(disable_help_flag = true)]
    Benchmark(BenchmarkArgs),
    /// Describe a fitted model and print its tree.
    #[command(disable_help_flag = true)]
    Inspect(InspectArgs),
    /// Write an SVG chart of a series and its forecast.
    #[command(disable_help_flag = true)]
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// rt, bagging or rf.
    #[arg(long, default_value = "rt", value_parser = parse_method)]
    method: Method,
    /// Lags such as `1:3`, `1,2,4` or `12`. Selected automatically when absent.
    #[arg(long, value_parser = parse_lags)]
    lags: Option<LagSet>,
    /// none, additive, multiplicative or differences.
    #[arg(long, default_value = "additive", value_parser = ["none", "additive", "multiplicative", "differences"])]
    trend: String,
    /// Apply the additive or multiplicative transform to targets only.
    #[arg(long)]
    targets_only: bool,
    /// Number of differences; estimated with KPSS tests when absent.
    #[arg(long)]
    n_diff: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    min_split: Option<usize>,
    #[arg(long)]
    min_bucket: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    cp: Option<f64>,
    #[arg(long)]
    n_trees: Option<usize>,
    #[arg(long)]
    mtry: Option<usize>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Dataset file (CSV or Monash-style).
    input: Option<PathBuf>,
    /// Series to use when the file holds several.
    #[arg(long)]
    series: Option<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json", "svg"])]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct ForecastArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Forecast horizon; defaults to the file's horizon.
    #[arg(short = 'h', long)]
    horizon: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Load a saved model instead of fitting one.
    #[arg(long, conflicts_with = "input")]
    model_file: Option<PathBuf>,
    /// Save the fitted model as JSON.
    #[arg(long)]
    save_model: Option<PathBuf>,
    #[arg(long, action = ArgAction::Help)]
    help: Option<bool>,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    /// Dataset file (CSV or Monash-style).
    input: PathBuf,
    /// Held-out length for every series, overriding the file's horizon.
    #[arg(short = 'h', long)]
    horizon: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, action = ArgAction::Help)]
    help: Option<bool>,
}

#[derive(Args, Debug)]
struct InspectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Inspect a saved model instead of fitting one.
    #[arg(long, conflicts_with = "input")]
    model_file: Option<PathBuf>,
    /// Also print the training examples.
    #[arg(long)]
    training_set: bool,
    #[arg(long, action = ArgAction::Help)]
    help: Option<bool>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(short = 'h', long)]
    horizon: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Add forecasts under every trend strategy.
    #[arg(long)]
    compare_trends: bool,
    #[arg(long, action = ArgAction::Help)]
    help: Option<bool>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Accepts `a:b` ranges, comma lists and singletons, in any combination.
pub fn parse_lags(s: &str) -> Result<LagSet, String> {
    let mut lags = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let number = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a lag"))
        };
        match part.split_once(':') {
            Some((a, b)) => {
                let (a, b) = (number(a)?, number(b)?);
                if a == 0 || b < a {
                    return Err(format!("invalid lag range `{part}`"));
                }
                lags.extend(a..=b);
            }
            None => lags.push(number(part)?),
        }
    }
    LagSet::new(lags).map_err(|e| e.to_string())
}

/// A failure with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_PARSE } else { EXIT_MODEL };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl ModelArgs {
    fn options(&self) -> CliResult<ModelOptions> {
        let transform_features = !self.targets_only;
        let trend = match self.trend.as_str() {
            "none" => TrendPolicy::None,
            "additive" => TrendPolicy::Additive { transform_features },
            "multiplicative" => TrendPolicy::Multiplicative { transform_features },
            _ => TrendPolicy::Differences { n_diff: self.n_diff },
        };
        if self.n_diff.is_some() && self.trend != "differences" {
            return Err(Failure::usage("--n-diff requires --trend differences"));
        }
        if self.targets_only && !matches!(self.trend.as_str(), "additive" | "multiplicative") {
            return Err(Failure::usage("--targets-only applies to additive or multiplicative trends"));
        }
        let overridden = self.min_split.is_some()
            || self.min_bucket.is_some()
            || self.max_depth.is_some()
            || self.cp.is_some();
        let tree_params = overridden.then(|| {
            let base = if self.method == Method::RegressionTree {
                TreeParams::default()
            } else {
                TreeParams::deep()
            };
            let mut p = match self.min_split {
                Some(m) => TreeParams { cp: base.cp, max_depth: base.max_depth, ..TreeParams::with_min_split(m) },
                None => base,
            };
            if let Some(b) = self.min_bucket {
                p.min_bucket = b;
            }
            if let Some(d) = self.max_depth {
                p.max_depth = d;
            }
            if let Some(cp) = self.cp {
                p.cp = cp;
            }
            p
        });
        if self.method == Method::RegressionTree && (self.n_trees.is_some() || self.mtry.is_some()) {
            return Err(Failure::usage("--n-trees and --mtry apply to ensembles"));
        }
        Ok(ModelOptions {
            lags: self.lags.clone(),
            trend,
            tree_params,
            n_trees: self.n_trees,
            mtry: self.mtry,
            seed: self.seed,
        })
    }
}

fn read_records(path: &Path) -> CliResult<Vec<SeriesFileRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(parse_series_bytes(&bytes)?)
}

fn select_record(input: &InputArgs) -> CliResult<SeriesFileRecord> {
    let path = input
        .input
        .as_deref()
        .ok_or_else(|| Failure::usage("an input file is required"))?;
    let records = read_records(path)?;
    match &input.series {
        Some(name) => records
            .into_iter()
            .find(|r| &r.name == name)
            .ok_or_else(|| Failure::usage(format!("no series named `{name}`"))),
        None if records.len() == 1 => Ok(records.into_iter().next().expect("one record")),
        None => Err(Failure::usage(format!(
            "the file holds {} series; choose one with --series",
            records.len()
        ))),
    }
}

fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(output: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    let result = match output {
        Some(path) => std::fs::write(output_path(path), text),
        None => stdout.write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure {
        code: EXIT_MODEL,
        message: format!("cannot write output: {e}"),
    })
}

fn horizon(explicit: Option<usize>, record: Option<&SeriesFileRecord>) -> CliResult<usize> {
    match explicit.or_else(|| record.and_then(|r| r.horizon)) {
        Some(0) => Err(Failure::usage("horizon must be at least 1")),
        Some(h) => Ok(h),
        None => Err(Failure::usage("no horizon: pass -h or declare one in the file")),
    }
}

fn load_model(path: &Path) -> CliResult<ForecastModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(model_from_json(&text)?)
}

fn cmd_forecast(args: ForecastArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let options = args.model.options()?;
    let format = match args.output.format.as_deref() {
        None | Some("csv") => ForecastFormat::Csv,
        Some("json") => ForecastFormat::Json,
        Some(other) => return Err(Failure::usage(format!("forecast cannot write {other}; use plot"))),
    };
    let (model, record) = match &args.model_file {
        Some(path) => (load_model(path)?, None),
        None => {
            let record = select_record(&args.input)?;
            let series = record.to_series()?;
            (create_model(&series, args.model.method, &options)?, Some(record))
        }
    };
    let h = horizon(args.horizon, record.as_ref())?;
    let result = forecast(&model, h)?;
    if let Some(path) = &args.save_model {
        emit(&Some(path.clone()), &model_to_json(&model), stdout)?;
    }
    emit(&args.output.output, &write_forecast(&result, format), stdout)
}

fn cmd_benchmark(args: BenchmarkArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let options = args.model.options()?;
    if matches!(args.output.format.as_deref(), Some("json" | "svg")) {
        return Err(Failure::usage("benchmark writes csv reports only"));
    }
    let records = read_records(&args.input)?;
    let mut items = Vec::with_capacity(records.len());
    for r in &records {
        let h = horizon(args.horizon, Some(r))?;
        let series = r.to_series()?;
        let (train, actuals) = series.split_tail(h)?;
        items.push(BenchmarkItem {
            id: r.name.clone(),
            train,
            actuals,
        });
    }
    let label = format!("{} ({})", args.model.method.code(), args.model.trend);
    let report = run_benchmark(
        &items,
        &BenchmarkConfig {
            label,
            method: args.model.method,
            options,
        },
    )?;
    emit(&args.output.output, &report.to_text(), stdout)
}

fn cmd_inspect(args: InspectArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let model = match &args.model_file {
        Some(path) => load_model(path)?,
        None => {
            let options = args.model.options()?;
            let series = select_record(&args.input)?.to_series()?;
            create_model(&series, args.model.method, &options)?
        }
    };
    let mut out = describe_model(&model);
    if args.training_set {
        if let Some(ts) = &model.training_set {
            out.push('\n');
            out.push_str(&ts.to_table());
        }
    }
    out.push('\n');
    match &model.regressor {
        Regressor::Tree(tree) => out.push_str(&tree.dump()),
        Regressor::Forest(forest) => {
            out.push_str(&format!("First of {} member trees:\n", forest.trees.len()));
            out.push_str(&forest.trees[0].dump());
        }
    }
    emit(&None, &out, stdout)
}

fn cmd_plot(args: PlotArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if matches!(args.output.format.as_deref(), Some("csv" | "json")) {
        return Err(Failure::usage("plot writes svg only"));
    }
    let options = args.model.options()?;
    let record = select_record(&args.input)?;
    let h = horizon(args.horizon, Some(&record))?;
    let series = record.to_series()?;
    let fit = |opts: &ModelOptions| -> CliResult<ForecastResult> {
        Ok(forecast(&create_model(&series, args.model.method, opts)?, h)?)
    };
    let main = fit(&options)?;
    let mut alternatives: Vec<(String, ForecastResult)> = Vec::new();
    if args.compare_trends {
        let policies = [
            ("no transformation", TrendPolicy::None),
            ("additive", TrendPolicy::Additive { transform_features: true }),
            ("additive, targets only", TrendPolicy::Additive { transform_features: false }),
            ("multiplicative", TrendPolicy::Multiplicative { transform_features: true }),
            ("differences", TrendPolicy::Differences { n_diff: None }),
        ];
        for (name, policy) in policies {
            if policy == options.trend {
                continue;
            }
            let opts = ModelOptions {
                trend: policy,
                ..options.clone()
            };
            match fit(&opts) {
                Ok(f) => alternatives.push((name.to_string(), f)),
                Err(e) => log::warn!("skipping {name}: {}", e.message),
            }
        }
    }
    let alts: Vec<(String, &ForecastResult)> =
        alternatives.iter().map(|(n, f)| (n.clone(), f)).collect();
    emit(&args.output.output, &emit_plot(&series, &main, &alts), stdout)
}

/// Runs the program on `args` (including the binary name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Forecast(a) => cmd_forecast(a, stdout),
        Command::Benchmark(a) => cmd_benchmark(a, stdout),
        Command::Inspect(a) => cmd_inspect(a, stdout),
        Command::Plot(a) => cmd_plot(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lag_syntax() {
        assert_eq!(parse_lags("1:3").unwrap().as_slice(), &[1, 2, 3]);
        assert_eq!(parse_lags("1,2,4").unwrap().as_slice(), &[1, 2, 4]);
        assert_eq!(parse_lags("12").unwrap().as_slice(), &[12]);
        assert_eq!(parse_lags("1:2,12").unwrap().as_slice(), &[1, 2, 12]);
        for bad in ["3:1", "0:2", "0", "a", "1:", "", "1,1"] {
            assert!(parse_lags(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn help_exits_zero_and_usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["treecast", "forecast", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("--horizon"));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["treecast", "forecast", "--lags", "3:1"], &mut out, &mut err), EXIT_USAGE);
        assert!(!err.is_empty());
    }
}
