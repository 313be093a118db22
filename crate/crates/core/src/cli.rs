//! Command-line front end. Every subcommand prints one JSON document.
//!
//! Exit codes: 0 when the checked condition holds (or nothing was found),
//! 1 when it fails (or a counterexample was found), 2 on input errors.

use std::ffi::OsString;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::circulant::{self, CirculantWeights, SpectralValue};
use crate::functions::{FunctionSpec, Interval};
use crate::hypothesis::{self, HypothesisError, MAX_ENUMERATION_ORDER};
use crate::inequality::{self, SamplerConfig};
use crate::io::{self, InputError, ModeVote, RawMatrix};
use crate::numerics::{self, Mode, Rational, Scalar, Tolerances};
use crate::stochastic::{self, DoublyStochastic};

pub const THREADS_ENV: &str = "CONVEXITY_GATE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(name = "convexity-gate", version, about = "Doubly stochastic matrices and Jensen-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Arithmetic mode; inferred from the inputs when omitted.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    #[arg(long, global = true)]
    gap_tol: Option<f64>,
    #[arg(long, global = true)]
    stochastic_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a witness pair (A, B) for a doubly stochastic matrix.
    CheckMatrix {
        /// Path to a matrix JSON file, or inline JSON.
        #[arg(long)]
        matrix: String,
    },
    /// Invertibility criteria for a left-circulant matrix.
    CheckCirculant {
        /// Comma-separated weights, e.g. 1/4,1/6,1/4,1/3.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Print the left-circulant matrix generated by the weights.
    BuildCirculant {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Evaluate the inequality at random points.
    Verify {
        #[arg(long)]
        matrix: String,
        /// Function name (exp, abs, negsquare, power:P), JSON file, or inline JSON.
        #[arg(long)]
        function: String,
        /// Open interval as lo,hi; -inf and inf allowed.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Search for a point where the inequality fails.
    Search {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Number of ordered disjoint nonempty subset pairs of {1..n}.
    CountCandidates {
        #[arg(long)]
        n: usize,
    },
    /// Sample matrices of rank >= 2 that admit no witness pair.
    ExploreOpen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

type CmdResult = Result<(i32, Value), InputError>;

/// Parses `args` (program name first) and executes the command. Returns the
/// exit code and the text to print on standard output.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return (0, e.to_string());
        }
        Err(e) => {
            let arg = match e.get(ContextKind::InvalidArg) {
                Some(ContextValue::String(s)) => Some(s.clone()),
                Some(ContextValue::Strings(v)) => v.first().cloned(),
                _ => None,
            };
            let field = arg
                .as_deref()
                .and_then(|s| s.split_whitespace().next())
                .map_or("argv".to_string(), |s| s.trim_start_matches('-').replace('-', "_"));
            let rendered = e.render().to_string();
            let msg: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(|l| l.trim().trim_start_matches("error: "))
                .collect();
            return render(Err(InputError::new(field, msg.join(" "))));
        }
    };
    let result = match thread_count() {
        Err(e) => Err(e),
        Ok(None) => execute(&cli),
        Ok(Some(k)) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(InputError::new(THREADS_ENV, e.to_string())),
        },
    };
    render(result)
}

fn render(result: CmdResult) -> (i32, String) {
    let (code, value) = match result {
        Ok(ok) => ok,
        Err(e) => (2, e.to_json()),
    };
    (code, serde_json::to_string_pretty(&value).expect("JSON values serialize"))
}

fn thread_count() -> Result<Option<usize>, InputError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(InputError::new(THREADS_ENV, format!("expected a positive integer, got {s:?}"))),
        },
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, InputError> {
    let mut tol = Tolerances::default();
    let overrides = [
        ("rank_tol", cli.rank_tol, &mut tol.rank_tol),
        ("residual_tol", cli.residual_tol, &mut tol.residual_tol),
        ("gap_tol", cli.gap_tol, &mut tol.gap_tol),
        ("stochastic_tol", cli.stochastic_tol, &mut tol.stochastic_tol),
    ];
    for (name, value, slot) in overrides {
        if let Some(v) = value {
            if !(v.is_finite() && v >= 0.0) {
                return Err(InputError::new(name, "tolerance must be a nonnegative number"));
            }
            *slot = v;
        }
    }
    Ok(tol)
}

fn requested_mode(cli: &Cli) -> Option<Mode> {
    cli.mode.map(|m| match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    })
}

fn load_json(arg: &str, field: &str) -> Result<Value, InputError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| InputError::new(field, format!("cannot read {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| InputError::new(field, format!("invalid JSON: {e}")))
}

fn load_function(arg: &str) -> Result<(FunctionSpec, Option<Interval>), InputError> {
    let named = match arg.trim() {
        "exp" => Some(FunctionSpec::exp()),
        "abs" => Some(FunctionSpec::abs()),
        "negsquare" => Some(FunctionSpec::neg_square()),
        s => match s.strip_prefix("power:") {
            Some(p) => {
                let p = io::parse_rational_str(p)
                    .or_else(|| io::parse_decimal_exact(p))
                    .ok_or_else(|| InputError::new("function", format!("bad exponent {p:?}")))?;
                Some(FunctionSpec::power(p).map_err(|e| InputError::new("function", e.to_string()))?)
            }
            None => None,
        },
    };
    match named {
        Some(f) => Ok((f, None)),
        None => io::read_function(&load_json(arg, "function")?, "function"),
    }
}

fn validated<S: Scalar>(raw: &RawMatrix, tol: &Tolerances) -> Result<DoublyStochastic<S>, InputError> {
    stochastic::validate(raw.to_matrix::<S>(), tol).map_err(|e| InputError::new("matrix", e.to_string()))
}

fn hypothesis_error(field: &str, e: HypothesisError) -> InputError {
    InputError::new(field, e.to_string())
}

fn execute(cli: &Cli) -> CmdResult {
    let tol = tolerances(cli)?;
    let requested = requested_mode(cli);
    match &cli.command {
        Command::CheckMatrix { matrix } => {
            let raw = io::read_matrix(&load_json(matrix, "matrix")?, "matrix")?;
            let mut vote = ModeVote::default();
            raw.vote(&mut vote, "matrix");
            match vote.resolve(requested, false)? {
                Mode::Exact => check_matrix::<Rational>(&raw, &tol),
                Mode::Float => check_matrix::<f64>(&raw, &tol),
            }
        }
        Command::CheckCirculant { weights } | Command::BuildCirculant { weights } => {
            let tokens = io::parse_weights(weights, "weights")?;
            let mut vote = ModeVote::default();
            for (i, t) in tokens.iter().enumerate() {
                vote.record(t, &format!("weights[{i}]"));
            }
            let build = matches!(cli.command, Command::BuildCirculant { .. });
            match vote.resolve(requested, false)? {
                Mode::Exact => circulant_cmd::<Rational>(&tokens, build, &tol),
                Mode::Float => circulant_cmd::<f64>(&tokens, build, &tol),
            }
        }
        Command::Verify { matrix, function, interval, samples, seed } => {
            let job = InequalityJob::load(matrix, function, interval.as_deref(), *seed)?;
            match job.mode(requested)? {
                Mode::Exact => job.verify::<Rational>(*samples, &tol),
                Mode::Float => job.verify::<f64>(*samples, &tol),
            }
        }
        Command::Search { matrix, function, interval, budget, seed } => {
            let job = InequalityJob::load(matrix, function, interval.as_deref(), *seed)?;
            match job.mode(requested)? {
                Mode::Exact => job.search::<Rational>(*budget, &tol),
                Mode::Float => job.search::<f64>(*budget, &tol),
            }
        }
        Command::CountCandidates { n } => {
            let count = hypothesis::candidate_count(*n).map_err(|e| hypothesis_error("n", e))?;
            let count = u64::try_from(count).map_or_else(|_| json!(count.to_string()), |c| json!(c));
            Ok((0, json!({ "n": n, "count": count })))
        }
        Command::ExploreOpen { n, samples, seed } => {
            if requested == Some(Mode::Float) {
                return Err(InputError::new("mode", "explore-open runs in exact mode only"));
            }
            let found = hypothesis::explore_open_problem(*n, *samples, *seed, &tol)
                .map_err(|e| hypothesis_error("n", e))?;
            let matrices: Vec<Value> = found.iter().map(|p| io::matrix_to_json(p.matrix())).collect();
            let code = if matrices.is_empty() { 0 } else { 1 };
            Ok((
                code,
                json!({ "n": n, "samples": samples, "seed": seed, "mode": "exact", "matrices": matrices }),
            ))
        }
    }
}

fn check_matrix<S: Scalar>(raw: &RawMatrix, tol: &Tolerances) -> CmdResult {
    let p = validated::<S>(raw, tol)?;
    let search = hypothesis::find_witness(&p, tol).map_err(|e| hypothesis_error("matrix", e))?;
    let witness = search.witness.as_ref().map(io::witness_to_json);
    let code = if witness.is_some() { 0 } else { 1 };
    Ok((
        code,
        json!({
            "mode": S::MODE.as_str(),
            "n": p.n(),
            "rank": search.rank,
            "holds": witness.is_some(),
            "witness": witness,
            "pairs_visited": search.pairs_visited,
            "shortcut": search.shortcut,
        }),
    ))
}

fn spectral_string(v: &SpectralValue) -> String {
    match v {
        SpectralValue::Exact(z) => z.to_string(),
        SpectralValue::Float(z) => format!("{} + ({})i", z.re, z.im),
    }
}

fn circulant_cmd<S: Scalar>(tokens: &[io::Number], build: bool, tol: &Tolerances) -> CmdResult {
    let lambda: Vec<S> = tokens.iter().map(io::Number::to_scalar).collect();
    let w = CirculantWeights::new(lambda, tol).map_err(|e| InputError::new("weights", e.to_string()))?;
    let p = w
        .build_matrix(tol)
        .map_err(|e| InputError::new("weights", e.to_string()))?;
    if build {
        return Ok((0, io::matrix_to_json(p.matrix())));
    }
    let n = w.n();
    let closed_form = if (2..=4).contains(&n) {
        let v = circulant::closed_form_check(&w, tol).map_err(|e| InputError::new("weights", e.to_string()))?;
        json!({ "holds": v.holds, "failing_clauses": v.failing_clauses })
    } else {
        Value::Null
    };
    let spectrum = circulant::dft_spectrum(&w);
    let invertible = circulant::is_invertible(&w, tol);
    let degeneracy = if n % 2 == 0 {
        circulant::even_n_degeneracy(&w, tol)
            .map_err(|e| InputError::new("weights", e.to_string()))?
            .map(|(odd, even)| {
                json!({ "odd_sum": io::scalar_to_json(&odd), "even_sum": io::scalar_to_json(&even) })
            })
    } else {
        None
    };
    let rank = numerics::rank(p.matrix(), tol).map_err(|e| InputError::new("weights", e.to_string()))?;

    let n4_pair = if n == 4 && !invertible {
        circulant::n4_degenerate_witness(&w, tol).ok().flatten()
    } else {
        None
    };
    let witness = match n4_pair {
        Some(pair) => hypothesis::check_pair(&p, &pair, tol).map_err(|e| hypothesis_error("weights", e))?,
        None if n <= MAX_ENUMERATION_ORDER => {
            hypothesis::find_witness(&p, tol)
                .map_err(|e| hypothesis_error("weights", e))?
                .witness
        }
        None => None,
    };
    let code = if invertible { 0 } else { 1 };
    Ok((
        code,
        json!({
            "mode": S::MODE.as_str(),
            "n": n,
            "weights": w.lambda().iter().map(io::scalar_to_json).collect::<Vec<_>>(),
            "closed_form": closed_form,
            "dft": {
                "invertible": invertible,
                "exact": spectrum.is_exact(),
                "values": spectrum.values.iter().map(spectral_string).collect::<Vec<_>>(),
            },
            "rank": rank,
            "degeneracy": degeneracy,
            "witness": witness.as_ref().map(io::witness_to_json),
        }),
    ))
}

struct InequalityJob {
    raw: RawMatrix,
    function: FunctionSpec,
    interval: Interval,
    seed: u64,
}

impl InequalityJob {
    fn load(matrix: &str, function: &str, interval: Option<&str>, seed: u64) -> Result<Self, InputError> {
        let raw = io::read_matrix(&load_json(matrix, "matrix")?, "matrix")?;
        let (function, from_json) = load_function(function)?;
        let interval = match interval {
            Some(s) => io::parse_interval_arg(s, "interval")?,
            None => from_json.unwrap_or_else(Interval::real_line),
        };
        function
            .validate_on(&interval)
            .map_err(|e| InputError::new("function", e.to_string()))?;
        Ok(InequalityJob { raw, function, interval, seed })
    }

    fn mode(&self, requested: Option<Mode>) -> Result<Mode, InputError> {
        let mut vote = ModeVote::default();
        self.raw.vote(&mut vote, "matrix");
        let exact_ok = self.function.is_exact_evaluable();
        let mode = vote.resolve(requested, !exact_ok)?;
        if mode == Mode::Exact && !exact_ok {
            return Err(InputError::new(
                "function",
                "exp and non-integer powers need float mode",
            ));
        }
        Ok(mode)
    }

    fn verify<S: Scalar>(&self, samples: usize, tol: &Tolerances) -> CmdResult {
        let p = validated::<S>(&self.raw, tol)?;
        let report = inequality::verify(&p, &self.function, &self.interval, &SamplerConfig::new(self.seed), samples, tol)
            .map_err(|e| InputError::new("samples", e.to_string()))?;
        let code = if report.num_violations > 0 { 1 } else { 0 };
        Ok((code, io::report_to_json(&report)))
    }

    fn search<S: Scalar>(&self, budget: usize, tol: &Tolerances) -> CmdResult {
        let p = validated::<S>(&self.raw, tol)?;
        let found = inequality::search_violation(&p, &self.function, &self.interval, &SamplerConfig::new(self.seed), budget, tol)
            .map_err(|e| InputError::new("budget", e.to_string()))?;
        let code = if found.is_some() { 1 } else { 0 };
        Ok((
            code,
            json!({
                "mode": S::MODE.as_str(),
                "witness": found.as_ref().map(io::violation_to_json),
            }),
        ))
    }
}
