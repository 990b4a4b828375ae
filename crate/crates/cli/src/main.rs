use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use diagrat_core::annihilator::{find_annihilator, AnnihilatorOptions, OreAnnihilator, DEFAULT_MIN_VERIFY_ORDER};
use diagrat_core::automaton::{synthesize_dfao, Dfao, Emptiness, Finiteness, Periodicity};
use diagrat_core::bounds::{bound_report, BoundConfig, DEFAULT_BIT_BUDGET};
use diagrat_core::cartier::DEFAULT_MAX_STATES;
use diagrat_core::diagonal::{DiagonalMode, DiagonalSpec};
use diagrat_core::rational::parse_rational_in;
use diagrat_core::rationalize::{rationalize_univariate, AlgebraicSeriesSpec};
use diagrat_core::survey::{
    degree_survey, frobenius_factor_check, lucas_check, survey_csv, FrobeniusOutcome, LucasOutcome,
    SequenceFamily, SurveyOptions,
};
use diagrat_core::{parse_rational, series_expand, Error, ErrorClass, RationalFunction, TruncatedSeries};

/// Settings read from the TOML file named by `DIAGRAT_CONFIG` (or
/// `--config`). Flags on the command line win.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Config {
    precision: usize,
    state_budget: usize,
    bit_budget: u64,
    format: Option<String>,
    verbosity: String,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision: 16,
            state_budget: DEFAULT_MAX_STATES,
            bit_budget: DEFAULT_BIT_BUDGET,
            format: None,
            verbosity: "warn".into(),
        }
    }
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Config, Error> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Config = toml::from_str(&text).map_err(|e| Error::Format(format!("config: {e}")))?;
        if cfg.precision == 0 || cfg.state_budget == 0 || cfg.bit_budget == 0 {
            return Err(Error::Format("config budgets must be positive".into()));
        }
        Ok(cfg)
    }

    fn emit<T: ValueEnum + Clone>(&self, flag: Option<T>, fallback: T) -> Result<T, Error> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match &self.format {
            None => Ok(fallback),
            Some(name) => {
                let candidates = T::value_variants();
                candidates
                    .iter()
                    .find(|v| v.to_possible_value().is_some_and(|pv| pv.matches(name, true)))
                    .cloned()
                    .map(Ok)
                    // a format that does not apply to this subcommand is ignored
                    .unwrap_or(Ok(fallback))
            }
        }
    }
}

#[derive(Parser)]
#[command(name = "diagrat", version, about = "Diagonals of rational functions over prime fields")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, env = "DIAGRAT_CONFIG", global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Half,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnnEmit {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum AutEmit {
    Dot,
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Question {
    Empty,
    Finite,
    Periodic,
}

#[derive(Subcommand)]
enum Command {
    /// Print diagonal coefficients mod p.
    Diag {
        /// Expression or path to a file containing one.
        expr: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value = "full")]
        mode: Mode,
    },
    /// Compute (or re-verify) an Ore annihilator of the diagonal.
    Annihilate {
        expr: String,
        #[arg(long)]
        p: u64,
        /// Re-verify a saved annihilator instead of computing one.
        #[arg(long)]
        load: Option<PathBuf>,
        #[arg(long, value_enum)]
        emit: Option<AnnEmit>,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Build the automaton of the diagonal mod p.
    Automaton {
        /// Expression to synthesize from, or to compare a loaded automaton with.
        expr: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        minimize: bool,
        #[arg(long, value_enum)]
        emit: Option<AutEmit>,
        /// Load an automaton saved as JSON.
        #[arg(long)]
        load: Option<PathBuf>,
        /// Number of terms compared or printed for a loaded automaton.
        #[arg(long, default_value_t = 256)]
        terms: usize,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Decide a property of {n : a(n) = b mod p}.
    Decide {
        #[arg(value_enum)]
        question: Question,
        expr: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        b: u32,
        #[arg(long, default_value_t = 64)]
        period_cap: u64,
        #[arg(long, default_value_t = 64)]
        preperiod_cap: u64,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Write a root of P(x, y) = 0 as the diagonal of a rational function.
    Rationalize {
        /// Polynomial in x and y (y is the unknown), or a file path.
        poly: String,
        #[arg(long)]
        p: u64,
        /// Leading coefficients of the root, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        root: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        check: usize,
        #[arg(long, value_enum)]
        emit: Option<AnnEmit>,
    },
    /// Evaluate the degree and height bounds.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        p: Option<u64>,
        /// Fail instead of switching to log2 mode.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum)]
        emit: Option<AnnEmit>,
    },
    /// Check the Lucas property of a family (f6, g2, R1, catalan, central or an expression).
    Lucas {
        family: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 50)]
        n_cap: usize,
        #[arg(long, default_value_t = 50)]
        j_cap: usize,
        /// Also check f = A(x) f(x^p) to this order.
        #[arg(long)]
        frobenius: Option<usize>,
    },
    /// Measure annihilators of a family across primes (CSV).
    Survey {
        family: String,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        max_states: Option<usize>,
    },
}

/// An argument naming an existing file is replaced by the file's contents.
fn read_arg(arg: &str) -> Result<String, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
        Ok(text.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn rational(arg: &str, p: u64) -> Result<RationalFunction, Error> {
    parse_rational(&read_arg(arg)?, p)
}

fn ann_options(cfg: &Config, max_states: Option<usize>) -> AnnihilatorOptions {
    AnnihilatorOptions {
        max_states: max_states.unwrap_or(cfg.state_budget),
        ..AnnihilatorOptions::default()
    }
}

fn join(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<String, Error> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Diag { expr, p, order, mode } => {
            let r = rational(&expr, p)?;
            let order = order.unwrap_or(cfg.precision);
            let spec = match mode {
                Mode::Full => DiagonalSpec::new(DiagonalMode::Full, r.nvars())?,
                Mode::Half => DiagonalSpec::new(DiagonalMode::Half, r.nvars())?,
            };
            let d = spec.apply(&series_expand(&r, order)?, order)?;
            if d.nvars() == 1 {
                return Ok(format!("{}\n", join(d.coeffs())));
            }
            let mut out = String::new();
            for (i, c) in d.coeffs().iter().enumerate() {
                if *c != 0 {
                    out.push_str(&format!("{} {c}\n", join(&d.exponent(i))));
                }
            }
            Ok(out)
        }
        Command::Annihilate {
            expr,
            p,
            load,
            emit,
            max_states,
        } => {
            let r = rational(&expr, p)?;
            let opts = ann_options(&cfg, max_states);
            let ann = match load {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
                    let mut ann = OreAnnihilator::from_json(&text)?;
                    if ann.field() != r.field() {
                        return Err(Error::Format("annihilator was saved for another prime".into()));
                    }
                    let order = ann
                        .default_verify_order(DEFAULT_MIN_VERIFY_ORDER)
                        .max(ann.verified_to_order);
                    let seq = synthesize_dfao(&r, opts.max_states)?.sequence(order);
                    ann.certify(&TruncatedSeries::univariate(r.field(), seq), order)?;
                    ann
                }
                None => find_annihilator(&r, &opts)?.0,
            };
            Ok(match cfg.emit(emit, AnnEmit::Json)? {
                AnnEmit::Json => format!("{}\n", ann.to_json()),
                AnnEmit::Text => render_annihilator(&ann),
            })
        }
        Command::Automaton {
            expr,
            p,
            minimize,
            emit,
            load,
            terms,
            max_states,
        } => {
            let dfao = match (&load, &expr) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
                    Dfao::from_json(&text)?
                }
                (None, Some(expr)) => {
                    let p = p.ok_or_else(|| Error::Precondition("--p is required".into()))?;
                    synthesize_dfao(&rational(expr, p)?, max_states.unwrap_or(cfg.state_budget))?
                }
                (None, None) => return Err(Error::Precondition("give an expression or --load".into())),
            };
            let dfao = if minimize { dfao.minimize() } else { dfao };
            if load.is_some() {
                let seq = dfao.sequence(terms);
                if let Some(expr) = &expr {
                    let r = rational(expr, u64::from(dfao.p()))?;
                    let fresh = synthesize_dfao(&r, max_states.unwrap_or(cfg.state_budget))?.sequence(terms);
                    if fresh != seq {
                        let n = fresh.iter().zip(&seq).position(|(a, b)| a != b).unwrap();
                        return Err(Error::VerifyFail { order: n });
                    }
                }
                if emit.is_none() {
                    return Ok(format!("{}\n", join(&seq)));
                }
            }
            Ok(match cfg.emit(emit, AutEmit::Text)? {
                AutEmit::Dot => dfao.to_dot(),
                AutEmit::Json => format!("{}\n", dfao.to_json()),
                AutEmit::Text => dfao.to_text(),
            })
        }
        Command::Decide {
            question,
            expr,
            p,
            b,
            period_cap,
            preperiod_cap,
            max_states,
        } => {
            let dfao = synthesize_dfao(&rational(&expr, p)?, max_states.unwrap_or(cfg.state_budget))?.minimize();
            let b = b % dfao.p();
            Ok(match question {
                Question::Empty => match dfao.decide_emptiness(b) {
                    Emptiness::Empty => "empty\n".to_string(),
                    Emptiness::Witness(n) => format!("nonempty, least n = {n}\n"),
                },
                Question::Finite => match dfao.decide_finiteness(b) {
                    Finiteness::Finite(set) => format!(
                        "finite {{{}}}\n",
                        set.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
                    ),
                    Finiteness::Infinite { witness, .. } => format!("infinite, least n = {witness}\n"),
                },
                Question::Periodic => match dfao.decide_periodicity(b, period_cap, preperiod_cap) {
                    Periodicity::Periodic { period, preperiod } => format!("periodic({period},{preperiod})\n"),
                    Periodicity::NotPeriodicWithin {
                        period_cap,
                        preperiod_cap,
                    } => format!("not periodic with period <= {period_cap} and preperiod <= {preperiod_cap}\n"),
                },
            })
        }
        Command::Rationalize {
            poly,
            p,
            root,
            check,
            emit,
        } => {
            let text = read_arg(&poly)?;
            let parsed = parse_rational_in(&text, p, Some(2))?;
            if !parsed.denominator().is_one() {
                return Err(Error::Precondition("expected a polynomial in x and y".into()));
            }
            let spec = AlgebraicSeriesSpec::new(parsed.numerator().clone(), root)?;
            let (r, cert) = rationalize_univariate(&spec, check)?;
            Ok(match cfg.emit(emit, AnnEmit::Text)? {
                AnnEmit::Json => {
                    let mut j = cert.to_json();
                    j["rational"] = serde_json::Value::String(r.render());
                    format!("{}\n", serde_json::to_string_pretty(&j).unwrap())
                }
                AnnEmit::Text => format!(
                    "R = {}\nshift i = {}, height {} <= {}, verified to order {}\n",
                    r.render(),
                    cert.shift,
                    cert.height_actual,
                    cert.height_budget,
                    cert.verified_to_order
                ),
            })
        }
        Command::Bounds {
            n,
            d,
            h,
            p,
            strict,
            emit,
        } => {
            let bc = BoundConfig {
                bit_budget: cfg.bit_budget,
                strict,
            };
            let report = bound_report(&bc, n, d, h, p)?;
            Ok(match cfg.emit(emit, AnnEmit::Text)? {
                AnnEmit::Json => format!("{}\n", serde_json::to_string_pretty(&report.to_json()).unwrap()),
                AnnEmit::Text => report.render_table(),
            })
        }
        Command::Lucas {
            family,
            p,
            n_cap,
            j_cap,
            frobenius,
        } => {
            let fam: SequenceFamily = read_arg(&family)?.parse()?;
            let mut out = match lucas_check(&fam, p, n_cap, j_cap)? {
                LucasOutcome::Pass => "pass\n".to_string(),
                LucasOutcome::Counterexample { n, j } => format!("counterexample n={n} j={j}\n"),
            };
            if let Some(m) = frobenius {
                out.push_str(&match frobenius_factor_check(&fam, p, m)? {
                    FrobeniusOutcome::Pass { factor } => format!("frobenius pass, A = {factor}\n"),
                    FrobeniusOutcome::Fail { order } => format!("frobenius fail at x^{order}\n"),
                });
            }
            Ok(out)
        }
        Command::Survey {
            family,
            primes,
            timing,
            max_states,
        } => {
            let fam: SequenceFamily = read_arg(&family)?.parse()?;
            let opts = SurveyOptions {
                annihilator: ann_options(&cfg, max_states),
                timing,
            };
            Ok(survey_csv(&degree_survey(&fam, &primes, &opts)?))
        }
    }
}

fn render_annihilator(ann: &OreAnnihilator) -> String {
    let mut out = String::new();
    for (i, q) in ann.coefficients().iter().enumerate() {
        out.push_str(&format!("Q{i} = {q}\n"));
    }
    out.push_str(&format!(
        "r = {}, degree <= {}, height <= {}, verified to order {}\n",
        ann.r(),
        ann.degree_bound,
        ann.height_bound,
        ann.verified_to_order
    ));
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = cli
        .config
        .as_deref()
        .and_then(|p| Config::load(Some(p)).ok())
        .map(|c| c.verbosity)
        .unwrap_or_else(|| "warn".into());
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            ExitCode::from(match e.class() {
                ErrorClass::Domain => 2,
                ErrorClass::Budget => 3,
                ErrorClass::Verification => 4,
            })
        }
    }
}
