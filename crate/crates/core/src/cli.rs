//! Command-line front end.
//!
//! Exit codes: 0 success or verification pass, 1 verification failure,
//! 2 invalid input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::bounds::{
    bound_thm_i, epidemic_bound, extremes_bound, sampling_bound, unif_window_bound, BoundBreakdown,
};
use crate::coupling::{nd_condition_p, zip_coupling};
use crate::dist::{kolmogorov_to_std_normal, tv_distance, Pmf, TruncationPolicy};
use crate::error::{Error, Result};
use crate::models::{
    empirical_tv, epidemic_moments_fixed_degree, epidemic_simulate, extremes_simulate,
    extremes_window_stats, lightbulb_exact, lightbulb_simulate, sample_pmf, sampling_exact,
    zip_pmf, DegreeSpec, EmpiricalLaw, ModelSpec,
};
use crate::normal_approx::{lightbulb_bound, lightbulb_composition};
use crate::poincare::{poincare_bound_logconcave, poincare_oracle, poincare_report, zip_poincare_bound};
use crate::report::{render, Format, Report};

pub const DEFAULT_SEED: u64 = 20_240_601;
/// Allowance for comparisons against exact oracles.
pub const EXACT_SLACK: f64 = 1e-9;
/// Truncation used for Poisson targets of Poincaré checks.
const POINCARE_TAIL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "steinlab", version, about = "Approximation bounds checked against exact and Monte Carlo oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for Monte Carlo runs.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo replicates.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "STEINLAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the bound for a model.
    Bound(ModelCmd),
    /// Evaluate the exact or closed-form reference quantity.
    Oracle(ModelCmd),
    /// Run the Monte Carlo simulator.
    Simulate(ModelCmd),
    /// Compare bound and oracle; exit 1 when the bound fails.
    Verify(ModelCmd),
}

#[derive(Debug, Args)]
pub struct ModelCmd {
    #[command(subcommand)]
    pub model: ModelArgs,
}

#[derive(Debug, Subcommand)]
pub enum ModelArgs {
    /// Zero-inflated Poisson.
    Zip {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        lambda: f64,
        /// Approximating mean to use instead of λ.
        #[arg(long)]
        lambda_used: Option<f64>,
        /// Coupling probability to use instead of the extracted one. Values
        /// above the admissible maximum are accepted so that `verify` can
        /// show the bound failing once its hypothesis does.
        #[arg(long)]
        p_used: Option<f64>,
    },
    /// Sum of a sample drawn without replacement.
    Sampling {
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[arg(long)]
        m: usize,
    },
    /// Isolated vertices and epidemic survivors of a random digraph.
    Epidemic {
        #[arg(long)]
        n: usize,
        /// Fixed out-degree.
        #[arg(long, conflicts_with = "psi")]
        d: Option<usize>,
        /// Binomial out-degrees with rate ψ log(n) / (n - 1).
        #[arg(long)]
        psi: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Exceedances of moving sums of uniforms.
    Extremes {
        #[arg(long)]
        n: u64,
        /// Length of the dependent block; defaults to n.
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        lambda: f64,
    },
    /// Lightbulb process with binomial noise.
    Lightbulb {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        k: u64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Use τ² = n/4 instead of the exact variance.
        #[arg(long)]
        tau_approx: bool,
    },
    /// Poincaré constant of a named law.
    Poincare {
        #[arg(long, value_enum)]
        dist: PoincareDist,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoincareDist {
    Poisson,
    Bernoulli,
    Binomial,
    Zip,
}

/// Outcome of a command: the report and whether it counts as a pass.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

fn need(name: &'static str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::param(name, "required for this distribution"))
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

impl ModelArgs {
    /// The model parameters as a [`ModelSpec`], when the model has one.
    pub fn spec(&self) -> Option<ModelSpec> {
        Some(match self {
            ModelArgs::Zip { p, lambda, .. } => ModelSpec::Zip { p: *p, lambda: *lambda },
            ModelArgs::Sampling { values, m } => ModelSpec::Sampling {
                values: values.clone(),
                m: *m,
            },
            ModelArgs::Epidemic { n, d, psi, q } => ModelSpec::Epidemic {
                n: *n,
                degrees: degree_spec(*d, *psi).ok()?,
                q: *q,
            },
            ModelArgs::Extremes { n, m, lambda } => ModelSpec::Extremes {
                n: *n,
                m: m.unwrap_or(*n),
                lambda: *lambda,
            },
            ModelArgs::Lightbulb { n, .. } => ModelSpec::Lightbulb { n: *n },
            ModelArgs::Poincare { .. } => return None,
        })
    }
}

fn degree_spec(d: Option<usize>, psi: Option<f64>) -> Result<DegreeSpec> {
    match (d, psi) {
        (Some(d), None) => Ok(DegreeSpec::Fixed { d }),
        (None, Some(psi)) => Ok(DegreeSpec::Binomial { psi }),
        _ => Err(Error::param("d", "give exactly one of --d and --psi")),
    }
}

fn poincare_law(dist: PoincareDist, lambda: Option<f64>, q: Option<f64>, n: Option<u64>, p: Option<f64>) -> Result<Pmf> {
    let tail = TruncationPolicy::new(POINCARE_TAIL)?;
    match dist {
        PoincareDist::Poisson => Pmf::poisson(need("lambda", lambda)?, tail),
        PoincareDist::Bernoulli => Pmf::bernoulli(need("q", q)?),
        PoincareDist::Binomial => Pmf::binomial(
            n.ok_or_else(|| Error::param("n", "required for this distribution"))?,
            need("q", q)?,
        ),
        PoincareDist::Zip => zip_pmf(need("p", p)?, need("lambda", lambda)?, tail),
    }
}

struct ZipBound {
    p_max: f64,
    admissible: bool,
    mu: f64,
    var: f64,
    bound: BoundBreakdown,
}

fn zip_bound(p: f64, lambda: f64, lambda_used: Option<f64>, p_used: Option<f64>) -> Result<ZipBound> {
    let c = zip_coupling(p, lambda, policy())?;
    let p_max = nd_condition_p(&c);
    let p_used = p_used.unwrap_or(p_max);
    let mu = p * lambda;
    let var = p * lambda + p * (1.0 - p) * lambda * lambda;
    let bound = bound_thm_i(mu, var, p_used, lambda_used.unwrap_or(lambda))?;
    Ok(ZipBound {
        p_max,
        admissible: p_used <= p_max + 1e-12,
        mu,
        var,
        bound,
    })
}

fn lightbulb_tau(n: u64, approx: bool) -> Result<(f64, Option<Pmf>)> {
    if approx {
        if n < 2 || n % 2 == 1 {
            return Err(Error::param("n", format!("must be even and >= 2, got {n}")));
        }
        Ok((n as f64 / 4.0, None))
    } else {
        let w = lightbulb_exact(n)?;
        Ok((w.variance(), Some(w)))
    }
}

fn empirical_summary(e: &EmpiricalLaw, target: &Pmf) -> Result<Value> {
    let tv = empirical_tv(e, target);
    Ok(Report::new()
        .with("law", e)?
        .with("mean", &e.mean())?
        .with("variance", &e.variance())?
        .with("mean_stderr", &e.mean_stderr())?
        .with("tv_hat", &tv.tv_hat)?
        .with("slack", &tv.slack)?
        .into_value())
}

fn cmd_bound(model: &ModelArgs) -> Result<Outcome> {
    let report = match model {
        ModelArgs::Zip {
            p,
            lambda,
            lambda_used,
            p_used,
        } => {
            let z = zip_bound(*p, *lambda, *lambda_used, *p_used)?;
            Report::new()
                .with("mu", &z.mu)?
                .with("var", &z.var)?
                .with("p_max", &z.p_max)?
                .with("admissible", &z.admissible)?
                .with("bound", &z.bound)?
        }
        ModelArgs::Sampling { values, m } => Report::new().with("sampling", &sampling_bound(values, *m)?)?,
        ModelArgs::Epidemic { n, d, psi, q } => {
            let d = match degree_spec(*d, *psi)? {
                DegreeSpec::Fixed { d } => d,
                DegreeSpec::Binomial { .. } => {
                    return Err(Error::OracleUnavailable(
                        "the bound needs fixed degrees (closed-form Var W)".into(),
                    ))
                }
            };
            let (ew, var) = epidemic_moments_fixed_degree(*n, d)?;
            Report::new()
                .with("capital_lambda", &ew)?
                .with("var_w", &var)?
                .with("bound", &epidemic_bound(ew, var, *q)?)?
        }
        ModelArgs::Extremes { n, m, lambda } => {
            let m = m.unwrap_or(*n);
            let s = extremes_window_stats(*n, m, *lambda)?;
            Report::new()
                .with("moments", &s)?
                .with("window_bound", &unif_window_bound(*n, m, *lambda, s.ew, s.mean_x, s.var_x)?)?
                .with("variance_bound", &extremes_bound(*n, m, *lambda, s.var)?)?
        }
        ModelArgs::Lightbulb {
            n,
            k,
            alpha,
            tau_approx,
        } => {
            let (tau_sq, _) = lightbulb_tau(*n, *tau_approx)?;
            Report::new()
                .with("tau_sq", &tau_sq)?
                .with("tau_sq_exact", &!tau_approx)?
                .with("composition", &lightbulb_composition(*n, *k, *alpha, tau_sq)?)?
                .with("proposition", &lightbulb_bound(*n, *k, *alpha, tau_sq)?)?
        }
        ModelArgs::Poincare { dist, lambda, q, n, p } => {
            let d = poincare_law(*dist, *lambda, *q, *n, *p)?;
            let mut r = Report::new().with("failure_rate_bound", &poincare_report(&d)?.bound)?;
            if let Ok(b) = poincare_bound_logconcave(&d) {
                r = r.with("logconcave_bound", &b)?;
            }
            if *dist == PoincareDist::Zip {
                r = r.with("zip_bound", &zip_poincare_bound(need("p", *p)?, need("lambda", *lambda)?)?)?;
            }
            r
        }
    };
    Ok(Outcome {
        report: report.into_value(),
        pass: true,
    })
}

fn cmd_oracle(model: &ModelArgs) -> Result<Outcome> {
    let report = match model {
        ModelArgs::Zip { p, lambda, .. } => {
            let z = zip_pmf(*p, *lambda, policy())?;
            let tv = tv_distance(&z, &Pmf::poisson(*lambda, policy())?);
            Report::new().with("tv", &tv)?.with("law", &z)?
        }
        ModelArgs::Sampling { values, m } => {
            let d = sampling_exact(values, *m)?;
            let tv = tv_distance(&d, &Pmf::poisson(d.mean(), policy())?);
            Report::new().with("tv", &tv)?.with("law", &d)?
        }
        ModelArgs::Epidemic { n, d, psi, .. } => match degree_spec(*d, *psi)? {
            DegreeSpec::Fixed { d } => {
                let (ew, var) = epidemic_moments_fixed_degree(*n, d)?;
                Report::new().with("capital_lambda", &ew)?.with("var_w", &var)?
            }
            DegreeSpec::Binomial { .. } => {
                return Err(Error::OracleUnavailable(
                    "no closed form for binomial degrees; use simulate".into(),
                ))
            }
        },
        ModelArgs::Extremes { n, m, lambda } => {
            Report::new().with("moments", &extremes_window_stats(*n, m.unwrap_or(*n), *lambda)?)?
        }
        ModelArgs::Lightbulb { n, k, alpha, .. } => {
            let w = lightbulb_exact(*n)?;
            let y = w.convolve(&Pmf::binomial(*k, *alpha)?);
            let (mu, var) = y.moments();
            Report::new()
                .with("tau_sq", &w.variance())?
                .with("d_k", &kolmogorov_to_std_normal(&y, mu, var.sqrt())?)?
                .with("law_w", &w)?
        }
        ModelArgs::Poincare { dist, lambda, q, n, p } => {
            let d = poincare_law(*dist, *lambda, *q, *n, *p)?;
            Report::new()
                .with("oracle", &poincare_oracle(&d)?)?
                .with("variance", &d.variance())?
                .with("truncated", &d.is_truncated())?
        }
    };
    Ok(Outcome {
        report: report.into_value(),
        pass: true,
    })
}

fn cmd_simulate(model: &ModelArgs, g: &GlobalOpts) -> Result<Outcome> {
    let report = match model {
        ModelArgs::Zip { p, lambda, .. } => {
            let e = sample_pmf(&zip_pmf(*p, *lambda, policy())?, g.reps, g.seed)?;
            Report::new().with("zip", &empirical_summary(&e, &Pmf::poisson(*lambda, policy())?)?)?
        }
        ModelArgs::Sampling { values, m } => {
            let d = sampling_exact(values, *m)?;
            let e = sample_pmf(&d, g.reps, g.seed)?;
            Report::new().with("sampling", &empirical_summary(&e, &Pmf::poisson(d.mean(), policy())?)?)?
        }
        ModelArgs::Epidemic { n, d, psi, q } => {
            let degrees = degree_spec(*d, *psi)?;
            let laws = epidemic_simulate(*n, degrees, *q, g.reps, g.seed)?;
            let target_mean = match degrees {
                DegreeSpec::Fixed { d } => epidemic_moments_fixed_degree(*n, d)?.0,
                DegreeSpec::Binomial { psi } => (*n as f64).powf(1.0 - psi),
            };
            let target = Pmf::poisson(target_mean, policy())?;
            Report::new()
                .with("target_mean", &target_mean)?
                .with("isolated", &empirical_summary(&laws.isolated, &target)?)?
                .with("survivors", &empirical_summary(&laws.survivors, &target)?)?
        }
        ModelArgs::Extremes { n, m, lambda } => {
            let e = extremes_simulate(*n, m.unwrap_or(*n), *lambda, g.reps, g.seed)?;
            Report::new().with("extremes", &empirical_summary(&e, &Pmf::poisson(*lambda, policy())?)?)?
        }
        ModelArgs::Lightbulb { n, .. } => {
            let e = lightbulb_simulate(*n, g.reps, g.seed)?;
            Report::new().with("lightbulb", &empirical_summary(&e, &lightbulb_exact(*n)?)?)?
        }
        ModelArgs::Poincare { .. } => {
            return Err(Error::OracleUnavailable("nothing to simulate for poincare".into()))
        }
    };
    let report = report.with("seed", &g.seed)?.with("reps", &g.reps)?;
    Ok(Outcome {
        report: report.into_value(),
        pass: true,
    })
}

#[derive(Serialize)]
struct Verdict {
    bound: f64,
    oracle: f64,
    slack: f64,
    pass: bool,
}

impl Verdict {
    fn new(bound: f64, oracle: f64, slack: f64) -> Self {
        Verdict {
            bound,
            oracle,
            slack,
            pass: oracle <= bound + slack,
        }
    }
}

fn cmd_verify(model: &ModelArgs, g: &GlobalOpts) -> Result<Outcome> {
    let (verdict, details) = match model {
        ModelArgs::Zip {
            p,
            lambda,
            lambda_used,
            p_used,
        } => {
            let z = zip_bound(*p, *lambda, *lambda_used, *p_used)?;
            let law = zip_pmf(*p, *lambda, policy())?;
            let target = Pmf::poisson(lambda_used.unwrap_or(*lambda), policy())?;
            let tv = tv_distance(&law, &target);
            (
                Verdict::new(z.bound.total, tv.value, EXACT_SLACK + tv.error),
                Report::new()
                    .with("admissible", &z.admissible)?
                    .with("breakdown", &z.bound)?,
            )
        }
        ModelArgs::Sampling { values, m } => {
            let s = sampling_bound(values, *m)?;
            let law = sampling_exact(values, *m)?;
            let tv = tv_distance(&law, &Pmf::poisson(s.mu, policy())?);
            (
                Verdict::new(s.bound.total, tv.value, EXACT_SLACK + tv.error),
                Report::new().with("sampling", &s)?,
            )
        }
        ModelArgs::Epidemic { n, d, psi, q } => {
            let d = match degree_spec(*d, *psi)? {
                DegreeSpec::Fixed { d } => d,
                DegreeSpec::Binomial { .. } => {
                    return Err(Error::OracleUnavailable(
                        "verification needs fixed degrees (closed-form Var W)".into(),
                    ))
                }
            };
            let (ew, var) = epidemic_moments_fixed_degree(*n, d)?;
            let b = epidemic_bound(ew, var, *q)?;
            let laws = epidemic_simulate(*n, DegreeSpec::Fixed { d }, *q, g.reps, g.seed)?;
            let tv = empirical_tv(&laws.isolated, &Pmf::poisson(ew, policy())?);
            (
                Verdict::new(b.total, tv.tv_hat, 3.0 * tv.slack),
                Report::new()
                    .with("breakdown", &b)?
                    .with("seed", &g.seed)?
                    .with("reps", &g.reps)?,
            )
        }
        ModelArgs::Extremes { n, m, lambda } => {
            let m = m.unwrap_or(*n);
            let s = extremes_window_stats(*n, m, *lambda)?;
            let b = unif_window_bound(*n, m, *lambda, s.ew, s.mean_x, s.var_x)?;
            let e = extremes_simulate(*n, m, *lambda, g.reps, g.seed)?;
            let tv = empirical_tv(&e, &Pmf::poisson(*lambda, policy())?);
            (
                Verdict::new(b.total, tv.tv_hat, 3.0 * tv.slack),
                Report::new()
                    .with("breakdown", &b)?
                    .with("seed", &g.seed)?
                    .with("reps", &g.reps)?,
            )
        }
        ModelArgs::Lightbulb {
            n,
            k,
            alpha,
            tau_approx,
        } => {
            let (tau_sq, w) = lightbulb_tau(*n, *tau_approx)?;
            let w = match w {
                Some(w) => w,
                None => lightbulb_exact(*n)?,
            };
            let y = w.convolve(&Pmf::binomial(*k, *alpha)?);
            let (mu, var) = y.moments();
            let d_k = kolmogorov_to_std_normal(&y, mu, var.sqrt())?;
            let comp = lightbulb_composition(*n, *k, *alpha, tau_sq)?;
            let prop = lightbulb_bound(*n, *k, *alpha, tau_sq)?;
            (
                Verdict::new(comp.total.min(1.0), d_k, EXACT_SLACK),
                Report::new()
                    .with("composition", &comp)?
                    .with("proposition", &prop)?
                    .with("proposition_holds", &(d_k <= prop.total.min(1.0) + EXACT_SLACK))?,
            )
        }
        ModelArgs::Poincare { dist, lambda, q, n, p } => {
            let d = poincare_law(*dist, *lambda, *q, *n, *p)?;
            let r = poincare_report(&d)?;
            let oracle = r
                .oracle
                .ok_or_else(|| Error::OracleUnavailable("degenerate law".into()))?;
            let mut bound = r.bound;
            if let Ok(b) = poincare_bound_logconcave(&d) {
                bound = bound.min(b);
            }
            if *dist == PoincareDist::Zip {
                bound = bound.min(zip_poincare_bound(need("p", *p)?, need("lambda", *lambda)?)?);
            }
            let lower_ok = r.lower_bound_var <= oracle + EXACT_SLACK;
            let mut v = Verdict::new(bound, oracle, EXACT_SLACK);
            v.pass &= lower_ok;
            (
                v,
                Report::new()
                    .with("result", &r)?
                    .with("variance_below_oracle", &lower_ok)?,
            )
        }
    };
    let pass = verdict.pass;
    let report = Report::new()
        .with("bound", &verdict.bound)?
        .with("oracle", &verdict.oracle)?
        .with("slack", &verdict.slack)?
        .with("pass", &verdict.pass)?
        .with("details", &details.into_value())?;
    Ok(Outcome {
        report: report.into_value(),
        pass,
    })
}

/// Runs a parsed command and returns the rendered report and exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32)> {
    let go = || -> Result<Outcome> {
        let (Command::Bound(m) | Command::Oracle(m) | Command::Simulate(m) | Command::Verify(m)) =
            &cli.command;
        if let Some(spec) = m.model.spec() {
            spec.validate()?;
        }
        match &cli.command {
            Command::Bound(m) => cmd_bound(&m.model),
            Command::Oracle(m) => cmd_oracle(&m.model),
            Command::Simulate(m) => cmd_simulate(&m.model, &cli.global),
            Command::Verify(m) => cmd_verify(&m.model, &cli.global),
        }
    };
    let outcome = match cli.global.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::param("threads", e.to_string()))?
            .install(go),
        None => go(),
    }?;
    let text = render(&outcome.report, cli.global.format)?;
    Ok((text, if outcome.pass { 0 } else { 1 }))
}

/// Parses `args`, runs the command and writes the report; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let written = match &cli.global.output {
                Some(path) => std::fs::write(path, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
