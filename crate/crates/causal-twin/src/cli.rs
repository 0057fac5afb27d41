//! Command-line front end.
//!
//! Exit codes are part of the contract so scripts can branch on them:
//! 0 success, 1 usage error, 2 data or graph error, 3 not identified.
//! Stochastic subcommands refuse to run without an explicit `--seed`.

use crate::bayes::{
    abc_nonidentifiable, fit_frontdoor, fit_posteriors, forward_sample, frontdoor_predictive,
    posterior_predictive, AbcConfig,
};
use crate::convergence::{rows_to_csv, run_convergence};
use crate::cpt::CptSet;
use crate::data::{empirical_joint, load_counts};
use crate::docalc::{evaluate_estimand, identify, IdentificationResult, Method};
use crate::dsl::parse_graph;
use crate::graph::CausalGraph;
use crate::twin::causal_bayes_construct;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NOT_IDENTIFIED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "causal-twin",
    version,
    about = "Interventional inference on discrete causal models, via the do-calculus and via Bayesian twin models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TwinFormat {
    Dot,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum InferMethod {
    /// Rejection sampling over the latent-confounder parameterization.
    Abc,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Identify P(outcome | do(treatment)) and print the estimand.
    Identify {
        /// Graph file (.cg)
        #[arg(long)]
        graph: PathBuf,
        /// Treatment variable name
        #[arg(long = "do")]
        treatment: String,
        /// Outcome variable name
        #[arg(long)]
        outcome: String,
    },
    /// Build the paired pre/post-intervention model and print it.
    Construct {
        /// Graph file (.cg)
        #[arg(long)]
        graph: PathBuf,
        /// Intervention as NAME=STATE
        #[arg(long = "do")]
        intervention: String,
        #[arg(long, value_enum, default_value_t = TwinFormat::Dot)]
        format: TwinFormat,
    },
    /// Estimate the effect from data along both routes.
    Infer {
        /// Graph file (.cg)
        #[arg(long)]
        graph: PathBuf,
        /// Grouped-counts CSV
        #[arg(long)]
        data: PathBuf,
        /// Intervention as NAME=STATE
        #[arg(long = "do")]
        intervention: String,
        /// Outcome variable name
        #[arg(long)]
        outcome: String,
        /// Prior pseudo-count per CPT cell
        #[arg(long, default_value_t = 1.0)]
        prior: f64,
        /// Force a method instead of the identified estimand
        #[arg(long, value_enum)]
        method: Option<InferMethod>,
        /// Latent confounder cardinality (abc)
        #[arg(long)]
        latent_card: Option<usize>,
        /// Acceptance tolerance on the observable joint (abc)
        #[arg(long)]
        epsilon: Option<f64>,
        /// Number of parameter draws (abc)
        #[arg(long)]
        samples: Option<u64>,
        /// RNG seed (required for abc)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward-sample a grouped-counts dataset from known CPTs.
    Simulate {
        /// Graph file (.cg)
        #[arg(long)]
        graph: PathBuf,
        /// CPT file (.json)
        #[arg(long)]
        cpts: PathBuf,
        /// Number of observations
        #[arg(long)]
        m: u64,
        /// RNG seed
        #[arg(long)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample-size convergence study comparing both routes to ground truth.
    Converge {
        /// Graph file (.cg)
        #[arg(long)]
        graph: PathBuf,
        /// CPT file (.json)
        #[arg(long)]
        cpts: PathBuf,
        /// Treatment variable name
        #[arg(long = "do")]
        treatment: String,
        /// Outcome variable name
        #[arg(long)]
        outcome: String,
        /// Outcome state tracked in the comparison
        #[arg(long, default_value_t = 1)]
        y_state: usize,
        /// Comma-separated sample sizes
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<u64>,
        /// Replicates per grid point
        #[arg(long, default_value_t = 20)]
        replicates: u32,
        /// RNG seed
        #[arg(long)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
}

struct AppError {
    code: i32,
    message: String,
}

impl AppError {
    fn data(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_DATA,
            message: err.to_string(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

#[derive(Serialize)]
struct OutcomeReport {
    y: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    do_plugin: Option<f64>,
    bayes_predictive: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    interval: Option<[f64; 2]>,
}

#[derive(Serialize)]
struct InferReport {
    treatment: String,
    t_star: usize,
    outcome: String,
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimand: Option<String>,
    results: Vec<OutcomeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    acceptance_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accepted: Option<usize>,
}

/// Runs the CLI against explicit argument and output streams; returns the
/// exit code. The binary wraps this around `std::env::args` and stdio.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv =
        std::iter::once(OsString::from("causal-twin")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn read_file(path: &Path) -> Result<String, AppError> {
    std::fs::read_to_string(path)
        .map_err(|e| AppError::data(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<CausalGraph, AppError> {
    parse_graph(&read_file(path)?).map_err(|e| AppError::data(format!("{}: {e}", path.display())))
}

fn load_cpts(path: &Path, graph: &CausalGraph) -> Result<CptSet, AppError> {
    CptSet::from_json(&read_file(path)?, graph)
        .map_err(|e| AppError::data(format!("{}: {e}", path.display())))
}

fn parse_intervention(s: &str) -> Result<(String, usize), AppError> {
    let (name, state) = s
        .split_once('=')
        .ok_or_else(|| AppError::usage(format!("--do expects NAME=STATE, got `{s}`")))?;
    let state: usize = state
        .trim()
        .parse()
        .map_err(|_| AppError::usage(format!("--do expects an integer state, got `{state}`")))?;
    Ok((name.trim().to_string(), state))
}

fn write_output(
    path: Option<&Path>,
    content: &str,
    stdout: &mut dyn Write,
) -> Result<(), AppError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| AppError::data(format!("cannot write {}: {e}", p.display()))),
        None => {
            let _ = write!(stdout, "{content}");
            Ok(())
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), AppError> {
    match command {
        Command::Identify {
            graph,
            treatment,
            outcome,
        } => {
            let g = load_graph(&graph)?;
            match identify(&g, &treatment, &outcome).map_err(AppError::data)? {
                IdentificationResult::Identified { estimand, .. } => {
                    let _ = writeln!(stdout, "{estimand}");
                    Ok(())
                }
                IdentificationResult::NotIdentified { reason } => {
                    let _ = writeln!(stdout, "NOT IDENTIFIED: {reason}");
                    Err(AppError {
                        code: EXIT_NOT_IDENTIFIED,
                        message: format!(
                            "P({outcome}|do({treatment})) is not identified: {reason}"
                        ),
                    })
                }
            }
        }
        Command::Construct {
            graph,
            intervention,
            format,
        } => {
            let g = load_graph(&graph)?;
            let (treatment, t_star) = parse_intervention(&intervention)?;
            let twin = causal_bayes_construct(&g, &treatment, t_star).map_err(AppError::data)?;
            let text = match format {
                TwinFormat::Dot => twin.to_dot(),
                TwinFormat::Json => format!("{}\n", twin.to_json()),
            };
            let _ = write!(stdout, "{text}");
            Ok(())
        }
        Command::Infer {
            graph,
            data,
            intervention,
            outcome,
            prior,
            method,
            latent_card,
            epsilon,
            samples,
            seed,
            format,
            out,
        } => {
            let g = load_graph(&graph)?;
            let (treatment, t_star) = parse_intervention(&intervention)?;
            let table = load_counts(&read_file(&data)?, &g).map_err(AppError::data)?;
            let y_card = g.variable(&outcome).map_err(AppError::data)?.card;

            let report = match method {
                Some(InferMethod::Abc) => {
                    let missing =
                        |flag: &str| AppError::usage(format!("--method abc requires {flag}"));
                    let cfg = AbcConfig {
                        latent_card: latent_card.ok_or_else(|| missing("--latent-card"))?,
                        epsilon: epsilon.ok_or_else(|| missing("--epsilon"))?,
                        n_samples: samples.ok_or_else(|| missing("--samples"))?,
                        seed: seed.ok_or_else(|| missing("--seed"))?,
                        psi_prior: None,
                    };
                    let pair = table
                        .marginalize(&[treatment.as_str(), outcome.as_str()])
                        .map_err(AppError::data)?;
                    let contrast = abc_nonidentifiable(&pair, &cfg).map_err(AppError::data)?;
                    if t_star >= contrast.cards().0 {
                        return Err(AppError::data(format!(
                            "state {t_star} out of range for `{treatment}`"
                        )));
                    }
                    let results = (0..y_card)
                        .map(|y| {
                            let (lo, hi) = contrast.interval(t_star, y);
                            OutcomeReport {
                                y,
                                do_plugin: None,
                                bayes_predictive: contrast.mean(t_star, y),
                                interval: Some([lo, hi]),
                            }
                        })
                        .collect();
                    InferReport {
                        treatment,
                        t_star,
                        outcome,
                        method: "abc".to_string(),
                        estimand: None,
                        results,
                        acceptance_rate: Some(contrast.acceptance_rate),
                        accepted: Some(contrast.accepted()),
                    }
                }
                None => {
                    let identified = identify(&g, &treatment, &outcome).map_err(AppError::data)?;
                    let (est_method, estimand) = match identified {
                        IdentificationResult::Identified {
                            method, estimand, ..
                        } => (method, estimand),
                        IdentificationResult::NotIdentified { reason } => {
                            return Err(AppError {
                                code: EXIT_NOT_IDENTIFIED,
                                message: format!(
                                    "P({outcome}|do({treatment})) is not identified: {reason}; try --method abc"
                                ),
                            });
                        }
                    };
                    let joint = empirical_joint(&table).map_err(AppError::data)?;
                    let mut plugins = Vec::with_capacity(y_card);
                    for y in 0..y_card {
                        plugins.push(
                            evaluate_estimand(&estimand, &joint, t_star, y)
                                .map_err(AppError::data)?,
                        );
                    }
                    let bayes: Vec<f64> = match &est_method {
                        Method::FrontDoor { mediators } => {
                            let [mediator] = mediators.as_slice() else {
                                return Err(AppError::data(
                                    "the Bayesian front-door path supports a single mediator",
                                ));
                            };
                            let fd = fit_frontdoor(&table, &treatment, mediator, &outcome, prior)
                                .map_err(AppError::data)?;
                            (0..y_card)
                                .map(|y| {
                                    frontdoor_predictive(&fd, t_star, y).map_err(AppError::data)
                                })
                                .collect::<Result<_, _>>()?
                        }
                        _ => {
                            let twin = causal_bayes_construct(&g, &treatment, t_star)
                                .map_err(AppError::data)?;
                            let posterior =
                                fit_posteriors(&twin, &table, prior).map_err(AppError::data)?;
                            (0..y_card)
                                .map(|y| {
                                    posterior_predictive(&twin, &posterior, &outcome, y)
                                        .map_err(AppError::data)
                                })
                                .collect::<Result<_, _>>()?
                        }
                    };
                    InferReport {
                        treatment,
                        t_star,
                        outcome,
                        method: est_method.name().to_string(),
                        estimand: Some(estimand.to_string()),
                        results: (0..y_card)
                            .map(|y| OutcomeReport {
                                y,
                                do_plugin: Some(plugins[y]),
                                bayes_predictive: bayes[y],
                                interval: None,
                            })
                            .collect(),
                        acceptance_rate: None,
                        accepted: None,
                    }
                }
            };

            let text = match format {
                OutputFormat::Json => {
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&report).expect("report serializes")
                    )
                }
                OutputFormat::Text => {
                    let mut s = format!(
                        "P({} | do({}={})) by {}\n",
                        report.outcome, report.treatment, report.t_star, report.method
                    );
                    if let Some(e) = &report.estimand {
                        s.push_str(&format!("estimand: {e}\n"));
                    }
                    for r in &report.results {
                        s.push_str(&format!("  {}={}", report.outcome, r.y));
                        if let Some(p) = r.do_plugin {
                            s.push_str(&format!("  plug-in={p:.7}"));
                        }
                        s.push_str(&format!("  bayes={:.7}", r.bayes_predictive));
                        if let Some([lo, hi]) = r.interval {
                            s.push_str(&format!("  95% interval=({lo:.4}, {hi:.4})"));
                        }
                        s.push('\n');
                    }
                    if let Some(rate) = report.acceptance_rate {
                        s.push_str(&format!("acceptance rate: {rate:.6}\n"));
                    }
                    s
                }
            };
            write_output(out.as_deref(), &text, stdout)
        }
        Command::Simulate {
            graph,
            cpts,
            m,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            let set = load_cpts(&cpts, &g)?;
            let table = forward_sample(&g, &set, m, seed).map_err(AppError::data)?;
            write_output(Some(&out), &table.to_csv(), stdout)?;
            let _ = writeln!(
                stdout,
                "wrote {} ({} rows, M={})",
                out.display(),
                table.rows().len(),
                m
            );
            Ok(())
        }
        Command::Converge {
            graph,
            cpts,
            treatment,
            outcome,
            y_state,
            grid,
            replicates,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            let set = load_cpts(&cpts, &g)?;
            let rows = run_convergence(
                &g, &set, &treatment, &outcome, y_state, &grid, replicates, seed,
            )
            .map_err(|e| match e {
                crate::convergence::ConvergenceError::NotIdentified(reason) => AppError {
                    code: EXIT_NOT_IDENTIFIED,
                    message: format!("not identified: {reason}"),
                },
                other => AppError::data(other),
            })?;
            write_output(Some(&out), &rows_to_csv(&rows), stdout)?;
            let _ = writeln!(stdout, "wrote {} ({} rows)", out.display(), rows.len());
            Ok(())
        }
    }
}
