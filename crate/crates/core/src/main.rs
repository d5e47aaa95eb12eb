use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graphconc::bounds::BoundRequest;
use graphconc::graph::{parse_edge_list, serialize_edge_list, BlockStructure};
use graphconc::harness::{
    emit_svg_boxplot, generate_synthetic_classes, run_study1, run_study2, run_subsample,
    StudyConfig, StudyId,
};
use graphconc::models::{McmcConfig, ModelSpec};
use graphconc::oracle::{
    compute_dependence_profile, verify_lemma1, ExactDistribution, SupportPredicate,
};
use graphconc::rng::stream;
use graphconc::stats::{Statistic, StatisticKind};
use graphconc::Error;

#[derive(Parser)]
#[command(
    name = "graphconc",
    version,
    about = "Concentration of graph-statistic distributions under dependent edges"
)]
struct Cli {
    /// Master seed; overrides `master_seed` in study configs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (all cores when absent). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file with study settings that override the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph from a model JSON file and write it as an edge list.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        nodes: Option<usize>,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Empirical distribution of one statistic of an edge-list file.
    Stats {
        graph: PathBuf,
        #[arg(long)]
        kind: StatisticKind,
        /// File of 1-based respondent ids (within-block out-degree only).
        #[arg(long)]
        respondents: Option<PathBuf>,
    },
    /// Evaluate a bound request (JSON file, or `-` for stdin).
    Bounds { input: PathBuf },
    /// Exact tail probabilities against the concentration bounds.
    Oracle {
        model: PathBuf,
        #[arg(long)]
        kind: StatisticKind,
        #[arg(long)]
        nodes: Option<usize>,
        /// Comma-separated thresholds; 0.05, 0.10, ..., 0.95 by default.
        #[arg(long, value_delimiter = ',')]
        t_grid: Vec<f64>,
        /// Restrict to a support set: all, edges=m, max-edges=m, max-degree=d.
        #[arg(long, default_value = "all")]
        condition: SupportPredicate,
        /// Also write the dependence profile CSV here.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Curved-ERGM simulation study.
    Study1(StudyArgs),
    /// Beta-model simulation study.
    Study2(StudyArgs),
    /// Synthetic directed network of disjoint classes.
    GenClasses {
        /// Where to write the 1-based respondent ids.
        #[arg(long)]
        respondents_out: Option<PathBuf>,
    },
    /// Block subsampling experiment on an edge-list network with blocks
    /// (synthetic classes when no network is given).
    Subsample {
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long, requires = "network")]
        respondents: Option<PathBuf>,
        /// Also write per-bin distributions (`K,replicate,k,value`).
        #[arg(long)]
        bins_out: Option<PathBuf>,
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Box plot SVG of a CSV column grouped by another.
    Plot {
        input: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long)]
        value: String,
        /// Keep only rows with `column=value`.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Args)]
struct McmcArgs {
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
}

#[derive(Args)]
struct StudyArgs {
    /// Write run metadata (config, MCMC schedule, θ* summaries) as JSON.
    #[arg(long)]
    meta: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Invalid(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Invalid(format!("stdout: {e}"))),
    }
}

/// One 1-based node id per line; blank lines and `#` comments are skipped.
fn read_respondents(path: &Path) -> Result<Vec<usize>, Failure> {
    let text = read_text(path)?;
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<usize>() {
            Ok(id) if id >= 1 => ids.push(id - 1),
            _ => {
                return Err(Failure::Invalid(format!(
                    "{}: line {}: expected a 1-based node id",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(ids)
}

fn study_config(cli: &Cli, id: StudyId) -> Result<StudyConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let cfg = StudyConfig::from_json(&read_text(p)?, Some(id))?;
            if cfg.study_id != id {
                return Err(Failure::Invalid(format!(
                    "config is for {}, not {}",
                    cfg.study_id.as_str(),
                    id.as_str()
                )));
            }
            cfg
        }
        None => StudyConfig::defaults(id),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn write_meta(path: Option<&PathBuf>, meta: &serde_json::Value) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(meta).expect("json value");
        write_to(Some(p), &(text + "\n"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Invalid(format!("thread pool: {e}")))?;
    }
    let seed = cli.seed.unwrap_or(1);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Simulate { model, nodes, mcmc } => {
            let spec: ModelSpec = read_json(model)?;
            let n = spec.resolve_nodes(*nodes)?;
            let mut schedule = McmcConfig::for_nodes(n);
            schedule.burn_in = mcmc.burn_in.unwrap_or(schedule.burn_in);
            schedule.thin = mcmc.thin.unwrap_or(schedule.thin);
            let g = spec.sample(Some(n), &schedule, &mut stream(seed, &[]))?;
            let blocks = match &spec {
                ModelSpec::LocalDependence { blocks, .. } => Some(blocks),
                _ => None,
            };
            write_to(out, &serialize_edge_list(&g, blocks))
        }
        Command::Stats {
            graph,
            kind,
            respondents,
        } => {
            let (g, blocks) = parse_edge_list(&read_text(graph)?)?;
            let need_blocks = || {
                blocks.clone().ok_or_else(|| {
                    Failure::Invalid(format!("{kind} needs a blocks section in the edge list"))
                })
            };
            let stat = match kind {
                StatisticKind::WithinBlockOutDegree => {
                    let r = respondents.as_deref().map(read_respondents).transpose()?;
                    Statistic::within_block_out_degree(need_blocks()?, r)?
                }
                StatisticKind::WithinBlockDegree => Statistic::within_block_degree(need_blocks()?),
                k => Statistic::simple(*k)?,
            };
            write_to(out, &stat.distribution(&g)?.to_csv())
        }
        Command::Bounds { input } => {
            let request: BoundRequest = read_json(input)?;
            let report = request.evaluate()?;
            let json = serde_json::to_string_pretty(&report).expect("serializable report");
            write_to(out, &format!("{json}\n"))?;
            eprintln!("{report}");
            Ok(())
        }
        Command::Oracle {
            model,
            kind,
            nodes,
            t_grid,
            condition,
            profile,
        } => {
            let spec: ModelSpec = read_json(model)?;
            let stat = match (kind, &spec) {
                (
                    StatisticKind::WithinBlockOutDegree,
                    ModelSpec::LocalDependence { blocks, .. },
                ) => Statistic::within_block_out_degree(blocks.clone(), None)?,
                (StatisticKind::WithinBlockDegree, ModelSpec::LocalDependence { blocks, .. }) => {
                    Statistic::within_block_degree(blocks.clone())
                }
                (k, _) => Statistic::simple(*k)?,
            };
            let grid: Vec<f64> = if t_grid.is_empty() {
                (1..=19).map(|i| i as f64 * 0.05).collect()
            } else {
                t_grid.clone()
            };
            let dist = ExactDistribution::from_model(&spec, *nodes)?.condition(condition)?;
            let report = verify_lemma1(&dist, &stat, &grid)?;
            if let Some(p) = profile {
                let full = compute_dependence_profile(&dist, &stat, &SupportPredicate::All)?;
                write_to(Some(p), &full.to_csv())?;
            }
            write_to(out, &report.to_csv())?;
            if report.holds() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} threshold(s) where the exact tail exceeds a bound",
                    report.violations()
                )))
            }
        }
        Command::Study1(args) | Command::Study2(args) => {
            let study1 = matches!(cli.command, Command::Study1(_));
            let id = if study1 {
                StudyId::Study1
            } else {
                StudyId::Study2
            };
            let cfg = study_config(cli, id)?;
            let output = if study1 {
                run_study1(&cfg)?
            } else {
                run_study2(&cfg)?
            };
            write_to(out, &output.to_csv())?;
            write_meta(args.meta.as_ref(), &output.metadata())
        }
        Command::GenClasses { respondents_out } => {
            let cfg = study_config(cli, StudyId::Subsample)?;
            let classes =
                generate_synthetic_classes(&cfg.classes, &mut stream(cfg.master_seed, &[]))?;
            write_to(
                out,
                &serialize_edge_list(&classes.graph, Some(&classes.blocks)),
            )?;
            if let Some(p) = respondents_out {
                let ids: String = classes
                    .respondents
                    .iter()
                    .map(|i| format!("{}\n", i + 1))
                    .collect();
                write_to(Some(p), &ids)?;
            }
            Ok(())
        }
        Command::Subsample {
            network,
            respondents,
            bins_out,
            meta,
        } => {
            let cfg = study_config(cli, StudyId::Subsample)?;
            let (graph, blocks, resp): (_, BlockStructure, Vec<usize>) = match network {
                Some(path) => {
                    let (g, blocks) = parse_edge_list(&read_text(path)?)?;
                    let blocks = blocks.ok_or_else(|| {
                        Failure::Invalid(format!("{}: no blocks section", path.display()))
                    })?;
                    let resp = match respondents {
                        Some(r) => read_respondents(r)?,
                        None => (0..g.n()).collect(),
                    };
                    (g, blocks, resp)
                }
                None => {
                    let c = generate_synthetic_classes(
                        &cfg.classes,
                        &mut stream(cfg.master_seed, &[]),
                    )?;
                    (c.graph, c.blocks, c.respondents)
                }
            };
            let output = run_subsample(&graph, &blocks, &resp, &cfg)?;
            write_to(out, &output.to_csv())?;
            if let Some(p) = bins_out {
                write_to(Some(p), &output.bins_to_csv())?;
            }
            write_meta(
                meta.as_ref(),
                &serde_json::json!({
                    "config": cfg,
                    "blocks": blocks.block_count(),
                    "nodes": graph.n(),
                    "respondents": resp.len(),
                    "reference": output.reference,
                }),
            )
        }
        Command::Plot {
            input,
            group,
            value,
            filter,
        } => {
            let filter = match filter {
                Some(f) => Some(f.split_once('=').ok_or_else(|| {
                    Failure::Invalid(format!("--filter expects column=value, got '{f}'"))
                })?),
                None => None,
            };
            let svg = emit_svg_boxplot(&read_text(input)?, group, value, filter)?;
            write_to(out, &svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation errors; help and version are not
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
