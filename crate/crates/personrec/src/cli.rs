//! Command-line front end: `gen`, `eval`, `recommend`, and `stats`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_generator_config, load_run_config, RunConfig};
use crate::error::{Error, Result};
use crate::eval::cross_validate;
use crate::gen::generate;
use crate::graph::UserId;
use crate::interest::{build_profiles, CategoryScheme, ProfileBuild};
use crate::io::{
    load_dataset, write_activities, write_edges, write_report, LoadOptions, LoadedDataset,
};
use crate::recommend::{recommend, RecommenderKind};

#[derive(Parser)]
#[command(
    name = "personrec",
    version,
    about = "Person recommendation and friendship-reproduction evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (interest homophily + triadic closure)
    Gen(GenArgs),
    /// Run the k-fold friendship-holdout evaluation and write a report
    Eval(EvalArgs),
    /// Print ranked recommendations for one user
    Recommend(RecommendArgs),
    /// Print dataset summary statistics
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator config file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output edge-list file
    #[arg(long)]
    edges: PathBuf,
    /// Output activity-log file
    #[arg(long)]
    activities: PathBuf,
    /// Generator seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of users
    #[arg(long)]
    users: Option<usize>,
    /// Number of interest communities
    #[arg(long)]
    communities: Option<usize>,
    /// Number of interest categories
    #[arg(long)]
    categories: Option<usize>,
    /// Interest weight alpha in [0, 1]; closure weight is 1 - alpha
    #[arg(long)]
    alpha: Option<f64>,
    /// Target mean friends per user
    #[arg(long = "mean-degree")]
    mean_degree: Option<f64>,
    /// Mean activities per user
    #[arg(long = "activity-mean")]
    activity_mean: Option<f64>,
    /// Dispersion of the activity-count distribution
    #[arg(long = "activity-dispersion")]
    activity_dispersion: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Run config file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Activity-log file
    #[arg(long)]
    activities: Option<PathBuf>,
    /// Report output path (omit to print the report to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for fold partitioning and the random recommender
    #[arg(long)]
    seed: Option<u64>,
    /// Number of folds
    #[arg(long)]
    k: Option<usize>,
    /// Recommendations per user
    #[arg(long)]
    n: Option<usize>,
    /// Recommender to run (repeatable; default: all six)
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Skip malformed input lines instead of aborting
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct RecommendArgs {
    /// Run config file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Activity-log file
    #[arg(long)]
    activities: Option<PathBuf>,
    /// Target user id
    #[arg(long)]
    user: u64,
    /// Recommender to use
    #[arg(long)]
    method: String,
    /// Maximum recommendations to print
    #[arg(long)]
    n: Option<usize>,
    /// Seed for the random recommender
    #[arg(long)]
    seed: Option<u64>,
    /// Skip malformed input lines instead of aborting
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Edge-list file
    #[arg(long)]
    edges: PathBuf,
    /// Activity-log file
    #[arg(long)]
    activities: PathBuf,
    /// Skip malformed input lines instead of aborting
    #[arg(long)]
    lenient: bool,
}

/// Parses `argv` and runs the subcommand; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Eval(args) => run_eval(args),
        Command::Recommend(args) => run_recommend(args),
        Command::Stats(args) => run_stats(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run_gen(args: GenArgs) -> Result<()> {
    let mut cfg = load_generator_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(users) = args.users {
        cfg.n_users = users;
    }
    if let Some(communities) = args.communities {
        cfg.n_communities = communities;
    }
    if let Some(categories) = args.categories {
        cfg.categories = categories;
    }
    if let Some(alpha) = args.alpha {
        cfg.homophily_weight = alpha;
    }
    if let Some(degree) = args.mean_degree {
        cfg.target_mean_degree = degree;
    }
    if let Some(mean) = args.activity_mean {
        cfg.activity_mean = mean;
    }
    if let Some(dispersion) = args.activity_dispersion {
        cfg.activity_dispersion = dispersion;
    }

    let data = generate(&cfg)?;
    write_edges(&args.edges, &data.graph)?;
    write_activities(&args.activities, &data.events)?;
    println!(
        "wrote {} ({} users, {} edges) and {} ({} events), seed {}",
        args.edges.display(),
        data.graph.user_count(),
        data.graph.edge_count(),
        args.activities.display(),
        data.events.len(),
        cfg.seed
    );
    Ok(())
}

/// Loads the dataset and builds profiles under one config, reporting
/// skipped lines and rejected events.
fn load_and_profile(cfg: &RunConfig) -> Result<(LoadedDataset, ProfileBuild<f64>)> {
    let (edges_path, activities_path) = cfg.require_paths()?;
    let loaded = load_dataset(
        edges_path,
        activities_path,
        LoadOptions {
            lenient: cfg.lenient,
            ..LoadOptions::default()
        },
    )?;
    for (path, issue) in &loaded.issues {
        eprintln!("warning: {}: {issue}", path.display());
    }
    if loaded.graph_report.self_loops_dropped > 0 {
        eprintln!(
            "warning: dropped {} self-loop record(s)",
            loaded.graph_report.self_loops_dropped
        );
    }

    let scheme = CategoryScheme::new(cfg.categories)?;
    let weights = cfg.action_weights();
    let build = build_profiles(
        &loaded.events,
        &scheme,
        &weights,
        cfg.eligibility.min_activities,
    );
    if !build.rejected.is_empty() {
        let first = &build.rejected[0];
        if !cfg.lenient {
            return Err(Error::invalid_config(
                "categories",
                format!(
                    "{} activity record(s) rejected; first: record {} for user {}: {} \
                     (raise `categories` or pass --lenient)",
                    build.rejected.len(),
                    first.index,
                    first.user,
                    first.reason
                ),
            ));
        }
        eprintln!(
            "warning: rejected {} activity record(s); first: {}",
            build.rejected.len(),
            first.reason
        );
    }
    Ok((loaded, build))
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let mut cfg = load_run_config(args.config.as_deref())?;
    if let Some(edges) = args.edges {
        cfg.edges = Some(edges);
    }
    if let Some(activities) = args.activities {
        cfg.activities = Some(activities);
    }
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    if let Some(seed) = args.seed {
        cfg.folds.seed = seed;
        cfg.recommend.rng_seed = seed;
    }
    if let Some(k) = args.k {
        cfg.folds.k = k;
    }
    if let Some(n) = args.n {
        cfg.recommend.n = n;
    }
    if !args.methods.is_empty() {
        cfg.methods = args.methods;
    }
    cfg.lenient |= args.lenient;
    cfg.validate()?;

    let (loaded, build) = load_and_profile(&cfg)?;
    let kinds = cfg.kinds()?;
    let mut report = cross_validate(
        &loaded.graph,
        &build.profiles,
        &kinds,
        &cfg.eligibility,
        &cfg.folds,
        &cfg.skip,
        &cfg.recommend,
    )?;
    report.metadata.action_weights = cfg.weights.clone();
    report.metadata.categories = cfg.categories;

    match &cfg.out {
        Some(path) => {
            write_report(&report, path)?;
            println!(
                "evaluated {} cases over {} runs ({} eligible users), report: {}",
                report.metadata.evaluated_cases,
                report.metadata.k,
                report.metadata.eligible_users,
                path.display()
            );
            println!(
                "{:<28} {:>10} {:>7} {:>10} {:>8} {:>10}",
                "recommender", "total_recs", "tp", "precision", "recall", "f-measure"
            );
            for row in &report.summary {
                println!(
                    "{:<28} {:>10} {:>7} {:>10.3} {:>8.3} {:>10.3}",
                    row.recommender,
                    row.total_recommendations,
                    row.true_positives,
                    row.precision,
                    row.recall,
                    row.f_measure
                );
            }
        }
        None => print!("{}", crate::io::report_to_string(&report)),
    }
    Ok(())
}

fn run_recommend(args: RecommendArgs) -> Result<()> {
    let mut cfg = load_run_config(args.config.as_deref())?;
    if let Some(edges) = args.edges {
        cfg.edges = Some(edges);
    }
    if let Some(activities) = args.activities {
        cfg.activities = Some(activities);
    }
    if let Some(n) = args.n {
        cfg.recommend.n = n;
    }
    if let Some(seed) = args.seed {
        cfg.recommend.rng_seed = seed;
    }
    cfg.lenient |= args.lenient;
    cfg.validate()?;
    let kind: RecommenderKind = args.method.parse()?;

    let (loaded, build) = load_and_profile(&cfg)?;
    let user = UserId(args.user);
    let eligible: BTreeSet<UserId> = loaded.graph.users().collect();
    let recs = recommend(
        kind,
        user,
        &loaded.graph,
        &build.profiles,
        &eligible,
        &cfg.recommend,
    )?;

    if recs.is_empty() {
        println!("no candidates for user {user} under {kind}");
        return Ok(());
    }
    println!(
        "top {} recommendations for user {user} ({kind}):",
        recs.len()
    );
    for (rank, rec) in recs.iter().enumerate() {
        let mut notes = Vec::new();
        if rec.had_common_friend {
            notes.push("common friend");
        }
        if rec.boosted {
            notes.push("boosted");
        }
        let notes = if notes.is_empty() {
            String::new()
        } else {
            format!("  [{}]", notes.join(", "))
        };
        println!(
            "{:>3}. user {:<8} score {:.4}{notes}",
            rank + 1,
            rec.candidate,
            rec.score
        );
    }
    Ok(())
}

fn run_stats(args: StatsArgs) -> Result<()> {
    let loaded = load_dataset(
        &args.edges,
        &args.activities,
        LoadOptions {
            lenient: args.lenient,
            ..LoadOptions::default()
        },
    )?;
    let g = &loaded.graph;
    let users = g.user_count();
    let mean_fof = if users > 0 {
        g.users()
            .map(|u| g.fof_neighborhood(u).expect("own users").len())
            .sum::<usize>() as f64
            / users as f64
    } else {
        0.0
    };
    let mut activity_users = BTreeSet::new();
    let mut activity_mass = 0u64;
    for e in &loaded.events {
        activity_users.insert(e.user);
        activity_mass += e.multiplicity;
    }
    let mean_activities = if activity_users.is_empty() {
        0.0
    } else {
        activity_mass as f64 / activity_users.len() as f64
    };

    println!("users: {users}");
    println!("edges: {}", g.edge_count());
    println!("friendship records: {}", g.record_count());
    println!("mean friends: {:.2}", g.mean_degree());
    println!("mean friends of friends: {mean_fof:.2}");
    println!("users with activities: {}", activity_users.len());
    println!("mean categorized activities: {mean_activities:.2}");
    Ok(())
}
