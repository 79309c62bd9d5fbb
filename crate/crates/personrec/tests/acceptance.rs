//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).
//!
//! 1. metric arithmetic reproduces the reference result rows
//! 2. kernels and fold accounting match brute-force oracles (1000+ instances)
//! 3. fold-partition invariants across 100 seeds
//! 4. protocol invariants and an oracle recommender with recall 1.0
//! 5. qualitative ordering of recommenders on synthetic data (5 seeds)
//! 6. novelty: interest recommends beyond distance two more than FoF
//! 7. byte-identical reports end to end through the CLI
//! 8. performance smoke on a 1000-user dataset

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use personrec::eval::{
    cross_validate, make_folds, metrics, prepare_fold, run_fold, EligibilityConfig, EvalReport,
    FoldConfig, SkipRule,
};
use personrec::gen::{generate, GeneratorConfig};
use personrec::graph::{build_graph, SocialGraph, UserId};
use personrec::interest::{
    build_profiles, cosine_similarity, pearson_similarity, ActionWeights, ActivityEvent,
    CategoryScheme,
};
use personrec::recommend::{fof_score, recommend, RecommendParams, RecommenderKind};

fn conclude(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {name}: PASS");
    } else {
        println!("acceptance {name}: FAIL");
        for f in &failures {
            println!("  - {f}");
        }
        panic!("{name}: {}", failures.join("; "));
    }
}

// ---------------------------------------------------------------------------
// criterion 1: reference-row arithmetic
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_reference_row_arithmetic() {
    // (total recommendations, reproductions, precision, f-measure) per
    // recommender, with 398 deletions per run over ten runs
    const ROWS: [(&str, u64, u64, f64, f64); 6] = [
        ("random", 19210, 144, 0.008, 0.012),
        ("interest_pearson", 19048, 250, 0.013, 0.022),
        ("interest_cosine", 19210, 283, 0.015, 0.024),
        ("fof", 19132, 1164, 0.061, 0.101),
        ("interest_pearson_plus_link", 19048, 376, 0.020, 0.033),
        ("interest_cosine_plus_link", 19210, 422, 0.022, 0.036),
    ];
    const DELETED_BASE: u64 = 398 * 10;
    const TOL: f64 = 1e-3 + 1e-12;

    let mut failures = Vec::new();
    for (name, a, tp, precision, f_measure) in ROWS {
        let m = metrics(a, tp, DELETED_BASE);
        if (m.precision - precision).abs() > TOL {
            failures.push(format!(
                "{name}: precision {:.6} vs reference {precision}",
                m.precision
            ));
        }
        if (m.f_measure - f_measure).abs() > TOL {
            failures.push(format!(
                "{name}: f-measure {:.6} vs reference {f_measure}",
                m.f_measure
            ));
        }
    }
    conclude("criterion 1 (reference-row arithmetic)", failures);
}

// ---------------------------------------------------------------------------
// criterion 2: brute-force oracle equivalence
// ---------------------------------------------------------------------------

fn cosine_oracle(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Textbook raw-sums correlation.
fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let sx: f64 = a.iter().sum();
    let sy: f64 = b.iter().sum();
    let sxy: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let sxx: f64 = a.iter().map(|x| x * x).sum();
    let syy: f64 = b.iter().map(|y| y * y).sum();
    let denom = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    }
}

fn common_oracle(g: &SocialGraph, a: UserId, b: UserId) -> usize {
    g.users()
        .filter(|&w| g.has_edge(a, w) && g.has_edge(b, w))
        .count()
}

fn random_graph(rng: &mut ChaCha8Rng, max_users: u64, edges: usize) -> SocialGraph {
    let n = rng.random_range(4..=max_users);
    let list: Vec<(UserId, UserId)> = (0..edges)
        .map(|_| {
            (
                UserId(rng.random_range(0..n)),
                UserId(rng.random_range(0..n)),
            )
        })
        .collect();
    build_graph(list).0
}

#[test]
fn criterion_2_oracle_equivalence() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);

    // vector kernels: 1000 random pairs each, plus degenerate zero vectors
    for i in 0..1000 {
        let len = rng.random_range(2..12);
        let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..len)
                .map(|_| {
                    if rng.random::<f64>() < 0.1 {
                        0.0
                    } else {
                        rng.random::<f64>() * 50.0
                    }
                })
                .collect()
        };
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        let cos = cosine_similarity(&a, &b).unwrap();
        if (cos - cosine_oracle(&a, &b)).abs() > 1e-9 {
            failures.push(format!("cosine mismatch on instance {i}"));
        }
        let pea = pearson_similarity(&a, &b).unwrap();
        if (pea - pearson_oracle(&a, &b)).abs() > 1e-9 {
            failures.push(format!("pearson mismatch on instance {i}"));
        }
    }

    // graph kernels: 1200 random (graph, pair) instances
    for i in 0..120 {
        let g = random_graph(&mut rng, 30, 60);
        let users: Vec<UserId> = g.users().collect();
        for _ in 0..10 {
            let a = users[rng.random_range(0..users.len())];
            let b = users[rng.random_range(0..users.len())];
            let expected = common_oracle(&g, a, b);
            if g.common_friends(a, b).unwrap() != expected {
                failures.push(format!("common_friends mismatch on instance {i}"));
            }
            let degrees = g.degree(a).unwrap() + g.degree(b).unwrap();
            let expected_fof = if degrees == 0 {
                0.0
            } else {
                2.0 * expected as f64 / degrees as f64
            };
            let got: f64 = fof_score(&g, a, b).unwrap();
            if (got - expected_fof).abs() > 1e-9 {
                failures.push(format!("fof_score mismatch on instance {i}"));
            }
        }
    }

    // fold accounting: 1000 random fold instances, recounted from scratch
    let params = RecommendParams::<f64>::default();
    let skip = SkipRule::default();
    let kinds = [RecommenderKind::Random, RecommenderKind::Fof];
    for i in 0..1000 {
        let g = random_graph(&mut rng, 30, 45);
        let edges: Vec<(UserId, UserId)> = g.edges().collect();
        if edges.is_empty() {
            continue;
        }
        let eligible: BTreeSet<UserId> = g.users().collect();
        let take = rng.random_range(1..=edges.len().min(9));
        let mut shuffled = edges.clone();
        for j in (1..shuffled.len()).rev() {
            shuffled.swap(j, rng.random_range(0..=j));
        }
        let fold: Vec<(UserId, UserId)> = shuffled[..take].to_vec();

        let stats = run_fold(
            &g,
            &BTreeMap::new(),
            &eligible,
            &fold,
            &kinds,
            &skip,
            &params,
        )
        .expect("fold runs");

        // independent recount: skip rule, per-user intersections, bases
        let mut deleted: BTreeMap<UserId, BTreeSet<UserId>> = BTreeMap::new();
        for &(a, b) in &fold {
            deleted.entry(a).or_default().insert(b);
            deleted.entry(b).or_default().insert(a);
        }
        let evaluated: BTreeMap<UserId, BTreeSet<UserId>> = deleted
            .into_iter()
            .filter(|(_, d)| d.len() >= skip.min_deleted && d.len() <= skip.max_deleted)
            .collect();
        let removed: BTreeSet<(UserId, UserId)> = fold
            .iter()
            .map(|&(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        let training = g.without_edges(&removed);
        let base: u64 = evaluated.values().map(|d| d.len() as u64).sum();

        if stats.evaluated_cases != evaluated.len() as u64 {
            failures.push(format!("instance {i}: evaluated-case count"));
        }
        if stats.deleted_directed != base {
            failures.push(format!("instance {i}: deleted base"));
        }
        for (slot, &kind) in kinds.iter().enumerate() {
            let mut a_total = 0u64;
            let mut tp_total = 0u64;
            for (&user, dels) in &evaluated {
                let recs = recommend(kind, user, &training, &BTreeMap::new(), &eligible, &params)
                    .expect("recommend runs");
                a_total += recs.len() as u64;
                tp_total += recs.iter().filter(|r| dels.contains(&r.candidate)).count() as u64;
            }
            let ks = stats.per_kind[slot];
            if ks.recommendations != a_total || ks.true_positives != tp_total {
                failures.push(format!("instance {i}: {kind} tallies"));
            }
            let m = metrics(ks.recommendations, ks.true_positives, base);
            let fp = ks.recommendations - ks.true_positives;
            if ks.true_positives + fp != a_total {
                failures.push(format!("instance {i}: {kind} A != TP + FP"));
            }
            if base > 0 && (m.recall - tp_total as f64 / base as f64).abs() > 1e-12 {
                failures.push(format!("instance {i}: {kind} recall"));
            }
        }
        if failures.len() > 10 {
            break;
        }
    }
    conclude("criterion 2 (oracle equivalence)", failures);
}

// ---------------------------------------------------------------------------
// criterion 3: fold-partition invariants
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_fold_invariants() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF01D);
    for seed in 0..100u64 {
        let m = rng.random_range(12..140usize);
        let k = rng.random_range(2..=10usize).min(m);
        let edges: Vec<(UserId, UserId)> = (0..m as u64)
            .map(|i| (UserId(i), UserId(i + 10_000)))
            .collect();
        let plan = make_folds(&edges, k, seed).expect("enough edges");
        let mut seen = BTreeSet::new();
        for fold in &plan.folds {
            for &e in fold {
                if !seen.insert(e) {
                    failures.push(format!("seed {seed}: duplicate edge across folds"));
                }
            }
        }
        if seen.len() != m {
            failures.push(format!("seed {seed}: folds do not cover the edge set"));
        }
        let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
        if sizes.iter().max().unwrap() - sizes.iter().min().unwrap() > 1 {
            failures.push(format!("seed {seed}: unbalanced folds {sizes:?}"));
        }
        if make_folds(&edges, k, seed).unwrap() != plan {
            failures.push(format!("seed {seed}: partition not deterministic"));
        }
    }
    conclude("criterion 3 (fold invariants)", failures);
}

// ---------------------------------------------------------------------------
// shared synthetic runs for criteria 4-6
// ---------------------------------------------------------------------------

const ORDERING_SEEDS: [u64; 5] = [101, 102, 103, 104, 105];

fn ordering_config(seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        n_users: 350,
        categories: 11,
        n_communities: 3,
        homophily_weight: 0.5,
        target_mean_degree: 12.0,
        activity_mean: 40.0,
        activity_dispersion: 3.0,
        seed,
    }
}

fn synthetic_reports() -> &'static Vec<(u64, EvalReport)> {
    static REPORTS: OnceLock<Vec<(u64, EvalReport)>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        ORDERING_SEEDS
            .iter()
            .map(|&seed| {
                let data = generate(&ordering_config(seed)).expect("generator runs");
                let scheme = CategoryScheme::new(11).unwrap();
                let profiles =
                    build_profiles::<f64>(&data.events, &scheme, &ActionWeights::uniform(), 3);
                let report = cross_validate(
                    &data.graph,
                    &profiles.profiles,
                    &RecommenderKind::ALL,
                    &EligibilityConfig::default(),
                    &FoldConfig { k: 10, seed },
                    &SkipRule::default(),
                    &RecommendParams {
                        rng_seed: seed,
                        ..RecommendParams::default()
                    },
                )
                .expect("evaluation runs");
                (seed, report)
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// criterion 4: protocol invariants and the oracle recommender
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_protocol_invariants() {
    let mut failures = Vec::new();

    // accounting identity on every run record of the shared synthetic runs
    for (seed, report) in synthetic_reports() {
        let meta = &report.metadata;
        if meta.evaluated_cases == 0 || meta.evaluated_cases >= meta.total_cases {
            failures.push(format!(
                "seed {seed}: skip rule should leave some but not all of the {} cases, got {}",
                meta.total_cases, meta.evaluated_cases
            ));
        }
        for run in &report.runs {
            if run.true_positives + run.false_positives != run.recommendations {
                failures.push(format!("seed {seed} run {}: A != TP + FP", run.run));
            }
            if run.true_positives > run.deleted_directed {
                failures.push(format!("seed {seed} run {}: TP above base", run.run));
            }
            for rate in [run.precision, run.recall, run.f_measure] {
                if !(0.0..=1.0).contains(&rate) {
                    failures.push(format!("seed {seed} run {}: rate out of range", run.run));
                }
            }
        }
    }

    // exclusion soundness and the oracle recommender on one dataset
    let data = generate(&ordering_config(ORDERING_SEEDS[0])).unwrap();
    let scheme = CategoryScheme::new(11).unwrap();
    let profiles = build_profiles::<f64>(&data.events, &scheme, &ActionWeights::uniform(), 3);
    let eligible = personrec::eval::select_test_group(
        &data.graph,
        &profiles.profiles,
        &EligibilityConfig::default(),
    );
    let test_edges: Vec<(UserId, UserId)> = data
        .graph
        .edges()
        .filter(|(a, b)| eligible.contains(a) && eligible.contains(b))
        .collect();
    let plan = make_folds(&test_edges, 10, ORDERING_SEEDS[0]).unwrap();
    let params = RecommendParams::<f64>::default();
    let skip = SkipRule::default();

    let mut oracle_tp = 0u64;
    let mut oracle_a = 0u64;
    let mut oracle_base = 0u64;
    for fold in &plan.folds {
        let ctx = prepare_fold(&data.graph, fold, &eligible, &skip);
        for (&user, deleted) in &ctx.cases {
            for kind in RecommenderKind::ALL {
                let recs = recommend(
                    kind,
                    user,
                    &ctx.training,
                    &profiles.profiles,
                    &eligible,
                    &params,
                )
                .unwrap();
                for rec in &recs {
                    if rec.candidate == user {
                        failures.push(format!("{kind} recommended the user to themselves"));
                    }
                    if ctx.training.has_edge(user, rec.candidate) {
                        failures.push(format!("{kind} recommended a training-graph friend"));
                    }
                }
            }
            // the oracle recommender emits exactly the deleted partners
            let oracle_recs: Vec<UserId> = deleted.iter().copied().take(params.n).collect();
            oracle_a += oracle_recs.len() as u64;
            oracle_tp += oracle_recs.iter().filter(|c| deleted.contains(c)).count() as u64;
        }
        oracle_base += ctx.deleted_directed;
        if failures.len() > 10 {
            break;
        }
    }
    let oracle = metrics(oracle_a, oracle_tp, oracle_base);
    if oracle.recall != 1.0 {
        failures.push(format!(
            "oracle recommender recall {} != 1.0",
            oracle.recall
        ));
    }
    if oracle.precision != 1.0 {
        failures.push(format!(
            "oracle recommender precision {} != 1.0",
            oracle.precision
        ));
    }
    conclude("criterion 4 (protocol invariants)", failures);
}

// ---------------------------------------------------------------------------
// criterion 5: qualitative ordering
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_qualitative_ordering() {
    let reports = synthetic_reports();
    fn f(report: &EvalReport, kind: RecommenderKind) -> f64 {
        report.summary_for(kind).expect("kind was run").f_measure
    }
    type Comparison = Box<dyn Fn(&EvalReport) -> bool>;
    let comparisons: [(&str, Comparison); 4] = [
        (
            "fof > interest_cosine",
            Box::new(|r| f(r, RecommenderKind::Fof) > f(r, RecommenderKind::InterestCosine)),
        ),
        (
            "interest_cosine > random",
            Box::new(|r| f(r, RecommenderKind::InterestCosine) > f(r, RecommenderKind::Random)),
        ),
        (
            "cosine plus link >= cosine",
            Box::new(|r| {
                f(r, RecommenderKind::InterestCosinePlusLink)
                    >= f(r, RecommenderKind::InterestCosine)
            }),
        ),
        (
            "pearson plus link >= pearson",
            Box::new(|r| {
                f(r, RecommenderKind::InterestPearsonPlusLink)
                    >= f(r, RecommenderKind::InterestPearson)
            }),
        ),
    ];

    let mut failures = Vec::new();
    for (name, holds) in &comparisons {
        let wins: Vec<u64> = reports
            .iter()
            .filter(|(_, r)| holds(r))
            .map(|(s, _)| *s)
            .collect();
        println!("  {name}: holds in {}/{} seeds", wins.len(), reports.len());
        if wins.len() < 4 {
            failures.push(format!("{name} holds only in {}/5 seeds", wins.len()));
        }
    }
    conclude("criterion 5 (qualitative ordering)", failures);
}

// ---------------------------------------------------------------------------
// criterion 6: novelty proxy
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_novelty_proxy() {
    let mut failures = Vec::new();
    let mut pooled = BTreeMap::new();
    for (_, report) in synthetic_reports() {
        for kind in [RecommenderKind::InterestCosine, RecommenderKind::Fof] {
            let row = report.summary_for(kind).unwrap();
            let entry = pooled.entry(kind).or_insert((0u64, 0u64));
            let beyond: u64 = report
                .runs
                .iter()
                .filter(|r| r.recommender == kind.label())
                .map(|r| r.beyond_fof)
                .sum();
            entry.0 += beyond;
            entry.1 += row.total_recommendations;
        }
    }
    let frac = |kind| {
        let (beyond, total) = pooled[&kind];
        beyond as f64 / total as f64
    };
    let cosine = frac(RecommenderKind::InterestCosine);
    let fof = frac(RecommenderKind::Fof);
    println!("  beyond-distance-2 share: interest_cosine {cosine:.4}, fof {fof:.4}");
    if cosine <= fof {
        failures.push(format!(
            "interest_cosine beyond-distance-2 share {cosine:.4} not above fof {fof:.4}"
        ));
    }
    conclude("criterion 6 (novelty proxy)", failures);
}

// ---------------------------------------------------------------------------
// criterion 7: byte-identical reports through the CLI
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_deterministic_reports() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    let activities = dir.path().join("activities.csv");
    let bin = env!("CARGO_BIN_EXE_personrec");

    let gen = std::process::Command::new(bin)
        .args([
            "gen",
            "--edges",
            edges.to_str().unwrap(),
            "--activities",
            activities.to_str().unwrap(),
            "--users",
            "120",
            "--mean-degree",
            "8",
            "--seed",
            "77",
        ])
        .output()
        .expect("gen runs");
    assert!(gen.status.success(), "gen failed: {gen:?}");

    let mut outputs = Vec::new();
    for name in ["r1.jsonl", "r2.jsonl"] {
        let out = dir.path().join(name);
        let eval = std::process::Command::new(bin)
            .args([
                "eval",
                "--edges",
                edges.to_str().unwrap(),
                "--activities",
                activities.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--seed",
                "9",
                "--k",
                "10",
            ])
            .output()
            .expect("eval runs");
        assert!(eval.status.success(), "eval failed: {eval:?}");
        outputs.push(std::fs::read(&out).unwrap());
    }
    if outputs[0] != outputs[1] {
        failures.push("two identical eval invocations produced different bytes".to_string());
    }
    if outputs[0].is_empty() {
        failures.push("report file is empty".to_string());
    }
    conclude("criterion 7 (deterministic reports)", failures);
}

// ---------------------------------------------------------------------------
// criterion 8: performance smoke
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_performance_smoke() {
    let mut failures = Vec::new();
    let data = generate(&GeneratorConfig {
        n_users: 1000,
        target_mean_degree: 12.0,
        seed: 7,
        ..GeneratorConfig::default()
    })
    .expect("generator runs");
    let scheme = CategoryScheme::new(11).unwrap();
    let profiles = build_profiles::<f64>(&data.events, &scheme, &ActionWeights::uniform(), 3);

    let start = Instant::now();
    let report = cross_validate(
        &data.graph,
        &profiles.profiles,
        &RecommenderKind::ALL,
        &EligibilityConfig::default(),
        &FoldConfig { k: 10, seed: 7 },
        &SkipRule::default(),
        &RecommendParams::default(),
    )
    .expect("evaluation runs");
    let elapsed = start.elapsed();
    println!(
        "  10-fold, {} recommenders, {} users, {} evaluated cases: {elapsed:?}",
        report.summary.len(),
        report.metadata.users,
        report.metadata.evaluated_cases
    );
    if elapsed.as_secs_f64() >= 60.0 {
        failures.push(format!("evaluation took {elapsed:?}, budget is 60 s"));
    }
    if report.metadata.evaluated_cases == 0 {
        failures.push("no cases were evaluated".to_string());
    }
    conclude("criterion 8 (performance smoke)", failures);
}

// ---------------------------------------------------------------------------
// supporting check: generated events stay inside the declared scheme
// ---------------------------------------------------------------------------

#[test]
fn generated_events_are_well_formed() {
    let data = generate(&ordering_config(11)).unwrap();
    for (i, e) in data.events.iter().enumerate() {
        assert!(e.category < 11, "event {i} out of scheme");
        assert!(e.multiplicity >= 1);
        assert!(!e.action_kind.is_empty());
    }
    let _ = ActivityEvent::new(UserId(0), 0, "comment", 1);
}
