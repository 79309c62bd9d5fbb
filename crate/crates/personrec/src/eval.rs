//! k-fold friendship-edge holdout evaluation.
//!
//! Protocol: select a test group (enough friends, enough friends of
//! friends, enough activity — measured within the group, iterated to a
//! fixed point), partition the group's edges into k folds, and for each
//! fold delete those edges from the graph. Users whose deleted-edge count
//! falls outside the skip rule are not evaluated that run. Every
//! recommender then ranks candidates against the training graph (interest
//! profiles stay on the full activity log, which is never held out), and a
//! recommendation counts as a true positive when it names a deleted
//! partner of the target user.
//!
//! Recall uses one reproduction opportunity per (user, deleted partner)
//! directed pair over the evaluated cases; the undirected-edge base is
//! reported alongside in the metadata. Summary rates pool counts across
//! runs (micro average); per-run means (macro average) are reported too.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical_edge, SocialGraph, UserId};
use crate::interest::InterestProfile;
use crate::num::Scalar;
use crate::recommend::{recommend, RecommendParams, RecommenderKind};

/// Who belongs to the test group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EligibilityConfig {
    pub min_friends: usize,
    pub min_fof: usize,
    pub min_activities: u64,
}

impl Default for EligibilityConfig {
    fn default() -> Self {
        EligibilityConfig {
            min_friends: 3,
            min_fof: 8,
            min_activities: 3,
        }
    }
}

/// Per-user, per-fold evaluation bounds on the deleted-edge count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SkipRule {
    pub min_deleted: usize,
    pub max_deleted: usize,
}

impl Default for SkipRule {
    fn default() -> Self {
        SkipRule {
            min_deleted: 1,
            max_deleted: 10,
        }
    }
}

impl SkipRule {
    pub fn validate(&self) -> Result<()> {
        if self.min_deleted > self.max_deleted {
            return Err(Error::invalid_config(
                "skip.min_deleted",
                "must not exceed skip.max_deleted",
            ));
        }
        Ok(())
    }

    pub fn evaluates(&self, deleted: usize) -> bool {
        deleted >= self.min_deleted && deleted <= self.max_deleted
    }
}

/// Fold count and partition seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FoldConfig {
    pub k: usize,
    pub seed: u64,
}

impl Default for FoldConfig {
    fn default() -> Self {
        FoldConfig { k: 10, seed: 0 }
    }
}

/// Partition of the test-group edge set into k disjoint folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Vec<(UserId, UserId)>>,
}

/// Eligible users: at least `min_friends` friends, `min_fof` friends of
/// friends, and an active profile with at least `min_activities`
/// activities. Friend and FoF counts are taken within the retained group,
/// so removals cascade until the set is stable.
pub fn select_test_group<F: Scalar>(
    g: &SocialGraph,
    profiles: &BTreeMap<UserId, InterestProfile<F>>,
    cfg: &EligibilityConfig,
) -> BTreeSet<UserId> {
    let mut retained: BTreeSet<UserId> = g
        .users()
        .filter(|v| {
            profiles
                .get(v)
                .is_some_and(|p| p.is_active() && p.event_count >= cfg.min_activities)
        })
        .collect();
    loop {
        let removed: Vec<UserId> = retained
            .iter()
            .copied()
            .filter(|&v| !meets_graph_bounds(g, v, &retained, cfg))
            .collect();
        if removed.is_empty() {
            return retained;
        }
        for v in removed {
            retained.remove(&v);
        }
    }
}

fn meets_graph_bounds(
    g: &SocialGraph,
    v: UserId,
    group: &BTreeSet<UserId>,
    cfg: &EligibilityConfig,
) -> bool {
    let friends: Vec<UserId> = g
        .neighbors(v)
        .expect("group members are graph users")
        .iter()
        .copied()
        .filter(|w| group.contains(w))
        .collect();
    if friends.len() < cfg.min_friends {
        return false;
    }
    let mut fof = BTreeSet::new();
    for &f in &friends {
        for &w in g.neighbors(f).expect("adjacency is symmetric") {
            if w != v && group.contains(&w) && friends.binary_search(&w).is_err() {
                fof.insert(w);
            }
        }
    }
    fof.len() >= cfg.min_fof
}

/// Seeded uniform partition of `edges` into `k` folds whose sizes differ by
/// at most one. Deterministic for a fixed seed.
pub fn make_folds(edges: &[(UserId, UserId)], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid_config("folds.k", "must be at least 2"));
    }
    let mut canonical: Vec<(UserId, UserId)> =
        edges.iter().map(|&(a, b)| canonical_edge(a, b)).collect();
    canonical.sort_unstable();
    canonical.dedup();
    if canonical.len() < k {
        return Err(Error::TooFewEdges {
            edges: canonical.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    canonical.shuffle(&mut rng);
    let base = canonical.len() / k;
    let remainder = canonical.len() % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < remainder);
        folds.push(canonical[start..start + size].to_vec());
        start += size;
    }
    Ok(FoldPlan { k, seed, folds })
}

/// One fold's training graph plus the per-user evaluation cases.
#[derive(Debug, Clone)]
pub struct FoldContext {
    pub training: SocialGraph,
    /// Evaluated user to the partners of their deleted edges.
    pub cases: BTreeMap<UserId, BTreeSet<UserId>>,
    /// Eligible users not evaluated this fold per the skip rule.
    pub skipped: u64,
    /// Reproduction opportunities: one per (user, deleted partner) pair.
    pub deleted_directed: u64,
    /// Deleted edges with at least one evaluated endpoint.
    pub deleted_undirected: u64,
}

/// Removes the fold edges from the graph and applies the skip rule to
/// every eligible user.
pub fn prepare_fold(
    g: &SocialGraph,
    fold: &[(UserId, UserId)],
    eligible: &BTreeSet<UserId>,
    skip: &SkipRule,
) -> FoldContext {
    let removed: BTreeSet<(UserId, UserId)> =
        fold.iter().map(|&(a, b)| canonical_edge(a, b)).collect();
    let training = g.without_edges(&removed);

    let mut partners: BTreeMap<UserId, BTreeSet<UserId>> = BTreeMap::new();
    for &(a, b) in &removed {
        if eligible.contains(&a) {
            partners.entry(a).or_default().insert(b);
        }
        if eligible.contains(&b) {
            partners.entry(b).or_default().insert(a);
        }
    }

    let mut cases = BTreeMap::new();
    let mut skipped = 0;
    for &user in eligible {
        let deleted = partners.remove(&user).unwrap_or_default();
        if skip.evaluates(deleted.len()) {
            cases.insert(user, deleted);
        } else {
            skipped += 1;
        }
    }

    let deleted_directed = cases.values().map(|s| s.len() as u64).sum();
    let deleted_undirected = removed
        .iter()
        .filter(|(a, b)| cases.contains_key(a) || cases.contains_key(b))
        .count() as u64;
    FoldContext {
        training,
        cases,
        skipped,
        deleted_directed,
        deleted_undirected,
    }
}

/// Per-recommender tallies for one fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldKindStats {
    pub kind: RecommenderKind,
    pub recommendations: u64,
    pub true_positives: u64,
    /// Recommendations at training-graph distance greater than two.
    pub beyond_fof: u64,
}

/// All tallies for one fold.
#[derive(Debug, Clone)]
pub struct FoldRunStats {
    pub evaluated_cases: u64,
    pub skipped_cases: u64,
    pub deleted_directed: u64,
    pub deleted_undirected: u64,
    pub per_kind: Vec<FoldKindStats>,
}

/// Evaluates every requested recommender on one fold: recommendations are
/// computed against the training graph with full-data interest profiles;
/// true positives are recommendations naming a deleted partner.
pub fn run_fold<F: Scalar>(
    g: &SocialGraph,
    profiles: &BTreeMap<UserId, InterestProfile<F>>,
    eligible: &BTreeSet<UserId>,
    fold: &[(UserId, UserId)],
    kinds: &[RecommenderKind],
    skip: &SkipRule,
    params: &RecommendParams<F>,
) -> Result<FoldRunStats> {
    let ctx = prepare_fold(g, fold, eligible, skip);
    let mut per_kind: Vec<FoldKindStats> = kinds
        .iter()
        .map(|&kind| FoldKindStats {
            kind,
            recommendations: 0,
            true_positives: 0,
            beyond_fof: 0,
        })
        .collect();

    for (&user, deleted) in &ctx.cases {
        let fof = ctx.training.fof_neighborhood(user)?;
        for (slot, &kind) in kinds.iter().enumerate() {
            let recs = recommend(kind, user, &ctx.training, profiles, eligible, params)?;
            let stats = &mut per_kind[slot];
            stats.recommendations += recs.len() as u64;
            for rec in &recs {
                if deleted.contains(&rec.candidate) {
                    stats.true_positives += 1;
                }
                // candidates are never the user or a training friend, so
                // anything outside the FoF set sits at distance > 2
                if !fof.contains(&rec.candidate) {
                    stats.beyond_fof += 1;
                }
            }
        }
    }

    Ok(FoldRunStats {
        evaluated_cases: ctx.cases.len() as u64,
        skipped_cases: ctx.skipped,
        deleted_directed: ctx.deleted_directed,
        deleted_undirected: ctx.deleted_undirected,
        per_kind,
    })
}

/// Precision / recall / f-measure from pooled counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Rates from raw counts: precision over emitted recommendations, recall
/// over the deleted base, f-measure as their harmonic mean. Empty
/// denominators yield 0.
pub fn metrics(recommendations: u64, true_positives: u64, deleted_base: u64) -> Metrics {
    let precision = if recommendations > 0 {
        true_positives as f64 / recommendations as f64
    } else {
        0.0
    };
    let recall = if deleted_base > 0 {
        true_positives as f64 / deleted_base as f64
    } else {
        0.0
    };
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Metrics {
        precision,
        recall,
        f_measure,
    }
}

/// One recommender's tallies and rates in one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub recommender: String,
    pub evaluated_cases: u64,
    pub deleted_directed: u64,
    pub deleted_undirected: u64,
    pub recommendations: u64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub beyond_fof: u64,
}

/// One recommender's pooled tallies across all runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub recommender: String,
    pub total_recommendations: u64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f_measure: f64,
    /// Share of recommendations at training-graph distance greater than
    /// two, a novelty proxy.
    pub beyond_fof_fraction: f64,
}

/// Config echo, dataset counts, and accounting conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub users: u64,
    pub edges: u64,
    pub friendship_records: u64,
    pub eligible_users: u64,
    pub test_group_edges: u64,
    pub total_cases: u64,
    pub evaluated_cases: u64,
    pub skipped_cases: u64,
    pub deleted_directed_total: u64,
    pub deleted_undirected_total: u64,
    pub k: usize,
    pub fold_seed: u64,
    pub eligibility: EligibilityConfig,
    pub skip: SkipRule,
    pub n: usize,
    pub score_threshold: f64,
    pub plus_link_min: f64,
    pub plus_link_factor: f64,
    pub rng_seed: u64,
    /// Number of interest categories (vector length of the profiles).
    pub categories: usize,
    /// Action-kind weights in effect; filled in by the pipeline that built
    /// the profiles.
    #[serde(default)]
    pub action_weights: BTreeMap<String, f64>,
    pub recommenders: Vec<String>,
    /// Recall denominator convention.
    pub recall_base: String,
    /// Which vectors the similarity metrics compare.
    pub similarity_basis: String,
}

/// Full evaluation output: metadata, one record per recommender per run,
/// and the pooled summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metadata: ReportMetadata,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRecord>,
}

impl EvalReport {
    /// Summary row for a recommender, if it was part of the run.
    pub fn summary_for(&self, kind: RecommenderKind) -> Option<&SummaryRecord> {
        self.summary.iter().find(|s| s.recommender == kind.label())
    }
}

/// Runs the full k-fold holdout and aggregates per-run and pooled rates.
pub fn cross_validate<F: Scalar>(
    g: &SocialGraph,
    profiles: &BTreeMap<UserId, InterestProfile<F>>,
    kinds: &[RecommenderKind],
    eligibility: &EligibilityConfig,
    folds: &FoldConfig,
    skip: &SkipRule,
    params: &RecommendParams<F>,
) -> Result<EvalReport> {
    params.validate()?;
    skip.validate()?;
    let eligible = select_test_group(g, profiles, eligibility);
    let test_edges: Vec<(UserId, UserId)> = g
        .edges()
        .filter(|(a, b)| eligible.contains(a) && eligible.contains(b))
        .collect();
    let plan = make_folds(&test_edges, folds.k, folds.seed)?;

    let mut runs = Vec::with_capacity(plan.k * kinds.len());
    let mut totals: Vec<(u64, u64, u64)> = vec![(0, 0, 0); kinds.len()]; // (a, tp, beyond)
    let mut macro_sums: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 0.0); kinds.len()];
    let mut evaluated_total = 0;
    let mut skipped_total = 0;
    let mut directed_total = 0;
    let mut undirected_total = 0;

    for (run, fold) in plan.folds.iter().enumerate() {
        let stats = run_fold(g, profiles, &eligible, fold, kinds, skip, params)?;
        evaluated_total += stats.evaluated_cases;
        skipped_total += stats.skipped_cases;
        directed_total += stats.deleted_directed;
        undirected_total += stats.deleted_undirected;
        for (slot, ks) in stats.per_kind.iter().enumerate() {
            let m = metrics(
                ks.recommendations,
                ks.true_positives,
                stats.deleted_directed,
            );
            totals[slot].0 += ks.recommendations;
            totals[slot].1 += ks.true_positives;
            totals[slot].2 += ks.beyond_fof;
            macro_sums[slot].0 += m.precision;
            macro_sums[slot].1 += m.recall;
            macro_sums[slot].2 += m.f_measure;
            runs.push(RunRecord {
                run,
                recommender: ks.kind.label().to_string(),
                evaluated_cases: stats.evaluated_cases,
                deleted_directed: stats.deleted_directed,
                deleted_undirected: stats.deleted_undirected,
                recommendations: ks.recommendations,
                true_positives: ks.true_positives,
                false_positives: ks.recommendations - ks.true_positives,
                false_negatives: stats.deleted_directed - ks.true_positives,
                precision: m.precision,
                recall: m.recall,
                f_measure: m.f_measure,
                beyond_fof: ks.beyond_fof,
            });
        }
    }

    let k = plan.k as f64;
    let summary = kinds
        .iter()
        .enumerate()
        .map(|(slot, &kind)| {
            let (a, tp, beyond) = totals[slot];
            let m = metrics(a, tp, directed_total);
            SummaryRecord {
                recommender: kind.label().to_string(),
                total_recommendations: a,
                true_positives: tp,
                false_positives: a - tp,
                false_negatives: directed_total - tp,
                precision: m.precision,
                recall: m.recall,
                f_measure: m.f_measure,
                macro_precision: macro_sums[slot].0 / k,
                macro_recall: macro_sums[slot].1 / k,
                macro_f_measure: macro_sums[slot].2 / k,
                beyond_fof_fraction: if a > 0 { beyond as f64 / a as f64 } else { 0.0 },
            }
        })
        .collect();

    let categories = profiles.values().next().map_or(0, |p| p.normalized.len());
    let metadata = ReportMetadata {
        users: g.user_count() as u64,
        edges: g.edge_count() as u64,
        friendship_records: g.record_count() as u64,
        eligible_users: eligible.len() as u64,
        test_group_edges: test_edges.len() as u64,
        total_cases: (eligible.len() * plan.k) as u64,
        evaluated_cases: evaluated_total,
        skipped_cases: skipped_total,
        deleted_directed_total: directed_total,
        deleted_undirected_total: undirected_total,
        k: plan.k,
        fold_seed: plan.seed,
        eligibility: *eligibility,
        skip: *skip,
        n: params.n,
        score_threshold: params.score_threshold.to_f64_lossy(),
        plus_link_min: params.plus_link_min.to_f64_lossy(),
        plus_link_factor: params.plus_link_factor.to_f64_lossy(),
        rng_seed: params.rng_seed,
        categories,
        action_weights: BTreeMap::new(),
        recommenders: kinds.iter().map(|k| k.label().to_string()).collect(),
        recall_base: "directed_pairs".to_string(),
        similarity_basis: "normalized".to_string(),
    };

    Ok(EvalReport {
        metadata,
        runs,
        summary,
    })
}
