//! Seeded synthetic social-network and activity generator.
//!
//! Users are assigned to communities with disjoint category blocks;
//! activities are multinomial draws from the community's category
//! distribution. Edges grow sequentially: a random user picks a partner
//! with probability proportional to
//! `alpha * cosine(interests) + (1 - alpha) * normalized common-neighbor count`,
//! so triadic closure is causal rather than baked into a static model.
//! Everything derives from one seed, split per component by fixed labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph_with_users, SocialGraph, UserId};
use crate::interest::{build_profiles, ActionWeights, ActivityEvent, CategoryScheme};

/// Action kinds emitted by the generator, with their sampling odds.
const ACTION_KINDS: [(&str, f64); 3] = [
    ("create_post", 0.20),
    ("comment", 0.45),
    ("worth_living_point", 0.35),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_users: usize,
    /// Interest categories (the reference platform has eleven).
    pub categories: usize,
    /// Communities with pairwise-disjoint category blocks.
    pub n_communities: usize,
    /// Interest weight `alpha` in `[0, 1]`; the closure weight is `1 - alpha`.
    pub homophily_weight: f64,
    pub target_mean_degree: f64,
    /// Mean of the per-user activity-count distribution (negative
    /// binomial via gamma-Poisson mixing).
    pub activity_mean: f64,
    /// Dispersion of the activity-count distribution; smaller is burstier.
    pub activity_dispersion: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_users: 350,
            categories: 11,
            n_communities: 3,
            homophily_weight: 0.5,
            target_mean_degree: 12.0,
            activity_mean: 40.0,
            activity_dispersion: 3.0,
            seed: 42,
        }
    }
}

impl GeneratorConfig {
    pub fn closure_weight(&self) -> f64 {
        1.0 - self.homophily_weight
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users < 2 {
            return Err(Error::invalid_config("n_users", "must be at least 2"));
        }
        if self.categories == 0 {
            return Err(Error::invalid_config("categories", "must be at least 1"));
        }
        if self.n_communities == 0 || self.n_communities > self.categories {
            return Err(Error::invalid_config(
                "n_communities",
                "must be between 1 and the category count",
            ));
        }
        if !(0.0..=1.0).contains(&self.homophily_weight) {
            return Err(Error::invalid_config(
                "homophily_weight",
                "must lie in [0, 1]",
            ));
        }
        if !self.target_mean_degree.is_finite()
            || self.target_mean_degree < 0.0
            || self.target_mean_degree >= self.n_users as f64
        {
            return Err(Error::invalid_config(
                "target_mean_degree",
                "must be nonnegative and below n_users",
            ));
        }
        if self.activity_mean < 0.0 || !self.activity_mean.is_finite() {
            return Err(Error::invalid_config(
                "activity_mean",
                "must be nonnegative",
            ));
        }
        if self.activity_dispersion <= 0.0 || !self.activity_dispersion.is_finite() {
            return Err(Error::invalid_config(
                "activity_dispersion",
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// A generated dataset. `communities[i]` is user `i`'s community index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graph: SocialGraph,
    pub events: Vec<ActivityEvent>,
    pub communities: Vec<usize>,
}

/// Generates a dataset deterministically from the config seed.
pub fn generate(cfg: &GeneratorConfig) -> Result<Dataset> {
    cfg.validate()?;
    let n = cfg.n_users;

    let mut community_rng = component_rng(cfg.seed, "communities");
    let communities: Vec<usize> = (0..n)
        .map(|_| community_rng.random_range(0..cfg.n_communities))
        .collect();
    let blocks = category_blocks(cfg.categories, cfg.n_communities);

    let mut activity_rng = component_rng(cfg.seed, "activities");
    let mut events = Vec::new();
    for (user, &community) in communities.iter().enumerate() {
        let count = sample_activity_count(cfg, &mut activity_rng);
        let block = &blocks[community];
        for _ in 0..count {
            let category = block.start + activity_rng.random_range(0..block.len());
            let kind = sample_action_kind(&mut activity_rng);
            events.push(ActivityEvent::new(UserId(user as u64), category, kind, 1));
        }
    }

    let graph = grow_edges(cfg, &events)?;
    Ok(Dataset {
        graph,
        events,
        communities,
    })
}

#[derive(Debug, Clone, Copy)]
struct Block {
    start: usize,
    end: usize,
}

impl Block {
    fn len(&self) -> usize {
        self.end - self.start
    }
}

/// Splits the category range into nearly equal contiguous, disjoint blocks.
fn category_blocks(categories: usize, n_communities: usize) -> Vec<Block> {
    let base = categories / n_communities;
    let rem = categories % n_communities;
    let mut blocks = Vec::with_capacity(n_communities);
    let mut start = 0;
    for i in 0..n_communities {
        let len = base + usize::from(i < rem);
        blocks.push(Block {
            start,
            end: start + len,
        });
        start += len;
    }
    blocks
}

fn sample_activity_count(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> u64 {
    if cfg.activity_mean <= 0.0 {
        return 0;
    }
    let shape = cfg.activity_dispersion;
    let scale = cfg.activity_mean / cfg.activity_dispersion;
    let lambda = Gamma::new(shape, scale)
        .expect("validated dispersion and mean")
        .sample(rng);
    if lambda <= 0.0 || !lambda.is_finite() {
        return 0;
    }
    Poisson::new(lambda).expect("positive lambda").sample(rng) as u64
}

fn sample_action_kind(rng: &mut ChaCha8Rng) -> &'static str {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    for (kind, p) in ACTION_KINDS {
        acc += p;
        if x < acc {
            return kind;
        }
    }
    ACTION_KINDS[ACTION_KINDS.len() - 1].0
}

fn grow_edges(cfg: &GeneratorConfig, events: &[ActivityEvent]) -> Result<SocialGraph> {
    let n = cfg.n_users;
    let target_edges = (n as f64 * cfg.target_mean_degree / 2.0).round() as usize;
    let max_edges = n * (n - 1) / 2;
    if target_edges > max_edges {
        return Err(Error::invalid_config(
            "target_mean_degree",
            format!("needs {target_edges} edges but only {max_edges} distinct pairs exist"),
        ));
    }

    // interest vectors for the homophily term; inactive users contribute 0
    let scheme = CategoryScheme::new(cfg.categories).expect("validated");
    let built = build_profiles::<f64>(events, &scheme, &ActionWeights::uniform(), 0);
    let vectors: Vec<Option<Vec<f64>>> = (0..n)
        .map(|user| {
            built
                .profiles
                .get(&UserId(user as u64))
                .filter(|p| p.is_active())
                .map(|p| p.normalized.clone())
        })
        .collect();

    let alpha = cfg.homophily_weight;
    let beta = cfg.closure_weight();
    let mut rng = component_rng(cfg.seed, "edges");
    let mut adjacency: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
    let mut edges: Vec<(UserId, UserId)> = Vec::with_capacity(target_edges);
    let mut candidates = Vec::with_capacity(n);
    let mut interest_w = Vec::with_capacity(n);
    let mut closure_w = Vec::with_capacity(n);

    while edges.len() < target_edges {
        let source = rng.random_range(0..n);
        candidates.clear();
        interest_w.clear();
        closure_w.clear();
        let mut interest_sum = 0.0;
        let mut closure_sum = 0.0;
        for v in 0..n {
            if v == source || adjacency[source].contains(&v) {
                continue;
            }
            let interest = match (&vectors[source], &vectors[v]) {
                (Some(a), Some(b)) => cosine(a, b).max(0.0),
                _ => 0.0,
            };
            let common = adjacency[source].intersection(&adjacency[v]).count() as f64;
            candidates.push(v);
            interest_w.push(interest);
            closure_w.push(common);
            interest_sum += interest;
            closure_sum += common;
        }
        if candidates.is_empty() {
            continue; // source is saturated; the target is reachable elsewhere
        }
        // each factor is normalized over the candidate set, so alpha and
        // beta weight the two attachment mechanisms rather than two
        // incomparable score scales; interest_w becomes the mixed weight
        let mut total = 0.0;
        for i in 0..candidates.len() {
            let interest = if interest_sum > 0.0 {
                interest_w[i] / interest_sum
            } else {
                0.0
            };
            let closure = if closure_sum > 0.0 {
                closure_w[i] / closure_sum
            } else {
                0.0
            };
            interest_w[i] = alpha * interest + beta * closure;
            total += interest_w[i];
        }
        let pick = if total > 0.0 {
            let mut x = rng.random::<f64>() * total;
            let mut chosen = candidates.len() - 1;
            for (i, &w) in interest_w.iter().enumerate() {
                if x < w {
                    chosen = i;
                    break;
                }
                x -= w;
            }
            candidates[chosen]
        } else {
            candidates[rng.random_range(0..candidates.len())]
        };
        adjacency[source].insert(pick);
        adjacency[pick].insert(source);
        edges.push((UserId(source as u64), UserId(pick as u64)));
    }

    let users = (0..n).map(|i| UserId(i as u64));
    Ok(build_graph_with_users(users, edges).0)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    crate::interest::cosine_similarity(a, b).expect("equal scheme length")
}

/// Independent stream per component, all derived from the one user seed.
fn component_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}
