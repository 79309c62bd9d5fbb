//! Pluggable person-recommendation strategies.
//!
//! Six strategies share one contract: score every candidate in the pool,
//! keep scores at or above the threshold, rank descending with ties broken
//! by ascending user id, and return at most `n` results. Candidate pools
//! always exclude the target user and anyone already a friend under the
//! graph in effect (during evaluation, the training graph).
//!
//! The "plus link" hybrids rescore interest similarity by multiplying
//! scores at or above `plus_link_min` with `plus_link_factor` when the
//! pair shares at least one friend; weaker candidates pass through
//! unboosted instead of being discarded, so the hybrid recommends exactly
//! as many people as its interest-only base.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SocialGraph, UserId};
use crate::interest::{InterestProfile, SimilarityMetric};
use crate::num::Scalar;

/// The available scoring strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommenderKind {
    Random,
    InterestCosine,
    InterestPearson,
    Fof,
    InterestCosinePlusLink,
    InterestPearsonPlusLink,
}

impl RecommenderKind {
    pub const ALL: [RecommenderKind; 6] = [
        RecommenderKind::Random,
        RecommenderKind::InterestPearson,
        RecommenderKind::InterestCosine,
        RecommenderKind::Fof,
        RecommenderKind::InterestPearsonPlusLink,
        RecommenderKind::InterestCosinePlusLink,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RecommenderKind::Random => "random",
            RecommenderKind::InterestCosine => "interest_cosine",
            RecommenderKind::InterestPearson => "interest_pearson",
            RecommenderKind::Fof => "fof",
            RecommenderKind::InterestCosinePlusLink => "interest_cosine_plus_link",
            RecommenderKind::InterestPearsonPlusLink => "interest_pearson_plus_link",
        }
    }

    /// The interest metric backing this kind, if any.
    pub fn metric(self) -> Option<SimilarityMetric> {
        match self {
            RecommenderKind::InterestCosine | RecommenderKind::InterestCosinePlusLink => {
                Some(SimilarityMetric::Cosine)
            }
            RecommenderKind::InterestPearson | RecommenderKind::InterestPearsonPlusLink => {
                Some(SimilarityMetric::Pearson)
            }
            _ => None,
        }
    }

    pub fn is_plus_link(self) -> bool {
        matches!(
            self,
            RecommenderKind::InterestCosinePlusLink | RecommenderKind::InterestPearsonPlusLink
        )
    }
}

impl std::fmt::Display for RecommenderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for RecommenderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RecommenderKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| {
                Error::invalid_config(
                    "method",
                    format!(
                        "unknown recommender `{s}` (expected one of: {})",
                        RecommenderKind::ALL.map(|k| k.label()).join(", ")
                    ),
                )
            })
    }
}

/// One ranked recommendation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCandidate<F> {
    pub candidate: UserId,
    pub score: F,
    /// Whether the pair shares at least one friend under the graph used.
    pub had_common_friend: bool,
    /// Whether the plus-link boost was applied to this score.
    pub boosted: bool,
}

/// Knobs shared by all recommenders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecommendParams<F> {
    /// Maximum list length.
    pub n: usize,
    /// Candidates scoring strictly below this are excluded.
    pub score_threshold: F,
    /// Minimum pre-boost score for the plus-link boost to apply.
    pub plus_link_min: F,
    /// Boost multiplier for qualifying common-friend pairs.
    pub plus_link_factor: F,
    /// Seed for the random recommender; each user draws from an
    /// independent stream derived from (seed, user id).
    pub rng_seed: u64,
}

impl<F: Scalar> Default for RecommendParams<F> {
    fn default() -> Self {
        RecommendParams {
            n: 10,
            score_threshold: F::zero(),
            plus_link_min: F::from_f64_lossy(0.5),
            plus_link_factor: F::from_f64_lossy(1.5),
            rng_seed: 0,
        }
    }
}

impl<F: Scalar> RecommendParams<F> {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid_config("recommend.n", "must be at least 1"));
        }
        if self.plus_link_factor <= F::zero() {
            return Err(Error::invalid_config(
                "recommend.plus_link_factor",
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// Friend-of-friend recommendability: twice the common-friend count over
/// the summed friend counts, symmetric and within `[0, 1]`. Two isolated
/// users score 0.
pub fn fof_score<F: Scalar>(g: &SocialGraph, u1: UserId, u2: UserId) -> Result<F> {
    let common = g.common_friends(u1, u2)?;
    let degrees = g.degree(u1)? + g.degree(u2)?;
    if degrees == 0 {
        return Ok(F::zero());
    }
    Ok(F::from_usize(2 * common).unwrap() / F::from_usize(degrees).unwrap())
}

/// Applies the plus-link boost: scores at or above `plus_link_min` are
/// multiplied by `plus_link_factor` when the pair shares a friend.
pub fn plus_link_adjust<F: Scalar>(
    score: F,
    has_common_friend: bool,
    params: &RecommendParams<F>,
) -> F {
    if has_common_friend && score >= params.plus_link_min {
        score * params.plus_link_factor
    } else {
        score
    }
}

/// The candidates a strategy may rank for `u`: never `u` itself or a
/// current friend, restricted to `eligible`, and for interest-based kinds
/// restricted to users with an active profile. FoF considers only users at
/// distance exactly two.
pub fn candidate_pool<F: Scalar>(
    kind: RecommenderKind,
    u: UserId,
    g: &SocialGraph,
    profiles: &BTreeMap<UserId, InterestProfile<F>>,
    eligible: &BTreeSet<UserId>,
) -> Result<BTreeSet<UserId>> {
    let friends = g.neighbors(u)?;
    let not_friend = |v: &UserId| *v != u && friends.binary_search(v).is_err();
    let pool = match kind {
        RecommenderKind::Random => eligible.iter().copied().filter(not_friend).collect(),
        RecommenderKind::Fof => {
            let fof = g.fof_neighborhood(u)?;
            fof.intersection(eligible).copied().collect()
        }
        _ => eligible
            .iter()
            .copied()
            .filter(not_friend)
            .filter(|v| profiles.get(v).is_some_and(|p| p.is_active()))
            .collect(),
    };
    Ok(pool)
}

/// Top-`n` ranked candidates for `u` under the given strategy.
///
/// Scores below `score_threshold` are dropped; remaining candidates sort by
/// descending score with ties broken by ascending user id, so the result is
/// independent of iteration order. The list may be shorter than `n` when
/// the pool is exhausted.
pub fn recommend<F: Scalar>(
    kind: RecommenderKind,
    u: UserId,
    g: &SocialGraph,
    profiles: &BTreeMap<UserId, InterestProfile<F>>,
    eligible: &BTreeSet<UserId>,
    params: &RecommendParams<F>,
) -> Result<Vec<ScoredCandidate<F>>> {
    if !g.contains(u) {
        return Err(Error::UnknownUser(u));
    }
    let target_profile = match kind.metric() {
        Some(_) => Some(
            profiles
                .get(&u)
                .filter(|p| p.is_active())
                .ok_or(Error::MissingProfile(u))?,
        ),
        None => None,
    };
    let pool = candidate_pool(kind, u, g, profiles, eligible)?;

    let mut scored: Vec<ScoredCandidate<F>> = Vec::with_capacity(pool.len());
    match kind {
        RecommenderKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(per_user_seed(params.rng_seed, u));
            for v in pool {
                scored.push(ScoredCandidate {
                    candidate: v,
                    score: F::from_f64_lossy(rng.random::<f64>()),
                    had_common_friend: false,
                    boosted: false,
                });
            }
        }
        RecommenderKind::Fof => {
            for v in pool {
                scored.push(ScoredCandidate {
                    candidate: v,
                    score: fof_score(g, u, v)?,
                    had_common_friend: false,
                    boosted: false,
                });
            }
        }
        _ => {
            let metric = kind.metric().expect("interest kind");
            let a = &target_profile.expect("checked above").normalized;
            let plus_link = kind.is_plus_link();
            for v in pool {
                let base = metric.apply(a, &profiles[&v].normalized)?;
                let (score, had_common_friend, boosted) = if plus_link {
                    let has_common = g.common_friends(u, v)? > 0;
                    let adjusted = plus_link_adjust(base, has_common, params);
                    (adjusted, has_common, adjusted != base)
                } else {
                    (base, false, false)
                };
                scored.push(ScoredCandidate {
                    candidate: v,
                    score,
                    had_common_friend,
                    boosted,
                });
            }
        }
    }

    scored.retain(|c| c.score >= params.score_threshold);
    scored.sort_unstable_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.candidate.cmp(&b.candidate))
    });
    scored.truncate(params.n);

    // the flag is informational outside the plus-link path; fill it in for
    // the winners only
    if !kind.is_plus_link() {
        for c in &mut scored {
            c.had_common_friend = g.common_friends(u, c.candidate)? > 0;
        }
    }
    Ok(scored)
}

/// Independent per-user stream so concurrent per-user calls cannot change
/// the output (splitmix64 of seed and user id).
fn per_user_seed(seed: u64, u: UserId) -> u64 {
    let mut z = seed ^ u.0.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
