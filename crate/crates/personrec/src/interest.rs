//! Interest profiles from categorized platform activity.
//!
//! Every platform action (posting, commenting, awarding a point) is
//! attributed to one of `C` fixed content categories. A user's profile is
//! the per-category weighted activity count, normalized to sum to one; two
//! users are compared by cosine similarity or Pearson correlation of those
//! normalized vectors. Users below a minimum activity count are excluded,
//! and users whose weighted mass is zero are kept but marked inactive so
//! they never enter the similarity matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::UserId;
use crate::num::Scalar;

/// One categorized platform action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityEvent {
    pub user: UserId,
    /// Category index in `[0, C)`.
    pub category: usize,
    /// Open-set action label, e.g. `create_post`, `comment`,
    /// `worth_living_point`.
    pub action_kind: String,
    /// How many times the action occurred; at least 1.
    pub multiplicity: u64,
}

impl ActivityEvent {
    pub fn new(user: UserId, category: usize, action_kind: &str, multiplicity: u64) -> Self {
        ActivityEvent {
            user,
            category,
            action_kind: action_kind.to_string(),
            multiplicity,
        }
    }
}

/// Fixed category set of the platform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryScheme {
    num_categories: usize,
    names: Option<Vec<String>>,
}

impl CategoryScheme {
    pub fn new(num_categories: usize) -> Result<Self> {
        if num_categories == 0 {
            return Err(Error::invalid_config("categories", "must be at least 1"));
        }
        Ok(CategoryScheme {
            num_categories,
            names: None,
        })
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        let mut scheme = Self::new(names.len())?;
        scheme.names = Some(names);
        Ok(scheme)
    }

    pub fn num_categories(&self) -> usize {
        self.num_categories
    }

    pub fn name(&self, category: usize) -> Option<&str> {
        self.names.as_ref()?.get(category).map(String::as_str)
    }
}

/// Per-action-kind weights; unlisted kinds weigh 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionWeights<F>(pub BTreeMap<String, F>);

impl<F: Scalar> ActionWeights<F> {
    pub fn uniform() -> Self {
        ActionWeights(BTreeMap::new())
    }

    pub fn get(&self, action_kind: &str) -> F {
        self.0.get(action_kind).copied().unwrap_or_else(F::one)
    }

    pub fn validate(&self) -> Result<()> {
        for (kind, &w) in &self.0 {
            if w < F::zero() || !w.is_finite() {
                return Err(Error::invalid_config(
                    "weights",
                    format!("weight for `{kind}` must be a nonnegative finite number"),
                ));
            }
        }
        Ok(())
    }
}

impl<F: Scalar> Default for ActionWeights<F> {
    fn default() -> Self {
        Self::uniform()
    }
}

impl<F: Scalar> FromIterator<(String, F)> for ActionWeights<F> {
    fn from_iter<T: IntoIterator<Item = (String, F)>>(iter: T) -> Self {
        ActionWeights(iter.into_iter().collect())
    }
}

/// Per-user interest vector: weighted per-category counts and their
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct InterestProfile<F> {
    pub user: UserId,
    /// Weighted activity count per category.
    pub raw: Vec<F>,
    /// `raw / total`; all zeros when the profile is inactive.
    pub normalized: Vec<F>,
    /// Sum of `raw`.
    pub total: F,
    /// Unweighted activity count (sum of multiplicities of accepted events).
    pub event_count: u64,
}

impl<F: Scalar> InterestProfile<F> {
    /// Whether the profile carries any weighted mass. Inactive profiles are
    /// excluded from similarity computations.
    pub fn is_active(&self) -> bool {
        self.total > F::zero()
    }
}

/// An event build_profiles refused, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedEvent {
    /// Index into the input event list.
    pub index: usize,
    pub user: UserId,
    pub reason: String,
}

/// Outcome of [`build_profiles`].
#[derive(Debug, Clone)]
pub struct ProfileBuild<F> {
    pub profiles: BTreeMap<UserId, InterestProfile<F>>,
    pub rejected: Vec<RejectedEvent>,
    /// Users dropped because their unweighted activity count fell below the
    /// minimum.
    pub excluded_below_min: usize,
}

/// Accumulates per-user weighted category counts from an activity log.
///
/// Events with an out-of-range category (or zero multiplicity) are rejected
/// with a diagnostic. Users whose unweighted activity count is below
/// `min_activities` are excluded entirely; the threshold deliberately
/// ignores action weights.
pub fn build_profiles<F: Scalar>(
    events: &[ActivityEvent],
    scheme: &CategoryScheme,
    weights: &ActionWeights<F>,
    min_activities: u64,
) -> ProfileBuild<F> {
    let c = scheme.num_categories();
    let mut raw: BTreeMap<UserId, Vec<F>> = BTreeMap::new();
    let mut counts: BTreeMap<UserId, u64> = BTreeMap::new();
    let mut rejected = Vec::new();

    for (index, ev) in events.iter().enumerate() {
        if ev.category >= c {
            rejected.push(RejectedEvent {
                index,
                user: ev.user,
                reason: format!("category {} out of range (C = {c})", ev.category),
            });
            continue;
        }
        if ev.multiplicity == 0 {
            rejected.push(RejectedEvent {
                index,
                user: ev.user,
                reason: "multiplicity must be at least 1".to_string(),
            });
            continue;
        }
        let w = weights.get(&ev.action_kind) * F::from_u64(ev.multiplicity).unwrap();
        raw.entry(ev.user).or_insert_with(|| vec![F::zero(); c])[ev.category] += w;
        *counts.entry(ev.user).or_insert(0) += ev.multiplicity;
    }

    let mut profiles = BTreeMap::new();
    let mut excluded_below_min = 0;
    for (user, raw) in raw {
        if counts[&user] < min_activities {
            excluded_below_min += 1;
            continue;
        }
        let total = raw.iter().fold(F::zero(), |acc, &x| acc + x);
        let normalized = if total > F::zero() {
            raw.iter().map(|&x| x / total).collect()
        } else {
            vec![F::zero(); c]
        };
        profiles.insert(
            user,
            InterestProfile {
                user,
                raw,
                normalized,
                total,
                event_count: counts[&user],
            },
        );
    }

    ProfileBuild {
        profiles,
        rejected,
        excluded_below_min,
    }
}

/// Cosine similarity of two equal-length vectors, in `[-1, 1]`.
///
/// A zero-norm argument yields 0 rather than an error, so inactive users
/// simply never rank highly.
pub fn cosine_similarity<F: Scalar>(a: &[F], b: &[F]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut dot = F::zero();
    let mut norm_a = F::zero();
    let mut norm_b = F::zero();
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a.is_zero() || norm_b.is_zero() {
        return Ok(F::zero());
    }
    Ok(dot / (norm_a.sqrt() * norm_b.sqrt()))
}

/// Sample Pearson correlation of two equal-length vectors over the category
/// index, in `[-1, 1]`. Zero variance on either side yields 0.
pub fn pearson_similarity<F: Scalar>(a: &[F], b: &[F]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Ok(F::zero());
    }
    let len = F::from_usize(n).unwrap();
    let mean_a = a.iter().fold(F::zero(), |acc, &x| acc + x) / len;
    let mean_b = b.iter().fold(F::zero(), |acc, &x| acc + x) / len;
    let mut cov = F::zero();
    let mut var_a = F::zero();
    let mut var_b = F::zero();
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a.is_zero() || var_b.is_zero() {
        return Ok(F::zero());
    }
    Ok(cov / (var_a.sqrt() * var_b.sqrt()))
}

/// Which vector comparison an interest recommender uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMetric {
    Cosine,
    Pearson,
}

impl SimilarityMetric {
    pub fn apply<F: Scalar>(self, a: &[F], b: &[F]) -> Result<F> {
        match self {
            SimilarityMetric::Cosine => cosine_similarity(a, b),
            SimilarityMetric::Pearson => pearson_similarity(a, b),
        }
    }
}

/// Symmetric pairwise similarity over the active profiles, one entry per
/// unordered pair, diagonal omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<F> {
    metric: SimilarityMetric,
    users: Vec<UserId>,
    index: BTreeMap<UserId, usize>,
    // upper triangle, row-major: (i, j) with i < j at tri_index(i, j)
    values: Vec<F>,
}

/// Computes the full pairwise similarity matrix over the active profiles.
/// Inactive profiles are skipped.
pub fn similarity_matrix<F: Scalar>(
    profiles: &BTreeMap<UserId, InterestProfile<F>>,
    metric: SimilarityMetric,
) -> SimilarityMatrix<F> {
    let users: Vec<UserId> = profiles
        .iter()
        .filter(|(_, p)| p.is_active())
        .map(|(&u, _)| u)
        .collect();
    let index = users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let n = users.len();
    let mut values = Vec::with_capacity(n.saturating_sub(1) * n / 2);
    for i in 0..n {
        let a = &profiles[&users[i]].normalized;
        for j in (i + 1)..n {
            let b = &profiles[&users[j]].normalized;
            values.push(
                metric
                    .apply(a, b)
                    .expect("profiles share the scheme length"),
            );
        }
    }
    SimilarityMatrix {
        metric,
        users,
        index,
        values,
    }
}

impl<F: Scalar> SimilarityMatrix<F> {
    pub fn metric(&self) -> SimilarityMetric {
        self.metric
    }

    /// Number of stored unordered pairs.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Similarity of an unordered pair; `None` for the diagonal or users
    /// absent from the matrix.
    pub fn get(&self, u: UserId, v: UserId) -> Option<F> {
        if u == v {
            return None;
        }
        let i = *self.index.get(&u)?;
        let j = *self.index.get(&v)?;
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Some(self.values[self.tri_index(i, j)])
    }

    /// All entries as `((u, v), similarity)` with `u < v`.
    pub fn entries(&self) -> impl Iterator<Item = ((UserId, UserId), F)> + '_ {
        let n = self.users.len();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).map(move |j| {
                (
                    (self.users[i], self.users[j]),
                    self.values[self.tri_index(i, j)],
                )
            })
        })
    }

    fn tri_index(&self, i: usize, j: usize) -> usize {
        let n = self.users.len();
        // offset of row i into the packed upper triangle
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }
}
