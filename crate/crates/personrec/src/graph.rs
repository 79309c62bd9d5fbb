//! Immutable undirected friendship graph.
//!
//! Friendship records are canonicalized on build: both orientations of a
//! pair collapse to one undirected edge, duplicates merge, and self-loops
//! are dropped (counted in the build report). Adjacency lists are kept
//! sorted so every iteration order downstream is deterministic. After
//! construction the graph is read-only and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque user identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u64);

impl std::fmt::Display for UserId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for UserId {
    fn from(id: u64) -> Self {
        UserId(id)
    }
}

/// Canonical unordered pair, smaller id first.
pub fn canonical_edge(a: UserId, b: UserId) -> (UserId, UserId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// What build_graph dropped or merged while canonicalizing its input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphBuildReport {
    /// Self-loop records dropped (the endpoint is still registered as a user).
    pub self_loops_dropped: usize,
    /// Records merged into an already-present edge (either orientation).
    pub duplicates_merged: usize,
}

/// Undirected simple friendship graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: BTreeMap<UserId, Vec<UserId>>,
    edge_count: usize,
}

/// Builds a graph from raw friendship records, canonicalizing leniently.
///
/// Duplicate records and both-orientation pairs collapse to one edge;
/// self-loops are dropped but still register the user. The report counts
/// what was dropped or merged.
pub fn build_graph(
    edges: impl IntoIterator<Item = (UserId, UserId)>,
) -> (SocialGraph, GraphBuildReport) {
    build_graph_with_users(std::iter::empty(), edges)
}

/// Like [`build_graph`], but registers `users` up front so isolated users
/// (no surviving edge) stay part of the graph.
pub fn build_graph_with_users(
    users: impl IntoIterator<Item = UserId>,
    edges: impl IntoIterator<Item = (UserId, UserId)>,
) -> (SocialGraph, GraphBuildReport) {
    let mut adjacency: BTreeMap<UserId, BTreeSet<UserId>> = BTreeMap::new();
    let mut report = GraphBuildReport::default();
    for u in users {
        adjacency.entry(u).or_default();
    }
    let mut edge_count = 0usize;
    for (a, b) in edges {
        adjacency.entry(a).or_default();
        adjacency.entry(b).or_default();
        if a == b {
            report.self_loops_dropped += 1;
            continue;
        }
        let inserted = adjacency.get_mut(&a).unwrap().insert(b);
        if inserted {
            adjacency.get_mut(&b).unwrap().insert(a);
            edge_count += 1;
        } else {
            report.duplicates_merged += 1;
        }
    }
    let adjacency = adjacency
        .into_iter()
        .map(|(u, adj)| (u, adj.into_iter().collect::<Vec<_>>()))
        .collect();
    (
        SocialGraph {
            adjacency,
            edge_count,
        },
        report,
    )
}

impl SocialGraph {
    /// Canonicalized graph from an edge list, discarding the build report.
    pub fn from_edges(edges: impl IntoIterator<Item = (UserId, UserId)>) -> Self {
        build_graph(edges).0
    }

    pub fn user_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Directed friendship-record count (each edge seen from both ends).
    pub fn record_count(&self) -> usize {
        self.edge_count * 2
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.adjacency.contains_key(&u)
    }

    /// All users in ascending id order.
    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.adjacency.keys().copied()
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: UserId) -> Result<&[UserId]> {
        self.adjacency
            .get(&u)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownUser(u))
    }

    pub fn degree(&self, u: UserId) -> Result<usize> {
        Ok(self.neighbors(u)?.len())
    }

    pub fn has_edge(&self, u: UserId, v: UserId) -> bool {
        self.adjacency
            .get(&u)
            .is_some_and(|adj| adj.binary_search(&v).is_ok())
    }

    /// Size of the common neighborhood of `u1` and `u2`. Symmetric.
    pub fn common_friends(&self, u1: UserId, u2: UserId) -> Result<usize> {
        let a = self.neighbors(u1)?;
        let b = self.neighbors(u2)?;
        Ok(sorted_intersection_len(a, b))
    }

    /// Users at graph distance exactly two from `u` (neither `u` itself
    /// nor a direct friend).
    pub fn fof_neighborhood(&self, u: UserId) -> Result<BTreeSet<UserId>> {
        let friends = self.neighbors(u)?;
        let mut fof = BTreeSet::new();
        for &v in friends {
            for &w in self.neighbors(v).expect("adjacency is symmetric") {
                if w != u {
                    fof.insert(w);
                }
            }
        }
        for &v in friends {
            fof.remove(&v);
        }
        Ok(fof)
    }

    /// Canonical edge list, ascending, smaller endpoint first.
    pub fn edges(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.adjacency.iter().flat_map(|(&u, adj)| {
            adj.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Copy of the graph with the given edges removed; users are preserved
    /// even when they lose their last edge.
    pub fn without_edges(&self, removed: &BTreeSet<(UserId, UserId)>) -> SocialGraph {
        let kept = self
            .edges()
            .filter(|&(a, b)| !removed.contains(&canonical_edge(a, b)));
        build_graph_with_users(self.users(), kept).0
    }

    /// Mean number of friends per user (0 for an empty graph).
    pub fn mean_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            return 0.0;
        }
        self.record_count() as f64 / self.user_count() as f64
    }
}

fn sorted_intersection_len(a: &[UserId], b: &[UserId]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
