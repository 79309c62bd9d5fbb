//! Dataset files and the evaluation report format.
//!
//! Edge lists and activity logs are plain delimited text, one record per
//! line, `#` for comments:
//!
//! ```text
//! # edges            # activities
//! user_a,user_b      user,category,action_kind[,multiplicity]
//! ```
//!
//! The activity log may start with a header line (auto-detected by
//! default). Reports are line-oriented JSON records tagged with a
//! `record` field — one `metadata` line, one `run` line per recommender
//! per run, then one `summary` line per recommender — with stable field
//! order so equal inputs produce byte-identical files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseIssue, Result};
use crate::eval::{EvalReport, ReportMetadata, RunRecord, SummaryRecord};
use crate::graph::{build_graph_with_users, GraphBuildReport, SocialGraph, UserId};
use crate::interest::ActivityEvent;

/// How to treat the first data line of an activity log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Skip the first line when its user field is not numeric.
    #[default]
    Auto,
    /// The first non-comment line is a header; skip it.
    Present,
    /// Every non-comment line is data.
    Absent,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip malformed lines instead of aborting.
    pub lenient: bool,
    pub header: HeaderMode,
}

/// Parses edge-list text; malformed lines become issues instead of errors.
pub fn parse_edge_lines(text: &str) -> (Vec<(UserId, UserId)>, Vec<ParseIssue>) {
    let mut edges = Vec::new();
    let mut issues = Vec::new();
    for (number, line) in data_lines(text) {
        match parse_edge(line) {
            Ok(edge) => edges.push(edge),
            Err(message) => issues.push(ParseIssue {
                line: number,
                message,
            }),
        }
    }
    (edges, issues)
}

fn parse_edge(line: &str) -> std::result::Result<(UserId, UserId), String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 2 {
        return Err(format!("expected `user_a,user_b`, got `{line}`"));
    }
    Ok((parse_user(fields[0])?, parse_user(fields[1])?))
}

/// Parses activity-log text with optional header handling.
pub fn parse_activity_lines(
    text: &str,
    header: HeaderMode,
) -> (Vec<ActivityEvent>, Vec<ParseIssue>) {
    let mut events = Vec::new();
    let mut issues = Vec::new();
    let mut first_data_line = true;
    for (number, line) in data_lines(text) {
        let is_first = std::mem::take(&mut first_data_line);
        if is_first && matches!(header, HeaderMode::Present) {
            continue;
        }
        match parse_activity(line) {
            Ok(event) => events.push(event),
            Err(message) => {
                // a non-numeric user field on the first line reads as a header
                if is_first
                    && matches!(header, HeaderMode::Auto)
                    && line
                        .split(',')
                        .next()
                        .is_some_and(|f| f.trim().parse::<u64>().is_err())
                {
                    continue;
                }
                issues.push(ParseIssue {
                    line: number,
                    message,
                });
            }
        }
    }
    (events, issues)
}

fn parse_activity(line: &str) -> std::result::Result<ActivityEvent, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 3 && fields.len() != 4 {
        return Err(format!(
            "expected `user,category,action_kind[,multiplicity]`, got `{line}`"
        ));
    }
    let user = parse_user(fields[0])?;
    let category: usize = fields[1]
        .parse()
        .map_err(|_| format!("invalid category `{}`", fields[1]))?;
    if fields[2].is_empty() {
        return Err("empty action_kind".to_string());
    }
    let multiplicity = match fields.get(3) {
        None => 1,
        Some(raw) => raw
            .parse::<u64>()
            .ok()
            .filter(|&m| m >= 1)
            .ok_or_else(|| format!("invalid multiplicity `{raw}`"))?,
    };
    Ok(ActivityEvent::new(user, category, fields[2], multiplicity))
}

fn parse_user(field: &str) -> std::result::Result<UserId, String> {
    field
        .parse::<u64>()
        .map(UserId)
        .map_err(|_| format!("invalid user id `{field}`"))
}

/// Non-comment, non-empty lines with their 1-based numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// A dataset read from disk, canonicalized, with any skipped lines.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub graph: SocialGraph,
    pub graph_report: GraphBuildReport,
    pub events: Vec<ActivityEvent>,
    /// Malformed lines that were skipped (lenient mode only; strict loads
    /// fail instead).
    pub issues: Vec<(PathBuf, ParseIssue)>,
}

/// Reads and canonicalizes both dataset files. Malformed lines abort the
/// load unless `lenient` is set; users appearing only in the activity log
/// are registered as isolated graph users so interest-based recommenders
/// can serve them.
pub fn load_dataset(
    edges_path: &Path,
    activities_path: &Path,
    options: LoadOptions,
) -> Result<LoadedDataset> {
    let edge_text = read_file(edges_path)?;
    let (edges, edge_issues) = parse_edge_lines(&edge_text);
    require_clean(edges_path, &edge_issues, options.lenient)?;

    let activity_text = read_file(activities_path)?;
    let (events, activity_issues) = parse_activity_lines(&activity_text, options.header);
    require_clean(activities_path, &activity_issues, options.lenient)?;

    let activity_users: BTreeSet<UserId> = events.iter().map(|e| e.user).collect();
    let (graph, graph_report) = build_graph_with_users(activity_users, edges);

    let mut issues: Vec<(PathBuf, ParseIssue)> = Vec::new();
    issues.extend(
        edge_issues
            .into_iter()
            .map(|i| (edges_path.to_path_buf(), i)),
    );
    issues.extend(
        activity_issues
            .into_iter()
            .map(|i| (activities_path.to_path_buf(), i)),
    );
    Ok(LoadedDataset {
        graph,
        graph_report,
        events,
        issues,
    })
}

fn require_clean(path: &Path, issues: &[ParseIssue], lenient: bool) -> Result<()> {
    if issues.is_empty() || lenient {
        return Ok(());
    }
    Err(Error::MalformedInput {
        path: path.to_path_buf(),
        count: issues.len(),
        first: issues[0].clone(),
    })
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Writes the canonical edge list (ascending, smaller endpoint first).
pub fn write_edges(path: &Path, graph: &SocialGraph) -> Result<()> {
    let mut out = String::from("# user_a,user_b\n");
    for (a, b) in graph.edges() {
        out.push_str(&format!("{a},{b}\n"));
    }
    write_file(path, &out)
}

/// Writes the activity log with a header line.
pub fn write_activities(path: &Path, events: &[ActivityEvent]) -> Result<()> {
    let mut out = String::from("user,category,action_kind,multiplicity\n");
    for e in events {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.user, e.category, e.action_kind, e.multiplicity
        ));
    }
    write_file(path, &out)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum ReportLine {
    Metadata(ReportMetadata),
    Run(RunRecord),
    Summary(SummaryRecord),
}

/// Serializes a report to its line-oriented form.
pub fn report_to_string(report: &EvalReport) -> String {
    let mut out = String::new();
    let mut push = |line: &ReportLine| {
        out.push_str(&serde_json::to_string(line).expect("report serializes"));
        out.push('\n');
    };
    push(&ReportLine::Metadata(report.metadata.clone()));
    for run in &report.runs {
        push(&ReportLine::Run(run.clone()));
    }
    for summary in &report.summary {
        push(&ReportLine::Summary(summary.clone()));
    }
    out
}

/// Parses the line-oriented report form.
pub fn report_from_str(text: &str) -> std::result::Result<EvalReport, String> {
    let mut metadata = None;
    let mut runs = Vec::new();
    let mut summary = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ReportLine =
            serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        match parsed {
            ReportLine::Metadata(m) => {
                if metadata.replace(m).is_some() {
                    return Err(format!("line {}: duplicate metadata record", i + 1));
                }
            }
            ReportLine::Run(r) => runs.push(r),
            ReportLine::Summary(s) => summary.push(s),
        }
    }
    Ok(EvalReport {
        metadata: metadata.ok_or("missing metadata record")?,
        runs,
        summary,
    })
}

/// Writes the report file.
pub fn write_report(report: &EvalReport, path: &Path) -> Result<()> {
    write_file(path, &report_to_string(report))
}

/// Reads a report file back.
pub fn read_report(path: &Path) -> Result<EvalReport> {
    let text = read_file(path)?;
    report_from_str(&text).map_err(|reason| Error::BadReport {
        path: path.to_path_buf(),
        reason,
    })
}
