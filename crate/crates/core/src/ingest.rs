//! Builds the global approval election from MovieLens-format ratings.
//!
//! A user approves a movie when their rating reaches the approval threshold;
//! movies with fewer approvals than `min_approvals` are then dropped. Every
//! distinct rater stays an agent, even if all of their approvals were dropped.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::cache::GlobalData;
use crate::catalog::{Catalog, CatalogEntry};
use crate::election::{ApprovalElection, ResourceId};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RatingRecord {
    pub user_id: u32,
    pub movie_id: u32,
    pub rating: f32,
    pub timestamp: i64,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IngestConfig {
    pub approval_threshold: f64,
    pub min_approvals: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            approval_threshold: 4.0,
            min_approvals: 20,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub ratings: u64,
    pub users: usize,
    /// Ratings superseded by a later rating of the same (user, movie) pair.
    pub duplicates: u64,
    pub movies_rated: usize,
    pub movies_kept: usize,
    pub approvals_kept: usize,
}

const RATINGS_HEADER: [&str; 4] = ["userId", "movieId", "rating", "timestamp"];
const MOVIES_HEADER: [&str; 3] = ["movieId", "title", "genres"];

fn malformed(source: &str, line: u64, reason: impl Into<String>) -> Error {
    Error::MalformedRow {
        path: source.to_owned(),
        line,
        reason: reason.into(),
    }
}

fn check_header(source: &str, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let matches = found.len() == expected.len()
        && found
            .iter()
            .zip(expected)
            .all(|(a, b)| a.trim_start_matches('\u{feff}') == *b);
    if matches {
        Ok(())
    } else {
        Err(malformed(
            source,
            1,
            format!("expected header {:?}, found {:?}", expected.join(","), found),
        ))
    }
}

fn field(record: &csv::StringRecord, i: usize) -> &str {
    record.get(i).unwrap_or("").trim()
}

/// Streams rating rows from `userId,movieId,rating,timestamp` text. Line
/// numbers in errors are 1-based and count the header.
pub fn read_ratings<R: Read>(
    reader: R,
    source: &str,
) -> Result<impl Iterator<Item = Result<RatingRecord>>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    check_header(source, csv.headers()?, &RATINGS_HEADER)?;
    let source = source.to_owned();
    Ok(csv.into_records().enumerate().map(move |(i, row)| {
        let line = i as u64 + 2;
        let row = row.map_err(|e| malformed(&source, line, e.to_string()))?;
        if row.len() != 4 {
            return Err(malformed(&source, line, format!("expected 4 fields, got {}", row.len())));
        }
        let user_id = field(&row, 0)
            .parse()
            .map_err(|_| malformed(&source, line, "userId is not a nonnegative integer"))?;
        let movie_id = field(&row, 1)
            .parse()
            .map_err(|_| malformed(&source, line, "movieId is not a nonnegative integer"))?;
        let rating: f32 = field(&row, 2)
            .parse()
            .map_err(|_| malformed(&source, line, "rating is not a number"))?;
        if !(0.5..=5.0).contains(&rating) {
            return Err(malformed(&source, line, format!("rating {rating} outside [0.5, 5]")));
        }
        let timestamp = field(&row, 3)
            .parse()
            .map_err(|_| malformed(&source, line, "timestamp is not an integer"))?;
        Ok(RatingRecord {
            user_id,
            movie_id,
            rating,
            timestamp,
        })
    }))
}

pub fn read_ratings_file(path: &Path) -> Result<impl Iterator<Item = Result<RatingRecord>>> {
    let file = File::open(path)?;
    read_ratings(std::io::BufReader::with_capacity(1 << 20, file), &path.display().to_string())
}

/// Reads `movieId,title,genres` text; genres are `|`-separated and
/// `(no genres listed)` becomes an empty list.
pub fn read_catalog<R: Read>(reader: R, source: &str) -> Result<Catalog> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    check_header(source, csv.headers()?, &MOVIES_HEADER)?;
    let mut catalog = Catalog::new();
    for (i, row) in csv.into_records().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| malformed(source, line, e.to_string()))?;
        if row.len() != 3 {
            return Err(malformed(source, line, format!("expected 3 fields, got {}", row.len())));
        }
        let id: u32 = field(&row, 0)
            .parse()
            .map_err(|_| malformed(source, line, "movieId is not a nonnegative integer"))?;
        let genres = match field(&row, 2) {
            "" | "(no genres listed)" => Vec::new(),
            g => g.split('|').map(str::to_owned).collect(),
        };
        catalog.insert(
            ResourceId(id),
            CatalogEntry {
                title: field(&row, 1).to_owned(),
                genres,
            },
        );
    }
    Ok(catalog)
}

pub fn read_catalog_file(path: &Path) -> Result<Catalog> {
    read_catalog(File::open(path)?, &path.display().to_string())
}

/// Applies the approval threshold and the minimum-approval filter.
///
/// Repeated (user, movie) pairs keep the rating that came last in the stream.
pub fn build_global_election(
    ratings: impl IntoIterator<Item = Result<RatingRecord>>,
    cfg: IngestConfig,
) -> Result<(ApprovalElection, IngestReport)> {
    // (user, movie, stream position << 1 | approved)
    let mut rows: Vec<(u32, u32, u64)> = Vec::new();
    for (seq, record) in ratings.into_iter().enumerate() {
        let record = record?;
        let approved = f64::from(record.rating) >= cfg.approval_threshold;
        rows.push((
            record.user_id,
            record.movie_id,
            (seq as u64) << 1 | u64::from(approved),
        ));
    }
    let mut report = IngestReport {
        ratings: rows.len() as u64,
        ..IngestReport::default()
    };

    rows.sort_unstable();
    let before = rows.len();
    // dedup_by keeps the first of a run; walk backwards so the last rating survives
    rows.reverse();
    rows.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);
    rows.reverse();
    report.duplicates = (before - rows.len()) as u64;
    if report.duplicates > 0 {
        log::warn!(
            "{} duplicate (user, movie) ratings; kept the last occurrence of each",
            report.duplicates
        );
    }

    let mut users: Vec<u32> = rows.iter().map(|r| r.0).collect();
    users.dedup();
    report.users = users.len();

    let mut movies: Vec<u32> = rows.iter().map(|r| r.1).collect();
    movies.sort_unstable();
    movies.dedup();
    report.movies_rated = movies.len();

    let mut approvals: Vec<(u32, u32)> = Vec::new();
    let mut agent = 0u32;
    for (i, row) in rows.iter().enumerate() {
        if i > 0 && rows[i - 1].0 != row.0 {
            agent += 1;
        }
        if row.2 & 1 == 1 {
            approvals.push((row.1, agent));
        }
    }
    drop(rows);
    approvals.sort_unstable();

    let mut resources = Vec::new();
    let mut columns = Vec::new();
    for run in approvals.chunk_by(|a, b| a.0 == b.0) {
        if run.len() >= cfg.min_approvals {
            resources.push(ResourceId(run[0].0));
            columns.push(run.iter().map(|&(_, agent)| agent).collect());
        }
    }
    report.movies_kept = resources.len();
    let election = ApprovalElection::from_columns(resources, report.users, columns);
    report.approvals_kept = election.total_approvals();
    Ok((election, report))
}

/// Reads `ratings.csv` and `movies.csv` from a MovieLens-format directory.
/// The catalog keeps exactly the resources of the election.
pub fn load_movielens(dir: &Path, cfg: IngestConfig) -> Result<(GlobalData, IngestReport)> {
    let (election, report) = build_global_election(read_ratings_file(&dir.join("ratings.csv"))?, cfg)?;
    let mut catalog = read_catalog_file(&dir.join("movies.csv"))?;
    let placeholders = catalog.restrict_to(&election);
    if placeholders > 0 {
        log::warn!("{placeholders} rated movies are missing from movies.csv");
    }
    Ok((
        GlobalData {
            election,
            catalog,
            ingest: cfg,
        },
        report,
    ))
}
