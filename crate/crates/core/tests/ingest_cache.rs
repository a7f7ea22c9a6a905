use std::fs;
use std::path::Path;

use votesearch_core::cache::{self, FORMAT_VERSION};
use votesearch_core::{load_movielens, Error, IngestConfig, ResourceId};

const MOVIES: &str = "movieId,title,genres
1,Toy Story (1995),Adventure|Animation|Children|Comedy|Fantasy
2,\"American President, The (1995)\",Comedy|Drama|Romance
3,Heat (1995),Action|Crime|Thriller
";

/// Users 1..=4; movie 1 gets three approvals, movie 2 two, movie 3 one
/// (user 4's second rating of movie 3 overrides the first), movie 4 is
/// absent from the catalog.
const RATINGS: &str = "userId,movieId,rating,timestamp
1,1,4.0,964982703
1,2,5.0,964981247
2,1,4.5,964982224
2,3,3.5,964983815
3,1,5.0,964982931
3,2,4.0,964982400
3,4,4.0,964982401
4,3,2.0,964980868
4,3,4.0,964980999
4,4,4.5,964981000
";

fn write_fixture(dir: &Path) {
    fs::write(dir.join("movies.csv"), MOVIES).unwrap();
    fs::write(dir.join("ratings.csv"), RATINGS).unwrap();
}

fn cfg(min_approvals: usize) -> IngestConfig {
    IngestConfig {
        approval_threshold: 4.0,
        min_approvals,
    }
}

#[test]
fn ingest_fixture_counts() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let (data, report) = load_movielens(dir.path(), cfg(2)).unwrap();
    assert_eq!(report.ratings, 10);
    assert_eq!(report.users, 4);
    assert_eq!(report.duplicates, 1);
    assert_eq!(report.movies_rated, 4);
    assert_eq!(data.election.resources(), &[ResourceId(1), ResourceId(2), ResourceId(4)]);
    assert_eq!(data.election.approval_count(ResourceId(1)), 3);
    assert_eq!(data.election.approval_count(ResourceId(4)), 2);
    assert_eq!(data.catalog.title(ResourceId(2)), "American President, The (1995)");
    assert_eq!(data.catalog.title(ResourceId(4)), "#4");
    assert!(data.catalog.get(ResourceId(3)).is_none());
}

#[test]
fn cache_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let (data, _) = load_movielens(dir.path(), cfg(1)).unwrap();
    let path = dir.path().join("global.vsc");
    cache::save(&data, &path).unwrap();
    assert_eq!(cache::load(&path).unwrap(), data);
    // the same input always encodes to the same bytes
    assert_eq!(fs::read(&path).unwrap(), cache::encode(&data));
}

#[test]
fn cache_errors_are_distinguished() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let (data, _) = load_movielens(dir.path(), cfg(1)).unwrap();
    let path = dir.path().join("global.vsc");

    let mut bytes = cache::encode(&data);
    bytes[8..12].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
    fs::write(&path, &bytes).unwrap();
    assert!(matches!(cache::load(&path), Err(Error::CacheVersion { .. })));

    let bytes = cache::encode(&data);
    fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(cache::load(&path), Err(Error::Cache { .. })));

    assert!(matches!(cache::load(&dir.path().join("missing.vsc")), Err(Error::Io(_))));
}

#[test]
fn malformed_rows_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("movies.csv"), MOVIES).unwrap();
    fs::write(
        dir.path().join("ratings.csv"),
        "userId,movieId,rating,timestamp\n1,1,4.0,1\n1,2,four,2\n",
    )
    .unwrap();
    match load_movielens(dir.path(), cfg(1)) {
        Err(Error::MalformedRow { path, line, .. }) => {
            assert!(path.ends_with("ratings.csv"));
            assert_eq!(line, 3);
        }
        other => panic!("unexpected {other:?}"),
    }
}
