use std::path::{Path, PathBuf};

use reid_basket::{
    verify_all, verify_table, Execution, FixtureBody, FixtureError, FixtureSource, TableFixture,
    TableStatus,
};

const VERIFIED: &[u32] = &[1, 6, 7, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 23, 24, 25, 26, 27, 28, 29, 31];

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// A private copy of the fixture directory.
fn copy_fixtures(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reid-basket-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.join(path.file_name().unwrap())).unwrap();
    }
    dir
}

#[test]
fn tables_verify() {
    for &id in VERIFIED {
        let report = verify_table(&FixtureSource::Embedded, id, Execution::default()).unwrap();
        assert_eq!(report.status, TableStatus::Verified, "table {id}");
        assert!(report.checked > 0, "table {id}");
        assert!(report.passed(), "table {id}:\n{}", report.to_text());
    }
}

#[test]
fn table_30_misprints_are_reported() {
    let report = verify_table(&FixtureSource::Embedded, 30, Execution::default()).unwrap();
    let found: Vec<(usize, &str, &str, &str)> = report
        .discrepancies
        .iter()
        .map(|d| (d.line, d.column.as_str(), d.expected.as_str(), d.computed.as_str()))
        .collect();
    assert_eq!(found, vec![(51, "m0", "2", "4"), (56, "lambda", "3", "17/3")]);
    assert!(!report.passed());
}

#[test]
fn absent_tables() {
    for id in [8, 22] {
        let report = verify_table(&FixtureSource::Embedded, id, Execution::default()).unwrap();
        assert!(matches!(report.status, TableStatus::Absent { .. }), "table {id}");
        assert!(report.passed());
    }
    let eight = verify_table(&FixtureSource::Embedded, 8, Execution::default()).unwrap();
    assert_eq!(eight.notes.len(), 3);
}

#[test]
fn unknown_table() {
    assert!(matches!(
        verify_table(&FixtureSource::Embedded, 99, Execution::default()),
        Err(FixtureError::Missing(99))
    ));
}

#[test]
fn verify_all_covers_every_table() {
    let reports = verify_all(&FixtureSource::Embedded, Execution::default()).unwrap();
    let mut ids: Vec<u32> = reports.iter().map(|r| r.id).collect();
    ids.sort_unstable();
    let mut expected: Vec<u32> = VERIFIED.iter().copied().chain([8, 22, 30]).collect();
    expected.sort_unstable();
    assert_eq!(ids, expected);
    let failing: Vec<u32> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    assert_eq!(failing, vec![30]);
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let seq = verify_all(&FixtureSource::Embedded, Execution::Sequential).unwrap();
    let par = verify_all(&FixtureSource::Embedded, Execution::Parallel { threads: Some(3) }).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn directory_source_matches_embedded() {
    let dir = copy_fixtures("copy");
    let from_dir = verify_all(&FixtureSource::Directory(dir.clone()), Execution::default()).unwrap();
    let embedded = verify_all(&FixtureSource::Embedded, Execution::default()).unwrap();
    assert_eq!(from_dir, embedded);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn tampered_fixture_is_rejected() {
    let dir = copy_fixtures("tamper");
    let file = dir.join("table17.tsv");
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("48", "47", 1)).unwrap();
    let source = FixtureSource::Directory(dir.clone());
    assert!(matches!(
        verify_table(&source, 17, Execution::default()),
        Err(FixtureError::Checksum { .. })
    ));
    // Other tables still load.
    assert!(verify_table(&source, 18, Execution::default()).unwrap().passed());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn missing_manifest_is_rejected() {
    let dir = copy_fixtures("manifest");
    std::fs::remove_file(dir.join("MANIFEST.sha256")).unwrap();
    assert!(matches!(
        verify_table(&FixtureSource::Directory(dir.clone()), 17, Execution::default()),
        Err(FixtureError::Manifest(_))
    ));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn parse_errors() {
    let bad = [
        "@table 5\n@kind rows\n@p1 0\n@case 2\n@n1-policy window6\nbasket\tk3\tM\tlambda\tn1\tm0\trmax\tn2\tflag\n(1,2\t1\t1\t1\t1\t1\t1\t1\t-\n",
        "@table 5\n@kind unknown\n",
        "@kind rows\n",
        "@table 5\n@kind rows\n@p1 zero\n@case 2\n@n1-policy window6\nbasket\tk3\tM\tlambda\tn1\tm0\trmax\tn2\tflag\n",
    ];
    for text in bad {
        assert!(
            matches!(TableFixture::parse("table05.tsv", text), Err(FixtureError::Parse { .. })),
            "{text}"
        );
    }
}

#[test]
fn every_fixture_parses_to_its_kind() {
    let source = FixtureSource::Embedded;
    for id in source.table_ids().unwrap() {
        let fixture = source.load(id).unwrap();
        assert_eq!(fixture.id, id);
        let kind = match (&fixture.body, id) {
            (FixtureBody::IndexProfile(_), 16) => "index-profile",
            (FixtureBody::Parametric(_), 14 | 19 | 31) => "parametric",
            (FixtureBody::B0Templates(_), 7 | 21 | 23 | 25 | 27 | 29) => "b0-templates",
            (FixtureBody::Rows(_), _) => "rows",
            _ => panic!("table {id} has an unexpected kind"),
        };
        assert_eq!(fixture.body.kind(), kind);
    }
}
