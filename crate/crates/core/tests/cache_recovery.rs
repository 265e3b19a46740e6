//! Damaged cache files must only cost time, never change answers.

use std::fs;
use std::path::Path;

use zslab::cache::AtomCache;
use zslab::verify::run_suite;
use zslab::GroupSpec;

fn damage_every_other(dir: &Path) -> usize {
    let mut n = 0;
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for (i, p) in files.iter().enumerate() {
        let text = fs::read(p).unwrap();
        let cut = if i % 2 == 0 { text.len() / 2 } else { 0 };
        fs::write(p, &text[..cut]).unwrap();
        n += 1;
    }
    n
}

#[test]
fn truncating_cache_mid_suite_keeps_results() {
    let dir = tempfile::tempdir().unwrap();
    let groups = ["C3^2", "C2^3", "C6"];
    let reference: Vec<String> = groups
        .iter()
        .map(|g| {
            run_suite("core", &GroupSpec::parse(g).unwrap(), None)
                .unwrap()
                .to_text()
        })
        .collect();

    let cache = AtomCache::new(dir.path());
    for (i, g) in groups.iter().enumerate() {
        let report = run_suite("core", &GroupSpec::parse(g).unwrap(), Some(&cache)).unwrap();
        assert_eq!(report.to_text(), reference[i]);
        // damage the cache between groups, while the suite is still under way
        assert!(damage_every_other(dir.path()) > 0);
    }
    // a second pass reads a mix of repaired and damaged entries
    let misses_before = cache.misses();
    for (i, g) in groups.iter().enumerate() {
        let report = run_suite("core", &GroupSpec::parse(g).unwrap(), Some(&cache)).unwrap();
        assert_eq!(report.to_text(), reference[i]);
    }
    assert!(cache.misses() > misses_before);
}

#[test]
fn cli_output_unchanged_after_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_zslab"))
            .args(["verify", "--suite", "core", "--group", "C2xC4", "--json"])
            .env("ZSLAB_CACHE", dir.path())
            .output()
            .unwrap()
            .stdout
    };
    let first = run();
    damage_every_other(dir.path());
    assert_eq!(run(), first);
    let warm = run();
    assert_eq!(warm, first);
}
