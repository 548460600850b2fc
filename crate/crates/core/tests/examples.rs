//! Every crate example builds alongside the tests; run each and check it
//! exits cleanly.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: &[&str] = &[
    "csbp_laws",
    "lamperti",
    "merge_ppp",
    "snake_map",
    "quadrangulation",
    "two_samplers",
    "geodesic_bundles",
    "star_census",
    "frame_dimension",
    "strong_confluence",
    "gff_overlay",
    "driver",
];

fn example_dir() -> PathBuf {
    // target/<profile>/deps/<this test> -> target/<profile>/examples
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("examples")
}

#[test]
fn all_examples_listed() {
    let mut on_disk: Vec<String> = std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/examples"))
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = EXAMPLES.iter().map(|s| s.to_string()).collect();
    listed.sort();
    assert_eq!(on_disk, listed);
}

#[test]
fn examples_run() {
    let dir = example_dir();
    for name in EXAMPLES {
        let path = dir.join(name);
        assert!(path.exists(), "{} not built; run the full `cargo test` (it builds examples) or `cargo build --examples`", path.display());
        let out = Command::new(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{name} failed:\n{}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}
