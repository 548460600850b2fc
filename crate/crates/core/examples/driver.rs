//! The experiment driver used as a library: a config file, two identical
//! runs, and their manifests.

use bml_core::cli;
use bml_core::manifest::RunManifest;

fn main() -> bml_core::Result<()> {
    let dir = tempfile::tempdir()?;
    let config = dir.path().join("quad.conf");
    std::fs::write(&config, "# sampler settings\nn = 2000\nseed = 3\n")?;
    let mut digests = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let code = cli::run([
            "bml",
            "sample-quad",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let manifest = RunManifest::read(&out.join("manifest.json"))?;
        println!("{run}: {}", manifest.to_json()?);
        digests.push(manifest.outputs);
    }
    println!("identical outputs: {}", digests[0] == digests[1]);
    // a flag after the config wins, unknown flags are usage errors
    let code = cli::run(["bml", "sample-quad", "--config", config.to_str().unwrap(), "--n", "10", "--bogus"]);
    println!("unknown flag exit code: {code}");
    Ok(())
}
