//! Runs every stage on the fixture corpus and prints the manifest.
//!
//! cargo run --example pipeline [-- <out-dir>]

use std::path::PathBuf;

use decompsum::cli::{run_pipeline, PipelineConfig};
use decompsum::record::read_json;

fn main() -> decompsum::Result<()> {
    let input = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let tmp;
    let out = match std::env::args().nth(1) {
        Some(dir) => PathBuf::from(dir),
        None => {
            tmp = tempfile::tempdir().expect("temporary directory");
            tmp.path().to_path_buf()
        }
    };

    let cfg = PipelineConfig {
        seed: 7,
        fraction: Some(0.5),
        ..Default::default()
    };
    let manifest = run_pipeline(&input, &out, &cfg)?;
    println!("{}", std::fs::read_to_string(out.join("diagnostics.txt")).unwrap_or_default());
    for (name, hash) in &manifest.outputs {
        println!("{} {name}", &hash[..16]);
    }

    // replaying the recorded config reproduces the outputs
    let replay: PipelineConfig = read_json::<decompsum::cli::Manifest>(out.join("manifest.json"))?.config;
    let again = run_pipeline(&input, &out.join("replay"), &replay)?;
    println!("\nreplay identical: {}", again.outputs == manifest.outputs);
    Ok(())
}
