use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use lloydlab::datagen::{self, MixtureSpec};
use lloydlab::dataio::{self, FILE_DATASET, FILE_META};
use serde_json::json;

use crate::cli::GenArgs;

pub fn execute(args: GenArgs) -> Result<ExitCode> {
    let (spec, n, preset_name) = resolve_spec(&args)?;
    if n == 0 {
        bail!("--n must be at least 1");
    }

    let (dataset, labels) = datagen::sample(&spec, n)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let dataset_path = args.out.join(FILE_DATASET);
    let labels = args.with_labels.then_some(&labels);
    dataio::write_dataset(&dataset_path, &dataset, labels)?;

    let meta = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": "gen",
        "preset": preset_name,
        "spec_file": args.spec.as_ref().map(|p| p.display().to_string()),
        "spec": spec,
        "n": n,
        "with_labels": args.with_labels,
        "dataset": {
            "path": dataset_path.display().to_string(),
            "n": dataset.n(),
            "dim": dataset.dim(),
            "sha256": dataio::dataset_sha256(&dataset),
        },
    });
    fs::write(args.out.join(FILE_META), serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("cannot write {}", args.out.join(FILE_META).display()))?;

    println!(
        "generated n={} dim={} components={} seed={} -> {}",
        dataset.n(),
        dataset.dim(),
        spec.components.len(),
        spec.seed,
        dataset_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn resolve_spec(args: &GenArgs) -> Result<(MixtureSpec, usize, Option<String>)> {
    let (mut spec, n, preset_name) = if let Some(name) = &args.preset {
        let preset = datagen::preset(name)?;
        (preset.spec, args.n.unwrap_or(preset.n), Some(name.clone()))
    } else {
        let path = args.spec.as_ref().expect("clap enforces --spec xor --preset");
        let raw = fs::read_to_string(path)
            .with_context(|| format!("cannot read spec file {}", path.display()))?;
        let spec: MixtureSpec = serde_json::from_str(&raw)
            .with_context(|| format!("invalid mixture spec in {}", path.display()))?;
        let n = args.n.expect("clap requires --n with --spec");
        (spec, n, None)
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    Ok((spec, n, preset_name))
}
