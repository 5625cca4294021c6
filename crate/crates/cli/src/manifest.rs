//! Every subcommand writes a `run.json` manifest next to its outputs:
//! the command, its inputs, the seed, the resolved configuration, tool
//! versions, and wall time. Everything except the wall time is a pure
//! function of the invocation.

use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

#[derive(Serialize)]
struct Manifest<C: Serialize> {
    command: &'static str,
    inputs: BTreeMap<String, String>,
    seed: Option<u64>,
    config: C,
    versions: Versions,
    wall_time_seconds: f64,
}

#[derive(Serialize)]
struct Versions {
    vsp: &'static str,
}

pub fn write<C: Serialize>(
    out_dir: &Path,
    command: &'static str,
    inputs: &[(&str, String)],
    seed: Option<u64>,
    config: C,
    started: Instant,
) -> vsp::Result<()> {
    let manifest = Manifest {
        command,
        inputs: inputs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        seed,
        config,
        versions: Versions {
            vsp: env!("CARGO_PKG_VERSION"),
        },
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| vsp::Error::InvalidArgument(e.to_string()))?;
    std::fs::write(out_dir.join("run.json"), text + "\n")?;
    Ok(())
}
