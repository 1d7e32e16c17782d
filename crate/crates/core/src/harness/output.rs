//! `result.json`, `trace_<start>.csv` and `meta.json`.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::run::{NamedTrace, RunOutput, RunResult};
use super::HarnessError;
use crate::cycles::TraceRow;

/// Side-channel metadata; everything that may differ between identical runs lives here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub crate_version: String,
    pub unix_time: u64,
}

impl Meta {
    pub fn for_result(result: &RunResult) -> Self {
        Meta {
            command: result.command.clone(),
            config_hash: result.config_hash.clone(),
            seed: result.seed,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

pub fn result_to_json(result: &RunResult) -> String {
    serde_json::to_string_pretty(result).expect("result is serializable") + "\n"
}

pub fn result_from_json(s: &str) -> Result<RunResult, HarnessError> {
    serde_json::from_str(s).map_err(|e| HarnessError::Parse(e.to_string()))
}

/// CSV with header `iter,residual,gap_norm`, floats at 17 significant digits.
pub fn trace_to_csv(rows: &[TraceRow]) -> String {
    let mut s = String::with_capacity(48 * (rows.len() + 1));
    s.push_str("iter,residual,gap_norm\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.16e},{:.16e}\n",
            r.iter, r.residual, r.gap_norm
        ));
    }
    s
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Write {
        path: path.display().to_string(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(contents).map_err(io)
}

pub fn write_outputs(dir: &Path, out: &RunOutput) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Write {
        path: dir.display().to_string(),
        source,
    })?;
    write_file(
        &dir.join("result.json"),
        result_to_json(&out.result).as_bytes(),
    )?;
    for NamedTrace { name, rows } in &out.traces {
        write_file(
            &dir.join(format!("{name}.csv")),
            trace_to_csv(rows).as_bytes(),
        )?;
    }
    let meta =
        serde_json::to_string_pretty(&Meta::for_result(&out.result)).expect("meta is serializable");
    write_file(&dir.join("meta.json"), meta.as_bytes())
}
