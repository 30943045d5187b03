//! `--config FILE`: `key=value` lines merged into the argument list.
//!
//! Each key names a long flag. A key whose flag already appears on the
//! command line is skipped, so flags win. `true` turns on a switch, `false`
//! leaves it off, and a comma-separated value repeats the flag.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{Context, Result};
use gtlab_core::format::parse_key_values;

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

fn flag_present(args: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&eq)
    })
}

/// `args` with the config file's entries appended.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let entries = parse_key_values(&text)?;
    let mut merged = args.clone();
    for (key, value) in entries {
        let flag = format!("--{key}");
        if key == "config" || flag_present(&args, &flag) {
            continue;
        }
        match value.as_str() {
            "true" => merged.push(flag.into()),
            "false" => {}
            _ => {
                for item in value.split(',') {
                    merged.push(flag.clone().into());
                    merged.push(item.trim().into());
                }
            }
        }
    }
    Ok(merged)
}
