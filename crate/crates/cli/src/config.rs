use std::ffi::OsString;
use std::path::Path;

use crate::error::CliError;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("{}:{}: expected key=value", path.display(), n + 1))
        })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(CliError::Validation(format!(
                "{}:{}: empty key",
                path.display(),
                n + 1
            )));
        }
        pairs.push((key.to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

const GLOBAL_WITH_VALUE: [&str; 2] = ["--config", "--threads"];

/// Inserts config-file pairs as `--key value` right after the subcommand
/// name, so any flag given explicitly later on the command line overrides it.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let pairs = parse_config(&text, path)?;

    let mut at = None;
    let mut i = 1;
    while i < argv.len() {
        let s = argv[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if !s.starts_with('-') {
            at = Some(i + 1);
            break;
        }
        i += 1;
    }
    let Some(at) = at else {
        return Ok(argv);
    };
    let mut out = argv[..at].to_vec();
    for (k, v) in pairs {
        if k == "threads" && !argv.iter().any(|a| a == "--threads") {
            out.push("--threads".into());
            out.push(v.into());
            continue;
        }
        out.push(format!("--{k}").into());
        out.push(v.into());
    }
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}
