//! Optional `key=value` defaults file. Its entries become flags inserted
//! right after the subcommand name, ahead of everything typed on the command
//! line, so explicit flags override them.

use std::ffi::OsString;
use std::fs;

fn config_path(args: &[OsString]) -> Option<(usize, usize, OsString)> {
    for (i, arg) in args.iter().enumerate().skip(1) {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return args.get(i + 1).map(|p| (i, 2, p.clone()));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some((i, 1, OsString::from(p)));
        }
    }
    None
}

/// Flags equivalent to the lines of a config file.
pub fn parse_config(text: &str) -> Result<Vec<OsString>, String> {
    let mut flags = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", no + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", no + 1));
        }
        match value {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                flags.push(format!("--{key}").into());
                flags.push(value.into());
            }
        }
    }
    Ok(flags)
}

pub fn expand(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some((at, width, path)) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let flags = parse_config(&text)?;
    args.drain(at..at + width);
    let sub = args
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| !a.to_string_lossy().starts_with('-'))
        .map(|(i, _)| i);
    if let Some(sub) = sub {
        args.splice(sub + 1..sub + 1, flags);
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_lines_become_flags() {
        let flags = parse_config("# defaults\nmax_pairs = 500\ncanonical=true\nquiet=false\n\n").unwrap();
        assert_eq!(flags, os(&["--max-pairs", "500", "--canonical"]));
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn flags_are_inserted_after_the_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        fs::write(&path, "seed=1\n").unwrap();
        let p = path.to_string_lossy().to_string();
        let out = expand(os(&["gblearn", "--config", &p, "split", "--seed", "2"])).unwrap();
        assert_eq!(out, os(&["gblearn", "split", "--seed", "1", "--seed", "2"]));
        let out = expand(os(&["gblearn", "split", &format!("--config={p}")])).unwrap();
        assert_eq!(out, os(&["gblearn", "split", "--seed", "1"]));
        assert_eq!(expand(os(&["gblearn", "gb"])).unwrap(), os(&["gblearn", "gb"]));
    }
}
