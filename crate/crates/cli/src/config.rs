//! Flat `key = value` config files, merged into argv so flags given on the command line win.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got {line:?}", i + 1);
        };
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn given(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// Appends `--key value...` for every config entry whose flag is absent from `argv`.
/// `true`/`false` values toggle a bare flag; other values split on whitespace.
pub fn merge(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let mut out = argv;
    let mut extra = Vec::new();
    for (k, v) in parse(&text)? {
        if k == "config" || given(&out, &k) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => {
                extra.push(format!("--{k}"));
                extra.extend(v.split_whitespace().map(str::to_string));
            }
        }
    }
    out.extend(extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# run\nk = 3\nphi=0.5\nr_max = 12\nfinite = true\nlattice = 4 5\n").unwrap();
        let argv: Vec<String> = ["bridgelab", "pinned-poisson", "tail", "--config", p.to_str().unwrap(), "--k", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let got = merge(argv).unwrap();
        assert_eq!(&got[5..], ["--k", "2", "--phi", "0.5", "--r-max", "12", "--finite", "--lattice", "4", "5"]);
    }

    #[test]
    fn bad_line() {
        assert!(parse("k 3").is_err());
    }
}
