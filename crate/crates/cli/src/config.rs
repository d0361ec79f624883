//! key=value configuration; command-line flags win over the file.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use schurbench::iso::DEFAULT_AUT_CAP;
use schurbench::magnus::DEFAULT_SIZE_CAP;

use crate::Format;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub p: u32,
    pub seed: u64,
    /// seed given explicitly in the file
    pub seed_override: Option<u64>,
    pub size_cap: u64,
    pub aut_cap: u64,
    pub tuple_cap: u64,
    pub samples: Option<u64>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            p: 3,
            seed: 0,
            seed_override: None,
            size_cap: DEFAULT_SIZE_CAP,
            aut_cap: DEFAULT_AUT_CAP,
            tuple_cap: 1_000_000,
            samples: None,
            format: Format::Text,
            output: None,
        }
    }
}

fn parse_kv(text: &str) -> Result<HashMap<String, String>, String> {
    let mut out = HashMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", k + 1))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut s = Settings::default();
        let Some(path) = path else {
            return Ok(s);
        };
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for (key, value) in parse_kv(&text)? {
            let num = || value.parse::<u64>().map_err(|_| format!("{key}: not a nonnegative integer: {value}"));
            let positive = || num().and_then(|v| if v == 0 { Err(format!("{key} must be positive")) } else { Ok(v) });
            match key.as_str() {
                "p" => s.p = u32::try_from(num()?).map_err(|_| format!("p too large: {value}"))?,
                "seed" => {
                    s.seed = num()?;
                    s.seed_override = Some(s.seed);
                }
                "size_cap" => s.size_cap = positive()?,
                "aut_cap" => s.aut_cap = positive()?,
                "tuple_cap" => s.tuple_cap = positive()?,
                "samples" => s.samples = Some(positive()?),
                "format" => {
                    s.format = match value.as_str() {
                        "text" => Format::Text,
                        "json" => Format::Json,
                        "csv" => Format::Csv,
                        _ => return Err(format!("unknown format {value}")),
                    }
                }
                "output" => s.output = Some(PathBuf::from(value)),
                _ => return Err(format!("unknown key {key}")),
            }
        }
        Ok(s)
    }

    pub fn with_overrides(
        mut self,
        format: Option<Format>,
        output: Option<PathBuf>,
        size_cap: Option<u64>,
        aut_cap: Option<u64>,
    ) -> Self {
        if let Some(f) = format {
            self.format = f;
        }
        if output.is_some() {
            self.output = output;
        }
        if let Some(c) = size_cap {
            self.size_cap = c;
        }
        if let Some(c) = aut_cap {
            self.aut_cap = c;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rejects_junk() {
        let kv = parse_kv("p = 5 # prime\n\nseed=9\n").unwrap();
        assert_eq!(kv["p"], "5");
        assert_eq!(kv["seed"], "9");
        assert!(parse_kv("nonsense").is_err());
    }
}
