use std::collections::BTreeMap;

use perfhopf::error::{Error, Result};
use perfhopf::modules::Params;
use perfhopf::rat::Rat;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    #[serde(rename = "text")]
    Text,
    #[serde(rename = "json")]
    Json,
}

/// Run parameters echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub p: u32,
    pub witt: u32,
    pub depth: u32,
    pub maxdeg: i64,
    pub seed: u64,
    #[serde(skip)]
    pub format: Format,
}

impl RunConfig {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.p, self.witt, self.depth, Rat::from_int(self.maxdeg))
    }
}

/// Flag parser: `--name value` pairs after the positional arguments, plus
/// boolean switches.
pub struct Flags {
    values: BTreeMap<String, String>,
    switches: Vec<String>,
}

impl Flags {
    pub fn parse(args: &[String], switch_names: &[&str]) -> Result<Flags> {
        let mut values = BTreeMap::new();
        let mut switches = Vec::new();
        let mut i = 0;
        while i < args.len() {
            let a = &args[i];
            let Some(name) = a.strip_prefix("--") else {
                return Err(Error::Usage(format!("unexpected argument {}", a)));
            };
            if switch_names.contains(&name) {
                switches.push(name.to_string());
                i += 1;
                continue;
            }
            let Some(v) = args.get(i + 1) else {
                return Err(Error::Usage(format!("flag --{} needs a value", name)));
            };
            values.insert(name.to_string(), v.clone());
            i += 2;
        }
        Ok(Flags { values, switches })
    }

    pub fn has(&self, name: &str) -> bool {
        self.switches.iter().any(|s| s == name)
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(|s| s.as_str())
    }

    pub fn parsed<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T> {
        match self.values.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Usage(format!("cannot parse --{} value {}", name, v))),
        }
    }

    pub fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        for k in self.values.keys() {
            if !known.contains(&k.as_str()) {
                return Err(Error::Usage(format!("unknown flag --{}", k)));
            }
        }
        Ok(())
    }

    pub fn config(&self) -> Result<RunConfig> {
        let cfg = RunConfig {
            p: self.parsed("p", 2u32)?,
            witt: self.parsed("witt", 2u32)?,
            depth: self.parsed("depth", 2u32)?,
            maxdeg: self.parsed("maxdeg", 3i64)?,
            seed: self.parsed("seed", 0u64)?,
            format: match self.get("format").unwrap_or("json") {
                "json" => Format::Json,
                "text" => Format::Text,
                other => return Err(Error::Usage(format!("unknown format {}", other))),
            },
        };
        cfg.params()?; // envelope validation
        Ok(cfg)
    }
}
