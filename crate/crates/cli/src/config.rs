//! Line-oriented `key = value` configuration with command-line overrides.
//!
//! Overrides win over file entries; every run echoes the fully resolved
//! configuration as `# key=value` lines so identical configs produce
//! byte-identical artifacts.

use std::collections::BTreeMap;

/// Error carrying the process exit code and the one-line message.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub line: String,
}

impl CliError {
    pub fn parse(token: impl std::fmt::Display) -> Self {
        CliError {
            code: 2,
            line: format!("error: parse: {token}"),
        }
    }

    pub fn unknown_experiment(name: &str) -> Self {
        CliError {
            code: 3,
            line: format!("error: unknown-experiment: {name}"),
        }
    }

    pub fn solver(msg: impl std::fmt::Display) -> Self {
        CliError {
            code: 4,
            line: format!("error: solver: {msg}"),
        }
    }

    pub fn io(msg: impl std::fmt::Display) -> Self {
        CliError {
            code: 5,
            line: format!("error: io: {msg}"),
        }
    }

    pub fn run(msg: impl std::fmt::Display) -> Self {
        CliError {
            code: 6,
            line: format!("error: run: {msg}"),
        }
    }
}

/// Resolved key/value store; reads are recorded so the echo covers
/// defaults as well as explicit settings.
pub struct Config {
    values: BTreeMap<String, String>,
    resolved: std::cell::RefCell<BTreeMap<String, String>>,
    accessed: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl Config {
    /// Parses `--key value` pairs, folding in `--config FILE` contents
    /// (command-line pairs win).
    pub fn from_args(args: &[String]) -> Result<Self, CliError> {
        let mut cli = BTreeMap::new();
        let mut file = BTreeMap::new();
        let mut it = args.iter();
        while let Some(tok) = it.next() {
            let key = tok.strip_prefix("--").ok_or_else(|| CliError::parse(tok))?;
            if key.is_empty() {
                return Err(CliError::parse(tok));
            }
            let value = it.next().ok_or_else(|| CliError::parse(tok))?;
            if key == "config" {
                let text = std::fs::read_to_string(value)
                    .map_err(|e| CliError::io(format!("{value}: {e}")))?;
                for raw in text.lines() {
                    let line = raw.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let (k, v) = line.split_once('=').ok_or_else(|| CliError::parse(line))?;
                    file.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                cli.insert(key.to_string(), value.clone());
            }
        }
        let mut values = file;
        values.extend(cli);
        Ok(Config {
            values,
            resolved: Default::default(),
            accessed: Default::default(),
        })
    }

    fn record(&self, key: &str, value: impl std::fmt::Display) {
        self.resolved
            .borrow_mut()
            .insert(key.to_string(), value.to_string());
        self.accessed.borrow_mut().insert(key.to_string());
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        let v = self
            .values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string());
        self.record(key, &v);
        v
    }

    /// Output destinations: accepted but kept out of the echo, so runs
    /// that differ only in where they write stay byte-identical.
    pub fn get_path(&self, key: &str) -> String {
        self.accessed.borrow_mut().insert(key.to_string());
        self.values.get(key).cloned().unwrap_or_default()
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.values.get(key) {
            Some(raw) => {
                let v: f64 = raw.parse().map_err(|_| CliError::parse(raw))?;
                self.record(key, v);
                Ok(v)
            }
            None => {
                self.record(key, default);
                Ok(default)
            }
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.values.get(key) {
            Some(raw) => {
                let v: usize = raw.parse().map_err(|_| CliError::parse(raw))?;
                self.record(key, v);
                Ok(v)
            }
            None => {
                self.record(key, default);
                Ok(default)
            }
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.values.get(key) {
            Some(raw) => {
                let v: u64 = raw.parse().map_err(|_| CliError::parse(raw))?;
                self.record(key, v);
                Ok(v)
            }
            None => {
                self.record(key, default);
                Ok(default)
            }
        }
    }

    /// `cx,...,side` -> cube.
    pub fn get_cube(&self, key: &str, default: &str) -> Result<smallprop::Cube, CliError> {
        let raw = self.get_str(key, default);
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() < 3 {
            return Err(CliError::parse(&raw));
        }
        let mut nums = Vec::with_capacity(parts.len());
        for p in &parts {
            nums.push(p.trim().parse::<f64>().map_err(|_| CliError::parse(&raw))?);
        }
        let side = nums.pop().unwrap();
        smallprop::Cube::new(nums, side).map_err(|_| CliError::parse(&raw))
    }

    /// `lo:hi:step` -> inclusive grid.
    pub fn get_grid(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let raw = self.get_str(key, default);
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::parse(&raw));
        }
        let lo: f64 = parts[0].parse().map_err(|_| CliError::parse(&raw))?;
        let hi: f64 = parts[1].parse().map_err(|_| CliError::parse(&raw))?;
        let step: f64 = parts[2].parse().map_err(|_| CliError::parse(&raw))?;
        // the negated form also rejects a NaN step
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(step > 0.0) || hi < lo {
            return Err(CliError::parse(&raw));
        }
        let count = ((hi - lo) / step).floor() as usize + 1;
        Ok((0..count).map(|i| lo + step * i as f64).collect())
    }

    /// Comma-separated unsigned list.
    pub fn get_usize_list(&self, key: &str, default: &str) -> Result<Vec<usize>, CliError> {
        let raw = self.get_str(key, default);
        raw.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| CliError::parse(&raw)))
            .collect()
    }

    /// Rejects keys that were set but never read by the experiment.
    pub fn reject_unknown(&self) -> Result<(), CliError> {
        let accessed = self.accessed.borrow();
        for key in self.values.keys() {
            if !accessed.contains(key) {
                return Err(CliError::parse(key));
            }
        }
        Ok(())
    }

    /// `# key=value` echo of everything the experiment resolved.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.resolved.borrow().iter() {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }
}
