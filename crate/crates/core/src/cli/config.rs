//! `RunConfig` and the `key=value` configuration file.
//!
//! Recognized keys: `q`, `R`, `D`, `M`, `seed`, `out`, and `tol.<check>` for
//! each check name in [`CHECKS`]. Blank lines and lines starting with `#`
//! are ignored. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _};

use crate::spectral::DEFAULT_NODES;

/// Suite checks with their default tolerances.
pub const CHECKS: [(&str, f64); 18] = [
    ("plancherel_mass", 1e-10),
    ("c_function", 1e-12),
    ("round_trip", 1e-8),
    ("plancherel_identity", 1e-8),
    ("nuclear_kernel", 1e-6),
    ("kernel_apply", 1e-10),
    ("hs_equality", 1e-6),
    ("trace", 1e-6),
    ("adjoint", 1e-6),
    ("product", 1e-5),
    ("schatten_hs", 1e-10),
    ("schatten_power", 1e-8),
    ("layercake", 1e-10),
    ("strong_type", 1e-12),
    ("lr_embedding", 1e-12),
    ("intermediate_bound", 1e-9),
    ("kernel_lq", 1e-12),
    ("kernel_lq_tight", 1e-12),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(CHECKS.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, check: &str) -> f64 {
        self.0[check]
    }

    pub fn set(&mut self, check: &str, value: f64) -> anyhow::Result<()> {
        match self.0.get_mut(check) {
            Some(v) => {
                if !(value > 0.0 && value.is_finite()) {
                    bail!("tolerance for {check} must be positive and finite, got {value}");
                }
                *v = value;
                Ok(())
            }
            None => bail!("unknown check {check:?} in tolerance override"),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q: usize,
    pub radius: usize,
    /// Cylinder depth; `None` means equal to the radius.
    pub depth: Option<usize>,
    pub nodes: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 2,
            radius: 4,
            depth: None,
            nodes: DEFAULT_NODES,
            seed: 42,
            tolerances: Tolerances::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(self.radius)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.q < 2 {
            bail!("q must be at least 2, got {}", self.q);
        }
        if self.depth() < self.radius {
            bail!("D must be at least R, got D = {} < R = {}", self.depth(), self.radius);
        }
        if self.depth() == 0 {
            bail!("D must be at least 1");
        }
        if self.nodes < 2 {
            bail!("M must be at least 2, got {}", self.nodes);
        }
        Ok(())
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let value = value.trim();
        let int = |v: &str| v.parse::<usize>().with_context(|| format!("{key}: expected a nonnegative integer, got {v:?}"));
        match key.trim() {
            "q" => self.q = int(value)?,
            "R" => self.radius = int(value)?,
            "D" => self.depth = Some(int(value)?),
            "M" => self.nodes = int(value)?,
            "seed" => self.seed = value.parse().with_context(|| format!("seed: expected a 64-bit integer, got {value:?}"))?,
            "out" => self.out = PathBuf::from(value),
            k => match k.strip_prefix("tol.") {
                Some(check) => {
                    let v: f64 = value.parse().with_context(|| format!("{k}: expected a number, got {value:?}"))?;
                    self.tolerances.set(check, v)?;
                }
                None => bail!("unknown configuration key {k:?}"),
            },
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> anyhow::Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got {line:?}", i + 1))?;
            self.set(k, v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Canonical `key=value` lines, used for input digests.
    pub fn canonical(&self) -> String {
        let mut s = format!(
            "q={}\nR={}\nD={}\nM={}\nseed={}\n",
            self.q,
            self.radius,
            self.depth(),
            self.nodes,
            self.seed
        );
        for (k, v) in self.tolerances.iter() {
            s.push_str(&format!("tol.{k}={v:e}\n"));
        }
        s
    }
}

/// Splits `--tol.<check> value` and `--tol.<check>=value` out of `args`.
pub fn extract_tolerance_flags(args: Vec<String>) -> anyhow::Result<(Vec<String>, Vec<(String, String)>)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if let Some(spec) = a.strip_prefix("--tol.") {
            let (name, value) = match spec.split_once('=') {
                Some((n, v)) => (n.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| anyhow!("--tol.{spec} needs a value"))?;
                    (spec.to_string(), v)
                }
            };
            tols.push((name, value));
        } else {
            rest.push(a);
        }
    }
    Ok((rest, tols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = RunConfig::default();
        assert_eq!((c.q, c.radius, c.depth(), c.nodes, c.seed), (2, 4, 4, 256, 42));
        c.validate().unwrap();
        let mut bad = c.clone();
        bad.q = 1;
        assert!(bad.validate().is_err());
        let mut bad = c.clone();
        bad.depth = Some(3);
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.nodes = 1;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_text() {
        let mut c = RunConfig::default();
        c.apply_text("# sweep\nq = 3\nR=2\n\nM=64\nseed=7\ntol.round_trip=1e-6\nout=/tmp/x\n")
            .unwrap();
        assert_eq!((c.q, c.radius, c.depth(), c.nodes, c.seed), (3, 2, 2, 64, 7));
        assert_eq!(c.tolerances.get("round_trip"), 1e-6);
        assert_eq!(c.out, PathBuf::from("/tmp/x"));
        assert!(c.clone().apply_text("bogus=1").is_err());
        assert!(c.clone().apply_text("q").is_err());
        assert!(c.clone().apply_text("tol.nope=1").is_err());
        assert!(c.clone().apply_text("tol.trace=-1").is_err());
        assert!(c.apply_text("q=two").is_err());
    }

    #[test]
    fn tolerance_flags() {
        let args = ["x", "suite", "--tol.trace", "1e-3", "--q", "3", "--tol.product=2e-5"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let (rest, tols) = extract_tolerance_flags(args).unwrap();
        assert_eq!(rest, ["x", "suite", "--q", "3"]);
        assert_eq!(
            tols,
            [("trace".into(), "1e-3".into()), ("product".into(), "2e-5".into())]
        );
        assert!(extract_tolerance_flags(vec!["--tol.trace".into()]).is_err());
    }
}
