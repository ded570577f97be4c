//! Plain-text sectioned key = value configuration.
//!
//! Sections in brackets, scalar values or bracketed numeric lists, `#`
//! comments. Keys may repeat (releases accumulate). Numeric ranges are
//! validated against module preconditions before any computation starts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::{
    build_separated_model, build_wolbachia_model, wolbachia_separated, CarryingCapacity,
    ModelSpec, SeparatedSpec, WolbachiaParams,
};
use crate::error::{Error, Result};
use crate::integrate::{TOL_MAX, TOL_MIN};
use crate::release::{Release, ReleaseSchedule};
use std::sync::Arc;

/// Raw parsed config: ordered (section, key, value) triples.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: Vec<(String, String, String)>,
    pub text: String,
    pub path: String,
}

impl RawConfig {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut section = String::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return Err(Error::Config(format!(
                        "{path}:{}: malformed section header `{line}`",
                        lineno + 1
                    )));
                }
                section = line[1..line.len() - 1].trim().to_lowercase();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{path}:{}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "{path}:{}: key `{}` appears before any [section]",
                    lineno + 1,
                    key.trim()
                )));
            }
            entries.push((
                section.clone(),
                key.trim().to_lowercase(),
                value.trim().to_string(),
            ));
        }
        Ok(RawConfig { entries, text: text.to_string(), path: path.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
    }

    pub fn get_all(&self, section: &str, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
            .collect()
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("[{section}] {key}: `{v}` is not a number"))),
        }
    }

    pub fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        self.get_f64(section, key)?
            .ok_or_else(|| Error::Config(format!("[{section}] is missing required key `{key}`")))
    }

    pub fn get_usize(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("[{section}] {key}: `{v}` is not an integer"))),
        }
    }

    /// Parse a bracketed numeric list `[a, b, c]`.
    pub fn parse_list(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
        let inner = v
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| {
                Error::Config(format!("[{section}] {key}: expected `[a, b, ...]`, got `{v}`"))
            })?;
        inner
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!("[{section}] {key}: `{s}` is not a number"))
                })
            })
            .collect()
    }

    pub fn get_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => Self::parse_list(section, key, v).map(Some),
        }
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub tol: f64,
    pub grid_n: usize,
    pub orbit_samples: usize,
    pub delta: f64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let tol = raw.get_f64("numerics", "tol")?.unwrap_or(1e-9);
        if !(TOL_MIN..=TOL_MAX).contains(&tol) {
            return Err(Error::Config(format!(
                "[numerics] tol must lie in [{TOL_MIN:e}, {TOL_MAX:e}], got {tol:e}"
            )));
        }
        let grid_n = raw.get_usize("numerics", "grid_n", 256)?;
        if grid_n < 64 {
            return Err(Error::Config(format!("[numerics] grid_n must be >= 64, got {grid_n}")));
        }
        let orbit_samples = raw.get_usize("numerics", "orbit_samples", 512)?;
        if orbit_samples < 256 {
            return Err(Error::Config(format!(
                "[numerics] orbit_samples must be >= 256, got {orbit_samples}"
            )));
        }
        let delta = raw.get_f64("numerics", "delta")?.unwrap_or(1e-6);
        if !(1e-8..=1e-2).contains(&delta) {
            return Err(Error::Config(format!(
                "[numerics] delta must lie in [1e-8, 1e-2], got {delta:e}"
            )));
        }
        let out_dir = PathBuf::from(raw.get("output", "dir").unwrap_or("out"));
        // referenced files must exist before any computation starts
        if let Some(file) = raw.get("capacity", "file") {
            let p = Path::new(file);
            if !p.exists() {
                return Err(Error::Config(format!(
                    "[capacity] file `{file}` does not exist"
                )));
            }
        }
        Ok(RunConfig { raw, tol, grid_n, orbit_samples, delta, out_dir })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_raw(RawConfig::load(path)?)
    }

    pub fn params(&self) -> Result<WolbachiaParams> {
        let defaults = WolbachiaParams::default();
        Ok(WolbachiaParams {
            b1: self.raw.get_f64("model", "b1")?.unwrap_or(defaults.b1),
            b2: self.raw.get_f64("model", "b2")?.unwrap_or(defaults.b2),
            d1: self.raw.get_f64("model", "d1")?.unwrap_or(defaults.d1),
            d2: self.raw.get_f64("model", "d2")?.unwrap_or(defaults.d2),
            sh: self.raw.get_f64("model", "sh")?.unwrap_or(defaults.sh),
        })
    }

    pub fn capacity(&self) -> Result<CarryingCapacity> {
        let kind = self.raw.get("capacity", "kind").unwrap_or("cosine");
        match kind {
            "cosine" => {
                let k0 = self.raw.require_f64("capacity", "k0")?;
                let a = self.raw.require_f64("capacity", "a")?;
                let period = self.raw.require_f64("capacity", "period")?;
                CarryingCapacity::cosine(k0, a, period)
                    .map_err(|e| Error::Config(e.to_string()))
            }
            "samples" => {
                let period = self.raw.require_f64("capacity", "period")?;
                let file = self.raw.get("capacity", "file").ok_or_else(|| {
                    Error::Config("[capacity] kind = samples needs `file`".into())
                })?;
                let text = fs::read_to_string(file).map_err(|e| {
                    Error::Config(format!("cannot read capacity samples `{file}`: {e}"))
                })?;
                let samples: Vec<f64> = text
                    .split([',', '\n', ' '])
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| {
                            Error::Config(format!("capacity sample `{s}` is not a number"))
                        })
                    })
                    .collect::<Result<_>>()?;
                CarryingCapacity::sampled(period, samples)
                    .map_err(|e| Error::Config(e.to_string()))
            }
            other => Err(Error::Config(format!(
                "[capacity] kind must be `cosine` or `samples`, got `{other}`"
            ))),
        }
    }

    pub fn model(&self) -> Result<ModelSpec> {
        let capacity = self.capacity()?;
        let family = self.raw.get("model", "family").unwrap_or("wolbachia");
        match family {
            "wolbachia" => build_wolbachia_model(self.params()?, capacity),
            "wolbachia-separated" => wolbachia_separated(self.params()?, capacity),
            "cubic" => {
                let theta = self.raw.get_f64("model", "theta")?.unwrap_or(0.4);
                if !(0.0 < theta && theta < 1.0) {
                    return Err(Error::Config(format!(
                        "[model] theta must lie in (0, 1), got {theta}"
                    )));
                }
                let spec = SeparatedSpec::new(
                    Arc::new(|_| 1.0),
                    Arc::new(move |p: f64| p * (1.0 - p) * (p - theta)),
                    theta,
                );
                build_separated_model(spec, self.params()?, capacity)
            }
            other => Err(Error::Config(format!(
                "[model] family must be `wolbachia`, `wolbachia-separated` or `cubic`, got `{other}`"
            ))),
        }
    }

    /// Inline release schedule from repeated `impulse = [t, C]` and
    /// `pulse = [start, duration, C]` lines.
    pub fn schedule(&self) -> Result<ReleaseSchedule> {
        let mut releases = Vec::new();
        for v in self.raw.get_all("experiment", "impulse") {
            let nums = RawConfig::parse_list("experiment", "impulse", v)?;
            if nums.len() != 2 {
                return Err(Error::Config(format!(
                    "[experiment] impulse needs [time, amount], got `{v}`"
                )));
            }
            releases.push(Release::Impulse { time: nums[0], amount: nums[1] });
        }
        for v in self.raw.get_all("experiment", "pulse") {
            let nums = RawConfig::parse_list("experiment", "pulse", v)?;
            if nums.len() != 3 {
                return Err(Error::Config(format!(
                    "[experiment] pulse needs [start, duration, amount], got `{v}`"
                )));
            }
            releases.push(Release::Pulse { start: nums[0], duration: nums[1], amount: nums[2] });
        }
        releases.sort_by(|a, b| {
            let ta = match a {
                Release::Impulse { time, .. } => *time,
                Release::Pulse { start, .. } => *start,
            };
            let tb = match b {
                Release::Impulse { time, .. } => *time,
                Release::Pulse { start, .. } => *start,
            };
            ta.partial_cmp(&tb).unwrap()
        });
        ReleaseSchedule::new(releases).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        Ok(self.raw.get_list("experiment", key)?.unwrap_or_else(|| default.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo
[model]
family = wolbachia
b1 = 0.8

[capacity]
kind = cosine
k0 = 0.06
a = 0.02
period = 12

[numerics]
tol = 1e-9

[experiment]
impulse = [6.0, 0.02]
impulse = [8.0, 0.01]
s_values = [10, 100, 1000]

[output]
dir = artifacts
";

    #[test]
    fn parses_sections_lists_and_repeats() {
        let raw = RawConfig::parse(SAMPLE, "demo.conf").unwrap();
        assert_eq!(raw.get("model", "family"), Some("wolbachia"));
        assert_eq!(raw.get_all("experiment", "impulse").len(), 2);
        let cfg = RunConfig::from_raw(raw).unwrap();
        assert_eq!(cfg.tol, 1e-9);
        assert_eq!(cfg.out_dir, PathBuf::from("artifacts"));
        let sched = cfg.schedule().unwrap();
        assert_eq!(sched.releases().len(), 2);
        assert_eq!(cfg.list_or("s_values", &[]).unwrap(), vec![10.0, 100.0, 1000.0]);
        let model = cfg.model().unwrap();
        assert_eq!(model.period(), 12.0);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(RawConfig::parse("key = 1\n", "x").is_err()); // key before section
        assert!(RawConfig::parse("[a\n", "x").is_err());
        assert!(RawConfig::parse("[a]\njust-a-token\n", "x").is_err());
    }

    #[test]
    fn validates_numeric_ranges() {
        let text = SAMPLE.replace("tol = 1e-9", "tol = 0.5");
        let raw = RawConfig::parse(&text, "demo.conf").unwrap();
        assert!(matches!(RunConfig::from_raw(raw), Err(Error::Config(_))));
        let text = SAMPLE.replace("tol = 1e-9", "grid_n = 8");
        let raw = RawConfig::parse(&text, "demo.conf").unwrap();
        assert!(matches!(RunConfig::from_raw(raw), Err(Error::Config(_))));
    }

    #[test]
    fn missing_required_capacity_key() {
        let text = SAMPLE.replace("k0 = 0.06\n", "");
        let cfg = RunConfig::from_raw(RawConfig::parse(&text, "demo.conf").unwrap()).unwrap();
        assert!(matches!(cfg.capacity(), Err(Error::Config(_))));
    }
}
