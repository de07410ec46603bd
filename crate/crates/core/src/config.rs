//! Pipeline configuration and its `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! preset = basnet
//! gamma = 10
//! no_deep_reintro = true
//! ```
//!
//! A `preset` line selects one of the bundled per-network tunings and is
//! applied first, wherever it appears; every other key overrides it. Keys
//! that are absent keep their defaults (the `u2net` preset).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fusion::CaConfig;
use crate::saliency::SemConfig;
use crate::superpixel::SuperpixelParams;

/// Bundled tunings, one per deep SOD network whose maps are enhanced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    U2Net,
    Basnet,
    MsfNet,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::U2Net, Preset::Basnet, Preset::MsfNet];

    pub fn name(self) -> &'static str {
        match self {
            Preset::U2Net => "u2net",
            Preset::Basnet => "basnet",
            Preset::MsfNet => "msfnet",
        }
    }

    /// The full configuration of this preset.
    pub fn config(self) -> SessConfig {
        // (iterations, superpixels, seeds per component, oisf rounds)
        let (iterations, superpixels, seeds_per_component, oisf_iters) = match self {
            Preset::U2Net => (12, 2500, 10, 5),
            Preset::Basnet => (9, 200, 30, 3),
            Preset::MsfNet => (12, 2500, 30, 1),
        };
        SessConfig {
            iterations,
            superpixels,
            seeds_per_component,
            oisf_iters,
            ..SessConfig::base()
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset `{s}` (expected u2net, basnet or msfnet)"))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every tunable of the enhancement pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SessConfig {
    pub iterations: usize,
    pub superpixels: usize,
    pub seeds_per_component: usize,
    pub oisf_iters: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub lambda: f64,
    pub ca_steps: usize,
    /// Log-odds clamp of the cellular automaton.
    pub epsilon: f64,
    pub decay: f64,
    pub floor: usize,
    /// Skip averaging the input map back in at the end.
    pub no_deep_reintro: bool,
    /// Run the final color pass with the decayed superpixel count instead of
    /// restoring the initial one.
    pub keep_reduced_superpixels: bool,
}

impl Default for SessConfig {
    fn default() -> Self {
        Preset::U2Net.config()
    }
}

impl SessConfig {
    fn base() -> Self {
        Self {
            iterations: 12,
            superpixels: 2500,
            seeds_per_component: 10,
            oisf_iters: 5,
            alpha: 12.0,
            beta: 0.5,
            gamma: 10.0,
            sigma2: 0.01,
            lambda: 0.0001,
            ca_steps: 3,
            epsilon: 0.001,
            decay: 0.8,
            floor: 200,
            no_deep_reintro: false,
            keep_reduced_superpixels: false,
        }
    }

    pub fn superpixel_params(&self) -> SuperpixelParams {
        SuperpixelParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            iterations: self.oisf_iters,
        }
    }

    pub fn sem(&self) -> SemConfig {
        SemConfig {
            iterations: self.iterations,
            superpixels: self.superpixels,
            seeds_per_component: self.seeds_per_component,
            sigma2: self.sigma2,
            superpixel_params: self.superpixel_params(),
            decay: self.decay,
            floor: self.floor,
        }
    }

    pub fn ca(&self) -> CaConfig {
        CaConfig {
            lambda: self.lambda,
            steps: self.ca_steps,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sem().validate()?;
        self.ca().validate()
    }

    /// Parses the `key = value` format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            }
            if !KEYS.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if let Some(&(first, ..)) = entries.iter().find(|(_, k, _)| *k == key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {first})"),
                });
            }
            entries.push((line, key, value));
        }

        let mut cfg = SessConfig::default();
        if let Some(&(line, _, value)) = entries.iter().find(|(_, k, _)| *k == "preset") {
            let preset: Preset = value.parse().map_err(|message| Error::Config { line, message })?;
            cfg = preset.config();
        }
        for &(line, key, value) in entries.iter().filter(|(_, k, _)| *k != "preset") {
            cfg.set(key, value).map_err(|message| Error::Config { line, message })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile(path.to_path_buf())
            } else {
                Error::io(path, e)
            }
        })?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "iterations" => self.iterations = count(key, value, 1)?,
            "superpixels" => self.superpixels = count(key, value, 2)?,
            "seeds_per_component" => self.seeds_per_component = count(key, value, 1)?,
            "oisf_iters" => self.oisf_iters = count(key, value, 1)?,
            "ca_steps" => self.ca_steps = count(key, value, 0)?,
            "floor" => self.floor = count(key, value, 1)?,
            "alpha" => self.alpha = real(key, value, |v| v > 0.0, "> 0")?,
            "beta" => self.beta = real(key, value, |v| v > 0.0, "> 0")?,
            "gamma" => self.gamma = real(key, value, |v| v >= 0.0, ">= 0")?,
            "sigma2" => self.sigma2 = real(key, value, |v| v > 0.0, "> 0")?,
            "lambda" => self.lambda = real(key, value, |v| v >= 0.0, ">= 0")?,
            "epsilon" => {
                self.epsilon = real(key, value, |v| v > 0.0 && v < 0.5, "in (0, 0.5)")?
            }
            "decay" => self.decay = real(key, value, |v| v > 0.0 && v <= 1.0, "in (0, 1]")?,
            "no_deep_reintro" => self.no_deep_reintro = flag(key, value)?,
            "keep_reduced_superpixels" => self.keep_reduced_superpixels = flag(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// The effective configuration in the file format; parsing it back
    /// yields an identical value.
    pub fn to_config_string(&self) -> String {
        format!(
            "iterations = {}\n\
             superpixels = {}\n\
             seeds_per_component = {}\n\
             oisf_iters = {}\n\
             alpha = {}\n\
             beta = {}\n\
             gamma = {}\n\
             sigma2 = {}\n\
             lambda = {}\n\
             ca_steps = {}\n\
             epsilon = {}\n\
             decay = {}\n\
             floor = {}\n\
             no_deep_reintro = {}\n\
             keep_reduced_superpixels = {}\n",
            self.iterations,
            self.superpixels,
            self.seeds_per_component,
            self.oisf_iters,
            self.alpha,
            self.beta,
            self.gamma,
            self.sigma2,
            self.lambda,
            self.ca_steps,
            self.epsilon,
            self.decay,
            self.floor,
            self.no_deep_reintro,
            self.keep_reduced_superpixels,
        )
    }
}

/// Loads a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SessConfig> {
    SessConfig::from_file(path)
}

const KEYS: [&str; 16] = [
    "preset",
    "iterations",
    "superpixels",
    "seeds_per_component",
    "oisf_iters",
    "alpha",
    "beta",
    "gamma",
    "sigma2",
    "lambda",
    "ca_steps",
    "epsilon",
    "decay",
    "floor",
    "no_deep_reintro",
    "keep_reduced_superpixels",
];

fn count(key: &str, value: &str, min: usize) -> std::result::Result<usize, String> {
    let v: usize = value
        .parse()
        .map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))?;
    if v < min {
        return Err(format!("`{key}` must be >= {min}, got {v}"));
    }
    Ok(v)
}

fn real(
    key: &str,
    value: &str,
    ok: impl Fn(f64) -> bool,
    rule: &str,
) -> std::result::Result<f64, String> {
    let v: f64 = value
        .parse()
        .map_err(|_| format!("`{key}` expects a number, got `{value}`"))?;
    if !v.is_finite() || !ok(v) {
        return Err(format!("`{key}` must be {rule}, got {value}"));
    }
    Ok(v)
}

fn flag(key: &str, value: &str) -> std::result::Result<bool, String> {
    value
        .parse()
        .map_err(|_| format!("`{key}` expects true or false, got `{value}`"))
}
