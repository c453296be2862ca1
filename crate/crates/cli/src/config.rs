use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// Optional JSON config file. Top-level keys are global options; a nested
/// object named after a subcommand holds that subcommand's options.
///
/// Precedence: command line, then `SAFESWITCH_*` environment variables, then
/// this file, then built-in defaults.
#[derive(Debug, Default)]
pub struct FileConfig {
    root: Map<String, Value>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        match serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?
        {
            Value::Object(root) => Ok(Self { root }),
            _ => bail!("config {} must be a JSON object", path.display()),
        }
    }

    fn lookup<T: DeserializeOwned>(value: Option<&Value>, key: &str) -> Result<Option<T>> {
        value
            .map(|v| {
                serde_json::from_value(v.clone()).with_context(|| format!("config key `{key}`"))
            })
            .transpose()
    }

    pub fn global<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        Self::lookup(self.root.get(key), key)
    }

    pub fn section<T: DeserializeOwned>(&self, section: &str, key: &str) -> Result<Option<T>> {
        let value = self.root.get(section).and_then(|s| s.get(key));
        Self::lookup(value, &format!("{section}.{key}"))
    }
}

/// Resolves one option of a subcommand and records it for the manifest.
pub struct Resolver<'a> {
    config: &'a FileConfig,
    section: &'static str,
    pub resolved: Map<String, Value>,
}

impl<'a> Resolver<'a> {
    pub fn new(config: &'a FileConfig, section: &'static str) -> Self {
        Self {
            config,
            section,
            resolved: Map::new(),
        }
    }

    pub fn optional<T>(&mut self, key: &str, cli: Option<T>) -> Result<Option<T>>
    where
        T: DeserializeOwned + serde::Serialize,
    {
        let value = match cli {
            Some(v) => Some(v),
            None => self.config.section(self.section, key)?,
        };
        if let Some(v) = &value {
            self.resolved
                .insert(key.to_string(), serde_json::to_value(v)?);
        }
        Ok(value)
    }

    pub fn get<T>(&mut self, key: &str, cli: Option<T>, default: T) -> Result<T>
    where
        T: DeserializeOwned + serde::Serialize,
    {
        let value = self.optional(key, cli)?.unwrap_or(default);
        self.resolved
            .insert(key.to_string(), serde_json::to_value(&value)?);
        Ok(value)
    }

    pub fn required<T>(&mut self, key: &str, cli: Option<T>) -> Result<T>
    where
        T: DeserializeOwned + serde::Serialize,
    {
        match self.optional(key, cli)? {
            Some(v) => Ok(v),
            None => bail!("missing required option `--{}`", key.replace('_', "-")),
        }
    }
}
