use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hinclust_core::Hyperparameters;
use serde::{Deserialize, Serialize};

/// Run configuration. Relative paths are resolved against the directory that
/// holds the config file; hyperparameters sit at the top level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    /// One motif JSON file per entry.
    pub motifs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<PathBuf>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Defaults to `<out_dir>/cache`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(flatten)]
    pub hyper: Hyperparameters,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Reads, resolves and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.nodes);
        join(&mut self.edges);
        self.motifs.iter_mut().for_each(join);
        if let Some(s) = &mut self.seeds {
            join(s);
        }
        join(&mut self.out_dir);
        if let Some(c) = &mut self.cache_dir {
            join(c);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.motifs.is_empty() {
            bail!("config lists no motifs");
        }
        let inputs = [&self.nodes, &self.edges]
            .into_iter()
            .chain(&self.motifs)
            .chain(self.seeds.as_ref());
        for p in inputs {
            if !p.is_file() {
                bail!("input file {} does not exist", p.display());
            }
        }
        if self.threads == Some(0) {
            bail!("threads must be at least 1");
        }
        self.hyper.validate()?;
        Ok(())
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(|| self.out_dir.join("cache"))
    }
}
