//! Run configuration: defaults, then `config.toml` in the cache directory,
//! then environment variables, then command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use klab_core::lengths::DEFAULT_SWEEP_GUARD;

pub const ENV_CACHE_DIR: &str = "KLAB_CACHE_DIR";
pub const ENV_THREADS: &str = "KLAB_THREADS";
pub const ENV_DEFAULT_CAP: &str = "KLAB_DEFAULT_CAP";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub cache_dir: PathBuf,
    pub cache_enabled: bool,
    /// Element cap for Δ-type sweeps; `None` means `3·|G|`.
    pub default_cap: Option<u64>,
    pub sweep_guard: u64,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub json: bool,
}

/// Keys accepted in `config.toml`. All optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub default_cap: Option<u64>,
    pub sweep_guard: Option<u64>,
    pub threads: Option<usize>,
    pub json: Option<bool>,
    pub cache: Option<bool>,
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct FlagConfig {
    pub cache_dir: Option<PathBuf>,
    pub no_cache: bool,
    pub default_cap: Option<u64>,
    pub sweep_guard: Option<u64>,
    pub threads: Option<usize>,
    pub json: bool,
}

pub fn default_cache_dir() -> PathBuf {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(x).join("klab");
    }
    if let Some(h) = std::env::var_os("HOME") {
        return PathBuf::from(h).join(".cache").join("klab");
    }
    std::env::temp_dir().join("klab")
}

impl RunConfig {
    pub fn resolve(flags: &FlagConfig, env: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let cache_dir = flags
            .cache_dir
            .clone()
            .or_else(|| env(ENV_CACHE_DIR).map(PathBuf::from))
            .unwrap_or_else(default_cache_dir);
        let file = read_file_config(&cache_dir)?;

        let mut cfg = RunConfig {
            cache_dir,
            cache_enabled: file.cache.unwrap_or(true),
            default_cap: file.default_cap,
            sweep_guard: file.sweep_guard.unwrap_or(DEFAULT_SWEEP_GUARD),
            threads: file.threads,
            json: file.json.unwrap_or(false),
        };
        if let Some(v) = env(ENV_THREADS) {
            cfg.threads = Some(v.parse().map_err(|_| format!("{ENV_THREADS}={v} is not a thread count"))?);
        }
        if let Some(v) = env(ENV_DEFAULT_CAP) {
            cfg.default_cap = Some(v.parse().map_err(|_| format!("{ENV_DEFAULT_CAP}={v} is not a cap"))?);
        }
        if flags.no_cache {
            cfg.cache_enabled = false;
        }
        if flags.default_cap.is_some() {
            cfg.default_cap = flags.default_cap;
        }
        if let Some(g) = flags.sweep_guard {
            cfg.sweep_guard = g;
        }
        if flags.threads.is_some() {
            cfg.threads = flags.threads;
        }
        cfg.json |= flags.json;
        Ok(cfg)
    }
}

fn read_file_config(dir: &Path) -> Result<FileConfig, String> {
    let path = dir.join("config.toml");
    match std::fs::read_to_string(&path) {
        Ok(text) => toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(FileConfig::default()),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults() {
        let dir = tempfile::tempdir().unwrap();
        let flags = FlagConfig { cache_dir: Some(dir.path().into()), ..Default::default() };
        let cfg = RunConfig::resolve(&flags, no_env).unwrap();
        assert_eq!(cfg.sweep_guard, 8);
        assert!(cfg.cache_enabled && !cfg.json);
        assert_eq!(cfg.default_cap, None);
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("config.toml"), "default_cap = 5\nthreads = 2\nsweep_guard = 10\n").unwrap();
        let flags = FlagConfig { cache_dir: Some(dir.path().into()), ..Default::default() };
        let cfg = RunConfig::resolve(&flags, no_env).unwrap();
        assert_eq!((cfg.default_cap, cfg.threads, cfg.sweep_guard), (Some(5), Some(2), 10));

        let env = |k: &str| (k == ENV_DEFAULT_CAP).then(|| "7".to_string());
        let cfg = RunConfig::resolve(&flags, env).unwrap();
        assert_eq!(cfg.default_cap, Some(7));

        let flags = FlagConfig { default_cap: Some(9), ..flags };
        assert_eq!(RunConfig::resolve(&flags, env).unwrap().default_cap, Some(9));
    }

    #[test]
    fn bad_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("config.toml"), "colour = 3\n").unwrap();
        let flags = FlagConfig { cache_dir: Some(dir.path().into()), ..Default::default() };
        assert!(RunConfig::resolve(&flags, no_env).is_err());
    }
}
