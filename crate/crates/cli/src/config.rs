//! TOML run configuration.
//!
//! ```toml
//! [base]
//! kind = "mrl"
//! expr = "1"
//!
//! [covariate]
//! expr = "exp(-t)"
//!
//! [grid]
//! t = 20
//! points = 2001
//! tol = 1e-9
//!
//! [search]
//! id = "T1"
//! drop = 1
//! trials = 50
//! seed = 7
//! family = "family.toml"
//!
//! [output]
//! csv = "out.csv"
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use damrl_core::theorems::search::{Family, Param};
use damrl_core::{Settings, SpecKind};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub base: Option<BaseBlock>,
    pub covariate: Option<CovariateBlock>,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub search: SearchBlock,
    #[serde(default)]
    pub output: OutputBlock,
    /// Directory the config was read from; relative paths resolve against it.
    #[serde(skip)]
    pub root: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseBlock {
    #[serde(default = "default_kind")]
    pub kind: String,
    pub expr: String,
}

fn default_kind() -> String {
    "mrl".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovariateBlock {
    pub expr: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub t: Option<f64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBlock {
    pub id: Option<String>,
    pub drop: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    /// Path to a family file.
    pub family: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub csv: Option<PathBuf>,
}

/// A covariate family file: a template with `{name}` placeholders and a
/// `[lo, hi]` range per name.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    #[serde(default = "default_family_name")]
    pub name: String,
    pub template: String,
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
}

fn default_family_name() -> String {
    "family".to_string()
}

impl FamilyFile {
    pub fn load(path: &Path) -> Result<Family, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read family file {}: {e}", path.display()))?;
        let f: FamilyFile = toml::from_str(&text).map_err(|e| format!("family file {}: {e}", path.display()))?;
        let params = f.params.iter().map(|(k, [lo, hi])| Param::new(k, *lo, *hi)).collect();
        let family = Family::covariate(&f.name, &f.template, params);
        family.validate().map_err(|e| format!("family file {}: {e}", path.display()))?;
        Ok(family)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
        cfg.root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    pub fn base_kind(&self) -> Result<Option<(SpecKind, &str)>, String> {
        match &self.base {
            None => Ok(None),
            Some(b) => {
                let kind = b.kind.parse::<SpecKind>().map_err(|e| format!("[base] {e}"))?;
                Ok(Some((kind, b.expr.as_str())))
            }
        }
    }

    /// Default settings with the grid block applied.
    pub fn settings(&self) -> Settings {
        let mut s = Settings::default();
        if let Some(t) = self.grid.t {
            s.horizon = Some(t);
        }
        if let Some(n) = self.grid.points {
            s.grid_points = n;
        }
        if let Some(tol) = self.grid.tol {
            s.tol = tol;
        }
        s
    }
}

/// Reject non-positive or non-finite overrides.
pub fn check_settings(s: &Settings) -> Result<(), String> {
    if let Some(t) = s.horizon {
        if !(t.is_finite() && t > 0.0) {
            return Err(format!("grid t must be positive, got {t}"));
        }
    }
    if s.grid_points < 3 {
        return Err(format!("grid points must be at least 3, got {}", s.grid_points));
    }
    if !(s.tol.is_finite() && s.tol > 0.0) {
        return Err(format!("tol must be positive, got {}", s.tol));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let e = toml::from_str::<RunConfig>("[grid]\nstep = 1\n").unwrap_err();
        assert!(e.to_string().contains("step"));
        assert!(toml::from_str::<RunConfig>("[base]\nexpr = \"1\"\nshape = 2\n").is_err());
    }

    #[test]
    fn grid_block_overrides_defaults() {
        let cfg: RunConfig = toml::from_str("[grid]\nt = 2\npoints = 5\n").unwrap();
        let s = cfg.settings();
        assert_eq!(s.horizon, Some(2.0));
        assert_eq!(s.grid_points, 5);
        assert_eq!(s.tol, Settings::default().tol);
        assert!(check_settings(&s).is_ok());
        assert!(check_settings(&Settings { tol: 0.0, ..s }).is_err());
    }
}
