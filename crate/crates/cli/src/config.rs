//! Experiment configs: `{"command", "inputs", "params", "global"}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use setvalued::maps::SetValuedMap;
use setvalued::{CompactSet, ConvexPolytope, NormSpec, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_fix_tol")]
    pub fix_tol: f64,
    #[serde(default = "default_branch_tol")]
    pub branch_tol: f64,
    #[serde(default = "default_proj_tol")]
    pub proj_tol: f64,
}

fn default_fix_tol() -> f64 {
    setvalued::solver::DEFAULT_FIX_TOL
}

fn default_branch_tol() -> f64 {
    setvalued::solver::DEFAULT_BRANCH_TOL
}

fn default_proj_tol() -> f64 {
    setvalued::geometry::ProjectionOptions::default().tol
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fix_tol: default_fix_tol(),
            branch_tol: default_branch_tol(),
            proj_tol: default_proj_tol(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Global {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub command: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, Value>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub global: Global,
    /// Directory that relative input paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A set input: a polytope `{"dim", "vertices"}`, or a compact set wrapped
/// as `{"compact": {"dim", "vertices" | "pieces"}}`.
#[derive(Clone, Debug, PartialEq)]
pub enum SetInput {
    Convex(ConvexPolytope),
    Compact(CompactSet),
}

impl SetInput {
    pub fn into_compact(self) -> Result<CompactSet> {
        match self {
            SetInput::Convex(p) => Ok(CompactSet::from_pieces(vec![p])?),
            SetInput::Compact(c) => Ok(c),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Config = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let t = &self.global.tolerances;
        for (name, v) in [("fix_tol", t.fix_tol), ("branch_tol", t.branch_tol), ("proj_tol", t.proj_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("tolerance {name} = {v} must be positive");
            }
        }
        for name in self.inputs.keys() {
            self.raw_input(name)?;
        }
        Ok(())
    }

    fn raw_input(&self, name: &str) -> Result<Value> {
        match self.inputs.get(name) {
            None => bail!("missing input `{name}`"),
            Some(Value::String(rel)) => {
                let path = self.base_dir.join(rel);
                let text = fs::read_to_string(&path).with_context(|| format!("input `{name}`: reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("input `{name}`: parsing {}", path.display()))
            }
            Some(v) => Ok(v.clone()),
        }
    }

    pub fn has_input(&self, name: &str) -> bool {
        self.inputs.contains_key(name)
    }

    pub fn input<T: DeserializeOwned>(&self, name: &str) -> Result<T> {
        serde_json::from_value(self.raw_input(name)?).with_context(|| format!("input `{name}`"))
    }

    pub fn set(&self, name: &str) -> Result<SetInput> {
        let v = self.raw_input(name)?;
        match v.get("compact") {
            Some(inner) => Ok(SetInput::Compact(
                serde_json::from_value(inner.clone()).with_context(|| format!("input `{name}`"))?,
            )),
            None => Ok(SetInput::Convex(
                serde_json::from_value(v).with_context(|| format!("input `{name}`"))?,
            )),
        }
    }

    pub fn polytope(&self, name: &str) -> Result<ConvexPolytope> {
        match self.set(name)? {
            SetInput::Convex(p) => Ok(p),
            SetInput::Compact(_) => bail!("input `{name}` must be a convex polytope"),
        }
    }

    /// Loads and validates a map; its norm must agree with the global one.
    pub fn map(&self, name: &str) -> Result<SetValuedMap> {
        let m: SetValuedMap = self.input(name)?;
        m.validate().with_context(|| format!("input `{name}`"))?;
        if let Some(n) = self.global.norm {
            if n != m.norm {
                bail!("global norm {n:?} conflicts with the norm {:?} of map `{name}`", m.norm);
            }
        }
        Ok(m)
    }

    pub fn norm(&self) -> NormSpec {
        self.global.norm.unwrap_or(NormSpec::Euclidean)
    }

    pub fn param<T: DeserializeOwned>(&self, name: &str) -> Result<T> {
        let v = self.params.get(name).ok_or_else(|| anyhow!("missing parameter `{name}`"))?;
        serde_json::from_value(v.clone()).with_context(|| format!("parameter `{name}`"))
    }

    pub fn param_or<T: DeserializeOwned>(&self, name: &str, default: T) -> Result<T> {
        if self.params.contains_key(name) {
            self.param(name)
        } else {
            Ok(default)
        }
    }

    pub fn point(&self, name: &str) -> Result<Point> {
        let coords: Vec<f64> = self.param(name)?;
        Ok(Point::try_new(coords)?)
    }
}
