use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rabuild::correspondence::CorrespondenceConfig;
use rabuild::universal::{Isomorphism, LocalGroupSpec, LocalGroups};
use rabuild::{BuildingSpec, Gen, Thickness};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

fn sym() -> LocalGroupSpec {
    LocalGroupSpec::Sym
}

fn default_radius() -> usize {
    3
}

fn default_sampled() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalGroupsConfig {
    #[serde(default = "sym")]
    pub i: LocalGroupSpec,
    #[serde(default = "sym")]
    pub j: LocalGroupSpec,
}

impl Default for LocalGroupsConfig {
    fn default() -> Self {
        LocalGroupsConfig { i: LocalGroupSpec::Sym, j: LocalGroupSpec::Sym }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingConfig {
    pub thickness: Thickness,
    /// The `k` group is always the product of the other building's `i` and
    /// `j` groups, so only these two are configurable.
    #[serde(default)]
    pub local_groups: LocalGroupsConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub delta: BuildingConfig,
    pub tilde: BuildingConfig,
    /// `a[α·q_j + β]` is the `k̃`-colour of the `{i,j}`-block `(α, β)`
    #[serde(default)]
    pub a: Option<Vec<u32>>,
    /// `b[γ]` is the index `α̃·q̃_j + β̃` of the `{ĩ,j̃}`-block for `k`-colour `γ`
    #[serde(default)]
    pub b: Option<Vec<u32>>,
    #[serde(default = "default_radius")]
    pub radius: usize,
    /// products of sample pairs added to the standard sample in `verify`
    #[serde(default = "default_sampled")]
    pub sampled_elements: usize,
    /// where `verify` writes its JSON report when `--out` is absent
    #[serde(default)]
    pub report: Option<PathBuf>,
}

/// Everything needed for a run, validated.
pub struct Loaded {
    pub config: RunConfig,
    pub correspondence: Arc<CorrespondenceConfig>,
    pub isomorphism: Isomorphism,
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if config.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {} (expected {SCHEMA_VERSION})", config.schema_version);
        }
        Ok(config)
    }

    pub fn load(self) -> Result<Loaded> {
        let delta = BuildingSpec::new(self.delta.thickness);
        let tilde = BuildingSpec::new(self.tilde.thickness);
        let correspondence = match (&self.a, &self.b) {
            (None, None) => CorrespondenceConfig::new(delta, tilde)?,
            (a, b) => {
                let a = a.clone().unwrap_or_else(|| (0..delta.q(Gen::I) * delta.q(Gen::J)).collect());
                let b = b.clone().unwrap_or_else(|| (0..delta.q(Gen::K)).collect());
                CorrespondenceConfig::with_tables(delta, tilde, a, b)?
            }
        };
        let correspondence = Arc::new(correspondence);
        let locals = LocalGroups {
            delta_i: self.delta.local_groups.i.build(delta.q(Gen::I)).context("local group F_i")?,
            delta_j: self.delta.local_groups.j.build(delta.q(Gen::J)).context("local group F_j")?,
            tilde_i: self.tilde.local_groups.i.build(tilde.q(Gen::I)).context("local group F̃_i")?,
            tilde_j: self.tilde.local_groups.j.build(tilde.q(Gen::J)).context("local group F̃_j")?,
        };
        let isomorphism = Isomorphism::new(correspondence.clone(), &locals)?;
        Ok(Loaded { config: self, correspondence, isomorphism })
    }
}
