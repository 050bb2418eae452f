use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use reserving::mack::BootstrapConfig;
use reserving::macknet::{EnsembleConfig, FactorRows};
use reserving::{LineOfBusiness, LossKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Mack,
    Macknet,
    Both,
}

impl ModelChoice {
    pub fn models(self) -> &'static [Model] {
        match self {
            ModelChoice::Mack => &[Model::Mack],
            ModelChoice::Macknet => &[Model::Macknet],
            ModelChoice::Both => &[Model::Mack, Model::Macknet],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Mack,
    Macknet,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Mack => "mack",
            Model::Macknet => "macknet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KindChoice {
    Paid,
    Incurred,
    /// Both kinds; Mack-Net completes them jointly.
    Both,
}

impl KindChoice {
    pub fn kinds(self) -> &'static [LossKind] {
        match self {
            KindChoice::Paid => &[LossKind::Paid],
            KindChoice::Incurred => &[LossKind::Incurred],
            KindChoice::Both => &[LossKind::Paid, LossKind::Incurred],
        }
    }
}

/// Every knob of a run. Values come from defaults, then the config file,
/// then command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Schedule P CSV file or a directory written by `ingest`.
    pub data: Option<PathBuf>,
    pub out: PathBuf,
    pub lob: LineOfBusiness,
    pub kind: KindChoice,
    pub model: ModelChoice,
    /// `all`, `meyers-all`, or a comma-separated list of codes.
    pub companies: String,
    /// File of company codes used by `meyers-all`: one `LOB,code` or `code`
    /// per line.
    pub company_list: Option<PathBuf>,
    /// Master seed; required by commands that draw random numbers.
    pub seed: Option<u64>,
    /// Incurred net of bulk reserve.
    pub net_bulk: bool,
    pub alpha: f64,
    pub factor_rows: FactorRows,
    pub ensemble: EnsembleConfig,
    pub bootstrap: BootstrapConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            out: PathBuf::from("out"),
            lob: LineOfBusiness::CA,
            kind: KindChoice::Paid,
            model: ModelChoice::Both,
            companies: "all".into(),
            company_list: None,
            seed: None,
            net_bulk: true,
            alpha: 0.995,
            factor_rows: FactorRows::default(),
            ensemble: EnsembleConfig::default(),
            bootstrap: BootstrapConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Missing(format!("config file {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("cannot print config: {e}")))
    }

    /// Copy with the master seed pushed into every random consumer. Fails
    /// when no seed was given.
    pub fn seeded(&self, command: &str) -> Result<RunConfig, CliError> {
        let seed = self
            .seed
            .ok_or_else(|| CliError::Usage(format!("`{command}` needs a master seed (--seed N or `seed` in the config file)")))?;
        let mut c = self.clone();
        c.ensemble.seed = seed;
        c.bootstrap.seed = seed;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.ensemble.validate()?;
        if self.bootstrap.n_sims == 0 {
            return Err(CliError::Usage("sims must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Usage(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}
