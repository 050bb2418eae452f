use serde::{Deserialize, Serialize};

use reserving::macknet::{EnsembleDiagnostics, MackNetParameters};
use reserving::{CompletedSquare, LineOfBusiness, LossKind};

/// Classic Mack fit of one company and kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MackArtifact {
    pub company_code: String,
    pub line_of_business: LineOfBusiness,
    pub kind: LossKind,
    pub dev_factors: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub ultimates: Vec<f64>,
    pub reserve: f64,
}

/// Mack-Net fit: the averaged ensemble square and the parameters estimated
/// on it. Training traces go to a separate diagnostics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacknetArtifact {
    pub company_code: String,
    pub line_of_business: LineOfBusiness,
    pub kind: LossKind,
    pub dev_factors_p: Vec<f64>,
    pub sigma2_p: Vec<f64>,
    pub fbar: Vec<f64>,
    pub ultimates: Vec<f64>,
    pub reserve: f64,
    pub dbar: CompletedSquare,
}

impl MacknetArtifact {
    pub fn parameters(&self) -> MackNetParameters {
        MackNetParameters {
            dev_factors_p: self.dev_factors_p.clone(),
            sigma2_p: self.sigma2_p.clone(),
            fbar: self.fbar.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsArtifact {
    pub company_code: String,
    pub line_of_business: LineOfBusiness,
    #[serde(flatten)]
    pub diagnostics: EnsembleDiagnostics,
}
