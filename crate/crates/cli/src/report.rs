use serde::Serialize;
use serde_json::Value;

use volmin::cone::{GoodnessReport, MomentCone};
use volmin::functionals::ObstructionReport;
use volmin::optimizer::{ExactCertificate, GridCertificate, MinimizationResult};
use volmin::Error;

pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const INVALID_CONE: u8 = 2;
    pub const NO_GAMMA: u8 = 3;
    pub const HYPOTHESIS_FAILS: u8 = 4;
    pub const DIVERGED: u8 = 5;
    pub const UNKNOWN: u8 = 6;
    pub const ORACLE_DISAGREES: u8 = 7;
    pub const USAGE: u8 = 64;
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: Tool,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodness: Option<Goodness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimization: Option<MinimizationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_certificate: Option<ExactCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_certificate: Option<GridCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twist: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Diagnostic>,
}

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Default, Serialize)]
pub struct InputEcho {
    pub cone_file: String,
    pub dim: usize,
    pub facet_normals: Vec<Vec<i64>>,
    pub rays: Vec<Vec<i64>>,
    pub warnings: Vec<String>,
    pub gamma: Option<Vec<String>>,
    pub origin: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionEcho>,
}

#[derive(Debug, Serialize)]
pub struct DecompositionEcho {
    pub file: String,
    pub base_reeb: Vec<String>,
    pub k: usize,
}

#[derive(Debug, Serialize)]
pub struct Goodness {
    pub good: bool,
    pub good_away_from_apex: bool,
    pub worst_divisor: String,
    pub faces: Vec<volmin::cone::FaceVerdict>,
}

impl From<GoodnessReport> for Goodness {
    fn from(g: GoodnessReport) -> Self {
        Goodness {
            good: g.good,
            good_away_from_apex: g.good_away_from_apex,
            worst_divisor: g.worst_divisor().to_string(),
            faces: g.faces,
        }
    }
}

impl InputEcho {
    pub fn of_cone(path: &str, c: &MomentCone) -> Self {
        InputEcho {
            cone_file: path.to_string(),
            dim: c.dim(),
            facet_normals: c.normals().iter().map(volmin::cone::to_i64s).collect(),
            rays: c.rays().iter().map(volmin::cone::to_i64s).collect(),
            warnings: c.warnings().to_vec(),
            ..Default::default()
        }
    }
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            tool: Tool { name: "volmin", version: env!("CARGO_PKG_VERSION") },
            command: command.to_string(),
            input: None,
            goodness: None,
            minimization: None,
            obstruction: None,
            exact_certificate: None,
            grid_certificate: None,
            oracle: None,
            twist: None,
            timing_ms: None,
            exit_code: exit::OK,
            error: None,
        }
    }

    pub fn fail_with(&mut self, kind: &str, message: String, code: u8) {
        self.error = Some(Diagnostic { kind: kind.to_string(), message });
        self.exit_code = code;
    }
}

pub fn exit_code_of(e: &Error) -> u8 {
    match e {
        e if e.is_invalid_cone() => exit::INVALID_CONE,
        Error::NoCalabiYauVector | Error::AmbiguousGamma => exit::NO_GAMMA,
        _ => exit::OTHER,
    }
}
