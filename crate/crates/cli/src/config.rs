//! Run configuration: a TOML document describing the design and how to run it.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use multibeam::array::{ArrayGeometry, BeamDirection, BitDepth, QuantizationScheme};
use multibeam::pattern::{AngularGrid, EvalPath};
use multibeam::synthesis::{BeamRequest, DesignMode, DesignSpec, GeometrySpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_TOLERANCE_DB: f64 = 0.5;
pub const DEFAULT_OUTPUT_DIR: &str = "out";
pub const DEFAULT_SWEEP_LENGTHS: [f64; 4] = [3.0, 5.0, 8.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub array: ArraySection,
    #[serde(rename = "beam", default)]
    pub beams: Vec<BeamSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantization: Option<QuantizationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(rename = "error_case", default, skip_serializing_if = "Vec::is_empty")]
    pub error_cases: Vec<ErrorCaseSection>,
    /// Written into plan files for reference; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<ResolvedSection>,
    /// Written into plan files for reference; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excitation: Option<ExcitationSection>,
}

/// `n` for a square array, or `n_x` and `n_y`; neither when the size is to be solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_y: Option<usize>,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub theta_deg: f64,
    pub phi_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directivity_dbi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<bool>,
}

/// Either a bit count or the word `"continuous"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BitsValue {
    Bits(u8),
    Word(Continuous),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuous {
    Continuous,
}

impl BitsValue {
    pub const CONTINUOUS: Self = BitsValue::Word(Continuous::Continuous);

    pub fn depth(self) -> Result<BitDepth> {
        match self {
            BitsValue::Bits(b) => BitDepth::bits(b).map_err(|e| CliError::Config(e.to_string())),
            BitsValue::Word(_) => Ok(BitDepth::Continuous),
        }
    }

    pub fn from_depth(depth: BitDepth) -> Self {
        match depth {
            BitDepth::Continuous => Self::CONTINUOUS,
            BitDepth::Bits(b) => BitsValue::Bits(b),
        }
    }
}

impl FromStr for BitsValue {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "continuous" {
            return Ok(Self::CONTINUOUS);
        }
        s.parse::<u8>()
            .map(BitsValue::Bits)
            .map_err(|_| format!("expected a bit count or \"continuous\", got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizationSection {
    #[serde(default = "continuous_bits")]
    pub phase_bits: BitsValue,
    #[serde(default = "continuous_bits")]
    pub amplitude_bits: BitsValue,
}

fn continuous_bits() -> BitsValue {
    BitsValue::CONTINUOUS
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_step_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_step_deg: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeValue {
    Strict,
    Permissive,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fast_path: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation_beamwidths: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths_wavelengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<Vec<BitsValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorCaseSection {
    pub label: String,
    pub beams: Vec<CaseBeam>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseBeam {
    pub theta_deg: f64,
    pub phi_deg: f64,
    #[serde(default = "unit")]
    pub coefficient: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedSection {
    pub n_x: usize,
    pub n_y: usize,
    pub length_wavelengths: f64,
    pub dmax_dbi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unrounded_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_beam: Option<usize>,
    pub coefficients: Vec<f64>,
    pub predicted_dbi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Per-element tables of the fielded map, indexed `[m][n]` (x index, then y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationSection {
    pub quantized: bool,
    pub amplitude: Vec<Vec<f64>>,
    pub phase_rad: Vec<Vec<f64>>,
}

/// Command-line settings that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tolerance_db: Option<f64>,
    pub grid_step_deg: Option<f64>,
    pub mode: Option<DesignMode>,
    pub fast_path: Option<bool>,
    pub phi_deg: Vec<f64>,
}

/// Fully validated settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub spec: DesignSpec,
    pub grid: AngularGrid,
    pub path: EvalPath,
    pub tolerance_db: f64,
    pub out_dir: PathBuf,
    /// Empty means one cut per distinct beam azimuth.
    pub cut_phis_deg: Vec<f64>,
    pub cut_step_deg: f64,
    pub sweep_lengths: Vec<f64>,
    pub sweep_bits: Vec<BitDepth>,
    pub error_cases: Vec<ErrorCaseSection>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        text.parse()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    pub fn geometry_spec(&self) -> Result<GeometrySpec> {
        let a = &self.array;
        let sized = |n_x, n_y| {
            ArrayGeometry::new(n_x, n_y, a.spacing)
                .map(GeometrySpec::Fixed)
                .map_err(|e| config_err(format!("[array]: {e}")))
        };
        match (a.n, a.n_x, a.n_y) {
            (Some(n), None, None) => sized(n, n),
            (None, Some(n_x), Some(n_y)) => sized(n_x, n_y),
            (None, None, None) => {
                if !(a.spacing.is_finite() && a.spacing > 0.0) {
                    return Err(config_err(format!(
                        "[array]: spacing must be positive (got {})",
                        a.spacing
                    )));
                }
                Ok(GeometrySpec::Unknown { spacing: a.spacing })
            }
            (Some(_), _, _) => Err(config_err(
                "[array]: give either n or n_x and n_y, not both",
            )),
            _ => Err(config_err("[array]: n_x and n_y must be given together")),
        }
    }

    pub fn beam_requests(&self) -> Result<Vec<BeamRequest>> {
        if self.beams.is_empty() {
            return Err(config_err("at least one [[beam]] is required"));
        }
        self.beams
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let dir = BeamDirection::new(b.theta_deg, b.phi_deg)
                    .map_err(|e| config_err(format!("beam {i}: {e}")))?;
                match (b.directivity_dbi, b.coefficient, b.free) {
                    (Some(dbi), None, None | Some(false)) => Ok(BeamRequest::directivity(dir, dbi)),
                    (None, Some(a), None | Some(false)) => Ok(BeamRequest::coefficient(dir, a)),
                    (None, None, Some(true)) => Ok(BeamRequest::free(dir)),
                    _ => Err(config_err(format!(
                        "beam {i}: give exactly one of directivity_dbi, coefficient or free = true"
                    ))),
                }
            })
            .collect()
    }

    pub fn quantization_scheme(&self) -> Result<QuantizationScheme> {
        match self.quantization {
            None => Ok(QuantizationScheme::CONTINUOUS),
            Some(q) => Ok(QuantizationScheme {
                phase: q.phase_bits.depth()?,
                amplitude: q.amplitude_bits.depth()?,
            }),
        }
    }

    pub fn settings(&self, overrides: &Overrides) -> Result<Settings> {
        let run = self.run.unwrap_or_default();
        let mode = match (overrides.mode, run.mode) {
            (Some(m), _) => m,
            (None, Some(ModeValue::Permissive)) => DesignMode::Permissive,
            (None, _) => DesignMode::Strict,
        };
        let mut spec = DesignSpec::new(self.geometry_spec()?, self.beam_requests()?)
            .with_quantization(self.quantization_scheme()?)
            .with_mode(mode);
        if let Some(s) = run.min_separation_beamwidths {
            spec.min_separation_beamwidths = s;
        }

        let g = self.grid.unwrap_or_default();
        let base = overrides
            .grid_step_deg
            .or(g.step_deg)
            .unwrap_or(AngularGrid::DEFAULT_STEP_DEG);
        let (theta_step, phi_step) = if overrides.grid_step_deg.is_some() {
            (base, base)
        } else {
            (
                g.theta_step_deg.unwrap_or(base),
                g.phi_step_deg.unwrap_or(base),
            )
        };
        let grid = AngularGrid::new(theta_step, phi_step)
            .map_err(|e| config_err(format!("[grid]: {e}")))?;

        let tolerance_db = overrides
            .tolerance_db
            .or(run.tolerance_db)
            .unwrap_or(DEFAULT_TOLERANCE_DB);
        if !(tolerance_db.is_finite() && tolerance_db >= 0.0) {
            return Err(config_err(format!(
                "tolerance must be a non-negative number of dB (got {tolerance_db})"
            )));
        }
        let path = if overrides.fast_path.or(run.fast_path).unwrap_or(false) {
            EvalPath::Spectral
        } else {
            EvalPath::Direct
        };

        let out_dir = overrides
            .out
            .clone()
            .or_else(|| self.output.as_ref().and_then(|o| o.dir.clone()))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

        let cut = self.cut.clone().unwrap_or_default();
        let cut_phis_deg = if overrides.phi_deg.is_empty() {
            cut.phi_deg.unwrap_or_default()
        } else {
            overrides.phi_deg.clone()
        };
        if let Some(p) = cut_phis_deg.iter().find(|p| !p.is_finite()) {
            return Err(config_err(format!("cut azimuth must be finite (got {p})")));
        }
        let cut_step_deg = cut.step_deg.unwrap_or(theta_step);
        let cut_intervals = 180.0 / cut_step_deg;
        if !(cut_step_deg > 0.0 && (cut_intervals - cut_intervals.round()).abs() < 1e-9) {
            return Err(config_err(format!(
                "[cut]: step_deg must divide 180 (got {cut_step_deg})"
            )));
        }

        let sweep = self.sweep.clone().unwrap_or_default();
        let sweep_lengths = sweep
            .lengths_wavelengths
            .unwrap_or_else(|| DEFAULT_SWEEP_LENGTHS.to_vec());
        if let Some(l) = sweep_lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(config_err(format!(
                "[sweep]: lengths must be positive (got {l})"
            )));
        }
        let sweep_bits = sweep
            .bits
            .unwrap_or_else(|| {
                vec![
                    BitsValue::Bits(2),
                    BitsValue::Bits(3),
                    BitsValue::CONTINUOUS,
                ]
            })
            .into_iter()
            .map(BitsValue::depth)
            .collect::<Result<Vec<_>>>()?;

        for case in &self.error_cases {
            if case.beams.is_empty() {
                return Err(config_err(format!(
                    "error case {:?} has no beams",
                    case.label
                )));
            }
        }

        Ok(Settings {
            spec,
            grid,
            path,
            tolerance_db,
            out_dir,
            cut_phis_deg,
            cut_step_deg,
            sweep_lengths,
            sweep_bits,
            error_cases: self.error_cases.clone(),
        })
    }
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| config_err(e.to_string()))
    }
}
