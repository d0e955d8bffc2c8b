//! Design procedure: resolve the free unknown (one beam's directivity or the
//! array size), derive coefficients, superpose the steering maps, quantize,
//! and check the result against the directivity oracle.

use crate::array::{
    gradient_phase_excitation, quantize, superpose, ArrayGeometry, BeamDirection, ExcitationMap,
    QuantizationScheme,
};
use crate::closed_form::{
    budget_weight, coefficients_from_directivities, from_dbi, predict_with_endfire,
    required_elements_with_endfire, scan_status, to_dbi, ApertureSummary, BeamPlanEntry,
    ElementCount, ScanStatus,
};
use crate::error::{Error, Result};
use crate::pattern::{AngularGrid, BeamReport, DirectivityOracle, DirectivityReport, EvalPath};

/// Azimuths closer than this (degrees) count as the same.
const SAME_AZIMUTH_TOLERANCE_DEG: f64 = 1e-9;

/// What is known about one beam before planning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamTarget {
    /// Absolute directivity in dBi.
    DirectivityDbi(f64),
    /// Directivity to be solved from the aperture budget.
    Free,
    /// Superposition coefficient given directly.
    Coefficient(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamRequest {
    pub direction: BeamDirection,
    pub target: BeamTarget,
}

impl BeamRequest {
    pub fn directivity(direction: BeamDirection, dbi: f64) -> Self {
        Self {
            direction,
            target: BeamTarget::DirectivityDbi(dbi),
        }
    }

    pub fn free(direction: BeamDirection) -> Self {
        Self {
            direction,
            target: BeamTarget::Free,
        }
    }

    pub fn coefficient(direction: BeamDirection, a: f64) -> Self {
        Self {
            direction,
            target: BeamTarget::Coefficient(a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySpec {
    Fixed(ArrayGeometry),
    /// Square array of unknown size; only the spacing (d/λ) is fixed.
    Unknown {
        spacing: f64,
    },
}

/// Strict mode turns scan-limit, same-azimuth and separation problems into
/// errors; permissive mode records them as warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DesignMode {
    #[default]
    Strict,
    Permissive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    pub geometry: GeometrySpec,
    pub beams: Vec<BeamRequest>,
    pub quantization: QuantizationScheme,
    pub mode: DesignMode,
    /// Minimum great-circle separation between beams, in beamwidths of λ/L radians.
    pub min_separation_beamwidths: f64,
}

impl DesignSpec {
    pub const DEFAULT_MIN_SEPARATION_BEAMWIDTHS: f64 = 2.0;

    pub fn new(geometry: GeometrySpec, beams: Vec<BeamRequest>) -> Self {
        Self {
            geometry,
            beams,
            quantization: QuantizationScheme::CONTINUOUS,
            mode: DesignMode::Strict,
            min_separation_beamwidths: Self::DEFAULT_MIN_SEPARATION_BEAMWIDTHS,
        }
    }

    pub fn with_quantization(mut self, quantization: QuantizationScheme) -> Self {
        self.quantization = quantization;
        self
    }

    pub fn with_mode(mut self, mode: DesignMode) -> Self {
        self.mode = mode;
        self
    }
}

/// A resolved design.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPlan {
    pub geometry: ArrayGeometry,
    pub aperture: ApertureSummary,
    /// Per beam: direction, normalized coefficient and predicted directivity.
    pub entries: Vec<BeamPlanEntry>,
    /// Requested directivity per beam in dBi; the solved value for a free beam.
    pub targets_dbi: Vec<Option<f64>>,
    pub free_beam: Option<usize>,
    pub element_count: Option<ElementCount>,
    pub quantization: QuantizationScheme,
    pub continuous: ExcitationMap,
    pub quantized: Option<ExcitationMap>,
    pub warnings: Vec<String>,
}

impl SynthesisPlan {
    pub fn coefficients(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.coefficient).collect()
    }

    pub fn predicted_dbi(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.directivity_dbi()).collect()
    }

    /// The map that gets fed to the array: quantized when quantization is active.
    pub fn excitation(&self) -> &ExcitationMap {
        self.quantized.as_ref().unwrap_or(&self.continuous)
    }

    /// `Σ D_k·w_k` over the predicted directivities; equals Dmax.
    pub fn budget(&self) -> f64 {
        let l = self.aperture.length_wavelengths;
        self.entries
            .iter()
            .map(|e| e.directivity_linear * budget_weight(&e.direction, l))
            .sum()
    }
}

enum Resolution {
    Coefficients(Vec<f64>),
    Directivities(Vec<f64>),
}

/// Runs the design procedure on `spec`.
pub fn plan(spec: &DesignSpec) -> Result<SynthesisPlan> {
    if spec.beams.is_empty() {
        return Err(Error::InvalidInput(
            "a design needs at least one beam".into(),
        ));
    }
    if !(spec.min_separation_beamwidths.is_finite() && spec.min_separation_beamwidths >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "minimum separation must be non-negative (got {})",
            spec.min_separation_beamwidths
        )));
    }

    let count = |f: fn(&BeamTarget) -> bool| spec.beams.iter().filter(|b| f(&b.target)).count();
    let n_coef = count(|t| matches!(t, BeamTarget::Coefficient(_)));
    let n_free = count(|t| matches!(t, BeamTarget::Free));
    let directions: Vec<BeamDirection> = spec.beams.iter().map(|b| b.direction).collect();
    let mut warnings = Vec::new();

    if n_coef > 0 && n_coef < spec.beams.len() {
        return Err(Error::OverConstrained(
            "coefficients and directivities cannot be mixed in one design".into(),
        ));
    }

    let (geometry, resolution, free_beam, element_count) = if n_coef > 0 {
        let GeometrySpec::Fixed(geometry) = spec.geometry else {
            return Err(Error::UnderConstrained(
                "coefficient-mode designs need a fixed array geometry".into(),
            ));
        };
        let raw: Vec<f64> = spec
            .beams
            .iter()
            .map(|b| match b.target {
                BeamTarget::Coefficient(a) => a,
                _ => unreachable!(),
            })
            .collect();
        if let Some(a) = raw.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "coefficients must be finite and non-negative (got {a})"
            )));
        }
        let peak = raw.iter().copied().fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::InvalidInput("all coefficients are zero".into()));
        }
        let normalized = raw.iter().map(|a| a / peak).collect();
        (geometry, Resolution::Coefficients(normalized), None, None)
    } else {
        let mut targets = Vec::with_capacity(spec.beams.len());
        for b in &spec.beams {
            match b.target {
                BeamTarget::DirectivityDbi(dbi) if dbi.is_finite() => {
                    targets.push(Some(from_dbi(dbi)))
                }
                BeamTarget::DirectivityDbi(dbi) => {
                    return Err(Error::InvalidInput(format!(
                        "directivity must be finite (got {dbi} dBi)"
                    )))
                }
                _ => targets.push(None),
            }
        }
        match spec.geometry {
            GeometrySpec::Fixed(geometry) => {
                if n_free > 1 {
                    return Err(Error::UnderConstrained(format!(
                        "{n_free} free directivities with a fixed geometry; at most one can be solved"
                    )));
                }
                let aperture = ApertureSummary::of(&geometry);
                let l = aperture.length_wavelengths;
                let spent: f64 = targets
                    .iter()
                    .zip(&directions)
                    .filter_map(|(d, dir)| d.map(|d| d * budget_weight(dir, l)))
                    .sum();
                let free_beam = targets.iter().position(Option::is_none);
                let directivities = match free_beam {
                    Some(i) => {
                        let remaining = aperture.dmax_linear - spent;
                        if remaining <= 0.0 {
                            return Err(Error::Infeasible {
                                budget: spent,
                                dmax: aperture.dmax_linear,
                            });
                        }
                        let mut d: Vec<f64> = targets.iter().map(|t| t.unwrap_or(0.0)).collect();
                        d[i] = remaining / budget_weight(&directions[i], l);
                        d
                    }
                    None => {
                        if spent > aperture.dmax_linear * (1.0 + 1e-12) {
                            return Err(Error::Infeasible {
                                budget: spent,
                                dmax: aperture.dmax_linear,
                            });
                        }
                        if spent < aperture.dmax_linear * (1.0 - 1e-9) {
                            warnings.push(format!(
                                "targets use {:.4} of the aperture budget; predicted directivities exceed them by {:.3} dB",
                                spent / aperture.dmax_linear,
                                to_dbi(aperture.dmax_linear / spent)
                            ));
                        }
                        targets
                            .iter()
                            .map(|t| t.expect("all targets given"))
                            .collect()
                    }
                };
                (
                    geometry,
                    Resolution::Directivities(directivities),
                    free_beam,
                    None,
                )
            }
            GeometrySpec::Unknown { spacing } => {
                if n_free > 0 {
                    return Err(Error::UnderConstrained(
                        "every directivity must be given when the array size is unknown".into(),
                    ));
                }
                let d: Vec<f64> = targets
                    .iter()
                    .map(|t| t.expect("all targets given"))
                    .collect();
                let count = required_elements_with_endfire(&d, &directions, spacing)?;
                let geometry = ArrayGeometry::square(count.n, spacing)?;
                (geometry, Resolution::Directivities(d), None, Some(count))
            }
        }
    };

    let aperture = ApertureSummary::of(&geometry);
    let l = aperture.length_wavelengths;
    check_layout(&directions, l, spec, &mut warnings)?;

    let (coefficients, targets_dbi) = match resolution {
        Resolution::Coefficients(a) => (a, vec![None; directions.len()]),
        Resolution::Directivities(d) => {
            let a = coefficients_from_directivities(&d)?;
            (a, d.iter().map(|d| Some(to_dbi(*d))).collect())
        }
    };

    let weighted: Vec<(BeamDirection, f64)> = directions
        .iter()
        .copied()
        .zip(coefficients.iter().copied())
        .collect();
    let predicted = predict_with_endfire(&weighted, l)?;
    let entries = weighted
        .iter()
        .zip(&predicted)
        .map(|((dir, a), d)| BeamPlanEntry::new(*dir, *a, *d))
        .collect::<Result<Vec<_>>>()?;

    let parts: Vec<ExcitationMap> = directions
        .iter()
        .map(|dir| gradient_phase_excitation(&geometry, *dir))
        .collect();
    let continuous = superpose(&parts, &coefficients)?;
    let quantized = if spec.quantization.is_continuous() {
        None
    } else {
        Some(quantize(&continuous, spec.quantization)?)
    };

    Ok(SynthesisPlan {
        geometry,
        aperture,
        entries,
        targets_dbi,
        free_beam,
        element_count,
        quantization: spec.quantization,
        continuous,
        quantized,
        warnings,
    })
}

fn check_layout(
    directions: &[BeamDirection],
    length_wavelengths: f64,
    spec: &DesignSpec,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let strict = spec.mode == DesignMode::Strict;
    let violation = |err: Error, warnings: &mut Vec<String>| -> Result<()> {
        if strict {
            Err(err)
        } else {
            warnings.push(err.to_string());
            Ok(())
        }
    };

    for dir in directions.iter().filter(|d| !d.is_endfire()) {
        match scan_status(dir.theta_deg(), length_wavelengths) {
            Ok(ScanStatus::Within) => {}
            Ok(ScanStatus::AtLimit { limit_deg }) => warnings.push(format!(
                "beam at theta = {:.3} deg sits on the maximum scan angle {limit_deg:.3} deg",
                dir.theta_deg()
            )),
            Ok(ScanStatus::Beyond { limit_deg }) => violation(
                Error::ScanLimit {
                    theta_deg: dir.theta_deg(),
                    limit_deg,
                    length_wavelengths,
                },
                warnings,
            )?,
            Err(err) => violation(err, warnings)?,
        }
    }

    let required = spec.min_separation_beamwidths / length_wavelengths;
    for i in 0..directions.len() {
        for j in i + 1..directions.len() {
            let (a, b) = (directions[i], directions[j]);
            if a.theta_deg() > 0.0 && b.theta_deg() > 0.0 {
                let dphi = (a.phi_deg() - b.phi_deg()).abs();
                if dphi.min(360.0 - dphi) <= SAME_AZIMUTH_TOLERANCE_DEG {
                    violation(
                        Error::SameAzimuth {
                            first: i,
                            second: j,
                            phi_deg: a.phi_deg(),
                        },
                        warnings,
                    )?;
                }
            }
            let separation = a.angular_separation(&b);
            if separation < required {
                violation(
                    Error::BeamsTooClose {
                        first: i,
                        second: j,
                        separation_deg: separation.to_degrees(),
                        required_deg: required.to_degrees(),
                    },
                    warnings,
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub path: EvalPath,
    /// Peak search radius; defaults to half a beamwidth (0.5·λ/L rad), at
    /// least two grid steps.
    pub peak_radius_deg: Option<f64>,
}

/// Default peak search radius for a plan on a grid.
pub fn default_peak_radius_deg(plan: &SynthesisPlan, grid: &AngularGrid) -> f64 {
    let half_beamwidth = (0.5 / plan.aperture.length_wavelengths).to_degrees();
    half_beamwidth.max(2.0 * grid.theta_step_deg().max(grid.phi_step_deg()))
}

/// Locates each beam's peak on the excitation that would be fielded
/// (quantized if quantization is active) and compares the oracle
/// directivity there with the closed-form prediction.
pub fn verify(
    plan: &SynthesisPlan,
    grid: &AngularGrid,
    options: VerifyOptions,
) -> Result<DirectivityReport> {
    let oracle = DirectivityOracle::new(plan.excitation(), grid, options.path)?;
    let radius = options
        .peak_radius_deg
        .unwrap_or_else(|| default_peak_radius_deg(plan, grid));
    let beams = plan
        .entries
        .iter()
        .zip(&plan.targets_dbi)
        .map(|(entry, target)| {
            let (peak, power) = oracle.find_peak(entry.direction, radius)?;
            Ok(BeamReport::new(
                entry.direction,
                peak,
                oracle.directivity_from_power(power),
                entry.directivity_linear,
                *target,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectivityReport {
        beams,
        total_power: oracle.total_power(),
        quantized: plan.quantized.is_some(),
    })
}
