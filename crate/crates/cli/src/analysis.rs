//! Cuts and parameter sweeps built on the planner and the directivity oracle.

use multibeam::array::{
    gradient_phase_excitation, ArrayGeometry, BeamDirection, BitDepth, QuantizationScheme,
};
use multibeam::pattern::{
    cross_term_powers, AngularGrid, DirectivityOracle, DirectivityReport, EvalPath,
};
use multibeam::synthesis::{
    plan, verify, BeamRequest, BeamTarget, DesignMode, DesignSpec, GeometrySpec, SynthesisPlan,
    VerifyOptions,
};

use crate::config::ErrorCaseSection;
use crate::error::Result;

/// One point of a φ = const cut. Negative angles lie on the φ + 180° half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoint {
    pub angle_deg: f64,
    pub directivity_linear: f64,
}

/// Directivity along the great circle through broadside at azimuth `phi_deg`,
/// from −90° to 90° in steps of `step_deg`.
pub fn cut(oracle: &DirectivityOracle, phi_deg: f64, step_deg: f64) -> Result<Vec<CutPoint>> {
    let intervals = (180.0 / step_deg).round() as usize;
    (0..=intervals)
        .map(|k| {
            let angle_deg = -90.0 + k as f64 * step_deg;
            let dir = if angle_deg < 0.0 {
                BeamDirection::new(-angle_deg, phi_deg + 180.0)?
            } else {
                BeamDirection::new(angle_deg, phi_deg)?
            };
            Ok(CutPoint {
                angle_deg,
                directivity_linear: oracle.directivity(dir),
            })
        })
        .collect()
}

/// Distinct beam azimuths of a plan, in beam order.
pub fn beam_azimuths(plan: &SynthesisPlan) -> Vec<f64> {
    let mut phis: Vec<f64> = Vec::new();
    for e in &plan.entries {
        let p = e.direction.phi_deg();
        if !phis.contains(&p) {
            phis.push(p);
        }
    }
    phis
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthCase {
    pub length_wavelengths: f64,
    pub n: usize,
    pub report: DirectivityReport,
}

/// Superposition coefficients of a design: taken as given in coefficient
/// mode, otherwise from planning the design itself.
fn design_coefficients(spec: &DesignSpec) -> Result<Vec<f64>> {
    let given: Option<Vec<f64>> = spec
        .beams
        .iter()
        .map(|b| match b.target {
            BeamTarget::Coefficient(a) => Some(a),
            _ => None,
        })
        .collect();
    match given {
        Some(a) => Ok(a),
        None => Ok(plan(spec)?.coefficients()),
    }
}

fn spacing_of(spec: &GeometrySpec) -> f64 {
    match spec {
        GeometrySpec::Fixed(g) => g.spacing(),
        GeometrySpec::Unknown { spacing } => *spacing,
    }
}

/// Re-verifies the design's coefficients on square arrays of side
/// `round(L/d)` for each `L`. Layout checks only warn here.
pub fn length_sweep(
    spec: &DesignSpec,
    lengths_wavelengths: &[f64],
    grid: &AngularGrid,
    path: EvalPath,
) -> Result<Vec<LengthCase>> {
    let coefficients = design_coefficients(spec)?;
    let spacing = spacing_of(&spec.geometry);
    lengths_wavelengths
        .iter()
        .map(|&l| {
            let n = ((l / spacing).round() as usize).max(1);
            let beams = spec
                .beams
                .iter()
                .zip(&coefficients)
                .map(|(b, a)| BeamRequest::coefficient(b.direction, *a))
                .collect();
            let mut case = DesignSpec::new(
                GeometrySpec::Fixed(ArrayGeometry::square(n, spacing)?),
                beams,
            )
            .with_quantization(spec.quantization)
            .with_mode(DesignMode::Permissive);
            case.min_separation_beamwidths = spec.min_separation_beamwidths;
            let p = plan(&case)?;
            let report = verify(
                &p,
                grid,
                VerifyOptions {
                    path,
                    ..VerifyOptions::default()
                },
            )?;
            Ok(LengthCase {
                length_wavelengths: l,
                n,
                report,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantCase {
    pub depth: BitDepth,
    pub report: DirectivityReport,
}

/// Re-plans the design with phase and amplitude both quantized to each depth.
pub fn quant_sweep(
    spec: &DesignSpec,
    depths: &[BitDepth],
    grid: &AngularGrid,
    path: EvalPath,
) -> Result<Vec<QuantCase>> {
    depths
        .iter()
        .map(|&depth| {
            let case = spec.clone().with_quantization(QuantizationScheme {
                phase: depth,
                amplitude: depth,
            });
            let report = verify(
                &plan(&case)?,
                grid,
                VerifyOptions {
                    path,
                    ..VerifyOptions::default()
                },
            )?;
            Ok(QuantCase { depth, report })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub label: String,
    pub beams: usize,
    pub exact_power: f64,
    pub approx_power: f64,
    pub relative_error: f64,
}

/// Cases used when the config lists none: each beam alone, then all beams
/// with the design's coefficients.
pub fn default_error_cases(spec: &DesignSpec) -> Result<Vec<ErrorCaseSection>> {
    use crate::config::CaseBeam;
    let as_case = |b: &BeamRequest, a: f64| CaseBeam {
        theta_deg: b.direction.theta_deg(),
        phi_deg: b.direction.phi_deg(),
        coefficient: a,
    };
    let mut cases: Vec<ErrorCaseSection> = spec
        .beams
        .iter()
        .enumerate()
        .map(|(i, b)| ErrorCaseSection {
            label: format!("beam {i}"),
            beams: vec![as_case(b, 1.0)],
        })
        .collect();
    if spec.beams.len() > 1 {
        let a = design_coefficients(spec)?;
        cases.push(ErrorCaseSection {
            label: "all beams".into(),
            beams: spec
                .beams
                .iter()
                .zip(&a)
                .map(|(b, a)| as_case(b, *a))
                .collect(),
        });
    }
    Ok(cases)
}

/// Relative error of the no-cross-term power estimate for each case on `geometry`.
pub fn error_table(
    geometry: &ArrayGeometry,
    cases: &[ErrorCaseSection],
    grid: &AngularGrid,
    path: EvalPath,
) -> Result<Vec<ErrorRow>> {
    cases
        .iter()
        .map(|case| {
            let parts = case
                .beams
                .iter()
                .map(|b| {
                    Ok(gradient_phase_excitation(
                        geometry,
                        BeamDirection::new(b.theta_deg, b.phi_deg)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let coefficients: Vec<f64> = case.beams.iter().map(|b| b.coefficient).collect();
            let powers = cross_term_powers(&parts, &coefficients, grid, path)?;
            Ok(ErrorRow {
                label: case.label.clone(),
                beams: parts.len(),
                exact_power: powers.exact,
                approx_power: powers.approx,
                relative_error: powers.relative_error(),
            })
        })
        .collect()
}

/// Geometry the error table runs on: the fixed array, or the resolved one.
pub fn design_geometry(spec: &DesignSpec) -> Result<ArrayGeometry> {
    match spec.geometry {
        GeometrySpec::Fixed(g) => Ok(g),
        GeometrySpec::Unknown { .. } => Ok(plan(spec)?.geometry),
    }
}
