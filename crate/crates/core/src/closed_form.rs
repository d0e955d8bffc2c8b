//! Closed-form directivity predictors for large planar arrays radiating
//! several pencil beams from a coefficient-weighted superposition of
//! gradient-phase excitations.
//!
//! All lengths are in wavelengths and all directivities are linear unless a
//! name says `dbi`. Each beam consumes a share of the aperture budget
//! `Dmax = 4π·L²`: a beam scanned to θ costs `D/cosθ`, an end-fire beam costs
//! `D·(4/3)·sqrt(L/2)`.

use std::f64::consts::PI;

use crate::array::{ArrayGeometry, BeamDirection};
use crate::error::{Error, Result};

/// Tolerance, in degrees, within which a scan angle counts as sitting on the limit.
pub const SCAN_LIMIT_TOLERANCE_DEG: f64 = 1e-9;

pub fn to_dbi(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_dbi(dbi: f64) -> f64 {
    10f64.powf(dbi / 10.0)
}

/// Peak directivity of a uniformly excited square aperture of side `L`, 4π(L/λ)².
pub fn dmax(length_wavelengths: f64) -> f64 {
    4.0 * PI * length_wavelengths * length_wavelengths
}

/// Aperture quantities shared by the predictors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureSummary {
    pub length_wavelengths: f64,
    pub dmax_linear: f64,
    pub dx_linear: f64,
    pub dy_linear: f64,
}

impl ApertureSummary {
    pub fn square(length_wavelengths: f64) -> Result<Self> {
        Self::rectangular(length_wavelengths, length_wavelengths)
    }

    /// `L = sqrt(L_x·L_y)`, `D_x = 2L_x`, `D_y = 2L_y`, `Dmax = π·D_x·D_y`.
    pub fn rectangular(length_x: f64, length_y: f64) -> Result<Self> {
        if !(length_x.is_finite() && length_x > 0.0 && length_y.is_finite() && length_y > 0.0) {
            return Err(Error::InvalidInput(format!(
                "aperture sides must be positive (got {length_x} x {length_y})"
            )));
        }
        let dx = 2.0 * length_x;
        let dy = 2.0 * length_y;
        Ok(Self {
            length_wavelengths: (length_x * length_y).sqrt(),
            dmax_linear: PI * dx * dy,
            dx_linear: dx,
            dy_linear: dy,
        })
    }

    pub fn of(geometry: &ArrayGeometry) -> Self {
        Self::rectangular(geometry.length_x(), geometry.length_y())
            .expect("geometry lengths are positive")
    }
}

/// Where a scan angle sits relative to the maximum scan angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanStatus {
    Within,
    AtLimit { limit_deg: f64 },
    Beyond { limit_deg: f64 },
}

/// Largest polar angle, in degrees, for which the `1/cosθ` power scaling
/// holds: `arccos(sqrt(9/(8L)))`.
pub fn max_scan_angle(length_wavelengths: f64) -> Result<f64> {
    if !(length_wavelengths.is_finite() && length_wavelengths >= 9.0 / 8.0) {
        return Err(Error::NoScanRange { length_wavelengths });
    }
    Ok((9.0 / (8.0 * length_wavelengths))
        .sqrt()
        .acos()
        .to_degrees())
}

/// Broadside is always within range; any other angle is compared with
/// [`max_scan_angle`].
pub fn scan_status(theta_deg: f64, length_wavelengths: f64) -> Result<ScanStatus> {
    if theta_deg == 0.0 {
        return Ok(ScanStatus::Within);
    }
    let limit_deg = max_scan_angle(length_wavelengths)?;
    Ok(
        if (theta_deg - limit_deg).abs() <= SCAN_LIMIT_TOLERANCE_DEG {
            ScanStatus::AtLimit { limit_deg }
        } else if theta_deg > limit_deg {
            ScanStatus::Beyond { limit_deg }
        } else {
            ScanStatus::Within
        },
    )
}

/// Single-beam scanned-array directivity `π·D_x·D_y·cosθ = Dmax·cosθ`.
pub fn elliott_directivity(theta_deg: f64, length_wavelengths: f64) -> Result<f64> {
    if let ScanStatus::Beyond { limit_deg } = scan_status(theta_deg, length_wavelengths)? {
        return Err(Error::ScanLimit {
            theta_deg,
            limit_deg,
            length_wavelengths,
        });
    }
    let aperture = ApertureSummary::square(length_wavelengths)?;
    Ok(PI * aperture.dx_linear * aperture.dy_linear * theta_deg.to_radians().cos())
}

/// Ratio of the power radiated by an end-fire beam to that of a broadside
/// beam, `(4/3)·sqrt(L/(2λ))`. `length_wavelengths` must be positive.
pub fn endfire_power_factor(length_wavelengths: f64) -> f64 {
    debug_assert!(length_wavelengths > 0.0);
    4.0 / 3.0 * (length_wavelengths / 2.0).sqrt()
}

/// Budget cost per unit directivity of a beam toward `dir`:
/// `1/cosθ` for scanned beams, the end-fire power factor at θ = 90°.
pub fn budget_weight(dir: &BeamDirection, length_wavelengths: f64) -> f64 {
    if dir.is_endfire() {
        endfire_power_factor(length_wavelengths)
    } else {
        1.0 / dir.theta_rad().cos()
    }
}

/// One resolved beam of a multibeam design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPlanEntry {
    pub direction: BeamDirection,
    pub coefficient: f64,
    pub directivity_linear: f64,
    pub endfire: bool,
}

impl BeamPlanEntry {
    pub fn new(
        direction: BeamDirection,
        coefficient: f64,
        directivity_linear: f64,
    ) -> Result<Self> {
        if !(coefficient.is_finite() && coefficient >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "coefficient must be finite and non-negative (got {coefficient})"
            )));
        }
        if !(directivity_linear.is_finite() && directivity_linear >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "directivity must be finite and non-negative (got {directivity_linear})"
            )));
        }
        Ok(Self {
            direction,
            coefficient,
            directivity_linear,
            endfire: direction.is_endfire(),
        })
    }

    pub fn directivity_dbi(&self) -> f64 {
        to_dbi(self.directivity_linear)
    }
}

fn validate_coefficients(entries: &[(BeamDirection, f64)]) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::InvalidInput("at least one beam is required".into()));
    }
    if let Some((_, a)) = entries.iter().find(|(_, a)| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "coefficients must be finite and non-negative (got {a})"
        )));
    }
    if entries.iter().all(|(_, a)| *a == 0.0) {
        return Err(Error::InvalidInput("all coefficients are zero".into()));
    }
    Ok(())
}

fn predict_weighted(entries: &[(BeamDirection, f64)], length_wavelengths: f64) -> Vec<f64> {
    let total: f64 = entries
        .iter()
        .map(|(dir, a)| a * a * budget_weight(dir, length_wavelengths))
        .sum();
    let d = dmax(length_wavelengths);
    entries.iter().map(|(_, a)| a * a * d / total).collect()
}

/// Directivity of each beam, `D_i = a_i² · Dmax / Σ_k (a_k² / cosθ_k)`.
///
/// End-fire beams must go through [`predict_with_endfire`].
pub fn predict_multibeam(
    entries: &[(BeamDirection, f64)],
    length_wavelengths: f64,
) -> Result<Vec<f64>> {
    validate_coefficients(entries)?;
    validate_length(length_wavelengths)?;
    if let Some(i) = entries.iter().position(|(dir, _)| dir.is_endfire()) {
        return Err(Error::InvalidInput(format!(
            "beam {i} points end-fire; use predict_with_endfire"
        )));
    }
    Ok(predict_weighted(entries, length_wavelengths))
}

/// As [`predict_multibeam`], with end-fire beams costing
/// `(4/3)·a²·sqrt(L/2)` of the budget instead of `a²/cosθ`.
pub fn predict_with_endfire(
    entries: &[(BeamDirection, f64)],
    length_wavelengths: f64,
) -> Result<Vec<f64>> {
    validate_coefficients(entries)?;
    validate_length(length_wavelengths)?;
    Ok(predict_weighted(entries, length_wavelengths))
}

fn validate_length(length_wavelengths: f64) -> Result<()> {
    if length_wavelengths.is_finite() && length_wavelengths > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "aperture length must be positive (got {length_wavelengths})"
        )))
    }
}

/// Coefficients with `a_i / a_j = sqrt(D_i / D_j)`, normalized so the largest is 1.
pub fn coefficients_from_directivities(directivities: &[f64]) -> Result<Vec<f64>> {
    if directivities.is_empty() {
        return Err(Error::InvalidInput(
            "at least one directivity is required".into(),
        ));
    }
    if let Some(d) = directivities.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "directivities must be positive (got {d})"
        )));
    }
    let peak = directivities.iter().copied().fold(0.0, f64::max);
    Ok(directivities.iter().map(|d| (d / peak).sqrt()).collect())
}

fn validate_targets(directivities: &[f64], count: usize) -> Result<()> {
    if directivities.len() != count {
        return Err(Error::DimensionMismatch(format!(
            "{} directivities but {} angles",
            directivities.len(),
            count
        )));
    }
    if directivities.is_empty() {
        return Err(Error::InvalidInput("at least one beam is required".into()));
    }
    if let Some(d) = directivities
        .iter()
        .find(|d| !(d.is_finite() && **d >= 0.0))
    {
        return Err(Error::InvalidInput(format!(
            "directivities must be non-negative (got {d})"
        )));
    }
    Ok(())
}

/// Aperture budget `Σ D_k / cosθ_k` needed to radiate the given directivities.
pub fn dmax_from_directivities(directivities: &[f64], thetas_deg: &[f64]) -> Result<f64> {
    validate_targets(directivities, thetas_deg.len())?;
    let mut total = 0.0;
    for (i, (&d, &theta)) in directivities.iter().zip(thetas_deg).enumerate() {
        if !(theta.is_finite() && (0.0..90.0).contains(&theta)) {
            return Err(Error::InvalidInput(format!(
                "beam {i}: theta {theta} deg must lie in [0, 90); end-fire beams need the end-fire budget"
            )));
        }
        total += d / theta.to_radians().cos();
    }
    Ok(total)
}

/// Element count per side of a square array, together with the unrounded value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementCount {
    pub n: usize,
    pub unrounded: f64,
}

impl ElementCount {
    fn from_length(length_wavelengths: f64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidInput(format!(
                "element spacing must be positive (got {spacing})"
            )));
        }
        let unrounded = length_wavelengths / spacing;
        Ok(Self {
            n: (unrounded.round() as usize).max(1),
            unrounded,
        })
    }
}

/// Side element count `N = (λ/d)·sqrt((1/4π)·Σ D_k/cosθ_k)`, rounded to the nearest integer.
pub fn required_elements(
    directivities: &[f64],
    thetas_deg: &[f64],
    spacing: f64,
) -> Result<ElementCount> {
    let budget = dmax_from_directivities(directivities, thetas_deg)?;
    ElementCount::from_length((budget / (4.0 * PI)).sqrt(), spacing)
}

/// Square aperture side `L` whose budget exactly covers the requested
/// directivities, end-fire beams included.
///
/// Solves `4πL² = Σ_scanned D_k/cosθ_k + (4/3)·sqrt(L/2)·Σ_endfire D_k`,
/// which has a single positive root.
pub fn required_length(directivities: &[f64], directions: &[BeamDirection]) -> Result<f64> {
    validate_targets(directivities, directions.len())?;
    let mut scanned = 0.0;
    let mut endfire = 0.0;
    for (d, dir) in directivities.iter().zip(directions) {
        if dir.is_endfire() {
            endfire += d;
        } else {
            scanned += d / dir.theta_rad().cos();
        }
    }
    if scanned == 0.0 && endfire == 0.0 {
        return Err(Error::InvalidInput("all directivities are zero".into()));
    }
    if endfire == 0.0 {
        return Ok((scanned / (4.0 * PI)).sqrt());
    }

    let residual = |l: f64| dmax(l) - scanned - endfire_power_factor(l) * endfire;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while residual(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Element count for [`required_length`], end-fire beams included.
pub fn required_elements_with_endfire(
    directivities: &[f64],
    directions: &[BeamDirection],
    spacing: f64,
) -> Result<ElementCount> {
    ElementCount::from_length(required_length(directivities, directions)?, spacing)
}
