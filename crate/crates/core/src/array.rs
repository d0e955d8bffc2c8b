//! Array geometry, per-element complex excitations, gradient-phase steering
//! maps, weighted superposition and phase/amplitude quantization.
//!
//! Elements sit on a uniform rectangular grid indexed `(m, n)` from the
//! corner element `(0, 0)`, which is also the phase reference. Distances are
//! in wavelengths throughout.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform rectangular lattice of `n_x × n_y` isotropic elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    n_x: usize,
    n_y: usize,
    spacing: f64,
}

impl ArrayGeometry {
    pub fn new(n_x: usize, n_y: usize, spacing: f64) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidInput(format!(
                "element counts must be at least 1 (got {n_x} x {n_y})"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidInput(format!(
                "element spacing must be positive and finite (got {spacing})"
            )));
        }
        Ok(Self { n_x, n_y, spacing })
    }

    /// Square `n × n` array.
    pub fn square(n: usize, spacing: f64) -> Result<Self> {
        Self::new(n, n, spacing)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// Inter-element spacing d/λ.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn element_count(&self) -> usize {
        self.n_x * self.n_y
    }

    /// Side length along x in wavelengths, `n_x · d`.
    pub fn length_x(&self) -> f64 {
        self.n_x as f64 * self.spacing
    }

    pub fn length_y(&self) -> f64 {
        self.n_y as f64 * self.spacing
    }

    /// Equivalent square side `sqrt(L_x · L_y)`; equals the side for square arrays.
    pub fn length(&self) -> f64 {
        (self.length_x() * self.length_y()).sqrt()
    }

    pub fn aperture_area(&self) -> f64 {
        self.length_x() * self.length_y()
    }

    /// Electrical spacing k·d = 2π·d/λ.
    pub fn kd(&self) -> f64 {
        TAU * self.spacing
    }

    /// Broadside directivity of the uniformly excited aperture, 4π·L_x·L_y/λ².
    pub fn dmax(&self) -> f64 {
        4.0 * PI * self.aperture_area()
    }
}

/// Beam direction: polar angle from broadside and azimuth, both in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamDirection {
    theta_deg: f64,
    phi_deg: f64,
}

impl BeamDirection {
    /// `theta_deg` must lie in [0, 90]; `phi_deg` is wrapped into [0, 360).
    pub fn new(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        if !(theta_deg.is_finite() && (0.0..=90.0).contains(&theta_deg)) {
            return Err(Error::InvalidInput(format!(
                "theta must lie in [0, 90] degrees (got {theta_deg})"
            )));
        }
        if !phi_deg.is_finite() {
            return Err(Error::InvalidInput(format!(
                "phi must be finite (got {phi_deg})"
            )));
        }
        let mut phi = phi_deg.rem_euclid(360.0);
        // rem_euclid can round up to exactly 360 for tiny negative inputs
        if phi >= 360.0 {
            phi = 0.0;
        }
        Ok(Self {
            theta_deg,
            phi_deg: phi,
        })
    }

    pub fn broadside() -> Self {
        Self {
            theta_deg: 0.0,
            phi_deg: 0.0,
        }
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_deg
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    pub fn phi_rad(&self) -> f64 {
        self.phi_deg.to_radians()
    }

    pub fn is_endfire(&self) -> bool {
        self.theta_deg == 90.0
    }

    /// Direction cosines `(u, v) = (sinθ cosφ, sinθ sinφ)`.
    pub fn direction_cosines(&self) -> (f64, f64) {
        let (st, _) = self.theta_rad().sin_cos();
        let (sp, cp) = self.phi_rad().sin_cos();
        (st * cp, st * sp)
    }

    /// Unit vector in array coordinates (z along broadside).
    pub fn unit_vector(&self) -> [f64; 3] {
        let (u, v) = self.direction_cosines();
        [u, v, self.theta_rad().cos()]
    }

    /// Great-circle angle to `other`, in radians.
    pub fn angular_separation(&self, other: &BeamDirection) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let cross_norm = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
        cross_norm.atan2(dot)
    }
}

/// Complex excitation of every element, stored row-major as `weights[m * n_y + n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationMap {
    geometry: ArrayGeometry,
    weights: Vec<Complex64>,
}

impl ExcitationMap {
    pub fn from_weights(geometry: ArrayGeometry, weights: Vec<Complex64>) -> Result<Self> {
        if weights.len() != geometry.element_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} weights for a {} x {} array, got {}",
                geometry.element_count(),
                geometry.n_x(),
                geometry.n_y(),
                weights.len()
            )));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| !(w.re.is_finite() && w.im.is_finite()))
        {
            return Err(Error::InvalidInput(format!("non-finite weight {w}")));
        }
        Ok(Self { geometry, weights })
    }

    /// Builds a map from amplitude and phase tables in the same row-major order.
    pub fn from_polar(geometry: ArrayGeometry, amplitudes: &[f64], phases: &[f64]) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes but {} phases",
                amplitudes.len(),
                phases.len()
            )));
        }
        if let Some(a) = amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "amplitudes must be finite and non-negative (got {a})"
            )));
        }
        let weights = amplitudes
            .iter()
            .zip(phases)
            .map(|(&a, &p)| Complex64::from_polar(a, p))
            .collect();
        Self::from_weights(geometry, weights)
    }

    /// Every element excited with the same complex weight.
    pub fn uniform(geometry: ArrayGeometry, weight: Complex64) -> Self {
        Self {
            geometry,
            weights: vec![weight; geometry.element_count()],
        }
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn weight(&self, m: usize, n: usize) -> Complex64 {
        self.weights[self.index(m, n)]
    }

    pub fn amplitude(&self, m: usize, n: usize) -> f64 {
        self.weight(m, n).norm()
    }

    /// Phase canonicalized to [0, 2π).
    pub fn phase(&self, m: usize, n: usize) -> f64 {
        canonical_phase(self.weight(m, n).arg())
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.norm()).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| canonical_phase(w.arg()))
            .collect()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.re == 0.0 && w.im == 0.0)
    }

    /// Every weight multiplied by the real factor `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            geometry: self.geometry,
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    fn index(&self, m: usize, n: usize) -> usize {
        assert!(
            m < self.geometry.n_x && n < self.geometry.n_y,
            "element ({m}, {n}) outside {} x {} array",
            self.geometry.n_x,
            self.geometry.n_y
        );
        m * self.geometry.n_y + n
    }
}

/// Maps any finite angle into [0, 2π).
pub fn canonical_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Resolution of one excitation component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Continuous,
    Bits(u8),
}

impl BitDepth {
    pub fn bits(bits: u8) -> Result<Self> {
        if (1..=16).contains(&bits) {
            Ok(BitDepth::Bits(bits))
        } else {
            Err(Error::InvalidInput(format!(
                "bit depth must lie in [1, 16] (got {bits})"
            )))
        }
    }

    pub fn levels(&self) -> Option<u32> {
        match self {
            BitDepth::Continuous => None,
            BitDepth::Bits(b) => Some(1u32 << b),
        }
    }
}

/// Independent bit depths for phase and amplitude. With `b` bits on both,
/// an element can take `2^b × 2^b` distinct states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizationScheme {
    pub phase: BitDepth,
    pub amplitude: BitDepth,
}

impl QuantizationScheme {
    pub const CONTINUOUS: Self = Self {
        phase: BitDepth::Continuous,
        amplitude: BitDepth::Continuous,
    };

    pub fn uniform(bits: u8) -> Result<Self> {
        let depth = BitDepth::bits(bits)?;
        Ok(Self {
            phase: depth,
            amplitude: depth,
        })
    }

    pub fn is_continuous(&self) -> bool {
        self.phase == BitDepth::Continuous && self.amplitude == BitDepth::Continuous
    }

    fn validate(&self) -> Result<()> {
        for depth in [self.phase, self.amplitude] {
            if let BitDepth::Bits(b) = depth {
                BitDepth::bits(b)?;
            }
        }
        Ok(())
    }
}

impl Default for QuantizationScheme {
    fn default() -> Self {
        Self::CONTINUOUS
    }
}

/// Unit-amplitude excitation with a linear phase gradient that steers the
/// array factor peak to `dir`.
///
/// `phase(m, n) = −2π·d·(m·sinθ·cosφ + n·sinθ·sinφ)`, canonicalized.
pub fn gradient_phase_excitation(geometry: &ArrayGeometry, dir: BeamDirection) -> ExcitationMap {
    let (u, v) = dir.direction_cosines();
    let kd = geometry.kd();
    let mut weights = Vec::with_capacity(geometry.element_count());
    for m in 0..geometry.n_x() {
        for n in 0..geometry.n_y() {
            let phase = canonical_phase(-kd * (m as f64 * u + n as f64 * v));
            weights.push(Complex64::from_polar(1.0, phase));
        }
    }
    ExcitationMap {
        geometry: *geometry,
        weights,
    }
}

/// Weighted sum `Σ a_i · w_i(m, n)`; the amplitude and phase of the result
/// are the `b` and `φ_T` of the superimposed array.
pub fn superpose(parts: &[ExcitationMap], coefficients: &[f64]) -> Result<ExcitationMap> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidInput("superposition needs at least one part".into()))?;
    if parts.len() != coefficients.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parts but {} coefficients",
            parts.len(),
            coefficients.len()
        )));
    }
    if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite coefficient {c}")));
    }
    let geometry = first.geometry;
    if let Some(i) = parts.iter().position(|p| p.geometry != geometry) {
        return Err(Error::DimensionMismatch(format!(
            "part {i} has a different geometry from part 0"
        )));
    }

    let mut weights = vec![Complex64::new(0.0, 0.0); geometry.element_count()];
    for (part, &a) in parts.iter().zip(coefficients) {
        for (acc, w) in weights.iter_mut().zip(&part.weights) {
            *acc += w * a;
        }
    }
    Ok(ExcitationMap { geometry, weights })
}

/// Snaps phases and amplitudes to uniform levels.
///
/// Phases go to the nearest multiple of `2π / 2^bits` (midpoints round
/// down, 2π wraps to 0). Amplitudes are divided by the map's peak amplitude
/// and snapped to the nearest of `2^bits` levels spanning [0, 1]; the
/// original peak is not restored. A `Continuous` component is left as is.
pub fn quantize(map: &ExcitationMap, scheme: QuantizationScheme) -> Result<ExcitationMap> {
    scheme.validate()?;
    if scheme.is_continuous() {
        return Ok(map.clone());
    }
    let peak = map.max_amplitude();
    if peak == 0.0 {
        return Err(Error::InvalidInput(
            "cannot quantize an all-zero excitation map".into(),
        ));
    }

    let weights = map
        .weights
        .iter()
        .map(|w| {
            let phase = canonical_phase(w.arg());
            let phase = match scheme.phase.levels() {
                None => phase,
                Some(levels) => quantize_phase(phase, levels),
            };
            let amplitude = match scheme.amplitude.levels() {
                None => w.norm(),
                Some(levels) => quantize_unit(w.norm() / peak, levels),
            };
            Complex64::from_polar(amplitude, phase)
        })
        .collect();
    Ok(ExcitationMap {
        geometry: map.geometry,
        weights,
    })
}

fn round_half_down(x: f64) -> f64 {
    (x - 0.5).ceil()
}

fn quantize_phase(phase: f64, levels: u32) -> f64 {
    let step = TAU / levels as f64;
    let k = round_half_down(phase / step) as i64;
    k.rem_euclid(levels as i64) as f64 * step
}

fn quantize_unit(x: f64, levels: u32) -> f64 {
    let top = (levels - 1) as f64;
    round_half_down(x.clamp(0.0, 1.0) * top) / top
}
