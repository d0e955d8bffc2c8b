//! Array factor evaluation over the upper hemisphere and the numerical
//! directivity oracle.
//!
//! The array factor of an excitation map is
//! `F(θ, φ) = Σ w(m, n) · exp(+j·2π·d·(m·u + n·v))` with
//! `u = sinθ cosφ`, `v = sinθ sinφ`. Directivity toward a direction is
//! `4π·|F|² / P`, where `P` integrates `|F|²·sinθ` over θ ∈ [0°, 90°],
//! φ ∈ [0°, 360°). Every closed-form prediction in this crate is checked
//! against that ratio.

mod report;
mod spectral;

pub use report::{BeamReport, DirectivityReport};

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::array::{superpose, BeamDirection, ExcitationMap};
use crate::error::{Error, Result};

/// Regular (θ, φ) sampling of the hemisphere. θ nodes include both 0° and
/// 90°; φ nodes cover [0°, 360°) without repeating 360°.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularGrid {
    theta_step_deg: f64,
    phi_step_deg: f64,
    theta_intervals: usize,
    phi_nodes: usize,
}

impl AngularGrid {
    pub const DEFAULT_STEP_DEG: f64 = 0.25;

    pub fn new(theta_step_deg: f64, phi_step_deg: f64) -> Result<Self> {
        let theta_intervals = whole_divisions(90.0, theta_step_deg, "theta")?;
        let phi_nodes = whole_divisions(360.0, phi_step_deg, "phi")?;
        Ok(Self {
            theta_step_deg,
            phi_step_deg,
            theta_intervals,
            phi_nodes,
        })
    }

    pub fn uniform(step_deg: f64) -> Result<Self> {
        Self::new(step_deg, step_deg)
    }

    pub fn theta_step_deg(&self) -> f64 {
        self.theta_step_deg
    }

    pub fn phi_step_deg(&self) -> f64 {
        self.phi_step_deg
    }

    pub fn theta_count(&self) -> usize {
        self.theta_intervals + 1
    }

    pub fn phi_count(&self) -> usize {
        self.phi_nodes
    }

    pub fn node_count(&self) -> usize {
        self.theta_count() * self.phi_count()
    }

    pub fn theta_deg(&self, i: usize) -> f64 {
        90.0 * i as f64 / self.theta_intervals as f64
    }

    pub fn phi_deg(&self, j: usize) -> f64 {
        360.0 * j as f64 / self.phi_nodes as f64
    }

    /// The same coverage at half the step in both coordinates.
    pub fn halved(&self) -> Self {
        Self {
            theta_step_deg: self.theta_step_deg / 2.0,
            phi_step_deg: self.phi_step_deg / 2.0,
            theta_intervals: self.theta_intervals * 2,
            phi_nodes: self.phi_nodes * 2,
        }
    }

    /// Trapezoid weights in θ for integrands of the form `g(θ)·sinθ`.
    ///
    /// `g` is interpolated linearly between nodes and the product with
    /// `sinθ` is integrated exactly on each panel, so a constant `g`
    /// integrates to `1 − cos(π/2) = 1` at any step.
    pub fn theta_weights(&self) -> Vec<f64> {
        let n = self.theta_intervals;
        let h = (90.0 / n as f64).to_radians();
        let mut weights = vec![0.0; n + 1];
        for k in 0..n {
            let a = self.theta_deg(k).to_radians();
            let b = self.theta_deg(k + 1).to_radians();
            let chord = (b.sin() - a.sin()) / h;
            weights[k] += a.cos() - chord;
            weights[k + 1] += chord - b.cos();
        }
        weights
    }

    /// Rectangle-rule weight in φ, in radians.
    pub fn phi_weight(&self) -> f64 {
        TAU / self.phi_nodes as f64
    }
}

impl Default for AngularGrid {
    fn default() -> Self {
        Self::uniform(Self::DEFAULT_STEP_DEG).expect("default grid is valid")
    }
}

fn whole_divisions(span: f64, step: f64, name: &str) -> Result<usize> {
    if !(step.is_finite() && step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "{name} step must lie in (0, 1] degrees (got {step})"
        )));
    }
    let count = span / step;
    let rounded = count.round();
    if (count - rounded).abs() > 1e-9 * count {
        return Err(Error::InvalidInput(format!(
            "{name} step {step} deg does not divide {span} deg into whole intervals"
        )));
    }
    Ok(rounded as usize)
}

/// How a full pattern is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// Direct summation over elements at every node. The reference path.
    #[default]
    Direct,
    /// Zero-padded 2D FFT over the (u, v) plane with 8-point Lagrange
    /// interpolation onto the nodes. Spot-checked against the direct sum
    /// and replaced by it when the check fails.
    Spectral,
}

/// Complex array factor sampled on an [`AngularGrid`], θ-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationPattern {
    grid: AngularGrid,
    values: Vec<Complex64>,
}

impl RadiationPattern {
    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, theta_index: usize, phi_index: usize) -> Complex64 {
        self.values[theta_index * self.grid.phi_count() + phi_index]
    }

    /// |F|² at a node.
    pub fn power(&self, theta_index: usize, phi_index: usize) -> f64 {
        self.value(theta_index, phi_index).norm_sqr()
    }

    pub fn row(&self, theta_index: usize) -> &[Complex64] {
        let n = self.grid.phi_count();
        &self.values[theta_index * n..(theta_index + 1) * n]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn direction_cosines_deg(theta_deg: f64, phi_deg: f64) -> (f64, f64) {
    let st = theta_deg.to_radians().sin();
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    (st * cp, st * sp)
}

const LANES: usize = 4;

/// Direct-summation kernel over the weights of one map. Weights are held as
/// separate real and imaginary planes, each row padded to a multiple of
/// [`LANES`] so the inner product runs on fixed-width partial sums.
struct Kernel {
    re: Vec<f64>,
    im: Vec<f64>,
    n_x: usize,
    n_y: usize,
    stride: usize,
    kd: f64,
}

/// Per-thread buffers for [`Kernel::eval`].
struct Scratch {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Kernel {
    fn new(map: &ExcitationMap) -> Self {
        let g = map.geometry();
        let (n_x, n_y) = (g.n_x(), g.n_y());
        let stride = n_y.div_ceil(LANES) * LANES;
        let mut re = vec![0.0; n_x * stride];
        let mut im = vec![0.0; n_x * stride];
        for m in 0..n_x {
            for n in 0..n_y {
                let w = map.weight(m, n);
                re[m * stride + n] = w.re;
                im[m * stride + n] = w.im;
            }
        }
        Self {
            re,
            im,
            n_x,
            n_y,
            stride,
            kd: g.kd(),
        }
    }

    fn eval(&self, u: f64, v: f64, scratch: &mut Scratch) -> Complex64 {
        // phase factors by repeated rotation; error grows by ~1 ulp per element
        let rot_y = Complex64::from_polar(1.0, self.kd * v);
        let mut e = Complex64::new(1.0, 0.0);
        for n in 0..self.n_y {
            scratch.re[n] = e.re;
            scratch.im[n] = e.im;
            e *= rot_y;
        }
        let rot_x = Complex64::from_polar(1.0, self.kd * u);
        let mut ex = Complex64::new(1.0, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        for m in 0..self.n_x {
            let wr = &self.re[m * self.stride..(m + 1) * self.stride];
            let wi = &self.im[m * self.stride..(m + 1) * self.stride];
            let mut acc_re = [0.0; LANES];
            let mut acc_im = [0.0; LANES];
            for (((wr, wi), er), ei) in wr
                .chunks_exact(LANES)
                .zip(wi.chunks_exact(LANES))
                .zip(scratch.re.chunks_exact(LANES))
                .zip(scratch.im.chunks_exact(LANES))
            {
                for k in 0..LANES {
                    acc_re[k] += wr[k] * er[k] - wi[k] * ei[k];
                    acc_im[k] += wr[k] * ei[k] + wi[k] * er[k];
                }
            }
            let row = Complex64::new(acc_re.iter().sum(), acc_im.iter().sum());
            total += row * ex;
            ex *= rot_x;
        }
        total
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            re: vec![0.0; self.stride],
            im: vec![0.0; self.stride],
        }
    }
}

fn array_factor_deg(map: &ExcitationMap, theta_deg: f64, phi_deg: f64) -> Complex64 {
    let kernel = Kernel::new(map);
    let (u, v) = direction_cosines_deg(theta_deg, phi_deg);
    kernel.eval(u, v, &mut kernel.scratch())
}

/// Exact array factor of `map` toward `dir`. A map steered to `dir` by
/// [`gradient_phase_excitation`](crate::array::gradient_phase_excitation)
/// returns `n_x·n_y` (real) here.
pub fn array_factor_at(map: &ExcitationMap, dir: BeamDirection) -> Complex64 {
    array_factor_deg(map, dir.theta_deg(), dir.phi_deg())
}

/// Evaluates the array factor at every grid node by direct summation.
pub fn compute_pattern(map: &ExcitationMap, grid: &AngularGrid) -> RadiationPattern {
    let kernel = Kernel::new(map);
    let rows: Vec<Vec<Complex64>> = (0..grid.theta_count())
        .into_par_iter()
        .map(|i| {
            let theta = grid.theta_deg(i);
            let mut scratch = kernel.scratch();
            (0..grid.phi_count())
                .map(|j| {
                    let (u, v) = direction_cosines_deg(theta, grid.phi_deg(j));
                    kernel.eval(u, v, &mut scratch)
                })
                .collect()
        })
        .collect();
    RadiationPattern {
        grid: *grid,
        values: rows.concat(),
    }
}

/// Evaluates a full pattern along the requested path. The spectral path
/// falls back to direct summation when it disagrees with the direct sum by
/// more than [`SPECTRAL_TOLERANCE`] of the pattern peak at any spot-checked node.
pub fn compute_pattern_with(
    map: &ExcitationMap,
    grid: &AngularGrid,
    path: EvalPath,
) -> RadiationPattern {
    match path {
        EvalPath::Direct => compute_pattern(map, grid),
        EvalPath::Spectral => {
            let values = spectral::evaluate(map, grid);
            let pattern = RadiationPattern {
                grid: *grid,
                values,
            };
            if spectral::spot_check(map, &pattern) <= SPECTRAL_TOLERANCE {
                pattern
            } else {
                compute_pattern(map, grid)
            }
        }
    }
}

/// Largest admissible disagreement between the spectral and direct paths,
/// relative to the peak magnitude of the pattern.
pub const SPECTRAL_TOLERANCE: f64 = 1e-6;

/// Largest node-wise deviation of the spectral path from direct summation
/// over the whole grid, relative to the peak magnitude.
pub fn spectral_deviation(map: &ExcitationMap, grid: &AngularGrid) -> f64 {
    let fast = spectral::evaluate(map, grid);
    let exact = compute_pattern(map, grid);
    let peak = exact.max_magnitude();
    if peak == 0.0 {
        return fast.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    fast.iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / peak
}

/// ∫∫ |F|² sinθ dθ dφ over the upper hemisphere: rectangle rule in φ,
/// trapezoid in θ. Zero for an all-zero pattern.
pub fn total_radiated_power(pattern: &RadiationPattern) -> f64 {
    let grid = pattern.grid();
    let theta_weights = grid.theta_weights();
    let row_sums: Vec<f64> = (0..grid.theta_count())
        .into_par_iter()
        .map(|i| pattern.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>())
        .collect();
    grid.phi_weight()
        * row_sums
            .iter()
            .zip(&theta_weights)
            .map(|(s, w)| s * w)
            .sum::<f64>()
}

/// (1/4π)·∫ D dΩ over the hemisphere, which is 1 for any nonzero pattern.
pub fn mean_directivity(pattern: &RadiationPattern) -> Result<f64> {
    let power = total_radiated_power(pattern);
    if power == 0.0 {
        return Err(Error::UndefinedDirectivity);
    }
    let grid = pattern.grid();
    let theta_weights = grid.theta_weights();
    let mut integral = 0.0;
    for (i, w) in theta_weights.iter().enumerate() {
        let row: f64 = pattern
            .row(i)
            .iter()
            .map(|v| 4.0 * PI * v.norm_sqr() / power)
            .sum();
        integral += row * w;
    }
    Ok(integral * grid.phi_weight() / (4.0 * PI))
}

/// A map together with its sampled pattern and total radiated power, ready
/// to answer directivity queries.
#[derive(Debug, Clone)]
pub struct DirectivityOracle {
    map: ExcitationMap,
    pattern: RadiationPattern,
    total_power: f64,
}

impl DirectivityOracle {
    pub fn new(map: &ExcitationMap, grid: &AngularGrid, path: EvalPath) -> Result<Self> {
        if map.is_zero() {
            return Err(Error::UndefinedDirectivity);
        }
        let pattern = compute_pattern_with(map, grid, path);
        let total_power = total_radiated_power(&pattern);
        if total_power <= 0.0 {
            return Err(Error::UndefinedDirectivity);
        }
        Ok(Self {
            map: map.clone(),
            pattern,
            total_power,
        })
    }

    pub fn map(&self) -> &ExcitationMap {
        &self.map
    }

    pub fn pattern(&self) -> &RadiationPattern {
        &self.pattern
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    /// Linear directivity toward `dir`, evaluated exactly (not from the grid).
    pub fn directivity(&self, dir: BeamDirection) -> f64 {
        self.directivity_from_power(array_factor_at(&self.map, dir).norm_sqr())
    }

    pub fn directivity_from_power(&self, af_power: f64) -> f64 {
        4.0 * PI * af_power / self.total_power
    }

    /// Linear directivity at a grid node.
    pub fn node_directivity(&self, theta_index: usize, phi_index: usize) -> f64 {
        self.directivity_from_power(self.pattern.power(theta_index, phi_index))
    }

    pub fn find_peak(&self, seed: BeamDirection, radius_deg: f64) -> Result<(BeamDirection, f64)> {
        find_peak(&self.map, &self.pattern, seed, radius_deg)
    }
}

/// Directivity `4π·|F(dir)|² / P` of `map` toward `dir`, with `P` integrated
/// on `grid`.
pub fn directivity(map: &ExcitationMap, dir: BeamDirection, grid: &AngularGrid) -> Result<f64> {
    Ok(DirectivityOracle::new(map, grid, EvalPath::Direct)?.directivity(dir))
}

/// Change in total radiated power, in dB, when both grid steps are halved.
pub fn grid_convergence_db(map: &ExcitationMap, grid: &AngularGrid) -> Result<f64> {
    let coarse = total_radiated_power(&compute_pattern(map, grid));
    let fine = total_radiated_power(&compute_pattern(map, &grid.halved()));
    if coarse <= 0.0 || fine <= 0.0 {
        return Err(Error::UndefinedDirectivity);
    }
    Ok((10.0 * (fine / coarse).log10()).abs())
}

const PEAK_TOLERANCE_DEG: f64 = 1e-4;
const MAX_ASCENT_PASSES: usize = 16;

/// Locates the strongest |F|² within `radius_deg` of `seed`.
///
/// The grid argmax inside the angular disc is refined by alternating
/// golden-section searches in θ and φ, each bracketed by one grid step on
/// either side, until neither coordinate moves by more than 1e-4°.
/// Returns the refined direction and |F|² there.
pub fn find_peak(
    map: &ExcitationMap,
    pattern: &RadiationPattern,
    seed: BeamDirection,
    radius_deg: f64,
) -> Result<(BeamDirection, f64)> {
    let grid = pattern.grid();
    let min_radius = grid.theta_step_deg().max(grid.phi_step_deg());
    if !(radius_deg.is_finite() && radius_deg >= min_radius) {
        return Err(Error::InvalidInput(format!(
            "peak search radius {radius_deg} deg is below one grid step ({min_radius} deg)"
        )));
    }

    let radius = radius_deg.to_radians();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..grid.theta_count() {
        let theta = grid.theta_deg(i);
        if (theta - seed.theta_deg()).abs() > radius_deg {
            continue;
        }
        for j in 0..grid.phi_count() {
            let node = BeamDirection::new(theta, grid.phi_deg(j))?;
            if node.angular_separation(&seed) > radius {
                continue;
            }
            let p = pattern.power(i, j);
            if best.is_none_or(|(_, _, b)| p > b) {
                best = Some((i, j, p));
            }
        }
    }
    let (i, j, grid_power) = best.ok_or_else(|| {
        Error::InvalidInput(format!(
            "no grid node within {radius_deg} deg of ({}, {})",
            seed.theta_deg(),
            seed.phi_deg()
        ))
    })?;

    let power_at = |theta: f64, phi: f64| array_factor_deg(map, theta, phi).norm_sqr();
    let mut theta = grid.theta_deg(i);
    let mut phi = grid.phi_deg(j);
    let mut power = power_at(theta, phi).max(grid_power);
    let dt = grid.theta_step_deg();
    let dp = grid.phi_step_deg();

    for _ in 0..MAX_ASCENT_PASSES {
        let (lo, hi) = ((theta - dt).max(0.0), (theta + dt).min(90.0));
        let new_theta = golden_section_max(|t| power_at(t, phi), lo, hi, PEAK_TOLERANCE_DEG);
        let theta_moved =
            accept_if_better(&mut theta, &mut power, new_theta, power_at(new_theta, phi));

        let mut phi_moved = 0.0;
        if theta > 0.0 {
            let new_phi = golden_section_max(
                |p| power_at(theta, p),
                phi - dp,
                phi + dp,
                PEAK_TOLERANCE_DEG,
            );
            phi_moved = accept_if_better(&mut phi, &mut power, new_phi, power_at(theta, new_phi));
        }
        if theta_moved < PEAK_TOLERANCE_DEG && phi_moved < PEAK_TOLERANCE_DEG {
            break;
        }
    }

    Ok((BeamDirection::new(theta, phi)?, power))
}

// Ascent bookkeeping: a coordinate only moves when |F|² does not decrease.
fn accept_if_better(coord: &mut f64, power: &mut f64, candidate: f64, candidate_power: f64) -> f64 {
    if candidate_power >= *power {
        let moved = (candidate - *coord).abs();
        *coord = candidate;
        *power = candidate_power;
        moved
    } else {
        0.0
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Relative error `|P_exact − P_approx| / P_exact` of dropping the cross
/// terms from the total radiated power of a superposition, where
/// `P_exact` is the power of the superposed map and
/// `P_approx = Σ a_i²·P_i` sums the powers of the individual parts.
pub fn cross_term_error(
    parts: &[ExcitationMap],
    coefficients: &[f64],
    grid: &AngularGrid,
    path: EvalPath,
) -> Result<f64> {
    Ok(cross_term_powers(parts, coefficients, grid, path)?.relative_error())
}

/// Exact and cross-term-free powers of a superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTermPowers {
    pub exact: f64,
    pub approx: f64,
}

impl CrossTermPowers {
    pub fn relative_error(&self) -> f64 {
        (self.exact - self.approx).abs() / self.exact
    }
}

pub fn cross_term_powers(
    parts: &[ExcitationMap],
    coefficients: &[f64],
    grid: &AngularGrid,
    path: EvalPath,
) -> Result<CrossTermPowers> {
    let combined = superpose(parts, coefficients)?;
    let exact = total_radiated_power(&compute_pattern_with(&combined, grid, path));
    if exact <= 0.0 {
        return Err(Error::UndefinedDirectivity);
    }
    if parts.len() == 1 {
        // no cross terms exist; a² P_1 is P_exact up to rounding
        return Ok(CrossTermPowers {
            exact,
            approx: exact,
        });
    }
    let approx = parts
        .iter()
        .zip(coefficients)
        .map(|(part, a)| a * a * total_radiated_power(&compute_pattern_with(part, grid, path)))
        .sum();
    Ok(CrossTermPowers { exact, approx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{gradient_phase_excitation, ArrayGeometry};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn coarse() -> AngularGrid {
        AngularGrid::uniform(1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(AngularGrid::uniform(0.0).is_err());
        assert!(AngularGrid::uniform(2.0).is_err());
        assert!(AngularGrid::uniform(0.7).is_err());
        let g = AngularGrid::default();
        assert_eq!(g.theta_count(), 361);
        assert_eq!(g.phi_count(), 1440);
        assert_eq!(g.theta_deg(360), 90.0);
        assert_eq!(g.halved().theta_count(), 721);
    }

    #[test]
    fn theta_weights_integrate_sin_exactly() {
        for step in [1.0, 0.5, 0.25] {
            let w = AngularGrid::uniform(step).unwrap().theta_weights();
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn single_element_pattern_is_constant() {
        let g = ArrayGeometry::square(1, 0.5).unwrap();
        let w = Complex64::new(0.3, -1.2);
        let map = ExcitationMap::uniform(g, w);
        let p = compute_pattern(&map, &coarse());
        assert!(p.values().iter().all(|v| *v == w));
    }

    #[test]
    fn uniform_broadside_sum() {
        let g = ArrayGeometry::square(30, 1.0 / 3.0).unwrap();
        let map = ExcitationMap::uniform(g, Complex64::new(1.0, 0.0));
        let f = array_factor_at(&map, BeamDirection::broadside());
        assert_abs_diff_eq!(f.re, 900.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn steered_map_peaks_at_steer_direction() {
        let g = ArrayGeometry::square(12, 0.4).unwrap();
        let dir = BeamDirection::new(37.0, 211.0).unwrap();
        let f = array_factor_at(&gradient_phase_excitation(&g, dir), dir);
        assert_abs_diff_eq!(f.re, 144.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn two_element_endfire_null() {
        let g = ArrayGeometry::new(2, 1, 0.5).unwrap();
        let map = ExcitationMap::uniform(g, Complex64::new(1.0, 0.0));
        let f = array_factor_at(&map, BeamDirection::new(90.0, 0.0).unwrap());
        assert!(f.norm() < 1e-12);
    }

    #[test]
    fn constant_pattern_power_is_two_pi() {
        let g = ArrayGeometry::square(1, 0.5).unwrap();
        let map = ExcitationMap::uniform(g, Complex64::new(1.0, 0.0));
        for step in [1.0, 0.25] {
            let p = compute_pattern(&map, &AngularGrid::uniform(step).unwrap());
            assert_relative_eq!(total_radiated_power(&p), TAU, max_relative = 1e-6);
        }
    }

    #[test]
    fn isotropic_element_directivity_is_two() {
        let g = ArrayGeometry::square(1, 0.5).unwrap();
        let map = ExcitationMap::uniform(g, Complex64::new(1.0, 0.0));
        let d = directivity(&map, BeamDirection::broadside(), &coarse()).unwrap();
        assert_relative_eq!(d, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn power_is_quadratic_in_scale() {
        let g = ArrayGeometry::square(6, 0.5).unwrap();
        let map = gradient_phase_excitation(&g, BeamDirection::new(20.0, 30.0).unwrap());
        let p1 = total_radiated_power(&compute_pattern(&map, &coarse()));
        let p3 = total_radiated_power(&compute_pattern(&map.scaled(3.0), &coarse()));
        assert_relative_eq!(p3, 9.0 * p1, max_relative = 1e-12);
    }

    #[test]
    fn zero_map_has_zero_power_and_no_directivity() {
        let g = ArrayGeometry::square(3, 0.5).unwrap();
        let map = ExcitationMap::uniform(g, Complex64::new(0.0, 0.0));
        assert_eq!(total_radiated_power(&compute_pattern(&map, &coarse())), 0.0);
        assert_eq!(
            directivity(&map, BeamDirection::broadside(), &coarse()),
            Err(Error::UndefinedDirectivity)
        );
    }

    #[test]
    fn find_peak_on_broadside_map() {
        let g = ArrayGeometry::square(8, 0.5).unwrap();
        let map = gradient_phase_excitation(&g, BeamDirection::broadside());
        let p = compute_pattern(&map, &coarse());
        let (dir, power) = find_peak(&map, &p, BeamDirection::broadside(), 3.0).unwrap();
        assert!(dir.theta_deg() < 1e-3);
        assert_relative_eq!(power, 64.0 * 64.0, max_relative = 1e-9);
    }

    #[test]
    fn find_peak_rejects_small_radius() {
        let g = ArrayGeometry::square(4, 0.5).unwrap();
        let map = gradient_phase_excitation(&g, BeamDirection::broadside());
        let p = compute_pattern(&map, &coarse());
        assert!(find_peak(&map, &p, BeamDirection::broadside(), 0.5).is_err());
    }

    #[test]
    fn cross_term_trivial_cases() {
        let g = ArrayGeometry::square(6, 0.5).unwrap();
        let e = gradient_phase_excitation(&g, BeamDirection::new(15.0, 90.0).unwrap());
        let single = cross_term_error(
            std::slice::from_ref(&e),
            &[0.8],
            &coarse(),
            EvalPath::Direct,
        )
        .unwrap();
        assert_eq!(single, 0.0);
        let coherent =
            cross_term_error(&[e.clone(), e], &[1.0, 1.0], &coarse(), EvalPath::Direct).unwrap();
        assert_abs_diff_eq!(coherent, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 1.0, 1e-8);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-7);
    }
}
