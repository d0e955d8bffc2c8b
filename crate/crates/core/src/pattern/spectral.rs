//! FFT evaluation of the array factor.
//!
//! The array factor is a 2D trigonometric polynomial in (u, v), periodic
//! with period 1/d in each coordinate. A zero-padded inverse FFT of the
//! weights samples it on a `K_x × K_y` lattice with
//! `u_p = p / (d·K_x)`, `v_q = q / (d·K_y)`; node values are then obtained
//! by separable 8-point Lagrange interpolation of that lattice.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{direction_cosines_deg, Kernel, RadiationPattern};
use crate::array::ExcitationMap;
use crate::pattern::AngularGrid;

const OVERSAMPLING: usize = 16;
const MIN_SIZE: usize = 64;
const STENCIL: usize = 8;
const SPOT_CHECKS: usize = 512;

fn padded_len(n: usize) -> usize {
    (OVERSAMPLING * n).next_power_of_two().max(MIN_SIZE)
}

/// Samples of the array factor on the padded (u, v) lattice, row-major in p.
struct Lattice {
    k_x: usize,
    k_y: usize,
    samples: Vec<Complex64>,
}

impl Lattice {
    fn build(map: &ExcitationMap) -> Self {
        let g = map.geometry();
        let (n_x, n_y) = (g.n_x(), g.n_y());
        let (k_x, k_y) = (padded_len(n_x), padded_len(n_y));
        let mut samples = vec![Complex64::new(0.0, 0.0); k_x * k_y];
        for m in 0..n_x {
            for n in 0..n_y {
                samples[m * k_y + n] = map.weight(m, n);
            }
        }

        let mut planner = FftPlanner::<f64>::new();
        // rustfft's inverse transform is unnormalized: Σ x_k e^{+2πi jk/K}
        let along_y = planner.plan_fft_inverse(k_y);
        for row in samples.chunks_exact_mut(k_y).take(n_x) {
            along_y.process(row);
        }
        let along_x = planner.plan_fft_inverse(k_x);
        let mut column = vec![Complex64::new(0.0, 0.0); k_x];
        for q in 0..k_y {
            for (p, c) in column.iter_mut().enumerate() {
                *c = samples[p * k_y + q];
            }
            along_x.process(&mut column);
            for (p, c) in column.iter().enumerate() {
                samples[p * k_y + q] = *c;
            }
        }
        Self { k_x, k_y, samples }
    }

    fn interpolate(&self, x: f64, y: f64) -> Complex64 {
        let (base_x, wx) = lagrange_weights(x);
        let (base_y, wy) = lagrange_weights(y);
        let kx = self.k_x as i64;
        let ky = self.k_y as i64;
        let mut total = Complex64::new(0.0, 0.0);
        for (a, wa) in wx.iter().enumerate() {
            let p = (base_x + a as i64).rem_euclid(kx) as usize;
            let row = &self.samples[p * self.k_y..(p + 1) * self.k_y];
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, wb) in wy.iter().enumerate() {
                let q = (base_y + b as i64).rem_euclid(ky) as usize;
                acc += row[q] * wb;
            }
            total += acc * wa;
        }
        total
    }
}

/// Lagrange basis weights on the integer nodes `base .. base + STENCIL`
/// surrounding the fractional position `x`.
fn lagrange_weights(x: f64) -> (i64, [f64; STENCIL]) {
    let base = x.floor() as i64 - (STENCIL as i64 / 2 - 1);
    let t = x - base as f64;
    let mut w = [0.0; STENCIL];
    for (a, wa) in w.iter_mut().enumerate() {
        let mut num = 1.0;
        let mut den = 1.0;
        for b in 0..STENCIL {
            if a != b {
                num *= t - b as f64;
                den *= a as f64 - b as f64;
            }
        }
        *wa = num / den;
    }
    (base, w)
}

pub(super) fn evaluate(map: &ExcitationMap, grid: &AngularGrid) -> Vec<Complex64> {
    let lattice = Lattice::build(map);
    let d = map.geometry().spacing();
    let scale_x = d * lattice.k_x as f64;
    let scale_y = d * lattice.k_y as f64;
    let rows: Vec<Vec<Complex64>> = (0..grid.theta_count())
        .into_par_iter()
        .map(|i| {
            let theta = grid.theta_deg(i);
            (0..grid.phi_count())
                .map(|j| {
                    let (u, v) = direction_cosines_deg(theta, grid.phi_deg(j));
                    lattice.interpolate(u * scale_x, v * scale_y)
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Largest deviation from direct summation over an evenly strided subset of
/// nodes, relative to the pattern's peak magnitude.
pub(super) fn spot_check(map: &ExcitationMap, pattern: &RadiationPattern) -> f64 {
    let grid = pattern.grid();
    let kernel = Kernel::new(map);
    let mut scratch = kernel.scratch();
    let nodes = grid.node_count();
    let stride = (nodes / SPOT_CHECKS).max(1);
    let mut worst: f64 = 0.0;
    let mut peak: f64 = pattern.max_magnitude();
    for idx in (0..nodes).step_by(stride) {
        let (i, j) = (idx / grid.phi_count(), idx % grid.phi_count());
        let (u, v) = direction_cosines_deg(grid.theta_deg(i), grid.phi_deg(j));
        let exact = kernel.eval(u, v, &mut scratch);
        peak = peak.max(exact.norm());
        worst = worst.max((exact - pattern.values()[idx]).norm());
    }
    if peak == 0.0 {
        0.0
    } else {
        worst / peak
    }
}
