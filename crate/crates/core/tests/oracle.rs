//! Numerical directivity oracle on desk-scale arrays.

use approx::assert_abs_diff_eq;
use multibeam::array::{
    gradient_phase_excitation, superpose, ArrayGeometry, BeamDirection, ExcitationMap,
};
use multibeam::closed_form::{dmax, elliott_directivity, to_dbi};
use multibeam::pattern::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dir(t: f64, p: f64) -> BeamDirection {
    BeamDirection::new(t, p).unwrap()
}

fn geom30() -> ArrayGeometry {
    ArrayGeometry::square(30, 1.0 / 3.0).unwrap()
}

#[test]
fn uniform_aperture_reaches_dmax() {
    let map = ExcitationMap::uniform(geom30(), Complex64::new(1.0, 0.0));
    let d = directivity(&map, BeamDirection::broadside(), &AngularGrid::default()).unwrap();
    assert_abs_diff_eq!(to_dbi(d), 31.0, epsilon = 0.2);
    assert_abs_diff_eq!(to_dbi(d), to_dbi(dmax(10.0)), epsilon = 0.2);
}

#[test]
fn scanned_single_beam_follows_elliott() {
    let map = gradient_phase_excitation(&geom30(), dir(30.0, 0.0));
    let d = directivity(&map, dir(30.0, 0.0), &AngularGrid::default()).unwrap();
    let predicted = elliott_directivity(30.0, 10.0).unwrap();
    assert!(
        (to_dbi(d) - to_dbi(predicted)).abs() <= 0.5,
        "{} vs {}",
        to_dbi(d),
        to_dbi(predicted)
    );
}

#[test]
fn steered_pattern_argmax_and_refined_peak() {
    let steer = dir(23.0, 140.0);
    let map = gradient_phase_excitation(&geom30(), steer);
    let grid = AngularGrid::default();
    let pattern = compute_pattern(&map, &grid);

    let (mut best, mut bi, mut bj) = (0.0, 0, 0);
    for i in 0..grid.theta_count() {
        for j in 0..grid.phi_count() {
            if pattern.power(i, j) > best {
                (best, bi, bj) = (pattern.power(i, j), i, j);
            }
        }
    }
    let node = dir(grid.theta_deg(bi), grid.phi_deg(bj));
    assert!(node.angular_separation(&steer).to_degrees() <= grid.theta_step_deg() * 1.5);

    let (peak, power) = find_peak(&map, &pattern, steer, 3.0).unwrap();
    assert!(peak.angular_separation(&steer).to_degrees() < 0.1);
    assert_abs_diff_eq!(power, 900.0 * 900.0, epsilon = 1e-3);
}

#[test]
fn two_beam_peaks_are_found_at_their_directions() {
    let g = geom30();
    let parts = [
        gradient_phase_excitation(&g, dir(10.0, 180.0)),
        gradient_phase_excitation(&g, dir(30.0, 270.0)),
    ];
    let map = superpose(&parts, &[1.0, 0.7]).unwrap();
    let pattern = compute_pattern(&map, &AngularGrid::default());
    let (p1, _) = find_peak(&map, &pattern, dir(10.0, 180.0), 2.5).unwrap();
    let (p2, _) = find_peak(&map, &pattern, dir(30.0, 270.0), 2.5).unwrap();
    assert!(p1.angular_separation(&dir(10.0, 180.0)).to_degrees() < 0.5);
    assert!(p2.angular_separation(&dir(30.0, 270.0)).to_degrees() < 0.5);
    assert!(p1.angular_separation(&p2).to_degrees() > 10.0);
}

#[test]
fn cross_term_error_small_for_distinct_azimuths_larger_for_shared() {
    let g = geom30();
    let grid = AngularGrid::default();
    let pair = |a: BeamDirection, b: BeamDirection| {
        let parts = [
            gradient_phase_excitation(&g, a),
            gradient_phase_excitation(&g, b),
        ];
        cross_term_error(&parts, &[1.0, 1.0], &grid, EvalPath::Direct).unwrap()
    };
    let distinct = pair(dir(10.0, 180.0), dir(50.0, 270.0));
    let shared = pair(dir(10.0, 180.0), dir(30.0, 180.0));
    assert!(distinct < 0.05, "distinct-azimuth error {distinct}");
    assert!(shared > distinct, "shared {shared} vs distinct {distinct}");
}

#[test]
fn default_grid_is_converged() {
    let g = geom30();
    let parts = [
        gradient_phase_excitation(&g, dir(16.0, 270.0)),
        gradient_phase_excitation(&g, dir(35.0, 135.0)),
    ];
    let map = superpose(&parts, &[1.0, 1.1]).unwrap();
    let change = grid_convergence_db(&map, &AngularGrid::default()).unwrap();
    assert!(
        change < 0.01,
        "halving the grid changed power by {change} dB"
    );
}

#[test]
fn spectral_path_matches_direct_sum_on_every_node() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = AngularGrid::default();
    for (n_x, n_y, d) in [(30, 30, 1.0 / 3.0), (17, 9, 0.5), (38, 38, 1.0 / 3.0)] {
        let g = ArrayGeometry::new(n_x, n_y, d).unwrap();
        let weights = (0..g.element_count())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let map = ExcitationMap::from_weights(g, weights).unwrap();
        let dev = spectral_deviation(&map, &grid);
        assert!(dev <= SPECTRAL_TOLERANCE, "{n_x}x{n_y}: deviation {dev}");
    }
}

#[test]
fn spectral_oracle_agrees_with_direct_oracle() {
    let g = geom30();
    let map = superpose(
        &[
            gradient_phase_excitation(&g, dir(10.0, 180.0)),
            gradient_phase_excitation(&g, dir(30.0, 270.0)),
        ],
        &[1.0, 0.7],
    )
    .unwrap();
    let grid = AngularGrid::default();
    let direct = DirectivityOracle::new(&map, &grid, EvalPath::Direct).unwrap();
    let fast = DirectivityOracle::new(&map, &grid, EvalPath::Spectral).unwrap();
    assert_abs_diff_eq!(
        fast.total_power() / direct.total_power(),
        1.0,
        epsilon = 1e-6
    );
}

#[test]
fn pattern_evaluation_is_deterministic() {
    let g = ArrayGeometry::square(12, 0.4).unwrap();
    let map = gradient_phase_excitation(&g, dir(40.0, 75.0));
    let grid = AngularGrid::uniform(0.5).unwrap();
    let a = compute_pattern(&map, &grid);
    let b = compute_pattern(&map, &grid);
    assert_eq!(a, b);
    assert_eq!(
        total_radiated_power(&a).to_bits(),
        total_radiated_power(&b).to_bits()
    );
}

#[test]
fn pattern_nodes_equal_pointwise_array_factor() {
    let g = ArrayGeometry::square(7, 0.45).unwrap();
    let map = gradient_phase_excitation(&g, dir(33.0, 300.0));
    let grid = AngularGrid::uniform(1.0).unwrap();
    let p = compute_pattern(&map, &grid);
    for (i, j) in [(0, 0), (33, 300), (90, 17), (45, 359)] {
        let f = array_factor_at(&map, dir(grid.theta_deg(i), grid.phi_deg(j)));
        assert_eq!(p.value(i, j), f);
    }
}
