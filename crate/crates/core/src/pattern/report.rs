use crate::array::BeamDirection;
use crate::closed_form::to_dbi;

/// Oracle-measured against closed-form-predicted directivity for one beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamReport {
    pub requested: BeamDirection,
    pub peak: BeamDirection,
    pub oracle_linear: f64,
    pub oracle_dbi: f64,
    pub predicted_linear: f64,
    pub predicted_dbi: f64,
    /// `oracle_dbi − predicted_dbi`.
    pub delta_db: f64,
    /// Directivity requested in the design, when one was given or solved for.
    pub target_dbi: Option<f64>,
}

impl BeamReport {
    pub fn new(
        requested: BeamDirection,
        peak: BeamDirection,
        oracle_linear: f64,
        predicted_linear: f64,
        target_dbi: Option<f64>,
    ) -> Self {
        let oracle_dbi = to_dbi(oracle_linear);
        let predicted_dbi = to_dbi(predicted_linear);
        Self {
            requested,
            peak,
            oracle_linear,
            oracle_dbi,
            predicted_linear,
            predicted_dbi,
            delta_db: oracle_dbi - predicted_dbi,
            target_dbi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectivityReport {
    pub beams: Vec<BeamReport>,
    /// Hemispherical integral of |F|²·sinθ of the verified map.
    pub total_power: f64,
    /// Whether the verified map was the quantized one.
    pub quantized: bool,
}

impl DirectivityReport {
    pub fn max_abs_delta_db(&self) -> f64 {
        self.beams
            .iter()
            .map(|b| b.delta_db.abs())
            .fold(0.0, f64::max)
    }

    pub fn within_tolerance(&self, tolerance_db: f64) -> bool {
        self.beams.iter().all(|b| b.delta_db.abs() <= tolerance_db)
    }
}
