//! File writers. Every numeric CSV field carries 9 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use multibeam::array::{BitDepth, ExcitationMap};
use multibeam::closed_form::to_dbi;
use multibeam::pattern::{DirectivityOracle, DirectivityReport};
use multibeam::synthesis::{DesignMode, SynthesisPlan};
use serde::Serialize;

use crate::analysis::{CutPoint, ErrorRow, LengthCase, QuantCase};
use crate::config::{
    ArraySection, BeamSection, BitsValue, ExcitationSection, ModeValue, QuantizationSection,
    ResolvedSection, RunConfig, RunSection,
};
use crate::error::{CliError, Result};

pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn table(map: &ExcitationMap, f: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    let g = map.geometry();
    (0..g.n_x())
        .map(|m| (0..g.n_y()).map(|n| f(m, n)).collect())
        .collect()
}

/// Plan as a config document: re-reading it as a config reproduces the same
/// excitation map through coefficient mode.
pub fn plan_document(plan: &SynthesisPlan, source: &RunConfig, mode: DesignMode) -> RunConfig {
    let g = plan.geometry;
    let map = plan.excitation();
    let run = RunSection {
        mode: Some(match mode {
            DesignMode::Strict => ModeValue::Strict,
            DesignMode::Permissive => ModeValue::Permissive,
        }),
        ..source.run.unwrap_or_default()
    };
    let quantization = (!plan.quantization.is_continuous()).then(|| QuantizationSection {
        phase_bits: BitsValue::from_depth(plan.quantization.phase),
        amplitude_bits: BitsValue::from_depth(plan.quantization.amplitude),
    });
    RunConfig {
        array: ArraySection {
            n: None,
            n_x: Some(g.n_x()),
            n_y: Some(g.n_y()),
            spacing: g.spacing(),
        },
        beams: plan
            .entries
            .iter()
            .zip(&source.beams)
            .map(|(e, b)| BeamSection {
                theta_deg: b.theta_deg,
                phi_deg: b.phi_deg,
                directivity_dbi: None,
                coefficient: Some(e.coefficient),
                free: None,
            })
            .collect(),
        quantization,
        grid: source.grid,
        run: Some(run),
        output: None,
        cut: None,
        sweep: None,
        error_cases: Vec::new(),
        resolved: Some(ResolvedSection {
            n_x: g.n_x(),
            n_y: g.n_y(),
            length_wavelengths: plan.aperture.length_wavelengths,
            dmax_dbi: to_dbi(plan.aperture.dmax_linear),
            unrounded_n: plan.element_count.map(|c| c.unrounded),
            free_beam: plan.free_beam,
            coefficients: plan.coefficients(),
            predicted_dbi: plan.predicted_dbi(),
            warnings: plan.warnings.clone(),
        }),
        excitation: Some(ExcitationSection {
            quantized: plan.quantized.is_some(),
            amplitude: table(map, |m, n| map.amplitude(m, n)),
            phase_rad: table(map, |m, n| map.phase(m, n)),
        }),
    }
}

#[derive(Serialize)]
struct ReportDocument {
    summary: ReportSummary,
    beam: Vec<ReportBeam>,
}

#[derive(Serialize)]
struct ReportSummary {
    passed: bool,
    tolerance_db: f64,
    max_abs_delta_db: f64,
    quantized: bool,
    n_x: usize,
    n_y: usize,
    length_wavelengths: f64,
    theta_step_deg: f64,
    phi_step_deg: f64,
    total_power: f64,
}

#[derive(Serialize)]
struct ReportBeam {
    theta_deg: f64,
    phi_deg: f64,
    peak_theta_deg: f64,
    peak_phi_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_dbi: Option<f64>,
    predicted_dbi: f64,
    oracle_dbi: f64,
    delta_db: f64,
    predicted_linear: f64,
    oracle_linear: f64,
}

pub fn report_document(
    plan: &SynthesisPlan,
    report: &DirectivityReport,
    grid: &multibeam::pattern::AngularGrid,
    tolerance_db: f64,
) -> Result<String> {
    let doc = ReportDocument {
        summary: ReportSummary {
            passed: report.within_tolerance(tolerance_db),
            tolerance_db,
            max_abs_delta_db: report.max_abs_delta_db(),
            quantized: report.quantized,
            n_x: plan.geometry.n_x(),
            n_y: plan.geometry.n_y(),
            length_wavelengths: plan.aperture.length_wavelengths,
            theta_step_deg: grid.theta_step_deg(),
            phi_step_deg: grid.phi_step_deg(),
            total_power: report.total_power,
        },
        beam: report
            .beams
            .iter()
            .map(|b| ReportBeam {
                theta_deg: b.requested.theta_deg(),
                phi_deg: b.requested.phi_deg(),
                peak_theta_deg: b.peak.theta_deg(),
                peak_phi_deg: b.peak.phi_deg(),
                target_dbi: b.target_dbi,
                predicted_dbi: b.predicted_dbi,
                oracle_dbi: b.oracle_dbi,
                delta_db: b.delta_db,
                predicted_linear: b.predicted_linear,
                oracle_linear: b.oracle_linear,
            })
            .collect(),
    };
    toml::to_string(&doc).map_err(|e| CliError::Config(e.to_string()))
}

/// Fixed-width per-beam comparison table for the terminal.
pub fn report_table(report: &DirectivityReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>4} {:>8} {:>8} {:>10} {:>10} {:>11} {:>14} {:>11} {:>9}\n",
        "beam",
        "theta",
        "phi",
        "peak_theta",
        "peak_phi",
        "target_dBi",
        "predicted_dBi",
        "oracle_dBi",
        "delta_dB"
    ));
    for (i, b) in report.beams.iter().enumerate() {
        let target = b
            .target_dbi
            .map_or_else(|| "-".to_string(), |t| format!("{t:.3}"));
        out.push_str(&format!(
            "{:>4} {:>8.3} {:>8.3} {:>10.3} {:>10.3} {:>11} {:>14.3} {:>11.3} {:>+9.3}\n",
            i,
            b.requested.theta_deg(),
            b.requested.phi_deg(),
            b.peak.theta_deg(),
            b.peak.phi_deg(),
            target,
            b.predicted_dbi,
            b.oracle_dbi,
            b.delta_db
        ));
    }
    out
}

pub fn write_pattern(path: &Path, oracle: &DirectivityOracle) -> Result<()> {
    let pattern = oracle.pattern();
    let grid = *pattern.grid();
    let rows = (0..grid.theta_count()).flat_map(move |i| {
        (0..grid.phi_count()).map(move |j| {
            let d = oracle.node_directivity(i, j);
            vec![
                num(grid.theta_deg(i)),
                num(grid.phi_deg(j)),
                num(pattern.power(i, j)),
                num(d),
                num(to_dbi(d)),
            ]
        })
    });
    write_csv(
        path,
        &header(&[
            "theta_deg",
            "phi_deg",
            "power",
            "directivity_linear",
            "directivity_dbi",
        ]),
        rows,
    )
}

/// `cut_phi<φ>.csv`, with φ written as plain decimal.
pub fn cut_file_name(dir: &Path, phi_deg: f64) -> PathBuf {
    dir.join(format!("cut_phi{phi_deg}.csv"))
}

pub fn write_cut(path: &Path, points: &[CutPoint]) -> Result<()> {
    let rows = points.iter().map(|p| {
        vec![
            num(p.angle_deg),
            num(p.directivity_linear),
            num(to_dbi(p.directivity_linear)),
        ]
    });
    write_csv(
        path,
        &header(&["angle_deg", "directivity_linear", "directivity_dbi"]),
        rows,
    )
}

fn delta_columns(cols: &mut Vec<String>, beams: usize) {
    for i in 0..beams {
        cols.push(format!("predicted_dbi_{i}"));
        cols.push(format!("oracle_dbi_{i}"));
        cols.push(format!("delta_db_{i}"));
    }
}

fn delta_values(row: &mut Vec<String>, report: &DirectivityReport) {
    for b in &report.beams {
        row.push(num(b.predicted_dbi));
        row.push(num(b.oracle_dbi));
        row.push(num(b.delta_db));
    }
}

pub fn write_length_sweep(path: &Path, cases: &[LengthCase]) -> Result<()> {
    let beams = cases.first().map_or(0, |c| c.report.beams.len());
    let mut cols = header(&["length_wavelengths", "n", "max_abs_delta_db"]);
    delta_columns(&mut cols, beams);
    let rows = cases.iter().map(|c| {
        let mut row = vec![
            num(c.length_wavelengths),
            c.n.to_string(),
            num(c.report.max_abs_delta_db()),
        ];
        delta_values(&mut row, &c.report);
        row
    });
    write_csv(path, &cols, rows)
}

pub fn depth_label(depth: BitDepth) -> String {
    match depth {
        BitDepth::Continuous => "continuous".into(),
        BitDepth::Bits(b) => b.to_string(),
    }
}

pub fn write_quant_sweep(path: &Path, cases: &[QuantCase]) -> Result<()> {
    let beams = cases.first().map_or(0, |c| c.report.beams.len());
    let mut cols = header(&["bits", "max_abs_delta_db"]);
    delta_columns(&mut cols, beams);
    let rows = cases.iter().map(|c| {
        let mut row = vec![depth_label(c.depth), num(c.report.max_abs_delta_db())];
        delta_values(&mut row, &c.report);
        row
    });
    write_csv(path, &cols, rows)
}

pub fn write_error_table(path: &Path, rows: &[ErrorRow]) -> Result<()> {
    let records = rows.iter().map(|r| {
        vec![
            r.label.clone(),
            r.beams.to_string(),
            num(r.exact_power),
            num(r.approx_power),
            num(r.relative_error),
        ]
    });
    write_csv(
        path,
        &header(&[
            "label",
            "beams",
            "exact_power",
            "approx_power",
            "relative_error",
        ]),
        records,
    )
}
