use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use multibeam::synthesis::plan;
use multibeam_cli::config::{Overrides, RunConfig};
use tempfile::TempDir;

const EXAMPLE_ONE: &str = r#"
[array]
n = 30
spacing = 0.3333333333333333

[[beam]]
theta_deg = 10.0
phi_deg = 180.0
directivity_dbi = 29.0

[[beam]]
theta_deg = 30.0
phi_deg = 270.0
free = true
"#;

const EXAMPLE_THREE: &str = r#"
[array]
n = 30
spacing = 0.3333333333333333

[[beam]]
theta_deg = 16.0
phi_deg = 270.0
directivity_dbi = 24.57

[[beam]]
theta_deg = 25.0
phi_deg = 225.0
free = true

[[beam]]
theta_deg = 35.0
phi_deg = 135.0
directivity_dbi = 25.4
"#;

const QUANTIZED_TWO_BIT: &str = r#"
[array]
spacing = 0.3333333333333333

[[beam]]
theta_deg = 45.0
phi_deg = 45.0
directivity_dbi = 22.68

[[beam]]
theta_deg = 65.0
phi_deg = 135.0
directivity_dbi = 27.55

[quantization]
phase_bits = 2
amplitude_bits = 2
"#;

const BROADSIDE: &str = r#"
[array]
n = 12
spacing = 0.5

[[beam]]
theta_deg = 0.0
phi_deg = 0.0
coefficient = 1.0

[grid]
step_deg = 1.0
"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn multibeam(verb: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multibeam"))
        .arg(verb)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn plan_writes_coefficients_and_tables() {
    let ws = Workspace::new();
    let cfg = ws.config("ex1.toml", EXAMPLE_ONE);
    let o = multibeam("plan", &cfg, &ws.out("o"), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: RunConfig = fs::read_to_string(ws.out("o").join("plan.toml"))
        .unwrap()
        .parse()
        .unwrap();
    let resolved = doc.resolved.as_ref().unwrap();
    assert_eq!((resolved.n_x, resolved.n_y), (30, 30));
    assert_eq!(resolved.coefficients[0], 1.0);
    assert!((resolved.coefficients[1] - 0.70).abs() <= 0.01);
    assert!((resolved.predicted_dbi[1] - 25.9).abs() <= 0.1);
    let ex = doc.excitation.as_ref().unwrap();
    assert_eq!(ex.amplitude.len(), 30);
    assert!(ex.phase_rad.iter().all(|row| row.len() == 30));
}

#[test]
fn plan_file_round_trips_to_the_same_excitation() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "ex1.toml",
        &format!("{EXAMPLE_ONE}\n[quantization]\nphase_bits = 3\namplitude_bits = 3\n"),
    );
    assert_eq!(code(&multibeam("plan", &cfg, &ws.out("a"), &[])), 0);
    let first = ws.out("a").join("plan.toml");
    assert_eq!(code(&multibeam("plan", &first, &ws.out("b"), &[])), 0);

    let original: RunConfig = EXAMPLE_ONE.parse().unwrap();
    let reread = RunConfig::load(&first).unwrap();
    let mut q = original.clone();
    q.quantization = reread.quantization;
    let p1 = plan(&q.settings(&Overrides::default()).unwrap().spec).unwrap();
    let p2 = plan(&reread.settings(&Overrides::default()).unwrap().spec).unwrap();
    assert_eq!(p1.continuous, p2.continuous);
    assert_eq!(p1.excitation(), p2.excitation());

    let tables = |path: PathBuf| RunConfig::load(&path).unwrap().excitation;
    assert_eq!(tables(first), tables(ws.out("b").join("plan.toml")));
}

#[test]
fn single_free_beam_takes_the_whole_budget() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "one.toml",
        "[array]\nn = 30\nspacing = 0.3333333333333333\n[[beam]]\ntheta_deg = 20.0\nphi_deg = 45.0\nfree = true\n",
    );
    assert_eq!(code(&multibeam("plan", &cfg, &ws.out("o"), &[])), 0);
    let doc = RunConfig::load(&ws.out("o").join("plan.toml")).unwrap();
    let d = doc.resolved.unwrap().predicted_dbi[0];
    let expected = 10.0 * (4.0 * std::f64::consts::PI * 100.0 * 20f64.to_radians().cos()).log10();
    assert!((d - expected).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    let out = ws.out("o");

    let over = ws.config(
        "over.toml",
        &EXAMPLE_ONE.replace("free = true", "directivity_dbi = 29.0"),
    );
    let o = multibeam("plan", &over, &out, &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds Dmax"));

    let unknown = ws.config(
        "unknown.toml",
        &format!("{EXAMPLE_ONE}\n[run]\nspeed = 3\n"),
    );
    assert_eq!(code(&multibeam("plan", &unknown, &out, &[])), 1);

    let missing = ws.out("missing.toml");
    assert_eq!(code(&multibeam("plan", &missing, &out, &[])), 1);

    let o = Command::new(env!("CARGO_BIN_EXE_multibeam"))
        .args(["plan", "--no-such-flag"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);

    let too_far = ws.config(
        "far.toml",
        &EXAMPLE_ONE.replace("theta_deg = 30.0", "theta_deg = 75.0"),
    );
    assert_eq!(code(&multibeam("plan", &too_far, &out, &[])), 2);
    assert_eq!(
        code(&multibeam("plan", &too_far, &out, &["--permissive"])),
        0
    );

    let shared = ws.config(
        "shared.toml",
        &EXAMPLE_ONE.replace("phi_deg = 270.0", "phi_deg = 180.0"),
    );
    assert_eq!(code(&multibeam("plan", &shared, &out, &[])), 2);
    assert_eq!(code(&multibeam("plan", &shared, &out, &["--strict"])), 2);

    let two_free = ws.config(
        "free.toml",
        &EXAMPLE_ONE.replace("directivity_dbi = 29.0", "free = true"),
    );
    assert_eq!(code(&multibeam("plan", &two_free, &out, &[])), 1);
}

#[test]
fn verify_exit_status_follows_tolerance() {
    let ws = Workspace::new();
    let three = ws.config("ex3.toml", EXAMPLE_THREE);
    let o = multibeam("verify", &three, &ws.out("a"), &["--tolerance-db", "0.5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report: toml::Table = fs::read_to_string(ws.out("a").join("report.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(report["summary"]["passed"].as_bool(), Some(true));
    assert_eq!(report["beam"].as_array().unwrap().len(), 3);

    let o = multibeam("verify", &three, &ws.out("b"), &["--tolerance-db", "0"]);
    assert_eq!(code(&o), 3);

    let two_bit = ws.config("q2.toml", QUANTIZED_TWO_BIT);
    let o = multibeam("verify", &two_bit, &ws.out("c"), &["--tolerance-db", "0.5"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn fast_path_agrees_with_direct_path() {
    let ws = Workspace::new();
    let cfg = ws.config("ex1.toml", EXAMPLE_ONE);
    for (dir, flag) in [("d", "off"), ("f", "on")] {
        assert_eq!(
            code(&multibeam(
                "verify",
                &cfg,
                &ws.out(dir),
                &["--fast-path", flag]
            )),
            0
        );
    }
    let total = |dir: &str| -> f64 {
        let t: toml::Table = fs::read_to_string(ws.out(dir).join("report.toml"))
            .unwrap()
            .parse()
            .unwrap();
        t["summary"]["total_power"].as_float().unwrap()
    };
    assert!((total("f") / total("d") - 1.0).abs() <= 1e-6);
}

#[test]
fn broadside_cut_is_symmetric_with_one_row_per_step() {
    let ws = Workspace::new();
    let cfg = ws.config("b.toml", BROADSIDE);
    let out = ws.out("o");
    let o = multibeam("cut", &cfg, &out, &["--phi-deg", "0", "--phi-deg", "37.5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["cut_phi0.csv", "cut_phi37.5.csv"] {
        let (header, rows) = read_csv(&out.join(name));
        assert_eq!(
            header,
            ["angle_deg", "directivity_linear", "directivity_dbi"]
        );
        assert_eq!(rows.len(), 181);
        assert_eq!(rows[0][0], -90.0);
        assert_eq!(rows[180][0], 90.0);
        for k in 0..=90 {
            let (a, b) = (&rows[90 - k], &rows[90 + k]);
            assert_eq!(a[0], -b[0]);
            assert!(
                (a[1] - b[1]).abs() <= 1e-7 * rows[90][1],
                "asymmetry at {}",
                b[0]
            );
        }
    }
}

#[test]
fn example_one_cuts_peak_at_the_beam_angles() {
    let ws = Workspace::new();
    let cfg = ws.config("ex1.toml", EXAMPLE_ONE);
    let out = ws.out("o");
    assert_eq!(code(&multibeam("cut", &cfg, &out, &[])), 0);
    for (phi, angle) in [(180, 10.0), (270, 30.0)] {
        let (_, rows) = read_csv(&out.join(format!("cut_phi{phi}.csv")));
        assert_eq!(rows.len(), 721);
        let best = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
        assert_eq!(best[0], angle, "cut at phi = {phi}");
    }
}

#[test]
fn pattern_export_covers_the_grid_and_is_byte_identical() {
    let ws = Workspace::new();
    let cfg = ws.config("b.toml", BROADSIDE);
    for dir in ["a", "b"] {
        assert_eq!(code(&multibeam("pattern", &cfg, &ws.out(dir), &[])), 0);
    }
    let a = fs::read(ws.out("a").join("pattern.csv")).unwrap();
    let b = fs::read(ws.out("b").join("pattern.csv")).unwrap();
    assert_eq!(a, b);
    let (header, rows) = read_csv(&ws.out("a").join("pattern.csv"));
    assert_eq!(
        header,
        [
            "theta_deg",
            "phi_deg",
            "power",
            "directivity_linear",
            "directivity_dbi"
        ]
    );
    assert_eq!(rows.len(), 91 * 360);
    assert_eq!(rows[0][2], 144.0 * 144.0);
    let text = String::from_utf8(a).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("0.00000000e0,0.00000000e0,2.07360000e4,"));
}

#[test]
fn sweeps_and_error_table() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "sweep.toml",
        r#"
[array]
n = 20
spacing = 0.5

[[beam]]
theta_deg = 10.0
phi_deg = 180.0
coefficient = 1.2

[[beam]]
theta_deg = 50.0
phi_deg = 270.0
coefficient = 1.0

[grid]
step_deg = 0.5

[sweep]
lengths_wavelengths = [3.0, 10.0]
bits = [2, 3, "continuous"]

[[error_case]]
label = "single"
beams = [{ theta_deg = 20.0, phi_deg = 90.0 }]

[[error_case]]
label = "pair, shared azimuth"
beams = [{ theta_deg = 10.0, phi_deg = 180.0 }, { theta_deg = 30.0, phi_deg = 180.0, coefficient = 0.8 }]
"#,
    );
    let out = ws.out("o");

    assert_eq!(code(&multibeam("sweep-length", &cfg, &out, &[])), 0);
    let (header, rows) = read_csv(&out.join("sweep_length.csv"));
    assert_eq!(
        &header[..3],
        ["length_wavelengths", "n", "max_abs_delta_db"]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][1], rows[1][1]), (6.0, 20.0));
    assert!(rows[0][2] > rows[1][2]);

    assert_eq!(code(&multibeam("sweep-quant", &cfg, &out, &[])), 0);
    let text = fs::read_to_string(out.join("sweep_quant.csv")).unwrap();
    let labels: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(labels, ["2", "3", "continuous"]);

    assert_eq!(code(&multibeam("error-table", &cfg, &out, &[])), 0);
    let text = fs::read_to_string(out.join("error_table.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "label,beams,exact_power,approx_power,relative_error"
    );
    assert!(lines[1].starts_with("single,1,") && lines[1].ends_with(",0.00000000e0"));
    assert!(lines[2].starts_with("\"pair, shared azimuth\",2,"));
}

#[test]
fn bundled_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = RunConfig::load(&path).unwrap();
            let settings = cfg.settings(&Overrides::default()).unwrap();
            plan(&settings.spec).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
