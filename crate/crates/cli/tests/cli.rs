use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn load_config(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(repo_file(&format!("configs/{name}"))).unwrap()).unwrap()
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn msi(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_msi"));
    cmd.args(args).env_remove("MSI_DET_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn run_with(cfg: &Path, sub: &[&str], out: &Path, env: &[(&str, &str)]) -> Output {
    let mut args: Vec<&str> = sub.to_vec();
    args.extend(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    msi(&args, env)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_on_reference_config() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(&repo_file("configs/p1.json"), &["spectrum"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));

    let (header, rows) = read_csv(&tmp.path().join("p1_spectrum.csv"));
    assert_eq!(header, ["Omega", "S_tilde_pos", "S_tilde_neg", "S_sym", "Re_K", "Im_K", "H_opt"]);
    assert_eq!(rows.len(), 200);
    let mut last = f64::NEG_INFINITY;
    for row in &rows {
        assert_eq!(row.len(), 7);
        let w: f64 = row[0].parse().unwrap();
        assert!(w > last);
        last = w;
        // every value reprints to the same text
        for cell in row {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(&format!("{x:e}"), cell);
        }
    }

    let side = read_json(&tmp.path().join("p1_spectrum.json"));
    assert_eq!(side["schema"], 1);
    assert_eq!(side["command"], "spectrum");
    assert_eq!(side["version"], env!("CARGO_PKG_VERSION"));
    let hash = side["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(side["grid"]["points"], 200);
    assert_eq!(side["grid"]["rows"], 200);
    assert_eq!(side["grid"]["skipped"], json!([]));
    assert_eq!(side["validity"]["valid"], false);
    assert_eq!(side["validity"]["violations"], json!(["south_detuning_not_small"]));
    assert_eq!(side["config"]["interferometer"]["epsilon"], 0.02);
}

#[test]
fn spectrum_output_is_deterministic_across_threads() {
    let cfg = repo_file("configs/p1.json");
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8", "1"] {
        let tmp = TempDir::new().unwrap();
        let mut args = vec!["--threads", threads, "spectrum"];
        args.extend(["--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
        let o = msi(&args, &[]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push((
            fs::read(tmp.path().join("p1_spectrum.csv")).unwrap(),
            fs::read(tmp.path().join("p1_spectrum.json")).unwrap(),
        ));
    }
    let golden = fs::read(repo_file("crates/cli/tests/golden/p1_spectrum.csv")).unwrap();
    for (csv, json) in &outputs {
        assert_eq!(csv, &golden);
        assert_eq!(json, &outputs[0].1);
    }
}

#[test]
fn zero_pump_gives_zero_spectra() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = load_config("p1.json");
    cfg.as_object_mut().unwrap().remove("pump");
    let path = write_config(tmp.path(), &cfg);
    let o = run_with(&path, &["spectrum"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("p1_spectrum.csv"));
    assert_eq!(rows.len(), 200);
    for row in rows {
        for cell in &row[1..] {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "{row:?}");
        }
    }
}

#[test]
fn malformed_configs_exit_2_naming_the_field() {
    let tmp = TempDir::new().unwrap();
    type Edit = Box<dyn Fn(&mut Value)>;
    let cases: Vec<(Edit, &str)> = vec![
        (Box::new(|c| c["interferometer"]["theta_m"] = json!("wide")), "interferometer.theta_m"),
        (Box::new(|c| c["interferometer"]["theta_m"] = json!(3.0)), "interferometer.theta_m"),
        (Box::new(|c| c["sweep"]["points"] = json!(1)), "sweep.points"),
        (Box::new(|c| c["pump"]["west"]["power"] = json!(1e-3)), "pump.west.power"),
        (Box::new(|c| c["interferometer"]["south"]["length"] = json!(0.3)), "interferometer.south.length"),
        (Box::new(|c| c["interferometer"]["colour"] = json!(1)), "interferometer"),
        (Box::new(|c| c["mechanics"]["h"] = json!(-1.0)), "mechanics.h"),
        (Box::new(|c| c["tolerances"] = json!({"det_tol": 0.0})), "tolerances.det_tol"),
    ];
    for (edit, field) in cases {
        let mut cfg = load_config("p1.json");
        edit(&mut cfg);
        let path = write_config(tmp.path(), &cfg);
        let o = run_with(&path, &["spectrum"], tmp.path(), &[]);
        assert_eq!(o.status.code(), Some(2), "{field}: {}", stderr(&o));
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }

    let o = run_with(&tmp.path().join("missing.json"), &["spectrum"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(tmp.path().join("broken.json"), "{ not json").unwrap();
    let o = run_with(&tmp.path().join("broken.json"), &["spectrum"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = msi(&["spectrum"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = msi(&["--threads", "0", "verify"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

/// P1 swept across the south resonance, ±5γ_S in 11 steps.
fn resonant_sweep(tmp: &Path) -> PathBuf {
    let mut cfg = load_config("p1.json");
    cfg["sweep"] = json!({
        "start": 1297874830.616638,
        "stop": 1322874830.616638,
        "points": 11,
    });
    write_config(tmp, &cfg)
}

#[test]
fn singular_grid_points_are_skipped_and_reported() {
    let tmp = TempDir::new().unwrap();
    let cfg = resonant_sweep(tmp.path());

    // only the resonance itself falls below the threshold: 1 of 11
    let o = run_with(&cfg, &["spectrum"], tmp.path(), &[("MSI_DET_TOL", "0.006")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = read_json(&tmp.path().join("p1_spectrum.json"));
    assert_eq!(side["det_tol"], 0.006);
    let skipped = side["grid"]["skipped"].as_array().unwrap();
    assert_eq!(skipped.len(), 1);
    assert_eq!(skipped[0]["omega"], 1310374830.616638);
    assert!(skipped[0]["reason"].as_str().unwrap().contains("singular"));
    assert_eq!(side["grid"]["rows"], 10);
    let (_, rows) = read_csv(&tmp.path().join("p1_spectrum.csv"));
    assert_eq!(rows.len(), 10);

    // a wider threshold covers most of the line
    let o = run_with(&cfg, &["spectrum"], tmp.path(), &[("MSI_DET_TOL", "0.01")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let side = read_json(&tmp.path().join("p1_spectrum.json"));
    assert!(side["grid"]["skipped"].as_array().unwrap().len() > 1);
    let o = run_with(&cfg, &["compare"], tmp.path(), &[("MSI_DET_TOL", "0.01")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    // and a threshold above |D(ω_p)| leaves nothing defined
    let o = run_with(&cfg, &["spectrum"], tmp.path(), &[("MSI_DET_TOL", "0.5")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("pump"));

    let o = run_with(&cfg, &["spectrum"], tmp.path(), &[("MSI_DET_TOL", "tiny")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("MSI_DET_TOL"));
}

#[test]
fn compare_in_the_lumped_regime() {
    let tmp = TempDir::new().unwrap();
    let cfg = load_config("small_p_cooling.json");
    let p = 2e-4;
    let path = write_config(tmp.path(), &cfg);
    let o = run_with(&path, &["compare"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = read_json(&tmp.path().join("small_p_compare.json"));
    assert_eq!(side["validity"]["valid"], true);
    for key in ["gamma_s", "delta_s", "gamma_m", "delta_m", "gamma", "delta"] {
        assert!(side["lumped"][key].is_f64(), "{key}");
    }
    for key in ["g_disp", "g_diss_combo"] {
        assert!(side["couplings"][key].is_f64(), "{key}");
    }
    let (header, rows) = read_csv(&tmp.path().join("small_p_compare.csv"));
    assert_eq!(
        header,
        ["Omega", "rel_F", "rel_K_matrix", "rel_K", "rel_S", "rel_S_canonical", "rel_K_canonical", "rel_S_fano"]
    );
    assert_eq!(rows.len(), 101);
    for (name, worst) in side["max_near_resonance"].as_object().unwrap() {
        assert!(worst.as_f64().unwrap() <= 10.0 * p, "{name}: {worst}");
    }
}

#[test]
fn compare_symmetric_interferometer_is_canonical() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = load_config("small_p_cooling.json");
    cfg["interferometer"]["epsilon"] = json!(0.0);
    cfg["interferometer"]["kappa"] = json!(0.0);
    let path = write_config(tmp.path(), &cfg);
    let o = run_with(&path, &["compare"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = read_json(&tmp.path().join("small_p_compare.json"));
    let (gamma, delta, tau) = (
        side["lumped"]["gamma"].as_f64().unwrap(),
        side["lumped"]["delta"].as_f64().unwrap(),
        side["lumped"]["tau_s"].as_f64().unwrap(),
    );
    let (header, rows) = read_csv(&tmp.path().join("small_p_compare.csv"));
    let col = header.iter().position(|h| h == "rel_S_canonical").unwrap();
    for row in rows {
        let w: f64 = row[0].parse().unwrap();
        let ell = (gamma * gamma + (delta + w).powi(2)).sqrt();
        let err: f64 = row[col].parse().unwrap();
        assert!(err <= 2.5 * ell * tau, "Ω = {w}: {err}");
    }
}

#[test]
fn compare_outside_the_lumped_regime_still_succeeds() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(&repo_file("configs/p1.json"), &["compare"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = read_json(&tmp.path().join("p1_compare.json"));
    assert_eq!(side["validity"]["near_resonance"], false);
    assert_eq!(side["validity"]["violations"], json!(["south_detuning_not_small"]));
}

#[test]
fn cooling_without_light_leaves_bath_occupation() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = load_config("p1.json");
    cfg.as_object_mut().unwrap().remove("pump");
    let path = write_config(tmp.path(), &cfg);
    let o = run_with(&path, &["cooling"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = &read_json(&tmp.path().join("p1_cooling.json"))["configured"]["result"];
    let (n, n_t) = (r["n_bar"].as_f64().unwrap(), r["n_t"].as_f64().unwrap());
    // S̃_T(+) − S̃_T(−) cancels n_T digits
    assert!((n - n_t).abs() <= 4.0 * n_t * n_t * f64::EPSILON, "{n} vs {n_t}");
    assert_eq!(r["s_f_pos"], 0.0);
    assert_eq!(r["h_opt"], 0.0);
}

#[test]
fn cooling_optimum_in_small_asymmetry_regime() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(&repo_file("configs/small_p_cooling.json"), &["cooling", "--optimize"], tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = read_json(&tmp.path().join("small_p_cooling.json"));
    let opt = &side["optimum"];
    assert!(opt["chi"].as_f64().unwrap() <= 1e-3);
    assert!(opt["mode_ratio"].as_f64().unwrap() <= 1e-3);
    let n_opt = opt["result"]["n_bar"].as_f64().unwrap();
    let n_simple = opt["simplified"]["n_bar"].as_f64().unwrap();
    assert!((n_simple / n_opt - 1.0).abs() <= 0.05);
    for flag in ["thermal_asymmetry_small", "optical_asymmetry_strong", "optical_negative_small", "optical_dominates_thermal_asymmetry"] {
        assert_eq!(opt["simplified"]["regime"][flag], true, "{flag}");
    }
    assert!((opt["intracavity_power"].as_f64().unwrap() / 1e-7 - 1.0).abs() < 1e-12);

    let (header, rows) = read_csv(&tmp.path().join("small_p_cooling_landscape.csv"));
    assert_eq!(header, ["chi", "phi", "n_bar", "S_F_pos"]);
    assert_eq!(rows.len(), 64 * 64);
    for row in rows {
        if !row[2].is_empty() {
            assert!(n_opt <= row[2].parse::<f64>().unwrap());
        }
    }
}

#[test]
fn anti_damped_mode_exits_4() {
    let tmp = TempDir::new().unwrap();
    let cfg = repo_file("configs/blue_detuned.json");
    let o = run_with(&cfg, &["cooling"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("unstable"));
    let o = run_with(&cfg, &["cooling", "--optimize"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn cooling_needs_mechanics() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = load_config("p1.json");
    cfg.as_object_mut().unwrap().remove("mechanics");
    let path = write_config(tmp.path(), &cfg);
    let o = run_with(&path, &["cooling"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mechanics"));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = msi(&["verify"], &[]);
    assert!(a.status.success(), "{}", stderr(&a));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    for name in [
        "force_displacement_symmetry",
        "scattering_unitarity",
        "oracle_equivalence",
        "optical_kubo",
        "thermal_fdt",
        "lumped_convergence",
        "dispersive_coupling_zero",
        "dissipative_coupling_zero",
    ] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        assert!(line.ends_with("PASS"), "{line}");
    }
    let b = msi(&["verify"], &[]);
    assert_eq!(a.stdout, b.stdout);
    let c = msi(&["verify", "--seed", "77"], &[]);
    assert!(c.status.success());
    assert!(String::from_utf8(c.stdout).unwrap().starts_with("seed 77"));
}

#[test]
fn verify_reports_a_corrupted_tolerance() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = load_config("p1.json");
    cfg["tolerances"] = json!({ "verify": { "scattering_unitarity": 1e-20 } });
    let path = write_config(tmp.path(), &cfg);
    let o = msi(&["verify", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scattering_unitarity"));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("scattering_unitarity")).unwrap();
    assert!(line.ends_with("FAIL"));
}
