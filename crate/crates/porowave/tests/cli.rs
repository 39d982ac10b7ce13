//! End-to-end checks of the command-line surface: determinism, trace-file
//! schema, header round-trip, exit codes.

use std::path::PathBuf;

use porowave::cli::run;
use porowave::config::ProblemConfig;

fn small_config_text() -> String {
    let mut cfg = porowave::config::reference_config();
    cfg.time.t_end = 0.30;
    cfg.time.samples_per_period = Some(25.0);
    cfg.emit()
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("porowave-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn green_output_is_deterministic_and_well_formed() {
    let cfg_path = write_temp("ref.cfg", &small_config_text());
    let out_a = cfg_path.parent().unwrap().join("out_a");
    let out_b = cfg_path.parent().unwrap().join("out_b");
    for out in [&out_a, &out_b] {
        let code = run([
            "porowave".into(),
            "green".into(),
            cfg_path.display().to_string(),
            "-o".into(),
            out.display().to_string(),
        ]);
        assert_eq!(code, 0);
    }
    for file in ["green_r1.txt", "green_r2.txt"] {
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} not byte-identical across runs");
    }
    // Schema: 1 + 3*(waves+1) columns, header re-parses to the same config.
    let text = std::fs::read_to_string(out_a.join("green_r1.txt")).unwrap();
    let waves_line = text
        .lines()
        .find(|l| l.starts_with("# waves:"))
        .expect("waves header");
    let n_waves = waves_line.split_whitespace().count() - 3; // '#', 'waves:', 'total'
    assert_eq!(n_waves, 8);
    let first_data = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        first_data.split_whitespace().count(),
        1 + 3 * (n_waves + 1)
    );
    let parsed = ProblemConfig::parse_embedded(&text).unwrap();
    assert_eq!(parsed, ProblemConfig::parse(&small_config_text()).unwrap());
}

#[test]
fn seismogram_runs_and_respects_kernel_flag() {
    let cfg_path = write_temp("seis.cfg", &small_config_text());
    let out = cfg_path.parent().unwrap().join("seis_out");
    let code = run([
        "porowave".into(),
        "seismogram".into(),
        cfg_path.display().to_string(),
        "-o".into(),
        out.display().to_string(),
        "--kernel".into(),
        "wavelet-derivative".into(),
    ]);
    assert_eq!(code, 0);
    assert!(out.join("seismogram_r1.txt").exists());
    assert!(out.join("seismogram_r2.txt").exists());
}

#[test]
fn times_and_material_and_coeffs_succeed() {
    let cfg_path = write_temp("t.cfg", &small_config_text());
    for args in [
        vec!["porowave", "times"],
        vec!["porowave", "material"],
    ] {
        let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        full.push(cfg_path.display().to_string());
        assert_eq!(run(full), 0);
    }
    let code = run([
        "porowave".to_string(),
        "coeffs".into(),
        cfg_path.display().to_string(),
        "--qx-re".into(),
        "1e-4".into(),
        "--qx-im".into(),
        "-2e-5".into(),
        "--qy".into(),
        "5e-5".into(),
        "--incidence".into(),
        "pf".into(),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(run(["porowave", "material", "/no/such/file.cfg"]), 2);
    let bad = write_temp("bad.cfg", &small_config_text().replace("phi = ", "prty = "));
    assert_eq!(run(["porowave".to_string(), "material".into(), bad.display().to_string()]), 2);
    // Unphysical material is a config-class failure too.
    let unphys_text: String = small_config_text()
        .lines()
        .map(|l| if l.starts_with("phi = ") { "phi = 1.5".to_string() } else { l.to_string() })
        .map(|l| l + "\n")
        .collect();
    let unphys = write_temp("unphys.cfg", &unphys_text);
    assert_eq!(
        run(["porowave".to_string(), "material".into(), unphys.display().to_string()]),
        2
    );
}
