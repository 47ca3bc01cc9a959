use talbot::budget::{evaluate_budget, BudgetInputs};
use talbot::inertial::{coriolis_reduction, coriolis_shift, mass_bound_fixed_period};
use talbot::model::{BeamModel, InertialEnvironment, InterferometerGeometry};
use talbot::numfmt::sci;
use talbot::units::AMU;
use talbot::vibration::{pendulum_reduction, CommonPendulum};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("talbot").chain(args.iter().copied());
    let code = talbot::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn csv_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no row {key} in {text}"))
        .split(',')
        .next()
        .unwrap()
        .to_owned()
}

fn c70_fast() -> (InterferometerGeometry, BeamModel, InertialEnvironment) {
    (
        InterferometerGeometry::new(990e-9, 0.38)
            .unwrap()
            .with_tilt(1e-3)
            .unwrap(),
        BeamModel::new(840.0 * AMU, 200.0, 20.0).unwrap(),
        InertialEnvironment::earth(5.55e-5).unwrap(),
    )
}

#[test]
fn coriolis_visibility_example() {
    let (code, out, _) = run(&[
        "visibility",
        "coriolis",
        "--omega",
        "5.55e-5rad/s",
        "--L",
        "0.38m",
        "--d",
        "990nm",
        "--v",
        "200m/s",
        "--sigma-v",
        "20m/s",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("R_C = 0.9987"), "{out}");
}

#[test]
fn csv_numbers_equal_library_values() {
    let (g, b, e) = c70_fast();
    let (code, out, _) = run(&[
        "--format",
        "csv",
        "visibility",
        "coriolis",
        "--preset",
        "c70-fast",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        format!(
            "quantity,value,unit\nR_C,{},\n",
            sci(coriolis_reduction(&g, &b, &e))
        )
    );

    let (_, out, _) = run(&[
        "--format", "csv", "shift", "coriolis", "--preset", "c70-fast",
    ]);
    assert_eq!(
        csv_value(&out, "shift"),
        sci(coriolis_shift(&g, &b, &e).shift)
    );

    let (_, out, _) = run(&["--format", "csv", "mass-limit", "--preset", "c70-fast"]);
    assert_eq!(
        csv_value(&out, "mass_bound_fixed_period"),
        sci(mass_bound_fixed_period(990e-9, 20.0, 5.55e-5))
    );
}

#[test]
fn pendulum_sweep_csv() {
    let (code, out, _) = run(&[
        "--format",
        "csv",
        "sweep",
        "pendulum",
        "--A",
        "495nm",
        "--d",
        "990nm",
        "--L",
        "0.38m",
        "--v",
        "200m/s",
        "--f",
        "1:1000:1Hz",
    ]);
    assert_eq!(code, 0);
    assert!(!out.contains('\r'));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("freq_hz,R"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (f, r) = l.split_once(',').unwrap();
            (f.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 1000);
    let geom = InterferometerGeometry::new(990e-9, 0.38).unwrap();
    let beam = BeamModel::monochromatic(840.0 * AMU, 200.0).unwrap();
    for &(f, r) in &rows {
        let expected = pendulum_reduction(&CommonPendulum::new(495e-9, f).unwrap(), &geom, &beam);
        assert!(
            (r - expected).abs() <= 1e-12 * expected.max(1e-300),
            "{f}: {r} vs {expected}"
        );
    }
    // the grid points either side of the v/L node at 526.3 Hz are both within 1e-7 of 1
    assert!(rows[525].1 > 1.0 - 1e-7 && rows[526].1 > 1.0 - 1e-7);
}

#[test]
fn insulin_budget_preset() {
    let (code, out, _) = run(&["--format", "csv", "budget", "--preset", "insulin"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("factor,value,formula_ref\n"));
    let inputs = BudgetInputs::new(
        InterferometerGeometry::new(257e-9, 0.4)
            .unwrap()
            .with_tilt(1e-3)
            .unwrap(),
        BeamModel::new(5730.0 * AMU, 300.0, 30.0).unwrap(),
        InertialEnvironment::earth(5.55e-5).unwrap(),
        10e-9,
    );
    let budget = evaluate_budget(&inputs).unwrap();
    for name in ["R_C", "R_G", "R_P", "R_I"] {
        assert_eq!(
            csv_value(&out, name),
            sci(budget.factor(name).unwrap()),
            "{name}"
        );
    }
    assert_eq!(csv_value(&out, "combined"), sci(budget.combined));

    let (code, text, _) = run(&["budget", "--preset", "insulin"]);
    assert_eq!(code, 0);
    assert!(text.contains("R_P") && text.contains("note:"));
}

#[test]
fn flags_override_config_which_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# slower beam\nv = 100m/s\nsigma-v = 10m/s\n").unwrap();
    let cfg = path.to_str().unwrap();
    let (_, from_config, _) = run(&[
        "--format",
        "csv",
        "--config",
        cfg,
        "visibility",
        "coriolis",
        "--preset",
        "c70-fast",
    ]);
    let (_, slow, _) = run(&[
        "--format",
        "csv",
        "visibility",
        "coriolis",
        "--preset",
        "c70-slow",
    ]);
    assert_eq!(from_config, slow);
    let (_, flagged, _) = run(&[
        "--format",
        "csv",
        "--config",
        cfg,
        "visibility",
        "coriolis",
        "--preset",
        "c70-fast",
        "--v",
        "200m/s",
        "--sigma-v",
        "20m/s",
    ]);
    let (_, fast, _) = run(&[
        "--format",
        "csv",
        "visibility",
        "coriolis",
        "--preset",
        "c70-fast",
    ]);
    assert_eq!(flagged, fast);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "d = 1um\nbogus = 3\n").unwrap();
    let (code, out, err) = run(&[
        "--config",
        path.to_str().unwrap(),
        "budget",
        "--preset",
        "insulin",
    ]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("bogus"), "{err}");

    for args in [
        &[
            "visibility",
            "coriolis",
            "--omega",
            "5.55e-5",
            "--L",
            "0.38m",
        ][..],
        &[
            "visibility",
            "coriolis",
            "--preset",
            "c70-fast",
            "--v",
            "-3m/s",
        ],
        &["visibility", "coriolis", "--L", "0.38m"],
        &["nonsense"],
        &["budget", "--preset", "no-such-preset"],
        &["fit", "--input", "/nonexistent/scan.csv", "--d", "1um"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 1, "{args:?}");
        assert!(err.starts_with("error"), "{args:?}: {err}");
    }
}

#[test]
fn quadrature_failure_exits_two() {
    let (code, _, err) = run(&[
        "oracle",
        "velocity-average",
        "--preset",
        "c70-fast",
        "--omega",
        "1rad/s",
        "--sigma-v",
        "100m/s",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("did not converge"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("budget"));
}

#[test]
fn synthesize_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let file = path.to_str().unwrap();
    let (code, _, err) = run(&[
        "--seed",
        "7",
        "synthesize",
        "--d",
        "990nm",
        "--V",
        "0.395",
        "--offset",
        "1000",
        "--points",
        "50",
        "--noise",
        "poisson",
        "--output",
        file,
    ]);
    assert_eq!(code, 0, "{err}");
    let first = std::fs::read_to_string(&path).unwrap();
    assert!(first.starts_with("position_m,counts\n"));

    let (code, _, _) = run(&[
        "--seed",
        "7",
        "synthesize",
        "--d",
        "990nm",
        "--V",
        "0.395",
        "--offset",
        "1000",
        "--points",
        "50",
        "--noise",
        "poisson",
        "--output",
        file,
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);

    let (code, out, _) = run(&["--format", "csv", "fit", "--d", "990nm", "--input", file]);
    assert_eq!(code, 0);
    let v: f64 = csv_value(&out, "V").parse().unwrap();
    assert!((v - 0.395).abs() < 0.05, "{v}");
}

#[test]
fn oracle_output_independent_of_jobs() {
    let args = |jobs: &'static str| {
        [
            "--format",
            "csv",
            "--seed",
            "3",
            "--jobs",
            jobs,
            "oracle",
            "pendulum",
            "--preset",
            "c70-fast",
            "--A",
            "300nm",
            "--f",
            "400Hz",
            "--samples",
            "100000",
        ]
    };
    let (code, one, _) = run(&args("1"));
    assert_eq!(code, 0);
    let (_, four, _) = run(&args("4"));
    assert_eq!(one, four);
    assert!(
        one.starts_with("quantity,closed_form,oracle,standard_error,relative_discrepancy\nR_P,")
    );
}

#[test]
fn spectrum_of_written_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let mut text = String::from("time_s,volts\n");
    for i in 0..8192 {
        let t = i as f64 / 5000.0;
        text.push_str(&format!(
            "{t},{}\n",
            0.01 * (2.0 * std::f64::consts::PI * 100.0 * t).sin()
        ));
    }
    std::fs::write(&path, text).unwrap();
    let (code, out, err) = run(&[
        "--format",
        "csv",
        "spectrum",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("freq_hz,volts,accel_ms2,displacement_m"));
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((row[0] - 100.0).abs() < 0.1);
    assert!((row[3] / 80.2e-9 - 1.0).abs() < 0.01);
}
