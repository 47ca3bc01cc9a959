//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::panic;
use std::time::Instant;

use common::{
    j0_series, mass_bound_by_bisection_fixed_length, mass_bound_by_bisection_fixed_period, Sweep,
};
use talbot::budget::{evaluate_budget, BudgetInputs};
use talbot::fringe::{extract_visibility, synthesize_scan, Noise};
use talbot::inertial::{
    coriolis_reduction, coriolis_shift, gravity_shift, mass_bound_fixed_length,
    mass_bound_fixed_period, sagnac_phase, velocity_selection_limit,
};
use talbot::model::{talbot_velocity, BeamModel, InertialEnvironment, InterferometerGeometry};
use talbot::oracle::{visibility_oracle, TrajectoryScenario};
use talbot::spectrum::{analyze_trace, predict_sweep, AccelTrace, SweepMode};
use talbot::units::AMU;
use talbot::vibration::{
    torsion_reduction, CommonPendulum, GaussianJitter, IndependentHarmonic, TorsionPendulum,
    VibrationMode,
};

const C70: f64 = 840.0 * AMU;
const EARTH: f64 = 5.55e-5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c70(v: f64, sigma: f64) -> (InterferometerGeometry, BeamModel, InertialEnvironment) {
    (
        InterferometerGeometry::new(990e-9, 0.38)
            .unwrap()
            .with_tilt(1e-3)
            .unwrap(),
        BeamModel::new(C70, v, sigma).unwrap(),
        InertialEnvironment::earth(EARTH).unwrap(),
    )
}

fn coriolis_shift_value() -> Outcome {
    let (g, b, e) = c70(200.0, 20.0);
    let dx = coriolis_shift(&g, &b, &e).shift;
    outcome(
        (dx - 80e-9).abs() <= 1e-9,
        format!("shift {:.3} nm, target 80 +- 1 nm", dx * 1e9),
    )
}

fn coriolis_reductions() -> Outcome {
    let cases = [
        (200.0, 0.998, 0.001),
        (100.0, 0.995, 0.001),
        (10.0, 0.596, 0.002),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, target, tol) in cases {
        let (g, b, e) = c70(v, 0.1 * v);
        let r = coriolis_reduction(&g, &b, &e);
        pass &= (r - target).abs() <= tol;
        parts.push(format!("{v} m/s: {r:.4} (target {target} +- {tol})"));
    }
    outcome(pass, parts.join("; "))
}

fn gravity_shifts() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, printed) in [(200.0, 36e-9), (100.0, 144e-9)] {
        let (g, b, e) = c70(v, 0.0);
        let dx = gravity_shift(&g, &b, &e).shift;
        pass &= (dx / printed - 1.0).abs() <= 0.03;
        parts.push(format!(
            "{v} m/s: {:.2} nm vs printed {:.0} nm",
            dx * 1e9,
            printed * 1e9
        ));
    }
    outcome(pass, parts.join("; ") + " (3 %)")
}

fn selection_limit() -> Outcome {
    let limit = velocity_selection_limit(100e-9, 1.0, EARTH);
    outcome(
        (limit / 2e-4 - 1.0).abs() <= 0.05,
        format!("{limit:.4e} s/m vs 2e-4 s/m (5 %)"),
    )
}

fn mass_bound_closure() -> Outcome {
    let mut rng = Sweep::new(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let d = rng.uniform(100e-9, 2e-6);
        let l = rng.uniform(0.1, 2.0);
        let v = rng.uniform(10.0, 500.0);
        let sigma = v * rng.uniform(0.01, 0.2);
        let omega = rng.uniform(1e-5, 1e-3);
        let a = mass_bound_fixed_period(d, sigma, omega)
            / mass_bound_by_bisection_fixed_period(d, v, sigma, omega);
        let b = mass_bound_fixed_length(l, v, sigma, omega)
            / mass_bound_by_bisection_fixed_length(l, v, sigma, omega);
        worst = worst.max((a - 1.0).abs()).max((b - 1.0).abs());
    }
    outcome(
        worst <= 1e-6,
        format!("worst relative deviation {worst:.2e} over 50 + 50 cases (1e-6)"),
    )
}

fn sagnac_identity() -> Outcome {
    let env = InertialEnvironment::rotation_only(EARTH).unwrap();
    let mut worst: f64 = 0.0;
    for order in 1..=3 {
        let geom = InterferometerGeometry::new(990e-9, 0.38)
            .unwrap()
            .with_talbot_order(order)
            .unwrap();
        let beam = BeamModel::monochromatic(C70, talbot_velocity(&geom, C70, order)).unwrap();
        let lhs = coriolis_shift(&geom, &beam, &env).fraction_of_period;
        let rhs = sagnac_phase(&geom, &beam, &env) / (2.0 * PI);
        worst = worst.max((lhs / rhs - 1.0).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("worst relative deviation {worst:.2e} for N = 1, 2, 3 (1e-12)"),
    )
}

fn insulin_budget() -> Outcome {
    let start = Instant::now();
    let inputs = BudgetInputs::new(
        InterferometerGeometry::new(257e-9, 0.4)
            .unwrap()
            .with_tilt(1e-3)
            .unwrap(),
        BeamModel::new(5730.0 * AMU, 300.0, 30.0).unwrap(),
        InertialEnvironment::earth(EARTH).unwrap(),
        10e-9,
    );
    let b = evaluate_budget(&inputs).unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = talbot::cli::run(
        ["talbot", "budget", "--preset", "insulin"],
        &mut out,
        &mut err,
    );
    let elapsed = start.elapsed().as_secs_f64();

    let rc = b.factor("R_C").unwrap();
    let rg = b.factor("R_G").unwrap();
    let rp = b.factor("R_P").unwrap();
    let ri = b.factor("R_I").unwrap();
    let near = |x: f64, t: f64| (x / t - 1.0).abs() <= 0.01;
    let pass = near(rc, 0.99)
        && near(rg, 0.999)
        && rp >= 0.75
        && near(rp, 0.775)
        && near(ri, 0.91)
        && code == 0
        && elapsed < 5.0;
    outcome(
        pass,
        format!("R_C {rc:.4}, R_G {rg:.4}, min R_P {rp:.4}, R_I {ri:.4}; library + CLI in {elapsed:.2} s"),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = Sweep::new(8);
    let mut failures = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut seed = 0;
    let samples = 1_000_000;
    for family in 0..4 {
        for _ in 0..50 {
            let d = rng.uniform(200e-9, 1.2e-6);
            let l = rng.uniform(0.2, 1.0);
            let v = rng.uniform(50.0, 400.0);
            let geom = InterferometerGeometry::new(d, l).unwrap();
            let beam = BeamModel::monochromatic(C70, v).unwrap();
            let mode = match family {
                0 => VibrationMode::CommonPendulum(
                    CommonPendulum::new(d * rng.uniform(0.0, 0.5), rng.uniform(10.0, 2000.0))
                        .unwrap(),
                ),
                1 => VibrationMode::TorsionPendulum(
                    TorsionPendulum::new(
                        rng.uniform(1e-6, 1e-3),
                        rng.uniform(1.0, 2000.0),
                        l * rng.uniform(-3.0, 2.0),
                    )
                    .unwrap(),
                ),
                2 => VibrationMode::IndependentHarmonic(
                    IndependentHarmonic::new(
                        [0, 1, 2].map(|_| d * rng.uniform(0.0, 0.3)),
                        [0, 1, 2].map(|_| rng.uniform(10.0, 2000.0)),
                    )
                    .unwrap(),
                ),
                _ => VibrationMode::GaussianJitter(
                    GaussianJitter::new([0, 1, 2].map(|_| d * rng.uniform(0.0, 0.15))).unwrap(),
                ),
            };
            let scenario =
                TrajectoryScenario::new(geom, beam, vec![mode.into()], seed, samples).unwrap();
            seed += 1;
            let r = visibility_oracle(&scenario);
            let allowed = (3.0 * r.standard_error).max(1e-3);
            let diff = (r.r_oracle - r.closed_form_r).abs();
            worst_ratio = worst_ratio.max(diff / allowed);
            if diff > allowed {
                failures += 1;
                eprintln!("  mismatch: {} {r:?}", mode.name());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && elapsed < 120.0,
        format!(
            "200 configs x 1e6 samples, {failures} outside max(3 se, 1e-3), worst |diff|/allowed {worst_ratio:.3}, {elapsed:.1} s (< 120 s)"
        ),
    )
}

fn torsion_limit() -> Outcome {
    let geom = InterferometerGeometry::new(1e-6, 0.38).unwrap();
    let beam = BeamModel::monochromatic(C70, 200.0).unwrap();
    let omega = 1e-3;
    let limit = j0_series(4.0 * PI * omega * 0.38 * 0.38 / (1e-6 * 200.0)).abs();
    let mut rng = Sweep::new(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let z0 = 0.38 * rng.uniform(-3.0, 2.0);
        let r = torsion_reduction(
            &TorsionPendulum::new(omega, 1e-3, z0).unwrap(),
            &geom,
            &beam,
        );
        worst = worst.max((r - limit).abs());
    }
    outcome(
        worst <= 1e-6,
        format!("|J0| limit {limit:.6}, worst deviation {worst:.2e} over 20 pivots (1e-6)"),
    )
}

fn local_minima(values: &[(f64, f64)]) -> Vec<f64> {
    values
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0)
        .collect()
}

fn node_structure() -> Outcome {
    let (l, v, d) = (0.38, 200.0, 990e-9);
    let geom = InterferometerGeometry::new(d, l).unwrap();
    let beam = BeamModel::monochromatic(C70, v).unwrap();
    let grid: Vec<f64> = (1..=2000).map(f64::from).collect();
    let node = v / l;
    let mut pass = true;
    let mut parts = Vec::new();

    // nodes: R = 1 at f = n v / L, and the nearest 1 Hz grid point is a local maximum
    for ratio in [0.01, 0.05, 0.09, 0.25, 0.5] {
        let amp = ratio * d;
        let exact: Vec<f64> = (1..=3).map(|n| n as f64 * node).collect();
        let r = predict_sweep(&geom, &beam, amp, &exact, SweepMode::CommonPendulum).unwrap();
        pass &= r.iter().all(|&(_, r)| r == 1.0);
        let sweep = predict_sweep(&geom, &beam, amp, &grid, SweepMode::CommonPendulum).unwrap();
        for f in &exact {
            let i = (f.round() as usize) - 1;
            pass &= sweep[i].1 >= sweep[i - 1].1 && sweep[i].1 >= sweep[i + 1].1;
        }
    }
    parts.push("R = 1 at n v/L (n = 1..3) for A/d in {0.01, 0.05, 0.09, 0.25, 0.5}".to_owned());

    // minima at (n + 1/2) v / L while 8 pi A/d stays below the first J0 zero
    let expected: Vec<f64> = (0..4).map(|n| ((n as f64 + 0.5) * node).round()).collect();
    for ratio in [0.01, 0.05, 0.09] {
        let sweep =
            predict_sweep(&geom, &beam, ratio * d, &grid, SweepMode::CommonPendulum).unwrap();
        let minima = local_minima(&sweep);
        pass &= minima == expected;
    }
    parts.push(format!(
        "grid minima at {expected:?} Hz for A/d in {{0.01, 0.05, 0.09}}"
    ));

    let sweep = predict_sweep(&geom, &beam, 0.5 * d, &grid, SweepMode::CommonPendulum).unwrap();
    let at_half = sweep[expected[0] as usize - 1].1;
    parts.push(format!(
        "[info] at A/d = 0.5 the J0 argument passes its first zero, R({} Hz) = {at_half:.4} is a local maximum; grid minima at {:?} Hz",
        expected[0],
        local_minima(&sweep).iter().take(4).collect::<Vec<_>>()
    ));
    outcome(pass, parts.join("; "))
}

fn fringe_round_trip() -> Outcome {
    let d = 990e-9;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for v in [0.105, 0.395, 0.50] {
        let scan = synthesize_scan(v, 800.0, 0.7, d, 100, 2.0 * d, Noise::None, 0).unwrap();
        worst = worst.max((extract_visibility(&scan).unwrap().visibility - v).abs());
    }
    pass &= worst <= 1e-9;
    let mut rates = Vec::new();
    for (v, offset) in [(0.105, 500.0), (0.395, 1000.0)] {
        let hits = (0..1000u64)
            .filter(|&seed| {
                let scan =
                    synthesize_scan(v, offset, 0.0, d, 50, 2.0 * d, Noise::Poisson, seed).unwrap();
                (extract_visibility(&scan).unwrap().visibility - v).abs() <= 0.02
            })
            .count();
        pass &= hits >= 950;
        rates.push(format!(
            "V = {v} at {offset} counts: {hits}/1000 within 0.02"
        ));
    }
    outcome(
        pass,
        format!(
            "noiseless worst error {worst:.1e} (1e-9); {}",
            rates.join(", ")
        ),
    )
}

fn calibration_chain() -> Outcome {
    let rate = 5000.0;
    let samples: Vec<f64> = (0..8192)
        .map(|i| 0.010 * (2.0 * PI * 100.0 * i as f64 / rate).sin())
        .collect();
    let spectrum = analyze_trace(&AccelTrace::new(rate, samples, 0.316).unwrap());
    match spectrum.line_near(100.0) {
        Some(line) => outcome(
            (line.displacement / 80.2e-9 - 1.0).abs() <= 0.01,
            format!(
                "line at {:.3} Hz, x = {:.3} nm vs 80.2 nm (1 %)",
                line.frequency,
                line.displacement * 1e9
            ),
        ),
        None => outcome(false, "no line near 100 Hz"),
    }
}

fn gravity_discrepancy_report() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = talbot::cli::run(
        [
            "talbot",
            "oracle",
            "velocity-average",
            "--preset",
            "insulin",
            "--format",
            "csv",
        ],
        &mut out,
        &mut err,
    );
    let text = String::from_utf8(out).unwrap();
    let row = text.lines().find(|l| l.starts_with("R_G,"));
    let Some(row) = row else {
        return outcome(false, format!("exit {code}, no R_G row in {text:?}"));
    };
    let fields: Vec<f64> = row.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
    let (printed, averaged, discrepancy) = (fields[0], fields[1], fields[3]);
    outcome(
        code == 0
            && text.starts_with("quantity,closed_form,oracle,standard_error,relative_discrepancy\n")
            && (printed / 0.999 - 1.0).abs() <= 0.01
            && discrepancy != 0.0
            && discrepancy.is_finite(),
        format!("printed form {printed:.6}, quadrature average {averaged:.6}, relative_discrepancy {discrepancy:.3e}"),
    )
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Check; 13] = [
        ("Coriolis shift", coriolis_shift_value),
        ("Coriolis reduction values", coriolis_reductions),
        ("gravity shifts", gravity_shifts),
        ("velocity-selection limit", selection_limit),
        ("mass-bound closure", mass_bound_closure),
        ("Sagnac identity", sagnac_identity),
        ("insulin budget", insulin_budget),
        ("phase-average oracle equivalence", oracle_equivalence),
        ("torsion low-frequency limit", torsion_limit),
        ("pendulum node structure", node_structure),
        ("fringe round trip", fringe_round_trip),
        ("calibration chain", calibration_chain),
        (
            "gravity reduction discrepancy report",
            gravity_discrepancy_report,
        ),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {title}: {}", i + 1, result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
