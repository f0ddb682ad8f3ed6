//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers (visible with `--nocapture`, or on failure).

use std::f64::consts::PI;
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modspec::lineshape::{
    cpt_first_harmonic, cpt_in_phase_closed_form, CptInPhaseVariant, CptParams,
    DoubleResonanceParams, Model, SeriesTruncation, TwoLevelParams,
};
use modspec::lockin::{error_signal, optimal_alpha, slope_components, DemodulationSettings};
use modspec::optimizer::{
    log_spaced, lorentzian_pair_shift, maximize_slope, stationarity_report, sweep_omega,
};

fn cpt_model() -> Model {
    Model::Cpt(CptParams {
        delta_bar: 0.0,
        omega_m_bar: 1.0,
        m: 1.0,
    })
}

fn two_level_model() -> Model {
    Model::TwoLevel(TwoLevelParams {
        delta_l_bar: 0.0,
        omega_m_bar: 1.0,
        m: 1.0,
        saturation: 1.0,
    })
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    (max - min) / min
}

fn binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(id: u32, name: &str, ok: bool, details: &str) {
    println!(
        "acceptance {id} ({name}): {} — {details}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {details}");
}

#[test]
fn criterion_1_cpt_global_optimum() {
    let start = Instant::now();
    let t = SeriesTruncation::adaptive();
    let grid = log_spaced(0.05, 10.0, 200).unwrap();
    let table = sweep_omega(&cpt_model(), &grid, &t, None).unwrap();
    let peak = table.peak().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = (peak.omega_m_bar - 0.764).abs() <= 0.02
        && (peak.m_opt - 0.652).abs() <= 0.01
        && (peak.alpha_opt - 3.0 * PI / 4.0).abs() <= 0.02 * PI
        && elapsed < 60.0;
    report(
        1,
        "CPT global optimum",
        ok,
        &format!(
            "peak omega_m_bar {:.4}, m_opt {:.4}, alpha_opt {:.4} (3pi/4 = {:.4}), {:.2} s",
            peak.omega_m_bar,
            peak.m_opt,
            peak.alpha_opt,
            3.0 * PI / 4.0,
            elapsed
        ),
    );
}

#[test]
fn criterion_2_high_frequency_plateau_and_decay() {
    let start = Instant::now();
    let t = SeriesTruncation::adaptive();
    let omegas = [20.0, 50.0, 200.0];
    let cpt: Vec<_> = omegas
        .iter()
        .map(|&w| maximize_slope(&cpt_model(), w, &t, None).unwrap())
        .collect();
    let cpt_slopes: Vec<f64> = cpt.iter().map(|p| p.slope_max).collect();
    let plateau_ok =
        spread(&cpt_slopes) < 0.01 && cpt.iter().all(|p| (p.m_opt - 0.54).abs() <= 0.01);
    let tl: Vec<_> = omegas
        .iter()
        .map(|&w| maximize_slope(&two_level_model(), w, &t, None).unwrap())
        .collect();
    // slope proportional to 1/omega: slope * omega constant within 5%
    let products: Vec<f64> = tl.iter().map(|p| p.slope_max * p.omega_m_bar).collect();
    let decay_ok = spread(&products) < 0.05;
    let elapsed = start.elapsed().as_secs_f64();
    let ok = plateau_ok && decay_ok && elapsed < 60.0;
    report(
        2,
        "high-frequency plateau and 1/omega decay",
        ok,
        &format!(
            "CPT slopes {:?} (spread {:.4}), m_opt {:?}; two-level slope*omega {:?} (spread {:.4}); {:.2} s",
            cpt_slopes,
            spread(&cpt_slopes),
            cpt.iter().map(|p| p.m_opt).collect::<Vec<_>>(),
            products,
            spread(&products),
            elapsed
        ),
    );
}

#[test]
fn criterion_3_low_frequency_stationarity() {
    let start = Instant::now();
    let t = SeriesTruncation::adaptive();
    let omegas = [0.1, 0.03, 0.01];
    let cpt = stationarity_report(&cpt_model(), &omegas, &t).unwrap();
    let cpt_slopes: Vec<f64> = cpt.iter().map(|r| r.slope).collect();
    let cpt_devs: Vec<f64> = cpt.iter().map(|r| r.deviation).collect();
    let tl = stationarity_report(&two_level_model(), &omegas, &t).unwrap();
    let tl_slopes: Vec<f64> = tl.iter().map(|r| r.slope).collect();
    let tl_devs: Vec<f64> = tl.iter().map(|r| r.deviation).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = spread(&cpt_slopes) < 0.01
        && spread(&cpt_devs) < 0.02
        && spread(&tl_slopes) < 0.02
        && spread(&tl_devs) < 0.02
        && elapsed < 120.0;
    report(
        3,
        "stationarity of slope and frequency deviation",
        ok,
        &format!(
            "CPT slope spread {:.4}, deviation spread {:.4}; two-level slope spread {:.4}, deviation spread {:.4}; {:.2} s",
            spread(&cpt_slopes),
            spread(&cpt_devs),
            spread(&tl_slopes),
            spread(&tl_devs),
            elapsed
        ),
    );
}

#[test]
fn criterion_4_pair_sum_identity() {
    let start = Instant::now();
    let t = SeriesTruncation::adaptive();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let p = CptParams {
            delta_bar: rng.gen_range(-3.0..3.0),
            omega_m_bar: rng.gen_range(0.05..5.0),
            m: rng.gen_range(f64::EPSILON..5.0),
        };
        let series = cpt_first_harmonic(&p, &t).unwrap().in_phase;
        let pair = cpt_in_phase_closed_form(&p, CptInPhaseVariant::PairSum).unwrap();
        let rel = (series - pair).abs() / series.abs().max(pair.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst <= 1e-10;
    report(
        4,
        "series vs Lorentzian-pair closed form",
        ok,
        &format!("worst relative difference {worst:.2e} over 100 draws; {elapsed:.2} s"),
    );
}

#[test]
fn criterion_5_lorentzian_pair_shift() {
    let shift = lorentzian_pair_shift();
    let exact = 1.0 / 3.0_f64.sqrt();
    let ok = (shift - exact).abs() <= 1e-4;
    report(
        5,
        "Lorentzian pair shift",
        ok,
        &format!("shift {shift:.6} vs 1/sqrt(3) = {exact:.6}"),
    );
}

fn parse_report(text: &str) -> Vec<(String, f64, String)> {
    // (model, rel_error, status) per data row
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            (
                cells[0].to_string(),
                cells[9].parse::<f64>().unwrap(),
                cells[11].to_string(),
            )
        })
        .collect()
}

#[test]
fn criterion_6_oracle_equivalence_suite() {
    let start = Instant::now();
    let out = binary(&["verify"]);
    let rows = parse_report(&String::from_utf8(out.stdout.clone()).unwrap());
    let all_pass = out.status.success()
        && rows.len() == 12
        && rows
            .iter()
            .all(|(_, rel, status)| *rel <= 1e-5 && status == "pass");
    let max_dr = |rows: &[(String, f64, String)]| {
        rows.iter()
            .filter(|(m, _, _)| m == "dr")
            .map(|(_, rel, _)| *rel)
            .fold(0.0_f64, f64::max)
    };
    let dr_weak = max_dr(&rows);
    // validity probe: growing drive must degrade the double-resonance rows
    let mid = binary(&["verify", "--s-rf", "1e-2"]);
    let rows_mid = parse_report(&String::from_utf8(mid.stdout).unwrap());
    let dr_mid = max_dr(&rows_mid);
    let strong = binary(&["verify", "--s-rf", "1.0"]);
    let rows_strong = parse_report(&String::from_utf8(strong.stdout).unwrap());
    let dr_strong = max_dr(&rows_strong);
    let monotone = dr_weak < dr_mid && dr_mid < dr_strong;
    let elapsed = start.elapsed().as_secs_f64();
    let ok = all_pass && monotone && elapsed < 180.0;
    report(
        6,
        "spectral vs time-domain oracle",
        ok,
        &format!(
            "12-point suite max rel {:.2e} (exit {:?}); DR degradation {:.2e} -> {:.2e} -> {:.2e}; {:.1} s",
            rows.iter().map(|r| r.1).fold(0.0_f64, f64::max),
            out.status.code(),
            dr_weak,
            dr_mid,
            dr_strong,
            elapsed
        ),
    );
}

#[test]
fn criterion_7_symmetry_suite() {
    let start = Instant::now();
    let t = SeriesTruncation::adaptive();
    let mut worst_odd = 0.0_f64;
    let params = [(0.7, 1.3, 0.9), (0.25, 0.4, 2.0), (1.8, 6.0, 0.45)];
    for (delta, omega, m) in params {
        let models = [
            Model::Cpt(CptParams {
                delta_bar: delta,
                omega_m_bar: omega,
                m,
            }),
            Model::TwoLevel(TwoLevelParams {
                delta_l_bar: delta,
                omega_m_bar: omega,
                m,
                saturation: 1.0,
            }),
            Model::DoubleResonance(DoubleResonanceParams {
                delta_rf_bar: delta,
                omega_m_bar: omega,
                m,
                drive: 1.0,
            }),
        ];
        for model in models {
            let plus = model.first_harmonic(&t).unwrap();
            let minus = model.with_detuning(-delta).first_harmonic(&t).unwrap();
            let scale = plus.in_phase.hypot(plus.quadrature);
            for i in 0..16 {
                let d = DemodulationSettings {
                    alpha: i as f64 * PI / 16.0,
                    harmonic: 1,
                };
                let odd = (error_signal(&plus, &d) + error_signal(&minus, &d)).abs() / scale;
                worst_odd = worst_odd.max(odd);
            }
        }
    }
    // exact zero response at zero modulation index
    let zero_ok = [
        Model::Cpt(CptParams {
            delta_bar: 0.5,
            omega_m_bar: 1.0,
            m: 0.0,
        }),
        Model::TwoLevel(TwoLevelParams {
            delta_l_bar: 0.5,
            omega_m_bar: 1.0,
            m: 0.0,
            saturation: 1.0,
        }),
        Model::DoubleResonance(DoubleResonanceParams {
            delta_rf_bar: 0.5,
            omega_m_bar: 1.0,
            m: 0.0,
            drive: 1.0,
        }),
    ]
    .iter()
    .all(|model| {
        let r = model.first_harmonic(&t).unwrap();
        r.in_phase == 0.0 && r.quadrature == 0.0
    });
    // closed-form optimal phase vs a fine grid scan
    let mut worst_alpha = 0.0_f64;
    for model in [
        cpt_model().with_modulation(0.764, 0.652),
        two_level_model().with_modulation(3.0, 1.1),
    ] {
        let c = slope_components(&model, &t).unwrap();
        let (_, best) = optimal_alpha(&c).unwrap();
        let mut scan = f64::NEG_INFINITY;
        let n = 10_000;
        for i in 0..n {
            let alpha = i as f64 * PI / n as f64;
            scan = scan.max((c.d_in_phase * alpha.cos() - c.d_quadrature * alpha.sin()).abs());
        }
        worst_alpha = worst_alpha.max((scan - best).abs() / best);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst_odd < 1e-12 && zero_ok && worst_alpha < 1e-6;
    report(
        7,
        "symmetry and phase-optimum checks",
        ok,
        &format!(
            "odd-symmetry residual {worst_odd:.2e}, zero-index exact {zero_ok}, alpha scan vs closed form {worst_alpha:.2e}; {elapsed:.2} s"
        ),
    );
}

#[test]
fn criterion_8_figure_export_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let prefix = format!("{}/acc_", dir.path().display());
    let first = binary(&["figure2", "--out", &prefix]);
    assert!(first.status.success());
    let a1 = std::fs::read(format!("{prefix}fig2a.csv")).unwrap();
    let b1 = std::fs::read(format!("{prefix}fig2b.csv")).unwrap();
    let second = binary(&["figure2", "--out", &prefix]);
    assert!(second.status.success());
    let a2 = std::fs::read(format!("{prefix}fig2a.csv")).unwrap();
    let b2 = std::fs::read(format!("{prefix}fig2b.csv")).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = a1 == a2 && b1 == b2 && !a1.is_empty();
    report(
        8,
        "byte-identical figure export",
        ok,
        &format!(
            "fig2a {} bytes, fig2b {} bytes, identical across runs; {:.2} s",
            a1.len(),
            b1.len(),
            elapsed
        ),
    );
}
