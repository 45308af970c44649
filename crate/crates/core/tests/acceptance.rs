//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances and scenario sizes are the
//! constants at the top of each criterion.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use lensaoa::analysis::{
    avg_power_approx_at, avg_power_mc, complexity_report, mse_lower_bound, power_report, squint_map, PowerConstants,
};
use lensaoa::channel::{draw_cluster, synthesize_rx};
use lensaoa::estimators::{ms_estimate_counted, MulCounter};
use lensaoa::harness::config::snr_to_n0;
use lensaoa::harness::sweeps::{snr_sweep_with, Bench};
use lensaoa::harness::tables::subcommand_table;
use lensaoa::harness::validate::oracle_max_rel_error;
use lensaoa::harness::{validate, ArrayChoice, SimConfig, ThetaPolicy};
use lensaoa::lens::{CarrierGrid, LensSpec};
use lensaoa::placement::{raa_sine_grid, solve_common_ratio, uniform_sine_grid};
use lensaoa::rng::{domain, SeedTree};
use lensaoa::SPEED_OF_LIGHT;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget: Duration) -> (bool, String) {
    (elapsed <= budget, format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()))
}

fn c1_common_ratio() -> Outcome {
    const TOL: f64 = 0.005;
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, want) in [(21usize, 1.155), (15, 1.249)] {
        let start = Instant::now();
        let r = solve_common_ratio(n, 0.2, 1e-12);
        let dt = start.elapsed();
        match r {
            Ok(r) => {
                let good = (r - want).abs() <= TOL && dt < Duration::from_millis(1);
                ok &= good;
                parts.push(format!("N={n}: r={r:.4} (want {want} +- {TOL}) in {}us", dt.as_micros()));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("N={n}: {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn c2_complexity() -> Outcome {
    let (t_ms, t_corr1) = complexity_report(6, 15, 1);
    let (_, t_corr) = complexity_report(6, 15, 1801);
    let mut ok = t_ms == 97 && t_corr1 == 1350 && t_corr == 1350 * 1801;
    // instrumented counter on real noisy runs
    let seeds = SeedTree::new(2);
    let mut counted = Vec::new();
    for (n, m) in [(15usize, 6usize), (21, 20), (33, 12)] {
        let lens = LensSpec::for_elements(n, 28e9).unwrap();
        let grid = CarrierGrid::new(28e9, 2e9, m).unwrap();
        for geometry in [uniform_sine_grid(n, lens).unwrap(), raa_sine_grid(n, 2.0 / 28.0, lens).unwrap()] {
            for t in 0..5 {
                let params = lensaoa::channel::ChannelParams {
                    theta_c: 0.1 * t as f64,
                    noise_n0: 0.1,
                    ..Default::default()
                };
                let c = draw_cluster(&params, &grid, &mut seeds.stream(domain::CLUSTER, t)).unwrap();
                let f = synthesize_rx(&c, &geometry, &grid, &params, &mut seeds.stream(domain::NOISE, t)).unwrap();
                let mut counter = MulCounter::default();
                ms_estimate_counted(&f, &geometry, &grid, &mut counter).unwrap();
                ok &= counter.count == (m * n + m + 1) as u64;
                counted.push(counter.count);
            }
        }
    }
    outcome(
        ok,
        format!("T_MS={t_ms}, T_Corr(d=1)={t_corr1}, T_Corr(d=1801)={t_corr}; counter runs {}", counted.len()),
    )
}

fn c3_power() -> Outcome {
    let (p_ms, p_conv) = power_report(32, &PowerConstants::default());
    outcome(p_ms == 1290.0 && p_conv == 2400.0, format!("P_MS={p_ms} mW, P_Conv={p_conv} mW"))
}

fn c4_oracle() -> Outcome {
    const LIMIT: f64 = 1e-2;
    let grid = CarrierGrid::new(28e9, 2e9, 6).unwrap();
    let start = Instant::now();
    let err = oracle_max_rel_error(&grid, 200, 4).unwrap();
    let (fast, t) = within(start.elapsed(), Duration::from_secs(10));
    outcome(err < LIMIT && fast, format!("max rel error {err:.2e} (limit {LIMIT:.0e}); {t}"))
}

fn c5_power_convergence() -> Outcome {
    const THETAS: usize = 25;
    const TRIALS_PER_THETA: usize = 5000;
    let start = Instant::now();
    let grid = CarrierGrid::new(28e9, 2e9, 6).unwrap();
    let mut gaps = Vec::new();
    for n in [9usize, 15, 21, 27] {
        let lens = LensSpec::for_elements(n, 28e9).unwrap();
        let geometry = raa_sine_grid(n, grid.fractional_bandwidth(), lens).unwrap();
        let mut acc = 0.0;
        for i in 0..THETAS {
            let theta = (-70.0 + 140.0 * i as f64 / (THETAS - 1) as f64).to_radians();
            let params = lensaoa::channel::ChannelParams {
                theta_c: theta,
                paths: 50,
                c_ao: 8f64.to_radians(),
                ..Default::default()
            };
            let seeds = SeedTree::new(5).child(i as u64);
            let mc = avg_power_mc(&geometry, &grid, &params, TRIALS_PER_THETA, &seeds).unwrap();
            let approx = avg_power_approx_at(&geometry, &grid, theta).unwrap();
            acc += (mc - approx).abs() / grid.len() as f64;
        }
        gaps.push(acc / THETAS as f64);
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let (fast, t) = within(start.elapsed(), Duration::from_secs(120));
    outcome(
        decreasing && fast,
        format!(
            "mean |G_mc - G_approx| / M for N=9,15,21,27: {:.4} {:.4} {:.4} {:.4}; {t}",
            gaps[0], gaps[1], gaps[2], gaps[3]
        ),
    )
}

fn c6_outage() -> Outcome {
    const BRACKET: (f64, f64) = (0.1, 0.3);
    const MARGIN: f64 = 0.05;
    let start = Instant::now();
    let mut cfg = SimConfig::default();
    cfg.trials = 10_000;
    cfg.array.elements = 15;
    cfg.carrier.subcarriers = 6;
    cfg.channel.paths = 10;
    cfg.channel.c_ao_deg = 1.0;
    cfg.sweep.snr_db = vec![15.0];
    let points = snr_sweep_with(&Bench::new(&cfg).unwrap()).unwrap();
    let p = |a| points.iter().find(|p| p.array == a).unwrap().p_req;
    let (raa, laa) = (p(ArrayChoice::Raa), p(ArrayChoice::Uniform));
    let in_bracket = (BRACKET.0..=BRACKET.1).contains(&raa);
    let gap_ok = laa - raa >= MARGIN;
    let (fast, t) = within(start.elapsed(), Duration::from_secs(120));
    outcome(
        in_bracket && gap_ok && fast,
        format!(
            "p_req RAA {raa:.4} (bracket [{}, {}]: {}), LAA {laa:.4} (LAA - RAA >= {MARGIN}: {}); {t}",
            BRACKET.0,
            BRACKET.1,
            if in_bracket { "ok" } else { "missed" },
            if gap_ok { "ok" } else { "missed" },
        ),
    )
}

fn c7_mse_bound() -> Outcome {
    const FLOOR_DROP: f64 = 0.10;
    let start = Instant::now();
    let mut cfg = SimConfig::default();
    cfg.trials = 4000;
    cfg.array.elements = 21;
    cfg.array.kinds = vec![ArrayChoice::Raa];
    cfg.carrier.subcarriers = 20;
    cfg.channel.paths = 50;
    cfg.channel.c_ao_deg = 8.0;
    cfg.sweep.snr_db = vec![5.0, 10.0, 15.0, 20.0, 30.0];
    let bench = Bench::new(&cfg).unwrap();
    let points = snr_sweep_with(&bench).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in points.iter().filter(|p| p.abscissa <= 15.0) {
        let lb = mse_lower_bound(20, p.mean_subset, 21, snr_to_n0(p.abscissa), p.mean_g).unwrap();
        ok &= p.mse >= lb;
        parts.push(format!("{}dB mse {:.3e} >= lb {:.3e}", p.abscissa, p.mse, lb));
    }
    let mse = |snr: f64| points.iter().find(|p| p.abscissa == snr).unwrap().mse;
    let drop = (mse(20.0) - mse(30.0)) / mse(20.0);
    let floor = drop < FLOOR_DROP;
    ok &= floor;
    parts.push(format!(
        "floor: mse 20dB {:.3e} -> 30dB {:.3e}, drop {:.1}% (limit {:.0}%)",
        mse(20.0),
        mse(30.0),
        100.0 * drop,
        100.0 * FLOOR_DROP
    ));
    let (fast, t) = within(start.elapsed(), Duration::from_secs(300));
    parts.push(t);
    outcome(ok && fast, parts.join("; "))
}

fn c8_angle_profile() -> Outcome {
    const REQ_FRACTION: f64 = 0.95;
    let start = Instant::now();
    let mut cfg = SimConfig::default();
    cfg.trials = 3000;
    cfg.array.elements = 21;
    cfg.carrier.subcarriers = 6;
    cfg.channel.paths = 10;
    cfg.channel.c_ao_deg = 1.0;

    cfg.channel.theta = ThetaPolicy::Uniform {
        min_deg: -50.0,
        max_deg: 50.0,
    };
    cfg.sweep.snr_db = vec![0.0];
    let low = snr_sweep_with(&Bench::new(&cfg).unwrap()).unwrap();
    let mse = |a| low.iter().find(|p| p.array == a).unwrap().mse;
    let (raa0, laa0) = (mse(ArrayChoice::Raa), mse(ArrayChoice::Uniform));
    let part_a = raa0 <= laa0;

    cfg.channel.theta = ThetaPolicy::Uniform {
        min_deg: -70.0,
        max_deg: 70.0,
    };
    cfg.array.kinds = vec![ArrayChoice::Raa];
    cfg.sweep.snr_db = vec![10.0];
    let high = snr_sweep_with(&Bench::new(&cfg).unwrap()).unwrap();
    let met = 1.0 - high[0].p_req;
    let part_b = met >= REQ_FRACTION;

    let (fast, t) = within(start.elapsed(), Duration::from_secs(300));
    outcome(
        part_a && part_b && fast,
        format!(
            "0dB over +-50deg: mse RAA {raa0:.4e} <= LAA {laa0:.4e}: {}; 10dB over +-70deg: RAA meets 7e-4 rad^2 in {:.1}% of trials (need {:.0}%): {}; {t}",
            if part_a { "ok" } else { "missed" },
            100.0 * met,
            100.0 * REQ_FRACTION,
            if part_b { "ok" } else { "missed" },
        ),
    )
}

fn c9_squint_map() -> Outcome {
    const DOPPLER_LIMIT: f64 = 2e-7;
    let grid = CarrierGrid::new(28e9, 2e9, 20).unwrap();
    let lens = LensSpec::for_elements(21, 28e9).unwrap();
    let geometry = uniform_sine_grid(21, lens).unwrap();
    let angles: Vec<f64> = (0..=180).map(|i| -PI / 2.0 + PI * i as f64 / 180.0).collect();
    let (v_rx, v_sc) = (-100.0 / 3.6, 100.0 / 3.6);
    let map = squint_map(&geometry, &grid, &angles, v_rx, v_sc).unwrap();

    let zero_ok = map.iter().filter(|p| p.theta == 0.0).all(|p| p.sine_offset == 0.0);
    let mut monotone = true;
    for &f in &grid.freqs {
        let mut row: Vec<_> = map.iter().filter(|p| p.freq_hz == f).collect();
        row.sort_by(|a, b| a.theta.sin().abs().total_cmp(&b.theta.sin().abs()));
        monotone &= row.windows(2).all(|w| w[1].sine_offset.abs() >= w[0].sine_offset.abs());
    }
    let table_max = map.iter().map(|p| p.doppler_offset).fold(0.0, f64::max);
    // 200 km/h closing speed straight at the top carrier
    let direct = (200.0 / 3.6) / SPEED_OF_LIGHT * grid.f_max() / grid.center_hz;
    let doppler_ok = table_max <= DOPPLER_LIMIT && direct <= DOPPLER_LIMIT;
    outcome(
        zero_ok && monotone && doppler_ok,
        format!(
            "zero row {zero_ok}; monotone {monotone}; Doppler offset max {table_max:.3e} (default speeds), {direct:.3e} (200 km/h) <= {DOPPLER_LIMIT:.0e}"
        ),
    )
}

fn c10_determinism() -> Outcome {
    let mut cfg = SimConfig::default();
    cfg.trials = 60;
    cfg.array.elements = 15;
    cfg.sweep.snr_db = vec![0.0, 10.0, 20.0];
    cfg.sweep.theta_deg = vec![-40.0, 0.0, 35.0];
    cfg.estimators.list = vec![
        lensaoa::harness::EstimatorChoice::Ms,
        lensaoa::harness::EstimatorChoice::Correlator,
        lensaoa::harness::EstimatorChoice::CorrelatorTopk,
    ];
    cfg.estimators.d_dic = 361;
    let names = [
        "simulate-mse",
        "simulate-outage",
        "angle-profile",
        "power-profile",
        "placement",
        "squint-map",
        "power-report",
        "bounds",
    ];
    let mut bad = Vec::new();
    for name in names {
        let render = |threads: usize| {
            let mut c = cfg.clone();
            c.threads = threads;
            subcommand_table(name, &c, ArrayChoice::Raa).unwrap().render()
        };
        let a = render(1);
        if a != render(1) || a != render(8) {
            bad.push(name);
        }
    }
    let v1 = validate(&cfg).unwrap().to_string();
    if v1 != validate(&cfg).unwrap().to_string() {
        bad.push("validate");
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} subcommands byte-identical across reruns and 1 vs 8 threads", names.len() + 1)
        } else {
            format!("differing output: {}", bad.join(", "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("C1 common ratio", c1_common_ratio),
        ("C2 complexity", c2_complexity),
        ("C3 power model", c3_power),
        ("C4 oracle equivalence", c4_oracle),
        ("C5 average-power convergence", c5_power_convergence),
        ("C6 outage at 15 dB", c6_outage),
        ("C7 MSE bound and floor", c7_mse_bound),
        ("C8 angle profile", c8_angle_profile),
        ("C9 squint map", c9_squint_map),
        ("C10 determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
