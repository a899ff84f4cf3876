//! One line per acceptance criterion; the test fails if any line does.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use whipchain::dynamics::initial::InitialData;
use whipchain::dynamics::{detect_blowup, growth_phase, project, run, BlowupSample, IntegratorConfig, Termination};
use whipchain::energy::{u0, v0};
use whipchain::inequalities::a2_battery;
use whipchain::sampling::{random_sequence, ChainSampler};
use whipchain::spectral::legendre::seminorm_by_quadrature;
use whipchain::spectral::{
    continuize_gn, discrete_coefficients, discrete_seminorm_sq, discretize_fn, gram, r_coefficient, AngleState,
};
use whipchain::tension::{
    certify_bounds, compute_alpha_beta, green_matrix, solve_tension, AlphaBeta, GreenMatrix, TensionMethod,
};
use whipchain::ChainState;

const SEED: u64 = 20_240_601;

const GREEN_DIRECT_TOL: f64 = 1e-10;
const GREEN_DIRECT_SECONDS: f64 = 30.0;
const STRAIGHT_TOL: f64 = 1e-13;
const CORNER_TOL: f64 = 1e-12;
const V0_TOL: f64 = 1e-12;
const U0_DRIFT_TOL: f64 = 1e-6;
const HALVING_BAND: f64 = 0.2;
const PERIOD_POSITION_TOL: f64 = 1e-4;
const GRAM_J0_TOL: f64 = 1e-10;
const GRAM_R_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-12;
const ISOMETRY_TOL: f64 = 1e-10;
const EXPONENT_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + offset)
}

fn max_position_gap(a: &ChainState, b: &ChainState) -> f64 {
    (1..=a.n() as i64)
        .map(|k| {
            a.eta()
                .get(k)
                .iter()
                .zip(b.eta().get(k))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn green_matches_direct() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut states = 0;
    let mut worst: f64 = 0.0;
    for n in [2, 4, 8, 16, 64] {
        for i in 0..200 {
            let dim = 2 + i % 3;
            let turn = r.random_range(0.1..3.0);
            let c = ChainSampler { max_turn: turn, velocity_scale: 1.0 }.sample(&mut r, n, dim).unwrap();
            let a = solve_tension(&c, TensionMethod::Direct).unwrap();
            let b = solve_tension(&c, TensionMethod::Green).unwrap();
            let scale = a.values().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
            let gap = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(gap / scale);
            states += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        states >= 1000 && worst <= GREEN_DIRECT_TOL && secs < GREEN_DIRECT_SECONDS,
        format!("{states} states, worst relative gap {worst:.2e}, {secs:.2} s"),
    )
}

fn straight_chain_green() -> Outcome {
    let gap = |g: &GreenMatrix, n: usize| {
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            for j in 1..=n {
                worst = worst.max((g.get(k, j) - k.min(j) as f64 / n as f64).abs());
            }
        }
        worst
    };
    let (mut exact, mut sampled): (f64, f64) = (0.0, 0.0);
    for n in 1..=64 {
        let ab = AlphaBeta::from_alpha(vec![1.0; n - 1]).unwrap();
        exact = exact.max(gap(&green_matrix(&ab), n));
        let c = InitialData::Straight { angle: 0.0 }.generate(n).unwrap();
        sampled = sampled.max(gap(&green_matrix(&compute_alpha_beta(&c)), n));
    }
    outcome(
        exact <= STRAIGHT_TOL,
        format!("max |G_kj - min(j,k)/n| = {exact:.2e} for n ≤ 64 ({sampled:.2e} with α taken from sampled links)"),
    )
}

fn bound_certificates() -> Outcome {
    let mut r = rng(3);
    let (mut upper_checked, mut upper_fail) = (0, 0);
    let (mut lower_checked, mut lower_fail) = (0, 0);
    let mut corner_worst: f64 = 0.0;
    for i in 0..1000 {
        let n = [4, 8, 16, 32, 64][i % 5];
        let sampler = if i % 2 == 0 {
            ChainSampler::acute()
        } else {
            ChainSampler { max_turn: 1.5 / n as f64, velocity_scale: 1.0 }
        };
        let c = sampler.sample(&mut r, n, 2).unwrap();
        let ab = compute_alpha_beta(&c);
        let cert = certify_bounds(&green_matrix(&ab), &ab).unwrap();
        if let Some(ok) = cert.upper_bounds_pass {
            upper_checked += 1;
            upper_fail += usize::from(!ok);
        }
        if let Some(ok) = cert.lower_bound_pass {
            lower_checked += 1;
            lower_fail += usize::from(!ok);
        }
        if let (Some(v), Some(f)) = (cert.corner_value, cert.corner_formula) {
            corner_worst = corner_worst.max((v - f).abs() / (1.0 + f.abs()));
            corner_worst = corner_worst.max((cert.min_lower_ratio - v).abs() / (1.0 + v.abs()));
        }
    }
    outcome(
        upper_checked > 0 && lower_checked > 0 && upper_fail == 0 && lower_fail == 0 && corner_worst <= CORNER_TOL,
        format!(
            "upper {upper_fail}/{upper_checked} violations, lower {lower_fail}/{lower_checked} violations, corner gap {corner_worst:.2e}"
        ),
    )
}

fn conservation() -> Outcome {
    let mut r = rng(4);
    let mut v0_worst: f64 = 0.0;
    for n in [2, 8, 33, 64] {
        for _ in 0..50 {
            let c = ChainSampler::default().sample(&mut r, n, 2).unwrap();
            let noise = random_sequence(&mut r, 2 * n, false);
            let mut eta = c.eta().clone();
            for k in 1..=n as i64 {
                for d in 0..2 {
                    eta.get_mut(k)[d] += 1e-4 * noise.as_slice()[2 * (k as usize - 1) + d];
                }
            }
            let p = project(&ChainState::from_seqs(eta, c.eta_dot().clone(), 0.0).unwrap()).unwrap();
            v0_worst = v0_worst.max((v0(&p) - 0.5 - 0.5 / n as f64).abs());
        }
    }
    let c = InitialData::RigidRotation { omega: 1.0, angle: 0.0 }.generate(64).unwrap();
    let cfg = IntegratorConfig { t_end: 2.0 * PI, report_stride: 50, ..Default::default() };
    let t = run(&c, &cfg).unwrap();
    let drift = t.snapshots.iter().map(|s| (u0(&s.state) - u0(&c)).abs() / u0(&c)).fold(0.0, f64::max);
    outcome(
        v0_worst <= V0_TOL && drift <= U0_DRIFT_TOL && t.termination == Termination::TEndReached,
        format!("v0 error after projection {v0_worst:.2e}, u0 drift over one period {drift:.2e}"),
    )
}

fn rigid_rotation_oracle() -> Outcome {
    let omega = 1.0;
    let sigma_error = |n: usize| {
        let c = InitialData::RigidRotation { omega, angle: 0.0 }.generate(n).unwrap();
        let s = solve_tension(&c, TensionMethod::Direct).unwrap();
        (1..=n)
            .map(|k| {
                let x = k as f64 / n as f64;
                let exact = omega * omega * x * (2.0 - x) / 2.0;
                (s.at(k) - exact).abs() / exact
            })
            .fold(0.0, f64::max)
    };
    let ratio = sigma_error(32) / sigma_error(64);
    let c = InitialData::RigidRotation { omega, angle: 0.0 }.generate(64).unwrap();
    let cfg = IntegratorConfig { t_end: 2.0 * PI / omega, report_stride: 10_000, ..Default::default() };
    let end = run(&c, &cfg).unwrap().last().state.clone();
    let gap = max_position_gap(&c, &end);
    outcome(
        (ratio - 2.0).abs() <= 2.0 * HALVING_BAND && gap <= PERIOD_POSITION_TOL,
        format!("sigma error ratio n=32/n=64 {ratio:.4}, position gap after one period {gap:.2e}"),
    )
}

fn a2_suite() -> Outcome {
    let lines = a2_battery(&mut rng(6), 10_000, &[4, 16, 64], &[0.5, 1.0, 1.5, 2.0]).unwrap();
    let trials: usize = lines.iter().map(|l| l.trials).sum();
    let violations: usize = lines.iter().map(|l| l.violations).sum();
    let worst = lines.iter().map(|l| l.worst_ratio).fold(0.0, f64::max);
    outcome(
        violations == 0 && lines.iter().all(|l| l.trials == 10_000),
        format!("{violations} violations in {trials} checks, worst lhs/rhs {worst:.4}"),
    )
}

fn spectral_certificates() -> Outcome {
    let mut gram_j0: f64 = 0.0;
    let mut gram_r: f64 = 0.0;
    for n in [8, 16] {
        for j in 0..=3 {
            for (l, row) in gram(n, j, 8).unwrap().iter().enumerate() {
                for (m, v) in row.iter().enumerate() {
                    let want = if l == m { r_coefficient(m + 1, j) } else { 0.0 };
                    if j == 0 {
                        gram_j0 = gram_j0.max((v - want).abs());
                    } else {
                        gram_r = gram_r.max((v - want).abs() / want.max(1.0));
                    }
                }
            }
        }
    }
    let mut r = rng(7);
    let mut round_trip: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    for n in [4, 8, 16, 32] {
        let theta = random_sequence(&mut r, n, false).into_vec();
        let rate = random_sequence(&mut r, n, false).into_vec();
        let angles = AngleState::new(theta.clone(), rate, 0.0).unwrap();
        let whip = continuize_gn(&angles).unwrap();
        let back = discretize_fn(&whip, n).unwrap();
        for (x, y) in angles.theta.iter().zip(&back.theta).chain(angles.theta_dot.iter().zip(&back.theta_dot)) {
            round_trip = round_trip.max((x - y).abs());
        }
        let discrete = discrete_seminorm_sq(&theta, 0).unwrap();
        let parseval = discrete_coefficients(&theta).unwrap().seminorm_sq(0);
        let continuous = seminorm_by_quadrature(&whip.theta.coeffs, 0);
        let scale = discrete.max(1.0);
        isometry = isometry.max((discrete - parseval).abs() / scale).max((discrete - continuous).abs() / scale);
    }
    outcome(
        gram_j0 <= GRAM_J0_TOL && gram_r <= GRAM_R_TOL && round_trip <= ROUND_TRIP_TOL && isometry <= ISOMETRY_TOL,
        format!(
            "Gram j=0 {gram_j0:.2e}, r_mj {gram_r:.2e}, F∘G {round_trip:.2e}, isometry {isometry:.2e}"
        ),
    )
}

fn blowup_detector() -> Outcome {
    let synthetic = |pc: f64, pa: f64| -> Vec<BlowupSample> {
        (0..=90)
            .map(|i| {
                let t = 0.5 + 0.005 * i as f64;
                BlowupSample { t, angular: 3.0 * (1.0 - t).powf(-pa), curvature: 0.5 * (1.0 - t).powf(-pc) }
            })
            .collect()
    };
    let mut exponent_gap: f64 = 0.0;
    for (pc, pa) in [(1.5, 1.0), (1.0, 1.5)] {
        match detect_blowup(&synthetic(pc, pa)) {
            Ok(fit) => {
                exponent_gap = exponent_gap
                    .max((fit.p_curvature - pc).abs())
                    .max((fit.p_angular - pa).abs())
                    .max((fit.t_est - 1.0).abs());
            }
            Err(_) => exponent_gap = f64::INFINITY,
        }
    }
    let c = InitialData::by_name("near_loop").unwrap().generate(64).unwrap();
    let t = run(&c, &IntegratorConfig { t_end: 3.0, report_stride: 1, ..Default::default() }).unwrap();
    let series = t.blowup_series();
    let near_loop = detect_blowup(growth_phase(&series));
    let detail = match &near_loop {
        Ok(f) => format!(
            "T_est {:.4}, exponents {:.3}/{:.3}, residuals {:.2e}/{:.2e}",
            f.t_est, f.p_curvature, f.p_angular, f.residual_curvature, f.residual_angular
        ),
        Err(e) => format!("near-loop fit rejected: {e}"),
    };
    let finite = near_loop
        .as_ref()
        .is_ok_and(|f| f.t_est.is_finite() && f.residual_curvature.is_finite() && f.residual_angular.is_finite());
    outcome(
        exponent_gap <= EXPONENT_TOL && finite,
        format!("synthetic exponent error {exponent_gap:.2e}; near loop ({}) {detail}", t.termination.as_str()),
    )
}

fn monitored_ratios() -> Outcome {
    let cases = [
        InitialData::RigidRotation { omega: 1.0, angle: 0.0 },
        InitialData::by_name("perturbed_vertical").unwrap(),
        InitialData::by_name("power_angle").unwrap(),
        InitialData::by_name("log_spiral").unwrap(),
    ];
    let (mut snapshots, mut bad) = (0, 0);
    let mut passing = 0;
    for data in cases {
        let t = run(&data.generate(32).unwrap(), &IntegratorConfig { t_end: 0.5, ..Default::default() }).unwrap();
        if t.termination != Termination::TEndReached {
            continue;
        }
        passing += 1;
        for (i, s) in t.snapshots.iter().enumerate() {
            snapshots += 1;
            let mut values = vec![s.report.a_ratio(), s.report.c_ratio(), s.report.d1_ratio()];
            if i > 0 {
                values.push(s.gronwall_ratio.unwrap_or(f64::NAN));
            }
            bad += usize::from(!values.iter().all(|x| x.is_finite()));
        }
    }
    outcome(
        passing > 0 && bad == 0,
        format!("{passing} passing runs, {bad} of {snapshots} snapshots with a non-finite ratio"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Green vs direct tension", green_matches_direct),
        ("straight-chain Green closed form", straight_chain_green),
        ("Green bound certificates", bound_certificates),
        ("conservation", conservation),
        ("rigid-rotation oracle", rigid_rotation_oracle),
        ("endpoint inequality suite", a2_suite),
        ("spectral certificates", spectral_certificates),
        ("blowup detector", blowup_detector),
        ("monitored ratios finite", monitored_ratios),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("criterion {} [{}] {}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
