//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use landau_core::fourier::{compute_u, StepControl};
use landau_core::laguerre::{fejer_scaled, laguerre_scaled, laguerre_scaled_sequence};
use landau_core::oracle::{
    compare_with_analytic, displacement_matrix, suggest_dimension, suggest_step, TdseSettings,
};
use landau_core::physics::derive_scales;
use landau_core::transitions::{
    survival, sweep_over_intensity, sweep_over_levels, transition_matrix, uniform_grid,
};
use landau_core::{
    analyze_field, level_outcome, Complex64, Execution, FieldSpec, GeometricPhases, PhysicalParams,
    Primitive, Target,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ground_state_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for x in [0.1f64, 1.0, 5.0] {
        let p = survival(0, x, 0.0).unwrap().survival_probability;
        let want = (-x).exp();
        worst = worst.max((p - want).abs() / want);
    }
    outcome(
        worst <= 1e-14,
        format!("max relative error {worst:.2e} (tol 1e-14)"),
    )
}

/// Roots of `L_n` bracketed on a fine grid and refined by bisection.
fn laguerre_roots(n: usize) -> Vec<f64> {
    let f = |x: f64| laguerre_scaled(n, x).unwrap();
    let hi = 4.0 * n as f64 + 4.0;
    let grid = uniform_grid(1e-9, hi, 4000);
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if f(a).signum() == f(b).signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if f(a).signum() == f(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(if f(a).abs() < f(b).abs() { a } else { b });
    }
    roots
}

fn laguerre_zeros() -> Outcome {
    let s11 = survival(1, 1.0, 0.0).unwrap().survival_probability;
    let mut ok = s11 <= 1e-12;
    let mut worst = s11;
    let mut notes = vec![format!("P(1,1) = {s11:.1e}")];
    for n in [2usize, 3] {
        let roots = laguerre_roots(n);
        ok &= roots.len() == n;
        for &r in roots.iter().take(3) {
            let p = survival(n, r, 0.0).unwrap().survival_probability;
            worst = worst.max(p);
            ok &= p <= 1e-12;
        }
        notes.push(format!("n={n}: {} roots", roots.len()));
    }
    // closed-form zeros of L_2
    let r2 = laguerre_roots(2);
    let exact = [2.0 - 2f64.sqrt(), 2.0 + 2f64.sqrt()];
    let root_err = r2
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ok &= root_err <= 1e-12;
    outcome(
        ok,
        format!(
            "{}; max survival at zeros {worst:.1e}; L_2 root error {root_err:.1e}",
            notes.join(", ")
        ),
    )
}

fn oracle_algebra() -> Outcome {
    let mut worst: f64 = 0.0;
    for x in [0.5f64, 3.0, 8.0] {
        let d = displacement_matrix(Complex64::new(x.sqrt(), 0.0), 256).unwrap();
        for n in 0..=30 {
            let want = laguerre_scaled(n, x).unwrap();
            worst = worst.max((d[[n, n]] - want).norm());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |diag - e^(-x/2) L_n| = {worst:.2e} (tol 1e-10, N = 256)"),
    )
}

fn oracle_pipeline() -> Outcome {
    let params = PhysicalParams::default();
    let scales = derive_scales(&params).unwrap();
    let period = 2.0 * PI;
    let fields = [
        (
            "resonant cosine",
            FieldSpec::new(
                [0.0, 3.0 * period],
                vec![Primitive::Sinusoid {
                    target: Target::E1,
                    amplitude: 0.2,
                    angular_frequency: 1.0,
                    phase: 0.0,
                    window: None,
                }],
            )
            .unwrap(),
        ),
        (
            "gaussian pulse",
            FieldSpec::new(
                [0.0, 20.0],
                vec![Primitive::GaussianPulse {
                    target: Target::E1,
                    amplitude: 0.5,
                    center: 10.0,
                    width: 2.0,
                    carrier_angular_frequency: 1.0,
                    carrier_phase: 0.0,
                }],
            )
            .unwrap(),
        ),
        (
            "white noise",
            FieldSpec::new(
                [0.0, 20.0],
                vec![
                    Primitive::WhiteNoise {
                        target: Target::E1,
                        amplitude: 2.0,
                        sample_step: 0.5,
                        seed: 42,
                        window: None,
                    },
                    Primitive::WhiteNoise {
                        target: Target::E2,
                        amplitude: 2.0,
                        sample_step: 0.5,
                        seed: 43,
                        window: None,
                    },
                ],
            )
            .unwrap(),
        ),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, spec) in &fields {
        let end = spec.end();
        let x = compute_u(spec, &scales, &params, end, &StepControl::default())
            .unwrap()
            .x;
        let dim = suggest_dimension(10, x);
        let step = suggest_step(spec, &params, &scales, dim);
        let settings = TdseSettings::new(dim, step);
        let mut worst: f64 = 0.0;
        for n in [0usize, 3, 10] {
            match compare_with_analytic(spec, &params, &scales, &settings, n) {
                Ok(r) => worst = worst.max(r.max_abs_prob_error),
                Err(e) => {
                    ok = false;
                    notes.push(format!("{name} n={n}: {e}"));
                }
            }
        }
        ok &= worst <= 1e-6 && dim <= 512;
        notes.push(format!(
            "{name} (x={x:.3}, N={dim}, h={step:.1e}): {worst:.1e}"
        ));
    }
    outcome(
        ok,
        format!(
            "max |P_rk4 - P_analytic| per field: {} (tol 1e-6)",
            notes.join("; ")
        ),
    )
}

fn unitarity() -> Outcome {
    let mut lo: f64 = 1.0;
    let mut hi: f64 = 1.0;
    let mut ok = true;
    for n in [0usize, 10, 100] {
        for x in [1.0f64, 8.0] {
            match transition_matrix(
                n,
                Complex64::new(x.sqrt(), 0.0),
                None,
                1e-12,
                Execution::Parallel,
            ) {
                Ok(t) => {
                    let s = t.row_sum();
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
                Err(_) => ok = false,
            }
        }
    }
    ok &= lo >= 1.0 - 1e-8 && hi <= 1.0 + 1e-12;
    outcome(
        ok,
        format!("row sums in [1 - {:.1e}, 1 + {:.1e}]", 1.0 - lo, hi - 1.0),
    )
}

/// Largest `|e^{-x/2}(L_n - fejer)| (n+1)^{3/4}` over one cosine period in `n` starting at `n0`.
fn fejer_window_error(n0: usize, x: f64, seq: &[f64]) -> f64 {
    let width = (2.0 * PI * ((n0 as f64 + 1.0) / x).sqrt()).ceil() as usize + 1;
    (n0..=n0 + width)
        .map(|n| (seq[n] - fejer_scaled(n, x).unwrap()).abs() * (n as f64 + 1.0).powf(0.75))
        .fold(0.0, f64::max)
}

fn fejer_order() -> Outcome {
    let levels = [100usize, 1_000, 10_000, 100_000];
    let mut ok = true;
    let mut notes = Vec::new();
    for x in [1.0f64, 4.0, 8.0] {
        let top =
            levels[3] + (2.0 * PI * ((levels[3] as f64 + 1.0) / x).sqrt()).ceil() as usize + 2;
        let seq = laguerre_scaled_sequence(top, x).unwrap();
        let errs: Vec<f64> = levels
            .iter()
            .map(|&n| fejer_window_error(n, x, &seq))
            .collect();
        let bounded = errs.iter().all(|e| e.is_finite() && *e <= 1.5);
        let no_growth = errs[3] <= 2.0 * errs[0] && errs[3] <= 2.0 * errs[1];
        ok &= bounded && no_growth;
        notes.push(format!(
            "x={x}: [{}]",
            errs.iter()
                .map(|e| format!("{e:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    outcome(
        ok,
        format!(
            "scaled error at n = 1e2..1e5 {} (bound 1.5, growth <= 2x)",
            notes.join("; ")
        ),
    )
}

fn envelope(n: usize, x: f64) -> f64 {
    1.0 - 1.0 / (PI * (x * (n as f64 + 1.0)).sqrt()) - 0.01
}

fn figure1_trend() -> Outcome {
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for x in [8.0, 10.0] {
        for r in sweep_over_levels(x, 100..=160, Execution::Parallel).unwrap() {
            let m = r.transition - envelope(r.n, x);
            margin = margin.min(m);
            ok &= m > 0.0;
        }
    }
    outcome(
        ok,
        format!("min margin above envelope over n in [100, 160], x in {{8, 10}}: {margin:.2e}"),
    )
}

fn figure2_trend() -> Outcome {
    let xs = uniform_grid(5.0, 30.0, 2501);
    let rows = sweep_over_intensity(100, &xs, Execution::Parallel).unwrap();
    let mut ok = true;
    let mut min_after = f64::INFINITY;
    for r in &rows {
        if r.x >= 10.0 {
            min_after = min_after.min(r.transition);
            ok &= r.transition > envelope(100, r.x);
        }
    }
    ok &= min_after > 0.98;
    outcome(ok, format!("running minimum of P over x in [10, 30] at n = 100: {min_after:.5} (> 0.98 and above envelope)"))
}

fn dc_null() -> Outcome {
    let params = PhysicalParams::default();
    let scales = derive_scales(&params).unwrap();
    let mut worst: f64 = 0.0;
    for target in [Target::E1, Target::E2] {
        let spec = FieldSpec::new(
            [0.0, 2.0 * PI],
            vec![Primitive::Constant {
                target,
                amplitude: 1.0,
            }],
        )
        .unwrap();
        let u = compute_u(&spec, &scales, &params, 2.0 * PI, &StepControl::default())
            .unwrap()
            .u;
        worst = worst.max(u.norm());
    }
    outcome(
        worst < 1e-12,
        format!("|u| over one period = {worst:.1e} (tol 1e-12)"),
    )
}

fn phase_irrelevance() -> Outcome {
    let params = PhysicalParams::default();
    let spec = FieldSpec::new(
        [0.0, 4.0 * PI],
        vec![
            Primitive::Sinusoid {
                target: Target::E1,
                amplitude: 0.3,
                angular_frequency: 1.0,
                phase: 0.0,
                window: None,
            },
            Primitive::Sinusoid {
                target: Target::E2,
                amplitude: 0.1,
                angular_frequency: 1.7,
                phase: 0.4,
                window: None,
            },
        ],
    )
    .unwrap();
    let a = analyze_field(&spec, &params, None, &StepControl::default()).unwrap();
    let mut identical = a.phases.gamma != 0.0;
    let mut worst: f64 = 0.0;
    for n in [0usize, 3, 10] {
        let with = level_outcome(n, a.alpha, a.phases, None, 1e-14, Execution::Sequential).unwrap();
        let zeroed = level_outcome(
            n,
            a.alpha,
            GeometricPhases::ZERO,
            None,
            1e-14,
            Execution::Sequential,
        )
        .unwrap();
        let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
        identical &= bits(with.probabilities()) == bits(zeroed.probabilities());
        for theta in [PI / 7.0, 1.0] {
            let rotated = a.alpha * Complex64::from_polar(1.0, theta);
            let r = level_outcome(
                n,
                rotated,
                a.phases,
                Some(with.table.m_max),
                1e-14,
                Execution::Sequential,
            )
            .unwrap();
            for (p, q) in with.probabilities().iter().zip(r.probabilities()) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    outcome(
        identical && worst <= 1e-14,
        format!("zeroed phases bit-identical: {identical}; max change under alpha rotation {worst:.1e} (tol 1e-14)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("ground-state survival e^{-x}", ground_state_law),
        ("survival vanishes at Laguerre zeros", laguerre_zeros),
        (
            "matrix exponential diagonal vs e^{-x/2} L_n",
            oracle_algebra,
        ),
        ("RK4 simulation vs analytic pipeline", oracle_pipeline),
        ("transition row unitarity", unitarity),
        ("Fejer asymptotic error order", fejer_order),
        ("level sweep rises to 1 (x = 8, 10)", figure1_trend),
        ("intensity sweep tends to 1 (n = 100)", figure2_trend),
        ("constant field over one period gives u = 0", dc_null),
        ("phases never change probabilities", phase_irrelevance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{tag}] {:>2}. {name}: {} ({:.2?})",
            i + 1,
            o.detail,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
