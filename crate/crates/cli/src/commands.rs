use landau_core::fourier::u_spectrum_sweep;
use landau_core::oracle::{
    compare_levels, suggest_dimension, suggest_step, OracleReport, TdseSettings,
};
use landau_core::transitions::{
    sweep_over_intensity, sweep_over_levels, transition_matrix, uniform_grid, SweepRow,
};
use landau_core::{
    analyze_field, Complex64, Error, Execution, FieldAnalysis, FieldSpec, ResolutionReport,
};
use serde::Serialize;

use crate::config::{Format, RunConfig, SweepKind};
use crate::output::{sink, write_csv, write_gnuplot, write_json};

fn exec(cfg: &RunConfig) -> Execution {
    cfg.output.execution.into()
}

fn format(cfg: &RunConfig) -> Format {
    cfg.output.format.unwrap_or_default()
}

fn field(cfg: &RunConfig) -> Result<&FieldSpec, Error> {
    cfg.field
        .as_ref()
        .ok_or_else(|| Error::Validation("this command needs a [field] section".into()))
}

fn analyze(cfg: &RunConfig) -> Result<FieldAnalysis, Error> {
    analyze_field(
        field(cfg)?,
        &cfg.physics,
        cfg.quadrature.t_final,
        &cfg.quadrature.control(),
    )
}

#[derive(Serialize)]
struct USummary<'a> {
    u_re: f64,
    u_im: f64,
    x: f64,
    gamma: f64,
    beta: f64,
    area_u: f64,
    area_r: f64,
    omega: f64,
    k: f64,
    t_final: f64,
    field_hash: String,
    estimates: &'a ResolutionReport,
    drift_warnings: &'a [String],
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    u_re: f64,
    u_im: f64,
    r1: f64,
    r2: f64,
}

pub fn cmd_u(cfg: &RunConfig) -> Result<u8, Error> {
    let a = analyze(cfg)?;
    let spec = field(cfg)?;
    let summary = USummary {
        u_re: a.drive.u.re,
        u_im: a.drive.u.im,
        x: a.drive.x,
        gamma: a.phases.gamma,
        beta: a.phases.beta,
        area_u: a.phases.area_u,
        area_r: a.phases.area_r,
        omega: a.scales.omega,
        k: a.scales.k,
        t_final: a.drive.u_path.last().t,
        field_hash: spec.digest(),
        estimates: &a.drive.report,
        drift_warnings: &a.drift.warnings,
    };
    for w in a.drive.report.warnings.iter().chain(&a.drift.warnings) {
        eprintln!("warning: {w}");
    }
    if let Some(trace) = &cfg.output.trace {
        let rows: Vec<TraceRow> = a
            .drive
            .u_path
            .points()
            .iter()
            .zip(a.drift.path.points())
            .map(|(u, r)| TraceRow {
                t: u.t,
                u_re: u.p1,
                u_im: u.p2,
                r1: r.p1,
                r2: r.p2,
            })
            .collect();
        write_csv(sink(Some(trace))?, &rows)?;
    }
    write_json(sink(cfg.output.path.as_deref())?, &summary)?;
    Ok(0)
}

#[derive(Serialize)]
struct LevelRow {
    n: usize,
    survival: f64,
    transition: f64,
    fejer_transition: Option<f64>,
}

#[derive(Serialize)]
struct IntensityRow {
    x: f64,
    survival: f64,
    transition: f64,
    fejer_transition: Option<f64>,
}

fn level_rows(rows: Vec<SweepRow>) -> Vec<LevelRow> {
    rows.into_iter()
        .map(|r| LevelRow {
            n: r.n,
            survival: r.survival,
            transition: r.transition,
            fejer_transition: r.fejer_transition,
        })
        .collect()
}

fn intensity_rows(rows: Vec<SweepRow>) -> Vec<IntensityRow> {
    rows.into_iter()
        .map(|r| IntensityRow {
            x: r.x,
            survival: r.survival,
            transition: r.transition,
            fejer_transition: r.fejer_transition,
        })
        .collect()
}

fn emit<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> Result<(), Error> {
    let out = sink(cfg.output.path.as_deref())?;
    match format(cfg) {
        Format::Csv => write_csv(out, rows),
        Format::Json => write_json(out, rows),
    }
}

fn emit_gnuplot(
    cfg: &RunConfig,
    xlabel: &str,
    ylabel: &str,
    cols: &[(usize, &str)],
) -> Result<(), Error> {
    let Some(script) = &cfg.output.gnuplot else {
        return Ok(());
    };
    let data = match (&cfg.output.path, format(cfg)) {
        (Some(p), Format::Csv) => p,
        _ => {
            return Err(Error::Validation(
                "a gnuplot script needs --out with CSV output".into(),
            ))
        }
    };
    write_gnuplot(script, data, xlabel, ylabel, cols)
}

pub fn cmd_figure1(cfg: &RunConfig, x: f64, n_max: usize) -> Result<u8, Error> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Validation(format!("--x must be positive, got {x}")));
    }
    if n_max < 1 {
        return Err(Error::Validation("--n-max must be at least 1".into()));
    }
    let rows = level_rows(sweep_over_levels(x, 0..=n_max, exec(cfg))?);
    emit_gnuplot(
        cfg,
        "n",
        "transition probability",
        &[(3, "exact"), (4, "Fejer")],
    )?;
    emit(cfg, &rows)?;
    Ok(0)
}

pub fn cmd_figure2(cfg: &RunConfig, n: usize, x_max: f64, points: usize) -> Result<u8, Error> {
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(Error::Validation(format!(
            "--x-max must be positive, got {x_max}"
        )));
    }
    if points < 2 {
        return Err(Error::Validation("--points must be at least 2".into()));
    }
    let xs = uniform_grid(0.0, x_max, points);
    let rows = intensity_rows(sweep_over_intensity(n, &xs, exec(cfg))?);
    emit_gnuplot(
        cfg,
        "x",
        "transition probability",
        &[(3, "exact"), (4, "Fejer")],
    )?;
    emit(cfg, &rows)?;
    Ok(0)
}

#[derive(Serialize)]
struct MatrixRow {
    m: usize,
    probability: f64,
    cumulative: f64,
}

#[derive(Serialize)]
struct MatrixSummary {
    n: usize,
    alpha_re: f64,
    alpha_im: f64,
    x: f64,
    m_max: usize,
    stay: f64,
    up_mass: f64,
    down_mass: f64,
    tail_mass: f64,
    row_sum: f64,
}

#[derive(Serialize)]
struct MatrixJson<'a> {
    #[serde(flatten)]
    summary: &'a MatrixSummary,
    probabilities: &'a [f64],
}

pub fn cmd_matrix(cfg: &RunConfig) -> Result<u8, Error> {
    let t = &cfg.transitions;
    let alpha = match t.fixed_alpha() {
        Some(a) => a,
        None if cfg.field.is_some() => analyze(cfg)?.alpha,
        None => {
            return Err(Error::Validation(
                "matrix needs --x, transitions.alpha/x or a [field] section".into(),
            ));
        }
    };
    if t.x.is_some_and(|x| !(x >= 0.0)) {
        return Err(Error::Validation("x must be non-negative".into()));
    }
    let table = transition_matrix(t.n, alpha, t.m_max, t.tail_tolerance, exec(cfg))?;
    let summary = MatrixSummary {
        n: table.n_source,
        alpha_re: alpha.re,
        alpha_im: alpha.im,
        x: alpha.norm_sqr(),
        m_max: table.m_max,
        stay: table.stay(),
        up_mass: table.up_mass,
        down_mass: table.down_mass,
        tail_mass: table.tail_mass,
        row_sum: table.row_sum(),
    };
    match format(cfg) {
        Format::Json => {
            write_json(
                sink(cfg.output.path.as_deref())?,
                &MatrixJson {
                    summary: &summary,
                    probabilities: &table.probabilities,
                },
            )?;
        }
        Format::Csv => {
            let mut cumulative = 0.0;
            let rows: Vec<MatrixRow> = table
                .probabilities
                .iter()
                .enumerate()
                .map(|(m, &p)| {
                    cumulative += p;
                    MatrixRow {
                        m,
                        probability: p,
                        cumulative,
                    }
                })
                .collect();
            write_csv(sink(cfg.output.path.as_deref())?, &rows)?;
            eprintln!(
                "{}",
                serde_json::to_string(&summary).map_err(|e| Error::Validation(e.to_string()))?
            );
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SpectrumRow {
    omega: f64,
    abs_u: f64,
    is_cyclotron: bool,
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<u8, Error> {
    let s = &cfg.sweep;
    match s.kind {
        SweepKind::Levels => {
            if !(s.x.is_finite() && s.x >= 0.0) {
                return Err(Error::Validation(format!(
                    "sweep x must be non-negative, got {}",
                    s.x
                )));
            }
            let rows = level_rows(sweep_over_levels(s.x, s.n_min..=s.n_max, exec(cfg))?);
            emit_gnuplot(
                cfg,
                "n",
                "transition probability",
                &[(3, "exact"), (4, "Fejer")],
            )?;
            emit(cfg, &rows)
        }
        SweepKind::Intensity => {
            if s.x_min < 0.0 {
                return Err(Error::Validation("sweep x_min must be non-negative".into()));
            }
            let xs = uniform_grid(s.x_min, s.x_max, s.points);
            let rows = intensity_rows(sweep_over_intensity(s.n, &xs, exec(cfg))?);
            emit_gnuplot(
                cfg,
                "x",
                "transition probability",
                &[(3, "exact"), (4, "Fejer")],
            )?;
            emit(cfg, &rows)
        }
        SweepKind::Spectrum => {
            let spec = field(cfg)?;
            let scales = landau_core::physics::derive_scales(&cfg.physics)?;
            let mut omegas = uniform_grid(s.omega_min, s.omega_max, s.points);
            if !omegas.contains(&scales.omega) {
                omegas.push(scales.omega);
                omegas.sort_by(f64::total_cmp);
            }
            let t_final = cfg.quadrature.t_final.unwrap_or_else(|| spec.end());
            let pts = u_spectrum_sweep(
                spec,
                &scales,
                &cfg.physics,
                t_final,
                &omegas,
                &cfg.quadrature.control(),
                exec(cfg),
            )?;
            let rows: Vec<SpectrumRow> = pts
                .into_iter()
                .map(|p| SpectrumRow {
                    omega: p.omega,
                    abs_u: p.abs_u,
                    is_cyclotron: p.is_cyclotron,
                })
                .collect();
            emit_gnuplot(cfg, "omega", "|u|", &[(2, "|u|")])?;
            emit(cfg, &rows)
        }
    }?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyCase {
    #[serde(flatten)]
    report: OracleReport,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnosis: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    x: f64,
    alpha: [f64; 2],
    tolerance: f64,
    passed: bool,
    cases: Vec<VerifyCase>,
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<u8, Error> {
    let spec = field(cfg)?;
    let a = analyze(cfg)?;
    let o = &cfg.oracle;
    let top = *o.levels.iter().max().expect("validated non-empty");
    let dimension = o
        .dimension
        .unwrap_or_else(|| suggest_dimension(top, a.drive.x));
    let step = o
        .step
        .unwrap_or_else(|| suggest_step(spec, &cfg.physics, &a.scales, dimension));
    let mut settings = TdseSettings::new(dimension, step);
    settings.energy_offset = o.energy_offset;

    let reports = compare_levels(
        spec,
        &cfg.physics,
        &a.scales,
        &settings,
        &o.levels,
        exec(cfg),
    )?;
    let cases: Vec<VerifyCase> = reports
        .into_iter()
        .map(|report| {
            let passed = report.max_abs_prob_error <= o.tolerance;
            let diagnosis = (!passed).then(|| {
                if report.tail_mass > settings.tail_threshold * 1e-2 {
                    format!(
                        "tail mass {:.3e} near the basis edge; raise oracle.dimension",
                        report.tail_mass
                    )
                } else {
                    format!(
                        "integration error dominates at step {:.3e}; reduce oracle.step",
                        report.step
                    )
                }
            });
            VerifyCase {
                report,
                passed,
                diagnosis,
            }
        })
        .collect();
    let passed = cases.iter().all(|c| c.passed);
    let alpha: Complex64 = a.alpha;
    let report = VerifyReport {
        x: a.drive.x,
        alpha: [alpha.re, alpha.im],
        tolerance: o.tolerance,
        passed,
        cases,
    };
    write_json(sink(cfg.output.path.as_deref())?, &report)?;
    if passed {
        Ok(0)
    } else {
        eprintln!(
            "error: oracle disagreement above tolerance {:.1e}",
            o.tolerance
        );
        Ok(3)
    }
}
