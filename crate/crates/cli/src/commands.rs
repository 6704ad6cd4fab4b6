use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use wignerlab::meson::{self, FlavourOrientation, MesonParams};
use wignerlab::qft::{self, QftParams};
use wignerlab::scan::{grid_scan, maximize_violation, AxisRange};
use wignerlab::spin::{self, ResolutionParams, SpinAngles, SpinScenarioParams};
use wignerlab::{wigner, InequalityReport};

use crate::args::*;
use crate::output::{emit, Cell, Csv};
use crate::Failure;

/// Successful run; `breach` maps to the classical-soundness exit code.
pub struct Outcome {
    pub breach: bool,
}

const OK: Outcome = Outcome { breach: false };

pub fn run(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::SpinCurve(a) => spin_curve(a),
        Command::SpinMax(a) => spin_max(a),
        Command::MesonStatic(a) => meson_static(a),
        Command::MesonDynamic(a) => meson_dynamic(a),
        Command::QftCurve(a) => qft_curve(a),
        Command::QftRegion(a) => qft_region(a),
        Command::LhvFuzz(a) => lhv_fuzz(a),
        Command::Scan(a) => scan(a),
    }
}

#[derive(Serialize)]
struct CurvePoint {
    delta: f64,
    kappa: f64,
}

#[derive(Serialize)]
struct SpinCurveResult {
    threshold: f64,
    points: Vec<CurvePoint>,
}

fn spin_curve(a: &SpinCurveArgs) -> Result<Outcome, Failure> {
    let range = a.range.scaled(|v| a.common.angle(v));
    if range.lo < 0.0 {
        return Err(Failure::Usage(format!("delta must be >= 0, got {}", range.lo)));
    }
    let points = range
        .values()
        .map(|delta| Ok(CurvePoint { delta, kappa: spin::kappa(delta)? }))
        .collect::<Result<Vec<_>, Failure>>()?;
    let threshold = spin::delta_threshold()?;
    if a.common.format == Format::Csv {
        eprintln!("delta_threshold = {threshold}");
    }
    let result = SpinCurveResult { threshold, points };
    emit("spin-curve", &a.common, a, &result, || {
        let mut csv = Csv::new(&["delta", "kappa"]);
        for p in &result.points {
            csv.row(vec![p.delta.into(), p.kappa.into()]);
        }
        csv
    })?;
    Ok(OK)
}

#[derive(Serialize)]
struct SpinMaxResult {
    family: SpinFamily,
    params: Vec<(String, f64)>,
    /// theta_ba, theta_ca, theta_bc, omega_t at the optimum
    scenario: SpinScenarioParams,
    margin: f64,
    grid_margin: f64,
    refinement_iterations: usize,
    history: Vec<f64>,
}

fn spin_max(a: &SpinMaxArgs) -> Result<Outcome, Failure> {
    let tol = a.common.tol;
    let to_params = move |family: SpinFamily, x: &[f64]| match family {
        SpinFamily::Constrained => SpinScenarioParams::field_assisted_family(x[0]),
        SpinFamily::Static => SpinScenarioParams::new(2.0 * x[0], x[0], x[0], 0.0),
        SpinFamily::Unconstrained => SpinScenarioParams::new(x[0], x[1], x[2], x[3]),
    };
    let ranges = match a.family {
        SpinFamily::Constrained => vec![AxisRange::new("theta", 0.0, PI / 2.0, a.steps)?],
        SpinFamily::Static => vec![AxisRange::new("theta", 0.0, PI, a.steps)?],
        SpinFamily::Unconstrained => vec![
            AxisRange::new("theta_ba", 0.0, 2.0 * PI, a.steps)?,
            AxisRange::new("theta_ca", 0.0, 2.0 * PI, a.steps)?,
            AxisRange::new("theta_bc", 0.0, 2.0 * PI, a.steps)?,
            AxisRange::new("omega_t", 0.0, PI, a.steps)?,
        ],
    };
    let family = a.family;
    let target = |x: &[f64]| Ok(spin::model_inequality(&to_params(family, x), tol));
    let best = maximize_violation(&target, &ranges, a.refine)?;
    let result = SpinMaxResult {
        family,
        scenario: to_params(family, &best.values()),
        params: best.params.clone(),
        margin: best.margin,
        grid_margin: best.grid_margin,
        refinement_iterations: best.refinement_iterations,
        history: best.history.clone(),
    };
    emit("spin-max", &a.common, a, &result, || {
        let mut csv = Csv::new(&["parameter", "value"]);
        for (name, v) in &result.params {
            csv.row(vec![name.as_str().into(), (*v).into()]);
        }
        csv.row(vec!["margin".into(), result.margin.into()]);
        csv.row(vec!["grid_margin".into(), result.grid_margin.into()]);
        csv.row(vec!["refinement_iterations".into(), result.refinement_iterations.into()]);
        csv
    })?;
    Ok(OK)
}

#[derive(Serialize)]
struct OrientationReport {
    orientation: FlavourOrientation,
    report: InequalityReport,
}

#[derive(Serialize)]
struct MesonStaticResult {
    p_tilde: Complex64,
    probabilities: meson::StaticProbabilities,
    reports: Vec<OrientationReport>,
}

fn meson_static(a: &MesonStaticArgs) -> Result<Outcome, Failure> {
    // widths do not enter the static probabilities
    let mp = MesonParams::new(
        1.0,
        1.0,
        0.0,
        0.0,
        Complex64::new(a.p.re, a.p.im),
        Complex64::new(a.q.re, a.q.im),
        a.common.angle(a.alpha),
    )?;
    let reports = FlavourOrientation::BOTH
        .iter()
        .map(|&o| {
            Ok(OrientationReport {
                orientation: o,
                report: meson::static_inequality(&mp, o, a.common.tol)?,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let result = MesonStaticResult {
        p_tilde: mp.p_tilde(),
        probabilities: meson::static_probabilities(&mp),
        reports,
    };
    emit("meson-static", &a.common, a, &result, || {
        let mut csv = Csv::new(&["orientation", "lhs", "rhs", "margin", "violated"]);
        for r in &result.reports {
            let name = match r.orientation {
                FlavourOrientation::BbarPlus => "bbar_plus",
                FlavourOrientation::BPlus => "b_plus",
            };
            csv.row(report_cells(vec![name.into()], &r.report));
        }
        csv
    })?;
    Ok(OK)
}

fn report_cells(mut prefix: Vec<Cell>, r: &InequalityReport) -> Vec<Cell> {
    prefix.extend([r.lhs.into(), r.rhs.into(), r.margin.into(), r.violated.into()]);
    prefix
}

#[derive(Serialize)]
struct MesonPoint {
    t: f64,
    probabilities: meson::DynamicProbabilities,
    /// Sides divided by the pair norm exp(-2 gamma t).
    report: InequalityReport,
    ratio: f64,
    ratio_closed_form: f64,
}

fn meson_dynamic(a: &MesonDynamicArgs) -> Result<Outcome, Failure> {
    let mp = MesonParams::cp_conserving(a.gamma, a.dgamma, a.dm, a.common.angle(a.alpha))?;
    let times: Vec<f64> = match (a.t, a.t_range) {
        (_, Some(span)) => span.values().collect(),
        (Some(t), None) => vec![t],
        (None, None) => vec![1.0],
    };
    let points = times
        .into_iter()
        .map(|t| {
            let report = meson::dynamic_inequality(t, &mp, a.qp_tol, a.common.tol)?;
            Ok(MesonPoint {
                t,
                probabilities: meson::dynamic_probabilities(t, &mp, a.qp_tol)?,
                ratio: report.rhs / report.lhs,
                ratio_closed_form: meson::dynamic_ratio_closed_form(t, &mp),
                report,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    emit("meson-dynamic", &a.common, a, &points, || {
        let mut csv = Csv::new(&["t", "lhs", "rhs", "margin", "violated", "ratio", "ratio_closed_form"]);
        for p in &points {
            let mut row = report_cells(vec![p.t.into()], &p.report);
            row.extend([p.ratio.into(), p.ratio_closed_form.into()]);
            csv.row(row);
        }
        csv
    })?;
    Ok(OK)
}

#[derive(Serialize)]
struct QftPoint {
    m_tau: f64,
    bracket: f64,
    decay_rate: f64,
    perturbativity: qft::PerturbativityCheck,
}

fn qft_curve(a: &QftCurveArgs) -> Result<Outcome, Failure> {
    let qp = QftParams::new(a.mass, a.width)?;
    let theta = a.common.angle(a.theta);
    if a.range.lo <= 0.0 {
        return Err(Failure::Usage(format!("M*tau must be > 0, got {}", a.range.lo)));
    }
    let xs: Vec<f64> = if a.log {
        let (lo, hi) = (a.range.lo.log10(), a.range.hi.log10());
        let log_span = Span { lo, hi, steps: a.range.steps };
        log_span.values().map(|e| 10f64.powf(e)).collect()
    } else {
        a.range.values().collect()
    };
    let points = xs
        .into_iter()
        .map(|x| {
            let tau = x / qp.mass;
            Ok(QftPoint {
                m_tau: x,
                bracket: qft::rate_bracket(x)?,
                decay_rate: qft::decay_rate(theta, tau, &qp)?,
                perturbativity: qft::perturbativity_ok(&qp, tau, a.bound)?,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    emit("qft-curve", &a.common, a, &points, || {
        let mut csv = Csv::new(&["m_tau", "bracket", "decay_rate", "perturbative"]);
        for p in &points {
            csv.row(vec![p.m_tau.into(), p.bracket.into(), p.decay_rate.into(), p.perturbativity.ok().into()]);
        }
        csv
    })?;
    Ok(OK)
}

#[derive(Serialize)]
struct RatioPoint {
    ratio: f64,
    report: InequalityReport,
}

#[derive(Serialize)]
struct RatioFraction {
    ratio: f64,
    estimate: qft::FractionEstimate,
}

fn qft_region(a: &QftRegionArgs) -> Result<Outcome, Failure> {
    let tol = a.common.tol;
    if let Some(angles) = &a.angles {
        let [ba, ca, bc] = angles.as_slice() else {
            return Err(Failure::Usage(format!("--angles needs 3 values, got {}", angles.len())));
        };
        let (ba, ca, bc) = (a.common.angle(*ba), a.common.angle(*ca), a.common.angle(*bc));
        let points = a
            .ratio
            .iter()
            .map(|&ratio| {
                Ok(RatioPoint {
                    ratio,
                    report: qft::ratio_inequality(ratio, ba, ca, bc, tol)?,
                })
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        emit("qft-region", &a.common, a, &points, || {
            let mut csv = Csv::new(&["ratio", "lhs", "rhs", "margin", "violated"]);
            for p in &points {
                csv.row(report_cells(vec![p.ratio.into()], &p.report));
            }
            csv
        })?;
        return Ok(OK);
    }
    let fractions = a
        .ratio
        .iter()
        .map(|&ratio| {
            Ok(RatioFraction {
                ratio,
                estimate: qft::violation_region_fraction(ratio, a.samples, a.common.seed, tol)?,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    emit("qft-region", &a.common, a, &fractions, || {
        let mut csv = Csv::new(&["ratio", "fraction", "std_error", "hits", "samples"]);
        for f in &fractions {
            let e = &f.estimate;
            csv.row(vec![f.ratio.into(), e.fraction.into(), e.std_error.into(), e.hits.into(), e.samples.into()]);
        }
        csv
    })?;
    Ok(OK)
}

#[derive(Serialize)]
struct FuzzResult {
    random: wigner::FuzzSummary,
    corners: wigner::FuzzSummary,
    max_margin: f64,
    sound: bool,
}

fn lhv_fuzz(a: &LhvFuzzArgs) -> Result<Outcome, Failure> {
    let random = wigner::fuzz_lhv(a.n, a.common.seed, a.common.tol)?;
    let corners = wigner::corner_sweep(a.common.tol);
    let result = FuzzResult {
        max_margin: random.max_margin().max(corners.max_margin()),
        sound: random.is_sound() && corners.is_sound(),
        random,
        corners,
    };
    emit("lhv-fuzz", &a.common, a, &result, || {
        let mut csv = Csv::new(&["check", "trials", "max_static_margin", "max_dynamic_margin", "breaches"]);
        for (name, s) in [("random", &result.random), ("corners", &result.corners)] {
            csv.row(vec![
                name.into(),
                s.trials.into(),
                s.max_static_margin.into(),
                s.max_dynamic_margin.into(),
                s.breaches.into(),
            ]);
        }
        csv
    })?;
    if !result.sound {
        eprintln!("classical model breached an inequality: max margin {}", result.max_margin);
    }
    Ok(Outcome { breach: !result.sound })
}

struct ParamDef {
    name: &'static str,
    default: f64,
    /// converted by --degrees
    phase: bool,
}

const fn def(name: &'static str, default: f64, phase: bool) -> ParamDef {
    ParamDef { name, default, phase }
}

fn target_params(target: ScanTarget) -> Vec<ParamDef> {
    match target {
        ScanTarget::Spin => vec![
            def("theta_ba", 2.0 * PI / 3.0, true),
            def("theta_ca", PI / 3.0, true),
            def("theta_bc", PI / 3.0, true),
            def("omega_t", 0.0, true),
        ],
        ScanTarget::SpinAveraged => {
            let t = spin::field_assisted_theta();
            vec![
                def("theta_ba", 2.0 * t, true),
                def("theta_ca", t, true),
                def("theta_bc", t, true),
                def("common_time", 0.5 * t, true),
                def("delta", 0.0, true),
            ]
        }
        ScanTarget::Meson => vec![
            def("t", 1.0, false),
            def("gamma", 1.0, false),
            def("dgamma", 0.1, false),
            def("dm", 0.5, false),
            def("alpha", 0.0, true),
        ],
        ScanTarget::QftRatio => vec![
            def("ratio", 1.0, false),
            def("theta_ba", 2.0 * PI / 3.0, true),
            def("theta_ca", PI / 3.0, true),
            def("theta_bc", PI / 3.0, true),
        ],
    }
}

fn evaluate_target(target: ScanTarget, v: &[f64], tol: f64) -> wignerlab::Result<InequalityReport> {
    match target {
        ScanTarget::Spin => Ok(spin::model_inequality(&SpinScenarioParams::new(v[0], v[1], v[2], v[3]), tol)),
        ScanTarget::SpinAveraged => spin::averaged_inequality(
            &SpinAngles::new(v[0], v[1], v[2]),
            &ResolutionParams::new(v[4], v[3])?,
            tol,
        ),
        ScanTarget::Meson => {
            let mp = MesonParams::cp_conserving(v[1], v[2], v[3], v[4])?;
            meson::dynamic_inequality(v[0], &mp, meson::DEFAULT_Q_OVER_P_TOLERANCE, tol)
        }
        ScanTarget::QftRatio => qft::ratio_inequality(v[0], v[1], v[2], v[3], tol),
    }
}

#[derive(Serialize)]
struct ScanMaximum {
    params: Vec<(String, f64)>,
    margin: f64,
    grid_margin: f64,
    refinement_iterations: usize,
    history: Vec<f64>,
}

fn scan(a: &ScanArgs) -> Result<Outcome, Failure> {
    let defs = target_params(a.target);
    let index_of = |name: &str| {
        defs.iter().position(|d| d.name == name).ok_or_else(|| {
            let known: Vec<&str> = defs.iter().map(|d| d.name).collect();
            Failure::Usage(format!("unknown parameter {name:?}; this target has {}", known.join(", ")))
        })
    };
    let to_internal = |i: usize, v: f64| if defs[i].phase { a.common.angle(v) } else { v };

    let mut base: Vec<f64> = defs.iter().map(|d| d.default).collect();
    for s in &a.set {
        let i = index_of(&s.name)?;
        base[i] = to_internal(i, s.value);
    }
    if a.axis.is_empty() {
        return Err(Failure::Usage("scan needs at least one --axis".into()));
    }
    let mut slots = Vec::new();
    let mut ranges = Vec::new();
    for ax in &a.axis {
        let i = index_of(&ax.name)?;
        if slots.contains(&i) {
            return Err(Failure::Usage(format!("axis {} given twice", ax.name)));
        }
        slots.push(i);
        ranges.push(AxisRange::new(ax.name.clone(), to_internal(i, ax.span.lo), to_internal(i, ax.span.hi), ax.span.steps)?);
    }

    let tol = a.common.tol;
    let target = a.target;
    let eval = |x: &[f64]| {
        let mut v = base.clone();
        for (&slot, &val) in slots.iter().zip(x) {
            v[slot] = val;
        }
        evaluate_target(target, &v, tol)
    };

    if a.maximize {
        let best = maximize_violation(&eval, &ranges, a.refine)?;
        let result = ScanMaximum {
            params: best.params.clone(),
            margin: best.margin,
            grid_margin: best.grid_margin,
            refinement_iterations: best.refinement_iterations,
            history: best.history.clone(),
        };
        emit("scan", &a.common, a, &result, || {
            let mut csv = Csv::new(&["parameter", "value"]);
            for (name, v) in &result.params {
                csv.row(vec![name.as_str().into(), (*v).into()]);
            }
            csv.row(vec!["margin".into(), result.margin.into()]);
            csv.row(vec!["grid_margin".into(), result.grid_margin.into()]);
            csv.row(vec!["refinement_iterations".into(), result.refinement_iterations.into()]);
            csv
        })?;
        return Ok(OK);
    }

    let records = grid_scan(&eval, &ranges)?;
    emit("scan", &a.common, a, &records, || {
        let mut header: Vec<String> = ranges.iter().map(|r| r.name.clone()).collect();
        header.extend(["lhs", "rhs", "margin", "violated"].map(String::from));
        let mut csv = Csv::new(&header);
        for r in &records {
            let mut row: Vec<Cell> = r.params.iter().map(|&v| v.into()).collect();
            row.extend([r.lhs.into(), r.rhs.into(), r.margin.into(), r.violated.into()]);
            csv.row(row);
        }
        csv
    })?;
    Ok(OK)
}
