//! Pseudoscalar decay into a fermion pair at leading order, observed over a
//! finite time τ.
//!
//! Natural units: masses and widths share one energy unit, times are in its
//! inverse, so `Mτ` is dimensionless.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::Quadrature;
use crate::report::InequalityReport;
use crate::specfun::si;

/// Default ceiling on `Γ₀/M`.
pub const DEFAULT_MAX_WIDTH_RATIO: f64 = 1e-3;

/// Default bound on `W(τ)/M` for perturbation theory to apply.
pub const DEFAULT_PERTURBATIVE_BOUND: f64 = 1e-2;

/// Minimum Monte Carlo sample count.
pub const MIN_SAMPLES: u64 = 10_000;

const SAMPLE_BATCH: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QftParams {
    /// Pseudoscalar mass M.
    pub mass: f64,
    /// Total width Γ₀ = g²M/8π.
    pub width: f64,
}

impl QftParams {
    pub fn new(mass: f64, width: f64) -> Result<Self> {
        Self::with_max_width_ratio(mass, width, DEFAULT_MAX_WIDTH_RATIO)
    }

    pub fn with_max_width_ratio(mass: f64, width: f64, max_ratio: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParams(format!("mass must be finite and > 0, got {mass}")));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidParams(format!("width must be finite and > 0, got {width}")));
        }
        if !(width / mass <= max_ratio) {
            return Err(Error::InvalidParams(format!(
                "width/mass = {:e} exceeds {max_ratio:e}; the narrow-width treatment does not apply",
                width / mass
            )));
        }
        Ok(Self { mass, width })
    }

    /// From the Yukawa coupling g.
    pub fn from_coupling(mass: f64, coupling: f64) -> Result<Self> {
        Self::new(mass, coupling * coupling * mass / (8.0 * PI))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeWindow {
    pub t_i: f64,
    pub t_f: f64,
}

impl TimeWindow {
    pub fn new(t_i: f64, t_f: f64) -> Result<Self> {
        if !(t_i > 0.0 && t_f > t_i && t_f.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "time window needs 0 < t_i < t_f, got [{t_i}, {t_f}]"
            )));
        }
        Ok(Self { t_i, t_f })
    }

    pub fn length(&self) -> f64 {
        self.t_f - self.t_i
    }
}

/// `1 + si(x)/π + sin x/(πx²) + cos x/(πx)` for `x = Mτ`.
pub fn rate_bracket(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            func: "rate_bracket",
            value: x,
            expected: "finite x > 0",
        });
    }
    Ok(1.0 + si(x)? / PI + x.sin() / (PI * x * x) + x.cos() / (PI * x))
}

/// Leading-order rate of detecting `a₊` and `b₊` after time τ:
/// `(Γ₀/2) · bracket(Mτ) · sin²(θ_ab/2)`.
pub fn decay_rate(theta_ab: f64, tau: f64, qp: &QftParams) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain {
            func: "decay_rate",
            value: tau,
            expected: "tau > 0",
        });
    }
    Ok(0.5 * qp.width * rate_bracket(qp.mass * tau)? * (0.5 * theta_ab).sin().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbativityCheck {
    /// `(Γ₀/2) bracket(Mτ) / M`
    pub ratio: f64,
    pub bound: f64,
    pub rate_ok: bool,
    /// `10 ≤ Mτ ≤ 0.1 M/Γ₀`
    pub window_ok: bool,
}

impl PerturbativityCheck {
    pub fn ok(&self) -> bool {
        self.rate_ok && self.window_ok
    }
}

pub fn perturbativity_ok(qp: &QftParams, tau: f64, bound: f64) -> Result<PerturbativityCheck> {
    let x = qp.mass * tau;
    let ratio = 0.5 * qp.width * rate_bracket(x)? / qp.mass;
    Ok(PerturbativityCheck {
        ratio,
        bound,
        rate_ok: ratio <= bound,
        window_ok: (10.0..=0.1 * qp.mass / qp.width).contains(&x),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratedProbability {
    pub value: f64,
    pub error: f64,
    /// Both window ends pass [`perturbativity_ok`] with the default bound.
    pub in_plateau: bool,
    /// `(t_f − t_i)(Γ₀/2) sin²(θ_ab/2)`
    pub plateau_estimate: f64,
}

pub fn integrated_probability(theta_ab: f64, win: &TimeWindow, qp: &QftParams) -> Result<IntegratedProbability> {
    let in_plateau = [win.t_i, win.t_f].iter().try_fold(true, |acc, &t| {
        perturbativity_ok(qp, t, DEFAULT_PERTURBATIVE_BOUND).map(|c| acc && c.ok())
    })?;
    if !in_plateau {
        log::warn!(
            "window [{}, {}] leaves the perturbative plateau (M = {}, width = {})",
            win.t_i,
            win.t_f,
            qp.mass,
            qp.width
        );
    }
    let plateau_estimate = win.length() * 0.5 * qp.width * (0.5 * theta_ab).sin().powi(2);
    // t_i > 0 is guaranteed by TimeWindow, so the rate is defined throughout
    let integral = Quadrature::new(0.0, 1e-8).integrate(
        |tau| decay_rate(theta_ab, tau, qp).unwrap_or(f64::NAN),
        win.t_i,
        win.t_f,
    )?;
    Ok(IntegratedProbability {
        value: integral.value,
        error: integral.error,
        in_plateau,
        plateau_estimate,
    })
}

/// `(t/t₀) sin²(θ_ba/2) ≤ sin²(θ_ca/2) + sin²(θ_bc/2)`
pub fn ratio_inequality(
    t_over_t0: f64,
    theta_ba: f64,
    theta_ca: f64,
    theta_bc: f64,
    tolerance: f64,
) -> Result<InequalityReport> {
    if !(t_over_t0 >= 1.0) || !t_over_t0.is_finite() {
        return Err(Error::Domain {
            func: "ratio_inequality",
            value: t_over_t0,
            expected: "finite t/t0 >= 1",
        });
    }
    let s = |x: f64| (0.5 * x).sin().powi(2);
    Ok(InequalityReport::new(
        t_over_t0 * s(theta_ba),
        s(theta_ca) + s(theta_bc),
        tolerance,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionEstimate {
    pub fraction: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

/// Monte Carlo share of the cube `[0, π]³` of `(θ_ba, θ_ca, θ_bc)` where
/// [`ratio_inequality`] is violated.
///
/// Samples are drawn in fixed batches, each from its own stream of a
/// ChaCha8 generator keyed by `seed`, so the estimate does not depend on the
/// worker count.
pub fn violation_region_fraction(t_over_t0: f64, samples: u64, seed: u64, tolerance: f64) -> Result<FractionEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParams(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    ratio_inequality(t_over_t0, 0.0, 0.0, 0.0, tolerance)?;
    let batches = samples.div_ceil(SAMPLE_BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let n = SAMPLE_BATCH.min(samples - batch * SAMPLE_BATCH);
            let mut count = 0u64;
            for _ in 0..n {
                let ba = rng.random::<f64>() * PI;
                let ca = rng.random::<f64>() * PI;
                let bc = rng.random::<f64>() * PI;
                let r = ratio_inequality(t_over_t0, ba, ca, bc, tolerance).expect("ratio checked above");
                count += u64::from(r.violated);
            }
            count
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    Ok(FractionEstimate {
        fraction,
        std_error: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
        samples,
        hits,
    })
}
