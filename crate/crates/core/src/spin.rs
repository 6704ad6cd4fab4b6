//! Spin singlet precessing in a homogeneous magnetic field.
//!
//! Angles are differences of analyzer polar angles, `theta_ba = θ_b − θ_a` and
//! so on; `omega_t` is the dimensionless precession phase ωt. The geometric
//! identity `theta_ba = theta_bc + theta_ca` is not enforced, so scans may
//! leave the physical submanifold on purpose.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qm2::Sign;
use crate::report::InequalityReport;
use crate::specfun::sinc;
use crate::wigner::{AxisPair, JointProbabilityTable, TransitionTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinAngles {
    pub theta_ba: f64,
    pub theta_ca: f64,
    pub theta_bc: f64,
}

impl SpinAngles {
    pub fn new(theta_ba: f64, theta_ca: f64, theta_bc: f64) -> Self {
        Self {
            theta_ba,
            theta_ca,
            theta_bc,
        }
    }

    /// Differences from absolute analyzer angles.
    pub fn from_absolute(theta_a: f64, theta_b: f64, theta_c: f64) -> Self {
        Self::new(theta_b - theta_a, theta_c - theta_a, theta_b - theta_c)
    }

    /// `theta_ca = theta_bc = theta`, `theta_ba = 2 theta`.
    pub fn symmetric(theta: f64) -> Self {
        Self::new(2.0 * theta, theta, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinScenarioParams {
    pub angles: SpinAngles,
    pub omega_t: f64,
}

impl SpinScenarioParams {
    pub fn new(theta_ba: f64, theta_ca: f64, theta_bc: f64, omega_t: f64) -> Self {
        Self {
            angles: SpinAngles::new(theta_ba, theta_ca, theta_bc),
            omega_t,
        }
    }

    /// The one-parameter family `theta_ca = theta_bc = θ`, `theta_ba = 2θ`,
    /// `ωt = θ/2` on which the field-assisted maximum sits.
    pub fn field_assisted_family(theta: f64) -> Self {
        Self {
            angles: SpinAngles::symmetric(theta),
            omega_t: 0.5 * theta,
        }
    }

    /// The family member with `cos 2θ = 1/4`.
    pub fn field_assisted_maximum() -> Self {
        Self::field_assisted_family(field_assisted_theta())
    }
}

/// θ with `cos 2θ = 1/4` (≈ 0.6591 rad, 37.8°).
pub fn field_assisted_theta() -> f64 {
    0.25f64.acos() / 2.0
}

/// Finite detector time resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionParams {
    /// Half-window in precession phase, `2δ = ωΔt`.
    pub delta: f64,
    /// Dimensionless common time `T` the window is centred on.
    pub common_time: f64,
}

impl ResolutionParams {
    pub fn new(delta: f64, common_time: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::Domain {
                func: "ResolutionParams",
                value: delta,
                expected: "finite delta >= 0",
            });
        }
        Ok(Self { delta, common_time })
    }
}

/// Born probabilities at time t for the three pairs entering the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldProbabilities {
    /// `w(a₊⁽²⁾, b₊⁽¹⁾, t)`
    pub w_ab: f64,
    /// `w(a₋⁽²⁾, c₊⁽¹⁾, t)`
    pub w_ac: f64,
    /// `w(c₊⁽²⁾, b₋⁽¹⁾, t)`
    pub w_cb: f64,
}

pub fn probabilities_in_field(p: &SpinScenarioParams) -> FieldProbabilities {
    let a = &p.angles;
    let phase = 2.0 * p.omega_t;
    let theta_cb = -a.theta_bc;
    FieldProbabilities {
        w_ab: 0.5 * (0.5 * a.theta_ba + phase).sin().powi(2),
        w_ac: 0.5 * (0.5 * a.theta_ca + phase).cos().powi(2),
        w_cb: 0.5 * (0.5 * theta_cb - phase).cos().powi(2),
    }
}

fn sin2_half(theta: f64) -> f64 {
    (0.5 * theta).sin().powi(2)
}

/// `sin²(θ_ba/2 + 2ωt) ≤ 2 sin²(ωt) + cos(2ωt) [sin²(θ_ca/2) + sin²(θ_bc/2)]`
pub fn model_inequality(p: &SpinScenarioParams, tolerance: f64) -> InequalityReport {
    let a = &p.angles;
    let wt = p.omega_t;
    let lhs = (0.5 * a.theta_ba + 2.0 * wt).sin().powi(2);
    let rhs = 2.0 * wt.sin().powi(2)
        + (2.0 * wt).cos() * (sin2_half(a.theta_ca) + sin2_half(a.theta_bc));
    InequalityReport::new(lhs, rhs, tolerance)
}

/// Operands of the general time-dependent inequality for this scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicOperands {
    pub t0_table: JointProbabilityTable,
    pub transitions: TransitionTable,
    /// `w(a₊⁽²⁾, b₊⁽¹⁾, t)`
    pub lhs: f64,
}

/// Singlet joint probability for analyzers separated by `theta` (slot-1 angle
/// minus slot-2 angle).
fn singlet_pair_probability(theta: f64, s2: Sign, s1: Sign) -> f64 {
    if s2 == s1 {
        0.5 * sin2_half(theta)
    } else {
        0.5 * (0.5 * theta).cos().powi(2)
    }
}

pub fn assemble_dynamic_operands(p: &SpinScenarioParams) -> DynamicOperands {
    let a = &p.angles;
    let mut t0_table = JointProbabilityTable::zeros();
    for (pair, theta) in [
        (AxisPair::AB, a.theta_ba),
        (AxisPair::CB, a.theta_bc),
        (AxisPair::AC, a.theta_ca),
    ] {
        for s2 in Sign::BOTH {
            for s1 in Sign::BOTH {
                t0_table.set(pair, s2, s1, singlet_pair_probability(theta, s2, s1));
            }
        }
    }
    let stay = p.omega_t.cos().powi(2);
    let flip = p.omega_t.sin().powi(2);
    DynamicOperands {
        t0_table,
        transitions: TransitionTable {
            a_pp: stay,
            a_mp: flip,
            b_pp: stay,
            b_mp: flip,
        },
        lhs: probabilities_in_field(p).w_ab,
    }
}

/// The model inequality averaged over the window `[T − δ, T + δ]` in ωt,
/// rearranged as `sinc(2δ)[…] ≤ 1/2`.
///
/// The report's `lhs` is the bracketed expression, `rhs` is 1/2, and the
/// margin equals the averaged `lhs − rhs` of [`model_inequality`].
pub fn averaged_inequality(
    angles: &SpinAngles,
    resolution: &ResolutionParams,
    tolerance: f64,
) -> Result<InequalityReport> {
    let delta = resolution.delta;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain {
            func: "averaged_inequality",
            value: delta,
            expected: "finite delta >= 0",
        });
    }
    let t = resolution.common_time;
    let lhs_at_t = (0.5 * angles.theta_ba + 2.0 * t).sin().powi(2);
    let bracket = (2.0 * delta).cos() * (lhs_at_t - 0.5) + 1.0
        - 2.0 * t.sin().powi(2)
        - (2.0 * t).cos() * (sin2_half(angles.theta_ca) + sin2_half(angles.theta_bc));
    Ok(InequalityReport::new(sinc(2.0 * delta) * bracket, 0.5, tolerance))
}

/// Averaged violation at the field-assisted maximum:
/// `K(δ) = sinc(2δ)(7/16 cos 2δ + 5/8) − 1/2`.
pub fn kappa(delta: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain {
            func: "kappa",
            value: delta,
            expected: "finite delta >= 0",
        });
    }
    Ok(sinc(2.0 * delta) * (7.0 / 16.0 * (2.0 * delta).cos() + 5.0 / 8.0) - 0.5)
}

const THRESHOLD_BRACKET: (f64, f64) = (1e-6, 2.0);
const THRESHOLD_SCAN_STEPS: usize = 2000;

/// Smallest positive root of [`kappa`]: the coarsest resolution at which the
/// field-assisted violation survives averaging.
pub fn delta_threshold() -> Result<f64> {
    let (lo, hi) = THRESHOLD_BRACKET;
    let step = (hi - lo) / THRESHOLD_SCAN_STEPS as f64;
    let mut a = lo;
    let mut ka = kappa(a)?;
    for i in 1..=THRESHOLD_SCAN_STEPS {
        let b = lo + i as f64 * step;
        let kb = kappa(b)?;
        if ka > 0.0 && kb <= 0.0 {
            return bisect(a, b, 1e-10);
        }
        a = b;
        ka = kb;
    }
    Err(Error::RootNotBracketed { lo, hi })
}

fn bisect(mut lo: f64, mut hi: f64, width: f64) -> Result<f64> {
    // kappa(lo) > 0 >= kappa(hi)
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if kappa(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficient in `Δt ≲ 1.7/ω`.
pub const RESOLUTION_COEFFICIENT: f64 = 1.7;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Proton mass, kg.
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;

/// Detector time resolution bound `Δt ≲ 1.7/ω`, in seconds for ω in s⁻¹.
pub fn resolution_bound(omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain {
            func: "resolution_bound",
            value: omega,
            expected: "finite omega > 0",
        });
    }
    Ok(RESOLUTION_COEFFICIENT / omega)
}

/// Larmor frequency `|q| B / (2m)` in s⁻¹ (SI units).
pub fn larmor_omega(field_tesla: f64, mass_kg: f64, charge_coulomb: f64) -> Result<f64> {
    if !(mass_kg > 0.0) {
        return Err(Error::Domain {
            func: "larmor_omega",
            value: mass_kg,
            expected: "mass > 0",
        });
    }
    Ok(charge_coulomb.abs() * field_tesla.abs() / (2.0 * mass_kg))
}

/// `Δt` implied by the computed threshold instead of the rounded 1.7:
/// `2 δ* / ω`.
pub fn resolution_bound_from_threshold(omega: f64) -> Result<f64> {
    Ok(2.0 * delta_threshold()? * resolution_bound(omega)? / RESOLUTION_COEFFICIENT)
}

/// Case `ωt = nπ`: the classic static inequality.
pub fn static_margin(angles: &SpinAngles) -> f64 {
    sin2_half(angles.theta_ba) - sin2_half(angles.theta_ca) - sin2_half(angles.theta_bc)
}

/// Case `ωt = π/2 + nπ`: `Σ sin² − 2`.
pub fn rotated_margin(angles: &SpinAngles) -> f64 {
    sin2_half(angles.theta_ba) + sin2_half(angles.theta_ca) + sin2_half(angles.theta_bc) - 2.0
}

/// Most symmetric axes, `ωt = π/2`.
pub fn symmetric_axes_params() -> SpinScenarioParams {
    SpinScenarioParams::new(4.0 * PI / 3.0, 2.0 * PI / 3.0, 2.0 * PI / 3.0, PI / 2.0)
}
