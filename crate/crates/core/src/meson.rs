//! Neutral B-meson pairs: flavour (B, B̄), CP (B₁, B₂) and mass-lifetime
//! (B_L, B_H) bases.
//!
//! Vectors are written in the flavour basis `(B, B̄)`. The pair state carries
//! the second particle in the first slot, as in the spin scenario. Energies use
//! ħ = c = 1; time is in whatever unit the widths are given in.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qm2::Sign;
use crate::report::InequalityReport;
use crate::wigner::{dynamic_wigner, static_wigner, AxisPair, JointProbabilityTable, TransitionTable};

/// Measured `|q/p|`, central value and uncertainty.
pub const Q_OVER_P_REFERENCE: (f64, f64) = (1.0017, 0.0017);

/// Default tolerance on `|q/p − e^{iα}|` for the dynamic branch.
pub const DEFAULT_Q_OVER_P_TOLERANCE: f64 = 0.01;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MesonState {
    B,
    Bbar,
    /// CP-odd
    B1,
    /// CP-even
    B2,
    /// light mass eigenstate
    BL,
    /// heavy mass eigenstate
    BH,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MesonParams {
    pub gamma_l: f64,
    pub gamma_h: f64,
    pub m_l: f64,
    pub m_h: f64,
    pub p: Complex,
    pub q: Complex,
    /// Unphysical CP phase: `CP|B⟩ = e^{iα}|B̄⟩`.
    pub alpha: f64,
}

impl MesonParams {
    pub fn new(
        gamma_l: f64,
        gamma_h: f64,
        m_l: f64,
        m_h: f64,
        p: Complex,
        q: Complex,
        alpha: f64,
    ) -> Result<Self> {
        let mp = Self {
            gamma_l,
            gamma_h,
            m_l,
            m_h,
            p,
            q,
            alpha,
        };
        mp.validate()?;
        Ok(mp)
    }

    /// `q/p = e^{iα}`, `|p|² = |q|² = 1/2`, with mean width `gamma`, width
    /// difference `delta_gamma = Γ_H − Γ_L` and mass difference `delta_m`.
    pub fn cp_conserving(gamma: f64, delta_gamma: f64, delta_m: f64, alpha: f64) -> Result<Self> {
        Self::new(
            gamma - 0.5 * delta_gamma,
            gamma + 0.5 * delta_gamma,
            0.0,
            delta_m,
            Complex::new(FRAC_1_SQRT_2, 0.0),
            Complex::from_polar(FRAC_1_SQRT_2, alpha),
            alpha,
        )
    }

    /// [`cp_conserving`](Self::cp_conserving) with Γ = 1, so times are in
    /// units of the mean lifetime.
    pub fn in_lifetime_units(delta_gamma: f64, delta_m: f64, alpha: f64) -> Result<Self> {
        Self::cp_conserving(1.0, delta_gamma, delta_m, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("gamma_l", self.gamma_l), ("gamma_h", self.gamma_h)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        if !(self.m_l.is_finite() && self.m_h.is_finite() && self.alpha.is_finite()) {
            return Err(Error::InvalidParams("masses and alpha must be finite".into()));
        }
        let norm = self.p.norm_sqr() + self.q.norm_sqr();
        if !((norm - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::InvalidParams(format!(
                "|p|^2 + |q|^2 must be 1, got {norm}"
            )));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        0.5 * (self.gamma_h + self.gamma_l)
    }

    pub fn delta_gamma(&self) -> f64 {
        self.gamma_h - self.gamma_l
    }

    pub fn delta_m(&self) -> f64 {
        self.m_h - self.m_l
    }

    pub fn energy_l(&self) -> Complex {
        Complex::new(self.m_l, -0.5 * self.gamma_l)
    }

    pub fn energy_h(&self) -> Complex {
        Complex::new(self.m_h, -0.5 * self.gamma_h)
    }

    /// `p e^{iα}`
    pub fn p_tilde(&self) -> Complex {
        self.p * Complex::from_polar(1.0, self.alpha)
    }

    /// Shifts α by `phi` and co-rotates q, so `q/p` relative to `e^{iα}` is
    /// unchanged.
    pub fn with_alpha_shifted(&self, phi: f64) -> Self {
        Self {
            alpha: self.alpha + phi,
            q: self.q * Complex::from_polar(1.0, phi),
            ..*self
        }
    }

    /// Flavour-basis components of a named state.
    pub fn state_vector(&self, state: MesonState) -> [Complex; 2] {
        let phase = Complex::from_polar(FRAC_1_SQRT_2, self.alpha);
        let r = Complex::new(FRAC_1_SQRT_2, 0.0);
        match state {
            MesonState::B => [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
            MesonState::Bbar => [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            MesonState::B1 => [r, -phase],
            MesonState::B2 => [r, phase],
            MesonState::BL => [self.p, self.q],
            MesonState::BH => [self.p, -self.q],
        }
    }

    fn check_dynamic_branch(&self, tolerance: f64) -> Result<()> {
        let ratio = self.q / self.p;
        let target = Complex::from_polar(1.0, self.alpha);
        let off = (ratio - target).norm();
        if !(off <= tolerance) {
            let (central, sigma) = Q_OVER_P_REFERENCE;
            return Err(Error::InvalidParams(format!(
                "dynamic branch needs q/p = e^(i alpha): |q/p - e^(i alpha)| = {off:.3e} exceeds {tolerance:.3e} \
                 (|q/p| = {:.6}, measured {central} +/- {sigma})",
                ratio.norm()
            )));
        }
        Ok(())
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            func: "meson evolution",
            value: t,
            expected: "finite t >= 0",
        });
    }
    Ok(())
}

/// `g₊(t) = ½(e^{−iE_H t} + e^{−iE_L t})`
pub fn g_plus(t: f64, mp: &MesonParams) -> Result<Complex> {
    check_time(t)?;
    let (h, l) = phases(t, mp);
    Ok(0.5 * (h + l))
}

/// `g₋(t) = ½(e^{−iE_H t} − e^{−iE_L t})`
pub fn g_minus(t: f64, mp: &MesonParams) -> Result<Complex> {
    check_time(t)?;
    let (h, l) = phases(t, mp);
    Ok(0.5 * (h - l))
}

fn phases(t: f64, mp: &MesonParams) -> (Complex, Complex) {
    let i = Complex::i();
    ((-i * mp.energy_h() * t).exp(), (-i * mp.energy_l() * t).exp())
}

/// Joint probabilities at preparation time.
///
/// Field names read `<particle 2>_<particle 1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticProbabilities {
    pub b1_bbar: f64,
    pub b1_b: f64,
    pub b2_bbar: f64,
    pub b1_bh: f64,
    pub b2_bh: f64,
    pub bh_bbar: f64,
    pub bh_b: f64,
}

pub fn static_probabilities(mp: &MesonParams) -> StaticProbabilities {
    let pt = mp.p_tilde();
    let q = mp.q;
    StaticProbabilities {
        b1_bbar: 0.25,
        b1_b: 0.25,
        b2_bbar: 0.25,
        b1_bh: 0.25 * (pt - q).norm_sqr(),
        b2_bh: 0.25 * (pt + q).norm_sqr(),
        bh_bbar: 0.5 * pt.norm_sqr(),
        bh_b: 0.5 * q.norm_sqr(),
    }
}

/// Full table at preparation time under `a± → B₁/B₂`, `b± → B̄/B`,
/// `c± → B_H/B_L`.
pub fn t0_table(mp: &MesonParams) -> JointProbabilityTable {
    let pt = mp.p_tilde();
    let q = mp.q;
    let minus = 0.25 * (pt - q).norm_sqr();
    let plus = 0.25 * (pt + q).norm_sqr();
    let mut t = JointProbabilityTable::zeros();
    for s2 in Sign::BOTH {
        for s1 in Sign::BOTH {
            t.set(AxisPair::AB, s2, s1, 0.25);
        }
    }
    // (B_H or B_L) against (B̄, B)
    t.set(AxisPair::CB, Sign::Plus, Sign::Plus, 0.5 * pt.norm_sqr());
    t.set(AxisPair::CB, Sign::Plus, Sign::Minus, 0.5 * q.norm_sqr());
    t.set(AxisPair::CB, Sign::Minus, Sign::Plus, 0.5 * pt.norm_sqr());
    t.set(AxisPair::CB, Sign::Minus, Sign::Minus, 0.5 * q.norm_sqr());
    // (B₁ or B₂) against (B_H, B_L)
    t.set(AxisPair::AC, Sign::Plus, Sign::Plus, minus);
    t.set(AxisPair::AC, Sign::Plus, Sign::Minus, plus);
    t.set(AxisPair::AC, Sign::Minus, Sign::Plus, plus);
    t.set(AxisPair::AC, Sign::Minus, Sign::Minus, minus);
    t
}

/// Which flavour state plays `b₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlavourOrientation {
    /// `b₊ → B̄`: `|q|² − |p̃|² ≤ |p̃ − q|²`
    BbarPlus,
    /// `b₊ → B`: `|p̃|² − |q|² ≤ |p̃ − q|²`
    BPlus,
}

impl FlavourOrientation {
    pub const BOTH: [FlavourOrientation; 2] = [FlavourOrientation::BbarPlus, FlavourOrientation::BPlus];
}

/// Static inequality `w(B₁, b₊) ≤ w(B₁, B_H) + w(B_H, b₊)`.
///
/// This is not guaranteed: in the `BbarPlus` orientation it holds exactly when
/// `Re(p̃ q̄) ≤ |p̃|²`, in `BPlus` when `Re(p̃ q̄) ≤ |q|²`. It is saturated at
/// `p̃ = q`, and for `|p̃| = |q|` with `p̃ ≠ q` the margin is `−|p̃ − q|²/4`.
pub fn static_inequality(
    mp: &MesonParams,
    orientation: FlavourOrientation,
    tolerance: f64,
) -> Result<InequalityReport> {
    let variant = match orientation {
        FlavourOrientation::BbarPlus => 0,
        FlavourOrientation::BPlus => 1,
    };
    static_wigner(&t0_table(mp), variant, tolerance)
}

/// The same inequality reduced to `|p̃|`, `|q|` and `|p̃ − q|`, scaled by 4.
pub fn static_inequality_reduced(mp: &MesonParams, orientation: FlavourOrientation) -> (f64, f64) {
    let pt = mp.p_tilde();
    let q = mp.q;
    let diff = pt.norm_sqr() - q.norm_sqr();
    let lhs = match orientation {
        FlavourOrientation::BbarPlus => -diff,
        FlavourOrientation::BPlus => diff,
    };
    (lhs, (pt - q).norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicProbabilities {
    /// `w(B₁(0) → B₁(t))`
    pub b1_survival: f64,
    /// `w(B₂(0) → B₁(t))`
    pub b2_to_b1: f64,
    /// `w(B̄(0) → B̄(t))`
    pub bbar_survival: f64,
    /// `w(B(0) → B̄(t))`
    pub b_to_bbar: f64,
    /// `w(B₁⁽²⁾, B̄⁽¹⁾, t)`
    pub joint_b1_bbar: f64,
}

/// Closed forms valid for `q/p = e^{iα}`; other parameters are rejected when
/// `|q/p − e^{iα}|` exceeds `q_over_p_tolerance`.
pub fn dynamic_probabilities(
    t: f64,
    mp: &MesonParams,
    q_over_p_tolerance: f64,
) -> Result<DynamicProbabilities> {
    check_time(t)?;
    mp.check_dynamic_branch(q_over_p_tolerance)?;
    let gp = g_plus(t, mp)?;
    let gm = g_minus(t, mp)?;
    let gamma = mp.gamma();
    Ok(DynamicProbabilities {
        b1_survival: (-gamma * t).exp() * (-0.5 * mp.delta_gamma() * t).exp(),
        b2_to_b1: 0.0,
        bbar_survival: gp.norm_sqr(),
        b_to_bbar: gm.norm_sqr(),
        joint_b1_bbar: 0.25 * (-2.0 * gamma * t).exp(),
    })
}

/// Time-dependent inequality from the general dynamic form.
///
/// Both sides are divided by the surviving pair norm `e^{−2Γt}`, so the report
/// reads `1/4 ≤ (1 + e^{−ΔΓt})/8` and the tolerance stays meaningful at late
/// times. The raw sides are recovered with `scaled(e^{−2Γt})`.
pub fn dynamic_inequality(
    t: f64,
    mp: &MesonParams,
    q_over_p_tolerance: f64,
    tolerance: f64,
) -> Result<InequalityReport> {
    let raw = dynamic_inequality_raw(t, mp, q_over_p_tolerance, tolerance)?;
    Ok(raw.scaled((2.0 * mp.gamma() * t).exp()))
}

/// As [`dynamic_inequality`] without the norm rescaling.
pub fn dynamic_inequality_raw(
    t: f64,
    mp: &MesonParams,
    q_over_p_tolerance: f64,
    tolerance: f64,
) -> Result<InequalityReport> {
    let w = dynamic_probabilities(t, mp, q_over_p_tolerance)?;
    let transitions = TransitionTable::new(w.b1_survival, w.b2_to_b1, w.bbar_survival, w.b_to_bbar)?;
    dynamic_wigner(&t0_table(mp), &transitions, w.joint_b1_bbar, tolerance)
}

/// `rhs/lhs = (1 + e^{−ΔΓt})/2`
pub fn dynamic_ratio_closed_form(t: f64, mp: &MesonParams) -> f64 {
    0.5 * (1.0 + (-mp.delta_gamma() * t).exp())
}

/// Amplitude-level reference built from the mass eigen-decomposition, without
/// going through `g±`.
pub mod oracle {
    use super::*;

    pub type Matrix = [[Complex; 2]; 2];

    /// Evolution operator `U(t)` in the flavour basis (column j is `U e_j`).
    pub fn evolution_operator(t: f64, mp: &MesonParams) -> Matrix {
        let i = Complex::i();
        let el = (-i * mp.energy_l() * t).exp();
        let eh = (-i * mp.energy_h() * t).exp();
        let bl = mp.state_vector(MesonState::BL);
        let bh = mp.state_vector(MesonState::BH);
        // |B⟩ = (B_L + B_H)/(2p), |B̄⟩ = (B_L − B_H)/(2q)
        let ub: Vec<Complex> = (0..2).map(|k| (el * bl[k] + eh * bh[k]) / (2.0 * mp.p)).collect();
        let ubbar: Vec<Complex> = (0..2).map(|k| (el * bl[k] - eh * bh[k]) / (2.0 * mp.q)).collect();
        [[ub[0], ubbar[0]], [ub[1], ubbar[1]]]
    }

    pub fn apply(u: &Matrix, v: &[Complex; 2]) -> [Complex; 2] {
        [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
    }

    fn inner(bra: &[Complex; 2], ket: &[Complex; 2]) -> Complex {
        bra[0].conj() * ket[0] + bra[1].conj() * ket[1]
    }

    /// `|⟨X(t)|Y⟩|²`
    pub fn transition(t: f64, mp: &MesonParams, evolved: MesonState, target: MesonState) -> f64 {
        let u = evolution_operator(t, mp);
        let xt = apply(&u, &mp.state_vector(evolved));
        inner(&xt, &mp.state_vector(target)).norm_sqr()
    }

    /// `(U ⊗ U)|Ψ(0)⟩`, indexed `[particle 2][particle 1]`.
    pub fn pair_state(t: f64, mp: &MesonParams) -> Matrix {
        let u = evolution_operator(t, mp);
        let r = FRAC_1_SQRT_2;
        let mut out = [[Complex::new(0.0, 0.0); 2]; 2];
        // |B⟩₂|B̄⟩₁ − |B̄⟩₂|B⟩₁
        for (j2, j1, c) in [(0usize, 1usize, r), (1, 0, -r)] {
            for k2 in 0..2 {
                for k1 in 0..2 {
                    out[k2][k1] += c * u[k2][j2] * u[k1][j1];
                }
            }
        }
        out
    }

    pub fn pair_norm_sqr(t: f64, mp: &MesonParams) -> f64 {
        pair_state(t, mp).iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    pub fn joint(t: f64, mp: &MesonParams, second: MesonState, first: MesonState) -> f64 {
        let psi = pair_state(t, mp);
        let x = mp.state_vector(second);
        let y = mp.state_vector(first);
        let mut acc = Complex::new(0.0, 0.0);
        for k2 in 0..2 {
            for k1 in 0..2 {
                acc += x[k2].conj() * y[k1].conj() * psi[k2][k1];
            }
        }
        acc.norm_sqr()
    }

    /// All five dynamic probabilities by projection.
    pub fn dynamic_probabilities(t: f64, mp: &MesonParams) -> DynamicProbabilities {
        DynamicProbabilities {
            b1_survival: transition(t, mp, MesonState::B1, MesonState::B1),
            b2_to_b1: transition(t, mp, MesonState::B1, MesonState::B2),
            bbar_survival: transition(t, mp, MesonState::Bbar, MesonState::Bbar),
            b_to_bbar: transition(t, mp, MesonState::Bbar, MesonState::B),
            joint_b1_bbar: joint(t, mp, MesonState::B1, MesonState::Bbar),
        }
    }

    /// Preparation-time table by projection, same axis mapping as
    /// [`t0_table`](super::t0_table).
    pub fn t0_table(mp: &MesonParams) -> JointProbabilityTable {
        let state = |axis: char, s: Sign| match (axis, s) {
            ('a', Sign::Plus) => MesonState::B1,
            ('a', Sign::Minus) => MesonState::B2,
            ('b', Sign::Plus) => MesonState::Bbar,
            ('b', Sign::Minus) => MesonState::B,
            ('c', Sign::Plus) => MesonState::BH,
            _ => MesonState::BL,
        };
        let mut table = JointProbabilityTable::zeros();
        for (pair, x, y) in [(AxisPair::AB, 'a', 'b'), (AxisPair::CB, 'c', 'b'), (AxisPair::AC, 'a', 'c')] {
            for s2 in Sign::BOTH {
                for s1 in Sign::BOTH {
                    table.set(pair, s2, s1, joint(0.0, mp, state(x, s2), state(y, s1)));
                }
            }
        }
        table
    }
}
