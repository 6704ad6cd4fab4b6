//! Two-level and bipartite two-level kernel.
//!
//! Spinors live in the (x, z) plane, so amplitudes are real in practice but
//! stored as complex numbers to keep the inner products honest. Pair
//! amplitudes are indexed `amp[s2][s1]`: slot 2 is the fermion (electron),
//! slot 1 the antifermion (positron).

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;

pub type Complex = Complex64;

/// Polar angle in radians, measured from the z axis within the (x, z) plane.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
pub struct PolarAngle(pub f64);

impl PolarAngle {
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self(deg.to_radians())
    }

    /// Representative in `[0, 2π)`.
    pub fn reduced(self) -> f64 {
        self.0.rem_euclid(TAU)
    }
}

impl From<f64> for PolarAngle {
    fn from(theta: f64) -> Self {
        Self(theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub up: Complex,
    pub down: Complex,
}

impl Spinor {
    pub fn new(up: Complex, down: Complex) -> Self {
        Self { up, down }
    }

    pub fn real(up: f64, down: f64) -> Self {
        Self::new(Complex::new(up, 0.0), Complex::new(down, 0.0))
    }

    pub fn component(&self, s: Spin) -> Complex {
        match s {
            Spin::Up => self.up,
            Spin::Down => self.down,
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Spinor) -> Complex {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// Applies the real rotation `[[cos φ, -sin φ], [sin φ, cos φ]]`.
    pub fn rotated(&self, phi: f64) -> Spinor {
        let (s, c) = phi.sin_cos();
        Spinor {
            up: self.up * c - self.down * s,
            down: self.up * s + self.down * c,
        }
    }
}

/// `+` projection eigenstate along `theta`: `(cos θ/2, sin θ/2)`.
pub fn spinor_plus(theta: PolarAngle) -> Spinor {
    let (s, c) = (0.5 * theta.0).sin_cos();
    Spinor::real(c, s)
}

/// `-` projection eigenstate along `theta`: `(-sin θ/2, cos θ/2)`.
pub fn spinor_minus(theta: PolarAngle) -> Spinor {
    let (s, c) = (0.5 * theta.0).sin_cos();
    Spinor::real(-s, c)
}

/// Projection eigenstate for a given outcome sign.
pub fn spinor_for(theta: PolarAngle, sign: Sign) -> Spinor {
    match sign {
        Sign::Plus => spinor_plus(theta),
        Sign::Minus => spinor_minus(theta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Dichotomic measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Which member of the pair a spinor belongs to. The charges are opposite,
/// so the two precess in opposite senses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    /// Slot 2.
    Electron,
    /// Slot 1.
    Positron,
}

impl Particle {
    pub fn evolve(self, s: Spinor, phase: f64) -> Spinor {
        match self {
            Particle::Electron => evolve_electron(s, phase),
            Particle::Positron => evolve_positron(s, phase),
        }
    }
}

/// Precession of the electron spinor by `phase = ωt`.
pub fn evolve_electron(s: Spinor, phase: f64) -> Spinor {
    s.rotated(phase)
}

/// Precession of the positron spinor by `phase = ωt`; opposite sense.
pub fn evolve_positron(s: Spinor, phase: f64) -> Spinor {
    s.rotated(-phase)
}

/// `|⟨ψ(t)|target⟩|²` where `ψ(t)` is `initial` precessed by `phase`.
pub fn transition_probability(
    particle: Particle,
    initial: Spinor,
    phase: f64,
    target: Spinor,
) -> f64 {
    particle.evolve(initial, phase).inner(&target).norm_sqr()
}

/// Two-particle spin state, `amp[s2][s1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState {
    pub amp: [[Complex; 2]; 2],
}

impl PairState {
    pub fn zero() -> Self {
        Self {
            amp: [[Complex::new(0.0, 0.0); 2]; 2],
        }
    }

    pub fn amplitude(&self, s2: Spin, s1: Spin) -> Complex {
        self.amp[s2.index()][s1.index()]
    }

    /// `|fermion⟩ ⊗ |antifermion⟩`
    pub fn product(fermion: &Spinor, antifermion: &Spinor) -> Self {
        let mut out = Self::zero();
        for s2 in Spin::BOTH {
            for s1 in Spin::BOTH {
                out.amp[s2.index()][s1.index()] = fermion.component(s2) * antifermion.component(s1);
            }
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    fn add_scaled(&mut self, other: &PairState, k: Complex) {
        for (row, orow) in self.amp.iter_mut().zip(other.amp.iter()) {
            for (a, b) in row.iter_mut().zip(orow.iter()) {
                *a += k * b;
            }
        }
    }
}

fn basis(s: Spin) -> Spinor {
    match s {
        Spin::Up => Spinor::real(1.0, 0.0),
        Spin::Down => Spinor::real(0.0, 1.0),
    }
}

/// `(|↑⟩₂|↓⟩₁ - |↓⟩₂|↑⟩₁)/√2`
pub fn singlet() -> PairState {
    let mut s = PairState::zero();
    s.amp[0][1] = Complex::new(FRAC_1_SQRT_2, 0.0);
    s.amp[1][0] = Complex::new(-FRAC_1_SQRT_2, 0.0);
    s
}

/// Singlet prepared along z at t = 0, each member precessed by its own
/// single-particle evolution for `phase = ωt`.
pub fn pair_state_at(phase: f64) -> PairState {
    let initial = singlet();
    let mut out = PairState::zero();
    for s2 in Spin::BOTH {
        for s1 in Spin::BOTH {
            let a = initial.amplitude(s2, s1);
            if a == Complex::new(0.0, 0.0) {
                continue;
            }
            let term = PairState::product(
                &evolve_electron(basis(s2), phase),
                &evolve_positron(basis(s1), phase),
            );
            out.add_scaled(&term, a);
        }
    }
    out
}

/// Born probability `|⟨proj2|⟨proj1|state⟩|²`.
pub fn joint_probability(state: &PairState, proj2: &Spinor, proj1: &Spinor) -> f64 {
    let mut acc = Complex::new(0.0, 0.0);
    for s2 in Spin::BOTH {
        for s1 in Spin::BOTH {
            acc += proj2.component(s2).conj() * proj1.component(s1).conj() * state.amplitude(s2, s1);
        }
    }
    acc.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const EPS: f64 = 1e-12;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_spinors_at_zero() {
        assert_eq!(spinor_plus(PolarAngle(0.0)), Spinor::real(1.0, 0.0));
        assert_eq!(spinor_minus(PolarAngle(0.0)), Spinor::real(0.0, 1.0));
        let t = PolarAngle(1.234);
        assert!(spinor_plus(t).inner(&spinor_minus(t)).norm() < 1e-15);
    }

    #[test]
    fn singlet_amplitudes() {
        let s = singlet();
        assert_eq!(s.amplitude(Spin::Up, Spin::Down).re, FRAC_1_SQRT_2);
        assert_eq!(s.amplitude(Spin::Down, Spin::Up).re, -FRAC_1_SQRT_2);
        assert_eq!(s.amplitude(Spin::Up, Spin::Up).norm(), 0.0);
        assert_eq!(s.amplitude(Spin::Down, Spin::Down).norm(), 0.0);
        assert!(close(s.norm_sqr(), 1.0, 1e-15));
    }

    #[test]
    fn electron_and_positron_precession() {
        let (theta_a, wt) = (0.8, 0.3);
        let e = evolve_electron(spinor_plus(PolarAngle(theta_a)), wt);
        assert!(close(e.up.re, (wt + theta_a / 2.0).cos(), 1e-15));
        assert!(close(e.down.re, (wt + theta_a / 2.0).sin(), 1e-15));

        let p = evolve_positron(spinor_plus(PolarAngle(theta_a)), wt);
        assert!(close(p.up.re, (wt - theta_a / 2.0).cos(), 1e-15));
        assert!(close(p.down.re, -(wt - theta_a / 2.0).sin(), 1e-15));

        let em = evolve_electron(spinor_minus(PolarAngle(theta_a)), wt);
        assert!(close(em.up.re, -(wt + theta_a / 2.0).sin(), 1e-15));
        let pm = evolve_positron(spinor_minus(PolarAngle(theta_a)), wt);
        assert!(close(pm.up.re, (wt - theta_a / 2.0).sin(), 1e-15));
        assert!(close(pm.down.re, (wt - theta_a / 2.0).cos(), 1e-15));

        let s = spinor_minus(PolarAngle(2.0));
        assert_eq!(evolve_electron(s, 0.0), s);
    }

    #[test]
    fn pair_state_matches_displayed_wave_function() {
        assert_eq!(pair_state_at(0.0), singlet());
        for wt in [0.1, 0.7, 2.5] {
            let psi = pair_state_at(wt);
            let (s, c) = f64::sin_cos(wt);
            // (c, s)₂ (s, c)₁ - (-s, c)₂ (c, -s)₁, over √2
            let want = [[c * s + s * c, c * c - s * s], [s * s - c * c, s * c + c * s]];
            for (row, want_row) in psi.amp.iter().zip(want) {
                for (a, w) in row.iter().zip(want_row) {
                    assert!(close(a.re, w * FRAC_1_SQRT_2, 1e-15));
                    assert_eq!(a.im, 0.0);
                }
            }
            assert!(close(psi.amplitude(Spin::Up, Spin::Up).re, (2.0 * wt).sin() * FRAC_1_SQRT_2, 1e-15));
        }
        assert!(close(pair_state_at(0.7).norm_sqr(), 1.0, EPS));
    }

    #[test]
    fn joint_probability_examples() {
        let th = PolarAngle(0.9);
        assert!(joint_probability(&singlet(), &spinor_plus(th), &spinor_plus(th)) <= EPS);

        let (ta, tb, wt) = (0.3, 1.9, 0.45);
        let p = joint_probability(
            &pair_state_at(wt),
            &spinor_plus(PolarAngle(ta)),
            &spinor_plus(PolarAngle(tb)),
        );
        let want = 0.5 * ((tb - ta) / 2.0 + 2.0 * wt).sin().powi(2);
        assert!(close(p, want, EPS));
    }

    #[test]
    fn closed_forms_on_grid() {
        // w(a+,b+,t), w(a-,c+,t), w(c+,b-,t) against the three closed forms
        let n = 12;
        let step = TAU / n as f64;
        for ia in 0..n {
            for ib in 0..n {
                for ic in 0..n {
                    for it in 0..n {
                        let (ta, tb, tc) = (ia as f64 * step, ib as f64 * step, ic as f64 * step);
                        let wt = it as f64 * PI / n as f64;
                        let psi = pair_state_at(wt);
                        let (a, b, c) = (PolarAngle(ta), PolarAngle(tb), PolarAngle(tc));
                        let ab = joint_probability(&psi, &spinor_plus(a), &spinor_plus(b));
                        let ac = joint_probability(&psi, &spinor_minus(a), &spinor_plus(c));
                        let cb = joint_probability(&psi, &spinor_plus(c), &spinor_minus(b));
                        assert!(close(ab, 0.5 * ((tb - ta) / 2.0 + 2.0 * wt).sin().powi(2), EPS));
                        assert!(close(ac, 0.5 * ((tc - ta) / 2.0 + 2.0 * wt).cos().powi(2), EPS));
                        assert!(close(cb, 0.5 * ((tc - tb) / 2.0 - 2.0 * wt).cos().powi(2), EPS));
                    }
                }
            }
        }
    }

    #[test]
    fn transition_examples() {
        let a = PolarAngle(0.6);
        for particle in [Particle::Electron, Particle::Positron] {
            for wt in [0.0, 0.4, 1.3] {
                let stay = transition_probability(particle, spinor_plus(a), wt, spinor_plus(a));
                let flip = transition_probability(particle, spinor_minus(a), wt, spinor_plus(a));
                assert!(close(stay, wt.cos().powi(2), 1e-15));
                assert!(close(flip, wt.sin().powi(2), 1e-15));
            }
        }
    }

    #[test]
    fn completeness_at_any_phase() {
        let (a, b) = (PolarAngle(0.4), PolarAngle(2.2));
        for wt in [0.0, 0.3, 1.1, 4.0] {
            let psi = pair_state_at(wt);
            let total: f64 = Sign::BOTH
                .iter()
                .flat_map(|&s2| Sign::BOTH.iter().map(move |&s1| (s2, s1)))
                .map(|(s2, s1)| joint_probability(&psi, &spinor_for(a, s2), &spinor_for(b, s1)))
                .sum();
            assert!(close(total, 1.0, EPS));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn singlet_anticorrelated(theta in -10.0f64..10.0) {
            let t = PolarAngle(theta);
            prop_assert!(joint_probability(&singlet(), &spinor_plus(t), &spinor_plus(t)) <= EPS);
        }

        #[test]
        fn singlet_depends_only_on_difference(ta in -7.0f64..7.0, tb in -7.0f64..7.0, shift in -7.0f64..7.0) {
            let p = |x: f64, y: f64| joint_probability(&singlet(), &spinor_plus(PolarAngle(x)), &spinor_plus(PolarAngle(y)));
            prop_assert!(close(p(ta, tb), p(ta + shift, tb + shift), EPS));
        }

        #[test]
        fn evolution_is_unitary(wt in -20.0f64..20.0) {
            prop_assert!(close(pair_state_at(wt).norm_sqr(), 1.0, EPS));
        }
    }
}
