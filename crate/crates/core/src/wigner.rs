//! Static and time-dependent Wigner inequalities, plus a local-hidden-variable
//! model that certifies they hold classically.
//!
//! Probabilities are keyed by an axis pair and a sign pair. The first sign
//! always belongs to the slot-2 (fermion) axis and the second to the slot-1
//! (antifermion) axis, so `get(AxisPair::AB, Plus, Minus)` is `w(a₊⁽²⁾, b₋⁽¹⁾)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qm2::Sign;
use crate::report::InequalityReport;

/// Slack allowed below zero before an operand counts as negative.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Slack allowed above one for the sum of an axis pair's four entries.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SignPair {
    pub first: Sign,
    pub second: Sign,
}

impl SignPair {
    pub const ALL: [SignPair; 4] = [
        SignPair::new(Sign::Plus, Sign::Plus),
        SignPair::new(Sign::Plus, Sign::Minus),
        SignPair::new(Sign::Minus, Sign::Plus),
        SignPair::new(Sign::Minus, Sign::Minus),
    ];

    pub const fn new(first: Sign, second: Sign) -> Self {
        Self { first, second }
    }

    fn index(self) -> usize {
        let f = matches!(self.first, Sign::Minus) as usize;
        let s = matches!(self.second, Sign::Minus) as usize;
        2 * f + s
    }
}

/// The three measured pairs `(a⁽²⁾, b⁽¹⁾)`, `(c⁽²⁾, b⁽¹⁾)`, `(a⁽²⁾, c⁽¹⁾)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AxisPair {
    AB,
    CB,
    AC,
}

impl AxisPair {
    pub const ALL: [AxisPair; 3] = [AxisPair::AB, AxisPair::CB, AxisPair::AC];

    fn index(self) -> usize {
        match self {
            AxisPair::AB => 0,
            AxisPair::CB => 1,
            AxisPair::AC => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct JointProbabilityTable {
    p: [[f64; 4]; 3],
}

impl JointProbabilityTable {
    pub fn zeros() -> Self {
        Self::default()
    }

    /// Builds a table from a probability function and validates it.
    pub fn from_fn(mut f: impl FnMut(AxisPair, Sign, Sign) -> f64) -> Result<Self> {
        let mut t = Self::zeros();
        for pair in AxisPair::ALL {
            for sp in SignPair::ALL {
                t.p[pair.index()][sp.index()] = f(pair, sp.first, sp.second);
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn get(&self, pair: AxisPair, first: Sign, second: Sign) -> f64 {
        self.p[pair.index()][SignPair::new(first, second).index()]
    }

    pub fn set(&mut self, pair: AxisPair, first: Sign, second: Sign, value: f64) {
        self.p[pair.index()][SignPair::new(first, second).index()] = value;
    }

    pub fn pair_total(&self, pair: AxisPair) -> f64 {
        self.p[pair.index()].iter().sum()
    }

    /// Entries must be non-negative and no pair may hold more than unit
    /// probability. Sub-normalized tables are fine.
    pub fn validate(&self) -> Result<()> {
        for pair in AxisPair::ALL {
            for sp in SignPair::ALL {
                let v = self.p[pair.index()][sp.index()];
                if !v.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "non-finite probability for {pair:?} {sp:?}"
                    )));
                }
                if v < -NEGATIVE_SLACK {
                    return Err(Error::NegativeInput {
                        name: "joint probability",
                        value: v,
                    });
                }
            }
            let total = self.pair_total(pair);
            if total > 1.0 + NORMALIZATION_SLACK {
                return Err(Error::InvalidParams(format!(
                    "axis pair {pair:?} sums to {total} > 1"
                )));
            }
        }
        Ok(())
    }

    /// The same experiment with one analyzer direction reversed, which swaps
    /// the `+` and `-` outcomes along it.
    pub fn with_axis_flipped(&self, axis: Axis) -> Self {
        let mut out = *self;
        for pair in AxisPair::ALL {
            let (flip_first, flip_second) = match (pair, axis) {
                (AxisPair::AB, Axis::A) | (AxisPair::AC, Axis::A) | (AxisPair::CB, Axis::C) => {
                    (true, false)
                }
                (AxisPair::AB, Axis::B) | (AxisPair::CB, Axis::B) | (AxisPair::AC, Axis::C) => {
                    (false, true)
                }
                _ => (false, false),
            };
            for sp in SignPair::ALL {
                let src_first = if flip_first { sp.first.flipped() } else { sp.first };
                let src_second = if flip_second { sp.second.flipped() } else { sp.second };
                out.set(pair, sp.first, sp.second, self.get(pair, src_first, src_second));
            }
        }
        out
    }
}

/// Local transition probabilities between t₀ and t:
/// `a_pp = w(a₊⁽²⁾(t₀) → a₊⁽²⁾(t))`, `a_mp = w(a₋⁽²⁾(t₀) → a₊⁽²⁾(t))`,
/// and the `b⁽¹⁾` analogues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionTable {
    pub a_pp: f64,
    pub a_mp: f64,
    pub b_pp: f64,
    pub b_mp: f64,
}

impl TransitionTable {
    /// No interaction: survival 1, flip 0.
    pub const IDENTITY: TransitionTable = TransitionTable {
        a_pp: 1.0,
        a_mp: 0.0,
        b_pp: 1.0,
        b_mp: 0.0,
    };

    pub fn new(a_pp: f64, a_mp: f64, b_pp: f64, b_mp: f64) -> Result<Self> {
        let t = Self {
            a_pp,
            a_mp,
            b_pp,
            b_mp,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a_pp", self.a_pp),
            ("a_mp", self.a_mp),
            ("b_pp", self.b_pp),
            ("b_mp", self.b_mp),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("transition {name} is not finite")));
            }
            if v < -NEGATIVE_SLACK {
                return Err(Error::NegativeInput { name, value: v });
            }
            if v > 1.0 + NEGATIVE_SLACK {
                return Err(Error::InvalidParams(format!("transition {name} = {v} exceeds 1")));
            }
        }
        Ok(())
    }

    fn survival(&self, axis_sign: Sign, b_axis: bool) -> f64 {
        match (b_axis, axis_sign) {
            (false, Sign::Plus) => self.a_pp,
            (false, Sign::Minus) => self.a_mp,
            (true, Sign::Plus) => self.b_pp,
            (true, Sign::Minus) => self.b_mp,
        }
    }
}

/// Evaluates one of the four static inequalities.
///
/// | variant | inequality |
/// |---|---|
/// | 0 | `w(a₊,b₊) ≤ w(c₊,b₊) + w(a₊,c₊)` |
/// | 1 | `w(a₊,b₋) ≤ w(c₊,b₋) + w(a₊,c₊)` |
/// | 2 | `w(a₋,b₊) ≤ w(c₊,b₊) + w(a₋,c₊)` |
/// | 3 | `w(a₋,b₋) ≤ w(c₊,b₋) + w(a₋,c₊)` |
pub fn static_wigner(
    table: &JointProbabilityTable,
    variant: usize,
    tolerance: f64,
) -> Result<InequalityReport> {
    use Sign::{Minus, Plus};
    let (sa, sb) = match variant {
        0 => (Plus, Plus),
        1 => (Plus, Minus),
        2 => (Minus, Plus),
        3 => (Minus, Minus),
        v => return Err(Error::InvalidVariant(v)),
    };
    let lhs = table.get(AxisPair::AB, sa, sb);
    let rhs = table.get(AxisPair::CB, Plus, sb) + table.get(AxisPair::AC, sa, Plus);
    Ok(InequalityReport::new(lhs, rhs, tolerance))
}

/// Right-hand side of the time-dependent inequality for `w(a₊⁽²⁾, b₊⁽¹⁾, t)`.
pub fn dynamic_rhs(t0: &JointProbabilityTable, trans: &TransitionTable) -> f64 {
    use Sign::{Minus, Plus};
    let a_total = trans.a_pp + trans.a_mp;
    let b_total = trans.b_pp + trans.b_mp;
    trans.a_pp * b_total * t0.get(AxisPair::AC, Plus, Plus)
        + trans.a_mp * b_total * t0.get(AxisPair::AC, Minus, Plus)
        + trans.b_pp * a_total * t0.get(AxisPair::CB, Plus, Plus)
        + trans.b_mp * a_total * t0.get(AxisPair::CB, Plus, Minus)
}

/// Time-dependent inequality `w(a₊⁽²⁾, b₊⁽¹⁾, t) ≤ rhs(t₀ table, transitions)`.
pub fn dynamic_wigner(
    t0_table: &JointProbabilityTable,
    trans: &TransitionTable,
    lhs_prob: f64,
    tolerance: f64,
) -> Result<InequalityReport> {
    if !lhs_prob.is_finite() || lhs_prob < -NEGATIVE_SLACK {
        return Err(Error::NegativeInput {
            name: "w(a+, b+, t)",
            value: lhs_prob,
        });
    }
    t0_table.validate()?;
    trans.validate()?;
    Ok(InequalityReport::new(
        lhs_prob,
        dynamic_rhs(t0_table, trans),
        tolerance,
    ))
}

/// Probability measure over the eight anticorrelated elementary outcomes.
///
/// Outcome `k` fixes the antifermion's signs `(α, β, γ)` on `(a, b, c)`; the
/// fermion carries the opposite signs. `k = 4·[α=−] + 2·[β=−] + [γ=−]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiddenVariableModel {
    weight: [f64; 8],
}

impl HiddenVariableModel {
    pub fn new(weight: [f64; 8]) -> Result<Self> {
        if weight.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParams(
                "hidden-variable weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weight.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "hidden-variable weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weight })
    }

    pub fn uniform() -> Self {
        Self { weight: [0.125; 8] }
    }

    pub fn point_mass(alpha: Sign, beta: Sign, gamma: Sign) -> Self {
        let mut weight = [0.0; 8];
        weight[Self::index(alpha, beta, gamma)] = 1.0;
        Self { weight }
    }

    pub fn weights(&self) -> &[f64; 8] {
        &self.weight
    }

    pub fn index(alpha: Sign, beta: Sign, gamma: Sign) -> usize {
        let bit = |s: Sign| matches!(s, Sign::Minus) as usize;
        4 * bit(alpha) + 2 * bit(beta) + bit(gamma)
    }

    /// Antifermion signs `(α, β, γ)` for outcome `k`.
    pub fn outcome(k: usize) -> (Sign, Sign, Sign) {
        let s = |bit: usize| if bit == 0 { Sign::Plus } else { Sign::Minus };
        (s((k >> 2) & 1), s((k >> 1) & 1), s(k & 1))
    }
}

/// Marginal joint probabilities induced by a hidden-variable model.
pub fn lhv_table(model: &HiddenVariableModel) -> JointProbabilityTable {
    let mut t = JointProbabilityTable::zeros();
    for (k, &w) in model.weight.iter().enumerate() {
        let (alpha, beta, gamma) = HiddenVariableModel::outcome(k);
        // fermion signs are the opposites
        let (a2, c2) = (alpha.flipped(), gamma.flipped());
        let (b1, c1) = (beta, gamma);
        for (pair, first, second) in [
            (AxisPair::AB, a2, b1),
            (AxisPair::CB, c2, b1),
            (AxisPair::AC, a2, c1),
        ] {
            let cur = t.get(pair, first, second);
            t.set(pair, first, second, cur + w);
        }
    }
    t
}

/// Static table plus the locally evolved `w(a₊⁽²⁾, b₊⁽¹⁾, t)`, assuming each
/// member flips independently according to `trans`.
pub fn lhv_dynamic_operands(
    model: &HiddenVariableModel,
    trans: &TransitionTable,
) -> (JointProbabilityTable, f64) {
    let table = lhv_table(model);
    let mut lhs = 0.0;
    for sa in Sign::BOTH {
        for sb in Sign::BOTH {
            lhs += trans.survival(sa, false)
                * trans.survival(sb, true)
                * table.get(AxisPair::AB, sa, sb);
        }
    }
    (table, lhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Static(usize),
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub trial: u64,
    pub kind: CheckKind,
    pub margin: f64,
    pub model: HiddenVariableModel,
    pub transitions: TransitionTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub trials: u64,
    pub max_static_margin: f64,
    pub max_dynamic_margin: f64,
    pub breaches: u64,
    pub tolerance: f64,
    pub worst: Option<WorstCase>,
}

impl FuzzSummary {
    fn empty(tolerance: f64) -> Self {
        Self {
            trials: 0,
            max_static_margin: f64::NEG_INFINITY,
            max_dynamic_margin: f64::NEG_INFINITY,
            breaches: 0,
            tolerance,
            worst: None,
        }
    }

    pub fn max_margin(&self) -> f64 {
        self.max_static_margin.max(self.max_dynamic_margin)
    }

    pub fn is_sound(&self) -> bool {
        self.breaches == 0
    }

    fn record(&mut self, trial: u64, model: &HiddenVariableModel, trans: &TransitionTable) {
        self.trials += 1;
        let table = lhv_table(model);
        let mut margins = [(CheckKind::Dynamic, 0.0); 5];
        for (variant, slot) in margins.iter_mut().take(4).enumerate() {
            let r = static_wigner(&table, variant, self.tolerance).expect("variant in range");
            *slot = (CheckKind::Static(variant), r.margin);
            self.max_static_margin = self.max_static_margin.max(r.margin);
        }
        let (t0, lhs) = lhv_dynamic_operands(model, trans);
        let dynamic = lhs - dynamic_rhs(&t0, trans);
        margins[4] = (CheckKind::Dynamic, dynamic);
        self.max_dynamic_margin = self.max_dynamic_margin.max(dynamic);

        let mut breached = false;
        for (kind, margin) in margins {
            breached |= margin > self.tolerance;
            let better = self.worst.is_none_or(|w| margin > w.margin);
            if better {
                self.worst = Some(WorstCase {
                    trial,
                    kind,
                    margin,
                    model: *model,
                    transitions: *trans,
                });
            }
        }
        self.breaches += breached as u64;
    }

    /// Order-independent merge: max margins, summed counts, worst case by
    /// margin with ties going to the lower trial index.
    fn merge(mut self, other: FuzzSummary) -> FuzzSummary {
        self.trials += other.trials;
        self.breaches += other.breaches;
        self.max_static_margin = self.max_static_margin.max(other.max_static_margin);
        self.max_dynamic_margin = self.max_dynamic_margin.max(other.max_dynamic_margin);
        self.worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => {
                if b.margin > a.margin || (b.margin == a.margin && b.trial < a.trial) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
            (a, b) => a.or(b),
        };
        self
    }
}

const FUZZ_BATCH: u64 = 4096;

fn random_model(rng: &mut ChaCha8Rng) -> HiddenVariableModel {
    let mut w = [0.0; 8];
    let sparse = rng.random_bool(0.25);
    for wi in w.iter_mut() {
        // exponential draws give a uniform point on the simplex
        let e = -(1.0 - rng.random::<f64>()).ln();
        *wi = if sparse && rng.random_bool(0.5) { 0.0 } else { e };
    }
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        w[rng.random_range(0..8)] = 1.0;
    } else {
        w.iter_mut().for_each(|x| *x /= total);
    }
    // renormalization leaves at most a few ulps of drift
    HiddenVariableModel { weight: w }
}

fn random_transitions(rng: &mut ChaCha8Rng) -> TransitionTable {
    let mut draw = || {
        if rng.random_bool(0.1) {
            if rng.random_bool(0.5) { 1.0 } else { 0.0 }
        } else {
            rng.random::<f64>()
        }
    };
    TransitionTable {
        a_pp: draw(),
        a_mp: draw(),
        b_pp: draw(),
        b_mp: draw(),
    }
}

/// Randomized classical-soundness check over `n` seeded trials.
///
/// Trials are grouped into fixed batches, each driven by its own ChaCha
/// stream, so the summary depends only on `(n, seed)` and not on how many
/// worker threads run it.
pub fn fuzz_lhv(n: u64, seed: u64, tolerance: f64) -> Result<FuzzSummary> {
    if n == 0 {
        return Err(Error::InvalidParams("fuzz_lhv needs at least one trial".into()));
    }
    let batches = n.div_ceil(FUZZ_BATCH);
    let summary = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let mut local = FuzzSummary::empty(tolerance);
            let start = batch * FUZZ_BATCH;
            let end = (start + FUZZ_BATCH).min(n);
            for trial in start..end {
                let model = if trial == 0 {
                    HiddenVariableModel::uniform()
                } else {
                    random_model(&mut rng)
                };
                let trans = random_transitions(&mut rng);
                local.record(trial, &model, &trans);
            }
            local
        })
        .reduce(|| FuzzSummary::empty(tolerance), FuzzSummary::merge);
    Ok(summary)
}

/// Exhaustive sweep of the extreme points: the 8 point-mass models against
/// all 16 transition tables with entries in {0, 1}.
pub fn corner_sweep(tolerance: f64) -> FuzzSummary {
    let mut summary = FuzzSummary::empty(tolerance);
    let mut trial = 0;
    for k in 0..8 {
        let (a, b, c) = HiddenVariableModel::outcome(k);
        let model = HiddenVariableModel::point_mass(a, b, c);
        for bits in 0..16u32 {
            let bit = |i: u32| f64::from((bits >> i) & 1);
            let trans = TransitionTable {
                a_pp: bit(0),
                a_mp: bit(1),
                b_pp: bit(2),
                b_mp: bit(3),
            };
            summary.record(trial, &model, &trans);
            trial += 1;
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Sign::{Minus, Plus};

    fn singlet_table(theta_a: f64, theta_b: f64, theta_c: f64) -> JointProbabilityTable {
        // ½ sin²(Δ/2) for equal signs, ½ cos²(Δ/2) for opposite ones
        JointProbabilityTable::from_fn(|pair, s2, s1| {
            let (t2, t1) = match pair {
                AxisPair::AB => (theta_a, theta_b),
                AxisPair::CB => (theta_c, theta_b),
                AxisPair::AC => (theta_a, theta_c),
            };
            let half = 0.5 * (t1 - t2);
            if s2 == s1 {
                0.5 * half.sin().powi(2)
            } else {
                0.5 * half.cos().powi(2)
            }
        })
        .unwrap()
    }

    #[test]
    fn singlet_false_inequality() {
        use std::f64::consts::PI;
        let t = singlet_table(0.0, 2.0 * PI / 3.0, PI / 3.0);
        let r = static_wigner(&t, 0, 1e-9).unwrap();
        assert!((r.lhs - 3.0 / 8.0).abs() < 1e-15);
        assert!((r.rhs - 2.0 / 8.0).abs() < 1e-15);
        assert!(r.violated);
    }

    #[test]
    fn zero_table_is_equality() {
        let z = JointProbabilityTable::zeros();
        for v in 0..4 {
            let r = static_wigner(&z, v, 1e-9).unwrap();
            assert_eq!((r.lhs, r.rhs, r.margin, r.violated), (0.0, 0.0, 0.0, false));
        }
        let r = dynamic_wigner(&z, &TransitionTable::IDENTITY, 0.0, 1e-9).unwrap();
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn bad_variant_and_negative_inputs() {
        let z = JointProbabilityTable::zeros();
        assert_eq!(static_wigner(&z, 4, 1e-9), Err(Error::InvalidVariant(4)));
        assert!(matches!(
            dynamic_wigner(&z, &TransitionTable::IDENTITY, -0.1, 1e-9),
            Err(Error::NegativeInput { .. })
        ));
        assert!(TransitionTable::new(1.0, -0.5, 1.0, 0.0).is_err());
        let mut bad = JointProbabilityTable::zeros();
        bad.set(AxisPair::CB, Plus, Minus, -0.01);
        assert!(dynamic_wigner(&bad, &TransitionTable::IDENTITY, 0.0, 1e-9).is_err());
        assert!(JointProbabilityTable::from_fn(|_, _, _| 0.3).is_err());
    }

    #[test]
    fn identity_transitions_reduce_to_static() {
        let t = singlet_table(0.2, 1.7, 0.9);
        let stat = static_wigner(&t, 0, 1e-9).unwrap();
        let dynamic = dynamic_wigner(&t, &TransitionTable::IDENTITY, stat.lhs, 1e-9).unwrap();
        assert!((dynamic.rhs - stat.rhs).abs() <= 1e-15);
        assert!((dynamic.margin - stat.margin).abs() <= 1e-15);
    }

    #[test]
    fn variants_are_axis_relabelings() {
        let t = singlet_table(0.3, 2.1, 1.2);
        let v0 = |tab: &JointProbabilityTable| static_wigner(tab, 0, 1e-9).unwrap();
        let flip_b = t.with_axis_flipped(Axis::B);
        let flip_a = t.with_axis_flipped(Axis::A);
        let flip_ab = flip_a.with_axis_flipped(Axis::B);
        assert_eq!(v0(&flip_b), static_wigner(&t, 1, 1e-9).unwrap());
        assert_eq!(v0(&flip_a), static_wigner(&t, 2, 1e-9).unwrap());
        assert_eq!(v0(&flip_ab), static_wigner(&t, 3, 1e-9).unwrap());
        assert_eq!(t.with_axis_flipped(Axis::C).with_axis_flipped(Axis::C), t);
    }

    #[test]
    fn lhv_table_examples() {
        let u = lhv_table(&HiddenVariableModel::uniform());
        assert_eq!(u.get(AxisPair::AB, Plus, Plus), 0.25);

        let pm = lhv_table(&HiddenVariableModel::point_mass(Plus, Plus, Plus));
        assert_eq!(pm.get(AxisPair::AB, Plus, Plus), 0.0);
        // a⁽²⁾ = −, b⁽¹⁾ = +
        assert_eq!(pm.get(AxisPair::AB, Minus, Plus), 1.0);
        assert_eq!(pm.get(AxisPair::CB, Minus, Plus), 1.0);
        assert_eq!(pm.get(AxisPair::AC, Minus, Plus), 1.0);
    }

    #[test]
    fn lhv_dynamic_operand_examples() {
        let model = HiddenVariableModel::new([0.05, 0.2, 0.1, 0.15, 0.0, 0.3, 0.12, 0.08]).unwrap();
        let (t, lhs) = lhv_dynamic_operands(&model, &TransitionTable::IDENTITY);
        assert_eq!(lhs, t.get(AxisPair::AB, Plus, Plus));
        let flip = TransitionTable::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let (t, lhs) = lhv_dynamic_operands(&model, &flip);
        assert_eq!(lhs, t.get(AxisPair::AB, Minus, Minus));
    }

    #[test]
    fn corner_sweep_is_sound() {
        let s = corner_sweep(1e-12);
        assert_eq!(s.trials, 128);
        assert!(s.max_margin() <= 1e-12, "{s:?}");
        assert!(s.is_sound());
    }

    #[test]
    fn fuzz_is_sound_and_deterministic() {
        let a = fuzz_lhv(20_000, 7, 1e-12).unwrap();
        assert_eq!(a.trials, 20_000);
        assert!(a.max_margin() <= 1e-12);
        assert_eq!(a.breaches, 0);
        let b = fuzz_lhv(20_000, 7, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fuzz_same_summary_on_one_thread() {
        let many = fuzz_lhv(10_000, 3, 1e-12).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| fuzz_lhv(10_000, 3, 1e-12).unwrap());
        assert_eq!(many, one);
    }

    #[test]
    fn fuzz_single_trial_is_uniform_model() {
        let s = fuzz_lhv(1, 99, 1e-12).unwrap();
        let w = s.worst.unwrap();
        assert_eq!(w.model, HiddenVariableModel::uniform());
        assert_eq!(lhv_table(&w.model).get(AxisPair::AB, Plus, Plus), 0.25);
        assert!(fuzz_lhv(0, 1, 1e-12).is_err());
    }

    fn arb_table() -> impl Strategy<Value = JointProbabilityTable> {
        prop::array::uniform12(0.0f64..0.25).prop_map(|v| {
            let mut t = JointProbabilityTable::zeros();
            let mut i = 0;
            for pair in AxisPair::ALL {
                for sp in SignPair::ALL {
                    t.set(pair, sp.first, sp.second, v[i]);
                    i += 1;
                }
            }
            t
        })
    }

    fn arb_trans() -> impl Strategy<Value = TransitionTable> {
        prop::array::uniform4(0.0f64..=1.0).prop_map(|v| TransitionTable {
            a_pp: v[0],
            a_mp: v[1],
            b_pp: v[2],
            b_mp: v[3],
        })
    }

    proptest! {
        #[test]
        fn rhs_monotone_in_each_operand(t in arb_table(), tr in arb_trans(), bump in 0.0f64..0.1, which in 0usize..12) {
            let base = dynamic_rhs(&t, &tr);
            let mut bumped = t;
            let pair = AxisPair::ALL[which / 4];
            let sp = SignPair::ALL[which % 4];
            bumped.set(pair, sp.first, sp.second, t.get(pair, sp.first, sp.second) + bump);
            prop_assert!(dynamic_rhs(&bumped, &tr) >= base);
        }

        #[test]
        fn lhv_tables_are_probability_measures(w in prop::array::uniform8(0.0f64..1.0)) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-6);
            let model = HiddenVariableModel::new(w.map(|x| x / total));
            prop_assume!(model.is_ok());
            let t = lhv_table(&model.unwrap());
            for pair in AxisPair::ALL {
                prop_assert!((t.pair_total(pair) - 1.0).abs() < 1e-12);
                for sp in SignPair::ALL {
                    prop_assert!(t.get(pair, sp.first, sp.second) >= 0.0);
                }
            }
        }
    }
}
