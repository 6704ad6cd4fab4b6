//! Lattice sweeps and derivative-free maximization of an inequality margin.
//!
//! A target is any `Fn(&[f64]) -> Result<InequalityReport>` taking one value
//! per axis, in axis order.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::InequalityReport;

pub const MAX_AXES: usize = 4;
pub const MAX_GRID_POINTS: u128 = 100_000_000;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const LINE_SEARCH_REL_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let name = name.into();
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParams(format!("axis {name}: need finite lo < hi, got [{lo}, {hi}]")));
        }
        if steps < 2 {
            return Err(Error::InvalidParams(format!("axis {name}: need at least 2 steps, got {steps}")));
        }
        Ok(Self { name, lo, hi, steps })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.steps - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.name.clone(), self.lo, self.hi, self.steps).map(drop)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    /// One value per axis, in axis order.
    pub params: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
}

impl ScanRecord {
    fn new(params: Vec<f64>, r: InequalityReport) -> Self {
        Self {
            params,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            violated: r.violated,
        }
    }
}

fn named(ranges: &[AxisRange], values: &[f64]) -> Vec<(String, f64)> {
    ranges.iter().zip(values).map(|(r, &v)| (r.name.clone(), v)).collect()
}

fn evaluate<F>(target: &F, ranges: &[AxisRange], point: &[f64]) -> Result<InequalityReport>
where
    F: Fn(&[f64]) -> Result<InequalityReport>,
{
    target(point).map_err(|e| Error::Evaluator {
        point: named(ranges, point),
        source: Box::new(e),
    })
}

fn check_ranges(ranges: &[AxisRange]) -> Result<u128> {
    if ranges.is_empty() || ranges.len() > MAX_AXES {
        return Err(Error::InvalidParams(format!(
            "need 1 to {MAX_AXES} axes, got {}",
            ranges.len()
        )));
    }
    let mut total: u128 = 1;
    for r in ranges {
        r.validate()?;
        total = total.saturating_mul(r.steps as u128);
    }
    if total > MAX_GRID_POINTS {
        return Err(Error::GuardExceeded {
            points: total,
            limit: MAX_GRID_POINTS,
        });
    }
    Ok(total)
}

/// Lattice point for a row-major index; the last axis varies fastest.
fn lattice_point(ranges: &[AxisRange], mut index: usize) -> Vec<f64> {
    let mut point = vec![0.0; ranges.len()];
    for (slot, r) in point.iter_mut().zip(ranges).rev() {
        *slot = r.value(index % r.steps);
        index /= r.steps;
    }
    point
}

/// Evaluates `target` at every lattice point, in row-major order.
///
/// On failure the error for the lowest failing index is returned.
pub fn grid_scan<F>(target: &F, ranges: &[AxisRange]) -> Result<Vec<ScanRecord>>
where
    F: Fn(&[f64]) -> Result<InequalityReport> + Sync,
{
    let total = check_ranges(ranges)? as usize;
    let results: Vec<Result<ScanRecord>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let point = lattice_point(ranges, i);
            evaluate(target, ranges, &point).map(|r| ScanRecord::new(point, r))
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxViolationResult {
    pub params: Vec<(String, f64)>,
    pub margin: f64,
    pub refinement_iterations: usize,
    /// Best margin after the grid (entry 0) and after each refinement sweep.
    pub history: Vec<f64>,
    pub grid_margin: f64,
}

impl MaxViolationResult {
    pub fn values(&self) -> Vec<f64> {
        self.params.iter().map(|(_, v)| *v).collect()
    }
}

/// Coarse lattice search followed by up to `refine_iters` sweeps of cyclic
/// coordinate ascent. Each coordinate gets a golden-section search within one
/// grid spacing of the incumbent, clamped to its range; a move is kept only if
/// it does not lower the margin. Grid ties go to the lowest row-major index.
pub fn maximize_violation<F>(target: &F, ranges: &[AxisRange], refine_iters: usize) -> Result<MaxViolationResult>
where
    F: Fn(&[f64]) -> Result<InequalityReport> + Sync,
{
    let records = grid_scan(target, ranges)?;
    let mut best = &records[0];
    for r in &records[1..] {
        if r.margin > best.margin {
            best = r;
        }
    }
    let grid_margin = best.margin;
    let mut x = best.params.clone();
    let mut margin = best.margin;
    let mut history = vec![margin];
    let mut iterations = 0;

    for _ in 0..refine_iters {
        iterations += 1;
        let before = margin;
        for d in 0..ranges.len() {
            let h = ranges[d].spacing();
            let lo = (x[d] - h).max(ranges[d].lo);
            let hi = (x[d] + h).min(ranges[d].hi);
            let (xd, md) = golden_section(target, ranges, &x, d, lo, hi)?;
            if md >= margin {
                x[d] = xd;
                margin = md;
            }
        }
        history.push(margin);
        if margin == before {
            break;
        }
    }

    Ok(MaxViolationResult {
        params: named(ranges, &x),
        margin,
        refinement_iterations: iterations,
        history,
        grid_margin,
    })
}

fn golden_section<F>(
    target: &F,
    ranges: &[AxisRange],
    base: &[f64],
    axis: usize,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Result<InequalityReport>,
{
    let mut point = base.to_vec();
    let mut f = |v: f64| -> Result<f64> {
        point[axis] = v;
        Ok(evaluate(target, ranges, &point)?.margin)
    };
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let width = LINE_SEARCH_REL_WIDTH * (1.0 + base[axis].abs());
    while hi - lo > width {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}
