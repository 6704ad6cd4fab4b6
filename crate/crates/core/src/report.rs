use serde::Serialize;

/// Default violation tolerance applied to `lhs - rhs`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Outcome of evaluating one inequality `lhs <= rhs`.
///
/// `violated` is true exactly when `margin = lhs - rhs` exceeds `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
    pub tolerance: f64,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            lhs,
            rhs,
            margin,
            violated: margin > tolerance,
            tolerance,
        }
    }

    pub fn with_default_tolerance(lhs: f64, rhs: f64) -> Self {
        Self::new(lhs, rhs, DEFAULT_TOLERANCE)
    }

    /// Re-evaluates the same sides against another tolerance.
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self::new(self.lhs, self.rhs, tolerance)
    }

    /// Both sides multiplied by a positive constant.
    pub fn scaled(self, factor: f64) -> Self {
        Self::new(self.lhs * factor, self.rhs * factor, self.tolerance)
    }
}
