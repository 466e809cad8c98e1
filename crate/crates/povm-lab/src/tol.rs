//! Numerical tolerance constants used throughout the crate.

/// Tolerance for structural identities (Hermiticity, orthonormality,
/// closed-form agreement).
pub const STRUCTURAL: f64 = 1e-12;

/// Tolerance for state validity (trace deviation, eigenvalue floor).
pub const STATE: f64 = 1e-10;

/// Epsilon guard applied before taking a ceiling, so values that are an
/// integer up to floating-point rounding do not get bumped up a step.
pub const CEIL_GUARD: f64 = 1e-12;

/// Tolerance bundle for validating constructed values.
///
/// All validators use [`Tolerances::default`] unless a caller supplies its
/// own bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on structural identities.
    pub structural: f64,
    /// Bound on state validity (trace / positivity).
    pub state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: STRUCTURAL,
            state: STATE,
        }
    }
}

/// Guarded ceiling: snaps to the nearest integer when within
/// [`CEIL_GUARD`], otherwise rounds up.
pub fn guarded_ceil(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= CEIL_GUARD {
        nearest
    } else {
        x.ceil()
    }
}
