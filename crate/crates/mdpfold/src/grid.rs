//! Symmetric state grids and ordered action sets.
//!
//! A `StateGrid` discretizes a state space that is symmetric about the
//! origin: either an interval `[-a, a]` sampled on a uniform grid, or the
//! integer range `{-a, ..., a}`. All tables in the crate are indexed by
//! grid position, states ascending.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Continuous interval `[-a, a]` sampled at uniform cell centers;
    /// kernel entries are per-cell masses (density times step).
    ContinuousSampled,
    /// Integer range `{-a, ..., a}` with step 1.
    Integer,
}

/// Uniform grid on `[-a, a]`, symmetric about 0 and containing 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGrid {
    kind: GridKind,
    half_range: f64,
    step: f64,
    points: Vec<f64>,
    n_half: usize,
}

impl StateGrid {
    pub fn symmetric(kind: GridKind, half_range: f64, step: f64) -> Result<Self> {
        if !(half_range > 0.0) || !half_range.is_finite() {
            return Err(Error::AsymmetricGrid(format!(
                "half_range must be positive, got {half_range}"
            )));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::AsymmetricGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        if kind == GridKind::Integer && step != 1.0 {
            return Err(Error::AsymmetricGrid(format!(
                "integer grids have step 1, got {step}"
            )));
        }
        let n = (half_range / step).round();
        if n < 1.0 || (n * step - half_range).abs() > 1e-9 * half_range.max(1.0) {
            return Err(Error::AsymmetricGrid(format!(
                "half_range {half_range} is not a positive multiple of step {step}"
            )));
        }
        let n_half = n as usize;
        // i * step and -i * step negate bitwise, so points are exactly mirrored.
        let points: Vec<f64> = (0..=2 * n_half)
            .map(|i| (i as i64 - n_half as i64) as f64 * step)
            .collect();
        Ok(StateGrid {
            kind,
            half_range: n * step,
            step,
            points,
            n_half,
        })
    }

    pub fn integer(a: usize) -> Result<Self> {
        Self::symmetric(GridKind::Integer, a as f64, 1.0)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn half_range(&self) -> f64 {
        self.half_range
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of strictly positive points; the grid has `2 * n_half + 1` points.
    pub fn n_half(&self) -> usize {
        self.n_half
    }

    /// Index of the origin.
    pub fn zero_index(&self) -> usize {
        self.n_half
    }

    /// Index of `-x` for the state at index `i`.
    pub fn mirror_index(&self, i: usize) -> usize {
        2 * self.n_half - i
    }

    /// Indices of the nonnegative states, ascending from 0.
    pub fn nonneg_indices(&self) -> std::ops::Range<usize> {
        self.n_half..self.points.len()
    }

    pub fn is_integer(&self) -> bool {
        self.kind == GridKind::Integer
    }

    /// Validates the stored invariants (odd count, mirror symmetry, uniform
    /// spacing, 0 present). Constructors always leave the grid valid; this is
    /// used to double-check externally supplied data.
    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n % 2 == 0 || n < 3 {
            return Err(Error::AsymmetricGrid(format!(
                "grid must have an odd number (>= 3) of points, got {n}"
            )));
        }
        if self.points[self.n_half] != 0.0 {
            return Err(Error::AsymmetricGrid("grid does not contain 0".into()));
        }
        for i in 0..n {
            if i > 0 {
                let gap = self.points[i] - self.points[i - 1];
                if (gap - self.step).abs() > 1e-9 * self.step {
                    return Err(Error::AsymmetricGrid(format!(
                        "non-uniform spacing between points {} and {}",
                        self.points[i - 1],
                        self.points[i]
                    )));
                }
            }
            let j = self.mirror_index(i);
            if (self.points[i] + self.points[j]).abs() > 1e-12 * self.half_range.max(1.0) {
                return Err(Error::AsymmetricGrid(format!(
                    "point {} has no mirror image",
                    self.points[i]
                )));
            }
        }
        Ok(())
    }

    /// The nonnegative half of this grid.
    pub fn folded(&self) -> FoldedGrid {
        FoldedGrid {
            kind: self.kind,
            step: self.step,
            points: self.points[self.n_half..].to_vec(),
        }
    }
}

/// Nonnegative points of a `StateGrid`: `{0, step, ..., a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedGrid {
    kind: GridKind,
    step: f64,
    points: Vec<f64>,
}

impl FoldedGrid {
    pub fn from_range(kind: GridKind, half_range: f64, step: f64) -> Result<Self> {
        Ok(StateGrid::symmetric(kind, half_range, step)?.folded())
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_range(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Finite, strictly ascending set of real action labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    values: Vec<f64>,
}

impl ActionSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch("action set is empty".into()));
        }
        for w in values.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::DimensionMismatch(format!(
                    "action labels must be strictly ascending, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch(
                "action labels must be finite".into(),
            ));
        }
        Ok(ActionSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exact-match lookup of an action label.
    pub fn index_of(&self, label: f64) -> Option<usize> {
        self.values.iter().position(|&v| v == label)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_grid_points() {
        let g = StateGrid::integer(2).unwrap();
        assert_eq!(g.points(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(g.zero_index(), 2);
        assert_eq!(g.mirror_index(0), 4);
        g.validate().unwrap();
    }

    #[test]
    fn continuous_grid_is_mirror_exact() {
        let g = StateGrid::symmetric(GridKind::ContinuousSampled, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 201);
        for i in 0..g.len() {
            let j = g.mirror_index(i);
            assert_eq!(g.points()[i], -g.points()[j]);
        }
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(StateGrid::symmetric(GridKind::ContinuousSampled, 1.0, 0.3).is_err());
        assert!(StateGrid::symmetric(GridKind::ContinuousSampled, 0.0, 0.1).is_err());
        assert!(StateGrid::symmetric(GridKind::Integer, 3.0, 0.5).is_err());
    }

    #[test]
    fn folded_grid_starts_at_zero() {
        let g = StateGrid::integer(3).unwrap();
        let f = g.folded();
        assert_eq!(f.points(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(f.half_range(), 3.0);
    }

    #[test]
    fn action_set_ordering_enforced() {
        assert!(ActionSet::new(vec![]).is_err());
        assert!(ActionSet::new(vec![0.0, 0.0]).is_err());
        assert!(ActionSet::new(vec![1.0, 0.0]).is_err());
        let a = ActionSet::new(vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(a.index_of(0.5), Some(1));
        assert_eq!(a.index_of(0.25), None);
    }
}
