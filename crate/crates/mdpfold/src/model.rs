//! Model data: controlled transition kernels, cost tables, and the
//! validated immutable MDP model.

use crate::error::{Error, Result};
use crate::grid::{ActionSet, StateGrid};

/// Row-sum tolerance: rows off by less than this are renormalized, rows off
/// by at least this are rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Controlled transition matrix: one row-stochastic `n x n` matrix per
/// action. Entries are probability masses per grid cell (for sampled
/// continuous grids, density times step).
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    n_states: usize,
    n_actions: usize,
    /// One row-major `n_states * n_states` matrix per action.
    tables: Vec<Vec<f64>>,
}

impl Kernel {
    /// Builds a kernel from one `n x n` matrix per action (rows: current
    /// state, columns: next state).
    pub fn from_action_tables(tables: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::DimensionMismatch("kernel has no actions".into()));
        }
        let n = tables[0].len();
        let mut flat = Vec::with_capacity(tables.len());
        for (u, t) in tables.iter().enumerate() {
            if t.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "kernel action {u} has {} rows, expected {n}",
                    t.len()
                )));
            }
            let mut m = Vec::with_capacity(n * n);
            for (x, row) in t.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "kernel row (action {u}, state {x}) has {} entries, expected {n}",
                        row.len()
                    )));
                }
                m.extend_from_slice(row);
            }
            flat.push(m);
        }
        Ok(Kernel {
            n_states: n,
            n_actions: flat.len(),
            tables: flat,
        })
    }

    /// Builds a kernel entry-wise from `f(action, state, next_state)`.
    pub fn from_fn(
        n_states: usize,
        n_actions: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Self {
        let tables = (0..n_actions)
            .map(|u| {
                let mut m = Vec::with_capacity(n_states * n_states);
                for x in 0..n_states {
                    for y in 0..n_states {
                        m.push(f(u, x, y));
                    }
                }
                m
            })
            .collect();
        Kernel {
            n_states,
            n_actions,
            tables,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Transition row `p(. | state; action)`.
    pub fn row(&self, action: usize, state: usize) -> &[f64] {
        &self.tables[action][state * self.n_states..(state + 1) * self.n_states]
    }

    pub(crate) fn row_mut(&mut self, action: usize, state: usize) -> &mut [f64] {
        &mut self.tables[action][state * self.n_states..(state + 1) * self.n_states]
    }

    /// Validates nonnegativity and row sums; renormalizes rows whose sums
    /// deviate from 1 by less than `tol`, rejects larger deviations.
    /// Entries above `-1e-12` are clamped to zero before the check.
    pub(crate) fn normalize(&mut self, tol: f64) -> Result<()> {
        for u in 0..self.n_actions {
            for x in 0..self.n_states {
                let row = self.row_mut(u, x);
                for (y, v) in row.iter_mut().enumerate() {
                    if *v < 0.0 {
                        if *v > -1e-12 {
                            *v = 0.0;
                        } else {
                            return Err(Error::NegativeMass {
                                action: u,
                                state: x,
                                column: y,
                                value: *v,
                            });
                        }
                    }
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() >= tol {
                    return Err(Error::RowNotStochastic {
                        action: u,
                        state: x,
                        sum,
                        tol,
                    });
                }
                if sum != 1.0 {
                    for v in row.iter_mut() {
                        *v /= sum;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Cost table for one stage, indexed `[state][action]`.
pub type CostTable = Vec<Vec<f64>>;

/// Stage costs, either one table reused for every stage or one table per
/// stage `t = 1, ..., T-1`.
#[derive(Debug, Clone, PartialEq)]
pub enum StageCosts {
    Homogeneous(CostTable),
    PerStage(Vec<CostTable>),
}

/// Per-stage costs `c_t(x, u)` plus terminal cost `c_T(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    pub stage: StageCosts,
    pub terminal: Vec<f64>,
}

impl CostSpec {
    pub fn homogeneous(table: CostTable, terminal: Vec<f64>) -> Self {
        CostSpec {
            stage: StageCosts::Homogeneous(table),
            terminal,
        }
    }

    pub fn per_stage(tables: Vec<CostTable>, terminal: Vec<f64>) -> Self {
        CostSpec {
            stage: StageCosts::PerStage(tables),
            terminal,
        }
    }

    pub fn is_time_homogeneous(&self) -> bool {
        match &self.stage {
            StageCosts::Homogeneous(_) => true,
            StageCosts::PerStage(v) => v.len() == 1,
        }
    }

    /// Stage-cost table for 1-based stage `t`.
    pub fn stage_table(&self, t: usize) -> Result<&CostTable> {
        match &self.stage {
            StageCosts::Homogeneous(c) => Ok(c),
            StageCosts::PerStage(v) => v.get(t - 1).ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "no stage cost for t = {t}; {} stage tables given",
                    v.len()
                ))
            }),
        }
    }

    /// All distinct stage tables, in stage order.
    pub fn stage_tables(&self) -> Vec<&CostTable> {
        match &self.stage {
            StageCosts::Homogeneous(c) => vec![c],
            StageCosts::PerStage(v) => v.iter().collect(),
        }
    }

    fn validate(&self, n_states: usize, n_actions: usize) -> Result<()> {
        let check_table = |c: &CostTable, what: &str| -> Result<()> {
            if c.len() != n_states {
                return Err(Error::DimensionMismatch(format!(
                    "{what} has {} state rows, expected {n_states}",
                    c.len()
                )));
            }
            for (x, row) in c.iter().enumerate() {
                if row.len() != n_actions {
                    return Err(Error::DimensionMismatch(format!(
                        "{what} row {x} has {} action entries, expected {n_actions}",
                        row.len()
                    )));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::DimensionMismatch(format!(
                        "{what} row {x} has a non-finite entry"
                    )));
                }
            }
            Ok(())
        };
        match &self.stage {
            StageCosts::Homogeneous(c) => check_table(c, "stage cost")?,
            StageCosts::PerStage(v) => {
                if v.is_empty() {
                    return Err(Error::DimensionMismatch("no stage cost tables".into()));
                }
                for (i, c) in v.iter().enumerate() {
                    check_table(c, &format!("stage cost t={}", i + 1))?;
                }
            }
        }
        if self.terminal.len() != n_states {
            return Err(Error::DimensionMismatch(format!(
                "terminal cost has {} entries, expected {n_states}",
                self.terminal.len()
            )));
        }
        if self.terminal.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch(
                "terminal cost has a non-finite entry".into(),
            ));
        }
        Ok(())
    }
}

/// Validated, immutable MDP `(X, U, p, c_t)` on a symmetric grid.
///
/// Safe to share across threads; all solver and checker operations borrow
/// it immutably.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpModel {
    grid: StateGrid,
    actions: ActionSet,
    kernel: Kernel,
    costs: CostSpec,
}

impl MdpModel {
    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn costs(&self) -> &CostSpec {
        &self.costs
    }

    pub fn n_states(&self) -> usize {
        self.grid.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Validates dimensions and stochasticity and assembles the immutable model.
/// Kernel rows whose sums deviate from 1 by less than [`ROW_SUM_TOLERANCE`]
/// are renormalized; larger deviations are rejected.
pub fn build_model(
    grid: StateGrid,
    actions: ActionSet,
    mut kernel: Kernel,
    costs: CostSpec,
) -> Result<MdpModel> {
    grid.validate()?;
    if kernel.n_states() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "kernel is over {} states, grid has {}",
            kernel.n_states(),
            grid.len()
        )));
    }
    if kernel.n_actions() != actions.len() {
        return Err(Error::DimensionMismatch(format!(
            "kernel has {} actions, action set has {}",
            kernel.n_actions(),
            actions.len()
        )));
    }
    costs.validate(grid.len(), actions.len())?;
    kernel.normalize(ROW_SUM_TOLERANCE)?;
    Ok(MdpModel {
        grid,
        actions,
        kernel,
        costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridKind;

    fn identity_kernel(n: usize) -> Kernel {
        Kernel::from_fn(n, 1, |_, x, y| if x == y { 1.0 } else { 0.0 })
    }

    fn zero_costs(n: usize, nu: usize) -> CostSpec {
        CostSpec::homogeneous(vec![vec![0.0; nu]; n], vec![0.0; n])
    }

    #[test]
    fn identity_model_is_valid() {
        let grid = StateGrid::integer(1).unwrap();
        let actions = ActionSet::new(vec![0.0]).unwrap();
        let model = build_model(grid, actions, identity_kernel(3), zero_costs(3, 1)).unwrap();
        assert_eq!(model.n_states(), 3);
        assert_eq!(model.kernel().row(0, 1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn deficient_row_rejected() {
        let grid = StateGrid::integer(1).unwrap();
        let actions = ActionSet::new(vec![0.0]).unwrap();
        let mut k = identity_kernel(3);
        k.row_mut(0, 0)[0] = 0.9;
        let err = build_model(grid, actions, k, zero_costs(3, 1)).unwrap_err();
        assert!(matches!(err, Error::RowNotStochastic { state: 0, .. }));
    }

    #[test]
    fn near_stochastic_row_renormalized() {
        let grid = StateGrid::integer(1).unwrap();
        let actions = ActionSet::new(vec![0.0]).unwrap();
        let mut k = identity_kernel(3);
        k.row_mut(0, 0)[0] = 1.0 + 0.5e-9;
        let model = build_model(grid, actions, k, zero_costs(3, 1)).unwrap();
        let sum: f64 = model.kernel().row(0, 0).iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_mass_rejected() {
        let grid = StateGrid::integer(1).unwrap();
        let actions = ActionSet::new(vec![0.0]).unwrap();
        let mut k = identity_kernel(3);
        k.row_mut(0, 0)[1] = -1e-6;
        k.row_mut(0, 0)[0] = 1.0 + 1e-6;
        let err = build_model(grid, actions, k, zero_costs(3, 1)).unwrap_err();
        assert!(matches!(err, Error::NegativeMass { .. }));
    }

    #[test]
    fn dimension_mismatch_detected() {
        let grid = StateGrid::integer(2).unwrap();
        let actions = ActionSet::new(vec![0.0]).unwrap();
        let err = build_model(grid, actions, identity_kernel(3), zero_costs(3, 1)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn per_stage_cost_lookup() {
        let c1 = vec![vec![1.0]; 3];
        let c2 = vec![vec![2.0]; 3];
        let costs = CostSpec::per_stage(vec![c1, c2], vec![0.0; 3]);
        assert_eq!(costs.stage_table(2).unwrap()[0][0], 2.0);
        assert!(costs.stage_table(3).is_err());
        assert!(!costs.is_time_homogeneous());
        let _ = GridKind::Integer;
    }
}
