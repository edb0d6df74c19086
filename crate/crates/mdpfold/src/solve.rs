//! Exact finite-horizon backward induction and fixed-policy evaluation.
//!
//! Stages are 1-based: `values[t-1]` is `V_t`, `t = 1, ..., T`, with
//! `V_T = c_T`. Q-tables and the policy cover the decision stages
//! `t = 1, ..., T-1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CostSpec, Kernel, MdpModel};

/// Absolute tolerance for detecting Q-value ties before tie-breaking.
/// Without it the max/min-minimizer rule is vacuous under rounding.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Output of the backward induction: value tables `V_t`, Q-tables
/// `Q_t(x, u)` and the optimal policy `g*_t(x)` (action labels).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub horizon: usize,
    /// `values[t-1][x]` is `V_t(x)`, `t = 1, ..., T`.
    pub values: Vec<Vec<f64>>,
    /// `q_tables[t-1][x][u]` is `Q_t(x, u)`, `t = 1, ..., T-1`.
    pub q_tables: Vec<Vec<Vec<f64>>>,
    /// `policy[t-1][x]` is the optimal action label at stage `t`, state `x`.
    pub policy: Vec<Vec<f64>>,
}

/// Tie-breaking rule used to pick one minimizer of `Q_t(x, .)`.
#[derive(Clone, Copy)]
pub(crate) enum TieRule<'a> {
    /// Largest minimizer at states `x >= 0`, smallest at `x < 0`
    /// (0 counts as nonnegative). `points[x]` supplies the coordinate.
    SignOf(&'a [f64]),
    /// Largest minimizer everywhere (folded models: all states nonnegative).
    AlwaysMax,
}

impl TieRule<'_> {
    fn prefer_max(&self, state: usize) -> bool {
        match self {
            TieRule::SignOf(points) => points[state] >= 0.0,
            TieRule::AlwaysMax => true,
        }
    }
}

/// Minimum of a Q-row plus the index chosen by the tie rule: among actions
/// within [`TIE_TOLERANCE`] of the minimum, the largest (prefer_max) or the
/// smallest.
pub(crate) fn pick_minimizer(q_row: &[f64], prefer_max: bool, tie_tol: f64) -> (f64, usize) {
    let mut vmin = q_row[0];
    for &q in &q_row[1..] {
        if q < vmin {
            vmin = q;
        }
    }
    let tied = |q: f64| q <= vmin + tie_tol;
    let idx = if prefer_max {
        q_row.iter().rposition(|&q| tied(q)).unwrap()
    } else {
        q_row.iter().position(|&q| tied(q)).unwrap()
    };
    (vmin, idx)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One backward sweep: `Q(x, u) = c(x, u) + discount * <p(.|x;u), v_next>`,
/// minimized over `u` with the tie rule. States are independent and run in
/// parallel; the result is deterministic regardless of thread count.
pub(crate) fn min_sweep(
    kernel: &Kernel,
    stage_cost: &[Vec<f64>],
    v_next: &[f64],
    discount: f64,
    tie: TieRule<'_>,
    tie_tol: f64,
) -> (Vec<f64>, Vec<usize>, Vec<Vec<f64>>) {
    let n = kernel.n_states();
    let nu = kernel.n_actions();
    let out: Vec<(f64, usize, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let q: Vec<f64> = (0..nu)
                .map(|u| stage_cost[x][u] + discount * dot(kernel.row(u, x), v_next))
                .collect();
            let (v, g) = pick_minimizer(&q, tie.prefer_max(x), tie_tol);
            (v, g, q)
        })
        .collect();
    let mut values = Vec::with_capacity(n);
    let mut g_idx = Vec::with_capacity(n);
    let mut q_table = Vec::with_capacity(n);
    for (v, g, q) in out {
        values.push(v);
        g_idx.push(g);
        q_table.push(q);
    }
    (values, g_idx, q_table)
}

/// Backward induction over an arbitrary kernel/cost pair. Shared by the
/// symmetric-grid solver and the folded-model solver, which differ only in
/// the data and the tie rule.
pub(crate) fn backward_induction(
    kernel: &Kernel,
    costs: &CostSpec,
    action_labels: &[f64],
    horizon: usize,
    tie: TieRule<'_>,
) -> Result<SolveResult> {
    if horizon < 2 {
        return Err(Error::HorizonTooShort(horizon));
    }
    for t in 1..horizon {
        costs.stage_table(t)?; // all decision stages must have a cost table
    }
    let t_dec = horizon - 1;
    let mut values = vec![Vec::new(); horizon];
    let mut q_tables = vec![Vec::new(); t_dec];
    let mut policy = vec![Vec::new(); t_dec];
    values[horizon - 1] = costs.terminal.clone();
    for t in (1..horizon).rev() {
        let (v, g_idx, q) = min_sweep(
            kernel,
            costs.stage_table(t)?,
            &values[t],
            1.0,
            tie,
            TIE_TOLERANCE,
        );
        values[t - 1] = v;
        policy[t - 1] = g_idx.iter().map(|&g| action_labels[g]).collect();
        q_tables[t - 1] = q;
    }
    Ok(SolveResult {
        horizon,
        values,
        q_tables,
        policy,
    })
}

/// Solves the dynamic program `V_T = c_T`,
/// `Q_t(x,u) = c_t(x,u) + sum_y p(y|x;u) V_{t+1}(y)`, `V_t = min_u Q_t`,
/// picking the largest minimizing action at `x >= 0` and the smallest at
/// `x < 0`.
pub fn solve_finite_horizon(model: &MdpModel, horizon: usize) -> Result<SolveResult> {
    backward_induction(
        model.kernel(),
        model.costs(),
        model.actions().values(),
        horizon,
        TieRule::SignOf(model.grid().points()),
    )
}

/// Expected-total-cost tables for a fixed Markov policy, computed by the
/// same backward recursion without minimization. `policy[t-1][x]` is the
/// action label used at stage `t`, `t = 1, ..., T-1`.
pub fn evaluate_policy(
    model: &MdpModel,
    horizon: usize,
    policy: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    if horizon < 2 {
        return Err(Error::HorizonTooShort(horizon));
    }
    if policy.len() != horizon - 1 {
        return Err(Error::DimensionMismatch(format!(
            "policy covers {} stages, horizon {horizon} needs {}",
            policy.len(),
            horizon - 1
        )));
    }
    let n = model.n_states();
    // Resolve labels to indices up front so errors name the stage.
    let mut policy_idx = Vec::with_capacity(policy.len());
    for (ti, stage) in policy.iter().enumerate() {
        if stage.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "policy stage {} covers {} states, expected {n}",
                ti + 1,
                stage.len()
            )));
        }
        let mut idx = Vec::with_capacity(n);
        for (x, &label) in stage.iter().enumerate() {
            idx.push(
                model
                    .actions()
                    .index_of(label)
                    .ok_or(Error::UndefinedAction {
                        stage: ti + 1,
                        state: x,
                        label,
                    })?,
            );
        }
        policy_idx.push(idx);
    }
    let kernel = model.kernel();
    let mut values = vec![Vec::new(); horizon];
    values[horizon - 1] = model.costs().terminal.clone();
    for t in (1..horizon).rev() {
        let cost = model.costs().stage_table(t)?;
        let v_next = &values[t];
        let idx = &policy_idx[t - 1];
        let v: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|x| {
                let u = idx[x];
                cost[x][u] + dot(kernel.row(u, x), v_next)
            })
            .collect();
        values[t - 1] = v;
    }
    Ok(values)
}
