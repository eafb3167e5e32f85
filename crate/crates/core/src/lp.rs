//! LP relaxation of multi-coverage, solved exactly over the rationals.
//!
//! Unweighted relaxation over variables `x_i` (set usage) and `c_e`
//! (element credit):
//!
//! ```text
//! max sum_e c_e
//! s.t. c_e <= ell                          for every element e
//!      c_e <= sum_{i : e in T_i} x_i       for every element e
//!      0 <= x_i <= 1,  sum_i x_i = k
//! ```
//!
//! The weighted relaxation splits the credit per (set, element) pair:
//! `max sum w[i][e] c_{i,e}` with `sum_i c_{i,e} <= ell`, `c_{i,e} <= x_i`,
//! and `x` in the (uniform or partition) matroid polytope.
//!
//! The solver is a self-contained dense two-phase primal simplex on
//! arbitrary-precision rationals with Bland's anti-cycling rule, so results
//! are exact, deterministic, and never cycle.  Phase 1 drives explicit
//! artificial variables out of the basis; rows left without a real pivot
//! are redundant and stay inert.  All variables are nonnegative by
//! convention; upper bounds are ordinary rows.

use crate::error::{Error, Result};
use crate::model::{CoverageInstance, WeightedCoverageInstance};
use crate::rational::{rat_to_string, rat_usize, Rat};
use num::traits::Signed;
use num::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Le,
    Eq,
    Ge,
}

impl RelOp {
    fn symbol(self) -> &'static str {
        match self {
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub label: String,
    /// Sparse coefficients with strictly increasing variable indices.
    pub coeffs: Vec<(usize, Rat)>,
    pub op: RelOp,
    pub rhs: Rat,
}

/// How the credit variables after the `x` block are organized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapLayout {
    /// One credit per element (unweighted relaxation).
    PerElement { n: usize },
    /// One credit per (set, element) pair, row-major (weighted relaxation).
    PerPair { m: usize, n: usize },
}

#[derive(Debug, Clone)]
pub struct LpModel {
    num_x: usize,
    layout: CapLayout,
    objective: Vec<Rat>,
    rows: Vec<LpRow>,
    var_names: Vec<String>,
}

impl LpModel {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn layout(&self) -> CapLayout {
        self.layout
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    pub fn objective(&self) -> &[Rat] {
        &self.objective
    }

    pub fn var_name(&self, j: usize) -> &str {
        &self.var_names[j]
    }

    /// Exact feasibility check of a full variable assignment (all
    /// variables implicitly `>= 0`).
    pub fn check_point(&self, values: &[Rat]) -> bool {
        if values.len() != self.num_vars() || values.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs: Rat = row.coeffs.iter().map(|(j, c)| c * &values[*j]).sum();
            match row.op {
                RelOp::Le => lhs <= row.rhs,
                RelOp::Eq => lhs == row.rhs,
                RelOp::Ge => lhs >= row.rhs,
            }
        })
    }

    pub fn objective_of(&self, values: &[Rat]) -> Rat {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }
}

/// Credit values of a solved relaxation, mirroring [`CapLayout`].
#[derive(Debug, Clone, PartialEq)]
pub enum CapValues {
    PerElement(Vec<Rat>),
    PerPair(Vec<Vec<Rat>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<Rat>,
    pub caps: CapValues,
    pub objective: Rat,
}

/// Builds the unweighted relaxation; the budget row is an equality
/// (`k <= m` makes it always satisfiable).
pub fn build_lp(inst: &CoverageInstance) -> LpModel {
    let m = inst.m();
    let n = inst.n();
    let x = |i: usize| i;
    let c = |e: usize| m + e;

    let mut var_names: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    var_names.extend((0..n).map(|e| format!("c{e}")));

    let mut objective = vec![Rat::zero(); m + n];
    for e in 0..n {
        objective[c(e)] = Rat::one();
    }

    let incidence = inst.incidence();
    let mut rows = Vec::with_capacity(2 * n + m + 1);
    for e in 0..n {
        rows.push(LpRow {
            label: format!("cap_e{e}"),
            coeffs: vec![(c(e), Rat::one())],
            op: RelOp::Le,
            rhs: rat_usize(inst.ell() as usize),
        });
    }
    for (e, members) in incidence.iter().enumerate() {
        let mut coeffs: Vec<(usize, Rat)> =
            members.iter().map(|&i| (x(i), -Rat::one())).collect();
        coeffs.push((c(e), Rat::one()));
        rows.push(LpRow {
            label: format!("mem_e{e}"),
            coeffs,
            op: RelOp::Le,
            rhs: Rat::zero(),
        });
    }
    for i in 0..m {
        rows.push(LpRow {
            label: format!("box_x{i}"),
            coeffs: vec![(x(i), Rat::one())],
            op: RelOp::Le,
            rhs: Rat::one(),
        });
    }
    rows.push(LpRow {
        label: "budget".into(),
        coeffs: (0..m).map(|i| (x(i), Rat::one())).collect(),
        op: RelOp::Eq,
        rhs: rat_usize(inst.k()),
    });

    LpModel {
        num_x: m,
        layout: CapLayout::PerElement { n },
        objective,
        rows,
        var_names,
    }
}

/// Builds the weighted relaxation over the matroid polytope (inequality
/// budget rows; padding to equality happens before rounding).
pub fn build_weighted_lp(inst: &WeightedCoverageInstance) -> LpModel {
    let m = inst.m();
    let n = inst.n();
    let x = |i: usize| i;
    let c = |i: usize, e: usize| m + i * n + e;

    let mut var_names: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    for i in 0..m {
        for e in 0..n {
            var_names.push(format!("c{i}_{e}"));
        }
    }

    let mut objective = vec![Rat::zero(); m + m * n];
    for i in 0..m {
        for e in 0..n {
            objective[c(i, e)] = inst.weight(i, e).clone();
        }
    }

    let mut rows = Vec::new();
    for e in 0..n {
        rows.push(LpRow {
            label: format!("cap_e{e}"),
            coeffs: (0..m).map(|i| (c(i, e), Rat::one())).collect(),
            op: RelOp::Le,
            rhs: rat_usize(inst.ell() as usize),
        });
    }
    for i in 0..m {
        for e in 0..n {
            rows.push(LpRow {
                label: format!("pair_x{i}_e{e}"),
                coeffs: vec![(x(i), -Rat::one()), (c(i, e), Rat::one())],
                op: RelOp::Le,
                rhs: Rat::zero(),
            });
        }
    }
    for i in 0..m {
        rows.push(LpRow {
            label: format!("box_x{i}"),
            coeffs: vec![(x(i), Rat::one())],
            op: RelOp::Le,
            rhs: Rat::one(),
        });
    }
    let (groups, caps) = inst.constraint().groups_and_caps(m);
    for (g, (group, cap)) in groups.iter().zip(&caps).enumerate() {
        rows.push(LpRow {
            label: if groups.len() == 1 {
                "budget".into()
            } else {
                format!("group{g}")
            },
            coeffs: group.iter().map(|&i| (x(i), Rat::one())).collect(),
            op: RelOp::Le,
            rhs: rat_usize(*cap),
        });
    }

    LpModel {
        num_x: m,
        layout: CapLayout::PerPair { m, n },
        objective,
        rows,
        var_names,
    }
}

/// Textual LP-format dump with exact `p/q` coefficients, for cross-checking
/// against external solvers.
pub fn dump_lp(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ multi-coverage relaxation (all variables >= 0)\n");
    out.push_str("Maximize\n obj:");
    let mut first = true;
    for (j, coef) in model.objective.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        push_term(&mut out, coef, model.var_name(j), &mut first);
    }
    if first {
        out.push_str(" 0");
    }
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        out.push_str(&format!(" {}:", row.label));
        let mut first = true;
        for (j, coef) in &row.coeffs {
            push_term(&mut out, coef, model.var_name(*j), &mut first);
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str(&format!(
            " {} {}\n",
            row.op.symbol(),
            rat_to_string(&row.rhs)
        ));
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, coef: &Rat, name: &str, first: &mut bool) {
    let mag = coef.abs();
    let sign = if coef.is_negative() { "-" } else { "+" };
    if *first {
        if coef.is_negative() {
            out.push_str(" -");
        } else {
            out.push(' ');
        }
        *first = false;
    } else {
        out.push_str(&format!(" {sign} "));
    }
    if !mag.is_one() {
        out.push_str(&rat_to_string(&mag));
        out.push(' ');
    }
    out.push_str(name);
}

/// Solves the relaxation exactly and returns the Bland-rule vertex.
pub fn solve_lp(model: &LpModel) -> Result<FractionalSolution> {
    let (values, objective) = simplex_max(model)?;
    if !model.check_point(&values) {
        return Err(Error::InvariantBreach(
            "simplex returned an infeasible point".into(),
        ));
    }
    let x = values[..model.num_x].to_vec();
    let caps = match model.layout {
        CapLayout::PerElement { n } => {
            CapValues::PerElement(values[model.num_x..model.num_x + n].to_vec())
        }
        CapLayout::PerPair { m, n } => CapValues::PerPair(
            (0..m)
                .map(|i| values[model.num_x + i * n..model.num_x + (i + 1) * n].to_vec())
                .collect(),
        ),
    };
    Ok(FractionalSolution { x, caps, objective })
}

struct Tableau {
    a: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Phase-2 reduced-cost row.
    obj: Vec<Rat>,
    /// Phase-1 reduced-cost row (present iff artificials exist).
    aux: Option<Vec<Rat>>,
    aux_rhs: Rat,
    /// Artificial columns start here; entering candidates stay below.
    enterable: usize,
    iterations: u64,
    iteration_cap: u64,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.a[r][e].clone();
        for v in self.a[r].iter_mut() {
            *v /= &piv;
        }
        self.rhs[r] /= &piv;
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for r2 in 0..self.a.len() {
            if r2 == r || self.a[r2][e].is_zero() {
                continue;
            }
            let factor = self.a[r2][e].clone();
            for (v, p) in self.a[r2].iter_mut().zip(&pivot_row) {
                *v -= &factor * p;
            }
            self.rhs[r2] -= &factor * &pivot_rhs;
        }
        if !self.obj[e].is_zero() {
            let factor = self.obj[e].clone();
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= &factor * p;
            }
        }
        if let Some(aux) = &mut self.aux {
            if !aux[e].is_zero() {
                let factor = aux[e].clone();
                for (v, p) in aux.iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
                self.aux_rhs -= &factor * &pivot_rhs;
            }
        }
        self.basis[r] = e;
    }

    /// One Bland step driven by the given reduced-cost row: entering
    /// variable is the lowest-index negative reduced cost, leaving row is
    /// the ratio-test minimum with ties to the smallest basic index.
    fn bland_step(&mut self, phase1: bool) -> Result<Option<Step>> {
        self.iterations += 1;
        if self.iterations > self.iteration_cap {
            return Err(Error::SolverFailure(format!(
                "simplex iteration cap {} exceeded",
                self.iteration_cap
            )));
        }
        let row = if phase1 {
            self.aux.as_ref().unwrap()
        } else {
            &self.obj
        };
        let enter = (0..self.enterable).find(|&j| row[j].is_negative());
        let e = match enter {
            None => return Ok(Some(Step::Optimal)),
            Some(e) => e,
        };
        let mut best: Option<(Rat, usize, usize)> = None; // (ratio, basis var, row)
        for r in 0..self.a.len() {
            if self.a[r][e].is_positive() {
                let ratio = &self.rhs[r] / &self.a[r][e];
                let candidate = (ratio, self.basis[r], r);
                best = match best {
                    None => Some(candidate),
                    Some(cur) => {
                        if candidate.0 < cur.0 || (candidate.0 == cur.0 && candidate.1 < cur.1) {
                            Some(candidate)
                        } else {
                            Some(cur)
                        }
                    }
                };
            }
        }
        match best {
            None => Ok(Some(Step::Unbounded)),
            Some((_, _, r)) => {
                self.pivot(r, e);
                Ok(None)
            }
        }
    }

    fn run(&mut self, phase1: bool) -> Result<Step> {
        loop {
            if let Some(step) = self.bland_step(phase1)? {
                return Ok(step);
            }
        }
    }
}

fn simplex_max(model: &LpModel) -> Result<(Vec<Rat>, Rat)> {
    let nv = model.num_vars();
    let nrows = model.rows.len();

    // Dense rows normalized to nonnegative right-hand sides.
    let mut dense: Vec<(Vec<Rat>, RelOp, Rat)> = Vec::with_capacity(nrows);
    for row in &model.rows {
        let mut coeffs = vec![Rat::zero(); nv];
        for (j, c) in &row.coeffs {
            if *j >= nv {
                return Err(Error::invalid(format!(
                    "row {} mentions variable {} outside the model",
                    row.label, j
                )));
            }
            coeffs[*j] += c;
        }
        let mut rhs = row.rhs.clone();
        let mut op = row.op;
        if rhs.is_negative() {
            for c in coeffs.iter_mut() {
                *c = -c.clone();
            }
            rhs = -rhs;
            op = match op {
                RelOp::Le => RelOp::Ge,
                RelOp::Ge => RelOp::Le,
                RelOp::Eq => RelOp::Eq,
            };
        }
        dense.push((coeffs, op, rhs));
    }

    let n_slack = dense.iter().filter(|(_, op, _)| *op != RelOp::Eq).count();
    let n_art = dense.iter().filter(|(_, op, _)| *op != RelOp::Le).count();
    let total = nv + n_slack + n_art;

    let mut a = vec![vec![Rat::zero(); total]; nrows];
    let mut rhs = vec![Rat::zero(); nrows];
    let mut basis = vec![0usize; nrows];
    let mut slack_next = nv;
    let mut art_next = nv + n_slack;
    let mut art_rows = Vec::new();
    for (r, (coeffs, op, b)) in dense.into_iter().enumerate() {
        a[r][..nv].clone_from_slice(&coeffs);
        rhs[r] = b;
        match op {
            RelOp::Le => {
                a[r][slack_next] = Rat::one();
                basis[r] = slack_next;
                slack_next += 1;
            }
            RelOp::Ge => {
                a[r][slack_next] = -Rat::one();
                slack_next += 1;
                a[r][art_next] = Rat::one();
                basis[r] = art_next;
                art_rows.push(r);
                art_next += 1;
            }
            RelOp::Eq => {
                a[r][art_next] = Rat::one();
                basis[r] = art_next;
                art_rows.push(r);
                art_next += 1;
            }
        }
    }

    let mut obj = vec![Rat::zero(); total];
    for (slot, coef) in obj.iter_mut().zip(&model.objective) {
        *slot = -coef.clone();
    }

    let aux = if n_art > 0 {
        // Maximize -(sum of artificials): start from +1 on artificial
        // columns, then price out the artificial basis.
        let mut aux = vec![Rat::zero(); total];
        for slot in aux.iter_mut().skip(nv + n_slack) {
            *slot = Rat::one();
        }
        let mut aux_rhs = Rat::zero();
        for &r in &art_rows {
            for j in 0..total {
                let d = a[r][j].clone();
                aux[j] -= d;
            }
            aux_rhs -= &rhs[r];
        }
        Some((aux, aux_rhs))
    } else {
        None
    };

    let iteration_cap = 10 * (nrows as u64 + total as u64).pow(2);
    let (aux_row, aux_rhs) = match aux {
        Some((row, r)) => (Some(row), r),
        None => (None, Rat::zero()),
    };
    let mut t = Tableau {
        a,
        rhs,
        basis,
        obj,
        aux: aux_row,
        aux_rhs,
        enterable: nv + n_slack,
        iterations: 0,
        iteration_cap,
    };

    if t.aux.is_some() {
        match t.run(true)? {
            Step::Unbounded => {
                return Err(Error::SolverFailure(
                    "phase-1 objective unbounded (cannot happen)".into(),
                ))
            }
            Step::Optimal => {}
        }
        if !t.aux_rhs.is_zero() {
            return Err(Error::Infeasible(
                "LP has no feasible point (phase-1 optimum is positive)".into(),
            ));
        }
        // Pivot remaining artificials out; rows with no real coefficient
        // are redundant and stay inert at zero.
        for r in 0..t.a.len() {
            if t.basis[r] >= t.enterable {
                if let Some(e) = (0..t.enterable).find(|&j| !t.a[r][j].is_zero()) {
                    t.pivot(r, e);
                }
            }
        }
        t.aux = None;
    }

    match t.run(false)? {
        Step::Unbounded => {
            return Err(Error::SolverFailure(
                "LP objective is unbounded above".into(),
            ))
        }
        Step::Optimal => {}
    }

    let mut values = vec![Rat::zero(); nv];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < nv {
            values[b] = t.rhs[r].clone();
        }
    }
    let objective = model.objective_of(&values);
    Ok((values, objective))
}
