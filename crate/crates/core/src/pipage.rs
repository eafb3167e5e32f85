//! Pipage rounding and the end-to-end approximation pipeline.
//!
//! Rounding takes a fractional point whose per-group coordinate sums are
//! integers and repeatedly moves mass between the two lowest-index
//! fractional coordinates of a group.  The objective restricted to the
//! segment `x + t (e_i - e_j)` is convex, so the better endpoint never
//! loses value; every step makes at least one coordinate integral, which
//! bounds the walk by `m - 1` steps.  All comparisons are exact rational,
//! so endpoint ties are decided deterministically (toward raising the
//! lower index) instead of by float noise.
//!
//! [`solve`] and [`solve_weighted`] chain the pieces: build the
//! relaxation, solve it exactly, pad group sums up to their caps, round,
//! and report the chain of values.  The integral result is guaranteed at
//! least `rho(ell)` times the relaxation optimum, hence at least that
//! fraction of the true optimum.

use crate::combinatorics::rho;
use crate::error::{Error, Result};
use crate::lp::{build_lp, build_weighted_lp, solve_lp};
use crate::model::{
    coverage_value, weighted_coverage_value, CoverageInstance, IntegralSolution,
    WeightedCoverageInstance,
};
use crate::multilinear::{multilinear_value_exact, weighted_multilinear_value_exact};
use crate::rational::{rat_to_f64, rat_usize, Rat};
use num::traits::Signed;
use num::{One, Zero};

/// One rounding move: coordinate `i` changed by `+t`, coordinate `j` by
/// `-t`, with the exact objective before and after.
#[derive(Debug, Clone)]
pub struct PipageStep {
    pub i: usize,
    pub j: usize,
    pub t: Rat,
    pub f_before: Rat,
    pub f_after: Rat,
}

/// Result of rounding a fractional point.  `solution.value` always equals
/// `f_end`: the extension evaluated at a vertex is the plain objective.
#[derive(Debug, Clone)]
pub struct RoundingOutcome {
    pub solution: IntegralSolution,
    pub steps: Vec<PipageStep>,
    pub x_start: Vec<Rat>,
    pub x_final: Vec<Rat>,
    pub f_start: Rat,
    pub f_end: Rat,
}

/// Full pipeline result: the integral solution plus the value chain that
/// witnesses the guarantee.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: IntegralSolution,
    /// Exact optimum of the relaxation; an upper bound on the integral optimum.
    pub lp_value: Rat,
    /// Extension value at the padded fractional point.
    pub fractional_value: Rat,
    pub steps: Vec<PipageStep>,
    /// The guarantee factor `rho(ell)` for this instance.
    pub rho: f64,
}

impl SolveOutcome {
    /// `value / lp_value`, or 1 when the relaxation is worth nothing.
    pub fn ratio_vs_lp(&self) -> f64 {
        if self.lp_value.is_zero() {
            1.0
        } else {
            rat_to_f64(&self.solution.value) / rat_to_f64(&self.lp_value)
        }
    }
}

fn check_unit_box(x: &[Rat], m: usize) -> Result<()> {
    if x.len() != m {
        return Err(Error::invalid(format!(
            "x has length {} but m={m}",
            x.len()
        )));
    }
    if x.iter().any(|v| v.is_negative() || v > &Rat::one()) {
        return Err(Error::invalid("coordinates must lie in [0,1]"));
    }
    Ok(())
}

/// Raises coordinates (lowest index first) until each group's sum reaches
/// `min(cap, group size)`.  Monotonicity of the objective makes this free;
/// it also leaves every group sum integral, which rounding requires.
pub fn pad_to_caps(x: &mut [Rat], groups: &[Vec<usize>], caps: &[usize]) -> Result<()> {
    for (group, &cap) in groups.iter().zip(caps) {
        let target = rat_usize(cap.min(group.len()));
        let mut sum: Rat = group.iter().map(|&i| x[i].clone()).sum();
        if sum > target {
            return Err(Error::ConstraintViolation(format!(
                "group sum {sum} exceeds cap {cap}"
            )));
        }
        let mut members = group.to_vec();
        members.sort_unstable();
        for i in members {
            if sum == target {
                break;
            }
            let gap = &target - &sum;
            let add = gap.min(Rat::one() - &x[i]);
            x[i] += &add;
            sum += add;
        }
        if sum != target {
            return Err(Error::InvariantBreach(format!(
                "padding stalled below target {target}"
            )));
        }
    }
    Ok(())
}

type RawRounding = (Vec<usize>, Vec<PipageStep>, Vec<Rat>, Rat, Rat);

fn round_with(
    x: &[Rat],
    m: usize,
    groups: &[Vec<usize>],
    f: &dyn Fn(&[Rat]) -> Result<Rat>,
) -> Result<RawRounding> {
    check_unit_box(x, m)?;
    for group in groups {
        let sum: Rat = group.iter().map(|&i| x[i].clone()).sum();
        if !crate::rational::is_integer(&sum) {
            return Err(Error::invalid(format!(
                "group sum {sum} is not an integer; pad the point first"
            )));
        }
    }
    let mut x = x.to_vec();
    let f_start = f(&x)?;
    let mut f_cur = f_start.clone();
    let mut steps = Vec::new();
    let fractional = |v: &Rat| !v.is_zero() && v != &Rat::one();
    loop {
        // Two lowest-index fractional coordinates of the first group that
        // still has any; integral group sums mean none has exactly one.
        let mut pair = None;
        for group in groups {
            let mut members: Vec<usize> = group
                .iter()
                .copied()
                .filter(|&i| fractional(&x[i]))
                .collect();
            if members.is_empty() {
                continue;
            }
            members.sort_unstable();
            if members.len() < 2 {
                return Err(Error::InvariantBreach(
                    "a group holds a single fractional coordinate".into(),
                ));
            }
            pair = Some((members[0], members[1]));
            break;
        }
        let Some((i, j)) = pair else { break };
        if steps.len() >= m {
            return Err(Error::InvariantBreach(
                "rounding failed to terminate".into(),
            ));
        }
        let up = (Rat::one() - &x[i]).min(x[j].clone());
        let down = x[i].clone().min(Rat::one() - &x[j]);
        let eval_at = |t: &Rat, x: &[Rat]| -> Result<Rat> {
            let mut y = x.to_vec();
            y[i] += t;
            y[j] -= t;
            f(&y)
        };
        let f_up = eval_at(&up, &x)?;
        let t_down = -down;
        let f_down = eval_at(&t_down, &x)?;
        // Ties go to the endpoint raising the lower index.
        let t = if f_up >= f_down { up } else { t_down };
        let f_next = if f_up >= f_down { f_up } else { f_down };
        if f_next < f_cur {
            return Err(Error::InvariantBreach(format!(
                "objective dropped from {f_cur} to {f_next}"
            )));
        }
        x[i] += &t;
        x[j] -= &t;
        steps.push(PipageStep {
            i,
            j,
            t,
            f_before: f_cur.clone(),
            f_after: f_next.clone(),
        });
        f_cur = f_next;
    }
    let mut chosen = Vec::new();
    for (i, v) in x.iter().enumerate() {
        if v == &Rat::one() {
            chosen.push(i);
        } else if !v.is_zero() {
            return Err(Error::InvariantBreach(format!(
                "coordinate {i} left fractional at {v}"
            )));
        }
    }
    Ok((chosen, steps, x, f_start, f_cur))
}

fn finish(
    raw: (Vec<usize>, Vec<PipageStep>, Vec<Rat>, Rat, Rat),
    x_start: &[Rat],
    value: Rat,
) -> Result<RoundingOutcome> {
    let (chosen, steps, x_final, f_start, f_end) = raw;
    if value != f_end {
        return Err(Error::InvariantBreach(format!(
            "vertex objective {value} disagrees with the extension {f_end}"
        )));
    }
    Ok(RoundingOutcome {
        solution: IntegralSolution {
            selected: chosen,
            value,
        },
        steps,
        x_start: x_start.to_vec(),
        x_final,
        f_start,
        f_end,
    })
}

/// Rounds `x` for a budgeted instance.  Requires an integral coordinate
/// sum (the relaxation's budget row guarantees it).
pub fn pipage_round(inst: &CoverageInstance, x: &[Rat]) -> Result<RoundingOutcome> {
    let groups = vec![(0..inst.m()).collect::<Vec<_>>()];
    let raw = round_with(x, inst.m(), &groups, &|y| multilinear_value_exact(inst, y))?;
    let value = rat_usize(coverage_value(inst, &raw.0)? as usize);
    finish(raw, x, value)
}

/// Rounds `x` for a weighted instance under its partition constraint.
/// Requires integral group sums; [`pad_to_caps`] establishes them.
pub fn pipage_round_weighted(
    inst: &WeightedCoverageInstance,
    x: &[Rat],
) -> Result<RoundingOutcome> {
    let (groups, _) = inst.constraint().groups_and_caps(inst.m());
    let raw = round_with(x, inst.m(), &groups, &|y| {
        weighted_multilinear_value_exact(inst, y)
    })?;
    let value = weighted_coverage_value(inst, &raw.0)?;
    finish(raw, x, value)
}

fn guard_guarantee(value: &Rat, lp_value: &Rat, rho: f64, m: usize) -> Result<()> {
    let lhs = rat_to_f64(value);
    let rhs = rho * rat_to_f64(lp_value) - 1e-9 * m as f64;
    if lhs < rhs {
        return Err(Error::InvariantBreach(format!(
            "integral value {lhs} fell below the guaranteed {rhs}"
        )));
    }
    Ok(())
}

/// Relax, solve, pad, round.  The returned cover has exactly `k` sets.
pub fn solve(inst: &CoverageInstance) -> Result<SolveOutcome> {
    let frac = solve_lp(&build_lp(inst))?;
    let mut x = frac.x;
    let groups = vec![(0..inst.m()).collect::<Vec<_>>()];
    pad_to_caps(&mut x, &groups, &[inst.k()])?;
    let rounded = pipage_round(inst, &x)?;
    let rho = rho(inst.ell())?;
    guard_guarantee(&rounded.solution.value, &frac.objective, rho, inst.m())?;
    Ok(SolveOutcome {
        solution: rounded.solution,
        lp_value: frac.objective,
        fractional_value: rounded.f_start,
        steps: rounded.steps,
        rho,
    })
}

/// Weighted pipeline under a uniform or partition constraint.
pub fn solve_weighted(inst: &WeightedCoverageInstance) -> Result<SolveOutcome> {
    let frac = solve_lp(&build_weighted_lp(inst))?;
    let mut x = frac.x;
    let (groups, caps) = inst.constraint().groups_and_caps(inst.m());
    pad_to_caps(&mut x, &groups, &caps)?;
    let rounded = pipage_round_weighted(inst, &x)?;
    let rho = rho(inst.ell())?;
    guard_guarantee(&rounded.solution.value, &frac.objective, rho, inst.m())?;
    Ok(SolveOutcome {
        solution: rounded.solution,
        lp_value: frac.objective,
        fractional_value: rounded.f_start,
        steps: rounded.steps,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_feasible, MatroidConstraint};
    use crate::rational::{rat, rat_int};
    use crate::rng::SplitMix64;

    fn path_instance() -> CoverageInstance {
        CoverageInstance::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]], 2, 1).unwrap()
    }

    #[test]
    fn walk_on_the_path_instance_is_frozen() {
        let x = vec![rat(2, 3), rat(2, 3), rat(2, 3)];
        let out = pipage_round(&path_instance(), &x).unwrap();
        assert_eq!(out.solution.selected, vec![0, 2]);
        assert_eq!(out.steps.len(), 2);
        assert_eq!(out.f_start, rat(28, 9));
        assert_eq!(out.f_end, rat_int(4));
        assert_eq!(out.steps[0].i, 0);
        assert_eq!(out.steps[0].j, 1);
        assert_eq!(out.steps[0].t, rat(1, 3));
        assert_eq!(out.steps[0].f_after, rat(31, 9));
        assert_eq!(out.steps[1].t, rat(-1, 3));
        for s in &out.steps {
            assert!(s.f_after >= s.f_before);
        }
    }

    #[test]
    fn endpoint_ties_raise_the_lower_index() {
        let inst = CoverageInstance::new(2, vec![vec![0], vec![1]], 1, 1).unwrap();
        let out = pipage_round(&inst, &[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(out.solution.selected, vec![0]);
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.steps[0].t, rat(1, 2));
    }

    #[test]
    fn non_integral_sums_are_rejected_up_front() {
        let err = pipage_round(&path_instance(), &[rat(1, 2), rat(1, 2), rat(1, 2)]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let err = pipage_round(&path_instance(), &[rat(3, 2), rat(1, 2), Rat::zero()]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn integral_input_rounds_in_zero_steps() {
        let x = vec![Rat::one(), Rat::zero(), Rat::one()];
        let out = pipage_round(&path_instance(), &x).unwrap();
        assert_eq!(out.solution.selected, vec![0, 2]);
        assert!(out.steps.is_empty());
        assert_eq!(out.f_start, out.f_end);
    }

    #[test]
    fn padding_tops_up_lowest_indices_first() {
        let mut x = vec![rat(1, 2), Rat::zero(), rat(1, 4), Rat::one()];
        pad_to_caps(&mut x, &[vec![0, 1], vec![2, 3]], &[2, 2]).unwrap();
        assert_eq!(x, vec![Rat::one(), Rat::one(), Rat::one(), Rat::one()]);
        let mut y = vec![rat(1, 2), Rat::zero(), rat(1, 4)];
        pad_to_caps(&mut y, &[vec![0, 1, 2]], &[1]).unwrap();
        assert_eq!(y, vec![rat(3, 4), Rat::zero(), rat(1, 4)]);
        let mut z = vec![rat(1, 2)];
        assert!(pad_to_caps(&mut z, &[vec![0]], &[0]).is_err());
    }

    #[test]
    fn solve_reaches_the_relaxation_optimum_on_the_path() {
        let out = solve(&path_instance()).unwrap();
        assert_eq!(out.solution.selected, vec![0, 2]);
        assert_eq!(out.solution.value, rat_int(4));
        assert_eq!(out.lp_value, rat_int(4));
        assert!((out.ratio_vs_lp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_handles_the_greedy_trap_instance() {
        // One bulky set covers both halves; greedy grabs it, the pipeline
        // still ends at the relaxation optimum.
        let inst =
            CoverageInstance::new(4, vec![vec![1, 2], vec![0, 1], vec![2, 3]], 2, 1).unwrap();
        let out = solve(&inst).unwrap();
        assert_eq!(out.solution.value, rat_int(4));
        assert_eq!(out.solution.selected, vec![1, 2]);
    }

    #[test]
    fn random_instances_round_soundly() {
        let mut g = SplitMix64::new(21);
        for _ in 0..30 {
            let n = 1 + g.below(8) as usize;
            let m = 2 + g.below(6) as usize;
            let sets: Vec<Vec<usize>> = (0..m)
                .map(|_| (0..n).filter(|_| g.chance(1, 2)).collect())
                .collect();
            let k = 1 + g.below(m as u64) as usize;
            let ell = 1 + g.below(3) as u32;
            let inst = CoverageInstance::new(n, sets, k, ell).unwrap();
            let out = solve(&inst).unwrap();
            assert_eq!(out.solution.selected.len(), inst.k());
            assert!(out.steps.len() <= inst.m().saturating_sub(1));
            let f_end = out
                .steps
                .last()
                .map_or(out.fractional_value.clone(), |s| s.f_after.clone());
            assert!(f_end >= out.fractional_value);
            let c = coverage_value(&inst, &out.solution.selected).unwrap();
            assert_eq!(rat_usize(c as usize), out.solution.value);
            assert!(
                rat_to_f64(&out.solution.value) >= out.rho * rat_to_f64(&out.lp_value) - 1e-9,
                "guarantee missed"
            );
        }
    }

    #[test]
    fn weighted_partition_pipeline_is_sound() {
        let mut g = SplitMix64::new(22);
        for _ in 0..15 {
            let n = 1 + g.below(5) as usize;
            let m = 2 + g.below(5) as usize;
            let weights: Vec<Vec<Rat>> = (0..m)
                .map(|_| (0..n).map(|_| rat(g.below(7) as i64, 4)).collect())
                .collect();
            let ell = 1 + g.below(2) as u32;
            // Split 0..m into two contiguous groups.
            let cut = 1 + g.below(m as u64 - 1) as usize;
            let groups = vec![(0..cut).collect::<Vec<_>>(), (cut..m).collect()];
            let caps = vec![
                1 + g.below(cut as u64) as usize,
                1 + g.below((m - cut) as u64) as usize,
            ];
            let constraint = MatroidConstraint::Partition { groups, caps };
            let inst = WeightedCoverageInstance::new(n, weights, ell, constraint.clone()).unwrap();
            let out = solve_weighted(&inst).unwrap();
            assert!(is_feasible(&constraint, &out.solution.selected, m));
            assert_eq!(
                out.solution.value,
                weighted_coverage_value(&inst, &out.solution.selected).unwrap()
            );
            assert!(
                rat_to_f64(&out.solution.value)
                    >= out.rho * rat_to_f64(&out.lp_value) - 1e-9 * m as f64
            );
            for s in &out.steps {
                assert!(s.f_after >= s.f_before);
            }
        }
    }
}
