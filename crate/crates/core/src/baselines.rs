//! Greedy, brute-force, and random baselines, plus instance generators.
//!
//! Greedy is the classic marginal-gain heuristic.  Its guarantee stays at
//! `1 - 1/e` for every cap: duplicating each set `ell` times (see
//! [`gen_duplicated`]) lets greedy simply re-pick its cap-1 choices `ell`
//! times over, so its ratio never improves with `ell`, while the LP plus
//! rounding pipeline climbs to `rho(ell)`.  Brute force is the oracle the
//! test suite measures everything against.

use crate::combinatorics::checked_binomial;
use crate::error::{Error, Result};
use crate::model::{coverage_value, CoverageInstance, IntegralSolution};
use crate::rational::rat_usize;
use crate::rng::SplitMix64;

/// Cap on exhaustive enumeration; `C(m, k)` beyond this is refused.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

/// A greedy run: the solution plus the pick-order trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyRun {
    pub solution: IntegralSolution,
    /// Sets in pick order, each with its marginal gain at pick time.
    pub picks: Vec<(usize, u64)>,
}

/// Picks `k` sets, each maximizing the marginal coverage gain, ties to the
/// lowest index.  Runs all `k` iterations even when gains hit zero.
pub fn greedy(inst: &CoverageInstance) -> Result<GreedyRun> {
    let ell = inst.ell();
    let mut cov = vec![0u32; inst.n()];
    let mut taken = vec![false; inst.m()];
    let mut picks = Vec::with_capacity(inst.k());
    let mut total = 0u64;
    for _ in 0..inst.k() {
        let mut best: Option<(usize, u64)> = None;
        for (i, &done) in taken.iter().enumerate() {
            if done {
                continue;
            }
            let gain = inst.set(i).iter().filter(|&&e| cov[e] < ell).count() as u64;
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((i, gain));
            }
        }
        let (i, gain) = best.expect("k <= m leaves an unpicked set");
        taken[i] = true;
        for &e in inst.set(i) {
            cov[e] = (cov[e] + 1).min(ell);
        }
        total += gain;
        picks.push((i, gain));
    }
    let mut selected: Vec<usize> = picks.iter().map(|&(i, _)| i).collect();
    selected.sort_unstable();
    let value = coverage_value(inst, &selected)?;
    if value != total {
        return Err(Error::InvariantBreach(format!(
            "greedy gains sum to {total} but the selection covers {value}"
        )));
    }
    Ok(GreedyRun {
        solution: IntegralSolution {
            selected,
            value: rat_usize(value as usize),
        },
        picks,
    })
}

/// Advances `s` to the next `k`-subset of `0..m` in lexicographic order.
fn next_subset(s: &mut [usize], m: usize) -> bool {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < m - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exhaustive optimum over all `k`-subsets; ties resolve to the
/// lexicographically smallest selection.
pub fn brute_force(inst: &CoverageInstance) -> Result<IntegralSolution> {
    let (m, k) = (inst.m(), inst.k());
    match checked_binomial(m as u64, k as u64) {
        Some(count) if count <= ENUMERATION_GUARD => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "C({m},{k}) subsets exceed the enumeration guard {ENUMERATION_GUARD}"
            )))
        }
    }
    let mut s: Vec<usize> = (0..k).collect();
    let mut best = IntegralSolution {
        selected: s.clone(),
        value: rat_usize(coverage_value(inst, &s)? as usize),
    };
    while next_subset(&mut s, m) {
        let v = rat_usize(coverage_value(inst, &s)? as usize);
        if v > best.value {
            best = IntegralSolution {
                selected: s.clone(),
                value: v,
            };
        }
    }
    Ok(best)
}

/// Uniformly random `k`-subset; the weakest baseline in reports.
pub fn random_baseline(inst: &CoverageInstance, seed: u64) -> Result<IntegralSolution> {
    let mut g = SplitMix64::new(seed);
    let mut perm: Vec<usize> = (0..inst.m()).collect();
    g.shuffle(&mut perm);
    let mut selected: Vec<usize> = perm[..inst.k()].to_vec();
    selected.sort_unstable();
    let value = coverage_value(inst, &selected)?;
    Ok(IntegralSolution {
        selected,
        value: rat_usize(value as usize),
    })
}

/// The greedy-stalling construction: every set of `base` repeated `ell`
/// times (replicas adjacent, base order kept), budget `ell * k`, cap `ell`.
pub fn gen_duplicated(base: &CoverageInstance, ell: u32) -> Result<CoverageInstance> {
    let mut sets = Vec::with_capacity(base.m() * ell as usize);
    for set in base.sets() {
        for _ in 0..ell {
            sets.push(set.clone());
        }
    }
    CoverageInstance::new(base.n(), sets, base.k() * ell as usize, ell)
}

/// Random instance: each element joins each set independently with
/// probability `density`.  Draws run set-by-set, element-by-element, so a
/// seed pins the instance bit-for-bit.  Empty sets are allowed.
pub fn gen_random(
    seed: u64,
    n: usize,
    m: usize,
    k: usize,
    ell: u32,
    density: f64,
) -> Result<CoverageInstance> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::invalid(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    let mut g = SplitMix64::new(seed);
    let sets: Vec<Vec<usize>> = (0..m)
        .map(|_| (0..n).filter(|_| g.unit_f64() < density).collect())
        .collect();
    CoverageInstance::new(n, sets, k, ell)
}
