//! Multilinear extension of the multi-coverage objective.
//!
//! For marginals `x` in `[0,1]^m`, let `X_i ~ Bernoulli(x_i)` independent.
//! The extension is `F(x) = E[C(X)]`, evaluated per element through the
//! distribution of the element's hit count truncated at the cap:
//!
//! ```text
//! d[a] = P[count = a]  (a < ell),   d[ell] = P[count >= ell]
//! d'[a] = d[a] (1-p) + d[a-1] p,    d'[ell] = d[ell] + d[ell-1] p
//! ```
//!
//! One pass per incident set gives `E[min(ell, count)]` in `O(|sets| * ell)`.
//! For weighted instances, sort an element's weights in decreasing order
//! and sum by parts: with `w(1) >= w(2) >= ... >= w(m)` and `E_j` the
//! truncated expectation of the first `j` sets in that order,
//!
//! ```text
//! E[top-ell weight sum] = sum_j (w(j) - w(j+1)) E_j        (w(m+1) = 0)
//! ```
//!
//! because the top-`ell` selection decomposes over the nested prefixes.
//! Real (`f64`) and exact-rational evaluators share the same recurrence;
//! the exact path backs certificate checks, the real path is for scale.

use crate::error::{Error, Result};
use crate::model::{CoverageInstance, WeightedCoverageInstance};
use crate::rational::Rat;
use num::traits::Signed;
use num::{One, Zero};

fn check_prob_f64(p: f64) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

fn check_prob_rat(p: &Rat) -> Result<()> {
    if p.is_negative() || p > &Rat::one() {
        return Err(Error::invalid("probability outside [0,1]"));
    }
    Ok(())
}

fn dp_push_f64(d: &mut [f64], p: f64) {
    let ell = d.len() - 1;
    if ell >= 1 {
        d[ell] += p * d[ell - 1];
        for a in (1..ell).rev() {
            d[a] = d[a] * (1.0 - p) + p * d[a - 1];
        }
    }
    d[0] *= 1.0 - p;
}

fn dp_push_rat(d: &mut [Rat], p: &Rat) {
    let ell = d.len() - 1;
    let q = Rat::one() - p;
    if ell >= 1 {
        let add = p * &d[ell - 1];
        d[ell] += add;
        for a in (1..ell).rev() {
            d[a] = &d[a] * &q + p * &d[a - 1];
        }
    }
    d[0] *= &q;
}

fn dp_mean_f64(d: &[f64]) -> f64 {
    let ell = d.len() - 1;
    d.iter()
        .enumerate()
        .map(|(a, &pa)| a.min(ell) as f64 * pa)
        .sum()
}

fn dp_mean_rat(d: &[Rat]) -> Rat {
    d.iter()
        .enumerate()
        .map(|(a, pa)| Rat::from_integer(a.into()) * pa)
        .sum()
}

/// `E[min(ell, sum_i Bernoulli(probs[i]))]`.
pub fn element_expectation(probs: &[f64], ell: u32) -> Result<f64> {
    if ell == 0 {
        return Err(Error::invalid("ell must be at least 1"));
    }
    for &p in probs {
        check_prob_f64(p)?;
    }
    let mut d = vec![0.0; ell as usize + 1];
    d[0] = 1.0;
    for &p in probs {
        dp_push_f64(&mut d, p);
    }
    Ok(dp_mean_f64(&d))
}

/// Exact-rational [`element_expectation`].
pub fn element_expectation_exact(probs: &[Rat], ell: u32) -> Result<Rat> {
    if ell == 0 {
        return Err(Error::invalid("ell must be at least 1"));
    }
    for p in probs {
        check_prob_rat(p)?;
    }
    let mut d = vec![Rat::zero(); ell as usize + 1];
    d[0] = Rat::one();
    for p in probs {
        dp_push_rat(&mut d, p);
    }
    Ok(dp_mean_rat(&d))
}

/// Truncated expectations of the prefixes: entry `j` is
/// `E[min(ell, X_1 + ... + X_{j+1})]` over the first `j + 1` probabilities.
/// Backs per-prefix certificate checks for the weighted relaxation.
pub fn prefix_expectations(probs: &[f64], ell: u32) -> Result<Vec<f64>> {
    if ell == 0 {
        return Err(Error::invalid("ell must be at least 1"));
    }
    for &p in probs {
        check_prob_f64(p)?;
    }
    let mut d = vec![0.0; ell as usize + 1];
    d[0] = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for &p in probs {
        dp_push_f64(&mut d, p);
        out.push(dp_mean_f64(&d));
    }
    Ok(out)
}

fn check_x_f64(x: &[f64], m: usize) -> Result<()> {
    if x.len() != m {
        return Err(Error::invalid(format!(
            "x has length {} but m={m}",
            x.len()
        )));
    }
    for &xi in x {
        check_prob_f64(xi)?;
    }
    Ok(())
}

fn check_x_rat(x: &[Rat], m: usize) -> Result<()> {
    if x.len() != m {
        return Err(Error::invalid(format!(
            "x has length {} but m={m}",
            x.len()
        )));
    }
    for xi in x {
        check_prob_rat(xi)?;
    }
    Ok(())
}

/// `F(x) = sum_e E[min(ell, hits_e)]` for independent set marginals `x`.
pub fn multilinear_value(inst: &CoverageInstance, x: &[f64]) -> Result<f64> {
    check_x_f64(x, inst.m())?;
    let ell = inst.ell();
    let mut total = 0.0;
    for gamma in inst.incidence() {
        let probs: Vec<f64> = gamma.iter().map(|&i| x[i]).collect();
        total += element_expectation(&probs, ell)?;
    }
    Ok(total)
}

/// Exact-rational [`multilinear_value`].
pub fn multilinear_value_exact(inst: &CoverageInstance, x: &[Rat]) -> Result<Rat> {
    check_x_rat(x, inst.m())?;
    let ell = inst.ell();
    let mut total = Rat::zero();
    for gamma in inst.incidence() {
        let probs: Vec<Rat> = gamma.iter().map(|&i| x[i].clone()).collect();
        total += element_expectation_exact(&probs, ell)?;
    }
    Ok(total)
}

/// Weighted extension: every element sums its weights in decreasing order
/// by parts over prefix truncated expectations.  Ties in weight break
/// toward the lower set index, which fixes the evaluation order but not
/// the value (equal weights contribute a zero difference).
pub fn weighted_multilinear_value(inst: &WeightedCoverageInstance, x: &[f64]) -> Result<f64> {
    check_x_f64(x, inst.m())?;
    let ell = inst.ell() as usize;
    let m = inst.m();
    let mut total = 0.0;
    let mut order: Vec<usize> = (0..m).collect();
    for e in 0..inst.n() {
        let col: Vec<f64> = (0..m)
            .map(|i| crate::rational::rat_to_f64(inst.weight(i, e)))
            .collect();
        order.sort_by(|&a, &b| col[b].partial_cmp(&col[a]).unwrap().then(a.cmp(&b)));
        let mut d = vec![0.0; ell + 1];
        d[0] = 1.0;
        for (rank, &i) in order.iter().enumerate() {
            let w = col[i];
            if w == 0.0 {
                break;
            }
            dp_push_f64(&mut d, x[i]);
            let next = order.get(rank + 1).map_or(0.0, |&j| col[j]);
            total += (w - next) * dp_mean_f64(&d);
        }
    }
    Ok(total)
}

/// Exact-rational [`weighted_multilinear_value`].
pub fn weighted_multilinear_value_exact(inst: &WeightedCoverageInstance, x: &[Rat]) -> Result<Rat> {
    check_x_rat(x, inst.m())?;
    let ell = inst.ell() as usize;
    let m = inst.m();
    let mut total = Rat::zero();
    let mut order: Vec<usize> = (0..m).collect();
    for e in 0..inst.n() {
        order.sort_by(|&a, &b| inst.weight(b, e).cmp(inst.weight(a, e)).then(a.cmp(&b)));
        let mut d = vec![Rat::zero(); ell + 1];
        d[0] = Rat::one();
        for (rank, &i) in order.iter().enumerate() {
            let w = inst.weight(i, e);
            if w.is_zero() {
                break;
            }
            dp_push_rat(&mut d, &x[i]);
            let next = order
                .get(rank + 1)
                .map_or(Rat::zero(), |&j| inst.weight(j, e).clone());
            total += (w - &next) * dp_mean_rat(&d);
        }
    }
    Ok(total)
}
