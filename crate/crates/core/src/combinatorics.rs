//! Scalar combinatorial quantities used by the solver and its analysis.
//!
//! The central constant is the approximation factor of the LP + pipage
//! pipeline for coverage cap `ell`:
//!
//! ```text
//! rho(ell) = 1 - ell^ell e^-ell / ell!
//!          = (1/ell) E[ min(ell, Poisson(ell)) ]
//! ```
//!
//! (`rho(1) = 1 - 1/e`, `rho(2) = 1 - 2/e^2`, and `rho(ell)` approaches
//! `1 - 1/sqrt(2 pi ell)` from above as `ell` grows.)  Everything real runs
//! through log-gamma so factorials never overflow; the quantities that feed
//! exact verification (`psi_exact`, `binomial_shortfall_exact`) are computed
//! in big-integer rational arithmetic instead.

use crate::error::{Error, Result};
use crate::rational::{rat_to_f64, Rat};
use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};
use statrs::function::gamma::ln_gamma;

/// Guaranteed approximation factor `1 - ell^ell e^-ell / ell!`.
pub fn rho(ell: u32) -> Result<f64> {
    if ell == 0 {
        return Err(Error::invalid("rho requires ell >= 1"));
    }
    let l = f64::from(ell);
    Ok(1.0 - (l * l.ln() - l - ln_gamma(l + 1.0)).exp())
}

/// Distribution argument for [`truncated_mean`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncatedDist {
    Poisson { rate: f64 },
    Binomial { trials: u64, p: f64 },
}

fn poisson_ln_pmf(rate: f64, a: u64) -> f64 {
    -rate + a as f64 * rate.ln() - ln_gamma(a as f64 + 1.0)
}

fn binomial_ln_pmf(trials: u64, p: f64, a: u64) -> f64 {
    let n = trials as f64;
    let x = a as f64;
    ln_gamma(n + 1.0) - ln_gamma(x + 1.0) - ln_gamma(n - x + 1.0)
        + x * p.ln()
        + (n - x) * (1.0 - p).ln()
}

/// Streams `P[X = 0], P[X = 1], ...` for `X ~ Poisson(rate)`.  The term
/// recurrence keeps relative error near machine epsilon, which the 1e-12
/// acceptance tolerances need; the log-gamma route (error around 1e-13)
/// only backs it up when `e^-rate` underflows.
struct PoissonPmf {
    rate: f64,
    mass: f64,
    next_a: u64,
    direct: bool,
}

impl PoissonPmf {
    fn new(rate: f64) -> Self {
        let origin = (-rate).exp();
        PoissonPmf {
            rate,
            mass: origin,
            next_a: 0,
            direct: origin >= f64::MIN_POSITIVE,
        }
    }

    fn next(&mut self) -> f64 {
        let a = self.next_a;
        self.next_a += 1;
        if self.direct {
            let out = self.mass;
            self.mass *= self.rate / (a + 1) as f64;
            out
        } else {
            poisson_ln_pmf(self.rate, a).exp()
        }
    }
}

/// Binomial counterpart of [`PoissonPmf`]; requires `0 < p < 1`.
struct BinomialPmf {
    trials: u64,
    p: f64,
    mass: f64,
    next_a: u64,
    direct: bool,
}

impl BinomialPmf {
    fn new(trials: u64, p: f64) -> Self {
        let origin = (1.0 - p).powf(trials as f64);
        BinomialPmf {
            trials,
            p,
            mass: origin,
            next_a: 0,
            direct: origin >= f64::MIN_POSITIVE,
        }
    }

    fn next(&mut self) -> f64 {
        let a = self.next_a;
        self.next_a += 1;
        if self.direct {
            let out = self.mass;
            self.mass *= (self.trials - a) as f64 / (a + 1) as f64 * self.p / (1.0 - self.p);
            out
        } else {
            binomial_ln_pmf(self.trials, self.p, a).exp()
        }
    }
}

/// `E[min(cap, X)]`, un-normalized.  Only the `cap` lowest terms are ever
/// summed: `E[min(cap, X)] = sum_{a<cap} a P[X=a] + cap P[X>=cap]`.
pub fn truncated_mean(dist: &TruncatedDist, cap: u32) -> Result<f64> {
    if cap == 0 {
        return Ok(0.0);
    }
    match *dist {
        TruncatedDist::Poisson { rate } => {
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::invalid(format!("Poisson rate {rate} invalid")));
            }
            if rate == 0.0 {
                return Ok(0.0);
            }
            let mut pmf = PoissonPmf::new(rate);
            let mut below_mass = 0.0;
            let mut below_mean = 0.0;
            for a in 0..u64::from(cap) {
                let p = pmf.next();
                below_mass += p;
                below_mean += a as f64 * p;
            }
            Ok(below_mean + f64::from(cap) * (1.0 - below_mass).max(0.0))
        }
        TruncatedDist::Binomial { trials, p } => {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("Binomial p={p} outside [0,1]")));
            }
            if p == 0.0 || trials == 0 {
                return Ok(0.0);
            }
            if u64::from(cap) >= trials {
                // X <= trials, so the cap never binds.
                return Ok(trials as f64 * p);
            }
            if p == 1.0 {
                return Ok(f64::from(cap).min(trials as f64));
            }
            let mut pmf = BinomialPmf::new(trials, p);
            let mut below_mass = 0.0;
            let mut below_mean = 0.0;
            for a in 0..u64::from(cap) {
                let q = pmf.next();
                below_mass += q;
                below_mean += a as f64 * q;
            }
            Ok(below_mean + f64::from(cap) * (1.0 - below_mass).max(0.0))
        }
    }
}

fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num::integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// `C(n, k)` as a `u64`, or `None` when it does not fit.  Used by the
/// enumeration guards in front of brute-force searches.
pub fn checked_binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // Multiplying before dividing keeps every intermediate an exact
        // binomial: acc * (n - j) / (j + 1) = C(n, j + 1).
        acc = acc.checked_mul(u128::from(n - j))? / u128::from(j + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// `psi(ell, t, h) = E[min(ell, Binomial(t, ell/h))]` as an exact rational:
/// the expected coverage per element (relative to universe size) when one
/// block is chosen from each of `t` independent equi-sized `ell`-covers
/// with `h` blocks each.
pub fn psi_exact(ell: u32, t_size: u32, h: u32) -> Result<Rat> {
    if ell == 0 {
        return Err(Error::invalid("psi requires ell >= 1"));
    }
    if h < ell {
        return Err(Error::invalid(format!(
            "psi requires h >= ell, got h={h} < ell={ell}"
        )));
    }
    let t = u64::from(t_size);
    if h == ell {
        // p = 1: the binomial is deterministic at t.
        return Ok(Rat::from_integer(BigInt::from(t.min(u64::from(ell)))));
    }
    let p = Rat::new(BigInt::from(ell), BigInt::from(h));
    let q = Rat::one() - &p;
    // ell - sum_{i<ell} (ell - i) C(t, i) p^i q^(t-i)
    let mut sum = Rat::zero();
    let mut p_pow = Rat::one();
    for i in 0..u64::from(ell).min(t + 1) {
        let coeff = Rat::from_integer(big_binomial(t, i) * BigInt::from(u64::from(ell) - i));
        let q_pow = num::pow::pow(q.clone(), (t - i) as usize);
        sum += coeff * &p_pow * q_pow;
        p_pow *= &p;
    }
    Ok(Rat::from_integer(BigInt::from(ell)) - sum)
}

/// Real-valued [`psi_exact`].
pub fn psi(ell: u32, t_size: u32, h: u32) -> Result<f64> {
    Ok(rat_to_f64(&psi_exact(ell, t_size, h)?))
}

/// Piecewise-linear extension of `t -> psi(ell, t, h)` to real `x >= 0`.
pub fn psi_tilde(ell: u32, x: f64, h: u32) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "psi_tilde requires x >= 0, got {x}"
        )));
    }
    if x > 1e6 {
        return Err(Error::TooLarge(format!(
            "psi_tilde argument x={x} is unreasonably large"
        )));
    }
    let lo = x.floor();
    let lam = lo + 1.0 - x;
    let lo_u = lo as u32;
    let lo_val = psi(ell, lo_u, h)?;
    if lam == 1.0 {
        return Ok(lo_val);
    }
    let hi_val = psi(ell, lo_u + 1, h)?;
    Ok(lam * lo_val + (1.0 - lam) * hi_val)
}

/// Expected unmet demand `E[max(s - Binomial(t, x), 0)]`, i.e.
/// `sum_{m<s} (s - m) C(t, m) x^m (1-x)^(t-m)`.  Nonincreasing and convex
/// in `x` on [0, 1]; identically `s - t x` when `s >= t`.
pub fn binomial_shortfall(s: u32, t: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!(
            "shortfall requires x in [0,1], got {x}"
        )));
    }
    if s == 0 {
        return Ok(0.0);
    }
    if s >= t {
        return Ok(f64::from(s) - f64::from(t) * x);
    }
    if x == 0.0 {
        return Ok(f64::from(s));
    }
    if x == 1.0 {
        return Ok(0.0); // s < t, so the binomial lands at t >= s.
    }
    let mut acc = 0.0;
    for m in 0..u64::from(s) {
        let pmf = binomial_ln_pmf(u64::from(t), x, m).exp();
        acc += (f64::from(s) - m as f64) * pmf;
    }
    Ok(acc)
}

/// Exact-rational [`binomial_shortfall`].
pub fn binomial_shortfall_exact(s: u32, t: u32, x: &Rat) -> Result<Rat> {
    if x.is_negative() || x > &Rat::one() {
        return Err(Error::invalid("shortfall requires x in [0,1]"));
    }
    let s_big = Rat::from_integer(BigInt::from(s));
    let t_big = Rat::from_integer(BigInt::from(t));
    if s == 0 {
        return Ok(Rat::zero());
    }
    if s >= t {
        return Ok(s_big - t_big * x);
    }
    let q = Rat::one() - x;
    let mut acc = Rat::zero();
    let mut x_pow = Rat::one();
    for m in 0..u64::from(s) {
        let coeff =
            Rat::from_integer(big_binomial(u64::from(t), m) * BigInt::from(u64::from(s) - m));
        let q_pow = num::pow::pow(q.clone(), (u64::from(t) - m) as usize);
        acc += coeff * &x_pow * q_pow;
        x_pow *= x;
    }
    Ok(acc)
}

/// Convex test functions for checking the binomial-vs-Poisson convex order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexTestFn {
    /// |x - a|
    Abs { a: f64 },
    /// max(x - a, 0)
    Hinge { a: f64 },
    /// x^2
    Square,
    /// exp(x / 4)
    ExpQuarter,
}

impl ConvexTestFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ConvexTestFn::Abs { a } => (x - a).abs(),
            ConvexTestFn::Hinge { a } => (x - a).max(0.0),
            ConvexTestFn::Square => x * x,
            ConvexTestFn::ExpQuarter => (x / 4.0).exp(),
        }
    }

    pub fn id(&self) -> String {
        match *self {
            ConvexTestFn::Abs { a } => format!("abs:{a}"),
            ConvexTestFn::Hinge { a } => format!("hinge:{a}"),
            ConvexTestFn::Square => "square".into(),
            ConvexTestFn::ExpQuarter => "exp4".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown convex test function {s:?}"));
        if s == "square" {
            return Ok(ConvexTestFn::Square);
        }
        if s == "exp4" {
            return Ok(ConvexTestFn::ExpQuarter);
        }
        if let Some(rest) = s.strip_prefix("abs:") {
            let a: f64 = rest.parse().map_err(|_| bad())?;
            if !a.is_finite() {
                return Err(bad());
            }
            return Ok(ConvexTestFn::Abs { a });
        }
        if let Some(rest) = s.strip_prefix("hinge:") {
            let a: f64 = rest.parse().map_err(|_| bad())?;
            if !a.is_finite() {
                return Err(bad());
            }
            return Ok(ConvexTestFn::Hinge { a });
        }
        Err(bad())
    }

    /// Fixed test catalog: absolute deviations on a grid of anchors, hinges,
    /// the square, and a sub-exponential.
    pub fn catalog() -> Vec<ConvexTestFn> {
        let mut fns = Vec::new();
        for a in [0.25, 0.5, 0.75, 1.0, 1.5, 2.5] {
            fns.push(ConvexTestFn::Abs { a });
        }
        for a in [0.0, 0.5, 1.0, 2.0] {
            fns.push(ConvexTestFn::Hinge { a });
        }
        fns.push(ConvexTestFn::Square);
        fns.push(ConvexTestFn::ExpQuarter);
        fns
    }
}

/// `E[f(Binomial(trials, p))]` by direct pmf summation.
pub fn expect_binomial(trials: u64, p: f64, f: &ConvexTestFn) -> f64 {
    if trials == 0 || p == 0.0 {
        return f.eval(0.0);
    }
    if p == 1.0 {
        return f.eval(trials as f64);
    }
    let mut pmf = BinomialPmf::new(trials, p);
    (0..=trials).map(|a| pmf.next() * f.eval(a as f64)).sum()
}

/// `E[f(Poisson(rate))]`, summed until the tail is negligible.
pub fn expect_poisson(rate: f64, f: &ConvexTestFn) -> f64 {
    if rate == 0.0 {
        return f.eval(0.0);
    }
    // Terms are summed until two consecutive terms past the mode drop below
    // 1e-22; the catalog grows at most like exp(x/4), so the term ratio is
    // below 1 from roughly 1.3 * rate onward and the tail is negligible.
    let mut pmf = PoissonPmf::new(rate);
    let mut acc = 0.0;
    let mut tiny_run = 0;
    let mut a: u64 = 0;
    loop {
        let term = pmf.next() * f.eval(a as f64);
        acc += term;
        if a as f64 > rate + 5.0 {
            if term.abs() < 1e-22 {
                tiny_run += 1;
                if tiny_run >= 2 {
                    break;
                }
            } else {
                tiny_run = 0;
            }
        }
        a += 1;
        assert!(a < 1_000_000, "Poisson expectation failed to converge");
    }
    acc
}

/// `E[f(Poisson(trials * p))] - E[f(Binomial(trials, p))]`.  Nonnegative for
/// every convex `f`: the binomial is dominated in the convex order by the
/// Poisson with the same mean.
pub fn convex_order_gap(trials: u64, p: f64, f: &ConvexTestFn) -> Result<f64> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p={p} outside [0,1]")));
    }
    let rate = trials as f64 * p;
    Ok(expect_poisson(rate, f) - expect_binomial(trials, p, f))
}
