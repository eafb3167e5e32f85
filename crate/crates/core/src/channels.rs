//! Discrete memoryless channels and list-decoding as weighted coverage.
//!
//! A code `S` of `k` inputs is used over a channel `W`; the receiver sees
//! `y` and answers with a list of `ell` candidate inputs.  Decoding
//! succeeds when the transmitted input (drawn uniformly from `S`) makes
//! the list.  The optimal list decoder keeps the `ell` likeliest
//! codewords, so the success probability is
//!
//! ```text
//! (1/k) * sum_y (largest min(ell, k) values of { W(y|x) : x in S })
//! ```
//!
//! which is exactly weighted `ell`-coverage with weights `W(y|x) / k`.
//! Finding the best code is therefore a weighted multi-coverage problem:
//! brute force for small input alphabets, or the LP-plus-rounding pipeline
//! with its `rho(ell)` guarantee.

use crate::baselines::ENUMERATION_GUARD;
use crate::combinatorics::{checked_binomial, rho};
use crate::error::{Error, Result};
use crate::model::{MatroidConstraint, WeightedCoverageInstance};
use crate::pipage::solve_weighted;
use crate::rational::{rat, rat_from_json, rat_to_f64, rat_to_string, rat_usize, Rat};
use crate::rng::SplitMix64;
use num::traits::Signed;
use num::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A row-stochastic transition matrix: `w[x][y] = W(y|x)`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSpec {
    inputs: usize,
    outputs: usize,
    w: Vec<Vec<Rat>>,
}

impl ChannelSpec {
    pub fn new(inputs: usize, outputs: usize, w: Vec<Vec<Rat>>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::invalid(
                "channel needs at least one input and output",
            ));
        }
        if w.len() != inputs {
            return Err(Error::invalid(format!(
                "expected {inputs} rows, got {}",
                w.len()
            )));
        }
        for (x, row) in w.iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::invalid(format!(
                    "row {x} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            if row.iter().any(Signed::is_negative) {
                return Err(Error::invalid(format!(
                    "row {x} has a negative probability"
                )));
            }
            let sum: Rat = row.iter().sum();
            if sum != Rat::one() {
                return Err(Error::invalid(format!(
                    "row {x} sums to {}, must be exactly 1",
                    rat_to_string(&sum)
                )));
            }
        }
        Ok(Self { inputs, outputs, w })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn prob(&self, x: usize, y: usize) -> &Rat {
        &self.w[x][y]
    }
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    inputs: usize,
    outputs: usize,
    #[serde(rename = "W")]
    w: Vec<Vec<serde_json::Value>>,
}

impl Serialize for ChannelSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        RawChannel {
            inputs: self.inputs,
            outputs: self.outputs,
            w: self
                .w
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| serde_json::Value::String(rat_to_string(v)))
                        .collect()
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ChannelSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawChannel::deserialize(de)?;
        let mut w = Vec::with_capacity(raw.w.len());
        for row in &raw.w {
            w.push(
                row.iter()
                    .map(rat_from_json)
                    .collect::<Result<Vec<Rat>>>()
                    .map_err(D::Error::custom)?,
            );
        }
        ChannelSpec::new(raw.inputs, raw.outputs, w).map_err(D::Error::custom)
    }
}

/// The weighted instance whose objective is the success probability:
/// universe = outputs, one candidate set per input, weights `W(y|x) / k`.
pub fn channel_to_instance(
    ch: &ChannelSpec,
    k: usize,
    ell: u32,
) -> Result<WeightedCoverageInstance> {
    if k == 0 || k > ch.inputs {
        return Err(Error::invalid(format!(
            "code size {k} must lie in 1..={}",
            ch.inputs
        )));
    }
    let kr = rat_usize(k);
    let weights: Vec<Vec<Rat>> =
        ch.w.iter()
            .map(|row| row.iter().map(|p| p / &kr).collect())
            .collect();
    WeightedCoverageInstance::new(ch.outputs, weights, ell, MatroidConstraint::Uniform { k })
}

fn check_code(ch: &ChannelSpec, code: &[usize]) -> Result<()> {
    if code.is_empty() || code.len() > ch.inputs {
        return Err(Error::invalid(format!(
            "code size {} must lie in 1..={}",
            code.len(),
            ch.inputs
        )));
    }
    let mut seen = vec![false; ch.inputs];
    for &x in code {
        if x >= ch.inputs {
            return Err(Error::invalid(format!("codeword {x} is not an input")));
        }
        if seen[x] {
            return Err(Error::invalid(format!("codeword {x} repeated")));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Success probability of the optimal list-`ell` decoder for `code`,
/// exactly.  Agrees with `weighted_coverage_value` on the reduction.
pub fn code_success_probability(ch: &ChannelSpec, code: &[usize], ell: u32) -> Result<Rat> {
    if ell == 0 {
        return Err(Error::invalid("list size ell must be at least 1"));
    }
    check_code(ch, code)?;
    let take = (ell as usize).min(code.len());
    let mut total = Rat::zero();
    let mut column: Vec<&Rat> = Vec::with_capacity(code.len());
    for y in 0..ch.outputs {
        column.clear();
        column.extend(code.iter().map(|&x| &ch.w[x][y]));
        column.sort_by(|a, b| b.cmp(a));
        for p in column.iter().take(take) {
            total += *p;
        }
    }
    Ok(total / rat_usize(code.len()))
}

/// How [`best_code`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Enumerate all `C(|X|, k)` codes; ties to the lexicographically
    /// smallest code.  Guarded.
    Exact,
    /// LP relaxation plus pipage rounding; certified `rho(ell)` factor.
    Approx,
}

/// A code, its exact success probability, and (for the approximate
/// search) the certified approximation factor.
#[derive(Debug, Clone)]
pub struct BestCode {
    pub code: Vec<usize>,
    pub probability: Rat,
    pub certified_ratio: Option<f64>,
}

pub fn best_code(ch: &ChannelSpec, k: usize, ell: u32, method: SearchMethod) -> Result<BestCode> {
    if ell == 0 {
        return Err(Error::invalid("list size ell must be at least 1"));
    }
    if k == 0 || k > ch.inputs {
        return Err(Error::invalid(format!(
            "code size {k} must lie in 1..={}",
            ch.inputs
        )));
    }
    match method {
        SearchMethod::Exact => {
            match checked_binomial(ch.inputs as u64, k as u64) {
                Some(count) if count <= ENUMERATION_GUARD => {}
                _ => {
                    return Err(Error::TooLarge(format!(
                        "C({},{k}) codes exceed the enumeration guard {ENUMERATION_GUARD}",
                        ch.inputs
                    )))
                }
            }
            let mut code: Vec<usize> = (0..k).collect();
            let mut best = BestCode {
                code: code.clone(),
                probability: code_success_probability(ch, &code, ell)?,
                certified_ratio: None,
            };
            loop {
                // Lexicographic successor of a k-subset of 0..inputs.
                let mut i = k;
                let advanced = loop {
                    if i == 0 {
                        break false;
                    }
                    i -= 1;
                    if code[i] < ch.inputs - k + i {
                        code[i] += 1;
                        for j in i + 1..k {
                            code[j] = code[j - 1] + 1;
                        }
                        break true;
                    }
                };
                if !advanced {
                    break;
                }
                let p = code_success_probability(ch, &code, ell)?;
                if p > best.probability {
                    best = BestCode {
                        code: code.clone(),
                        probability: p,
                        certified_ratio: None,
                    };
                }
            }
            Ok(best)
        }
        SearchMethod::Approx => {
            let inst = channel_to_instance(ch, k, ell)?;
            let out = solve_weighted(&inst)?;
            let probability = code_success_probability(ch, &out.solution.selected, ell)?;
            if probability != out.solution.value {
                return Err(Error::InvariantBreach(
                    "coverage value and decoding probability diverged".into(),
                ));
            }
            Ok(BestCode {
                code: out.solution.selected,
                probability,
                certified_ratio: Some(rho(ell)?),
            })
        }
    }
}

/// Monte Carlo tally of the top-`ell` likelihood decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationOutcome {
    pub hits: u64,
    pub samples: u64,
}

impl SimulationOutcome {
    pub fn rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.hits as f64 / self.samples as f64
        }
    }

    /// Binomial standard error of `rate`.
    pub fn standard_error(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        let p = self.rate();
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// Samples transmissions and runs the deterministic decoder: keep the
/// `min(ell, k)` likeliest codewords, ties to the lower codeword index.
/// Any such tie choice attains the optimal success probability, so the
/// tally converges to [`code_success_probability`].
pub fn simulate_decoding(
    ch: &ChannelSpec,
    code: &[usize],
    ell: u32,
    samples: u64,
    seed: u64,
) -> Result<SimulationOutcome> {
    if ell == 0 {
        return Err(Error::invalid("list size ell must be at least 1"));
    }
    check_code(ch, code)?;
    let k = code.len();
    let take = (ell as usize).min(k);
    // Per codeword: the output CDF for inverse sampling, and per output:
    // the decoder's ranked list, both fixed up front.
    let cdfs: Vec<Vec<f64>> = code
        .iter()
        .map(|&x| {
            let mut acc = 0.0;
            ch.w[x]
                .iter()
                .map(|p| {
                    acc += rat_to_f64(p);
                    acc
                })
                .collect()
        })
        .collect();
    let lists: Vec<Vec<usize>> = (0..ch.outputs)
        .map(|y| {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| ch.w[code[b]][y].cmp(&ch.w[code[a]][y]).then(a.cmp(&b)));
            order.truncate(take);
            order
        })
        .collect();
    let mut g = SplitMix64::new(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let sent = g.below(k as u64) as usize;
        let u = g.unit_f64();
        let y = cdfs[sent].partition_point(|&c| c <= u).min(ch.outputs - 1);
        if lists[y].contains(&sent) {
            hits += 1;
        }
    }
    Ok(SimulationOutcome { hits, samples })
}

/// Random channel with entries `a/sum(row)` for integer `a` in `1..=100`;
/// rows are exactly stochastic by construction.
pub fn gen_random_channel(seed: u64, inputs: usize, outputs: usize) -> Result<ChannelSpec> {
    if inputs == 0 || outputs == 0 {
        return Err(Error::invalid(
            "channel needs at least one input and output",
        ));
    }
    let mut g = SplitMix64::new(seed);
    let w = (0..inputs)
        .map(|_| {
            let raws: Vec<i64> = (0..outputs).map(|_| 1 + g.below(100) as i64).collect();
            let total: i64 = raws.iter().sum();
            raws.into_iter().map(|a| rat(a, total)).collect()
        })
        .collect();
    ChannelSpec::new(inputs, outputs, w)
}
