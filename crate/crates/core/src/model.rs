//! Problem instances and exact objective evaluation.
//!
//! An unweighted instance holds `m` subsets of `{0, .., n-1}`, a budget `k`,
//! and a coverage cap `ell`; the objective of a selection `S` is
//! `sum_e min(ell, #{i in S : e in T_i})`.  The weighted variant attaches a
//! nonnegative rational weight `w[i][e]` to every (set, element) pair and an
//! element collects its `min(ell, |S|)` largest selected weights; selections
//! are constrained by a uniform or partition matroid.

use crate::error::{Error, Result};
use crate::rational::{rat_from_json, rat_to_string, Rat};
use num::traits::Signed;
use num::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageInstance {
    n: usize,
    sets: Vec<Vec<usize>>,
    k: usize,
    ell: u32,
}

impl CoverageInstance {
    /// Validates ranges, sorts each set, and rejects duplicate elements
    /// within a set.
    pub fn new(n: usize, sets: Vec<Vec<usize>>, k: usize, ell: u32) -> Result<Self> {
        if ell == 0 {
            return Err(Error::invalid("ell must be at least 1"));
        }
        let m = sets.len();
        if m == 0 {
            return Err(Error::invalid("need at least one candidate set"));
        }
        if k == 0 || k > m {
            return Err(Error::invalid(format!("budget k={k} outside 1..={m}")));
        }
        let mut sorted_sets = sets;
        for (i, set) in sorted_sets.iter_mut().enumerate() {
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("set {i} has a duplicate element")));
            }
            if let Some(&last) = set.last() {
                if last >= n {
                    return Err(Error::invalid(format!(
                        "set {i} mentions element {last} outside 0..{n}"
                    )));
                }
            }
        }
        Ok(CoverageInstance {
            n,
            sets: sorted_sets,
            k,
            ell,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// Element-to-sets incidence: entry `e` lists the indices of the sets
    /// containing `e`, in increasing order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, set) in self.sets.iter().enumerate() {
            for &e in set {
                inc[e].push(i);
            }
        }
        inc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatroidConstraint {
    Uniform {
        k: usize,
    },
    Partition {
        groups: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
}

impl MatroidConstraint {
    /// Groups as index lists covering `0..m`; the uniform case is a single
    /// group with cap `k`.
    pub fn groups_and_caps(&self, m: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
        match self {
            MatroidConstraint::Uniform { k } => (vec![(0..m).collect()], vec![*k]),
            MatroidConstraint::Partition { groups, caps } => (groups.clone(), caps.clone()),
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        match self {
            MatroidConstraint::Uniform { k } => {
                if *k == 0 || *k > m {
                    return Err(Error::invalid(format!("budget k={k} outside 1..={m}")));
                }
            }
            MatroidConstraint::Partition { groups, caps } => {
                if groups.len() != caps.len() {
                    return Err(Error::invalid("one cap per group required"));
                }
                let mut owner = vec![None; m];
                for (g, group) in groups.iter().enumerate() {
                    for &i in group {
                        if i >= m {
                            return Err(Error::invalid(format!(
                                "group {g} mentions set index {i} outside 0..{m}"
                            )));
                        }
                        if owner[i].is_some() {
                            return Err(Error::invalid(format!(
                                "set index {i} appears in more than one group"
                            )));
                        }
                        owner[i] = Some(g);
                    }
                }
                if owner.iter().any(Option::is_none) {
                    return Err(Error::invalid("groups must partition all set indices"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCoverageInstance {
    n: usize,
    weights: Vec<Vec<Rat>>,
    ell: u32,
    constraint: MatroidConstraint,
}

impl WeightedCoverageInstance {
    /// Weights must be a non-empty rectangular `m x n` matrix of
    /// nonnegative rationals.  Negative weights are rejected: the top-`ell`
    /// objective and the LP relaxation both assume monotonicity.
    pub fn new(
        n: usize,
        weights: Vec<Vec<Rat>>,
        ell: u32,
        constraint: MatroidConstraint,
    ) -> Result<Self> {
        if ell == 0 {
            return Err(Error::invalid("ell must be at least 1"));
        }
        let m = weights.len();
        if m == 0 {
            return Err(Error::invalid("need at least one candidate set"));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "weight row {i} has length {} but n={n}",
                    row.len()
                )));
            }
            if row.iter().any(|w| w.is_negative()) {
                return Err(Error::invalid(format!(
                    "weight row {i} has a negative entry"
                )));
            }
        }
        constraint.validate(m)?;
        Ok(WeightedCoverageInstance {
            n,
            weights,
            ell,
            constraint,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn weights(&self) -> &[Vec<Rat>] {
        &self.weights
    }

    pub fn weight(&self, i: usize, e: usize) -> &Rat {
        &self.weights[i][e]
    }

    pub fn constraint(&self) -> &MatroidConstraint {
        &self.constraint
    }
}

/// An integral selection together with its objective value.  The value is
/// an integer-valued rational for unweighted instances and a general
/// rational for weighted ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralSolution {
    /// Selected set indices, ascending.
    pub selected: Vec<usize>,
    pub value: Rat,
}

/// Rejects out-of-range or repeated indices; `s` is otherwise order-free.
fn check_index_set(s: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    for &i in s {
        if i >= m {
            return Err(Error::invalid(format!("set index {i} outside 0..{m}")));
        }
        if seen[i] {
            return Err(Error::invalid(format!(
                "set index {i} repeated in selection"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `sum_e min(ell, #{i in S : e in T_i})`, exactly.
pub fn coverage_value(inst: &CoverageInstance, s: &[usize]) -> Result<u64> {
    check_index_set(s, inst.m())?;
    let mut counts = vec![0u32; inst.n];
    for &i in s {
        for &e in inst.set(i) {
            counts[e] += 1;
        }
    }
    Ok(counts.iter().map(|&c| u64::from(c.min(inst.ell))).sum())
}

/// True when `s` is a set of in-range indices that respects the matroid.
pub fn is_feasible(constraint: &MatroidConstraint, s: &[usize], m: usize) -> bool {
    let mut seen = vec![false; m];
    for &i in s {
        if i >= m || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    match constraint {
        MatroidConstraint::Uniform { k } => s.len() <= *k,
        MatroidConstraint::Partition { groups, caps } => groups
            .iter()
            .zip(caps)
            .all(|(group, cap)| group.iter().filter(|&&i| seen[i]).count() <= *cap),
    }
}

/// Each element contributes the sum of its `min(ell, |S|)` largest selected
/// weights.  Exact rational result; infeasible selections are rejected.
pub fn weighted_coverage_value(inst: &WeightedCoverageInstance, s: &[usize]) -> Result<Rat> {
    check_index_set(s, inst.m())?;
    if !is_feasible(inst.constraint(), s, inst.m()) {
        return Err(Error::ConstraintViolation(
            "selection violates the matroid constraint".into(),
        ));
    }
    let take = (inst.ell as usize).min(s.len());
    let mut total = Rat::zero();
    let mut column: Vec<&Rat> = Vec::with_capacity(s.len());
    for e in 0..inst.n {
        column.clear();
        column.extend(s.iter().map(|&i| inst.weight(i, e)));
        column.sort_by(|a, b| b.cmp(a));
        for w in column.iter().take(take) {
            total += *w;
        }
    }
    Ok(total)
}

/// Serializes any value as JSON with deterministically sorted object keys.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("JSON serialization cannot fail here");
    serde_json::to_string_pretty(&v).expect("JSON encoding cannot fail here")
}

#[derive(Serialize, Deserialize)]
struct RawCoverage {
    ell: u32,
    k: usize,
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl Serialize for CoverageInstance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawCoverage {
            ell: self.ell,
            k: self.k,
            n: self.n,
            sets: self.sets.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoverageInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCoverage::deserialize(deserializer)?;
        CoverageInstance::new(raw.n, raw.sets, raw.k, raw.ell).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawConstraint {
    Uniform {
        k: usize,
    },
    Partition {
        groups: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
}

#[derive(Serialize, Deserialize)]
struct RawWeighted {
    constraint: RawConstraint,
    ell: u32,
    n: usize,
    weights: Vec<Vec<serde_json::Value>>,
}

impl Serialize for WeightedCoverageInstance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let weights = self
            .weights
            .iter()
            .map(|row| {
                row.iter()
                    .map(|w| serde_json::Value::String(rat_to_string(w)))
                    .collect()
            })
            .collect();
        let constraint = match &self.constraint {
            MatroidConstraint::Uniform { k } => RawConstraint::Uniform { k: *k },
            MatroidConstraint::Partition { groups, caps } => RawConstraint::Partition {
                groups: groups.clone(),
                caps: caps.clone(),
            },
        };
        RawWeighted {
            constraint,
            ell: self.ell,
            n: self.n,
            weights,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightedCoverageInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawWeighted::deserialize(deserializer)?;
        let weights = raw
            .weights
            .iter()
            .map(|row| row.iter().map(rat_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let constraint = match raw.constraint {
            RawConstraint::Uniform { k } => MatroidConstraint::Uniform { k },
            RawConstraint::Partition { groups, caps } => {
                MatroidConstraint::Partition { groups, caps }
            }
        };
        WeightedCoverageInstance::new(raw.n, weights, raw.ell, constraint).map_err(D::Error::custom)
    }
}
