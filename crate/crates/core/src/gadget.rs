//! Partitioning-system gadgets and hardness-instance assembly.
//!
//! A partitioning system over a ground set `[n_hat]` holds `s` families of
//! `h` equal-size blocks; every family covers each element exactly `ell`
//! times (condition 1), while any cross-family selection of one block per
//! family from `t` families must `ell`-cover at most
//! `(psi(ell, t, h) + eta) * n_hat` (condition 2): no clever combination
//! beats what independent random blocks would achieve, up to slack `eta`.
//!
//! Generation samples each family as a random equi-sized `ell`-cover and
//! certifies condition (2) by exhaustive enumeration, retrying on failure.
//! The sampler shuffles `ell` copies of `[n_hat]` into `h` blocks, then
//! repairs duplicate entries by swapping them into other blocks (each swap
//! strictly reduces the number of duplicates).  Rejecting whole shuffles
//! instead would succeed with probability about
//! `exp(-n_hat * ell * (ell-1) / (2h))`, hopeless beyond toy sizes.
//!
//! Verified systems plug into [`build_hardness_instance`], which turns a
//! hypergraph label-cover instance into a coverage instance: one disjoint
//! copy of `[n_hat]` per hyperedge, one candidate set per (vertex, label)
//! pair.  A labeling that satisfies an edge picks one whole family there
//! (exactly `ell * n_hat` coverage); condition (2) caps what any selection
//! harvests from unsatisfied edges.

use crate::combinatorics::psi_exact;
use crate::error::{Error, Result};
use crate::model::CoverageInstance;
use crate::rational::{rat_from_json, rat_to_string, rat_usize, Rat};
use crate::rng::SplitMix64;
use num::traits::Signed;
use num::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `s` families of `h` blocks over `[n_hat]`; see the module docs.
/// Structural invariants (equal block sizes, exact `ell`-covers) are
/// enforced at construction; condition (2) is [`verify_partition_system`]'s
/// job and is *not* implied by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitioningSystem {
    n_hat: usize,
    h: u32,
    s: u32,
    ell: u32,
    eta: Rat,
    families: Vec<Vec<Vec<usize>>>,
}

impl PartitioningSystem {
    pub fn new(
        n_hat: usize,
        h: u32,
        s: u32,
        ell: u32,
        eta: Rat,
        families: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if ell == 0 || h < ell {
            return Err(Error::invalid(format!(
                "need h >= ell >= 1, got h={h}, ell={ell}"
            )));
        }
        if n_hat == 0 {
            return Err(Error::invalid("ground set must be nonempty"));
        }
        if !eta.is_positive() {
            return Err(Error::invalid("slack eta must be positive"));
        }
        let (bn, bd) = (ell as usize * n_hat, h as usize);
        if bn % bd != 0 {
            return Err(Error::invalid(format!("h={h} must divide ell*n_hat={bn}")));
        }
        let block = bn / bd;
        if families.len() != s as usize {
            return Err(Error::invalid(format!(
                "expected {s} families, got {}",
                families.len()
            )));
        }
        for (i, family) in families.iter().enumerate() {
            if family.len() != h as usize {
                return Err(Error::invalid(format!(
                    "family {i} has {} blocks, expected {h}",
                    family.len()
                )));
            }
            let mut cover = vec![0u32; n_hat];
            for (j, set) in family.iter().enumerate() {
                if set.len() != block {
                    return Err(Error::invalid(format!(
                        "family {i} block {j} has size {}, expected {block}",
                        set.len()
                    )));
                }
                let mut prev = None;
                for &e in set {
                    if e >= n_hat {
                        return Err(Error::invalid(format!(
                            "family {i} block {j} mentions element {e} outside the ground set"
                        )));
                    }
                    if prev.is_some_and(|p| p >= e) {
                        return Err(Error::invalid(format!(
                            "family {i} block {j} must be strictly increasing"
                        )));
                    }
                    prev = Some(e);
                    cover[e] += 1;
                }
            }
            if let Some(e) = cover.iter().position(|&c| c != ell) {
                return Err(Error::ConstraintViolation(format!(
                    "family {i} covers element {e} {} times, expected {ell}",
                    cover[e]
                )));
            }
        }
        Ok(Self {
            n_hat,
            h,
            s,
            ell,
            eta,
            families,
        })
    }

    pub fn n_hat(&self) -> usize {
        self.n_hat
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn eta(&self) -> &Rat {
        &self.eta
    }

    pub fn block_size(&self) -> usize {
        self.ell as usize * self.n_hat / self.h as usize
    }

    pub fn block(&self, family: usize, j: usize) -> &[usize] {
        &self.families[family][j]
    }
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    n_hat: usize,
    h: u32,
    s: u32,
    ell: u32,
    eta: serde_json::Value,
    families: Vec<Vec<Vec<usize>>>,
}

impl Serialize for PartitioningSystem {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        RawSystem {
            n_hat: self.n_hat,
            h: self.h,
            s: self.s,
            ell: self.ell,
            eta: serde_json::Value::String(rat_to_string(&self.eta)),
            families: self.families.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PartitioningSystem {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSystem::deserialize(de)?;
        let eta = rat_from_json(&raw.eta).map_err(D::Error::custom)?;
        PartitioningSystem::new(raw.n_hat, raw.h, raw.s, raw.ell, eta, raw.families)
            .map_err(D::Error::custom)
    }
}

fn find_duplicate(blocks: &[Vec<usize>], n_hat: usize) -> Option<(usize, usize)> {
    let mut seen = vec![false; n_hat];
    for (j, block) in blocks.iter().enumerate() {
        seen.iter_mut().for_each(|v| *v = false);
        for (p, &e) in block.iter().enumerate() {
            if seen[e] {
                return Some((j, p));
            }
            seen[e] = true;
        }
    }
    None
}

/// Swaps the duplicate occurrence `blocks[j][p]` with some entry of another
/// block so that neither block ends up with a repeated element.  Such a
/// swap strictly reduces the total duplicate count.
fn repair_swap(g: &mut SplitMix64, blocks: &mut [Vec<usize>], j: usize, p: usize) -> bool {
    let e = blocks[j][p];
    let b = blocks[j].len();
    let total = blocks.len() * b;
    let admissible = |blocks: &[Vec<usize>], j2: usize, q: usize| {
        let y = blocks[j2][q];
        j2 != j && y != e && !blocks[j2].contains(&e) && !blocks[j].contains(&y)
    };
    for _ in 0..200 {
        let r = g.below(total as u64) as usize;
        let (j2, q) = (r / b, r % b);
        if admissible(blocks, j2, q) {
            blocks[j][p] = blocks[j2][q];
            blocks[j2][q] = e;
            return true;
        }
    }
    for j2 in 0..blocks.len() {
        for q in 0..b {
            if admissible(blocks, j2, q) {
                blocks[j][p] = blocks[j2][q];
                blocks[j2][q] = e;
                return true;
            }
        }
    }
    false
}

/// One uniformly shuffled `ell`-cover of `[n_hat]` into `h` equal blocks,
/// with duplicates swapped away.  `None` when the repair stalls (only
/// possible in degenerate corner cases; callers resample).
fn sample_family(
    g: &mut SplitMix64,
    n_hat: usize,
    h: usize,
    ell: usize,
) -> Option<Vec<Vec<usize>>> {
    let b = ell * n_hat / h;
    'resample: for _ in 0..64 {
        let mut pool: Vec<usize> = Vec::with_capacity(ell * n_hat);
        for _ in 0..ell {
            pool.extend(0..n_hat);
        }
        g.shuffle(&mut pool);
        let mut blocks: Vec<Vec<usize>> = pool.chunks(b).map(<[usize]>::to_vec).collect();
        let mut budget = 4 * ell * n_hat + 64;
        loop {
            let Some((j, p)) = find_duplicate(&blocks, n_hat) else {
                for block in &mut blocks {
                    block.sort_unstable();
                }
                return Some(blocks);
            };
            if budget == 0 || !repair_swap(g, &mut blocks, j, p) {
                continue 'resample;
            }
            budget -= 1;
        }
    }
    None
}

/// Samples families until [`verify_partition_system`] accepts, or fails
/// after `max_tries` whole-system attempts reporting the best slack seen.
pub fn generate_partition_system(
    n_hat: usize,
    h: u32,
    s: u32,
    ell: u32,
    eta: &Rat,
    seed: u64,
    max_tries: u64,
) -> Result<PartitioningSystem> {
    if !(1 <= ell && ell <= h && h <= s) {
        return Err(Error::invalid(format!(
            "need s >= h >= ell >= 1, got s={s}, h={h}, ell={ell}"
        )));
    }
    if max_tries == 0 {
        return Err(Error::invalid("max_tries must be positive"));
    }
    let mut g = SplitMix64::new(seed);
    let mut best_eta: Option<Rat> = None;
    for try_no in 1..=max_tries {
        let families: Vec<Vec<Vec<usize>>> = if h == ell {
            // Block size n_hat forces every block to be the whole ground
            // set; the unique valid system is deterministic.
            vec![vec![(0..n_hat).collect(); h as usize]; s as usize]
        } else {
            let mut fams = Vec::with_capacity(s as usize);
            for _ in 0..s {
                match sample_family(&mut g, n_hat, h as usize, ell as usize) {
                    Some(f) => fams.push(f),
                    None => {
                        return Err(Error::GenerationFailure {
                            tries: try_no,
                            best_eta: "none (block repair stalled)".into(),
                            requested_eta: rat_to_string(eta),
                        })
                    }
                }
            }
            fams
        };
        let sys = PartitioningSystem::new(n_hat, h, s, ell, eta.clone(), families)?;
        let report = verify_partition_system(&sys)?;
        if report.ok {
            return Ok(sys);
        }
        if best_eta.as_ref().is_none_or(|b| report.required_eta < *b) {
            best_eta = Some(report.required_eta);
        }
    }
    Err(Error::GenerationFailure {
        tries: max_tries,
        best_eta: best_eta.map_or_else(|| "none".into(), |b| rat_to_string(&b)),
        requested_eta: rat_to_string(eta),
    })
}

/// Verification verdict.  `required_eta` is the smallest slack under which
/// condition (2) would hold; the system passes iff it is at most `eta`.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub ok: bool,
    /// Worst condition-(2) excess in units of `n_hat`.
    pub required_eta: Rat,
    /// Description of the worst violation when not ok.
    pub worst_violation: Option<String>,
    /// The violating choice as (family, block) pairs.
    pub witness: Option<Vec<(usize, usize)>>,
}

struct Enumerator<'a> {
    sys: &'a PartitioningSystem,
    counts: Vec<u32>,
    coverage: u64,
    picks: Vec<(usize, usize)>,
    /// Best coverage seen per selection size `t`, with a witness each.
    max_c: Vec<u64>,
    argmax: Vec<Vec<(usize, usize)>>,
}

impl Enumerator<'_> {
    fn run(&mut self, family: usize) {
        if family == self.sys.s as usize {
            let t = self.picks.len();
            if self.coverage > self.max_c[t] {
                self.max_c[t] = self.coverage;
                self.argmax[t] = self.picks.clone();
            }
            return;
        }
        self.run(family + 1);
        let ell = self.sys.ell;
        for j in 0..self.sys.h as usize {
            for idx in 0..self.sys.families[family][j].len() {
                let e = self.sys.families[family][j][idx];
                if self.counts[e] < ell {
                    self.coverage += 1;
                }
                self.counts[e] += 1;
            }
            self.picks.push((family, j));
            self.run(family + 1);
            self.picks.pop();
            for idx in 0..self.sys.families[family][j].len() {
                let e = self.sys.families[family][j][idx];
                self.counts[e] -= 1;
                if self.counts[e] < ell {
                    self.coverage -= 1;
                }
            }
        }
    }
}

/// Exhaustively checks both defining conditions.  Guarded to `s <= 8`,
/// `h <= 5` since the choice enumeration has `(h+1)^s` leaves.
pub fn verify_partition_system(sys: &PartitioningSystem) -> Result<VerifyReport> {
    if sys.s > 8 || sys.h > 5 {
        return Err(Error::TooLarge(format!(
            "verification enumerates (h+1)^s choices; s={} h={} exceeds s<=8, h<=5",
            sys.s, sys.h
        )));
    }
    // Condition (1) holds by construction; re-check defensively.
    let block = sys.block_size();
    for (i, family) in sys.families.iter().enumerate() {
        let mut cover = vec![0u32; sys.n_hat];
        for set in family {
            for &e in set {
                cover[e] += 1;
            }
        }
        if family.iter().any(|set| set.len() != block) || cover.iter().any(|&c| c != sys.ell) {
            return Ok(VerifyReport {
                ok: false,
                required_eta: Rat::zero(),
                worst_violation: Some(format!("family {i} is not an exact {}-cover", sys.ell)),
                witness: None,
            });
        }
    }
    let psi: Vec<Rat> = (0..=sys.s)
        .map(|t| psi_exact(sys.ell, t, sys.h))
        .collect::<Result<_>>()?;
    let mut en = Enumerator {
        sys,
        counts: vec![0; sys.n_hat],
        coverage: 0,
        picks: Vec::new(),
        max_c: vec![0; sys.s as usize + 1],
        argmax: vec![Vec::new(); sys.s as usize + 1],
    };
    en.run(0);
    let n_hat = rat_usize(sys.n_hat);
    let mut required = Rat::zero();
    let mut worst: Option<(Rat, usize)> = None;
    for (t, psi_t) in psi.iter().enumerate() {
        let excess = (rat_usize(en.max_c[t] as usize) - psi_t * &n_hat) / &n_hat;
        if excess > required {
            required = excess.clone();
        }
        let overshoot = &excess - &sys.eta;
        if overshoot.is_positive() && worst.as_ref().is_none_or(|(w, _)| overshoot > *w) {
            worst = Some((overshoot, t));
        }
    }
    match worst {
        None => Ok(VerifyReport {
            ok: true,
            required_eta: required,
            worst_violation: None,
            witness: None,
        }),
        Some((_, t)) => Ok(VerifyReport {
            ok: false,
            required_eta: required,
            worst_violation: Some(format!(
                "choosing one block from each of {t} families covers {} > ({} + {}) * {}",
                en.max_c[t],
                rat_to_string(&psi[t]),
                rat_to_string(&sys.eta),
                sys.n_hat,
            )),
            witness: Some(en.argmax[t].clone()),
        }),
    }
}

/// Hypergraph label-cover input: `h`-uniform hyperedges over vertices, an
/// alphabet of size `s`, and one alphabet permutation per (edge, incident
/// vertex).  An edge is strongly satisfied by a labeling when all its
/// projected labels agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperUgInstance {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    alphabet: u32,
    projections: Vec<Vec<Vec<u32>>>,
    allow_irregular: bool,
}

impl HyperUgInstance {
    pub fn new(
        num_vertices: usize,
        edges: Vec<Vec<usize>>,
        alphabet: u32,
        projections: Vec<Vec<Vec<u32>>>,
        allow_irregular: bool,
    ) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::invalid("need at least one vertex"));
        }
        if alphabet == 0 {
            return Err(Error::invalid("alphabet must be nonempty"));
        }
        if projections.len() != edges.len() {
            return Err(Error::invalid("one projection tuple per edge required"));
        }
        let arity = edges.first().map(Vec::len);
        let mut degree = vec![0usize; num_vertices];
        for (idx, edge) in edges.iter().enumerate() {
            if edge.is_empty() || Some(edge.len()) != arity {
                return Err(Error::invalid(format!(
                    "edge {idx} has arity {}, expected {}",
                    edge.len(),
                    arity.unwrap_or(1)
                )));
            }
            let mut seen = vec![false; num_vertices];
            for &v in edge {
                if v >= num_vertices {
                    return Err(Error::invalid(format!(
                        "edge {idx} mentions vertex {v} outside 0..{num_vertices}"
                    )));
                }
                if seen[v] {
                    return Err(Error::invalid(format!("edge {idx} repeats vertex {v}")));
                }
                seen[v] = true;
                degree[v] += 1;
            }
            if projections[idx].len() != edge.len() {
                return Err(Error::invalid(format!(
                    "edge {idx} needs {} projections",
                    edge.len()
                )));
            }
            for (slot, pi) in projections[idx].iter().enumerate() {
                let mut hit = vec![false; alphabet as usize];
                if pi.len() != alphabet as usize {
                    return Err(Error::invalid(format!(
                        "edge {idx} slot {slot}: projection must list all {alphabet} letters"
                    )));
                }
                for &a in pi {
                    if a >= alphabet || hit[a as usize] {
                        return Err(Error::invalid(format!(
                            "edge {idx} slot {slot}: projection is not a permutation"
                        )));
                    }
                    hit[a as usize] = true;
                }
            }
        }
        if !allow_irregular && !edges.is_empty() {
            let d = degree[0];
            if degree.iter().any(|&dv| dv != d) {
                return Err(Error::ConstraintViolation(
                    "hypergraph is not vertex-regular (pass allow_irregular to waive)".into(),
                ));
            }
        }
        Ok(Self {
            num_vertices,
            edges,
            alphabet,
            projections,
            allow_irregular,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// Hyperedge arity, or `None` for an edgeless instance.
    pub fn arity(&self) -> Option<usize> {
        self.edges.first().map(Vec::len)
    }

    pub fn projection(&self, edge: usize, slot: usize) -> &[u32] {
        &self.projections[edge][slot]
    }

    /// Per-edge strong satisfaction: all projected labels agree.
    pub fn strongly_satisfied(&self, labeling: &[u32]) -> Result<Vec<bool>> {
        if labeling.len() != self.num_vertices {
            return Err(Error::invalid("one label per vertex required"));
        }
        if labeling.iter().any(|&b| b >= self.alphabet) {
            return Err(Error::invalid("label outside the alphabet"));
        }
        Ok(self
            .edges
            .iter()
            .zip(&self.projections)
            .map(|(edge, pis)| {
                let mut target = None;
                edge.iter().zip(pis).all(|(&v, pi)| {
                    let a = pi[labeling[v] as usize];
                    match target {
                        None => {
                            target = Some(a);
                            true
                        }
                        Some(t) => t == a,
                    }
                })
            })
            .collect())
    }
}

#[derive(Serialize, Deserialize)]
struct RawUg {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    alphabet: u32,
    projections: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    allow_irregular: bool,
}

impl Serialize for HyperUgInstance {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        RawUg {
            num_vertices: self.num_vertices,
            edges: self.edges.clone(),
            alphabet: self.alphabet,
            projections: self.projections.clone(),
            allow_irregular: self.allow_irregular,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HyperUgInstance {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawUg::deserialize(de)?;
        HyperUgInstance::new(
            raw.num_vertices,
            raw.edges,
            raw.alphabet,
            raw.projections,
            raw.allow_irregular,
        )
        .map_err(D::Error::custom)
    }
}

/// A hardness instance plus the bookkeeping to interpret selections.
#[derive(Debug, Clone)]
pub struct HardnessInstance {
    pub instance: CoverageInstance,
    /// `label_map[v][beta]` is the candidate-set index of (vertex, label).
    pub label_map: Vec<Vec<usize>>,
    /// Advisory notes; empty means no caveats.
    pub warnings: Vec<String>,
}

/// Assembles the coverage instance: one disjoint gadget copy per edge,
/// one candidate set per (vertex, label), budget `k = |V|`.  Within edge
/// `e`, the label `beta` of the vertex in slot `j` contributes block `j`
/// of the family its projection selects.
pub fn build_hardness_instance(
    ug: &HyperUgInstance,
    sys: &PartitioningSystem,
) -> Result<HardnessInstance> {
    if let Some(arity) = ug.arity() {
        if arity != sys.h() as usize {
            return Err(Error::invalid(format!(
                "edge arity {arity} must equal the gadget's h = {}",
                sys.h()
            )));
        }
    }
    if ug.alphabet() != sys.s() {
        return Err(Error::invalid(format!(
            "alphabet {} must equal the gadget's s = {}",
            ug.alphabet(),
            sys.s()
        )));
    }
    let mut warnings = Vec::new();
    if (ug.alphabet() as usize) < 2 * sys.h() as usize {
        warnings.push(format!(
            "alphabet {} is below 2h = {}; soundness arguments assume larger alphabets",
            ug.alphabet(),
            2 * sys.h()
        ));
    }
    let s = ug.alphabet() as usize;
    let n_hat = sys.n_hat();
    let n = ug.edges().len() * n_hat;
    let mut sets = vec![Vec::new(); ug.num_vertices() * s];
    for (e, edge) in ug.edges().iter().enumerate() {
        let offset = e * n_hat;
        for (j, &v) in edge.iter().enumerate() {
            let pi = ug.projection(e, j);
            for beta in 0..s {
                let family = pi[beta] as usize;
                let target = &mut sets[v * s + beta];
                target.extend(sys.block(family, j).iter().map(|&x| offset + x));
            }
        }
    }
    let instance = CoverageInstance::new(n, sets, ug.num_vertices(), sys.ell())?;
    let label_map = (0..ug.num_vertices())
        .map(|v| (0..s).map(|beta| v * s + beta).collect())
        .collect();
    Ok(HardnessInstance {
        instance,
        label_map,
        warnings,
    })
}

/// Experimental decoding: read each vertex's candidate labels off the
/// selection and pick one uniformly; `None` for vertices with no labels.
pub fn decode_labeling(
    ug: &HyperUgInstance,
    selected: &[usize],
    seed: u64,
) -> Result<Vec<Option<u32>>> {
    let s = ug.alphabet() as usize;
    let mut lists = vec![Vec::new(); ug.num_vertices()];
    for &idx in selected {
        if idx >= ug.num_vertices() * s {
            return Err(Error::invalid(format!(
                "set index {idx} does not name a (vertex, label) pair"
            )));
        }
        lists[idx / s].push((idx % s) as u32);
    }
    let mut g = SplitMix64::new(seed);
    Ok(lists
        .into_iter()
        .map(|mut list| {
            list.sort_unstable();
            list.dedup();
            if list.is_empty() {
                None
            } else {
                Some(list[g.below(list.len() as u64) as usize])
            }
        })
        .collect())
}
