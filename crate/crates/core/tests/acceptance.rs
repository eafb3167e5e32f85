//! Acceptance suite: one test per end-to-end contract the library makes,
//! covering the solve pipeline, the supporting analysis functions, the
//! gadget machinery, and the channel reduction.  Each test prints a
//! summary line; run with `--nocapture` to see them.

use std::time::Instant;

use multicover::baselines::{brute_force, gen_duplicated, gen_random, greedy};
use multicover::channels::{
    best_code, channel_to_instance, code_success_probability, gen_random_channel,
    simulate_decoding, SearchMethod,
};
use multicover::combinatorics::{
    binomial_shortfall, checked_binomial, convex_order_gap, expect_binomial, expect_poisson,
    psi_exact, psi_tilde, rho, truncated_mean, ConvexTestFn, TruncatedDist,
};
use multicover::gadget::{
    build_hardness_instance, generate_partition_system, verify_partition_system, HyperUgInstance,
    PartitioningSystem,
};
use multicover::lp::{build_lp, solve_lp, CapValues};
use multicover::model::{
    coverage_value, is_feasible, weighted_coverage_value, CoverageInstance, MatroidConstraint,
    WeightedCoverageInstance,
};
use multicover::multilinear::{element_expectation, multilinear_value};
use multicover::pipage::{solve, solve_weighted, SolveOutcome};
use multicover::rational::{rat, rat_int, rat_to_f64, Rat};
use multicover::rng::SplitMix64;
use num::{One, Signed, Zero};

fn pass(criterion: u32, msg: &str) {
    println!("[criterion {criterion:02}] PASS {msg}");
}

/// The shared seeded family: 200 instances with n <= 12, m <= 10, k <= 5,
/// ell in {1,2,3}, mixed densities.
fn seeded_instances() -> Vec<CoverageInstance> {
    let mut g = SplitMix64::new(0xACCE_5EED);
    (0..200)
        .map(|_| {
            let n = 4 + g.below(9) as usize;
            let m = 2 + g.below(9) as usize;
            let k = 1 + g.below(m.min(5) as u64) as usize;
            let ell = 1 + g.below(3) as u32;
            let density = 0.2 + 0.6 * g.unit_f64();
            gen_random(g.next_u64(), n, m, k, ell, density).expect("parameters are in range")
        })
        .collect()
}

#[test]
fn criterion_01_rounding_clears_rho_of_optimum() {
    let start = Instant::now();
    let mut worst_ratio = f64::INFINITY;
    for (idx, inst) in seeded_instances().iter().enumerate() {
        let out = solve(inst).expect("pipeline");
        let opt = brute_force(inst).expect("brute force");
        let r = rho(inst.ell()).unwrap();
        assert!(
            out.solution.value <= opt.value,
            "instance {idx}: rounded value exceeds the optimum"
        );
        let value = rat_to_f64(&out.solution.value);
        let best = rat_to_f64(&opt.value);
        assert!(
            value >= r * best,
            "instance {idx}: value {value} below rho * OPT = {}",
            r * best
        );
        assert!(
            value >= r * rat_to_f64(&out.lp_value) - 1e-9,
            "instance {idx}: value {value} below rho * LP"
        );
        if best > 0.0 {
            worst_ratio = worst_ratio.min(value / best);
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:.2?}, budget is 60 s");
    pass(
        1,
        &format!("200 instances: value >= rho*OPT and >= rho*LP - 1e-9 (worst value/OPT {worst_ratio:.4}, {dt:.2?})"),
    );
}

#[test]
fn criterion_02_per_element_credits_are_covered() {
    let mut elements = 0usize;
    for (idx, inst) in seeded_instances().iter().enumerate() {
        let sol = solve_lp(&build_lp(inst)).expect("relaxation");
        let r = rho(inst.ell()).unwrap();
        let CapValues::PerElement(credits) = &sol.caps else {
            panic!("unweighted relaxation carries one credit per element");
        };
        let xf: Vec<f64> = sol.x.iter().map(rat_to_f64).collect();
        for (e, owners) in inst.incidence().iter().enumerate() {
            let probs: Vec<f64> = owners.iter().map(|&i| xf[i]).collect();
            let expect = element_expectation(&probs, inst.ell()).unwrap();
            assert!(
                expect >= r * rat_to_f64(&credits[e]) - 1e-9,
                "instance {idx} element {e}: expectation {expect} below rho * credit"
            );
            elements += 1;
        }
    }
    pass(
        2,
        &format!("per-element expectation >= rho * LP credit - 1e-9 on {elements} elements"),
    );
}

#[test]
fn criterion_03_rho_constants_and_identities() {
    let start = Instant::now();
    assert!((rho(1).unwrap() - 0.632_120_558_8).abs() < 5e-10);
    assert!((rho(2).unwrap() - 0.729_329_433_5).abs() < 5e-10);
    assert!((rho(1).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    assert!((rho(2).unwrap() - (1.0 - 2.0 * (-2.0f64).exp())).abs() < 1e-12);
    for ell in 1..=30u32 {
        let l = f64::from(ell);
        let cap = ell as usize;
        // Poisson(l) pmf over 0..=cap via the stable term recurrence.
        let mut pmf = vec![(-l).exp()];
        for m in 1..=cap {
            let next = pmf[m - 1] * l / m as f64;
            pmf.push(next);
        }
        let shortfall: f64 = (0..cap).map(|m| (l - m as f64) / l * pmf[m]).sum();
        let closed = 1.0 - shortfall;
        let mut cum = 0.0;
        let mut tails = 0.0;
        for m in 1..=cap {
            cum += pmf[m - 1];
            tails += 1.0 - cum;
        }
        let tail_sum = tails / l;
        let truncated = truncated_mean(&TruncatedDist::Poisson { rate: l }, ell).unwrap() / l;
        let r = rho(ell).unwrap();
        for (name, v) in [
            ("closed form", closed),
            ("tail sum", tail_sum),
            ("truncated mean", truncated),
        ] {
            assert!((v - r).abs() <= 1e-12, "ell={ell}: rho {r} vs {name} {v}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:.2?}, budget is 1 s");
    pass(
        3,
        &format!("rho digits match and three expressions agree to 1e-12 for ell <= 30 ({dt:.2?})"),
    );
}

#[test]
fn criterion_04_binomial_poisson_convex_order() {
    let start = Instant::now();
    let mut cases = 0u32;
    for f in ConvexTestFn::catalog() {
        for trials in 1..=20u64 {
            for step in 1..=20u64 {
                let p = step as f64 * 0.05;
                let gap = convex_order_gap(trials, p, &f).unwrap();
                assert!(gap >= -1e-12, "{} N={trials} p={p}: gap {gap}", f.id());
                cases += 1;
            }
        }
    }
    // Bernoulli vs Poisson closed forms at N = 1 for |x - a| with 0 < a < 1.
    for a in [0.25, 0.5, 0.75] {
        let f = ConvexTestFn::Abs { a };
        for step in 1..=20u64 {
            let p = step as f64 * 0.05;
            let bernoulli = expect_binomial(1, p, &f);
            let poisson = expect_poisson(p, &f);
            assert!(
                (bernoulli - (p + a - 2.0 * a * p)).abs() <= 1e-12,
                "a={a} p={p}: Bernoulli closed form"
            );
            assert!(
                (poisson - (2.0 * a * (-p).exp() + p - a)).abs() <= 1e-12,
                "a={a} p={p}: Poisson closed form"
            );
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {dt:.2?}, budget is 5 s");
    pass(
        4,
        &format!("gap >= -1e-12 on {cases} catalog cases, N=1 closed forms to 1e-12 ({dt:.2?})"),
    );
}

fn binom_rat(n: u32, k: u32) -> Rat {
    rat_int(checked_binomial(u64::from(n), u64::from(k)).expect("small binomial") as i64)
}

#[test]
fn criterion_05_shortfall_and_psi_shape() {
    let start = Instant::now();
    // Expected unmet demand: nonincreasing and convex on a dense grid.
    for s in 0..=10u32 {
        for t in 0..=10u32 {
            let vals: Vec<f64> = (0..1000)
                .map(|i| binomial_shortfall(s, t, i as f64 / 999.0).unwrap())
                .collect();
            for (i, w) in vals.windows(2).enumerate() {
                assert!(w[1] - w[0] <= 1e-12, "shortfall s={s} t={t} rises at {i}");
            }
            for (i, w) in vals.windows(3).enumerate() {
                assert!(
                    w[2] - 2.0 * w[1] + w[0] >= -1e-12,
                    "shortfall s={s} t={t} concave at {i}"
                );
            }
        }
    }
    // psi: increasing, marginal equal to (ell/h) Pr[Bin(x, ell/h) <= ell-1]
    // exactly, and diminishing marginals.
    for ell in 1..=8u32 {
        for h in ell..=8u32 {
            let p = rat(i64::from(ell), i64::from(h));
            let q = Rat::one() - &p;
            let mut prev: Option<Rat> = None;
            for x in 0..=40u32 {
                let marginal = psi_exact(ell, x + 1, h).unwrap() - psi_exact(ell, x, h).unwrap();
                assert!(
                    !marginal.is_negative(),
                    "psi decreased at ell={ell} h={h} x={x}"
                );
                let mut cdf = Rat::zero();
                for i in 0..=x.min(ell - 1) {
                    cdf += binom_rat(x, i)
                        * num::pow::pow(p.clone(), i as usize)
                        * num::pow::pow(q.clone(), (x - i) as usize);
                }
                assert_eq!(
                    marginal,
                    &p * &cdf,
                    "marginal closed form at ell={ell} h={h} x={x}"
                );
                if let Some(prev) = prev {
                    assert!(marginal <= prev, "marginals grew at ell={ell} h={h} x={x}");
                }
                prev = Some(marginal);
            }
        }
    }
    // Four-point concavity of the piecewise-linear extension.  Separated
    // quadruples keep the slope quotients well conditioned.
    let mut g = SplitMix64::new(0x51AE);
    for ell in 1..=8u32 {
        for h in ell..=8u32 {
            for _ in 0..50 {
                let xs = loop {
                    let mut xs: Vec<f64> = (0..4).map(|_| 40.0 * g.unit_f64()).collect();
                    xs.sort_by(f64::total_cmp);
                    if xs[1] - xs[0] >= 0.05 && xs[3] - xs[2] >= 0.05 {
                        break xs;
                    }
                };
                let lo = (psi_tilde(ell, xs[1], h).unwrap() - psi_tilde(ell, xs[0], h).unwrap())
                    / (xs[1] - xs[0]);
                let hi = (psi_tilde(ell, xs[3], h).unwrap() - psi_tilde(ell, xs[2], h).unwrap())
                    / (xs[3] - xs[2]);
                assert!(
                    lo >= hi - 1e-12,
                    "slope rose: ell={ell} h={h} xs={xs:?}: {lo} < {hi}"
                );
            }
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:.2?}, budget is 10 s");
    pass(
        5,
        &format!("shortfall shape, exact psi marginals, extension concavity all hold ({dt:.2?})"),
    );
}

#[test]
fn criterion_06_greedy_trails_rounding_on_duplicates() {
    // Base trap: greedy's first tie-break pick {1,2} blocks the exact cover
    // {0,1} + {2,3}.  Duplicating every set with ell = 2 makes greedy repeat
    // the mistake twice while the relaxation still sees the exact cover.
    let base = CoverageInstance::new(4, vec![vec![1, 2], vec![0, 1], vec![2, 3]], 2, 1).unwrap();
    let dup = gen_duplicated(&base, 2).unwrap();
    let opt = brute_force(&dup).unwrap();
    let run = greedy(&dup).unwrap();
    let out = solve(&dup).unwrap();
    assert_eq!(
        opt.value,
        rat_int(8),
        "duplicated optimum is the full cover"
    );
    assert_eq!(run.solution.value, rat_int(6), "greedy repeats the trap");
    let best = rat_to_f64(&opt.value);
    let greedy_ratio = rat_to_f64(&run.solution.value) / best;
    let solve_ratio = rat_to_f64(&out.solution.value) / best;
    assert!(
        greedy_ratio <= solve_ratio - 0.02,
        "greedy {greedy_ratio} not separated from solve {solve_ratio}"
    );
    assert!(
        solve_ratio >= rho(2).unwrap(),
        "solve ratio {solve_ratio} below rho(2)"
    );
    pass(
        6,
        &format!("greedy ratio {greedy_ratio:.3} vs solve ratio {solve_ratio:.3} >= rho(2), brute-force verified"),
    );
}

/// Exact-style enumeration of the extension with compensated summation.
fn enumerate_extension(inst: &CoverageInstance, x: &[f64]) -> f64 {
    let m = inst.m();
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut members: Vec<usize> = Vec::with_capacity(m);
    for mask in 0u32..(1u32 << m) {
        let mut p = 1.0;
        members.clear();
        for (i, &xi) in x.iter().enumerate() {
            if mask >> i & 1 == 1 {
                p *= xi;
                members.push(i);
            } else {
                p *= 1.0 - xi;
            }
        }
        if p == 0.0 {
            continue;
        }
        let term = p * coverage_value(inst, &members).unwrap() as f64;
        let y = term - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    total
}

#[test]
fn criterion_07_extension_matches_enumeration_and_sampling() {
    // Exhaustive agreement for m <= 15.
    for (seed, n, m, ell) in [
        (101u64, 6usize, 10usize, 1u32),
        (102, 8, 12, 2),
        (103, 5, 15, 3),
    ] {
        let inst = gen_random(seed, n, m, 1, ell, 0.4).unwrap();
        let mut g = SplitMix64::new(seed ^ 0xF00D);
        let x: Vec<f64> = (0..m).map(|_| g.unit_f64()).collect();
        let fast = multilinear_value(&inst, &x).unwrap();
        let direct = enumerate_extension(&inst, &x);
        assert!(
            (fast - direct).abs() <= 1e-12,
            "m={m}: extension {fast} vs enumeration {direct}"
        );
    }
    // Monte Carlo agreement at one million samples for m = 40.
    let inst = gen_random(104, 20, 40, 1, 2, 0.25).unwrap();
    let mut g = SplitMix64::new(0xCAFE);
    let x: Vec<f64> = (0..inst.m()).map(|_| g.unit_f64()).collect();
    let fast = multilinear_value(&inst, &x).unwrap();
    let samples = 1_000_000u64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut hits = vec![0u32; inst.n()];
    for _ in 0..samples {
        hits.fill(0);
        for (i, &xi) in x.iter().enumerate() {
            if g.unit_f64() < xi {
                for &e in inst.set(i) {
                    hits[e] += 1;
                }
            }
        }
        let v: u64 = hits.iter().map(|&c| u64::from(c.min(inst.ell()))).sum();
        sum += v as f64;
        sumsq += (v * v) as f64;
    }
    let mean = sum / samples as f64;
    let var = (sumsq / samples as f64 - mean * mean).max(0.0);
    let se = (var / samples as f64).sqrt();
    assert!(
        (mean - fast).abs() <= 4.0 * se,
        "Monte Carlo {mean} vs extension {fast} (4 SE = {})",
        4.0 * se
    );
    pass(
        7,
        "enumeration to 1e-12 at m <= 15; 1e6-sample estimate within 4 SE at m = 40",
    );
}

fn check_trace(out: &SolveOutcome, m: usize, label: &str) {
    assert!(
        out.steps.len() <= m.saturating_sub(1),
        "{label}: {} pipage steps on m={m}",
        out.steps.len()
    );
    let mut cur = out.fractional_value.clone();
    for step in &out.steps {
        assert_eq!(step.f_before, cur, "{label}: trace does not chain");
        assert!(
            step.f_after >= step.f_before,
            "{label}: extension decreased during rounding"
        );
        cur = step.f_after.clone();
    }
}

#[test]
fn criterion_08_rounding_traces_are_sound() {
    for (idx, inst) in seeded_instances().iter().enumerate() {
        let out = solve(inst).expect("pipeline");
        check_trace(&out, inst.m(), &format!("instance {idx}"));
        let cov = coverage_value(inst, &out.solution.selected).unwrap();
        assert_eq!(rat_int(cov as i64), out.solution.value);
        assert!(is_feasible(
            &MatroidConstraint::Uniform { k: inst.k() },
            &out.solution.selected,
            inst.m()
        ));
    }
    // Weighted instances under uniform and partition budgets.
    let mut g = SplitMix64::new(0x0B_EEF);
    for round in 0..50u32 {
        let n = 2 + g.below(7) as usize;
        let m = 2 + g.below(7) as usize;
        let ell = 1 + g.below(3) as u32;
        let weights: Vec<Vec<Rat>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| rat(g.below(4) as i64, 1 + g.below(7) as i64))
                    .collect()
            })
            .collect();
        let constraint = if round % 2 == 0 {
            MatroidConstraint::Uniform {
                k: 1 + g.below(m as u64) as usize,
            }
        } else {
            let mut order: Vec<usize> = (0..m).collect();
            g.shuffle(&mut order);
            let parts = 1 + g.below(m.min(3) as u64) as usize;
            let mut groups: Vec<Vec<usize>> = Vec::with_capacity(parts);
            let mut rest = order.as_slice();
            for p in 0..parts {
                let take = if p == parts - 1 {
                    rest.len()
                } else {
                    1 + g.below((rest.len() - (parts - 1 - p)) as u64) as usize
                };
                groups.push(rest[..take].to_vec());
                rest = &rest[take..];
            }
            let caps = groups
                .iter()
                .map(|gr| 1 + g.below(gr.len() as u64) as usize)
                .collect();
            MatroidConstraint::Partition { groups, caps }
        };
        let inst = WeightedCoverageInstance::new(n, weights, ell, constraint).unwrap();
        let out = solve_weighted(&inst).expect("weighted pipeline");
        check_trace(&out, m, &format!("weighted round {round}"));
        assert!(is_feasible(inst.constraint(), &out.solution.selected, m));
        assert_eq!(
            weighted_coverage_value(&inst, &out.solution.selected).unwrap(),
            out.solution.value
        );
    }
    pass(
        8,
        "all traces monotone with <= m-1 steps and feasible integral output (200 + 50 weighted)",
    );
}

#[test]
fn criterion_09_gadget_generation_verification_completeness() {
    let start = Instant::now();
    // Generated system at the contract parameters.
    let eta = rat(1, 5);
    let sys = generate_partition_system(120, 4, 6, 2, &eta, 7, 30).expect("generation");
    let report = verify_partition_system(&sys).unwrap();
    assert!(
        report.ok,
        "generated system rejected: {:?}",
        report.worst_violation
    );
    assert!(report.required_eta <= eta);

    // Oversubscribed selections: with mu = t/h - 1 inside the window that
    // epsilon admits, the verified bound implies coverage at most
    // (ell * rho + epsilon) * n_hat.  Checked at the smallest such epsilon.
    let (h, s, ell) = (4u32, 6u32, 2u32);
    let eta_f = rat_to_f64(&eta);
    let lrho = f64::from(ell) * rho(ell).unwrap();
    let factorial: f64 = (1..=u64::from(ell)).product::<u64>() as f64;
    let scale = f64::from(ell).powi(ell as i32) * (-f64::from(ell)).exp() / factorial;
    for t in h + 1..=s {
        let mu = f64::from(t) / f64::from(h) - 1.0;
        let eps = mu * 2.0 * f64::from(ell * ell) * scale * (1.0 + 1e-9);
        assert!(
            mu < eps / (2.0 * f64::from(ell * ell) * scale),
            "window admits t={t}"
        );
        let psi_t = rat_to_f64(&psi_exact(ell, t, h).unwrap());
        assert!(
            psi_t + eta_f <= lrho + eps + 1e-12,
            "t={t}: psi + eta = {} exceeds ell*rho + eps = {}",
            psi_t + eta_f,
            lrho + eps
        );
    }

    // Two identical families: condition (2) fails with a witness.
    let family = vec![vec![0, 1], vec![2, 3]];
    let twin =
        PartitioningSystem::new(4, 2, 2, 1, rat(1, 10), vec![family.clone(), family]).unwrap();
    let bad = verify_partition_system(&twin).unwrap();
    assert!(!bad.ok, "identical families must be rejected");
    assert_eq!(bad.required_eta, rat(1, 4));
    let witness = bad.witness.expect("rejection names the violating choice");
    assert_eq!(witness.len(), 2);

    // Completeness on a hand-built 3-edge cycle: every strongly satisfied
    // edge copy is covered exactly ell * n_hat, so a labeling leaving a
    // delta fraction unsatisfied keeps at least (1 - delta) * ell * |ground|.
    let crossing = PartitioningSystem::new(
        4,
        2,
        2,
        1,
        rat(1, 2),
        vec![vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]],
    )
    .unwrap();
    let identity: Vec<u32> = vec![0, 1];
    let ug = HyperUgInstance::new(
        3,
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        2,
        vec![vec![identity.clone(), identity.clone()]; 3],
        false,
    )
    .unwrap();
    let built = build_hardness_instance(&ug, &crossing).unwrap();
    assert!(!built.warnings.is_empty(), "small alphabet must be flagged");
    assert_eq!(built.instance.k(), 3, "budget is one set per vertex");
    for (labeling, satisfied_target) in [(vec![0u32, 0, 0], 3usize), (vec![0, 0, 1], 1)] {
        let mut selected: Vec<usize> = labeling
            .iter()
            .enumerate()
            .map(|(v, &b)| built.label_map[v][b as usize])
            .collect();
        selected.sort_unstable();
        let flags = ug.strongly_satisfied(&labeling).unwrap();
        let satisfied = flags.iter().filter(|&&f| f).count();
        assert_eq!(satisfied, satisfied_target);
        let total = coverage_value(&built.instance, &selected).unwrap();
        let mut hits = vec![0u32; built.instance.n()];
        for &i in &selected {
            for &e in built.instance.set(i) {
                hits[e] += 1;
            }
        }
        let per_edge: Vec<u64> = hits
            .chunks(4)
            .map(|chunk| chunk.iter().map(|&c| u64::from(c.min(1))).sum())
            .collect();
        assert_eq!(
            per_edge.iter().sum::<u64>(),
            total,
            "per-edge decomposition"
        );
        for (e, &ok) in flags.iter().enumerate() {
            if ok {
                assert_eq!(per_edge[e], 4, "satisfied edge {e} exactly covered");
            }
        }
        let delta = (flags.len() - satisfied) as f64 / flags.len() as f64;
        assert!(total as f64 >= (1.0 - delta) * 12.0 - 1e-9);
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:.2?}, budget is 30 s");
    pass(
        9,
        &format!(
            "generated system verifies, twins rejected with witness, completeness exact ({dt:.2?})"
        ),
    );
}

#[test]
fn criterion_10_list_decoding_reduction() {
    let mut g = SplitMix64::new(0x10C0DE);
    let mut worst_ratio = f64::INFINITY;
    for case in 0..20u32 {
        let inputs = 2 + g.below(5) as usize;
        let outputs = 2 + g.below(7) as usize;
        let ch = gen_random_channel(g.next_u64(), inputs, outputs).unwrap();
        let k = 1 + g.below(inputs.min(3) as u64) as usize;
        let ell = 1 + g.below(2) as u32;
        let exact = best_code(&ch, k, ell, SearchMethod::Exact).unwrap();
        let approx = best_code(&ch, k, ell, SearchMethod::Approx).unwrap();
        assert!(approx.probability <= exact.probability, "case {case}");
        let ratio = rat_to_f64(&approx.probability) / rat_to_f64(&exact.probability);
        let r = rho(ell).unwrap();
        assert!(ratio >= r, "case {case}: ratio {ratio} below rho {r}");
        worst_ratio = worst_ratio.min(ratio);
        // The decoder formula and the reduction agree exactly: on the two
        // found codes always, and on every code for the first cases.
        let inst = channel_to_instance(&ch, k, ell).unwrap();
        for code in [&exact.code, &approx.code] {
            assert_eq!(
                code_success_probability(&ch, code, ell).unwrap(),
                weighted_coverage_value(&inst, code).unwrap(),
                "case {case}"
            );
        }
        if case < 3 {
            let mut code: Vec<usize> = (0..k).collect();
            loop {
                assert_eq!(
                    code_success_probability(&ch, &code, ell).unwrap(),
                    weighted_coverage_value(&inst, &code).unwrap(),
                    "case {case} code {code:?}"
                );
                let mut i = k;
                let advanced = loop {
                    if i == 0 {
                        break false;
                    }
                    i -= 1;
                    if code[i] < inputs - k + i {
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
            }
        }
        let sim = simulate_decoding(&ch, &exact.code, ell, 200_000, g.next_u64()).unwrap();
        let p = rat_to_f64(&exact.probability);
        assert!(
            (sim.rate() - p).abs() <= 4.0 * sim.standard_error().max(1e-9),
            "case {case}: simulated {} vs exact {p}",
            sim.rate()
        );
    }
    pass(
        10,
        &format!("20 channels: approx within rho of exact (worst ratio {worst_ratio:.4}), reduction exact, simulator within 4 SE"),
    );
}
