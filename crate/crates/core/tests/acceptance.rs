//! Acceptance suite: one pass/fail line per criterion.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use iafb::designer::{greedy_design, rank_gate, symmetric_family, symmetric_profile};
use iafb::evaluator::{
    baseline1_dimension, baseline2_profile, baseline3_profile, fit_slope, run_sweep, SchemeContext, SchemeRegistry,
    SweepSpec, SweepVariable,
};
use iafb::feasibility::{is_divisible, maxflow_check, rank_test, rank_test_with_transform, CheckContext, CheckerRegistry, PRange, Verdict};
use iafb::fixtures::{example_one, example_three, example_two, network_a, network_b};
use iafb::matproc::{chordal_distance, orthonormalize, SubspaceBasis};
use iafb::netcfg::{generate_channels, NetworkConfig};
use iafb::profile::{derive, evaluate_feedback, feedback_dimension, full_direction_dimension, random_transforms, FeedbackProfile, LinkStrategy};
use iafb::quantizer::{quantize, quantize_subspace, QuantizerOptions};
use iafb::seeding::{gaussian_matrix, substream};
use iafb::solver::{solve_full, solve_inner, verify_ia, SolverOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn report(n: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = o.pass && in_time;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "[{}] criterion {n}: {name}: {} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    )
    .unwrap();
    pass
}

fn all_row_space(k: usize, m: usize, n: usize, d: usize) -> (NetworkConfig, FeedbackProfile) {
    let cfg = NetworkConfig::symmetric(k, m, n, d).unwrap();
    let p = FeedbackProfile::truncated_full(&cfg);
    (cfg, p)
}

fn dimension_table() -> Outcome {
    let mut got = Vec::new();
    let mut want = Vec::new();
    let (c1, p1) = example_one();
    let (c2, _) = example_two();
    let (c3, p3) = example_three();
    got.extend([full_direction_dimension(&c1), full_direction_dimension(&c2), full_direction_dimension(&c3)].map(|x| x as i64));
    want.extend([138, 82, 114]);
    got.extend([feedback_dimension(&c1, &p1).unwrap(), feedback_dimension(&c3, &p3).unwrap()]);
    want.extend([24, 48]);
    let (a, b) = (network_a(), network_b());
    got.extend([baseline1_dimension(&a) as i64, feedback_dimension(&a, &baseline2_profile(&a)).unwrap()]);
    want.extend([144, 111]);
    let gate_b = rank_gate(&b, 1, 1e-9);
    got.extend([
        baseline1_dimension(&b) as i64,
        feedback_dimension(&b, &baseline2_profile(&b)).unwrap(),
        feedback_dimension(&b, &baseline3_profile(&b, &gate_b).unwrap()).unwrap(),
    ]);
    want.extend([96, 72, 56]);
    outcome(got == want, format!("got {got:?}, expected {want:?}"))
}

fn greedy_on(cfg: &NetworkConfig) -> (i64, bool) {
    let gate = rank_gate(cfg, 1, 1e-9);
    let (p, trace) = greedy_design(cfg, &gate, None).unwrap();
    let feasible = rank_test(cfg, &p, &generate_channels(cfg, 99), 1e-9).unwrap().is_feasible();
    (trace.final_dimension(), feasible)
}

fn greedy_network_b() -> Outcome {
    let (d, feasible) = greedy_on(&network_b());
    let detail = if d <= 20 {
        format!("D = {d} (target 20), feasible on a fresh draw: {feasible}")
    } else {
        format!("D = {d} exceeds the target 20 by {} (fallback bound 36), feasible: {feasible}", d - 20)
    };
    outcome(d <= 36 && feasible, detail)
}

fn greedy_network_a() -> Outcome {
    let (d, feasible) = greedy_on(&network_a());
    outcome(d <= 86 && feasible, format!("D = {d} (required <= 86, targeted 38), feasible on a fresh draw: {feasible}"))
}

fn symmetric_closed_form() -> Outcome {
    let mut failures = Vec::new();
    let mut below = 0;
    let family = symmetric_family(&[3, 4, 5]);
    for &(k, m, d) in &family {
        let s = symmetric_profile(k, m, d).unwrap();
        let exact = feedback_dimension(&s.cfg, &s.profile).unwrap();
        let formula = if d * k <= m { 0 } else { ((k as i64 + 1) * (d * d) as i64 - (m * d) as i64) * (k as i64 - 1).pow(2) };
        let feasible = rank_test(&s.cfg, &s.profile, &generate_channels(&s.cfg, 5), 1e-9).unwrap().is_feasible();
        let (greedy, _) = greedy_on(&s.cfg);
        if exact != formula || s.dimension != formula || !feasible || greedy > formula {
            failures.push(format!("({k},{m},{d}): D={exact} formula={formula} feasible={feasible} greedy={greedy}"));
        }
        if greedy < formula {
            below += 1;
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} instances, {} mismatches, greedy strictly below the closed form on {below}{}", family.len(), failures.len(),
            if failures.is_empty() { String::new() } else { format!(": {}", failures.join("; ")) }),
    )
}

fn random_divisible_profile<R: Rng>(rng: &mut R) -> (NetworkConfig, FeedbackProfile) {
    let k = rng.random_range(2..=3);
    let d = rng.random_range(1..=2);
    let sizes: Vec<usize> = (1..=4).filter(|s| s % d == 0).collect();
    let pick = |rng: &mut R| sizes[rng.random_range(0..sizes.len())];
    let ms: Vec<usize> = (0..k).map(|_| pick(rng)).collect();
    let ns: Vec<usize> = (0..k).map(|_| pick(rng)).collect();
    let m: Vec<usize> = ms.iter().map(|&x| x + rng.random_range(0..=1)).collect();
    let n: Vec<usize> = ns.iter().map(|&x| x + rng.random_range(0..=1)).collect();
    let links = (0..k)
        .map(|j| (0..k).map(|i| (i != j).then(|| LinkStrategy::ALL[rng.random_range(0..4)])).collect())
        .collect();
    let cfg = NetworkConfig::new(n, m, vec![d; k]).unwrap();
    (cfg, FeedbackProfile::new(ms, ns, links).unwrap())
}

fn feasibility_cross_validation() -> Outcome {
    let registry = CheckerRegistry::default();
    let subset = registry.get("brute_subset").unwrap();
    let mut rng = substream(2024, 100, 0, 0);
    let (mut tested, mut feasible, mut disagreements) = (0, 0, Vec::new());
    while tested < 200 {
        let (cfg, p) = random_divisible_profile(&mut rng);
        if !is_divisible(&cfg, &p) {
            continue;
        }
        tested += 1;
        let h = generate_channels(&cfg, tested);
        let cx = CheckContext { cfg: &cfg, profile: &p, channels: &h, tol: 1e-9, p_range: PRange::Streams };
        let verdicts = [
            maxflow_check(&cfg, &p).unwrap().verdict,
            subset.check(&cx).unwrap().verdict,
            rank_test(&cfg, &p, &h, 1e-9).unwrap().verdict,
        ];
        if verdicts.iter().any(|&v| v != verdicts[0] || v == Verdict::Unknown) {
            disagreements.push(format!("{p:?}: {verdicts:?}"));
        }
        if verdicts[0] == Verdict::Feasible {
            feasible += 1;
        }
    }
    let mut landmarks = Vec::new();
    for (k, expected) in [(3, Verdict::Feasible), (4, Verdict::Infeasible)] {
        let (cfg, p) = all_row_space(k, 2, 2, 1);
        let h = generate_channels(&cfg, 1);
        let got = [maxflow_check(&cfg, &p).unwrap().verdict, rank_test(&cfg, &p, &h, 1e-9).unwrap().verdict];
        landmarks.push(got.iter().all(|&v| v == expected));
    }
    outcome(
        disagreements.is_empty() && landmarks.iter().all(|&x| x),
        format!(
            "{tested} divisible profiles ({feasible} feasible), {} disagreements; landmarks K=3 feasible / K=4 infeasible correct: {:?}{}",
            disagreements.len(),
            landmarks,
            disagreements.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

fn solver_convergence() -> Outcome {
    let (cfg, p) = all_row_space(3, 2, 2, 1);
    let (mut converged, mut verified, mut monotone) = (0, 0, 0);
    for seed in 0..100 {
        let h = generate_channels(&cfg, seed);
        let fed = evaluate_feedback(&cfg, &p, &h, None).unwrap();
        let sol = solve_full(&cfg, &p, &h, &fed, &SolverOptions { seed, ..SolverOptions::default() }).unwrap();
        if sol.monotone {
            monotone += 1;
        }
        if sol.converged && sol.leakage_trace.len() <= 5001 {
            converged += 1;
            if verify_ia(&cfg, &h, &sol.v, &sol.u, 1e-6).unwrap().pass {
                verified += 1;
            }
        }
    }
    outcome(
        converged >= 95 && verified == converged && monotone == 100,
        format!("converged {converged}/100, verified {verified}/{converged} at 1e-6, monotone {monotone}/100"),
    )
}

fn transformation_invariance() -> Outcome {
    let (c1, p1) = all_row_space(3, 2, 2, 1);
    let (c2, p2) = all_row_space(4, 2, 2, 1);
    let b = network_b();
    let (pb, _) = greedy_design(&b, &rank_gate(&b, 1, 1e-9), None).unwrap();
    let (c3, p3) = example_three();
    let cases = [(c1, p1), (c2, p2), (b, pb), (c3, p3)];
    let mut mismatches = Vec::new();
    let mut comparisons = 0;
    let mut summary = Vec::new();
    for (n, (cfg, p)) in cases.iter().enumerate() {
        let h = generate_channels(cfg, 7);
        let der = derive(cfg, p).unwrap();
        let base_rank = rank_test(cfg, p, &h, 1e-9).unwrap().verdict;
        // Ill-conditioned transforms slow the alternating updates down by
        // more than an order of magnitude without stalling them, so the
        // budget is sized to separate convergence from stagnation, and the
        // stall rule ends runs that have stopped improving.
        let opts = SolverOptions { seed: 3, max_iters: 200_000, stall_tol: Some(1e-6), ..SolverOptions::default() };
        let converges = |r: Option<&[iafb::matproc::CMatrix]>| {
            let fed = evaluate_feedback(cfg, p, &h, r).unwrap();
            solve_inner(cfg, p, &fed, &opts).unwrap().converged
        };
        let base_conv = converges(None);
        let mut agreeing = 0;
        for draw in 0..20 {
            let r = random_transforms(&der, 1000 + draw);
            let rank = rank_test_with_transform(cfg, p, &h, 1e-9, Some(&r)).unwrap().verdict;
            let conv = converges(Some(&r));
            comparisons += 1;
            if rank == base_rank && conv == base_conv {
                agreeing += 1;
            } else {
                mismatches.push(format!("case {n} draw {draw}: {rank:?}/{conv} vs {base_rank:?}/{base_conv}"));
            }
        }
        summary.push(format!("{base_rank:?}/converged {base_conv}: {agreeing}/20 agree"));
    }
    outcome(
        mismatches.is_empty(),
        format!("{comparisons} comparisons over {} profiles [{}], mismatches {mismatches:?}", cases.len(), summary.join("; ")),
    )
}

fn throughput() -> Outcome {
    let cfg = network_a();
    let names: Vec<String> = ["proposed", "baseline1", "baseline2", "baseline3"].map(String::from).to_vec();
    let schemes = SchemeRegistry::default().prepare(&names, &SchemeContext { cfg: &cfg, seed: 1, tol: 1e-9 }).unwrap();
    let bits = SweepSpec {
        variable: SweepVariable::TotalBits,
        values: vec![100.0, 200.0, 300.0, 400.0],
        snr_db: Some(25.0),
        total_bits: None,
        trials: 500,
        solver: SolverOptions::default(),
        quantizer: QuantizerOptions::default(),
    };
    let results = run_sweep(&cfg, &schemes, &bits, 1, None).unwrap();
    let at400 = |s: &str| results.iter().find(|r| r.scheme == s).unwrap().points[3].clone();
    let (prop, base1) = (at400("proposed"), at400("baseline1"));
    let separated = prop.mean_tput - prop.ci95 > base1.mean_tput + base1.ci95;
    let monotone: Vec<bool> =
        results.iter().map(|r| r.points.windows(2).all(|w| w[1].mean_tput >= w[0].mean_tput)).collect();
    let failures: usize = results.iter().flat_map(|r| &r.points).map(|p| p.failures).sum();

    let snr = SweepSpec { variable: SweepVariable::SnrDb, values: vec![20.0, 30.0, 40.0], snr_db: None, ..bits };
    let perfect = run_sweep(&cfg, &schemes[..1], &snr, 1, None).unwrap();
    let means: Vec<f64> = perfect[0].points.iter().map(|p| p.mean_tput).collect();
    let slope = fit_slope(&snr.values, &means);
    let ideal = cfg.total_streams() as f64 / 3.0;
    let slope_ok = (slope - ideal).abs() <= 0.15 * ideal;

    let order: Vec<String> = results.iter().map(|r| format!("{} {:.2}+/-{:.2}", r.scheme, r.points[3].mean_tput, r.points[3].ci95)).collect();
    outcome(
        separated && monotone.iter().all(|&m| m) && slope_ok && failures == 0,
        format!(
            "400 bits @ 25 dB: [{}]; proposed > baseline1 with disjoint CIs: {separated}; monotone in bits per scheme: {monotone:?}; \
             perfect-CSI slope {slope:.3} bits/dB vs {ideal:.3} ({:+.1}%); failed trials {failures}",
            order.join(", "),
            100.0 * (slope - ideal) / ideal
        ),
    )
}

fn quantizer_scaling() -> Outcome {
    let opts = QuantizerOptions::default();
    let trials = 500;
    let mut stats = Vec::new();
    for bits in [2u32, 4, 6, 8] {
        let d: Vec<f64> = (0..trials)
            .map(|t| {
                let s = SubspaceBasis::from_orthonormal(orthonormalize(&gaussian_matrix(3, 1, &mut substream(t, 101, 0, 0)))).unwrap();
                let q = quantize_subspace(&s, bits, t, 0, &opts).unwrap();
                chordal_distance(&s, &q).unwrap()
            })
            .collect();
        let mean = d.iter().sum::<f64>() / trials as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        stats.push((bits, mean, (var / trials as f64).sqrt()));
    }
    let decreasing = stats.windows(2).all(|w| w[0].1 - w[1].1 > 3.0 * (w[0].2.powi(2) + w[1].2.powi(2)).sqrt());

    let (cfg, p) = all_row_space(3, 2, 2, 1);
    let mut exact = true;
    for seed in 0..10 {
        let h = generate_channels(&cfg, seed);
        let fed = evaluate_feedback(&cfg, &p, &h, None).unwrap();
        let oracle = quantize(&fed, &vec![6; fed.subspaces.len()], seed, &QuantizerOptions { oracle: true, ..opts }).unwrap();
        let o = SolverOptions { seed, ..SolverOptions::default() };
        let a = solve_full(&cfg, &p, &h, &fed, &o).unwrap();
        let b = solve_full(&cfg, &p, &h, &oracle.fed, &o).unwrap();
        let va = verify_ia(&cfg, &h, &a.v, &a.u, 1e-6).unwrap();
        let vb = verify_ia(&cfg, &h, &b.v, &b.u, 1e-6).unwrap();
        exact &= a == b && va == vb && oracle.distortion.iter().all(|&x| x == 0.0);
    }
    let means: Vec<String> = stats.iter().map(|(b, m, se)| format!("{b}b {m:.4}+/-{se:.4}")).collect();
    outcome(
        decreasing && exact,
        format!("G(1,3) mean distortion [{}], strictly decreasing at 3 sigma: {decreasing}; oracle pipeline bit-exact on 10 draws: {exact}", means.join(", ")),
    )
}

const DETERMINISM_CONFIG: &str = r#"{
  "schema": 1,
  "network": { "tx_antennas": [3, 3, 3, 3], "rx_antennas": [3, 3, 3, 3], "streams": [1, 1, 1, 1] },
  "seed": 11,
  "solve": { "snr_db": 20.0, "total_bits": 60 },
  "sweep": { "variable": "total_bits", "values": [40, 120], "snr_db": 20.0, "trials": 16 }
}"#;

fn run_cli(args: &[&str]) -> std::process::ExitStatus {
    Command::new(env!("CARGO_BIN_EXE_iafb")).args(args).output().unwrap().status
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn end_to_end_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
    let config = config.to_str().unwrap();
    let mut problems = Vec::new();
    let mut files = 0;
    for cmd in ["design", "check", "solve", "sweep", "dims"] {
        let mut snapshots = Vec::new();
        for (run, workers) in [(0, "1"), (1, "1"), (2, "3")] {
            let out = tmp.path().join(format!("{cmd}-{run}"));
            let status = run_cli(&[cmd, "--config", config, "--seed", "5", "--workers", workers, "--out", out.to_str().unwrap()]);
            if !status.success() {
                problems.push(format!("{cmd} exited with {status}"));
            }
            snapshots.push(snapshot(&out));
        }
        files += snapshots[0].len();
        if snapshots[0].is_empty() || snapshots.iter().any(|s| s != &snapshots[0]) {
            problems.push(format!("{cmd} outputs differ"));
        }
        if !snapshots[0].iter().all(|(_, bytes)| String::from_utf8_lossy(bytes).contains("seed")) {
            problems.push(format!("{cmd} output lacks provenance"));
        }
    }
    outcome(
        problems.is_empty(),
        format!("5 commands x 3 runs (workers 1, 1, 3), {files} files compared, problems: {problems:?}"),
    )
}

#[test]
fn acceptance() {
    let results = [
        report(1, "feedback-dimension table", Duration::from_secs(1), dimension_table),
        report(2, "greedy designer on network B", Duration::from_secs(10), greedy_network_b)
            & report(2, "greedy designer on network A", Duration::from_secs(10), greedy_network_a),
        report(3, "symmetric closed form", Duration::from_secs(60), symmetric_closed_form),
        report(4, "feasibility cross-validation", Duration::from_secs(30), feasibility_cross_validation),
        report(5, "solver convergence", Duration::from_secs(60), solver_convergence),
        report(6, "transformation invariance", Duration::from_secs(30), transformation_invariance),
        report(7, "throughput experiments", Duration::from_secs(600), throughput),
        report(8, "quantizer", Duration::from_secs(60), quantizer_scaling),
        report(9, "end-to-end determinism", Duration::from_secs(600), end_to_end_determinism),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

