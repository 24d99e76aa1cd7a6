//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::Rng;

use seedlab_core::instances::{simplex_lower_bound, three_point_line, InstanceSpec};
use seedlab_core::oracle::{
    all_ones, exact_expected_cost, one_heavy, phi_i_closed_form, removal_experiment, Adversary,
    Decrement, EnumerationBudget, RemovalExperimentConfig,
};
use seedlab_core::rng::{Stream, TrialSeed};
use seedlab_core::seeding::{
    d2_distribution, kmeanspp_seed, moderate_choice, noisy_seed, perturb, seed_with, FirstStep,
    PerturbationModel, Sampler, Strategy, StrategyView, Variant,
};
use seedlab_core::stats::{
    binomial_in_band, normal_quantile, summarize, two_proportion_p_greater, welch_p_greater,
};
use seedlab_core::{cost, cost_decomposition, CenterSet, Dataset, Point};
use seedlab_harness::{run_experiment, Algorithm, ExperimentConfig};

fn verdict(id: u32, name: &str, ok: bool, detail: String, started: Instant) {
    // Written straight to stdout so the line survives libtest's capture.
    let _ = writeln!(
        std::io::stdout().lock(),
        "{} criterion {id} ({name}): {detail} [{:.2}s]",
        if ok { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_01_decomposition_identity() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for t in 0..1000u64 {
        let mut rng = TrialSeed::new(101, t).rng(Stream::Aux, 0);
        let d = rng.random_range(1..=8);
        let n = rng.random_range(1..=50);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-100.0..100.0)).collect())
            .collect();
        let z: Vec<f64> = (0..d).map(|_| rng.random_range(-150.0..150.0)).collect();
        let x = Dataset::from_rows(&rows).unwrap();
        let sites: Vec<usize> = (0..n).collect();

        // Independent evaluation of both sides.
        let mu: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let sq =
            |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        let lhs: f64 = rows.iter().map(|r| sq(r, &z)).sum();
        let rhs = rows.iter().map(|r| sq(r, &mu)).sum::<f64>() + n as f64 * sq(&z, &mu);

        let zp = Point::new(z.clone()).unwrap();
        let (opt1, shift) = cost_decomposition(&x, &sites, &zp).unwrap();
        let direct = cost(&x, &[zp]).unwrap();
        for e in [
            rel_err(lhs, rhs),
            rel_err(opt1 + shift, lhs),
            rel_err(direct, lhs),
        ] {
            worst = worst.max(e);
        }
    }
    verdict(
        1,
        "decomposition identity",
        worst <= 1e-9,
        format!("1000 cases, worst relative error {worst:.2e}"),
        t0,
    );
}

#[test]
fn criterion_02_closed_form_potential() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for k in 4..=10 {
        let x = simplex_lower_bound(k).unwrap();
        for i in 2..=k {
            let centers: Vec<Point> = (0..i - 1).map(|j| x.point(j).clone()).collect();
            worst = worst.max(rel_err(
                phi_i_closed_form(k, i).unwrap(),
                cost(&x, &centers).unwrap(),
            ));
            cases += 1;
        }
    }
    let anchor = phi_i_closed_form(4, 2).unwrap();
    let ok = worst <= 1e-9 && anchor == 22.75;
    verdict(
        2,
        "closed-form potential",
        ok,
        format!("{cases} cases, worst relative error {worst:.2e}, anchor {anchor}"),
        t0,
    );
}

#[test]
fn criterion_03_exact_enumeration_agreement() {
    let t0 = Instant::now();
    let x = Dataset::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
    let exact = exact_expected_cost(&x, 2, &Variant::Plain, &EnumerationBudget::default()).unwrap();
    let n = 100_000u64;
    let costs: Vec<f64> = (0..n)
        .map(|t| {
            kmeanspp_seed(&x, 2, &TrialSeed::new(303, t))
                .unwrap()
                .centers
                .potential()
        })
        .collect();
    let s = summarize(&costs);
    let half = normal_quantile(0.995) * s.stderr;
    let ok = (exact - 1.3).abs() < 1e-12 && (s.mean - 1.3).abs() <= half;
    verdict(
        3,
        "exact enumeration agreement",
        ok,
        format!(
            "oracle {exact}, Monte Carlo mean {:.5} vs 1.3 ± {half:.5} (99%)",
            s.mean
        ),
        t0,
    );
}

#[test]
fn criterion_04_deterministic_greedy_trap() {
    let t0 = Instant::now();
    let n = 1000u64;
    let x = three_point_line(n).unwrap();
    let full_greedy = Variant::Greedy {
        ell: 20_000,
        first_step: FirstStep::Greedy,
    };
    let trials = 1000u64;
    let mut b_first = 0;
    let mut min_cost_b_first = f64::INFINITY;
    for t in 0..trials {
        let s = seed_with(&x, 2, &full_greedy, &TrialSeed::new(404, t)).unwrap();
        if s.trace.records[0].chosen_site == 1 {
            b_first += 1;
            min_cost_b_first = min_cost_b_first.min(s.centers.potential());
        }
    }
    let plain: Vec<f64> = (0..trials)
        .map(|t| {
            kmeanspp_seed(&x, 2, &TrialSeed::new(405, t))
                .unwrap()
                .centers
                .potential()
        })
        .collect();
    let plain_mean = summarize(&plain).mean;
    let nf = n as f64;
    let ok = b_first as f64 >= 0.99 * trials as f64
        && min_cost_b_first >= nf * (1.0 - 1e-9)
        && plain_mean < nf / 10.0;
    verdict(
        4,
        "greedy trap on the three-point line",
        ok,
        format!(
            "b first in {b_first}/{trials}, min cost then {min_cost_b_first}, plain mean {plain_mean:.3} < {}",
            nf / 10.0
        ),
        t0,
    );
}

#[test]
fn criterion_05_more_candidates_more_o_hits() {
    let t0 = Instant::now();
    let n = 5000;
    let run = |ell| {
        let mut c = ExperimentConfig::new(
            InstanceSpec::SimplexLowerBound { k: 32 },
            Algorithm::Greedy {
                ell,
                first_step: FirstStep::Single,
            },
        );
        c.trials = n;
        c.base_seed = 505;
        c.track_events = true;
        run_experiment(&c).unwrap()
    };
    let reports: Vec<_> = [1, 4, 16].into_iter().map(run).collect();
    let hits: Vec<usize> = reports
        .iter()
        .map(|r| {
            r.rows
                .iter()
                .filter(|row| row.events.unwrap().o_hit)
                .count()
        })
        .collect();
    let p14 = two_proportion_p_greater(hits[0], n, hits[1], n);
    let p416 = two_proportion_p_greater(hits[1], n, hits[2], n);
    let ratios =
        |i: usize| -> Vec<f64> { reports[i].rows.iter().map(|r| r.ratio.unwrap()).collect() };
    let (r1, r16) = (ratios(0), ratios(2));
    let pw = welch_p_greater(&r1, &r16);
    let ok = p14 < 0.01 && p416 < 0.01 && pw < 0.01;
    verdict(
        5,
        "candidate count raises o-hit frequency",
        ok,
        format!(
            "o-hit {}/{}/{} of {n} (p {p14:.1e}, {p416:.1e}); mean ratio {:.3} -> {:.3} (Welch p {pw:.1e})",
            hits[0],
            hits[1],
            hits[2],
            summarize(&r1).mean,
            summarize(&r16).mean
        ),
        t0,
    );
}

#[test]
fn criterion_06_noiseless_noisy_is_plain() {
    let t0 = Instant::now();
    let x = simplex_lower_bound(10).unwrap();
    let g = InstanceSpec::GaussianMixture(
        "gauss:k=6,per=20,d=3,sep=30,sd=1,seed=6"
            .parse::<InstanceSpec>()
            .map(|s| match s {
                InstanceSpec::GaussianMixture(p) => p,
                _ => unreachable!(),
            })
            .unwrap(),
    )
    .build()
    .unwrap();
    let zero = PerturbationModel::new(0.0, 0.0, Strategy::BoostCovered).unwrap();
    let mut same = 0;
    for t in 0..100 {
        let (data, k) = if t % 2 == 0 { (&x, 10) } else { (&g, 6) };
        let seed = TrialSeed::new(606, t);
        let a = kmeanspp_seed(data, k, &seed).unwrap();
        let b = noisy_seed(data, k, &zero, &seed).unwrap();
        if a.trace == b.trace && a.centers.centers() == b.centers.centers() {
            same += 1;
        }
    }
    verdict(
        6,
        "zero-noise reduction",
        same == 100,
        format!("{same}/100 traces identical"),
        t0,
    );
}

#[test]
fn criterion_07_noisy_boundedness() {
    let t0 = Instant::now();
    let spec: InstanceSpec = "gauss:k=16,per=50,d=2,sep=100,sd=1,seed=7".parse().unwrap();
    let ceiling = 50.0 * 16f64.ln().powi(2);
    let (eps1, eps2) = (0.5, 0.5);
    let mut details = Vec::new();
    let mut ok = true;
    for strategy in Strategy::builtins() {
        let mut c = ExperimentConfig::new(
            spec.clone(),
            Algorithm::Noisy {
                eps1,
                eps2,
                strategy: strategy.name().to_string(),
            },
        );
        c.trials = 2000;
        c.base_seed = 707;
        let r = run_experiment(&c).unwrap();
        let d = r.summary.denominator.unwrap();
        let mean = r.summary.ratio.unwrap().mean;
        ok &= d.upper_bound && mean <= ceiling;
        details.push(format!("{} {mean:.3}", strategy.name()));
    }

    // Sampling frequencies on a frozen center set.
    let x = spec.build().unwrap();
    let frozen = kmeanspp_seed(&x, 6, &TrialSeed::new(708, 0))
        .unwrap()
        .centers;
    let chosen = kmeanspp_seed(&x, 6, &TrialSeed::new(708, 0))
        .unwrap()
        .trace
        .chosen_sites();
    let labels = x.labels().unwrap();
    let covered: Vec<bool> = labels
        .iter()
        .map(|l| chosen.iter().any(|&c| labels[c] == *l))
        .collect();
    let p = d2_distribution(&x, &frozen).unwrap();
    let draws = 100_000u64;
    let alpha = 0.01 / x.len() as f64;
    let mut worst_band = 0usize;
    for strategy in Strategy::builtins() {
        let model = PerturbationModel::new(eps1, eps2, strategy.clone()).unwrap();
        let view = StrategyView {
            iteration: 7,
            covered_sites: Some(&covered),
            chosen_sites: &chosen,
        };
        let fixed = (!strategy.is_random()).then(|| {
            Sampler::new(
                &perturb(&model, &p, &view, &mut TrialSeed::new(0, 0).iteration(0)).unwrap(),
            )
        });
        let mut counts = vec![0u64; x.len()];
        for t in 0..draws {
            let seed = TrialSeed::new(709, t);
            let site = match &fixed {
                Some(s) => s.draw(&mut seed.iteration(7)),
                None => {
                    let q =
                        perturb(&model, &p, &view, &mut seed.rng(Stream::Adversary, 7)).unwrap();
                    Sampler::new(&q).draw(&mut seed.iteration(7))
                }
            };
            counts[site] += 1;
        }
        let outside = (0..x.len())
            .filter(|&s| {
                let ps = p.probs()[s];
                !binomial_in_band(
                    counts[s],
                    draws,
                    (1.0 - eps1) * ps,
                    (1.0 + eps2) * ps,
                    alpha,
                )
            })
            .count();
        worst_band = worst_band.max(outside);
    }
    ok &= worst_band == 0;
    verdict(
        7,
        "noisy seeding stays bounded",
        ok,
        format!(
            "mean ratio vs upper-bound OPT [{}] <= {ceiling:.1}; sites outside band: {worst_band}",
            details.join(", ")
        ),
        t0,
    );
}

#[test]
fn criterion_08_removal_experiment() {
    let t0 = Instant::now();
    let z = 1024;
    let eps = 0.1;
    let cfg = |numbers: Vec<f64>, steps, decrement| RemovalExperimentConfig {
        numbers,
        eps,
        steps,
        adversary: Adversary::RemoveMin,
        decrement,
        trials: 10_000,
        base_seed: 808,
    };
    let large =
        removal_experiment(&cfg(one_heavy(z), z / 2, Decrement::HalveRandomSurvivor)).unwrap();
    let large_bound = 4.0 / (1.0 - eps) * (z as f64).ln() + 2.0;
    // Without decrements nothing lowers the survivors, which is the harder case.
    let plain_large = removal_experiment(&cfg(one_heavy(z), z / 2, Decrement::None)).unwrap();
    let small =
        removal_experiment(&cfg(one_heavy(z), z / 4, Decrement::HalveRandomSurvivor)).unwrap();
    let small_limit = 2.0 + 3.0 * small.summary.stderr;
    // Decrements lower values by construction, so the all-ones claim is about
    // removals alone.
    let ones = removal_experiment(&cfg(all_ones(z), z / 2, Decrement::None)).unwrap();
    let ones_exact = ones.trials.iter().all(|t| t.final_average == 1.0);
    let ok = large.summary.mean <= large_bound
        && plain_large.summary.mean <= large_bound
        && small.summary.mean <= small_limit
        && ones_exact;
    verdict(
        8,
        "removal experiment",
        ok,
        format!(
            "l=z/2 mean {:.4} (no decrements {:.4}) <= {large_bound:.3}; l=z/4 mean {:.4} <= {small_limit:.4}; all-ones exact: {ones_exact}",
            large.summary.mean, plain_large.summary.mean, small.summary.mean
        ),
        t0,
    );
}

#[test]
fn criterion_09_moderate_sandwich() {
    let t0 = Instant::now();
    let x = Dataset::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
    let (p_mix, ell) = (0.5, 2);
    let draws = 100_000u64;
    let factor = (1.0 - p_mix) * ell as f64 + p_mix;
    let mut outside = 0;
    let mut freqs = Vec::new();
    for first in 0..3 {
        let c = CenterSet::from_centers(&x, [x.point(first).clone()]).unwrap();
        let p = d2_distribution(&x, &c).unwrap();
        let sampler = Sampler::new(&p);
        let mut counts = [0u64; 3];
        for t in 0..draws {
            let seed = TrialSeed::new(909 + first as u64, t);
            let (site, _, _) = moderate_choice(
                &x,
                &c,
                &sampler,
                ell,
                p_mix,
                &mut seed.iteration(2),
                &mut seed.rng(Stream::Coin, 2),
            )
            .unwrap();
            counts[site] += 1;
        }
        for s in 0..3 {
            let ps = p.probs()[s];
            if !binomial_in_band(
                counts[s],
                draws,
                p_mix * ps,
                (factor * ps).min(1.0),
                0.01 / 9.0,
            ) {
                outside += 1;
            }
        }
        freqs.push(format!("{:?}", counts.map(|c| c as f64 / draws as f64)));
    }
    verdict(
        9,
        "moderately greedy sandwich",
        outside == 0,
        format!(
            "frequencies {} ; sites outside [p_mix p, {factor} p]: {outside}",
            freqs.join(" ")
        ),
        t0,
    );
}

fn cli(args: &[&str], out: &Path) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_seedlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

#[test]
fn criterion_10_cli_determinism() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str], &str); 5] = [
        (
            "greedy",
            &[
                "run",
                "--instance",
                "simplex:k=16",
                "--algo",
                "greedy",
                "--ell",
                "4",
                "--trials",
                "300",
                "--seed",
                "9",
            ],
            "trials.jsonl",
        ),
        (
            "noisy",
            &[
                "run",
                "--instance",
                "gauss:k=8,per=20,d=2,sep=50,sd=1,seed=2",
                "--algo",
                "noisy",
                "--eps1",
                "0.3",
                "--eps2",
                "0.6",
                "--strategy",
                "random_within_bounds",
                "--trials",
                "200",
                "--lloyd",
            ],
            "trials.jsonl",
        ),
        (
            "moderate",
            &[
                "run",
                "--instance",
                "line:n=50",
                "--algo",
                "moderate",
                "--ell",
                "3",
                "--pmix",
                "0.3",
                "--trials",
                "300",
            ],
            "trials.jsonl",
        ),
        (
            "sweep",
            &[
                "sweep",
                "--instance",
                "simplex:k=8",
                "--algo",
                "greedy",
                "--axis",
                "ell=1,2,4",
                "--trials",
                "100",
            ],
            "sweep.csv",
        ),
        (
            "removal",
            &[
                "removal",
                "--z",
                "256",
                "--trials",
                "200",
                "--decrement",
                "halve",
            ],
            "removal.jsonl",
        ),
    ];
    let mut identical = 0;
    for (name, args, file) in runs {
        let a = dir.path().join(format!("{name}-a"));
        let b = dir.path().join(format!("{name}-b"));
        let sa = cli(args, &a);
        let sb = cli(args, &b);
        let fa = std::fs::read(a.join(file)).unwrap();
        let fb = std::fs::read(b.join(file)).unwrap();
        if !fa.is_empty() && fa == fb && sa == sb {
            identical += 1;
        }
    }
    verdict(
        10,
        "CLI determinism",
        identical == 5,
        format!("{identical}/5 reruns byte-identical"),
        t0,
    );
}
