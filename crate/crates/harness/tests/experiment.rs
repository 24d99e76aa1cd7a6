use seedlab_core::instances::InstanceSpec;
use seedlab_core::lloyd::LloydConfig;
use seedlab_core::seeding::FirstStep;
use seedlab_core::stats::{spearman, spearman_p_positive, summarize, two_proportion_p_greater};
use seedlab_harness::{read_rows, run_experiment, sweep, Algorithm, ExperimentConfig, SweepAxis};

fn simplex(k: usize, algorithm: Algorithm, trials: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(InstanceSpec::SimplexLowerBound { k }, algorithm);
    c.trials = trials;
    c.base_seed = 2024;
    c.track_events = true;
    c
}

fn greedy(ell: usize) -> Algorithm {
    Algorithm::Greedy {
        ell,
        first_step: FirstStep::Single,
    }
}

#[test]
fn plain_on_simplex_has_finite_ratio_above_one() {
    let r = run_experiment(&simplex(20, Algorithm::Plain, 2000)).unwrap();
    let ratio = r.summary.ratio.unwrap();
    assert!(ratio.mean.is_finite() && ratio.mean > 1.0);
    assert!(!r.summary.denominator.unwrap().upper_bound);
    for row in &r.rows {
        assert!(row.ratio.unwrap() >= 1.0 - 1e-9);
        assert_eq!(row.ratio_is_upper_bound, Some(false));
    }
}

#[test]
fn more_candidates_hit_o_more_often() {
    let n = 2000;
    let hits = |ell| {
        let r = run_experiment(&simplex(20, greedy(ell), n)).unwrap();
        r.rows
            .iter()
            .filter(|row| row.events.unwrap().o_hit)
            .count()
    };
    let (h1, h8) = (hits(1), hits(8));
    let p = two_proportion_p_greater(h1, n, h8, n);
    assert!(p < 0.01, "o-hit {h8}/{n} vs {h1}/{n}, p = {p}");
}

#[test]
fn lloyd_ratios_stay_above_exact_optimum() {
    let mut c = simplex(8, Algorithm::Plain, 300);
    c.lloyd = Some(LloydConfig::default());
    let r = run_experiment(&c).unwrap();
    for row in &r.rows {
        let l = row.lloyd_cost.unwrap();
        assert!(l <= row.seed_cost * (1.0 + 1e-12));
        assert!(row.ratio.unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn reports_are_deterministic_and_recomputable() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = simplex(12, Algorithm::Moderate { ell: 3, p_mix: 0.4 }, 400);
    c.out = Some(dir.path().join("a"));
    let a = run_experiment(&c).unwrap();
    c.out = Some(dir.path().join("b"));
    run_experiment(&c).unwrap();
    let ja = std::fs::read(dir.path().join("a/trials.jsonl")).unwrap();
    let jb = std::fs::read(dir.path().join("b/trials.jsonl")).unwrap();
    assert_eq!(ja, jb);

    let rows = read_rows(&dir.path().join("a/trials.jsonl")).unwrap();
    assert_eq!(rows.len(), 400);
    let costs: Vec<f64> = rows.iter().map(|r| r.seed_cost).collect();
    assert_eq!(summarize(&costs), a.summary.seed_cost);
    let psi: Vec<f64> = rows.iter().map(|r| r.psi.unwrap()).collect();
    assert_eq!(summarize(&psi), a.summary.psi.unwrap());
    let f = rows.iter().filter(|r| r.events.unwrap().f).count() as f64 / 400.0;
    assert_eq!(Some(f), a.summary.f_frequency);
    for (row, orig) in rows.iter().zip(&a.rows) {
        assert_eq!(row.trial, orig.trial);
        assert_eq!(row.seed_cost, orig.seed_cost);
    }
}

#[test]
fn unlabelled_instances_refuse_event_tracking() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.txt");
    std::fs::write(&path, "1 3 0\n0 1\n1 1\n3 1\n").unwrap();
    let mut c = ExperimentConfig::new(InstanceSpec::FromFile { path }, Algorithm::Plain);
    c.k = Some(2);
    c.trials = 10;
    c.track_events = true;
    assert!(run_experiment(&c).is_err());
    c.track_events = false;
    let r = run_experiment(&c).unwrap();
    // Three sites: the denominator comes from brute force.
    assert_eq!(r.summary.denominator.unwrap().value, 0.5);
    assert!(r
        .rows
        .iter()
        .all(|row| row.wasted.is_none() && row.events.is_none()));
}

#[test]
fn gaussian_ratios_are_flagged() {
    let spec: InstanceSpec = "gauss:k=4,per=10,d=2,sep=50,sd=1,seed=3".parse().unwrap();
    let mut c = ExperimentConfig::new(spec, Algorithm::Plain);
    c.trials = 50;
    let r = run_experiment(&c).unwrap();
    assert!(r.summary.denominator.unwrap().upper_bound);
    assert!(r
        .rows
        .iter()
        .all(|row| row.ratio_is_upper_bound == Some(true)));
    c.k = Some(3);
    assert!(run_experiment(&c).unwrap().summary.ratio.is_none());
}

#[test]
fn ratio_trend_over_candidates() {
    let mut template = simplex(32, greedy(1), 1500);
    template.track_events = false;
    let table = sweep(&template, &"ell=1,2,4,8,16".parse::<SweepAxis>().unwrap()).unwrap();
    let ells: Vec<f64> = table.rows.iter().map(|r| r.value).collect();
    let ratios: Vec<f64> = table.rows.iter().map(|r| r.mean_ratio.unwrap()).collect();
    let rho = spearman(&ells, &ratios);
    let p = spearman_p_positive(&ells, &ratios);
    assert!(p < 0.05, "rho = {rho}, p = {p}, ratios {ratios:?}");
}
