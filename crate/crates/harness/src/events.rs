use serde::{Deserialize, Serialize};

use seedlab_core::instances::SimplexSites;
use seedlab_core::seeding::SeedingTrace;
use seedlab_core::{CenterSet, Dataset, Error, Result};

/// Events of the simplex construction, indexed by iteration − 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexEvents {
    /// `F_i`: iteration `i` picked `v_k`.
    pub f_i: Vec<bool>,
    /// `G_i`: iteration `i` picked `o`.
    pub g_i: Vec<bool>,
    /// `H_i = F_i ∪ G_i`.
    pub h_i: Vec<bool>,
    /// Within the first `k − 1` iterations, the first pick from the cluster
    /// of `v_k` and `o` lands on `v_k`.
    pub f: bool,
    /// `F̄ ∩ (G_2 ∪ … ∪ G_{k−1})`.
    pub o_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    /// `W_i` per iteration; the first entry is always false.
    pub wasted: Vec<bool>,
    /// `u_i` per iteration.
    pub uncovered: Vec<usize>,
    /// `Φ(U_i, T_i)` per iteration.
    pub uncovered_cost: Vec<f64>,
    pub wasted_count: usize,
    pub covered_clusters: usize,
    /// `Ψ_k`, recomputed.
    pub psi: f64,
    pub simplex: Option<SimplexEvents>,
}

/// Replays a trace against the dataset's reference labels and recomputes
/// coverage, `Ψ_k` and, for the simplex instance, the `F`/`G`/`H` events.
pub fn verify_trace_events(
    trace: &SeedingTrace,
    x: &Dataset,
    simplex: Option<SimplexSites>,
) -> Result<EventSummary> {
    let labels = x
        .labels()
        .ok_or_else(|| Error::Input("event tracking needs a labelled dataset".into()))?;
    let clusters = x.num_clusters().unwrap_or(0);
    let sites = trace.chosen_sites();
    if let Some(&bad) = sites.iter().find(|&&s| s >= x.len()) {
        return Err(Error::Input(format!(
            "trace site {bad} is outside the dataset"
        )));
    }
    if let Some(s) = simplex {
        if s.o >= x.len() || labels[s.o] != labels[s.vk] {
            return Err(Error::Input(
                "simplex sites do not match the dataset labels".into(),
            ));
        }
    }

    let mut covered = vec![false; clusters];
    let mut centers = CenterSet::empty(x);
    let mut wasted = Vec::with_capacity(sites.len());
    let mut uncovered = Vec::with_capacity(sites.len());
    let mut uncovered_cost = Vec::with_capacity(sites.len());
    let mut psi = 0.0;
    for (idx, &site) in sites.iter().enumerate() {
        let w = covered[labels[site]];
        covered[labels[site]] = true;
        centers.push(x, x.point(site).clone())?;
        let u = covered.iter().filter(|c| !**c).count();
        let cost: f64 = (0..x.len())
            .filter(|&s| !covered[labels[s]])
            .map(|s| x.weight(s) as f64 * centers.min_dist_sq()[s])
            .sum();
        if idx >= 1 && w && u > 0 {
            psi += cost / u as f64;
        }
        wasted.push(w);
        uncovered.push(u);
        uncovered_cost.push(cost);
    }

    let simplex = simplex.map(|s| {
        let k = sites.len();
        let f_i: Vec<bool> = sites.iter().map(|&c| c == s.vk).collect();
        let g_i: Vec<bool> = sites.iter().map(|&c| c == s.o).collect();
        let h_i: Vec<bool> = f_i.iter().zip(&g_i).map(|(f, g)| *f || *g).collect();
        let first_h = h_i.iter().position(|&h| h);
        let f = matches!(first_h, Some(i) if i + 1 < k && f_i[i]);
        let g_window = g_i
            .iter()
            .enumerate()
            .any(|(i, &g)| g && (2..k).contains(&(i + 1)));
        SimplexEvents {
            f,
            o_hit: !f && g_window,
            f_i,
            g_i,
            h_i,
        }
    });

    Ok(EventSummary {
        wasted_count: wasted.iter().filter(|w| **w).count(),
        covered_clusters: covered.iter().filter(|c| **c).count(),
        wasted,
        uncovered,
        uncovered_cost,
        psi,
        simplex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use seedlab_core::instances::simplex_lower_bound;
    use seedlab_core::rng::TrialSeed;
    use seedlab_core::seeding::{greedy_seed, kmeanspp_seed, IterationRecord, StepKind};

    fn fake_trace(sites: &[usize]) -> SeedingTrace {
        SeedingTrace {
            records: sites
                .iter()
                .enumerate()
                .map(|(i, &s)| IterationRecord {
                    iteration: i + 1,
                    chosen_site: s,
                    candidates: vec![s],
                    distribution_hash: 0,
                    step: StepKind::Sampled,
                    greedy_branch: None,
                    potential: 0.0,
                    coverage: None,
                })
                .collect(),
            psi: None,
        }
    }

    #[test]
    fn distinct_clusters_waste_nothing() {
        let x = simplex_lower_bound(5).unwrap();
        let e = verify_trace_events(&fake_trace(&[0, 1, 2, 3, 4]), &x, None).unwrap();
        assert_eq!(e.wasted_count, 0);
        assert_eq!(e.psi, 0.0);
        assert_eq!(e.covered_clusters, 5);
        assert_eq!(e.uncovered, vec![4, 3, 2, 1, 0]);
    }

    #[test]
    fn o_in_iteration_three_without_vk() {
        let k = 6;
        let x = simplex_lower_bound(k).unwrap();
        let s = SimplexSites::for_k(k);
        let e = verify_trace_events(&fake_trace(&[0, 1, s.o, 2, s.vk, 3]), &x, Some(s)).unwrap();
        let ev = e.simplex.unwrap();
        assert!(ev.g_i[2] && !ev.f_i[0] && !ev.f_i[1]);
        assert!(!ev.f);
        assert!(ev.o_hit);
        // v_k after o lands in an already covered cluster.
        assert!(e.wasted[4]);
    }

    #[test]
    fn vk_first_sets_f() {
        let k = 5;
        let x = simplex_lower_bound(k).unwrap();
        let s = SimplexSites::for_k(k);
        let ev = verify_trace_events(&fake_trace(&[1, s.vk, s.o, 0, 2]), &x, Some(s))
            .unwrap()
            .simplex
            .unwrap();
        assert!(ev.f && !ev.o_hit);
        // o only in the last iteration is outside the window.
        let ev = verify_trace_events(&fake_trace(&[1, 0, 2, 3, s.o]), &x, Some(s))
            .unwrap()
            .simplex
            .unwrap();
        assert!(!ev.f && !ev.o_hit);
        // v_k only in the last iteration does not count towards F.
        let ev = verify_trace_events(&fake_trace(&[1, 0, 2, 3, s.vk]), &x, Some(s))
            .unwrap()
            .simplex
            .unwrap();
        assert!(!ev.f);
    }

    #[test]
    fn psi_matches_online_value() {
        let k = 8;
        let x = simplex_lower_bound(k).unwrap();
        for t in 0..300 {
            let seed = TrialSeed::new(4, t);
            let s = if t % 2 == 0 {
                kmeanspp_seed(&x, k, &seed).unwrap()
            } else {
                greedy_seed(&x, k, 3, &seed).unwrap()
            };
            let e = verify_trace_events(&s.trace, &x, Some(SimplexSites::for_k(k))).unwrap();
            let online = s.trace.psi.unwrap();
            assert!(
                (e.psi - online).abs() <= 1e-9 * online.max(1e-300),
                "{} vs {online}",
                e.psi
            );
            assert_eq!(Some(e.wasted_count), s.trace.wasted_count());
            assert_eq!(e.wasted_count, k - e.covered_clusters);
        }
    }

    #[test]
    fn unlabelled_or_mismatched_inputs_fail() {
        let x = Dataset::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(verify_trace_events(&fake_trace(&[0]), &x, None).is_err());
        let y = simplex_lower_bound(4).unwrap();
        assert!(verify_trace_events(&fake_trace(&[9]), &y, None).is_err());
        let wrong = SimplexSites { vk: 0, o: 4 };
        assert!(verify_trace_events(&fake_trace(&[1]), &y, Some(wrong)).is_err());
    }
}
