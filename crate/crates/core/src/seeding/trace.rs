use serde::{Deserialize, Serialize};

use crate::geometry::{CenterSet, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// First iteration: (possibly perturbed) uniform draw.
    Uniform,
    /// D² draw(s); greedy iterations record every candidate.
    Sampled,
    /// Potential was zero; fell back to a uniform draw.
    Degenerate,
}

/// Per-iteration coverage bookkeeping against the reference clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    /// `W_i`: the chosen site belongs to an already covered cluster.
    pub wasted: bool,
    /// Covered cluster labels after this iteration, ascending.
    pub covered: Vec<usize>,
    /// `u_i`, number of uncovered clusters after this iteration.
    pub uncovered: usize,
    /// `Φ(U_i, T_i)`, cost of the sites in uncovered clusters.
    pub uncovered_cost: f64,
    /// `Φ(U_i, T_i) / u_i`, or 0 once everything is covered.
    pub uncovered_avg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub chosen_site: usize,
    /// Sampled candidates in draw order (a single entry for plain steps).
    pub candidates: Vec<usize>,
    /// Fingerprint of the distribution the draws came from.
    pub distribution_hash: u64,
    pub step: StepKind,
    /// Moderately greedy only: whether the coin selected the greedy branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_branch: Option<bool>,
    /// `Φ(X, T_i)` after adding the chosen center.
    pub potential: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Coverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingTrace {
    pub records: Vec<IterationRecord>,
    /// `Ψ_k = Σ_{i≥2} W_i · Φ(U_i, T_i) / u_i`, accumulated online.
    pub psi: Option<f64>,
}

impl SeedingTrace {
    pub fn chosen_sites(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.chosen_site).collect()
    }

    pub fn wasted_count(&self) -> Option<usize> {
        self.records
            .iter()
            .map(|r| r.coverage.as_ref().map(|c| c.wasted as usize))
            .sum()
    }

    pub fn final_potential(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.potential)
    }
}

/// Tracks which reference clusters hold a center and accumulates `Ψ`.
#[derive(Debug, Clone)]
pub(crate) struct CoverageTracker<'a> {
    labels: &'a [usize],
    covered: Vec<bool>,
    covered_sites: Vec<bool>,
    psi: f64,
}

impl<'a> CoverageTracker<'a> {
    pub(crate) fn new(x: &'a Dataset) -> Option<Self> {
        let labels = x.labels()?;
        let k = x.num_clusters()?;
        Some(CoverageTracker {
            labels,
            covered: vec![false; k],
            covered_sites: vec![false; labels.len()],
            psi: 0.0,
        })
    }

    pub(crate) fn covered_sites(&self) -> &[bool] {
        &self.covered_sites
    }

    pub(crate) fn psi(&self) -> f64 {
        self.psi
    }

    /// Registers the center just added at `site`; `centers` already contains it.
    pub(crate) fn record(
        &mut self,
        iteration: usize,
        site: usize,
        x: &Dataset,
        centers: &CenterSet,
    ) -> Coverage {
        let label = self.labels[site];
        let wasted = self.covered[label];
        if !wasted {
            self.covered[label] = true;
            for (flag, &l) in self.covered_sites.iter_mut().zip(self.labels) {
                if l == label {
                    *flag = true;
                }
            }
        }
        let uncovered = self.covered.iter().filter(|c| !**c).count();
        let uncovered_cost: f64 = x
            .weights()
            .iter()
            .zip(centers.min_dist_sq())
            .zip(&self.covered_sites)
            .filter(|(_, &c)| !c)
            .map(|((&w, &d), _)| w as f64 * d)
            .sum();
        let uncovered_avg = if uncovered > 0 {
            uncovered_cost / uncovered as f64
        } else {
            0.0
        };
        if iteration >= 2 && wasted {
            self.psi += uncovered_avg;
        }
        Coverage {
            wasted,
            covered: (0..self.covered.len())
                .filter(|&c| self.covered[c])
                .collect(),
            uncovered,
            uncovered_cost,
            uncovered_avg,
        }
    }
}
