use super::EnumerationBudget;
use crate::error::{Error, Result};
use crate::geometry::Dataset;

/// Number of partitions of `n` items into at most `k` nonempty parts,
/// saturating at `u128::MAX`.
pub fn partitions_up_to(n: usize, k: usize) -> u128 {
    // Stirling numbers of the second kind, row by row.
    let k = k.min(n);
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..=k).rev() {
            row[j] = (j as u128)
                .saturating_mul(row[j])
                .saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[1..].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

#[derive(Clone)]
struct Part {
    weight: f64,
    mean: Vec<f64>,
    cost: f64,
}

impl Part {
    fn empty(d: usize) -> Self {
        Part {
            weight: 0.0,
            mean: vec![0.0; d],
            cost: 0.0,
        }
    }

    /// Adds a weighted point; the cost grows by `W·w/(W+w) · ‖x − μ‖²`.
    fn add(&mut self, x: &[f64], w: f64) {
        let total = self.weight + w;
        if self.weight == 0.0 {
            self.mean.copy_from_slice(x);
        } else {
            let d2: f64 = x
                .iter()
                .zip(&self.mean)
                .map(|(a, m)| (a - m) * (a - m))
                .sum();
            self.cost += self.weight * w / total * d2;
            for (m, a) in self.mean.iter_mut().zip(x) {
                *m += w / total * (a - *m);
            }
        }
        self.weight = total;
    }
}

struct Search<'a> {
    x: &'a Dataset,
    k: usize,
    parts: Vec<Part>,
    labels: Vec<usize>,
    best_cost: f64,
    best_labels: Vec<usize>,
}

impl Search<'_> {
    fn partial_cost(&self) -> f64 {
        self.parts.iter().map(|p| p.cost).sum()
    }

    fn visit(&mut self, site: usize, used: usize) {
        let partial = self.partial_cost();
        // Adding sites never lowers a part's cost, so `partial` is a lower bound.
        if partial > self.best_cost * (1.0 + 1e-12) {
            return;
        }
        if site == self.x.len() {
            if partial < self.best_cost {
                self.best_cost = partial;
                self.best_labels.clone_from(&self.labels);
            }
            return;
        }
        let coords = self.x.point(site).coords();
        let w = self.x.weight(site) as f64;
        let limit = (used + 1).min(self.k);
        for part in 0..limit {
            let saved = self.parts[part].clone();
            self.parts[part].add(coords, w);
            self.labels[site] = part;
            self.visit(site + 1, used.max(part + 1));
            self.parts[part] = saved;
        }
    }
}

/// Exact `OPT_k` by enumerating set partitions of the sites into at most `k`
/// parts (restricted growth strings), pruned by the best cost found so far.
///
/// Returns the optimum and a canonical labelling (labels `0..parts`).
pub fn brute_force_opt(
    x: &Dataset,
    k: usize,
    budget: &EnumerationBudget,
) -> Result<(f64, Vec<usize>)> {
    if k < 1 {
        return Err(Error::input("k must be >= 1"));
    }
    let n = x.len();
    if k >= n {
        return Ok((0.0, (0..n).collect()));
    }
    let count = partitions_up_to(n, k);
    if count > budget.max_outcomes as u128 {
        return Err(Error::BudgetExceeded {
            budget: budget.max_outcomes,
            what: format!("{count} partitions of {n} sites into <= {k} parts"),
        });
    }
    let mut search = Search {
        x,
        k,
        parts: vec![Part::empty(x.dim()); k],
        labels: vec![0; n],
        best_cost: f64::INFINITY,
        best_labels: Vec::new(),
    };
    search.visit(0, 0);
    let labels = search.best_labels;
    // Report the cost evaluated directly about each part's mean.
    let exact = x.labeling_cost(&labels)?;
    Ok((exact, labels))
}
