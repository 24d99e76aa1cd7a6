//! Lloyd refinement of a seeded center set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mean, CenterSet, Dataset, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LloydConfig {
    pub max_iters: usize,
    /// Stop once `(Φ_prev − Φ_new) / Φ_prev` drops below this.
    pub rel_improvement_floor: f64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig {
            max_iters: 100,
            rel_improvement_floor: 1e-9,
        }
    }
}

impl LloydConfig {
    pub fn new(max_iters: usize, rel_improvement_floor: f64) -> Result<Self> {
        if max_iters < 1 {
            return Err(Error::input("max_iters must be >= 1"));
        }
        if rel_improvement_floor.is_nan() || rel_improvement_floor < 0.0 {
            return Err(Error::input("rel_improvement_floor must be >= 0"));
        }
        Ok(LloydConfig {
            max_iters,
            rel_improvement_floor,
        })
    }
}

#[derive(Debug, Clone)]
pub struct LloydOutcome {
    pub centers: CenterSet,
    pub iterations: usize,
    /// Cost before the first iteration followed by the cost after each one.
    pub cost_sequence: Vec<f64>,
}

impl LloydOutcome {
    pub fn final_cost(&self) -> f64 {
        *self.cost_sequence.last().expect("nonempty cost sequence")
    }
}

/// Alternates mean and assignment steps. A center that loses all its sites is
/// moved onto the site with the largest current weighted cost.
pub fn lloyd_refine(x: &Dataset, initial: &[Point], cfg: &LloydConfig) -> Result<LloydOutcome> {
    if initial.is_empty() {
        return Err(Error::input("Lloyd needs at least one initial center"));
    }
    let k = initial.len();
    let mut current = CenterSet::from_centers(x, initial.iter().cloned())?;
    let mut costs = vec![current.potential()];
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;

        let mut groups = vec![Vec::new(); k];
        for (site, &c) in current.nearest().iter().enumerate() {
            groups[c].push(site);
        }
        let mut next: Vec<Option<Point>> = groups
            .iter()
            .map(|g| if g.is_empty() { None } else { mean(x, g).ok() })
            .collect();

        if next.iter().any(Option::is_none) {
            let mut dist: Vec<f64> = x
                .points()
                .iter()
                .map(|p| {
                    next.iter()
                        .flatten()
                        .map(|c| p.dist_sq(c))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            for slot in next.iter_mut().filter(|s| s.is_none()) {
                let far = (0..x.len())
                    .map(|s| (s, x.weight(s) as f64 * dist[s]))
                    .fold((0, f64::NEG_INFINITY), |best, cur| {
                        if cur.1 > best.1 {
                            cur
                        } else {
                            best
                        }
                    })
                    .0;
                let c = x.point(far).clone();
                for (d, p) in dist.iter_mut().zip(x.points()) {
                    *d = d.min(p.dist_sq(&c));
                }
                *slot = Some(c);
            }
        }

        current = CenterSet::from_centers(x, next.into_iter().flatten())?;
        let prev = *costs.last().expect("nonempty");
        let now = current.potential();
        costs.push(now);
        if prev <= 0.0 || (prev - now) / prev < cfg.rel_improvement_floor {
            break;
        }
    }

    Ok(LloydOutcome {
        centers: current,
        iterations,
        cost_sequence: costs,
    })
}
