//! Points, weighted datasets and the k-means cost.
//!
//! Coincident input points are stored once as a *site* carrying an integer
//! weight. Every cost in this module is the weighted sum
//! `Σ wᵢ · min_c ‖xᵢ − c‖²`, with squared distances evaluated coordinate by
//! coordinate (never through `‖a‖² + ‖b‖² − 2a·b`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared Euclidean distance between two coordinate slices of equal length.
#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// A point in `ℝ^d` with finite coordinates and `d ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("point must have at least one coordinate"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        dist_sq(&self.0, &other.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Stored knowledge about the optimal clustering cost of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalCost {
    pub value: f64,
    /// `false` when `value` is only the cost of some known clustering, i.e.
    /// an upper bound on the optimum.
    pub exact: bool,
}

/// A weighted point set, optionally labelled with a reference clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<Point>,
    weights: Vec<u64>,
    dim: usize,
    optimal_labels: Option<Vec<usize>>,
    optimal_cost: Option<OptimalCost>,
}

impl Dataset {
    pub fn new(points: Vec<Point>, weights: Vec<u64>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::input("dataset must contain at least one site"));
        };
        let dim = first.dim();
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.dim() != dim) {
            return Err(Error::input(format!(
                "site {i} has dimension {} but dataset dimension is {dim}",
                p.dim()
            )));
        }
        if weights.len() != points.len() {
            return Err(Error::input(format!(
                "{} weights for {} sites",
                weights.len(),
                points.len()
            )));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::input(format!("site {i} has zero weight")));
        }
        Ok(Dataset {
            points,
            weights,
            dim,
            optimal_labels: None,
            optimal_cost: None,
        })
    }

    /// Unit-weight dataset from raw coordinate rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.as_ref().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let n = points.len();
        Dataset::new(points, vec![1; n])
    }

    /// Attaches a reference clustering. Labels must cover `0..k*` without gaps.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::input(format!(
                "{} labels for {} sites",
                labels.len(),
                self.points.len()
            )));
        }
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::input(format!(
                "labels are not contiguous: cluster {missing} is empty"
            )));
        }
        self.optimal_labels = Some(labels);
        Ok(self)
    }

    pub fn with_optimal_cost(mut self, value: f64, exact: bool) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::input(format!("invalid optimal cost {value}")));
        }
        self.optimal_cost = Some(OptimalCost { value, exact });
        Ok(self)
    }

    pub fn without_optimal_cost(mut self) -> Self {
        self.optimal_cost = None;
        self
    }

    /// Number of distinct sites.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total multiplicity `n = Σ weights`.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, site: usize) -> &Point {
        &self.points[site]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, site: usize) -> u64 {
        self.weights[site]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.optimal_labels.as_deref()
    }

    /// Number of clusters in the reference labelling, if any.
    pub fn num_clusters(&self) -> Option<usize> {
        self.labels().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    pub fn optimal_cost(&self) -> Option<OptimalCost> {
        self.optimal_cost
    }

    /// Sum over clusters of the 1-means cost about each cluster's mean.
    pub fn labeling_cost(&self, labels: &[usize]) -> Result<f64> {
        if labels.len() != self.len() {
            return Err(Error::input("labeling length differs from site count"));
        }
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); k];
        for (site, &l) in labels.iter().enumerate() {
            members[l].push(site);
        }
        let mut total = 0.0;
        for m in members.iter().filter(|m| !m.is_empty()) {
            let mu = mean(self, m)?;
            total += subset_cost(self, m, &mu);
        }
        Ok(total)
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::input(format!(
                "point has dimension {} but dataset dimension is {}",
                p.dim(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// `Φ(X, C) = Σ wᵢ · min_{c∈C} ‖xᵢ − c‖²`.
pub fn cost(x: &Dataset, centers: &[Point]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::input("cost requires at least one center"));
    }
    for c in centers {
        x.check_dim(c)?;
    }
    Ok(x.points
        .iter()
        .zip(&x.weights)
        .map(|(p, &w)| {
            let d = centers
                .iter()
                .map(|c| p.dist_sq(c))
                .fold(f64::INFINITY, f64::min);
            w as f64 * d
        })
        .sum())
}

/// Weighted mean of the given sites.
pub fn mean(x: &Dataset, sites: &[usize]) -> Result<Point> {
    if sites.is_empty() {
        return Err(Error::input("mean of an empty subset"));
    }
    let mut acc = vec![0.0; x.dim];
    let mut total = 0.0;
    for &s in sites {
        let w = x.weights[s] as f64;
        total += w;
        for (a, c) in acc.iter_mut().zip(x.points[s].coords()) {
            *a += w * c;
        }
    }
    for a in &mut acc {
        *a /= total;
    }
    Point::new(acc)
}

/// Weighted cost of a subset of sites against a single center.
pub fn subset_cost(x: &Dataset, sites: &[usize], center: &Point) -> f64 {
    sites
        .iter()
        .map(|&s| x.weights[s] as f64 * x.points[s].dist_sq(center))
        .sum()
}

/// Splits `Φ(S, {z})` into `(OPT₁(S), |S| · ‖z − μ(S)‖²)` for the subset `S`
/// of sites, where `|S|` counts multiplicity.
pub fn cost_decomposition(x: &Dataset, sites: &[usize], z: &Point) -> Result<(f64, f64)> {
    x.check_dim(z)?;
    let mu = mean(x, sites)?;
    let opt1 = subset_cost(x, sites, &mu);
    let size: u64 = sites.iter().map(|&s| x.weights[s]).sum();
    Ok((opt1, size as f64 * z.dist_sq(&mu)))
}

/// An ordered center list with cached nearest-center distances.
///
/// `min_dist_sq[i]` is `+∞` and the potential is `+∞` while the set is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    centers: Vec<Point>,
    min_dist_sq: Vec<f64>,
    nearest: Vec<usize>,
    total_potential: f64,
}

impl CenterSet {
    pub fn empty(x: &Dataset) -> Self {
        CenterSet {
            centers: Vec::new(),
            min_dist_sq: vec![f64::INFINITY; x.len()],
            nearest: vec![usize::MAX; x.len()],
            total_potential: f64::INFINITY,
        }
    }

    pub fn from_centers(x: &Dataset, centers: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = CenterSet::empty(x);
        for c in centers {
            set.push(x, c)?;
        }
        Ok(set)
    }

    /// Appends `u`, updating the cache in `O(n·d)`.
    pub fn push(&mut self, x: &Dataset, u: Point) -> Result<()> {
        x.check_dim(&u)?;
        if self.min_dist_sq.len() != x.len() {
            return Err(Error::input("center set was built for a different dataset"));
        }
        let idx = self.centers.len();
        for ((p, d), near) in x
            .points
            .iter()
            .zip(&mut self.min_dist_sq)
            .zip(&mut self.nearest)
        {
            let nd = p.dist_sq(&u);
            if nd < *d {
                *d = nd;
                *near = idx;
            }
        }
        self.centers.push(u);
        self.total_potential = weighted_sum(&x.weights, &self.min_dist_sq);
        Ok(())
    }

    /// `Φ(X, C ∪ {u})` without mutating the set.
    pub fn potential_with(&self, x: &Dataset, u: &Point) -> Result<f64> {
        x.check_dim(u)?;
        Ok(x.points
            .iter()
            .zip(&x.weights)
            .zip(&self.min_dist_sq)
            .map(|((p, &w), &d)| w as f64 * d.min(p.dist_sq(u)))
            .sum())
    }

    /// `Φ(X, C) − Φ(X, C ∪ {u})`.
    pub fn candidate_delta(&self, x: &Dataset, u: &Point) -> Result<f64> {
        if self.centers.is_empty() {
            return Err(Error::input("candidate delta needs a nonempty center set"));
        }
        let after = self.potential_with(x, u)?;
        Ok((self.total_potential - after).max(0.0))
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn min_dist_sq(&self) -> &[f64] {
        &self.min_dist_sq
    }

    /// Index (into [`centers`](Self::centers)) of each site's nearest center;
    /// ties go to the earlier center.
    pub fn nearest(&self) -> &[usize] {
        &self.nearest
    }

    pub fn potential(&self) -> f64 {
        self.total_potential
    }

    pub fn into_centers(self) -> Vec<Point> {
        self.centers
    }
}

fn weighted_sum(weights: &[u64], values: &[f64]) -> f64 {
    weights
        .iter()
        .zip(values)
        .map(|(&w, &v)| w as f64 * v)
        .sum()
}
