//! Instance generators.

mod io;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use io::{format_dataset, parse_dataset, read_dataset, write_dataset};

use crate::error::{Error, Result};
use crate::geometry::{Dataset, Point};
use crate::oracle::{brute_force_opt, EnumerationBudget};
use crate::rng::{Stream, TrialSeed};

/// Site indices of the two special locations in [`simplex_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexSites {
    /// The under-weighted vertex `v_k`.
    pub vk: usize,
    /// The centroid `o`.
    pub o: usize,
}

impl SimplexSites {
    pub fn for_k(k: usize) -> Self {
        SimplexSites { vk: k - 1, o: k }
    }
}

/// Regular `(k−1)`-simplex with side `√2` embedded in `ℝ^k` via the unit
/// vectors, plus its centroid `o = (1/k, …, 1/k)`.
///
/// Sites `0..k−1` are `v_1..v_{k−1}` with weight `k`, site `k−1` is `v_k`
/// with weight `k − 1` and site `k` is `o` with weight 1. The reference
/// clustering puts `o` together with `v_k`; its cost `((k−1)/k)²` is optimal.
pub fn simplex_lower_bound(k: usize) -> Result<Dataset> {
    if k < 4 {
        return Err(Error::input(format!(
            "simplex instance needs k >= 4, got {k}"
        )));
    }
    let mut points = Vec::with_capacity(k + 1);
    let mut weights = Vec::with_capacity(k + 1);
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        points.push(Point::new(v)?);
        weights.push(if i + 1 < k { k as u64 } else { k as u64 - 1 });
    }
    points.push(Point::new(vec![1.0 / k as f64; k])?);
    weights.push(1);
    let mut labels: Vec<usize> = (0..k).collect();
    labels.push(k - 1);

    let x = Dataset::new(points, weights)?;
    let opt = x.labeling_cost(&labels)?;
    x.with_labels(labels)?.with_optimal_cost(opt, true)
}

/// Sites `a = −1` (weight `n`), `b = 0` (weight 1), `c = +1` (weight `n`).
/// The stored optimum is the exact 2-clustering cost found by enumeration.
pub fn three_point_line(n: u64) -> Result<Dataset> {
    if n < 1 {
        return Err(Error::input("three_point_line needs n >= 1"));
    }
    let points = [-1.0, 0.0, 1.0]
        .into_iter()
        .map(|v| Point::new(vec![v]))
        .collect::<Result<Vec<_>>>()?;
    let x = Dataset::new(points, vec![n, 1, n])?;
    let (opt, labels) = brute_force_opt(&x, 2, &EnumerationBudget::default())?;
    x.with_labels(labels)?.with_optimal_cost(opt, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureParams {
    pub k: usize,
    pub per_cluster: usize,
    pub d: usize,
    pub separation: f64,
    pub stddev: f64,
    pub seed: u64,
}

/// `k` spherical Gaussian blobs whose means sit on a cubic grid with spacing
/// `separation`. Labels are the generating components; the stored optimum is
/// the cost of that labelling and is flagged as an upper bound.
pub fn gaussian_mixture(p: &GaussianMixtureParams) -> Result<Dataset> {
    if p.k < 1 || p.per_cluster < 1 || p.d < 1 {
        return Err(Error::input("k, per_cluster and d must be >= 1"));
    }
    if !(p.separation >= 0.0 && p.separation.is_finite()) {
        return Err(Error::input("separation must be finite and >= 0"));
    }
    if !(p.stddev > 0.0 && p.stddev.is_finite()) {
        return Err(Error::input("stddev must be finite and > 0"));
    }
    let mut side = 1usize;
    while side.checked_pow(p.d as u32).is_some_and(|v| v < p.k) {
        side += 1;
    }
    let mut rng = TrialSeed::new(p.seed, 0).rng(Stream::Aux, 0);
    let mut points = Vec::with_capacity(p.k * p.per_cluster);
    let mut labels = Vec::with_capacity(p.k * p.per_cluster);
    for j in 0..p.k {
        let mut rem = j;
        let center: Vec<f64> = (0..p.d)
            .map(|_| {
                let digit = rem % side;
                rem /= side;
                digit as f64 * p.separation
            })
            .collect();
        for _ in 0..p.per_cluster {
            let coords = center
                .iter()
                .map(|c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + p.stddev * z
                })
                .collect();
            points.push(Point::new(coords)?);
            labels.push(j);
        }
    }
    let n = points.len();
    let x = Dataset::new(points, vec![1; n])?;
    let ub = x.labeling_cost(&labels)?;
    x.with_labels(labels)?.with_optimal_cost(ub, false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    SimplexLowerBound { k: usize },
    ThreePointLine { n: u64 },
    GaussianMixture(GaussianMixtureParams),
    FromFile { path: PathBuf },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Dataset> {
        match self {
            InstanceSpec::SimplexLowerBound { k } => simplex_lower_bound(*k),
            InstanceSpec::ThreePointLine { n } => three_point_line(*n),
            InstanceSpec::GaussianMixture(p) => gaussian_mixture(p),
            InstanceSpec::FromFile { path } => read_dataset(path),
        }
    }

    /// Positions of `v_k` and `o` when this is the simplex instance.
    pub fn simplex_sites(&self) -> Option<SimplexSites> {
        match self {
            InstanceSpec::SimplexLowerBound { k } => Some(SimplexSites::for_k(*k)),
            _ => None,
        }
    }

    /// The cluster count the instance was built for, if it has one.
    pub fn natural_k(&self) -> Option<usize> {
        match self {
            InstanceSpec::SimplexLowerBound { k } => Some(*k),
            InstanceSpec::ThreePointLine { .. } => Some(2),
            InstanceSpec::GaussianMixture(p) => Some(p.k),
            InstanceSpec::FromFile { .. } => None,
        }
    }
}

fn kv_pairs(s: &str) -> Result<Vec<(&str, &str)>> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::input(format!("expected key=value, got '{t}'")))
        })
        .collect()
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::input(format!("bad value '{v}' for '{key}'")))
}

/// Accepted forms: `simplex:k=32`, `line:n=1000`,
/// `gauss:k=16,per=50,d=2,sep=100,sd=1,seed=7`, `file:<path>`.
impl FromStr for InstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "simplex" => {
                let mut k = None;
                for (key, v) in kv_pairs(rest)? {
                    match key {
                        "k" => k = Some(num(key, v)?),
                        _ => {
                            return Err(Error::input(format!("unknown simplex parameter '{key}'")))
                        }
                    }
                }
                Ok(InstanceSpec::SimplexLowerBound {
                    k: k.ok_or_else(|| Error::input("simplex needs k"))?,
                })
            }
            "line" => {
                let mut n = None;
                for (key, v) in kv_pairs(rest)? {
                    match key {
                        "n" => n = Some(num(key, v)?),
                        _ => return Err(Error::input(format!("unknown line parameter '{key}'"))),
                    }
                }
                Ok(InstanceSpec::ThreePointLine {
                    n: n.ok_or_else(|| Error::input("line needs n"))?,
                })
            }
            "gauss" => {
                let mut p = GaussianMixtureParams {
                    k: 0,
                    per_cluster: 50,
                    d: 2,
                    separation: 100.0,
                    stddev: 1.0,
                    seed: 0,
                };
                for (key, v) in kv_pairs(rest)? {
                    match key {
                        "k" => p.k = num(key, v)?,
                        "per" => p.per_cluster = num(key, v)?,
                        "d" => p.d = num(key, v)?,
                        "sep" => p.separation = num(key, v)?,
                        "sd" => p.stddev = num(key, v)?,
                        "seed" => p.seed = num(key, v)?,
                        _ => return Err(Error::input(format!("unknown gauss parameter '{key}'"))),
                    }
                }
                if p.k == 0 {
                    return Err(Error::input("gauss needs k >= 1"));
                }
                Ok(InstanceSpec::GaussianMixture(p))
            }
            "file" if !rest.is_empty() => Ok(InstanceSpec::FromFile {
                path: PathBuf::from(rest),
            }),
            _ => Err(Error::input(format!("unrecognised instance '{s}'"))),
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::SimplexLowerBound { k } => write!(f, "simplex:k={k}"),
            InstanceSpec::ThreePointLine { n } => write!(f, "line:n={n}"),
            InstanceSpec::GaussianMixture(p) => write!(
                f,
                "gauss:k={},per={},d={},sep={},sd={},seed={}",
                p.k, p.per_cluster, p.d, p.separation, p.stddev, p.seed
            ),
            InstanceSpec::FromFile { path } => write!(f, "file:{}", path.display()),
        }
    }
}
