//! The noisy-sampling adversary.
//!
//! A strategy proposes one multiplier per site. Multipliers are clamped to
//! `[1 − ε₁, 1 + ε₂]` and the resulting vector `q = m·p` is renormalised by
//! moving the residual mass onto the entries that still have slack on the
//! required side, proportionally to that slack. Because `p` itself lies in
//! the band, this one-pass projection always lands on a feasible `q`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use super::distribution::SamplingDistribution;
use crate::error::{Error, Result};

/// Tolerance for the band check after projection (relative to `p_x`).
const BAND_SLACK: f64 = 1e-12;

/// What a strategy may look at when choosing multipliers.
#[derive(Debug, Clone, Copy, Default)]
pub struct StrategyView<'a> {
    /// 1-based seeding iteration the distribution belongs to (0 if detached).
    pub iteration: usize,
    /// Per-site flag: does the site's reference cluster already hold a center?
    pub covered_sites: Option<&'a [bool]>,
    /// Sites chosen in earlier iterations, in order.
    pub chosen_sites: &'a [usize],
}

type MultiplierFn = dyn Fn(&SamplingDistribution, &StrategyView<'_>) -> Vec<f64> + Send + Sync;

/// User-supplied multiplier rule; sees the full seeding history via the view.
#[derive(Clone)]
pub struct CustomStrategy {
    name: String,
    f: Arc<MultiplierFn>,
}

impl CustomStrategy {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&SamplingDistribution, &StrategyView<'_>) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        CustomStrategy {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("CustomStrategy").field(&self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum Strategy {
    Identity,
    /// Push mass onto sites whose reference cluster is already covered.
    BoostCovered,
    /// Push mass onto the single most probable site (lowest index on ties).
    BoostFar,
    /// I.i.d. uniform multipliers from the band.
    RandomWithinBounds,
    Custom(CustomStrategy),
}

impl Strategy {
    pub fn name(&self) -> &str {
        match self {
            Strategy::Identity => "identity",
            Strategy::BoostCovered => "boost_covered",
            Strategy::BoostFar => "boost_far",
            Strategy::RandomWithinBounds => "random_within_bounds",
            Strategy::Custom(c) => c.name(),
        }
    }

    /// The four built-in strategies.
    pub fn builtins() -> [Strategy; 4] {
        [
            Strategy::Identity,
            Strategy::BoostCovered,
            Strategy::BoostFar,
            Strategy::RandomWithinBounds,
        ]
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Strategy::RandomWithinBounds)
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Strategy::Identity),
            "boost_covered" => Ok(Strategy::BoostCovered),
            "boost_far" => Ok(Strategy::BoostFar),
            "random" | "random_within_bounds" => Ok(Strategy::RandomWithinBounds),
            other => Err(Error::input(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationModel {
    eps1: f64,
    eps2: f64,
    strategy: Strategy,
}

impl PerturbationModel {
    pub fn new(eps1: f64, eps2: f64, strategy: Strategy) -> Result<Self> {
        if !(0.0..1.0).contains(&eps1) {
            return Err(Error::input(format!("eps1 must lie in [0, 1), got {eps1}")));
        }
        if !(eps2 >= 0.0 && eps2.is_finite()) {
            return Err(Error::input(format!(
                "eps2 must be finite and >= 0, got {eps2}"
            )));
        }
        Ok(PerturbationModel {
            eps1,
            eps2,
            strategy,
        })
    }

    pub fn identity() -> Self {
        PerturbationModel {
            eps1: 0.0,
            eps2: 0.0,
            strategy: Strategy::Identity,
        }
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn lower(&self) -> f64 {
        1.0 - self.eps1
    }

    pub fn upper(&self) -> f64 {
        1.0 + self.eps2
    }

    fn multipliers<R: Rng + ?Sized>(
        &self,
        p: &SamplingDistribution,
        view: &StrategyView<'_>,
        rng: &mut R,
    ) -> Vec<f64> {
        let (lo, hi) = (self.lower(), self.upper());
        let n = p.len();
        match &self.strategy {
            Strategy::Identity => vec![1.0; n],
            Strategy::BoostCovered => match view.covered_sites {
                Some(mask) => mask.iter().map(|&c| if c { hi } else { lo }).collect(),
                None => vec![1.0; n],
            },
            Strategy::BoostFar => {
                let probs = p.probs();
                let target =
                    probs
                        .iter()
                        .enumerate()
                        .fold(0, |best, (i, &v)| if v > probs[best] { i } else { best });
                (0..n).map(|i| if i == target { hi } else { lo }).collect()
            }
            Strategy::RandomWithinBounds => (0..n)
                .map(|_| lo + (hi - lo) * rng.random::<f64>())
                .collect(),
            Strategy::Custom(c) => (c.f)(p, view),
        }
    }
}

/// Maps `p` to a feasible `q` with `(1 − ε₁)p ≤ q ≤ (1 + ε₂)p` and `Σq = 1`.
pub fn perturb<R: Rng + ?Sized>(
    model: &PerturbationModel,
    p: &SamplingDistribution,
    view: &StrategyView<'_>,
    rng: &mut R,
) -> Result<SamplingDistribution> {
    if matches!(model.strategy, Strategy::Identity) {
        return Ok(p.clone());
    }
    let m = model.multipliers(p, view, rng);
    if m.len() != p.len() {
        return Err(Error::input(format!(
            "strategy produced {} multipliers for {} sites",
            m.len(),
            p.len()
        )));
    }
    let q = project(p.probs(), &m, model.eps1, model.eps2)?;
    SamplingDistribution::new(q).map_err(|e| Error::Internal(format!("projection: {e}")))
}

/// Clamps multipliers to the band and redistributes the residual mass
/// proportionally to each entry's slack toward the side that needs it.
pub fn project(p: &[f64], multipliers: &[f64], eps1: f64, eps2: f64) -> Result<Vec<f64>> {
    let (lo, hi) = (1.0 - eps1, 1.0 + eps2);
    let mut q: Vec<f64> = p
        .iter()
        .zip(multipliers)
        .map(|(&px, &m)| {
            // NaN multipliers fall back to the neutral value.
            let m = if m.is_nan() { 1.0 } else { m.clamp(lo, hi) };
            m * px
        })
        .collect();
    let residual = 1.0 - q.iter().sum::<f64>();
    if residual > 0.0 {
        let slack: Vec<f64> = p
            .iter()
            .zip(&q)
            .map(|(&px, &qx)| (hi * px - qx).max(0.0))
            .collect();
        let total: f64 = slack.iter().sum();
        if total > 0.0 {
            for (qx, s) in q.iter_mut().zip(&slack) {
                *qx += residual * s / total;
            }
        }
    } else if residual < 0.0 {
        let slack: Vec<f64> = p
            .iter()
            .zip(&q)
            .map(|(&px, &qx)| (qx - lo * px).max(0.0))
            .collect();
        let total: f64 = slack.iter().sum();
        if total > 0.0 {
            for (qx, s) in q.iter_mut().zip(&slack) {
                *qx += residual * s / total;
            }
        }
    }
    for (i, (qx, &px)) in q.iter_mut().zip(p).enumerate() {
        let (a, b) = (lo * px, hi * px);
        let tol = BAND_SLACK * px + f64::MIN_POSITIVE;
        if *qx < a - tol || *qx > b + tol {
            return Err(Error::Internal(format!(
                "projected q[{i}] = {qx} outside [{a}, {b}]"
            )));
        }
        *qx = qx.clamp(a, b);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::TrialSeed;
    use proptest::prelude::{any, prop, prop_assert, prop_assume, proptest, ProptestConfig};

    fn dist(v: &[f64]) -> SamplingDistribution {
        SamplingDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_band_is_identity_for_every_strategy() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        let mask = [true, false, true, false];
        let view = StrategyView {
            iteration: 2,
            covered_sites: Some(&mask),
            chosen_sites: &[0],
        };
        let mut rng = TrialSeed::new(1, 1).iteration(1);
        for s in Strategy::builtins() {
            let m = PerturbationModel::new(0.0, 0.0, s).unwrap();
            assert_eq!(perturb(&m, &p, &view, &mut rng).unwrap(), p);
        }
    }

    #[test]
    fn boost_far_two_sites() {
        let p = dist(&[0.5, 0.5]);
        let m = PerturbationModel::new(0.2, 0.2, Strategy::BoostFar).unwrap();
        let mut rng = TrialSeed::new(1, 1).iteration(1);
        let q = perturb(&m, &p, &StrategyView::default(), &mut rng).unwrap();
        assert!((q.probs()[0] - 0.6).abs() < 1e-15);
        assert!((q.probs()[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn boost_covered_shifts_mass_to_covered() {
        let p = dist(&[0.25, 0.25, 0.25, 0.25]);
        let mask = [true, false, false, false];
        let view = StrategyView {
            iteration: 2,
            covered_sites: Some(&mask),
            chosen_sites: &[0],
        };
        let m = PerturbationModel::new(0.5, 0.5, Strategy::BoostCovered).unwrap();
        let mut rng = TrialSeed::new(1, 1).iteration(1);
        let q = perturb(&m, &p, &view, &mut rng).unwrap();
        assert!(q.probs()[0] > 0.25);
        assert!(q.probs()[1] < 0.25);
    }

    #[test]
    fn custom_strategy_is_clamped() {
        let p = dist(&[0.5, 0.25, 0.25]);
        let s = Strategy::Custom(CustomStrategy::new("wild", |p, _| vec![100.0; p.len()]));
        let m = PerturbationModel::new(0.1, 0.1, s).unwrap();
        let mut rng = TrialSeed::new(1, 1).iteration(1);
        let q = perturb(&m, &p, &StrategyView::default(), &mut rng).unwrap();
        // Clamped to uniform 1.1, then scaled back down proportionally.
        for (a, b) in q.probs().iter().zip(p.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn wrong_length_multipliers_rejected() {
        let p = dist(&[0.5, 0.5]);
        let s = Strategy::Custom(CustomStrategy::new("short", |_, _| vec![1.0]));
        let m = PerturbationModel::new(0.1, 0.1, s).unwrap();
        let mut rng = TrialSeed::new(1, 1).iteration(1);
        assert!(perturb(&m, &p, &StrategyView::default(), &mut rng).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(PerturbationModel::new(1.0, 0.0, Strategy::Identity).is_err());
        assert!(PerturbationModel::new(-0.1, 0.0, Strategy::Identity).is_err());
        assert!(PerturbationModel::new(0.0, -0.1, Strategy::Identity).is_err());
        assert!("boost_far".parse::<Strategy>().is_ok());
        assert!("nope".parse::<Strategy>().is_err());
    }

    fn arb_case() -> impl proptest::strategy::Strategy<Value = (Vec<f64>, f64, f64, usize, u64)> {
        (
            prop::collection::vec(0.0f64..10.0, 1..40),
            0.0f64..0.95,
            0.0f64..3.0,
            0usize..4,
            any::<u64>(),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn perturbed_distribution_stays_in_band((raw, eps1, eps2, which, seed) in arb_case()) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 0.0);
            let p = dist(&raw.iter().map(|v| v / total).collect::<Vec<_>>());
            let mask: Vec<bool> = (0..p.len()).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
            let view = StrategyView { iteration: 3, covered_sites: Some(&mask), chosen_sites: &[] };
            let strategy = Strategy::builtins()[which].clone();
            let model = PerturbationModel::new(eps1, eps2, strategy).unwrap();
            let mut rng = TrialSeed::new(seed, 0).iteration(1);
            let q = perturb(&model, &p, &view, &mut rng).unwrap();
            let sum: f64 = q.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            for (&qx, &px) in q.probs().iter().zip(p.probs()) {
                prop_assert!(qx >= (1.0 - eps1) * px);
                prop_assert!(qx <= (1.0 + eps2) * px);
                if px > 0.0 {
                    let r = qx / px - 1.0;
                    prop_assert!(r >= -eps1 - 1e-12 && r <= eps2 + 1e-12);
                }
            }
        }
    }
}
