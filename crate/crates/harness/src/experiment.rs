use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use seedlab_core::lloyd::lloyd_refine;
use seedlab_core::oracle::{brute_force_opt, EnumerationBudget};
use seedlab_core::rng::TrialSeed;
use seedlab_core::seeding::seed_with;
use seedlab_core::stats::{summarize, Summary};
use seedlab_core::{Dataset, Error, Result};

use crate::config::ExperimentConfig;
use crate::events::verify_trace_events;

/// Largest instance for which the denominator falls back to brute force.
pub const ORACLE_MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowEvents {
    #[serde(rename = "F")]
    pub f: bool,
    pub o_hit: bool,
}

/// One JSON line of `trials.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lloyd_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// The denominator of `ratio` is only an upper bound on the optimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_is_upper_bound: Option<bool>,
    pub wasted: Option<usize>,
    pub psi: Option<f64>,
    pub events: Option<RowEvents>,
    /// Chosen sites in order; kept for replay, not written to the JSONL rows.
    #[serde(skip)]
    pub chosen_sites: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Denominator {
    pub value: f64,
    pub upper_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: usize,
    pub k: usize,
    pub seed_cost: Summary,
    pub lloyd_cost: Option<Summary>,
    pub ratio: Option<Summary>,
    pub denominator: Option<Denominator>,
    pub wasted: Option<Summary>,
    pub psi: Option<Summary>,
    pub f_frequency: Option<f64>,
    pub o_hit_frequency: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub summary: Aggregates,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

/// Optimum used for ratios: an exact stored value, brute force on tiny
/// instances, or the stored reference cost flagged as an upper bound.
pub fn ratio_denominator(x: &Dataset, k: usize) -> Result<Option<Denominator>> {
    if let (Some(opt), Some(clusters)) = (x.optimal_cost(), x.num_clusters()) {
        if k == clusters && opt.exact {
            return Ok(Some(Denominator {
                value: opt.value,
                upper_bound: false,
            }));
        }
        if x.len() > ORACLE_MAX_SITES && k >= clusters {
            // OPT_k never exceeds the reference clustering's cost once k
            // reaches its cluster count.
            return Ok(Some(Denominator {
                value: opt.value,
                upper_bound: true,
            }));
        }
    }
    if x.len() <= ORACLE_MAX_SITES {
        let (value, _) = brute_force_opt(x, k, &EnumerationBudget::default())?;
        return Ok(Some(Denominator {
            value,
            upper_bound: false,
        }));
    }
    Ok(None)
}

pub(crate) fn aggregate(
    rows: &[TrialRow],
    k: usize,
    denominator: Option<Denominator>,
) -> Aggregates {
    let col = |f: &dyn Fn(&TrialRow) -> Option<f64>| -> Option<Summary> {
        let v: Vec<f64> = rows.iter().filter_map(f).collect();
        (!v.is_empty() && v.len() == rows.len()).then(|| summarize(&v))
    };
    let freq = |f: &dyn Fn(&RowEvents) -> bool| -> Option<f64> {
        let ev: Vec<&RowEvents> = rows.iter().filter_map(|r| r.events.as_ref()).collect();
        (!ev.is_empty()).then(|| ev.iter().filter(|e| f(e)).count() as f64 / ev.len() as f64)
    };
    Aggregates {
        trials: rows.len(),
        k,
        seed_cost: summarize(&rows.iter().map(|r| r.seed_cost).collect::<Vec<_>>()),
        lloyd_cost: col(&|r| r.lloyd_cost),
        ratio: col(&|r| r.ratio),
        denominator,
        wasted: col(&|r| r.wasted.map(|w| w as f64)),
        psi: col(&|r| r.psi),
        f_frequency: freq(&|e| e.f),
        o_hit_frequency: freq(&|e| e.o_hit),
    }
}

/// Runs all trials (in parallel, each on its own substreams) and, when an
/// output directory is set, writes `trials.jsonl` and `summary.json`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let x = cfg.instance.build()?;
    run_on_dataset(cfg, &x)
}

/// Same as [`run_experiment`] with the dataset already built.
pub fn run_on_dataset(cfg: &ExperimentConfig, x: &Dataset) -> Result<ExperimentReport> {
    cfg.validate()?;
    let k = cfg
        .k
        .or_else(|| x.num_clusters())
        .or_else(|| cfg.instance.natural_k())
        .ok_or_else(|| Error::Input("k is required for this instance".into()))?;
    if cfg.track_events && x.labels().is_none() {
        return Err(Error::Input(
            "event tracking needs a labelled instance".into(),
        ));
    }
    let simplex = cfg
        .instance
        .simplex_sites()
        .filter(|_| x.num_clusters() == Some(k));
    let variant = cfg.algorithm.to_variant()?;
    let denominator = ratio_denominator(x, k)?;

    let rows: Vec<TrialRow> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<TrialRow> {
            let s = seed_with(x, k, &variant, &TrialSeed::new(cfg.base_seed, t))?;
            let seed_cost = s.centers.potential();
            let lloyd_cost = match &cfg.lloyd {
                Some(l) => Some(lloyd_refine(x, s.centers.centers(), l)?.final_cost()),
                None => None,
            };
            let final_cost = lloyd_cost.unwrap_or(seed_cost);
            let ratio = denominator
                .filter(|d| d.value > 0.0)
                .map(|d| final_cost / d.value);
            let (wasted, psi, events) = if cfg.track_events {
                let e = verify_trace_events(&s.trace, x, simplex)?;
                let events = e.simplex.as_ref().map(|s| RowEvents {
                    f: s.f,
                    o_hit: s.o_hit,
                });
                (Some(e.wasted_count), s.trace.psi, events)
            } else {
                (None, None, None)
            };
            Ok(TrialRow {
                trial: t,
                seed_cost,
                lloyd_cost,
                ratio,
                ratio_is_upper_bound: ratio.and(denominator.map(|d| d.upper_bound)),
                wasted,
                psi,
                events,
                chosen_sites: s.trace.chosen_sites(),
            })
        })
        .collect::<Result<_>>()?;

    let report = ExperimentReport {
        config: cfg.clone(),
        summary: aggregate(&rows, k, denominator),
        rows,
    };
    if let Some(dir) = &cfg.out {
        write_report(&report, dir)?;
    }
    Ok(report)
}

pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(fs::File::create(dir.join("trials.jsonl"))?);
    for row in &report.rows {
        serde_json::to_writer(&mut w, row).map_err(|e| Error::Internal(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    let summary =
        serde_json::to_string_pretty(report).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(dir.join("summary.json"), summary + "\n")?;
    Ok(())
}

/// Reads `trials.jsonl` back.
pub fn read_rows(path: &Path) -> Result<Vec<TrialRow>> {
    fs::read_to_string(path)?
        .lines()
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}

impl ExperimentReport {
    /// Human-readable summary.
    pub fn render(&self) -> String {
        let s = &self.summary;
        let mut out = format!(
            "{} on {} with k = {}, {} trials (seed {})\n",
            self.config.algorithm.name(),
            self.config.instance,
            s.k,
            s.trials,
            self.config.base_seed
        );
        let line = |name: &str, m: &Summary| {
            format!(
                "  {name:<12} mean {:.6e}  sd {:.3e}  95% CI [{:.6e}, {:.6e}]\n",
                m.mean, m.std, m.ci95.0, m.ci95.1
            )
        };
        out += &line("seed cost", &s.seed_cost);
        if let Some(l) = &s.lloyd_cost {
            out += &line("lloyd cost", l);
        }
        if let (Some(r), Some(d)) = (&s.ratio, &s.denominator) {
            out += &line("ratio", r);
            if d.upper_bound {
                out += "  (ratio denominator is an upper bound on the optimum)\n";
            }
        }
        if let Some(w) = &s.wasted {
            out += &line("wasted", w);
        }
        if let Some(p) = &s.psi {
            out += &line("psi", p);
        }
        if let (Some(f), Some(o)) = (s.f_frequency, s.o_hit_frequency) {
            out += &format!("  F frequency {f:.4}  o-hit frequency {o:.4}\n");
        }
        out
    }
}
