use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use seedlab_core::{Error, Result};

use crate::config::{Algorithm, ExperimentConfig};
use crate::experiment::{run_experiment, ExperimentReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisParam {
    Ell,
    Eps1,
    Eps2,
    PMix,
    K,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::Ell => "ell",
            AxisParam::Eps1 => "eps1",
            AxisParam::Eps2 => "eps2",
            AxisParam::PMix => "pmix",
            AxisParam::K => "k",
        }
    }
}

/// One swept parameter and its values, written `ell=1,2,4`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, list) = s.split_once('=').ok_or_else(|| {
            Error::Input(format!("axis must look like name=v1,v2,..., got {s:?}"))
        })?;
        let param = match name.trim() {
            "ell" => AxisParam::Ell,
            "eps1" => AxisParam::Eps1,
            "eps2" => AxisParam::Eps2,
            "pmix" | "p_mix" => AxisParam::PMix,
            "k" => AxisParam::K,
            other => return Err(Error::Input(format!("cannot sweep over {other:?}"))),
        };
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Input(format!("bad axis value {v:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(SweepAxis { param, values })
    }
}

fn whole(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Error::Input(format!(
            "{what} must be a positive integer, got {v}"
        )))
    }
}

/// `template` with the axis parameter set to `v`.
pub fn apply(template: &ExperimentConfig, param: AxisParam, v: f64) -> Result<ExperimentConfig> {
    let mut cfg = template.clone();
    let mismatch = || {
        Error::Input(format!(
            "parameter {} does not apply to algorithm {}",
            param.name(),
            template.algorithm.name()
        ))
    };
    match (param, &mut cfg.algorithm) {
        (AxisParam::K, _) => cfg.k = Some(whole(v, "k")?),
        (AxisParam::Ell, Algorithm::Greedy { ell, .. } | Algorithm::Moderate { ell, .. }) => {
            *ell = whole(v, "ell")?
        }
        (AxisParam::Eps1, Algorithm::Noisy { eps1, .. }) => *eps1 = v,
        (AxisParam::Eps2, Algorithm::Noisy { eps2, .. }) => *eps2 = v,
        (AxisParam::PMix, Algorithm::Moderate { p_mix, .. }) => *p_mix = v,
        _ => return Err(mismatch()),
    }
    if let Some(out) = &template.out {
        cfg.out = Some(out.join(format!("{}={v}", param.name())));
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: &'static str,
    pub value: f64,
    pub trials: usize,
    pub mean_seed_cost: f64,
    pub mean_final_cost: f64,
    pub mean_ratio: Option<f64>,
    pub ratio_ci_lo: Option<f64>,
    pub ratio_ci_hi: Option<f64>,
    pub ratio_is_upper_bound: Option<bool>,
    pub f_frequency: Option<f64>,
    pub o_hit_frequency: Option<f64>,
    pub mean_wasted: Option<f64>,
    pub mean_psi: Option<f64>,
}

impl SweepRow {
    fn from_report(param: AxisParam, value: f64, r: &ExperimentReport) -> Self {
        let s = &r.summary;
        SweepRow {
            axis: param.name(),
            value,
            trials: s.trials,
            mean_seed_cost: s.seed_cost.mean,
            mean_final_cost: s.lloyd_cost.as_ref().unwrap_or(&s.seed_cost).mean,
            mean_ratio: s.ratio.map(|m| m.mean),
            ratio_ci_lo: s.ratio.map(|m| m.ci95.0),
            ratio_ci_hi: s.ratio.map(|m| m.ci95.1),
            ratio_is_upper_bound: s.ratio.and(s.denominator).map(|d| d.upper_bound),
            f_frequency: s.f_frequency,
            o_hit_frequency: s.o_hit_frequency,
            mean_wasted: s.wasted.map(|m| m.mean),
            mean_psi: s.psi.map(|m| m.mean),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub reports: Vec<ExperimentReport>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)
                .map_err(|e| Error::Internal(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

/// One experiment per axis value. Every value is validated before any run.
pub fn sweep(template: &ExperimentConfig, axis: &SweepAxis) -> Result<SweepTable> {
    if axis.values.is_empty() {
        return Err(Error::Input(format!(
            "sweep axis {} has no values",
            axis.param.name()
        )));
    }
    let configs = axis
        .values
        .iter()
        .map(|&v| apply(template, axis.param, v))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(configs.len());
    let mut reports = Vec::with_capacity(configs.len());
    for (cfg, &v) in configs.iter().zip(&axis.values) {
        let r = run_experiment(cfg)?;
        rows.push(SweepRow::from_report(axis.param, v, &r));
        reports.push(r);
    }
    let table = SweepTable { rows, reports };
    if let Some(out) = &template.out {
        table.write_csv(&out.join("sweep.csv"))?;
    }
    Ok(table)
}
