//! `trajectory.csv`, `plan.csv` and `summary.json`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::run::{Cost, Report};
use crate::scenario::Loaded;

#[derive(Debug, Serialize)]
struct CostJson {
    cost_avg: f64,
    cost_total: f64,
}

impl From<Cost> for CostJson {
    fn from(c: Cost) -> Self {
        CostJson { cost_avg: c.avg, cost_total: c.total }
    }
}

#[derive(Debug, Serialize)]
struct Baselines {
    uncontrolled: CostJson,
    broadcast: CostJson,
}

/// Contents of `summary.json`.
#[derive(Debug, Serialize)]
pub struct Summary {
    strategy: &'static str,
    regime: &'static str,
    agents: usize,
    campaigns: usize,
    units: usize,
    cap: f64,
    target: f64,
    cost_avg: f64,
    cost_total: f64,
    /// Units per campaign; absent for plans not made of whole units.
    b_vector: Option<Vec<usize>>,
    budget_spent: f64,
    campaign_spend: Vec<f64>,
    baselines: Baselines,
    wall_time_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_cost_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degenerate: Option<bool>,
}

pub fn summary(loaded: &Loaded, report: &Report) -> Summary {
    let s = &loaded.scenario;
    let plan = &report.plan;
    Summary {
        strategy: report.strategy.name(),
        regime: s.regime.name(),
        agents: loaded.network.agents(),
        campaigns: s.campaigns,
        units: s.units,
        cap: s.cap,
        target: s.target.value(),
        cost_avg: plan.cost_avg(),
        cost_total: plan.cost_total(),
        b_vector: plan.units().map(|b| b.units().to_vec()),
        budget_spent: plan.budget_spent(),
        campaign_spend: plan.campaign_spend(),
        baselines: Baselines { uncontrolled: report.uncontrolled.into(), broadcast: report.broadcast.into() },
        wall_time_seconds: report.wall_time,
        graph_seed: loaded.graph_seed,
        predicted_cost_total: report.predicted_total,
        degenerate: report.degenerate,
    }
}

pub fn write_trajectory(report: &Report, agents: usize, path: &Path) -> Result<()> {
    let csv_err = |e| HarnessError::Csv { path: path.to_path_buf(), source: e };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=agents).map(|i| format!("x_{i}")));
    w.write_record(&header).map_err(csv_err)?;
    for row in &report.trajectory {
        let mut rec = vec![row.t.to_string()];
        rec.extend(row.opinions.iter().map(f64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Nonzero controls, campaigns from 0 and agents from 1.
pub fn write_plan(report: &Report, path: &Path) -> Result<()> {
    let csv_err = |e| HarnessError::Csv { path: path.to_path_buf(), source: e };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["campaign", "agent", "u"]).map_err(csv_err)?;
    for (k, u) in report.plan.controls().iter().enumerate() {
        for (i, &ui) in u.iter().enumerate() {
            if ui != 0.0 {
                w.write_record([k.to_string(), (i + 1).to_string(), ui.to_string()]).map_err(csv_err)?;
            }
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| HarnessError::Json { path: path.to_path_buf(), source: e })?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

/// Writes all three files into `dir`, creating it if needed.
pub fn write_outputs(loaded: &Loaded, report: &Report, dir: &Path) -> Result<Summary> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write_trajectory(report, loaded.network.agents(), &dir.join("trajectory.csv"))?;
    write_plan(report, &dir.join("plan.csv"))?;
    let s = summary(loaded, report);
    write_summary(&s, &dir.join("summary.json"))?;
    Ok(s)
}

impl Summary {
    pub fn cost_avg(&self) -> f64 {
        self.cost_avg
    }

    /// One-line description for the terminal.
    pub fn headline(&self) -> String {
        let b = match &self.b_vector {
            Some(b) => format!("{b:?}"),
            None => "-".into(),
        };
        format!(
            "{} ({} regime): cost {:.4}, b = {}, uncontrolled {:.4}, broadcast {:.4}, {:.3}s",
            self.strategy,
            self.regime,
            self.cost_avg,
            b,
            self.baselines.uncontrolled.cost_avg,
            self.baselines.broadcast.cost_avg,
            self.wall_time_seconds
        )
    }
}
