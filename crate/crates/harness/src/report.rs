//! CSV and JSON result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use snapshot_ilp::CostFunctionId;

use crate::error::{HarnessError, Result};
use crate::stats::{spearman, summarize, StatsSummary};
use crate::task::TaskResult;

pub const COLUMNS: [&str; 11] = [
    "task",
    "cost_fn",
    "acc_base",
    "acc_snap",
    "acc_bag",
    "acc_test_opt",
    "acc_test_worst",
    "overfit_gap",
    "snap_improvement",
    "overhead_pct",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One report line with numbers already rounded to six decimals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task: String,
    pub cost_fn: CostFunctionId,
    pub acc_base: f64,
    pub acc_snap: f64,
    pub acc_bag: Option<f64>,
    pub acc_test_opt: f64,
    pub acc_test_worst: f64,
    pub overfit_gap: f64,
    pub snap_improvement: f64,
    pub overhead_pct: f64,
    pub seed: u64,
}

fn fixed(x: f64) -> String {
    // Avoid printing "-0.000000".
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_owned()
    } else {
        s
    }
}

fn round6(x: f64) -> f64 {
    fixed(x).parse().expect("formatted float parses")
}

impl ReportRow {
    pub fn from_result(r: &TaskResult) -> Self {
        ReportRow {
            task: r.task.clone(),
            cost_fn: r.cost_fn,
            acc_base: round6(r.acc_base),
            acc_snap: round6(r.acc_snap),
            acc_bag: r.acc_bag.map(round6),
            acc_test_opt: round6(r.acc_test_opt),
            acc_test_worst: round6(r.acc_test_worst),
            overfit_gap: round6(r.overfit_gap),
            snap_improvement: round6(r.snap_improvement),
            overhead_pct: round6(r.overhead_pct),
            seed: r.seed,
        }
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.task.clone(),
            self.cost_fn.to_string(),
            fixed(self.acc_base),
            fixed(self.acc_snap),
            self.acc_bag.map(fixed).unwrap_or_default(),
            fixed(self.acc_test_opt),
            fixed(self.acc_test_worst),
            fixed(self.overfit_gap),
            fixed(self.snap_improvement),
            fixed(self.overhead_pct),
            self.seed.to_string(),
        ]
    }
}

/// Rows ordered by task, cost function and seed.
pub fn rows(results: &[TaskResult]) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = results.iter().map(ReportRow::from_result).collect();
    rows.sort_by(|a, b| {
        (&a.task, a.cost_fn.name(), a.seed).cmp(&(&b.task, b.cost_fn.name(), b.seed))
    });
    rows
}

pub fn to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json(rows: &[ReportRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(HarnessError::Data(format!("unexpected report columns {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

pub fn parse_json(text: &str) -> Result<Vec<ReportRow>> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(results: &[TaskResult], fmt: ReportFormat) -> Result<String> {
    if results.is_empty() {
        return Err(HarnessError::Data("no results to report".into()));
    }
    let rows = rows(results);
    match fmt {
        ReportFormat::Csv => to_csv(&rows),
        ReportFormat::Json => to_json(&rows),
    }
}

pub fn emit_report(results: &[TaskResult], fmt: ReportFormat, path: &Path) -> Result<()> {
    let text = render(results, fmt)?;
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Run-dependent measurements kept apart from the deterministic report.
pub fn timings_csv(results: &[TaskResult]) -> Result<String> {
    let mut sorted: Vec<&TaskResult> = results.iter().collect();
    sorted.sort_by(|a, b| (&a.task, a.cost_fn.name(), a.seed).cmp(&(&b.task, b.cost_fn.name(), b.seed)));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "task",
        "cost_fn",
        "seed",
        "t_phase1_s",
        "t_phase2_s",
        "t_phase3_s",
        "t_bagging_s",
        "t_total_s",
        "overhead_pct_wall",
        "pool_size",
        "candidates",
        "exhausted",
        "baseline",
    ])?;
    for r in sorted {
        let t = &r.timings;
        w.write_record([
            r.task.clone(),
            r.cost_fn.to_string(),
            r.seed.to_string(),
            format!("{:.6}", t.phase1.as_secs_f64()),
            format!("{:.6}", t.phase2.as_secs_f64()),
            format!("{:.6}", t.phase3.as_secs_f64()),
            t.bagging.map(|d| format!("{:.6}", d.as_secs_f64())).unwrap_or_default(),
            format!("{:.6}", t.total.as_secs_f64()),
            format!("{:.6}", t.overhead_pct()),
            r.pool_size.to_string(),
            r.candidates.to_string(),
            r.exhausted.to_string(),
            r.baseline.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Per cost function: statistics of `snap_improvement`, with the Spearman
/// correlation between `overfit_gap` and `snap_improvement`. A final `all`
/// entry pools every row.
pub fn summary(rows: &[ReportRow]) -> Result<Vec<(String, StatsSummary)>> {
    let mut out = Vec::new();
    let mut groups: Vec<(String, Vec<&ReportRow>)> = CostFunctionId::ALL
        .iter()
        .map(|f| (f.to_string(), rows.iter().filter(|r| r.cost_fn == *f).collect()))
        .collect();
    groups.push(("all".into(), rows.iter().collect()));
    for (name, group) in groups {
        if group.is_empty() {
            continue;
        }
        let imp: Vec<f64> = group.iter().map(|r| r.snap_improvement).collect();
        let gap: Vec<f64> = group.iter().map(|r| r.overfit_gap).collect();
        let mut s = summarize(&imp)?;
        s.spearman_rho = spearman(&gap, &imp)?;
        out.push((name, s));
    }
    Ok(out)
}

pub fn summary_table(rows: &[ReportRow]) -> Result<String> {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into());
    let mut s = String::from("group\tn\tmean_improvement\tci95_halfwidth\tttest_p\twilcoxon_p\tspearman_gap_vs_improvement\n");
    for (name, st) in summary(rows)? {
        writeln!(
            s,
            "{name}\t{}\t{:.6}\t{}\t{}\t{}\t{}",
            st.n,
            st.mean,
            opt(st.ci95_halfwidth),
            opt(st.ttest_p),
            opt(st.wilcoxon_p),
            opt(st.spearman_rho)
        )
        .expect("writing to a string");
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(fixed(2.0 / 3.0), "0.666667");
        assert_eq!(fixed(-1e-9), "0.000000");
        assert_eq!(fixed(-0.25), "-0.250000");
    }
}
