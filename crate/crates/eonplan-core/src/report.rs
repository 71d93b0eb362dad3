//! CSV artifacts of a study. All files carry a header row; floats are
//! printed with three decimals so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::planner::StudyOutcome;

fn f3(value: f64) -> String {
    format!("{value:.3}")
}

/// `throughput.csv`: offered vs. carried traffic per year.
pub fn throughput_csv(outcome: &StudyOutcome) -> String {
    let mut out = String::from("year,offered_tbps,carried_tbps,unmet_tbps\n");
    for report in &outcome.reports {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            report.year,
            f3(report.offered_tbps),
            f3(report.carried_tbps),
            f3(report.unmet_tbps)
        );
    }
    out
}

/// `bvts.csv`: fleet size and per-year churn.
pub fn bvts_csv(outcome: &StudyOutcome) -> String {
    let mut out = String::from("year,bvt_count,upgrades,additions\n");
    for report in &outcome.reports {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            report.year, report.bvt_count, report.upgrades_performed, report.lps_added
        );
    }
    out
}

/// `occupancy.csv`: per-link spectrum occupancy per year.
pub fn occupancy_csv(outcome: &StudyOutcome) -> String {
    let mut out = String::from("year,link_id,ratio,flagged\n");
    for record in &outcome.occupancy {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            record.year,
            record.link,
            f3(record.ratio),
            record.flagged
        );
    }
    out
}

/// `lightpaths.csv`: the full transponder ledger in its final state.
pub fn lightpaths_csv(outcome: &StudyOutcome) -> String {
    let mut out = String::from(
        "id,src,dst,provisioned_year,datarate_gbps,modulation,fiber_pair,start_slot,slot_count,path,eta_nli,upgraded_years\n",
    );
    for lp in &outcome.lightpaths {
        let path = lp
            .path
            .nodes
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("-");
        let upgrades = lp
            .upgraded_years
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            lp.id,
            lp.pair.0,
            lp.pair.1,
            lp.provisioned_year,
            lp.config.datarate_gbps,
            lp.config.modulation,
            lp.fiber_pair,
            lp.start_slot,
            lp.config.slot_count,
            path,
            f3(lp.eta_nli),
            upgrades
        );
    }
    out
}

/// Writes the four per-run CSVs into `dir` (created if missing).
pub fn write_study_csvs(outcome: &StudyOutcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("throughput.csv"), throughput_csv(outcome))?;
    std::fs::write(dir.join("bvts.csv"), bvts_csv(outcome))?;
    std::fs::write(dir.join("occupancy.csv"), occupancy_csv(outcome))?;
    std::fs::write(dir.join("lightpaths.csv"), lightpaths_csv(outcome))?;
    Ok(())
}

/// `fig_throughput.csv`: offered plus per-scheme carried traffic by year
/// (carried averaged across seeds when several runs share a scheme).
pub fn fig_throughput_csv(outcomes: &[StudyOutcome]) -> String {
    let mut out = String::from("year,offered_tbps,scheme1_carried_tbps,scheme2_carried_tbps\n");
    let years: Vec<i32> = outcomes
        .first()
        .map(|o| o.reports.iter().map(|r| r.year).collect())
        .unwrap_or_default();
    for (row, &year) in years.iter().enumerate() {
        let offered = outcomes[0].reports[row].offered_tbps;
        let mean_for = |scheme_no: u8| -> Option<f64> {
            let carried: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.scheme.number() == scheme_no)
                .filter_map(|o| o.reports.get(row).map(|r| r.carried_tbps))
                .collect();
            (!carried.is_empty()).then(|| carried.iter().sum::<f64>() / carried.len() as f64)
        };
        let s1 = mean_for(1).map(f3).unwrap_or_default();
        let s2 = mean_for(2).map(f3).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", year, f3(offered), s1, s2);
    }
    out
}

/// `fig_bvt_vs_throughput.csv`: one row per (run, year) pairing fleet size
/// with carried traffic. The topology column lets studies of different
/// networks share one file.
pub fn fig_bvt_vs_throughput_csv(outcomes: &[StudyOutcome], topology: &str) -> String {
    fig_bvt_vs_throughput_csv_merged(&[(outcomes, topology)])
}

/// Same layout, merging runs over several topologies.
pub fn fig_bvt_vs_throughput_csv_merged(groups: &[(&[StudyOutcome], &str)]) -> String {
    let mut out = String::from("bvt_count,carried_tbps,scheme,topology\n");
    for (outcomes, topology) in groups {
        for outcome in *outcomes {
            for report in &outcome.reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    report.bvt_count,
                    f3(report.carried_tbps),
                    outcome.scheme.number(),
                    topology
                );
            }
        }
    }
    out
}

/// `summary.txt`: per scheme and year, carried traffic across seeds.
pub fn summary_text(outcomes: &[StudyOutcome]) -> String {
    let mut out = String::from("carried traffic per year (Tbps)\n");
    for scheme_no in [1u8, 2] {
        let runs: Vec<&StudyOutcome> = outcomes
            .iter()
            .filter(|o| o.scheme.number() == scheme_no)
            .collect();
        if runs.is_empty() {
            continue;
        }
        let seeds: Vec<String> = runs.iter().map(|o| o.seed.to_string()).collect();
        let _ = writeln!(
            out,
            "\nscheme {scheme_no} ({} seed{}: {})",
            runs.len(),
            if runs.len() == 1 { "" } else { "s" },
            seeds.join(", ")
        );
        let _ = writeln!(
            out,
            "{:>6} {:>12} {:>12} {:>12}",
            "year", "mean", "min", "max"
        );
        for row in 0..runs[0].reports.len() {
            let year = runs[0].reports[row].year;
            let carried: Vec<f64> = runs
                .iter()
                .filter_map(|o| o.reports.get(row).map(|r| r.carried_tbps))
                .collect();
            let mean = carried.iter().sum::<f64>() / carried.len() as f64;
            let min = carried.iter().copied().fold(f64::INFINITY, f64::min);
            let max = carried.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>12}",
                year,
                f3(mean),
                f3(min),
                f3(max)
            );
        }
    }
    out
}
