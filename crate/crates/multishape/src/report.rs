//! Plain-text result tables: alignment accuracy per noise level, and
//! classification accuracy per scenario, design and method. Figures are
//! left to external plotters; these tables are the consumable output.

use crate::classify::{CvReport, Method};
use crate::error::{Error, Result};
use crate::synth::AlignmentStudyRow;
use std::fmt::Write as _;

/// Alignment accuracy table: one row per noise level, columns for the
/// rotation error and each component's shift error.
pub fn format_alignment_study(rows: &[AlignmentStudyRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::DegenerateInput("no alignment study rows".to_string()));
    }
    let p = rows[0].cmse_delta.len();
    let mut out = String::new();
    write!(out, "{:>6}  {:>11}", "sigma", "cMSE_theta").unwrap();
    for j in 1..=p {
        write!(out, "  {:>12}", format!("cMSE_delta_{j}")).unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(out, "{:>6.2}  {:>11.3e}", r.sigma, r.cmse_theta).unwrap();
        for v in &r.cmse_delta {
            write!(out, "  {:>12.3e}", v).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

const METHOD_ORDER: [Method; 4] = [Method::Gl1, Method::Gl2, Method::Pls, Method::Pcr];
const DESIGN_ORDER: [&str; 3] = ["multi", "uni", "raw"];
const SCENARIO_ORDER: [&str; 2] = ["1", "2"];

/// Classification accuracy grid: scenarios x designs x methods
/// (2 x 3 x 4 = 24 cells). Cells without a report print as "-".
pub fn format_classification_table(reports: &[CvReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::DegenerateInput(
            "no classification results to report".to_string(),
        ));
    }
    let lookup = |scenario: &str, design: &str, method: Method| -> Option<f64> {
        reports
            .iter()
            .find(|r| r.scenario == scenario && r.design == design && r.method == method)
            .map(|r| r.mean_accuracy)
    };
    let mut out = String::new();
    writeln!(
        out,
        "{:>10} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "scenario", "design", "GL1", "GL2", "PLS", "PCR"
    )
    .unwrap();
    for scenario in SCENARIO_ORDER {
        for design in DESIGN_ORDER {
            write!(out, "{scenario:>10} {design:>8}").unwrap();
            for method in METHOD_ORDER {
                match lookup(scenario, design, method) {
                    Some(acc) => write!(out, " {acc:>8.2}").unwrap(),
                    None => write!(out, " {:>8}", "-").unwrap(),
                }
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// One-report summary printed by the classify subcommand.
pub fn format_cv_summary(report: &CvReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "method={} design={} scenario={} folds={}",
        report.method,
        report.design,
        report.scenario,
        report.fold_accuracies.len()
    )
    .unwrap();
    for (i, (acc, hyper)) in report
        .fold_accuracies
        .iter()
        .zip(&report.selected)
        .enumerate()
    {
        writeln!(out, "  fold {:>2}: accuracy {acc:>6.2}%  selected {hyper}", i + 1).unwrap();
    }
    writeln!(out, "  mean accuracy: {:.2}%", report.mean_accuracy).unwrap();
    out
}
