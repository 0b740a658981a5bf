//! File formats: coefficient files, contour records, parameter tables and
//! reports.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! f64 bit-exactly through decimal text.

use crate::classify::{CvReport, Hyper, Method};
use crate::curve::{ComponentCoefficients, MultiCurve};
use crate::deformation::DeformationParams;
use crate::error::{Error, Result};
use crate::ingest::{RawContour, RawMultiContour};
use crate::synth::AlignmentStudyRow;
use nalgebra::{Matrix2xX, Vector2};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// 17 significant digits: exact decimal round-trip for f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, path: &Path) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse {
        path: path.display().to_string(),
        reason: format!("invalid float '{s}'"),
    })
}

fn parse_error(path: &Path, reason: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), reason: reason.into() }
}

// ---------------------------------------------------------------------------
// coefficient files

/// Serialize a curve's coefficient blocks as structured text.
pub fn format_coefficients(curve: &MultiCurve) -> String {
    let mut out = String::new();
    let m = curve.basis().size();
    writeln!(out, "multicurve").unwrap();
    writeln!(out, "p {}", curve.num_components()).unwrap();
    writeln!(out, "M {m}").unwrap();
    for (j, c) in curve.components().iter().enumerate() {
        writeln!(out, "component {j}").unwrap();
        writeln!(out, "B {} {}", fmt_f64(c.b.x), fmt_f64(c.b.y)).unwrap();
        for r in 0..2 {
            let row: Vec<String> = (0..m).map(|k| fmt_f64(c.a[(r, k)])).collect();
            writeln!(out, "A{} {}", ["x", "y"][r], row.join(" ")).unwrap();
        }
    }
    out
}

pub fn write_coefficients(path: &Path, curve: &MultiCurve) -> Result<()> {
    fs::write(path, format_coefficients(curve))?;
    Ok(())
}

pub fn parse_coefficients(text: &str, path: &Path) -> Result<MultiCurve> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("multicurve") {
        return Err(parse_error(path, "missing 'multicurve' header"));
    }
    let p: usize = {
        let line = lines.next().ok_or_else(|| parse_error(path, "missing 'p' line"))?;
        let rest = line.strip_prefix("p ").ok_or_else(|| parse_error(path, "expected 'p <count>'"))?;
        rest.trim().parse().map_err(|_| parse_error(path, "invalid component count"))?
    };
    let m: usize = {
        let line = lines.next().ok_or_else(|| parse_error(path, "missing 'M' line"))?;
        let rest = line.strip_prefix("M ").ok_or_else(|| parse_error(path, "expected 'M <size>'"))?;
        rest.trim().parse().map_err(|_| parse_error(path, "invalid basis size"))?
    };
    let mut components = Vec::with_capacity(p);
    for j in 0..p {
        let header = lines.next().ok_or_else(|| parse_error(path, format!("missing component {j}")))?;
        if header.trim() != format!("component {j}") {
            return Err(parse_error(path, format!("expected 'component {j}', got '{header}'")));
        }
        let b_line = lines.next().ok_or_else(|| parse_error(path, "missing B line"))?;
        let b_parts: Vec<&str> = b_line.split_whitespace().collect();
        if b_parts.len() != 3 || b_parts[0] != "B" {
            return Err(parse_error(path, "expected 'B <x> <y>'"));
        }
        let b = Vector2::new(parse_f64(b_parts[1], path)?, parse_f64(b_parts[2], path)?);
        let mut a = Matrix2xX::zeros(m);
        for (r, tag) in ["Ax", "Ay"].iter().enumerate() {
            let line = lines.next().ok_or_else(|| parse_error(path, format!("missing {tag} line")))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != m + 1 || parts[0] != *tag {
                return Err(parse_error(path, format!("expected '{tag}' with {m} values")));
            }
            for (k, v) in parts[1..].iter().enumerate() {
                a[(r, k)] = parse_f64(v, path)?;
            }
        }
        components.push(ComponentCoefficients::new(b, a)?);
    }
    MultiCurve::new(components)
}

pub fn read_coefficients(path: &Path) -> Result<MultiCurve> {
    let text = fs::read_to_string(path)?;
    parse_coefficients(&text, path)
}

// ---------------------------------------------------------------------------
// contour records (JSON lines, one record per image)

#[derive(Serialize, Deserialize)]
struct ContourRecord {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<u8>,
    contours: Vec<Vec<[f64; 2]>>,
}

/// Read contour records from a `.jsonl` file, or from every `.jsonl` file
/// (sorted by name) when `path` is a directory.
pub fn read_contours(path: &Path) -> Result<Vec<RawMultiContour>> {
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in fs::read_dir(path)? {
            let p = entry?.path();
            if p.extension().and_then(|e| e.to_str()) == Some("jsonl") {
                files.push(p);
            }
        }
        files.sort();
        if files.is_empty() {
            return Err(parse_error(path, "directory contains no .jsonl contour files"));
        }
    } else {
        files.push(path.to_path_buf());
    }
    let mut records = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file)?;
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: ContourRecord = serde_json::from_str(line)
                .map_err(|e| parse_error(&file, format!("line {}: {e}", ln + 1)))?;
            let contours = rec
                .contours
                .into_iter()
                .map(RawContour::new)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.with_curve_id(&rec.id))?;
            records.push(RawMultiContour { id: rec.id, label: rec.label, contours });
        }
    }
    Ok(records)
}

/// Write contour records as JSON lines.
pub fn write_contours(path: &Path, records: &[RawMultiContour]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        let rec = ContourRecord {
            id: r.id.clone(),
            label: r.label,
            contours: r.contours.iter().map(|c| c.points.clone()).collect(),
        };
        writeln!(out, "{}", serde_json::to_string(&rec).expect("serializable record")).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// tables

/// Deformation-parameter table: one row per curve.
pub fn format_deformation_table(ids: &[String], params: &[DeformationParams]) -> String {
    let p = params.first().map(|d| d.delta.len()).unwrap_or(0);
    let mut out = String::from("id,T_x,T_y,rho,theta");
    for j in 1..=p {
        write!(out, ",delta_{j}").unwrap();
    }
    out.push('\n');
    for (id, d) in ids.iter().zip(params) {
        write!(
            out,
            "{id},{},{},{},{}",
            fmt_f64(d.translation.x),
            fmt_f64(d.translation.y),
            fmt_f64(d.rho),
            fmt_f64(d.theta)
        )
        .unwrap();
        for v in &d.delta {
            write!(out, ",{}", fmt_f64(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Alignment output of the `align` subcommand.
pub fn format_alignment_table(ids: &[String], thetas: &[f64], deltas: &[Vec<f64>], objectives: &[f64]) -> String {
    let p = deltas.first().map(Vec::len).unwrap_or(0);
    let mut out = String::from("id,theta");
    for j in 1..=p {
        write!(out, ",delta_{j}").unwrap();
    }
    out.push_str(",objective\n");
    for i in 0..ids.len() {
        write!(out, "{},{}", ids[i], fmt_f64(thetas[i])).unwrap();
        for v in &deltas[i] {
            write!(out, ",{}", fmt_f64(*v)).unwrap();
        }
        writeln!(out, ",{}", fmt_f64(objectives[i])).unwrap();
    }
    out
}

/// Variance per outer pipeline iteration.
pub fn format_eta_log(etas: &[f64]) -> String {
    let mut out = String::from("iteration,eta\n");
    for (i, eta) in etas.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, fmt_f64(*eta)).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// alignment-study metrics

pub fn format_study_rows(rows: &[AlignmentStudyRow]) -> String {
    let p = rows.first().map(|r| r.cmse_delta.len()).unwrap_or(0);
    let mut out = String::from("# alignment-study\nsigma,n,cmse_theta");
    for j in 1..=p {
        write!(out, ",cmse_delta_{j}").unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(out, "{},{},{}", fmt_f64(r.sigma), r.n, fmt_f64(r.cmse_theta)).unwrap();
        for v in &r.cmse_delta {
            write!(out, ",{}", fmt_f64(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_study_rows(text: &str, path: &Path) -> Result<Vec<AlignmentStudyRow>> {
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        if line.starts_with("sigma") || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() < 3 {
            return Err(parse_error(path, format!("bad study row '{line}'")));
        }
        let sigma = parse_f64(parts[0], path)?;
        let n: usize = parts[1]
            .parse()
            .map_err(|_| parse_error(path, format!("bad sample count '{}'", parts[1])))?;
        let cmse_theta = parse_f64(parts[2], path)?;
        let cmse_delta = parts[3..]
            .iter()
            .map(|v| parse_f64(v, path))
            .collect::<Result<Vec<_>>>()?;
        rows.push(AlignmentStudyRow { sigma, n, cmse_theta, cmse_delta });
    }
    if rows.is_empty() {
        return Err(parse_error(path, "no study rows found"));
    }
    Ok(rows)
}

pub fn read_study_rows(path: &Path) -> Result<Vec<AlignmentStudyRow>> {
    parse_study_rows(&fs::read_to_string(path)?, path)
}

// ---------------------------------------------------------------------------
// cross-validation reports

pub fn format_cv_report(report: &CvReport) -> String {
    let mut out = String::from("# cv-report\n");
    writeln!(out, "method {}", report.method).unwrap();
    writeln!(out, "design {}", report.design).unwrap();
    writeln!(out, "scenario {}", report.scenario).unwrap();
    writeln!(out, "folds {}", report.fold_accuracies.len()).unwrap();
    let sel: Vec<String> = report.selected.iter().map(|h| h.to_string()).collect();
    writeln!(out, "selected {}", sel.join(" ")).unwrap();
    let acc: Vec<String> = report.fold_accuracies.iter().map(|a| fmt_f64(*a)).collect();
    writeln!(out, "fold_accuracy {}", acc.join(" ")).unwrap();
    writeln!(out, "mean_accuracy {}", fmt_f64(report.mean_accuracy)).unwrap();
    out
}

fn parse_hyper(s: &str, path: &Path) -> Result<Hyper> {
    if let Some(v) = s.strip_prefix("lambda=") {
        Ok(Hyper::Lambda(parse_f64(v, path)?))
    } else if let Some(v) = s.strip_prefix("components=") {
        Ok(Hyper::Components(v.parse().map_err(|_| {
            parse_error(path, format!("bad component count '{v}'"))
        })?))
    } else {
        Err(parse_error(path, format!("bad hyperparameter '{s}'")))
    }
}

pub fn parse_cv_report(text: &str, path: &Path) -> Result<CvReport> {
    let mut method = None;
    let mut design = String::new();
    let mut scenario = String::new();
    let mut selected = Vec::new();
    let mut fold_accuracies = Vec::new();
    let mut mean_accuracy = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "method" => method = Some(Method::from_str(rest)?),
            "design" => design = rest.to_string(),
            "scenario" => scenario = rest.to_string(),
            "folds" => {}
            "selected" => {
                selected = rest
                    .split_whitespace()
                    .map(|s| parse_hyper(s, path))
                    .collect::<Result<Vec<_>>>()?;
            }
            "fold_accuracy" => {
                fold_accuracies = rest
                    .split_whitespace()
                    .map(|s| parse_f64(s, path))
                    .collect::<Result<Vec<_>>>()?;
            }
            "mean_accuracy" => mean_accuracy = Some(parse_f64(rest, path)?),
            other => return Err(parse_error(path, format!("unknown key '{other}'"))),
        }
    }
    Ok(CvReport {
        method: method.ok_or_else(|| parse_error(path, "missing method"))?,
        design,
        scenario,
        mean_accuracy: mean_accuracy.ok_or_else(|| parse_error(path, "missing mean_accuracy"))?,
        fold_accuracies,
        selected,
    })
}

pub fn read_cv_report(path: &Path) -> Result<CvReport> {
    parse_cv_report(&fs::read_to_string(path)?, path)
}

/// Sorted paths with the given extension in a directory.
pub fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let p = entry?.path();
        if p.extension().and_then(|e| e.to_str()) == Some(ext) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_curve(seed: u64, p: usize, m: usize) -> MultiCurve {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let components = (0..p)
            .map(|_| ComponentCoefficients {
                b: Vector2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
                a: Matrix2xX::from_fn(m, |_, _| rng.random_range(-3.0..3.0)),
            })
            .collect();
        MultiCurve::new(components).unwrap()
    }

    #[test]
    fn coefficients_roundtrip_bit_exact() {
        let curve = random_curve(100, 3, 8);
        let text = format_coefficients(&curve);
        let back = parse_coefficients(&text, Path::new("mem")).unwrap();
        assert_eq!(curve, back);
    }

    proptest! {
        #[test]
        fn float_format_roundtrips(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let parsed: f64 = fmt_f64(v).parse().unwrap();
            prop_assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn contours_roundtrip() {
        let records = vec![RawMultiContour {
            id: "img-1".into(),
            label: Some(1),
            contours: vec![
                RawContour::new(vec![[0.0, 0.0], [1.0, 0.5], [0.25, 1.0]]).unwrap(),
            ],
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.jsonl");
        write_contours(&path, &records).unwrap();
        let back = read_contours(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].id, "img-1");
        assert_eq!(back[0].label, Some(1));
        assert_eq!(back[0].contours[0].points, records[0].contours[0].points);
    }

    #[test]
    fn malformed_coefficient_file_is_a_parse_error() {
        let err = parse_coefficients("garbage", Path::new("x.coef")).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn cv_report_roundtrip() {
        let report = CvReport {
            method: Method::Pls,
            design: "multi".into(),
            scenario: "1".into(),
            fold_accuracies: vec![80.0, 90.0],
            mean_accuracy: 85.0,
            selected: vec![Hyper::Components(3), Hyper::Components(5)],
        };
        let text = format_cv_report(&report);
        let back = parse_cv_report(&text, Path::new("mem")).unwrap();
        assert_eq!(back.method, Method::Pls);
        assert_eq!(back.design, "multi");
        assert_eq!(back.scenario, "1");
        assert_eq!(back.fold_accuracies, vec![80.0, 90.0]);
        assert_eq!(back.mean_accuracy, 85.0);
        assert_eq!(back.selected.len(), 2);
    }

    #[test]
    fn study_rows_roundtrip() {
        let rows = vec![AlignmentStudyRow {
            sigma: 0.1,
            n: 500,
            cmse_theta: 8.4e-7,
            cmse_delta: vec![3.6e-4, 3.4e-4, 3.45e-4],
        }];
        let text = format_study_rows(&rows);
        let back = parse_study_rows(&text, Path::new("mem")).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].sigma, 0.1);
        assert_eq!(back[0].n, 500);
        assert_eq!(back[0].cmse_delta.len(), 3);
    }
}
