//! Command-line front end: fit, align, pipeline, classify, simulate and
//! report subcommands over the file formats in [`crate::io`].
//!
//! Option precedence is CLI flag > config file > built-in default; the
//! config file holds flat `key = value` lines mirroring the flag names.
//! Re-running any subcommand with the same configuration reproduces its
//! output files byte for byte: every random draw derives from the single
//! seed through counter-based substreams.

use crate::basis::BasisSpec;
use crate::classify::{
    build_design, cross_validate, group_lasso, CvConfig, DesignScheme, HyperGrid, Method,
};
use crate::deformation::{center_and_scale, icf_align, IcfConfig};
use crate::error::{Error, Result};
use crate::ingest::fit_dataset;
use crate::io;
use crate::pipeline::{estimate_pipeline, PipelineConfig};
use crate::report;
use crate::seeding::{substream, tag};
use crate::synth::{builtin_template, run_alignment_study, scenario2_deform};
use clap::{Args, Parser, Subcommand};
use rand::Rng;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "multishape", version, about = "Shape analysis of multivariate closed planar curves")]
pub struct Cli {
    /// Flat key=value configuration file; command-line flags take
    /// precedence over its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Smooth raw contours into coefficient files.
    Fit(FitArgs),
    /// Align coefficient files to a fixed template.
    Align(AlignArgs),
    /// Full estimation: smoothing, centering, iterative alignment and mean.
    Pipeline(PipelineArgs),
    /// Cross-validated shape classification.
    Classify(ClassifyArgs),
    /// Synthetic alignment accuracy study.
    Simulate(SimulateArgs),
    /// Collect result files into summary tables.
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
pub struct FitArgs {
    /// Contour records (.jsonl file or directory of them).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of Fourier basis functions (even).
    #[arg(long = "basis-size")]
    pub basis_size: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct AlignArgs {
    /// Template coefficient file.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Directory of coefficient files to align.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random restarts per curve.
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct PipelineArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "basis-size")]
    pub basis_size: Option<usize>,
    /// Outer stopping threshold on the distance-based variance.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Predictor construction: multi | uni | raw.
    #[arg(long)]
    pub design: Option<String>,
    /// Classifier: gl1 | gl2 | pls | pcr.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// 1 = use curves as stored (aligned), 2 = apply random rotations and
    /// starting-point shifts first (unaligned regime).
    #[arg(long)]
    pub scenario: Option<u8>,
    #[arg(long = "basis-size")]
    pub basis_size: Option<usize>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub starts: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Noise levels; repeat the flag for several rows.
    #[arg(long)]
    pub sigma: Vec<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// "builtin" or a coefficient file path.
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long)]
    pub starts: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct ReportArgs {
    /// Directory holding .metrics and .cvreport files.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed `key = value` configuration file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile(BTreeMap<String, String>);

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config(format!(
                "{}:{}: expected 'key = value'",
                path.display(),
                ln + 1
            )))?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("config key '{key}': bad value '{raw}'"))),
        }
    }

    fn get_list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("config key '{key}': bad value '{raw}'")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }
}

fn resolve<T>(flag: Option<T>, config: Result<Option<T>>, default: T) -> Result<T> {
    Ok(flag.or(config?).unwrap_or(default))
}

fn required<T>(flag: Option<T>, config: Result<Option<T>>, name: &str) -> Result<T> {
    flag.or(config?)
        .ok_or_else(|| Error::Config(format!("missing required option --{name}")))
}

fn ensure_out_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)?;
    Ok(())
}

/// Execute a parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Fit(args) => run_fit(args, &cfg),
        Command::Align(args) => run_align(args, &cfg),
        Command::Pipeline(args) => run_pipeline(args, &cfg),
        Command::Classify(args) => run_classify(args, &cfg),
        Command::Simulate(args) => run_simulate(args, &cfg),
        Command::Report(args) => run_report(args, &cfg),
    }
}

fn run_fit(args: FitArgs, cfg: &ConfigFile) -> Result<()> {
    let input = required(args.input, cfg.get("input"), "input")?;
    let out = required(args.out, cfg.get("out"), "out")?;
    let m = resolve(args.basis_size, cfg.get("basis-size"), 22)?;
    let spec = BasisSpec::new(m)?;
    ensure_out_dir(&out)?;
    let records = io::read_contours(&input)?;
    let curves = fit_dataset(&records, spec)?;
    for (record, curve) in records.iter().zip(&curves) {
        io::write_coefficients(&out.join(format!("{}.coef", record.id)), curve)?;
    }
    println!("fitted {} curves with M={m} into {}", curves.len(), out.display());
    Ok(())
}

fn run_align(args: AlignArgs, cfg: &ConfigFile) -> Result<()> {
    let template_path: PathBuf = required(args.template, cfg.get("template"), "template")?;
    let input: PathBuf = required(args.input, cfg.get("input"), "input")?;
    let out = required(args.out, cfg.get("out"), "out")?;
    let starts = resolve(args.starts, cfg.get("starts"), 5)?;
    let seed = resolve(args.seed, cfg.get("seed"), 0)?;
    ensure_out_dir(&out)?;

    let (template, _, _) = center_and_scale(&io::read_coefficients(&template_path)?)?;
    let files = io::files_with_extension(&input, "coef")?;
    if files.is_empty() {
        return Err(Error::Config(format!(
            "no .coef files under {}",
            input.display()
        )));
    }
    let icf = IcfConfig { n_starts: starts, ..IcfConfig::default() };
    let mut ids = Vec::new();
    let mut thetas = Vec::new();
    let mut deltas = Vec::new();
    let mut objectives = Vec::new();
    for (i, file) in files.iter().enumerate() {
        let id = file
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("curve")
            .to_string();
        let curve = io::read_coefficients(file)?;
        let (preshape, _, _) = center_and_scale(&curve).map_err(|e| e.with_curve_id(&id))?;
        let mut rng = substream(seed, tag::ICF_STARTS, i as u64);
        let alignment =
            icf_align(&preshape, &template, &icf, &mut rng).map_err(|e| e.with_curve_id(&id))?;
        io::write_coefficients(&out.join(format!("{id}.aligned.coef")), alignment.aligned.curve())?;
        ids.push(id);
        thetas.push(alignment.theta);
        deltas.push(alignment.delta);
        objectives.push(alignment.objective);
    }
    fs::write(
        out.join("alignment.csv"),
        io::format_alignment_table(&ids, &thetas, &deltas, &objectives),
    )?;
    println!("aligned {} curves into {}", ids.len(), out.display());
    Ok(())
}

fn run_pipeline(args: PipelineArgs, cfg: &ConfigFile) -> Result<()> {
    let input = required(args.input, cfg.get("input"), "input")?;
    let out = required(args.out, cfg.get("out"), "out")?;
    let m = resolve(args.basis_size, cfg.get("basis-size"), 22)?;
    let xi = resolve(args.xi, cfg.get("xi"), 1e-4)?;
    let starts = resolve(args.starts, cfg.get("starts"), 5)?;
    let seed = resolve(args.seed, cfg.get("seed"), 0)?;
    ensure_out_dir(&out)?;

    let records = io::read_contours(&input)?;
    let mut pipeline_cfg = PipelineConfig::new(BasisSpec::new(m)?).with_seed(seed);
    pipeline_cfg.xi = xi;
    pipeline_cfg.icf.n_starts = starts;
    let result = estimate_pipeline(&records, &pipeline_cfg)?;

    for (id, shape) in result.ids.iter().zip(&result.shapes) {
        io::write_coefficients(&out.join(format!("{id}.aligned.coef")), shape.preshape.curve())?;
    }
    io::write_coefficients(&out.join("mean.coef"), result.mean.mean.curve())?;
    fs::write(
        out.join("deformations.csv"),
        io::format_deformation_table(&result.ids, &result.deformations),
    )?;
    fs::write(out.join("eta_log.csv"), io::format_eta_log(&result.eta_log))?;
    println!(
        "pipeline over {} curves: {} outer iterations, eta {:.3e}, converged={}",
        result.ids.len(),
        result.eta_log.len(),
        result.eta_log.last().copied().unwrap_or(f64::NAN),
        result.converged
    );
    Ok(())
}

fn run_classify(args: ClassifyArgs, cfg: &ConfigFile) -> Result<()> {
    let input = required(args.input, cfg.get("input"), "input")?;
    let out = required(args.out, cfg.get("out"), "out")?;
    let design: String = resolve(args.design, cfg.get("design"), "multi".to_string())?;
    let method: String = resolve(args.method, cfg.get("method"), "pls".to_string())?;
    let folds = resolve(args.folds, cfg.get("folds"), 10)?;
    let seed = resolve(args.seed, cfg.get("seed"), 0)?;
    let scenario = resolve(args.scenario, cfg.get("scenario"), 1)?;
    let m = resolve(args.basis_size, cfg.get("basis-size"), 22)?;
    let xi = resolve(args.xi, cfg.get("xi"), 1e-4)?;
    let starts = resolve(args.starts, cfg.get("starts"), 5)?;
    let scheme: DesignScheme = design.parse()?;
    let method: Method = method.parse()?;
    if !(scenario == 1 || scenario == 2) {
        return Err(Error::Config(format!("scenario must be 1 or 2, got {scenario}")));
    }
    ensure_out_dir(&out)?;

    let records = io::read_contours(&input)?;
    let labels: Vec<u8> = records
        .iter()
        .map(|r| {
            r.label.ok_or_else(|| {
                Error::Config(format!("record '{}' has no label; classification needs labels", r.id))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let spec = BasisSpec::new(m)?;
    let mut curves = fit_dataset(&records, spec)?;
    if scenario == 2 {
        curves = scenario2_deform(&curves, substream(seed, tag::SCENARIO2, 0).random())?;
    }

    let mut pipeline_cfg = PipelineConfig::new(spec).with_seed(seed);
    pipeline_cfg.xi = xi;
    pipeline_cfg.icf.n_starts = starts;
    let design_matrix = build_design(
        &curves,
        &labels,
        scheme,
        &pipeline_cfg,
        crate::classify::GroupingKind::for_method(method),
    )?;

    let grid = match method {
        Method::Gl1 | Method::Gl2 => HyperGrid::Lambdas(group_lasso::lambda_grid(&design_matrix)),
        Method::Pls | Method::Pcr => HyperGrid::default_components(&design_matrix),
    };
    let cv = CvConfig { folds, inner_folds: 5, seed };
    let mut report_out = cross_validate(&design_matrix, method, &grid, &cv)?;
    report_out.design = scheme.to_string();
    report_out.scenario = scenario.to_string();

    let file = out.join(format!("cv_{scheme}_{method}_s{scenario}.cvreport"));
    fs::write(&file, io::format_cv_report(&report_out))?;
    print!("{}", report::format_cv_summary(&report_out));
    Ok(())
}

fn run_simulate(args: SimulateArgs, cfg: &ConfigFile) -> Result<()> {
    let out = required(args.out, cfg.get("out"), "out")?;
    let sigmas = if args.sigma.is_empty() {
        cfg.get_list_f64("sigma")?.unwrap_or_else(|| vec![0.1, 0.5, 1.0])
    } else {
        args.sigma
    };
    let n = resolve(args.n, cfg.get("n"), 500)?;
    let seed = resolve(args.seed, cfg.get("seed"), 0)?;
    let starts = resolve(args.starts, cfg.get("starts"), 5)?;
    let template_arg: String = resolve(args.template, cfg.get("template"), "builtin".to_string())?;
    ensure_out_dir(&out)?;

    let template = if template_arg == "builtin" {
        builtin_template()
    } else {
        io::read_coefficients(Path::new(&template_arg))?
    };
    let icf = IcfConfig { n_starts: starts, ..IcfConfig::default() };
    let rows = run_alignment_study(&template, &sigmas, n, seed, &icf)?;
    fs::write(out.join("study.metrics"), io::format_study_rows(&rows))?;
    print!("{}", report::format_alignment_study(&rows)?);
    Ok(())
}

fn run_report(args: ReportArgs, cfg: &ConfigFile) -> Result<()> {
    let input: PathBuf = required(args.input, cfg.get("input"), "input")?;
    let out = required(args.out, cfg.get("out"), "out")?;
    ensure_out_dir(&out)?;

    let metric_files = io::files_with_extension(&input, "metrics")?;
    let cv_files = io::files_with_extension(&input, "cvreport")?;
    if metric_files.is_empty() && cv_files.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "no .metrics or .cvreport files under {}",
            input.display()
        )));
    }
    if !metric_files.is_empty() {
        let mut rows = Vec::new();
        for f in &metric_files {
            rows.extend(io::read_study_rows(f)?);
        }
        let table = report::format_alignment_study(&rows)?;
        fs::write(out.join("alignment_table.txt"), &table)?;
        print!("{table}");
    }
    if !cv_files.is_empty() {
        let reports = cv_files
            .iter()
            .map(|f| io::read_cv_report(f))
            .collect::<Result<Vec<_>>>()?;
        let table = report::format_classification_table(&reports)?;
        fs::write(out.join("classification_table.txt"), &table)?;
        print!("{table}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parses_flat_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# comment\nseed = 42\nbasis-size = 10\nsigma = 0.1, 0.5\n").unwrap();
        let cfg = ConfigFile::load(&path).unwrap();
        assert_eq!(cfg.get::<u64>("seed").unwrap(), Some(42));
        assert_eq!(cfg.get::<usize>("basis-size").unwrap(), Some(10));
        assert_eq!(cfg.get_list_f64("sigma").unwrap(), Some(vec![0.1, 0.5]));
        assert_eq!(cfg.get::<u64>("absent").unwrap(), None);
    }

    #[test]
    fn flag_beats_config_beats_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "seed = 42\n").unwrap();
        let cfg = ConfigFile::load(&path).unwrap();
        assert_eq!(resolve(Some(7u64), cfg.get("seed"), 0).unwrap(), 7);
        assert_eq!(resolve(None, cfg.get("seed"), 0).unwrap(), 42);
        assert_eq!(resolve(None, cfg.get("other-seed"), 5u64).unwrap(), 5);
    }

    #[test]
    fn bad_config_value_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "seed = not-a-number\n").unwrap();
        let cfg = ConfigFile::load(&path).unwrap();
        let err = resolve(None, cfg.get::<u64>("seed"), 0).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
