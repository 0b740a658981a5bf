//! Alignment accuracy benchmark: generate deformed pre-shapes at several
//! noise levels, re-estimate the deformations, report cyclic errors.
//!
//! A reduced-size run of the study behind the `simulate` subcommand
//! (n = 100 here; the full benchmark uses n = 500).
//!
//! Run with: cargo run --release --example alignment_study

use multishape::deformation::IcfConfig;
use multishape::report::format_alignment_study;
use multishape::synth::{builtin_template, run_alignment_study};

fn main() -> multishape::Result<()> {
    let rows = run_alignment_study(
        &builtin_template(),
        &[0.1, 0.5, 1.0],
        100,
        2024,
        &IcfConfig::default(),
    )?;
    print!("{}", format_alignment_study(&rows)?);
    Ok(())
}
