use std::io::Write;

use anyhow::Result;
use passguess_core::{check_policy, PolicyReport};
use serde_json::json;

use crate::args::{Format, PolicyArgs};
use crate::context::{numbered_lines, open_input, stdout, write_json_line, Context};
use crate::error::CliError;

/// A failing policy is reported as data; the process still exits 0.
pub fn run(ctx: &Context, args: PolicyArgs) -> Result<()> {
    let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
    let store = ctx.store()?;
    let mut cfg = ctx.policy(&store);
    if args.no_proper_noun {
        cfg.require_proper_noun = false;
    }
    if let Some(m) = args.min_words {
        cfg.min_words = m;
    }
    cfg.validate().map_err(CliError::Usage)?;

    let mut out = stdout();
    if let Some(phrase) = &args.passphrase {
        let report = check_policy(phrase, &store, &cfg);
        return emit(&mut out, format, None, &report);
    }
    let input = args.input.as_deref().expect("clap requires one of the two");
    for line in numbered_lines(open_input(input)?) {
        let (n, raw) = line?;
        emit(&mut out, format, Some(n), &check_policy(&raw, &store, &cfg))?;
    }
    Ok(())
}

fn emit(
    out: &mut impl Write,
    format: Format,
    line: Option<usize>,
    report: &PolicyReport,
) -> Result<()> {
    if format == Format::Text {
        let prefix = line.map(|n| format!("{n}: ")).unwrap_or_default();
        let verdict = if report.acceptable {
            "acceptable"
        } else {
            "rejected"
        };
        writeln!(out, "{prefix}{verdict}")?;
        for f in &report.violations {
            writeln!(
                out,
                "  violation {}: {}",
                serde_json::to_value(f.code)?.as_str().unwrap_or(""),
                f.message
            )?;
        }
        for f in &report.recommendations {
            writeln!(
                out,
                "  advice {}: {}",
                serde_json::to_value(f.code)?.as_str().unwrap_or(""),
                f.message
            )?;
        }
        return Ok(());
    }
    match line {
        Some(n) => {
            let mut v = serde_json::to_value(report)?;
            v["line"] = json!(n);
            write_json_line(out, &v)
        }
        None => write_json_line(out, report),
    }
}
