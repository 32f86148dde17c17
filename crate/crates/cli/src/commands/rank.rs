use std::io::Write;

use anyhow::Result;
use passguess_core::{rank_passphrase, NgramStore, RankerConfig};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{Format, RankArgs};
use crate::context::{numbered_lines, open_input, parse_phrase, stdout, Context, INPUT};
use crate::error::CliError;

const CSV_HEADER: &str = "line,low,high,unigram,low_bits,high_bits,unigram_bits,unfound_words";

/// Ranks one batch of lines at a time so memory stays bounded; output keeps
/// input order.
pub fn run(ctx: &Context, args: RankArgs) -> Result<()> {
    let format = ctx.format(Format::Json, &[Format::Json, Format::Csv, Format::Text])?;
    if args.batch == 0 {
        return Err(CliError::Usage("--batch must be at least 1".into()).into());
    }
    let store = ctx.store()?;
    let cfg = ctx.ranker();
    let mut out = stdout();
    if format == Format::Csv {
        writeln!(out, "{CSV_HEADER}")?;
    }

    let mut lines = numbered_lines(open_input(&args.input)?);
    let mut batch = Vec::with_capacity(args.batch);
    loop {
        batch.clear();
        for line in lines.by_ref().take(args.batch) {
            batch.push(line?);
        }
        if batch.is_empty() {
            break;
        }
        let rendered: Vec<Result<String>> = batch
            .par_iter()
            .map(|(n, raw)| render(*n, raw, &store, &cfg, format))
            .collect();
        // everything before the first bad line is still written
        for r in rendered {
            out.write_all(r?.as_bytes())?;
        }
    }
    Ok(())
}

fn bits(v: Option<f64>) -> String {
    v.map(|b| format!("{b:.6}")).unwrap_or_default()
}

fn render(
    line: usize,
    raw: &str,
    store: &NgramStore,
    cfg: &RankerConfig,
    format: Format,
) -> Result<String> {
    let phrase = parse_phrase(INPUT, line, raw)?;
    let est = rank_passphrase(&phrase, store, cfg);
    let phrase = phrase.canonical();
    Ok(match format {
        Format::Json => {
            let mut v = serde_json::to_value(&est)?;
            v["line"] = json!(line);
            v["phrase"] = json!(phrase);
            v.to_string() + "\n"
        }
        Format::Csv => format!(
            "{line},{},{},{},{},{},{},{}\n",
            est.low,
            est.high,
            est.unigram,
            bits(est.low.bits()),
            bits(est.high.bits()),
            bits(est.unigram.bits()),
            est.unfound_words.join(" ")
        ),
        Format::Text => {
            let b = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |b| format!("2^{b:.1}"));
            format!(
                "{line}: {phrase}\n  low {} high {} unigram {}\n",
                b(est.low.bits()),
                b(est.high.bits()),
                b(est.unigram.bits())
            )
        }
    })
}
