use std::io::Read;

use anyhow::{Context as _, Result};
use passguess_core::{
    extract_ngrams, read_lexicon, save_store, ExtractOptions, NgramStore, StoreConfig,
};

use crate::args::{Format, IngestArgs};
use crate::context::{open_input, stdout, write_json_line, Context};
use crate::error::CliError;

pub fn run(ctx: &Context, args: IngestArgs) -> Result<()> {
    let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
    if !(1..=5).contains(&args.max_n) {
        return Err(CliError::Usage(format!("--max-n {} outside 1..=5", args.max_n)).into());
    }
    let config = StoreConfig {
        blacklist_k: ctx
            .global
            .blacklist_k
            .unwrap_or(StoreConfig::default().blacklist_k),
        caps: args.caps.into_iter().collect(),
        lexicon_size_override: args.lexicon_size,
    };
    let mut builder = NgramStore::builder().config(config);
    let opts = ExtractOptions {
        max_n: args.max_n,
        sentence_boundaries: args.sentence_boundaries,
    };
    for path in &args.corpus {
        let mut text = String::new();
        open_input(path)?
            .read_to_string(&mut text)
            .with_context(|| format!("reading {}", path.display()))?;
        let counts =
            extract_ngrams(&text, opts).with_context(|| format!("counting {}", path.display()))?;
        builder.add_counts(counts);
    }
    for (file, proper) in [(&args.proper_nouns, true), (&args.slang, false)] {
        let Some(file) = file else { continue };
        if !file.is_file() {
            anyhow::bail!("lexicon {} not found", file.display());
        }
        for word in read_lexicon(file)? {
            if proper {
                builder.add_proper_noun(&word)?;
            } else {
                builder.add_slang(&word)?;
            }
        }
    }
    let store = builder.build();
    save_store(&store, &args.out)?;

    let stats = store.stats();
    let mut out = stdout();
    match format {
        Format::Text => {
            use std::io::Write;
            for (i, c) in stats.counts.iter().enumerate() {
                writeln!(out, "{}-grams: {c}", i + 1)?;
            }
            writeln!(out, "tokens: {}", stats.total_tokens)?;
        }
        _ => write_json_line(&mut out, &stats)?,
    }
    Ok(())
}
