use std::io::Write;

use anyhow::Result;
use passguess_core::report::{
    audit_estimate, coverage_row, curve_from_guesses, CoverageAggregate, KnownPhrases, PhraseHit,
};
use passguess_core::{rank_passphrase, Estimator};
use serde_json::json;

use crate::args::{Format, ReportCommand};
use crate::context::{
    numbered_lines, open_input, parse_phrase, stdout, write_json_line, Context, INPUT,
};

pub fn run(ctx: &Context, cmd: ReportCommand) -> Result<()> {
    let mut out = stdout();
    match cmd {
        ReportCommand::Curve { input, estimator } => {
            let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
            let store = ctx.store()?;
            let cfg = ctx.ranker();
            let estimator: Estimator = estimator.into();
            // only the guess-numbers are kept, never whole estimates
            let mut guesses = Vec::new();
            for line in numbered_lines(open_input(&input)?) {
                let (n, raw) = line?;
                let phrase = parse_phrase(INPUT, n, &raw)?;
                let est = rank_passphrase(&phrase, &store, &cfg);
                guesses.push(estimator.pick(&est).clone());
            }
            let points = curve_from_guesses(guesses);
            if format == Format::Csv {
                writeln!(out, "log2_guesses,fraction_guessed")?;
                for p in points {
                    writeln!(out, "{},{}", p.log2_guesses, p.fraction_guessed)?;
                }
            } else {
                for p in points {
                    write_json_line(&mut out, &p)?;
                }
            }
        }
        ReportCommand::Coverage { input } => {
            let format = ctx.format(Format::Json, &[Format::Json, Format::Csv])?;
            let store = ctx.store()?;
            let cfg = ctx.ranker();
            if format == Format::Csv {
                writeln!(
                    out,
                    "phrase_id,word_count,slang_hits,not_found,low_guessable,high_guessable,unigram_guessable"
                )?;
            }
            let mut aggregate = CoverageAggregate::default();
            for line in numbered_lines(open_input(&input)?) {
                let (n, raw) = line?;
                let phrase = parse_phrase(INPUT, n, &raw)?;
                let est = rank_passphrase(&phrase, &store, &cfg);
                let row = coverage_row(n, &phrase, &store, &est);
                if format == Format::Csv {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        row.phrase_id,
                        row.word_count,
                        row.slang_hits,
                        row.not_found_count,
                        row.low_guessable,
                        row.high_guessable,
                        row.unigram_guessable
                    )?;
                } else {
                    write_json_line(&mut out, &row)?;
                }
                aggregate.push(&row);
            }
            if format == Format::Json {
                write_json_line(&mut out, &json!({ "aggregate": aggregate }))?;
            }
        }
        ReportCommand::Tolerance { input } => {
            ctx.format(Format::Json, &[Format::Json])?;
            let store = ctx.store()?;
            let cfg = ctx.ranker();
            let tol = ctx.tolerance()?;
            let (mut with_unfound, mut rescued) = (0usize, 0usize);
            for line in numbered_lines(open_input(&input)?) {
                let (n, raw) = line?;
                let phrase = parse_phrase(INPUT, n, &raw)?;
                let est = rank_passphrase(&phrase, &store, &cfg);
                if let Some(row) = audit_estimate(n, &est, &store, &tol) {
                    with_unfound += 1;
                    rescued += usize::from(row.fully_rescued);
                    write_json_line(&mut out, &row)?;
                }
            }
            write_json_line(
                &mut out,
                &json!({ "summary": { "phrasesWithUnfound": with_unfound, "fullyRescued": rescued } }),
            )?;
        }
        ReportCommand::Phrasedict { input, known } => {
            ctx.format(Format::Json, &[Format::Json])?;
            let known = KnownPhrases::read(open_input(&known)?)?;
            let mut phrases = 0usize;
            let mut hits = 0usize;
            for line in numbered_lines(open_input(&input)?) {
                let (n, raw) = line?;
                let phrase = parse_phrase(INPUT, n, &raw)?;
                phrases += 1;
                if known.contains(&phrase) {
                    hits += 1;
                    let hit = PhraseHit {
                        phrase_id: n,
                        phrase: phrase.into(),
                    };
                    write_json_line(&mut out, &hit)?;
                }
            }
            write_json_line(
                &mut out,
                &json!({ "summary": { "phrases": phrases, "hits": hits } }),
            )?;
        }
    }
    Ok(())
}
