use std::io::Write;

use anyhow::Result;
use num_bigint::BigUint;
use passguess_core::theory::{
    blacklist_mass, exhaustive_bits, guesswork_curve, join_count, marginal_guesswork,
    multiplier_bits, Composition, Distribution, Guesswork,
};
use serde_json::json;

use crate::args::{DistArgs, Format, TheoryCommand};
use crate::context::{open_input, stdout, write_json_line, Context};
use crate::error::CliError;

pub fn run(ctx: &Context, cmd: TheoryCommand) -> Result<()> {
    let mut out = stdout();
    match cmd {
        TheoryCommand::Guesswork { dist, alpha } => {
            let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
            let d = distribution(ctx, &dist)?;
            for a in alpha {
                let guesses = match marginal_guesswork(&d, a)? {
                    Guesswork::Index(i) => Some(i),
                    Guesswork::Unreachable => None,
                };
                if format == Format::Text {
                    let g = guesses.map_or_else(|| "unreachable".to_owned(), |g| g.to_string());
                    writeln!(out, "{a}\t{g}")?;
                } else {
                    let log2 = guesses.map(|g| (g as f64).log2());
                    write_json_line(
                        &mut out,
                        &json!({ "alpha": a, "guesses": guesses, "log2Guesses": log2 }),
                    )?;
                }
            }
        }
        TheoryCommand::Curve { dist, stride } => {
            let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
            let d = distribution(ctx, &dist)?;
            let points = guesswork_curve(&d, stride);
            if format == Format::Csv {
                writeln!(out, "index,cumulative_mass,log2_index")?;
                for p in points {
                    writeln!(out, "{},{},{}", p.index, p.cumulative_mass, p.log2_index)?;
                }
            } else {
                for p in points {
                    write_json_line(&mut out, &p)?;
                }
            }
        }
        TheoryCommand::Joins { compositions } => {
            let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
            let store = ctx.store()?;
            for c in compositions {
                let comp: Composition = c.parse()?;
                let j = join_count(&store, &comp)?;
                if format == Format::Text {
                    let bits = j.bits.map_or_else(|| "-".to_owned(), |b| format!("{b:.1}"));
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{bits}",
                        j.composition, j.word_count, j.count
                    )?;
                } else {
                    write_json_line(&mut out, &j)?;
                }
            }
        }
        TheoryCommand::Bits { alphabet, length } => {
            let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
            let bits = exhaustive_bits(alphabet, length)?;
            if format == Format::Text {
                writeln!(out, "{bits:.3}")?;
            } else {
                write_json_line(
                    &mut out,
                    &json!({ "alphabet": alphabet, "length": length, "bits": bits }),
                )?;
            }
        }
        TheoryCommand::Mass {
            n,
            m,
            top_k,
            renormalize,
        } => {
            let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
            let store = ctx.store()?;
            let k = top_k.unwrap_or_else(|| ctx.blacklist_k(&store));
            let mass = blacklist_mass(&store, n, k, m, renormalize)?;
            if format == Format::Text {
                writeln!(out, "top {m}: {:.6}", mass.mass_top_m)?;
                writeln!(
                    out,
                    "top {m} after removing top {k}: {:.6}",
                    mass.mass_top_m_after_removing_top_k
                )?;
            } else {
                let mut v = serde_json::to_value(mass)?;
                v["n"] = json!(n);
                v["m"] = json!(m);
                v["topK"] = json!(k);
                write_json_line(&mut out, &v)?;
            }
        }
        TheoryCommand::Multiplier { base, lexicon } => {
            let format = ctx.format(Format::Json, &[Format::Json, Format::Text])?;
            let b: BigUint = base.parse().map_err(|_| {
                CliError::Usage(format!("--base {base:?} is not a non-negative integer"))
            })?;
            let bits = multiplier_bits(&b, lexicon)?;
            if format == Format::Text {
                writeln!(out, "{bits:.3}")?;
            } else {
                write_json_line(
                    &mut out,
                    &json!({ "base": base, "lexicon": lexicon, "bits": bits }),
                )?;
            }
        }
    }
    Ok(())
}

fn distribution(ctx: &Context, args: &DistArgs) -> Result<Distribution> {
    if let Some(path) = &args.dist {
        return Ok(Distribution::read(open_input(path)?)?);
    }
    if let Some(n) = args.uniform {
        if n == 0 {
            return Err(CliError::Usage("--uniform must be at least 1".into()).into());
        }
        return Ok(Distribution::uniform(n));
    }
    let n = args.table.expect("clap requires one source");
    Ok(Distribution::from_table(&ctx.store()?, n)?)
}
