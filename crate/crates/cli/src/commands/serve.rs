use std::net::SocketAddr;

use anyhow::{Context as _, Result};
use passguess_service::{serve, AppState, ServiceConfig};

use crate::args::ServeArgs;
use crate::context::Context;
use crate::error::CliError;

pub fn run(ctx: &Context, args: ServeArgs) -> Result<()> {
    let store = ctx.store()?;
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .map_err(|_| CliError::Usage(format!("bad listen address {}:{}", args.host, args.port)))?;
    let cfg = ServiceConfig {
        data_dir: args.data_dir,
        tolerance: ctx.tolerance()?,
        policy: ctx.policy(&store),
        ranker: ctx.ranker(),
        expose_cue: args.expose_cue,
    };
    let state = AppState::open(store, cfg)?;
    eprintln!("listening on http://{addr}");
    tokio::runtime::Runtime::new()
        .context("starting runtime")?
        .block_on(serve(state, addr))?;
    Ok(())
}
