//! Batch driver for the `arf` command.

pub mod args;
mod commands;
pub mod output;
pub mod system;

use std::ffi::OsString;
use std::path::PathBuf;

use arf_core::sieve::{FunctionKind, FunctionTable, SieveConfig, TableCache};
use arf_core::{sieve_window, ArfError, Result};
use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command, GlobalArgs};

pub const CACHE_ENV: &str = "ARF_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".arf-cache";

/// Process exit code for an error.
pub fn exit_code(err: &ArfError) -> i32 {
    match err {
        ArfError::Usage(_) | ArfError::Coverage { .. } => 2,
        ArfError::Resource { .. } => 3,
        ArfError::Consistency(_) => 4,
        ArfError::Format(_) | ArfError::Corruption(_) | ArfError::Io(_) => 1,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(&cli.global, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("arf: {e}");
            exit_code(&e)
        }
    }
}

fn execute(global: &GlobalArgs, command: Command) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = global.threads {
        if n == 0 {
            return Err(ArfError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| ArfError::Usage(format!("cannot start thread pool: {e}")))?;
    let ctx = Context::new(global);
    pool.install(|| commands::dispatch(&ctx, command))
}

/// Table source shared by all subcommands.
pub(crate) struct Context {
    pub global: GlobalArgs,
    pub cache: TableCache,
}

impl Context {
    fn new(global: &GlobalArgs) -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| global.cache_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        let config = SieveConfig {
            budget: global.budget,
            ..SieveConfig::default()
        };
        Context {
            global: global.clone(),
            cache: TableCache::new(dir, config),
        }
    }

    pub fn sieve_config(&self) -> &SieveConfig {
        self.cache.config()
    }

    /// Values of `kind` on `[1, limit]`, through the cache.
    pub fn table(&self, kind: FunctionKind, limit: u64) -> Result<FunctionTable> {
        match kind {
            FunctionKind::Custom => Err(ArfError::Usage(
                "custom tables cannot be sieved; pick a named function".into(),
            )),
            FunctionKind::Unit => sieve_window(kind, 1, limit.max(1), self.sieve_config()),
            _ => self.cache.table(kind, limit.max(1)),
        }
    }
}
