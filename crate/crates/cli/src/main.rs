//! `longsum`: batch pipeline over JSONL corpora.
//!
//! Exit codes: 0 success, 1 when some records (or the run) failed, 2 for usage errors.

use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut stdout = std::io::stdout().lock();
    ExitCode::from(longsum_cli::run(std::env::args(), &mut stdout))
}
