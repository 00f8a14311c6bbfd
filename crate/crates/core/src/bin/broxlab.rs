use std::process::ExitCode;

use broxlab::cli;

fn main() -> ExitCode {
    match cli::threads_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("broxlab: cannot configure the thread pool: {e}");
                return ExitCode::from(cli::EXIT_USAGE as u8);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("broxlab: {e}");
            return ExitCode::from(cli::EXIT_USAGE as u8);
        }
    }
    ExitCode::from(cli::main_with(std::env::args_os()) as u8)
}
