use clap::Parser;

use mvboot::cli::{run, Cli};

fn main() {
    // MVBOOT_THREADS caps the worker pool; results never depend on it
    // because every parallel map collects in index order.
    if let Ok(raw) = std::env::var("MVBOOT_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                let e = mvboot::Error::InvalidConfig(format!(
                    "MVBOOT_THREADS must be a positive integer, got {raw:?}"
                ));
                eprintln!("{}", e.machine_line());
                std::process::exit(e.exit_code());
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("{}", e.machine_line());
            std::process::exit(e.exit_code());
        }
    }
}
