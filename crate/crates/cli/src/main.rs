use clap::Parser;

use setout_cli::cmd::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SETOUT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is set once");
    }
    std::process::exit(run(cli));
}
