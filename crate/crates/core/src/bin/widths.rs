use clap::Parser;
use swidths::cli::RunConfig;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let config = RunConfig::parse();
    if let Err(e) = config.run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
