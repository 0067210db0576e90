use clap::Parser;

use p3hull::cli::{run, Cli};

fn main() {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let code = run(&cli, &mut stdout.lock());
    std::process::exit(code);
}
