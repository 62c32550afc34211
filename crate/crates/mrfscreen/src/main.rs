use clap::Parser;
use mrfscreen::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Err(err) = run(&cli, &mut std::io::stdout().lock()) {
        eprintln!("error: {err:#}");
        std::process::exit(mrfscreen::exit_code(&err));
    }
}
