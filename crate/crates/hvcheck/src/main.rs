use clap::Parser;
use hvcheck::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
