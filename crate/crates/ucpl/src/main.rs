use clap::Parser;
use ucpl::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    let output = cli::run(&cli);
    print!("{}", output.text);
    std::process::exit(output.exit_code);
}
