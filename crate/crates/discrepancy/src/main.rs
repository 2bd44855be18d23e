use clap::Parser;

fn main() {
    let cli = discrepancy::cli::Cli::parse();
    std::process::exit(discrepancy::cli::run(cli));
}
