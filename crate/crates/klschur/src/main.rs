use clap::Parser;

fn main() {
    let cli = klschur::cli::Cli::parse();
    std::process::exit(klschur::cli::run(cli));
}
