use clap::Parser;

fn main() {
    let args = markerlab::cli::Args::parse();
    std::process::exit(markerlab::cli::run(&args));
}
