use clap::Parser;

fn main() {
    let args = fgnrd::cli::Args::parse();
    std::process::exit(fgnrd::cli::main_with(args));
}
