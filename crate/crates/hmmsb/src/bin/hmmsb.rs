fn main() { std::process::exit(hmmsb::cli::run()); }
