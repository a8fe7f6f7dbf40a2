fn main() { std::process::exit(normtile::cli::run(std::env::args_os())); }
