fn main() {
    std::process::exit(invariant_ideals::cli::run(std::env::args_os()));
}
