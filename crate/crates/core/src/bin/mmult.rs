fn main() {
    std::process::exit(martingale_multipliers::harness::cli::run(std::env::args_os()));
}
