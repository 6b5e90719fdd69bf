fn main() {
    std::process::exit(agdistill_cli::run_from(std::env::args_os()));
}
