fn main() {
    std::process::exit(akmass_cli::run_cli(std::env::args_os()));
}
