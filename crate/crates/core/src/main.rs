fn main() {
    std::process::exit(pqipm::cli::run_solve_cli(std::env::args_os()));
}
