fn main() {
    std::process::exit(ulocal_cli::cli_run(std::env::args_os()));
}
