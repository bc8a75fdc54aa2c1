fn main() {
    std::process::exit(chaplygin_cli::cli_run(std::env::args_os()));
}
