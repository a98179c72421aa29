fn main() {
    std::process::exit(crmgg::cli::cli_dispatch(std::env::args_os()));
}
