fn main() {
    std::process::exit(catperc_harness::cli::cli_main(std::env::args_os()));
}
