fn main() {
    std::process::exit(qac_core::cli::cli_main());
}
