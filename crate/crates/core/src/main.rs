fn main() {
    std::process::exit(shtomo::cli::cli_main());
}
