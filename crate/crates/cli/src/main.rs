fn main() {
    std::process::exit(gdid_cli::main_with_args());
}
