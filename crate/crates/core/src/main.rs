fn main() {
    std::process::exit(gurarii::cli::main_entry());
}
