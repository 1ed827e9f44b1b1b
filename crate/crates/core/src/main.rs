fn main() {
    std::process::exit(delaytherm::io::cli::main());
}
