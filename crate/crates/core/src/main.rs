fn main() {
    std::process::exit(panache::cli::main_from(std::env::args_os()));
}
