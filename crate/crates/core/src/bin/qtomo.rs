fn main() {
    std::process::exit(qtomo::cli::main_with(std::env::args_os()));
}
