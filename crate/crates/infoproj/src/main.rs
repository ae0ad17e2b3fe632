fn main() {
    std::process::exit(infoproj::cli::main_with(std::env::args_os()));
}
