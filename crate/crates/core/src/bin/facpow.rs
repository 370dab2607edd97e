fn main() {
    std::process::exit(factorial_powers::cli::run(std::env::args_os()));
}
