fn main() {
    std::process::exit(pucci_eig::cli::run(std::env::args_os()));
}
