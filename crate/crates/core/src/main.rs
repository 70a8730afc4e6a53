fn main() {
    std::process::exit(ncsphere::cli::run(std::env::args_os()));
}
