fn main() {
    std::process::exit(thin_oblique::cli::run(std::env::args_os()));
}
