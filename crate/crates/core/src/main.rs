fn main() {
    std::process::exit(holey::cli::run(std::env::args_os()));
}
