fn main() {
    std::process::exit(bladesonar::cli::run(std::env::args_os()));
}
