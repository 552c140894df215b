fn main() {
    std::process::exit(decompsum::cli::run(std::env::args_os()));
}
