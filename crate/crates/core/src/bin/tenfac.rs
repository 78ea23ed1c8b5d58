fn main() {
    std::process::exit(tenfac::cli::run(std::env::args_os()));
}
