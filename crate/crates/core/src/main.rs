fn main() {
    std::process::exit(dressed_zrp::cli::run(std::env::args_os()));
}
