fn main() {
    std::process::exit(invthresh_cli::run(std::env::args_os()));
}
